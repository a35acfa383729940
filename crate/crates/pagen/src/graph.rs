//! Growing directed multigraph with loops.
//!
//! Vertices are 1-based ids. An edge is a record `(tail, head)` with
//! `tail >= head`: the tail is the newer endpoint (the vertex that created
//! the edge) and the head is the target end. A loop has `tail == head` and
//! contributes 1 to the in-degree and 1 to the out-degree of its vertex,
//! so 2 to the total degree. With that convention the total degree always
//! sums to twice the edge count and the probability that a uniformly drawn
//! edge has head `j` is exactly `in_degree(j) / edge_count`.
//!
//! Records live in creation order, which pins the layout of grown graphs:
//! after the `n0 * m` seed records, vertex `v > n0` owns exactly the `m`
//! consecutive records starting at `n0 * m + (v - n0 - 1) * m`. Only heads
//! are stored — the tail of a grown record follows from its position — so
//! an edge costs four bytes and the pair multiplicity `e(i, j)` is a scan
//! of the larger endpoint's record slice.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};

/// 1-based vertex id.
pub type VertexId = u32;

/// One edge of the multigraph, oriented from the larger id to the smaller.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EdgeRecord {
    /// Newer endpoint; the vertex that created the edge.
    pub tail: VertexId,
    /// Target end, `head <= tail`.
    pub head: VertexId,
}

/// Shape of the initial graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeedKind {
    /// Every seed vertex carries `m` loops.
    SelfLoops,
    /// `m` superimposed copies of the cycle `1-2-...-n0-1`; requires `n0 >= 2`.
    Cycle,
}

/// Initial graph specification: `n0` vertices, `m * n0` edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeedSpec {
    pub n0: u32,
    pub kind: SeedKind,
}

impl Default for SeedSpec {
    fn default() -> Self {
        SeedSpec { n0: 1, kind: SeedKind::SelfLoops }
    }
}

/// Growing directed multigraph with `m * n` edges after `n` vertices.
///
/// Multi-edges and loops are first-class and never deduplicated. The edge
/// array is append-only and kept in creation order, which is what makes
/// uniform edge sampling an O(1) indexed lookup.
#[derive(Debug, Clone)]
pub struct MultiGraph {
    m: u32,
    n0: u32,
    heads: Vec<VertexId>,
    /// Tails of the seed records; grown records derive theirs from the
    /// position.
    seed_tails: Vec<VertexId>,
    /// Explicit tails for graphs built from arbitrary records.
    tails: Option<Vec<VertexId>>,
    in_deg: Vec<u32>,
    /// Out-degrees of the seed vertices (cycle seeds are uneven); grown
    /// vertices always have out-degree `m`.
    seed_out: Vec<u32>,
    /// Out-record positions grouped by tail, for graphs whose records are
    /// not in growth layout (see [`MultiGraph::from_edges`]).
    out_index: Option<OutIndex>,
}

#[derive(Debug, Clone)]
struct OutIndex {
    offsets: Vec<u32>,
    positions: Vec<u32>,
}

impl OutIndex {
    fn build(n: u32, tails: &[VertexId]) -> Self {
        let mut offsets = vec![0u32; n as usize + 2];
        for &t in tails {
            offsets[t as usize + 1] += 1;
        }
        for i in 1..offsets.len() {
            offsets[i] += offsets[i - 1];
        }
        let mut positions = vec![0u32; tails.len()];
        let mut cursor = offsets.clone();
        for (pos, &t) in tails.iter().enumerate() {
            positions[cursor[t as usize] as usize] = pos as u32;
            cursor[t as usize] += 1;
        }
        OutIndex { offsets, positions }
    }
}

impl MultiGraph {
    /// Builds the seed graph for `spec` with out-degree parameter `m`.
    pub fn seeded(spec: SeedSpec, m: u32) -> Result<Self> {
        if m == 0 {
            return Err(Error::Config("m must be positive".into()));
        }
        if spec.n0 == 0 {
            return Err(Error::Config("n0 must be at least 1".into()));
        }
        if spec.kind == SeedKind::Cycle && spec.n0 < 2 {
            return Err(Error::Config("cycle seed requires n0 >= 2".into()));
        }
        let n0 = spec.n0;
        let mut g = MultiGraph {
            m,
            n0,
            heads: Vec::with_capacity((m as usize) * (n0 as usize)),
            seed_tails: Vec::with_capacity((m as usize) * (n0 as usize)),
            tails: None,
            in_deg: vec![0; n0 as usize + 1],
            seed_out: vec![0; n0 as usize + 1],
            out_index: None,
        };
        let push_seed = |g: &mut Self, tail: VertexId, head: VertexId| {
            g.heads.push(head);
            g.seed_tails.push(tail);
            g.in_deg[head as usize] += 1;
            g.seed_out[tail as usize] += 1;
        };
        match spec.kind {
            SeedKind::SelfLoops => {
                for v in 1..=n0 {
                    for _ in 0..m {
                        push_seed(&mut g, v, v);
                    }
                }
            }
            SeedKind::Cycle => {
                for _ in 0..m {
                    for v in 2..=n0 {
                        push_seed(&mut g, v, v - 1);
                    }
                    push_seed(&mut g, n0, 1);
                }
            }
        }
        debug_assert_eq!(g.heads.len(), (m as usize) * (n0 as usize));
        Ok(g)
    }

    /// Builds an arbitrary multigraph from explicit records.
    ///
    /// This relaxes the `m * n` edge-count invariant of grown graphs so the
    /// analytics can run on hand-built graphs (paths, stars, ...); `m` is
    /// only used as the nominal out-degree for serialization and growth.
    pub fn from_edges(n: u32, m: u32, records: &[(VertexId, VertexId)]) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::Config("n and m must be positive".into()));
        }
        let mut heads = Vec::with_capacity(records.len());
        let mut tails = Vec::with_capacity(records.len());
        let mut in_deg = vec![0u32; n as usize + 1];
        for &(tail, head) in records {
            if tail < head {
                return Err(Error::Precondition(format!(
                    "edge ({tail}, {head}) is not oriented tail >= head"
                )));
            }
            if head == 0 || tail > n {
                return Err(Error::Precondition(format!(
                    "edge ({tail}, {head}) out of range 1..={n}"
                )));
            }
            heads.push(head);
            tails.push(tail);
            in_deg[head as usize] += 1;
        }
        let out_index = Some(OutIndex::build(n, &tails));
        Ok(MultiGraph {
            m,
            n0: n,
            heads,
            seed_tails: Vec::new(),
            tails: Some(tails),
            in_deg,
            seed_out: Vec::new(),
            out_index,
        })
    }

    /// Pre-sizes the internal storage for `additional` more vertices, so a
    /// long growth run never pays for reallocation mid-flight.
    pub fn reserve_vertices(&mut self, additional: u64) {
        self.heads.reserve((self.m as u64 * additional) as usize);
        self.in_deg.reserve(additional as usize);
    }

    /// Number of vertices `n`.
    pub fn vertex_count(&self) -> u32 {
        (self.in_deg.len() - 1) as u32
    }

    /// Number of edge records (`m * n` for grown graphs).
    pub fn edge_count(&self) -> usize {
        self.heads.len()
    }

    /// Out-degree of every grown vertex.
    pub fn m(&self) -> u32 {
        self.m
    }

    /// Seed size `n0`.
    pub fn seed_size(&self) -> u32 {
        self.n0
    }

    fn seed_len(&self) -> usize {
        (self.n0 as usize) * (self.m as usize)
    }

    fn tail_at(&self, position: usize) -> VertexId {
        if let Some(tails) = &self.tails {
            return tails[position];
        }
        let seed_len = self.seed_len();
        if position < seed_len {
            self.seed_tails[position]
        } else {
            self.n0 + 1 + ((position - seed_len) / self.m as usize) as VertexId
        }
    }

    /// The record at a creation-order position.
    pub fn edge_at(&self, position: usize) -> EdgeRecord {
        EdgeRecord { tail: self.tail_at(position), head: self.heads[position] }
    }

    /// Edge records in creation order.
    pub fn iter_edges(&self) -> impl Iterator<Item = EdgeRecord> + '_ {
        (0..self.heads.len()).map(|p| self.edge_at(p))
    }

    /// Total degree of `v`; a loop counts 2.
    pub fn degree(&self, v: VertexId) -> u32 {
        self.in_deg[v as usize] + self.out_degree(v)
    }

    /// Number of records with head `v`; a loop counts 1.
    pub fn in_degree(&self, v: VertexId) -> u32 {
        self.in_deg[v as usize]
    }

    /// Number of records with tail `v`.
    pub fn out_degree(&self, v: VertexId) -> u32 {
        if let Some(index) = &self.out_index {
            index.offsets[v as usize + 1] - index.offsets[v as usize]
        } else if v > self.n0 {
            self.m
        } else {
            self.seed_out[v as usize]
        }
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> {
        1..=self.vertex_count()
    }

    /// Number of edges between `i` and `j` (loops included when `i == j`).
    pub fn edge_multiplicity(&self, i: VertexId, j: VertexId) -> Result<u32> {
        let n = self.vertex_count();
        if i == 0 || j == 0 || i > n || j > n {
            return Err(Error::Precondition(format!(
                "vertex pair ({i}, {j}) out of range 1..={n}"
            )));
        }
        Ok(self.multiplicity_unchecked(i, j))
    }

    pub(crate) fn multiplicity_unchecked(&self, i: VertexId, j: VertexId) -> u32 {
        let (lo, hi) = if i <= j { (i, j) } else { (j, i) };
        // Every record between lo and hi has tail = hi, so only hi's
        // out-records need scanning.
        if let Some(index) = &self.out_index {
            let range =
                index.offsets[hi as usize] as usize..index.offsets[hi as usize + 1] as usize;
            return index.positions[range]
                .iter()
                .filter(|&&p| self.heads[p as usize] == lo)
                .count() as u32;
        }
        if hi > self.n0 {
            let m = self.m as usize;
            let start = self.seed_len() + (hi as usize - self.n0 as usize - 1) * m;
            self.heads[start..start + m].iter().filter(|&&h| h == lo).count() as u32
        } else {
            // Both endpoints in the seed: scan the seed prefix.
            self.seed_tails
                .iter()
                .zip(&self.heads)
                .filter(|&(&t, &h)| t == hi && h == lo)
                .count() as u32
        }
    }

    /// Adds vertex `n + 1` with `m` edges to `targets` and returns its id.
    ///
    /// Every target must lie in `1..=n+1`; a target of `n + 1` is a loop.
    pub fn add_vertex(&mut self, targets: &[VertexId]) -> Result<VertexId> {
        if targets.len() != self.m as usize {
            return Err(Error::Precondition(format!(
                "expected {} targets, got {}",
                self.m,
                targets.len()
            )));
        }
        let new = self.vertex_count() + 1;
        for &t in targets {
            if t == 0 || t > new {
                return Err(Error::Precondition(format!(
                    "target {t} out of range 1..={new}"
                )));
            }
        }
        self.in_deg.push(0);
        for &t in targets {
            self.heads.push(t);
            self.in_deg[t as usize] += 1;
        }
        if let Some(tails) = &mut self.tails {
            tails.extend(std::iter::repeat_n(new, targets.len()));
        }
        if let Some(index) = &mut self.out_index {
            // The new vertex's records sit at the end of the edge array,
            // which is also where its position group belongs.
            for pos in (self.heads.len() - targets.len())..self.heads.len() {
                index.positions.push(pos as u32);
            }
            index.offsets.push(self.heads.len() as u32);
        }
        Ok(new)
    }

    /// Writes the edge-list format: a `# pagen-edgelist` header, optional
    /// extra comment lines, then one `tail<TAB>head` line per record in
    /// creation order.
    pub fn write_edge_list<W: Write>(&self, mut w: W, comments: &[String]) -> std::io::Result<()> {
        writeln!(w, "# pagen-edgelist m={} n0={}", self.m, self.n0)?;
        for c in comments {
            writeln!(w, "# {c}")?;
        }
        for e in self.iter_edges() {
            writeln!(w, "{}\t{}", e.tail, e.head)?;
        }
        Ok(())
    }

    /// Parses the edge-list format written by [`MultiGraph::write_edge_list`].
    pub fn read_edge_list<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines().enumerate();
        let (m, n0) = match lines.next() {
            Some((_, line)) => parse_header(&line?)?,
            None => {
                return Err(Error::Parse { line: 1, message: "empty input".into() });
            }
        };
        let mut records: Vec<(VertexId, VertexId)> = Vec::new();
        for (idx, line) in lines {
            let line = line?;
            let lineno = idx + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let (tail, head) = parse_record(trimmed).map_err(|message| Error::Parse {
                line: lineno,
                message,
            })?;
            if tail < head {
                return Err(Error::Parse {
                    line: lineno,
                    message: format!("tail {tail} < head {head} violates edge orientation"),
                });
            }
            records.push((tail, head));
        }
        if !records.len().is_multiple_of(m as usize) {
            return Err(Error::Parse {
                line: records.len() + 1,
                message: format!("edge count {} not divisible by m={m}", records.len()),
            });
        }
        let max_tail = records.iter().map(|r| r.0).max().unwrap_or(0);
        let n = max_tail.max(n0);
        if records.len() != (m as usize) * (n as usize) {
            return Err(Error::Parse {
                line: records.len() + 1,
                message: format!(
                    "{} edges but m*n = {} for n={n}",
                    records.len(),
                    (m as usize) * (n as usize)
                ),
            });
        }
        let mut g = Self::from_edges(n, m, &records)?;
        g.n0 = n0;
        // Every grown vertex must have created exactly m edges.
        for v in (n0 + 1)..=n {
            if g.out_degree(v) != m {
                return Err(Error::Validation(format!(
                    "vertex {v} has out-degree {} instead of m={m}",
                    g.out_degree(v)
                )));
            }
        }
        Ok(g)
    }
}

fn parse_header(line: &str) -> Result<(u32, u32)> {
    let err = |message: String| Error::Parse { line: 1, message };
    let rest = line
        .strip_prefix("# pagen-edgelist ")
        .ok_or_else(|| err("expected '# pagen-edgelist m=<m> n0=<n0>' header".into()))?;
    let mut m = None;
    let mut n0 = None;
    for field in rest.split_whitespace() {
        if let Some(v) = field.strip_prefix("m=") {
            m = v.parse::<u32>().ok();
        } else if let Some(v) = field.strip_prefix("n0=") {
            n0 = v.parse::<u32>().ok();
        }
    }
    match (m, n0) {
        (Some(m), Some(n0)) if m > 0 && n0 > 0 => Ok((m, n0)),
        _ => Err(err("header must carry positive m= and n0= fields".into())),
    }
}

fn parse_record(line: &str) -> std::result::Result<(VertexId, VertexId), String> {
    let mut parts = line.split('\t');
    let tail = parts
        .next()
        .and_then(|s| s.parse::<VertexId>().ok())
        .ok_or_else(|| format!("malformed record {line:?}"))?;
    let head = parts
        .next()
        .and_then(|s| s.parse::<VertexId>().ok())
        .ok_or_else(|| format!("malformed record {line:?}"))?;
    if parts.next().is_some() {
        return Err(format!("trailing fields in record {line:?}"));
    }
    if tail == 0 || head == 0 {
        return Err("vertex ids are 1-based".into());
    }
    Ok((tail, head))
}
