//! The growth algorithm, its incremental triangle / two-path trackers and
//! an exact step-distribution oracle for tiny instances.
//!
//! One step adds vertex `n + 1` with `m` edges chosen as follows:
//!
//! 1. draw `(k0, l0)` with probability proportional to the table weights;
//! 2. draw `k0` uniform edges; each fills a consecutive slot pair with
//!    both of its endpoints, head first;
//! 3. draw `l0 - 2 k0` uniform edges and keep their target ends;
//! 4. fill the remaining `m - l0` slots with uniform vertices from
//!    `{1, ..., n + 1}` (so the new vertex can receive loops);
//! 5. insert all `m` edges at once.
//!
//! Steps 2 and 3 sample from the graph as it existed before the step, so
//! within-step edges never influence their own draw. Each step costs O(m^2)
//! amortized work, which makes a whole run O(n m^2).

use std::io::Write;

use crate::analytics;
use crate::error::{Error, Result};
use crate::graph::{MultiGraph, SeedSpec, VertexId};
use crate::model::WeightTable;
use crate::rng::RandomStream;

/// Parameters of one generation run.
#[derive(Debug, Clone)]
pub struct GenerationConfig {
    /// Target vertex count.
    pub n: u64,
    pub table: WeightTable,
    pub seed_spec: SeedSpec,
    pub master_seed: u64,
    /// 0 for standalone runs; sweeps use `1000 + replica`.
    pub stream_index: u64,
    /// Sizes at which trace rows are recorded; empty means the default
    /// geometric schedule.
    pub checkpoints: Vec<u64>,
}

impl GenerationConfig {
    /// Config with the default seed graph, stream 0 and default checkpoints.
    pub fn new(n: u64, table: WeightTable, master_seed: u64) -> Self {
        GenerationConfig {
            n,
            table,
            seed_spec: SeedSpec::default(),
            master_seed,
            stream_index: 0,
            checkpoints: Vec::new(),
        }
    }
}

/// One recorded observation during growth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub n: u64,
    pub p2: u64,
    pub triangles: u64,
    /// `3 T / P2`; `None` when there are no two-paths yet.
    pub clustering: Option<f64>,
}

/// Per-checkpoint observables of one run.
#[derive(Debug, Clone, Default)]
pub struct GrowthTrace {
    pub rows: Vec<TraceRow>,
}

impl GrowthTrace {
    /// Writes the `n,p2,triangles,clustering` CSV format.
    pub fn write_csv<W: Write>(&self, mut w: W, comments: &[String]) -> std::io::Result<()> {
        for c in comments {
            writeln!(w, "# {c}")?;
        }
        writeln!(w, "n,p2,triangles,clustering")?;
        for r in &self.rows {
            match r.clustering {
                Some(c) => writeln!(w, "{},{},{},{}", r.n, r.p2, r.triangles, c)?,
                None => writeln!(w, "{},{},{},nan", r.n, r.p2, r.triangles)?,
            }
        }
        Ok(())
    }
}

/// Geometric checkpoint grid `round(10^(1 + 0.06 i))` capped at `n`, with
/// `n` itself always included.
pub fn default_checkpoints(n0: u64, n: u64) -> Vec<u64> {
    let mut sizes = Vec::new();
    for i in 0.. {
        let size = 10f64.powf(1.0 + 0.06 * i as f64).round() as u64;
        if size >= n {
            break;
        }
        if size >= n0 && sizes.last() != Some(&size) {
            sizes.push(size);
        }
    }
    sizes.push(n);
    sizes
}

/// Running triangle count, updated one step at a time.
///
/// After every step the running count equals a full recount of the current
/// graph, with multiplicity semantics.
#[derive(Debug, Clone, Copy)]
pub struct TriangleTracker {
    count: u64,
}

impl TriangleTracker {
    /// Starts from a full count of the given graph (cheap for seeds).
    pub fn for_graph(g: &MultiGraph) -> Self {
        TriangleTracker { count: analytics::count_triangles(g) }
    }

    /// Adds the triangles a step with these targets creates; call before
    /// the targets are applied to `g`.
    pub fn observe(&mut self, g: &MultiGraph, targets: &[VertexId]) -> u64 {
        let delta = incremental_triangle_delta(g, targets);
        self.count += delta;
        delta
    }

    pub fn count(&self) -> u64 {
        self.count
    }
}

/// Triangles created by attaching a new vertex to `targets`, evaluated
/// against the graph before insertion.
///
/// Each unordered slot pair pointing at two distinct existing vertices
/// `i != j` creates `e_ij` triangles; slots that hit the new vertex
/// (loops) or coincide contribute nothing.
pub fn incremental_triangle_delta(g: &MultiGraph, targets: &[VertexId]) -> u64 {
    let n = g.vertex_count();
    let mut delta = 0u64;
    for (x, &a) in targets.iter().enumerate() {
        if a > n {
            continue;
        }
        for &b in &targets[x + 1..] {
            if b > n || a == b {
                continue;
            }
            delta += g.multiplicity_unchecked(a, b) as u64;
        }
    }
    delta
}

/// Two-paths created by attaching a new vertex to `targets` (evaluated
/// before insertion): every vertex whose degree moves from `d` to `d + c`
/// gains `C(d+c, 2) - C(d, 2)` two-paths, and the new vertex starts with
/// `C(m + loops, 2)` of its own.
fn p2_delta(g: &MultiGraph, targets: &[VertexId]) -> u64 {
    let n = g.vertex_count();
    let m = targets.len() as u64;
    let mut loops = 0u64;
    // (vertex, hits) pairs; m is tiny so a linear scan beats a map.
    let mut hits: Vec<(VertexId, u64)> = Vec::with_capacity(targets.len());
    for &t in targets {
        if t > n {
            loops += 1;
            continue;
        }
        match hits.iter_mut().find(|(v, _)| *v == t) {
            Some((_, c)) => *c += 1,
            None => hits.push((t, 1)),
        }
    }
    let choose2 = |d: u64| d * d.saturating_sub(1) / 2;
    let mut delta = choose2(m + loops);
    for (v, c) in hits {
        let d = g.degree(v) as u64;
        delta += choose2(d + c) - choose2(d);
    }
    delta
}

/// Draws the `m` targets of one growth step without mutating the graph.
pub fn grow_step(
    g: &MultiGraph,
    table: &WeightTable,
    stream: &mut RandomStream,
) -> Result<Vec<VertexId>> {
    if table.m() != g.m() {
        return Err(Error::Precondition(format!(
            "table m = {} does not match graph m = {}",
            table.m(),
            g.m()
        )));
    }
    let mut targets = vec![0; g.m() as usize];
    grow_step_into(g, table, stream, &mut targets)?;
    Ok(targets)
}

fn grow_step_into(
    g: &MultiGraph,
    table: &WeightTable,
    stream: &mut RandomStream,
    targets: &mut [VertexId],
) -> Result<()> {
    let (k0, l0) = stream.sample_weight_entry(table);
    for x in 0..k0 as usize {
        let e = stream.sample_uniform_edge(g)?;
        targets[2 * x] = e.head;
        targets[2 * x + 1] = e.tail;
    }
    for slot in targets.iter_mut().take(l0 as usize).skip(2 * k0 as usize) {
        *slot = stream.sample_uniform_edge(g)?.head;
    }
    let bound = g.vertex_count() + 1;
    for slot in targets.iter_mut().skip(l0 as usize) {
        *slot = stream.sample_uniform_vertex(bound);
    }
    Ok(())
}

/// Runs the growth process defined by `cfg` and returns the final graph
/// together with the trace recorded at the checkpoint sizes.
pub fn generate(cfg: &GenerationConfig) -> Result<(MultiGraph, GrowthTrace)> {
    let n0 = cfg.seed_spec.n0 as u64;
    if cfg.n < n0 {
        return Err(Error::Config(format!("n = {} below seed size n0 = {n0}", cfg.n)));
    }
    if cfg.n > u32::MAX as u64 {
        return Err(Error::Config(format!("n = {} exceeds the supported vertex range", cfg.n)));
    }
    let checkpoints = if cfg.checkpoints.is_empty() {
        default_checkpoints(n0, cfg.n)
    } else {
        let cps = cfg.checkpoints.clone();
        let ascending = cps.windows(2).all(|w| w[0] < w[1]);
        if !ascending || cps.first().is_some_and(|&c| c < n0) || cps.last().is_some_and(|&c| c > cfg.n)
        {
            return Err(Error::Config(
                "checkpoints must be strictly ascending within [n0, n]".into(),
            ));
        }
        cps
    };

    let mut g = MultiGraph::seeded(cfg.seed_spec, cfg.table.m())?;
    g.reserve_vertices(cfg.n - n0);
    let mut stream = RandomStream::derive(cfg.master_seed, cfg.stream_index);
    let mut triangles = TriangleTracker::for_graph(&g);
    let mut p2 = analytics::count_p2(&g);
    let mut trace = GrowthTrace::default();
    let mut next_checkpoint = checkpoints.iter().copied().peekable();
    let mut targets = vec![0; cfg.table.m() as usize];

    let record = |size: u64, p2: u64, t: u64, trace: &mut GrowthTrace| {
        let clustering = if p2 > 0 { Some(3.0 * t as f64 / p2 as f64) } else { None };
        trace.rows.push(TraceRow { n: size, p2, triangles: t, clustering });
    };

    while next_checkpoint.peek() == Some(&n0) {
        next_checkpoint.next();
        record(n0, p2, triangles.count(), &mut trace);
    }
    for size in (n0 + 1)..=cfg.n {
        grow_step_into(&g, &cfg.table, &mut stream, &mut targets)?;
        triangles.observe(&g, &targets);
        p2 += p2_delta(&g, &targets);
        g.add_vertex(&targets).expect("grow_step targets are in range");
        while next_checkpoint.peek() == Some(&size) {
            next_checkpoint.next();
            record(size, p2, triangles.count(), &mut trace);
        }
    }
    Ok((g, trace))
}

/// Exact distribution of one step's ordered target tuple.
///
/// Tuples are indexed in row-major order over `{1, ..., n+1}^m`. The pair
/// factor is directed: a slot pair `(head, tail)` has probability
/// `e(head, tail) / (m n)` when `tail >= head` and zero otherwise, which
/// sums to 1 over ordered assignments while the induced unordered-pair
/// probability is the usual `e_ij / (m n)`.
#[derive(Debug, Clone)]
pub struct StepDistribution {
    base: u64,
    m: u32,
    probs: Vec<f64>,
}

impl StepDistribution {
    /// Number of slots.
    pub fn m(&self) -> u32 {
        self.m
    }

    /// `n + 1`: every slot ranges over `1..=base`.
    pub fn base(&self) -> u64 {
        self.base
    }

    fn index_of(&self, tuple: &[VertexId]) -> usize {
        debug_assert_eq!(tuple.len(), self.m as usize);
        let mut idx = 0usize;
        for &t in tuple {
            debug_assert!(t >= 1 && (t as u64) <= self.base);
            idx = idx * self.base as usize + (t - 1) as usize;
        }
        idx
    }

    /// Probability of an ordered tuple.
    pub fn prob(&self, tuple: &[VertexId]) -> f64 {
        self.probs[self.index_of(tuple)]
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// All `(tuple, probability)` pairs.
    pub fn iter(&self) -> impl Iterator<Item = (Vec<VertexId>, f64)> + '_ {
        self.probs.iter().enumerate().map(move |(mut idx, &p)| {
            let mut tuple = vec![0; self.m as usize];
            for slot in tuple.iter_mut().rev() {
                *slot = (idx % self.base as usize) as VertexId + 1;
                idx /= self.base as usize;
            }
            (tuple, p)
        })
    }
}

/// Enumerates the exact step distribution; refuses when `(n+1)^m` exceeds
/// one million tuples.
pub fn exact_step_distribution(g: &MultiGraph, table: &WeightTable) -> Result<StepDistribution> {
    if table.m() != g.m() {
        return Err(Error::Precondition(format!(
            "table m = {} does not match graph m = {}",
            table.m(),
            g.m()
        )));
    }
    let n = g.vertex_count() as u64;
    let m = table.m();
    let base = n + 1;
    let tuples = (base as f64).powi(m as i32);
    if tuples > 1_000_000.0 {
        return Err(Error::Refusal(format!(
            "(n+1)^m = {tuples:.0} tuples is beyond the exact oracle's range of 10^6"
        )));
    }
    let tuples = tuples as usize;
    let mn = g.edge_count() as f64;
    let uniform = 1.0 / base as f64;

    // Directed pair factor: edges between distinct vertices all run from
    // the larger id to the smaller, loops stay in place. Slots holding the
    // new vertex n + 1 carry no existing edges or in-degree.
    let directed = |head: VertexId, tail: VertexId| -> f64 {
        if tail >= head && (tail as u64) <= n {
            g.multiplicity_unchecked(head, tail) as f64 / mn
        } else {
            0.0
        }
    };
    let in_degree = |t: VertexId| -> f64 {
        if (t as u64) <= n {
            g.in_degree(t) as f64
        } else {
            0.0
        }
    };

    let mut probs = vec![0.0f64; tuples];
    let mut tuple = vec![1 as VertexId; m as usize];
    for (idx, p) in probs.iter_mut().enumerate() {
        let mut rest = idx;
        for slot in tuple.iter_mut().rev() {
            *slot = (rest % base as usize) as VertexId + 1;
            rest /= base as usize;
        }
        let mut total = 0.0;
        for e in table.entries() {
            if e.weight <= 0.0 {
                continue;
            }
            let mut mono = e.weight;
            for x in 0..e.k as usize {
                mono *= directed(tuple[2 * x], tuple[2 * x + 1]);
            }
            for &t in tuple.iter().take(e.l as usize).skip(2 * e.k as usize) {
                mono *= in_degree(t) / mn;
            }
            mono *= uniform.powi((m - e.l) as i32);
            total += mono;
        }
        *p = total;
    }
    Ok(StepDistribution { base, m, probs })
}
