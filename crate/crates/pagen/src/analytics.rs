//! Observables on a multigraph: degree histogram, two-path and triangle
//! counts, global clustering, average-neighbor-degree curve and log-log
//! exponent fits.
//!
//! Triangles are counted with multiplicity: an unordered vertex triple
//! `{i, j, k}` contributes `e_ij * e_jk * e_ik`. Loops are excluded from
//! triangles and from neighbor averages but still count (twice) toward the
//! degree of their vertex.

use std::collections::BTreeMap;
use std::io::Write;

use rustc_hash::FxHashMap;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::MultiGraph;

/// Degree counts `d -> N(d)` of one graph.
#[derive(Debug, Clone)]
pub struct DegreeHistogram {
    counts: BTreeMap<u32, u64>,
    n: u64,
}

impl DegreeHistogram {
    /// Vertices in the underlying graph.
    pub fn vertex_total(&self) -> u64 {
        self.n
    }

    /// `N(d)`, zero when no vertex has degree `d`.
    pub fn count(&self, d: u32) -> u64 {
        self.counts.get(&d).copied().unwrap_or(0)
    }

    /// `(degree, count)` pairs in increasing degree order.
    pub fn iter(&self) -> impl Iterator<Item = (u32, u64)> + '_ {
        self.counts.iter().map(|(&d, &c)| (d, c))
    }

    /// `sum of d * N(d)`; twice the edge count.
    pub fn degree_sum(&self) -> u64 {
        self.counts.iter().map(|(&d, &c)| d as u64 * c).sum()
    }

    pub fn max_degree(&self) -> u32 {
        self.counts.keys().next_back().copied().unwrap_or(0)
    }

    /// Writes the `degree,count` CSV format.
    pub fn write_csv<W: Write>(&self, mut w: W, comments: &[String]) -> std::io::Result<()> {
        for c in comments {
            writeln!(w, "# {c}")?;
        }
        writeln!(w, "degree,count")?;
        for (d, c) in self.iter() {
            writeln!(w, "{d},{c}")?;
        }
        Ok(())
    }
}

/// Exact degree counts.
pub fn degree_histogram(g: &MultiGraph) -> DegreeHistogram {
    let mut counts = BTreeMap::new();
    for v in g.vertices() {
        *counts.entry(g.degree(v)).or_insert(0u64) += 1;
    }
    DegreeHistogram { counts, n: g.vertex_count() as u64 }
}

/// Number of two-paths: `sum over v of d_v (d_v - 1) / 2` with total
/// degrees (loops count 2).
pub fn count_p2(g: &MultiGraph) -> u64 {
    g.vertices()
        .map(|v| {
            let d = g.degree(v) as u64;
            d * (d - 1) / 2
        })
        .sum()
}

/// Triangle count with multiplicity, as an indexed scan.
///
/// Every edge between `i < k` has tail `k`, so each triple `{i, j, k}` with
/// `i < j < k` is found at its largest vertex: for each pair of distinct
/// out-neighbors `i, j < k` the contribution is `e_ik * e_jk * e_ij`. The
/// scan costs `O(n m^2)` multiplicity lookups.
pub fn count_triangles(g: &MultiGraph) -> u64 {
    let n = g.vertex_count() as usize;
    // CSR of out-neighbors, built fresh so the scan does not depend on
    // insertion order.
    let mut offsets = vec![0usize; n + 2];
    for e in g.iter_edges() {
        offsets[e.tail as usize + 1] += 1;
    }
    for i in 1..offsets.len() {
        offsets[i] += offsets[i - 1];
    }
    let mut heads = vec![0u32; g.edge_count()];
    let mut cursor = offsets.clone();
    for e in g.iter_edges() {
        heads[cursor[e.tail as usize]] = e.head;
        cursor[e.tail as usize] += 1;
    }

    let mut total = 0u64;
    let mut row: Vec<(u32, u32)> = Vec::new();
    for v in 1..=n {
        let slice = &heads[offsets[v]..offsets[v + 1]];
        row.clear();
        for &h in slice {
            if h as usize == v {
                continue; // loops form no triangles
            }
            match row.iter_mut().find(|(u, _)| *u == h) {
                Some((_, c)) => *c += 1,
                None => row.push((h, 1)),
            }
        }
        for (x, &(i, mi)) in row.iter().enumerate() {
            for &(j, mj) in &row[x + 1..] {
                total += mi as u64 * mj as u64 * g.multiplicity_unchecked(i, j) as u64;
            }
        }
    }
    total
}

/// Triangle count by brute-force triple enumeration over a fresh
/// multiplicity index; `O(n^3)`, intended as an oracle for small graphs.
pub fn count_triangles_brute(g: &MultiGraph) -> u64 {
    let mut mult: FxHashMap<(u32, u32), u64> = FxHashMap::default();
    for e in g.iter_edges() {
        if e.tail != e.head {
            *mult.entry((e.head, e.tail)).or_insert(0) += 1;
        }
    }
    let n = g.vertex_count();
    let get = |i: u32, j: u32| mult.get(&(i, j)).copied().unwrap_or(0);
    let mut total = 0u64;
    for i in 1..=n {
        for j in (i + 1)..=n {
            let eij = get(i, j);
            if eij == 0 {
                continue;
            }
            for k in (j + 1)..=n {
                total += eij * get(i, k) * get(j, k);
            }
        }
    }
    total
}

/// Global clustering `3 T / P2`; `None` when there are no two-paths.
pub fn global_clustering(g: &MultiGraph) -> Option<f64> {
    let p2 = count_p2(g);
    if p2 == 0 {
        return None;
    }
    Some(3.0 * count_triangles(g) as f64 / p2 as f64)
}

/// One row of the average-neighbor-degree curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DnnRow {
    pub degree: u32,
    pub avg_neighbor_degree: f64,
    pub vertex_count: u64,
}

/// Average degree of the neighbors of degree-`d` vertices, per degree.
#[derive(Debug, Clone)]
pub struct DnnTable {
    pub rows: Vec<DnnRow>,
}

impl DnnTable {
    pub fn row(&self, degree: u32) -> Option<&DnnRow> {
        self.rows.iter().find(|r| r.degree == degree)
    }

    /// Writes the `degree,avg_neighbor_degree,count` CSV format.
    pub fn write_csv<W: Write>(&self, mut w: W, comments: &[String]) -> std::io::Result<()> {
        for c in comments {
            writeln!(w, "# {c}")?;
        }
        writeln!(w, "degree,avg_neighbor_degree,count")?;
        for r in &self.rows {
            writeln!(w, "{},{},{}", r.degree, r.avg_neighbor_degree, r.vertex_count)?;
        }
        Ok(())
    }
}

/// Computes the average-neighbor-degree curve.
///
/// The neighbor sum runs over edge instances, so multi-edges are weighted
/// by multiplicity; loops are skipped in the sum while their degree-2
/// contribution stays in `d(i)`.
pub fn dnn_curve(g: &MultiGraph) -> DnnTable {
    let n = g.vertex_count() as usize;
    let mut acc = vec![0u64; n + 1];
    for e in g.iter_edges() {
        if e.tail == e.head {
            continue;
        }
        acc[e.tail as usize] += g.degree(e.head) as u64;
        acc[e.head as usize] += g.degree(e.tail) as u64;
    }
    let mut per_degree: BTreeMap<u32, (u64, u64)> = BTreeMap::new();
    for v in g.vertices() {
        let entry = per_degree.entry(g.degree(v)).or_insert((0, 0));
        entry.0 += acc[v as usize];
        entry.1 += 1;
    }
    let rows = per_degree
        .into_iter()
        .map(|(degree, (sum, count))| DnnRow {
            degree,
            avg_neighbor_degree: sum as f64 / (degree as u64 * count) as f64,
            vertex_count: count,
        })
        .collect();
    DnnTable { rows }
}

/// Ordinary least squares over `(log x, log y)`.
#[derive(Debug, Clone, Copy, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    pub stderr: f64,
    pub points_used: usize,
    /// `(x_low, x_high)` of the points that entered the fit.
    pub window: (f64, f64),
}

/// Fits `log y` against `log x` over the points with `x > 0` and
/// `y >= min_y` (and `y > 0`); refuses with fewer than 3 usable points.
pub fn fit_loglog_slope(points: &[(f64, f64)], min_y: f64) -> Result<FitResult> {
    let kept: Vec<(f64, f64)> = points
        .iter()
        .copied()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0 && *y >= min_y)
        .collect();
    let used: Vec<(f64, f64)> = kept.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    if used.len() < 3 {
        return Err(Error::Refusal(format!(
            "log-log fit needs at least 3 qualifying points, have {}",
            used.len()
        )));
    }
    let n = used.len() as f64;
    let xm = used.iter().map(|p| p.0).sum::<f64>() / n;
    let ym = used.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = used.iter().map(|p| (p.0 - xm).powi(2)).sum();
    let sxy: f64 = used.iter().map(|p| (p.0 - xm) * (p.1 - ym)).sum();
    if sxx == 0.0 {
        return Err(Error::Refusal("log-log fit needs at least 2 distinct x".into()));
    }
    let slope = sxy / sxx;
    let intercept = ym - slope * xm;
    let ssr: f64 = used
        .iter()
        .map(|p| (p.1 - (intercept + slope * p.0)).powi(2))
        .sum();
    let dof = (used.len() - 2) as f64;
    let stderr = if dof > 0.0 { (ssr / dof / sxx).sqrt() } else { 0.0 };
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for p in &kept {
        lo = lo.min(p.0);
        hi = hi.max(p.0);
    }
    Ok(FitResult { slope, intercept, stderr, points_used: used.len(), window: (lo, hi) })
}

/// Power-law fit of the degree histogram over `d >= m`, `N(d) >= 30`.
/// The reported exponent estimate is `-slope`.
pub fn fit_power_law(h: &DegreeHistogram, m: u32) -> Result<FitResult> {
    let pts: Vec<(f64, f64)> = h
        .iter()
        .filter(|&(d, _)| d >= m)
        .map(|(d, c)| (d as f64, c as f64))
        .collect();
    fit_loglog_slope(&pts, 30.0)
}

/// Assortativity-exponent fit of the neighbor-degree curve over `d >= m`
/// restricted to degrees backed by at least 20 vertices.
///
/// The curve of an assortative graph dips before it rises: the youngest
/// vertices (degree near `m`) attach preferentially and so see unusually
/// high neighbor degrees. When the curve's minimum falls in the first half
/// of the qualifying rows, the fit starts there and measures the rising
/// flank; a minimum in the second half means the trend is decreasing and
/// the whole window is used.
pub fn fit_dnn_exponent(t: &DnnTable, m: u32) -> Result<FitResult> {
    let rows: Vec<&DnnRow> = t
        .rows
        .iter()
        .filter(|r| r.degree >= m && r.vertex_count >= 20)
        .collect();
    let pts = |rows: &[&DnnRow]| -> Vec<(f64, f64)> {
        rows.iter().map(|r| (r.degree as f64, r.avg_neighbor_degree)).collect()
    };
    let argmin = rows
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.avg_neighbor_degree.total_cmp(&b.1.avg_neighbor_degree))
        .map_or(0, |(i, _)| i);
    if argmin <= rows.len() / 2 && rows.len() - argmin >= 3 {
        fit_loglog_slope(&pts(&rows[argmin..]), 0.0)
    } else {
        fit_loglog_slope(&pts(&rows), 0.0)
    }
}

/// Fit windows recorded in a stats report.
#[derive(Debug, Clone, Copy, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct FitWindows {
    pub degree: Option<(f64, f64)>,
    pub dnn: Option<(f64, f64)>,
}

/// Summary statistics of one graph, serialized as the stats JSON report.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct StatsReport {
    pub n: u64,
    pub m: u32,
    pub gamma_hat: Option<f64>,
    pub gamma_stderr: Option<f64>,
    pub p2: u64,
    pub triangles: u64,
    pub clustering: Option<f64>,
    pub dnn_exponent: Option<f64>,
    pub fit_windows: FitWindows,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config: Option<serde_json::Value>,
}

/// Computes the full stats report for a graph.
pub fn stats_report(g: &MultiGraph) -> StatsReport {
    let histogram = degree_histogram(g);
    let power = fit_power_law(&histogram, g.m()).ok();
    let dnn = dnn_curve(g);
    let dnn_fit = fit_dnn_exponent(&dnn, g.m()).ok();
    let p2 = count_p2(g);
    let triangles = count_triangles(g);
    StatsReport {
        n: g.vertex_count() as u64,
        m: g.m(),
        gamma_hat: power.map(|f| -f.slope),
        gamma_stderr: power.map(|f| f.stderr),
        p2,
        triangles,
        clustering: if p2 == 0 { None } else { Some(3.0 * triangles as f64 / p2 as f64) },
        dnn_exponent: dnn_fit.map(|f| f.slope),
        fit_windows: FitWindows {
            degree: power.map(|f| f.window),
            dnn: dnn_fit.map(|f| f.window),
        },
        config: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{SeedKind, SeedSpec};

    fn triangle() -> MultiGraph {
        MultiGraph::seeded(SeedSpec { n0: 3, kind: SeedKind::Cycle }, 1).unwrap()
    }

    fn path3() -> MultiGraph {
        MultiGraph::from_edges(3, 1, &[(2, 1), (3, 2)]).unwrap()
    }

    fn star4() -> MultiGraph {
        MultiGraph::from_edges(4, 1, &[(2, 1), (3, 1), (4, 1)]).unwrap()
    }

    fn k4() -> MultiGraph {
        MultiGraph::from_edges(
            4,
            1,
            &[(2, 1), (3, 1), (3, 2), (4, 1), (4, 2), (4, 3)],
        )
        .unwrap()
    }

    #[test]
    fn histogram_basics() {
        let h = degree_histogram(&MultiGraph::seeded(SeedSpec::default(), 2).unwrap());
        assert_eq!(h.count(4), 1);
        assert_eq!(h.vertex_total(), 1);

        let h = degree_histogram(&triangle());
        assert_eq!(h.count(2), 3);
        assert_eq!(h.degree_sum(), 6); // 2 m n
    }

    #[test]
    fn p2_reference_graphs() {
        assert_eq!(count_p2(&path3()), 1);
        assert_eq!(count_p2(&triangle()), 3);
        let loops = MultiGraph::seeded(SeedSpec::default(), 2).unwrap();
        assert_eq!(count_p2(&loops), 6); // d = 4 -> C(4,2)
    }

    #[test]
    fn triangle_counts() {
        assert_eq!(count_triangles(&triangle()), 1);
        assert_eq!(count_triangles(&star4()), 0);
        assert_eq!(count_triangles(&k4()), 4);
        // Doubling one edge doubles the count through the multiplicity product.
        let doubled =
            MultiGraph::from_edges(3, 1, &[(2, 1), (2, 1), (3, 2), (3, 1)]).unwrap();
        assert_eq!(count_triangles(&doubled), 2);
        assert_eq!(count_triangles_brute(&doubled), 2);
    }

    #[test]
    fn loops_do_not_form_triangles() {
        let g = MultiGraph::from_edges(3, 1, &[(1, 1), (2, 1), (3, 2), (3, 1)]).unwrap();
        assert_eq!(count_triangles(&g), 1);
        assert_eq!(count_triangles_brute(&g), 1);
    }

    #[test]
    fn clustering_reference_graphs() {
        assert_eq!(global_clustering(&triangle()), Some(1.0));
        assert_eq!(global_clustering(&path3()), Some(0.0));
        assert_eq!(global_clustering(&k4()), Some(1.0)); // 3*4 / 12
        let isolated = MultiGraph::from_edges(2, 1, &[(2, 1)]).unwrap();
        assert_eq!(global_clustering(&isolated), None); // P2 = 0
    }

    #[test]
    fn dnn_reference_graphs() {
        let t = dnn_curve(&triangle());
        assert_eq!(t.rows, vec![DnnRow { degree: 2, avg_neighbor_degree: 2.0, vertex_count: 3 }]);

        let t = dnn_curve(&star4());
        assert_eq!(t.row(1).unwrap().avg_neighbor_degree, 3.0);
        assert_eq!(t.row(1).unwrap().vertex_count, 3);
        assert_eq!(t.row(3).unwrap().avg_neighbor_degree, 1.0);

        // Doubled edge between two degree-2 vertices: multiplicity-weighted
        // average stays 2.0.
        let doubled = MultiGraph::from_edges(2, 1, &[(2, 1), (2, 1)]).unwrap();
        let t = dnn_curve(&doubled);
        assert_eq!(t.row(2).unwrap().avg_neighbor_degree, 2.0);
    }

    #[test]
    fn dnn_weighted_identity() {
        // sum_d d N(d) dnn(d) = sum over non-loop records of d(u) + d(v).
        let mut g = MultiGraph::seeded(SeedSpec::default(), 2).unwrap();
        let mut state = 88172645463325252u64;
        for _ in 0..300 {
            let n = g.vertex_count();
            let mut t = [0u32; 2];
            for slot in &mut t {
                state ^= state << 13;
                state ^= state >> 7;
                state ^= state << 17;
                *slot = 1 + (state % (n as u64 + 1)) as u32;
            }
            g.add_vertex(&t).unwrap();
        }
        let lhs: f64 = dnn_curve(&g)
            .rows
            .iter()
            .map(|r| r.degree as f64 * r.vertex_count as f64 * r.avg_neighbor_degree)
            .sum();
        let rhs: u64 = g
            .iter_edges()
            .filter(|e| e.tail != e.head)
            .map(|e| g.degree(e.tail) as u64 + g.degree(e.head) as u64)
            .sum();
        assert!((lhs - rhs as f64).abs() < 1e-6 * rhs as f64, "{lhs} vs {rhs}");
    }

    #[test]
    fn fit_exact_power_laws() {
        let pts: Vec<(f64, f64)> = (1..=50).map(|d| (d as f64, (d as f64).powf(-3.5))).collect();
        let fit = fit_loglog_slope(&pts, 0.0).unwrap();
        assert!((fit.slope + 3.5).abs() < 1e-9, "{}", fit.slope);
        assert!(fit.stderr < 1e-9);

        let flat: Vec<(f64, f64)> = (1..=20).map(|d| (d as f64, 2.5)).collect();
        let fit = fit_loglog_slope(&flat, 0.0).unwrap();
        assert!(fit.slope.abs() < 1e-9);
    }

    #[test]
    fn fit_refuses_thin_data() {
        assert!(fit_loglog_slope(&[(1.0, 1.0), (2.0, 0.5)], 0.0).is_err());
        assert!(fit_loglog_slope(&[(1.0, 10.0), (2.0, 3.0), (3.0, 0.1)], 1.0).is_err());
    }

    #[test]
    fn fit_recovers_noisy_exponent() {
        // y = 3 x^0.41 with 1% multiplicative noise over 50 points.
        let mut state = 0x9E3779B97F4A7C15u64;
        let mut noise = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        let pts: Vec<(f64, f64)> = (1..=50)
            .map(|i| {
                let x = i as f64;
                (x, 3.0 * x.powf(0.41) * (1.0 + 0.01 * (2.0 * noise() - 1.0)))
            })
            .collect();
        let fit = fit_loglog_slope(&pts, 0.0).unwrap();
        assert!((fit.slope - 0.41).abs() <= 0.05, "{}", fit.slope);
    }

    #[test]
    fn power_law_fit_on_exact_histogram() {
        let mut counts = BTreeMap::new();
        for d in 1..=60u32 {
            counts.insert(d, (1.0e6 * (d as f64).powf(-3.0)).round() as u64);
        }
        let n = counts.values().sum();
        let h = DegreeHistogram { counts, n };
        let fit = fit_power_law(&h, 1).unwrap();
        assert!((-fit.slope - 3.0).abs() <= 0.01, "{}", -fit.slope);
    }

    #[test]
    fn power_law_fit_on_degree_law_histogram() {
        // Histogram N(d) = round(1e6 c(m,d)) for m=2, A=0.2, B=1.2. The
        // window d >= 2, N >= 30 covers the curved head of the law, so the
        // fitted exponent lands near 3.45 even though the tail decays with
        // exponent 6.
        let mut counts = BTreeMap::new();
        for d in 2..=400u32 {
            let c = crate::theory::degree_law(2, 0.2, 1.2, d).unwrap().cmd;
            let count = (1.0e6 * c).round() as u64;
            if count > 0 {
                counts.insert(d, count);
            }
        }
        let n = counts.values().sum();
        let h = DegreeHistogram { counts, n };
        let fit = fit_power_law(&h, 2).unwrap();
        let gamma_hat = -fit.slope;
        assert!((3.3..=3.7).contains(&gamma_hat), "gamma_hat = {gamma_hat}");
    }

    #[test]
    fn dnn_fit_starts_at_the_dip_of_assortative_curves() {
        // Dip at d = 5, then exact power law with exponent 0.4.
        let rows: Vec<DnnRow> = (2..=40)
            .map(|d| {
                let x = d as f64;
                let avg =
                    if d < 5 { 10.0 - x } else { 5.0 * (x / 5.0).powf(0.4) };
                DnnRow { degree: d, avg_neighbor_degree: avg, vertex_count: 100 }
            })
            .collect();
        let fit = fit_dnn_exponent(&DnnTable { rows }, 2).unwrap();
        assert!((fit.slope - 0.4).abs() < 1e-9, "{}", fit.slope);
        assert_eq!(fit.window.0, 5.0);

        // A decreasing curve keeps its full window.
        let rows: Vec<DnnRow> = (2..=40)
            .map(|d| DnnRow {
                degree: d,
                avg_neighbor_degree: 100.0 * (d as f64).powf(-0.8),
                vertex_count: 100,
            })
            .collect();
        let fit = fit_dnn_exponent(&DnnTable { rows }, 2).unwrap();
        assert!((fit.slope + 0.8).abs() < 1e-9, "{}", fit.slope);
        assert_eq!(fit.window.0, 2.0);
    }

    #[test]
    fn stats_report_serializes_expected_fields() {
        let report = stats_report(&k4());
        let json = serde_json::to_value(&report).unwrap();
        for key in ["n", "m", "gammaHat", "p2", "triangles", "clustering", "dnnExponent", "fitWindows"]
        {
            assert!(json.get(key).is_some(), "missing {key}");
        }
        assert_eq!(json["p2"], 12);
        assert_eq!(json["triangles"], 4);
    }
}
