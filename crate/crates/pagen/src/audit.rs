//! Monte Carlo audits of the one-step attachment laws.
//!
//! A frozen graph is probed with repeated independent draws of one growth
//! step (the graph is never mutated). Empirical frequencies are compared
//! with the predicted leading terms
//!
//! ```text
//! P(d_i grows by exactly 1)            = (A d_i + B) / n      + O(d_i^2 / n^2)
//! P(d_i and d_j both grow by 1)        = e_ij D / (m n)       + O(d_i d_j / n^2)
//! P(new vertex keeps a loop)           = O(1 / n)
//! ```
//!
//! The remainder constants are unspecified, so each comparison carries an
//! explicit quadratic allowance of `10 (d_i / n)^2` (respectively
//! `10 d_i d_j / n^2`) and the reported z-score measures only the excess
//! beyond that allowance, in units of the binomial standard error.

use serde::Serialize;

use crate::analytics::fit_loglog_slope;
use crate::error::{Error, Result};
use crate::generator::{generate, grow_step, GenerationConfig};
use crate::graph::{MultiGraph, SeedSpec, VertexId};
use crate::model::WeightTable;
use crate::rng::RandomStream;

const MIN_TRIALS: u64 = 10_000;
const REMAINDER_FACTOR: f64 = 10.0;

/// What an audit row is about.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum AuditSubject {
    Vertex { id: VertexId, degree: u32 },
    Pair { i: VertexId, j: VertexId, multiplicity: u32, degree_i: u32, degree_j: u32 },
    Size { n: u64 },
}

/// One audited observable.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct AuditRow {
    pub subject: AuditSubject,
    pub observable: String,
    pub empirical_probability: f64,
    pub predicted_probability: f64,
    pub standard_error: f64,
    /// Slack granted for the unspecified quadratic remainder.
    pub allowance: f64,
    /// Excess beyond the allowance in standard errors; 0 when inside it.
    pub z_score: f64,
}

/// Result of one audit pass.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct AuditReport {
    pub rows: Vec<AuditRow>,
    pub trials: u64,
    pub graph_size: u64,
    /// Log-log slope of the loop probability against n, when defined.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decay_slope: Option<f64>,
}

impl AuditReport {
    pub fn max_abs_z(&self) -> f64 {
        self.rows.iter().map(|r| r.z_score.abs()).fold(0.0, f64::max)
    }
}

fn binomial_stderr(p: f64, trials: u64) -> f64 {
    let floor = 1.0 / trials as f64;
    let p = p.clamp(floor, 1.0 - floor);
    (p * (1.0 - p) / trials as f64).sqrt()
}

fn excess_z(empirical: f64, predicted: f64, allowance: f64, stderr: f64) -> f64 {
    ((empirical - predicted).abs() - allowance).max(0.0) / stderr
}

fn check_trials(trials: u64) -> Result<()> {
    if trials < MIN_TRIALS {
        return Err(Error::Refusal(format!(
            "audits need at least {MIN_TRIALS} trials, got {trials}"
        )));
    }
    Ok(())
}

/// Audits `P(d_i -> d_i + 1)` against `(A d_i + B) / n` for each sampled
/// vertex, plus the bound on multi-increments. The graph stays frozen.
pub fn audit_increment_probabilities(
    g: &MultiGraph,
    table: &WeightTable,
    trials: u64,
    vertices: &[VertexId],
    stream: &mut RandomStream,
) -> Result<AuditReport> {
    check_trials(trials)?;
    let n = g.vertex_count();
    if vertices.iter().any(|&v| v == 0 || v > n) {
        return Err(Error::Precondition("audited vertex out of range".into()));
    }
    let constants = table.constants();
    let n_f = n as f64;

    let mut exactly_one = vec![0u64; vertices.len()];
    let mut two_or_more = vec![0u64; vertices.len()];
    for _ in 0..trials {
        let targets = grow_step(g, table, stream)?;
        for (slot, &v) in vertices.iter().enumerate() {
            let hits = targets.iter().filter(|&&t| t == v).count();
            match hits {
                0 => {}
                1 => exactly_one[slot] += 1,
                _ => two_or_more[slot] += 1,
            }
        }
    }

    let mut rows = Vec::new();
    for (slot, &v) in vertices.iter().enumerate() {
        let degree = g.degree(v);
        let subject = AuditSubject::Vertex { id: v, degree };
        let allowance = REMAINDER_FACTOR * (degree as f64 / n_f).powi(2);

        let predicted = (constants.a * degree as f64 + constants.b) / n_f;
        let empirical = exactly_one[slot] as f64 / trials as f64;
        let stderr = binomial_stderr(predicted, trials);
        rows.push(AuditRow {
            subject,
            observable: "increment+1".into(),
            empirical_probability: empirical,
            predicted_probability: predicted,
            standard_error: stderr,
            allowance,
            z_score: excess_z(empirical, predicted, allowance, stderr),
        });

        let empirical = two_or_more[slot] as f64 / trials as f64;
        let stderr = binomial_stderr(empirical, trials);
        rows.push(AuditRow {
            subject,
            observable: "increment>=2".into(),
            empirical_probability: empirical,
            predicted_probability: allowance,
            standard_error: stderr,
            allowance,
            z_score: (empirical - allowance).max(0.0) / stderr,
        });
    }
    Ok(AuditReport { rows, trials, graph_size: n as u64, decay_slope: None })
}

/// Audits `P(d_i and d_j both +1)` against `e_ij D / (m n)` for sampled
/// adjacent pairs.
pub fn audit_pair_increments(
    g: &MultiGraph,
    table: &WeightTable,
    trials: u64,
    pairs: &[(VertexId, VertexId)],
    stream: &mut RandomStream,
) -> Result<AuditReport> {
    check_trials(trials)?;
    let n = g.vertex_count();
    for &(i, j) in pairs {
        if i == j || g.edge_multiplicity(i, j)? == 0 {
            return Err(Error::Precondition(format!(
                "audited pair ({i}, {j}) must be two distinct adjacent vertices"
            )));
        }
    }
    let constants = table.constants();
    let n_f = n as f64;
    let mn = g.edge_count() as f64;

    let mut joint = vec![0u64; pairs.len()];
    for _ in 0..trials {
        let targets = grow_step(g, table, stream)?;
        for (slot, &(i, j)) in pairs.iter().enumerate() {
            let hits_i = targets.iter().filter(|&&t| t == i).count();
            let hits_j = targets.iter().filter(|&&t| t == j).count();
            if hits_i == 1 && hits_j == 1 {
                joint[slot] += 1;
            }
        }
    }

    let mut rows = Vec::new();
    for (slot, &(i, j)) in pairs.iter().enumerate() {
        let mult = g.edge_multiplicity(i, j)?;
        let (di, dj) = (g.degree(i), g.degree(j));
        let predicted = mult as f64 * constants.d / mn;
        let empirical = joint[slot] as f64 / trials as f64;
        let allowance = REMAINDER_FACTOR * di as f64 * dj as f64 / (n_f * n_f);
        let stderr = binomial_stderr(predicted, trials);
        rows.push(AuditRow {
            subject: AuditSubject::Pair { i, j, multiplicity: mult, degree_i: di, degree_j: dj },
            observable: "pair-joint".into(),
            empirical_probability: empirical,
            predicted_probability: predicted,
            standard_error: stderr,
            allowance,
            z_score: excess_z(empirical, predicted, allowance, stderr),
        });
    }
    Ok(AuditReport { rows, trials, graph_size: n as u64, decay_slope: None })
}

/// Audits the loop probability `P(new vertex degree > m)` across graph
/// sizes and fits its decay against `n`.
///
/// Only uniform slots can select the new vertex, so the prediction is the
/// exact `sum of w(k,l) (1 - (n/(n+1))^(m-l))`; the decay slope should sit
/// near -1 whenever the probability is nonzero.
pub fn audit_loop_probability(
    table: &WeightTable,
    seed_spec: SeedSpec,
    n_list: &[u64],
    trials_per_n: u64,
    master_seed: u64,
) -> Result<AuditReport> {
    check_trials(trials_per_n)?;
    if n_list.is_empty() || n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Precondition("n list must be strictly ascending".into()));
    }
    let m = table.m();
    let mut rows = Vec::new();
    let mut decay_points = Vec::new();
    for (idx, &n) in n_list.iter().enumerate() {
        let cfg = GenerationConfig {
            n,
            table: table.clone(),
            seed_spec,
            master_seed,
            stream_index: 2_000 + idx as u64,
            checkpoints: vec![n],
        };
        let (g, _) = generate(&cfg)?;
        let mut stream = RandomStream::derive(master_seed, 2_100 + idx as u64);
        let new_vertex = g.vertex_count() + 1;
        let mut looped = 0u64;
        for _ in 0..trials_per_n {
            let targets = grow_step(&g, table, &mut stream)?;
            if targets.contains(&new_vertex) {
                looped += 1;
            }
        }
        let ratio = n as f64 / (n as f64 + 1.0);
        let predicted: f64 = table
            .entries()
            .iter()
            .map(|e| e.weight * (1.0 - ratio.powi((m - e.l) as i32)))
            .sum();
        let empirical = looped as f64 / trials_per_n as f64;
        let stderr = binomial_stderr(predicted, trials_per_n);
        rows.push(AuditRow {
            subject: AuditSubject::Size { n },
            observable: "loop".into(),
            empirical_probability: empirical,
            predicted_probability: predicted,
            standard_error: stderr,
            allowance: 0.0,
            z_score: excess_z(empirical, predicted, 0.0, stderr),
        });
        if empirical > 0.0 {
            decay_points.push((n as f64, empirical));
        }
    }
    let decay_slope = fit_loglog_slope(&decay_points, 0.0).ok().map(|f| f.slope);
    Ok(AuditReport {
        rows,
        trials: trials_per_n,
        graph_size: *n_list.last().unwrap(),
        decay_slope,
    })
}

/// Default audit vertices: the maximum-degree vertex, a median-degree
/// vertex and a uniformly random vertex, covering the degree dependence of
/// the increment law.
pub fn default_audit_vertices(g: &MultiGraph, stream: &mut RandomStream) -> Vec<VertexId> {
    let n = g.vertex_count();
    let max_v = g.vertices().max_by_key(|&v| g.degree(v)).expect("nonempty graph");
    let mut degrees: Vec<u32> = g.vertices().map(|v| g.degree(v)).collect();
    degrees.sort_unstable();
    let median_degree = degrees[degrees.len() / 2];
    let median_v = g
        .vertices()
        .find(|&v| g.degree(v) == median_degree)
        .expect("median degree exists");
    let random_v = stream.sample_uniform_vertex(n);
    let mut out = vec![max_v, median_v, random_v];
    out.dedup();
    out.sort_unstable();
    out.dedup();
    out
}

/// Default audit pairs: the most multiple non-loop pair, the endpoints of
/// a random non-loop edge and a non-loop pair incident to the
/// highest-degree vertex.
pub fn default_audit_pairs(
    g: &MultiGraph,
    stream: &mut RandomStream,
) -> Vec<(VertexId, VertexId)> {
    let mut pairs: Vec<(VertexId, VertexId)> = Vec::new();
    let push = |i: VertexId, j: VertexId, pairs: &mut Vec<(VertexId, VertexId)>| {
        let p = if i >= j { (i, j) } else { (j, i) };
        if !pairs.contains(&p) {
            pairs.push(p);
        }
    };

    let mut best: Option<(u32, (VertexId, VertexId))> = None;
    for e in g.iter_edges() {
        if e.tail == e.head {
            continue;
        }
        let mult = g.multiplicity_unchecked(e.tail, e.head);
        if best.is_none_or(|(b, _)| mult > b) {
            best = Some((mult, (e.tail, e.head)));
        }
    }
    if let Some((_, (i, j))) = best {
        push(i, j, &mut pairs);
    }

    for _ in 0..100 {
        if let Ok(e) = stream.sample_uniform_edge(g) {
            if e.tail != e.head {
                push(e.tail, e.head, &mut pairs);
                break;
            }
        }
    }

    if let Some(hub) = g.vertices().max_by_key(|&v| g.degree(v)) {
        if let Some(e) = g
            .iter_edges()
            .find(|e| e.tail != e.head && (e.tail == hub || e.head == hub))
        {
            push(e.tail, e.head, &mut pairs);
        }
    }
    pairs
}

/// Pools the `increment+1` rows into an estimate of the attachment
/// coefficient `A`, with its standard error.
///
/// Rows whose quadratic allowance exceeds the sampling noise are skipped:
/// the leading-term inversion `(n p - B) / d` is only unbiased where the
/// remainder is below the noise floor.
pub fn estimate_attachment_coefficient(report: &AuditReport, b: f64) -> Option<(f64, f64)> {
    let n = report.graph_size as f64;
    let mut weight_sum = 0.0;
    let mut weighted = 0.0;
    for row in &report.rows {
        if row.observable != "increment+1" || row.allowance > row.standard_error {
            continue;
        }
        let degree = match row.subject {
            AuditSubject::Vertex { degree, .. } => degree as f64,
            _ => continue,
        };
        let a_hat = (n * row.empirical_probability - b) / degree;
        let sigma = n * row.standard_error / degree;
        let w = 1.0 / (sigma * sigma);
        weighted += w * a_hat;
        weight_sum += w;
    }
    if weight_sum == 0.0 {
        return None;
    }
    Some((weighted / weight_sum, (1.0 / weight_sum).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{preset, Preset, ThreeParamSpec, WeightTable};

    fn grown(table: &WeightTable, n: u64, seed: u64) -> MultiGraph {
        let cfg = GenerationConfig::new(n, table.clone(), seed);
        generate(&cfg).unwrap().0
    }

    #[test]
    fn rejects_insufficient_trials() {
        let table = preset(Preset::Uniform, 1).unwrap();
        let g = grown(&table, 50, 1);
        let mut s = RandomStream::derive(1, 10);
        let err = audit_increment_probabilities(&g, &table, 100, &[1], &mut s);
        assert!(matches!(err, Err(Error::Refusal(_))));
    }

    #[test]
    fn uniform_model_increment_audit() {
        // For the uniform table A = 0, B = 1: the exact hit probability
        // m/(n+1)-ish sits within the quadratic allowance of B/n.
        let table = preset(Preset::Uniform, 1).unwrap();
        let g = grown(&table, 500, 3);
        let mut s = RandomStream::derive(3, 10);
        let vertices = default_audit_vertices(&g, &mut s);
        let report =
            audit_increment_probabilities(&g, &table, 20_000, &vertices, &mut s).unwrap();
        assert!(report.max_abs_z() <= 4.0, "z = {}", report.max_abs_z());
    }

    #[test]
    fn pure_pair_model_increment_audit() {
        // Point mass on (k, l) = (1, 2): A = (l - k)/m = 0.5.
        let table = WeightTable::new(2, vec![(1, 2, 1.0)]).unwrap();
        let g = grown(&table, 1_000, 5);
        let mut s = RandomStream::derive(5, 10);
        let vertices = default_audit_vertices(&g, &mut s);
        let report =
            audit_increment_probabilities(&g, &table, 100_000, &vertices, &mut s).unwrap();
        assert!(report.max_abs_z() <= 4.0, "z = {}", report.max_abs_z());
        let (a_hat, stderr) = estimate_attachment_coefficient(&report, 0.0).unwrap();
        assert!((a_hat - 0.5).abs() <= 4.0 * stderr, "a_hat = {a_hat} +- {stderr}");
    }

    #[test]
    fn three_param_increment_audit() {
        let table = ThreeParamSpec::new(2, 0.0, 0.4).unwrap().to_table();
        let g = grown(&table, 1_000, 7);
        let mut s = RandomStream::derive(7, 10);
        let vertices = default_audit_vertices(&g, &mut s);
        let report =
            audit_increment_probabilities(&g, &table, 100_000, &vertices, &mut s).unwrap();
        assert!(report.max_abs_z() <= 4.0, "z = {}", report.max_abs_z());
    }

    #[test]
    fn pair_audit_beta_model() {
        // beta = 1 gives D = 1; a pair with e_ij = 1 is predicted at 1/(mn).
        let table = ThreeParamSpec::new(2, 0.0, 1.0).unwrap().to_table();
        let g = grown(&table, 1_000, 11);
        let mut s = RandomStream::derive(11, 10);
        let pairs = default_audit_pairs(&g, &mut s);
        assert!(!pairs.is_empty());
        let report = audit_pair_increments(&g, &table, 100_000, &pairs, &mut s).unwrap();
        assert!(report.max_abs_z() <= 4.0, "z = {}", report.max_abs_z());
        // Doubling the multiplicity doubles the prediction exactly.
        let base = report.rows[0].predicted_probability
            / report.rows[0]
                .subject_multiplicity()
                .expect("pair row") as f64;
        for row in &report.rows {
            let mult = row.subject_multiplicity().unwrap() as f64;
            assert!((row.predicted_probability - mult * base).abs() < 1e-15);
        }
    }

    impl AuditRow {
        fn subject_multiplicity(&self) -> Option<u32> {
            match self.subject {
                AuditSubject::Pair { multiplicity, .. } => Some(multiplicity),
                _ => None,
            }
        }
    }

    #[test]
    fn pair_audit_uniform_model_stays_in_allowance() {
        let table = preset(Preset::Uniform, 2).unwrap();
        let g = grown(&table, 500, 13);
        let mut s = RandomStream::derive(13, 10);
        let pairs = default_audit_pairs(&g, &mut s);
        let report = audit_pair_increments(&g, &table, 20_000, &pairs, &mut s).unwrap();
        for row in &report.rows {
            assert_eq!(row.predicted_probability, 0.0); // D = 0
            assert!(
                row.empirical_probability
                    <= row.allowance + 4.0 * row.standard_error,
                "{row:?}"
            );
        }
    }

    #[test]
    fn pair_audit_rejects_non_adjacent() {
        let table = preset(Preset::Uniform, 1).unwrap();
        let g = grown(&table, 50, 1);
        let mut s = RandomStream::derive(1, 10);
        let err = audit_pair_increments(&g, &table, 10_000, &[(1, 1)], &mut s);
        assert!(matches!(err, Err(Error::Precondition(_))));
    }

    #[test]
    fn loop_audit_uniform_m1() {
        // Exact loop probability 1/(n+1); slope within -1 +- 0.3.
        let table = preset(Preset::Uniform, 1).unwrap();
        let report = audit_loop_probability(
            &table,
            SeedSpec::default(),
            &[100, 1_000],
            50_000,
            21,
        )
        .unwrap();
        for row in &report.rows {
            let n = match row.subject {
                AuditSubject::Size { n } => n as f64,
                _ => unreachable!(),
            };
            assert!((row.predicted_probability - 1.0 / (n + 1.0)).abs() < 1e-12);
            assert!(row.z_score <= 4.0, "{row:?}");
        }
    }

    #[test]
    fn loop_audit_structurally_impossible() {
        // Pure pair table: steps 2-3 cannot select the new vertex.
        let table = WeightTable::new(2, vec![(1, 2, 1.0)]).unwrap();
        let report = audit_loop_probability(
            &table,
            SeedSpec::default(),
            &[100, 1_000],
            10_000,
            23,
        )
        .unwrap();
        for row in &report.rows {
            assert_eq!(row.predicted_probability, 0.0);
            assert_eq!(row.empirical_probability, 0.0);
        }
        assert!(report.decay_slope.is_none());
    }

    #[test]
    fn loop_audit_three_param_decay() {
        let table = ThreeParamSpec::new(2, 0.0, 0.4).unwrap().to_table();
        let report = audit_loop_probability(
            &table,
            SeedSpec::default(),
            &[100, 1_000, 10_000],
            50_000,
            29,
        )
        .unwrap();
        assert!(report.rows.iter().all(|r| r.z_score <= 4.0));
        let slope = report.decay_slope.unwrap();
        assert!((slope + 1.0).abs() <= 0.3, "slope = {slope}");
    }

    #[test]
    fn audits_never_mutate_and_replay_identically() {
        let table = ThreeParamSpec::new(2, 0.3, 0.3).unwrap().to_table();
        let g = grown(&table, 300, 31);
        let edges_before: Vec<_> = g.iter_edges().collect();
        let run = || {
            let mut s = RandomStream::derive(31, 10);
            let vertices = default_audit_vertices(&g, &mut s);
            let report =
                audit_increment_probabilities(&g, &table, 10_000, &vertices, &mut s).unwrap();
            serde_json::to_string(&report).unwrap()
        };
        assert_eq!(run(), run());
        assert_eq!(g.iter_edges().collect::<Vec<_>>(), edges_before);
    }
}
