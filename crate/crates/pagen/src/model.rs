//! Model instances: weight tables, the three-parameter family, presets,
//! and the mapping to the attachment constants A, B, D.
//!
//! A weight table assigns a probability to each admissible `(k, l)` pair
//! with `0 <= k <= m/2` and `2k <= l <= m`. In one growth step, `k` pairs
//! of slots copy both ends of a uniform edge, `l - 2k` slots copy the
//! target end of a uniform edge, and the remaining `m - l` slots pick a
//! uniform vertex. The derived constants are
//!
//! ```text
//! A = sum of w(k,l) * (l - k) / m      (degree-increment coefficient)
//! B = m - 2mA                          (increment offset)
//! D = sum of w(k,l) * k                (expected triangles per step)
//! ```
//!
//! `A` controls the degree-distribution exponent `gamma = 1 + 1/A` and the
//! regime (subcritical `2A < 1`, critical `2A = 1`, supercritical
//! `2A > 1`), which in turn fixes how the number of two-paths and the
//! clustering coefficient scale with the graph size.

use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};

const WEIGHT_SUM_TOLERANCE: f64 = 1e-12;
const REGIME_EPS: f64 = 1e-9;

/// One weight-table row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeightEntry {
    pub k: u32,
    pub l: u32,
    pub weight: f64,
}

/// Validated mixture over `(k, l)` monomials for a fixed `m`.
///
/// Entries are kept sorted by `(k, l)`, weights are non-negative and
/// renormalized to sum to exactly 1; zero-weight entries are retained so
/// three-parameter expansions round-trip.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightTable {
    m: u32,
    entries: Vec<WeightEntry>,
}

impl WeightTable {
    /// Validates and normalizes a table; this is the single constructor.
    pub fn new(m: u32, entries: Vec<(u32, u32, f64)>) -> Result<Self> {
        if m == 0 {
            return Err(Error::Validation("m must be positive".into()));
        }
        if entries.is_empty() {
            return Err(Error::Validation("weight table has no entries".into()));
        }
        let mut rows: Vec<WeightEntry> = Vec::with_capacity(entries.len());
        let mut sum = 0.0;
        for (k, l, weight) in entries {
            if 2 * k > m {
                return Err(Error::Validation(format!(
                    "entry ({k}, {l}): k exceeds m/2 = {}",
                    m as f64 / 2.0
                )));
            }
            if l < 2 * k || l > m {
                return Err(Error::Validation(format!(
                    "entry ({k}, {l}): l must satisfy 2k <= l <= m"
                )));
            }
            if !weight.is_finite() || weight < 0.0 {
                return Err(Error::Validation(format!(
                    "entry ({k}, {l}): weight {weight} is not a probability"
                )));
            }
            rows.push(WeightEntry { k, l, weight });
        }
        rows.sort_by_key(|e| (e.k, e.l));
        if rows.windows(2).any(|w| (w[0].k, w[0].l) == (w[1].k, w[1].l)) {
            return Err(Error::Validation("duplicate (k, l) keys".into()));
        }
        for e in &rows {
            sum += e.weight;
        }
        if (sum - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
            return Err(Error::Validation(format!(
                "weights sum to {sum}, expected 1 within {WEIGHT_SUM_TOLERANCE:e}"
            )));
        }
        for e in &mut rows {
            e.weight /= sum;
        }
        Ok(WeightTable { m, entries: rows })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn entries(&self) -> &[WeightEntry] {
        &self.entries
    }

    /// Weight of `(k, l)`, zero when absent.
    pub fn weight(&self, k: u32, l: u32) -> f64 {
        self.entries
            .iter()
            .find(|e| (e.k, e.l) == (k, l))
            .map_or(0.0, |e| e.weight)
    }

    /// Derived attachment constants and theory forecasts.
    pub fn constants(&self) -> ModelConstants {
        let m = self.m as f64;
        let weighted_lk: f64 = self
            .entries
            .iter()
            .map(|e| e.weight * (e.l - e.k) as f64)
            .sum();
        let a = weighted_lk / m;
        let b = m - 2.0 * m * a;
        let d: f64 = self.entries.iter().map(|e| e.weight * e.k as f64).sum();
        let regime = if (2.0 * a - 1.0).abs() <= REGIME_EPS {
            Regime::Critical
        } else if 2.0 * a < 1.0 {
            Regime::Subcritical
        } else {
            Regime::Supercritical
        };
        let gamma = if a > REGIME_EPS { Some(1.0 + 1.0 / a) } else { None };
        let p2_base = 2.0 * m * (a + b) + m * (m - 1.0) / 2.0;
        let (p2_coefficient, clustering_limit) = match regime {
            Regime::Subcritical => {
                (Some(p2_base / (1.0 - 2.0 * a)), Some(3.0 * (1.0 - 2.0 * a) * d / p2_base))
            }
            Regime::Critical => (Some(p2_base), None),
            Regime::Supercritical => (None, None),
        };
        ModelConstants { a, b, d, gamma, regime, clustering_limit, p2_coefficient }
    }

    /// Writes the `k,l,weight` CSV format.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "k,l,weight")?;
        for e in &self.entries {
            writeln!(w, "{},{},{:.17}", e.k, e.l, e.weight)?;
        }
        Ok(())
    }

    /// Reads the `k,l,weight` CSV format; `m` comes from the caller.
    pub fn read_csv<R: BufRead>(m: u32, r: R) -> Result<Self> {
        let mut entries = Vec::new();
        let mut lines = r.lines().enumerate();
        match lines.next() {
            Some((_, line)) => {
                let line = line?;
                if line.trim() != "k,l,weight" {
                    return Err(Error::Parse {
                        line: 1,
                        message: format!("expected header 'k,l,weight', got {:?}", line.trim()),
                    });
                }
            }
            None => return Err(Error::Parse { line: 1, message: "empty input".into() }),
        }
        for (idx, line) in lines {
            let line = line?;
            let lineno = idx + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = trimmed.split(',').collect();
            if fields.len() != 3 {
                return Err(Error::Parse {
                    line: lineno,
                    message: format!("expected 3 fields, got {}", fields.len()),
                });
            }
            let parse_err = |what: &str| Error::Parse {
                line: lineno,
                message: format!("malformed {what} in {trimmed:?}"),
            };
            let k = fields[0].trim().parse::<u32>().map_err(|_| parse_err("k"))?;
            let l = fields[1].trim().parse::<u32>().map_err(|_| parse_err("l"))?;
            let w = fields[2].trim().parse::<f64>().map_err(|_| parse_err("weight"))?;
            entries.push((k, l, w));
        }
        Self::new(m, entries)
    }
}

/// The three-parameter family: `m = 2p` slots grouped into `p` pairs, each
/// pair independently in one of three modes with probabilities `alpha`
/// (both slots preferential by in-degree), `beta` (both ends of one
/// uniform edge) and `delta` (both slots uniform).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThreeParamSpec {
    pub m: u32,
    pub alpha: f64,
    pub beta: f64,
    pub delta: f64,
}

impl ThreeParamSpec {
    /// Builds a spec with `delta` inferred as `1 - alpha - beta`.
    pub fn new(m: u32, alpha: f64, beta: f64) -> Result<Self> {
        let delta = 1.0 - alpha - beta;
        // Absorb the rounding of the inferred parameter.
        let delta = if (-WEIGHT_SUM_TOLERANCE..0.0).contains(&delta) { 0.0 } else { delta };
        Self::with_delta(m, alpha, beta, delta)
    }

    pub fn with_delta(m: u32, alpha: f64, beta: f64, delta: f64) -> Result<Self> {
        if m == 0 || !m.is_multiple_of(2) {
            return Err(Error::Validation(format!(
                "three-parameter model needs even positive m, got {m}"
            )));
        }
        if m > 64 {
            return Err(Error::Validation("m > 64 is not supported".into()));
        }
        for (name, v) in [("alpha", alpha), ("beta", beta), ("delta", delta)] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::Validation(format!("{name} = {v} is not a probability")));
            }
        }
        let sum = alpha + beta + delta;
        if (sum - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
            return Err(Error::Validation(format!(
                "alpha + beta + delta = {sum}, expected 1"
            )));
        }
        Ok(ThreeParamSpec { m, alpha, beta, delta })
    }

    /// Expands the product over the `p = m/2` pair factors into a weight
    /// table: with `a` pairs in alpha mode, `k` pairs in beta mode and the
    /// rest in delta mode, the entry is `(k, 2(a + k))` with a multinomial
    /// weight. All admissible entries are emitted, including zero weights.
    pub fn to_table(&self) -> WeightTable {
        let p = self.m / 2;
        let mut entries = Vec::new();
        for a in 0..=p {
            for k in 0..=(p - a) {
                let c = p - a - k;
                let weight = multinomial(p, a, k)
                    * self.alpha.powi(a as i32)
                    * self.beta.powi(k as i32)
                    * self.delta.powi(c as i32);
                entries.push((k, 2 * (a + k), weight));
            }
        }
        WeightTable::new(self.m, entries).expect("three-parameter expansion is always valid")
    }
}

/// p! / (a! k! (p-a-k)!) computed through exact integer binomials.
fn multinomial(p: u32, a: u32, k: u32) -> f64 {
    (binomial(p, a) * binomial(p - a, k)) as f64
}

fn binomial(n: u32, k: u32) -> u128 {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Growth regime determined by the sign of `2A - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Subcritical,
    Critical,
    Supercritical,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Regime::Subcritical => "subcritical",
            Regime::Critical => "critical",
            Regime::Supercritical => "supercritical",
        };
        f.write_str(s)
    }
}

/// Attachment constants derived from a weight table.
///
/// `gamma` is `None` when `A = 0` (no power law); `clustering_limit` is
/// present exactly in the subcritical regime; `p2_coefficient` multiplies
/// `n` in the subcritical regime and `n ln n` in the critical one.
#[derive(Debug, Clone, Copy, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ModelConstants {
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "B")]
    pub b: f64,
    #[serde(rename = "D")]
    pub d: f64,
    pub gamma: Option<f64>,
    pub regime: Regime,
    pub clustering_limit: Option<f64>,
    pub p2_coefficient: Option<f64>,
}

/// Built-in tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Each slot is preferential with probability 1/2 and uniform with
    /// probability 1/2, giving `A = 1/2, B = 0`; a close stand-in for the
    /// classic linearized chord diagram process.
    LcdApprox,
    /// Every slot uniform: `A = 0, B = m`.
    Uniform,
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lcd-approx" => Ok(Preset::LcdApprox),
            "uniform" => Ok(Preset::Uniform),
            other => Err(Error::Config(format!("unknown preset '{other}'"))),
        }
    }
}

/// Builds a preset table for the given `m`.
pub fn preset(name: Preset, m: u32) -> Result<WeightTable> {
    if m == 0 {
        return Err(Error::Validation("m must be positive".into()));
    }
    match name {
        Preset::Uniform => WeightTable::new(m, vec![(0, 0, 1.0)]),
        Preset::LcdApprox => {
            if m > 64 {
                return Err(Error::Validation("m > 64 is not supported".into()));
            }
            let scale = 0.5f64.powi(m as i32);
            let entries = (0..=m).map(|l| (0, l, binomial(m, l) as f64 * scale)).collect();
            WeightTable::new(m, entries)
        }
    }
}

/// Attachment constants `(A, B)` of the fixed-attractiveness model with
/// parameter `beta`: `A = 1 / (2 + beta)`, `B = m beta / (2 + beta)`.
///
/// Documentation-level mapping only; the process itself is out of scope.
pub fn buckley_osthus_constants(m: u32, beta: f64) -> (f64, f64) {
    (1.0 / (2.0 + beta), m as f64 * beta / (2.0 + beta))
}
