//! Closed-form predictions for graphs grown with attachment constants
//! `(A, B, D)`.
//!
//! The expected fraction of degree-`d` vertices converges to
//!
//! ```text
//! c(m, d) = Gamma(d + B/A) Gamma(m + (B+1)/A)
//!           ---------------------------------------- ~ const * d^(-1 - 1/A)
//!           A Gamma(d + (B+A+1)/A) Gamma(m + B/A)
//! ```
//!
//! evaluated here through log-Gamma differences (the direct Gamma overflows
//! past `d ~ 170`). The number of two-paths grows like `n` below the
//! critical point `2A = 1`, like `n ln n` at it and like `n^(2A)` above it;
//! triangles grow like `D n`; the global clustering coefficient follows by
//! taking ratios. Supercritical predictions are reported as growth classes
//! only, never constants.

use crate::error::{Error, Result};
use crate::model::{ModelConstants, Regime};

/// Expected degree-law point mass at one degree.
#[derive(Debug, Clone, Copy)]
pub struct DegreeLawPrediction {
    pub d: u32,
    /// The constant `c(m, d)`.
    pub cmd: f64,
    /// Exponent of the absolute-error term, `2 + 1/A`.
    pub error_exponent: f64,
}

impl DegreeLawPrediction {
    /// Expected number of degree-`d` vertices in a graph of size `n`.
    pub fn expected_count(&self, n: u64) -> f64 {
        self.cmd * n as f64
    }
}

fn check_gamma_arg(what: &str, x: f64) -> Result<f64> {
    if x > 0.0 {
        Ok(x)
    } else {
        Err(Error::Domain(format!("Gamma argument {what} = {x} is not positive")))
    }
}

/// Evaluates `c(m, d)` for attachment constants `(A, B)`; requires
/// `A in (0, 1]`, `d >= m` and all Gamma arguments positive.
///
/// The Gamma ratio is taken through its functional equation: starting from
/// the exact anchor `c(m, m) = 1 / (Am + B + 1)`, each step multiplies the
/// ratio `(d + B/A) / (d + 1 + (B+1)/A)`. Every factor lies in `(0, 1)`,
/// so nothing overflows (a direct Gamma would past `d ~ 170`), and adjacent
/// degrees stay consistent to machine precision. A log-Gamma evaluation of
/// the closed form is kept as a cross-check in the tests.
pub fn degree_law(m: u32, a: f64, b: f64, d: u32) -> Result<DegreeLawPrediction> {
    if !(a > 0.0 && a <= 1.0) {
        return Err(Error::Domain(format!("A = {a} outside (0, 1]")));
    }
    if d < m {
        return Err(Error::Domain(format!("d = {d} below the minimum degree m = {m}")));
    }
    let m_f = m as f64;
    check_gamma_arg("m + B/A", m_f + b / a)?;
    check_gamma_arg("m + (B+1)/A", m_f + (b + 1.0) / a)?;
    check_gamma_arg("d + B/A", d as f64 + b / a)?;
    let mut cmd = 1.0 / (a * m_f + b + 1.0);
    for t in m..d {
        cmd *= degree_law_ratio(a, b, t);
    }
    Ok(DegreeLawPrediction { d, cmd, error_exponent: 2.0 + 1.0 / a })
}

/// Direct log-Gamma evaluation of the closed form for `c(m, d)`.
#[cfg(test)]
fn degree_law_log_gamma(m: u32, a: f64, b: f64, d: u32) -> f64 {
    use statrs::function::gamma::ln_gamma;
    let (m, d) = (m as f64, d as f64);
    let log_c = ln_gamma(d + b / a) + ln_gamma(m + (b + 1.0) / a)
        - a.ln()
        - ln_gamma(d + (b + a + 1.0) / a)
        - ln_gamma(m + b / a);
    log_c.exp()
}

/// The exact ratio `c(m, d+1) / c(m, d) = (d + B/A) / (d + 1 + (B+1)/A)`.
pub fn degree_law_ratio(a: f64, b: f64, d: u32) -> f64 {
    let d = d as f64;
    (d + b / a) / (d + 1.0 + (b + 1.0) / a)
}

/// Growth law of the number of two-paths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum P2Prediction {
    /// `P2(n) ~ coefficient * n`.
    Subcritical { coefficient: f64 },
    /// `P2(n) ~ coefficient * n ln n`.
    Critical { coefficient: f64 },
    /// `P2(n)` grows like `n^exponent` with an unknown constant.
    Supercritical { exponent: f64 },
}

impl P2Prediction {
    /// Predicted value at size `n`; `None` in the supercritical regime
    /// where only the growth class is known.
    pub fn value(&self, n: u64) -> Option<f64> {
        let n = n as f64;
        match self {
            P2Prediction::Subcritical { coefficient } => Some(coefficient * n),
            P2Prediction::Critical { coefficient } => Some(coefficient * n * n.ln()),
            P2Prediction::Supercritical { .. } => None,
        }
    }
}

/// Two-path growth law for attachment constants `(A, B)` at out-degree `m`.
pub fn p2_prediction(m: u32, a: f64, b: f64) -> P2Prediction {
    let m = m as f64;
    let base = 2.0 * m * (a + b) + m * (m - 1.0) / 2.0;
    let two_a = 2.0 * a;
    if (two_a - 1.0).abs() <= 1e-9 {
        P2Prediction::Critical { coefficient: base }
    } else if two_a < 1.0 {
        P2Prediction::Subcritical { coefficient: base / (1.0 - two_a) }
    } else {
        P2Prediction::Supercritical { exponent: two_a }
    }
}

/// Expected triangle count `D * n`.
pub fn triangle_prediction(d: f64, n: u64) -> f64 {
    d * n as f64
}

/// Forecast for the global clustering coefficient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClusteringPrediction {
    /// Constant limit (subcritical).
    Limit(f64),
    /// Value at the requested size; decays like `1 / ln n` (critical).
    AtSize(f64),
    /// Decays like `n^exponent` with an unknown constant (supercritical).
    Decay { exponent: f64 },
}

/// Clustering forecast from derived constants; the critical case needs `n`.
pub fn clustering_prediction(
    constants: &ModelConstants,
    m: u32,
    n: Option<u64>,
) -> Result<ClusteringPrediction> {
    let m = m as f64;
    if (2.0 * m * constants.a + constants.b - m).abs() > 1e-9 * m.max(1.0) {
        return Err(Error::Domain(format!(
            "inconsistent constants: 2mA + B = {} but m = {m}",
            2.0 * m * constants.a + constants.b
        )));
    }
    let base = 2.0 * m * (constants.a + constants.b) + m * (m - 1.0) / 2.0;
    match constants.regime {
        Regime::Subcritical => Ok(ClusteringPrediction::Limit(
            3.0 * (1.0 - 2.0 * constants.a) * constants.d / base,
        )),
        Regime::Critical => {
            let n = n.ok_or_else(|| {
                Error::Config("critical-regime clustering needs the graph size n".into())
            })?;
            Ok(ClusteringPrediction::AtSize(3.0 * constants.d / (base * (n as f64).ln())))
        }
        Regime::Supercritical => {
            Ok(ClusteringPrediction::Decay { exponent: 1.0 - 2.0 * constants.a })
        }
    }
}
