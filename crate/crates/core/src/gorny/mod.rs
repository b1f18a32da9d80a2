//! Cartan–Gorny bound on intermediate derivatives, in log domain.
//!
//! For `g` on `[a, b]` with `G_l = sup |g^{(l)}|` and `1 <= k <= m - 1`:
//!
//! ```text
//! G_k <= 2 (e^2 m / k)^k G_0^{1 - k/m} max{ m! G_0 (2/(b-a))^m, G_m }^{k/m}
//! ```
//!
//! [`verify_gorny_empirical`] checks the inequality on functions from a corpus
//! with exact derivatives, with sup-norms estimated by grid sampling.

mod corpus;

pub use corpus::{CorpusRegistry, Cosine, Exponential, Polynomial, Runge, Sine, TestFunction};

use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::logmath::{ln_factorial, CMP_EPS};

/// Default number of grid points for sup-norm sampling.
pub const DEFAULT_GRID: usize = 10_000;

const REFINE_POINTS: usize = 201;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GornyError {
    #[error("need m >= 2 and 1 <= k <= m - 1, got m = {m}, k = {k}")]
    InvalidOrders { m: usize, k: usize },
    #[error("interval length must be positive, got {0}")]
    InvalidLength(f64),
    #[error("log sup-norm {0} must be finite (or -inf for a zero function)")]
    InvalidLogNorm(f64),
    #[error("no integer order strictly between {dn} and {dn1}, got {ell}")]
    NoInteriorOrder { dn: usize, dn1: usize, ell: usize },
    #[error("unknown corpus function '{0}'")]
    UnknownFunction(String),
    #[error("invalid interval [{a}, {b}]")]
    InvalidInterval { a: f64, b: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GornyQuery {
    /// `ln G_0`; `-inf` admits the zero function.
    #[serde(with = "crate::serde_log")]
    pub log_g0: f64,
    /// `ln G_m`; `-inf` allowed.
    #[serde(with = "crate::serde_log")]
    pub log_gm: f64,
    pub m: usize,
    pub k: usize,
    pub length: f64,
}

impl GornyQuery {
    pub fn new(log_g0: f64, log_gm: f64, m: usize, k: usize, length: f64) -> Result<Self, GornyError> {
        let q = Self {
            log_g0,
            log_gm,
            m,
            k,
            length,
        };
        q.validate()?;
        Ok(q)
    }

    fn validate(&self) -> Result<(), GornyError> {
        if self.m < 2 || self.k == 0 || self.k >= self.m {
            return Err(GornyError::InvalidOrders {
                m: self.m,
                k: self.k,
            });
        }
        if !(self.length > 0.0) || !self.length.is_finite() {
            return Err(GornyError::InvalidLength(self.length));
        }
        for v in [self.log_g0, self.log_gm] {
            if v.is_nan() || v == f64::INFINITY {
                return Err(GornyError::InvalidLogNorm(v));
            }
        }
        Ok(())
    }
}

/// Log of the right-hand side of the Cartan–Gorny inequality.
pub fn gorny_bound(q: &GornyQuery) -> Result<f64, GornyError> {
    q.validate()?;
    if q.log_g0 == f64::NEG_INFINITY {
        return Ok(f64::NEG_INFINITY);
    }
    let (m, k) = (q.m as f64, q.k as f64);
    let ratio = k / m;
    let factorial_branch = ln_factorial(q.m) + q.log_g0 + m * (2.0 / q.length).ln();
    Ok(LN_2
        + k * (2.0 + m.ln() - k.ln())
        + (1.0 - ratio) * q.log_g0
        + ratio * factorial_branch.max(q.log_gm))
}

/// Exponents of the split `ell = dn / p + dn1 / q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterpolationSplit {
    pub inv_p: f64,
    pub inv_q: f64,
    pub dn: usize,
    pub dn1: usize,
    pub ell: usize,
}

pub fn interpolation_split(dn: usize, dn1: usize, ell: usize) -> Result<InterpolationSplit, GornyError> {
    if !(dn < ell && ell < dn1) {
        return Err(GornyError::NoInteriorOrder { dn, dn1, ell });
    }
    let width = (dn1 - dn) as f64;
    Ok(InterpolationSplit {
        inv_p: (dn1 - ell) as f64 / width,
        inv_q: (ell - dn) as f64 / width,
        dn,
        dn1,
        ell,
    })
}

/// Grid estimate of `sup |f|` on `[a, b]`: a uniform pass of `grid` points,
/// then a finer pass around the best cell. A lower bound on the true sup.
pub fn sampled_sup_abs<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, grid: usize) -> f64 {
    let grid = grid.max(2);
    let step = (b - a) / (grid - 1) as f64;
    let (mut best_x, mut best) = (a, f64::NEG_INFINITY);
    for idx in 0..grid {
        let x = if idx == grid - 1 { b } else { a + idx as f64 * step };
        let v = f(x).abs();
        if v > best {
            best = v;
            best_x = x;
        }
    }
    let lo = (best_x - step).max(a);
    let hi = (best_x + step).min(b);
    let fine = (hi - lo) / (REFINE_POINTS - 1) as f64;
    for idx in 0..REFINE_POINTS {
        let v = f(lo + idx as f64 * fine).abs();
        if v > best {
            best = v;
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GornyCheck {
    pub function: String,
    pub a: f64,
    pub b: f64,
    pub m: usize,
    pub k: usize,
    /// `ln G_k` from sampling.
    #[serde(with = "crate::serde_log")]
    pub lhs: f64,
    /// The bound evaluated on sampled `G_0`, `G_m`.
    #[serde(with = "crate::serde_log")]
    pub rhs: f64,
    pub holds: bool,
}

/// Sample `G_0`, `G_k`, `G_m` of a corpus function and compare against the
/// bound.
///
/// Sampling under-estimates every sup-norm, which tightens the left side and
/// loosens the right side; a clean run is evidence, not proof.
pub fn verify_gorny_empirical(
    corpus: &CorpusRegistry,
    fn_id: &str,
    interval: (f64, f64),
    m: usize,
    k: usize,
) -> Result<GornyCheck, GornyError> {
    verify_gorny_sampled(corpus, fn_id, interval, m, k, DEFAULT_GRID)
}

pub fn verify_gorny_sampled(
    corpus: &CorpusRegistry,
    fn_id: &str,
    (a, b): (f64, f64),
    m: usize,
    k: usize,
    grid: usize,
) -> Result<GornyCheck, GornyError> {
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(GornyError::InvalidInterval { a, b });
    }
    let func = corpus
        .get(fn_id)
        .ok_or_else(|| GornyError::UnknownFunction(fn_id.to_string()))?;
    let log_sup = |order: usize| sampled_sup_abs(|x| func.derivative(order, x), a, b, grid).ln();
    let query = GornyQuery::new(log_sup(0), log_sup(m), m, k, b - a)?;
    let lhs = log_sup(k);
    let rhs = gorny_bound(&query)?;
    let holds = lhs == f64::NEG_INFINITY || lhs <= rhs + CMP_EPS;
    Ok(GornyCheck {
        function: fn_id.to_string(),
        a,
        b,
        m,
        k,
        lhs,
        rhs,
        holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn bound_examples() {
        let q = GornyQuery::new(0.0, 0.0, 2, 1, 2.0 * PI).unwrap();
        let v = gorny_bound(&q).unwrap();
        assert!((v - (4.0 * std::f64::consts::E.powi(2)).ln()).abs() < 1e-12);
        assert!((v - 3.3863).abs() < 1e-4);

        let q = GornyQuery::new(f64::NEG_INFINITY, 0.0, 2, 1, 1.0).unwrap();
        assert_eq!(gorny_bound(&q).unwrap(), f64::NEG_INFINITY);

        let q = GornyQuery::new(0.0, 10.0, 4, 2, 2.0).unwrap();
        let want = LN_2 + 2.0 * (2.0 + LN_2) + 5.0;
        assert!((gorny_bound(&q).unwrap() - want).abs() < 1e-12);
        assert!((want - 11.0794).abs() < 1e-4);
    }

    #[test]
    fn query_validation() {
        assert!(GornyQuery::new(0.0, 0.0, 1, 1, 1.0).is_err());
        assert!(GornyQuery::new(0.0, 0.0, 4, 0, 1.0).is_err());
        assert!(GornyQuery::new(0.0, 0.0, 4, 4, 1.0).is_err());
        assert!(GornyQuery::new(0.0, 0.0, 4, 2, 0.0).is_err());
        assert!(GornyQuery::new(f64::NAN, 0.0, 4, 2, 1.0).is_err());
    }

    #[test]
    fn split_examples() {
        let s = interpolation_split(4, 8, 6).unwrap();
        assert_eq!((s.inv_p, s.inv_q), (0.5, 0.5));
        let s = interpolation_split(4, 8, 5).unwrap();
        assert_eq!((s.inv_p, s.inv_q), (0.75, 0.25));
        assert_eq!(4.0 * s.inv_p + 8.0 * s.inv_q, 5.0);
        assert!(interpolation_split(10, 11, 10).is_err());
        assert!(interpolation_split(10, 11, 11).is_err());
    }

    #[test]
    fn empirical_examples() {
        let corpus = CorpusRegistry::standard();
        let r = verify_gorny_empirical(&corpus, "sine", (0.0, 2.0 * PI), 2, 1).unwrap();
        assert!(r.lhs.abs() < 1e-9);
        assert!((r.rhs - 3.3863).abs() < 1e-3);
        assert!(r.holds);

        let r = verify_gorny_empirical(&corpus, "constant", (0.0, 1.0), 2, 1).unwrap();
        assert_eq!(r.lhs, f64::NEG_INFINITY);
        assert!(r.holds);

        let r = verify_gorny_empirical(&corpus, "exp", (0.0, 1.0), 3, 2).unwrap();
        assert!((r.lhs - 1.0).abs() < 1e-12);
        assert!(r.holds);

        assert_eq!(
            verify_gorny_empirical(&corpus, "nope", (0.0, 1.0), 3, 2).unwrap_err(),
            GornyError::UnknownFunction("nope".into())
        );
    }

    #[test]
    fn sampled_sup_finds_interior_peak() {
        let s = sampled_sup_abs(|x| 1.0 - (x - 0.123_456_7).powi(2), 0.0, 1.0, 50);
        assert!((s - 1.0).abs() < 1e-6);
    }
}
