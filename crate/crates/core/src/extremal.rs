//! Extremal trigonometric series for a log-convex sequence `N`.
//!
//! With `m_k = N_{k+1} / N_k`,
//!
//! ```text
//! g(x) = sum_k N_k / (2 m_k)^k (cos(2 m_k x) + sin(2 m_k x))
//! ```
//!
//! satisfies `|g^{(n)}| <= 2^{n+2} N_n` everywhere and `|g^{(n)}(0)| >= N_n`.
//! The series is centred at the midpoint of `[a, b]`. Only a finite prefix of
//! `N` is stored; beyond the truncation index `K` the ratio is frozen at
//! `m_{K-1}`, which keeps the extended sequence log-convex and turns every tail
//! into a geometric series.

use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::logmath::{log_add_exp, log_sum_exp, CMP_EPS};
use crate::sequences::{check_log_convex, ratios, LogSequence};

/// `exp(x)` underflows to zero below this.
const UNDERFLOW_LOG: f64 = -745.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExtremalError {
    #[error("sequence is not log-convex at index {0}")]
    NotLogConvex(usize),
    #[error("truncation index must be in 2..={n_max}, got {k_trunc}")]
    InvalidTruncation { k_trunc: usize, n_max: usize },
    #[error("derivative order {order} exceeds the stored prefix (n_max = {n_max})")]
    OrderBeyondPrefix { order: usize, n_max: usize },
    #[error("evaluation point must be finite, got {0}")]
    NonFinitePoint(f64),
    #[error("invalid interval [{a}, {b}]")]
    InvalidInterval { a: f64, b: f64 },
    #[error("finite-difference order must be in 1..=4, got {0}")]
    UnsupportedStencil(usize),
    #[error("finite-difference step must be positive, got {0}")]
    InvalidStep(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtremalSeries {
    weights: LogSequence,
    log_m: Vec<f64>,
    k_trunc: usize,
    a: f64,
    b: f64,
    log_scale: f64,
}

/// A truncated evaluation. `value` may overflow to `inf`; `log_abs` does not.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub value: f64,
    #[serde(with = "crate::serde_log")]
    pub log_abs: f64,
    /// `ln` of a bound on `|true value - value|`.
    #[serde(with = "crate::serde_log")]
    pub log_tail_bound: f64,
    pub terms_used: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UpperBoundCheck {
    pub order: usize,
    /// `ln(max_grid |g^{(n)}| + tail bound)`.
    #[serde(with = "crate::serde_log")]
    pub log_sup_sampled: f64,
    /// `ln(2^{n+2} N_n)`.
    pub log_bound: f64,
    pub holds: bool,
}

impl UpperBoundCheck {
    pub fn sup_sampled(&self) -> f64 {
        self.log_sup_sampled.exp()
    }

    pub fn bound(&self) -> f64 {
        self.log_bound.exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MidpointCheck {
    pub order: usize,
    /// `ln |g^{(n)}(centre)|`.
    pub log_value: f64,
    /// `ln N_n`.
    pub log_lower: f64,
    pub holds: bool,
}

impl MidpointCheck {
    pub fn value(&self) -> f64 {
        self.log_value.exp()
    }

    pub fn lower(&self) -> f64 {
        self.log_lower.exp()
    }
}

/// `cos(t + n pi/2) + sin(t + n pi/2)` by quarter-turn rotation.
fn shifted_trig(order: usize, theta: f64) -> f64 {
    let (s, c) = theta.sin_cos();
    match order % 4 {
        0 => c + s,
        1 => c - s,
        2 => -c - s,
        _ => s - c,
    }
}

/// Build the series for `weights` on `[a, b]` with `k_trunc` retained terms
/// (default `n_max`).
pub fn build_extremal(
    weights: &LogSequence,
    interval: (f64, f64),
    k_trunc: Option<usize>,
) -> Result<ExtremalSeries, ExtremalError> {
    let (a, b) = interval;
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(ExtremalError::InvalidInterval { a, b });
    }
    let report = check_log_convex(weights);
    if let Some(v) = report.first_violation {
        return Err(ExtremalError::NotLogConvex(v.indices[0]));
    }
    let n_max = weights.n_max();
    let k_trunc = k_trunc.unwrap_or(n_max);
    if k_trunc < 2 || k_trunc > n_max {
        return Err(ExtremalError::InvalidTruncation { k_trunc, n_max });
    }
    Ok(ExtremalSeries {
        log_m: ratios(weights),
        weights: weights.clone(),
        k_trunc,
        a,
        b,
        log_scale: 0.0,
    })
}

impl ExtremalSeries {
    pub fn weights(&self) -> &LogSequence {
        &self.weights
    }

    pub fn log_m(&self) -> &[f64] {
        &self.log_m
    }

    pub fn k_trunc(&self) -> usize {
        self.k_trunc
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    pub fn center(&self) -> f64 {
        0.5 * (self.a + self.b)
    }

    /// The series for `lambda N` with the same frequencies.
    pub fn scaled(mut self, log_lambda: f64) -> Self {
        self.log_scale += log_lambda;
        self
    }

    fn check_order(&self, order: usize) -> Result<(), ExtremalError> {
        let n_max = self.weights.n_max();
        if order > n_max {
            return Err(ExtremalError::OrderBeyondPrefix { order, n_max });
        }
        Ok(())
    }

    /// `ln N_n` as used by the series (stored value, scaled).
    fn log_weight(&self, n: usize) -> f64 {
        self.weights.logs()[n] + self.log_scale
    }

    /// `ln N_n` of the extended sequence: the stored prefix up to `K`, then the
    /// frozen ratio.
    pub fn effective_log_weight(&self, n: usize) -> f64 {
        let k = self.k_trunc;
        if n <= k {
            self.log_weight(n)
        } else {
            self.log_weight(k) + (n - k) as f64 * self.log_m[k - 1]
        }
    }

    /// `ln` of the `k`-th term's amplitude in the `n`-th derivative.
    fn term_log(&self, order: usize, k: usize) -> f64 {
        self.log_weight(k) + (order as f64 - k as f64) * (LN_2 + self.log_m[k])
    }

    /// `ln sum_k |term_k|` over the retained terms: the natural scale of `g^{(n)}`.
    pub fn log_amplitude(&self, order: usize) -> Result<f64, ExtremalError> {
        self.check_order(order)?;
        Ok(log_sum_exp((0..self.k_trunc).map(|k| self.term_log(order, k))))
    }

    pub fn eval_derivative(&self, order: usize, x: f64) -> Result<EvalResult, ExtremalError> {
        self.check_order(order)?;
        if !x.is_finite() {
            return Err(ExtremalError::NonFinitePoint(x));
        }
        let shift = x - self.center();
        let logs: Vec<f64> = (0..self.k_trunc).map(|k| self.term_log(order, k)).collect();
        let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);

        let mut mantissa = 0.0;
        let mut terms_used = 0;
        let mut log_skipped = f64::NEG_INFINITY;
        for (k, &t) in logs.iter().enumerate() {
            if t - top < UNDERFLOW_LOG {
                log_skipped = log_add_exp(log_skipped, t + LN_2);
                continue;
            }
            let omega = 2.0 * self.log_m[k].exp();
            mantissa += (t - top).exp() * shifted_trig(order, omega * shift);
            terms_used += 1;
        }

        let log_abs = if mantissa == 0.0 {
            f64::NEG_INFINITY
        } else {
            top + mantissa.abs().ln()
        };
        let value = mantissa.signum() * log_abs.exp();
        // sum_{k >= K} 2 N_n 2^{n-k}, carried with one extra factor 2
        let tail = self.log_weight(order) + (order as f64 - self.k_trunc as f64 + 3.0) * LN_2;
        Ok(EvalResult {
            value: if mantissa == 0.0 { 0.0 } else { value },
            log_abs,
            log_tail_bound: log_add_exp(tail, log_skipped),
            terms_used,
        })
    }

    /// Sampled sup of `|g^{(n)}|` on a uniform grid of `[a, b]` plus the tail,
    /// against `2^{n+2} N_n`.
    pub fn check_upper_bound(
        &self,
        order: usize,
        grid_size: usize,
    ) -> Result<UpperBoundCheck, ExtremalError> {
        self.check_order(order)?;
        let grid_size = grid_size.max(2);
        let step = (self.b - self.a) / (grid_size - 1) as f64;
        let mut log_sup = f64::NEG_INFINITY;
        let mut log_tail = f64::NEG_INFINITY;
        for idx in 0..grid_size {
            let x = if idx == grid_size - 1 {
                self.b
            } else {
                self.a + idx as f64 * step
            };
            let r = self.eval_derivative(order, x)?;
            log_sup = log_sup.max(r.log_abs);
            log_tail = log_tail.max(r.log_tail_bound);
        }
        let log_sup_sampled = log_add_exp(log_sup, log_tail);
        let log_bound = (order as f64 + 2.0) * LN_2 + self.log_weight(order);
        Ok(UpperBoundCheck {
            order,
            log_sup_sampled,
            log_bound,
            holds: log_sup_sampled <= log_bound + CMP_EPS,
        })
    }

    /// `|g^{(n)}(centre)| = sum_k N_k (2 m_k)^{n-k}` against `N_n`.
    ///
    /// All terms are positive at the centre, and the frozen-ratio tail sums in
    /// closed form to `N_K m_{K-1}^{n-K} 2^{n-K+1}`, so the value is exact.
    pub fn check_midpoint_lower(&self, order: usize) -> Result<MidpointCheck, ExtremalError> {
        self.check_order(order)?;
        let k = self.k_trunc;
        let n = order as f64;
        let tail = self.log_weight(k) + (n - k as f64) * self.log_m[k - 1] + (n - k as f64 + 1.0) * LN_2;
        let log_value = log_sum_exp((0..k).map(|j| self.term_log(order, j)).chain([tail]));
        let log_lower = self.effective_log_weight(order);
        Ok(MidpointCheck {
            order,
            log_value,
            log_lower,
            holds: log_value >= log_lower - CMP_EPS,
        })
    }

    /// Central difference of order `n` (fourth-order accurate) applied to
    /// `g = eval_derivative(0, .)`.
    pub fn finite_difference_oracle(&self, order: usize, x: f64, h: f64) -> Result<f64, ExtremalError> {
        if !(h > 0.0) || !h.is_finite() {
            return Err(ExtremalError::InvalidStep(h));
        }
        let (weights, denom): (&[f64], f64) = match order {
            1 => (&[1.0, -8.0, 0.0, 8.0, -1.0], 12.0 * h),
            2 => (&[-1.0, 16.0, -30.0, 16.0, -1.0], 12.0 * h * h),
            3 => (&[1.0, -8.0, 13.0, 0.0, -13.0, 8.0, -1.0], 8.0 * h.powi(3)),
            4 => (&[-1.0, 12.0, -39.0, 56.0, -39.0, 12.0, -1.0], 6.0 * h.powi(4)),
            other => return Err(ExtremalError::UnsupportedStencil(other)),
        };
        let half = (weights.len() / 2) as f64;
        let mut acc = 0.0;
        for (idx, &w) in weights.iter().enumerate() {
            if w != 0.0 {
                acc += w * self.eval_derivative(0, x + (idx as f64 - half) * h)?.value;
            }
        }
        Ok(acc / denom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequences::{build_sequence, FamilySpec};
    use std::f64::consts::SQRT_2;

    fn constant_series() -> ExtremalSeries {
        let n = LogSequence::new(vec![0.0; 41]).unwrap();
        build_extremal(&n, (-1.0, 1.0), None).unwrap()
    }

    /// Closed form of the constant-N series: `2 (cos 2x + sin 2x)`.
    fn constant_closed_form(order: usize, x: f64) -> f64 {
        2.0 * 2f64.powi(order as i32) * shifted_trig(order, 2.0 * x)
    }

    #[test]
    fn constant_series_matches_closed_form() {
        let s = constant_series();
        assert!(s.log_m().iter().all(|&v| v == 0.0));
        for order in 0..6 {
            for &x in &[-0.9, -0.2, 0.0, 0.3, 0.77] {
                let r = s.eval_derivative(order, x).unwrap();
                let want = constant_closed_form(order, x);
                assert!(
                    (r.value - want).abs() <= r.log_tail_bound.exp() + 1e-12,
                    "order {order} x {x}: {} vs {want}",
                    r.value
                );
            }
        }
        let r = s.eval_derivative(0, 0.0).unwrap();
        assert!((r.value - 2.0).abs() < 1e-10);
    }

    #[test]
    fn constant_series_first_derivative_sup() {
        let s = constant_series();
        let check = s.check_upper_bound(1, 4096).unwrap();
        assert!((check.sup_sampled() - 4.0 * SQRT_2).abs() < 1e-3);
        assert!((check.bound() - 8.0).abs() < 1e-12);
        assert!(check.holds);
    }

    #[test]
    fn order_zero_bound() {
        let seq = build_sequence(&FamilySpec::gevrey(1.0), 20).unwrap();
        let s = build_extremal(&seq, (0.0, 1.0), None).unwrap();
        let check = s.check_upper_bound(0, 2048).unwrap();
        assert!(check.holds);
        assert!(check.log_sup_sampled <= (4f64).ln() + 1e-9);
    }

    #[test]
    fn midpoint_examples() {
        let s = constant_series();
        let c = s.check_midpoint_lower(0).unwrap();
        assert!((c.value() - 2.0).abs() < 1e-12);
        assert!(c.holds);
        let c = s.check_midpoint_lower(3).unwrap();
        assert!((c.value() - 16.0).abs() < 1e-10);
        assert_eq!(c.lower(), 1.0);

        let seq = build_sequence(&FamilySpec::gevrey(1.0), 12).unwrap();
        let s = build_extremal(&seq, (0.0, 1.0), Some(8)).unwrap();
        let c = s.check_midpoint_lower(7).unwrap();
        assert!(c.holds);
        assert!(c.log_value >= seq.logs()[7]);
    }

    #[test]
    fn midpoint_value_matches_direct_evaluation() {
        let seq = build_sequence(&FamilySpec::gevrey(1.0), 16).unwrap();
        let s = build_extremal(&seq, (0.0, 1.0), None).unwrap();
        for order in [0, 1, 2, 5, 9] {
            let direct = s.eval_derivative(order, s.center()).unwrap();
            let c = s.check_midpoint_lower(order).unwrap();
            // the direct sum lacks only the closed-form tail
            assert!(direct.log_abs <= c.log_value + 1e-12);
            assert!(c.log_value.exp() - direct.log_abs.exp() <= direct.log_tail_bound.exp());
        }
    }

    #[test]
    fn finite_difference_examples() {
        let s = constant_series();
        let fd = s.finite_difference_oracle(1, 0.0, 1e-5).unwrap();
        assert!((fd - 4.0).abs() / 4.0 < 1e-8);
        let fd = s.finite_difference_oracle(2, 0.0, 1e-3).unwrap();
        assert!((fd + 8.0).abs() / 8.0 < 1e-6);
        let fd = s.finite_difference_oracle(1, 0.0, 1.0).unwrap();
        assert!((fd - 4.0).abs() / 4.0 > 1e-2);
        assert!(s.finite_difference_oracle(5, 0.0, 1e-3).is_err());
        assert!(s.finite_difference_oracle(1, 0.0, 0.0).is_err());
    }

    #[test]
    fn rejects_bad_inputs() {
        let bad = LogSequence::new(vec![0.0, 2.0, 2.0, 2.0]).unwrap();
        assert_eq!(
            build_extremal(&bad, (0.0, 1.0), None).unwrap_err(),
            ExtremalError::NotLogConvex(1)
        );
        let seq = LogSequence::new(vec![0.0; 5]).unwrap();
        assert!(build_extremal(&seq, (0.0, 1.0), Some(1)).is_err());
        assert!(build_extremal(&seq, (0.0, 1.0), Some(5)).is_err());
        assert!(build_extremal(&seq, (1.0, 0.0), None).is_err());
        let s = build_extremal(&seq, (0.0, 1.0), None).unwrap();
        assert!(matches!(
            s.eval_derivative(5, 0.5),
            Err(ExtremalError::OrderBeyondPrefix { .. })
        ));
        assert!(s.eval_derivative(1, f64::NAN).is_err());
    }
}
