//! Weight sequences in log domain and the structural conditions imposed on them.
//!
//! A [`LogSequence`] stores `ln M_0, ..., ln M_{n_max}` with `ln M_0 = 0`. The
//! checkers here cover log-convexity, the interpolation condition on triples
//! `(i, j, k)` above a threshold `m0`, the analytic-inclusion constant
//! `M_n >= c^n n^n`, and the Carleman partial sum.

mod family;

pub use family::{
    build_sequence, DoublyExponential, Explicit, FamilyRegistry, FamilySpec, Geometric, Gevrey,
    NLogN, SequenceSpec, WeightFamily,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::logmath::{le_rel, CMP_EPS};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SequenceError {
    #[error("sequence entry {index} is not finite")]
    NonFinite { index: usize },
    #[error("first log entry must be 0 (M_0 = 1), got {0}")]
    NotNormalized(f64),
    #[error("sequence needs n_max >= 2, got {n_max}")]
    TooShort { n_max: usize },
    #[error("invalid family parameter: {0}")]
    InvalidParameter(String),
    #[error("unknown family '{0}'")]
    UnknownFamily(String),
    #[error("family '{family}' cannot provide index {index}")]
    OutOfDomain { family: String, index: usize },
}

/// `ln M_n` for `n = 0..=n_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct LogSequence {
    logs: Vec<f64>,
    closed_form_verdict: Option<bool>,
}

impl LogSequence {
    /// Requires `logs[0] == 0`, every entry finite, and at least three entries.
    pub fn new(logs: Vec<f64>) -> Result<Self, SequenceError> {
        if logs.len() < 3 {
            return Err(SequenceError::TooShort {
                n_max: logs.len().saturating_sub(1),
            });
        }
        if let Some(index) = logs.iter().position(|v| !v.is_finite()) {
            return Err(SequenceError::NonFinite { index });
        }
        if logs[0] != 0.0 {
            return Err(SequenceError::NotNormalized(logs[0]));
        }
        Ok(Self {
            logs,
            closed_form_verdict: None,
        })
    }

    /// Shifts every entry by `-logs[0]` first.
    pub fn normalized(mut logs: Vec<f64>) -> Result<Self, SequenceError> {
        if let Some(&first) = logs.first() {
            if first.is_finite() {
                logs.iter_mut().for_each(|v| *v -= first);
            }
        }
        Self::new(logs)
    }

    pub fn logs(&self) -> &[f64] {
        &self.logs
    }

    pub fn n_max(&self) -> usize {
        self.logs.len() - 1
    }

    /// `ln M_n`, if stored.
    pub fn get(&self, n: usize) -> Option<f64> {
        self.logs.get(n).copied()
    }

    /// The sequence `K^n M_n`, i.e. `logs[n] + n ln K`.
    pub fn rescaled(&self, log_k: f64) -> Result<Self, SequenceError> {
        Self::new(
            self.logs
                .iter()
                .enumerate()
                .map(|(n, v)| v + n as f64 * log_k)
                .collect(),
        )
    }

    /// Known quasi-analyticity of the family this prefix came from.
    pub fn closed_form_verdict(&self) -> Option<bool> {
        self.closed_form_verdict
    }

    pub fn into_logs(self) -> Vec<f64> {
        self.logs
    }
}

/// Where a condition first failed: the condition label plus the indices involved.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub condition: String,
    pub indices: Vec<usize>,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let idx: Vec<String> = self.indices.iter().map(ToString::to_string).collect();
        match self.indices.len() {
            0 => write!(f, "{} violated", self.condition),
            1 => write!(f, "{} violated at order {}", self.condition, idx[0]),
            _ => write!(f, "{} violated at ({})", self.condition, idx.join(", ")),
        }
    }
}

/// Outcome of a condition check. `margin` is the smallest slack seen in log
/// domain (negative at a violation, `+inf` when nothing was checked).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub holds: bool,
    pub first_violation: Option<Violation>,
    #[serde(with = "crate::serde_log")]
    pub margin: f64,
}

impl ConditionReport {
    pub fn satisfied(margin: f64) -> Self {
        Self {
            holds: true,
            first_violation: None,
            margin,
        }
    }

    pub fn violated(condition: &str, indices: Vec<usize>, margin: f64) -> Self {
        Self {
            holds: false,
            first_violation: Some(Violation {
                condition: condition.to_string(),
                indices,
            }),
            margin,
        }
    }
}

/// `ln m_n = ln(M_{n+1} / M_n)` for `n = 0..n_max`.
pub fn ratios(seq: &LogSequence) -> Vec<f64> {
    seq.logs.windows(2).map(|w| w[1] - w[0]).collect()
}

/// `M_n^2 <= M_{n-1} M_{n+1}` for `1 <= n < n_max`.
pub fn check_log_convex(seq: &LogSequence) -> ConditionReport {
    let logs = &seq.logs;
    let mut margin = f64::INFINITY;
    for n in 1..logs.len() - 1 {
        let lhs = 2.0 * logs[n];
        let rhs = logs[n - 1] + logs[n + 1];
        margin = margin.min(rhs - lhs);
        if !le_rel(lhs, rhs, CMP_EPS) {
            return ConditionReport::violated("log-convexity", vec![n], margin);
        }
    }
    ConditionReport::satisfied(margin)
}

/// `M_j <= M_k^{j/k} M_i^{j/i}` for all `i, k > m0`, `i < j <= n_max`,
/// `j/i < k <= n_max`.
///
/// Exhaustive O(n_max^3) scan that stops at the first violation. A threshold
/// `m0 >= n_max` leaves no admissible triple and the check holds vacuously.
pub fn check_condition_a(seq: &LogSequence, m0: f64) -> ConditionReport {
    let logs = &seq.logs;
    let n_max = seq.n_max();
    let lowest = if m0 < 0.0 { 1 } else { m0.floor() as usize + 1 };
    let mut margin = f64::INFINITY;
    for i in lowest..=n_max {
        for j in i + 1..=n_max {
            let k_min = lowest.max(j / i + 1);
            let (jf, inv_i) = (j as f64, 1.0 / i as f64);
            let lhs = logs[j];
            let from_i = jf * inv_i * logs[i];
            for (k, &log_k) in logs.iter().enumerate().skip(k_min) {
                let rhs = jf / k as f64 * log_k + from_i;
                margin = margin.min(rhs - lhs);
                if !le_rel(lhs, rhs, CMP_EPS) {
                    return ConditionReport::violated("(A)", vec![i, j, k], margin);
                }
            }
        }
    }
    ConditionReport::satisfied(margin)
}

/// Largest `c` with `M_n >= c^n n^n` on the stored prefix.
pub fn fit_analytic_constant(seq: &LogSequence) -> f64 {
    seq.logs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(n, &l)| l / n as f64 - (n as f64).ln())
        .fold(f64::INFINITY, f64::min)
        .exp()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuasianalyticDiagnostic {
    /// `sum_{n=1}^{n_max} M_{n-1} / M_n`.
    pub partial_sum: f64,
    /// Only set for families whose verdict is known in closed form.
    pub analytic_verdict: Option<bool>,
}

/// Carleman partial sum plus the family's closed-form verdict, if any. The
/// partial sum alone never decides the verdict.
pub fn quasianalytic_diagnostic(seq: &LogSequence) -> QuasianalyticDiagnostic {
    QuasianalyticDiagnostic {
        partial_sum: ratios(seq).iter().map(|r| (-r).exp()).sum(),
        analytic_verdict: seq.closed_form_verdict,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gevrey(s: f64, n: usize) -> LogSequence {
        build_sequence(&FamilySpec::gevrey(s), n).unwrap()
    }

    #[test]
    fn log_sequence_invariants() {
        assert_eq!(
            LogSequence::new(vec![0.0, 1.0]),
            Err(SequenceError::TooShort { n_max: 1 })
        );
        assert_eq!(
            LogSequence::new(vec![0.5, 1.0, 2.0]),
            Err(SequenceError::NotNormalized(0.5))
        );
        assert_eq!(
            LogSequence::new(vec![0.0, f64::INFINITY, 2.0]),
            Err(SequenceError::NonFinite { index: 1 })
        );
        let seq = LogSequence::normalized(vec![0.5, 1.0, 2.0]).unwrap();
        assert_eq!(seq.logs(), &[0.0, 0.5, 1.5]);
    }

    #[test]
    fn ratio_examples() {
        let r = ratios(&gevrey(1.0, 5));
        assert_eq!(r.len(), 5);
        assert!((r[1] - 4f64.ln()).abs() < 1e-14);
        let r = ratios(&LogSequence::new(vec![0.0; 6]).unwrap());
        assert!(r.iter().all(|&v| v == 0.0));
        let r = ratios(&build_sequence(&FamilySpec::named("nlogn"), 4).unwrap());
        assert!((r[1] - 0.653_268_519_956_561_9).abs() < 1e-14);
    }

    #[test]
    fn ratios_multiply_back() {
        let seq = gevrey(1.5, 30);
        let total: f64 = ratios(&seq).iter().sum();
        assert!((total - seq.logs()[30]).abs() < 1e-10);
    }

    #[test]
    fn log_convex_examples() {
        let seq = gevrey(1.0, 3);
        let report = check_log_convex(&seq);
        assert!(report.holds);
        // n = 2: ln 1 + ln 27 - 2 ln 4
        assert!(report.margin <= 27f64.ln() - 2.0 * 4f64.ln() + 1e-12);

        let flat = check_log_convex(&LogSequence::new(vec![0.0; 4]).unwrap());
        assert!(flat.holds);
        assert_eq!(flat.margin, 0.0);

        let bad = check_log_convex(&LogSequence::new(vec![0.0, 2.0, 2.0, 2.0]).unwrap());
        assert!(!bad.holds);
        assert_eq!(bad.first_violation.unwrap().indices, vec![1]);
        assert_eq!(bad.margin, -2.0);
    }

    #[test]
    fn condition_a_single_triple() {
        // only (2, 3, 4) is admissible with m0 = 1 on n_max = 4 besides the
        // others; check the displayed one directly: 27 <= 256^{3/4} 4^{3/2} = 512
        let seq = gevrey(1.0, 4);
        let l = seq.logs();
        let rhs = 0.75 * l[4] + 1.5 * l[2];
        assert!((rhs - 512f64.ln()).abs() < 1e-12);
        assert!(l[3] <= rhs);
        assert!(check_condition_a(&seq, 1.0).holds);
    }

    #[test]
    fn condition_a_on_named_families() {
        assert!(check_condition_a(&gevrey(1.0, 50), 1.0).holds);
        let nlogn = build_sequence(&FamilySpec::named("nlogn"), 50).unwrap();
        assert!(check_condition_a(&nlogn, std::f64::consts::E.powi(2)).holds);
    }

    #[test]
    fn condition_a_detects_violation() {
        // a bump at j = 3 breaks M_3 <= M_k^{3/k} M_2^{3/2}
        let mut logs = gevrey(1.0, 6).into_logs();
        logs[3] += 10.0;
        let report = check_condition_a(&LogSequence::new(logs).unwrap(), 1.0);
        assert!(!report.holds);
        let v = report.first_violation.unwrap();
        assert_eq!(v.condition, "(A)");
        assert_eq!(v.indices[1], 3);
        assert!(report.margin < 0.0);
    }

    #[test]
    fn condition_a_vacuous_above_n_max() {
        let report = check_condition_a(&gevrey(1.0, 5), 5.0);
        assert!(report.holds);
        assert_eq!(report.margin, f64::INFINITY);
    }

    #[test]
    fn analytic_constant_examples() {
        assert!((fit_analytic_constant(&gevrey(1.0, 40)) - 1.0).abs() < 1e-12);
        assert!((fit_analytic_constant(&gevrey(2.0, 10)) - 1.0).abs() < 1e-12);
        let nlogn = build_sequence(&FamilySpec::named("nlogn"), 50).unwrap();
        assert!((fit_analytic_constant(&nlogn) - 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn quasianalytic_examples() {
        assert_eq!(
            quasianalytic_diagnostic(&gevrey(1.0, 20)).analytic_verdict,
            Some(true)
        );
        let nlogn = build_sequence(&FamilySpec::named("nlogn"), 20).unwrap();
        assert_eq!(quasianalytic_diagnostic(&nlogn).analytic_verdict, Some(true));

        let seq = gevrey(2.0, 100);
        let diag = quasianalytic_diagnostic(&seq);
        assert_eq!(diag.analytic_verdict, Some(false));
        // independent summation of M_{n-1} / M_n
        let l = seq.logs();
        let direct: f64 = (1..=100).map(|n| (l[n - 1] - l[n]).exp()).sum();
        assert!((diag.partial_sum - direct).abs() < 1e-12);
        assert!(diag.partial_sum.is_finite());

        let explicit = LogSequence::new(vec![0.0, 1.0, 3.0]).unwrap();
        assert_eq!(quasianalytic_diagnostic(&explicit).analytic_verdict, None);
    }

    #[test]
    fn violation_display() {
        let v = Violation {
            condition: "(C)".into(),
            indices: vec![4],
        };
        assert_eq!(v.to_string(), "(C) violated at order 4");
    }
}
