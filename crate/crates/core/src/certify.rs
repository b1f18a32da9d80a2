//! Membership certificates for `C^M` from sparse derivative bounds.
//!
//! Given bounds `F_{d_n}` on the sup-norms of `f^{(d_n)}` for a gap sequence
//! with `d_{n+1} / d_n <= c0`, every intermediate order `d_n < l < d_{n+1}` is
//! bounded through the Cartan–Gorny inequality applied to `g = f^{(d_n)}`,
//! `m = d_{n+1} - d_n`, `k = l - d_n`. The resulting per-order envelope is
//! dominated by `C1^l M_l` with
//!
//! ```text
//! C1 = 2 e^{c0 - 1} (2 (c0 - 1) / (c (b - a)) + M_{c0}^{1/c0})
//! ```
//!
//! and a single `K` with `F_l <= K^{l+1} M_l` is read off the envelope.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gorny::{interpolation_split, GornyError};
use crate::logmath::{le_rel, CMP_EPS};
use crate::sequences::{
    check_condition_a, check_log_convex, fit_analytic_constant, ConditionReport, LogSequence,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CertifyError {
    #[error("gap sequence needs at least two orders, got {0}")]
    TooFewOrders(usize),
    #[error("gap sequence must be strictly increasing positive integers (problem at position {0})")]
    NotIncreasing(usize),
    #[error("sparse bounds must list exactly the gap orders with finite logs (problem at order {0})")]
    BoundsMismatch(usize),
    #[error("order {order} exceeds the weight prefix (n_max = {n_max})")]
    OrderBeyondPrefix { order: usize, n_max: usize },
    #[error("interval length must be positive, got {0}")]
    InvalidLength(f64),
    #[error("hypothesis failed: {}", .0.first_violation.as_ref().map(|v| v.to_string()).unwrap_or_default())]
    Hypothesis(ConditionReport),
    #[error(transparent)]
    Split(#[from] GornyError),
}

/// Strictly increasing derivative orders `d_0 < d_1 < ...`, all `>= 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct GapSequence(Vec<usize>);

impl GapSequence {
    pub fn new(orders: Vec<usize>) -> Result<Self, CertifyError> {
        if orders.len() < 2 {
            return Err(CertifyError::TooFewOrders(orders.len()));
        }
        if orders[0] == 0 {
            return Err(CertifyError::NotIncreasing(0));
        }
        if let Some(pos) = orders.windows(2).position(|w| w[1] <= w[0]) {
            return Err(CertifyError::NotIncreasing(pos + 1));
        }
        Ok(Self(orders))
    }

    pub fn orders(&self) -> &[usize] {
        &self.0
    }

    pub fn first(&self) -> usize {
        self.0[0]
    }

    pub fn last(&self) -> usize {
        self.0[self.0.len() - 1]
    }
}

impl TryFrom<Vec<usize>> for GapSequence {
    type Error = CertifyError;
    fn try_from(v: Vec<usize>) -> Result<Self, Self::Error> {
        Self::new(v)
    }
}

impl From<GapSequence> for Vec<usize> {
    fn from(g: GapSequence) -> Self {
        g.0
    }
}

/// `ln F_{d_n}` at every gap order, plus optional bounds below `d_0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseBounds {
    pub entries: Vec<(usize, f64)>,
    /// `(order, ln F)` for orders below `d_0`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub low_orders: Vec<(usize, f64)>,
}

impl SparseBounds {
    pub fn new(entries: Vec<(usize, f64)>) -> Self {
        Self {
            entries,
            low_orders: Vec::new(),
        }
    }

    pub fn with_low_orders(mut self, low_orders: Vec<(usize, f64)>) -> Self {
        self.low_orders = low_orders;
        self
    }

    fn validate(&self, d: &GapSequence) -> Result<(), CertifyError> {
        if self.entries.len() != d.0.len() {
            return Err(CertifyError::BoundsMismatch(
                d.0.get(self.entries.len()).copied().unwrap_or(0),
            ));
        }
        for (&order, &(got, log_f)) in d.0.iter().zip(&self.entries) {
            if got != order || !log_f.is_finite() {
                return Err(CertifyError::BoundsMismatch(order));
            }
        }
        for &(order, log_f) in &self.low_orders {
            if order >= d.first() || !log_f.is_finite() {
                return Err(CertifyError::BoundsMismatch(order));
            }
        }
        Ok(())
    }
}

/// `max d_{n+1} / d_n`.
pub fn gap_ratio(d: &GapSequence) -> f64 {
    d.0.windows(2)
        .map(|w| w[1] as f64 / w[0] as f64)
        .fold(f64::NEG_INFINITY, f64::max)
}

fn worst(a: ConditionReport, b: ConditionReport) -> ConditionReport {
    let margin = a.margin.min(b.margin);
    match (a.holds, b.holds) {
        (true, true) => ConditionReport::satisfied(margin),
        (false, _) => ConditionReport { margin, ..a },
        (true, false) => ConditionReport { margin, ..b },
    }
}

/// Log-convexity, (A) above `m0`, (B) with the fitted constant, and
/// `F_{d_n} <= M_{d_n}` (C), reported in that order.
pub fn check_hypotheses(
    weights: &LogSequence,
    d: &GapSequence,
    bounds: &SparseBounds,
    m0: f64,
) -> Result<ConditionReport, CertifyError> {
    let n_max = weights.n_max();
    if d.last() > n_max {
        return Err(CertifyError::OrderBeyondPrefix {
            order: d.last(),
            n_max,
        });
    }
    bounds.validate(d)?;

    let mut report = check_log_convex(weights);
    if report.holds {
        report = worst(report, check_condition_a(weights, m0));
    }
    if report.holds {
        let c = fit_analytic_constant(weights);
        if !(c > 0.0) {
            report = ConditionReport::violated("(B)", vec![], report.margin);
        }
    }
    if report.holds {
        let mut margin = f64::INFINITY;
        let mut failure = None;
        for &(order, log_f) in &bounds.entries {
            let log_m = weights.logs()[order];
            margin = margin.min(log_m - log_f);
            if !le_rel(log_f, log_m, CMP_EPS) {
                failure = Some(order);
                break;
            }
        }
        let c_report = match failure {
            Some(order) => ConditionReport::violated("(C)", vec![order], margin),
            None => ConditionReport::satisfied(margin),
        };
        report = worst(report, c_report);
    }
    Ok(report)
}

/// Log bound on `F_l` for `dn < l < dn1` from the bounds at the two
/// neighbouring gap orders:
///
/// ```text
/// max{ ln 2 + l (c0 - 1) + (l - dn) ln(2 dn (c0 - 1) / len) + ln F_dn,
///      ln 2 + l (c0 - 1) + ln F_dn / p + ln F_dn1 / q }
/// ```
///
/// with `c0 = max(dn1 / dn, 2)`. The factor bound
/// `(e^2 m / k)^k <= e^{l (c0 - 1)}` needs `c0 >= 2`, hence the floor.
pub fn intermediate_envelope(
    weights: &LogSequence,
    dn: usize,
    dn1: usize,
    ell: usize,
    log_f_dn: f64,
    log_f_dn1: f64,
    length: f64,
) -> Result<f64, CertifyError> {
    let split = interpolation_split(dn, dn1, ell)?;
    if !(length > 0.0) || !length.is_finite() {
        return Err(CertifyError::InvalidLength(length));
    }
    let n_max = weights.n_max();
    if dn1 > n_max {
        return Err(CertifyError::OrderBeyondPrefix { order: dn1, n_max });
    }
    let c0 = (dn1 as f64 / dn as f64).max(2.0);
    let l = ell as f64;
    let common = std::f64::consts::LN_2 + l * (c0 - 1.0);
    let branch_factorial =
        common + (ell - dn) as f64 * (2.0 * dn as f64 * (c0 - 1.0) / length).ln() + log_f_dn;
    let branch_interp = common + split.inv_p * log_f_dn + split.inv_q * log_f_dn1;
    Ok(branch_factorial.max(branch_interp))
}

/// Which orders the envelope covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Coverage {
    /// Every order from 0 to the last gap order.
    Full,
    /// Orders below `first_order` had no bound supplied.
    Partial { first_order: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub c0: f64,
    pub c: f64,
    pub length: f64,
    #[serde(rename = "log_C1")]
    pub log_c1: f64,
    #[serde(rename = "log_K")]
    pub log_k: f64,
    /// `(l, ln F_l bound)` for every covered order, ascending.
    pub envelope: Vec<(usize, f64)>,
    /// `(l, l ln C1 + ln M_l)` on the same orders.
    pub envelope_simplified: Vec<(usize, f64)>,
    pub coverage: Coverage,
}

impl Certificate {
    pub fn bound_at(&self, order: usize) -> Option<f64> {
        self.envelope
            .binary_search_by_key(&order, |&(o, _)| o)
            .ok()
            .map(|i| self.envelope[i].1)
    }
}

/// `ln C1` for the given constants; `log_m_c0 = ln M_{c0}`.
pub fn log_c1(c0: usize, c: f64, length: f64, log_m_c0: f64) -> f64 {
    let c0f = c0 as f64;
    std::f64::consts::LN_2
        + (c0f - 1.0)
        + (2.0 * (c0f - 1.0) / (c * length) + (log_m_c0 / c0f).exp()).ln()
}

/// Check the hypotheses, then assemble the envelope, `C1` and `K`.
///
/// `c0` is the integer `ceil(max(gap ratio, m0 + 1))`, so that `M_{c0}` is an
/// indexable weight and (A) applies at index `c0`. Orders below `d_0` are
/// covered only if bounds for all of them were supplied.
pub fn certify_membership(
    weights: &LogSequence,
    d: &GapSequence,
    bounds: &SparseBounds,
    length: f64,
    m0: f64,
) -> Result<Certificate, CertifyError> {
    if !(length > 0.0) || !length.is_finite() {
        return Err(CertifyError::InvalidLength(length));
    }
    let report = check_hypotheses(weights, d, bounds, m0)?;
    if !report.holds {
        return Err(CertifyError::Hypothesis(report));
    }
    let logs = weights.logs();
    let n_max = weights.n_max();

    let c0 = gap_ratio(d).max(m0.max(0.0) + 1.0).ceil() as usize;
    if c0 > n_max {
        return Err(CertifyError::OrderBeyondPrefix { order: c0, n_max });
    }
    let c = fit_analytic_constant(weights);
    let log_c1 = log_c1(c0, c, length, logs[c0]);

    let mut envelope: Vec<(usize, f64)> = Vec::new();
    let mut low = bounds.low_orders.clone();
    low.sort_by_key(|&(o, _)| o);
    low.dedup_by_key(|&mut (o, _)| o);
    let coverage = if low.len() == d.first() {
        envelope.extend(low);
        Coverage::Full
    } else {
        Coverage::Partial {
            first_order: d.first(),
        }
    };

    for (pair, window) in bounds.entries.windows(2).zip(d.0.windows(2)) {
        let (dn, dn1) = (window[0], window[1]);
        let (log_f_dn, log_f_dn1) = (pair[0].1, pair[1].1);
        envelope.push((dn, log_f_dn));
        for ell in dn + 1..dn1 {
            let v = intermediate_envelope(weights, dn, dn1, ell, log_f_dn, log_f_dn1, length)?;
            envelope.push((ell, v));
        }
    }
    let (last_order, last_log) = bounds.entries[bounds.entries.len() - 1];
    envelope.push((last_order, last_log));

    let envelope_simplified = envelope
        .iter()
        .map(|&(l, _)| (l, l as f64 * log_c1 + logs[l]))
        .collect();
    let log_k = envelope
        .iter()
        .map(|&(l, v)| (v - logs[l]) / (l as f64 + 1.0))
        .fold(log_c1, f64::max);

    Ok(Certificate {
        c0: c0 as f64,
        c,
        length,
        log_c1,
        log_k,
        envelope,
        envelope_simplified,
        coverage,
    })
}

/// Re-check a certificate's internal inequalities against `weights`.
pub fn verify_certificate(cert: &Certificate, weights: &LogSequence) -> ConditionReport {
    let logs = weights.logs();
    let mut margin = f64::INFINITY;
    if cert.log_k < cert.log_c1 {
        return ConditionReport::violated("log_K >= log_C1", vec![], cert.log_k - cert.log_c1);
    }
    for &(l, v) in &cert.envelope {
        let Some(&log_m) = logs.get(l) else {
            return ConditionReport::violated("order within prefix", vec![l], margin);
        };
        let cap = (l as f64 + 1.0) * cert.log_k + log_m;
        margin = margin.min(cap - v);
        if !le_rel(v, cap, CMP_EPS) {
            return ConditionReport::violated("K domination", vec![l], margin);
        }
    }
    ConditionReport::satisfied(margin)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gorny::{gorny_bound, GornyQuery};
    use crate::sequences::{build_sequence, FamilySpec};

    fn gevrey1(n: usize) -> LogSequence {
        build_sequence(&FamilySpec::gevrey(1.0), n).unwrap()
    }

    fn exact_bounds(seq: &LogSequence, d: &GapSequence) -> SparseBounds {
        SparseBounds::new(d.orders().iter().map(|&o| (o, seq.logs()[o])).collect())
    }

    #[test]
    fn gap_ratio_examples() {
        assert_eq!(gap_ratio(&GapSequence::new(vec![1, 2, 4, 8]).unwrap()), 2.0);
        let r = gap_ratio(&GapSequence::new(vec![2, 3, 5, 7]).unwrap());
        assert!((r - 5.0 / 3.0).abs() < 1e-15);
        assert_eq!(gap_ratio(&GapSequence::new(vec![1, 100]).unwrap()), 100.0);
        assert_eq!(GapSequence::new(vec![3]), Err(CertifyError::TooFewOrders(1)));
        assert!(GapSequence::new(vec![3, 3]).is_err());
        assert!(GapSequence::new(vec![0, 3]).is_err());
    }

    #[test]
    fn hypotheses_examples() {
        let m = gevrey1(20);
        let d = GapSequence::new(vec![2, 4, 8, 16]).unwrap();
        let report = check_hypotheses(&m, &d, &exact_bounds(&m, &d), 1.0).unwrap();
        assert!(report.holds);

        let mut bad = exact_bounds(&m, &d);
        bad.entries[1].1 += 1.0;
        let report = check_hypotheses(&m, &d, &bad, 1.0).unwrap();
        assert!(!report.holds);
        assert_eq!(
            report.first_violation.unwrap().to_string(),
            "(C) violated at order 4"
        );

        let nlogn = build_sequence(&FamilySpec::named("nlogn"), 40).unwrap();
        let d = GapSequence::new(vec![9, 18, 36]).unwrap();
        let e2 = std::f64::consts::E.powi(2);
        assert!(check_hypotheses(&nlogn, &d, &exact_bounds(&nlogn, &d), e2).unwrap().holds);
    }

    #[test]
    fn hypotheses_reject_out_of_prefix_orders() {
        let m = gevrey1(10);
        let d = GapSequence::new(vec![4, 16]).unwrap();
        let b = SparseBounds::new(vec![(4, 0.0), (16, 0.0)]);
        assert!(matches!(
            check_hypotheses(&m, &d, &b, 1.0),
            Err(CertifyError::OrderBeyondPrefix { order: 16, .. })
        ));
    }

    #[test]
    fn envelope_example() {
        let m = gevrey1(8);
        let l = m.logs();
        let v = intermediate_envelope(&m, 4, 8, 6, l[4], l[8], 1.0).unwrap();
        let branch2 = std::f64::consts::LN_2 + 6.0 + 0.5 * 256f64.ln() + 0.5 * 8.0 * 8f64.ln();
        assert!((branch2 - 17.783_502_069_519_07).abs() < 1e-9);
        let branch1 = std::f64::consts::LN_2 + 6.0 + 2.0 * 8f64.ln() + l[4];
        assert!((v - branch1.max(branch2)).abs() < 1e-12);
    }

    #[test]
    fn envelope_near_upper_end() {
        let m = gevrey1(16);
        let l = m.logs();
        let v = intermediate_envelope(&m, 8, 16, 15, l[8], l[16], 1.0).unwrap();
        let split = interpolation_split(8, 16, 15).unwrap();
        assert_eq!(split.inv_q, 7.0 / 8.0);
        let branch2 = std::f64::consts::LN_2 + 15.0 + l[8] / 8.0 + 7.0 * l[16] / 8.0;
        assert!(v >= branch2);
        assert!(intermediate_envelope(&m, 8, 9, 9, l[8], l[9], 1.0).is_err());
    }

    #[test]
    fn envelope_dominates_raw_gorny() {
        let m = gevrey1(60);
        let l = m.logs();
        for (dn, dn1) in [(4, 8), (10, 15), (20, 30), (30, 60), (50, 53)] {
            for ell in dn + 1..dn1 {
                for length in [0.5, 1.0, 3.0] {
                    let env = intermediate_envelope(&m, dn, dn1, ell, l[dn], l[dn1], length).unwrap();
                    let q = GornyQuery::new(l[dn], l[dn1], dn1 - dn, ell - dn, length).unwrap();
                    let raw = gorny_bound(&q).unwrap();
                    assert!(env >= raw - 1e-9, "({dn},{dn1},{ell},{length}): {env} < {raw}");
                }
            }
        }
    }

    #[test]
    fn c1_spot_value() {
        let v = log_c1(2, 1.0, 1.0, 4f64.ln());
        assert!((v - (8.0 * std::f64::consts::E).ln()).abs() < 1e-12);
        assert!((v - 3.0794).abs() < 1e-4);
    }

    #[test]
    fn certificate_below_weights() {
        let m = gevrey1(40);
        let d = GapSequence::new(vec![2, 4, 8, 16, 32]).unwrap();
        let mut bounds = exact_bounds(&m, &d);
        bounds.entries.iter_mut().for_each(|e| e.1 -= 0.5);
        let cert = certify_membership(&m, &d, &bounds, 1.0, 1.0).unwrap();
        assert_eq!(cert.c0, 2.0);
        assert!((cert.c - 1.0).abs() < 1e-12);
        assert!((cert.log_c1 - (8.0 * std::f64::consts::E).ln()).abs() < 1e-12);
        assert_eq!(cert.coverage, Coverage::Partial { first_order: 2 });
        assert_eq!(cert.envelope.first().unwrap().0, 2);
        assert_eq!(cert.envelope.last().unwrap().0, 32);
        for (&(l, v), &(_, simple)) in cert.envelope.iter().zip(&cert.envelope_simplified) {
            assert!(v <= simple + CMP_EPS, "order {l}");
            assert!(v <= (l as f64 + 1.0) * cert.log_k + m.logs()[l] + CMP_EPS);
        }
        assert!(cert.log_k >= cert.log_c1);
        assert!(verify_certificate(&cert, &m).holds);
    }

    #[test]
    fn certificate_ceiling_and_low_orders() {
        let m = gevrey1(12);
        let d = GapSequence::new(vec![4, 9]).unwrap();
        let bounds = exact_bounds(&m, &d).with_low_orders(vec![(0, 0.0), (1, 0.0), (2, 1.0), (3, 3.0)]);
        let cert = certify_membership(&m, &d, &bounds, 1.0, 1.0).unwrap();
        assert_eq!(cert.c0, 3.0);
        assert_eq!(cert.coverage, Coverage::Full);
        assert_eq!(cert.envelope.len(), 10);
        assert_eq!(cert.bound_at(3), Some(3.0));
    }

    #[test]
    fn certificate_refuses_failed_hypothesis() {
        let m = gevrey1(20);
        let d = GapSequence::new(vec![2, 4, 8]).unwrap();
        let mut bounds = exact_bounds(&m, &d);
        bounds.entries[1].1 += 1.0;
        match certify_membership(&m, &d, &bounds, 1.0, 1.0) {
            Err(CertifyError::Hypothesis(r)) => {
                assert_eq!(r.first_violation.unwrap().indices, vec![4])
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
