//! Sequences `N` that agree with `M` on sparse orders yet leave `C^M`.
//!
//! For `M` with `limsup M_n^{1/n} = inf`, the construction interleaves excess
//! orders `i_0 < d_0 < i_1 < d_1 < ...` and defines `N` through piecewise
//! constant ratios `m_j = N_{j+1} / N_j`:
//!
//! * round 0: `m_j = (2^{2^{i_0}} M_{i_0})^{1/i_0}` for `j < i_0`, then
//!   `m_j = (M_{d_0} / (2^{2^{i_0}} M_{i_0}))^{1/(d_0 - i_0)}` up to `d_0`;
//! * round n: from `d_{n-1}` the ratio climbs to `2^{2^{i_n}} M_{i_n}` at
//!   `i_n`, then comes back down to `M_{d_n}` at `d_n`.
//!
//! Each `i_n`, `d_n` is the smallest index making the ratio sequence
//! non-decreasing, so `N` is log-convex with `N_{d_n} = M_{d_n}` and
//! `N_{i_n} / M_{i_n} = 2^{2^{i_n}}`. Everything is kept in log domain.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::logmath::{close_rel, le_rel, ln_double_power_of_two, CMP_EPS, MAX_EXCESS_EXPONENT};
use crate::sequences::{ConditionReport, LogSequence, SequenceError, WeightFamily};

/// Default number of candidates examined per search.
pub const DEFAULT_INDEX_BUDGET: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CounterexampleError {
    #[error("search budget of {budget} indices exceeded while searching for {step} (started at {start})")]
    BudgetExceeded {
        step: String,
        start: usize,
        budget: usize,
    },
    #[error("excess order {0} is beyond the supported range (max {MAX_EXCESS_EXPONENT})")]
    ExcessOutOfRange(usize),
    #[error("weight family '{family}' cannot provide index {index}")]
    WeightUnavailable { family: String, index: usize },
    #[error("invalid construction parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Sequence(#[from] SequenceError),
}

/// Index oracle over a weight family with a per-search budget.
#[derive(Debug)]
pub struct WeightOracle<'a> {
    family: &'a dyn WeightFamily,
    index_budget: usize,
}

impl<'a> WeightOracle<'a> {
    pub fn new(family: &'a dyn WeightFamily) -> Self {
        Self {
            family,
            index_budget: DEFAULT_INDEX_BUDGET,
        }
    }

    pub fn with_budget(family: &'a dyn WeightFamily, index_budget: usize) -> Result<Self, CounterexampleError> {
        if index_budget < 2 {
            return Err(CounterexampleError::InvalidParameter(format!(
                "index budget must be >= 2, got {index_budget}"
            )));
        }
        Ok(Self {
            family,
            index_budget,
        })
    }

    pub fn index_budget(&self) -> usize {
        self.index_budget
    }

    pub fn family(&self) -> &dyn WeightFamily {
        self.family
    }

    pub fn log_weight(&self, n: usize) -> Result<f64, CounterexampleError> {
        self.family
            .log_weight(n)
            .ok_or_else(|| CounterexampleError::WeightUnavailable {
                family: self.family.name().to_string(),
                index: n,
            })
    }
}

/// Smallest `n >= start` with `predicate(n)`, scanning at most the oracle's
/// budget of candidates.
pub fn search_threshold_index<P>(
    oracle: &WeightOracle<'_>,
    start: usize,
    step: &str,
    mut predicate: P,
) -> Result<usize, CounterexampleError>
where
    P: FnMut(usize) -> Result<bool, CounterexampleError>,
{
    if start < 1 {
        return Err(CounterexampleError::InvalidParameter(
            "search must start at index >= 1".into(),
        ));
    }
    for n in start..start.saturating_add(oracle.index_budget) {
        if predicate(n)? {
            return Ok(n);
        }
    }
    Err(CounterexampleError::BudgetExceeded {
        step: step.to_string(),
        start,
        budget: oracle.index_budget,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CounterexampleCert {
    /// `ln N_0, ..., ln N_{d_last}`.
    pub weights: LogSequence,
    /// Anchor orders, `N_{d_k} = M_{d_k}`.
    pub d: Vec<usize>,
    /// Excess orders, `N_{i_k} = 2^{2^{i_k}} M_{i_k}`.
    pub i: Vec<usize>,
    /// `ln m_j` for `j < d_last`.
    pub log_m: Vec<f64>,
}

/// Serialized form: the arrays plus `ln N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleDoc {
    pub d: Vec<usize>,
    pub i: Vec<usize>,
    pub log_m: Vec<f64>,
    pub log_n: Vec<f64>,
}

impl From<&CounterexampleCert> for CounterexampleDoc {
    fn from(c: &CounterexampleCert) -> Self {
        Self {
            d: c.d.clone(),
            i: c.i.clone(),
            log_m: c.log_m.clone(),
            log_n: c.weights.logs().to_vec(),
        }
    }
}

impl TryFrom<CounterexampleDoc> for CounterexampleCert {
    type Error = SequenceError;
    fn try_from(doc: CounterexampleDoc) -> Result<Self, Self::Error> {
        Ok(Self {
            weights: LogSequence::new(doc.log_n)?,
            d: doc.d,
            i: doc.i,
            log_m: doc.log_m,
        })
    }
}

fn excess(i: usize) -> Result<f64, CounterexampleError> {
    ln_double_power_of_two(i).ok_or(CounterexampleError::ExcessOutOfRange(i))
}

/// Run `rounds` rounds of the construction starting from excess order `i0`.
pub fn construct_counterexample(
    oracle: &WeightOracle<'_>,
    i0: usize,
    rounds: usize,
) -> Result<CounterexampleCert, CounterexampleError> {
    if i0 < 1 || rounds < 1 {
        return Err(CounterexampleError::InvalidParameter(format!(
            "need i0 >= 1 and rounds >= 1, got i0 = {i0}, rounds = {rounds}"
        )));
    }
    let m_at = |n: usize| oracle.log_weight(n);

    // round 0
    let peak = excess(i0)? + m_at(i0)?;
    let first_slope = peak / i0 as f64;
    let d0 = search_threshold_index(oracle, i0 + 1, "d[0]", |d| {
        Ok(le_rel(first_slope, m_at(d)? / d as f64, CMP_EPS))
    })?;
    let second_slope = (m_at(d0)? - peak) / (d0 - i0) as f64;
    let mut log_m = vec![first_slope; i0];
    log_m.extend(std::iter::repeat_n(second_slope, d0 - i0));
    let mut d = vec![d0];
    let mut i = vec![i0];

    for round in 1..rounds {
        let d_prev = d[round - 1];
        let log_m_prev = m_at(d_prev)?;
        let last_slope = log_m[d_prev - 1];

        let i_next = search_threshold_index(oracle, d_prev + 1, &format!("i[{round}]"), |cand| {
            let lhs = excess(cand)? + m_at(cand)?;
            Ok(le_rel(log_m_prev + (cand - d_prev) as f64 * last_slope, lhs, CMP_EPS))
        })?;
        let peak = excess(i_next)? + m_at(i_next)?;
        let rise = (i_next - d_prev) as f64;

        let d_next = search_threshold_index(oracle, i_next + 1, &format!("d[{round}]"), |cand| {
            let required = (cand - d_prev) as f64 / rise * peak
                - (cand - i_next) as f64 / rise * log_m_prev;
            Ok(le_rel(required, m_at(cand)?, CMP_EPS))
        })?;
        let up = (peak - log_m_prev) / rise;
        let down = (m_at(d_next)? - peak) / (d_next - i_next) as f64;
        log_m.extend(std::iter::repeat_n(up, i_next - d_prev));
        log_m.extend(std::iter::repeat_n(down, d_next - i_next));
        i.push(i_next);
        d.push(d_next);
    }

    let weights = LogSequence::new(prefix_sums(&log_m))?;
    Ok(CounterexampleCert { weights, d, i, log_m })
}

fn prefix_sums(log_m: &[f64]) -> Vec<f64> {
    std::iter::once(0.0)
        .chain(log_m.iter().scan(0.0, |acc, &v| {
            *acc += v;
            Some(*acc)
        }))
        .collect()
}

/// Re-check interleaving, ratio monotonicity, anchor equalities and excesses
/// from `log_m` alone, plus agreement of the stored `ln N` with the prefix
/// sums.
pub fn verify_counterexample(
    cert: &CounterexampleCert,
    oracle: &WeightOracle<'_>,
) -> Result<ConditionReport, CounterexampleError> {
    let mut margin = f64::INFINITY;

    if cert.d.is_empty() || cert.d.len() != cert.i.len() {
        return Ok(ConditionReport::violated("interleaving", vec![], margin));
    }
    let chain: Vec<usize> = cert.i.iter().zip(&cert.d).flat_map(|(&a, &b)| [a, b]).collect();
    if chain[0] == 0 {
        return Ok(ConditionReport::violated("interleaving", vec![0], margin));
    }
    if let Some(pos) = chain.windows(2).position(|w| w[1] <= w[0]) {
        return Ok(ConditionReport::violated("interleaving", vec![chain[pos], chain[pos + 1]], margin));
    }
    let d_last = *cert.d.last().unwrap();
    if cert.log_m.len() != d_last || cert.weights.n_max() != d_last {
        return Ok(ConditionReport::violated("length", vec![d_last], margin));
    }

    for (j, w) in cert.log_m.windows(2).enumerate() {
        margin = margin.min(w[1] - w[0]);
        if !le_rel(w[0], w[1], CMP_EPS) {
            return Ok(ConditionReport::violated("log-convexity", vec![j + 1], margin));
        }
    }

    let log_n = prefix_sums(&cert.log_m);
    for (n, (&stored, &recomputed)) in cert.weights.logs().iter().zip(&log_n).enumerate() {
        if !close_rel(stored, recomputed, CMP_EPS) {
            return Ok(ConditionReport::violated("stored N", vec![n], margin));
        }
    }
    for &dk in &cert.d {
        let target = oracle.log_weight(dk)?;
        if !close_rel(log_n[dk], target, CMP_EPS) {
            return Ok(ConditionReport::violated("anchor N_d = M_d", vec![dk], margin));
        }
    }
    for &ik in &cert.i {
        let target = oracle.log_weight(ik)? + excess(ik)?;
        if !close_rel(log_n[ik], target, CMP_EPS) {
            return Ok(ConditionReport::violated("excess N_i / M_i = 2^(2^i)", vec![ik], margin));
        }
    }
    Ok(ConditionReport::satisfied(margin))
}
