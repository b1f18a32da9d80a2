//! Small log-domain helpers shared by every module.

use std::f64::consts::LN_2;

/// Comparison tolerance for every inequality checked in log domain.
pub const CMP_EPS: f64 = 1e-9;

/// Largest `i` for which the excess factor `2^(2^i)` is handled.
///
/// `ln(2^(2^i)) = 2^i ln 2` is finite for much larger `i`, but sums of such
/// values with weight logs stop being meaningful well before `f64` overflow.
pub const MAX_EXCESS_EXPONENT: usize = 900;

/// `ln(a + b)` given `ln a` and `ln b`.
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// `ln(sum exp(x_i))`, `-inf` for an empty input.
pub fn log_sum_exp<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let values: Vec<f64> = values.into_iter().collect();
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    let sum: f64 = values.iter().map(|&v| (v - max).exp()).sum();
    max + sum.ln()
}

/// `ln(n!)` by summing `ln j`; exact up to rounding for the orders used here.
pub fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|j| (j as f64).ln()).sum()
}

/// `ln(2^(2^i)) = 2^i ln 2`, refusing exponents beyond [`MAX_EXCESS_EXPONENT`].
pub fn ln_double_power_of_two(i: usize) -> Option<f64> {
    if i > MAX_EXCESS_EXPONENT {
        return None;
    }
    Some((i as f64).exp2() * LN_2)
}

/// `a <= b` within the tolerance, scaled by magnitude once values leave the unit range.
pub fn le_rel(a: f64, b: f64, eps: f64) -> bool {
    a <= b + eps * 1f64.max(a.abs()).max(b.abs())
}

/// `|a - b|` within the tolerance relative to `max(1, |a|, |b|)`.
pub fn close_rel(a: f64, b: f64, eps: f64) -> bool {
    (a - b).abs() <= eps * 1f64.max(a.abs()).max(b.abs())
}
