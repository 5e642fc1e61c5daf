use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use crate::params::CompactSequence;

/// `log2(x)` for `x > 0`, accurate to double precision at any size.
pub fn log2_big(x: &BigUint) -> f64 {
    assert!(!x.is_zero(), "log2 of zero");
    let bits = x.bits();
    if bits <= 64 {
        return x.to_u64().unwrap().to_f64().unwrap().log2();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_u64().unwrap() as f64;
    top.log2() + shift as f64
}

/// `num / den` as a double, without overflowing on large operands.
pub(crate) fn ratio_f64(num: &BigUint, den: &BigUint) -> f64 {
    if num == den {
        return 1.0;
    }
    let shift = den.bits().max(num.bits()).saturating_sub(100);
    let n = (num >> shift).to_f64().unwrap_or(f64::INFINITY);
    let d = (den >> shift).to_f64().unwrap_or(f64::INFINITY);
    n / d
}

#[derive(Clone, Debug, PartialEq)]
pub struct RateReport {
    /// `log2 m0 / log2 m_n`.
    pub rho: f64,
    /// `log2 m0 / log2(k·m0 + ⌊m0^θ⌋)`.
    pub analytic_bound: f64,
    /// Whether every modulus is at most `k·m0 + ⌊m0^θ⌋`, which makes
    /// `rho >= analytic_bound` exact.
    pub meets_bound: bool,
}

pub fn information_rate(seq: &CompactSequence) -> RateReport {
    let largest = seq.moduli.iter().max().unwrap_or(&seq.m0);
    let upper = seq.window_upper();
    let log_m0 = log2_big(&seq.m0);
    RateReport {
        rho: log_m0 / log2_big(largest),
        analytic_bound: log_m0 / log2_big(&upper),
        meets_bound: *largest <= upper,
    }
}
