//! Scalar arithmetic shared by every algorithm in this crate.
//!
//! All graph rates and polynomial values are either exact big rationals or
//! `f64`. A graph is constructed over one scalar type and never mixes the
//! two; identity checks are equality tests in exact mode and tolerance
//! comparisons in float mode.

use std::fmt;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{Signed, ToPrimitive};

/// Numeric type usable for edge rates and tree-polynomial values.
pub trait Scalar:
    Clone
    + fmt::Debug
    + fmt::Display
    + PartialEq
    + PartialOrd
    + Signed
    + Send
    + Sync
    + 'static
{
    /// True when arithmetic is exact, so identities may be checked with `==`.
    const EXACT: bool;

    fn from_i64(value: i64) -> Self;

    /// Exact quotient `num / den`; `den` must be positive.
    fn from_ratio(num: i64, den: u64) -> Self;

    /// Lossy view, used for float certificates and report output.
    fn to_f64(&self) -> f64;

    /// Literal accepted by the edge-list parser. Float values always keep a
    /// decimal point (or exponent) so the arithmetic mode survives a
    /// serialize/parse round trip.
    fn rate_token(&self) -> String;
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_i64(value: i64) -> Self {
        value as f64
    }

    fn from_ratio(num: i64, den: u64) -> Self {
        num as f64 / den as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn rate_token(&self) -> String {
        // Debug formatting of f64 round-trips exactly and never prints a
        // bare integer literal.
        format!("{self:?}")
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn from_i64(value: i64) -> Self {
        BigRational::from_integer(BigInt::from(value))
    }

    fn from_ratio(num: i64, den: u64) -> Self {
        assert!(den > 0, "denominator must be positive");
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn rate_token(&self) -> String {
        self.to_string()
    }
}

/// Relative tolerance used by float-mode identity checks.
pub const FLOAT_REL_TOL: f64 = 1e-9;

/// True when `a` and `b` agree: exactly in exact mode, within a relative
/// tolerance (against `scale`, defaulting to the larger magnitude) otherwise.
pub fn values_agree<S: Scalar>(a: &S, b: &S) -> bool {
    if S::EXACT {
        a == b
    } else {
        let (x, y) = (a.to_f64(), b.to_f64());
        let scale = x.abs().max(y.abs()).max(1.0);
        (x - y).abs() <= FLOAT_REL_TOL * scale
    }
}

/// True when `v` should count as zero: exact zero, or small relative to
/// `scale` in float mode.
pub fn is_zero_within<S: Scalar>(v: &S, scale: f64) -> bool {
    if S::EXACT {
        v.is_zero()
    } else {
        v.to_f64().abs() <= FLOAT_REL_TOL * scale.abs().max(1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::traits::Zero;

    #[test]
    fn ratio_construction_reduces() {
        let half = BigRational::from_ratio(2, 4);
        assert_eq!(half, BigRational::from_ratio(1, 2));
        assert_eq!(half.rate_token(), "1/2");
        assert_eq!(BigRational::from_i64(3).rate_token(), "3");
    }

    #[test]
    fn float_tokens_keep_decimal_point() {
        assert_eq!(2.0f64.rate_token(), "2.0");
        assert_eq!(0.25f64.rate_token(), "0.25");
        let tiny = 1e-30f64;
        assert_eq!(tiny.rate_token().parse::<f64>().unwrap(), tiny);
    }

    #[test]
    fn agreement_checks() {
        assert!(values_agree(
            &BigRational::from_ratio(1, 3),
            &BigRational::from_ratio(2, 6)
        ));
        assert!(!values_agree(
            &BigRational::from_ratio(1, 3),
            &BigRational::from_ratio(1, 4)
        ));
        assert!(values_agree(&1.0f64, &(1.0 + 1e-12)));
        assert!(!values_agree(&1.0f64, &1.001));
        assert!(is_zero_within(&BigRational::zero(), 1.0));
        assert!(is_zero_within(&1e-12f64, 100.0));
        assert!(!is_zero_within(&1e-3f64, 1.0));
    }
}
