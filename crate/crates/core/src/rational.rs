//! Exact rational thresholds.

use num_rational::Ratio;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::scalar::Real;

/// Reduced fraction with positive denominator.
pub type Rational = Ratio<i64>;

/// Largest denominator accepted when recognising a float as a rational.
pub const MAX_DENOMINATOR: i64 = 10_000;

/// Recovers the rational a float was written as (`1.5` -> `3/2`), if any.
///
/// Uses the continued-fraction expansion and accepts the first convergent
/// within a few ulps of `x` (in `T`'s precision) whose denominator stays
/// below [`MAX_DENOMINATOR`].
pub fn recognize<T: Real>(x: T) -> Option<Rational> {
    let tol = 16.0 * T::epsilon().to_f64_lossy();
    let x = x.to_f64_lossy();
    if !x.is_finite() || x.abs() > 1e12 {
        return None;
    }
    let tol = tol * x.abs().max(1.0);
    let (mut h0, mut h1) = (0i64, 1i64);
    let (mut k0, mut k1) = (1i64, 0i64);
    let mut rest = x;
    for _ in 0..64 {
        let a = rest.floor();
        let ai = a as i64;
        let h2 = ai.checked_mul(h1)?.checked_add(h0)?;
        let k2 = ai.checked_mul(k1)?.checked_add(k0)?;
        if k2 > MAX_DENOMINATOR {
            return None;
        }
        if (h2 as f64 / k2 as f64 - x).abs() <= tol {
            return Some(Rational::new(h2, k2));
        }
        let frac = rest - a;
        if frac <= 0.0 {
            return None;
        }
        rest = 1.0 / frac;
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
    }
    None
}

pub fn to_real<T: Real>(r: Rational) -> T {
    T::lit(r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN))
}

/// JSON form `{"num": .., "den": ..}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalRepr {
    pub num: i64,
    pub den: i64,
}

impl From<Rational> for RationalRepr {
    fn from(r: Rational) -> Self {
        RationalRepr {
            num: *r.numer(),
            den: *r.denom(),
        }
    }
}

impl From<RationalRepr> for Rational {
    fn from(r: RationalRepr) -> Self {
        Rational::new(r.num, r.den)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recognizes_simple_fractions() {
        assert_eq!(recognize(1.5f64), Some(Rational::new(3, 2)));
        assert_eq!(recognize(2.0f64), Some(Rational::from_integer(2)));
        assert_eq!(recognize(1.0f64 / 3.0), Some(Rational::new(1, 3)));
        assert_eq!(recognize(0.0f64), Some(Rational::from_integer(0)));
        assert_eq!(recognize(-0.75f64), Some(Rational::new(-3, 4)));
    }

    #[test]
    fn rejects_irrational_values() {
        assert_eq!(recognize(std::f64::consts::PI), None);
        assert_eq!(recognize(f64::NAN), None);
    }

    #[test]
    fn f32_inputs_round_trip() {
        assert_eq!(recognize(2.5f32), Some(Rational::new(5, 2)));
    }
}
