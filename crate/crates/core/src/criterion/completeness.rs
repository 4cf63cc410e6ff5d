use serde::{Deserialize, Serialize};

use super::sector::Sector;
use super::threshold::dilated_threshold;
use super::CriterionError;
use crate::rational::Rational;
use crate::scalar::Real;

/// Margins this close to zero are treated as the boundary case.
pub const MARGIN_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CompletenessOutcome {
    CompleteSpan,
    /// Dilation certifies infinitely many eigenvalues; whether it preserves
    /// completeness is not known.
    InfiniteDiscreteSpectrumViaDilation,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompletenessVerdict<T> {
    pub outcome: CompletenessOutcome,
    /// An admissible Schatten exponent strictly between `p_crit` and `pi/opening`.
    pub p_used: T,
    pub sector_used: Sector<T>,
    /// `pi/p_crit - opening`.
    pub margin: T,
}

pub fn completeness_verdict<T: Real>(
    p_crit: T,
    sector: &Sector<T>,
    dilation_used: bool,
) -> Result<CompletenessVerdict<T>, CriterionError> {
    if !(p_crit > T::zero()) {
        return Err(CriterionError::Parameter(format!("p_crit = {p_crit} must be > 0")));
    }
    let opening = sector.opening();
    let margin = T::PI() / p_crit - opening;
    let positive = margin > T::lit(MARGIN_TOLERANCE);
    let outcome = match (positive, dilation_used) {
        (true, false) => CompletenessOutcome::CompleteSpan,
        (true, true) => CompletenessOutcome::InfiniteDiscreteSpectrumViaDilation,
        (false, _) => CompletenessOutcome::Inconclusive,
    };
    let p_used = if !positive {
        p_crit
    } else if opening > T::zero() {
        (p_crit + T::PI() / opening) / T::lit(2.0)
    } else {
        p_crit + T::one()
    };
    Ok(CompletenessVerdict {
        outcome,
        p_used,
        sector_used: *sector,
        margin,
    })
}

/// Sign-definite: the largest admissible `|theta|`, `2 pi alpha / (alpha + 2)`.
/// Sign-changing: the sector has opening `pi`, and the returned value is the
/// threshold on `alpha` itself, `alpha > 2`.
pub fn oscillator_completeness_threshold<T: Real>(alpha: T, sign_definite: bool) -> Result<T, CriterionError> {
    if !(alpha > T::zero()) {
        return Err(CriterionError::Parameter(format!("alpha = {alpha} must be > 0")));
    }
    Ok(if sign_definite {
        T::TAU() * alpha / (alpha + T::lit(2.0))
    } else {
        T::lit(2.0)
    })
}

fn check_mk(m: u32, k: u32) -> Result<(), CriterionError> {
    if m < 2 || k < 1 {
        return Err(CriterionError::Parameter(format!(
            "need m >= 2, k >= 1, got ({m}, {k})"
        )));
    }
    Ok(())
}

/// Dilated sector opening over pi is below `1/p_crit`:
/// `(m+1) / (2m(k+1)) < 2k(m-1) / ((2k+1)m - 1)`, compared exactly.
pub fn eq49_check(m: u32, k: u32) -> Result<bool, CriterionError> {
    check_mk(m, k)?;
    let lhs = Rational::new(i64::from(m) + 1, 2 * i64::from(m) * (i64::from(k) + 1));
    Ok(lhs < dilated_threshold(m, k)?.recip())
}

/// The undilated quarter-plane sector already suffices: `k > (m-1) / (2(m-2))`.
pub fn no_dilation_condition(m: u32, k: u32) -> Result<bool, CriterionError> {
    check_mk(m, k)?;
    if m == 2 {
        return Ok(false);
    }
    Ok(Rational::from_integer(i64::from(k)) > Rational::new(i64::from(m) - 1, 2 * (i64::from(m) - 2)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn airy_boundary() {
        let p = 1.5;
        let t = oscillator_completeness_threshold(1.0f64, true).unwrap();
        assert!((t - 2.0 * PI / 3.0).abs() < 1e-15);
        let ok = completeness_verdict(p, &Sector::new(0.0, t - 0.05), false).unwrap();
        let bad = completeness_verdict(p, &Sector::new(0.0, t + 0.05), false).unwrap();
        assert_eq!(ok.outcome, CompletenessOutcome::CompleteSpan);
        assert_eq!(bad.outcome, CompletenessOutcome::Inconclusive);
        assert!(ok.p_used > p && ok.p_used < PI / (t - 0.05));
    }

    #[test]
    fn exact_boundary_is_inconclusive() {
        let v = completeness_verdict(1.0f64, &Sector::new(-PI / 2.0, PI / 2.0), false).unwrap();
        assert_eq!(v.outcome, CompletenessOutcome::Inconclusive);
    }

    #[test]
    fn eq49_instances() {
        assert!(eq49_check(2, 1).unwrap());
        assert!(eq49_check(3, 1).unwrap());
        assert!(eq49_check(1, 1).is_err());
    }

    #[test]
    fn no_dilation_instances() {
        for k in 1..20 {
            assert!(!no_dilation_condition(2, k).unwrap());
        }
        assert!(no_dilation_condition(3, 2).unwrap());
        assert!(!no_dilation_condition(3, 1).unwrap());
        assert!(no_dilation_condition(4, 1).unwrap());
    }

    #[test]
    fn sign_definite_oscillator_threshold() {
        assert!((oscillator_completeness_threshold(2.0f64, true).unwrap() - PI).abs() < 1e-15);
        assert_eq!(oscillator_completeness_threshold(3.0f64, false).unwrap(), 2.0);
    }
}
