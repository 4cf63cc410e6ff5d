use super::family::Family;
use super::spec::OperatorSpec;
use super::ModelError;
use crate::scalar::Real;

/// Conjugates a dilated model by `u(x, y) -> u(e^{i alpha} x, e^{-i m alpha} y)`.
///
/// Angles compose: dilating an already dilated model by `alpha` adds to its angle.
pub fn dilate<T: Real>(spec: &OperatorSpec<T>, alpha: T) -> Result<OperatorSpec<T>, ModelError> {
    let Some(&Family::DilatedModel { m, k, alpha: a0 }) = spec.family() else {
        return Err(ModelError::Parameter(
            "dilation is only defined for the dilated_model family".into(),
        ));
    };
    let total = a0 + alpha;
    let limit = T::PI() / T::lit(4.0 * f64::from(m));
    if !total.is_finite() || total.abs() >= limit {
        return Err(ModelError::AngleRange {
            alpha: total.to_f64_lossy(),
            limit: limit.to_f64_lossy(),
        });
    }
    OperatorSpec::from_family(Family::DilatedModel { m, k, alpha: total })
}

/// `-pi / (4 m (k + 1))`.
pub fn optimal_alpha<T: Real>(m: u32, k: u32) -> Result<T, ModelError> {
    if m < 2 || k < 1 {
        return Err(ModelError::Parameter(format!(
            "optimal angle needs m >= 2 and k >= 1, got ({m}, {k})"
        )));
    }
    Ok(-T::PI() / T::lit(4.0 * f64::from(m) * f64::from(k + 1)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn optimal_angles() {
        assert_eq!(optimal_alpha::<f64>(2, 1).unwrap(), -PI / 16.0);
        assert_eq!(optimal_alpha::<f64>(3, 2).unwrap(), -PI / 36.0);
        assert!(optimal_alpha::<f64>(1, 1).is_err());
        assert!(optimal_alpha::<f64>(2, 0).is_err());
    }

    #[test]
    fn potential_phase_at_minus_pi_over_16() {
        let s = OperatorSpec::from_family(Family::<f64>::dilated(2, 1)).unwrap();
        let d = dilate(&s, -PI / 16.0).unwrap();
        let c = d.v1().terms()[0].coeff();
        assert!((c.arg() - PI / 4.0).abs() < 1e-15);
        assert_eq!(d.angles(), &[-PI / 16.0, PI / 8.0]);
    }

    #[test]
    fn non_dilated_family_is_rejected() {
        let s = OperatorSpec::from_family(Family::<f64>::harmonic()).unwrap();
        assert!(matches!(dilate(&s, 0.1), Err(ModelError::Parameter(_))));
    }

    #[test]
    fn too_large_angle() {
        let s = OperatorSpec::from_family(Family::<f64>::dilated(2, 1)).unwrap();
        assert!(matches!(dilate(&s, PI / 8.0), Err(ModelError::AngleRange { .. })));
        assert!(dilate(&s, -PI / 8.0 + 1e-9).is_ok());
    }
}
