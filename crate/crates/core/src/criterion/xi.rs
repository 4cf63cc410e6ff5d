use statrs::function::gamma::gamma;

use super::CriterionError;
use crate::scalar::Real;

/// `c_{d,p} = pi^{d/2} Gamma(p - d/2) / Gamma(p)`, so that
/// `int_{R^d} (|xi|^2 + m)^{-p} d xi = c_{d,p} m^{d/2 - p}`.
pub fn xi_integral_constant<T: Real>(p: T, d: usize) -> Result<T, CriterionError> {
    let p = p.to_f64_lossy();
    let half_d = d as f64 / 2.0;
    if !(p > half_d) {
        return Err(CriterionError::DivergentXiIntegral { p, half_d });
    }
    let v = std::f64::consts::PI.powf(half_d) * gamma(p - half_d) / gamma(p);
    Ok(T::lit(v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn closed_forms() {
        assert!((xi_integral_constant(1.0f64, 1).unwrap() - PI).abs() < 1e-14);
        assert!((xi_integral_constant(2.0f64, 2).unwrap() - PI).abs() < 1e-14);
    }

    #[test]
    fn divergent_at_half_dimension() {
        assert!(matches!(
            xi_integral_constant(1.0f64, 2),
            Err(CriterionError::DivergentXiIntegral { .. })
        ));
        assert!(xi_integral_constant(0.5f64, 1).is_err());
    }
}
