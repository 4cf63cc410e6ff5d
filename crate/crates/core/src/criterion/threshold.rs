use serde::{Deserialize, Serialize};

use super::CriterionError;
use crate::model::{DomainKind, GrowthSignature};
use crate::rational::{recognize, to_real, Rational, RationalRepr};
use crate::scalar::Real;

/// Threshold `p_crit`, exact when every growth exponent is rational.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PCrit {
    Exact(RationalRepr),
    Approx(f64),
}

impl PCrit {
    pub fn value(&self) -> f64 {
        match *self {
            PCrit::Exact(r) => to_real::<f64>(Rational::from(r)),
            PCrit::Approx(v) => v,
        }
    }

    pub fn exact(&self) -> Option<Rational> {
        match *self {
            PCrit::Exact(r) => Some(r.into()),
            PCrit::Approx(_) => None,
        }
    }
}

impl std::fmt::Display for PCrit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PCrit::Exact(r) => write!(f, "{}", Rational::from(*r)),
            PCrit::Approx(v) => write!(f, "~{v:.6}"),
        }
    }
}

impl From<Rational> for PCrit {
    fn from(r: Rational) -> Self {
        PCrit::Exact(r.into())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchattenMethod {
    Symbolic,
    Quadrature,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConvergenceClass {
    Convergent,
    Divergent,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchattenVerdict {
    pub p_crit: PCrit,
    pub method: SchattenMethod,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub convergence_class: Option<ConvergenceClass>,
}

/// `p_crit = d/2 + sum_i 1/gamma_i` for separated growth
/// `m ~ 1 + sum_i c_i |x_i|^{gamma_i}`.
///
/// Restricting to a half space only halves the x-integral, so the value is
/// the same for both domain kinds.
pub fn schatten_threshold<T: Real>(
    sig: &GrowthSignature<T>,
    d: usize,
    _domain: DomainKind,
) -> Result<Rational, CriterionError> {
    if !sig.valid || sig.gammas.len() != d || sig.gammas.iter().any(|&g| !(g > T::zero())) {
        return Err(CriterionError::SignatureInvalid);
    }
    let mut p = Rational::new(d as i64, 2);
    for &g in &sig.gammas {
        let r = recognize(g).ok_or(CriterionError::IrrationalExponent(g.to_f64_lossy()))?;
        p += r.recip();
    }
    Ok(p)
}

/// `p_crit` of the dilated model, `1 + 1/(2k) + 1/(m - 1) = ((2k+1)m - 1) / (2k(m-1))`.
pub fn dilated_threshold(m: u32, k: u32) -> Result<Rational, CriterionError> {
    if m < 2 || k < 1 {
        return Err(CriterionError::Parameter(format!(
            "need m >= 2, k >= 1, got ({m}, {k})"
        )));
    }
    let (m, k) = (i64::from(m), i64::from(k));
    Ok(Rational::new((2 * k + 1) * m - 1, 2 * k * (m - 1)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig(g: &[f64]) -> GrowthSignature<f64> {
        GrowthSignature {
            gammas: g.to_vec(),
            constants: vec![1.0; g.len()],
            valid: true,
            kappa: 1.0,
        }
    }

    #[test]
    fn cubic_threshold() {
        assert_eq!(
            schatten_threshold(&sig(&[3.0]), 1, DomainKind::FullSpace).unwrap(),
            Rational::new(5, 6)
        );
    }

    #[test]
    fn two_dimensional_thresholds() {
        assert_eq!(
            schatten_threshold(&sig(&[2.0, 2.0]), 2, DomainKind::FullSpace).unwrap(),
            Rational::new(2, 1)
        );
        assert_eq!(
            schatten_threshold(&sig(&[1.0, 2.0]), 2, DomainKind::FullSpace).unwrap(),
            Rational::new(5, 2)
        );
    }

    #[test]
    fn half_space_does_not_change_threshold() {
        let s = sig(&[2.0, 1.0]);
        assert_eq!(
            schatten_threshold(&s, 2, DomainKind::HalfSpace).unwrap(),
            schatten_threshold(&s, 2, DomainKind::FullSpace).unwrap()
        );
    }

    #[test]
    fn invalid_signature_is_refused() {
        let mut s = sig(&[2.0]);
        s.valid = false;
        assert_eq!(
            schatten_threshold(&s, 1, DomainKind::FullSpace),
            Err(CriterionError::SignatureInvalid)
        );
    }

    #[test]
    fn dilated_formula_matches_sum() {
        for m in 2..7u32 {
            for k in 1..7u32 {
                let sum =
                    Rational::from_integer(1) + Rational::new(1, 2 * i64::from(k)) + Rational::new(1, i64::from(m) - 1);
                assert_eq!(dilated_threshold(m, k).unwrap(), sum);
            }
        }
    }
}
