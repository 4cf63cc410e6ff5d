use num_complex::Complex;
use num_traits::Zero;

use super::field::{FactorKind, MonomialTerm, ScalarField, VectorField};
use super::spec::{DomainKind, OperatorSpec};
use super::ModelError;
use crate::scalar::{cast, cast_complex, cis, Real};

/// Cataloged operator families with the parameters that regenerate them.
#[derive(Debug, Clone, PartialEq)]
pub enum Family<T: Real> {
    /// `-d^2 + c e^{i theta} |x|^alpha + beta2 x^2 + beta1 x` on the line.
    /// With `sign_changing` the potential is `c e^{i theta} sign(x)|x|^alpha`.
    Oscillator1d {
        theta: T,
        alpha: T,
        c: T,
        sign_changing: bool,
        beta1: Complex<T>,
        beta2: Complex<T>,
    },
    /// `-d^2 + e^{i theta} x^alpha` on `x > 0`.
    AiryHalfLine { theta: T, alpha: T },
    /// Field with `curl A + i phi = z^n`: `A = (0, Re z^{n+1}/(n+1))`, `V1 = i Im z^n`.
    Holomorphic2d { n: u32 },
    /// `-d_x^2 - (d_y - i x^m/m)^2 + i y^{2k}`, dilated by `alpha`.
    DilatedModel { m: u32, k: u32, alpha: T },
    /// `-d_x^2 - (d_y - i x^{n+1}/(n+1))^2 + e^{i theta} y^n` on `y > 0`.
    HalfPlaneModel { theta: T, n: u32 },
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * f64::from(n - j) / f64::from(j + 1))
}

/// Real and imaginary parts of `z^n`, `z = x + iy`, as real polynomials.
fn z_power_parts<T: Real>(n: u32) -> Result<(ScalarField<T>, ScalarField<T>), ModelError> {
    let mut re = Vec::new();
    let mut im = Vec::new();
    for j in 0..=n {
        let c = binomial(n, j);
        // i^j
        let sign = if (j / 2) % 2 == 0 { 1.0 } else { -1.0 };
        let term = MonomialTerm::new(
            Complex::new(T::lit(c * sign), T::zero()),
            vec![T::lit(f64::from(n - j)), T::lit(f64::from(j))],
            vec![false, false],
        )?;
        if j % 2 == 0 {
            re.push(term);
        } else {
            im.push(term);
        }
    }
    Ok((ScalarField::new(2, re)?, ScalarField::new(2, im)?))
}

fn check_angle<T: Real>(name: &str, v: T) -> Result<(), ModelError> {
    if !v.is_finite() || v.abs() > T::PI() {
        return Err(ModelError::Parameter(format!("{name} = {v} outside [-pi, pi]")));
    }
    Ok(())
}

impl<T: Real> Family<T> {
    pub fn tag(&self) -> &'static str {
        match self {
            Family::Oscillator1d { .. } => "oscillator_1d",
            Family::AiryHalfLine { .. } => "airy_half_line",
            Family::Holomorphic2d { .. } => "holomorphic_2d",
            Family::DilatedModel { .. } => "dilated_model",
            Family::HalfPlaneModel { .. } => "half_plane_model",
        }
    }

    /// Harmonic oscillator `-d^2 + x^2`.
    pub fn harmonic() -> Self {
        Self::oscillator(T::zero(), T::lit(2.0))
    }

    /// `-d^2 + e^{i theta}|x|^alpha`.
    pub fn oscillator(theta: T, alpha: T) -> Self {
        Family::Oscillator1d {
            theta,
            alpha,
            c: T::one(),
            sign_changing: false,
            beta1: Complex::zero(),
            beta2: Complex::zero(),
        }
    }

    /// Complex cubic oscillator `-d^2 + i x^3`.
    pub fn complex_cubic() -> Self {
        Family::Oscillator1d {
            theta: T::FRAC_PI_2(),
            alpha: T::lit(3.0),
            c: T::one(),
            sign_changing: true,
            beta1: Complex::zero(),
            beta2: Complex::zero(),
        }
    }

    pub fn dilated(m: u32, k: u32) -> Self {
        Family::DilatedModel { m, k, alpha: T::zero() }
    }

    pub(crate) fn validate(&self) -> Result<(), ModelError> {
        match *self {
            Family::Oscillator1d {
                theta,
                alpha,
                c,
                beta1,
                beta2,
                ..
            } => {
                check_angle("theta", theta)?;
                if !(alpha > T::zero()) || !alpha.is_finite() {
                    return Err(ModelError::Parameter(format!("alpha = {alpha} must be > 0")));
                }
                if !(c > T::zero()) || !c.is_finite() {
                    return Err(ModelError::Parameter(format!("c = {c} must be > 0")));
                }
                if !crate::scalar::is_finite_complex(beta1) || !crate::scalar::is_finite_complex(beta2) {
                    return Err(ModelError::NonFinite("beta coefficients".into()));
                }
            }
            Family::AiryHalfLine { theta, alpha } => {
                check_angle("theta", theta)?;
                if !(alpha > T::zero()) || !alpha.is_finite() {
                    return Err(ModelError::Parameter(format!("alpha = {alpha} must be > 0")));
                }
            }
            Family::Holomorphic2d { n } => {
                if n < 1 {
                    return Err(ModelError::Parameter("holomorphic_2d needs n >= 1".into()));
                }
            }
            Family::DilatedModel { m, k, alpha } => {
                if m < 2 || k < 1 {
                    return Err(ModelError::Parameter(format!(
                        "dilated_model needs m >= 2, k >= 1, got ({m}, {k})"
                    )));
                }
                let limit = T::PI() / T::lit(4.0 * f64::from(m));
                if !alpha.is_finite() || alpha.abs() >= limit {
                    return Err(ModelError::AngleRange {
                        alpha: alpha.to_f64_lossy(),
                        limit: limit.to_f64_lossy(),
                    });
                }
            }
            Family::HalfPlaneModel { theta, n } => {
                check_angle("theta", theta)?;
                if n < 1 {
                    return Err(ModelError::Parameter("half_plane_model needs n >= 1".into()));
                }
            }
        }
        Ok(())
    }

    /// Regenerates the operator fields from the parameters.
    pub(crate) fn build(&self) -> Result<OperatorSpec<T>, ModelError> {
        self.validate()?;
        let fam = Some(self.clone());
        match *self {
            Family::Oscillator1d {
                theta,
                alpha,
                c,
                sign_changing,
                beta1,
                beta2,
            } => {
                let kind = if sign_changing {
                    FactorKind::SignedAbs
                } else {
                    FactorKind::Abs
                };
                let v1 = ScalarField::new(1, vec![MonomialTerm::axis(cis(theta) * c, 1, 0, alpha, kind)?])?;
                let v2 = ScalarField::new(
                    1,
                    vec![
                        MonomialTerm::axis(beta2, 1, 0, T::lit(2.0), FactorKind::Power)?,
                        MonomialTerm::axis(beta1, 1, 0, T::one(), FactorKind::Power)?,
                    ],
                )?;
                OperatorSpec::from_parts_unchecked(
                    DomainKind::FullSpace,
                    vec![T::zero()],
                    VectorField::zero(1),
                    v1,
                    v2,
                    fam,
                )
            }
            Family::AiryHalfLine { theta, alpha } => {
                // on x > 0, x^alpha and |x|^alpha agree; prefer the plain power when possible
                let kind = if alpha == alpha.round() {
                    FactorKind::Power
                } else {
                    FactorKind::Abs
                };
                let v1 = ScalarField::new(1, vec![MonomialTerm::axis(cis(theta), 1, 0, alpha, kind)?])?;
                OperatorSpec::from_parts_unchecked(
                    DomainKind::HalfSpace,
                    vec![T::zero()],
                    VectorField::zero(1),
                    v1,
                    ScalarField::zero(1),
                    fam,
                )
            }
            Family::Holomorphic2d { n } => {
                let (re_next, _) = z_power_parts::<T>(n + 1)?;
                let a2 = re_next.scale(Complex::new(T::one() / T::lit(f64::from(n + 1)), T::zero()));
                let (_, im_n) = z_power_parts::<T>(n)?;
                let v1 = im_n.scale(Complex::i());
                let a = VectorField::new(vec![ScalarField::zero(2), a2])?;
                OperatorSpec::from_parts_unchecked(
                    DomainKind::FullSpace,
                    vec![T::zero(), T::zero()],
                    a,
                    v1,
                    ScalarField::zero(2),
                    fam,
                )
            }
            Family::DilatedModel { m, k, alpha } => {
                let mf = T::lit(f64::from(m));
                let kf = T::lit(f64::from(k));
                let a2 = ScalarField::new(
                    2,
                    vec![MonomialTerm::new(
                        Complex::new(T::one() / mf, T::zero()),
                        vec![mf, T::zero()],
                        vec![false, false],
                    )?],
                )?;
                let a = VectorField::new(vec![ScalarField::zero(2), a2])?;
                let phase = T::lit(2.0) * kf * mf * alpha + T::FRAC_PI_2();
                let v1 = ScalarField::new(
                    2,
                    vec![MonomialTerm::new(
                        cis(phase),
                        vec![T::zero(), T::lit(2.0) * kf],
                        vec![false, false],
                    )?],
                )?;
                OperatorSpec::from_parts_unchecked(
                    DomainKind::FullSpace,
                    vec![alpha, -mf * alpha],
                    a,
                    v1,
                    ScalarField::zero(2),
                    fam,
                )
            }
            Family::HalfPlaneModel { theta, n } => {
                let np1 = T::lit(f64::from(n + 1));
                let a2 = ScalarField::new(
                    2,
                    vec![MonomialTerm::new(
                        Complex::new(T::one() / np1, T::zero()),
                        vec![np1, T::zero()],
                        vec![false, false],
                    )?],
                )?;
                let a = VectorField::new(vec![ScalarField::zero(2), a2])?;
                let v1 = ScalarField::new(
                    2,
                    vec![MonomialTerm::new(
                        cis(theta),
                        vec![T::zero(), T::lit(f64::from(n))],
                        vec![false, false],
                    )?],
                )?;
                OperatorSpec::from_parts_unchecked(
                    DomainKind::HalfSpace,
                    vec![T::zero(), T::zero()],
                    a,
                    v1,
                    ScalarField::zero(2),
                    fam,
                )
            }
        }
    }

    pub fn cast<U: Real>(&self) -> Family<U> {
        match *self {
            Family::Oscillator1d {
                theta,
                alpha,
                c,
                sign_changing,
                beta1,
                beta2,
            } => Family::Oscillator1d {
                theta: cast(theta),
                alpha: cast(alpha),
                c: cast(c),
                sign_changing,
                beta1: cast_complex(beta1),
                beta2: cast_complex(beta2),
            },
            Family::AiryHalfLine { theta, alpha } => Family::AiryHalfLine {
                theta: cast(theta),
                alpha: cast(alpha),
            },
            Family::Holomorphic2d { n } => Family::Holomorphic2d { n },
            Family::DilatedModel { m, k, alpha } => Family::DilatedModel {
                m,
                k,
                alpha: cast(alpha),
            },
            Family::HalfPlaneModel { theta, n } => Family::HalfPlaneModel { theta: cast(theta), n },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn z_cubed_parts() {
        let (re, im) = z_power_parts::<f64>(3).unwrap();
        let (x, y) = (1.3, -0.7);
        let z = Complex::new(x, y);
        let z3 = z * z * z;
        assert!((re.eval(&[x, y]).unwrap().re - z3.re).abs() < 1e-12);
        assert!((im.eval(&[x, y]).unwrap().re - z3.im).abs() < 1e-12);
    }

    #[test]
    fn holomorphic_weight_is_modulus_of_z_power() {
        for n in 1..4 {
            let s = OperatorSpec::from_family(Family::<f64>::Holomorphic2d { n }).unwrap();
            for &(x, y) in &[(0.3, 1.7), (-2.0, 0.5), (1.1, -1.1)] {
                let z: Complex<f64> = Complex::new(x, y);
                let want = (z.norm().powi(2 * n as i32) + 1.0_f64).sqrt();
                assert!((s.weight_m(&[x, y]).unwrap() - want).abs() < 1e-10 * want);
            }
        }
    }

    #[test]
    fn dilated_model_rejects_large_angle() {
        let f = Family::<f64>::DilatedModel { m: 2, k: 1, alpha: 0.5 };
        assert!(matches!(f.build(), Err(ModelError::AngleRange { .. })));
    }
}
