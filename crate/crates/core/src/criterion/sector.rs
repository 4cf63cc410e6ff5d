use num_complex::Complex;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::CriterionError;
use crate::model::{Family, OperatorSpec};
use crate::scalar::Real;

/// Closed angle `{vertex + r e^{i phi} : r >= 0, theta_min <= phi <= theta_max}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sector<T> {
    pub vertex: Complex<T>,
    pub theta_min: T,
    pub theta_max: T,
    /// Real translation applied so that the vertex sits at 0.
    pub shift: T,
    /// The sector describes `e^{-i rotation}` times the operator's range.
    pub rotation: T,
}

impl<T: Real> Sector<T> {
    pub fn new(theta_min: T, theta_max: T) -> Self {
        Sector {
            vertex: Complex::zero(),
            theta_min,
            theta_max,
            shift: T::zero(),
            rotation: T::zero(),
        }
    }

    /// Smallest sector at 0 containing the given directions, which must fit
    /// in a half-plane around the first of them.
    pub fn hull(args: &[T]) -> Self {
        let base = args[0];
        let two_pi = T::TAU();
        let mut lo = base;
        let mut hi = base;
        for &a in &args[1..] {
            // unwrap to within pi of the base direction
            let mut a = a;
            while a - base > T::PI() {
                a -= two_pi;
            }
            while base - a > T::PI() {
                a += two_pi;
            }
            lo = lo.min(a);
            hi = hi.max(a);
        }
        Self::new(lo, hi)
    }

    pub fn opening(&self) -> T {
        self.theta_max - self.theta_min
    }

    pub fn mid_angle(&self) -> T {
        (self.theta_min + self.theta_max) / T::lit(2.0)
    }

    /// Whether `z` lies in the sector widened by `tol` radians.
    pub fn contains(&self, z: Complex<T>, tol: T) -> bool {
        let w = z - self.vertex;
        if w.norm() <= T::lit(1e3) * T::epsilon() {
            return true;
        }
        let mut a = w.arg();
        let mid = self.mid_angle();
        while a - mid > T::PI() {
            a -= T::TAU();
        }
        while mid - a > T::PI() {
            a += T::TAU();
        }
        a >= self.theta_min - tol && a <= self.theta_max + tol
    }
}

/// The numerical-range sector known in closed form for each cataloged family.
///
/// Every catalog member already has its range in a sector with vertex 0, so
/// the recorded shift is 0.
pub fn analytic_sector<T: Real>(spec: &OperatorSpec<T>) -> Result<Sector<T>, CriterionError> {
    let fam = spec.family().ok_or(CriterionError::NoAnalyticSector)?;
    Ok(match *fam {
        Family::Oscillator1d {
            theta, sign_changing, ..
        } => {
            if sign_changing {
                if theta >= T::zero() {
                    Sector::new(theta - T::PI(), theta)
                } else {
                    Sector::new(theta, theta + T::PI())
                }
            } else {
                Sector::new(theta.min(T::zero()), theta.max(T::zero()))
            }
        }
        Family::AiryHalfLine { theta, .. } | Family::HalfPlaneModel { theta, .. } => {
            Sector::new(theta.min(T::zero()), theta.max(T::zero()))
        }
        Family::Holomorphic2d { .. } => Sector::new(-T::FRAC_PI_2(), T::FRAC_PI_2()),
        Family::DilatedModel { m, k, alpha } => {
            // e^{-2i alpha} A_alpha: -d_x^2 has direction 0, the magnetic part
            // -2(m+1)alpha, the potential 2(km-1)alpha + pi/2
            let mf = T::lit(f64::from(m));
            let kf = T::lit(f64::from(k));
            let two = T::lit(2.0);
            let mut s = Sector::hull(&[
                T::zero(),
                -two * (mf + T::one()) * alpha,
                two * (kf * mf - T::one()) * alpha + T::FRAC_PI_2(),
            ]);
            s.rotation = two * alpha;
            s
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{dilate, optimal_alpha};
    use std::f64::consts::PI;

    #[test]
    fn dilated_sector_at_optimal_angle() {
        let s = OperatorSpec::from_family(Family::<f64>::dilated(2, 1)).unwrap();
        let d = dilate(&s, optimal_alpha(2, 1).unwrap()).unwrap();
        let sec = analytic_sector(&d).unwrap();
        assert!(sec.theta_min.abs() < 1e-15);
        assert!((sec.theta_max - 3.0 * PI / 8.0).abs() < 1e-15);
    }

    #[test]
    fn undilated_model_sits_in_first_quadrant() {
        let s = OperatorSpec::from_family(Family::<f64>::dilated(3, 2)).unwrap();
        let sec = analytic_sector(&s).unwrap();
        assert_eq!((sec.theta_min, sec.theta_max), (0.0, PI / 2.0));
    }

    #[test]
    fn sign_changing_cubic() {
        let s = OperatorSpec::from_family(Family::<f64>::complex_cubic()).unwrap();
        let sec = analytic_sector(&s).unwrap();
        assert_eq!((sec.theta_min, sec.theta_max), (-PI / 2.0, PI / 2.0));
        assert_eq!(sec.opening(), PI);
    }

    #[test]
    fn selfadjoint_airy_is_degenerate() {
        let s = OperatorSpec::from_family(Family::<f64>::AiryHalfLine { theta: 0.0, alpha: 1.0 }).unwrap();
        let sec = analytic_sector(&s).unwrap();
        assert_eq!(sec.opening(), 0.0);
    }

    #[test]
    fn custom_has_no_sector() {
        let s = OperatorSpec::from_family(Family::<f64>::harmonic())
            .unwrap()
            .without_family();
        assert_eq!(analytic_sector(&s), Err(CriterionError::NoAnalyticSector));
    }

    #[test]
    fn containment_with_tolerance() {
        let sec = Sector::new(0.0, PI / 3.0);
        assert!(sec.contains(Complex::from_polar(2.0, 0.5), 0.0));
        assert!(!sec.contains(Complex::from_polar(2.0, -0.1), 0.02));
        assert!(sec.contains(Complex::from_polar(2.0, -0.01), 0.02));
    }
}
