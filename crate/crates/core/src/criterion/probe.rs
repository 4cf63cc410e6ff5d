use serde::{Deserialize, Serialize};

use super::quadrature::{gauss_legendre, integrate_adaptive, integrate_gl};
use super::threshold::{ConvergenceClass, PCrit, SchattenMethod, SchattenVerdict};
use super::xi::xi_integral_constant;
use super::CriterionError;
use crate::model::{DomainKind, OperatorSpec};
use crate::scalar::Real;

/// Shell-classification knobs of the dyadic probe.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeConfig {
    pub shells: usize,
    /// Convergent when the fitted shell-to-shell ratio is below this.
    pub geometric_factor: f64,
    /// Shells used for the ratio fit.
    pub fit_window: usize,
    /// Divergent when contributions never decrease over this many shells.
    pub divergent_window: usize,
    /// Angular panels seeding the adaptive angle integral in 2D.
    pub angular_panels: usize,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig {
            shells: 16,
            geometric_factor: 0.9,
            fit_window: 6,
            divergent_window: 4,
            angular_panels: 128,
        }
    }
}

/// Classifies convergence of `int m^{d/2 - p} dx` (the xi-reduced form of the
/// phase-space integral) from its dyadic shell contributions.
pub fn schatten_integral_probe<T: Real>(
    spec: &OperatorSpec<T>,
    p: T,
    shells: usize,
) -> Result<SchattenVerdict, CriterionError> {
    schatten_integral_probe_with(
        spec,
        p,
        &ProbeConfig {
            shells,
            ..ProbeConfig::default()
        },
    )
}

pub fn schatten_integral_probe_with<T: Real>(
    spec: &OperatorSpec<T>,
    p: T,
    cfg: &ProbeConfig,
) -> Result<SchattenVerdict, CriterionError> {
    if cfg.shells < 6 {
        return Err(CriterionError::Parameter(format!(
            "shells = {} must be >= 6",
            cfg.shells
        )));
    }
    let verdict = |class| SchattenVerdict {
        p_crit: PCrit::Approx(p.to_f64_lossy()),
        method: SchattenMethod::Quadrature,
        convergence_class: Some(class),
    };
    let d = spec.dimension();
    let c = match xi_integral_constant(p, d) {
        Ok(c) => c.to_f64_lossy(),
        Err(CriterionError::DivergentXiIntegral { .. }) => return Ok(verdict(ConvergenceClass::Divergent)),
        Err(e) => return Err(e),
    };
    let contributions = shell_contributions(spec, p.to_f64_lossy(), c, cfg)?;
    Ok(verdict(classify(&contributions, cfg)))
}

fn shell_contributions<T: Real>(
    spec: &OperatorSpec<T>,
    p: f64,
    c: f64,
    cfg: &ProbeConfig,
) -> Result<Vec<f64>, CriterionError> {
    let d = spec.dimension();
    let expo = d as f64 / 2.0 - p;
    let half = spec.domain() == DomainKind::HalfSpace;
    let m_at = |x: &[f64]| -> Result<f64, CriterionError> {
        let xt: Vec<T> = x.iter().map(|&v| T::lit(v)).collect();
        Ok(spec.weight_m(&xt)?.to_f64_lossy())
    };
    // surface the first evaluation error before entering the closures
    m_at(&vec![1.0; d])?;
    let rule = gauss_legendre(16);
    let mut out = Vec::with_capacity(cfg.shells);
    for j in 0..cfg.shells {
        let (a, b) = (2f64.powi(j as i32), 2f64.powi(j as i32 + 1));
        let s = if d == 1 {
            let f = |x: f64| m_at(&[x]).map_or(f64::NAN, |m| m.powf(expo));
            let mut s = integrate_gl(f, a, b, 4, &rule);
            if !half {
                s += integrate_gl(|x: f64| f(-x), a, b, 4, &rule);
            }
            s
        } else {
            let top = if half {
                std::f64::consts::PI
            } else {
                2.0 * std::f64::consts::PI
            };
            let panels = if half {
                cfg.angular_panels / 2
            } else {
                cfg.angular_panels
            };
            let radial = |r: f64| {
                let ang = |t: f64| m_at(&[r * t.cos(), r * t.sin()]).map_or(f64::NAN, |m| m.powf(expo));
                let w = top / panels as f64;
                let mut s = 0.0;
                for k in 0..panels {
                    let lo = w * k as f64;
                    s += integrate_adaptive(ang, lo, lo + w, 1e-9, 24);
                }
                r * s
            };
            integrate_gl(radial, a, b, 4, &rule)
        };
        if !s.is_finite() {
            return Err(CriterionError::Parameter(format!(
                "non-finite shell contribution at shell {j}"
            )));
        }
        out.push(c * s);
    }
    Ok(out)
}

fn classify(s: &[f64], cfg: &ProbeConfig) -> ConvergenceClass {
    let n = s.len();
    let w = cfg.fit_window.min(n).max(2);
    let tail = &s[n - w..];
    if tail.iter().all(|&v| v > 0.0) {
        let xs: Vec<f64> = (0..w).map(|i| i as f64).collect();
        let ys: Vec<f64> = tail.iter().map(|v| v.ln()).collect();
        let xm = xs.iter().sum::<f64>() / w as f64;
        let ym = ys.iter().sum::<f64>() / w as f64;
        let num: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - xm) * (y - ym)).sum();
        let den: f64 = xs.iter().map(|x| (x - xm) * (x - xm)).sum();
        if (num / den).exp() < cfg.geometric_factor {
            return ConvergenceClass::Convergent;
        }
    } else if tail.iter().all(|&v| v == 0.0) {
        return ConvergenceClass::Convergent;
    }
    let k = cfg.divergent_window.min(n);
    if s[n - k..].windows(2).all(|p| p[1] >= p[0]) {
        return ConvergenceClass::Divergent;
    }
    ConvergenceClass::Inconclusive
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_tail_is_convergent() {
        let s: Vec<f64> = (0..10).map(|j| 0.5f64.powi(j)).collect();
        assert_eq!(classify(&s, &ProbeConfig::default()), ConvergenceClass::Convergent);
    }

    #[test]
    fn growing_tail_is_divergent() {
        let s: Vec<f64> = (0..10).map(|j| 1.1f64.powi(j)).collect();
        assert_eq!(classify(&s, &ProbeConfig::default()), ConvergenceClass::Divergent);
    }

    #[test]
    fn slow_decay_is_inconclusive() {
        let s: Vec<f64> = (0..10).map(|j| 0.97f64.powi(j)).collect();
        assert_eq!(classify(&s, &ProbeConfig::default()), ConvergenceClass::Inconclusive);
    }
}
