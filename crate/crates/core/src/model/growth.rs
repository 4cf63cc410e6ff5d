use serde::{Deserialize, Serialize};

use super::spec::{DomainKind, OperatorSpec};
use crate::scalar::Real;

pub const DEFAULT_KAPPA: f64 = 10.0;
const WORKING_BOX: f64 = 4.0;

/// Separated growth model `m(x) ~ 1 + sum_i c_i |x_i|^{gamma_i}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthSignature<T> {
    pub gammas: Vec<T>,
    pub constants: Vec<T>,
    pub valid: bool,
    /// Worst ratio `max(m/model, model/m)` seen on the sample set.
    pub kappa: T,
}

impl<T: Real> GrowthSignature<T> {
    pub fn model(&self, x: &[T]) -> T {
        self.gammas
            .iter()
            .zip(&self.constants)
            .zip(x)
            .fold(T::one(), |acc, ((&g, &c), &xi)| acc + c * xi.abs().powf(g))
    }
}

/// Dyadic coordinates `{0, +-2^j}` reaching 4x the working box.
fn dyadic_axis<T: Real>(nonnegative: bool) -> Vec<T> {
    let mut out = vec![T::zero()];
    let top = (4.0 * WORKING_BOX).log2() as i32;
    for j in -3..=top {
        let v = T::lit(2f64.powi(j));
        out.push(v);
        if !nonnegative {
            out.push(-v);
        }
    }
    out
}

pub fn growth_signature<T: Real>(spec: &OperatorSpec<T>) -> GrowthSignature<T> {
    growth_signature_with(spec, T::lit(DEFAULT_KAPPA))
}

pub fn growth_signature_with<T: Real>(spec: &OperatorSpec<T>, kappa_max: T) -> GrowthSignature<T> {
    let d = spec.dimension();
    let mut gammas = Vec::with_capacity(d);
    let mut constants = Vec::with_capacity(d);
    for i in 0..d {
        let half = spec.domain() == DomainKind::HalfSpace && i == d - 1;
        let dirs: &[f64] = if half { &[1.0] } else { &[1.0, -1.0] };
        // per field, the leading (exponent, coefficient) along this axis, worst side
        let mut leads: Vec<(T, T)> = Vec::new();
        let fields = std::iter::once(spec.v1()).chain(spec.magnetic().upper().map(|(_, _, f)| f));
        for f in fields {
            let mut best: Option<(T, T)> = None;
            for &s in dirs {
                if let Some((e, c)) = f.axis_leading(i, T::lit(s)) {
                    best = Some(match best {
                        Some((e0, c0)) if e0 > e || (e0 == e && c0 >= c) => (e0, c0),
                        _ => (e, c),
                    });
                }
            }
            if let Some(l) = best {
                leads.push(l);
            }
        }
        let gamma = leads.iter().map(|l| l.0).fold(T::zero(), T::max);
        let c2: T = leads.iter().filter(|l| l.0 == gamma).map(|l| l.1 * l.1).sum();
        gammas.push(gamma);
        constants.push(if leads.is_empty() { T::zero() } else { c2.sqrt() });
    }

    let mut sig = GrowthSignature {
        gammas,
        constants,
        valid: false,
        kappa: T::one(),
    };
    let axes: Vec<Vec<T>> = (0..d)
        .map(|i| dyadic_axis(spec.domain() == DomainKind::HalfSpace && i == d - 1))
        .collect();
    let mut idx = vec![0usize; d];
    let mut worst = T::one();
    loop {
        let x: Vec<T> = idx.iter().enumerate().map(|(i, &j)| axes[i][j]).collect();
        if let Ok(m) = spec.weight_m(&x) {
            let model = sig.model(&x);
            let r = (m / model).max(model / m);
            if r.is_nan() {
                worst = T::infinity();
            } else {
                worst = worst.max(r);
            }
        }
        let mut ax = 0;
        while ax < d {
            idx[ax] += 1;
            if idx[ax] < axes[ax].len() {
                break;
            }
            idx[ax] = 0;
            ax += 1;
        }
        if ax == d {
            break;
        }
    }
    sig.kappa = worst;
    let proper = sig
        .gammas
        .iter()
        .zip(&sig.constants)
        .all(|(&g, &c)| g > T::zero() && c > T::zero());
    sig.valid = proper && worst <= kappa_max;
    sig
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Family;

    #[test]
    fn oscillator_signature() {
        let s = OperatorSpec::from_family(Family::<f64>::oscillator(0.7, 1.5)).unwrap();
        let g = growth_signature(&s);
        assert_eq!(g.gammas, vec![1.5]);
        assert!(g.valid);
    }

    #[test]
    fn free_laplacian_is_not_proper() {
        let s = OperatorSpec::from_family(Family::<f64>::oscillator(0.0, 2.0))
            .unwrap()
            .without_family();
        let free = OperatorSpec::new(
            1,
            DomainKind::FullSpace,
            vec![0.0],
            crate::model::VectorField::zero(1),
            crate::model::ScalarField::zero(1),
            crate::model::ScalarField::zero(1),
            None,
        )
        .unwrap();
        assert!(growth_signature(&s).valid);
        let g = growth_signature(&free);
        assert_eq!(g.gammas, vec![0.0]);
        assert!(!g.valid);
    }
}
