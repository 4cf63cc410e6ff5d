use serde::{Deserialize, Serialize};

use super::DiscretizeError;
use crate::model::{DomainKind, OperatorSpec};
use crate::scalar::Real;

/// Dense-solver budget on the number of unknowns.
pub const MAX_DOF: usize = 5000;
pub const MIN_POINTS: usize = 8;

/// Interior points `lower + (j+1) h`, `j < n`, `h = (upper - lower)/(n+1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis<T> {
    pub lower: T,
    pub upper: T,
    pub n: usize,
}

impl<T: Real> Axis<T> {
    pub fn h(&self) -> T {
        (self.upper - self.lower) / T::lit((self.n + 1) as f64)
    }

    pub fn node(&self, j: usize) -> T {
        self.lower + self.h() * T::lit((j + 1) as f64)
    }
}

/// Uniform tensor grid with Dirichlet faces. Unknowns are ordered with the
/// last axis fastest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid<T> {
    pub axes: Vec<Axis<T>>,
}

impl<T: Real> Grid<T> {
    pub fn new(axes: Vec<Axis<T>>) -> Result<Self, DiscretizeError> {
        for a in &axes {
            if a.n < MIN_POINTS {
                return Err(DiscretizeError::Parameter(format!(
                    "{} points per axis is below the minimum {MIN_POINTS}",
                    a.n
                )));
            }
            if !(a.upper > a.lower) || !a.lower.is_finite() || !a.upper.is_finite() {
                return Err(DiscretizeError::Parameter(format!(
                    "axis bounds [{}, {}] are not an interval",
                    a.lower, a.upper
                )));
            }
        }
        let dof = axes
            .iter()
            .try_fold(1usize, |acc, a| acc.checked_mul(a.n))
            .unwrap_or(usize::MAX);
        if dof > MAX_DOF {
            return Err(DiscretizeError::Budget { dof, max: MAX_DOF });
        }
        Ok(Grid { axes })
    }

    pub fn dimension(&self) -> usize {
        self.axes.len()
    }

    pub fn dof(&self) -> usize {
        self.axes.iter().map(|a| a.n).product()
    }

    pub fn h(&self, axis: usize) -> T {
        self.axes[axis].h()
    }

    /// `prod_i h_i`, the weight of the grid inner product.
    pub fn cell_volume(&self) -> T {
        self.axes.iter().fold(T::one(), |acc, a| acc * a.h())
    }

    pub fn stride(&self, axis: usize) -> usize {
        self.axes[axis + 1..].iter().map(|a| a.n).product()
    }

    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dimension()];
        for (i, a) in self.axes.iter().enumerate().rev() {
            idx[i] = flat % a.n;
            flat /= a.n;
        }
        idx
    }

    pub fn point(&self, flat: usize) -> Vec<T> {
        self.multi_index(flat)
            .iter()
            .zip(&self.axes)
            .map(|(&j, a)| a.node(j))
            .collect()
    }

    pub fn points(&self) -> Vec<Vec<T>> {
        (0..self.dof()).map(|r| self.point(r)).collect()
    }
}

/// `[-L, L]` per axis, `[0, L]` on the last axis of a half space.
pub fn make_grid<T: Real>(
    spec: &OperatorSpec<T>,
    half_width: T,
    n_per_axis: usize,
) -> Result<Grid<T>, DiscretizeError> {
    let d = spec.dimension();
    make_grid_anisotropic(spec, &vec![half_width; d], &vec![n_per_axis; d])
}

pub fn make_grid_anisotropic<T: Real>(
    spec: &OperatorSpec<T>,
    half_widths: &[T],
    points: &[usize],
) -> Result<Grid<T>, DiscretizeError> {
    let d = spec.dimension();
    if half_widths.len() != d || points.len() != d {
        return Err(DiscretizeError::Parameter(format!(
            "need {d} half-widths and point counts"
        )));
    }
    let mut axes = Vec::with_capacity(d);
    for i in 0..d {
        let l = half_widths[i];
        if !(l > T::zero()) {
            return Err(DiscretizeError::Parameter(format!("box half-width {l} must be > 0")));
        }
        let lower = if spec.domain() == DomainKind::HalfSpace && i == d - 1 {
            T::zero()
        } else {
            -l
        };
        axes.push(Axis {
            lower,
            upper: l,
            n: points[i],
        });
    }
    Grid::new(axes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Family;

    #[test]
    fn spacing_examples() {
        let s = OperatorSpec::from_family(Family::<f64>::harmonic()).unwrap();
        let g = make_grid(&s, 10.0, 999).unwrap();
        assert!((g.h(0) - 0.02).abs() < 1e-15);

        let a = OperatorSpec::from_family(Family::<f64>::AiryHalfLine { theta: 1.0, alpha: 1.0 }).unwrap();
        let g = make_grid(&a, 30.0, 2999).unwrap();
        assert!((g.h(0) - 0.01).abs() < 1e-15);
        assert!((g.point(0)[0] - 0.01).abs() < 1e-15);

        let dm = OperatorSpec::from_family(Family::<f64>::dilated(2, 1)).unwrap();
        assert_eq!(make_grid(&dm, 8.0, 60).unwrap().dof(), 3600);
    }

    #[test]
    fn budget_and_minimum() {
        let dm = OperatorSpec::from_family(Family::<f64>::dilated(2, 1)).unwrap();
        assert!(matches!(make_grid(&dm, 8.0, 80), Err(DiscretizeError::Budget { .. })));
        assert!(make_grid(&dm, 8.0, 7).is_err());
        assert!(make_grid(&dm, -1.0, 20).is_err());
    }

    #[test]
    fn last_axis_is_fastest() {
        let dm = OperatorSpec::from_family(Family::<f64>::dilated(2, 1)).unwrap();
        let g = make_grid(&dm, 9.0, 8).unwrap();
        assert_eq!(g.multi_index(9), vec![1, 1]);
        assert_eq!(g.stride(0), 8);
        assert_eq!(g.stride(1), 1);
    }
}
