use num_complex::Complex;
use rayon::prelude::*;
use serde::Serialize;

use super::{singular_values, LinalgReal, SpectraError};
use crate::discretize::{AssembledOperator, CMatrix};

/// Largest node count per axis.
pub const MAX_PSEUDO_NODES: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Rectangle<T> {
    pub re_min: T,
    pub re_max: T,
    pub im_min: T,
    pub im_max: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PseudospectrumGrid<T> {
    pub rectangle: Rectangle<T>,
    pub nx: usize,
    pub ny: usize,
    /// Row-major in `(iy, ix)`: node `z = re(ix) + i im(iy)`.
    pub sigma_min: Vec<T>,
}

impl<T: LinalgReal> PseudospectrumGrid<T> {
    pub fn node(&self, ix: usize, iy: usize) -> Complex<T> {
        node(&self.rectangle, self.nx, self.ny, ix, iy)
    }
}

fn node<T: LinalgReal>(r: &Rectangle<T>, nx: usize, ny: usize, ix: usize, iy: usize) -> Complex<T> {
    let lerp = |a: T, b: T, j: usize, n: usize| {
        if n == 1 {
            a
        } else {
            a + (b - a) * T::lit(j as f64) / T::lit((n - 1) as f64)
        }
    };
    Complex::new(lerp(r.re_min, r.re_max, ix, nx), lerp(r.im_min, r.im_max, iy, ny))
}

pub fn pseudospectrum<T: LinalgReal>(
    op: &AssembledOperator<T>,
    rect: Rectangle<T>,
    nx: usize,
    ny: usize,
) -> Result<PseudospectrumGrid<T>, SpectraError> {
    pseudospectrum_matrix(&op.matrix, op.kind.is_hermitian(), rect, nx, ny)
}

/// `sigma_min(M - z)` on an `nx x ny` lattice of the rectangle.
pub fn pseudospectrum_matrix<T: LinalgReal>(
    m: &CMatrix<T>,
    hermitian: bool,
    rect: Rectangle<T>,
    nx: usize,
    ny: usize,
) -> Result<PseudospectrumGrid<T>, SpectraError> {
    if nx == 0 || ny == 0 || nx > MAX_PSEUDO_NODES || ny > MAX_PSEUDO_NODES {
        return Err(SpectraError::Budget(format!(
            "{nx}x{ny} nodes, limit is {MAX_PSEUDO_NODES}x{MAX_PSEUDO_NODES}"
        )));
    }
    let n = m.nrows();
    let sigma: Result<Vec<T>, SpectraError> = (0..nx * ny)
        .into_par_iter()
        .map(|k| {
            let z = node(&rect, nx, ny, k % nx, k / nx);
            let mut a = m.clone();
            for i in 0..n {
                a[(i, i)] -= z;
            }
            let s = singular_values(&a, hermitian && z.im == T::zero())?;
            Ok(s.last().copied().unwrap_or(T::zero()))
        })
        .collect();
    Ok(PseudospectrumGrid {
        rectangle: rect,
        nx,
        ny,
        sigma_min: sigma?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normal_matrix_at_origin() {
        let mut m = CMatrix::<f64>::zeros((2, 2));
        m[(0, 0)] = Complex::new(0.0, 1.0);
        m[(1, 1)] = Complex::new(0.0, -1.0);
        let r = Rectangle {
            re_min: 0.0,
            re_max: 0.0,
            im_min: 0.0,
            im_max: 0.0,
        };
        let g = pseudospectrum_matrix(&m, false, r, 1, 1).unwrap();
        assert!((g.sigma_min[0] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn oversize_grid_is_refused() {
        let m = CMatrix::<f64>::zeros((2, 2));
        let r = Rectangle {
            re_min: 0.0,
            re_max: 1.0,
            im_min: 0.0,
            im_max: 1.0,
        };
        assert!(matches!(
            pseudospectrum_matrix(&m, false, r, 201, 3),
            Err(SpectraError::Budget(_))
        ));
    }
}
