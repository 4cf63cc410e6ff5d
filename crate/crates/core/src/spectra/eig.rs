use num_complex::Complex;
use serde::Serialize;

use super::{is_tridiagonal, to_buffer, LinalgReal, SpectraError};
use crate::discretize::{frobenius, AssembledOperator, CMatrix, MAX_DOF};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumResult<T> {
    /// Sorted by modulus, ties by argument.
    pub eigenvalues: Vec<Complex<T>>,
    /// `10 n eps ||M||_F`, the backward error of the dense reduction.
    pub backward_error_bound: T,
    pub matrix_norm: T,
    /// Per eigenvalue: confirmed by a second grid. All false until
    /// [`mark_converged`] is called.
    pub converged: Vec<bool>,
    pub hermitian: bool,
}

impl<T: LinalgReal> SpectrumResult<T> {
    /// The backward error is within `1e-10 ||M||_F`.
    pub fn accepted(&self) -> bool {
        self.backward_error_bound <= T::lit(1e-10) * self.matrix_norm
    }
}

pub fn eigenvalues<T: LinalgReal>(op: &AssembledOperator<T>) -> Result<SpectrumResult<T>, SpectraError> {
    eigenvalues_matrix(&op.matrix, op.kind.is_hermitian())
}

/// All eigenvalues of a dense square matrix. `hermitian` selects the
/// symmetric solver and real output; the caller vouches for the symmetry.
pub fn eigenvalues_matrix<T: LinalgReal>(m: &CMatrix<T>, hermitian: bool) -> Result<SpectrumResult<T>, SpectraError> {
    let n = m.nrows();
    if n != m.ncols() {
        return Err(SpectraError::Parameter(format!(
            "matrix is {}x{}, not square",
            n,
            m.ncols()
        )));
    }
    if n > MAX_DOF {
        return Err(SpectraError::Budget(format!("{n} unknowns, dense budget is {MAX_DOF}")));
    }
    let norm = frobenius(m);
    let tri = is_tridiagonal(m);
    let mut values: Vec<Complex<T>> = if hermitian {
        let real = if tri {
            // a Hermitian tridiagonal is unitarily diagonal-similar to the
            // real one with |off-diagonals|
            let d = (0..n).map(|i| m[(i, i)].re).collect();
            let e = (0..n.saturating_sub(1)).map(|i| m[(i, i + 1)].norm()).collect();
            T::eigenvalues_tridiagonal(d, e)?
        } else {
            let mut buf = to_buffer(m);
            T::eigenvalues_hermitian(n, &mut buf)?
        };
        real.into_iter().map(Complex::from).collect()
    } else {
        let mut buf = to_buffer(m);
        T::eigenvalues_general(n, &mut buf, tri)?
    };
    sort_by_modulus(&mut values);
    Ok(SpectrumResult {
        converged: vec![false; values.len()],
        eigenvalues: values,
        backward_error_bound: T::lit(10.0) * T::lit(n as f64) * T::epsilon() * norm,
        matrix_norm: norm,
        hermitian,
    })
}

pub(crate) fn sort_by_modulus<T: LinalgReal>(v: &mut [Complex<T>]) {
    v.sort_by(|a, b| {
        a.norm()
            .partial_cmp(&b.norm())
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.arg().partial_cmp(&b.arg()).unwrap_or(std::cmp::Ordering::Equal))
    });
}

/// Flags the eigenvalues that another discretization reproduces within
/// `rel_tol * max(1, |lambda|)`.
pub fn mark_converged<T: LinalgReal>(result: &mut SpectrumResult<T>, other: &SpectrumResult<T>, rel_tol: T) {
    for (flag, &z) in result.converged.iter_mut().zip(&result.eigenvalues) {
        let tol = rel_tol * T::one().max(z.norm());
        *flag = other.eigenvalues.iter().any(|&w| (w - z).norm() <= tol);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn general_and_hermitian_paths_agree() {
        let n = 6;
        let m = CMatrix::<f64>::from_shape_fn((n, n), |(i, j)| {
            let s = (i + j) as f64;
            Complex::new(s.cos(), if i == j { 0.0 } else { (i as f64 - j as f64) * 0.3 })
        });
        let g = eigenvalues_matrix(&m, false).unwrap();
        let h = eigenvalues_matrix(&m, true).unwrap();
        for (a, b) in g.eigenvalues.iter().zip(&h.eigenvalues) {
            assert!((a - b).norm() < 1e-12, "{a} vs {b}");
        }
        assert!(g.accepted());
    }

    #[test]
    fn tridiagonal_shortcut_matches_dense() {
        let n = 7;
        let m = CMatrix::<f64>::from_shape_fn((n, n), |(i, j)| match i.abs_diff(j) {
            0 => Complex::new(i as f64, 0.0),
            1 => {
                let z = Complex::new(0.5, 0.25 * (i.min(j) as f64 + 1.0));
                if i < j {
                    z
                } else {
                    z.conj()
                }
            }
            _ => Complex::new(0.0, 0.0),
        });
        let fast = eigenvalues_matrix(&m, true).unwrap();
        let mut buf = to_buffer(&m);
        let dense = f64::eigenvalues_hermitian(n, &mut buf).unwrap();
        let mut dense: Vec<Complex<f64>> = dense.into_iter().map(Complex::from).collect();
        sort_by_modulus(&mut dense);
        for (a, b) in fast.eigenvalues.iter().zip(&dense) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn single_precision_runs() {
        let m = CMatrix::<f32>::from_shape_fn((3, 3), |(i, j)| {
            Complex::new(if i == j { i as f32 + 1.0 } else { 0.0 }, 0.0)
        });
        let r = eigenvalues_matrix(&m, false).unwrap();
        assert!((r.eigenvalues[2].re - 3.0).abs() < 1e-5);
    }
}
