use num_complex::Complex;

use super::{is_tridiagonal, to_buffer, LinalgReal, SpectraError};
use crate::discretize::{frobenius, AssembledOperator, CMatrix, MAX_DOF};

/// Singular values of a dense matrix, descending.
pub fn singular_values<T: LinalgReal>(m: &CMatrix<T>, hermitian: bool) -> Result<Vec<T>, SpectraError> {
    let (r, c) = m.dim();
    if r.max(c) > MAX_DOF {
        return Err(SpectraError::Budget(format!("{r}x{c} exceeds the dense budget")));
    }
    let mut s = if hermitian && r == c {
        // singular values of a normal matrix are |eigenvalues|
        let tri = is_tridiagonal(m);
        let ev = if tri {
            let d = (0..r).map(|i| m[(i, i)].re).collect();
            let e = (0..r.saturating_sub(1)).map(|i| m[(i, i + 1)].norm()).collect();
            T::eigenvalues_tridiagonal(d, e)?
        } else {
            let mut buf = to_buffer(m);
            T::eigenvalues_hermitian(r, &mut buf)?
        };
        ev.into_iter().map(|x| x.abs()).collect()
    } else if r == c && is_tridiagonal(m) {
        let sub: Vec<_> = (1..r).map(|i| m[(i, i - 1)]).collect();
        let diag: Vec<_> = (0..r).map(|i| m[(i, i)]).collect();
        let sup: Vec<_> = (1..r).map(|i| m[(i - 1, i)]).collect();
        T::singular_values_tridiagonal(&sub, &diag, &sup)?
    } else {
        let mut buf = to_buffer(m);
        T::singular_values(r, c, &mut buf)?
    };
    s.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    Ok(s)
}

fn shifted<T: LinalgReal>(m: &CMatrix<T>, shift: Complex<T>) -> CMatrix<T> {
    let mut a = m.clone();
    for i in 0..a.nrows() {
        a[(i, i)] -= shift;
    }
    a
}

/// Singular values of `M - shift`, ascending (operator-level `mu_n`).
pub fn operator_singular_values<T: LinalgReal>(
    m: &CMatrix<T>,
    hermitian: bool,
    shift: Complex<T>,
) -> Result<Vec<T>, SpectraError> {
    let herm = hermitian && shift.im == T::zero();
    let mut s = singular_values(&shifted(m, shift), herm)?;
    s.reverse();
    Ok(s)
}

pub fn resolvent_singular_values<T: LinalgReal>(
    op: &AssembledOperator<T>,
    shift: Complex<T>,
) -> Result<Vec<T>, SpectraError> {
    resolvent_singular_values_matrix(&op.matrix, op.kind.is_hermitian(), shift)
}

/// Singular values of `(M - shift)^{-1}`, descending.
pub fn resolvent_singular_values_matrix<T: LinalgReal>(
    m: &CMatrix<T>,
    hermitian: bool,
    shift: Complex<T>,
) -> Result<Vec<T>, SpectraError> {
    let s = operator_singular_values(m, hermitian, shift)?;
    let threshold = T::lit(1e-12) * frobenius(m);
    let smin = s.first().copied().unwrap_or(T::zero());
    if !(smin > threshold) {
        return Err(SpectraError::SingularShift {
            sigma_min: smin.to_f64_lossy(),
            threshold: threshold.to_f64_lossy(),
        });
    }
    Ok(s.into_iter().map(|x| T::one() / x).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_resolvent() {
        let n = 20;
        let m = CMatrix::<f64>::from_shape_fn((n, n), |(i, j)| {
            Complex::from(if i == j { (i + 1) as f64 } else { 0.0 })
        });
        let mu = resolvent_singular_values_matrix(&m, false, Complex::from(0.0)).unwrap();
        for (k, v) in mu.iter().enumerate() {
            assert!((v - 1.0 / (k + 1) as f64).abs() < 1e-13);
        }
    }

    #[test]
    fn adjoint_has_same_singular_values() {
        let n = 9;
        let m = CMatrix::<f64>::from_shape_fn((n, n), |(i, j)| {
            Complex::new(((3 * i + j) as f64).sin(), ((i * j) as f64).cos())
        });
        let mh = m.t().mapv(|z| z.conj());
        let a = singular_values(&m, false).unwrap();
        let b = singular_values(&mh, false).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() <= 1e-12 * a[0]);
        }
    }

    #[test]
    fn tridiagonal_path_matches_dense() {
        let n = 40;
        let m = CMatrix::<f64>::from_shape_fn((n, n), |(i, j)| match (j as i64) - (i as i64) {
            0 => Complex::new(2.0 + (i as f64).sin(), 0.3 * i as f64),
            1 => Complex::new(-1.0, 0.2),
            -1 => Complex::new(-0.5, -0.7),
            _ => Complex::new(0.0, 0.0),
        });
        let fast = singular_values(&m, false).unwrap();
        let mut buf = to_buffer(&m);
        let dense = f64::singular_values(n, n, &mut buf).unwrap();
        for (a, b) in fast.iter().zip(&dense) {
            assert!((a - b).abs() <= 1e-12 * dense[0], "{a} vs {b}");
        }
    }

    #[test]
    fn shift_on_eigenvalue_is_rejected() {
        let m = CMatrix::<f64>::from_shape_fn((3, 3), |(i, j)| Complex::from(if i == j { i as f64 } else { 0.0 }));
        let e = resolvent_singular_values_matrix(&m, false, Complex::from(1.0)).unwrap_err();
        assert!(matches!(e, SpectraError::SingularShift { .. }));
    }
}
