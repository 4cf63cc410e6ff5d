use num_complex::Complex;
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use super::{to_buffer, LinalgReal, SpectraError};
use crate::criterion::Sector;
use crate::discretize::{AssembledOperator, CMatrix, MAX_DOF};
use crate::scalar::cis;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldOfValues<T> {
    pub angles: Vec<T>,
    /// Support point for each angle, in angle order.
    pub boundary_points: Vec<Complex<T>>,
    /// Smallest sector at `vertex` holding the polygon; `None` when the
    /// vertex is surrounded.
    pub sector: Option<Sector<T>>,
}

pub fn field_of_values_boundary<T: LinalgReal>(
    op: &AssembledOperator<T>,
    n_angles: usize,
    vertex: Complex<T>,
) -> Result<FieldOfValues<T>, SpectraError> {
    field_of_values_matrix(&op.matrix, n_angles, vertex)
}

/// For each `phi = 2 pi j / K`, the top eigenvector `v` of the Hermitian part
/// of `e^{-i phi} M` gives the boundary point `<Mv, v> / <v, v>`.
pub fn field_of_values_matrix<T: LinalgReal>(
    m: &CMatrix<T>,
    n_angles: usize,
    vertex: Complex<T>,
) -> Result<FieldOfValues<T>, SpectraError> {
    let n = m.nrows();
    if n_angles < 64 {
        return Err(SpectraError::Parameter(format!("{n_angles} angles, need at least 64")));
    }
    if n == 0 || n != m.ncols() {
        return Err(SpectraError::Parameter("matrix must be square and nonempty".into()));
    }
    if n > MAX_DOF {
        return Err(SpectraError::Budget(format!("{n} unknowns, dense budget is {MAX_DOF}")));
    }
    let angles: Vec<T> = (0..n_angles)
        .map(|j| T::TAU() * T::lit(j as f64) / T::lit(n_angles as f64))
        .collect();
    let points: Result<Vec<Complex<T>>, SpectraError> = angles
        .par_iter()
        .map(|&phi| {
            let rot = cis(-phi);
            let half = T::lit(0.5);
            let h = CMatrix::from_shape_fn((n, n), |(i, j)| (rot * m[(i, j)] + (rot * m[(j, i)]).conj()) * half);
            let mut buf = to_buffer(&h);
            let (_, vecs) = T::eigenpairs_hermitian_range(n, &mut buf, n, n, true)?;
            let v = &vecs[0];
            let mut num = Complex::zero();
            let mut den = T::zero();
            for i in 0..n {
                let mut mv = Complex::zero();
                for j in 0..n {
                    mv += m[(i, j)] * v[j];
                }
                num += v[i].conj() * mv;
                den += v[i].norm_sqr();
            }
            Ok(num / den)
        })
        .collect();
    let boundary_points = points?;
    let sector = enclosing_sector(&boundary_points, vertex);
    Ok(FieldOfValues {
        angles,
        boundary_points,
        sector,
    })
}

/// Complement of the widest empty angular gap seen from `vertex`.
pub(crate) fn enclosing_sector<T: LinalgReal>(points: &[Complex<T>], vertex: Complex<T>) -> Option<Sector<T>> {
    let scale = points.iter().fold(T::zero(), |s, z| s.max((z - vertex).norm()));
    let mut args: Vec<T> = points
        .iter()
        .filter(|z| (*z - vertex).norm() > T::lit(1e-12) * scale)
        .map(|z| (z - vertex).arg())
        .collect();
    if args.is_empty() {
        return None;
    }
    args.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let k = args.len();
    let mut best = (T::zero(), 0usize);
    for i in 0..k {
        let gap = if i + 1 < k {
            args[i + 1] - args[i]
        } else {
            args[0] + T::TAU() - args[k - 1]
        };
        if gap > best.0 {
            best = (gap, i);
        }
    }
    // the polygon is convex: a surrounded vertex leaves no gap of pi
    if best.0 < T::PI() && k > 2 {
        return None;
    }
    let i = best.1;
    let start = args[(i + 1) % k];
    let mut end = args[i];
    if end < start {
        end += T::TAU();
    }
    let mut s = Sector::new(start, end);
    s.vertex = vertex;
    Some(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_gives_segment() {
        let m = CMatrix::<f64>::from_shape_fn((2, 2), |(i, j)| Complex::from(if i == j { i as f64 } else { 0.0 }));
        let f = field_of_values_matrix(&m, 64, Complex::zero()).unwrap();
        for z in &f.boundary_points {
            assert!(z.im.abs() < 1e-12 && z.re > -1e-12 && z.re < 1.0 + 1e-12);
        }
    }

    #[test]
    fn jordan_block_gives_disk() {
        let mut m = CMatrix::<f64>::zeros((2, 2));
        m[(0, 1)] = Complex::from(1.0);
        let f = field_of_values_matrix(&m, 64, Complex::zero()).unwrap();
        for z in &f.boundary_points {
            assert!((z.norm() - 0.5).abs() < 1e-8);
        }
        assert!(f.sector.is_none());
    }
}
