use ndarray::Array2;
use num_complex::Complex;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::grid::Grid;
use super::DiscretizeError;
use crate::model::OperatorSpec;
use crate::scalar::{cis, Real};

pub type CMatrix<T> = Array2<Complex<T>>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OperatorKind {
    #[serde(rename = "P")]
    P,
    #[serde(rename = "selfadjoint_absV")]
    SelfadjointAbsV,
    #[serde(rename = "selfadjoint_weight")]
    SelfadjointWeight,
    #[serde(rename = "form_a_gamma")]
    FormAGamma,
    #[serde(rename = "multiplier_phi1")]
    MultiplierPhi1,
}

impl OperatorKind {
    pub fn code(self) -> u32 {
        match self {
            OperatorKind::P => 0,
            OperatorKind::SelfadjointAbsV => 1,
            OperatorKind::SelfadjointWeight => 2,
            OperatorKind::FormAGamma => 3,
            OperatorKind::MultiplierPhi1 => 4,
        }
    }

    pub fn from_code(c: u32) -> Option<Self> {
        Some(match c {
            0 => OperatorKind::P,
            1 => OperatorKind::SelfadjointAbsV,
            2 => OperatorKind::SelfadjointWeight,
            3 => OperatorKind::FormAGamma,
            4 => OperatorKind::MultiplierPhi1,
            _ => return None,
        })
    }

    pub fn is_hermitian(self) -> bool {
        matches!(
            self,
            OperatorKind::SelfadjointAbsV | OperatorKind::SelfadjointWeight | OperatorKind::MultiplierPhi1
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelfadjointVariant {
    /// `-Delta_A + |V|`.
    AbsV,
    /// `-Delta_A + m`.
    Weight,
}

/// Dense row-major matrix with the grid and spec it came from.
#[derive(Debug, Clone)]
pub struct AssembledOperator<T: Real> {
    pub matrix: CMatrix<T>,
    pub grid: Grid<T>,
    pub spec_hash: String,
    pub kind: OperatorKind,
}

impl<T: Real> AssembledOperator<T> {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn max_abs(&self) -> T {
        self.matrix.iter().fold(T::zero(), |m, z| m.max(z.norm()))
    }

    pub fn frobenius(&self) -> T {
        frobenius(&self.matrix)
    }
}

pub fn frobenius<T: Real>(m: &CMatrix<T>) -> T {
    m.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
}

/// `max |M - M^*| / max |M|`.
pub fn hermitian_defect<T: Real>(m: &CMatrix<T>) -> T {
    let n = m.nrows();
    let mut worst = T::zero();
    let mut scale = T::zero();
    for i in 0..n {
        for j in 0..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
            scale = scale.max(m[(i, j)].norm());
        }
    }
    if scale == T::zero() {
        T::zero()
    } else {
        worst / scale
    }
}

type Row<T> = Vec<(usize, Complex<T>)>;

fn build<T: Real>(n: usize, rows: Vec<Row<T>>) -> CMatrix<T> {
    let mut m = CMatrix::zeros((n, n));
    for (r, row) in rows.into_iter().enumerate() {
        for (c, v) in row {
            m[(r, c)] += v;
        }
    }
    m
}

fn shifted<T: Real>(x: &[T], axis: usize, by: T) -> Vec<T> {
    let mut y = x.to_vec();
    y[axis] += by;
    y
}

fn check_dims<T: Real>(spec: &OperatorSpec<T>, grid: &Grid<T>) -> Result<(), DiscretizeError> {
    if spec.dimension() != grid.dimension() {
        return Err(DiscretizeError::Parameter(format!(
            "grid dimension {} does not match operator dimension {}",
            grid.dimension(),
            spec.dimension()
        )));
    }
    Ok(())
}

/// `sum_k e^{2i alpha_k}(-D2 + 2i A_k D1 + i d_k A_k + A_k^2) + V1 + V2`
/// with centered differences and Dirichlet faces.
pub fn assemble_p<T: Real>(spec: &OperatorSpec<T>, grid: &Grid<T>) -> Result<AssembledOperator<T>, DiscretizeError> {
    check_dims(spec, grid)?;
    let der = spec.derived_for_assembly()?;
    let d = grid.dimension();
    let n = grid.dof();
    let phases: Vec<Complex<T>> = spec.angles().iter().map(|&a| cis(a + a)).collect();
    let i = Complex::<T>::i();
    let rows: Vec<Row<T>> = (0..n)
        .into_par_iter()
        .map(|r| {
            let x = grid.point(r);
            let idx = grid.multi_index(r);
            let mut diag = spec.v1().eval_unchecked(&x) + spec.v2().eval_unchecked(&x);
            let mut row: Row<T> = Vec::with_capacity(2 * d + 1);
            for k in 0..d {
                let h = grid.h(k);
                let h2 = h * h;
                let a = spec.a().components()[k].eval_unchecked(&x).re;
                let da = der[k].eval_unchecked(&x).re;
                let ph = phases[k];
                diag += ph * (Complex::from(T::lit(2.0) / h2 + a * a) + i * da);
                let s = grid.stride(k);
                if idx[k] > 0 {
                    row.push((r - s, ph * (Complex::from(-T::one() / h2) - i * (a / h))));
                }
                if idx[k] + 1 < grid.axes[k].n {
                    row.push((r + s, ph * (Complex::from(-T::one() / h2) + i * (a / h))));
                }
            }
            row.push((r, diag));
            row
        })
        .collect();
    Ok(AssembledOperator {
        matrix: build(n, rows),
        grid: grid.clone(),
        spec_hash: spec.spec_hash(),
        kind: OperatorKind::P,
    })
}

/// `-Delta_A + |V|` or `-Delta_A + m` with the first-order magnetic term
/// written as `i(A D1 + D1 A)`, which makes the matrix Hermitian.
pub fn assemble_selfadjoint<T: Real>(
    spec: &OperatorSpec<T>,
    grid: &Grid<T>,
    variant: SelfadjointVariant,
) -> Result<AssembledOperator<T>, DiscretizeError> {
    check_dims(spec, grid)?;
    spec.derived_for_assembly()?;
    let d = grid.dimension();
    let n = grid.dof();
    let i = Complex::<T>::i();
    let rows: Result<Vec<Row<T>>, DiscretizeError> = (0..n)
        .into_par_iter()
        .map(|r| {
            let x = grid.point(r);
            let idx = grid.multi_index(r);
            let pot = match variant {
                SelfadjointVariant::AbsV => spec.potential(&x)?.norm(),
                SelfadjointVariant::Weight => spec.weight_m(&x)?,
            };
            let mut diag = pot;
            let mut row: Row<T> = Vec::with_capacity(2 * d + 1);
            for k in 0..d {
                let h = grid.h(k);
                let h2 = h * h;
                let ak = &spec.a().components()[k];
                let a = ak.eval_unchecked(&x).re;
                diag += T::lit(2.0) / h2 + a * a;
                let s = grid.stride(k);
                if idx[k] > 0 {
                    let an = ak.eval_unchecked(&shifted(&x, k, -h)).re;
                    row.push((r - s, Complex::from(-T::one() / h2) - i * ((a + an) / (h + h))));
                }
                if idx[k] + 1 < grid.axes[k].n {
                    let an = ak.eval_unchecked(&shifted(&x, k, h)).re;
                    row.push((r + s, Complex::from(-T::one() / h2) + i * ((a + an) / (h + h))));
                }
            }
            row.push((r, Complex::from(diag)));
            Ok(row)
        })
        .collect();
    Ok(AssembledOperator {
        matrix: build(n, rows?),
        grid: grid.clone(),
        spec_hash: spec.spec_hash(),
        kind: match variant {
            SelfadjointVariant::AbsV => OperatorKind::SelfadjointAbsV,
            SelfadjointVariant::Weight => OperatorKind::SelfadjointWeight,
        },
    })
}

/// One edge functional `c_lo u_lo + c_hi u_hi` of the magnetic forward
/// difference; a missing endpoint is a Dirichlet ghost node.
#[derive(Debug, Clone, Copy)]
pub struct Edge<T> {
    pub axis: usize,
    pub lo: Option<usize>,
    pub hi: Option<usize>,
    pub c_lo: Complex<T>,
    pub c_hi: Complex<T>,
}

/// Discrete magnetic gradient `D_A u`, one value per grid edge:
/// `(u_{j+1} - u_j)/h - i A_{j+1/2} (u_j + u_{j+1})/2`.
#[derive(Debug, Clone)]
pub struct MagneticGradient<T> {
    pub edges: Vec<Edge<T>>,
    pub dof: usize,
    pub cell_volume: T,
    pub dimension: usize,
}

impl<T: Real> MagneticGradient<T> {
    pub fn new(spec: &OperatorSpec<T>, grid: &Grid<T>) -> Result<Self, DiscretizeError> {
        check_dims(spec, grid)?;
        let d = grid.dimension();
        let n = grid.dof();
        let half = T::lit(0.5);
        let i = Complex::<T>::i();
        let mut edges = Vec::new();
        for k in 0..d {
            let h = grid.h(k);
            let s = grid.stride(k);
            let nk = grid.axes[k].n;
            for r in 0..n {
                let idx = grid.multi_index(r);
                let x = grid.point(r);
                let ak = &spec.a().components()[k];
                // edge below r, plus the final edge above the last node
                let mut push = |lo: Option<usize>, hi: Option<usize>, mid: Vec<T>| {
                    let a = ak.eval_unchecked(&mid).re;
                    edges.push(Edge {
                        axis: k,
                        lo,
                        hi,
                        c_lo: Complex::from(-T::one() / h) - i * (a * half),
                        c_hi: Complex::from(T::one() / h) - i * (a * half),
                    });
                };
                let lo = (idx[k] > 0).then(|| r - s);
                push(lo, Some(r), shifted(&x, k, -h * half));
                if idx[k] + 1 == nk {
                    push(Some(r), None, shifted(&x, k, h * half));
                }
            }
        }
        Ok(MagneticGradient {
            edges,
            dof: n,
            cell_volume: grid.cell_volume(),
            dimension: d,
        })
    }

    pub fn apply(&self, u: &[Complex<T>]) -> Vec<Complex<T>> {
        self.edges
            .iter()
            .map(|e| {
                let mut v = Complex::zero();
                if let Some(p) = e.lo {
                    v += e.c_lo * u[p];
                }
                if let Some(p) = e.hi {
                    v += e.c_hi * u[p];
                }
                v
            })
            .collect()
    }

    /// `||D_A u||^2` in the grid norm.
    pub fn norm_sqr(&self, u: &[Complex<T>]) -> T {
        self.apply(u).iter().map(|z| z.norm_sqr()).sum::<T>() * self.cell_volume
    }

    /// `sum_k w_k D_k^* D_k` as a dense matrix.
    pub fn weighted_gram(&self, weights: &[Complex<T>]) -> CMatrix<T> {
        let mut m = CMatrix::zeros((self.dof, self.dof));
        for e in &self.edges {
            let w = weights[e.axis];
            let ends = [(e.lo, e.c_lo), (e.hi, e.c_hi)];
            for &(p, cp) in &ends {
                let Some(p) = p else { continue };
                for &(q, cq) in &ends {
                    let Some(q) = q else { continue };
                    m[(p, q)] += w * cp.conj() * cq;
                }
            }
        }
        m
    }
}

/// The form `a_gamma` as a matrix `F` with `<F u, v> = a_gamma(u, v)`, and
/// the multiplier `phi1 = Im V1 / m`.
pub fn assemble_form<T: Real>(
    spec: &OperatorSpec<T>,
    grid: &Grid<T>,
    gamma: T,
) -> Result<(AssembledOperator<T>, AssembledOperator<T>), DiscretizeError> {
    if !(gamma >= T::zero()) {
        return Err(DiscretizeError::Parameter(format!("gamma = {gamma} must be >= 0")));
    }
    let grad = MagneticGradient::new(spec, grid)?;
    let weights: Vec<Complex<T>> = spec.angles().iter().map(|&a| cis(-(a + a))).collect();
    let mut f = grad.weighted_gram(&weights);
    let n = grid.dof();
    let mut phi = CMatrix::zeros((n, n));
    for r in 0..n {
        let x = grid.point(r);
        f[(r, r)] += spec.potential(&x)? + gamma;
        phi[(r, r)] = Complex::from(spec.v1().eval(&x)?.im / spec.weight_m(&x)?);
    }
    let hash = spec.spec_hash();
    Ok((
        AssembledOperator {
            matrix: f,
            grid: grid.clone(),
            spec_hash: hash.clone(),
            kind: OperatorKind::FormAGamma,
        },
        AssembledOperator {
            matrix: phi,
            grid: grid.clone(),
            spec_hash: hash,
            kind: OperatorKind::MultiplierPhi1,
        },
    ))
}

/// Diagonal weight `m(x_j)` on the grid.
pub fn weight_diagonal<T: Real>(spec: &OperatorSpec<T>, grid: &Grid<T>) -> Result<Vec<T>, DiscretizeError> {
    (0..grid.dof()).map(|r| Ok(spec.weight_m(&grid.point(r))?)).collect()
}
