//! Dense eigenvalues, singular values, decay fits, numerical ranges,
//! pseudospectra and the matrix-level inequality checks.

mod decay;
mod eig;
mod inequalities;
mod lapack;
mod numrange;
mod pseudo;
mod svd;

pub use decay::{decay_fit, decay_fit_window, default_window, DecayFit, SLOPE_TOLERANCE};
pub use eig::{eigenvalues, eigenvalues_matrix, mark_converged, SpectrumResult};
pub use inequalities::{
    coercivity_check, coercivity_matrices, eigen_comparison, laxmilgram_bound_check, CoercivityInput, CoercivityResult,
    EigenComparison, LaxMilgramCheck,
};
pub use lapack::{LapackFailure, LinalgReal};
pub use numrange::{field_of_values_boundary, field_of_values_matrix, FieldOfValues};
pub use pseudo::{pseudospectrum, pseudospectrum_matrix, PseudospectrumGrid, Rectangle, MAX_PSEUDO_NODES};
pub use svd::{operator_singular_values, resolvent_singular_values, resolvent_singular_values_matrix, singular_values};

use num_complex::Complex;
use thiserror::Error;

use crate::discretize::DiscretizeError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectraError {
    #[error("{routine} did not converge (info = {info}); {} eigenvalues recovered", partial.len())]
    EigNoConverge {
        routine: &'static str,
        info: i32,
        partial: Vec<Complex<f64>>,
    },
    #[error("{routine} failed with info = {info}")]
    Linalg { routine: &'static str, info: i32 },
    #[error("shift is within {sigma_min:e} of the spectrum (threshold {threshold:e})")]
    SingularShift { sigma_min: f64, threshold: f64 },
    #[error("fit window is empty: {0}")]
    Window(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("parameter out of range: {0}")]
    Parameter(String),
    #[error(transparent)]
    Discretize(#[from] DiscretizeError),
}

impl<T: LinalgReal> From<LapackFailure<T>> for SpectraError {
    fn from(f: LapackFailure<T>) -> Self {
        if f.routine.ends_with("hseqr_") && f.info > 0 {
            SpectraError::EigNoConverge {
                routine: f.routine,
                info: f.info,
                partial: f
                    .partial
                    .iter()
                    .map(|z| Complex::new(z.re.to_f64_lossy(), z.im.to_f64_lossy()))
                    .collect(),
            }
        } else {
            SpectraError::Linalg {
                routine: f.routine,
                info: f.info,
            }
        }
    }
}

use crate::discretize::CMatrix;
use crate::scalar::Real;

/// Row-major contiguous copy of a matrix.
pub(crate) fn to_buffer<T: Real>(m: &CMatrix<T>) -> Vec<Complex<T>> {
    m.iter().copied().collect()
}

/// Is the matrix zero outside the first sub- and superdiagonal?
pub(crate) fn is_tridiagonal<T: Real>(m: &CMatrix<T>) -> bool {
    let n = m.nrows();
    let z = T::zero();
    for i in 0..n {
        for j in 0..n {
            if i.abs_diff(j) > 1 && (m[(i, j)].re != z || m[(i, j)].im != z) {
                return false;
            }
        }
    }
    true
}
