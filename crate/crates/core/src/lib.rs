pub mod analyze;
pub mod criterion;
pub mod discretize;
pub mod model;
pub mod output;
pub mod rational;
pub mod scalar;
pub mod spectra;
pub mod verify;

pub use scalar::{ComplexScalar, Real};

pub type OperatorSpec64 = model::OperatorSpec<f64>;
pub type OperatorSpec32 = model::OperatorSpec<f32>;
pub type Grid64 = discretize::Grid<f64>;
pub type AssembledOperator64 = discretize::AssembledOperator<f64>;
pub type SpectrumResult64 = spectra::SpectrumResult<f64>;
pub type DecayFit64 = spectra::DecayFit<f64>;
pub type FieldOfValues64 = spectra::FieldOfValues<f64>;
pub type ExactThreshold = rational::Rational;

/// Caps the worker pool used for field-of-values angles and pseudospectrum
/// nodes. Only the first call has an effect.
pub fn set_threads(n: usize) -> bool {
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().is_ok()
}
