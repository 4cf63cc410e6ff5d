//! Exact polynomial operator data: fields, magnetic matrix, weight, hypotheses,
//! growth signatures and the analytic-dilation rewrite.

mod dilation;
mod family;
mod field;
mod growth;
mod hypotheses;
mod json;
mod spec;

pub use dilation::{dilate, optimal_alpha};
pub use family::Family;
pub use field::{eval_field, magnetic_matrix, FactorKind, FieldMatrix, MonomialTerm, ScalarField, VectorField};
pub use growth::{growth_signature, growth_signature_with, GrowthSignature, DEFAULT_KAPPA};
pub use hypotheses::{validate_hypotheses, Eq4Method, HypothesisReport, SampleBox};
pub use json::{FamilyRepr, SpecFile, TermRepr};
pub use spec::{DerivedFields, DomainKind, OperatorSpec};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("term is not differentiable along axis {axis} (exponent {exponent})")]
    NonDifferentiable { axis: usize, exponent: f64 },
    #[error("invalid term: {0}")]
    InvalidTerm(String),
    #[error("non-finite value in {0}")]
    NonFinite(String),
    #[error("dilation angle {alpha} outside the admissible range |alpha| < {limit}")]
    AngleRange { alpha: f64, limit: f64 },
    #[error("parameter out of range: {0}")]
    Parameter(String),
    #[error("invalid operator spec: {0}")]
    InvalidSpec(String),
    #[error("malformed spec file: {0}")]
    Json(String),
}

/// `sqrt(|V1|^2 + |B|^2 + 1)` at `x`.
pub fn weight_m<T: crate::Real>(spec: &OperatorSpec<T>, x: &[T]) -> Result<T, ModelError> {
    spec.weight_m(x)
}
