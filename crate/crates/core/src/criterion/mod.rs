//! Schatten thresholds, numerical-range sectors and completeness verdicts.

mod completeness;
mod probe;
mod quadrature;
mod sector;
mod threshold;
mod xi;

pub use completeness::{
    completeness_verdict, eq49_check, no_dilation_condition, oscillator_completeness_threshold, CompletenessOutcome,
    CompletenessVerdict, MARGIN_TOLERANCE,
};
pub use probe::{schatten_integral_probe, schatten_integral_probe_with, ProbeConfig};
pub use quadrature::{gauss_legendre, integrate_adaptive, integrate_gl};
pub use sector::{analytic_sector, Sector};
pub use threshold::{dilated_threshold, schatten_threshold, ConvergenceClass, PCrit, SchattenMethod, SchattenVerdict};
pub use xi::xi_integral_constant;

use thiserror::Error;

use crate::model::ModelError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CriterionError {
    #[error("xi-integral diverges: p = {p} <= d/2 = {half_d}")]
    DivergentXiIntegral { p: f64, half_d: f64 },
    #[error("growth signature is not valid; use the quadrature probe")]
    SignatureInvalid,
    #[error("growth exponent {0} is not a recognizable rational")]
    IrrationalExponent(f64),
    #[error("no analytic sector for a custom operator; estimate it numerically")]
    NoAnalyticSector,
    #[error("parameter out of range: {0}")]
    Parameter(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}
