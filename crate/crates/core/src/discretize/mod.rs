//! Dense finite-difference matrices on truncated boxes with Dirichlet faces.

mod assemble;
mod export;
mod grid;

pub use assemble::{
    assemble_form, assemble_p, assemble_selfadjoint, frobenius, hermitian_defect, weight_diagonal, AssembledOperator,
    CMatrix, Edge, MagneticGradient, OperatorKind, SelfadjointVariant,
};
pub use export::{read_secm, write_diagonal_csv, write_secm};
pub use grid::{make_grid, make_grid_anisotropic, Axis, Grid, MAX_DOF, MIN_POINTS};

use thiserror::Error;

use crate::model::ModelError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiscretizeError {
    #[error("grid has {dof} unknowns, above the dense budget of {max}")]
    Budget { dof: usize, max: usize },
    #[error("parameter out of range: {0}")]
    Parameter(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}
