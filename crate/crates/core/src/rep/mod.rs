//! The pivotal category of finite-dimensional modules over a solved Hopf algebra.

mod duality;
mod hom;
mod module;
mod morphism;
mod present;

pub use duality::{
    copairing_matrix, ev_coev, pairing_matrix, pivotal_coev_matrix, pivotal_coev_right, pivotal_ev_matrix,
    pivotal_ev_right, pivotal_iso, Side,
};
pub use hom::{hom_space, hom_space_dense, invariants, coinvariants};
pub use module::{
    alpha, direct_sum, dual_left, dual_left_key, dual_right, parse_rows, regular, tensor, tensor_all, tensor_key, trivial,
    Construction,
    HModule, Module, ModuleFile,
};
pub use morphism::Morphism;
pub use present::Presentation;

use thiserror::Error;

use crate::hopf::HopfError;
use crate::scalars::ScalarError;

#[derive(Debug, Error)]
pub enum RepError {
    #[error("modules live over different algebras")]
    AlgebraMismatch,
    #[error("map does not intertwine the actions: {0}")]
    Intertwiner(String),
    #[error("invalid module: {0}")]
    InvalidModule(String),
    #[error("{0} is not projective")]
    NotProjective(String),
    #[error("bad retract presentation: {0}")]
    Presentation(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error(transparent)]
    Hopf(#[from] HopfError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

#[cfg(test)]
pub(crate) mod tests;
