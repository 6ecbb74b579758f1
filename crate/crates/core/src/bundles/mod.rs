//! Quadric bundles over `P^n`: types, symmetric matrix models, the existence
//! predicate, padded diagonal models built from the coefficient ledger,
//! classification of the parameter space, and a singularity witness search.

mod classify;
mod models;
mod padding;
mod types;
mod unirational;
mod witness;

use thiserror::Error;

use crate::cto::CtoError;
use crate::forms::FormError;
use crate::square_classes::ClassError;

pub use classify::{classify, fibre_dimension_level, thresholds, ClassificationReport, ThresholdFlag};
pub use models::{
    double_cover_branch, family_matrix, from_double_cover, from_singular_hypersurface, matrix_from_branch,
    matrix_from_hypersurface, minor_surface_bundle, reconstruct_hypersurface, HypersurfaceModel, SurfaceMinor,
};
pub use padding::{check_range, family_degrees, family_type_degrees, padded_diagonal, DiagonalModel};
pub use types::{exists_type, random_form, BundleMatrix, BundleType};
pub use unirational::{unirationality_from_ledger, unirationality_precondition, UnirationalCase, UnirationalityRecord};
pub use witness::{singularity_witness_search, SingularityWitness};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BundleError {
    #[error("parity mismatch: {0}")]
    ParityMismatch(String),
    #[error("d_{index} = {degree} is below the required {required}")]
    DegreeShortfall { index: usize, degree: u32, required: u32 },
    #[error("r = {r} is outside 2^(n-1) <= r + 1 < 2^n for n = {n}")]
    RangeError { n: usize, r: usize },
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("degree {0} must be even")]
    ParityViolated(u32),
    #[error("index error: {0}")]
    IndexError(String),
    #[error("malformed bundle: {0}")]
    Shape(String),
    #[error(transparent)]
    Form(#[from] FormError),
    #[error(transparent)]
    Class(#[from] ClassError),
    #[error(transparent)]
    Cto(#[from] CtoError),
}
