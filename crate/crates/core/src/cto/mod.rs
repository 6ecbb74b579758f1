//! Construction and verification of the quadric arrangement behind the
//! Pfister neighbours `<<a_1, ..., a_{n-1}, b_1 b_2>>`.
//!
//! [`ArrangementConfig::generate`] samples the arrangement, [`build_ledger`]
//! produces the four coefficient families, and [`verify_cto`] checks the
//! codimension, symbol and key-property conditions and emits a
//! [`CtoCertificate`].

mod certificate;
mod checks;
mod config;
mod ledger;

use thiserror::Error;

use crate::cohomology::CohError;
use crate::forms::FormError;
use crate::square_classes::ClassError;

pub use certificate::{config_hash, pfister_entries, verify_cto, CtoCertificate, CtoVerdict, PfisterEntries};
pub use checks::{
    check_codim, check_key_property, check_symbol_nonzero, CheckStatus, CodimCheck, CodimWitness, FlipIdentity,
    KeyPropertyCheck, SymbolCheck,
};
pub use config::{eps_bit, ArrangementConfig, IndexMap, DEFAULT_MAX_RESAMPLE, SCHEMA};
pub use ledger::{build_ledger, ArrangementFactors, CoefficientLedger, Family};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CtoError {
    #[error("n must be at least 2, got {0}")]
    InvalidN(usize),
    #[error("no general arrangement found in {attempts} attempts")]
    ResampleExhausted { attempts: usize },
    #[error("malformed arrangement: {0}")]
    Shape(String),
    #[error("operation needs the linear forms of the arrangement")]
    NeedsLines,
    #[error("invalid index map: {0}")]
    InvalidIndexMap(String),
    #[error("unsupported schema {0:?}")]
    Schema(String),
    #[error(transparent)]
    Form(#[from] FormError),
    #[error(transparent)]
    Class(#[from] ClassError),
    #[error(transparent)]
    Coh(#[from] CohError),
}
