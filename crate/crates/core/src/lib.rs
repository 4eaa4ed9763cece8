//! Reconstruction of binary strings from their composition multisets, and
//! codes that survive whole-class deletions, insertions and skewed
//! substitutions of that multiset.

pub mod bits;
pub mod channel;
pub mod codebook;
pub mod composition;
pub mod error;
pub mod oracle;
pub mod reconstruct;

pub use bits::BitString;
pub use channel::{ErrorModel, ErrorSpec, Target, Targets};
pub use codebook::{CodebookSpec, Family};
pub use composition::{
    bivariate_poly, complement, composition_of, cumulative_weight, full_readout, length_class,
    sigma_from_weights, sigma_of_string, ClassAnomaly, Composition, LengthClass, PolyTerm,
    Readout, SigmaSequence,
};
pub use error::{Error, Result};
