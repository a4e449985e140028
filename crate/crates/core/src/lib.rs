//! Circuit bases of contrast matrices and the randomisation schemes they
//! generate for experimental designs.
//!
//! A design matrix is rewritten in contrast form `[j : X1]`
//! ([`contrast::to_contrast_form`]). The binary nonnegative circuits of `X1^T`
//! ([`circuits::circuit_basis`]) are orthogonal to every contrast, so any
//! partition of the runs into such supports is a valid randomisation system
//! ([`randomisation::enumerate_circuit_randomisations`]). When `X1^T` is
//! totally unimodular ([`unimodular`]) these are all of them.
//!
//! All arithmetic is exact. Set the `parallel` feature (on by default) to
//! spread subset enumeration, exact-cover search, unimodularity checks and
//! simulation replications over a rayon pool; results are identical either way.

pub mod analysis_sim;
pub mod circuits;
pub mod contrast;
pub mod design_catalog;
mod error;
mod exact_cover;
pub mod exact_linalg;
pub mod io;
pub mod par;
pub mod randomisation;
pub mod unimodular;

pub use circuits::{binary_circuits, circuit_basis, nonnegative_circuits, Circuit, CircuitBasis};
pub use analysis_sim::{covariance_comparison, CovarianceOrdering};
pub use contrast::{to_contrast_form, ContrastModel, DesignModel};
pub use error::{Error, Result};
pub use exact_linalg::{IntMatrix, RationalMatrix};
pub use randomisation::{
    enumerate_circuit_randomisations, is_valid_randomisation, EnumerateOptions, RandomisationSystem,
    SchemeCatalog, Shape,
};
pub use unimodular::DirectedGraph;
