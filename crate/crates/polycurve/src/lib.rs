//! Polyharmonic curves into constant-curvature targets.
//!
//! Curves are sampled uniformly in their parameter, differentiated with
//! projected central differences and assembled into the k-tension fields,
//! k-energies and Jacobi operators of the k-energy functional.

pub mod curve;
pub mod energy;
pub mod error;
pub mod exec;
pub mod ktension;
pub mod product;
pub mod samples;
pub mod spaceform;
pub mod variation;

pub use curve::{DerivativeStack, DiscreteCurve, TangentField};
pub use error::{Error, Result};
pub use exec::Execution;
pub use ktension::{KTensionResult, TensionPath};
pub use spaceform::SpaceForm;
