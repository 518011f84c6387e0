//! Entanglement witnesses and PPT tests for four-qubit Bell-diagonal states.
//!
//! States are described by sixteen Bell-basis weights `p_1..p_16`, or
//! equivalently by fifteen diagonal Pauli correlations. The crate builds the
//! density matrices, checks positivity under partial transposition, evaluates
//! a family of linear witnesses and their nonlinear envelope, and tracks the
//! detection threshold of thermal states.

pub mod bell;
pub mod error;
pub mod io;
pub mod pauli;
pub mod ppt;
pub mod sampling;
pub mod thermal;
pub mod witness;

pub use bell::{CorrelationVector, EnergySpectrum, PauliHamiltonianTerms, ProbabilityVector};
pub use error::{Error, Result};
pub use pauli::{HermitianOperator16, PauliLabel, PauliString4};
pub use ppt::{Bipartition, PptReport};
pub use witness::{Sign, WitnessShape, WitnessSpec};
