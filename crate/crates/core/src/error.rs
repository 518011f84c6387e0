use thiserror::Error;

/// Errors raised by the numerical layer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian: max |M - M^dagger| entry is {max_asymmetry:e}")]
    NonHermitian { max_asymmetry: f64 },

    #[error("invalid probability vector: {0}")]
    InvalidProbabilities(String),

    #[error("{what} index {index} out of range {min}..={max}")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        min: usize,
        max: usize,
    },

    #[error("temperature must be positive, got {0}")]
    NonPositiveTemperature(f64),

    #[error("energy E{index} is not finite ({value})")]
    NonFiniteEnergy { index: usize, value: f64 },

    #[error("Hamiltonian is not diagonal in the Bell basis: <psi_{i}|H|psi_{j}> = {magnitude:e}")]
    NotBellDiagonal { i: usize, j: usize, magnitude: f64 },

    #[error("bipartition must be a nonempty proper subset of the four qubits")]
    InvalidBipartition,

    #[error("witness amplitudes violate A0 = B0 = sqrt(h1^2+h4^2) + sqrt(h2^2+h3^2) (residual {residual:e})")]
    AmplitudeNormalization { residual: f64 },

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("p1 = {0} lies outside both envelope branch intervals")]
    OutsideBranchIntervals(f64),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
