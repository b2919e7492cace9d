use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max |M_ij - conj(M_ji)| = {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("trace is {trace}, expected 1")]
    TraceMismatch { trace: f64 },

    #[error("matrix has eigenvalue {min_eigenvalue:.3e} below the PSD tolerance")]
    NegativeEigenvalue { min_eigenvalue: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:.3e})")]
    NotConverged { sweeps: usize, off_norm: f64 },

    #[error("parameter `{field}` = {value} outside {range}")]
    ParameterOutOfRange {
        field: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("invalid dimension {0}: must be at least 2")]
    InvalidDimension(usize),

    #[error("invalid observable values: {0}")]
    InvalidObservableValues(String),

    #[error("imaginary residue {residue:.3e} exceeds tolerance in {context}")]
    ImaginaryResidue { residue: f64, context: &'static str },

    #[error("correlator value {value} outside the attainable range [{min}, {max}] for {context}")]
    OutOfDomain {
        value: f64,
        min: f64,
        max: f64,
        context: String,
    },

    #[error("forward map is not strictly monotone on [{lo}, {hi}] ({context})")]
    NotMonotone { lo: f64, hi: f64, context: String },

    #[error("bisection bracket [{lo}, {hi}] does not enclose the target {target}")]
    BracketFailure { lo: f64, hi: f64, target: f64 },

    #[error("invalid state descriptor: {0}")]
    InvalidState(String),

    #[error("unsupported combination: {0}")]
    Unsupported(String),

    #[error("undefined correlator: {0}")]
    Undefined(String),
}

impl Error {
    /// True for errors caused by a correlator value the family cannot produce.
    pub fn is_domain_error(&self) -> bool {
        matches!(
            self,
            Error::OutOfDomain { .. } | Error::BracketFailure { .. } | Error::NotMonotone { .. }
        )
    }
}
