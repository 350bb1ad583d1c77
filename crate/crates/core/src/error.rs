use crate::solver::ClassifiedSpectrum;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix {which} is not Hermitian: asymmetry {asymmetry:.3e} exceeds {tolerance:.3e}")]
    NotHermitian {
        which: &'static str,
        asymmetry: f64,
        tolerance: f64,
    },

    #[error("congruence transform is numerically singular (condition estimate {condition:.3e})")]
    SingularTransform { condition: f64 },

    #[error("invalid test-pencil spec: {0}")]
    SpecInvalid(String),

    #[error("generalized eigensolver failed: {0}")]
    BackendFailure(String),

    #[error("pencil looks singular: {0}")]
    SuspectSingular(String),

    #[error("invalid prescribed eigenvalues: {0}")]
    BadPrescribed(String),

    #[error("invalid perturbation parameter tau = {0}")]
    BadTau(f64),

    #[error("invalid rank deficiency k = {k} for n = {n}: {reason}")]
    BadK { k: usize, n: usize, reason: String },

    #[error("odd number of random eigenvalues ({n_random}); wrong k or unlucky draw")]
    OddRandomCount {
        n_random: usize,
        spectrum: Box<ClassifiedSpectrum>,
    },

    #[error("classification threshold {class_tol:.3e} is ambiguous: a residual lies within a factor {ratio:.2} of it")]
    ThresholdAmbiguous {
        class_tol: f64,
        ratio: f64,
        spectrum: Box<ClassifiedSpectrum>,
    },

    #[error("eigenvalue {eigenvalue} does not look semisimple (inertia eigenvalue {smallest:.3e})")]
    NotSemisimple { eigenvalue: String, smallest: f64 },

    #[error("empty eigenvalue group")]
    EmptyGroup,

    #[error("structure violation: {0}")]
    StructureViolation(String),

    #[error("polynomial degree {0} is not supported (maximum 3)")]
    DegreeTooHigh(usize),

    #[error("polynomial has no nonzero coefficient")]
    ZeroPolynomial,

    #[error("root pairing is ambiguous near lambda = {lambda}")]
    PairingAmbiguous { lambda: String },

    #[error("no finite roots found")]
    NoFiniteRoots,

    #[error("invalid eigenvalue: {0}")]
    InvalidEigenvalue(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Soft errors carry a complete result that can still be reported.
    pub fn spectrum(&self) -> Option<&ClassifiedSpectrum> {
        match self {
            Error::OddRandomCount { spectrum, .. } | Error::ThresholdAmbiguous { spectrum, .. } => {
                Some(spectrum)
            }
            _ => None,
        }
    }
}
