use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("duplicate Fourier level k = {0}")]
    DuplicateLevel(usize),

    #[error("Fourier level k = {0} is outside 1..=K")]
    LevelOutOfRange(usize),

    #[error("cannot normalize the zero potential")]
    ZeroPotential,

    #[error("x = {0} lies outside [0, π]")]
    OutOfDomain(f64),

    #[error("companion truncation {k_comp} is below the potential order {order}")]
    TruncationTooSmall { k_comp: usize, order: usize },

    #[error("z = {0} is a pole of the secular function")]
    Pole(f64),

    #[error("degenerate operator: {0}")]
    Degenerate(String),

    #[error("malformed spectrum: {0}")]
    MalformedSpectrum(String),

    #[error("inconsistent spectra: {0}")]
    Inconsistent(String),

    #[error("z = {0} is not an eigenvalue of the operator")]
    NotInSpectrum(f64),

    #[error("Jacobi eigensolver did not converge after {0} sweeps")]
    NoConvergence(usize),

    #[error("spectral data rejected: {0}")]
    Rejected(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Short machine-readable kind, used by the CLI error record.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DuplicateLevel(_) => "duplicate_level",
            Error::LevelOutOfRange(_) => "level_out_of_range",
            Error::ZeroPotential => "zero_potential",
            Error::OutOfDomain(_) => "out_of_domain",
            Error::TruncationTooSmall { .. } => "truncation_too_small",
            Error::Pole(_) => "pole",
            Error::Degenerate(_) => "degenerate",
            Error::MalformedSpectrum(_) => "malformed_spectrum",
            Error::Inconsistent(_) => "inconsistent_spectra",
            Error::NotInSpectrum(_) => "not_in_spectrum",
            Error::NoConvergence(_) => "no_convergence",
            Error::Rejected(_) => "rejected",
            Error::InvalidInput(_) => "invalid_input",
            Error::Io(_) => "io",
            Error::Json(_) => "schema",
        }
    }
}
