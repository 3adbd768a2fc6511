use thiserror::Error;

/// Coarse outcome class, used by front ends to pick exit codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorKind {
    Input,
    Precondition,
    Budget,
    Diagnostic,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid map: {0}")]
    InvalidMap(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("point outside chart: {0}")]
    Chart(String),
    #[error("ambiguous proximality: modulus ratio {ratio} inside band [1, 1+{tol}]")]
    Ambiguous { ratio: f64, tol: f64 },
    #[error("point within {0:e} of the kernel")]
    KernelProximity(f64),
    #[error("body is unbounded along the requested line")]
    Unbounded,
    #[error("not an automorphism: {0}")]
    NotAutomorphism(String),
    #[error("budget exhausted: {0}")]
    Budget(String),
    #[error("flow left representable range at t = {achieved}")]
    Range { achieved: f64 },
    #[error("no affine chart: {0}")]
    NoChart(String),
    #[error("instability: {0}")]
    Instability(String),
    #[error("diagnostic: {0}")]
    Diagnostic(String),
    #[error("unknown catalog entry `{0}`")]
    Lookup(String),
    #[error("malformed input: {0}")]
    Parse(String),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Parse(_) | Error::Lookup(_) => ErrorKind::Input,
            Error::Budget(_) => ErrorKind::Budget,
            Error::NoChart(_) | Error::Instability(_) | Error::Diagnostic(_) => ErrorKind::Diagnostic,
            _ => ErrorKind::Precondition,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
