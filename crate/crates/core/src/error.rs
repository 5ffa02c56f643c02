use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("unsupported element type {kind} at line {line}")]
    UnsupportedElement { kind: i64, line: usize },
    #[error("index error: {0}")]
    Index(String),
    #[error("degenerate element {0}")]
    DegenerateElement(usize),
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("unsupported quadrature degree {0}")]
    UnsupportedDegree(usize),
    #[error("state left the invariant domain: {0}")]
    DomainViolation(String),
    #[error("time step {dt} exceeds the admissible bound {cap}")]
    StepTooLarge { dt: f64, cap: f64 },
    #[error("non-finite wave speed in element {0}")]
    NonFiniteWaveSpeed(usize),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("aborted at step {step} (t = {t})")]
    Aborted {
        step: usize,
        t: f64,
        #[source]
        source: Box<Error>,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Whether the error comes from the numerical evolution rather than
    /// from the input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Aborted { .. }
                | Error::InvalidState(_)
                | Error::DomainViolation(_)
                | Error::StepTooLarge { .. }
                | Error::NonFiniteWaveSpeed(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
