use thiserror::Error;

/// Errors raised by the quiver, representation, moduli and network layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("quiver has a directed cycle through vertex `{0}`")]
    CyclicQuiver(String),
    #[error("arrow `{arrow}` refers to undeclared vertex `{vertex}`")]
    DanglingArrow { arrow: String, vertex: String },
    #[error("duplicate arrow id `{0}`")]
    DuplicateArrowId(String),
    #[error("duplicate vertex id `{0}`")]
    DuplicateVertex(String),
    #[error("network quiver has multiple arrows from `{from}` to `{to}`")]
    MultipleArrows { from: String, to: String },
    #[error("network quiver is not connected")]
    DisconnectedNetwork,
    #[error("vertex `{vertex}` cannot carry role `{role}`")]
    InvalidRole { vertex: String, role: String },
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("unknown arrow `{0}`")]
    UnknownArrow(String),
    #[error("vertex `{0}` is not hidden")]
    NotHidden(String),
    #[error("dimension vector must be positive on source/sink `{0}`")]
    ZeroFramedDimension(String),
    #[error("shape mismatch for {what}: expected {expected:?}, found {found:?}")]
    ShapeMismatch {
        what: String,
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("representations live on different quivers")]
    QuiverMismatch,
    #[error("gauge block at `{0}` is numerically singular")]
    SingularGauge(String),
    #[error("path enumeration exceeds the cap of {cap} paths")]
    PathExplosion { cap: usize },
    #[error("subspace at `{vertex}` has codimension {found}, expected {expected}")]
    CodimensionMismatch {
        vertex: String,
        expected: usize,
        found: usize,
    },
    #[error("representation is not thin at vertex `{0}`")]
    NotThin(String),
    #[error("input has length {found}, network expects {expected}")]
    InputLength { expected: usize, found: usize },
    #[error("label has length {found}, network has {expected} outputs")]
    LabelLength { expected: usize, found: usize },
    #[error("pre-activation vanishes at vertex `{0}`; knowledge map undefined")]
    SingularPreActivation(String),
    #[error("input value at `{0}` cannot be recovered from the knowledge representation")]
    UnrecoverableInput(String),
    #[error("training diverged at epoch {epoch} (loss {loss:e})")]
    DivergenceDetected { epoch: usize, loss: f64 },
    #[error("balancing did not converge after {iterations} sweeps (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// True for failures of a numerical procedure, as opposed to malformed input.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::SingularGauge(_)
                | Error::PathExplosion { .. }
                | Error::SingularPreActivation(_)
                | Error::UnrecoverableInput(_)
                | Error::DivergenceDetected { .. }
                | Error::NoConvergence { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
