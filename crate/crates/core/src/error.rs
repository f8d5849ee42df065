use thiserror::Error;

/// Errors shared across the mesh, solver, radial and bounds modules.
#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate polygon: {0}")]
    DegeneratePolygon(String),

    #[error("target_h {target_h} is larger than the domain diameter {diameter}")]
    TargetHTooLarge { target_h: f64, diameter: f64 },

    #[error("invalid domain parameter: {0}")]
    InvalidDomain(String),

    #[error("mesh parse error at line {line}: {msg}")]
    MeshParse { line: usize, msg: String },

    #[error("dangling vertex index {index} at line {line}")]
    DanglingIndex { line: usize, index: usize },

    #[error("open boundary loop")]
    OpenBoundaryLoop,

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("exponent p={0} outside supported range [1.1, 10]")]
    ExponentRange(f64),

    #[error("exponent q={0} must be at least {1}")]
    ExponentTooSmall(f64, f64),

    #[error("invalid exponent order: need 0 < q < r, got q={q}, r={r}")]
    ExponentOrder { q: f64, r: f64 },

    #[error("field is identically zero")]
    ZeroField,

    #[error("field length {got} does not match vertex count {expected}")]
    FieldLength { got: usize, expected: usize },

    #[error("field contains a non-finite value at vertex {0}")]
    NonFiniteField(usize),

    #[error("zero source")]
    ZeroSource,

    #[error("source has a negative nodal value at vertex {0}")]
    NegativeSource(usize),

    #[error("solver failed to converge after {iterations} iterations (residual {residual:.3e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("discrete Robin form is indefinite or unbounded below for beta={beta}")]
    IndefiniteForm { beta: f64 },

    #[error("shooting bracket failure: {0}")]
    BracketFailure(String),

    #[error("empty source family")]
    EmptyFamily,

    #[error("missing prerequisite: {0}")]
    MissingPrerequisite(String),

    #[error("invalid solver options: {0}")]
    InvalidOptions(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
