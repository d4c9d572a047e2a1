use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid conductivity: {0}")]
    InvalidConductivity(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("unsupported dimension {0}")]
    UnsupportedDimension(usize),
    #[error("ordering violation: {0}")]
    Ordering(String),
    #[error("unresolvable thin region: width {width:.3e} < h/2 = {half_h:.3e}")]
    UnresolvableThinRegion { width: f64, half_h: f64 },
    #[error("linear solver did not converge after {iterations} iterations (relative residual {residual:.3e})")]
    SolverDivergence { iterations: usize, residual: f64 },
    #[error("evaluation point ({0}, {1}) lies inside the safety region or too close to an inclusion")]
    PointInsideK(f64, f64),
    #[error("boundary flux {flux:.3e} through component {component} violates the zero-flux hypothesis")]
    NonzeroFlux { component: usize, flux: f64 },
    #[error("fields live on different meshes: {0}")]
    MismatchedMesh(String),
    #[error("no inclusion triangles carry positive measure")]
    ZeroMeasure,
    #[error("rate fit needs positive samples, got ({0}, {1})")]
    NonPositiveSample(f64, f64),
    #[error("rate fit needs at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("inclusion regions overlap: {0}")]
    Overlap(String),
    #[error("singular linear system: {0}")]
    SingularSystem(String),
    #[error("unknown boundary component {0}")]
    UnknownBoundary(usize),
    #[error("unknown {kind} `{name}`; supported: {supported}")]
    UnknownName {
        kind: &'static str,
        name: String,
        supported: String,
    },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("mesh format error at line {line}: {msg}")]
    MeshFormat { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
