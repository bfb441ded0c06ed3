use thiserror::Error;

/// Failures raised by geometric and variational operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("cannot project a zero vector onto a sphere")]
    ZeroVector,
    #[error("tangent field belongs to curve snapshot {field}, not {curve}")]
    FieldCurveMismatch { field: u64, curve: u64 },
    #[error("operation requires a closed curve")]
    OpenCurveUnsupported,
    #[error("curve is degenerate (total length {0:e})")]
    DegenerateCurve(f64),
    #[error("stencil too coarse: N = {n}, need at least {required}")]
    StencilTooCoarse { n: usize, required: usize },
    #[error("target is not a space form")]
    NotASpaceForm,
    #[error("target is not a sphere")]
    NotASphere,
    #[error("target is not the unit sphere")]
    NotUnitSphere,
    #[error("target has intrinsic dimension {0}, need 2")]
    WrongDimension(usize),
    #[error("order k = {0} unsupported: need {1} ≤ k ≤ {2}")]
    InvalidOrder(usize, usize, usize),
    #[error("step {0:e} below the underflow threshold")]
    StepUnderflow(f64),
    #[error("target curvature is not parallel")]
    NotParallelCurvature,
    #[error("factor curves live on different domains")]
    DomainMismatch,
    #[error("domain circle length {circle} differs from parameter length {param}")]
    LengthMismatch { circle: f64, param: f64 },
    #[error("curve is not harmonic (|tau| = {0:e})")]
    NotHarmonic(f64),
    #[error("point {index} is off the target (defect {defect:e})")]
    OffManifold { index: usize, defect: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
