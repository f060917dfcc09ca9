use alloc::string::String;

/// Failure modes shared across the crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("speed {speed} is not below the speed of light")]
    SpeedLimit { speed: f64 },
    #[error("finite-difference stencil leaves the field domain near {point:?}")]
    StencilOutOfDomain { point: [f64; 4] },
    #[error("identity `{kind}` needs fields the subject does not provide")]
    UnsupportedKind { kind: &'static str },
    #[error("scenario `{label}` does not carry a momentum field")]
    UnsupportedScenario { label: String },
    #[error("radial quadrature did not reach tolerance on [{lo}, {hi}]")]
    QuadratureFailure { lo: f64, hi: f64 },
    #[error("orbit left the velocity field domain at {point:?}")]
    LeftDomain { point: [f64; 4] },
    #[error("loops too close: minimum distance {distance} against segment length {segment}")]
    LoopsTooClose { distance: f64, segment: f64 },
    #[error("no generic projection found after {retries} retries")]
    DegenerateProjection { retries: usize },
    #[error("evaluation point lies within {distance} of the filament")]
    TooCloseToFilament { distance: f64 },
    #[error("ribbon cell ({row}, {column}) has parallel edge vectors")]
    DegenerateCell { row: usize, column: usize },
    #[error("tetrahedron {index} collapsed (relative size {ratio})")]
    DegenerateTet { index: usize, ratio: f64 },
    #[error("parameter {value} outside [{lo}, {hi}]")]
    OutOfRange { value: f64, lo: f64, hi: f64 },
    #[error("invalid loop: {reason}")]
    InvalidLoop { reason: &'static str },
    #[error("invalid grid: {reason}")]
    InvalidGrid { reason: &'static str },
    #[error("invalid parameter: {reason}")]
    InvalidParameter { reason: &'static str },
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
