use thiserror::Error;

/// Errors raised by the spectral and bracket computations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("poles {0} and {1} coincide within tolerance")]
    DistinctPolesViolated(usize, usize),
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("evaluation point lies within {distance:e} of pole {index}")]
    PoleProximity { index: usize, distance: f64 },
    #[error("bracket evaluation points coincide")]
    CoincidentPoints,
    #[error("bracket requires a vanishing constant term, found {0}")]
    NonzeroConstTerm(f64),
    #[error("residue of pole {0} vanishes")]
    ZeroResidue(usize),
    #[error("invalid bracket spec: {0}")]
    InvalidSpec(&'static str),
    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("constraint Phi1 is undefined for f(z) = 1 (divergent integral)")]
    Phi1Undefined,
    #[error("mass {0} is not positive")]
    MassPositivity(usize),
    #[error("positions must be strictly increasing (index {0})")]
    Ordering(usize),
    #[error("string spectral problem degenerated")]
    DegenerateString,
    #[error("polynomial root finder did not converge")]
    RootFindingFailure,
    #[error("peakons {0} and {1} collided")]
    CollisionDetected(usize, usize),
    #[error("time step must be positive and finite")]
    StepSize,
    #[error("spectrum is degenerate (gap {0:e})")]
    DegenerateSpectrum(f64),
    #[error("spectral point is within tolerance of a branch point (|delta^2 - 1| = {0:e})")]
    BranchProximity(f64),
    #[error("monodromy integration under-resolved (relative change {0:e})")]
    StepResolution(f64),
    #[error("potential is not real-valued (imaginary part {0:e})")]
    NonRealPotential(f64),
}

pub type Result<T> = core::result::Result<T, Error>;
