use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid grid bounds: x_max ({x_max}) must exceed x_min ({x_min})")]
    InvalidBounds { x_min: f64, x_max: f64 },

    #[error("grid needs at least 8 points, got {0}")]
    TooFewPoints(usize),

    #[error("field length {got} does not match grid size {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("non-finite value in {what} at index {index}")]
    NonFinite { what: &'static str, index: usize },

    #[error("invalid units: hbar and mass must be finite and positive (hbar={hbar}, mass={mass})")]
    InvalidUnits { hbar: f64, mass: f64 },

    #[error("time {t} is outside the action domain t > t0 = {t0}")]
    TimeDomain { t: f64, t0: f64 },

    #[error("potential is singular at reduced coordinate {s}")]
    Singularity { s: f64 },

    #[error("{0} is a distribution, not a sampled function; use the jump-condition path")]
    NotAFunction(&'static str),

    #[error("{0} has no closed-form amplitude for these parameters; use the ODE path")]
    NoClosedForm(&'static str),

    #[error("argument {arg} outside the domain of {function}")]
    Domain { function: &'static str, arg: f64 },

    #[error("invalid parameter `{name}` for {family}: {reason}")]
    InvalidParameter {
        family: &'static str,
        name: String,
        reason: &'static str,
    },

    #[error("action variant mismatch: {family} requires a {expected} action")]
    VariantMismatch {
        family: &'static str,
        expected: &'static str,
    },

    #[error("reduced coordinate {s} outside the sampled amplitude range [{lo}, {hi}]")]
    Range { s: f64, lo: f64, hi: f64 },

    #[error("adaptive integration failed at s = {s}: {reason}")]
    StepFailure { s: f64, reason: &'static str },

    #[error("amplitude below floor at {excluded} of {total} points")]
    AllNodes { excluded: usize, total: usize },

    #[error("state and potential belong to different action variants")]
    FamilyMismatch,

    #[error("only {kept} of {total} shifted points stay on the grid")]
    Interpolation { kept: usize, total: usize },

    #[error("residuals do not decrease under refinement: {0:?}")]
    NonMonotone(Vec<f64>),

    #[error("invalid refinement sequence: {0}")]
    Refinement(&'static str),

    #[error("precondition violated: {0}")]
    Precondition(&'static str),

    #[error("wavefunction reached the wall at t = {t} (|psi| / peak = {ratio:e})")]
    WallContamination { t: f64, ratio: f64 },

    #[error("singular tridiagonal system at row {0}")]
    SingularSolve(usize),

    #[error("invalid calibration fixture: {0}")]
    Calibration(String),
}
