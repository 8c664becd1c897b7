use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("undefined separation: need at least 2 points, got {0}")]
    UndefinedSeparation(usize),
    #[error("point {x} lies outside the truncation window of radius {radius}")]
    OutsideTruncation { x: f64, radius: f64 },
    #[error("points are not strictly increasing and separated at index {0}")]
    NotSeparated(usize),
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("perturbation too large: delta = {delta} must be below {limit}")]
    PerturbationTooLarge { delta: f64, limit: f64 },
    #[error("lattice too coarse: alpha = {alpha} must not exceed {limit}")]
    LatticeTooCoarse { alpha: f64, limit: f64 },
    #[error("set contains 0; translate it first")]
    ContainsZero,
    #[error("set is not a subset of a lattice")]
    NotLatticeSubset,
    #[error("set is not a full lattice alpha*Z")]
    NotFullLattice,
    #[error("gap {gap} exceeds lattice bound {bound}")]
    GapExceedsLatticeBound { gap: f64, bound: f64 },
    #[error("grid step {step} exceeds anti-aliasing bound {max}")]
    StepTooLarge { step: f64, max: f64 },
    #[error("cauchy transform needs a point off the real axis, got {0}")]
    RealPoint(f64),
    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("duplicate support point {0}")]
    DuplicateSupport(f64),
    #[error("orthogonality residual {residual:e} at gamma = {gamma} exceeds tolerance")]
    OrthogonalityResidual { gamma: i64, residual: f64 },
    #[error("trivial (zero) measure rejected")]
    TrivialMeasure,
    #[error("gap certificate failed: {0}")]
    GapCertificateFailed(String),
    #[error("point {0} already belongs to the set")]
    PointAlreadyPresent(f64),
    #[error("interlacing violated at index {index}: {reason}")]
    Interlacing { index: usize, reason: String },
    #[error("evaluation at a pole {0}")]
    Pole(f64),
    #[error("coefficient decay exponent {0} is below 2")]
    DecayPrecondition(f64),
    #[error("anchor {0} collides with a support point or the other anchor")]
    AnchorCollision(f64),
    #[error("support point {0} is not in the base set")]
    SupportMismatch(f64),
    #[error("internal consistency check failed: {0}")]
    InternalConsistency(String),
}

pub(crate) fn invalid(name: &'static str, reason: &str) -> Error {
    Error::InvalidParameter { name, reason: String::from(reason) }
}
