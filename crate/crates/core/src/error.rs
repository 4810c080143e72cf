//! Error type shared by every module.
//!
//! Variants carry plain `f64` diagnostics so the error type stays
//! non-generic; the scalar is converted at the failure site.

/// Failure modes of the numerical operations.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// A constructor or operation precondition was violated.
    #[error("invalid {what}: {why}")]
    InvalidInput { what: &'static str, why: String },

    /// A sample position fell outside the grid domain.
    #[error("position {value} lies outside the grid [{lo}, {hi}]")]
    OutOfDomain { value: f64, lo: f64, hi: f64 },

    /// Two objects that must share a grid do not.
    #[error("operands live on different grids")]
    GridMismatch,

    /// The partition integral failed to produce a finite positive value.
    #[error("partition integral is not finite and positive (potential grows too slowly)")]
    NormalizationFailure,

    /// KL divergence asked for mass where the reference has none.
    #[error("support mismatch: density carries mass near x = {position} where the reference is zero")]
    SupportMismatch { position: f64 },

    /// A metric computation would divide by a vanishing density.
    #[error("degenerate density near x = {position}: tangent flux crosses a region below floor")]
    DegenerateDensity { position: f64 },

    /// Too few snapshots for a finite-difference evaluation.
    #[error("need at least {needed} snapshots, got {got}")]
    InsufficientData { needed: usize, got: usize },

    /// Inner optimization hit its iteration cap before the tolerance.
    #[error("minimization did not converge within {iterations} iterations; last objective {last_objective}")]
    Convergence { iterations: usize, last_objective: f64 },

    /// Requested time step exceeds the stability bound.
    #[error("dt = {dt} exceeds the admissible bound {bound}")]
    CflViolation { dt: f64, bound: f64 },

    /// Characteristics cross inside the requested horizon.
    #[error("characteristics cross at t = {time}; field is single-valued only before that")]
    ShockEncountered { time: f64 },

    /// A schedule with the wrong pattern reached a simulator.
    #[error("schedule pattern {got} is not accepted here: {why}")]
    WrongPattern { got: &'static str, why: &'static str },

    /// Schedule parameters outside their admissible range.
    #[error("invalid schedule: {why}")]
    InvalidSchedule { why: String },

    /// Score evaluation in a region where the density is below floor.
    #[error("density below floor at x = {position}{}", match .particle { Some(p) => format!(" (particle {p})"), None => String::new() })]
    LowDensity { position: f64, particle: Option<usize> },

    /// A map that must be nondecreasing decreases.
    #[error("map decreases near x = {position}")]
    NotMonotone { position: f64 },

    /// Target density too concentrated for quantile inversion.
    #[error("target density is point-mass-like; quantile map is not invertible")]
    DegenerateTarget,

    /// Convex conjugate has no finite supremum at the requested slope.
    #[error("conjugate is unbounded at slope {slope} within the search bounds")]
    UnboundedConjugate { slope: f64 },

    /// An action integral was requested on a trajectory without velocities.
    #[error("trajectory carries no velocity data; action integral needs it")]
    MissingVelocities,

    /// File could not be read, written, or parsed.
    #[error("i/o failure on {path}: {why}")]
    Io { path: String, why: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for errors caused by bad configuration rather than by the
    /// numerics encountered at runtime. The command-line tool maps the two
    /// classes to different exit codes.
    pub fn is_configuration(&self) -> bool {
        matches!(
            self,
            Error::InvalidInput { .. }
                | Error::InvalidSchedule { .. }
                | Error::GridMismatch
                | Error::Io { .. }
                | Error::WrongPattern { .. }
                | Error::InsufficientData { .. }
        )
    }
}
