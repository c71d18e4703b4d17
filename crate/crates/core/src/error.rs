use thiserror::Error;

/// Errors raised across the workbench.
///
/// Every variant maps to a stable process exit code (see [`Error::exit_code`]),
/// which the command-line driver relies on.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("group law violated: {law} at {indices:?}")]
    GroupLaw { law: &'static str, indices: Vec<i64> },

    #[error("malformed input: {0}")]
    Parse(String),

    #[error("backend mismatch: {0}")]
    BackendMismatch(String),

    #[error("subgroup classification inconclusive within search bound {bound}")]
    Inconclusive { bound: usize },

    #[error("ball would exceed vertex cap {cap} ({reached} vertices by radius {radius})")]
    CapExceeded { cap: usize, reached: usize, radius: u32 },

    #[error("vertex is not inside the ball")]
    NotInBall,

    #[error("geodesics may leave the ball (distance {distance}, radius {radius})")]
    BoundaryRisk { distance: u32, radius: u32 },

    #[error("no escape within probe radius {probe_radius} for n = {n}; group looks virtually cyclic")]
    NoEscape { n: u32, probe_radius: u32 },

    #[error("stabilizer does not commute with the normal Z subgroup: {0}")]
    NotCommuting(String),

    #[error("stabilizer list is not a subgroup: {0}")]
    NotSubgroup(String),

    #[error("stabilizer meets Z x {{e}} nontrivially at ({0}, e)")]
    InfiniteStabilizer(i64),

    #[error("piecewise map is not a bijection: {reason} (witness k = {k}, line {line})")]
    NotBijective { reason: String, k: i64, line: usize },

    #[error("cocycle precondition failed: {0}")]
    PreconditionFailed(String),

    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),

    #[error("ball radius {radius} too small, need at least {needed}")]
    BallTooSmall { radius: u32, needed: u32 },

    #[error("placement conflict at vertex {0}")]
    PlacementConflict(u32),

    #[error("no interior centers for radius {radius} in a ball of radius {ball_radius}")]
    NoInteriorCenters { radius: u32, ball_radius: u32 },

    #[error("window too small at vertex {vertex}: unseen edges needed")]
    InsufficientWindow { vertex: u32 },

    #[error("no marked copy of word {0}")]
    NoMarkedCopy(String),

    #[error("pattern of radius {radius} around vertex {vertex} is clipped by the boundary")]
    BoundaryClipped { vertex: u32, radius: u32 },

    #[error("walk window too small: need {needed}, have {have}")]
    WindowTooSmall { needed: u32, have: u32 },

    #[error("io: {0}")]
    Io(String),
}

impl Error {
    /// Stable exit code per error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::GroupLaw { .. } | Error::Parse(_) | Error::BackendMismatch(_) => 3,
            Error::CapExceeded { .. } => 4,
            Error::NoEscape { .. } => 5,
            Error::NotBijective { .. } => 6,
            Error::NotCommuting(_)
            | Error::NotSubgroup(_)
            | Error::InfiniteStabilizer(_)
            | Error::PreconditionFailed(_) => 7,
            Error::NoMarkedCopy(_) => 8,
            Error::InsufficientWindow { .. } | Error::WindowTooSmall { .. } => 9,
            Error::Inconclusive { .. } => 11,
            Error::BallTooSmall { .. }
            | Error::NoInteriorCenters { .. }
            | Error::BoundaryClipped { .. }
            | Error::BoundaryRisk { .. }
            | Error::NotInBall => 12,
            Error::Io(_) => 13,
            Error::InternalInconsistency(_) | Error::PlacementConflict(_) => 70,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
