use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("invalid dimension {dim}: {reason}")]
    InvalidDimension { dim: usize, reason: &'static str },

    #[error("zero vector cannot be normalized")]
    ZeroVector,

    #[error("state norm {norm} deviates from 1")]
    NotNormalized { norm: f64 },

    #[error("matrix is not unitary (max entry deviation {deviation:e})")]
    NotUnitary { deviation: f64 },

    #[error("undefined phase: Bargmann invariant vanishes (|B| = {modulus:e})")]
    UndefinedPhase { modulus: f64 },

    #[error("undefined component phase at Majorana point {index} (|B| = {modulus:e})")]
    UndefinedComponentPhase { index: usize, modulus: f64 },

    #[error("degenerate geodesic: vertices {first} and {second} are antipodal")]
    DegenerateGeodesic { first: usize, second: usize },

    #[error("projection annihilates state: both overlaps with the projector vanish")]
    ProjectionAnnihilates,

    #[error("fringe undefined: {0}")]
    FringeUndefined(&'static str),

    #[error("size {n} exceeds limit {limit}")]
    TooLarge { n: usize, limit: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("grid too coarse: unresolved phase jump near alpha = {alpha}; increase steps")]
    GridTooCoarse { alpha: f64 },
}

impl Error {
    /// True for requests that are well formed but mathematically undefined
    /// (null Bargmann invariants, antipodal geodesics, unresolvable sweeps).
    pub fn is_undefined(&self) -> bool {
        matches!(
            self,
            Error::UndefinedPhase { .. }
                | Error::UndefinedComponentPhase { .. }
                | Error::DegenerateGeodesic { .. }
                | Error::ProjectionAnnihilates
                | Error::FringeUndefined(_)
                | Error::GridTooCoarse { .. }
        )
    }
}
