use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),

    #[error("malformed word `{word}`: {reason}")]
    MalformedWord { word: String, reason: String },

    #[error("invalid group spec: {0}")]
    InvalidSpec(String),

    #[error("presentation is not C'(1/6): max piece ratio {ratio:.4} (piece `{piece}`)")]
    NotSmallCancellation { ratio: f64, piece: String },

    #[error("index {0} is not a declared parabolic subgroup")]
    NotParabolic(usize),

    #[error("parabolic subgroup {0} is infinite; use truncated mode")]
    InfiniteParabolic(usize),

    #[error("resource cap exceeded: {what} (limit {limit})")]
    ResourceCap { what: String, limit: usize },

    #[error("direction `{name}` is not geodesic at prefix length {k}")]
    NonGeodesicDirection { name: String, k: usize },

    #[error("malformed direction `{0}`")]
    MalformedDirection(String),

    #[error("label `{0}` is outside the coded alphabet")]
    LabelOutsideAlphabet(String),

    #[error("path has {len} edges, need at least {n}")]
    PathTooShort { len: usize, n: usize },

    #[error("restricted labels of different sizes ({0} vs {1})")]
    SizeMismatch(usize, usize),

    #[error("no label occurs beyond depth {threshold}; increase R")]
    EmptyBeyondThreshold { threshold: usize },

    #[error("n = {n} is too large for depth R = {depth}")]
    DepthTooSmall { n: usize, depth: usize },

    #[error("no bundle ray stabilised at depth {0}; increase R")]
    NoStableRay(usize),

    #[error("triangle is invalid: {0}")]
    InvalidTriangle(String),

    #[error("cache checksum mismatch for {0}")]
    CacheChecksum(String),

    #[error("cache miss for {0}")]
    CacheMiss(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("missing artifact {0}")]
    MissingArtifact(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
