use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("unsupported order n={0}, only 0..=2 available")]
    UnsupportedOrder(u32),
    #[error("singularity: x == y")]
    Singularity,
    #[error("invalid field spec: {0}")]
    Spec(String),
    #[error("geometry error: {0}")]
    Geometry(String),
    #[error("sweep error: {0}")]
    Sweep(String),
    #[error("statistics error: {0}")]
    Statistics(String),
    #[error("conditioning error: {0}")]
    Conditioning(String),
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
