use std::path::PathBuf;

/// Errors raised by the codec, construction and simulation layers.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("malformed input: {0}")]
    MalformedInput(String),

    #[error("configuration error: {0}")]
    Configuration(String),

    #[error("unsupported rate {rate}: rates above the mother rate {mother} need puncturing")]
    UnsupportedRate { rate: f64, mother: f64 },

    #[error("infeasible code parameters: {0}")]
    InfeasibleParameters(String),

    #[error("threshold search bracket [{lo_db}, {hi_db}] dB does not contain a tunnel opening")]
    Bracket { lo_db: f64, hi_db: f64 },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
