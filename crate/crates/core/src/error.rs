use thiserror::Error;

/// Errors raised anywhere in the simulation and analysis pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("config field `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("probability `{name}` = {value} is outside [0, 1]")]
    Probability { name: String, value: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unknown experiment `{0}`")]
    UnknownExperiment(String),

    #[error("unknown protocol `{0}`")]
    UnknownProtocol(String),

    #[error("malformed shot record: {0}")]
    MalformedRecord(String),

    #[error("state norm deviates from one by {0:e}")]
    Norm(f64),

    #[error("no weight-1 preimage for syndrome {0}")]
    NoPreimage(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }
}

pub(crate) fn check_probability(name: &str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::Probability {
            name: name.to_string(),
            value,
        })
    }
}
