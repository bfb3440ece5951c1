use thiserror::Error;

/// Failure raised by one of the processing stages.
///
/// Every variant's display string is prefixed with the stage that produced
/// it, so an error surfaced at the end of a pipeline run still names where
/// it came from.
#[derive(Debug, Error)]
pub enum Error {
    #[error("config: {0}")]
    Config(String),
    #[error("scene: {0}")]
    Scene(String),
    #[error("cube: {0}")]
    Cube(String),
    #[error("clutter: {0}")]
    Clutter(String),
    #[error("locate: {0}")]
    Locate(String),
    #[error("phase: {0}")]
    Phase(String),
    #[error("hmusic: {0}")]
    Hmusic(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Name of the stage that raised the error.
    pub fn stage(&self) -> &'static str {
        match self {
            Error::Config(_) => "config",
            Error::Scene(_) => "scene",
            Error::Cube(_) => "cube",
            Error::Clutter(_) => "clutter",
            Error::Locate(_) => "locate",
            Error::Phase(_) => "phase",
            Error::Hmusic(_) => "hmusic",
            Error::Io(_) => "io",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
