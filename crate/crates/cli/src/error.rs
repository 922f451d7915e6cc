use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Unsupported(String),
    #[error("{0}")]
    Version(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Other(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Other(_) => 1,
            CliError::Parse(_) => 2,
            CliError::Unsupported(_) => 3,
            CliError::Version(_) => 4,
            CliError::Io(_) => 5,
        }
    }

    pub fn io(path: &std::path::Path, e: std::io::Error) -> Self {
        CliError::Io(format!("{}: {e}", path.display()))
    }
}

impl From<flexhe::Error> for CliError {
    fn from(e: flexhe::Error) -> Self {
        use flexhe::Error as E;
        let msg = e.to_string();
        match e {
            E::VersionMismatch { .. } => CliError::Version(msg),
            E::Io(_) => CliError::Io(msg),
            E::Malformed(_) => CliError::Parse(msg),
            E::Unsupported(_) | E::InvalidParams(_) | E::LevelExhausted(_) => CliError::Unsupported(msg),
            _ => CliError::Other(msg),
        }
    }
}

impl From<flexhe_archsim::Error> for CliError {
    fn from(e: flexhe_archsim::Error) -> Self {
        use flexhe_archsim::Error as E;
        match e {
            E::Core(c) => c.into(),
            E::Config(m) => CliError::Parse(format!("invalid configuration: {m}")),
            E::Unsupported(m) => CliError::Unsupported(m),
            other => CliError::Other(other.to_string()),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
