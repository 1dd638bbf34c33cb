use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("{0}")]
    Runtime(String),

    #[error("audit failed: {0}")]
    Audit(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Runtime(_) => 2,
            CliError::Audit(_) => 3,
        }
    }
}

impl From<qotto::Error> for CliError {
    fn from(e: qotto::Error) -> Self {
        use qotto::Error as E;
        match e {
            E::InvalidArgument(_) | E::InvalidConfig(_) | E::Domain(_) | E::UndefinedPower => {
                CliError::Usage(e.to_string())
            }
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(format!("I/O error: {e}"))
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Runtime(format!("CSV error: {e}"))
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
