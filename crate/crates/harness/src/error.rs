use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(String),
    #[error("blow-up suspected: {0}")]
    BlowUp(String),
    #[error("invariant violation: {0}")]
    Invariant(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("output error: {0}")]
    Output(String),
    #[error(transparent)]
    Lab(#[from] lpns::Error),
}

impl HarnessError {
    /// Process exit status: 1 for setup problems, 2 for suspected blow-up,
    /// 3 for a violated numerical invariant.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::BlowUp(_) => 2,
            HarnessError::Invariant(_) | HarnessError::Lab(lpns::Error::Inconsistent(_)) => 3,
            _ => 1,
        }
    }
}

impl From<csv::Error> for HarnessError {
    fn from(e: csv::Error) -> Self {
        HarnessError::Output(e.to_string())
    }
}

impl From<serde_json::Error> for HarnessError {
    fn from(e: serde_json::Error) -> Self {
        HarnessError::Output(e.to_string())
    }
}
