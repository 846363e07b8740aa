use std::process::ExitCode;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, config, input file or domain violation.
    Input(String),
    /// Failure writing the output.
    Output(String),
}

impl CliError {
    pub fn code(&self) -> ExitCode {
        match self {
            CliError::Input(_) => ExitCode::from(2),
            CliError::Output(_) => ExitCode::from(1),
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(m) | CliError::Output(m) => f.write_str(m),
        }
    }
}

impl From<gluing_core::Error> for CliError {
    fn from(e: gluing_core::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn input(msg: impl Into<String>) -> CliError {
    CliError::Input(msg.into())
}

pub fn read_file(path: &str) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| input(format!("cannot read {path}: {e}")))
}
