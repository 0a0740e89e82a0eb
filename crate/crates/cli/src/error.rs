use serde::Serialize;
use suslov_core::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}{}: {message}", line.map(|l| format!(":{l}")).unwrap_or_default())]
    Config {
        path: String,
        line: Option<usize>,
        field: Option<String>,
        message: String,
    },

    #[error(transparent)]
    Numerical(CoreError),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Serialize)]
struct ErrorRecord<'a> {
    error: &'static str,
    exit_code: i32,
    message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    line: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    field: Option<&'a str>,
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } => 2,
            CliError::Numerical(_) | CliError::Io { .. } => 3,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Config { .. } => "config",
            CliError::Numerical(_) => "numerical",
            CliError::Io { .. } => "io",
        }
    }

    /// One-line JSON record for stderr.
    pub fn record(&self) -> String {
        let (line, field) = match self {
            CliError::Config { line, field, .. } => (*line, field.as_deref()),
            _ => (None, None),
        };
        let rec = ErrorRecord {
            error: self.kind(),
            exit_code: self.exit_code(),
            message: self.to_string(),
            line,
            field,
        };
        serde_json::to_string(&rec).expect("error record serializes")
    }
}

/// Errors raised while building the case from a validated config are the
/// user's to fix; everything later is a numerical failure.
pub fn setup_error(path: &str, field: &str, err: CoreError) -> CliError {
    match err {
        CoreError::StepUnderflow { .. }
        | CoreError::MaxStepsExceeded { .. }
        | CoreError::NonFinite { .. } => CliError::Numerical(err),
        other => CliError::Config {
            path: path.to_string(),
            line: None,
            field: Some(field.to_string()),
            message: other.to_string(),
        },
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
