use serde_json::{json, Value};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),

    #[error(transparent)]
    Domain(#[from] perc_lab::Error),

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        CliError::Io { context: context.into(), source }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Domain(e) if e.is_budget() => 4,
            CliError::Domain(_) => 3,
            CliError::Io { .. } => 1,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Domain(e) if e.is_budget() => "budget",
            CliError::Domain(_) => "domain",
            CliError::Io { .. } => "io",
        }
    }

    /// Machine-readable form written to stderr.
    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "error": {
                "kind": self.kind(),
                "exit_code": self.exit_code(),
                "message": self.to_string(),
            }
        });
        if let CliError::Domain(perc_lab::Error::BudgetExceeded { level, count, budget, completed_replicates }) = self {
            v["error"]["budget"] = json!({
                "level": level,
                "count": count,
                "budget": budget,
                "completed_replicates": completed_replicates,
            });
        }
        v
    }
}
