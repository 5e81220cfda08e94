use std::path::{Path, PathBuf};

use serde::Serialize;

/// Everything that ends a run. Printed to stderr as one JSON object.
#[derive(Debug, thiserror::Error, Serialize)]
#[error("{message}")]
pub struct CliError {
    pub kind: &'static str,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub line: Option<u64>,
}

impl CliError {
    pub fn new(kind: &'static str, message: impl Into<String>) -> Self {
        Self {
            kind,
            message: message.into(),
            path: None,
            line: None,
        }
    }

    pub fn config(message: impl Into<String>) -> Self {
        Self::new("config", message)
    }

    pub fn at(mut self, path: &Path) -> Self {
        self.path = Some(path.to_path_buf());
        self
    }

    pub fn io(path: &Path, err: std::io::Error) -> Self {
        Self::new("io", err.to_string()).at(path)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("error serializes")
    }
}

impl From<mediarel_core::graph::GraphError> for CliError {
    fn from(e: mediarel_core::graph::GraphError) -> Self {
        use mediarel_core::graph::GraphError;
        let line = match &e {
            GraphError::Parse { line, .. } => Some(*line as u64),
            _ => None,
        };
        let kind = match &e {
            GraphError::Parse { .. } => "parse",
            GraphError::Io(_) => "io",
            _ => "graph",
        };
        Self {
            line,
            ..Self::new(kind, e.to_string())
        }
    }
}

impl From<mediarel_core::ingest::IngestError> for CliError {
    fn from(e: mediarel_core::ingest::IngestError) -> Self {
        match e {
            mediarel_core::ingest::IngestError::Graph(g) => g.into(),
            other => Self::new("io", other.to_string()),
        }
    }
}

impl From<mediarel_core::labels::LabelError> for CliError {
    fn from(e: mediarel_core::labels::LabelError) -> Self {
        use mediarel_core::labels::LabelError;
        let line = match &e {
            LabelError::Parse { line, .. } => Some(*line),
            _ => None,
        };
        Self {
            line,
            ..Self::new("parse", e.to_string())
        }
    }
}

impl From<mediarel_core::estimators::EstimateError> for CliError {
    fn from(e: mediarel_core::estimators::EstimateError) -> Self {
        use mediarel_core::estimators::EstimateError;
        let kind = match &e {
            EstimateError::InvalidConfig(_) => "config",
            EstimateError::NotConverged { .. } => "convergence",
            _ => "estimate",
        };
        Self::new(kind, e.to_string())
    }
}

impl From<mediarel_core::eval::EvalError> for CliError {
    fn from(e: mediarel_core::eval::EvalError) -> Self {
        use mediarel_core::eval::EvalError;
        match e {
            EvalError::Estimate(inner) => inner.into(),
            EvalError::Parse { line, .. } => Self {
                line: Some(line),
                ..Self::new("parse", e.to_string())
            },
            other => Self::new("eval", other.to_string()),
        }
    }
}
