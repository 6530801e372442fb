use domestic::analysis::AnalysisError;
use domestic::chevalley::ChevalleyError;
use domestic::geometry::GeometryError;
use domestic::morphisms::MorphismError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Invalid(String),
    #[error("{0}")]
    Scale(String),
}

impl CliError {
    /// 2 for bad input, 3 for computations above the budget.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Invalid(_) => 2,
            CliError::Scale(_) => 3,
        }
    }
}

impl From<GeometryError> for CliError {
    fn from(e: GeometryError) -> Self {
        match e {
            GeometryError::Scale { .. } => CliError::Scale(e.to_string()),
            _ => CliError::Invalid(e.to_string()),
        }
    }
}

impl From<AnalysisError> for CliError {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::Geometry(g) => g.into(),
            AnalysisError::Scale(_) | AnalysisError::NoStrategy(_) => CliError::Scale(e.to_string()),
            _ => CliError::Invalid(e.to_string()),
        }
    }
}

impl From<MorphismError> for CliError {
    fn from(e: MorphismError) -> Self {
        match e {
            MorphismError::Geometry(g) => g.into(),
            _ => CliError::Invalid(e.to_string()),
        }
    }
}

impl From<ChevalleyError> for CliError {
    fn from(e: ChevalleyError) -> Self {
        match e {
            ChevalleyError::Budget { .. } => CliError::Scale(e.to_string()),
            _ => CliError::Invalid(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Invalid(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Invalid(e.to_string())
    }
}
