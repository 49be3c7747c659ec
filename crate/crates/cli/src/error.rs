use symreg_core::data::DataError;
use symreg_core::gp::GpError;
use symreg_core::linfit::FitError;
use symreg_core::metrics::MetricError;
use symreg_core::model::ModelError;
use symreg_core::symbolic::SymbolicError;
use symreg_core::EvalError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("empty cohort: {0}")]
    EmptyCohort(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("search failed: {0}")]
    Search(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::EmptyCohort(_) => 3,
            CliError::Numerical(_) => 4,
            CliError::Search(_) => 5,
        }
    }
}

impl From<DataError> for CliError {
    fn from(e: DataError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<SymbolicError> for CliError {
    fn from(e: SymbolicError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<FitError> for CliError {
    fn from(e: FitError) -> Self {
        match e {
            FitError::ColumnMissing(_) | FitError::CategoricalFeature(_) => CliError::Input(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<MetricError> for CliError {
    fn from(e: MetricError) -> Self {
        CliError::Numerical(e.to_string())
    }
}

impl From<GpError> for CliError {
    fn from(e: GpError) -> Self {
        match e {
            GpError::AllIndividualsInvalid => CliError::Search(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}
