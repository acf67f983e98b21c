//! Experiment orchestration: configuration files, statistics, reports and
//! deterministic CSV/JSON output.

pub mod config;
pub mod experiment;
pub mod io;
pub mod report;
pub mod stats;

use thiserror::Error;

use crate::flight::FlightError;
use crate::gridalg::GridError;
use crate::homspace::HomspaceError;
use crate::scene::SceneError;

pub use config::{parse_config, parse_config_str, ExperimentConfig, ExperimentKind, ModeSpec, XiGridSpec};
pub use experiment::{run_experiment, Outcome};
pub use report::{StatReport, StatRow};

/// Process exit codes.
pub mod exit {
    pub const PASS: i32 = 0;
    pub const ACCEPTANCE_FAILURE: i32 = 2;
    pub const CONFIG: i32 = 3;
    pub const NUMERICAL: i32 = 4;
}

#[derive(Debug, Error)]
pub enum LabError {
    #[error("{path}:{line}:{column}: {message}")]
    Parse {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Homspace(#[from] HomspaceError),
    #[error(transparent)]
    Flight(#[from] FlightError),
    #[error(transparent)]
    Scene(#[from] SceneError),
}

fn grid_code(e: &GridError) -> i32 {
    match e {
        GridError::OrbitTooLarge { .. } | GridError::Singular | GridError::NotAdmissible(_) => exit::NUMERICAL,
        _ => exit::CONFIG,
    }
}

fn homspace_code(e: &HomspaceError) -> i32 {
    match e {
        HomspaceError::Grid(g) => grid_code(g),
        HomspaceError::GridMismatch | HomspaceError::TooFewEstimates(_) => exit::NUMERICAL,
        _ => exit::CONFIG,
    }
}

impl LabError {
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Grid(e) => grid_code(e),
            LabError::Homspace(e) => homspace_code(e),
            LabError::Flight(FlightError::Homspace(e)) => homspace_code(e),
            LabError::Flight(_) => exit::CONFIG,
            LabError::Scene(
                SceneError::NonPositiveRadius
                | SceneError::NonPositiveHorizon
                | SceneError::UnsupportedDimension(_)
                | SceneError::BadDirectionTable,
            ) => exit::CONFIG,
            LabError::Scene(SceneError::Grid(e)) => grid_code(e),
            LabError::Scene(_) => exit::NUMERICAL,
            _ => exit::CONFIG,
        }
    }
}
