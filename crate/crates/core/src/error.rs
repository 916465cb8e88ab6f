use thiserror::Error;

#[derive(Error, Debug)]
pub enum ModelError {
    #[error("{name} must be positive and finite (got {value})")]
    NonPositive { name: &'static str, value: f64 },
    #[error("invalid scenario: {0}")]
    Invalid(String),
    #[error("invalid station mix: {0}")]
    InvalidMix(String),
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("cannot access {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Error, Debug, Clone, PartialEq)]
pub enum GraphError {
    #[error("malformed path: {0}")]
    MalformedPath(String),
}

#[derive(Error, Debug, Clone, PartialEq)]
pub enum TrajectoryError {
    #[error("association sequence is empty")]
    EmptyAssociation,
    #[error("GBS {0} appears more than once in the association")]
    RepeatedGbs(u32),
    #[error("GBS {0} is not part of the scenario")]
    UnknownGbs(u32),
    #[error("GBS {0} has no coverage disk at the UAV altitude")]
    NoCoverage(u32),
    #[error("coverage disks of GBS {from} and GBS {to} do not overlap")]
    DisksDisjoint { from: u32, to: u32 },
}

#[derive(Error, Debug)]
pub enum SolveError {
    /// No association meets the time budget. `min_mission_time_s` is the
    /// fastest achievable mission, or `None` when start and finish are not
    /// connected at all.
    #[error("infeasible: {}", match .min_mission_time_s {
        Some(t) => format!("fastest achievable mission takes {t:.3} s"),
        None => "start and finish are not connected by coverage".to_string(),
    })]
    Infeasible { min_mission_time_s: Option<f64> },
    #[error("exhaustive search refused: {gbs} GBS vertices exceed the cap of {cap}")]
    TooLarge { gbs: usize, cap: usize },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Trajectory(#[from] TrajectoryError),
}

impl SolveError {
    pub fn is_infeasible(&self) -> bool {
        matches!(self, SolveError::Infeasible { .. })
    }
}
