//! The simulation engine: configuration, the tick loop, live execution on a
//! background thread, and parameter sweeps.

mod config;
mod live;
mod sim;
mod sweep;

pub use config::{
    default_home, load_config, ArmConfig, ConfigError, Mode, SimConfig, DEFAULT_TICK,
};
pub use live::{EventHub, LiveEngine, Outbound, Received, ReplyFn, Subscription, DEFAULT_BUFFER};
pub use sim::{
    run, run_with_events, Ack, ArmSnapshot, Command, PieceSnapshot, Scene, SimEvent, Simulation,
};
pub use sweep::{sweep, sweep_to_csv, ParameterGrid, SweepRow, SweepStatus};

use thiserror::Error;

use crate::kinematics::WorkPoint;
use crate::metrics::MetricsError;
use crate::motion::{ArmId, MotionError};
use crate::notation::NotationError;
use crate::scheduler::SchedulerError;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("cannot decode game: {source}")]
    Decode {
        token: Option<usize>,
        #[source]
        source: NotationError,
    },
    #[error("half-move {half_move} ({arm}) at {point}: {source}")]
    Unreachable {
        half_move: usize,
        arm: ArmId,
        point: WorkPoint,
        #[source]
        source: MotionError,
    },
    #[error("invalid command: {0}")]
    InvalidCommand(String),
    #[error(transparent)]
    Scheduler(#[from] SchedulerError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error("sweep grid has no points")]
    EmptyGrid,
    #[error("grid line {line}: {message}")]
    Grid { line: usize, message: String },
    #[error("engine has stopped")]
    Stopped,
}

impl From<NotationError> for EngineError {
    fn from(source: NotationError) -> Self {
        EngineError::Decode {
            token: source.token_index(),
            source,
        }
    }
}

impl EngineError {
    /// Process exit status used by the command-line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            EngineError::Decode { .. } => 2,
            EngineError::Unreachable { .. } => 3,
            EngineError::Config(_) | EngineError::Grid { .. } | EngineError::EmptyGrid => 4,
            _ => 1,
        }
    }
}
