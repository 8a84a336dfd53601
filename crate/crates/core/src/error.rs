use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("airframe: Euler kinematics singular at pitch {pitch_deg:.4} deg")]
    Singularity { pitch_deg: f64 },

    #[error("airframe: air data undefined at zero velocity")]
    ZeroVelocity,

    #[error("airframe: state became non-finite")]
    NonFiniteState,

    #[error("airframe: invalid integration step {0} s")]
    InvalidStep(f64),

    #[error("airframe: trim did not converge (residual {residual:.3e})")]
    TrimNoConvergence { residual: f64 },

    #[error("tables: {path}: {message}")]
    Table { path: String, message: String },

    #[error("geometry: positions coincide (separation {distance:.3} m)")]
    CoincidentPositions { distance: f64 },

    #[error("maneuvers: load vector is zero")]
    ZeroLoadVector,

    #[error("maneuvers: path pitch {chi_deg:.3} deg is singular for the point-mass model")]
    PathSingularity { chi_deg: f64 },

    #[error("env: step called on a finished episode")]
    EpisodeFinished,

    #[error("ddqn: replay buffer holds {len} transitions, batch needs {batch}")]
    BufferTooSmall { len: usize, batch: usize },

    #[error("ddqn: non-finite loss {loss} at training step {step}")]
    NonFiniteLoss { loss: f64, step: usize },

    #[error("ddqn: checkpoint: {0}")]
    Checkpoint(String),

    #[error("config: {0}")]
    InvalidConfig(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
