//! Double deep Q-network learner for maneuver selection.
//!
//! The value network, its gradients and the optimizer are written out by
//! hand on top of `ndarray`; training runs in `f32`, gradient checks in `f64`.

mod checkpoint;
mod evaluate;
mod learner;
mod mlp;
mod replay;
mod train;

pub use checkpoint::{from_json, load_checkpoint, save_checkpoint, to_json};
pub use evaluate::{episode_rng, evaluate, evaluate_in, evaluate_pilot, run_episode, sample_action, EvalReport, Pilot};
pub use learner::{act_epsilon_greedy, argmax, greedy_action, td_targets, Learner};
pub use mlp::{q_loss_and_grad, Adam, Dense, Mlp, Real};
pub use replay::{ReplayBuffer, Transition};
pub use train::{train, train_in, CurveRow, StepRecord, TrainConfig, TrainLog, Trainer};

use rand::Rng;

use crate::env::{N_ACTIONS, OBS_DIM};

pub const HIDDEN: [usize; 2] = [512, 256];

pub type QNetwork = Mlp<f32>;

/// 12 -> 512 -> 256 -> 8.
pub fn q_network<R: Rng + ?Sized>(rng: &mut R) -> QNetwork {
    q_network_with(&HIDDEN, rng)
}

pub fn q_network_with<R: Rng + ?Sized>(hidden: &[usize], rng: &mut R) -> QNetwork {
    let mut sizes = vec![OBS_DIM];
    sizes.extend_from_slice(hidden);
    sizes.push(N_ACTIONS);
    Mlp::new(&sizes, rng)
}
