//! The training loop: act, step the dogfight, store, update, sync.

use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::checkpoint::save_checkpoint;
use super::learner::{act_epsilon_greedy, Learner};
use super::replay::{ReplayBuffer, Transition};
use super::{q_network_with, QNetwork};
use crate::engagement::Outcome;
use crate::env::{DogfightEnv, EpisodeConfig, Observation};
use crate::maneuvers::ManeuverId;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub gamma: f64,
    /// Probability of the greedy action while training.
    pub epsilon: f64,
    /// Updates between hard target copies.
    pub target_sync: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
    /// Environment decision steps.
    pub total_steps: usize,
    pub buffer_capacity: usize,
    pub hidden: Vec<usize>,
    /// Steps between checkpoints; 0 writes only the final one.
    pub checkpoint_every: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            gamma: 0.95,
            epsilon: 0.95,
            target_sync: 512,
            learning_rate: 1e-4,
            batch_size: 512,
            total_steps: 500_000,
            buffer_capacity: 100_000,
            hidden: vec![512, 256],
            checkpoint_every: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> std::result::Result<(), String> {
        let unit = |x: f64| x > 0.0 && x <= 1.0;
        if !unit(self.gamma) {
            return Err(format!("gamma must be in (0, 1], got {}", self.gamma));
        }
        if !unit(self.epsilon) {
            return Err(format!("epsilon must be in (0, 1], got {}", self.epsilon));
        }
        if self.batch_size == 0 || self.buffer_capacity < self.batch_size {
            return Err(format!(
                "batch size {} must be positive and fit the buffer ({})",
                self.batch_size, self.buffer_capacity
            ));
        }
        if !(self.learning_rate > 0.0) {
            return Err(format!("learning rate must be positive, got {}", self.learning_rate));
        }
        Ok(())
    }
}

/// One row of the training log.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: usize,
    pub episode: usize,
    pub loss: Option<f64>,
    pub epsilon: f64,
    pub outcome: Option<Outcome>,
}

/// Accumulated outcomes after an episode ends.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub step: usize,
    pub episode: usize,
    pub wins: usize,
    pub losses: usize,
    pub ties: usize,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct TrainLog {
    pub steps: Vec<StepRecord>,
}

impl TrainLog {
    pub fn episode_outcomes(&self) -> impl Iterator<Item = (usize, Outcome)> + '_ {
        self.steps.iter().filter_map(|r| r.outcome.map(|o| (r.step, o)))
    }

    pub fn cumulative(&self) -> Vec<CurveRow> {
        let mut row = CurveRow {
            step: 0,
            episode: 0,
            wins: 0,
            losses: 0,
            ties: 0,
        };
        self.episode_outcomes()
            .map(|(step, o)| {
                row.step = step;
                row.episode += 1;
                match o {
                    Outcome::BlueWin => row.wins += 1,
                    Outcome::RedWin => row.losses += 1,
                    _ => row.ties += 1,
                }
                row
            })
            .collect()
    }

    pub fn write_steps_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path).map_err(|e| Error::Io(e.into()))?;
        w.write_record(["step", "episode", "loss", "epsilon", "outcome"])
            .map_err(|e| Error::Io(e.into()))?;
        for r in &self.steps {
            w.write_record([
                r.step.to_string(),
                r.episode.to_string(),
                r.loss.map(|l| l.to_string()).unwrap_or_default(),
                r.epsilon.to_string(),
                r.outcome.and_then(Outcome::blue_label).unwrap_or_default().to_string(),
            ])
            .map_err(|e| Error::Io(e.into()))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_curve_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path).map_err(|e| Error::Io(e.into()))?;
        for row in self.cumulative() {
            w.serialize(row).map_err(|e| Error::Io(e.into()))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Independent random streams so that, say, a change in the number of
/// replay draws does not shift the episode starts.
#[derive(Clone, Debug)]
struct Streams {
    env: ChaCha8Rng,
    policy: ChaCha8Rng,
    replay: ChaCha8Rng,
}

impl Streams {
    fn new(seed: u64) -> (ChaCha8Rng, Self) {
        let stream = |k| {
            let mut r = ChaCha8Rng::seed_from_u64(seed);
            r.set_stream(k);
            r
        };
        (
            stream(0),
            Self {
                env: stream(1),
                policy: stream(2),
                replay: stream(3),
            },
        )
    }
}

/// Owns everything one training run needs; [`Trainer::step`] is one pass
/// through the loop body.
#[derive(Clone, Debug)]
pub struct Trainer {
    pub config: TrainConfig,
    pub learner: Learner<f32>,
    pub buffer: ReplayBuffer,
    pub env: DogfightEnv,
    pub log: TrainLog,
    rng: Streams,
    obs: Observation,
    step: usize,
    episode: usize,
}

impl Trainer {
    pub fn new(env_config: &EpisodeConfig, config: &TrainConfig, seed: u64) -> Result<Self> {
        Self::with_env(DogfightEnv::new(*env_config), config, seed)
    }

    /// Trains in `env`, which may carry a non-default airframe or gains.
    pub fn with_env(mut env: DogfightEnv, config: &TrainConfig, seed: u64) -> Result<Self> {
        config.validate().map_err(Error::InvalidConfig)?;
        let (mut init, mut rng) = Streams::new(seed);
        let net = q_network_with(&config.hidden, &mut init);
        let learner = Learner::new(net, config.learning_rate, config.gamma, config.target_sync);
        let obs = env.reset(&mut rng.env)?;
        Ok(Self {
            config: config.clone(),
            learner,
            buffer: ReplayBuffer::new(config.buffer_capacity),
            env,
            log: TrainLog::default(),
            rng,
            obs,
            step: 0,
            episode: 0,
        })
    }

    pub fn steps_done(&self) -> usize {
        self.step
    }

    pub fn episodes_done(&self) -> usize {
        self.episode
    }

    pub fn network(&self) -> &QNetwork {
        &self.learner.online
    }

    pub fn step(&mut self) -> Result<StepRecord> {
        let epsilon = self.config.epsilon;
        let a = act_epsilon_greedy(&self.learner.online, &self.obs, epsilon, &mut self.rng.policy);
        let result = self.env.step(ManeuverId::from_index(a).expect("8 outputs"))?;
        self.buffer.push(Transition {
            s: self.obs,
            a,
            s_next: result.obs,
            r: result.reward,
            done: result.done,
        });
        let loss = if self.buffer.len() >= self.config.batch_size {
            Some(self.learner.update(&self.buffer, self.config.batch_size, &mut self.rng.replay)?)
        } else {
            None
        };
        self.step += 1;
        let outcome = result.done.then_some(result.outcome);
        let record = StepRecord {
            step: self.step,
            episode: self.episode,
            loss,
            epsilon,
            outcome,
        };
        if result.done {
            self.episode += 1;
            self.obs = self.env.reset(&mut self.rng.env)?;
        } else {
            self.obs = result.obs;
        }
        self.log.steps.push(record);
        Ok(record)
    }
}

/// Runs `config.total_steps` steps. With `out_dir` set, checkpoints go to
/// `checkpoint_<step>.json` every `checkpoint_every` steps and
/// `checkpoint_final.json` at the end.
pub fn train(
    env_config: &EpisodeConfig,
    config: &TrainConfig,
    seed: u64,
    out_dir: Option<&Path>,
    progress: impl FnMut(&Trainer, &StepRecord),
) -> Result<Trainer> {
    train_in(DogfightEnv::new(*env_config), config, seed, out_dir, progress)
}

/// [`train`] in a prepared environment.
pub fn train_in(
    env: DogfightEnv,
    config: &TrainConfig,
    seed: u64,
    out_dir: Option<&Path>,
    mut progress: impl FnMut(&Trainer, &StepRecord),
) -> Result<Trainer> {
    let mut trainer = Trainer::with_env(env, config, seed)?;
    for _ in 0..config.total_steps {
        let record = trainer.step()?;
        if let Some(dir) = out_dir {
            if config.checkpoint_every > 0 && record.step % config.checkpoint_every == 0 {
                save_checkpoint(trainer.network(), &dir.join(format!("checkpoint_{}.json", record.step)))?;
            }
        }
        progress(&trainer, &record);
    }
    if let Some(dir) = out_dir {
        save_checkpoint(trainer.network(), &dir.join("checkpoint_final.json"))?;
    }
    Ok(trainer)
}
