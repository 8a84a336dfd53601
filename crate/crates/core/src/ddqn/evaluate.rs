use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::learner::{act_epsilon_greedy, greedy_action};
use super::QNetwork;
use crate::dt_policy::DtOptions;
use crate::env::{DogfightEnv, EpisodeConfig, Side};
use crate::engagement::Outcome;
use crate::maneuvers::ManeuverId;
use crate::Result;

/// Who flies blue.
#[derive(Clone, Copy, Debug)]
pub enum Pilot<'a> {
    Network(&'a QNetwork),
    Dt(DtOptions),
}

impl Pilot<'_> {
    pub fn choose(&self, env: &DogfightEnv, obs: &crate::env::Observation) -> Result<ManeuverId> {
        match self {
            Pilot::Network(net) => Ok(ManeuverId::from_index(greedy_action(*net, obs)).expect("8 outputs")),
            Pilot::Dt(options) => env.dt_decision(Side::Blue, *options),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub episodes: usize,
    pub wins: usize,
    pub losses: usize,
    pub ties: usize,
    pub win_pct: f64,
    pub loss_pct: f64,
    pub tie_pct: f64,
}

impl EvalReport {
    pub fn from_outcomes(outcomes: &[Outcome]) -> Self {
        let count = |o| outcomes.iter().filter(|&&x| x == o).count();
        let (wins, losses) = (count(Outcome::BlueWin), count(Outcome::RedWin));
        let ties = outcomes.len() - wins - losses;
        let pct = |k: usize| 100.0 * k as f64 / outcomes.len().max(1) as f64;
        Self {
            episodes: outcomes.len(),
            wins,
            losses,
            ties,
            win_pct: pct(wins),
            loss_pct: pct(losses),
            tie_pct: pct(ties),
        }
    }
}

/// Random generator for episode `index` of a run seeded with `seed`.
pub fn episode_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Plays one episode from a fresh reset drawn from `rng`.
pub fn run_episode(env: &mut DogfightEnv, blue: &Pilot, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let mut obs = env.reset(rng)?;
    loop {
        let action = blue.choose(env, &obs)?;
        let step = env.step(action)?;
        if step.done {
            return Ok(step.outcome);
        }
        obs = step.obs;
    }
}

/// `n` episodes in parallel; episode `i` draws its start from
/// [`episode_rng`]`(seed, i)`, so the result does not depend on scheduling.
pub fn evaluate_pilot(blue: &Pilot, env_config: &EpisodeConfig, n: usize, seed: u64) -> Result<EvalReport> {
    evaluate_in(&DogfightEnv::new(*env_config), blue, n, seed)
}

/// [`evaluate_pilot`] with every episode cloned from `template`.
pub fn evaluate_in(template: &DogfightEnv, blue: &Pilot, n: usize, seed: u64) -> Result<EvalReport> {
    let outcomes = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut env = template.clone();
            run_episode(&mut env, blue, &mut episode_rng(seed, i as u64))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EvalReport::from_outcomes(&outcomes))
}

/// Greedy network against the decision tree with `opponent` options.
pub fn evaluate(net: &QNetwork, env_config: &EpisodeConfig, opponent: DtOptions, n: usize, seed: u64) -> Result<EvalReport> {
    let config = EpisodeConfig {
        red: opponent,
        ..*env_config
    };
    evaluate_pilot(&Pilot::Network(net), &config, n, seed)
}

/// Action sampled by the network at exploration level `epsilon`; exposed for
/// scripted duels that want a stochastic agent.
pub fn sample_action(net: &QNetwork, obs: &crate::env::Observation, epsilon: f64, rng: &mut ChaCha8Rng) -> ManeuverId {
    ManeuverId::from_index(act_epsilon_greedy(net, obs, epsilon, rng)).expect("8 outputs")
}
