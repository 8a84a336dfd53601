use ndarray::{Array2, ArrayView1};
use rand::Rng;

use super::mlp::{q_loss_and_grad, real, Adam, Mlp, Real};
use super::replay::{ReplayBuffer, Transition};
use crate::env::{Observation, OBS_DIM};
use crate::{Error, Result};

/// Index of the largest value; ties go to the lowest index.
pub fn argmax<F: Real>(q: ArrayView1<F>) -> usize {
    let mut best = 0;
    for (i, &v) in q.iter().enumerate().skip(1) {
        if v > q[best] {
            best = i;
        }
    }
    best
}

pub fn greedy_action<F: Real>(net: &Mlp<F>, obs: &Observation) -> usize {
    let x: Vec<F> = obs.0.iter().map(|&v| real(v)).collect();
    let q = net.forward_one(&x);
    argmax(ArrayView1::from(&q[..]))
}

/// Greedy with probability `epsilon`, otherwise uniform over all actions.
/// Note the convention: `epsilon = 1` is pure exploitation.
pub fn act_epsilon_greedy<F: Real, R: Rng + ?Sized>(net: &Mlp<F>, obs: &Observation, epsilon: f64, rng: &mut R) -> usize {
    if rng.gen::<f64>() < epsilon {
        greedy_action(net, obs)
    } else {
        rng.gen_range(0..net.output_dim())
    }
}

pub(crate) fn obs_matrix<'a, F: Real>(obs: impl ExactSizeIterator<Item = &'a Observation>) -> Array2<F> {
    let n = obs.len();
    let mut m = Array2::zeros((n, OBS_DIM));
    for (mut row, o) in m.rows_mut().into_iter().zip(obs) {
        for (dst, &src) in row.iter_mut().zip(o.0.iter()) {
            *dst = real(src);
        }
    }
    m
}

/// Double-Q targets: the online net picks the next action, the target net
/// scores it. Terminal transitions keep only their reward.
pub fn td_targets<F: Real>(batch: &[Transition], net: &Mlp<F>, target_net: &Mlp<F>, gamma: f64) -> Vec<F> {
    let next = obs_matrix::<F>(batch.iter().map(|t| &t.s_next));
    let q_online = net.forward(next.view());
    let q_target = target_net.forward(next.view());
    let gamma = real::<F>(gamma);
    batch
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let r = real::<F>(t.r);
            if t.done {
                r
            } else {
                let a = argmax(q_online.row(i));
                r + gamma * q_target[[i, a]]
            }
        })
        .collect()
}

/// Online and target networks with their optimizer.
#[derive(Clone, Debug)]
pub struct Learner<F> {
    pub online: Mlp<F>,
    pub target: Mlp<F>,
    pub adam: Adam<F>,
    pub gamma: f64,
    /// Hard target copy every this many updates.
    pub target_sync: usize,
    pub updates: usize,
}

impl<F: Real> Learner<F> {
    pub fn new(online: Mlp<F>, learning_rate: f64, gamma: f64, target_sync: usize) -> Self {
        let adam = Adam::new(&online, learning_rate);
        Self {
            target: online.clone(),
            online,
            adam,
            gamma,
            target_sync,
            updates: 0,
        }
    }

    pub fn sync_target(&mut self) {
        self.target.clone_from(&self.online);
    }

    /// One gradient step on the mean squared TD error of `batch`; returns
    /// the loss before the step.
    pub fn train_step(&mut self, batch: &[Transition]) -> Result<f64> {
        let targets = td_targets(batch, &self.online, &self.target, self.gamma);
        let states = obs_matrix::<F>(batch.iter().map(|t| &t.s));
        let actions: Vec<usize> = batch.iter().map(|t| t.a).collect();
        let (loss, grads) = q_loss_and_grad(&self.online, states.view(), &actions, &targets);
        let loss = loss.to_f64().unwrap_or(f64::NAN);
        if !loss.is_finite() {
            return Err(Error::NonFiniteLoss {
                loss,
                step: self.updates + 1,
            });
        }
        self.adam.step(&mut self.online, &grads);
        self.updates += 1;
        if self.target_sync > 0 && self.updates % self.target_sync == 0 {
            self.sync_target();
        }
        Ok(loss)
    }

    /// Samples a batch from `buffer` and trains on it.
    pub fn update<R: Rng + ?Sized>(&mut self, buffer: &ReplayBuffer, batch_size: usize, rng: &mut R) -> Result<f64> {
        let batch = buffer.sample(batch_size, rng)?;
        self.train_step(&batch)
    }
}
