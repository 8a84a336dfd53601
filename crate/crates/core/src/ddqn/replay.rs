use rand::Rng;

use crate::env::Observation;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Transition {
    pub s: Observation,
    pub a: usize,
    pub s_next: Observation,
    pub r: f64,
    pub done: bool,
}

/// Fixed-capacity FIFO of transitions with uniform sampling.
#[derive(Clone, Debug)]
pub struct ReplayBuffer {
    capacity: usize,
    data: Vec<Transition>,
    /// Slot the next push overwrites once full.
    next: usize,
}

impl ReplayBuffer {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0, "replay capacity must be positive");
        Self {
            capacity,
            data: Vec::with_capacity(capacity.min(1 << 20)),
            next: 0,
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn push(&mut self, t: Transition) {
        if self.data.len() < self.capacity {
            self.data.push(t);
        } else {
            self.data[self.next] = t;
        }
        self.next = (self.next + 1) % self.capacity;
    }

    pub fn get(&self, index: usize) -> Option<&Transition> {
        self.data.get(index)
    }

    /// Uniform indices, with replacement.
    pub fn sample_indices<R: Rng + ?Sized>(&self, batch: usize, rng: &mut R) -> Result<Vec<usize>> {
        if self.data.len() < batch || batch == 0 {
            return Err(Error::BufferTooSmall {
                len: self.data.len(),
                batch,
            });
        }
        Ok((0..batch).map(|_| rng.gen_range(0..self.data.len())).collect())
    }

    pub fn sample<R: Rng + ?Sized>(&self, batch: usize, rng: &mut R) -> Result<Vec<Transition>> {
        Ok(self.sample_indices(batch, rng)?.into_iter().map(|i| self.data[i]).collect())
    }
}
