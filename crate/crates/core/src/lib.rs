//! One-on-one within-visual-range air combat: 6-DOF F-16 dynamics, a
//! four-channel PID autopilot, an eight-maneuver library, a decision-tree
//! opponent and a double-DQN agent that learns which maneuver to fly.
//!
//! The layers stack bottom-up:
//!
//! * [`airframe`] integrates the rigid-body equations with table-driven
//!   aerodynamics and rate-limited actuators.
//! * [`lowlevel`] turns `(alpha, roll)` setpoints into surface commands.
//! * [`maneuvers`] reduces every basic flight maneuver to such setpoints.
//! * [`engagement`] scores the geometry between two aircraft.
//! * [`dt_policy`] is the rule-based opponent.
//! * [`env`] wraps everything into a decision-period MDP.
//! * [`ddqn`] learns maneuver selection on top of it.

pub mod airframe;
pub mod angles;
pub mod ddqn;
pub mod dt_policy;
pub mod engagement;
pub mod env;
mod error;
pub mod lowlevel;
pub mod maneuvers;

pub use error::{Error, Result};

/// Gravitational acceleration used throughout the simulation, m/s².
pub const G: f64 = 9.81;
