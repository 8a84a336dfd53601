//! The 12-component agent observation and the per-decision reward.

use serde::{Deserialize, Serialize};

use crate::airframe::{air_data, BodyState};
use crate::angles::wrap_deg;
use crate::engagement::{relative_geometry, Outcome, RelativeGeometry};
use crate::maneuvers::{desired_path_angles, path_angles};
use crate::Result;

pub const OBS_DIM: usize = 12;

pub const OBS_NAMES: [&str; OBS_DIM] = [
    "p3", "v", "phi", "theta", "chi", "psi_rel", "zeta_rel", "hca", "ata", "aa", "d", "v_opp",
];

/// Scales that bring each observation component to order one.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Normalization {
    /// Metres, applied to the down coordinate.
    pub height: f64,
    /// m/s, applied to both speeds.
    pub speed: f64,
    /// Degrees, applied to every angle.
    pub angle: f64,
    /// Metres, applied to the range.
    pub distance: f64,
}

impl Default for Normalization {
    fn default() -> Self {
        Self {
            height: 10_000.0,
            speed: 400.0,
            angle: 180.0,
            distance: 10_000.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Observation(pub [f64; OBS_DIM]);

impl Observation {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }
}

/// Blue's view of the engagement. Yaw enters only relative to the line of
/// sight, so the observation does not change when both aircraft are rotated
/// about the vertical.
pub fn observe(blue: &BodyState, red: &BodyState, norm: &Normalization) -> Result<Observation> {
    let geom = relative_geometry(blue, red)?;
    let air = air_data(&blue.vel_body, blue.altitude())?;
    let red_air = air_data(&red.vel_body, red.altitude())?;
    let (_, zeta_d) = desired_path_angles(&blue.pos, &red.pos)?;
    let (chi, zeta) = path_angles(blue);
    let deg = f64::to_degrees;
    let angle = |a: f64| a / norm.angle;
    Ok(Observation([
        blue.pos.z / norm.height,
        air.v / norm.speed,
        angle(deg(blue.euler.x)),
        angle(deg(blue.euler.y)),
        angle(deg(chi)),
        angle(wrap_deg(deg(blue.euler.z - zeta_d))),
        angle(wrap_deg(deg(zeta - zeta_d))),
        angle(geom.hca),
        angle(geom.ata),
        angle(geom.aa),
        geom.d / norm.distance,
        red_air.v / norm.speed,
    ]))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RewardWeights {
    pub terminal: f64,
    pub damage: f64,
    pub angle: f64,
}

impl Default for RewardWeights {
    fn default() -> Self {
        Self {
            terminal: 20.0,
            damage: 1.0,
            angle: 1.0 / 180.0,
        }
    }
}

/// Reward for one decision period: a terminal term, the blood exchanged
/// over the period, and an angular advantage term at the period end.
/// Bloods are `[blue, red]`.
pub fn reward(
    prev_bloods: [f64; 2],
    new_bloods: [f64; 2],
    geom: &RelativeGeometry,
    outcome: Outcome,
    weights: &RewardWeights,
) -> f64 {
    let r_f = match outcome {
        Outcome::BlueWin => 1.0,
        Outcome::RedWin => -1.0,
        Outcome::Tie | Outcome::Ongoing => 0.0,
    };
    let blue_loss = prev_bloods[0] - new_bloods[0];
    let red_loss = prev_bloods[1] - new_bloods[1];
    let r_d = red_loss - blue_loss;
    let r_a = 180.0 - geom.ata - geom.aa;
    weights.terminal * r_f + weights.damage * r_d + weights.angle * r_a
}
