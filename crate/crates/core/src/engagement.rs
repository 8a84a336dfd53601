//! Relative geometry between two aircraft, the gun engagement zone, blood
//! accounting and episode termination.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::airframe::BodyState;
use crate::{Error, Result};

pub const ZONE_MIN_RANGE: f64 = 100.0;
pub const ZONE_MAX_RANGE: f64 = 1000.0;
pub const ZONE_MAX_ATA: f64 = 1.0;
/// Blood lost per second inside the opponent's zone.
pub const DAMAGE_RATE: f64 = 1.0;
pub const MIN_ALTITUDE: f64 = 10.0;
pub const MIN_SEPARATION: f64 = 10.0;
pub const MAX_DECISION_STEPS: usize = 300;

/// Angles in degrees.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RelativeGeometry {
    pub los: Vector3<f64>,
    pub d: f64,
    pub hca: f64,
    pub ata: f64,
    pub aa: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CrashReason {
    #[default]
    None,
    Ground,
    Proximity,
    NonFinite,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CombatStatus {
    pub blood: f64,
    pub crashed: bool,
    pub crash_reason: CrashReason,
}

impl Default for CombatStatus {
    fn default() -> Self {
        Self {
            blood: 1.0,
            crashed: false,
            crash_reason: CrashReason::None,
        }
    }
}

impl CombatStatus {
    pub fn failed(&self) -> bool {
        self.crashed || self.blood <= 0.0
    }

    /// Records the first crash reason; later calls keep it.
    pub fn crash(&mut self, reason: CrashReason) {
        if !self.crashed {
            self.crashed = true;
            self.crash_reason = reason;
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Ongoing,
    BlueWin,
    RedWin,
    Tie,
}

impl Outcome {
    pub fn is_terminal(self) -> bool {
        self != Outcome::Ongoing
    }

    /// "win", "loss" or "tie" from blue's side; `None` while ongoing.
    pub fn blue_label(self) -> Option<&'static str> {
        match self {
            Outcome::Ongoing => None,
            Outcome::BlueWin => Some("win"),
            Outcome::RedWin => Some("loss"),
            Outcome::Tie => Some("tie"),
        }
    }
}

/// Nose direction in the earth frame.
pub fn heading_vector(euler: &Vector3<f64>) -> Vector3<f64> {
    let (theta, psi) = (euler.y, euler.z);
    Vector3::new(theta.cos() * psi.cos(), theta.cos() * psi.sin(), -theta.sin())
}

fn angle_deg(cos: f64) -> f64 {
    cos.clamp(-1.0, 1.0).acos().to_degrees()
}

pub fn relative_geometry(own: &BodyState, opp: &BodyState) -> Result<RelativeGeometry> {
    let los = opp.pos - own.pos;
    let d = los.norm();
    if !(d > 0.0) {
        return Err(Error::CoincidentPositions { distance: d });
    }
    let h = heading_vector(&own.euler);
    let ho = heading_vector(&opp.euler);
    Ok(RelativeGeometry {
        los,
        d,
        hca: angle_deg(h.dot(&ho)),
        ata: angle_deg(los.dot(&h) / d),
        aa: angle_deg(los.dot(&ho) / d),
    })
}

pub fn in_engagement_zone(geom: &RelativeGeometry) -> bool {
    (ZONE_MIN_RANGE..=ZONE_MAX_RANGE).contains(&geom.d) && geom.ata <= ZONE_MAX_ATA
}

/// Drains blood from each side that sits in the other's zone.
/// `blue_in_zone` means blue has red inside its own zone, so red is hit.
pub fn apply_damage(
    statuses: [CombatStatus; 2],
    blue_in_zone: bool,
    red_in_zone: bool,
    dt: f64,
) -> [CombatStatus; 2] {
    let [mut blue, mut red] = statuses;
    let drain = |s: &mut CombatStatus| {
        let b = s.blood - DAMAGE_RATE * dt;
        // snap accumulated rounding so 100 substeps of 0.01 reach exactly 0
        s.blood = if b < 1e-9 { 0.0 } else { b };
    };
    if red_in_zone {
        drain(&mut blue);
    }
    if blue_in_zone {
        drain(&mut red);
    }
    [blue, red]
}

/// Marks crashes and decides the outcome after a substep. `out_of_time`
/// is set once the last decision period of the episode has been flown.
pub fn check_termination(
    states: [&BodyState; 2],
    statuses: &mut [CombatStatus; 2],
    distance: f64,
    out_of_time: bool,
) -> Outcome {
    for (state, status) in states.iter().zip(statuses.iter_mut()) {
        if !state.is_finite() {
            status.crash(CrashReason::NonFinite);
        } else if state.altitude() < MIN_ALTITUDE {
            status.crash(CrashReason::Ground);
        }
    }
    if distance < MIN_SEPARATION {
        statuses[0].crash(CrashReason::Proximity);
        statuses[1].crash(CrashReason::Proximity);
    }
    match (statuses[0].failed(), statuses[1].failed()) {
        (true, true) => Outcome::Tie,
        (false, true) => Outcome::BlueWin,
        (true, false) => Outcome::RedWin,
        (false, false) if out_of_time => Outcome::Tie,
        (false, false) => Outcome::Ongoing,
    }
}
