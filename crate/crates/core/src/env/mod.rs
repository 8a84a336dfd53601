//! The one-on-one dogfight as a decision-period MDP. Blue is the learning
//! agent, red flies the decision tree. Each decision holds a maneuver for
//! `substeps` physics steps of `dt` seconds.

mod observation;
mod record;

pub use observation::{observe, reward, Normalization, Observation, RewardWeights, OBS_DIM, OBS_NAMES};
pub use record::{write_summary_file, write_trajectory, write_trajectory_file, EpisodeSummary, Side, TrajectoryRow};

use nalgebra::Vector3;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::airframe::{air_data, trim_search, Airframe, BodyState, TrimTarget};
use crate::dt_policy::{decide, DtOptions, DtParams};
use crate::engagement::{
    apply_damage, check_termination, in_engagement_zone, relative_geometry, CombatStatus, CrashReason, Outcome,
    RelativeGeometry, ZONE_MIN_RANGE,
};
use crate::lowlevel::{ControllerBank, ControllerGains};
use crate::maneuvers::{maneuver_setpoints, GuidanceParams, ManeuverContext, ManeuverId};
use crate::{Error, Result};

pub const N_ACTIONS: usize = 8;

/// Initial condition for one aircraft: position (NED, m), Mach and yaw
/// (degrees). The aircraft starts trimmed in level flight.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AircraftInit {
    pub pos: [f64; 3],
    pub mach: f64,
    pub yaw_deg: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    #[default]
    Random,
    /// Parallel opposite headings 4 km apart at Mach 0.9.
    Case1,
    /// As `Case1` at Mach 0.8.
    Case2,
}

impl Scenario {
    /// `[blue, red]` initial conditions, or `None` for random draws.
    pub fn initial_conditions(self) -> Option<[AircraftInit; 2]> {
        let mach = match self {
            Scenario::Random => return None,
            Scenario::Case1 => 0.9,
            Scenario::Case2 => 0.8,
        };
        Some([
            AircraftInit {
                pos: [0.0, 2000.0, -5000.0],
                mach,
                yaw_deg: 180.0,
            },
            AircraftInit {
                pos: [0.0, -2000.0, -5000.0],
                mach,
                yaw_deg: 0.0,
            },
        ])
    }
}

impl std::str::FromStr for Scenario {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "random" => Ok(Scenario::Random),
            "case1" => Ok(Scenario::Case1),
            "case2" => Ok(Scenario::Case2),
            other => Err(format!("unknown scenario `{other}` (expected random, case1 or case2)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpisodeConfig {
    /// Lower corner of the initial position box, NED metres.
    pub pos_min: [f64; 3],
    pub pos_max: [f64; 3],
    pub mach_range: [f64; 2],
    pub yaw_range_deg: [f64; 2],
    pub max_decision_steps: usize,
    pub substeps: usize,
    pub dt: f64,
    pub red: DtOptions,
    pub dt_params: DtParams,
    pub guidance: GuidanceParams,
    pub norm: Normalization,
    pub reward: RewardWeights,
    pub scenario: Scenario,
}

impl Default for EpisodeConfig {
    fn default() -> Self {
        Self {
            pos_min: [-3000.0, -3000.0, -8000.0],
            pos_max: [3000.0, 3000.0, -3000.0],
            mach_range: [0.3, 0.9],
            yaw_range_deg: [-180.0, 180.0],
            max_decision_steps: crate::engagement::MAX_DECISION_STEPS,
            substeps: 100,
            dt: 0.01,
            red: DtOptions {
                sp: true,
                es: true,
                yy: true,
            },
            dt_params: DtParams::default(),
            guidance: GuidanceParams::default(),
            norm: Normalization::default(),
            reward: RewardWeights::default(),
            scenario: Scenario::Random,
        }
    }
}

impl EpisodeConfig {
    pub fn sample_init<R: Rng + ?Sized>(&self, rng: &mut R) -> AircraftInit {
        let mut pos = [0.0; 3];
        for (i, p) in pos.iter_mut().enumerate() {
            *p = rng.gen_range(self.pos_min[i]..=self.pos_max[i]);
        }
        AircraftInit {
            pos,
            mach: rng.gen_range(self.mach_range[0]..=self.mach_range[1]),
            yaw_deg: rng.gen_range(self.yaw_range_deg[0]..self.yaw_range_deg[1]),
        }
    }
}

#[derive(Clone, Debug)]
struct Aircraft {
    state: BodyState,
    bank: ControllerBank,
    ctx: ManeuverContext,
    maneuver: ManeuverId,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepInfo {
    /// `[blue, red]`.
    pub bloods: [f64; 2],
    pub maneuvers: [ManeuverId; 2],
    pub substeps: usize,
    pub crash_reasons: [CrashReason; 2],
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepResult {
    pub obs: Observation,
    pub reward: f64,
    pub done: bool,
    pub outcome: Outcome,
    pub info: StepInfo,
}

#[derive(Clone, Debug)]
pub struct DogfightEnv {
    pub config: EpisodeConfig,
    airframe: Airframe,
    gains: ControllerGains,
    craft: Option<[Aircraft; 2]>,
    statuses: [CombatStatus; 2],
    outcome: Outcome,
    steps: usize,
    time: f64,
    last_obs: Observation,
    last_geom: Option<RelativeGeometry>,
    recording: bool,
    trajectory: Vec<TrajectoryRow>,
}

impl DogfightEnv {
    pub fn new(config: EpisodeConfig) -> Self {
        let airframe = Airframe::f16();
        let gains = ControllerGains::standard(&airframe.config.limits);
        Self::with_parts(config, airframe, gains)
    }

    pub fn with_parts(config: EpisodeConfig, airframe: Airframe, gains: ControllerGains) -> Self {
        Self {
            config,
            airframe,
            gains,
            craft: None,
            statuses: [CombatStatus::default(); 2],
            outcome: Outcome::Ongoing,
            steps: 0,
            time: 0.0,
            last_obs: Observation([0.0; OBS_DIM]),
            last_geom: None,
            recording: false,
            trajectory: Vec::new(),
        }
    }

    /// Keep a per-substep trajectory from the next reset on.
    pub fn set_recording(&mut self, on: bool) {
        self.recording = on;
    }

    pub fn trajectory(&self) -> &[TrajectoryRow] {
        &self.trajectory
    }

    /// Starts a new episode, drawing initial conditions from `rng` unless
    /// the configured scenario fixes them.
    pub fn reset<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<Observation> {
        let inits = match self.config.scenario.initial_conditions() {
            Some(inits) => inits,
            None => loop {
                let blue = self.config.sample_init(rng);
                let red = self.config.sample_init(rng);
                let gap = Vector3::from(blue.pos) - Vector3::from(red.pos);
                // redraw starts that are closer than the minimum gun range
                if gap.norm() >= ZONE_MIN_RANGE {
                    break [blue, red];
                }
            },
        };
        self.reset_to(inits)
    }

    /// Starts a new episode from explicit `[blue, red]` initial conditions.
    pub fn reset_to(&mut self, inits: [AircraftInit; 2]) -> Result<Observation> {
        let trimmed = |init: &AircraftInit| -> Result<BodyState> {
            let target = TrimTarget {
                altitude: -init.pos[2],
                mach: init.mach,
            };
            let (mut state, _) = trim_search(target, &self.airframe)?;
            state.pos = Vector3::from(init.pos);
            state.euler.z = crate::angles::wrap_pi(init.yaw_deg.to_radians());
            Ok(state)
        };
        self.reset_states([trimmed(&inits[0])?, trimmed(&inits[1])?])
    }

    /// Starts a new episode from full `[blue, red]` states. Controllers are
    /// preloaded with the current surface positions.
    pub fn reset_states(&mut self, states: [BodyState; 2]) -> Result<Observation> {
        let make = |state: BodyState| {
            let mut bank = ControllerBank::new(self.gains, Default::default(), self.airframe.config.limits);
            bank.preload(&state.surfaces);
            Aircraft {
                state,
                bank,
                ctx: ManeuverContext::default(),
                maneuver: ManeuverId::StraightFlight,
            }
        };
        let craft = states.map(make);
        self.last_obs = observe(&craft[0].state, &craft[1].state, &self.config.norm)?;
        self.last_geom = Some(relative_geometry(&craft[0].state, &craft[1].state)?);
        self.statuses = [CombatStatus::default(); 2];
        self.outcome = Outcome::Ongoing;
        self.steps = 0;
        self.time = 0.0;
        self.trajectory.clear();
        if self.recording {
            self.record(&craft);
        }
        self.craft = Some(craft);
        Ok(self.last_obs)
    }

    pub fn outcome(&self) -> Outcome {
        self.outcome
    }

    pub fn decision_steps(&self) -> usize {
        self.steps
    }

    pub fn statuses(&self) -> [CombatStatus; 2] {
        self.statuses
    }

    pub fn states(&self) -> Option<[BodyState; 2]> {
        self.craft.as_ref().map(|c| [c[0].state, c[1].state])
    }

    pub fn summary(&self, seed: Option<u64>) -> EpisodeSummary {
        EpisodeSummary {
            outcome: self.outcome,
            steps: self.steps,
            blood_blue: self.statuses[0].blood,
            blood_red: self.statuses[1].blood,
            seed,
        }
    }

    /// What the decision tree with `options` would fly for `side` now.
    pub fn dt_decision(&self, side: Side, options: DtOptions) -> Result<ManeuverId> {
        let craft = self.craft.as_ref().ok_or(Error::EpisodeFinished)?;
        let (own, opp) = match side {
            Side::Blue => (&craft[0].state, &craft[1].state),
            Side::Red => (&craft[1].state, &craft[0].state),
        };
        let own_air = air_data(&own.vel_body, own.altitude())?;
        let opp_air = air_data(&opp.vel_body, opp.altitude())?;
        let geom = relative_geometry(own, opp)?;
        Ok(decide(own, &own_air, opp, &opp_air, &geom, options, &self.config.dt_params))
    }

    /// Blue flies `action`, red flies the configured decision tree.
    pub fn step(&mut self, action: ManeuverId) -> Result<StepResult> {
        if self.craft.is_none() || self.outcome.is_terminal() {
            return Err(Error::EpisodeFinished);
        }
        let red = self.dt_decision(Side::Red, self.config.red)?;
        self.step_pair(action, red)
    }

    /// Advances one decision period with both maneuvers given. Both sides
    /// decide from the state at the start of the period.
    pub fn step_pair(&mut self, blue: ManeuverId, red: ManeuverId) -> Result<StepResult> {
        if self.outcome.is_terminal() {
            return Err(Error::EpisodeFinished);
        }
        let mut craft = self.craft.take().ok_or(Error::EpisodeFinished)?;
        craft[0].maneuver = blue;
        craft[1].maneuver = red;
        let prev_bloods = [self.statuses[0].blood, self.statuses[1].blood];
        let dt = self.config.dt;
        let mut substeps = 0;
        for k in 0..self.config.substeps {
            let before = [craft[0].state, craft[1].state];
            let mut diverged = [false; 2];
            for i in 0..2 {
                match advance(&self.airframe, &mut craft[i], &before[1 - i], &self.config.guidance, dt) {
                    Ok(next) => craft[i].state = next,
                    Err(_) => diverged[i] = true,
                }
            }
            for i in 0..2 {
                if diverged[i] {
                    self.statuses[i].crash(CrashReason::NonFinite);
                }
            }
            let (b, r) = (&craft[0].state, &craft[1].state);
            let geoms = (relative_geometry(b, r), relative_geometry(r, b));
            if let (Ok(gb), Ok(gr)) = &geoms {
                self.statuses = apply_damage(self.statuses, in_engagement_zone(gb), in_engagement_zone(gr), dt);
                self.last_geom = Some(*gb);
            }
            let distance = (r.pos - b.pos).norm();
            let out_of_time = k + 1 == self.config.substeps && self.steps + 1 >= self.config.max_decision_steps;
            self.outcome = check_termination([b, r], &mut self.statuses, distance, out_of_time);
            self.time += dt;
            substeps += 1;
            if self.recording {
                self.record(&craft);
            }
            if self.outcome.is_terminal() {
                break;
            }
        }
        self.craft = Some(craft);
        self.steps += 1;

        let [b, r] = self.states().expect("craft restored above");
        if let Ok(obs) = observe(&b, &r, &self.config.norm) {
            if obs.is_finite() {
                self.last_obs = obs;
            }
        }
        let new_bloods = [self.statuses[0].blood, self.statuses[1].blood];
        let geom = self.last_geom.expect("set on reset");
        let reward = reward(prev_bloods, new_bloods, &geom, self.outcome, &self.config.reward);
        Ok(StepResult {
            obs: self.last_obs,
            reward,
            done: self.outcome.is_terminal(),
            outcome: self.outcome,
            info: StepInfo {
                bloods: new_bloods,
                maneuvers: [blue, red],
                substeps,
                crash_reasons: [self.statuses[0].crash_reason, self.statuses[1].crash_reason],
            },
        })
    }

    fn record(&mut self, craft: &[Aircraft; 2]) {
        for (i, side) in [Side::Blue, Side::Red].into_iter().enumerate() {
            let (own, opp) = (&craft[i].state, &craft[1 - i].state);
            let air = air_data(&own.vel_body, own.altitude()).ok();
            let geom = relative_geometry(own, opp).ok();
            let nan = f64::NAN;
            self.trajectory.push(TrajectoryRow {
                t: self.time,
                side,
                p1: own.pos.x,
                p2: own.pos.y,
                p3: own.pos.z,
                phi: own.euler.x.to_degrees(),
                theta: own.euler.y.to_degrees(),
                psi: own.euler.z.to_degrees(),
                v: air.map_or(nan, |a| a.v),
                mach: air.map_or(nan, |a| a.mach),
                alpha: air.map_or(nan, |a| a.alpha.to_degrees()),
                beta: air.map_or(nan, |a| a.beta.to_degrees()),
                blood: self.statuses[i].blood,
                maneuver_id: craft[i].maneuver.index(),
                d: geom.map_or(nan, |g| g.d),
                ata: geom.map_or(nan, |g| g.ata),
                aa: geom.map_or(nan, |g| g.aa),
                hca: geom.map_or(nan, |g| g.hca),
            });
        }
    }
}

/// One physics substep for one aircraft against a frozen opponent.
fn advance(
    airframe: &Airframe,
    craft: &mut Aircraft,
    opp: &BodyState,
    guidance: &GuidanceParams,
    dt: f64,
) -> Result<BodyState> {
    let air = air_data(&craft.state.vel_body, craft.state.altitude())?;
    let (sp, ctx) = maneuver_setpoints(craft.maneuver, &craft.state, &air, opp, &craft.ctx, guidance)?;
    craft.ctx = ctx;
    let cmd = craft.bank.control_law(&craft.state, &air, &sp, dt);
    let next = airframe.step(&craft.state, &cmd, dt)?;
    if !next.is_finite() {
        return Err(Error::NonFiniteState);
    }
    Ok(next)
}
