use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use dogfight_core::airframe::aero::{AeroTables, EngineTables};
use dogfight_core::airframe::{AircraftConfig, Airframe};
use dogfight_core::ddqn::TrainConfig;
use dogfight_core::dt_policy::{DtOptions, DtParams};
use dogfight_core::env::{DogfightEnv, EpisodeConfig, Normalization, RewardWeights, Scenario};
use dogfight_core::lowlevel::{ControllerGains, PidGains};
use dogfight_core::maneuvers::GuidanceParams;

/// Every tunable of a run as flat `key = value` pairs. Missing keys take the
/// defaults below; unknown keys are rejected so typos do not pass silently.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub out: PathBuf,
    /// Directory with replacement aerodynamic and engine tables.
    pub tables_dir: Option<PathBuf>,

    pub pid_mach: [f64; 3],
    pub pid_alpha: [f64; 3],
    pub pid_roll: [f64; 3],
    pub pid_sideslip: [f64; 3],
    pub alpha_ref_rate: f64,

    pub guidance_k_chi: f64,
    pub guidance_k_zeta: f64,
    pub guidance_k_alpha_n: f64,
    pub guidance_alpha_min: f64,
    pub guidance_alpha_max: f64,
    pub guidance_load_min: f64,
    pub guidance_load_max: f64,
    pub guidance_k_h: f64,
    pub climb_path_pitch: f64,

    pub dt_h_protect: f64,
    pub dt_ma_protect: f64,
    pub dt_d_close: f64,
    pub dt_ata_aim: f64,
    pub dt_ata_escape: f64,
    pub dt_aa_escape: f64,
    pub dt_aa_yoyo_min: f64,
    pub dt_aa_yoyo_max: f64,

    pub init_pos_min: [f64; 3],
    pub init_pos_max: [f64; 3],
    pub init_mach: [f64; 2],
    pub init_yaw: [f64; 2],
    pub max_decision_steps: usize,
    pub substeps: usize,
    pub dt: f64,
    pub scenario: String,
    /// Decision tree flying red, 1..=8.
    pub strategy: usize,

    pub norm_height: f64,
    pub norm_speed: f64,
    pub norm_angle: f64,
    pub norm_distance: f64,
    pub reward_terminal: f64,
    pub reward_damage: f64,
    pub reward_angle: f64,

    pub gamma: f64,
    pub epsilon: f64,
    pub target_sync: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub steps: usize,
    pub buffer_capacity: usize,
    pub hidden: Vec<usize>,
    pub checkpoint_every: usize,

    pub episodes: usize,
}

fn triple(g: &PidGains) -> [f64; 3] {
    [g.kp, g.ki, g.kd]
}

fn with_triple(g: PidGains, k: [f64; 3]) -> PidGains {
    PidGains {
        kp: k[0],
        ki: k[1],
        kd: k[2],
        ..g
    }
}

impl Default for RunConfig {
    fn default() -> Self {
        let env = EpisodeConfig::default();
        let gains = ControllerGains::standard(&AircraftConfig::f16().limits);
        let train = TrainConfig::default();
        let (g, p) = (env.guidance, env.dt_params);
        Self {
            seed: 0,
            out: PathBuf::from("runs"),
            tables_dir: None,
            pid_mach: triple(&gains.mach),
            pid_alpha: triple(&gains.alpha),
            pid_roll: triple(&gains.roll),
            pid_sideslip: triple(&gains.sideslip),
            alpha_ref_rate: gains.alpha_ref_rate,
            guidance_k_chi: g.k_chi,
            guidance_k_zeta: g.k_zeta,
            guidance_k_alpha_n: g.k_alpha_n,
            guidance_alpha_min: g.alpha_min,
            guidance_alpha_max: g.alpha_max,
            guidance_load_min: g.load_min,
            guidance_load_max: g.load_max,
            guidance_k_h: g.k_h,
            climb_path_pitch: g.climb_chi,
            dt_h_protect: p.h_protect,
            dt_ma_protect: p.ma_protect,
            dt_d_close: p.d_close,
            dt_ata_aim: p.ata_aim,
            dt_ata_escape: p.ata_escape,
            dt_aa_escape: p.aa_escape,
            dt_aa_yoyo_min: p.aa_yoyo_min,
            dt_aa_yoyo_max: p.aa_yoyo_max,
            init_pos_min: env.pos_min,
            init_pos_max: env.pos_max,
            init_mach: env.mach_range,
            init_yaw: env.yaw_range_deg,
            max_decision_steps: env.max_decision_steps,
            substeps: env.substeps,
            dt: env.dt,
            scenario: "random".into(),
            strategy: env.red.strategy_index(),
            norm_height: env.norm.height,
            norm_speed: env.norm.speed,
            norm_angle: env.norm.angle,
            norm_distance: env.norm.distance,
            reward_terminal: env.reward.terminal,
            reward_damage: env.reward.damage,
            reward_angle: env.reward.angle,
            gamma: train.gamma,
            epsilon: train.epsilon,
            target_sync: train.target_sync,
            learning_rate: train.learning_rate,
            batch_size: train.batch_size,
            steps: train.total_steps,
            buffer_capacity: train.buffer_capacity,
            hidden: train.hidden,
            checkpoint_every: train.checkpoint_every,
            episodes: 400,
        }
    }
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path).with_context(|| format!("config: cannot read {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("config: cannot parse {}", path.display()))
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        let text = toml::to_string(self).context("config: serialize")?;
        let path = dir.join("config.toml");
        std::fs::write(&path, text).with_context(|| format!("config: cannot write {}", path.display()))
    }

    pub fn red(&self) -> Result<DtOptions> {
        strategy(self.strategy)
    }

    pub fn scenario(&self) -> Result<Scenario> {
        self.scenario
            .parse()
            .map_err(|_| anyhow::anyhow!("config: unknown scenario {:?} (expected random, case1 or case2)", self.scenario))
    }

    pub fn episode(&self) -> Result<EpisodeConfig> {
        let d = EpisodeConfig::default();
        Ok(EpisodeConfig {
            pos_min: self.init_pos_min,
            pos_max: self.init_pos_max,
            mach_range: self.init_mach,
            yaw_range_deg: self.init_yaw,
            max_decision_steps: self.max_decision_steps,
            substeps: self.substeps,
            dt: self.dt,
            red: self.red()?,
            dt_params: DtParams {
                h_protect: self.dt_h_protect,
                ma_protect: self.dt_ma_protect,
                d_close: self.dt_d_close,
                ata_aim: self.dt_ata_aim,
                ata_escape: self.dt_ata_escape,
                aa_escape: self.dt_aa_escape,
                aa_yoyo_min: self.dt_aa_yoyo_min,
                aa_yoyo_max: self.dt_aa_yoyo_max,
            },
            guidance: GuidanceParams {
                k_chi: self.guidance_k_chi,
                k_zeta: self.guidance_k_zeta,
                k_alpha_n: self.guidance_k_alpha_n,
                alpha_min: self.guidance_alpha_min,
                alpha_max: self.guidance_alpha_max,
                load_min: self.guidance_load_min,
                load_max: self.guidance_load_max,
                k_h: self.guidance_k_h,
                climb_chi: self.climb_path_pitch,
                ..d.guidance
            },
            norm: Normalization {
                height: self.norm_height,
                speed: self.norm_speed,
                angle: self.norm_angle,
                distance: self.norm_distance,
            },
            reward: RewardWeights {
                terminal: self.reward_terminal,
                damage: self.reward_damage,
                angle: self.reward_angle,
            },
            scenario: self.scenario()?,
        })
    }

    pub fn train(&self) -> TrainConfig {
        TrainConfig {
            gamma: self.gamma,
            epsilon: self.epsilon,
            target_sync: self.target_sync,
            learning_rate: self.learning_rate,
            batch_size: self.batch_size,
            total_steps: self.steps,
            buffer_capacity: self.buffer_capacity,
            hidden: self.hidden.clone(),
            checkpoint_every: self.checkpoint_every,
        }
    }

    pub fn airframe(&self) -> Result<Airframe> {
        match &self.tables_dir {
            None => Ok(Airframe::f16()),
            Some(dir) => {
                let aero = AeroTables::load(dir).context("airframe: aerodynamic tables")?;
                let engine = EngineTables::load(dir).context("airframe: engine tables")?;
                Ok(Airframe::new(AircraftConfig::f16(), Arc::new(aero), Arc::new(engine)))
            }
        }
    }

    pub fn gains(&self, airframe: &Airframe) -> ControllerGains {
        let g = ControllerGains::standard(&airframe.config.limits);
        ControllerGains {
            mach: with_triple(g.mach, self.pid_mach),
            alpha: with_triple(g.alpha, self.pid_alpha),
            roll: with_triple(g.roll, self.pid_roll),
            sideslip: with_triple(g.sideslip, self.pid_sideslip),
            alpha_ref_rate: self.alpha_ref_rate,
        }
    }

    /// Environment with every override applied.
    pub fn env(&self) -> Result<DogfightEnv> {
        let airframe = self.airframe()?;
        let gains = self.gains(&airframe);
        Ok(DogfightEnv::with_parts(self.episode()?, airframe, gains))
    }
}

pub fn strategy(index: usize) -> Result<DtOptions> {
    match DtOptions::strategy(index) {
        Some(o) => Ok(o),
        None => bail!("dt_policy: strategy {index} out of range 1..=8"),
    }
}
