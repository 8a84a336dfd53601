//! Rule-based opponent. Rules are checked in the order protection, escape,
//! yo-yo, tracking; the first that matches picks the maneuver.

use serde::{Deserialize, Serialize};

use crate::airframe::{AirData, BodyState};
use crate::engagement::RelativeGeometry;
use crate::maneuvers::ManeuverId;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DtOptions {
    /// Self-protection.
    pub sp: bool,
    /// Escape.
    pub es: bool,
    /// Yo-yo.
    pub yy: bool,
}

impl DtOptions {
    /// Strategies 1..=8: none, SP, ES, YY, ES+YY, SP+YY, SP+ES, all.
    pub fn strategy(index: usize) -> Option<Self> {
        let (sp, es, yy) = match index {
            1 => (false, false, false),
            2 => (true, false, false),
            3 => (false, true, false),
            4 => (false, false, true),
            5 => (false, true, true),
            6 => (true, false, true),
            7 => (true, true, false),
            8 => (true, true, true),
            _ => return None,
        };
        Some(Self { sp, es, yy })
    }

    pub fn strategy_index(&self) -> usize {
        (1..=8).find(|&i| Self::strategy(i) == Some(*self)).expect("all combinations are strategies")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DtParams {
    pub h_protect: f64,
    pub ma_protect: f64,
    pub d_close: f64,
    pub ata_aim: f64,
    pub ata_escape: f64,
    pub aa_escape: f64,
    pub aa_yoyo_min: f64,
    pub aa_yoyo_max: f64,
}

impl Default for DtParams {
    fn default() -> Self {
        Self {
            h_protect: 1000.0,
            ma_protect: 0.3,
            d_close: 3000.0,
            ata_aim: 30.0,
            ata_escape: 120.0,
            aa_escape: 120.0,
            aa_yoyo_min: 30.0,
            aa_yoyo_max: 60.0,
        }
    }
}

/// Maneuver for `own` against `opp`; `geom` is measured from `own`.
pub fn decide(
    own: &BodyState,
    own_air: &AirData,
    opp: &BodyState,
    opp_air: &AirData,
    geom: &RelativeGeometry,
    options: DtOptions,
    params: &DtParams,
) -> ManeuverId {
    if options.sp && own.altitude() < params.h_protect {
        return ManeuverId::Climb;
    }
    if options.sp && own_air.mach < params.ma_protect {
        return ManeuverId::StraightFlight;
    }
    if options.es && geom.d < params.d_close && geom.ata > params.ata_escape && geom.aa > params.aa_escape {
        // p3 is down-positive: smaller p3 means higher
        return if own.pos.z < opp.pos.z {
            ManeuverId::Somersault
        } else {
            ManeuverId::SplitS
        };
    }
    if options.yy
        && geom.d > params.d_close
        && geom.ata < params.ata_aim
        && params.aa_yoyo_min < geom.aa
        && geom.aa < params.aa_yoyo_max
    {
        return if own_air.v > opp_air.v {
            ManeuverId::HighYoYo
        } else {
            ManeuverId::LowYoYo
        };
    }
    if geom.d < params.d_close && geom.ata < params.ata_aim {
        return ManeuverId::AttitudeTracking;
    }
    ManeuverId::PositionTracking
}
