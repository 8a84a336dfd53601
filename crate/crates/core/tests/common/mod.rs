#![allow(dead_code)]

use dogfight_core::airframe::{air_data, trim_search, AirData, Airframe, BodyState, ControlSurfaces, TrimTarget};
use dogfight_core::lowlevel::ControllerBank;
use dogfight_core::maneuvers::Setpoints;

pub const DT: f64 = 0.01;

pub struct Sample {
    pub t: f64,
    pub state: BodyState,
    pub air: AirData,
}

/// Trimmed F-16 with a controller bank preloaded to the trim commands.
pub fn trimmed(altitude: f64, mach: f64) -> (Airframe, BodyState, ControlSurfaces, ControllerBank) {
    let af = Airframe::f16();
    let (state, trim) = trim_search(TrimTarget { altitude, mach }, &af).expect("trim");
    let mut bank = ControllerBank::standard(af.config.limits);
    bank.preload(&trim);
    (af, state, trim, bank)
}

/// Flies the closed loop for `seconds` with setpoints from `demand`.
pub fn fly(
    af: &Airframe,
    mut state: BodyState,
    bank: &mut ControllerBank,
    seconds: f64,
    mut demand: impl FnMut(&BodyState, &AirData) -> Setpoints,
) -> Vec<Sample> {
    let mut out = Vec::new();
    for k in 0..(seconds / DT).round() as usize {
        let air = air_data(&state.vel_body, state.altitude()).unwrap();
        let sp = demand(&state, &air);
        let cmd = bank.control_law(&state, &air, &sp, DT);
        state = af.step(&state, &cmd, DT).unwrap();
        let air = air_data(&state.vel_body, state.altitude()).unwrap();
        out.push(Sample {
            t: (k + 1) as f64 * DT,
            state,
            air,
        });
    }
    out
}
