//! The basic flight maneuver library. Every maneuver reduces to an angle of
//! attack and roll setpoint for the low-level controller.
//!
//! The guidance chain is: desired path angles, then trajectory-frame loads,
//! then bank angle and normal load, then angle of attack.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::airframe::{AirData, BodyState};
use crate::angles::{wrap_deg, wrap_pi};
use crate::{Error, Result, G};

/// Angle of attack and roll demand, both in degrees.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Setpoints {
    pub alpha_d: f64,
    pub phi_d: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ManeuverId {
    PositionTracking = 0,
    AttitudeTracking = 1,
    StraightFlight = 2,
    Climb = 3,
    Somersault = 4,
    SplitS = 5,
    HighYoYo = 6,
    LowYoYo = 7,
}

impl ManeuverId {
    pub const ALL: [ManeuverId; 8] = [
        ManeuverId::PositionTracking,
        ManeuverId::AttitudeTracking,
        ManeuverId::StraightFlight,
        ManeuverId::Climb,
        ManeuverId::Somersault,
        ManeuverId::SplitS,
        ManeuverId::HighYoYo,
        ManeuverId::LowYoYo,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(index: usize) -> Option<Self> {
        Self::ALL.get(index).copied()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum SplitSPhase {
    #[default]
    Reverse,
    Pull,
    Recover,
}

/// Per-aircraft memory carried between control substeps.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ManeuverContext {
    /// Maneuver that produced the last setpoints.
    pub active: Option<ManeuverId>,
    pub splits_phase: SplitSPhase,
    /// Angle of attack held while rolling inverted, degrees.
    pub splits_hold_alpha: f64,
    /// Pitch at the previous substep, used for the rising-edge test.
    pub prev_theta: Option<f64>,
    /// Set once the pull has taken the nose clearly below the horizon.
    pub splits_armed: bool,
}

/// Guidance constants. Angle gains act on errors in degrees, so
/// `k_chi = 0.01` turns a 1 degree path error into 0.01 rad/s of path rate.
/// At 0.02 the vertical path loop outruns the angle-of-attack loop and
/// oscillates; per radian either value is far too slow to track.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GuidanceParams {
    pub k_chi: f64,
    pub k_zeta: f64,
    /// Degrees of angle of attack per g of normal load.
    pub k_alpha_n: f64,
    pub alpha_min: f64,
    pub alpha_max: f64,
    /// Angle of attack for full-load maneuvers, degrees.
    pub alpha_full_max: f64,
    pub load_min: f64,
    pub load_max: f64,
    pub k_h: f64,
    /// Path pitch demanded by the climb maneuver, degrees.
    pub climb_chi: f64,
    /// Tolerance on inverted flight that ends the split-S roll, degrees.
    pub splits_inverted_tol: f64,
    /// Pitch the pull must pass below before recovery can trigger, degrees.
    pub splits_arm_pitch: f64,
}

impl Default for GuidanceParams {
    fn default() -> Self {
        Self {
            k_chi: 0.01,
            k_zeta: 0.01,
            k_alpha_n: 4.0,
            alpha_min: -4.0,
            alpha_max: 20.0,
            alpha_full_max: 30.0,
            load_min: -1.0,
            load_max: 7.5,
            k_h: 0.1,
            climb_chi: 20.0,
            splits_inverted_tol: 10.0,
            splits_arm_pitch: -10.0,
        }
    }
}

impl GuidanceParams {
    /// Path gains converted to act on errors in radians.
    pub fn gains_per_radian(&self) -> (f64, f64) {
        let k = 180.0 / std::f64::consts::PI;
        (self.k_chi * k, self.k_zeta * k)
    }
}

/// Path pitch and path yaw of the line from `own` to `target`, radians.
pub fn desired_path_angles(own: &Vector3<f64>, target: &Vector3<f64>) -> Result<(f64, f64)> {
    offset_path_angles(own, target, 0.0)
}

/// Same as [`desired_path_angles`] with the aim point raised by `dh` metres.
fn offset_path_angles(own: &Vector3<f64>, target: &Vector3<f64>, dh: f64) -> Result<(f64, f64)> {
    let delta = target - own;
    let distance = delta.norm();
    if distance < 1.0 {
        return Err(Error::CoincidentPositions { distance });
    }
    let horizontal = delta.x.hypot(delta.y);
    let chi = (-delta.z + dh).atan2(horizontal);
    let zeta = delta.y.atan2(delta.x);
    Ok((chi, zeta))
}

/// Trajectory-frame loads in g that steer the path angles at rates
/// proportional to their errors. Gains are per radian here.
pub fn loads_from_angle_errors(
    v: f64,
    chi: f64,
    e_chi: f64,
    e_zeta: f64,
    k_chi: f64,
    k_zeta: f64,
) -> (f64, f64) {
    let n2 = v / G * k_zeta * e_zeta * chi.cos();
    let n3 = v / G * k_chi * e_chi + chi.cos();
    (n2, n3)
}

/// Bank angle (radians) that tilts lift onto the load vector, and the
/// clipped load magnitude.
pub fn bank_and_load(n2: f64, n3: f64, params: &GuidanceParams) -> Result<(f64, f64)> {
    if n2 == 0.0 && n3 == 0.0 {
        return Err(Error::ZeroLoadVector);
    }
    let phi = n2.atan2(n3);
    let nn = (n2 * phi.sin() + n3 * phi.cos()).clamp(params.load_min, params.load_max);
    Ok((phi, nn))
}

/// Angle of attack demand in degrees for a normal load in g.
pub fn alpha_from_load(nn: f64, params: &GuidanceParams) -> f64 {
    (params.k_alpha_n * nn).clamp(params.alpha_min, params.alpha_max)
}

/// Vertical aim-point offset proportional to kinetic energy per unit mass.
pub fn yo_yo_offset(v: f64, k_h: f64) -> f64 {
    k_h * v * v / G
}

/// Path pitch and path yaw of the earth-frame velocity, radians.
pub fn path_angles(state: &BodyState) -> (f64, f64) {
    let v = state.vel_earth();
    ((-v.z).atan2(v.x.hypot(v.y)), v.y.atan2(v.x))
}

fn setpoints(alpha_d: f64, phi_d_rad: f64, params: &GuidanceParams) -> Setpoints {
    Setpoints {
        alpha_d: alpha_d.clamp(params.alpha_min, params.alpha_full_max),
        phi_d: wrap_deg(phi_d_rad.to_degrees()),
    }
}

/// Full tracking pipeline for the given path-angle errors.
fn track(v: f64, chi: f64, e_chi: f64, e_zeta: f64, params: &GuidanceParams) -> Setpoints {
    let (k_chi, k_zeta) = params.gains_per_radian();
    let (n2, n3) = loads_from_angle_errors(v, chi, e_chi, e_zeta, k_chi, k_zeta);
    match bank_and_load(n2, n3, params) {
        Ok((phi, nn)) => setpoints(alpha_from_load(nn, params), phi, params),
        // no load demanded at all: coast wings level
        Err(_) => setpoints(0.0, 0.0, params),
    }
}

/// Wings-level flight regulating the path pitch toward `chi_d` (radians).
fn wings_level(v: f64, chi: f64, chi_d: f64, params: &GuidanceParams) -> Setpoints {
    let (k_chi, _) = params.gains_per_radian();
    let (_, n3) = loads_from_angle_errors(v, chi, chi_d - chi, 0.0, k_chi, 0.0);
    let nn = n3.clamp(params.load_min, params.load_max);
    setpoints(alpha_from_load(nn, params), 0.0, params)
}

/// 0 when upright, 180 degrees when inverted.
fn hemisphere_roll(phi: f64) -> f64 {
    if phi.abs() <= std::f64::consts::FRAC_PI_2 {
        0.0
    } else {
        std::f64::consts::PI
    }
}

/// Setpoints for maneuver `id`. The returned context must be passed back on
/// the next call; it is reset whenever `id` differs from the previous one.
pub fn maneuver_setpoints(
    id: ManeuverId,
    own: &BodyState,
    own_air: &AirData,
    opp: &BodyState,
    ctx: &ManeuverContext,
    params: &GuidanceParams,
) -> Result<(Setpoints, ManeuverContext)> {
    let mut ctx = if ctx.active == Some(id) {
        *ctx
    } else {
        ManeuverContext {
            active: Some(id),
            splits_hold_alpha: own_air.alpha.to_degrees(),
            ..ManeuverContext::default()
        }
    };
    let v = own_air.v;
    let (chi, zeta) = path_angles(own);
    let [phi, theta, psi] = [own.euler.x, own.euler.y, own.euler.z];

    let sp = match id {
        ManeuverId::PositionTracking => {
            let (chi_d, zeta_d) = desired_path_angles(&own.pos, &opp.pos)?;
            track(v, chi, chi_d - chi, wrap_pi(zeta_d - zeta), params)
        }
        ManeuverId::AttitudeTracking => {
            let (chi_d, zeta_d) = desired_path_angles(&own.pos, &opp.pos)?;
            track(v, chi, chi_d - theta, wrap_pi(zeta_d - psi), params)
        }
        ManeuverId::HighYoYo | ManeuverId::LowYoYo => {
            let sign = if id == ManeuverId::HighYoYo { 1.0 } else { -1.0 };
            let dh = sign * yo_yo_offset(v, params.k_h);
            let (chi_d, zeta_d) = offset_path_angles(&own.pos, &opp.pos, dh)?;
            track(v, chi, chi_d - chi, wrap_pi(zeta_d - zeta), params)
        }
        ManeuverId::StraightFlight => wings_level(v, chi, 0.0, params),
        ManeuverId::Climb => wings_level(v, chi, params.climb_chi.to_radians(), params),
        ManeuverId::Somersault => setpoints(params.alpha_full_max, hemisphere_roll(phi), params),
        ManeuverId::SplitS => {
            if ctx.splits_phase == SplitSPhase::Reverse
                && wrap_deg(phi.to_degrees() - 180.0).abs() < params.splits_inverted_tol
            {
                ctx.splits_phase = SplitSPhase::Pull;
                ctx.prev_theta = None;
            }
            if ctx.splits_phase == SplitSPhase::Pull {
                if theta.to_degrees() < params.splits_arm_pitch {
                    ctx.splits_armed = true;
                }
                if ctx.splits_armed && ctx.prev_theta.is_some_and(|prev| prev < 0.0) && theta >= 0.0 {
                    ctx.splits_phase = SplitSPhase::Recover;
                }
            }
            ctx.prev_theta = Some(theta);
            match ctx.splits_phase {
                SplitSPhase::Reverse => setpoints(ctx.splits_hold_alpha, std::f64::consts::PI, params),
                // past the vertical the Euler roll flips to upright, so the
                // roll demand follows the hemisphere instead of staying at 180
                SplitSPhase::Pull => setpoints(params.alpha_full_max, hemisphere_roll(phi), params),
                SplitSPhase::Recover => wings_level(v, chi, 0.0, params),
            }
        }
    };
    Ok((sp, ctx))
}

/// Point-mass state used as a guidance oracle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Simple3DofState {
    pub pos: Vector3<f64>,
    pub v: f64,
    /// Path pitch, radians.
    pub chi: f64,
    /// Path yaw, radians.
    pub zeta: f64,
}

impl Simple3DofState {
    /// Time derivative of (pos, v, chi, zeta).
    pub fn rates(&self, n_l: f64, n_n: f64, phi: f64) -> Result<(Vector3<f64>, f64, f64, f64)> {
        let cos_chi = self.chi.cos();
        if cos_chi.abs() < 85f64.to_radians().cos() {
            return Err(Error::PathSingularity {
                chi_deg: self.chi.to_degrees(),
            });
        }
        let pos = Vector3::new(
            self.v * cos_chi * self.zeta.cos(),
            self.v * cos_chi * self.zeta.sin(),
            -self.v * self.chi.sin(),
        );
        let v_dot = G * (n_l - self.chi.sin());
        let chi_dot = G * (n_n * phi.cos() - cos_chi) / self.v;
        let zeta_dot = G * n_n * phi.sin() / (self.v * cos_chi);
        Ok((pos, v_dot, chi_dot, zeta_dot))
    }
}

/// One forward-Euler step of the point-mass model.
pub fn simple_3dof_step(state: &Simple3DofState, n_l: f64, n_n: f64, phi: f64, dt: f64) -> Result<Simple3DofState> {
    let (pos, v_dot, chi_dot, zeta_dot) = state.rates(n_l, n_n, phi)?;
    Ok(Simple3DofState {
        pos: state.pos + pos * dt,
        v: state.v + v_dot * dt,
        chi: state.chi + chi_dot * dt,
        zeta: wrap_pi(state.zeta + zeta_dot * dt),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::airframe::air_data;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn p() -> GuidanceParams {
        GuidanceParams::default()
    }

    fn state_at(pos: [f64; 3], speed: f64, yaw_deg: f64) -> (BodyState, AirData) {
        let s = BodyState::level(Vector3::from(pos), speed, yaw_deg.to_radians());
        let a = air_data(&s.vel_body, s.altitude()).unwrap();
        (s, a)
    }

    #[test]
    fn path_angle_examples() {
        let own = Vector3::new(0.0, 0.0, -5000.0);
        let (c, z) = desired_path_angles(&own, &Vector3::new(1000.0, 0.0, -5000.0)).unwrap();
        assert_eq!((c, z), (0.0, 0.0));
        let (c, z) = desired_path_angles(&own, &Vector3::new(0.0, 1000.0, -5000.0)).unwrap();
        assert_relative_eq!(c, 0.0);
        assert_relative_eq!(z.to_degrees(), 90.0, epsilon = 1e-12);
        let (c, z) = desired_path_angles(&own, &Vector3::new(1000.0, 0.0, -6000.0)).unwrap();
        assert_relative_eq!(c.to_degrees(), 45.0, epsilon = 1e-12);
        assert_relative_eq!(z, 0.0);
        assert!(matches!(
            desired_path_angles(&own, &(own + Vector3::new(0.5, 0.0, 0.0))),
            Err(Error::CoincidentPositions { .. })
        ));
    }

    #[test]
    fn load_examples() {
        assert_eq!(loads_from_angle_errors(200.0, 0.0, 0.0, 0.0, 0.02, 0.02), (0.0, 1.0));
        let (_, n3) = loads_from_angle_errors(200.0, 0.0, 0.1, 0.0, 0.02, 0.02);
        assert_relative_eq!(n3, 200.0 / 9.81 * 0.02 * 0.1 + 1.0, epsilon = 1e-12);
        assert_relative_eq!(n3, 1.0408, epsilon = 1e-4);
        let (n2, n3) = loads_from_angle_errors(200.0, 60f64.to_radians(), 0.0, 0.0, 0.02, 0.02);
        assert_eq!(n2, 0.0);
        assert_relative_eq!(n3, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn per_degree_gain_conversion() {
        let (k, _) = p().gains_per_radian();
        assert_relative_eq!(k * 1f64.to_radians(), 0.01, epsilon = 1e-15);
    }

    #[test]
    fn bank_examples() {
        assert_eq!(bank_and_load(0.0, 1.0, &p()).unwrap(), (0.0, 1.0));
        let (phi, nn) = bank_and_load(1.0, 1.0, &p()).unwrap();
        assert_relative_eq!(phi.to_degrees(), 45.0, epsilon = 1e-12);
        assert_relative_eq!(nn, 2f64.sqrt(), epsilon = 1e-12);
        assert_eq!(bank_and_load(0.0, 10.0, &p()).unwrap().1, 7.5);
        assert!(matches!(bank_and_load(0.0, 0.0, &p()), Err(Error::ZeroLoadVector)));
        // pure vertical correction downward rolls inverted rather than 90 deg
        let (phi, nn) = bank_and_load(0.0, -0.5, &p()).unwrap();
        assert_relative_eq!(phi.abs(), std::f64::consts::PI);
        assert_relative_eq!(nn, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn alpha_examples() {
        assert_eq!(alpha_from_load(1.0, &p()), 4.0);
        assert_eq!(alpha_from_load(6.0, &p()), 20.0);
        assert_eq!(alpha_from_load(-2.0, &p()), -4.0);
    }

    #[test]
    fn yo_yo_examples() {
        assert_relative_eq!(yo_yo_offset(300.0, 0.1), 0.1 * 90000.0 / 9.81, epsilon = 1e-9);
        assert_relative_eq!(yo_yo_offset(300.0, 0.1), 917.4, epsilon = 0.05);
        assert_eq!(yo_yo_offset(0.0, 0.1), 0.0);
        assert_relative_eq!(yo_yo_offset(400.0, 0.1), 4.0 * yo_yo_offset(200.0, 0.1), epsilon = 1e-9);
    }

    #[test]
    fn straight_flight_level() {
        let (own, air) = state_at([0.0, 0.0, -5000.0], 200.0, 0.0);
        let (opp, _) = state_at([5000.0, 0.0, -5000.0], 200.0, 0.0);
        let (sp, _) =
            maneuver_setpoints(ManeuverId::StraightFlight, &own, &air, &opp, &ManeuverContext::default(), &p())
                .unwrap();
        assert_relative_eq!(sp.alpha_d, 4.0, epsilon = 1e-12);
        assert_eq!(sp.phi_d, 0.0);
    }

    #[test]
    fn somersault_hemisphere() {
        let (mut own, air) = state_at([0.0, 0.0, -5000.0], 200.0, 0.0);
        let (opp, _) = state_at([5000.0, 0.0, -5000.0], 200.0, 0.0);
        own.euler.x = 170f64.to_radians();
        let (sp, _) =
            maneuver_setpoints(ManeuverId::Somersault, &own, &air, &opp, &ManeuverContext::default(), &p()).unwrap();
        assert_eq!(sp.alpha_d, 30.0);
        assert_eq!(wrap_deg(sp.phi_d - 180.0), 0.0);
        own.euler.x = 80f64.to_radians();
        let (sp, _) =
            maneuver_setpoints(ManeuverId::Somersault, &own, &air, &opp, &ManeuverContext::default(), &p()).unwrap();
        assert_eq!(sp.phi_d, 0.0);
    }

    #[test]
    fn low_yo_yo_aim_point() {
        let (own, air) = state_at([0.0, 0.0, -5000.0], 250.0, 0.0);
        let (opp, _) = state_at([2000.0, 0.0, -5000.0], 250.0, 0.0);
        let dh = yo_yo_offset(250.0, 0.1);
        assert_relative_eq!(dh, 637.1, epsilon = 0.05);
        let (chi_d, _) = offset_path_angles(&own.pos, &opp.pos, -dh).unwrap();
        assert_relative_eq!(chi_d.to_degrees(), (-637.1f64 / 2000.0).atan().to_degrees(), epsilon = 1e-3);
        assert_relative_eq!(chi_d.to_degrees(), -17.67, epsilon = 5e-3);
        // a steep dive demand is flown by rolling inverted and pulling
        let (sp, _) =
            maneuver_setpoints(ManeuverId::LowYoYo, &own, &air, &opp, &ManeuverContext::default(), &p()).unwrap();
        assert_eq!(wrap_deg(sp.phi_d - 180.0), 0.0);
        assert!(sp.alpha_d > 0.0);
    }

    #[test]
    fn context_resets_on_switch() {
        let (mut own, air) = state_at([0.0, 0.0, -5000.0], 200.0, 0.0);
        let (opp, _) = state_at([5000.0, 0.0, -5000.0], 200.0, 0.0);
        own.euler.x = std::f64::consts::PI;
        let (_, ctx) =
            maneuver_setpoints(ManeuverId::SplitS, &own, &air, &opp, &ManeuverContext::default(), &p()).unwrap();
        assert_eq!(ctx.splits_phase, SplitSPhase::Pull);
        let (_, ctx) = maneuver_setpoints(ManeuverId::Climb, &own, &air, &opp, &ctx, &p()).unwrap();
        assert_eq!(ctx.splits_phase, SplitSPhase::Reverse);
        assert_eq!(ctx.active, Some(ManeuverId::Climb));
    }

    #[test]
    fn splits_phases_advance() {
        let (mut own, air) = state_at([0.0, 0.0, -5000.0], 200.0, 0.0);
        let (opp, _) = state_at([5000.0, 0.0, -5000.0], 200.0, 0.0);
        let (sp, ctx) =
            maneuver_setpoints(ManeuverId::SplitS, &own, &air, &opp, &ManeuverContext::default(), &p()).unwrap();
        assert_eq!(ctx.splits_phase, SplitSPhase::Reverse);
        assert_eq!(wrap_deg(sp.phi_d - 180.0), 0.0);
        own.euler.x = 175f64.to_radians();
        let (sp, mut ctx) = maneuver_setpoints(ManeuverId::SplitS, &own, &air, &opp, &ctx, &p()).unwrap();
        assert_eq!(ctx.splits_phase, SplitSPhase::Pull);
        assert_eq!(sp.alpha_d, 30.0);
        for theta in [-5.0, -40.0, -80.0, -30.0, -1.0, 0.5] {
            own.euler.y = f64::to_radians(theta);
            own.euler.x = 0.0;
            ctx = maneuver_setpoints(ManeuverId::SplitS, &own, &air, &opp, &ctx, &p()).unwrap().1;
        }
        assert_eq!(ctx.splits_phase, SplitSPhase::Recover);
    }

    #[test]
    fn point_mass_examples() {
        let s = Simple3DofState {
            pos: Vector3::zeros(),
            v: 200.0,
            chi: 0.3,
            zeta: 0.0,
        };
        let (_, v_dot, _, _) = s.rates(0.3f64.sin(), 1.0, 0.0).unwrap();
        assert_relative_eq!(v_dot, 0.0, epsilon = 1e-12);
        let (_, _, chi_dot, _) = s.rates(0.0, 0.3f64.cos(), 0.0).unwrap();
        assert_relative_eq!(chi_dot, 0.0, epsilon = 1e-12);
        let level = Simple3DofState { chi: 0.0, ..s };
        let (_, _, _, zeta_dot) = level.rates(0.0, 2.0, 60f64.to_radians()).unwrap();
        assert_relative_eq!(zeta_dot, G * 2.0 * 60f64.to_radians().sin() / 200.0, epsilon = 1e-12);
        let steep = Simple3DofState { chi: 1.5, ..s };
        assert!(simple_3dof_step(&steep, 0.0, 1.0, 0.0, 0.01).is_err());
    }

    /// Flies the point-mass model under the position tracking load law
    /// toward a fixed target; returns the final angle between velocity and
    /// line of sight.
    pub(crate) fn point_mass_pursuit(start: Simple3DofState, target: Vector3<f64>, seconds: f64) -> f64 {
        let params = p();
        let (k_chi, k_zeta) = params.gains_per_radian();
        let dt = 0.01;
        let mut s = start;
        let mut angle = f64::NAN;
        for _ in 0..(seconds / dt) as usize {
            let (chi_d, zeta_d) = desired_path_angles(&s.pos, &target).unwrap();
            let (n2, n3) = loads_from_angle_errors(s.v, s.chi, chi_d - s.chi, wrap_pi(zeta_d - s.zeta), k_chi, k_zeta);
            let (phi, nn) = bank_and_load(n2, n3, &params).unwrap();
            s = simple_3dof_step(&s, s.chi.sin(), nn, phi, dt).unwrap();
            let vel = Vector3::new(s.chi.cos() * s.zeta.cos(), s.chi.cos() * s.zeta.sin(), -s.chi.sin());
            angle = vel.angle(&(target - s.pos)).to_degrees();
        }
        angle
    }

    #[test]
    fn point_mass_guidance_converges() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let target = Vector3::new(0.0, 0.0, -5000.0);
        let mut aligned = 0;
        for _ in 0..20 {
            let r = rng.gen_range(15_000.0..30_000.0);
            let bearing: f64 = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
            let start = Simple3DofState {
                pos: target + Vector3::new(r * bearing.cos(), r * bearing.sin(), rng.gen_range(-2000.0..2000.0)),
                v: rng.gen_range(100.0..300.0),
                chi: rng.gen_range(-0.3..0.3),
                zeta: rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI),
            };
            if point_mass_pursuit(start, target, 60.0) < 5.0 {
                aligned += 1;
            }
        }
        assert!(aligned >= 18, "{aligned}/20 aligned");
    }

    proptest! {
        #[test]
        fn setpoints_within_bounds(
            id in 0usize..8,
            u in 60.0f64..400.0, w in -60.0f64..60.0,
            phi in -3.1f64..3.1, theta in -1.5f64..1.5, psi in -3.1f64..3.1,
            ox in -5000.0f64..5000.0, oy in -5000.0f64..5000.0, oz in -8000.0f64..-1000.0,
        ) {
            let mut own = BodyState::level(Vector3::new(0.0, 0.0, -4000.0), 1.0, psi);
            own.vel_body = Vector3::new(u, 0.0, w);
            own.euler = Vector3::new(phi, theta, psi);
            let air = air_data(&own.vel_body, 4000.0).unwrap();
            let opp = BodyState::level(Vector3::new(ox, oy, oz), 200.0, 0.0);
            let id = ManeuverId::from_index(id).unwrap();
            let (sp, _) = maneuver_setpoints(id, &own, &air, &opp, &ManeuverContext::default(), &p()).unwrap();
            prop_assert!(sp.alpha_d >= -4.0 && sp.alpha_d <= 30.0);
            prop_assert!(sp.phi_d >= -180.0 && sp.phi_d < 180.0);
        }

        #[test]
        fn yo_yo_aim_sides(
            dx in -5000.0f64..5000.0, dy in -5000.0f64..5000.0, dz in -3000.0f64..3000.0, v in 50.0f64..400.0,
        ) {
            let own = Vector3::new(0.0, 0.0, -5000.0);
            let target = own + Vector3::new(dx, dy, dz);
            prop_assume!(dx.hypot(dy) > 10.0);
            let dh = yo_yo_offset(v, 0.1);
            let (plain, _) = desired_path_angles(&own, &target).unwrap();
            let (high, _) = offset_path_angles(&own, &target, dh).unwrap();
            let (low, _) = offset_path_angles(&own, &target, -dh).unwrap();
            prop_assert!(high > plain && low < plain);
        }
    }
}
