//! Six-degree-of-freedom rigid-body dynamics of a fixed-wing aircraft.
//!
//! Earth frame: x north, y east, z down; altitude is `-pos.z`. Euler angles
//! follow the yaw-pitch-roll (Z-Y-X) sequence. Surface deflections are in
//! degrees, throttle is dimensionless.

pub mod aero;
pub mod atmosphere;
pub mod tables;
mod trim;

use std::sync::Arc;

use nalgebra::{Matrix3, Quaternion, UnitQuaternion, Vector3};

use crate::angles::wrap_pi;
use crate::{Error, Result, G};
use aero::{aero_forces_moments, AeroModel, AeroTables, EngineTables, ThrustModel};
use atmosphere::isa;

pub use trim::{trim_search, TrimTarget};

/// Current actuator positions (or commands).
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ControlSurfaces {
    pub throttle: f64,
    pub elevator: f64,
    pub aileron: f64,
    pub rudder: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BodyState {
    pub pos: Vector3<f64>,
    pub vel_body: Vector3<f64>,
    /// Roll, pitch, yaw in radians.
    pub euler: Vector3<f64>,
    /// Body rates p, q, r in rad/s.
    pub omega: Vector3<f64>,
    pub surfaces: ControlSurfaces,
}

impl BodyState {
    /// Wings-level, zero-pitch flight at `speed` along heading `yaw`.
    pub fn level(pos: Vector3<f64>, speed: f64, yaw: f64) -> Self {
        Self {
            pos,
            vel_body: Vector3::new(speed, 0.0, 0.0),
            euler: Vector3::new(0.0, 0.0, wrap_pi(yaw)),
            omega: Vector3::zeros(),
            surfaces: ControlSurfaces::default(),
        }
    }

    pub fn altitude(&self) -> f64 {
        -self.pos.z
    }

    pub fn is_finite(&self) -> bool {
        self.pos.iter().all(|x| x.is_finite())
            && self.vel_body.iter().all(|x| x.is_finite())
            && self.euler.iter().all(|x| x.is_finite())
            && self.omega.iter().all(|x| x.is_finite())
    }

    /// Velocity in the earth frame.
    pub fn vel_earth(&self) -> Vector3<f64> {
        rotation_body_to_earth(&self.euler) * self.vel_body
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AirData {
    pub v: f64,
    pub alpha: f64,
    pub beta: f64,
    pub mach: f64,
    pub qbar: f64,
}

/// Amplitude and rate bounds of one actuator channel.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ChannelLimits {
    pub min: f64,
    pub max: f64,
    /// Maximum change per second.
    pub rate: f64,
}

impl ChannelLimits {
    pub fn range(&self) -> f64 {
        self.max - self.min
    }

    pub fn clamp(&self, x: f64) -> f64 {
        x.clamp(self.min, self.max)
    }

    /// Moves `current` toward `command` under both limits.
    pub fn advance(&self, current: f64, command: f64, dt: f64) -> f64 {
        let target = self.clamp(command);
        let max_step = self.rate * dt;
        self.clamp(current + (target - current).clamp(-max_step, max_step))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ActuatorLimits {
    pub throttle: ChannelLimits,
    pub elevator: ChannelLimits,
    pub aileron: ChannelLimits,
    pub rudder: ChannelLimits,
}

impl ActuatorLimits {
    pub fn advance(&self, current: &ControlSurfaces, cmd: &ControlSurfaces, dt: f64) -> ControlSurfaces {
        ControlSurfaces {
            throttle: self.throttle.advance(current.throttle, cmd.throttle, dt),
            elevator: self.elevator.advance(current.elevator, cmd.elevator, dt),
            aileron: self.aileron.advance(current.aileron, cmd.aileron, dt),
            rudder: self.rudder.advance(current.rudder, cmd.rudder, dt),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AircraftConfig {
    pub mass: f64,
    pub inertia: Matrix3<f64>,
    pub wing_area: f64,
    pub span: f64,
    pub chord: f64,
    pub limits: ActuatorLimits,
}

impl AircraftConfig {
    /// F-16 mass properties and geometry, converted to SI.
    pub fn f16() -> Self {
        const SLUG_FT2: f64 = 1.355_817_948_3;
        const FT: f64 = 0.3048;
        let (jx, jy, jz, jxz) = (9496.0 * SLUG_FT2, 55814.0 * SLUG_FT2, 63100.0 * SLUG_FT2, 982.0 * SLUG_FT2);
        Self {
            mass: 20_500.0 * 0.453_592_37,
            inertia: Matrix3::new(jx, 0.0, -jxz, 0.0, jy, 0.0, -jxz, 0.0, jz),
            wing_area: 300.0 * FT * FT,
            span: 30.0 * FT,
            chord: 11.32 * FT,
            limits: ActuatorLimits {
                throttle: ChannelLimits { min: 0.0, max: 1.0, rate: 1.0 },
                elevator: ChannelLimits { min: -25.0, max: 25.0, rate: 60.0 },
                aileron: ChannelLimits { min: -21.5, max: 21.5, rate: 80.0 },
                rudder: ChannelLimits { min: -30.0, max: 30.0, rate: 120.0 },
            },
        }
    }
}

/// Body-to-earth rotation for yaw-pitch-roll Euler angles.
pub fn rotation_body_to_earth(euler: &Vector3<f64>) -> Matrix3<f64> {
    let (sphi, cphi) = euler.x.sin_cos();
    let (sth, cth) = euler.y.sin_cos();
    let (spsi, cpsi) = euler.z.sin_cos();
    Matrix3::new(
        cth * cpsi,
        sphi * sth * cpsi - cphi * spsi,
        cphi * sth * cpsi + sphi * spsi,
        cth * spsi,
        sphi * sth * spsi + cphi * cpsi,
        cphi * sth * spsi - sphi * cpsi,
        -sth,
        sphi * cth,
        cphi * cth,
    )
}

/// Euler-angle rates from body rates.
pub fn euler_rates(euler: &Vector3<f64>, omega: &Vector3<f64>) -> Result<Vector3<f64>> {
    let (sphi, cphi) = euler.x.sin_cos();
    let cth = euler.y.cos();
    if cth.abs() < 1e-6 {
        return Err(Error::Singularity {
            pitch_deg: euler.y.to_degrees(),
        });
    }
    let (p, q, r) = (omega.x, omega.y, omega.z);
    let lateral = q * sphi + r * cphi;
    Ok(Vector3::new(
        p + lateral * euler.y.tan(),
        q * cphi - r * sphi,
        lateral / cth,
    ))
}

pub fn air_data(vel_body: &Vector3<f64>, altitude: f64) -> Result<AirData> {
    let v = vel_body.norm();
    if !(v > 0.0) {
        return Err(Error::ZeroVelocity);
    }
    let atm = isa(altitude);
    Ok(AirData {
        v,
        alpha: vel_body.z.atan2(vel_body.x),
        beta: (vel_body.y / v).clamp(-1.0, 1.0).asin(),
        mach: v / atm.speed_of_sound,
        qbar: 0.5 * atm.density * v * v,
    })
}

/// Time derivative of a [`BodyState`]; surfaces are excluded (they are
/// advanced by the actuator model, not integrated).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StateRate {
    pub pos: Vector3<f64>,
    pub vel_body: Vector3<f64>,
    pub euler: Vector3<f64>,
    pub omega: Vector3<f64>,
    pub table_clamped: bool,
}

impl StateRate {
    /// Norm of every component except the position rate.
    pub fn residual(&self) -> f64 {
        (self.vel_body.norm_squared() + self.euler.norm_squared() + self.omega.norm_squared()).sqrt()
    }
}

/// Per-step diagnostics.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct StepDiagnostics {
    /// Number of RK4 stages whose table lookups were clamped to the grid.
    pub table_clamps: u32,
}

/// An aircraft type: mass properties plus its aerodynamic and engine data.
/// Cheap to clone; the tables are shared.
#[derive(Clone, Debug)]
pub struct Airframe {
    pub config: AircraftConfig,
    pub aero: Arc<dyn AeroModel>,
    pub engine: Arc<dyn ThrustModel>,
    inertia_inv: Matrix3<f64>,
}

struct Accel {
    pos: Vector3<f64>,
    vel: Vector3<f64>,
    omega: Vector3<f64>,
    clamped: bool,
}

impl Airframe {
    pub fn new(config: AircraftConfig, aero: Arc<dyn AeroModel>, engine: Arc<dyn ThrustModel>) -> Self {
        let inertia_inv = config
            .inertia
            .try_inverse()
            .expect("inertia matrix must be invertible");
        Self {
            config,
            aero,
            engine,
            inertia_inv,
        }
    }

    /// F-16 with the builtin tables.
    pub fn f16() -> Self {
        Self::new(
            AircraftConfig::f16(),
            Arc::new(AeroTables::builtin()),
            Arc::new(EngineTables::builtin()),
        )
    }

    fn accelerations(
        &self,
        rot: &Matrix3<f64>,
        pos: &Vector3<f64>,
        vel: &Vector3<f64>,
        omega: &Vector3<f64>,
        surfaces: &ControlSurfaces,
    ) -> Result<Accel> {
        let altitude = -pos.z;
        let air = air_data(vel, altitude)?;
        let loads = aero_forces_moments(&air, surfaces, omega, &self.config, self.aero.as_ref());
        let thrust = self.engine.thrust(surfaces.throttle, altitude, air.mach);
        let f_t = Vector3::new(thrust, 0.0, 0.0);
        let gravity = Vector3::new(0.0, 0.0, G);
        let vel_dot = (f_t - loads.force) / self.config.mass + rot.transpose() * gravity - omega.cross(vel);
        let j = &self.config.inertia;
        let omega_dot = self.inertia_inv * (loads.torque - omega.cross(&(j * omega)));
        Ok(Accel {
            pos: rot * vel,
            vel: vel_dot,
            omega: omega_dot,
            clamped: loads.clamped,
        })
    }

    /// Right-hand side of the rigid-body equations in Euler-angle form.
    pub fn derivatives(&self, state: &BodyState) -> Result<StateRate> {
        let rot = rotation_body_to_earth(&state.euler);
        let euler = euler_rates(&state.euler, &state.omega)?;
        let a = self.accelerations(&rot, &state.pos, &state.vel_body, &state.omega, &state.surfaces)?;
        Ok(StateRate {
            pos: a.pos,
            vel_body: a.vel,
            euler,
            omega: a.omega,
            table_clamped: a.clamped,
        })
    }

    pub fn step(&self, state: &BodyState, commanded: &ControlSurfaces, dt: f64) -> Result<BodyState> {
        self.step_traced(state, commanded, dt).map(|(s, _)| s)
    }

    /// Advances actuators under their limits, then the rigid body by one RK4
    /// step with the surfaces held.
    ///
    /// Attitude is carried through the stages as a quaternion so loops and
    /// split-S maneuvers pass the vertical without hitting the Euler
    /// kinematic singularity; the result is converted back to Euler angles.
    pub fn step_traced(
        &self,
        state: &BodyState,
        commanded: &ControlSurfaces,
        dt: f64,
    ) -> Result<(BodyState, StepDiagnostics)> {
        if !dt.is_finite() || dt < 0.0 {
            return Err(Error::InvalidStep(dt));
        }
        if dt == 0.0 {
            return Ok((*state, StepDiagnostics::default()));
        }
        let surfaces = self.config.limits.advance(&state.surfaces, commanded, dt);

        let att0 = UnitQuaternion::from_euler_angles(state.euler.x, state.euler.y, state.euler.z).into_inner();
        let y0 = Stage {
            pos: state.pos,
            vel: state.vel_body,
            att: att0,
            omega: state.omega,
        };
        let mut diag = StepDiagnostics::default();
        let mut eval = |y: &Stage| -> Result<Stage> {
            let q = UnitQuaternion::from_quaternion(y.att);
            let rot = q.to_rotation_matrix().into_inner();
            let a = self.accelerations(&rot, &y.pos, &y.vel, &y.omega, &surfaces)?;
            if a.clamped {
                diag.table_clamps += 1;
            }
            let w = Quaternion::new(0.0, y.omega.x, y.omega.y, y.omega.z);
            Ok(Stage {
                pos: a.pos,
                vel: a.vel,
                att: y.att * w * 0.5,
                omega: a.omega,
            })
        };
        let k1 = eval(&y0)?;
        let k2 = eval(&y0.add(&k1, 0.5 * dt))?;
        let k3 = eval(&y0.add(&k2, 0.5 * dt))?;
        let k4 = eval(&y0.add(&k3, dt))?;
        let y1 = Stage {
            pos: y0.pos + (k1.pos + 2.0 * k2.pos + 2.0 * k3.pos + k4.pos) * (dt / 6.0),
            vel: y0.vel + (k1.vel + 2.0 * k2.vel + 2.0 * k3.vel + k4.vel) * (dt / 6.0),
            att: y0.att + (k1.att + k2.att * 2.0 + k3.att * 2.0 + k4.att) * (dt / 6.0),
            omega: y0.omega + (k1.omega + 2.0 * k2.omega + 2.0 * k3.omega + k4.omega) * (dt / 6.0),
        };

        let (roll, pitch, yaw) = UnitQuaternion::from_quaternion(y1.att).euler_angles();
        let limit = std::f64::consts::FRAC_PI_2 - 1e-9;
        let next = BodyState {
            pos: y1.pos,
            vel_body: y1.vel,
            euler: Vector3::new(wrap_pi(roll), pitch.clamp(-limit, limit), wrap_pi(yaw)),
            omega: y1.omega,
            surfaces,
        };
        if !next.is_finite() {
            return Err(Error::NonFiniteState);
        }
        Ok((next, diag))
    }
}

#[derive(Clone, Copy)]
struct Stage {
    pos: Vector3<f64>,
    vel: Vector3<f64>,
    att: Quaternion<f64>,
    omega: Vector3<f64>,
}

impl Stage {
    fn add(&self, rate: &Stage, h: f64) -> Stage {
        Stage {
            pos: self.pos + rate.pos * h,
            vel: self.vel + rate.vel * h,
            att: self.att + rate.att * h,
            omega: self.omega + rate.omega * h,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::aero::{ConstantAero, NoThrust};
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn ballistic() -> Airframe {
        Airframe::new(AircraftConfig::f16(), Arc::new(ConstantAero::zero()), Arc::new(NoThrust))
    }

    #[test]
    fn zero_rotation_is_identity() {
        assert_eq!(rotation_body_to_earth(&Vector3::zeros()), Matrix3::identity());
    }

    #[test]
    fn pure_yaw_maps_body_x_to_earth_y() {
        let r = rotation_body_to_earth(&Vector3::new(0.0, 0.0, FRAC_PI_2));
        let x = r * Vector3::x();
        assert!((x - Vector3::y()).norm() < 1e-15);
    }

    #[test]
    fn rotation_matches_quaternion_convention() {
        let e = Vector3::new(0.3, -0.4, 2.0);
        let q = UnitQuaternion::from_euler_angles(e.x, e.y, e.z);
        let diff = q.to_rotation_matrix().into_inner() - rotation_body_to_earth(&e);
        assert!(diff.norm() < 1e-14);
    }

    #[test]
    fn euler_rate_examples() {
        let r = euler_rates(&Vector3::zeros(), &Vector3::new(0.1, 0.0, 0.0)).unwrap();
        assert_eq!(r, Vector3::new(0.1, 0.0, 0.0));
        let r = euler_rates(&Vector3::zeros(), &Vector3::new(0.0, 0.2, 0.0)).unwrap();
        assert_eq!(r, Vector3::new(0.0, 0.2, 0.0));
        let r = euler_rates(&Vector3::new(FRAC_PI_4, 0.0, 0.0), &Vector3::new(0.0, 1.0, 0.0)).unwrap();
        assert_relative_eq!(r.x, 0.0, epsilon = 1e-15);
        assert_relative_eq!(r.y, FRAC_PI_4.cos(), epsilon = 1e-15);
        assert_relative_eq!(r.z, FRAC_PI_4.sin(), epsilon = 1e-15);
    }

    #[test]
    fn euler_rates_singular_at_vertical() {
        let err = euler_rates(&Vector3::new(0.0, FRAC_PI_2, 0.0), &Vector3::new(0.0, 1.0, 0.0));
        assert!(matches!(err, Err(Error::Singularity { .. })));
    }

    #[test]
    fn air_data_examples() {
        let a = air_data(&Vector3::new(100.0, 0.0, 0.0), 5000.0).unwrap();
        assert_eq!((a.v, a.alpha, a.beta), (100.0, 0.0, 0.0));
        let a = air_data(&Vector3::new(100.0, 0.0, 10.0), 5000.0).unwrap();
        assert_relative_eq!(a.alpha.to_degrees(), 5.710_593_137_499_642, epsilon = 1e-9);
        let a = air_data(&Vector3::new(100.0, 10.0, 0.0), 5000.0).unwrap();
        assert_relative_eq!(a.beta.to_degrees(), (10.0 / 10100f64.sqrt()).asin().to_degrees(), epsilon = 1e-12);
        assert_relative_eq!(a.beta.to_degrees(), 5.7106, epsilon = 1e-3);
        assert!(matches!(air_data(&Vector3::zeros(), 0.0), Err(Error::ZeroVelocity)));
    }

    #[test]
    fn free_fall_accelerates_down() {
        let s = BodyState::level(Vector3::new(0.0, 0.0, -5000.0), 200.0, 0.0);
        let rate = ballistic().derivatives(&s).unwrap();
        assert!((rate.vel_body - Vector3::new(0.0, 0.0, G)).norm() < 1e-12);
    }

    #[test]
    fn gravity_rotates_into_pitched_body() {
        let mut s = BodyState::level(Vector3::new(0.0, 0.0, -5000.0), 200.0, 0.0);
        s.euler.y = FRAC_PI_4;
        let rate = ballistic().derivatives(&s).unwrap();
        assert_relative_eq!(rate.vel_body.z, G * FRAC_PI_4.cos(), epsilon = 1e-12);
        assert_relative_eq!(rate.vel_body.x, -G * FRAC_PI_4.sin(), epsilon = 1e-12);
    }

    #[test]
    fn zero_dt_is_identity() {
        let s = BodyState::level(Vector3::new(1.0, 2.0, -3000.0), 150.0, 0.3);
        let cmd = ControlSurfaces { throttle: 1.0, elevator: 20.0, ..Default::default() };
        assert_eq!(Airframe::f16().step(&s, &cmd, 0.0).unwrap(), s);
        assert!(matches!(Airframe::f16().step(&s, &cmd, -0.01), Err(Error::InvalidStep(_))));
    }

    #[test]
    fn actuator_rate_saturation() {
        let s = BodyState::level(Vector3::new(0.0, 0.0, -5000.0), 200.0, 0.0);
        let cmd = ControlSurfaces { throttle: 1.0, elevator: -25.0, aileron: 21.5, rudder: 30.0 };
        let next = Airframe::f16().step(&s, &cmd, 0.01).unwrap();
        let lim = AircraftConfig::f16().limits;
        assert_relative_eq!(next.surfaces.elevator, -lim.elevator.rate * 0.01, epsilon = 1e-12);
        assert_relative_eq!(next.surfaces.aileron, lim.aileron.rate * 0.01, epsilon = 1e-12);
        assert_relative_eq!(next.surfaces.rudder, lim.rudder.rate * 0.01, epsilon = 1e-12);
        assert_relative_eq!(next.surfaces.throttle, lim.throttle.rate * 0.01, epsilon = 1e-12);
    }

    #[test]
    fn loop_through_vertical_stays_finite() {
        let airframe = ballistic();
        let mut s = BodyState::level(Vector3::new(0.0, 0.0, -5000.0), 200.0, 0.0);
        s.omega = Vector3::new(0.0, 0.5, 0.0);
        for _ in 0..1000 {
            s = airframe.step(&s, &ControlSurfaces::default(), 0.01).unwrap();
            assert!(s.euler.y.abs() < FRAC_PI_2);
            assert!((-std::f64::consts::PI..std::f64::consts::PI).contains(&s.euler.x));
        }
    }

    proptest! {
        #[test]
        fn rotation_orthonormal(phi in -3.1f64..3.1, theta in -1.48f64..1.48, psi in -3.1f64..3.1) {
            let r = rotation_body_to_earth(&Vector3::new(phi, theta, psi));
            prop_assert!((r.transpose() * r - Matrix3::identity()).abs().max() < 1e-12);
            prop_assert!((r.determinant() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn air_data_round_trip(v in 20.0f64..600.0, alpha in -1.5f64..1.5, beta in -1.5f64..1.5) {
            let vel = Vector3::new(v * alpha.cos() * beta.cos(), v * beta.sin(), v * alpha.sin() * beta.cos());
            let a = air_data(&vel, 3000.0).unwrap();
            prop_assert!((a.v - v).abs() < 1e-10 * v);
            prop_assert!((a.alpha - alpha).abs() < 1e-10);
            prop_assert!((a.beta - beta).abs() < 1e-10);
        }

        #[test]
        fn actuators_stay_in_bounds(
            t in -5.0f64..5.0, e in -100.0f64..100.0, a in -100.0f64..100.0, r in -100.0f64..100.0,
            dt in 0.001f64..2.0,
        ) {
            let lim = AircraftConfig::f16().limits;
            let cur = ControlSurfaces { throttle: 0.5, elevator: 1.0, aileron: -2.0, rudder: 3.0 };
            let out = lim.advance(&cur, &ControlSurfaces { throttle: t, elevator: e, aileron: a, rudder: r }, dt);
            for (x, l) in [(out.throttle, lim.throttle), (out.elevator, lim.elevator), (out.aileron, lim.aileron), (out.rudder, lim.rudder)] {
                prop_assert!(x >= l.min && x <= l.max);
            }
        }
    }
}
