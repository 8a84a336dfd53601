//! Four-channel PID autopilot: Mach via throttle, angle of attack via
//! elevator, roll via aileron and sideslip via rudder.
//!
//! Channel errors are in degrees for α, φ and β and in Mach units for the
//! throttle channel; the gains are sized for those units.

use serde::{Deserialize, Serialize};

use crate::airframe::{ActuatorLimits, AirData, BodyState, ChannelLimits, ControlSurfaces};
use crate::angles::wrap_deg;
use crate::maneuvers::Setpoints;

/// Mach number the throttle channel holds.
pub const TARGET_MACH: f64 = 0.9;

/// How the derivative term is formed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DerivativeMode {
    /// `-kd · de/dt` with `e = desired - value`.
    NegatedErrorRate,
    /// `-kd · dξ/dt` on the measured value; damps when the other terms
    /// stabilize and does not kick on setpoint jumps.
    MeasurementRate,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PidGains {
    pub kp: f64,
    pub ki: f64,
    pub kd: f64,
    /// Bound on |integral| (error × s).
    pub integral_limit: f64,
    pub derivative: DerivativeMode,
}

impl PidGains {
    pub fn new(kp: f64, ki: f64, kd: f64) -> Self {
        Self {
            kp,
            ki,
            kd,
            integral_limit: f64::INFINITY,
            derivative: DerivativeMode::NegatedErrorRate,
        }
    }

    pub fn with_derivative(mut self, mode: DerivativeMode) -> Self {
        self.derivative = mode;
        self
    }

    /// Anti-windup so the integral term alone can reach at most half of the
    /// channel's command range.
    pub fn with_windup_fraction(mut self, range: f64, fraction: f64) -> Self {
        if self.ki != 0.0 {
            self.integral_limit = fraction * range / self.ki.abs();
        }
        self
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PidState {
    pub integral: f64,
    pub prev_error: Option<f64>,
    pub prev_value: Option<f64>,
}

/// One discrete PID update with backward-difference derivative.
///
/// The first sample after a reset has no history, so its derivative term is
/// zero.
pub fn pid_step(gains: &PidGains, state: &PidState, value: f64, desired: f64, dt: f64) -> (f64, PidState) {
    debug_assert!(dt > 0.0);
    let error = desired - value;
    let integral = (state.integral + error * dt).clamp(-gains.integral_limit, gains.integral_limit);
    let rate = match gains.derivative {
        DerivativeMode::NegatedErrorRate => state.prev_error.map_or(0.0, |prev| (error - prev) / dt),
        DerivativeMode::MeasurementRate => state.prev_value.map_or(0.0, |prev| (value - prev) / dt),
    };
    let command = gains.kp * error + gains.ki * integral - gains.kd * rate;
    (
        command,
        PidState {
            integral,
            prev_error: Some(error),
            prev_value: Some(value),
        },
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ControllerGains {
    pub mach: PidGains,
    pub alpha: PidGains,
    pub roll: PidGains,
    pub sideslip: PidGains,
    /// Rate limit on the angle-of-attack reference, deg/s. Large steps are
    /// ramped so the elevator, itself rate limited, can stop the pitch-up
    /// before the nose-down authority runs out near 40 deg.
    pub alpha_ref_rate: f64,
}

impl ControllerGains {
    /// `K_Ma = [10, 0, 0]`, `K_α = [2, 1, 0.6]`, `K_φ = [0.07, 0, 0]`,
    /// `K_β = [12, 0, 4]`, derivative taken on the measurement.
    ///
    /// The angle-of-attack gains are retuned from `[0.8, 1.8, 10]` for the
    /// F-16 tables: with the derivative in deg/s that set is a 12 s lag, and
    /// with a smaller derivative gain it overshoots large steps by 60%.
    pub fn standard(limits: &ActuatorLimits) -> Self {
        let m = DerivativeMode::MeasurementRate;
        Self {
            mach: PidGains::new(10.0, 0.0, 0.0).with_derivative(m),
            alpha: PidGains::new(2.0, 1.0, 0.6)
                .with_derivative(m)
                .with_windup_fraction(limits.elevator.range(), 0.5),
            roll: PidGains::new(0.07, 0.0, 0.0).with_derivative(m),
            sideslip: PidGains::new(12.0, 0.0, 4.0).with_derivative(m),
            alpha_ref_rate: 20.0,
        }
    }
}

/// Sign that maps a positive PID output to the surface deflection producing
/// a positive response. With the F-16 data, positive elevator pitches the
/// nose down and positive aileron rolls left.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelSigns {
    pub throttle: f64,
    pub elevator: f64,
    pub aileron: f64,
    pub rudder: f64,
}

impl Default for ChannelSigns {
    fn default() -> Self {
        Self {
            throttle: 1.0,
            elevator: -1.0,
            aileron: -1.0,
            rudder: 1.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ControllerBank {
    pub gains: ControllerGains,
    pub signs: ChannelSigns,
    pub limits: ActuatorLimits,
    pub mach: PidState,
    pub alpha: PidState,
    pub roll: PidState,
    pub sideslip: PidState,
    /// Rate-limited angle-of-attack reference, degrees.
    pub alpha_ref: Option<f64>,
}

impl ControllerBank {
    pub fn new(gains: ControllerGains, signs: ChannelSigns, limits: ActuatorLimits) -> Self {
        Self {
            gains,
            signs,
            limits,
            mach: PidState::default(),
            alpha: PidState::default(),
            roll: PidState::default(),
            sideslip: PidState::default(),
            alpha_ref: None,
        }
    }

    pub fn standard(limits: ActuatorLimits) -> Self {
        Self::new(ControllerGains::standard(&limits), ChannelSigns::default(), limits)
    }

    /// Zeroes integrals and derivative history.
    pub fn reset(&mut self) {
        self.mach = PidState::default();
        self.alpha = PidState::default();
        self.roll = PidState::default();
        self.sideslip = PidState::default();
        self.alpha_ref = None;
    }

    /// Preloads the integrators so that zero error reproduces `trim` on the
    /// channels that have integral action.
    pub fn preload(&mut self, trim: &ControlSurfaces) {
        self.reset();
        let preload = |gains: &PidGains, sign: f64, value: f64| {
            if gains.ki == 0.0 {
                0.0
            } else {
                (value * sign / gains.ki).clamp(-gains.integral_limit, gains.integral_limit)
            }
        };
        self.mach.integral = preload(&self.gains.mach, self.signs.throttle, trim.throttle);
        self.alpha.integral = preload(&self.gains.alpha, self.signs.elevator, trim.elevator);
        self.roll.integral = preload(&self.gains.roll, self.signs.aileron, trim.aileron);
        self.sideslip.integral = preload(&self.gains.sideslip, self.signs.rudder, trim.rudder);
    }

    /// One control update. Each command is clipped to its actuator range.
    pub fn control_law(
        &mut self,
        state: &BodyState,
        air: &AirData,
        setpoints: &Setpoints,
        dt: f64,
    ) -> ControlSurfaces {
        let channel = |gains: &PidGains, st: &mut PidState, value: f64, desired: f64, sign: f64, lim: &ChannelLimits| {
            let (out, next) = pid_step(gains, st, value, desired, dt);
            *st = next;
            lim.clamp(sign * out)
        };
        let alpha = air.alpha.to_degrees();
        let max_step = self.gains.alpha_ref_rate * dt;
        let alpha_ref = match self.alpha_ref {
            Some(r) => r + (setpoints.alpha_d - r).clamp(-max_step, max_step),
            None => alpha + (setpoints.alpha_d - alpha).clamp(-max_step, max_step),
        };
        self.alpha_ref = Some(alpha_ref);
        let roll = state.euler.x.to_degrees();
        // unwrap the roll error so the PID sees the short way around
        let roll_desired = roll + wrap_deg(setpoints.phi_d - roll);
        ControlSurfaces {
            throttle: channel(
                &self.gains.mach,
                &mut self.mach,
                air.mach,
                TARGET_MACH,
                self.signs.throttle,
                &self.limits.throttle,
            ),
            elevator: channel(
                &self.gains.alpha,
                &mut self.alpha,
                alpha,
                alpha_ref,
                self.signs.elevator,
                &self.limits.elevator,
            ),
            aileron: channel(
                &self.gains.roll,
                &mut self.roll,
                roll,
                roll_desired,
                self.signs.aileron,
                &self.limits.aileron,
            ),
            rudder: channel(
                &self.gains.sideslip,
                &mut self.sideslip,
                air.beta.to_degrees(),
                0.0,
                self.signs.rudder,
                &self.limits.rudder,
            ),
        }
    }
}
