use nalgebra::{Matrix3, Vector3};

use super::atmosphere::isa;
use super::{Airframe, BodyState, ControlSurfaces};
use crate::{Error, Result};

const TOLERANCE: f64 = 1e-3;

/// Wings-level, constant-altitude flight condition.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrimTarget {
    pub altitude: f64,
    pub mach: f64,
}

fn trimmed_state(target: &TrimTarget, speed: f64, x: &Vector3<f64>) -> BodyState {
    let alpha = x[0];
    BodyState {
        pos: Vector3::new(0.0, 0.0, -target.altitude),
        vel_body: Vector3::new(speed * alpha.cos(), 0.0, speed * alpha.sin()),
        // level flight: pitch equals angle of attack
        euler: Vector3::new(0.0, alpha, 0.0),
        omega: Vector3::zeros(),
        surfaces: ControlSurfaces {
            throttle: x[1],
            elevator: x[2],
            aileron: 0.0,
            rudder: 0.0,
        },
    }
}

/// Newton iteration on angle of attack, throttle and elevator so that the
/// axial, normal and pitch accelerations vanish. The returned state flies
/// north at the requested altitude.
pub fn trim_search(target: TrimTarget, airframe: &Airframe) -> Result<(BodyState, ControlSurfaces)> {
    let speed = target.mach * isa(target.altitude).speed_of_sound;
    if !(speed > 0.0) {
        return Err(Error::TrimNoConvergence { residual: f64::INFINITY });
    }
    let lim = &airframe.config.limits;
    let lower = Vector3::new((-10f64).to_radians(), lim.throttle.min, lim.elevator.min);
    let upper = Vector3::new(45f64.to_radians(), lim.throttle.max, lim.elevator.max);
    let clamp = |x: Vector3<f64>| x.zip_zip_map(&lower, &upper, |v, lo, hi| v.clamp(lo, hi));

    let residual = |x: &Vector3<f64>| -> Result<Vector3<f64>> {
        let rate = airframe.derivatives(&trimmed_state(&target, speed, x))?;
        Ok(Vector3::new(rate.vel_body.x, rate.vel_body.z, rate.omega.y))
    };

    let mut x = clamp(Vector3::new(2f64.to_radians(), 0.3, -1.0));
    let steps = Vector3::new(1e-7, 1e-7, 1e-6);
    for _ in 0..60 {
        let f = residual(&x)?;
        if f.norm() < 1e-10 {
            break;
        }
        let mut jac = Matrix3::zeros();
        for j in 0..3 {
            let mut xp = x;
            xp[j] += steps[j];
            let mut xm = x;
            xm[j] -= steps[j];
            let col = (residual(&xp)? - residual(&xm)?) / (2.0 * steps[j]);
            jac.set_column(j, &col);
        }
        let Some(dx) = jac.lu().solve(&(-f)) else {
            break;
        };
        // keep each iterate inside the table and actuator envelope
        let limit = Vector3::new(5f64.to_radians(), 0.2, 5.0);
        let dx = dx.zip_map(&limit, |d, l| d.clamp(-l, l));
        let next = clamp(x + dx);
        if (next - x).norm() < 1e-14 {
            break;
        }
        x = next;
    }

    let state = trimmed_state(&target, speed, &x);
    let res = airframe.derivatives(&state)?.residual();
    if res < TOLERANCE {
        Ok((state, state.surfaces))
    } else {
        Err(Error::TrimNoConvergence { residual: res })
    }
}
