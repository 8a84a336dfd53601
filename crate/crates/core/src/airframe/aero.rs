//! Aerodynamic and propulsion models.
//!
//! Force convention: the aerodynamic force vector `f_a` is expressed on the
//! body axes as `[D, C, L]`: axial drag along body x, side force along body
//! y and lift along body z, each positive in the direction that opposes the
//! corresponding body axis. The dynamics subtract it (`f_t - f_a`), so
//! positive drag decelerates and positive lift pushes the aircraft "up"
//! (toward body −z). The shipped F-16 tables are body-axis `C_X, C_Y, C_Z`
//! coefficients and are negated once here.

use std::fmt::Debug;
use std::path::Path;

use nalgebra::Vector3;

use super::tables::{parse_columns, parse_scalars, Table1, Table2};
use super::{AirData, AircraftConfig, ControlSurfaces};
use crate::{Error, Result};

/// Non-dimensional force and moment coefficients.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct AeroCoefficients {
    pub drag: f64,
    pub side: f64,
    pub lift: f64,
    pub roll: f64,
    pub pitch: f64,
    pub yaw: f64,
    /// A table lookup left its grid and was clamped.
    pub clamped: bool,
}

/// Anything that can produce aerodynamic coefficients for a flight condition.
pub trait AeroModel: Debug + Send + Sync {
    fn coefficients(
        &self,
        air: &AirData,
        surfaces: &ControlSurfaces,
        omega: &Vector3<f64>,
        config: &AircraftConfig,
    ) -> AeroCoefficients;
}

/// Thrust along body x, newtons.
pub trait ThrustModel: Debug + Send + Sync {
    fn thrust(&self, throttle: f64, altitude: f64, mach: f64) -> f64;
}

/// Dimensional aerodynamic loads.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AeroLoads {
    /// `[D, C, L]` in newtons, subtracted in the translational dynamics.
    pub force: Vector3<f64>,
    /// `[l, m, n]` in N·m, body axes.
    pub torque: Vector3<f64>,
    pub clamped: bool,
}

pub fn aero_forces_moments(
    air: &AirData,
    surfaces: &ControlSurfaces,
    omega: &Vector3<f64>,
    config: &AircraftConfig,
    model: &dyn AeroModel,
) -> AeroLoads {
    let c = model.coefficients(air, surfaces, omega, config);
    let qs = air.qbar * config.wing_area;
    AeroLoads {
        force: Vector3::new(qs * c.drag, qs * c.side, qs * c.lift),
        torque: Vector3::new(
            qs * config.span * c.roll,
            qs * config.chord * c.pitch,
            qs * config.span * c.yaw,
        ),
        clamped: c.clamped,
    }
}

/// Same coefficients everywhere; used for analytic checks.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConstantAero(pub AeroCoefficients);

impl ConstantAero {
    pub fn zero() -> Self {
        Self(AeroCoefficients::default())
    }

    pub fn uniform(value: f64) -> Self {
        Self(AeroCoefficients {
            drag: value,
            side: value,
            lift: value,
            roll: value,
            pitch: value,
            yaw: value,
            clamped: false,
        })
    }
}

impl AeroModel for ConstantAero {
    fn coefficients(
        &self,
        _: &AirData,
        _: &ControlSurfaces,
        _: &Vector3<f64>,
        _: &AircraftConfig,
    ) -> AeroCoefficients {
        self.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoThrust;

impl ThrustModel for NoThrust {
    fn thrust(&self, _: f64, _: f64, _: f64) -> f64 {
        0.0
    }
}

#[derive(Clone, Debug)]
struct Damping {
    cxq: Table1,
    cyr: Table1,
    cyp: Table1,
    czq: Table1,
    clr: Table1,
    clp: Table1,
    cmq: Table1,
    cnr: Table1,
    cnp: Table1,
}

/// The low-fidelity F-16 wind-tunnel data set.
///
/// Angles of attack and sideslip are looked up in degrees; surface
/// deflections in degrees. Aileron and rudder increments are normalized by
/// 20° and 30°, the rate terms by `c̄/2V` and `b/2V`.
#[derive(Clone, Debug)]
pub struct AeroTables {
    cx: Table2,
    cz0: Table1,
    cm: Table2,
    cl: Table2,
    cn: Table2,
    dlda: Table2,
    dldr: Table2,
    dnda: Table2,
    dndr: Table2,
    damping: Damping,
    cy_beta: f64,
    cy_aileron: f64,
    cy_rudder: f64,
    cz_elevator: f64,
}

macro_rules! builtin_table {
    ($name:literal) => {
        ($name, include_str!(concat!("../../data/f16/", $name)))
    };
}

const BUILTIN: &[(&str, &str)] = &[
    builtin_table!("cx.csv"),
    builtin_table!("cz.csv"),
    builtin_table!("cm.csv"),
    builtin_table!("cl.csv"),
    builtin_table!("cn.csv"),
    builtin_table!("dlda.csv"),
    builtin_table!("dldr.csv"),
    builtin_table!("dnda.csv"),
    builtin_table!("dndr.csv"),
    builtin_table!("damping.csv"),
    builtin_table!("linear.csv"),
    builtin_table!("thrust_idle.csv"),
    builtin_table!("thrust_mil.csv"),
    builtin_table!("thrust_max.csv"),
];

fn builtin(name: &str) -> Result<(String, String)> {
    BUILTIN
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(n, text)| (format!("<builtin>/{n}"), text.to_string()))
        .ok_or_else(|| Error::Table {
            path: name.to_string(),
            message: "no such builtin table".into(),
        })
}

fn from_dir(dir: &Path) -> impl Fn(&str) -> Result<(String, String)> + '_ {
    move |name| {
        let path = dir.join(name);
        let text = std::fs::read_to_string(&path).map_err(|e| Error::Table {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Ok((path.display().to_string(), text))
    }
}

impl AeroTables {
    /// The tables compiled into the binary (identical to `data/f16/`).
    pub fn builtin() -> Self {
        Self::load_with(builtin).expect("builtin F-16 tables are valid")
    }

    /// Loads the table set from a directory laid out like `data/f16/`.
    pub fn load(dir: &Path) -> Result<Self> {
        Self::load_with(from_dir(dir))
    }

    fn load_with(source: impl Fn(&str) -> Result<(String, String)>) -> Result<Self> {
        let grid = |name: &str| -> Result<Table2> {
            let (path, text) = source(name)?;
            Table2::parse(&text, &path)
        };
        let (cz_path, cz_text) = source("cz.csv")?;
        let cz0 = find_column(&parse_columns(&cz_text, &cz_path)?, "cz0", &cz_path)?;
        let (damp_path, damp_text) = source("damping.csv")?;
        let damping = {
            let all = parse_columns(&damp_text, &damp_path)?;
            let get = |name: &str| find_column(&all, name, &damp_path);
            Damping {
                cxq: get("cxq")?,
                cyr: get("cyr")?,
                cyp: get("cyp")?,
                czq: get("czq")?,
                clr: get("clr")?,
                clp: get("clp")?,
                cmq: get("cmq")?,
                cnr: get("cnr")?,
                cnp: get("cnp")?,
            }
        };
        let (lin_path, lin_text) = source("linear.csv")?;
        let scalars = parse_scalars(&lin_text, &lin_path)?;
        let scalar = |name: &str| -> Result<f64> {
            scalars
                .iter()
                .find(|(n, _)| n == name)
                .map(|(_, v)| *v)
                .ok_or_else(|| Error::Table {
                    path: lin_path.clone(),
                    message: format!("missing constant `{name}`"),
                })
        };
        Ok(Self {
            cx: grid("cx.csv")?,
            cz0,
            cm: grid("cm.csv")?,
            cl: grid("cl.csv")?,
            cn: grid("cn.csv")?,
            dlda: grid("dlda.csv")?,
            dldr: grid("dldr.csv")?,
            dnda: grid("dnda.csv")?,
            dndr: grid("dndr.csv")?,
            damping,
            cy_beta: scalar("cy_beta")?,
            cy_aileron: scalar("cy_aileron")?,
            cy_rudder: scalar("cy_rudder")?,
            cz_elevator: scalar("cz_elevator")?,
        })
    }
}

fn find_column(cols: &[(String, Table1)], name: &str, path: &str) -> Result<Table1> {
    cols.iter()
        .find(|(n, _)| n == name)
        .map(|(_, t)| t.clone())
        .ok_or_else(|| Error::Table {
            path: path.to_string(),
            message: format!("missing column `{name}`"),
        })
}

impl AeroModel for AeroTables {
    fn coefficients(
        &self,
        air: &AirData,
        surfaces: &ControlSurfaces,
        omega: &Vector3<f64>,
        config: &AircraftConfig,
    ) -> AeroCoefficients {
        let alpha = air.alpha.to_degrees();
        let beta = air.beta.to_degrees();
        let el = surfaces.elevator;
        let ail = surfaces.aileron / 20.0;
        let rdr = surfaces.rudder / 30.0;
        let (p, q, r) = (omega.x, omega.y, omega.z);
        let cq = 0.5 * config.chord * q / air.v;
        let b2v = 0.5 * config.span / air.v;

        let mut clamped = false;
        let mut t2 = |t: &Table2, x: f64, y: f64| {
            let l = t.lookup(x, y);
            clamped |= l.clamped;
            l.value
        };
        let cx0 = t2(&self.cx, alpha, el);
        let cm0 = t2(&self.cm, alpha, el);
        let cl0 = t2(&self.cl, alpha, beta);
        let cn0 = t2(&self.cn, alpha, beta);
        let dlda = t2(&self.dlda, alpha, beta);
        let dldr = t2(&self.dldr, alpha, beta);
        let dnda = t2(&self.dnda, alpha, beta);
        let dndr = t2(&self.dndr, alpha, beta);
        let mut t1 = |t: &Table1| {
            let l = t.lookup(alpha);
            clamped |= l.clamped;
            l.value
        };
        let d = &self.damping;
        let (cxq, cyr, cyp, czq) = (t1(&d.cxq), t1(&d.cyr), t1(&d.cyp), t1(&d.czq));
        let (clr, clp, cmq) = (t1(&d.clr), t1(&d.clp), t1(&d.cmq));
        let (cnr, cnp) = (t1(&d.cnr), t1(&d.cnp));
        let cz0 = t1(&self.cz0);

        // sideslip in the quadratic CZ term is in radians
        let beta_rad = beta.clamp(-30.0, 30.0).to_radians();
        let cx = cx0 + cq * cxq;
        let cy = self.cy_beta * beta
            + self.cy_aileron * ail
            + self.cy_rudder * rdr
            + b2v * (cyr * r + cyp * p);
        let cz = cz0 * (1.0 - beta_rad * beta_rad) + self.cz_elevator * el / 25.0 + cq * czq;
        let roll = cl0 + dlda * ail + dldr * rdr + b2v * (clr * r + clp * p);
        let pitch = cm0 + cq * cmq;
        let yaw = cn0 + dnda * ail + dndr * rdr + b2v * (cnr * r + cnp * p);

        AeroCoefficients {
            drag: -cx,
            side: -cy,
            lift: -cz,
            roll,
            pitch,
            yaw,
            clamped,
        }
    }
}

/// Static engine deck: idle, military and maximum thrust over altitude and
/// Mach, blended by a throttle-to-power gearing.
#[derive(Clone, Debug)]
pub struct EngineTables {
    idle: Table2,
    mil: Table2,
    max: Table2,
}

impl EngineTables {
    pub fn builtin() -> Self {
        Self::load_with(builtin).expect("builtin engine tables are valid")
    }

    pub fn load(dir: &Path) -> Result<Self> {
        Self::load_with(from_dir(dir))
    }

    fn load_with(source: impl Fn(&str) -> Result<(String, String)>) -> Result<Self> {
        let grid = |name: &str| -> Result<Table2> {
            let (path, text) = source(name)?;
            Table2::parse(&text, &path)
        };
        Ok(Self {
            idle: grid("thrust_idle.csv")?,
            mil: grid("thrust_mil.csv")?,
            max: grid("thrust_max.csv")?,
        })
    }

    /// Sea-level static thrust at a power setting read straight from the
    /// military table; exposed for checks against the data file.
    pub fn mil_table(&self) -> &Table2 {
        &self.mil
    }

    pub fn max_table(&self) -> &Table2 {
        &self.max
    }
}

/// Throttle position to percent power (military power at 0.77 throttle).
pub fn power_from_throttle(throttle: f64) -> f64 {
    if throttle <= 0.77 {
        64.94 * throttle
    } else {
        217.38 * throttle - 117.38
    }
}

impl ThrustModel for EngineTables {
    fn thrust(&self, throttle: f64, altitude: f64, mach: f64) -> f64 {
        let power = power_from_throttle(throttle.clamp(0.0, 1.0));
        let mil = self.mil.lookup(altitude, mach).value;
        let thrust = if power < 50.0 {
            let idle = self.idle.lookup(altitude, mach).value;
            idle + (mil - idle) * power * 0.02
        } else {
            let max = self.max.lookup(altitude, mach).value;
            mil + (max - mil) * (power - 50.0) * 0.02
        };
        // the deck goes negative (ram drag) at idle and high Mach
        thrust.max(0.0)
    }
}
