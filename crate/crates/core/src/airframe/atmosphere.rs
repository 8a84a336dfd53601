//! International Standard Atmosphere, troposphere plus the isothermal layer
//! above it.

const T0: f64 = 288.15;
const P0: f64 = 101_325.0;
const LAPSE: f64 = -0.0065;
const R_AIR: f64 = 287.052_87;
const GAMMA: f64 = 1.4;
const G0: f64 = 9.806_65;
const TROPOPAUSE: f64 = 11_000.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Atmosphere {
    pub temperature: f64,
    pub pressure: f64,
    pub density: f64,
    pub speed_of_sound: f64,
}

/// Standard-day properties at geometric altitude `altitude` (m).
pub fn isa(altitude: f64) -> Atmosphere {
    let (temperature, pressure) = if altitude <= TROPOPAUSE {
        let t = T0 + LAPSE * altitude;
        (t, P0 * (t / T0).powf(-G0 / (LAPSE * R_AIR)))
    } else {
        let t11 = T0 + LAPSE * TROPOPAUSE;
        let p11 = P0 * (t11 / T0).powf(-G0 / (LAPSE * R_AIR));
        (t11, p11 * (-G0 * (altitude - TROPOPAUSE) / (R_AIR * t11)).exp())
    };
    Atmosphere {
        temperature,
        pressure,
        density: pressure / (R_AIR * temperature),
        speed_of_sound: (GAMMA * R_AIR * temperature).sqrt(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn sea_level() {
        let a = isa(0.0);
        assert_relative_eq!(a.density, 1.225, max_relative = 1e-3);
        assert_relative_eq!(a.speed_of_sound, 340.29, max_relative = 1e-3);
    }

    #[test]
    fn five_km_reference_values() {
        // Standard tables: 0.7361 kg/m³, 320.5 m/s.
        let a = isa(5000.0);
        assert_relative_eq!(a.density, 0.7361, max_relative = 1e-3);
        assert_relative_eq!(a.speed_of_sound, 320.5, max_relative = 1e-3);
    }

    #[test]
    fn continuous_at_tropopause() {
        let below = isa(TROPOPAUSE - 1e-6);
        let above = isa(TROPOPAUSE + 1e-6);
        assert_relative_eq!(below.pressure, above.pressure, max_relative = 1e-8);
        assert_relative_eq!(isa(15_000.0).temperature, 216.65, max_relative = 1e-9);
    }
}
