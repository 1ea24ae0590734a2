//! Moist-air psychrometrics.
//!
//! Saturation pressures follow the Hyland–Wexler correlations (the ASHRAE
//! formulation), with the ice branch below 273.15 K and the liquid branch
//! above. Vapor densities come from the ideal gas law — the error is a few
//! tenths of a percent here, far below the uncertainty of any frost model
//! fed by these numbers.

use crate::{Error, Result};

/// Specific gas constant of water vapor [J/(kg·K)].
pub const R_WATER_VAPOR: f64 = 461.52;

/// Specific gas constant of dry air [J/(kg·K)].
pub const R_DRY_AIR: f64 = 287.042;

const T_MIN: f64 = 200.0;
const T_MAX: f64 = 350.0;
const T_FREEZE: f64 = 273.15;

/// Saturation pressure of water vapor [Pa] over ice below 0 °C, over liquid
/// water above. Valid for 200 K ≤ T ≤ 350 K.
pub fn sat_pressure(t: f64) -> Result<f64> {
    if !(T_MIN..=T_MAX).contains(&t) {
        return Err(Error::OutOfRange {
            quantity: "saturation temperature",
            value: t,
            min: T_MIN,
            max: T_MAX,
        });
    }
    let ln_p = if t < T_FREEZE {
        // Hyland–Wexler over ice, 173.15 K … 273.15 K
        -5.674_535_9e3 / t + 6.392_524_7 - 9.677_843e-3 * t + 6.221_570_1e-7 * t * t
            + 2.074_782_5e-9 * t.powi(3)
            - 9.484_024e-13 * t.powi(4)
            + 4.163_501_9 * t.ln()
    } else {
        // Hyland–Wexler over liquid water, 273.15 K … 473.15 K
        -5.800_220_6e3 / t + 1.391_499_3 - 4.864_023_9e-2 * t + 4.176_476_8e-5 * t * t
            - 1.445_209_3e-8 * t.powi(3)
            + 6.545_967_3 * t.ln()
    };
    Ok(ln_p.exp())
}

/// Density of saturated water vapor [kg/m³] at temperature `t`, ideal gas.
pub fn sat_vapor_density(t: f64) -> Result<f64> {
    Ok(sat_pressure(t)? / (R_WATER_VAPOR * t))
}

/// Saturation humidity ratio [kg water / kg dry air] at temperature `t` and
/// total pressure `p`.
pub fn humidity_ratio_sat(t: f64, p: f64) -> Result<f64> {
    let p_sat = sat_pressure(t)?;
    if p <= p_sat {
        return Err(Error::OutOfRange {
            quantity: "total pressure (must exceed saturation pressure)",
            value: p,
            min: p_sat,
            max: f64::INFINITY,
        });
    }
    Ok(0.622 * p_sat / (p - p_sat))
}

/// Partial density of water vapor [kg/m³] in moist air with humidity ratio
/// `omega` at temperature `t` and total pressure `p`.
pub fn vapor_density_in_air(t: f64, p: f64, omega: f64) -> f64 {
    let p_vapor = omega * p / (0.622 + omega);
    p_vapor / (R_WATER_VAPOR * t)
}

/// Specific heat of moist air per kg of dry air [J/(kg·K)].
pub fn moist_cp(omega: f64, cp_air: f64, cp_vapor: f64) -> f64 {
    cp_air + omega * cp_vapor
}

/// Dew point [K] of moist air: the temperature whose saturation pressure
/// equals the vapor partial pressure. Bisection; the saturation curve is
/// strictly increasing so the root is unique.
pub fn dew_point(p: f64, omega: f64) -> Result<f64> {
    let p_vapor = omega * p / (0.622 + omega);
    let (mut lo, mut hi) = (T_MIN, T_MAX);
    if p_vapor <= sat_pressure(lo)? {
        return Ok(lo);
    }
    if p_vapor >= sat_pressure(hi)? {
        return Ok(hi);
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if sat_pressure(mid)? < p_vapor {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn triple_point_pressure() {
        // both branches meet near 611 Pa at 0.01 °C; at exactly 273.15 K the
        // ice branch applies just below and liquid just above
        let p = sat_pressure(273.15).unwrap();
        assert_relative_eq!(p, 611.2, max_relative = 2e-3);
    }

    #[test]
    fn branches_join_continuously() {
        let below = sat_pressure(273.15 - 1e-9).unwrap();
        let above = sat_pressure(273.15).unwrap();
        assert_relative_eq!(below, above, max_relative = 1e-3);
    }

    #[test]
    fn vapor_density_at_freezing() {
        let rho = sat_vapor_density(273.15).unwrap();
        assert_relative_eq!(rho, 4.85e-3, max_relative = 5e-3);
    }

    #[test]
    fn humidity_ratio_known_points() {
        let w2 = humidity_ratio_sat(275.15, 101_325.0).unwrap();
        assert_relative_eq!(w2, 4.4e-3, max_relative = 0.02);
        let w20 = humidity_ratio_sat(293.15, 101_325.0).unwrap();
        assert_relative_eq!(w20, 14.7e-3, max_relative = 0.01);
    }

    #[test]
    fn humidity_ratio_decreases_with_pressure() {
        let lo = humidity_ratio_sat(275.15, 90_000.0).unwrap();
        let hi = humidity_ratio_sat(275.15, 110_000.0).unwrap();
        assert!(lo > hi);
    }

    #[test]
    fn out_of_range_is_an_error() {
        assert!(sat_pressure(150.0).is_err());
        assert!(sat_pressure(400.0).is_err());
        assert!(humidity_ratio_sat(349.0, 500.0).is_err()); // p below p_sat
    }

    #[test]
    fn dew_point_round_trip() {
        let p = 101_325.0;
        for t in [250.0, 263.15, 273.15, 280.0, 295.0] {
            let omega = humidity_ratio_sat(t, p).unwrap();
            let td = dew_point(p, omega).unwrap();
            assert_relative_eq!(td, t, epsilon = 1e-6);
        }
    }
}
