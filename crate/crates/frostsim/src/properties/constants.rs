//! Water, ice, and air constants used by the film model.

use crate::{Error, Result};

/// Thermophysical constants of water in its three phases plus dry air,
/// evaluated near the freezing point. All phase-change enthalpies are taken
/// at 0 °C; that is where the film model actually changes phase, so the
/// temperature dependence of the latent heats is deliberately ignored.
#[derive(Debug, Clone, Copy, serde::Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WaterConstants {
    /// Freezing temperature [K].
    pub t_0: f64,
    /// Heat of fusion [J/kg].
    pub dh_sl: f64,
    /// Heat of vaporization [J/kg].
    pub dh_lv: f64,
    /// Heat of sublimation [J/kg].
    pub dh_sv: f64,
    /// Specific heat of ice [J/(kg·K)].
    pub cp_ice: f64,
    /// Specific heat of liquid water [J/(kg·K)].
    pub cp_water: f64,
    /// Specific heat of dry air [J/(kg·K)].
    pub cp_air: f64,
    /// Specific heat of water vapor [J/(kg·K)], for moist-air mixtures.
    pub cp_vapor: f64,
    /// Density of ice [kg/m³].
    pub rho_ice: f64,
    /// Density of liquid water [kg/m³].
    pub rho_water: f64,
    /// Thermal conductivity of ice [W/(m·K)].
    pub k_ice: f64,
    /// Thermal conductivity of liquid water [W/(m·K)].
    pub k_water: f64,
}

impl Default for WaterConstants {
    fn default() -> Self {
        WaterConstants {
            t_0: 273.15,
            dh_sl: 3.34e5,
            dh_lv: 2.501e6,
            dh_sv: 2.835e6,
            cp_ice: 2100.0,
            cp_water: 4186.0,
            cp_air: 1006.0,
            cp_vapor: 1860.0,
            rho_ice: 917.0,
            rho_water: 1000.0,
            k_ice: 2.2,
            k_water: 0.6,
        }
    }
}

impl WaterConstants {
    /// Check internal consistency; returns the first violated constraint.
    pub fn validate(&self) -> Result<()> {
        let all = [
            ("t_0", self.t_0),
            ("dh_sl", self.dh_sl),
            ("dh_lv", self.dh_lv),
            ("dh_sv", self.dh_sv),
            ("cp_ice", self.cp_ice),
            ("cp_water", self.cp_water),
            ("cp_air", self.cp_air),
            ("cp_vapor", self.cp_vapor),
            ("rho_ice", self.rho_ice),
            ("rho_water", self.rho_water),
            ("k_ice", self.k_ice),
            ("k_water", self.k_water),
        ];
        for (name, v) in all {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::config(
                    format!("constants.{name}"),
                    format!("must be strictly positive, got {v}"),
                ));
            }
        }
        // Hess's law: sublimation = fusion + vaporization. Allow 2% slack for
        // constants quoted at slightly different temperatures.
        let hess = self.dh_sl + self.dh_lv;
        if (self.dh_sv - hess).abs() > 0.02 * hess {
            return Err(Error::config(
                "constants.dh_sv",
                format!(
                    "heat of sublimation {} inconsistent with dh_sl + dh_lv = {hess} (>2% off)",
                    self.dh_sv
                ),
            ));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_consistent() {
        WaterConstants::default().validate().unwrap();
    }

    #[test]
    fn hess_violation_is_caught() {
        let c = WaterConstants {
            dh_sv: 2.0e6,
            ..WaterConstants::default()
        };
        assert!(c.validate().is_err());
    }
}
