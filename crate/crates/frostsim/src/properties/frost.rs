//! Frost-layer correlations: conductivity, porosity, vapor diffusivity.

use crate::{Error, Result};

const RHO_MIN: f64 = 20.0;
const RHO_MAX: f64 = 920.0;

/// Thermal conductivity of frost [W/(m·K)] as a function of frost density,
/// after Lee et al. (quadratic fit, CGS-free form):
/// k_f = 0.132 + 3.13e-4·ρ + 1.6e-8·ρ². Valid for 20…920 kg/m³.
pub fn frost_conductivity(rho_f: f64) -> Result<f64> {
    if !(RHO_MIN..=RHO_MAX).contains(&rho_f) {
        return Err(Error::OutOfRange {
            quantity: "frost density",
            value: rho_f,
            min: RHO_MIN,
            max: RHO_MAX,
        });
    }
    Ok(0.132 + 3.13e-4 * rho_f + 1.6e-8 * rho_f * rho_f)
}

/// Binary diffusivity of water vapor in air [m²/s],
/// D_va = 2.11e-5 · (T/273.15)^1.94 · (101325/p).
pub fn vapor_air_diffusivity(t: f64, p: f64) -> f64 {
    2.11e-5 * (t / 273.15).powf(1.94) * (101_325.0 / p)
}

/// Effective diffusivity of water vapor through the porous frost layer
/// [m²/s]: the binary diffusivity reduced by the tortuosity factor
/// ε / (1 − 0.58·(1 − ε)).
pub fn effective_diffusivity(epsilon: f64, t: f64, p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::OutOfRange {
            quantity: "porosity",
            value: epsilon,
            min: 0.0,
            max: 1.0,
        });
    }
    let factor = epsilon / (1.0 - 0.58 * (1.0 - epsilon));
    Ok(vapor_air_diffusivity(t, p) * factor)
}

/// Frost porosity from the parallel-void relation ε = 1 − ρ_f/ρ_ice,
/// clamped to [0, 1].
pub fn porosity(rho_f: f64, rho_ice: f64) -> f64 {
    (1.0 - rho_f / rho_ice).clamp(0.0, 1.0)
}
