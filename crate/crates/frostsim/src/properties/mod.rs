//! Thermophysical property backbone.
//!
//! Moist-air psychrometrics, water/ice constants, frost-layer correlations,
//! and table-interpolated refrigerant properties. Everything here is a pure
//! function over immutable data, safe to call concurrently.

mod constants;
mod frost;
mod psychrometrics;
mod refrigerant;

pub use constants::WaterConstants;
pub use frost::{effective_diffusivity, frost_conductivity, porosity, vapor_air_diffusivity};
pub use psychrometrics::{
    dew_point, humidity_ratio_sat, moist_cp, sat_pressure, sat_vapor_density, vapor_density_in_air,
    R_DRY_AIR, R_WATER_VAPOR,
};
pub use refrigerant::{DensityPartials, RefrigerantProps, RefrigerantTable, SaturationProps};
