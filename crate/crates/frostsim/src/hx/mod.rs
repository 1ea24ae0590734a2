//! Discretized flat-tube heat exchanger.
//!
//! Refrigerant control volumes with a (p, h) state pair, lumped tube walls,
//! and a quasi-steady moist-air side, chained serially on the refrigerant
//! side and row-by-row on the air side. Outdoor CVs carry a film instance
//! each; indoor CVs run dry.

pub mod air;
pub mod assembly;
pub mod geometry;
pub mod refrigerant;

pub use air::{
    air_htc, air_pressure_drop, dry_air_exchange, film_air_outlet, mass_transfer_coefficient,
    AirHtcParams, MoistAirStream, M_DOT_GATE,
};
pub use assembly::{HxDerivatives, HxModel, HxPorts};
pub use geometry::HxGeometry;
pub use refrigerant::{
    junction_flow, port_flux, refrigerant_cv_derivatives, refrigerant_htc,
    refrigerant_pressure_drop, state_transform, CvPorts, RefrigerantCv, RefrigerantHtcParams,
    DP_LIN,
};
