//! Suction-line accumulator: a vessel volume that separates phases and
//! protects the compressor from liquid slugs.
//!
//! The vessel is an ordinary (p, h) control volume — same conserved-quantity
//! transform as a coil CV — but its *outlet* enthalpy is not the mixed-mean
//! enthalpy: the pickup tube draws vapor-rich fluid whose quality depends on
//! the liquid level. An empty vessel returns pure vapor; as it fills, oil
//! bleed and entrainment drag liquid along, modeled by a linearly falling
//! outlet quality. The vessel is also where surplus system charge parks, so
//! its level is the natural "where is the refrigerant" diagnostic.

use crate::hx::refrigerant::{port_flux, state_transform, RefrigerantCv};
use crate::num::{smooth_max, smoothstep};
use crate::properties::RefrigerantTable;
use crate::Result;

#[derive(Debug, Clone)]
pub struct AccumulatorParams {
    /// Vessel volume [m³].
    pub volume: f64,
    /// Outlet quality with the vessel brim-full of liquid.
    pub x_out_min: f64,
    /// Liquid level where carryover begins. Below it the pickup draws dry
    /// vapor — the tube mouth sits above the pool — so the vessel can park
    /// surplus charge without wetting the compressor; above it the outlet
    /// quality falls smoothly to `x_out_min` at a brim-full vessel.
    pub carryover_level: f64,
    /// Port upwind-blend regularization [kg/s].
    pub m_dot_eps: f64,
}

impl Default for AccumulatorParams {
    fn default() -> Self {
        Self {
            volume: 2.0e-3,
            x_out_min: 0.15,
            carryover_level: 0.7,
            m_dot_eps: 1.0e-3,
        }
    }
}

/// Blend width [J/kg] of the smooth handover from the level-based outlet
/// enthalpy to the vessel enthalpy once the contents run superheated.
const H_OUT_BLEND: f64 = 500.0;

/// Level-dependent outlet condition of the vessel at state (p, h).
#[derive(Debug, Clone, Copy)]
pub struct AccumulatorOutlet {
    /// Enthalpy drawn by the pickup tube [J/kg].
    pub h_out: f64,
    /// Liquid volume fraction of the vessel, 0 (dry) to 1 (flooded).
    pub level: f64,
    /// Outlet quality implied by the level.
    pub x_out: f64,
}

/// Compute the pickup-tube outlet state.
///
/// The level is the liquid volume fraction reconstructed from the vessel
/// density between the saturated densities at the vessel pressure. For
/// superheated contents the level is zero and the outlet passes the vessel
/// enthalpy through unchanged (via a smooth max, so the handover at the
/// dew line is not a kink in the system ODEs).
pub fn accumulator_outlet(
    p: f64,
    h: f64,
    params: &AccumulatorParams,
    table: &RefrigerantTable,
) -> Result<AccumulatorOutlet> {
    let props = table.props(p, h)?;
    let sat = table.saturation(p)?;
    let level = ((props.rho - sat.rho_vap) / (sat.rho_liq - sat.rho_vap)).clamp(0.0, 1.0);
    let x_out = 1.0
        - (1.0 - params.x_out_min)
            * smoothstep(level, params.carryover_level, 1.0);
    let h_level = x_out * sat.h_vap + (1.0 - x_out) * sat.h_liq;
    let h_out = smooth_max(h_level, h, H_OUT_BLEND);
    Ok(AccumulatorOutlet { h_out, level, x_out })
}

/// Vessel state derivatives (dp/dt, dh/dt) with inflow from the reversing
/// valve and outflow to the compressor. The outflow carries the pickup-tube
/// enthalpy, not the mixed-mean — this is what makes the vessel a separator
/// rather than a plain volume.
pub fn accumulator_derivatives(
    p: f64,
    h: f64,
    m_dot_in: f64,
    h_in: f64,
    m_dot_out: f64,
    params: &AccumulatorParams,
    table: &RefrigerantTable,
) -> Result<(f64, f64)> {
    let outlet = accumulator_outlet(p, h, params, table)?;
    let a = m_dot_in - m_dot_out;
    let b = port_flux(m_dot_in, h_in, h, params.m_dot_eps)
        - port_flux(m_dot_out, outlet.h_out, h, params.m_dot_eps);
    state_transform(RefrigerantCv { p, h }, params.volume, a, b, table)
}
