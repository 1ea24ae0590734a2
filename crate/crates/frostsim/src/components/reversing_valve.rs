//! Four-way reversing valve, modeled as two conductance pairs that trade
//! places over a finite travel time.
//!
//! The valve connects the discharge line to one coil and the suction side
//! to the other. Rather than switching topology discretely — which would
//! inject events into the ODE system — the commanded mode is a continuous
//! signal σ ∈ [0, 1] (0 = heating, 1 = defrost) that splits each port's
//! conductance between the two destinations. The split weights sum to one,
//! so at either end of the travel the valve behaves exactly like the
//! single-mode device, and mid-travel the brief cross-flow mimics the real
//! pressure-equalization blow-by of a sliding-block valve.

use crate::hx::refrigerant::junction_flow;
use crate::num::smoothstep;

#[derive(Debug, Clone)]
pub struct ReversingValveParams {
    /// Friction coefficient of one fully-open path, Δp = k·ṁ|ṁ|/ρ.
    pub k_fric: f64,
    /// Slide travel time [s] over which the mode blends.
    pub t_blend: f64,
}

impl Default for ReversingValveParams {
    fn default() -> Self {
        Self {
            k_fric: 2.0e8,
            t_blend: 2.0,
        }
    }
}

/// Pressure/density pairs at the four line ends the valve connects:
/// compressor discharge, the indoor coil's valve-side port, the outdoor
/// coil's valve-side port, and the suction vessel.
#[derive(Debug, Clone, Copy)]
pub struct ValveEndpoints {
    pub p_dis: f64,
    pub rho_dis: f64,
    pub p_indoor: f64,
    pub rho_indoor: f64,
    pub p_outdoor: f64,
    pub rho_outdoor: f64,
    pub p_suc: f64,
    pub rho_suc: f64,
}

/// The four path flows [kg/s], each positive in the direction named.
#[derive(Debug, Clone, Copy)]
pub struct ReversingValveFlows {
    pub dis_to_indoor: f64,
    pub dis_to_outdoor: f64,
    pub indoor_to_suc: f64,
    pub outdoor_to_suc: f64,
}

/// Evaluate the valve at mode signal `sigma` (0 = heating: discharge →
/// indoor, outdoor → suction; 1 = defrost: discharge → outdoor, indoor →
/// suction).
pub fn reversing_valve_flows(
    sigma: f64,
    ep: &ValveEndpoints,
    params: &ReversingValveParams,
) -> ReversingValveFlows {
    let s = sigma.clamp(0.0, 1.0);
    let k = params.k_fric;
    ReversingValveFlows {
        dis_to_indoor: (1.0 - s)
            * junction_flow(ep.p_dis - ep.p_indoor, ep.rho_dis, ep.rho_indoor, k),
        dis_to_outdoor: s
            * junction_flow(ep.p_dis - ep.p_outdoor, ep.rho_dis, ep.rho_outdoor, k),
        indoor_to_suc: s * junction_flow(ep.p_indoor - ep.p_suc, ep.rho_indoor, ep.rho_suc, k),
        outdoor_to_suc: (1.0 - s)
            * junction_flow(ep.p_outdoor - ep.p_suc, ep.rho_outdoor, ep.rho_suc, k),
    }
}

/// Mode signal for a switch commanded at `t_switch`: rides smoothly from 0
/// to 1 over the valve travel time. Compose two of these for a defrost
/// window (up at entry, down at exit).
pub fn mode_blend(t: f64, t_switch: f64, t_blend: f64) -> f64 {
    smoothstep(t, t_switch, t_switch + t_blend)
}
