//! Variable-speed compressor as a quasi-steady flow source.
//!
//! The compressor has no internal states: given suction state, discharge
//! pressure, and shaft speed it delivers a mass flow, a discharge enthalpy,
//! and the shaft power. Volumetric and isentropic efficiencies come from
//! compact fitted maps in the pressure ratio — adequate stand-ins for a
//! measured map, with the right qualitative behavior (both fall off as the
//! ratio climbs).

use crate::properties::RefrigerantTable;
use crate::Result;

#[derive(Debug, Clone)]
pub struct CompressorParams {
    /// Displacement [m³/rev].
    pub v_disp: f64,
    /// Volumetric efficiency at pressure ratio 1.
    pub eta_v0: f64,
    /// Volumetric efficiency loss per unit pressure ratio (re-expansion).
    pub eta_v_slope: f64,
    /// Peak isentropic efficiency…
    pub eta_is_peak: f64,
    /// …reached at this pressure ratio…
    pub pr_peak: f64,
    /// …falling off quadratically with this curvature [1/PR²].
    pub eta_is_curv: f64,
    /// Mechanical/motor efficiency: shaft power = ṁ·Δh / η_mech.
    pub eta_mech: f64,
    /// Floor on both efficiency maps, keeps extreme ratios from producing
    /// nonsense (zero flow or unbounded discharge temperature).
    pub eta_min: f64,
}

impl Default for CompressorParams {
    fn default() -> Self {
        Self {
            v_disp: 3.3e-5,
            eta_v0: 0.95,
            eta_v_slope: 0.04,
            eta_is_peak: 0.70,
            pr_peak: 2.5,
            eta_is_curv: 0.03,
            eta_mech: 0.92,
            eta_min: 0.30,
        }
    }
}

/// One quasi-steady compressor evaluation.
#[derive(Debug, Clone, Copy)]
pub struct CompressorFlow {
    /// Delivered mass flow [kg/s].
    pub m_dot: f64,
    /// Discharge enthalpy [J/kg].
    pub h_dis: f64,
    /// Shaft power drawn [W]; never less than the enthalpy flow ṁ·Δh.
    pub p_shaft: f64,
    pub eta_v: f64,
    pub eta_is: f64,
}

/// Evaluate the compressor at suction state (p_suc, h_suc), discharge
/// pressure `p_dis`, and shaft speed [rev/s].
///
/// Flow is ṁ = η_v·ρ_suc·V_disp·N. The discharge enthalpy lifts the
/// isentropic enthalpy rise at constant suction entropy by 1/η_is; a
/// discharge pressure at or below suction (startup, equalized system)
/// degenerates to a pure pass-through with zero enthalpy rise.
pub fn compressor_flow(
    p_suc: f64,
    h_suc: f64,
    p_dis: f64,
    speed: f64,
    params: &CompressorParams,
    table: &RefrigerantTable,
) -> Result<CompressorFlow> {
    if speed <= 0.0 {
        return Ok(CompressorFlow {
            m_dot: 0.0,
            h_dis: h_suc,
            p_shaft: 0.0,
            eta_v: 0.0,
            eta_is: 0.0,
        });
    }
    let pr = (p_dis / p_suc).max(1.0);
    let eta_v = (params.eta_v0 - params.eta_v_slope * (pr - 1.0)).clamp(params.eta_min, 1.0);
    let eta_is =
        (params.eta_is_peak - params.eta_is_curv * (pr - params.pr_peak).powi(2))
            .clamp(params.eta_min, 1.0);

    let rho_suc = table.props(p_suc, h_suc)?.rho;
    let m_dot = eta_v * rho_suc * params.v_disp * speed;

    let s_suc = table.entropy(p_suc, h_suc)?;
    let h_is = table.isentropic_enthalpy(p_dis.max(p_suc), s_suc)?;
    let dh = (h_is - h_suc).max(0.0) / eta_is;
    let h_dis = h_suc + dh;
    let p_shaft = m_dot * dh / params.eta_mech;
    Ok(CompressorFlow {
        m_dot,
        h_dis,
        p_shaft,
        eta_v,
        eta_is,
    })
}
