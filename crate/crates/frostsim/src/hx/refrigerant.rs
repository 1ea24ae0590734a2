//! Refrigerant side of a heat-exchanger control volume.
//!
//! Each CV carries a (p, h) state pair. Mass and energy balances are written
//! in conserved form (M = ρV, U = V·(ρh − p)) and mapped to (dp/dt, dh/dt)
//! through the density partials of the property table, so the integrator
//! works directly on the physically meaningful pair. Inter-CV flows come
//! from the steady momentum balance inverted explicitly — the network stays
//! an ODE with no algebraic loop.

use crate::num::{odd_sqrt, smoothstep, soft_abs};
use crate::properties::RefrigerantTable;
use crate::{Error, Result};

/// Pressure regularization width for flow laws [Pa]: below this the
/// square-root characteristic flattens into a linear one.
pub const DP_LIN: f64 = 100.0;

/// Refrigerant state pair of one control volume.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefrigerantCv {
    /// Pressure [Pa].
    pub p: f64,
    /// Specific enthalpy [J/kg].
    pub h: f64,
}

/// Port flows of one CV. Positive `m_dot_in` enters at the upstream port,
/// positive `m_dot_out` leaves at the downstream port. The neighbor
/// enthalpies ride in when the respective flow reverses.
#[derive(Debug, Clone, Copy)]
pub struct CvPorts {
    pub m_dot_in: f64,
    /// Enthalpy carried in by forward flow at the upstream port [J/kg].
    pub h_upstream: f64,
    pub m_dot_out: f64,
    /// Enthalpy carried in by reversed flow at the downstream port [J/kg].
    pub h_downstream: f64,
}

/// Enthalpy flux [W] through a port carrying `m_dot`, upwinded by flow sign
/// with a smooth blend of width `m_dot_eps`: forward flow carries
/// `h_forward`, reversed flow carries `h_backward`, so energy fluxes stay
/// C¹ through flow reversal — which the defrost switchover exercises on
/// every junction.
pub fn port_flux(m_dot: f64, h_forward: f64, h_backward: f64, m_dot_eps: f64) -> f64 {
    let sigma = smoothstep(m_dot, -m_dot_eps, m_dot_eps);
    m_dot * (sigma * h_forward + (1.0 - sigma) * h_backward)
}

/// Map the conserved-quantity rates of a fixed volume to state derivatives
/// (dp/dt, dh/dt). `a` = dM/dt (net mass inflow [kg/s]), `b` = dU/dt (net
/// energy inflow [W]).
///
/// The chain rule on M = ρV and U = V(ρh − p) reduces (after eliminating
/// the second row against the first) to
///
/// ```text
///   ⎡ ∂ρ/∂p  ∂ρ/∂h ⎤ ⎡ dp/dt ⎤   ⎡ a/V        ⎤
///   ⎣  −1      ρ    ⎦ ⎣ dh/dt ⎦ = ⎣ (b − h·a)/V ⎦
/// ```
///
/// whose determinant ρ·∂ρ/∂p + ∂ρ/∂h stays positive for any stable fluid
/// state.
pub fn state_transform(
    cv: RefrigerantCv,
    volume: f64,
    a: f64,
    b: f64,
    table: &RefrigerantTable,
) -> Result<(f64, f64)> {
    let props = table.props(cv.p, cv.h)?;
    let part = table.density_partials(cv.p, cv.h)?;
    let det = props.rho * part.drho_dp + part.drho_dh;
    let det_scale = (props.rho * part.drho_dp).abs() + part.drho_dh.abs();
    if det.abs() < 1e-9 * det_scale.max(1e-300) {
        return Err(Error::SingularTransform(format!(
            "state transform determinant vanished at p = {:.0} Pa, h = {:.0} J/kg",
            cv.p, cv.h
        )));
    }
    let e = a / volume;
    let f = (b - cv.h * a) / volume;
    let dp_dt = (props.rho * e - part.drho_dh * f) / det;
    let dh_dt = (part.drho_dp * f + e) / det;
    Ok((dp_dt, dh_dt))
}

/// CV balance with one inflow and one outflow port, `q_r` positive
/// refrigerant → wall. Port enthalpies are upwinded via [`port_flux`].
pub fn refrigerant_cv_derivatives(
    cv: RefrigerantCv,
    volume: f64,
    ports: &CvPorts,
    q_r: f64,
    m_dot_eps: f64,
    table: &RefrigerantTable,
) -> Result<(f64, f64)> {
    let a = ports.m_dot_in - ports.m_dot_out;
    let b = port_flux(ports.m_dot_in, ports.h_upstream, cv.h, m_dot_eps)
        - port_flux(ports.m_dot_out, cv.h, ports.h_downstream, m_dot_eps)
        - q_r;
    state_transform(cv, volume, a, b, table)
}

/// Steady momentum balance of one segment: Δp = k_fric·ṁ·|ṁ|/ρ.
/// Sign-preserving, valid for both flow directions.
pub fn refrigerant_pressure_drop(m_dot: f64, rho: f64, k_fric: f64) -> f64 {
    k_fric * m_dot * m_dot.abs() / rho
}

/// The momentum balance inverted: explicit inter-CV flow from the pressure
/// difference, ṁ = √(ρ/k)·√Δp, regularized below [`DP_LIN`] and with the
/// density upwinded by a smooth blend on the pressure difference.
pub fn junction_flow(dp: f64, rho_from: f64, rho_to: f64, k_fric: f64) -> f64 {
    let sigma = smoothstep(dp, -DP_LIN, DP_LIN);
    let rho = sigma * rho_from + (1.0 - sigma) * rho_to;
    (rho / k_fric).sqrt() * odd_sqrt(dp, DP_LIN)
}

/// Refrigerant-side heat transfer coefficient model: a Dittus–Boelter-style
/// power law on mass flow (fluid properties folded into `coeff`), a constant
/// two-phase multiplier blended in smoothly over x ∈ [0, 0.05] and
/// [0.95, 1], and a natural-convection floor for stagnant refrigerant.
#[derive(Debug, Clone)]
pub struct RefrigerantHtcParams {
    /// Single-phase coefficient at 1 kg/s [W/(m²·K)].
    pub coeff: f64,
    /// Flow exponent (0.8 for turbulent Dittus–Boelter).
    pub exponent: f64,
    /// Two-phase enhancement over the single-phase value.
    pub two_phase_mult: f64,
    /// Floor for stagnant refrigerant [W/(m²·K)].
    pub alpha_min: f64,
    /// Flow regularization [kg/s]: |ṁ| is rounded as ṁ²/√(ṁ² + ε²) so the
    /// power law stays differentiable through flow reversal and stagnant
    /// flow lands exactly on the floor.
    pub m_dot_eps: f64,
}

impl Default for RefrigerantHtcParams {
    fn default() -> Self {
        Self {
            coeff: 6.0e3,
            exponent: 0.8,
            two_phase_mult: 4.0,
            alpha_min: 30.0,
            m_dot_eps: 1.0e-6,
        }
    }
}

/// Quality band over which the two-phase multiplier fades in/out.
const X_BLEND: f64 = 0.05;

/// Evaluate the HTC model at vapor quality `x` and local mass flow `m_dot`.
pub fn refrigerant_htc(x: f64, m_dot: f64, p: &RefrigerantHtcParams) -> f64 {
    let alpha_sp = p.coeff * soft_abs(m_dot, p.m_dot_eps).powf(p.exponent);
    let rise = smoothstep(x, 0.0, X_BLEND);
    let fall = smoothstep(x, 1.0 - X_BLEND, 1.0);
    let mult = 1.0 + (p.two_phase_mult - 1.0) * rise * (1.0 - fall);
    p.alpha_min + alpha_sp * mult
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn table() -> &'static RefrigerantTable {
        use once_cell::sync::Lazy;
        static TABLE: Lazy<RefrigerantTable> = Lazy::new(RefrigerantTable::builtin);
        &TABLE
    }

    #[test]
    fn equilibrium_cv_has_zero_derivatives() {
        let t = table();
        let cv = RefrigerantCv { p: 5.0e5, h: 4.2e5 };
        let ports = CvPorts {
            m_dot_in: 0.03,
            h_upstream: cv.h,
            m_dot_out: 0.03,
            h_downstream: cv.h,
        };
        let (dp, dh) = refrigerant_cv_derivatives(cv, 2.5e-5, &ports, 0.0, 1e-3, t).unwrap();
        assert_eq!(dp, 0.0);
        assert_eq!(dh, 0.0);
    }

    #[test]
    fn closed_ports_heat_loss_recovers_du() {
        // with ports closed, dU/dt must equal −Q_r; reconstruct U̇ from the
        // returned (ṗ, ḣ) through the same table partials and compare
        let t = table();
        let cv = RefrigerantCv { p: 8.0e5, h: 3.0e5 };
        let ports = CvPorts {
            m_dot_in: 0.0,
            h_upstream: 0.0,
            m_dot_out: 0.0,
            h_downstream: 0.0,
        };
        let v = 2.5e-5;
        let q_r = 100.0;
        let (dp, dh) = refrigerant_cv_derivatives(cv, v, &ports, q_r, 1e-3, t).unwrap();
        let props = t.props(cv.p, cv.h).unwrap();
        let part = t.density_partials(cv.p, cv.h).unwrap();
        let drho = part.drho_dp * dp + part.drho_dh * dh;
        let du = v * ((part.drho_dp * cv.h - 1.0) * dp + (part.drho_dh * cv.h + props.rho) * dh);
        assert_relative_eq!(du, -q_r, max_relative = 1e-9);
        // ports closed: mass must not change either
        assert_relative_eq!(v * drho, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn reversed_flow_upwinds_from_the_opposite_ports() {
        let t = table();
        let cv = RefrigerantCv { p: 5.0e5, h: 4.0e5 };
        let h_up = 3.6e5;
        let h_down = 4.4e5;
        // forward: carries h_up in, own h out
        let fwd = CvPorts {
            m_dot_in: 0.05,
            h_upstream: h_up,
            m_dot_out: 0.05,
            h_downstream: h_down,
        };
        // reversed: both flows negative — carries own h out at the upstream
        // port and h_down in at the downstream port
        let rev = CvPorts {
            m_dot_in: -0.05,
            h_upstream: h_up,
            m_dot_out: -0.05,
            h_downstream: h_down,
        };
        let (_, dh_f) = refrigerant_cv_derivatives(cv, 2.5e-5, &fwd, 0.0, 1e-3, t).unwrap();
        let (_, dh_r) = refrigerant_cv_derivatives(cv, 2.5e-5, &rev, 0.0, 1e-3, t).unwrap();
        // forward flow pulls h toward h_up (cooler), reversed toward h_down
        assert!(dh_f < 0.0, "forward dh = {dh_f}");
        assert!(dh_r > 0.0, "reversed dh = {dh_r}");
    }

    #[test]
    fn transform_determinant_positive_across_the_hull() {
        // scan the table interior: the (M,U) → (p,h) transform must stay
        // well-conditioned everywhere the simulation can wander
        let t = table();
        let (p_min, p_max, h_min, h_max) = t.hull();
        for i in 0..40 {
            for j in 0..60 {
                let p = p_min + (p_max - p_min) * (i as f64 + 0.5) / 40.0;
                let h = h_min + (h_max - h_min) * (j as f64 + 0.5) / 60.0;
                let props = t.props(p, h).unwrap();
                let part = t.density_partials(p, h).unwrap();
                let det = props.rho * part.drho_dp + part.drho_dh;
                assert!(
                    det > 0.0,
                    "determinant {det:.3e} at p = {p:.0}, h = {h:.0}"
                );
            }
        }
    }

    #[test]
    fn pressure_drop_law_shape() {
        assert_eq!(refrigerant_pressure_drop(0.0, 30.0, 6e7), 0.0);
        let dp = refrigerant_pressure_drop(0.03, 30.0, 6e7);
        assert_eq!(refrigerant_pressure_drop(-0.03, 30.0, 6e7), -dp);
        assert_relative_eq!(
            refrigerant_pressure_drop(0.06, 30.0, 6e7),
            4.0 * dp,
            max_relative = 1e-12
        );
    }

    #[test]
    fn junction_flow_inverts_the_pressure_drop() {
        let (rho, k) = (30.0, 6.0e7);
        let m = 0.04;
        let dp = refrigerant_pressure_drop(m, rho, k);
        assert!(dp > 10.0 * DP_LIN, "test needs a firmly turbulent point");
        let m_back = junction_flow(dp, rho, rho, k);
        assert_relative_eq!(m_back, m, max_relative = 3e-3);
        assert_eq!(junction_flow(0.0, rho, rho, k), 0.0);
        assert_relative_eq!(
            junction_flow(-dp, rho, rho, k),
            -m_back,
            max_relative = 1e-12
        );
    }

    #[test]
    fn htc_floor_power_law_and_blend_continuity() {
        let p = RefrigerantHtcParams::default();
        // stagnant: exactly the natural-convection floor
        assert_eq!(refrigerant_htc(1.0, 0.0, &p), p.alpha_min);
        // single-phase power law: doubling flow scales by 2^0.8
        let a1 = refrigerant_htc(1.0, 0.02, &p) - p.alpha_min;
        let a2 = refrigerant_htc(1.0, 0.04, &p) - p.alpha_min;
        assert_relative_eq!(a2 / a1, 2f64.powf(0.8), max_relative = 1e-6);
        // two-phase plateau carries the multiplier
        let mid = refrigerant_htc(0.5, 0.02, &p) - p.alpha_min;
        assert_relative_eq!(mid / a1, p.two_phase_mult, max_relative = 1e-9);
        // continuity across the x = 0.05 blend edge
        let lo = refrigerant_htc(X_BLEND - 1e-12, 0.02, &p);
        let hi = refrigerant_htc(X_BLEND + 1e-12, 0.02, &p);
        assert_relative_eq!(lo, hi, max_relative = 1e-9);
    }
}
