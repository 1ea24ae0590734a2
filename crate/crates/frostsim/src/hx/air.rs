//! Quasi-steady moist-air side of a heat-exchanger control volume.
//!
//! The air side carries no states: each call maps an inlet stream plus a
//! surface condition to heat/mass fluxes and an outlet stream. Mass transfer
//! comes from the heat transfer coefficient through the Lewis analogy
//! (Le = 0.89 for water vapor in air).

use crate::film::FilmDiagnostics;
use crate::hx::geometry::HxGeometry;
use crate::num::{smooth_max, smoothstep01, soft_abs};
use crate::properties::{self, WaterConstants};
use crate::Result;

/// Lewis number of water vapor in air.
pub const LEWIS: f64 = 0.89;

/// Moist-air stream between control volumes. Humidity is the mixing ratio ω
/// (kg vapor per kg dry air); `m_dot_dry` is the dry-air flow, which is the
/// conserved carrier quantity along an air path.
#[derive(Debug, Clone, Copy)]
pub struct MoistAirStream {
    /// Temperature [K].
    pub t: f64,
    /// Total pressure [Pa].
    pub p: f64,
    /// Humidity ratio [kg/kg dry air].
    pub omega: f64,
    /// Dry-air mass flow [kg/s].
    pub m_dot_dry: f64,
}

impl MoistAirStream {
    /// Specific enthalpy per kg dry air [J/kg], datum 0 °C dry air /
    /// liquid-free vapor reference (the conventional psychrometric datum).
    pub fn enthalpy(&self, c: &WaterConstants) -> f64 {
        let dt = self.t - c.t_0;
        c.cp_air * dt + self.omega * (c.dh_lv + c.cp_vapor * dt)
    }

    /// Temperature that gives enthalpy `h` at humidity ratio `omega`
    /// (the enthalpy is affine in T, so this is closed-form).
    pub fn temperature_from_enthalpy(h: f64, omega: f64, c: &WaterConstants) -> f64 {
        c.t_0 + (h - omega * c.dh_lv) / (c.cp_air + omega * c.cp_vapor)
    }

    /// Moist-air density [kg/m³] from the ideal-gas mixture rule.
    pub fn density(&self) -> f64 {
        let r_mix = properties::R_DRY_AIR * (1.0 + 1.607_858 * self.omega) / (1.0 + self.omega);
        self.p / (r_mix * self.t)
    }

    /// Specific heat per kg dry air [J/(kg·K)].
    pub fn cp(&self, c: &WaterConstants) -> f64 {
        properties::moist_cp(self.omega, c.cp_air, c.cp_vapor)
    }
}

/// Mass transfer coefficient [kg/(m²·s)] from the heat transfer coefficient
/// via the Lewis analogy: α_m = α_a / (c_p,moist · Le^(2/3)).
pub fn mass_transfer_coefficient(alpha_a: f64, omega: f64, c: &WaterConstants) -> f64 {
    alpha_a / (properties::moist_cp(omega, c.cp_air, c.cp_vapor) * LEWIS.powf(2.0 / 3.0))
}

/// Deposition (condensation/desublimation) rate [kg/s] onto a surface at
/// `t_surface`, nonnegative.
///
/// The raw driving law is α_m·A_s·(ω − ω_sat(T_s)); the finite vapor supply
/// of the stream is folded in as a series conductance (harmonic mean of
/// α_m·A_s and ṁ_dry), which keeps the outlet humidity above the saturation
/// floor and stays smooth as the fan spins down.
pub fn deposition_rate(
    air: &MoistAirStream,
    t_surface: f64,
    alpha_m: f64,
    a_s: f64,
) -> Result<f64> {
    let omega_s = properties::humidity_ratio_sat(t_surface, air.p)?;
    let g_film = alpha_m * a_s;
    let g = if air.m_dot_dry > 0.0 {
        g_film * air.m_dot_dry / (g_film + air.m_dot_dry)
    } else {
        0.0
    };
    Ok((g * (air.omega - omega_s)).max(0.0))
}

/// Air-side heat transfer coefficient model: a power law on the dry-air
/// flow through one lane, with a natural-convection floor so a stopped fan
/// still leaves a physical film coefficient for the melt/drain stages.
#[derive(Debug, Clone)]
pub struct AirHtcParams {
    /// Natural-convection floor [W/(m²·K)].
    pub alpha_floor: f64,
    /// Forced-convection coefficient at 1 kg/s lane flow [W/(m²·K)].
    pub coeff: f64,
    /// Flow exponent (≈0.6 for staggered finned-tube banks).
    pub exponent: f64,
}

impl Default for AirHtcParams {
    fn default() -> Self {
        Self {
            alpha_floor: 5.0,
            coeff: 69.3,
            exponent: 0.6,
        }
    }
}

/// Flow regularization for the HTC power law [kg/s], keeps the exponent’s
/// infinite slope at zero flow out of the Jacobian.
const HTC_M_DOT_EPS: f64 = 1.0e-3;

/// Evaluate the air-side HTC at dry-air lane flow `m_dot_dry`. A stopped
/// fan lands exactly on the floor.
pub fn air_htc(m_dot_dry: f64, p: &AirHtcParams) -> f64 {
    p.alpha_floor + p.coeff * soft_abs(m_dot_dry, HTC_M_DOT_EPS).powf(p.exponent)
}

/// Sensible exchange between an air stream and a dry (film-free) wall at
/// `t_wall`, using the single-stream effectiveness relation
/// T_out = T_wall + (T_in − T_wall)·e^(−NTU) with NTU = α·A/(ṁ·cp).
///
/// Returns (wall → air heat [W], outlet stream). The exponential form keeps
/// the outlet from overshooting the wall temperature no matter how large
/// α·A/ṁcp grows, which a plain αAΔT law does not guarantee on coarse CVs.
/// With the fan stopped the stream carries nothing away (q → 0 as ṁ → 0):
/// stagnant air equilibrates with the coil and exchange ceases, so the
/// zero-flow branch returns the inlet unchanged.
pub fn dry_air_exchange(
    air: &MoistAirStream,
    t_wall: f64,
    alpha_a: f64,
    a_s: f64,
    c: &WaterConstants,
) -> (f64, MoistAirStream) {
    if air.m_dot_dry <= 0.0 {
        return (0.0, *air);
    }
    let m_cp = air.m_dot_dry * air.cp(c);
    let ntu = alpha_a * a_s / m_cp;
    let t_out = t_wall + (air.t - t_wall) * (-ntu).exp();
    let q = m_cp * (t_out - air.t);
    let outlet = MoistAirStream { t: t_out, ..*air };
    (q, outlet)
}

/// Lane flow [kg/s] below which evaporated vapor stops being carried by the
/// stream and is vented to the surroundings instead.
pub const M_DOT_GATE: f64 = 0.02;

/// Outlet stream downstream of a film-covered surface, from the film
/// diagnostics of the same instant.
///
/// Humidity follows from exact water bookkeeping: deposition (`w_dep`)
/// leaves the stream, evaporation re-enters it — but only the gated share
/// σ(ṁ) of `w_vap`, because a near-stagnant stream cannot plausibly carry
/// the defrost steam away; the remainder is vented past the coil and
/// reported separately. σ/ṁ stays bounded as ṁ → 0, so the humidity update
/// never blows up during fan spin-down. `w_dep` itself is supply-limited
/// upstream (series conductance in [`deposition_rate`]), which keeps ω_out
/// above the surface saturation floor without any clamp.
///
/// Energy: the film’s air-side heat `q_a` already carries the latent part
/// of deposition, so the stream balance is Ḣ_out = Ḣ_in − q_a − ḣ_dep plus
/// the enthalpy of re-entrained vapor at the film temperature (the
/// drain-stage heat is pure sensible, so evaporation must ride in
/// explicitly).
///
/// Every debit against the stream wears the same gate σ(ṁ): the film's
/// exchange laws bottom out at a natural-convection floor, so `q_a` stays
/// finite as the fan stops, and an ungated debit would hand a trickle
/// stream more heat than it can carry — its temperature diverges as q/ṁ
/// right as a defrost ends. Below the gate the film is talking to the
/// ambient bath the trickle merges into, not to the stream.
///
/// Returns (outlet, vapor carried into the stream [kg/s], vapor vented
/// [kg/s]).
pub fn film_air_outlet(
    air: &MoistAirStream,
    diag: &FilmDiagnostics,
    c: &WaterConstants,
) -> (MoistAirStream, f64, f64) {
    if air.m_dot_dry <= 0.0 {
        return (*air, 0.0, diag.w_vap);
    }
    let sigma = smoothstep01(air.m_dot_dry / M_DOT_GATE);
    let w_vap_stream = sigma * diag.w_vap;
    let w_vent = (1.0 - sigma) * diag.w_vap;
    let omega_out = air.omega + (w_vap_stream - sigma * diag.w_dep) / air.m_dot_dry;
    let h_vapor = c.dh_lv + c.cp_vapor * (diag.t_film - c.t_0);
    // the stream gives up what the film books — the exchanged heat plus the
    // enthalpy its deposited vapor carries into the layer — but only to the
    // extent it is actually flowing
    let h_out = air.enthalpy(c)
        + (w_vap_stream * h_vapor - sigma * (diag.q_a + diag.h_dot_dep)) / air.m_dot_dry;
    let t_out = MoistAirStream::temperature_from_enthalpy(h_out, omega_out, c);
    let outlet = MoistAirStream {
        t: t_out,
        omega: omega_out,
        ..*air
    };
    (outlet, w_vap_stream, w_vent)
}

/// Half-width of the smooth-max used to floor the free-flow fraction.
const FRAC_SMOOTH_W: f64 = 0.01;

/// Coil air-side pressure drop at volume flow `v_dot` [m³/s] with a frost
/// layer of thickness `delta_f` narrowing the fin gaps.
///
/// The free-flow fraction 1 − δ_f/s (s = half fin gap — frost grows from
/// both fins) is floored smoothly at `min_free_frac` so the quadratic
/// Δp = ζ·ρ·v²/2 stays finite even if frost bridges the gap; the returned
/// flag reports whether the raw fraction fell below the floor, i.e. the
/// coil is effectively blocked and the operating point is extrapolated.
pub fn air_pressure_drop(
    v_dot: f64,
    delta_f: f64,
    rho_air: f64,
    geom: &HxGeometry,
) -> (f64, bool) {
    let frac_raw = 1.0 - delta_f / geom.fin_gap_half;
    let blocked = frac_raw < geom.min_free_frac;
    let frac = smooth_max(frac_raw, geom.min_free_frac, FRAC_SMOOTH_W);
    let v = v_dot / (geom.free_flow_area * frac);
    (geom.zeta_air * rho_air * v * v / 2.0, blocked)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn consts() -> WaterConstants {
        WaterConstants::default()
    }

    fn stream(t: f64, omega: f64, m_dot: f64) -> MoistAirStream {
        MoistAirStream {
            t,
            p: 101_325.0,
            omega,
            m_dot_dry: m_dot,
        }
    }

    #[test]
    fn enthalpy_round_trip() {
        let c = consts();
        let s = stream(275.15, 3.0e-3, 0.1);
        let h = s.enthalpy(&c);
        let t = MoistAirStream::temperature_from_enthalpy(h, s.omega, &c);
        assert_relative_eq!(t, s.t, epsilon = 1e-10);
    }

    #[test]
    fn density_close_to_dry_air() {
        let s = stream(273.15, 0.0, 0.1);
        assert_relative_eq!(s.density(), 1.292, max_relative = 1e-3);
        // humid air is lighter
        let humid = stream(273.15, 10e-3, 0.1);
        assert!(humid.density() < s.density());
    }

    #[test]
    fn lewis_analogy_magnitude() {
        let c = consts();
        // α_a = 45 W/(m²K) in ~1 kJ/(kg·K) air gives α_m of order 0.05
        let am = mass_transfer_coefficient(45.0, 3e-3, &c);
        assert!(am > 0.03 && am < 0.06, "alpha_m = {am}");
    }

    #[test]
    fn deposition_zero_at_saturation_equilibrium() {
        let c = consts();
        let t_s = 270.0;
        let omega = properties::humidity_ratio_sat(t_s, 101_325.0).unwrap();
        let s = stream(275.15, omega, 0.1);
        let rate = deposition_rate(&s, t_s, 0.05, 0.5).unwrap();
        assert_eq!(rate, 0.0);
    }

    #[test]
    fn deposition_clamped_nonnegative_and_supply_limited() {
        let c = consts();
        // surface warmer than dew point -> no deposition
        let s = stream(275.15, 2e-3, 0.1);
        assert_eq!(deposition_rate(&s, 280.0, 0.05, 0.5).unwrap(), 0.0);
        // huge alpha_m: rate approaches the stream supply limit, not beyond
        let s = stream(275.15, 4e-3, 0.01);
        let rate = deposition_rate(&s, 263.15, 50.0, 1.0).unwrap();
        let omega_s = properties::humidity_ratio_sat(263.15, 101_325.0).unwrap();
        assert!(rate <= 0.01 * (s.omega - omega_s));
        // no flow, no deposition
        let s = stream(275.15, 4e-3, 0.0);
        assert_eq!(deposition_rate(&s, 263.15, 0.05, 0.5).unwrap(), 0.0);
    }

    #[test]
    fn htc_floor_and_power_law() {
        let p = AirHtcParams::default();
        assert_eq!(air_htc(0.0, &p), p.alpha_floor);
        let a1 = air_htc(0.1, &p) - p.alpha_floor;
        let a2 = air_htc(0.2, &p) - p.alpha_floor;
        assert_relative_eq!(a2 / a1, 2f64.powf(0.6), max_relative = 1e-4);
    }

    #[test]
    fn dry_exchange_balances_and_respects_the_wall_limit() {
        let c = consts();
        let air = stream(275.15, 3e-3, 0.18);
        let t_wall = 265.15;
        let (q, out) = dry_air_exchange(&air, t_wall, 40.0, 0.42, &c);
        // air cools toward (never past) the wall
        assert!(out.t < air.t && out.t > t_wall, "t_out = {}", out.t);
        assert!(q < 0.0);
        // stream energy balance is exact
        let dh = out.m_dot_dry * (out.enthalpy(&c) - air.enthalpy(&c));
        assert_relative_eq!(dh, q, max_relative = 1e-12);
        // enormous NTU pins the outlet to the wall instead of overshooting
        let (_, pinned) = dry_air_exchange(&air, t_wall, 4.0e4, 0.42, &c);
        assert_relative_eq!(pinned.t, t_wall, epsilon = 1e-6);
        // fan off: no exchange
        let still = stream(275.15, 3e-3, 0.0);
        let (q0, out0) = dry_air_exchange(&still, t_wall, 40.0, 0.42, &c);
        assert_eq!(q0, 0.0);
        assert_eq!(out0.t, still.t);
    }

    fn diag(q_a: f64, w_dep: f64, w_vap: f64, t_film: f64) -> FilmDiagnostics {
        let c = consts();
        FilmDiagnostics {
            gamma: [1.0, 0.0, 0.0, 0.0],
            t_film,
            t_fs: t_film,
            q_a,
            q_wall: 0.0,
            m_dot_rho_in: 0.0,
            m_dot_delta_in: 0.0,
            m_dot_melt: 0.0,
            m_dot_drain: 0.0,
            m_dot_vap: 0.0,
            h_dot_out: 0.0,
            w_dep,
            h_dot_dep: w_dep * (-c.dh_sl + c.cp_ice * (t_film - c.t_0)),
            w_vap,
        }
    }

    #[test]
    fn film_outlet_conserves_water_and_energy() {
        let c = consts();
        let air = stream(275.15, 4e-3, 0.18);
        let d = diag(120.0, 1.2e-5, 0.0, 268.0);
        let (out, w_in, w_vent) = film_air_outlet(&air, &d, &c);
        // water: dry-air flow is the carrier; vapor books must close exactly
        let water_in = air.m_dot_dry * air.omega;
        let water_out = out.m_dot_dry * out.omega + d.w_dep - w_in;
        assert_relative_eq!(water_out, water_in, max_relative = 1e-12);
        assert_eq!(w_vent, 0.0);
        // energy: the stream pays the exchanged heat plus the ice enthalpy
        // its frozen-out vapor takes along — the film's books, mirrored
        let dh = out.m_dot_dry * out.enthalpy(&c) - air.m_dot_dry * air.enthalpy(&c);
        assert_relative_eq!(dh, -d.q_a - d.h_dot_dep, max_relative = 1e-9);
        assert!(d.h_dot_dep < 0.0, "ice sits below the liquid datum");
    }

    #[test]
    fn film_outlet_gates_evaporated_vapor_by_flow() {
        let c = consts();
        let d = diag(-60.0, 0.0, 3.0e-5, 273.15);
        // brisk flow: everything rides along
        let brisk = stream(285.15, 5e-3, 0.18);
        let (out, w_in, w_vent) = film_air_outlet(&brisk, &d, &c);
        assert_relative_eq!(w_in, d.w_vap, max_relative = 1e-12);
        assert_eq!(w_vent, 0.0);
        assert!(out.omega > brisk.omega);
        // trickle: most is vented, the split always closes
        let trickle = stream(285.15, 5e-3, 0.004);
        let (_, w_in, w_vent) = film_air_outlet(&trickle, &d, &c);
        assert!(w_in < 0.25 * d.w_vap, "w_in = {w_in}");
        assert_relative_eq!(w_in + w_vent, d.w_vap, max_relative = 1e-12);
        // stopped: everything vents, the stream passes through untouched
        let still = stream(285.15, 5e-3, 0.0);
        let (out, w_in, w_vent) = film_air_outlet(&still, &d, &c);
        assert_eq!(w_in, 0.0);
        assert_eq!(w_vent, d.w_vap);
        assert_eq!(out.t, still.t);
    }

    #[test]
    fn pressure_drop_grows_with_frost_and_flags_blockage() {
        let geom = HxGeometry::default();
        let rho = 1.29;
        let (dp_clean, blocked) = air_pressure_drop(0.8, 0.0, rho, &geom);
        assert!(!blocked);
        assert!(dp_clean > 0.0);
        // quadratic in flow
        let (dp_double, _) = air_pressure_drop(1.6, 0.0, rho, &geom);
        assert_relative_eq!(dp_double, 4.0 * dp_clean, max_relative = 2e-2);
        // half the gap frosted over: ~4x the clean pressure drop
        let (dp_frosted, blocked) = air_pressure_drop(0.8, geom.fin_gap_half / 2.0, rho, &geom);
        assert!(!blocked);
        assert!(dp_frosted > 3.5 * dp_clean);
        // past the floor: finite, flagged
        let (dp_block, blocked) = air_pressure_drop(0.8, geom.fin_gap_half, rho, &geom);
        assert!(blocked);
        assert!(dp_block.is_finite());
    }
}
