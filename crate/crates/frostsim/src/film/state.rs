//! Film-volume state bookkeeping: composition, reference enthalpies,
//! temperature reconstruction, and mixture properties.
//!
//! The film is the lumped layer sitting on one coil surface: porous frost
//! (ice + entrained air) plus retained melt water/ice. Its thermal state is
//! carried as a single total enthalpy `H_film`; temperature is reconstructed
//! from enthalpy and composition, with a plateau at the freezing point
//! between the all-solid and all-liquid reference enthalpies. That plateau
//! is what lets one state ride through melting without an event.

use crate::hx::MoistAirStream;
use crate::properties::{self, WaterConstants};
use crate::{Error, Result};

/// The four ODE states of one film volume.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilmState {
    /// Total film enthalpy [J], datum: liquid water at 273.15 K.
    pub h_film: f64,
    /// Frost layer thickness [m].
    pub delta_f: f64,
    /// Frost density [kg/m³].
    pub rho_f: f64,
    /// Retained water/ice mass [kg].
    pub m_wi: f64,
}

/// Parameters of one film volume.
#[derive(Debug, Clone, Copy, serde::Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FilmParams {
    /// Coil surface area covered by this film [m²].
    pub a_s: f64,
    /// Drainage time constant [s].
    pub t_drain: f64,
    /// Frost-density reset time constant [s].
    pub t_reset: f64,
    /// Density fresh frost restarts from after a defrost [kg/m³].
    pub rho_reset: f64,
    /// Frost-thickness threshold separating "has frost" from "bare" [m].
    pub delta_eps: f64,
    /// Retained-mass threshold separating "wet" from "dry" [kg].
    pub m_wi_eps: f64,
    /// Membership band width on wall temperature [K].
    pub band_t_wall: f64,
    /// Membership band width on frost thickness [m].
    pub band_delta: f64,
    /// Membership band width on retained mass [kg].
    pub band_m_wi: f64,
    /// Numerical floor on frost thickness [m]; divisions by δ_f use at
    /// least this value, and "bare" coil states park δ_f here.
    pub delta_floor: f64,
    /// Floor on the conduction path length [m]: caps the film conductance
    /// when the layer is thin, so a near-bare film does not produce
    /// microsecond thermal time constants.
    pub cond_length_min: f64,
    /// Thickness at which the layer counts as a connected porous matrix [m].
    /// Densification by in-layer vapor diffusion fades in between
    /// `delta_floor` and this value; below it, deposition is dendritic
    /// surface growth, and packing a near-zero layer volume is what would
    /// otherwise drive the density to solid ice at birth.
    pub delta_mature: f64,
    /// Entrained-air mass fraction of the frost. `None` (default) derives it
    /// from the pore volume: ε·ρ_air/ρ_f at the current state.
    pub m_air_frac: Option<f64>,
}

impl Default for FilmParams {
    fn default() -> Self {
        FilmParams {
            a_s: 0.5,
            t_drain: 60.0,
            t_reset: 5.0,
            rho_reset: 50.0,
            delta_eps: 1.0e-5,
            m_wi_eps: 1.0e-5,
            band_t_wall: 0.5,
            band_delta: 5.0e-6,
            band_m_wi: 5.0e-6,
            delta_floor: 1.0e-6,
            cond_length_min: 1.0e-4,
            delta_mature: 1.0e-4,
            m_air_frac: None,
        }
    }
}

impl FilmParams {
    pub fn validate(&self, key: &str) -> Result<()> {
        let positive = [
            ("a_s", self.a_s),
            ("t_drain", self.t_drain),
            ("t_reset", self.t_reset),
            ("rho_reset", self.rho_reset),
            ("delta_eps", self.delta_eps),
            ("m_wi_eps", self.m_wi_eps),
            ("band_t_wall", self.band_t_wall),
            ("band_delta", self.band_delta),
            ("band_m_wi", self.band_m_wi),
            ("delta_floor", self.delta_floor),
            ("cond_length_min", self.cond_length_min),
            ("delta_mature", self.delta_mature),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::config(
                    format!("{key}.{name}"),
                    format!("must be strictly positive, got {v}"),
                ));
            }
        }
        if let Some(f) = self.m_air_frac {
            if !(0.0..1.0).contains(&f) {
                return Err(Error::config(
                    format!("{key}.m_air_frac"),
                    format!("must lie in [0, 1), got {f}"),
                ));
            }
        }
        // the melt rule must release before the thickness can reach the
        // floor, otherwise δ_f would be driven negative
        if self.delta_eps - 0.5 * self.band_delta <= self.delta_floor {
            return Err(Error::config(
                format!("{key}.delta_eps"),
                "threshold minus half band must stay above delta_floor".to_string(),
            ));
        }
        if self.delta_mature <= self.delta_floor {
            return Err(Error::config(
                format!("{key}.delta_mature"),
                "must exceed delta_floor for the densification gate to open".to_string(),
            ));
        }
        Ok(())
    }
}

/// Boundary conditions a film volume sees at one instant.
#[derive(Debug, Clone, Copy)]
pub struct FilmBoundary {
    /// Tube/fin wall temperature underneath the film [K].
    pub t_wall: f64,
    /// Air stream sweeping the film surface.
    pub air: MoistAirStream,
    /// Air-side heat transfer coefficient [W/(m²·K)] (natural-convection
    /// floor applies when the fan is off).
    pub alpha_a: f64,
    /// Mass transfer coefficient [kg/(m²·s)], Lewis analogy of `alpha_a`.
    pub alpha_m: f64,
}

/// Mass composition of the film at one instant.
#[derive(Debug, Clone, Copy)]
pub struct FilmMasses {
    /// Frost mass (ice + entrained air) [kg].
    pub m_f: f64,
    /// Ice fraction of the frost [kg].
    pub m_ice: f64,
    /// Entrained air held in the frost pores [kg].
    pub m_air: f64,
    /// Retained water/ice mass [kg].
    pub m_wi: f64,
    /// Total film mass m_f + m_wi [kg].
    pub m_film: f64,
}

/// Reference enthalpies bracketing the melting plateau [J].
#[derive(Debug, Clone, Copy)]
pub struct ReferenceEnthalpies {
    /// Film enthalpy with every meltable constituent solid at T₀.
    pub h_s0: f64,
    /// Film enthalpy with every meltable constituent liquid at T₀.
    pub h_l0: f64,
}

// Enthalpy datum (shared by every film-enthalpy expression in this module):
// liquid water at T₀ carries zero enthalpy, ice at T₀ carries −Δh_sl, and
// entrained air carries zero at T₀.

/// Density of the air entrained in frost pores [kg/m³], taken at the datum
/// temperature and standard pressure — a 1%-scale correction, not worth a
/// state dependence.
fn entrained_air_density() -> f64 {
    101_325.0 / (properties::R_DRY_AIR * 273.15)
}

/// Split the film into its mass constituents.
pub fn frost_masses(state: &FilmState, params: &FilmParams, c: &WaterConstants) -> FilmMasses {
    let delta = state.delta_f.max(params.delta_floor);
    let m_f = delta * state.rho_f * params.a_s;
    let frac = params.m_air_frac.unwrap_or_else(|| {
        let eps = properties::porosity(state.rho_f, c.rho_ice);
        (eps * entrained_air_density() / state.rho_f).clamp(0.0, 0.5)
    });
    let m_air = frac * m_f;
    FilmMasses {
        m_f,
        m_ice: m_f - m_air,
        m_air,
        m_wi: state.m_wi.max(0.0),
        m_film: m_f + state.m_wi.max(0.0),
    }
}

/// The all-solid and all-liquid reference enthalpies for a composition.
pub fn reference_enthalpies(m: &FilmMasses, c: &WaterConstants) -> ReferenceEnthalpies {
    // solid: ice and retained mass both at h_ice(T₀) = −Δh_sl, air at 0
    // liquid: everything meltable at h_water(T₀) = 0
    ReferenceEnthalpies {
        h_s0: -(m.m_ice + m.m_wi) * c.dh_sl,
        h_l0: 0.0,
    }
}

/// Mass-weighted film specific heat [J/(kg·K)] on one side of the plateau.
/// `liquid` selects whether the meltable mass counts as water or as ice.
pub fn film_cp(m: &FilmMasses, liquid: bool, c: &WaterConstants) -> f64 {
    let cp_meltable = if liquid { c.cp_water } else { c.cp_ice };
    ((m.m_ice + m.m_wi) * cp_meltable + m.m_air * c.cp_air) / m.m_film
}

/// A bare, dry film in equilibrium at temperature `t`: thickness at the
/// floor, density at the reset value, no retained water, and the enthalpy
/// whose reconstruction lands exactly on `t` (solid branch below the triple
/// point, liquid branch above). This is the state a drained or never-frosted
/// surface holds, and the natural film initial condition.
pub fn bare_film_at(t: f64, params: &FilmParams, c: &WaterConstants) -> FilmState {
    let mut s = FilmState {
        h_film: 0.0,
        delta_f: params.delta_floor,
        rho_f: params.rho_reset,
        m_wi: 0.0,
    };
    let m = frost_masses(&s, params, c);
    let r = reference_enthalpies(&m, c);
    s.h_film = if t < c.t_0 {
        r.h_s0 + m.m_film * film_cp(&m, false, c) * (t - c.t_0)
    } else {
        r.h_l0 + m.m_film * film_cp(&m, true, c) * (t - c.t_0)
    };
    s
}

/// Reconstruct the film temperature [K] from enthalpy and composition.
///
/// Piecewise: sensible below the all-solid reference, the T₀ plateau between
/// the references, sensible above the all-liquid reference. Continuous at
/// both joints by construction.
pub fn film_temperature(h_film: f64, m: &FilmMasses, c: &WaterConstants) -> Result<f64> {
    if !(m.m_film > 0.0) {
        return Err(Error::EmptyFilm);
    }
    let r = reference_enthalpies(m, c);
    if h_film < r.h_s0 {
        Ok(c.t_0 + (h_film - r.h_s0) / (m.m_film * film_cp(m, false, c)))
    } else if h_film > r.h_l0 {
        Ok(c.t_0 + (h_film - r.h_l0) / (m.m_film * film_cp(m, true, c)))
    } else {
        Ok(c.t_0)
    }
}

/// Liquid fraction of the meltable mass: 0 below the solid reference,
/// 1 above the liquid reference, linear in enthalpy between.
pub fn liquid_fraction(h_film: f64, m: &FilmMasses, c: &WaterConstants) -> f64 {
    let r = reference_enthalpies(m, c);
    if r.h_l0 - r.h_s0 <= 0.0 {
        // nothing meltable; call it liquid above the datum
        return if h_film > r.h_l0 { 1.0 } else { 0.0 };
    }
    ((h_film - r.h_s0) / (r.h_l0 - r.h_s0)).clamp(0.0, 1.0)
}

/// Density of the retained water/ice [kg/m³]: ice below the plateau, water
/// above, volume-consistent (harmonic) blend across it.
pub fn retained_density(lambda_liquid: f64, c: &WaterConstants) -> f64 {
    1.0 / ((1.0 - lambda_liquid) / c.rho_ice + lambda_liquid / c.rho_water)
}

/// Conductivity of the retained water/ice [W/(m·K)], blended like its density.
pub fn retained_conductivity(lambda_liquid: f64, c: &WaterConstants) -> f64 {
    (1.0 - lambda_liquid) * c.k_ice + lambda_liquid * c.k_water
}

/// Total film layer thickness [m]: frost plus the retained layer it carries.
pub fn film_thickness(state: &FilmState, params: &FilmParams, rho_wi: f64) -> f64 {
    state.delta_f.max(params.delta_floor) + state.m_wi.max(0.0) / (rho_wi * params.a_s)
}

/// Average film density [kg/m³]: total mass over total layer volume.
pub fn film_density(state: &FilmState, params: &FilmParams, c: &WaterConstants) -> Result<f64> {
    let m = frost_masses(state, params, c);
    let lambda = liquid_fraction(state.h_film, &m, c);
    let rho_wi = retained_density(lambda, c);
    let thickness = film_thickness(state, params, rho_wi);
    if !(thickness > 0.0) {
        return Err(Error::EmptyFilm);
    }
    Ok(m.m_film / (thickness * params.a_s))
}

/// Film thermal conductivity [W/(m·K)]: frost conductivity blended toward
/// the retained-phase conductivity by how far the average density sits
/// between the frost and retained densities.
pub fn film_conductivity(
    rho_film: f64,
    rho_f: f64,
    lambda_liquid: f64,
    c: &WaterConstants,
) -> Result<f64> {
    // the correlation is fit for 20–920 kg/m³; clamp excursions (fresh reset
    // states, integrator trial points) into its domain rather than erroring
    let k_f = properties::frost_conductivity(rho_f.clamp(20.0, 920.0))?;
    let rho_wi = retained_density(lambda_liquid, c);
    let k_wi = retained_conductivity(lambda_liquid, c);
    let denom = rho_wi - rho_f;
    if denom.abs() < 1.0 {
        return Ok(k_f);
    }
    let w = ((rho_film - rho_f) / denom).clamp(0.0, 1.0);
    Ok(k_f + (k_wi - k_f) * w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn consts() -> WaterConstants {
        WaterConstants::default()
    }

    fn params() -> FilmParams {
        FilmParams {
            a_s: 1.0,
            m_air_frac: Some(0.0),
            ..FilmParams::default()
        }
    }

    fn state(h: f64, delta: f64, rho: f64, m_wi: f64) -> FilmState {
        FilmState {
            h_film: h,
            delta_f: delta,
            rho_f: rho,
            m_wi,
        }
    }

    #[test]
    fn frost_mass_is_volume_times_density() {
        let s = state(0.0, 1e-3, 100.0, 0.0);
        let m = frost_masses(&s, &params(), &consts());
        assert_relative_eq!(m.m_f, 0.1);
        assert_relative_eq!(m.m_film, 0.1); // m_wi = 0
        assert_relative_eq!(m.m_ice, m.m_f); // m_air_frac = 0
    }

    #[test]
    fn entrained_air_defaults_to_pore_volume() {
        let p = FilmParams {
            a_s: 1.0,
            m_air_frac: None,
            ..FilmParams::default()
        };
        let s = state(0.0, 1e-3, 100.0, 0.0);
        let c = consts();
        let m = frost_masses(&s, &p, &c);
        let eps = properties::porosity(100.0, c.rho_ice);
        assert_relative_eq!(m.m_air, m.m_f * eps * 1.292 / 100.0, max_relative = 1e-3);
        assert!(m.m_air < 0.02 * m.m_f);
    }

    #[test]
    fn reference_gap_is_meltable_mass_times_fusion() {
        let c = consts();
        let s = state(0.0, 1e-2, 80.0, 0.2);
        let m = frost_masses(&s, &params(), &c);
        let r = reference_enthalpies(&m, &c);
        assert_relative_eq!(r.h_l0 - r.h_s0, (m.m_ice + m.m_wi) * c.dh_sl);
        // doubling all masses doubles both references
        let s2 = state(0.0, 2e-2, 80.0, 0.4);
        let m2 = frost_masses(&s2, &params(), &c);
        let r2 = reference_enthalpies(&m2, &c);
        assert_relative_eq!(r2.h_s0, 2.0 * r.h_s0);
    }

    #[test]
    fn temperature_plateau_and_branches() {
        let c = consts();
        let s = state(0.0, 1e-3, 100.0, 0.05);
        let m = frost_masses(&s, &params(), &c);
        let r = reference_enthalpies(&m, &c);

        assert_eq!(film_temperature(r.h_s0, &m, &c).unwrap(), c.t_0);
        assert_eq!(
            film_temperature(0.5 * (r.h_s0 + r.h_l0), &m, &c).unwrap(),
            c.t_0
        );
        // ten kelvin below: invert the sensible branch
        let h_cold = r.h_s0 - m.m_film * film_cp(&m, false, &c) * 10.0;
        assert_relative_eq!(
            film_temperature(h_cold, &m, &c).unwrap(),
            263.15,
            epsilon = 1e-10
        );
        // warm side symmetric
        let h_warm = r.h_l0 + m.m_film * film_cp(&m, true, &c) * 4.0;
        assert_relative_eq!(
            film_temperature(h_warm, &m, &c).unwrap(),
            277.15,
            epsilon = 1e-10
        );
    }

    #[test]
    fn temperature_continuous_at_references() {
        let c = consts();
        let s = state(0.0, 2e-3, 120.0, 0.01);
        let m = frost_masses(&s, &params(), &c);
        let r = reference_enthalpies(&m, &c);
        // approach each reference from both sides with a vanishing offset:
        // the sensible slope is 1/(m·cp) ≈ 2e-3 K/J, so a 1e-7 J offset
        // bounds a continuous reconstruction to ~2e-10 K of the plateau
        for h_ref in [r.h_s0, r.h_l0] {
            let below = film_temperature(h_ref - 1e-7, &m, &c).unwrap();
            let above = film_temperature(h_ref + 1e-7, &m, &c).unwrap();
            assert!((below - above).abs() < 1e-9, "jump at reference enthalpy");
            assert_eq!(film_temperature(h_ref, &m, &c).unwrap(), c.t_0);
        }
    }

    #[test]
    fn temperature_monotone_in_enthalpy() {
        let c = consts();
        let s = state(0.0, 1e-3, 100.0, 0.02);
        let m = frost_masses(&s, &params(), &c);
        let r = reference_enthalpies(&m, &c);
        let mut prev = f64::NEG_INFINITY;
        let span = r.h_l0 - r.h_s0;
        let mut h = r.h_s0 - span;
        while h <= r.h_l0 + span {
            let t = film_temperature(h, &m, &c).unwrap();
            assert!(t >= prev, "temperature decreased in H at h = {h}");
            prev = t;
            h += span / 500.0;
        }
    }

    #[test]
    fn cp_limits() {
        let c = consts();
        // pure frost ice
        let s = state(0.0, 1e-3, 100.0, 0.0);
        let m = frost_masses(&s, &params(), &c);
        assert_relative_eq!(film_cp(&m, false, &c), c.cp_ice);
        // equal ice and retained mass, both liquid branch -> water cp
        assert_relative_eq!(film_cp(&m, true, &c), c.cp_water);
    }

    #[test]
    fn film_density_examples() {
        let c = consts();
        // pure frost: density reduces to frost density
        let s = state(-1e5, 1e-3, 100.0, 0.0);
        assert_relative_eq!(
            film_density(&s, &params(), &c).unwrap(),
            100.0,
            max_relative = 1e-12
        );
        // 1 mm frost at 100 kg/m³ plus 0.1 kg liquid water on 1 m²
        let s = state(1e4, 1e-3, 100.0, 0.1); // H > H_l0 = 0 -> liquid
        assert_relative_eq!(
            film_density(&s, &params(), &c).unwrap(),
            0.2 / 1.1e-3,
            max_relative = 1e-3
        );
    }

    #[test]
    fn conductivity_blend_endpoints() {
        let c = consts();
        let k_f = properties::frost_conductivity(100.0).unwrap();
        assert_relative_eq!(film_conductivity(100.0, 100.0, 0.0, &c).unwrap(), k_f);
        // film density at the retained-ice density -> ice conductivity
        assert_relative_eq!(
            film_conductivity(c.rho_ice, 100.0, 0.0, &c).unwrap(),
            c.k_ice
        );
        // midpoint -> mean
        let mid = 0.5 * (100.0 + c.rho_ice);
        assert_relative_eq!(
            film_conductivity(mid, 100.0, 0.0, &c).unwrap(),
            0.5 * (k_f + c.k_ice)
        );
    }

    #[test]
    fn params_validation_rejects_floor_overlap() {
        let p = FilmParams {
            delta_eps: 1e-6,
            band_delta: 1e-6,
            ..FilmParams::default()
        };
        assert!(p.validate("film").is_err());
    }
}
