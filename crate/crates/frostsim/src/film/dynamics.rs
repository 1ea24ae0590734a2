//! Blended film governing equations.
//!
//! Every stage's sources are evaluated at every call and combined with the
//! fuzzy weights — there is no branching on "the current stage", which is
//! exactly why the right-hand side stays smooth through regime changes.

use crate::properties::WaterConstants;
use crate::Result;

use super::fuzzy::{self, FuzzyWeights};
use super::stages;
use super::state::{FilmBoundary, FilmParams, FilmState};

/// Time derivatives of the four film states plus everything a caller might
/// want to know about how they came to be.
#[derive(Debug, Clone, Copy)]
pub struct FilmDerivatives {
    /// dH_film/dt [W].
    pub d_h_film: f64,
    /// dδ_f/dt [m/s].
    pub d_delta_f: f64,
    /// dρ_f/dt [kg/(m³·s)].
    pub d_rho_f: f64,
    /// dm_wi/dt [kg/s].
    pub d_m_wi: f64,
    pub diag: FilmDiagnostics,
}

/// Raw per-stage values and blended heat flows behind one derivative call.
#[derive(Debug, Clone, Copy)]
pub struct FilmDiagnostics {
    /// Stage weights γ₁…γ₄ used for the blend.
    pub gamma: [f64; 4],
    /// Reconstructed film temperature [K].
    pub t_film: f64,
    /// Frost surface temperature [K] (equals `t_film` when stage 1 is inactive).
    pub t_fs: f64,
    /// Blended air → film heat [W].
    pub q_a: f64,
    /// Blended wall → film heat [W].
    pub q_wall: f64,
    /// Raw stage-1 densification flux [kg/s].
    pub m_dot_rho_in: f64,
    /// Raw stage-1 surface-growth flux [kg/s].
    pub m_dot_delta_in: f64,
    /// Raw stage-2 melt rate [kg/s].
    pub m_dot_melt: f64,
    /// Raw stage-3 drainage rate [kg/s].
    pub m_dot_drain: f64,
    /// Raw stage-3 evaporation rate [kg/s].
    pub m_dot_vap: f64,
    /// Raw stage-3 enthalpy outflow [W].
    pub h_dot_out: f64,
    /// γ-weighted vapor drawn from the air stream [kg/s] (deposition).
    pub w_dep: f64,
    /// γ-weighted enthalpy advected into the film by `w_dep` [W]; the air
    /// stream gives this up together with `q_a`.
    pub h_dot_dep: f64,
    /// γ-weighted vapor released toward the air [kg/s] (evaporation).
    pub w_vap: f64,
}

/// Film derivatives with the stage weights taken from the fuzzy rules.
///
/// `t_fs_cache` warm-starts the stage-1 surface solve and is updated with
/// the solved value; pass a fresh `f64::NAN` for a one-off evaluation.
pub fn film_derivatives(
    s: &FilmState,
    b: &FilmBoundary,
    p: &FilmParams,
    c: &WaterConstants,
    t_fs_cache: &mut f64,
) -> Result<FilmDerivatives> {
    let w = fuzzy::fuzzy_weights(b.t_wall, s.delta_f, s.m_wi, c.t_0, p);
    film_derivatives_with_weights(s, b, p, c, &w, t_fs_cache)
}

/// Film derivatives with caller-supplied stage weights (tests isolate single
/// stages this way; the simulator always goes through [`film_derivatives`]).
pub fn film_derivatives_with_weights(
    s: &FilmState,
    b: &FilmBoundary,
    p: &FilmParams,
    c: &WaterConstants,
    w: &FuzzyWeights,
    t_fs_cache: &mut f64,
) -> Result<FilmDerivatives> {
    let [g1, g2, g3, g4] = w.gamma;
    let th = stages::film_thermal(s, p, c)?;
    let q_wall = stages::wall_heat(&th, b);

    // stage 1 involves a scalar solve; skip it when the weight is dead zero
    let s1 = if g1 > 0.0 {
        let src = stages::stage1_sources(s, b, p, c, *t_fs_cache)?;
        *t_fs_cache = src.t_fs;
        src
    } else {
        stages::StageOneSources {
            m_dot_rho_in: 0.0,
            m_dot_delta_in: 0.0,
            m_dot_dep: 0.0,
            h_dot_dep: 0.0,
            q_a: 0.0,
            q_wall,
            t_fs: th.t_film,
        }
    };
    let s2 = stages::stage2_sources(s, b, p, c)?;
    let s3 = stages::stage3_sources(s, b, p, c)?;
    // stage 4 is thermally identical to the sensible law of stages 2/3
    let q_a4 = stages::sensible_air_heat(b, p.a_s, th.t_film);

    let q_a = g1 * s1.q_a + g2 * s2.q_a + g3 * s3.q_a + g4 * q_a4;

    let delta_eff = s.delta_f.max(p.delta_floor);
    let rho_eff = s.rho_f.max(1.0);

    // deposited mass carries its own (deeply negative) enthalpy in with it,
    // exactly as the mass ledger grows — without this term the reconstructed
    // temperature creeps cold by Δh_sl per kg frozen
    let d_h_film = q_a + q_wall + g1 * s1.h_dot_dep - g3 * s3.h_dot_out;
    let d_delta_f = (g1 * s1.m_dot_delta_in - g2 * s2.m_dot_melt) / (rho_eff * p.a_s);
    // densification spreads the diffused vapor over the layer volume; the
    // density reset is a plain first-order filter re-arming fresh-frost
    // density once the layer is gone (stages 3 and 4)
    let d_rho_f = g1 * s1.m_dot_rho_in / (delta_eff * p.a_s)
        + (g3 + g4) * (p.rho_reset - s.rho_f) / p.t_reset;
    let d_m_wi = g2 * s2.m_dot_melt - g3 * (s3.m_dot_drain + s3.m_dot_vap);

    let d = FilmDerivatives {
        d_h_film,
        d_delta_f,
        d_rho_f,
        d_m_wi,
        diag: FilmDiagnostics {
            gamma: w.gamma,
            t_film: th.t_film,
            t_fs: s1.t_fs,
            q_a,
            q_wall,
            m_dot_rho_in: s1.m_dot_rho_in,
            m_dot_delta_in: s1.m_dot_delta_in,
            m_dot_melt: s2.m_dot_melt,
            m_dot_drain: s3.m_dot_drain,
            m_dot_vap: s3.m_dot_vap,
            h_dot_out: s3.h_dot_out,
            w_dep: g1 * s1.m_dot_dep,
            h_dot_dep: g1 * s1.h_dot_dep,
            w_vap: g3 * s3.m_dot_vap,
        },
    };
    debug_assert!(
        d.d_h_film.is_finite()
            && d.d_delta_f.is_finite()
            && d.d_rho_f.is_finite()
            && d.d_m_wi.is_finite(),
        "non-finite film derivative at state {s:?}"
    );
    Ok(d)
}
