//! Fuzzy stage switching.
//!
//! Four operating stages — frosting, melting, draining, dry — are blended by
//! Takagi–Sugeno rules over three indicator variables: wall temperature,
//! frost thickness, retained mass. Each indicator maps to a negative/positive
//! membership pair through a C¹ smoothstep; rule products are normalized
//! into weights γ₁…γ₄ that multiply the per-stage source terms. Everything
//! here is smooth, which is the whole point: the integrator never sees a
//! switching event.

use super::state::FilmParams;

/// Stage weights γ₁…γ₄ (frosting, melting, draining, dry). Sum is 1 to
/// machine precision after normalization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FuzzyWeights {
    pub gamma: [f64; 4],
}

impl FuzzyWeights {
    /// A single fully-active stage (used by isolated-stage tests).
    pub fn pure(stage: usize) -> Self {
        let mut gamma = [0.0; 4];
        gamma[stage] = 1.0;
        FuzzyWeights { gamma }
    }
}

/// Negative/positive membership pair of `x` against a threshold: μ_P rises
/// 0→1 over `[threshold − width/2, threshold + width/2]` along the cubic
/// smoothstep 3u² − 2u³ (C¹ at both ends); μ_N = 1 − μ_P.
pub fn membership(x: f64, threshold: f64, width: f64) -> (f64, f64) {
    let u = ((x - threshold) / width + 0.5).clamp(0.0, 1.0);
    let mu_p = u * u * (3.0 - 2.0 * u);
    (1.0 - mu_p, mu_p)
}

/// Evaluate the four stage rules and normalize.
///
/// - stage 1 (frosting):  T_wall is N
/// - stage 2 (melting):   T_wall is P and δ_f is P
/// - stage 3 (draining):  T_wall is P and δ_f is N and m_wi is P
/// - stage 4 (dry):       T_wall is P and δ_f is N and m_wi is N
///
/// The rule products already sum to exactly 1 in exact arithmetic (each
/// membership pair partitions unity), so normalization only scrubs rounding.
pub fn fuzzy_weights(t_wall: f64, delta_f: f64, m_wi: f64, t_0: f64, p: &FilmParams) -> FuzzyWeights {
    let (n_tw, p_tw) = membership(t_wall, t_0, p.band_t_wall);
    let (n_df, p_df) = membership(delta_f, p.delta_eps, p.band_delta);
    let (n_mw, p_mw) = membership(m_wi, p.m_wi_eps, p.band_m_wi);
    let omega = [
        n_tw,
        p_tw * p_df,
        p_tw * n_df * p_mw,
        p_tw * n_df * n_mw,
    ];
    let sum: f64 = omega.iter().sum();
    debug_assert!(sum > 0.0, "membership partition collapsed");
    FuzzyWeights {
        gamma: [
            omega[0] / sum,
            omega[1] / sum,
            omega[2] / sum,
            omega[3] / sum,
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> FilmParams {
        FilmParams::default()
    }

    const T0: f64 = 273.15;

    #[test]
    fn membership_symmetry_and_saturation() {
        let (n, p) = membership(5.0, 5.0, 1.0);
        assert_eq!(n, 0.5);
        assert_eq!(p, 0.5);
        assert_eq!(membership(4.4, 5.0, 1.0), (1.0, 0.0));
        assert_eq!(membership(5.6, 5.0, 1.0).1, 1.0);
    }

    #[test]
    fn membership_is_c1_at_band_edges() {
        // finite-difference slope shrinks to zero approaching the edges
        let eps = 1e-7;
        for edge in [4.5, 5.5] {
            let inner = if edge < 5.0 { edge + eps } else { edge - eps };
            let slope = (membership(inner, 5.0, 1.0).1 - membership(edge, 5.0, 1.0).1).abs() / eps;
            assert!(slope < 1e-5, "slope {slope} at band edge {edge}");
        }
    }

    #[test]
    fn deep_cold_wall_is_pure_frosting() {
        let w = fuzzy_weights(T0 - 5.0, 1e-3, 0.0, T0, &params());
        assert_eq!(w.gamma, [1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn warm_wall_thick_frost_is_pure_melting() {
        let w = fuzzy_weights(T0 + 5.0, 1e-3, 0.0, T0, &params());
        assert_eq!(w.gamma, [0.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn warm_bare_wet_wall_is_pure_draining() {
        let w = fuzzy_weights(T0 + 5.0, 1e-6, 1e-3, T0, &params());
        assert_eq!(w.gamma, [0.0, 0.0, 1.0, 0.0]);
    }

    #[test]
    fn warm_bare_dry_wall_is_pure_dry() {
        let w = fuzzy_weights(T0 + 5.0, 1e-6, 0.0, T0, &params());
        assert_eq!(w.gamma, [0.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn partition_of_unity_everywhere() {
        // brute scan across all three bands simultaneously
        let p = params();
        let mut worst: f64 = 0.0;
        for i in 0..50 {
            for j in 0..50 {
                for k in 0..50 {
                    let tw = T0 - 1.0 + 2.0 * i as f64 / 49.0;
                    let df = 5e-6 + 1.5e-5 * j as f64 / 49.0;
                    let mw = 5e-6 + 1.5e-5 * k as f64 / 49.0;
                    let w = fuzzy_weights(tw, df, mw, T0, &p);
                    let sum: f64 = w.gamma.iter().sum();
                    worst = worst.max((sum - 1.0).abs());
                    assert!(w.gamma.iter().all(|g| (0.0..=1.0).contains(g)));
                }
            }
        }
        assert!(worst < 1e-15, "partition error {worst}");
    }
}
