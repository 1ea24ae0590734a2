//! Heat-exchanger geometry and circuit topology.
//!
//! The coil is discretized into `n_passes × vols_per_pass` refrigerant
//! control volumes chained serially, laid out in `n_rows` tube rows. The
//! refrigerant chain is split evenly across the rows, entering at the
//! air-downstream row; air crosses the rows in lanes, one lane per
//! row-position, visiting the air-upstream row first. The default mapping
//! can be overridden (`air_paths`) for coils wired differently.

use crate::{Error, Result};

/// Dimensions and topology of one discretized coil. All per-CV quantities
/// are identical across CVs (uniform discretization).
#[derive(Debug, Clone)]
pub struct HxGeometry {
    /// Serial refrigerant passes.
    pub n_passes: usize,
    /// Control volumes per pass.
    pub vols_per_pass: usize,
    /// Tube rows crossed by the air.
    pub n_rows: usize,
    /// Refrigerant volume per CV [m³].
    pub cv_volume: f64,
    /// Wall lumped heat capacity per CV (mass × c_p) [J/K].
    pub wall_capacity: f64,
    /// Refrigerant-side transfer area per CV [m²].
    pub area_r: f64,
    /// Air-side transfer area per CV [m²].
    pub area_air: f64,
    /// Total free-flow air area of the clean coil face [m²].
    pub free_flow_area: f64,
    /// Refrigerant-side hydraulic diameter [m].
    pub d_h_r: f64,
    /// Air-side hydraulic diameter [m].
    pub d_h_air: f64,
    /// Friction coefficient of one inter-CV segment:
    /// Δp = k_fric·ṁ|ṁ|/ρ [Pa·kg/m³·s²/kg²].
    pub k_fric: f64,
    /// Upwind-blend regularization for port enthalpies [kg/s].
    pub m_dot_eps: f64,
    /// Half-gap of an air channel [m]; frost narrows the channel from both
    /// walls, so blockage is δ_f/fin_gap_half.
    pub fin_gap_half: f64,
    /// Lumped air-side loss coefficient: Δp = ζ·ρ·v²/2 at face velocity v.
    pub zeta_air: f64,
    /// Free-area fraction below which the blockage model saturates.
    pub min_free_frac: f64,
    /// Explicit air-lane → CV mapping (one vec per lane, CVs in air-flow
    /// order). `None` derives the default described in the module docs.
    pub air_paths: Option<Vec<Vec<usize>>>,
}

impl Default for HxGeometry {
    /// A plausible automotive outdoor coil: 6 passes × 2 volumes in 2 rows.
    fn default() -> Self {
        Self {
            n_passes: 6,
            vols_per_pass: 2,
            n_rows: 2,
            cv_volume: 2.5e-5,
            wall_capacity: 600.0,
            area_r: 0.125,
            area_air: 0.42,
            free_flow_area: 0.15,
            d_h_r: 1.0e-3,
            d_h_air: 2.0e-3,
            k_fric: 6.0e7,
            m_dot_eps: 1.0e-3,
            fin_gap_half: 7.5e-4,
            zeta_air: 15.0,
            min_free_frac: 0.05,
            air_paths: None,
        }
    }
}

impl HxGeometry {
    /// Total refrigerant control volumes.
    pub fn n_cv(&self) -> usize {
        self.n_passes * self.vols_per_pass
    }

    /// CVs per tube row.
    pub fn cvs_per_row(&self) -> usize {
        self.n_cv() / self.n_rows
    }

    /// Air-lane mapping: `paths[lane][k]` is the CV the lane meets at row
    /// position `k` (0 = air-upstream row). The default pairs lane `ℓ` with
    /// the CV at offset `ℓ` of each chain segment, visiting the segment that
    /// is refrigerant-last (air-upstream) first.
    pub fn air_paths(&self) -> Vec<Vec<usize>> {
        if let Some(paths) = &self.air_paths {
            return paths.clone();
        }
        let per_row = self.cvs_per_row();
        (0..per_row)
            .map(|lane| {
                (0..self.n_rows)
                    .map(|k| (self.n_rows - 1 - k) * per_row + lane)
                    .collect()
            })
            .collect()
    }

    /// Position of a CV along its air lane (0 = first air contact), i.e.
    /// which row it sits in as seen by the air.
    pub fn air_position(&self, cv: usize) -> usize {
        for path in self.air_paths() {
            if let Some(k) = path.iter().position(|&c| c == cv) {
                return k;
            }
        }
        usize::MAX // unreachable for a validated geometry
    }

    pub fn validate(&self) -> Result<()> {
        let field = |key: &str, reason: &str| Err(Error::config(format!("hx.{key}"), reason));
        if self.n_passes == 0 || self.vols_per_pass == 0 || self.n_rows == 0 {
            return field("counts", "passes, volumes per pass, and rows must be >= 1");
        }
        if self.n_cv() % self.n_rows != 0 {
            return field("n_rows", "CV count must divide evenly into rows");
        }
        for (key, v) in [
            ("cv_volume", self.cv_volume),
            ("wall_capacity", self.wall_capacity),
            ("area_r", self.area_r),
            ("area_air", self.area_air),
            ("free_flow_area", self.free_flow_area),
            ("d_h_r", self.d_h_r),
            ("d_h_air", self.d_h_air),
            ("k_fric", self.k_fric),
            ("m_dot_eps", self.m_dot_eps),
            ("fin_gap_half", self.fin_gap_half),
            ("zeta_air", self.zeta_air),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return field(key, "must be finite and > 0");
            }
        }
        if !(self.min_free_frac > 0.0 && self.min_free_frac < 1.0) {
            return field("min_free_frac", "must lie in (0, 1)");
        }
        // an explicit lane mapping must cover every CV exactly once with
        // equal-length lanes (one CV per row per lane)
        if let Some(paths) = &self.air_paths {
            if paths.len() != self.cvs_per_row() {
                return field("air_paths", "one lane per CV-per-row is required");
            }
            let mut seen = vec![false; self.n_cv()];
            for path in paths {
                if path.len() != self.n_rows {
                    return field("air_paths", "each lane must name one CV per row");
                }
                for &cv in path {
                    if cv >= self.n_cv() || seen[cv] {
                        return field("air_paths", "each CV must appear exactly once");
                    }
                    seen[cv] = true;
                }
            }
        }
        Ok(())
    }
}
