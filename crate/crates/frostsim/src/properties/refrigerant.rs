//! Table-interpolated refrigerant properties on a (pressure, enthalpy) grid.
//!
//! The table is a self-describing JSON file with explicit grid vectors and
//! row-major property matrices (temperature, density, internal energy, vapor
//! quality, entropy) plus per-pressure saturation vectors. Tables are
//! generated offline (`tools/gen_refrigerant_table.py`); a coarse R1234yf
//! table is embedded for tests and as a fallback.
//!
//! Interpolation is bilinear, which keeps the property surface continuous
//! across the two-phase dome. The *partial derivatives* of density — needed
//! by the control-volume state transformation — are analytic per bilinear
//! patch, except near the dome edges where they are replaced by finite
//! secants over a 1 kJ/kg band and blended in smoothly, so the stiff
//! integrator never sees a hard jump there.

use serde::Deserialize;

use crate::{Error, Result};

/// Half-width of the dome-edge smoothing band for density partials [J/kg].
const DOME_BAND: f64 = 1.0e3;

/// Minimum transform determinant ρ·∂ρ/∂p + ∂ρ/∂h, as a fraction of its
/// term scale. See [`RefrigerantTable::density_partials`].
const DET_FLOOR: f64 = 0.02;

/// Point properties at a (p, h) query.
#[derive(Debug, Clone, Copy)]
pub struct RefrigerantProps {
    /// Temperature [K].
    pub t: f64,
    /// Density [kg/m³].
    pub rho: f64,
    /// Specific internal energy [J/kg].
    pub u: f64,
    /// Vapor quality, clamped to [0, 1].
    pub x: f64,
}

/// Partial derivatives of density with respect to the state pair.
#[derive(Debug, Clone, Copy)]
pub struct DensityPartials {
    /// ∂ρ/∂p at constant h [kg/(m³·Pa)].
    pub drho_dp: f64,
    /// ∂ρ/∂h at constant p [kg·kg/(m³·J)].
    pub drho_dh: f64,
}

/// Saturation-line properties at one pressure.
#[derive(Debug, Clone, Copy)]
pub struct SaturationProps {
    pub t_sat: f64,
    pub h_liq: f64,
    pub h_vap: f64,
    pub rho_liq: f64,
    pub rho_vap: f64,
    pub s_liq: f64,
    pub s_vap: f64,
}

#[derive(Deserialize)]
struct SatFile {
    t_sat: Vec<f64>,
    h_liq: Vec<f64>,
    h_vap: Vec<f64>,
    rho_liq: Vec<f64>,
    rho_vap: Vec<f64>,
    s_liq: Vec<f64>,
    s_vap: Vec<f64>,
}

#[derive(Deserialize)]
struct TableFile {
    version: u32,
    fluid: String,
    pressure: Vec<f64>,
    enthalpy: Vec<f64>,
    temperature: Vec<Vec<f64>>,
    density: Vec<Vec<f64>>,
    internal_energy: Vec<Vec<f64>>,
    quality: Vec<Vec<f64>>,
    entropy: Vec<Vec<f64>>,
    saturation: SatFile,
}

/// Gridded property table for one working fluid.
#[derive(Clone)]
pub struct RefrigerantTable {
    fluid: String,
    p: Vec<f64>,
    h: Vec<f64>,
    // row-major [i_p * nh + j_h]
    t: Vec<f64>,
    rho: Vec<f64>,
    u: Vec<f64>,
    x: Vec<f64>,
    s: Vec<f64>,
    sat_t: Vec<f64>,
    sat_h_liq: Vec<f64>,
    sat_h_vap: Vec<f64>,
    sat_rho_liq: Vec<f64>,
    sat_rho_vap: Vec<f64>,
    sat_s_liq: Vec<f64>,
    sat_s_vap: Vec<f64>,
}

impl std::fmt::Debug for RefrigerantTable {
    // the grids are thousands of numbers; show the shape, not the payload
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RefrigerantTable")
            .field("fluid", &self.fluid)
            .field("grid", &format_args!("{}x{}", self.p.len(), self.h.len()))
            .finish_non_exhaustive()
    }
}

impl RefrigerantTable {
    /// Parse a table from its JSON text and validate it.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let file: TableFile = serde_json::from_str(text)?;
        if file.version != 1 {
            return Err(Error::BadTable(format!(
                "unsupported table version {} (expected 1)",
                file.version
            )));
        }
        let np = file.pressure.len();
        let nh = file.enthalpy.len();
        let flatten = |m: Vec<Vec<f64>>, name: &str| -> Result<Vec<f64>> {
            if m.len() != np || m.iter().any(|row| row.len() != nh) {
                return Err(Error::BadTable(format!(
                    "matrix `{name}` does not match grid {np}x{nh}"
                )));
            }
            Ok(m.into_iter().flatten().collect())
        };
        let table = RefrigerantTable {
            fluid: file.fluid,
            t: flatten(file.temperature, "temperature")?,
            rho: flatten(file.density, "density")?,
            u: flatten(file.internal_energy, "internal_energy")?,
            x: flatten(file.quality, "quality")?,
            s: flatten(file.entropy, "entropy")?,
            p: file.pressure,
            h: file.enthalpy,
            sat_t: file.saturation.t_sat,
            sat_h_liq: file.saturation.h_liq,
            sat_h_vap: file.saturation.h_vap,
            sat_rho_liq: file.saturation.rho_liq,
            sat_rho_vap: file.saturation.rho_vap,
            sat_s_liq: file.saturation.s_liq,
            sat_s_vap: file.saturation.s_vap,
        };
        table.validate()?;
        Ok(table)
    }

    /// Load a table from a JSON file on disk.
    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::BadTable(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json_str(&text)
    }

    /// The coarse built-in R1234yf table (20 × 30 grid), always available.
    pub fn builtin() -> Self {
        Self::from_json_str(include_str!("r1234yf_builtin.json"))
            .expect("embedded table must be valid")
    }

    /// Working-fluid name the table was generated for.
    pub fn fluid(&self) -> &str {
        &self.fluid
    }

    /// Valid query region: (p_min, p_max, h_min, h_max).
    pub fn hull(&self) -> (f64, f64, f64, f64) {
        (
            self.p[0],
            *self.p.last().unwrap(),
            self.h[0],
            *self.h.last().unwrap(),
        )
    }

    fn validate(&self) -> Result<()> {
        let np = self.p.len();
        let nh = self.h.len();
        if np < 4 || nh < 4 {
            return Err(Error::BadTable(format!("grid too small ({np}x{nh})")));
        }
        if self.p.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::BadTable("pressure grid not strictly increasing".into()));
        }
        if self.h.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::BadTable("enthalpy grid not strictly increasing".into()));
        }
        for (name, v, n) in [
            ("t_sat", &self.sat_t, np),
            ("h_liq", &self.sat_h_liq, np),
            ("h_vap", &self.sat_h_vap, np),
            ("rho_liq", &self.sat_rho_liq, np),
            ("rho_vap", &self.sat_rho_vap, np),
            ("s_liq", &self.sat_s_liq, np),
            ("s_vap", &self.sat_s_vap, np),
        ] {
            if v.len() != n {
                return Err(Error::BadTable(format!(
                    "saturation vector `{name}` length {} != {n}",
                    v.len()
                )));
            }
        }
        if self
            .sat_h_liq
            .iter()
            .zip(&self.sat_h_vap)
            .any(|(l, v)| l >= v)
        {
            return Err(Error::BadTable(
                "saturated liquid enthalpy must stay below vapor enthalpy".into(),
            ));
        }
        for idx in 0..np * nh {
            let (i, j) = (idx / nh, idx % nh);
            if !(self.rho[idx] > 0.0 && self.rho[idx].is_finite()) || !(self.t[idx] > 0.0) {
                return Err(Error::BadTable(format!(
                    "non-physical node at p = {}, h = {}",
                    self.p[i], self.h[j]
                )));
            }
            if !(-1e-9..=1.0 + 1e-9).contains(&self.x[idx]) {
                return Err(Error::BadTable(format!(
                    "quality {} out of [0,1] at p = {}, h = {}",
                    self.x[idx], self.p[i], self.h[j]
                )));
            }
            // thermodynamic identity u = h - p/rho, required of the generator
            let u_id = self.h[j] - self.p[i] / self.rho[idx];
            if (self.u[idx] - u_id).abs() > 0.005 * u_id.abs().max(1e3) {
                return Err(Error::BadTable(format!(
                    "internal energy violates u = h - p/rho at p = {}, h = {}",
                    self.p[i], self.h[j]
                )));
            }
        }
        // entropy must be strictly increasing in h at fixed p for the
        // isentropic-enthalpy inversion to be well posed
        for i in 0..np {
            for j in 1..nh {
                if self.s[i * nh + j] <= self.s[i * nh + j - 1] {
                    return Err(Error::BadTable(format!(
                        "entropy not increasing in h at p = {}",
                        self.p[i]
                    )));
                }
            }
        }
        Ok(())
    }

    /// Index of the grid cell containing `v` (clamped to the last cell for
    /// the upper hull edge) plus the normalized coordinate inside it.
    fn locate(grid: &[f64], v: f64) -> (usize, f64) {
        let n = grid.len();
        let i = grid.partition_point(|&g| g <= v).clamp(1, n - 1) - 1;
        let frac = (v - grid[i]) / (grid[i + 1] - grid[i]);
        (i, frac)
    }

    fn check_hull(&self, p: f64, h: f64) -> Result<()> {
        let (p_min, p_max, h_min, h_max) = self.hull();
        if !(p_min..=p_max).contains(&p) || !(h_min..=h_max).contains(&h) {
            return Err(Error::OutsideTableHull {
                p,
                h,
                p_min,
                p_max,
                h_min,
                h_max,
            });
        }
        Ok(())
    }

    /// Bilinear interpolation of one matrix at cell (i, j) with local
    /// coordinates (tp, th).
    fn bil(&self, m: &[f64], i: usize, j: usize, tp: f64, th: f64) -> f64 {
        let nh = self.h.len();
        let m00 = m[i * nh + j];
        let m10 = m[(i + 1) * nh + j];
        let m01 = m[i * nh + j + 1];
        let m11 = m[(i + 1) * nh + j + 1];
        m00 * (1.0 - tp) * (1.0 - th)
            + m10 * tp * (1.0 - th)
            + m01 * (1.0 - tp) * th
            + m11 * tp * th
    }

    /// Interpolated properties at (p [Pa], h [J/kg]).
    pub fn props(&self, p: f64, h: f64) -> Result<RefrigerantProps> {
        self.check_hull(p, h)?;
        let (i, tp) = Self::locate(&self.p, p);
        let (j, th) = Self::locate(&self.h, h);
        Ok(RefrigerantProps {
            t: self.bil(&self.t, i, j, tp, th),
            rho: self.bil(&self.rho, i, j, tp, th),
            u: self.bil(&self.u, i, j, tp, th),
            x: self.bil(&self.x, i, j, tp, th).clamp(0.0, 1.0),
        })
    }

    /// Specific entropy [J/(kg·K)] at (p, h).
    pub fn entropy(&self, p: f64, h: f64) -> Result<f64> {
        self.check_hull(p, h)?;
        let (i, tp) = Self::locate(&self.p, p);
        let (j, th) = Self::locate(&self.h, h);
        Ok(self.bil(&self.s, i, j, tp, th))
    }

    /// Density alone (hull-clamped, for internal secant sampling).
    fn rho_clamped(&self, p: f64, h: f64) -> f64 {
        let (p_min, p_max, h_min, h_max) = self.hull();
        let p = p.clamp(p_min, p_max);
        let h = h.clamp(h_min, h_max);
        let (i, tp) = Self::locate(&self.p, p);
        let (j, th) = Self::locate(&self.h, h);
        self.bil(&self.rho, i, j, tp, th)
    }

    /// Density partials for the (M, U) → (p, h) state transformation.
    ///
    /// Analytic from the bilinear patch away from the dome; within
    /// [`DOME_BAND`] of a saturation boundary the ∂/∂h partial switches to a
    /// central secant spanning the band (and ∂/∂p to a matching secant), with
    /// a smoothstep blend so the result is continuous everywhere.
    pub fn density_partials(&self, p: f64, h: f64) -> Result<DensityPartials> {
        self.check_hull(p, h)?;
        let (i, tp) = Self::locate(&self.p, p);
        let (j, th) = Self::locate(&self.h, h);
        let nh = self.h.len();
        let dp_cell = self.p[i + 1] - self.p[i];
        let dh_cell = self.h[j + 1] - self.h[j];
        let r00 = self.rho[i * nh + j];
        let r10 = self.rho[(i + 1) * nh + j];
        let r01 = self.rho[i * nh + j + 1];
        let r11 = self.rho[(i + 1) * nh + j + 1];
        let mut drho_dp = ((r10 - r00) * (1.0 - th) + (r11 - r01) * th) / dp_cell;
        let mut drho_dh = ((r01 - r00) * (1.0 - tp) + (r11 - r10) * tp) / dh_cell;

        let sat = self.saturation(p)?;
        let d_edge = (h - sat.h_liq).abs().min((h - sat.h_vap).abs());
        if d_edge < 2.0 * DOME_BAND {
            let sec_h =
                (self.rho_clamped(p, h + DOME_BAND) - self.rho_clamped(p, h - DOME_BAND))
                    / (2.0 * DOME_BAND);
            let dpb = 0.01 * p;
            let sec_p =
                (self.rho_clamped(p + dpb, h) - self.rho_clamped(p - dpb, h)) / (2.0 * dpb);
            // 0 at the edge (pure secant) -> 1 at twice the band (analytic)
            let s = {
                let u = (d_edge / (2.0 * DOME_BAND)).clamp(0.0, 1.0);
                u * u * (3.0 - 2.0 * u)
            };
            drho_dh = s * drho_dh + (1.0 - s) * sec_h;
            drho_dp = s * drho_dp + (1.0 - s) * sec_p;
        }

        // On a grid cell straddling the liquid saturation edge, density
        // drops by a factor of a few within one cell and the interpolated
        // partials can turn the transform determinant ρ·∂ρ/∂p + ∂ρ/∂h
        // slightly negative — which would flip the sense of the state
        // dynamics. Floor the determinant at a small fraction of its term
        // scale by stiffening ∂ρ/∂p, the lower-accuracy direction in those
        // cells. The correction fades continuously to zero where the
        // partials are well behaved.
        let rho_here = self.bil(&self.rho, i, j, tp, th);
        let det = rho_here * drho_dp + drho_dh;
        let floor = DET_FLOOR * (rho_here * drho_dp.abs() + drho_dh.abs());
        if det < floor {
            drho_dp += (floor - det) / rho_here;
        }
        Ok(DensityPartials { drho_dp, drho_dh })
    }

    /// Saturation-line properties at pressure `p`, linearly interpolated.
    pub fn saturation(&self, p: f64) -> Result<SaturationProps> {
        let (p_min, p_max, _, _) = self.hull();
        if !(p_min..=p_max).contains(&p) {
            return Err(Error::OutsideTableHull {
                p,
                h: f64::NAN,
                p_min,
                p_max,
                h_min: self.h[0],
                h_max: *self.h.last().unwrap(),
            });
        }
        let (i, tp) = Self::locate(&self.p, p);
        let lerp = |v: &[f64]| v[i] * (1.0 - tp) + v[i + 1] * tp;
        Ok(SaturationProps {
            t_sat: lerp(&self.sat_t),
            h_liq: lerp(&self.sat_h_liq),
            h_vap: lerp(&self.sat_h_vap),
            rho_liq: lerp(&self.sat_rho_liq),
            rho_vap: lerp(&self.sat_rho_vap),
            s_liq: lerp(&self.sat_s_liq),
            s_vap: lerp(&self.sat_s_vap),
        })
    }

    /// Enthalpy [J/kg] at pressure `p` with entropy `s` — the isentropic
    /// endpoint used by the compressor model. Bisection over the enthalpy
    /// grid; entropy is strictly increasing in h (validated on load).
    pub fn isentropic_enthalpy(&self, p: f64, s: f64) -> Result<f64> {
        let (_, _, h_min, h_max) = self.hull();
        let (s_lo, s_hi) = (self.entropy(p, h_min)?, self.entropy(p, h_max)?);
        if !(s_lo..=s_hi).contains(&s) {
            return Err(Error::BadTable(format!(
                "entropy {s:.1} J/(kg·K) at p = {p:.0} Pa outside table span [{s_lo:.1}, {s_hi:.1}]"
            )));
        }
        let (mut lo, mut hi) = (h_min, h_max);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if self.entropy(p, mid)? < s {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// Pressure [Pa] whose saturation temperature equals `t` — the inverse of
    /// `saturation(p).t_sat`, used to pose equalized off-cycle states at a
    /// known coil temperature. Bisection over the pressure grid; saturation
    /// temperature is strictly increasing in pressure (validated on load).
    pub fn saturation_pressure(&self, t: f64) -> Result<f64> {
        let (p_min, p_max, _, _) = self.hull();
        let t_lo = self.saturation(p_min)?.t_sat;
        let t_hi = self.saturation(p_max)?.t_sat;
        if !(t_lo..=t_hi).contains(&t) {
            return Err(Error::OutOfRange {
                quantity: "saturation temperature",
                value: t,
                min: t_lo,
                max: t_hi,
            });
        }
        let (mut lo, mut hi) = (p_min, p_max);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if self.saturation(mid)?.t_sat < t {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// Enthalpy [J/kg] of superheated vapor at `(p, t)`. Bisection between
    /// the dew line and the table ceiling, where temperature is strictly
    /// increasing in enthalpy. `t` at or below the saturation temperature has
    /// no single-phase vapor answer and is rejected.
    pub fn vapor_enthalpy_at(&self, p: f64, t: f64) -> Result<f64> {
        let (_, _, _, h_max) = self.hull();
        let sat = self.saturation(p)?;
        let t_ceiling = self.props(p, h_max)?.t;
        if !(t > sat.t_sat) || t > t_ceiling {
            return Err(Error::OutOfRange {
                quantity: "vapor temperature",
                value: t,
                min: sat.t_sat,
                max: t_ceiling,
            });
        }
        let (mut lo, mut hi) = (sat.h_vap, h_max);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if self.props(p, mid)?.t < t {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn table() -> RefrigerantTable {
        RefrigerantTable::builtin()
    }

    #[test]
    fn builtin_loads_and_validates() {
        let t = table();
        assert_eq!(t.fluid(), "R1234yf");
        let (p_min, p_max, h_min, h_max) = t.hull();
        assert!(p_min < 2e5 && p_max > 25e5);
        assert!(h_min < 200e3 && h_max > 500e3);
    }

    #[test]
    fn grid_nodes_reproduce_exactly() {
        let t = table();
        let (i, j) = (7, 11);
        let props = t.props(t.p[i], t.h[j]).unwrap();
        assert_relative_eq!(props.rho, t.rho[i * t.h.len() + j], max_relative = 1e-14);
        assert_relative_eq!(props.t, t.t[i * t.h.len() + j], max_relative = 1e-14);
    }

    #[test]
    fn midpoint_is_arithmetic_mean_along_h() {
        let t = table();
        let p = t.p[5];
        let (h0, h1) = (t.h[10], t.h[11]);
        let mid = t.props(p, 0.5 * (h0 + h1)).unwrap();
        let a = t.props(p, h0).unwrap();
        let b = t.props(p, h1).unwrap();
        assert_relative_eq!(mid.rho, 0.5 * (a.rho + b.rho), max_relative = 1e-12);
    }

    #[test]
    fn internal_energy_identity_off_nodes() {
        let t = table();
        // random-ish interior points via a simple LCG to avoid a dev-dep here
        let mut seed = 0x2545f491_u64;
        for _ in 0..200 {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1);
            let a = (seed >> 11) as f64 / (1u64 << 53) as f64;
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1);
            let b = (seed >> 11) as f64 / (1u64 << 53) as f64;
            let (p_min, p_max, h_min, h_max) = t.hull();
            let p = p_min + a * (p_max - p_min);
            let h = h_min + b * (h_max - h_min);
            let props = t.props(p, h).unwrap();
            let u_id = h - p / props.rho;
            assert!(
                (props.u - u_id).abs() <= 0.005 * u_id.abs(),
                "u identity violated at p={p}, h={h}: {} vs {u_id}",
                props.u
            );
        }
    }

    #[test]
    fn outside_hull_is_reported() {
        let t = table();
        let (p_min, _, _, h_max) = t.hull();
        match t.props(p_min * 0.5, h_max * 0.5) {
            Err(Error::OutsideTableHull { .. }) => {}
            other => panic!("expected hull error, got {other:?}"),
        }
    }

    #[test]
    fn saturation_enthalpies_ordered() {
        let t = table();
        for p in [1.5e5, 3e5, 8e5, 15e5, 25e5] {
            let sat = t.saturation(p).unwrap();
            assert!(sat.h_liq < sat.h_vap, "dome collapsed at p = {p}");
            assert!(sat.rho_liq > sat.rho_vap);
        }
    }

    #[test]
    fn quality_clamped_and_consistent() {
        let t = table();
        let sat = t.saturation(5e5).unwrap();
        let mid = 0.5 * (sat.h_liq + sat.h_vap);
        let x = t.props(5e5, mid).unwrap().x;
        assert!((x - 0.5).abs() < 0.05, "x = {x} at dome midpoint");
        assert_eq!(t.props(5e5, sat.h_liq - 30e3).unwrap().x, 0.0);
        assert_eq!(t.props(5e5, sat.h_vap + 50e3).unwrap().x, 1.0);
    }

    #[test]
    fn density_partials_continuous_across_dome_edge() {
        let t = table();
        let p = 4e5;
        let sat = t.saturation(p).unwrap();
        // walk h across the liquid dome edge; partials must move continuously
        let mut prev: Option<f64> = None;
        let step = 50.0;
        let mut max_jump: f64 = 0.0;
        let mut h = sat.h_liq - 4e3;
        while h < sat.h_liq + 4e3 {
            let d = t.density_partials(p, h).unwrap().drho_dh;
            if let Some(pv) = prev {
                max_jump = max_jump.max((d - pv).abs());
            }
            prev = Some(d);
            h += step;
        }
        let scale = t.density_partials(p, sat.h_liq).unwrap().drho_dh.abs();
        assert!(
            max_jump < 0.15 * scale,
            "partial jump {max_jump} vs scale {scale}"
        );
    }

    #[test]
    fn isentropic_enthalpy_round_trip() {
        let t = table();
        let (p, h) = (2.5e5, 420e3);
        let s = t.entropy(p, h).unwrap();
        let h_back = t.isentropic_enthalpy(p, s).unwrap();
        assert_relative_eq!(h_back, h, max_relative = 1e-6);
        // compression raises enthalpy along an isentrope
        let h_dis = t.isentropic_enthalpy(14e5, s).unwrap();
        assert!(h_dis > h);
    }

    #[test]
    fn saturation_pressure_round_trip() {
        let t = table();
        for p in [1.6e5, 3.3e5, 9.0e5, 18.0e5] {
            let t_sat = t.saturation(p).unwrap().t_sat;
            let p_back = t.saturation_pressure(t_sat).unwrap();
            assert_relative_eq!(p_back, p, max_relative = 1e-9);
        }
        // colder than the table floor has no answer
        assert!(t.saturation_pressure(100.0).is_err());
    }

    #[test]
    fn vapor_enthalpy_round_trip_and_rejects_subcooled() {
        let t = table();
        let p = 3.5e5;
        let h = t.vapor_enthalpy_at(p, 293.15).unwrap();
        assert_relative_eq!(t.props(p, h).unwrap().t, 293.15, max_relative = 1e-9);
        assert!(h > t.saturation(p).unwrap().h_vap);
        // at or below saturation there is no single-phase vapor state
        let t_sat = t.saturation(p).unwrap().t_sat;
        assert!(t.vapor_enthalpy_at(p, t_sat - 5.0).is_err());
    }

    #[test]
    fn rejects_bad_version() {
        let text = r#"{"version": 2, "fluid": "X", "pressure": [], "enthalpy": [],
            "temperature": [], "density": [], "internal_energy": [], "quality": [],
            "entropy": [], "saturation": {"t_sat": [], "h_liq": [], "h_vap": [],
            "rho_liq": [], "rho_vap": [], "s_liq": [], "s_vap": []}}"#;
        assert!(RefrigerantTable::from_json_str(text).is_err());
    }
}
