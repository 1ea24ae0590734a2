//! Flat state vector layout for the whole plant.
//!
//! The integrator works on one `&[f64]`; everything else — the coil models,
//! the output writer, the tolerance builder — wants named quantities. This
//! module owns the mapping in one place so an index is never computed twice:
//! [`StateLayout`] turns a [`SystemState`] into the flat vector and back, and
//! names every slot for diagnostics and output headers.

use std::ops::Range;

use crate::film::FilmState;
use crate::hx::RefrigerantCv;

/// Sizes that determine the flat layout: one block of seven per-CV families
/// for the outdoor coil (refrigerant pair, wall, four film states), three for
/// the dry indoor coil, then the five scalar tail states.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StateLayout {
    pub n_outdoor: usize,
    pub n_indoor: usize,
}

/// All plant states in engineering form, one field per family.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemState {
    /// Outdoor-coil refrigerant pressures [Pa].
    pub outdoor_p: Vec<f64>,
    /// Outdoor-coil refrigerant enthalpies [J/kg].
    pub outdoor_h: Vec<f64>,
    /// Outdoor-coil wall temperatures [K].
    pub outdoor_t_wall: Vec<f64>,
    /// One film volume per outdoor CV.
    pub outdoor_film: Vec<FilmState>,
    /// Indoor-coil refrigerant pressures [Pa].
    pub indoor_p: Vec<f64>,
    /// Indoor-coil refrigerant enthalpies [J/kg].
    pub indoor_h: Vec<f64>,
    /// Indoor-coil wall temperatures [K].
    pub indoor_t_wall: Vec<f64>,
    /// Discharge-line volume between compressor and reversing valve.
    pub discharge: RefrigerantCv,
    /// Suction accumulator vessel.
    pub accumulator: RefrigerantCv,
    /// Superheat-PI integrator state [valve-opening units].
    pub exv_integral: f64,
}

impl StateLayout {
    /// Total number of state variables.
    pub fn dim(&self) -> usize {
        7 * self.n_outdoor + 3 * self.n_indoor + 5
    }

    pub fn outdoor_p(&self) -> Range<usize> {
        0..self.n_outdoor
    }
    pub fn outdoor_h(&self) -> Range<usize> {
        self.n_outdoor..2 * self.n_outdoor
    }
    pub fn outdoor_t_wall(&self) -> Range<usize> {
        2 * self.n_outdoor..3 * self.n_outdoor
    }
    pub fn outdoor_h_film(&self) -> Range<usize> {
        3 * self.n_outdoor..4 * self.n_outdoor
    }
    pub fn outdoor_delta_f(&self) -> Range<usize> {
        4 * self.n_outdoor..5 * self.n_outdoor
    }
    pub fn outdoor_rho_f(&self) -> Range<usize> {
        5 * self.n_outdoor..6 * self.n_outdoor
    }
    pub fn outdoor_m_wi(&self) -> Range<usize> {
        6 * self.n_outdoor..7 * self.n_outdoor
    }
    pub fn indoor_p(&self) -> Range<usize> {
        let base = 7 * self.n_outdoor;
        base..base + self.n_indoor
    }
    pub fn indoor_h(&self) -> Range<usize> {
        let base = 7 * self.n_outdoor + self.n_indoor;
        base..base + self.n_indoor
    }
    pub fn indoor_t_wall(&self) -> Range<usize> {
        let base = 7 * self.n_outdoor + 2 * self.n_indoor;
        base..base + self.n_indoor
    }
    pub fn discharge_p(&self) -> usize {
        7 * self.n_outdoor + 3 * self.n_indoor
    }
    pub fn discharge_h(&self) -> usize {
        self.discharge_p() + 1
    }
    pub fn accumulator_p(&self) -> usize {
        self.discharge_p() + 2
    }
    pub fn accumulator_h(&self) -> usize {
        self.discharge_p() + 3
    }
    pub fn exv_integral(&self) -> usize {
        self.discharge_p() + 4
    }

    /// Flatten a state into the layout's vector form.
    ///
    /// Panics if the state's per-CV vectors disagree with the layout — that
    /// is a wiring bug, not a runtime condition.
    pub fn pack(&self, s: &SystemState) -> Vec<f64> {
        assert_eq!(s.outdoor_p.len(), self.n_outdoor, "outdoor CV count");
        assert_eq!(s.outdoor_film.len(), self.n_outdoor, "outdoor film count");
        assert_eq!(s.indoor_p.len(), self.n_indoor, "indoor CV count");
        let mut y = vec![0.0; self.dim()];
        y[self.outdoor_p()].copy_from_slice(&s.outdoor_p);
        y[self.outdoor_h()].copy_from_slice(&s.outdoor_h);
        y[self.outdoor_t_wall()].copy_from_slice(&s.outdoor_t_wall);
        for (i, f) in s.outdoor_film.iter().enumerate() {
            y[self.outdoor_h_film().start + i] = f.h_film;
            y[self.outdoor_delta_f().start + i] = f.delta_f;
            y[self.outdoor_rho_f().start + i] = f.rho_f;
            y[self.outdoor_m_wi().start + i] = f.m_wi;
        }
        y[self.indoor_p()].copy_from_slice(&s.indoor_p);
        y[self.indoor_h()].copy_from_slice(&s.indoor_h);
        y[self.indoor_t_wall()].copy_from_slice(&s.indoor_t_wall);
        y[self.discharge_p()] = s.discharge.p;
        y[self.discharge_h()] = s.discharge.h;
        y[self.accumulator_p()] = s.accumulator.p;
        y[self.accumulator_h()] = s.accumulator.h;
        y[self.exv_integral()] = s.exv_integral;
        y
    }

    /// Rebuild the engineering view from a flat vector.
    pub fn unpack(&self, y: &[f64]) -> SystemState {
        assert_eq!(y.len(), self.dim(), "state vector length");
        let film: Vec<FilmState> = (0..self.n_outdoor)
            .map(|i| FilmState {
                h_film: y[self.outdoor_h_film().start + i],
                delta_f: y[self.outdoor_delta_f().start + i],
                rho_f: y[self.outdoor_rho_f().start + i],
                m_wi: y[self.outdoor_m_wi().start + i],
            })
            .collect();
        SystemState {
            outdoor_p: y[self.outdoor_p()].to_vec(),
            outdoor_h: y[self.outdoor_h()].to_vec(),
            outdoor_t_wall: y[self.outdoor_t_wall()].to_vec(),
            outdoor_film: film,
            indoor_p: y[self.indoor_p()].to_vec(),
            indoor_h: y[self.indoor_h()].to_vec(),
            indoor_t_wall: y[self.indoor_t_wall()].to_vec(),
            discharge: RefrigerantCv {
                p: y[self.discharge_p()],
                h: y[self.discharge_h()],
            },
            accumulator: RefrigerantCv {
                p: y[self.accumulator_p()],
                h: y[self.accumulator_h()],
            },
            exv_integral: y[self.exv_integral()],
        }
    }

    /// Human-readable name of one slot, e.g. `outdoor.delta_f[7]`.
    pub fn name(&self, idx: usize) -> String {
        let n_o = self.n_outdoor;
        let n_i = self.n_indoor;
        let families: [(&str, usize); 10] = [
            ("outdoor.p", n_o),
            ("outdoor.h", n_o),
            ("outdoor.t_wall", n_o),
            ("outdoor.h_film", n_o),
            ("outdoor.delta_f", n_o),
            ("outdoor.rho_f", n_o),
            ("outdoor.m_wi", n_o),
            ("indoor.p", n_i),
            ("indoor.h", n_i),
            ("indoor.t_wall", n_i),
        ];
        let mut rest = idx;
        for (prefix, len) in families {
            if rest < len {
                return format!("{prefix}[{rest}]");
            }
            rest -= len;
        }
        match rest {
            0 => "discharge.p".into(),
            1 => "discharge.h".into(),
            2 => "accumulator.p".into(),
            3 => "accumulator.h".into(),
            4 => "exv.integral".into(),
            _ => panic!("state index {idx} out of range for {self:?}"),
        }
    }

    /// All slot names in layout order.
    pub fn names(&self) -> Vec<String> {
        (0..self.dim()).map(|i| self.name(i)).collect()
    }

    /// Find a slot by its name.
    pub fn index_of(&self, name: &str) -> Option<usize> {
        (0..self.dim()).find(|&i| self.name(i) == name)
    }
}

/// Per-family absolute tolerances, in each family's own units.
///
/// One scalar `atol` cannot serve a vector that mixes megapascal pressures
/// with micrometer frost thicknesses; these are expanded by
/// [`StateLayout::atol`] into the per-slot vector the integrator consumes.
/// The defaults resolve each family about four orders below its typical
/// operating magnitude.
#[derive(Debug, Clone, Copy, serde::Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StateTolerances {
    /// Refrigerant pressures [Pa].
    pub p: f64,
    /// Refrigerant enthalpies [J/kg].
    pub h: f64,
    /// Wall temperatures [K].
    pub t_wall: f64,
    /// Film enthalpies [J].
    pub h_film: f64,
    /// Frost thicknesses [m].
    pub delta_f: f64,
    /// Frost densities [kg/m³].
    pub rho_f: f64,
    /// Retained water/ice masses [kg].
    pub m_wi: f64,
    /// Controller integrator [valve-opening units].
    pub control: f64,
}

impl Default for StateTolerances {
    fn default() -> Self {
        Self {
            p: 50.0,
            h: 50.0,
            t_wall: 1e-2,
            h_film: 10.0,
            delta_f: 1e-8,
            rho_f: 1e-3,
            m_wi: 1e-7,
            control: 1e-6,
        }
    }
}

impl StateLayout {
    /// Expand per-family tolerances into the per-slot vector.
    pub fn atol(&self, tol: &StateTolerances) -> Vec<f64> {
        let mut atol = vec![0.0; self.dim()];
        atol[self.outdoor_p()].fill(tol.p);
        atol[self.outdoor_h()].fill(tol.h);
        atol[self.outdoor_t_wall()].fill(tol.t_wall);
        atol[self.outdoor_h_film()].fill(tol.h_film);
        atol[self.outdoor_delta_f()].fill(tol.delta_f);
        atol[self.outdoor_rho_f()].fill(tol.rho_f);
        atol[self.outdoor_m_wi()].fill(tol.m_wi);
        atol[self.indoor_p()].fill(tol.p);
        atol[self.indoor_h()].fill(tol.h);
        atol[self.indoor_t_wall()].fill(tol.t_wall);
        atol[self.discharge_p()] = tol.p;
        atol[self.discharge_h()] = tol.h;
        atol[self.accumulator_p()] = tol.p;
        atol[self.accumulator_h()] = tol.h;
        atol[self.exv_integral()] = tol.control;
        atol
    }
}
