//! The film volume: one lumped phase-change layer per coil surface.
//!
//! A film volume tracks four states — total enthalpy, frost thickness, frost
//! density, retained water/ice mass — and produces their time derivatives
//! from wall and air boundary conditions. Four operating stages (frosting,
//! melting, draining, dry) contribute source terms that are blended by fuzzy
//! weights instead of being switched, so the resulting ODEs are smooth and
//! integrate without events.

mod dynamics;
mod fuzzy;
mod stages;
mod state;

pub use dynamics::{film_derivatives, film_derivatives_with_weights, FilmDerivatives, FilmDiagnostics};
pub use fuzzy::{fuzzy_weights, membership, FuzzyWeights};
pub use stages::{
    stage1_sources, stage2_sources, stage3_sources, StageOneSources, StageThreeSources,
    StageTwoSources,
};
pub use state::{
    bare_film_at, film_conductivity, film_cp, film_density, film_temperature, film_thickness,
    frost_masses, liquid_fraction, reference_enthalpies, retained_conductivity, retained_density,
    FilmBoundary, FilmMasses, FilmParams, FilmState, ReferenceEnthalpies,
};
