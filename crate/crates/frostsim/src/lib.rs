//! Dynamic simulation of air-source heat pumps under cyclic frosting and
//! reverse-cycle defrosting.
//!
//! The physical core is a lumped "film volume" on each outdoor-coil control
//! volume that carries frost and retained melt water through a single set of
//! smooth ODEs ([`film`]). Around it sit table-based refrigerant properties
//! and moist-air psychrometrics ([`properties`]), a discretized flat-tube
//! heat exchanger ([`hx`]), balance-of-plant components ([`components`]),
//! and the plant-level ODE assembly and scheduling ([`system`]). Integration
//! is handled by an adaptive BDF method with an RK4 cross-check companion
//! ([`solver`]). Batch runs are driven by a TOML config tree ([`config`])
//! and emit CSV trajectories plus a machine-readable summary ([`output`]).

mod num;
pub mod components;
pub mod config;
pub mod error;
pub mod film;
pub mod hx;
pub mod output;
pub mod properties;
pub mod solver;
pub mod system;

pub use error::{Error, Result};
