//! The assembled plant and its simulation driver.
//!
//! [`state`] fixes the packing of the heterogeneous plant state into the
//! flat vector the integrator sees, [`plant`] wires the component models
//! into one derivative function over that vector, and [`scenario`] scripts
//! the frost/defrost cycle and runs it through the stiff solver.

pub mod plant;
pub mod scenario;
pub mod state;

pub use plant::{ControlInputs, PlantDiagnostics, PlantEval, PlantModel};
pub use scenario::{run_scenario, Schedule, SimOptions, SimResult};
pub use state::{StateLayout, StateTolerances, SystemState};
