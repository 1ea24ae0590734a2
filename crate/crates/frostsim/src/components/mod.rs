//! Balance-of-plant components around the two coils.
//!
//! All of these are quasi-steady maps — the only component carrying ODE
//! states of its own is the accumulator (a vessel volume) and the superheat
//! controller (one integrator). Everything returns plain numbers; the
//! system layer wires them to the state vector.

pub mod accumulator;
pub mod compressor;
pub mod controller;
pub mod exv;
pub mod fan;
pub mod reversing_valve;

pub use accumulator::{
    accumulator_derivatives, accumulator_outlet, AccumulatorOutlet, AccumulatorParams,
};
pub use compressor::{compressor_flow, CompressorFlow, CompressorParams};
pub use controller::{superheat_pi, ExvCommand, PiEval, SuperheatPiParams};
pub use exv::{exv_flow, ExvParams};
pub use fan::{fan_operating_point, FanOperatingPoint, FanParams, SystemCurve};
pub use reversing_valve::{
    mode_blend, reversing_valve_flows, ReversingValveFlows, ReversingValveParams, ValveEndpoints,
};
