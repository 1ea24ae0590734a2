//! The scripted frost/defrost cycle and the simulation driver.
//!
//! A [`Schedule`] turns time into actuator commands: ramp the unit up, hold
//! heating while frost accumulates, swing the reversing valve for a hot-gas
//! defrost, and swing back. All transitions the hardware performs
//! continuously (valve travel, speed ramps) are C¹ blends; the only true
//! discontinuities are supervisory rewirings of the expansion-valve command,
//! and [`run_scenario`] restarts the integrator exactly there so the stiff
//! solver never differentiates across a kink.

use serde::Deserialize;

use crate::components::{mode_blend, ExvCommand};
use crate::solver::{integrate_bdf, AbortRecord, OdeSystem, SolverOptions, SolverStats};
use crate::system::plant::{ControlInputs, PlantModel};
use crate::system::state::{StateLayout, StateTolerances, SystemState};
use crate::{Error, Result};

/// Timed actuator script for one simulation run.
///
/// Defaults describe the reference cycle: 30 s startup ramp, superheat
/// control released at 100 s, a 60 s hot-gas defrost starting at 1200 s, and
/// recovery until 1500 s. Events scheduled beyond `t_end` simply never
/// happen, so shortening `t_end` is the way to run a startup-only case.
#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Schedule {
    /// End of the run [s].
    pub t_end: f64,
    /// Actuator spin-up time from standstill [s].
    pub ramp: f64,
    /// Instant the expansion valve switches from its startup preset to
    /// closed-loop superheat control [s].
    pub sh_enable: f64,
    /// Start of the reversing-valve travel into defrost [s].
    pub defrost_start: f64,
    /// Start of the travel back into heating [s].
    pub defrost_end: f64,
    /// Reversing-valve travel time [s].
    pub valve_travel: f64,
    /// Compressor speed in heating [rev/s].
    pub comp_speed: f64,
    /// Compressor speed during defrost [rev/s].
    pub comp_speed_defrost: f64,
    /// Outdoor fan speed in heating [rev/s]; the fan stops for defrost.
    pub fan_speed: f64,
    /// Expansion-valve opening before superheat control is enabled [0..1].
    pub exv_preset: f64,
    /// Expansion-valve opening held during defrost [0..1].
    pub exv_defrost: f64,
}

impl Default for Schedule {
    fn default() -> Self {
        Self {
            t_end: 1500.0,
            ramp: 30.0,
            sh_enable: 100.0,
            defrost_start: 1200.0,
            defrost_end: 1260.0,
            valve_travel: 2.0,
            comp_speed: 50.0,
            comp_speed_defrost: 25.0,
            fan_speed: 15.0,
            exv_preset: 0.35,
            exv_defrost: 1.0,
        }
    }
}

impl Schedule {
    pub fn validate(&self) -> Result<()> {
        for (key, v) in [
            ("schedule.t_end", self.t_end),
            ("schedule.ramp", self.ramp),
            ("schedule.valve_travel", self.valve_travel),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::config(key, format!("must be positive, got {v}")));
            }
        }
        for (key, v) in [
            ("schedule.comp_speed", self.comp_speed),
            ("schedule.comp_speed_defrost", self.comp_speed_defrost),
            ("schedule.fan_speed", self.fan_speed),
            ("schedule.sh_enable", self.sh_enable),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::config(key, format!("must be non-negative, got {v}")));
            }
        }
        for (key, v) in [
            ("schedule.exv_preset", self.exv_preset),
            ("schedule.exv_defrost", self.exv_defrost),
        ] {
            if !(v > 0.0 && v <= 1.0) {
                return Err(Error::config(key, format!("must lie in (0, 1], got {v}")));
            }
        }
        if self.defrost_end < self.defrost_start + self.valve_travel {
            return Err(Error::config(
                "schedule.defrost_end",
                "defrost must outlast the valve travel into it",
            ));
        }
        Ok(())
    }

    /// Reversing-valve travel at time `t`: 0 in heating, 1 in defrost.
    pub fn sigma(&self, t: f64) -> f64 {
        mode_blend(t, self.defrost_start, self.valve_travel)
            - mode_blend(t, self.defrost_end, self.valve_travel)
    }

    /// Actuator commands at time `t`.
    pub fn inputs(&self, t: f64) -> ControlInputs {
        let up = mode_blend(t, 0.0, self.ramp);
        let sigma = self.sigma(t);
        let comp_speed =
            up * (self.comp_speed + (self.comp_speed_defrost - self.comp_speed) * sigma);
        let fan_speed = up * self.fan_speed * (1.0 - sigma);
        let exv = if t < self.sh_enable {
            ExvCommand::Forced(self.exv_preset)
        } else if (self.defrost_start..self.defrost_end).contains(&t) {
            ExvCommand::Forced(self.exv_defrost)
        } else {
            ExvCommand::Auto
        };
        ControlInputs {
            comp_speed,
            fan_speed,
            exv,
            sigma,
        }
    }

    /// Instants where the script is not smooth: blend-support edges and the
    /// expansion-valve command rewirings. The driver restarts the integrator
    /// at each so no step ever straddles a kink.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut b = vec![
            self.ramp,
            self.sh_enable,
            self.defrost_start,
            self.defrost_start + self.valve_travel,
            self.defrost_end,
            self.defrost_end + self.valve_travel,
        ];
        b.retain(|&t| t > 0.0 && t < self.t_end);
        b.push(0.0);
        b.push(self.t_end);
        b.sort_by(|a, b| a.partial_cmp(b).unwrap());
        b.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
        b
    }
}

/// Integration settings for a scenario run.
#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimOptions {
    /// Relative tolerance.
    pub rtol: f64,
    /// Per-family absolute tolerances, expanded over the state layout.
    pub tol: StateTolerances,
    /// Trajectory sampling interval [s]. Samples restart on each schedule
    /// breakpoint, so a grid that divides the breakpoint spacing stays
    /// globally uniform.
    pub sample_dt: f64,
    /// Hard step cap [s]; keeps the integrator from coasting blindly across
    /// slow stretches.
    pub max_step: f64,
    /// Highest BDF order (1..=5).
    pub max_order: usize,
    /// Accepted-step cap per segment before the run is declared stuck.
    pub max_steps: usize,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-4,
            tol: StateTolerances::default(),
            sample_dt: 1.0,
            max_step: 5.0,
            max_order: 5,
            max_steps: 2_000_000,
        }
    }
}

impl SimOptions {
    pub fn validate(&self) -> Result<()> {
        for (key, v) in [
            ("sim.rtol", self.rtol),
            ("sim.sample_dt", self.sample_dt),
            ("sim.max_step", self.max_step),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::config(key, format!("must be positive, got {v}")));
            }
        }
        if !(1..=5).contains(&self.max_order) {
            return Err(Error::config("sim.max_order", "must lie in 1..=5"));
        }
        Ok(())
    }
}

/// A completed (or aborted) scenario run: the sampled trajectory plus
/// bookkeeping. `y[k]` is the packed state at `t[k]` under `layout`.
#[derive(Debug, Clone)]
pub struct SimResult {
    pub t: Vec<f64>,
    pub y: Vec<Vec<f64>>,
    pub layout: StateLayout,
    /// Accumulated integrator statistics over all segments.
    pub stats: SolverStats,
    /// Set when the integrator gave up mid-run; the trajectory up to the
    /// abort instant is retained.
    pub abort: Option<AbortRecord>,
    /// State at the last recorded instant.
    pub final_state: SystemState,
}

/// The plant as the integrator sees it: unpack, evaluate, repack.
struct PlantOde<'a> {
    model: &'a PlantModel,
    schedule: &'a Schedule,
    layout: StateLayout,
    t_fs_cache: Vec<f64>,
}

impl OdeSystem for PlantOde<'_> {
    fn dim(&self) -> usize {
        self.layout.dim()
    }

    fn rhs(&mut self, t: f64, y: &[f64], dydt: &mut [f64]) -> Result<()> {
        let s = self.layout.unpack(y);
        let eval = self
            .model
            .evaluate(&self.schedule.inputs(t), &s, &mut self.t_fs_cache)?;
        dydt.copy_from_slice(&eval.dy);
        Ok(())
    }
}

/// Run the schedule from the plant's equalized initial state.
///
/// The run is split at the schedule breakpoints; each segment continues from
/// the previous end state with fresh integrator history. A mid-run solver
/// abort is not an error: the partial trajectory comes back with
/// [`SimResult::abort`] set so the approach to the failure can be inspected.
pub fn run_scenario(
    model: &PlantModel,
    schedule: &Schedule,
    opts: &SimOptions,
) -> Result<SimResult> {
    model.validate()?;
    schedule.validate()?;
    opts.validate()?;

    let layout = model.layout();
    let solver_opts = SolverOptions {
        rtol: opts.rtol,
        atol: layout.atol(&opts.tol),
        max_step: opts.max_step,
        first_step: None,
        max_order: opts.max_order,
        max_steps: opts.max_steps,
    };
    let mut ode = PlantOde {
        model,
        schedule,
        layout,
        t_fs_cache: vec![f64::NAN; layout.n_outdoor],
    };

    let mut y = layout.pack(&model.initial_state()?);
    let mut t_all: Vec<f64> = Vec::new();
    let mut y_all: Vec<Vec<f64>> = Vec::new();
    let mut stats = SolverStats::default();
    let mut abort = None;

    for w in schedule.breakpoints().windows(2) {
        let sol = integrate_bdf(&mut ode, w[0], w[1], &y, &solver_opts, Some(opts.sample_dt))?;
        y = sol.y.last().expect("integrator always records").clone();
        // every segment records its own start, which duplicates the
        // previous segment's end
        let skip = usize::from(!t_all.is_empty());
        t_all.extend(sol.t.into_iter().skip(skip));
        y_all.extend(sol.y.into_iter().skip(skip));
        stats.merge(&sol.stats);
        if sol.abort.is_some() {
            abort = sol.abort;
            break;
        }
    }

    let final_state = layout.unpack(y_all.last().expect("at least the initial state"));
    Ok(SimResult {
        t: t_all,
        y: y_all,
        layout,
        stats,
        abort,
        final_state,
    })
}
