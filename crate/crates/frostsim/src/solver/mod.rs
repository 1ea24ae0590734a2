//! Time integration behind a single [`OdeSystem`] interface.
//!
//! Two integrators are provided. [`integrate_bdf`] is the reference method:
//! an adaptive, variable-order (1–5) BDF in the backward-difference
//! formulation, suitable for the stiff wall/film/refrigerant dynamics.
//! [`integrate_rk4`] is a fixed-step classical Runge–Kutta used as an
//! independent cross-check in tests; it has no step control and is only
//! appropriate when the caller has verified the step against the fastest
//! time constant.
//!
//! Both integrators sample the trajectory on a uniform grid when asked
//! (`sample_dt`), which keeps memory bounded on long runs independent of how
//! many internal steps the method takes.

mod bdf;
mod rk4;

pub use bdf::integrate_bdf;
pub use rk4::integrate_rk4;

use crate::{Error, Result};

/// A first-order ODE system `dy/dt = f(t, y)`.
///
/// `rhs` takes `&mut self` so implementations can keep warm-start caches for
/// interior nonlinear solves (e.g. film surface temperatures). Implementations
/// must stay deterministic: two calls at identical `(t, y)` must write
/// bit-identical derivatives regardless of cache contents.
///
/// A returned error is treated as "this point is not evaluable" (outside a
/// property-table hull, interior solve failed). The adaptive integrator
/// responds by shortening the step rather than aborting, so transient
/// excursions during Newton iterations are survivable; only a persistent
/// failure ends the run.
pub trait OdeSystem {
    /// Number of state variables.
    fn dim(&self) -> usize;
    /// Write `f(t, y)` into `dydt` (length `dim()`).
    fn rhs(&mut self, t: f64, y: &[f64], dydt: &mut [f64]) -> Result<()>;
}

/// Adapter turning a closure into an [`OdeSystem`] (tests, reduced models).
pub struct FnSystem<F>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
{
    pub dim: usize,
    pub f: F,
}

impl<F> OdeSystem for FnSystem<F>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
{
    fn dim(&self) -> usize {
        self.dim
    }
    fn rhs(&mut self, t: f64, y: &[f64], dydt: &mut [f64]) -> Result<()> {
        (self.f)(t, y, dydt)
    }
}

/// Tolerances and step limits for the adaptive integrator.
#[derive(Debug, Clone)]
pub struct SolverOptions {
    /// Relative tolerance applied to every state.
    pub rtol: f64,
    /// Absolute tolerance: either one entry (broadcast) or one per state.
    /// Per-state entries matter here because the state vector mixes pressures
    /// (~1e6 Pa) with film thicknesses (~1e-5 m); a single absolute floor
    /// would either drown the thin states in noise or stall on the large ones.
    pub atol: Vec<f64>,
    /// Hard cap on the step size [s].
    pub max_step: f64,
    /// Initial step [s]; `None` selects one from the initial derivative.
    pub first_step: Option<f64>,
    /// Highest BDF order to use (1..=5).
    pub max_order: usize,
    /// Safety cap on accepted steps before the run is declared stuck.
    pub max_steps: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-6,
            atol: vec![1e-9],
            max_step: f64::INFINITY,
            first_step: None,
            max_order: 5,
            max_steps: 20_000_000,
        }
    }
}

impl SolverOptions {
    /// Expand `atol` to one entry per state, validating everything else.
    pub(crate) fn atol_vector(&self, n: usize) -> Result<Vec<f64>> {
        if !(self.rtol.is_finite() && self.rtol > 0.0) {
            return Err(Error::config("solver.rtol", "must be finite and > 0"));
        }
        if !(self.max_step > 0.0) {
            return Err(Error::config("solver.max_step", "must be > 0"));
        }
        if self.max_order == 0 || self.max_order > 5 {
            return Err(Error::config("solver.max_order", "must be in 1..=5"));
        }
        if self.atol.iter().any(|a| !(a.is_finite() && *a >= 0.0)) {
            return Err(Error::config("solver.atol", "entries must be finite and >= 0"));
        }
        match self.atol.len() {
            1 => Ok(vec![self.atol[0]; n]),
            len if len == n => Ok(self.atol.clone()),
            len => Err(Error::config(
                "solver.atol",
                format!("expected 1 or {n} entries, got {len}"),
            )),
        }
    }
}

/// Counters describing how an integration went.
///
/// `worst_reject_cascade` is the longest run of consecutive rejected attempts
/// (error test or corrector failure) before an acceptance — the smoothness
/// regression watches it, since a hidden discontinuity in the model shows up
/// as the step controller slamming into the same wall repeatedly.
#[derive(Debug, Clone)]
pub struct SolverStats {
    /// Accepted steps.
    pub n_steps: usize,
    /// Steps rejected by the local-error test.
    pub n_rejected_error: usize,
    /// Steps rejected because the corrector iteration failed to converge.
    pub n_rejected_newton: usize,
    /// Right-hand-side evaluations (including Jacobian differencing).
    pub n_rhs: usize,
    /// Jacobian builds.
    pub n_jac: usize,
    /// LU factorizations of the iteration matrix.
    pub n_lu: usize,
    /// Smallest accepted step [s] (`inf` if none).
    pub min_accepted_step: f64,
    /// Largest accepted step [s].
    pub max_accepted_step: f64,
    /// Longest run of consecutive rejections.
    pub worst_reject_cascade: usize,
    /// Highest BDF order reached (4 for RK4 by convention).
    pub max_order_used: usize,
    /// Order in effect at the final step.
    pub final_order: usize,
}

impl Default for SolverStats {
    fn default() -> Self {
        Self {
            n_steps: 0,
            n_rejected_error: 0,
            n_rejected_newton: 0,
            n_rhs: 0,
            n_jac: 0,
            n_lu: 0,
            min_accepted_step: f64::INFINITY,
            max_accepted_step: 0.0,
            worst_reject_cascade: 0,
            max_order_used: 0,
            final_order: 0,
        }
    }
}

impl SolverStats {
    /// Fold a later segment's counters into this one (scenario runs restart
    /// the integrator at schedule breakpoints and merge the pieces).
    pub fn merge(&mut self, other: &SolverStats) {
        self.n_steps += other.n_steps;
        self.n_rejected_error += other.n_rejected_error;
        self.n_rejected_newton += other.n_rejected_newton;
        self.n_rhs += other.n_rhs;
        self.n_jac += other.n_jac;
        self.n_lu += other.n_lu;
        self.min_accepted_step = self.min_accepted_step.min(other.min_accepted_step);
        self.max_accepted_step = self.max_accepted_step.max(other.max_accepted_step);
        self.worst_reject_cascade = self.worst_reject_cascade.max(other.worst_reject_cascade);
        self.max_order_used = self.max_order_used.max(other.max_order_used);
        self.final_order = other.final_order;
    }
}

/// Why an integration stopped before reaching `t_end`.
///
/// Carried inside [`Solution`] rather than as an error so the trajectory up
/// to the failure — including the last state the method accepted — survives
/// for post-mortems. A scenario run that dies 20 minutes in is diagnosed
/// from what the states were doing just before, not from a bare message.
#[derive(Debug, Clone)]
pub struct AbortRecord {
    /// Last time the integrator reached with an accepted step [s].
    pub t: f64,
    /// What went wrong (step collapse, budget exhaustion, …).
    pub reason: String,
}

/// A sampled trajectory: `t[i]` ↔ `y[i]` (full state vector per sample).
///
/// `abort` is `None` for a run that reached `t_end`; otherwise the trajectory
/// ends at the last accepted step and `abort` says why it went no further.
#[derive(Debug, Clone)]
pub struct Solution {
    pub t: Vec<f64>,
    pub y: Vec<Vec<f64>>,
    pub stats: SolverStats,
    pub abort: Option<AbortRecord>,
}

impl Solution {
    /// Final time and state (the last-good state when the run aborted).
    pub fn last(&self) -> (f64, &[f64]) {
        let i = self.t.len() - 1;
        (self.t[i], &self.y[i])
    }

    /// One state component over all samples.
    pub fn channel(&self, j: usize) -> Vec<f64> {
        self.y.iter().map(|row| row[j]).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atol_broadcasts_or_matches_length() {
        let mut o = SolverOptions::default();
        assert_eq!(o.atol_vector(3).unwrap(), vec![1e-9; 3]);
        o.atol = vec![1.0, 2.0, 3.0];
        assert_eq!(o.atol_vector(3).unwrap(), vec![1.0, 2.0, 3.0]);
        o.atol = vec![1.0, 2.0];
        assert!(o.atol_vector(3).is_err());
    }

    #[test]
    fn bad_tolerances_are_rejected() {
        let mut o = SolverOptions::default();
        o.rtol = 0.0;
        assert!(o.atol_vector(1).is_err());
        o.rtol = 1e-6;
        o.atol = vec![-1.0];
        assert!(o.atol_vector(1).is_err());
        o.atol = vec![1e-9];
        o.max_order = 6;
        assert!(o.atol_vector(1).is_err());
    }
}
