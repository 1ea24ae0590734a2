//! Superheat PI controller for the expansion valve.
//!
//! One integrator state lives in the system ODE vector; this module is the
//! pure control law around it. The measured variable is suction superheat
//! (temperature above dew at the suction pressure); the actuator is valve
//! opening. Positive error — more superheat than wanted — opens the valve
//! to flood the evaporator further.
//!
//! Two practical guards: the output clamps to the valve's usable range with
//! conditional anti-windup (the integrator freezes while it would only push
//! the command further past a rail), and the whole loop can be overridden
//! by the schedule (startup, defrost), which pins the opening and freezes
//! the integrator so control resumes bumplessly from where it left off.

#[derive(Debug, Clone)]
pub struct SuperheatPiParams {
    /// Superheat setpoint [K].
    pub setpoint: f64,
    /// Proportional gain [opening/K].
    pub kp: f64,
    /// Integral gain [opening/(K·s)]: the integrator state accumulates
    /// ki·error and adds directly to the opening.
    pub ki: f64,
    /// Opening with zero error and empty integrator.
    pub u_bias: f64,
    /// Lower clamp; keeps a bleed path open so the loop never dead-ends.
    pub u_min: f64,
    /// Upper clamp (full open).
    pub u_max: f64,
}

impl Default for SuperheatPiParams {
    fn default() -> Self {
        Self {
            setpoint: 3.5,
            kp: 0.02,
            ki: 1.0e-3,
            u_bias: 0.35,
            u_min: 0.02,
            u_max: 1.0,
        }
    }
}

/// What the valve should do this instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExvCommand {
    /// Closed-loop superheat control.
    Auto,
    /// Scheduled opening (startup ramp, defrost full-open); the integrator
    /// holds its value.
    Forced(f64),
}

#[derive(Debug, Clone, Copy)]
pub struct PiEval {
    /// Valve opening to apply, already clamped.
    pub opening: f64,
    /// Integrator state derivative [opening/s].
    pub di_dt: f64,
    /// Control error [K] (superheat − setpoint).
    pub error: f64,
}

/// Evaluate the control law at measured `superheat` with integrator state
/// `integral` (in opening units).
pub fn superheat_pi(
    superheat: f64,
    integral: f64,
    command: ExvCommand,
    p: &SuperheatPiParams,
) -> PiEval {
    let error = superheat - p.setpoint;
    if let ExvCommand::Forced(u) = command {
        return PiEval {
            opening: u.clamp(p.u_min, p.u_max),
            di_dt: 0.0,
            error,
        };
    }
    let u_raw = p.u_bias + p.kp * error + integral;
    let opening = u_raw.clamp(p.u_min, p.u_max);
    // conditional anti-windup: integrate only while it helps
    let winding_out = (u_raw > p.u_max && error > 0.0) || (u_raw < p.u_min && error < 0.0);
    let di_dt = if winding_out { 0.0 } else { p.ki * error };
    PiEval {
        opening,
        di_dt,
        error,
    }
}
