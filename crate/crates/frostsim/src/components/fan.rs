//! Axial fan with affinity-law scaling, intersected with the coil's
//! quadratic resistance curve.
//!
//! The fan curve is a downward parabola Δp = Δp_max·(1 − (V̇/V̇_max)²) whose
//! anchors scale by the affinity laws (Δp_max ∝ n², V̇_max ∝ n, P ∝ n³).
//! The duct/coil resistance is Δp = head + coeff·V̇², so the operating point
//! has a closed form and needs no iteration. A static head at or above the
//! fan's shutoff pressure means the curves no longer intersect: the fan
//! spins dead-headed at zero flow, and the operating point says so.

#[derive(Debug, Clone)]
pub struct FanParams {
    /// Nominal speed [rev/s] at which the curve anchors are given.
    pub n_nom: f64,
    /// Shutoff (zero-flow) pressure rise at nominal speed [Pa].
    pub dp_max_nom: f64,
    /// Free-delivery (zero-pressure) flow at nominal speed [m³/s].
    pub v_dot_max_nom: f64,
    /// Shaft power at nominal speed [W].
    pub p_shaft_nom: f64,
}

impl Default for FanParams {
    fn default() -> Self {
        Self {
            n_nom: 15.0,
            dp_max_nom: 120.0,
            v_dot_max_nom: 1.6,
            p_shaft_nom: 80.0,
        }
    }
}

/// Resistance the fan works against: Δp = static_head + coeff·V̇².
#[derive(Debug, Clone, Copy)]
pub struct SystemCurve {
    /// Quadratic loss coefficient [Pa/(m³/s)²].
    pub coeff: f64,
    /// Flow-independent head [Pa] (zero for an open coil circuit).
    pub static_head: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct FanOperatingPoint {
    /// Delivered volume flow [m³/s].
    pub v_dot: f64,
    /// Pressure rise at the operating point [Pa].
    pub dp: f64,
    /// Shaft power [W].
    pub power: f64,
    /// True when the system curve never meets the fan curve (head at or
    /// above shutoff): the fan runs dead-headed at zero flow.
    pub stalled: bool,
}

/// Intersect the fan curve at `speed` [rev/s] with the system curve.
pub fn fan_operating_point(speed: f64, sys: &SystemCurve, p: &FanParams) -> FanOperatingPoint {
    if speed <= 0.0 {
        return FanOperatingPoint {
            v_dot: 0.0,
            dp: 0.0,
            power: 0.0,
            stalled: false,
        };
    }
    let r = speed / p.n_nom;
    let dp_max = p.dp_max_nom * r * r;
    let v_max = p.v_dot_max_nom * r;
    let power = p.p_shaft_nom * r * r * r;
    if sys.static_head >= dp_max {
        return FanOperatingPoint {
            v_dot: 0.0,
            dp: dp_max,
            power,
            stalled: true,
        };
    }
    let v_dot = ((dp_max - sys.static_head) / (sys.coeff + dp_max / (v_max * v_max))).sqrt();
    FanOperatingPoint {
        v_dot,
        dp: sys.static_head + sys.coeff * v_dot * v_dot,
        power,
        stalled: false,
    }
}
