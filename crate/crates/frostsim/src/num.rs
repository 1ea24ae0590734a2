//! Small shared numerics used to keep every switching construct in the model
//! C¹-smooth: the cubic smoothstep and a regularized odd square root.

/// Cubic smoothstep: 0 for u ≤ 0, 3u² − 2u³ inside (0, 1), 1 for u ≥ 1.
pub(crate) fn smoothstep01(u: f64) -> f64 {
    let u = u.clamp(0.0, 1.0);
    u * u * (3.0 - 2.0 * u)
}

/// Smoothstep of `x` across the band `[lo, hi]`.
pub(crate) fn smoothstep(x: f64, lo: f64, hi: f64) -> f64 {
    smoothstep01((x - lo) / (hi - lo))
}

/// Sign-preserving regularized square root: `x/(x² + x_lin²)^(1/4)` behaves
/// like sign(x)·√|x| for |x| ≫ `x_lin` and linearly near zero, C¹ everywhere.
/// The relative deviation from the pure square-root law is
/// (1 + (x_lin/x)²)^(−1/4): under 0.25% beyond 10·x_lin.
pub(crate) fn odd_sqrt(x: f64, x_lin: f64) -> f64 {
    x / (x * x + x_lin * x_lin).powf(0.25)
}

/// Magnitude with a smoothed kink: `x²/√(x² + eps²)`. Exactly 0 at x = 0
/// (no eps offset leaking into the result), approaches |x| for |x| ≫ eps,
/// C¹ everywhere. Used to keep power laws of a flow magnitude out of the
/// Jacobian's way at flow reversal.
pub(crate) fn soft_abs(x: f64, eps: f64) -> f64 {
    x * x / (x * x + eps * eps).sqrt()
}

/// max(a, b) with the corner rounded over a width `w`:
/// (a + b + √((a−b)² + w²))/2. Overestimates the true max by at most w/2
/// (at a = b), converges to it quadratically away from the corner.
pub(crate) fn smooth_max(a: f64, b: f64, w: f64) -> f64 {
    0.5 * (a + b + ((a - b) * (a - b) + w * w).sqrt())
}
