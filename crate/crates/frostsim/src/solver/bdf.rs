//! Adaptive variable-order BDF in backward-difference form.
//!
//! This is the quasi-constant step-size BDF of Byrne & Hindmarsh in the
//! variant popularized by Shampine & Reichelt's ode15s: the history is kept
//! as a table of backward differences `D⁰..D^{k+2}`, the predictor is their
//! plain sum, and the corrector at order `k` solves
//!
//! ```text
//!     (1 − κ_k) γ_k · d  +  Σ_{j=1..k} γ_j D^j  =  h · f(t_new, y_pred + d)
//! ```
//!
//! for the correction `d` by a modified-Newton (chord) iteration against an
//! LU-factorized iteration matrix `I − c·J`, `c = h/((1−κ_k)γ_k)`. The κ
//! offsets trade a little accuracy for markedly better high-order stability
//! angles. Step-size changes rescale `D` in place; step and order control
//! compare the weighted-RMS error estimates at orders k−1, k, k+1 and take
//! the largest admissible step, capped at a 10× growth per change.
//!
//! The Jacobian comes from one-sided finite differences and is reused across
//! steps until the corrector stops converging — with quasi-constant steps a
//! handful of factorizations typically carries hundreds of steps.

use nalgebra::{DMatrix, DVector, Dyn};

use super::{AbortRecord, OdeSystem, Solution, SolverOptions, SolverStats};
use crate::{Error, Result};

const MAX_ORDER: usize = 5;
const NEWTON_MAXITER: usize = 4;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 10.0;

type Lu = nalgebra::linalg::LU<f64, Dyn, Dyn>;

/// Method coefficients per order `k`:
/// `gamma[k] = Σ_{j=1..k} 1/j`, `alpha[k] = (1 − κ_k)·γ_k`, and
/// `error_const[k]` scales the truncation-error estimate `‖e‖ ≈ C_k·‖d‖`.
struct Coeffs {
    gamma: [f64; MAX_ORDER + 1],
    alpha: [f64; MAX_ORDER + 1],
    error_const: [f64; MAX_ORDER + 1],
}

fn coeffs() -> Coeffs {
    let kappa: [f64; MAX_ORDER + 1] = [0.0, -0.185, -1.0 / 9.0, -0.0823, -0.0415, 0.0];
    let mut gamma = [0.0; MAX_ORDER + 1];
    for k in 1..=MAX_ORDER {
        gamma[k] = gamma[k - 1] + 1.0 / k as f64;
    }
    let mut alpha = [0.0; MAX_ORDER + 1];
    let mut error_const = [0.0; MAX_ORDER + 1];
    for k in 0..=MAX_ORDER {
        alpha[k] = (1.0 - kappa[k]) * gamma[k];
        error_const[k] = kappa[k] * gamma[k] + 1.0 / (k as f64 + 1.0);
    }
    Coeffs {
        gamma,
        alpha,
        error_const,
    }
}

/// Weighted RMS norm `sqrt(mean((v_i/scale_i)^2))` — the error measure the
/// tolerances are stated in.
fn rms(v: &DVector<f64>, scale: &DVector<f64>) -> f64 {
    let n = v.len() as f64;
    (v.iter()
        .zip(scale.iter())
        .map(|(a, s)| (a / s) * (a / s))
        .sum::<f64>()
        / n)
        .sqrt()
}

/// Triangular rescaling matrix: changing the step by `factor` maps the
/// backward-difference table of the old grid onto the new one via
/// `D ← (R(factor)·R(1))ᵀ D`. Built as a column-wise cumulative product.
fn compute_r(order: usize, factor: f64) -> DMatrix<f64> {
    let n = order + 1;
    let mut m = DMatrix::zeros(n, n);
    for j in 0..n {
        m[(0, j)] = 1.0;
    }
    for i in 1..n {
        for j in 1..n {
            m[(i, j)] = (i as f64 - 1.0 - factor * j as f64) / i as f64;
        }
    }
    for i in 1..n {
        for j in 0..n {
            let prev = m[(i - 1, j)];
            m[(i, j)] *= prev;
        }
    }
    m
}

fn change_d(d: &mut [DVector<f64>], order: usize, factor: f64) {
    let ru = compute_r(order, factor) * compute_r(order, 1.0);
    let old: Vec<DVector<f64>> = d[..=order].to_vec();
    for (i, slot) in d.iter_mut().enumerate().take(order + 1) {
        let mut acc = DVector::zeros(old[0].len());
        for (j, oj) in old.iter().enumerate() {
            acc.axpy(ru[(j, i)], oj, 1.0);
        }
        *slot = acc;
    }
}

/// Evaluate the interpolating polynomial of the just-completed step at `ts`.
/// Uses the post-update difference table, the order the step was taken at,
/// and the step `h` ending at `t_new`; exact at both step endpoints.
fn interpolate(d: &[DVector<f64>], order: usize, t_new: f64, h: f64, ts: f64) -> DVector<f64> {
    let mut y = d[0].clone();
    let mut p = 1.0;
    for j in 0..order {
        p *= (ts - (t_new - j as f64 * h)) / ((j as f64 + 1.0) * h);
        y.axpy(p, &d[j + 1], 1.0);
    }
    y
}

/// One-sided finite-difference Jacobian. Perturbations are scaled to each
/// state's own magnitude (with `atol/rtol` as the noise floor, the same
/// characteristic size the error control uses). If a perturbed point is not
/// evaluable — a state sitting on a property-table hull edge — the opposite
/// side is tried before giving up.
fn fd_jacobian(
    sys: &mut dyn OdeSystem,
    t: f64,
    y: &DVector<f64>,
    f0: &DVector<f64>,
    atol: &DVector<f64>,
    rtol: f64,
    stats: &mut SolverStats,
) -> Result<DMatrix<f64>> {
    let n = y.len();
    let eps_sqrt = f64::EPSILON.sqrt();
    let mut jac = DMatrix::zeros(n, n);
    let mut yp = y.clone();
    let mut fp = DVector::zeros(n);
    for j in 0..n {
        let base = y[j];
        let mag = base.abs().max(atol[j] / rtol).max(f64::MIN_POSITIVE);
        let mut dx = eps_sqrt * mag * if base < 0.0 { -1.0 } else { 1.0 };
        yp[j] = base + dx;
        stats.n_rhs += 1;
        let mut ok = sys
            .rhs(t, yp.as_slice(), fp.as_mut_slice())
            .is_ok()
            && fp.iter().all(|v| v.is_finite());
        if !ok {
            dx = -dx;
            yp[j] = base + dx;
            stats.n_rhs += 1;
            ok = sys
                .rhs(t, yp.as_slice(), fp.as_mut_slice())
                .is_ok()
                && fp.iter().all(|v| v.is_finite());
        }
        if !ok {
            return Err(Error::SolverAbort {
                t,
                reason: format!("jacobian column {j} not evaluable on either side of the state"),
            });
        }
        for i in 0..n {
            jac[(i, j)] = (fp[i] - f0[i]) / dx;
        }
        yp[j] = base;
    }
    stats.n_jac += 1;
    Ok(jac)
}

struct CorrectorOut {
    converged: bool,
    n_iter: usize,
    y: DVector<f64>,
    d: DVector<f64>,
}

/// Chord iteration for the corrector equation. Divergence detection follows
/// the usual rate heuristic: extrapolate the remaining contraction and bail
/// out early if it cannot reach `tol` within the iteration budget.
#[allow(clippy::too_many_arguments)]
fn solve_corrector(
    sys: &mut dyn OdeSystem,
    t_new: f64,
    y_predict: &DVector<f64>,
    c: f64,
    psi: &DVector<f64>,
    lu: &Lu,
    scale: &DVector<f64>,
    tol: f64,
    stats: &mut SolverStats,
) -> CorrectorOut {
    let n = y_predict.len();
    let mut d = DVector::zeros(n);
    let mut y = y_predict.clone();
    let mut f = DVector::zeros(n);
    let mut dy_norm_old: Option<f64> = None;
    let mut converged = false;
    let mut n_iter = 0;
    for k in 0..NEWTON_MAXITER {
        n_iter = k + 1;
        stats.n_rhs += 1;
        let ok = sys.rhs(t_new, y.as_slice(), f.as_mut_slice()).is_ok()
            && f.iter().all(|v| v.is_finite());
        if !ok {
            break;
        }
        let rhs = &f * c - psi - &d;
        let Some(dy) = lu.solve(&rhs) else { break };
        let dy_norm = rms(&dy, scale);
        let rate = dy_norm_old.map(|prev| dy_norm / prev);
        if let Some(r) = rate {
            let remaining = (NEWTON_MAXITER - k) as i32;
            if r >= 1.0 || r.powi(remaining) / (1.0 - r) * dy_norm > tol {
                break;
            }
        }
        y += &dy;
        d += &dy;
        if dy_norm == 0.0 || rate.is_some_and(|r| r / (1.0 - r) * dy_norm < tol) {
            converged = true;
            break;
        }
        dy_norm_old = Some(dy_norm);
    }
    CorrectorOut {
        converged,
        n_iter,
        y,
        d,
    }
}

/// Starting step from the initial derivative (the classic two-probe rule):
/// small enough that an explicit Euler probe stays within tolerance, then
/// refined with a second derivative estimate.
fn select_initial_step(
    sys: &mut dyn OdeSystem,
    t0: f64,
    y0: &DVector<f64>,
    f0: &DVector<f64>,
    scale: &DVector<f64>,
    stats: &mut SolverStats,
) -> f64 {
    let d0 = rms(y0, scale);
    let d1 = rms(f0, scale);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    let y1 = y0 + f0 * h0;
    let mut f1 = DVector::zeros(y0.len());
    stats.n_rhs += 1;
    let probe_ok = sys.rhs(t0 + h0, y1.as_slice(), f1.as_mut_slice()).is_ok()
        && f1.iter().all(|v| v.is_finite());
    if !probe_ok {
        // probe left the evaluable region — start conservatively instead
        return h0.min(1e-6);
    }
    let d2 = rms(&(&f1 - f0), scale) / h0;
    let h1 = if d1 <= 1e-15 && d2 <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        // first-order start: error ~ h² · max curvature
        (0.01 / d1.max(d2)).sqrt()
    };
    (100.0 * h0).min(h1)
}

/// Integrate `sys` from `(t0, y0)` to `t_end` with adaptive BDF.
///
/// When `sample_dt` is given the returned trajectory holds the states at
/// `t0, t0+dt, t0+2dt, …, t_end`, evaluated from the method's own
/// interpolating polynomial (no extra RHS work); otherwise every accepted
/// step is recorded.
///
/// If the step size collapses to the round-off floor or the step budget is
/// exhausted — both indicate the model is not integrable as posed
/// (discontinuity, blow-up, persistent property failure) — the run stops
/// early and returns the trajectory up to the last accepted step with
/// [`Solution::abort`] set. A hard `Err` is reserved for problems at the
/// starting point itself (bad options, initial state not evaluable), where
/// there is nothing to hand back.
pub fn integrate_bdf(
    sys: &mut dyn OdeSystem,
    t0: f64,
    t_end: f64,
    y0: &[f64],
    opts: &SolverOptions,
    sample_dt: Option<f64>,
) -> Result<Solution> {
    let n = sys.dim();
    if y0.len() != n {
        return Err(Error::config(
            "solver.y0",
            format!("state length {} does not match system dimension {n}", y0.len()),
        ));
    }
    if !(t_end >= t0) {
        return Err(Error::config("solver.t_span", "t_end must be >= t0"));
    }
    if y0.iter().any(|v| !v.is_finite()) {
        return Err(Error::config("solver.y0", "initial state has non-finite entries"));
    }
    if let Some(dt) = sample_dt {
        if !(dt > 0.0) {
            return Err(Error::config("solver.sample_dt", "must be > 0"));
        }
    }
    let atol = DVector::from_vec(opts.atol_vector(n)?);
    let rtol = opts.rtol;
    let max_order = opts.max_order.min(MAX_ORDER);
    let co = coeffs();
    let newton_tol = (10.0 * f64::EPSILON / rtol).max((rtol.sqrt()).min(0.03));
    let span = t_end - t0;

    let mut stats = SolverStats::default();
    let mut y = DVector::from_column_slice(y0);
    let mut t = t0;

    let mut rec_t: Vec<f64> = vec![t0];
    let mut rec_y: Vec<Vec<f64>> = vec![y0.to_vec()];
    let mut next_k: usize = 1;

    if span == 0.0 {
        return Ok(Solution {
            t: rec_t,
            y: rec_y,
            stats,
            abort: None,
        });
    }

    let mut f0 = DVector::zeros(n);
    stats.n_rhs += 1;
    sys.rhs(t0, y.as_slice(), f0.as_mut_slice())?;
    if !f0.iter().all(|v| v.is_finite()) {
        return Err(Error::SolverAbort {
            t: t0,
            reason: "initial derivative is not finite".into(),
        });
    }

    let scale0 = &atol + y.abs() * rtol;
    let mut h_abs = match opts.first_step {
        Some(h) if h > 0.0 => h,
        Some(_) => return Err(Error::config("solver.first_step", "must be > 0")),
        None => select_initial_step(sys, t0, &y, &f0, &scale0, &mut stats),
    }
    .min(opts.max_step)
    .min(span);

    // difference table: D[0] = y, D[1] = h·f, higher rows filled as the
    // order climbs; two spare rows hold the order-raising error estimate
    let mut d: Vec<DVector<f64>> = vec![DVector::zeros(n); MAX_ORDER + 3];
    d[0] = y.clone();
    d[1] = &f0 * h_abs;
    let mut order: usize = 1;
    let mut n_equal_steps: usize = 0;

    let identity = DMatrix::<f64>::identity(n, n);
    let mut jac = fd_jacobian(sys, t0, &y, &f0, &atol, rtol, &mut stats)?;
    let mut lu: Option<Lu> = None;

    let mut abort: Option<AbortRecord> = None;
    'run: while t < t_end {
        if stats.n_steps >= opts.max_steps {
            abort = Some(AbortRecord {
                t,
                reason: format!("step budget {} exhausted", opts.max_steps),
            });
            break 'run;
        }
        // round-off floor: below ~10 ulp of t the grid cannot advance
        let min_step = 10.0 * (t.abs() * f64::EPSILON).max(f64::MIN_POSITIVE);
        if h_abs > opts.max_step {
            change_d(&mut d, order, opts.max_step / h_abs);
            h_abs = opts.max_step;
            n_equal_steps = 0;
            lu = None;
        }

        let mut step_accepted = false;
        let mut cascade: usize = 0;
        // current_jac: whether `jac` was evaluated at this step's predicted
        // point; allows exactly one refresh per step before shrinking h
        let mut current_jac = false;
        let mut t_new = t;
        let mut h = h_abs;
        let mut y_new = y.clone();
        let mut d_corr = DVector::zeros(n);
        let mut safety = 0.9;
        let mut error_norm = 0.0;
        let mut scale = atol.clone();

        while !step_accepted {
            if h_abs < min_step {
                abort = Some(AbortRecord {
                    t,
                    reason: format!(
                        "step size {h_abs:.3e} s fell below the round-off floor {min_step:.3e} s \
                         after {} rejections",
                        cascade
                    ),
                });
                break 'run;
            }
            t_new = t + h_abs;
            if t_new > t_end {
                t_new = t_end;
                change_d(&mut d, order, (t_new - t) / h_abs);
                n_equal_steps = 0;
                lu = None;
            }
            h = t_new - t;
            h_abs = h;

            let mut y_predict = DVector::zeros(n);
            for dj in d.iter().take(order + 1) {
                y_predict += dj;
            }
            scale = &atol + y_predict.abs() * rtol;
            let mut psi = DVector::zeros(n);
            for j in 1..=order {
                psi.axpy(co.gamma[j], &d[j], 1.0);
            }
            psi /= co.alpha[order];

            let c = h / co.alpha[order];
            let mut converged = false;
            let mut n_iter = 0;
            loop {
                if lu.is_none() {
                    stats.n_lu += 1;
                    lu = Some(Lu::new(&identity - &jac * c));
                }
                let out = solve_corrector(
                    sys,
                    t_new,
                    &y_predict,
                    c,
                    &psi,
                    lu.as_ref().unwrap(),
                    &scale,
                    newton_tol,
                    &mut stats,
                );
                if out.converged {
                    converged = true;
                    n_iter = out.n_iter;
                    y_new = out.y;
                    d_corr = out.d;
                    break;
                }
                if current_jac {
                    break;
                }
                // stale-Jacobian failure: rebuild at the predicted point and
                // give the corrector one more chance at the same step
                let mut fp = DVector::zeros(n);
                stats.n_rhs += 1;
                let base_ok = sys
                    .rhs(t_new, y_predict.as_slice(), fp.as_mut_slice())
                    .is_ok()
                    && fp.iter().all(|v| v.is_finite());
                if !base_ok {
                    break;
                }
                match fd_jacobian(sys, t_new, &y_predict, &fp, &atol, rtol, &mut stats) {
                    Ok(j) => jac = j,
                    Err(_) => break,
                }
                current_jac = true;
                lu = None;
            }

            if !converged {
                stats.n_rejected_newton += 1;
                cascade += 1;
                h_abs *= 0.5;
                change_d(&mut d, order, 0.5);
                n_equal_steps = 0;
                lu = None;
                continue;
            }

            // more corrector iterations spent ⇒ less confidence in the step
            safety = 0.9 * (2 * NEWTON_MAXITER + 1) as f64
                / (2 * NEWTON_MAXITER + n_iter) as f64;
            scale = &atol + y_new.abs() * rtol;
            let error = &d_corr * co.error_const[order];
            error_norm = rms(&error, &scale);
            if error_norm > 1.0 {
                stats.n_rejected_error += 1;
                cascade += 1;
                let factor =
                    MIN_FACTOR.max(safety * error_norm.powf(-1.0 / (order as f64 + 1.0)));
                h_abs *= factor;
                change_d(&mut d, order, factor);
                n_equal_steps = 0;
                // the corrector converged, so the factorization is still a
                // serviceable chord matrix — keep it
                continue;
            }
            step_accepted = true;
        }

        stats.n_steps += 1;
        stats.worst_reject_cascade = stats.worst_reject_cascade.max(cascade);
        stats.min_accepted_step = stats.min_accepted_step.min(h_abs);
        stats.max_accepted_step = stats.max_accepted_step.max(h_abs);
        stats.max_order_used = stats.max_order_used.max(order);
        stats.final_order = order;
        n_equal_steps += 1;
        t = t_new;
        y = y_new.clone();

        // fold the correction into the difference table:
        // D^{k+1} ← d − D^{k+1}_old (new top difference), then telescope down
        let d_old_top = d[order + 1].clone();
        d[order + 2] = &d_corr - d_old_top;
        d[order + 1] = d_corr.clone();
        for i in (0..=order).rev() {
            let upper = d[i + 1].clone();
            d[i] += upper;
        }

        // sample before any order/step change rescales the table
        match sample_dt {
            Some(dt) => {
                let tol = 1e-12 * span.max(1.0);
                loop {
                    let ts = t0 + next_k as f64 * dt;
                    if ts > t_new + tol || ts > t_end + tol {
                        break;
                    }
                    let ts_clamped = ts.min(t_new);
                    let yi = interpolate(&d, order, t_new, h, ts_clamped);
                    rec_t.push(ts_clamped);
                    rec_y.push(yi.as_slice().to_vec());
                    next_k += 1;
                }
            }
            None => {
                rec_t.push(t_new);
                rec_y.push(y.as_slice().to_vec());
            }
        }

        if n_equal_steps < order + 1 {
            continue;
        }

        // the step has been constant long enough for the higher/lower-order
        // error estimates read off the difference table to be trustworthy
        let error_m_norm = if order > 1 {
            rms(&(&d[order] * co.error_const[order - 1]), &scale)
        } else {
            f64::INFINITY
        };
        let error_p_norm = if order < max_order {
            rms(&(&d[order + 2] * co.error_const[order + 1]), &scale)
        } else {
            f64::INFINITY
        };
        let norms = [error_m_norm, error_norm, error_p_norm];
        let mut best = 1;
        let mut best_factor = f64::NEG_INFINITY;
        for (i, &en) in norms.iter().enumerate() {
            // en == 0 → factor inf (powf of 0 to a negative exponent)
            let factor = en.powf(-1.0 / (order as f64 + i as f64));
            if factor > best_factor {
                best_factor = factor;
                best = i;
            }
        }
        order = order + best - 1;
        let factor = MAX_FACTOR.min(safety * best_factor);
        h_abs *= factor;
        change_d(&mut d, order, factor);
        n_equal_steps = 0;
        lu = None;
    }

    // make sure the last point reached is on the record: the endpoint when
    // the sample grid does not divide the span, or — on an abort — the last
    // accepted state, which a sample grid coarser than the final steps would
    // otherwise have skipped
    let tol = 1e-12 * span.max(1.0);
    let t_last = if abort.is_some() { t } else { t_end };
    if rec_t.last().is_none_or(|&last| last < t_last - tol) {
        rec_t.push(t_last);
        rec_y.push(y.as_slice().to_vec());
    }

    Ok(Solution {
        t: rec_t,
        y: rec_y,
        stats,
        abort,
    })
}
