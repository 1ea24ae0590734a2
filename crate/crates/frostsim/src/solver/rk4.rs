//! Fixed-step classical Runge–Kutta (RK4).
//!
//! No step control, no implicit algebra — which is exactly why it makes a
//! good cross-check for the BDF path: the two share nothing but the
//! right-hand side. The caller owns the stability question; for the film
//! subsystem the fastest time constant is a few milliseconds, so the
//! conventional 1 ms comparison step sits well inside the stability region.

use nalgebra::DVector;

use super::{AbortRecord, OdeSystem, Solution, SolverStats};
use crate::{Error, Result};

/// Integrate with fixed steps of (at most) `dt`, recording on a uniform
/// `sample_dt` grid (linear interpolation inside a step; with `dt` this small
/// the interpolation error is far below the method error). `None` records
/// every step. The actual step is `span/ceil(span/dt)` so the endpoint is hit
/// exactly.
pub fn integrate_rk4(
    sys: &mut dyn OdeSystem,
    t0: f64,
    t_end: f64,
    y0: &[f64],
    dt: f64,
    sample_dt: Option<f64>,
) -> Result<Solution> {
    let n = sys.dim();
    if y0.len() != n {
        return Err(Error::config(
            "solver.y0",
            format!("state length {} does not match system dimension {n}", y0.len()),
        ));
    }
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::config("solver.dt", "must be finite and > 0"));
    }
    if !(t_end >= t0) {
        return Err(Error::config("solver.t_span", "t_end must be >= t0"));
    }
    let span = t_end - t0;
    let mut stats = SolverStats::default();
    stats.final_order = 4;
    stats.max_order_used = 4;

    let mut rec_t = vec![t0];
    let mut rec_y = vec![y0.to_vec()];
    if span == 0.0 {
        return Ok(Solution {
            t: rec_t,
            y: rec_y,
            stats,
            abort: None,
        });
    }

    let n_steps = (span / dt).ceil().max(1.0) as usize;
    let h = span / n_steps as f64;
    stats.min_accepted_step = h;
    stats.max_accepted_step = h;

    let mut y = DVector::from_column_slice(y0);
    let mut k1 = DVector::zeros(n);
    let mut k2 = DVector::zeros(n);
    let mut k3 = DVector::zeros(n);
    let mut k4 = DVector::zeros(n);
    let mut stage = DVector::zeros(n);

    let mut next_k: usize = 1;
    let tol = 1e-12 * span.max(1.0);

    for i in 0..n_steps {
        // reconstruct step times from the index so round-off does not drift
        let t = t0 + i as f64 * h;
        let t_next = if i + 1 == n_steps {
            t_end
        } else {
            t0 + (i + 1) as f64 * h
        };

        stats.n_rhs += 4;
        sys.rhs(t, y.as_slice(), k1.as_mut_slice())?;
        stage.copy_from(&y);
        stage.axpy(0.5 * h, &k1, 1.0);
        sys.rhs(t + 0.5 * h, stage.as_slice(), k2.as_mut_slice())?;
        stage.copy_from(&y);
        stage.axpy(0.5 * h, &k2, 1.0);
        sys.rhs(t + 0.5 * h, stage.as_slice(), k3.as_mut_slice())?;
        stage.copy_from(&y);
        stage.axpy(h, &k3, 1.0);
        sys.rhs(t_next, stage.as_slice(), k4.as_mut_slice())?;

        let y_old = y.clone();
        y.axpy(h / 6.0, &k1, 1.0);
        y.axpy(h / 3.0, &k2, 1.0);
        y.axpy(h / 3.0, &k3, 1.0);
        y.axpy(h / 6.0, &k4, 1.0);
        if !y.iter().all(|v| v.is_finite()) {
            // hand back everything up to the start of the bad step
            if rec_t.last().is_none_or(|&last| last < t - tol) {
                rec_t.push(t);
                rec_y.push(y_old.as_slice().to_vec());
            }
            return Ok(Solution {
                t: rec_t,
                y: rec_y,
                stats,
                abort: Some(AbortRecord {
                    t,
                    reason: "state became non-finite (step too large for the dynamics?)".into(),
                }),
            });
        }
        stats.n_steps += 1;

        match sample_dt {
            Some(sdt) => loop {
                let ts = t0 + next_k as f64 * sdt;
                if ts > t_next + tol || ts > t_end + tol {
                    break;
                }
                let ts_c = ts.min(t_next);
                let theta = (ts_c - t) / h;
                let yi: Vec<f64> = y_old
                    .iter()
                    .zip(y.iter())
                    .map(|(a, b)| a + (b - a) * theta)
                    .collect();
                rec_t.push(ts_c);
                rec_y.push(yi);
                next_k += 1;
            },
            None => {
                rec_t.push(t_next);
                rec_y.push(y.as_slice().to_vec());
            }
        }
    }

    if rec_t.last().is_none_or(|&last| last < t_end - tol) {
        rec_t.push(t_end);
        rec_y.push(y.as_slice().to_vec());
    }

    Ok(Solution {
        t: rec_t,
        y: rec_y,
        stats,
        abort: None,
    })
}

#[cfg(test)]
mod tests {
    use super::super::{integrate_bdf, FnSystem, SolverOptions};
    use super::*;

    #[test]
    fn fourth_order_convergence_on_decay() {
        let err_at = |dt: f64| {
            let mut sys = FnSystem {
                dim: 1,
                f: |_t, y: &[f64], dydt: &mut [f64]| {
                    dydt[0] = -y[0];
                    Ok(())
                },
            };
            let sol = integrate_rk4(&mut sys, 0.0, 1.0, &[1.0], dt, None).unwrap();
            (sol.last().1[0] - (-1.0_f64).exp()).abs()
        };
        let ratio = err_at(0.02) / err_at(0.01);
        assert!(
            (12.0..20.0).contains(&ratio),
            "halving dt gave ratio {ratio}, expected ~16"
        );
    }

    #[test]
    fn oscillator_amplitude_is_preserved() {
        // y'' = -y over 10 periods at 1 ms: 4th-order phase/amplitude error
        // stays tiny; a sign error in the tableau would show immediately
        let mut sys = FnSystem {
            dim: 2,
            f: |_t, y: &[f64], dydt: &mut [f64]| {
                dydt[0] = y[1];
                dydt[1] = -y[0];
                Ok(())
            },
        };
        let t_end = 20.0 * std::f64::consts::PI;
        let sol = integrate_rk4(&mut sys, 0.0, t_end, &[1.0, 0.0], 1e-3, None).unwrap();
        let (_, yf) = sol.last();
        assert!((yf[0] - 1.0).abs() < 1e-9, "cos drift {}", yf[0] - 1.0);
        assert!(yf[1].abs() < 1e-9, "sin drift {}", yf[1]);
    }

    #[test]
    fn samples_land_on_the_requested_grid() {
        let mut sys = FnSystem {
            dim: 1,
            f: |_t, _y: &[f64], dydt: &mut [f64]| {
                dydt[0] = 1.0;
                Ok(())
            },
        };
        let sol = integrate_rk4(&mut sys, 0.0, 1.0, &[0.0], 1e-3, Some(0.25)).unwrap();
        assert_eq!(sol.t.len(), 5);
        for (i, &ti) in sol.t.iter().enumerate() {
            assert!((ti - 0.25 * i as f64).abs() < 1e-12);
            assert!((sol.y[i][0] - ti).abs() < 1e-12);
        }
    }

    #[test]
    fn agrees_with_bdf_on_a_smooth_system() {
        let make = || FnSystem {
            dim: 2,
            f: |t: f64, y: &[f64], dydt: &mut [f64]| {
                dydt[0] = -2.0 * y[0] + y[1] + t.sin();
                dydt[1] = y[0] - 3.0 * y[1];
                Ok(())
            },
        };
        let rk = integrate_rk4(&mut make(), 0.0, 5.0, &[1.0, -0.5], 1e-3, None).unwrap();
        let opts = SolverOptions {
            rtol: 1e-9,
            atol: vec![1e-12],
            ..Default::default()
        };
        let bdf = integrate_bdf(&mut make(), 0.0, 5.0, &[1.0, -0.5], &opts, None).unwrap();
        let (_, a) = rk.last();
        let (_, b) = bdf.last();
        for j in 0..2 {
            assert!(
                (a[j] - b[j]).abs() < 1e-7,
                "component {j}: rk {} vs bdf {}",
                a[j],
                b[j]
            );
        }
    }
}
