//! Run the reference frost/defrost cycle and print a coarse trace.
//!
//! ```text
//! cargo run --release --example frost_cycle
//! ```

use frostsim::system::{run_scenario, PlantModel, Schedule, SimOptions};

fn main() -> frostsim::Result<()> {
    let model = PlantModel::reference_unit();
    let schedule = Schedule::default();
    let opts = SimOptions::default();

    let started = std::time::Instant::now();
    let res = run_scenario(&model, &schedule, &opts)?;
    let wall = started.elapsed();

    println!(
        "{:>6}  {:>9}  {:>9}  {:>7}  {:>8}  {:>8}  {:>8}  {:>7}  {:>7}",
        "t [s]", "p_dis", "p_suc", "SH [K]", "δf [mm]", "Q_in [W]", "W [W]", "x_tail", "u_exv"
    );
    let stride = (res.t.len() / 15).max(1);
    let mut cache = vec![f64::NAN; res.layout.n_outdoor];
    for (k, &t) in res.t.iter().enumerate() {
        if k % stride != 0 && k + 1 != res.t.len() {
            continue;
        }
        let s = res.layout.unpack(&res.y[k]);
        let eval = model.evaluate(&schedule.inputs(t), &s, &mut cache)?;
        let d = &eval.diag;
        let delta_mm = 1e3 * s.outdoor_film.iter().map(|f| f.delta_f).sum::<f64>()
            / s.outdoor_film.len() as f64;
        let x_tail = model
            .table
            .props(s.indoor_p[11], s.indoor_h[11])?
            .x;
        println!(
            "{t:>6.0}  {:>9.0}  {:>9.0}  {:>7.2}  {:>8.4}  {:>8.0}  {:>8.0}  {:>7.3}  {:>7.3}",
            s.discharge.p,
            s.accumulator.p,
            d.superheat,
            delta_mm,
            d.indoor.q_air_total,
            d.compressor_power + d.fan.power,
            x_tail,
            d.exv_opening,
        );
    }
    // a closing snapshot of the indoor coil for post-mortems
    let sf = &res.final_state;
    println!("\nindoor profile at t = {:.1}:", res.t.last().unwrap());
    for i in 0..12 {
        let pr = model.table.props(sf.indoor_p[i], sf.indoor_h[i])?;
        println!(
            "  cv {i:>2}: p = {:>9.0}  h = {:>8.0}  T = {:>6.2}  x = {:>5.3}  T_wall = {:>6.2}",
            sf.indoor_p[i], sf.indoor_h[i], pr.t, pr.x, sf.indoor_t_wall[i]
        );
    }

    println!("\noutdoor profile at t = {:.1}:", res.t.last().unwrap());
    for i in 0..12 {
        let pr = model.table.props(sf.outdoor_p[i], sf.outdoor_h[i])?;
        let f = &sf.outdoor_film[i];
        println!(
            "  cv {i:>2}: p = {:>9.0}  h = {:>8.0}  T = {:>6.2}  x = {:>5.3}  T_wall = {:>6.2}  \
             δf = {:>8.2e}  ρf = {:>6.1}  m_wi = {:>8.2e}  H = {:>9.1}",
            sf.outdoor_p[i], sf.outdoor_h[i], pr.t, pr.x, sf.outdoor_t_wall[i],
            f.delta_f, f.rho_f, f.m_wi, f.h_film
        );
    }
    println!(
        "scalars: p_dis = {:.0}  h_dis = {:.0}  p_acc = {:.0}  h_acc = {:.0}",
        sf.discharge.p, sf.discharge.h, sf.accumulator.p, sf.accumulator.h
    );

    // where is the stiffness? top derivative components just before and
    // after the final sample time
    let t_last = *res.t.last().unwrap();
    for t_probe in [t_last - 1e-6, t_last + 1e-6] {
        let mut cache2 = vec![f64::NAN; res.layout.n_outdoor];
        let eval = model.evaluate(&schedule.inputs(t_probe), sf, &mut cache2)?;
        let mut idx: Vec<usize> = (0..eval.dy.len()).collect();
        idx.sort_by(|&a, &b| eval.dy[b].abs().total_cmp(&eval.dy[a].abs()));
        print!("rhs at t = {t_probe:.6}:");
        for &i in idx.iter().take(5) {
            print!("  {} = {:.3e}", res.layout.name(i), eval.dy[i]);
        }
        println!();
        let d = &eval.diag;
        println!(
            "  σ = {:.4}  SH = {:.2}  u = {:.3}  ṁ_c = {:.5}  ṁ_exv = {:.5}  h_suc = {:.0}  \
             level = {:.3}  fan = {:.3}",
            d.sigma,
            d.superheat,
            d.exv_opening,
            d.m_dot_compressor,
            d.m_dot_exv,
            d.h_suction,
            d.acc_level,
            d.fan.v_dot
        );
    }

    println!(
        "\n{} samples, {} steps ({} rejected), {} Jacobians, wall time {:.2?}",
        res.t.len(),
        res.stats.n_steps,
        res.stats.n_rejected_error + res.stats.n_rejected_newton,
        res.stats.n_jac,
        wall
    );
    if let Some(a) = &res.abort {
        println!("ABORTED at t = {:.3}: {}", a.t, a.reason);
    }
    Ok(())
}
