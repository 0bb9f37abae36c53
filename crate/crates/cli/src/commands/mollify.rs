//! Mollified momentum balance on a stored trajectory: the residual with the
//! Riesz pressure, its invariance under constant shifts of the pressure, and
//! the epsilon limit of a manufactured pressure gap.

use std::f64::consts::PI;
use std::path::PathBuf;

use rieszlab::mollification::{epsilon_limit_study, epsilon_table_csv, residual_field, MollifierPair};
use rieszlab::ns::read_trajectory;
use rieszlab::spectral::{ScalarField, TimeSeries};
use serde_json::json;

use crate::report::{num, verdict, write_json, Table};
use crate::{CliError, Context};

const KEYS: &[&str] = &[
    "trajectory",
    "time",
    "time_radius",
    "space_radius",
    "eps",
    "study_time_radius",
    "study_space_radius",
    "perturbation",
    "shift",
    "shift_tolerance",
    "min_order",
];

fn every_other<T: Clone>(s: &TimeSeries<T>) -> Result<TimeSeries<T>, CliError> {
    let snaps: Vec<T> = s.snapshots().iter().step_by(2).cloned().collect();
    Ok(TimeSeries::uniform(2.0 * s.interval(), snaps)?)
}

pub fn run(ctx: &mut Context) -> Result<bool, CliError> {
    let cfg = &ctx.config;
    cfg.restrict(KEYS)?;
    let dir = cfg.raw("trajectory").map(PathBuf::from).unwrap_or_else(|| ctx.out.join("trajectory"));
    if !dir.join("manifest.json").is_file() {
        return Err(CliError::Usage(format!("no trajectory manifest in {} (run ns-run first)", dir.display())));
    }
    let traj = read_trajectory(&dir)?;
    let (u, q, f) = (&traj.u, &traj.q, &traj.forcing);
    let grid = traj.config.grid;
    let times = u.times();
    let mid = times[times.len() / 2];
    let t = cfg.f64_or("time", mid)?;
    let pair = MollifierPair::new(grid.dim(), cfg.f64_or("time_radius", 0.02)?, cfg.f64_or("space_radius", 0.3)?)?;
    let shift = cfg.f64_or("shift", 3.7)?;
    let shift_tol = cfg.f64_or("shift_tolerance", 1e-12)?;
    let min_order = cfg.f64_or("min_order", 1.0)?;

    let mut summary = Table::new("mollify_summary", &["quantity", "value", "threshold", "pass"]);
    let mut pass = true;
    let mut record = |name: &str, value: f64, threshold: f64, ok: bool| {
        pass &= ok;
        summary.push(vec![name.into(), num(value), num(threshold), verdict(ok)]);
    };

    // residual with the Riesz pressure against the time-quadrature floor,
    // estimated from the same quadrature on every other snapshot
    let a = residual_field(u, q, f, &pair, t)?;
    let a_coarse = residual_field(&every_other(u)?, &every_other(q)?, &every_other(f)?, &pair, t)?;
    let floor = a.sub(&a_coarse)?.l2_norm();
    let a_norm = a.l2_norm();
    record("residual_l2", a_norm, floor, a_norm <= floor);

    let shifted = q.map(|p| p.map(|v| v + shift));
    let shift_diff = residual_field(u, &shifted, f, &pair, t)?.sub(&a)?.l2_norm();
    record("constant_shift_change", shift_diff, shift_tol, shift_diff <= shift_tol);

    // manufactured gap q - p = amp (1 + s) sin(k (x_1 + 2 x_2))
    let amp = cfg.f64_or("perturbation", 1.0)?;
    let k = 2.0 * PI / grid.length();
    let perturbed = TimeSeries::uniform(
        u.interval(),
        q.snapshots()
            .iter()
            .zip(times)
            .map(|(p, s)| p.add(&ScalarField::from_fn(grid, |x| amp * (1.0 + s) * (k * (x[0] + 2.0 * x[1])).sin())))
            .collect::<Result<Vec<_>, _>>()?,
    )?;
    let base = MollifierPair::new(
        grid.dim(),
        cfg.f64_or("study_time_radius", 0.04)?,
        cfg.f64_or("study_space_radius", 0.8)?,
    )?;
    let eps = cfg.f64_list_or("eps", &[1.0, 0.5, 0.25, 0.125])?;
    let rows = epsilon_limit_study(u, &perturbed, f, &base, &eps, t)?;
    std::fs::write(ctx.out.join("mollify.csv"), epsilon_table_csv(&rows))?;
    let monotone = rows.windows(2).all(|w| w[1].gap_error < w[0].gap_error);
    let order = rows.iter().filter_map(|r| r.order).fold(f64::INFINITY, f64::min);
    record("gap_error_monotone", if monotone { 1.0 } else { 0.0 }, 1.0, monotone);
    record("min_empirical_order", order, min_order, order >= min_order);

    println!("trajectory {} ({} snapshots), t = {}", dir.display(), u.len(), num(t));
    summary.print();
    summary.write_csv(&ctx.out)?;
    if ctx.json {
        write_json(
            &ctx.out,
            "mollify",
            &json!({ "time": t, "residual_l2": a_norm, "floor": floor, "shift_change": shift_diff,
                     "study": rows, "min_order": order, "pass": pass }),
        )?;
    }
    Ok(pass)
}
