//! Pseudo-spectral run from a preset initial state; writes the trajectory
//! directory and per-snapshot diagnostics.

use rieszlab::corpus::velocity_corpus;
use rieszlab::ns::{
    boosted_taylor_green_2d, run as integrate, taylor_green_2d, taylor_green_3d, write_trajectory, NoForcing,
    SimConfig,
};
use rieszlab::spectral::{GridSpec, VectorField};
use serde_json::json;

use crate::report::{num, opt, verdict, write_json, Table};
use crate::{CliError, Context};

const KEYS: &[&str] = &[
    "preset",
    "n",
    "dt",
    "horizon",
    "viscosity",
    "snapshot_every",
    "mean",
    "amplitude",
    "max_mode",
    "gamma",
    "dealias",
    "cfl",
    "solution_tolerance",
    "divergence_tolerance",
];

/// Exact solution at time `t`, when the preset has one.
type Exact = Box<dyn Fn(f64) -> VectorField>;

pub fn run(ctx: &mut Context) -> Result<bool, CliError> {
    let cfg = &ctx.config;
    cfg.restrict(KEYS)?;
    let preset = cfg.str_or("preset", "taylor-green").to_string();
    let dim = if preset == "taylor-green-3d" { 3 } else { 2 };
    let n: usize = cfg.parse_or("n", if dim == 3 { 32 } else { 64 })?;
    let grid = GridSpec::periodic_2pi(dim, n)?;
    let mut sim = SimConfig::new(grid, cfg.f64_or("dt", 1e-3)?, cfg.f64_or("horizon", 0.1)?);
    sim.viscosity = cfg.f64_or("viscosity", 1.0)?;
    sim.snapshot_every = cfg.parse_or("snapshot_every", 1)?;
    sim.weight_gamma = cfg.f64_or("gamma", 1.0)?;
    sim.dealias = cfg.bool_or("dealias", true)?;
    sim.cfl_limit = cfg.f64_or("cfl", 0.5)?;
    let sol_tol = cfg.f64_or("solution_tolerance", 1e-6)?;
    let div_tol = cfg.f64_or("divergence_tolerance", 1e-10)?;
    let nu = sim.viscosity;

    let (u0, exact): (VectorField, Option<Exact>) = match preset.as_str() {
        "taylor-green" => {
            (taylor_green_2d(grid, nu, 0.0), Some(Box::new(move |t| taylor_green_2d(grid, nu, t))))
        }
        "boosted-taylor-green" => {
            let m = cfg.f64_list_or("mean", &[1.0, 0.5])?;
            if m.len() != 2 {
                return Err(CliError::Usage("mean takes two comma-separated values".into()));
            }
            let mean = [m[0], m[1]];
            (
                boosted_taylor_green_2d(grid, nu, mean, 0.0),
                Some(Box::new(move |t| boosted_taylor_green_2d(grid, nu, mean, t))),
            )
        }
        "taylor-green-3d" => (taylor_green_3d(grid), None),
        "random" => {
            let amp = cfg.f64_or("amplitude", 1.0)?;
            let u = velocity_corpus(grid, 1, cfg.parse_or("max_mode", 3)?, ctx.seed).remove(0);
            (u.scale(amp / u.max_abs().max(f64::MIN_POSITIVE)), None)
        }
        other => {
            return Err(CliError::Usage(format!(
                "unknown preset {other:?}; expected taylor-green, boosted-taylor-green, taylor-green-3d or random"
            )))
        }
    };

    let traj = integrate(&sim, &u0, &NoForcing)?;
    let dir = ctx.out.join("trajectory");
    let manifest = write_trajectory(&dir, &traj)?;

    let mut table = Table::new("ns_run", &["time", "energy", "solution_error", "momentum_residual"]);
    let mut worst_solution: f64 = 0.0;
    for (k, (t, u)) in traj.u.times().iter().zip(traj.u.snapshots()).enumerate() {
        let err = match &exact {
            Some(f) => Some(u.relative_l2_error(&f(*t))?),
            None => None,
        };
        worst_solution = worst_solution.max(err.unwrap_or(0.0));
        let residual = k.checked_sub(1).and_then(|i| manifest.momentum_residual.get(i).copied());
        table.push(vec![num(*t), num(traj.norms.energy[k]), opt(err), opt(residual)]);
    }
    table.write_csv(&ctx.out)?;

    let energy_monotone = traj.norms.energy.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12));
    let mut pass = traj.norms.max_divergence <= div_tol && energy_monotone;
    println!("preset {preset}, {dim}d n = {n}, {} snapshots -> {}", traj.u.len(), dir.display());
    println!("max divergence {} (limit {}) {}", num(traj.norms.max_divergence), num(div_tol), verdict(traj.norms.max_divergence <= div_tol));
    println!("energy non-increasing {}", verdict(energy_monotone));
    if exact.is_some() {
        pass &= worst_solution <= sol_tol;
        println!("max relative error vs exact {} (limit {}) {}", num(worst_solution), num(sol_tol), verdict(worst_solution <= sol_tol));
    }
    println!("CFL-split steps {}", traj.norms.cfl_substeps);
    if ctx.json {
        write_json(
            &ctx.out,
            "ns_run",
            &json!({ "preset": preset, "snapshots": traj.u.len(), "norms": traj.norms,
                     "max_solution_error": exact.as_ref().map(|_| worst_solution), "pass": pass }),
        )?;
    }
    Ok(pass)
}
