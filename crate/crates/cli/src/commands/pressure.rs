//! Pressure reconstructions on preset data: Riesz against Poisson on every
//! input, against closed forms for Taylor-Green, and against the real-space
//! Green convolution for compactly supported bumps.

use rieszlab::corpus::{scalar_corpus, velocity_corpus};
use rieszlab::ns::{taylor_green_2d, taylor_green_3d, taylor_green_pressure_2d, taylor_green_pressure_3d};
use rieszlab::pressure::{
    gaussian_bump_data, green_convolution_pressure, inner_half_box_mask, poisson_pressure,
    relative_error_up_to_constant, riesz_pressure, CutoffSpec,
};
use rieszlab::spectral::{GridSpec, ScalarField, TensorField, VectorField};
use serde_json::json;

use crate::report::{num, verdict, write_json, Table};
use crate::{CliError, Context};

const KEYS: &[&str] = &[
    "preset",
    "dim",
    "n",
    "length",
    "width",
    "cutoff_plateau",
    "cutoff_support",
    "count",
    "route_tolerance",
    "exact_tolerance",
    "green_tolerance",
];

struct Checks {
    table: Table,
    label: String,
    pass: bool,
}

impl Checks {
    fn record(&mut self, quantity: &str, value: f64, tolerance: f64) {
        let ok = value <= tolerance;
        self.pass &= ok;
        self.table.push(vec![self.label.clone(), quantity.into(), num(value), num(tolerance), verdict(ok)]);
    }
}

fn routes(u: &VectorField, f: &TensorField) -> Result<(ScalarField, ScalarField), CliError> {
    Ok((riesz_pressure(u, f)?, poisson_pressure(u, f)?))
}

pub fn run(ctx: &mut Context) -> Result<bool, CliError> {
    let cfg = &ctx.config;
    cfg.restrict(KEYS)?;
    let preset = cfg.str_or("preset", "taylor-green").to_string();
    let dim: usize = cfg.parse_or("dim", 2)?;
    let route_tol = cfg.f64_or("route_tolerance", 1e-12)?;
    let exact_tol = cfg.f64_or("exact_tolerance", 1e-10)?;
    let green_tol = cfg.f64_or("green_tolerance", 1e-3)?;
    let default_n = match (preset.as_str(), dim) {
        ("gaussian-bump", 2) => 128,
        ("gaussian-bump", _) => 64,
        (_, 2) => 64,
        _ => 32,
    };
    let n: usize = cfg.parse_or("n", default_n)?;
    let mut checks = Checks {
        table: Table::new("pressure_verify", &["case", "quantity", "value", "tolerance", "pass"]),
        label: format!("{preset}-{dim}d-n{n}"),
        pass: true,
    };

    match preset.as_str() {
        "taylor-green" => {
            let grid = GridSpec::periodic_2pi(dim, n)?;
            let (u, exact) = match dim {
                2 => (taylor_green_2d(grid, 1.0, 0.0), taylor_green_pressure_2d(grid, 1.0, 0.0)),
                _ => (taylor_green_3d(grid), taylor_green_pressure_3d(grid)),
            };
            let (p, q) = routes(&u, &TensorField::zeros(grid))?;
            checks.record("riesz_vs_poisson", q.relative_l2_error(&p)?, route_tol);
            checks.record("riesz_vs_exact", p.mean_subtracted().relative_l2_error(&exact)?, exact_tol);
            checks.record("poisson_vs_exact", q.mean_subtracted().relative_l2_error(&exact)?, exact_tol);
        }
        "gaussian-bump" => {
            let grid = GridSpec::new(dim, n, cfg.f64_or("length", 16.0)?)?;
            let (u, f) = gaussian_bump_data(grid, cfg.f64_or("width", 1.0)?)?;
            let cutoff = CutoffSpec::new(cfg.f64_or("cutoff_plateau", 0.5)?, cfg.f64_or("cutoff_support", 1.0)?)?;
            let doubled = CutoffSpec::new(2.0 * cutoff.plateau(), 2.0 * cutoff.support())?;
            let (p, q) = routes(&u, &f)?;
            checks.record("riesz_vs_poisson", q.relative_l2_error(&p)?, route_tol);
            let mask = inner_half_box_mask(&grid);
            let g = green_convolution_pressure(&u, &f, &cutoff)?;
            checks.record("green_vs_riesz", relative_error_up_to_constant(&g, &p, &mask)?, green_tol);
            let g2 = green_convolution_pressure(&u, &f, &doubled)?;
            checks.record("plateau_doubling", relative_error_up_to_constant(&g2, &g, &mask)?, green_tol);
        }
        "zero" => {
            let grid = GridSpec::periodic_2pi(dim, n)?;
            let (u, f) = (VectorField::zeros(grid), TensorField::zeros(grid));
            let (p, q) = routes(&u, &f)?;
            checks.record("riesz_max_abs", p.max_abs(), 0.0);
            checks.record("poisson_max_abs", q.max_abs(), 0.0);
            if dim >= 2 {
                let cutoff = CutoffSpec::new(0.5, 0.75)?;
                checks.record("green_max_abs", green_convolution_pressure(&u, &f, &cutoff)?.max_abs(), 0.0);
            }
        }
        "random" => {
            let grid = GridSpec::new(dim, n, cfg.f64_or("length", 2.0 * std::f64::consts::PI)?)?;
            let count: usize = cfg.parse_or("count", 10)?;
            let us = velocity_corpus(grid, count, 3, ctx.seed);
            let fs = scalar_corpus(grid, count * dim * dim, 3, ctx.seed.wrapping_add(1));
            let mut worst: f64 = 0.0;
            for (k, u) in us.iter().enumerate() {
                let f = TensorField::new(fs[k * dim * dim..(k + 1) * dim * dim].to_vec())?;
                let (p, q) = routes(u, &f)?;
                worst = worst.max(q.relative_l2_error(&p)?);
            }
            checks.record("riesz_vs_poisson_worst", worst, route_tol);
        }
        other => {
            return Err(CliError::Usage(format!(
                "unknown preset {other:?}; expected taylor-green, gaussian-bump, zero or random"
            )))
        }
    }
    checks.table.print();
    checks.table.write_csv(&ctx.out)?;
    if ctx.json {
        write_json(&ctx.out, "pressure_verify", &json!({ "case": checks.label, "pass": checks.pass }))?;
    }
    Ok(checks.pass)
}
