//! Multiplier identities: `R_1 sin = cos` along the first axis, `sum R_j^2 = -I`,
//! skew-adjointness, commutativity and Parseval on a seeded corpus.

use std::f64::consts::PI;

use rieszlab::corpus::scalar_corpus;
use rieszlab::spectral::{riesz_transform, GridSpec, ScalarField, Spectrum};
use serde_json::json;

use crate::report::{num, verdict, write_json, Table};
use crate::{CliError, Context};

const KEYS: &[&str] = &["grids", "length", "count", "max_mode", "tolerance"];

fn parse_grids(spec: &str, length: f64) -> Result<Vec<GridSpec>, CliError> {
    spec.split(',')
        .map(|entry| {
            let (d, n) = entry
                .trim()
                .split_once(':')
                .ok_or_else(|| CliError::Usage(format!("grid entry {entry:?} is not dim:n")))?;
            let d: usize = d.trim().parse().map_err(|_| CliError::Usage(format!("bad dimension in {entry:?}")))?;
            let n: usize = n.trim().parse().map_err(|_| CliError::Usage(format!("bad size in {entry:?}")))?;
            Ok(GridSpec::new(d, n, length)?)
        })
        .collect()
}

fn rel(a: &ScalarField, b: &ScalarField) -> Result<f64, CliError> {
    Ok(a.relative_l2_error(b)?)
}

pub fn run(ctx: &mut Context) -> Result<bool, CliError> {
    let cfg = &ctx.config;
    cfg.restrict(KEYS)?;
    let length = cfg.f64_or("length", 2.0 * PI)?;
    let grids = parse_grids(cfg.str_or("grids", "2:64,3:32"), length)?;
    let count: usize = cfg.parse_or("count", 30)?;
    let max_mode: i64 = cfg.parse_or("max_mode", 4)?;
    let tol = cfg.f64_or("tolerance", 1e-10)?;
    if count < 2 || max_mode < 1 {
        return Err(CliError::Usage("count must be at least 2 and max_mode positive".into()));
    }

    let mut table = Table::new("riesz_check", &["grid", "check", "member", "error", "tolerance", "pass"]);
    let mut all = true;
    let mut worst: f64 = 0.0;
    for grid in &grids {
        let label = format!("{}d-n{}", grid.dim(), grid.n());
        let mut record = |check: &str, member: String, err: f64| {
            let pass = err <= tol;
            all &= pass;
            worst = worst.max(err);
            table.push(vec![label.clone(), check.into(), member, num(err), num(tol), verdict(pass)]);
        };
        let k = 2.0 * PI / grid.length();
        let s = ScalarField::from_fn(*grid, |x| (k * x[0]).sin());
        let c = ScalarField::from_fn(*grid, |x| (k * x[0]).cos());
        record("riesz_sine", "-".into(), rel(&riesz_transform(&s, 0)?, &c)?);

        let corpus = scalar_corpus(*grid, count, max_mode, ctx.seed);
        let (mut sq, mut skew, mut comm, mut pars) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
        for (m, f) in corpus.iter().enumerate() {
            let r: Vec<ScalarField> = (0..grid.dim()).map(|j| riesz_transform(f, j)).collect::<Result<_, _>>()?;
            let mut acc = ScalarField::zeros(*grid);
            for (j, rj) in r.iter().enumerate() {
                acc = acc.add(&riesz_transform(rj, j)?)?;
            }
            sq = sq.max(rel(&acc, &f.scale(-1.0))?);
            let g = &corpus[(m + 1) % count];
            let lhs = r[0].inner(g)?;
            let rhs = -f.inner(&riesz_transform(g, 0)?)?;
            skew = skew.max((lhs - rhs).abs() / (f.l2_norm() * g.l2_norm()));
            let ab = riesz_transform(&r[0], 1)?;
            let ba = riesz_transform(&r[1], 0)?;
            comm = comm.max(rel(&ab, &ba)?);
            let spectral = Spectrum::forward(f).full_energy() * grid.cell_volume() / grid.len() as f64;
            let physical = f.l2_norm().powi(2);
            pars = pars.max((spectral - physical).abs() / physical);
        }
        let members = format!("{count}");
        record("riesz_square_sum", members.clone(), sq);
        record("skew_adjoint", members.clone(), skew);
        record("commute", members.clone(), comm);
        record("parseval", members, pars);
    }
    table.print();
    table.write_csv(&ctx.out)?;
    if ctx.json {
        write_json(
            &ctx.out,
            "riesz_check",
            &json!({ "grids": grids.len(), "count": count, "seed": ctx.seed, "tolerance": tol,
                     "worst_error": worst, "pass": all }),
        )?;
    }
    Ok(all)
}
