//! Exponent table and the grid-level inequality suites: Hoelder product
//! bound, sum-space embedding, Gagliardo-Nirenberg homogeneity and polynomial
//! growth in the weighted `L^sigma` space.

use num_rational::Rational64;
use rieszlab::corpus::{scalar_corpus, velocity_corpus};
use rieszlab::inequality::{
    exponent_relations, gagliardo_nirenberg_ratio, holder_product_check, polynomial_norm_growth,
    select_sigma_eta, solve_exponents, sum_space_embedding_check, to_f64, upper_exponent, velocity_gradient,
    Monomial,
};
use rieszlab::spectral::GridSpec;
use rieszlab::weights::WeightSpec;
use serde_json::json;

use crate::report::{num, opt, verdict, write_json, Table};
use crate::{CliError, Context};

const KEYS: &[&str] = &[
    "dim",
    "gamma",
    "r",
    "check_r",
    "count",
    "n",
    "length",
    "max_mode",
    "monomial",
    "growth_levels",
    "growth_tolerance",
    "gn_scale",
    "gn_tolerance",
];

fn parse_monomial(s: &str, dim: usize) -> Result<Monomial, CliError> {
    let powers: Vec<u32> = s
        .split(',')
        .map(|p| p.trim().parse().map_err(|_| CliError::Usage(format!("bad monomial {s:?}"))))
        .collect::<Result<_, _>>()?;
    if powers.len() != dim {
        return Err(CliError::Usage(format!("monomial needs {dim} exponents, got {s:?}")));
    }
    let mut p = [0; 3];
    p[..dim].copy_from_slice(&powers);
    Ok(Monomial::new(p))
}

pub fn run(ctx: &mut Context) -> Result<bool, CliError> {
    let cfg = &ctx.config;
    cfg.restrict(KEYS)?;
    let d: i64 = cfg.parse_or("dim", 3)?;
    let gamma = cfg.rational_or("gamma", Rational64::from_integer(2))?;
    let se = select_sigma_eta(d, gamma)?;
    let check_r = cfg.rational_or("check_r", (Rational64::from_integer(1) + upper_exponent(d, gamma)) / 2)?;
    let mut rs = cfg.rational_list("r")?.unwrap_or_else(|| vec![Rational64::new(d, d - 1)]);
    if !rs.contains(&check_r) {
        rs.push(check_r);
    }

    let mut exps = Table::new("exponents", &["d", "gamma", "r", "a", "b", "sigma", "eta", "admissible"]);
    for &r in &rs {
        let (a, b) = exponent_relations(d, r)?;
        let admissible = solve_exponents(d, gamma, r).is_ok();
        exps.push(vec![
            d.to_string(),
            gamma.to_string(),
            r.to_string(),
            a.to_string(),
            b.to_string(),
            se.sigma.to_string(),
            se.eta.to_string(),
            admissible.to_string(),
        ]);
    }
    exps.print();
    exps.write_csv(&ctx.out)?;
    let set = solve_exponents(d, gamma, check_r)?;
    let mut pass = true;

    // Hoelder and sum-space checks over the corpus
    let dim = d as usize;
    let count: usize = cfg.parse_or("count", 100)?;
    let n: usize = cfg.parse_or("n", if dim == 2 { 32 } else { 16 })?;
    let grid = GridSpec::new(dim, n, cfg.f64_or("length", 12.0)?)?;
    let max_mode: i64 = cfg.parse_or("max_mode", 3)?;
    let spec = WeightSpec::new(dim, to_f64(gamma))?;
    let fields = scalar_corpus(grid, 2 * count, max_mode, ctx.seed);
    let mut ineq = Table::new(
        "inequalities",
        &["member", "holder_lhs", "holder_rhs", "holder_pass", "sum_lhs", "sum_rhs", "sum_pass"],
    );
    let mut violations = 0;
    for k in 0..count {
        let (f, g) = (&fields[2 * k], &fields[2 * k + 1]);
        let h = holder_product_check(f, g, &spec, to_f64(set.r), to_f64(set.b))?;
        let s = sum_space_embedding_check(f, g, &set)?;
        violations += usize::from(!h.pass) + usize::from(!s.pass);
        ineq.push(vec![k.to_string(), num(h.lhs), num(h.rhs), verdict(h.pass), num(s.lhs), num(s.rhs), verdict(s.pass)]);
    }
    ineq.write_csv(&ctx.out)?;
    pass &= violations == 0;
    println!("check exponents r = {}, a = {}, b = {}: {count} members, {violations} violations", set.r, set.a, set.b);

    // Gagliardo-Nirenberg ratio under rescaling u -> c u
    let c = cfg.f64_or("gn_scale", 7.3)?;
    let gn_tol = cfg.f64_or("gn_tolerance", 1e-10)?;
    let mut gn = Table::new("gagliardo_nirenberg", &["member", "ratio", "scaled_ratio", "relative_change", "pass"]);
    let mut gn_worst: f64 = 0.0;
    for (k, u) in velocity_corpus(grid, count.clamp(1, 10), max_mode, ctx.seed).iter().enumerate() {
        let grad = velocity_gradient(u)?;
        let a = gagliardo_nirenberg_ratio(u, &grad, &spec, to_f64(set.b))?;
        let b = gagliardo_nirenberg_ratio(&u.scale(c), &grad.scale(c), &spec, to_f64(set.b))?;
        let rel = (a - b).abs() / a;
        gn_worst = gn_worst.max(rel);
        gn.push(vec![k.to_string(), num(a), num(b), num(rel), verdict(rel <= gn_tol)]);
    }
    gn.write_csv(&ctx.out)?;
    pass &= gn_worst <= gn_tol;
    println!("GN ratio scale invariance: worst relative change {} (limit {}) {}", num(gn_worst), num(gn_tol), verdict(gn_worst <= gn_tol));

    // growth of int_{|x| < R} |P|^sigma w_{sigma eta}
    let default_monomial = if dim == 2 { "1,0" } else { "1,0,0" };
    let poly = parse_monomial(cfg.str_or("monomial", default_monomial), dim)?;
    let levels: i32 = cfg.parse_or("growth_levels", 14)?;
    let radii: Vec<f64> = (0..=levels).map(|k| 2f64.powi(k)).collect();
    let growth_tol = cfg.f64_or("growth_tolerance", 0.1)?;
    let rows = polynomial_norm_growth(poly, dim, to_f64(se.sigma), to_f64(se.eta), &radii)?;
    let mut growth = Table::new("growth", &["radius", "integral", "ratio", "predicted"]);
    for r in &rows {
        growth.push(vec![num(r.radius), num(r.integral), opt(r.ratio), num(r.predicted)]);
    }
    growth.write_csv(&ctx.out)?;
    let increasing = rows.windows(2).all(|w| w[1].integral > w[0].integral);
    let last = rows.last().expect("non-empty radii");
    let growth_err = last.ratio.map_or(f64::INFINITY, |r| (r / last.predicted - 1.0).abs());
    pass &= increasing && growth_err <= growth_tol;
    println!(
        "growth of {:?}: final doubling ratio {} vs 2^(sigma k + d - sigma eta) = {}, relative gap {} (limit {}) {}",
        poly.powers[..dim].to_vec(),
        opt(last.ratio),
        num(last.predicted),
        num(growth_err),
        num(growth_tol),
        verdict(increasing && growth_err <= growth_tol)
    );
    if ctx.json {
        write_json(
            &ctx.out,
            "estimates",
            &json!({ "check_exponents": set, "violations": violations, "gn_worst": gn_worst,
                     "growth_relative_gap": growth_err, "pass": pass }),
        )?;
    }
    Ok(pass)
}
