//! Muckenhoupt functional of `w_delta` over a lattice of balls, with the case
//! bounds and a refinement-stability check of the sampled supremum.

use rieszlab::weights::{muckenhoupt_scan, MuckenhouptReport, ScanLattice, WeightSpec};
use serde_json::json;

use crate::report::{num, opt, verdict, write_json, Table};
use crate::{CliError, Context};

const KEYS: &[&str] = &["dim", "delta", "p", "centers", "radii", "refine", "stability"];

fn case_table(name: &str, report: &MuckenhouptReport) -> Table {
    let mut t = Table::new(name, &["case", "samples", "max_value", "bound", "violations"]);
    for c in report.summary().cases {
        t.push(vec![
            c.case.label().into(),
            c.samples.to_string(),
            opt(c.max_value),
            opt(c.bound),
            c.violations.to_string(),
        ]);
    }
    t
}

pub fn run(ctx: &mut Context) -> Result<bool, CliError> {
    let cfg = &ctx.config;
    cfg.restrict(KEYS)?;
    let dim: usize = cfg.parse_or("dim", 3)?;
    let delta = cfg.f64_or("delta", 2.0)?;
    let p = cfg.f64_or("p", 2.0)?;
    let standard = ScanLattice::standard();
    let lattice = ScanLattice {
        centers: cfg.f64_list_or("centers", &standard.centers)?,
        radii: cfg.f64_list_or("radii", &standard.radii)?,
    };
    let refine = cfg.bool_or("refine", true)?;
    let stability_tol = cfg.f64_or("stability", 0.05)?;
    let spec = WeightSpec::new(dim, delta)?.with_exponent(p)?;
    spec.require_ap()?;

    let coarse = muckenhoupt_scan(&spec, p, &lattice.centers, &lattice.radii)?;
    std::fs::write(ctx.out.join("muckenhoupt.csv"), coarse.to_csv())?;
    println!("d = {dim}, delta = {delta}, p = {p}: {} balls", coarse.samples.len());
    case_table("cases", &coarse).print();
    let (sup, c, r) = coarse.supremum();
    println!("supremum {} at center {} radius {}", num(sup), num(c), num(r));
    let mut pass = coarse.all_pass();

    let mut refined_summary = None;
    let mut drift = None;
    if refine {
        let fine = lattice.refined();
        let refined = muckenhoupt_scan(&spec, p, &fine.centers, &fine.radii)?;
        std::fs::write(ctx.out.join("muckenhoupt_refined.csv"), refined.to_csv())?;
        let fine_sup = refined.supremum().0;
        let rel = (fine_sup - sup).abs() / sup;
        println!(
            "refined lattice ({} balls): supremum {}, relative change {} (limit {}) {}",
            refined.samples.len(),
            num(fine_sup),
            num(rel),
            num(stability_tol),
            verdict(rel <= stability_tol)
        );
        pass &= refined.all_pass() && sup.is_finite() && rel <= stability_tol;
        refined_summary = Some(refined.summary());
        drift = Some(rel);
    }
    if ctx.json {
        write_json(
            &ctx.out,
            "muckenhoupt",
            &json!({ "summary": coarse.summary(), "refined": refined_summary,
                     "supremum_change": drift, "pass": pass }),
        )?;
    }
    Ok(pass)
}
