//! Space-time mollifiers `alpha_eps (x) beta_eps` and the mollified momentum balance.
//!
//! Mollifying the momentum equation and moving every derivative onto the
//! kernels gives, for a solution `(u, q)`,
//!
//! ```text
//! (alpha (x) beta) * grad q = (-alpha' (x) beta + alpha (x) Lap beta) * u
//!                             + (alpha (x) grad beta) * (-u (x) u + F)
//! ```
//!
//! [`residual_field`] evaluates the right-hand side minus `(alpha (x) grad beta) * q`
//! for a supplied pressure series. Time convolutions use the trapezoid rule
//! over snapshots; space convolutions are spectral.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::pressure::riesz_pressure;
use crate::quadrature::{integrate, Tolerance};
use crate::spectral::{
    gradient, laplacian, GridSpec, ScalarField, Spectrum, TensorField, TimeSeries, VectorField,
};

/// `exp(-1 / (1 - s^2))` on `|s| < 1`, zero elsewhere.
fn bump_profile(s: f64) -> f64 {
    let a = 1.0 - s * s;
    if a <= 0.0 {
        0.0
    } else {
        (-1.0 / a).exp()
    }
}

/// Smooth monotone step: `0` for `t <= 0`, `1` for `t >= 1`.
pub fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    if t >= 1.0 {
        return 1.0;
    }
    let a = (-1.0 / t).exp();
    let b = (-1.0 / (1.0 - t)).exp();
    a / (a + b)
}

fn sphere_area(dim: usize) -> f64 {
    match dim {
        1 => 2.0,
        2 => 2.0 * PI,
        _ => 4.0 * PI,
    }
}

/// Normalised radial bump `c exp(-1 / (1 - |x/rho|^2))` in `R^dim`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MollifierSpec {
    dim: usize,
    radius: f64,
    normalization: f64,
}

/// `standard_bump(dim, rho)`; `dim = 1` gives the time mollifier.
pub fn standard_bump(dim: usize, radius: f64) -> Result<MollifierSpec> {
    if !(1..=3).contains(&dim) {
        return Err(Error::InvalidParameter(format!("mollifier dimension {dim}")));
    }
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::InvalidParameter(format!("mollifier radius {radius}")));
    }
    let tol = Tolerance { relative: 1e-13, absolute: 0.0 };
    let unit_mass =
        sphere_area(dim) * integrate(|s| bump_profile(s) * s.powi(dim as i32 - 1), 0.0, 1.0, tol)?;
    Ok(MollifierSpec { dim, radius, normalization: 1.0 / (unit_mass * radius.powi(dim as i32)) })
}

impl MollifierSpec {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Peak value `beta(0)`.
    pub fn sup(&self) -> f64 {
        self.normalization * (-1.0f64).exp()
    }

    /// `eps^-d beta(x / eps)`, supported in `|x| < eps rho`.
    pub fn scaled(&self, eps: f64) -> Result<Self> {
        standard_bump(self.dim, self.radius * eps)
    }

    pub fn eval_radius(&self, r: f64) -> f64 {
        self.normalization * bump_profile(r / self.radius)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.eval_radius(x.iter().map(|v| v * v).sum::<f64>().sqrt())
    }

    /// Derivative of the one-dimensional profile, `d/dt alpha(t)`.
    pub fn derivative_1d(&self, t: f64) -> f64 {
        let s = t / self.radius;
        let a = 1.0 - s * s;
        if a <= 0.0 {
            return 0.0;
        }
        self.eval_radius(t.abs()) * (-2.0 * s / (a * a)) / self.radius
    }

    /// Kernel samples on the grid offsets (zero displacement at sample 0),
    /// rescaled to unit discrete mass `sum beta h^d = 1`.
    pub fn sample_kernel(&self, grid: &GridSpec) -> Result<ScalarField> {
        if self.dim != grid.dim() {
            return Err(Error::InvalidParameter(format!(
                "{}-dimensional mollifier on a {}-dimensional grid",
                self.dim,
                grid.dim()
            )));
        }
        let half = 0.5 * grid.length();
        if self.radius > half {
            return Err(Error::SupportTooLarge { support: self.radius, allowed: half });
        }
        let mut values: Vec<f64> =
            (0..grid.len()).map(|i| self.eval_radius(grid.offset_radius(i))).collect();
        let mass: f64 = values.iter().sum::<f64>() * grid.cell_volume();
        if mass == 0.0 {
            // support thinner than one cell: the identity kernel
            values[0] = 1.0;
        } else {
            values.iter_mut().for_each(|v| *v /= mass);
        }
        values.iter_mut().for_each(|v| *v *= grid.cell_volume());
        ScalarField::new(*grid, values)
    }

    /// `||beta||_inf * |supp beta|` for the discrete kernel, the constant in
    /// `|f * beta| <= C M f` with `M` the maximal function at radius `rho`.
    pub fn domination_constant(&self, grid: &GridSpec) -> Result<f64> {
        let k = self.sample_kernel(grid)?;
        let count = (0..grid.len()).filter(|&i| grid.offset_radius(i) <= self.radius).count();
        let peak = k.values().iter().fold(0.0, |m: f64, v| m.max(*v));
        Ok(peak * count as f64)
    }
}

/// Spectral multiplier of the discrete kernel.
fn kernel_spectrum(beta: &MollifierSpec, grid: &GridSpec) -> Result<Vec<Complex64>> {
    Ok(Spectrum::forward(&beta.sample_kernel(grid)?).coeffs().to_vec())
}

fn apply_kernel(f: &ScalarField, khat: &[Complex64], symbol: impl Fn(&[f64]) -> Complex64) -> ScalarField {
    let mut spec = Spectrum::forward(f);
    let d = f.grid().dim();
    for (s, (c, k)) in spec.coeffs_mut().iter_mut().zip(khat).enumerate() {
        let xi = f.grid().wavevector(s);
        *c *= k * symbol(&xi[..d]);
    }
    spec.into_field()
}

/// Periodic convolution `f * beta`.
pub fn mollify_space(f: &ScalarField, beta: &MollifierSpec) -> Result<ScalarField> {
    f.check_finite()?;
    let khat = kernel_spectrum(beta, f.grid())?;
    Ok(apply_kernel(f, &khat, |_| Complex64::new(1.0, 0.0)))
}

/// `||Laplacian f||_{L^2}`, summed over components.
pub fn harmonic_residual(f: &ScalarField) -> Result<f64> {
    Ok(laplacian(f)?.l2_norm())
}

pub fn harmonic_residual_vector(v: &VectorField) -> Result<f64> {
    let sq: f64 = v
        .components()
        .iter()
        .map(|c| harmonic_residual(c).map(|r| r * r))
        .sum::<Result<f64>>()?;
    Ok(sq.sqrt())
}

/// Time and space mollifiers at unit scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MollifierPair {
    pub time: MollifierSpec,
    pub space: MollifierSpec,
}

impl MollifierPair {
    pub fn new(dim: usize, time_radius: f64, space_radius: f64) -> Result<Self> {
        Ok(Self { time: standard_bump(1, time_radius)?, space: standard_bump(dim, space_radius)? })
    }

    pub fn scaled(&self, eps: f64) -> Result<Self> {
        Ok(Self { time: self.time.scaled(eps)?, space: self.space.scaled(eps)? })
    }
}

/// Trapezoid weights `w_k alpha(t - s_k)` and `w_k alpha'(t - s_k)` over the
/// snapshots, after checking the admissibility window.
fn time_weights(times: &[f64], alpha: &MollifierSpec, t: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    if times.len() < 2 {
        return Err(Error::InsufficientData("need at least two snapshots".into()));
    }
    let (start, end) = (times[0], times[times.len() - 1]);
    let reach = alpha.radius();
    if !(t - reach > start && t + reach < end) {
        return Err(Error::Inadmissible(format!(
            "time window [{}, {}] leaves ({start}, {end})",
            t - reach,
            t + reach
        )));
    }
    let inside = times.iter().filter(|s| (t - **s).abs() < reach).count();
    if inside < 8 {
        return Err(Error::InsufficientData(format!(
            "{inside} snapshots inside the time mollifier support, need 8"
        )));
    }
    let dt = (end - start) / (times.len() - 1) as f64;
    let mut a = Vec::with_capacity(times.len());
    let mut da = Vec::with_capacity(times.len());
    for &s in times {
        // alpha vanishes at both ends of the window, so the trapezoid end
        // corrections are zero
        a.push(dt * alpha.eval_radius((t - s).abs()));
        da.push(dt * alpha.derivative_1d(t - s));
    }
    Ok((a, da))
}

fn check_series(
    u: &TimeSeries<VectorField>,
    q: &TimeSeries<ScalarField>,
    forcing: &TimeSeries<TensorField>,
) -> Result<()> {
    if u.len() != q.len() || u.len() != forcing.len() {
        return Err(Error::InvalidParameter("series of different lengths".into()));
    }
    if u.times() != q.times() || u.times() != forcing.times() {
        return Err(Error::InvalidParameter("series sampled at different times".into()));
    }
    Ok(())
}

fn weighted_sum<'a>(
    fields: impl Iterator<Item = &'a ScalarField>,
    weights: &[f64],
    grid: GridSpec,
) -> Result<ScalarField> {
    let mut acc = ScalarField::zeros(grid);
    for (f, w) in fields.zip(weights) {
        if *w != 0.0 {
            acc.add_assign_scaled(*w, f)?;
        }
    }
    Ok(acc)
}

/// Mollified momentum balance at time `t` with pressure series `q`:
///
/// ```text
/// A = (-alpha' (x) beta + alpha (x) Lap beta) * u + (alpha (x) grad beta) * (-u (x) u + F)
///     - (alpha (x) grad beta) * q.
/// ```
///
/// With `q` the Riesz pressure of `(u, F)` this is the mollified difference
/// of the true and the Riesz pressure gradients; it vanishes for solutions.
pub fn residual_field(
    u: &TimeSeries<VectorField>,
    q: &TimeSeries<ScalarField>,
    forcing: &TimeSeries<TensorField>,
    mollifiers: &MollifierPair,
    t: f64,
) -> Result<VectorField> {
    check_series(u, q, forcing)?;
    let grid = *u.snapshots()[0].grid();
    let d = grid.dim();
    let (a, da) = time_weights(u.times(), &mollifiers.time, t)?;
    let khat = kernel_spectrum(&mollifiers.space, &grid)?;

    let q_bar = weighted_sum(q.snapshots().iter(), &a, grid)?;
    let mut out = Vec::with_capacity(d);
    for i in 0..d {
        let u_dot = weighted_sum(u.snapshots().iter().map(|s| s.component(i)), &da, grid)?;
        let u_bar = weighted_sum(u.snapshots().iter().map(|s| s.component(i)), &a, grid)?;
        // the -alpha' (x) beta term
        let mut acc = apply_kernel(&u_dot, &khat, |_| Complex64::new(-1.0, 0.0));
        acc = acc.add(&apply_kernel(&u_bar, &khat, |xi| {
            Complex64::new(-xi.iter().map(|v| v * v).sum::<f64>(), 0.0)
        }))?;
        for j in 0..d {
            let mut g_bar = ScalarField::zeros(grid);
            for ((snap, f), w) in u.snapshots().iter().zip(forcing.snapshots()).zip(&a) {
                if *w == 0.0 {
                    continue;
                }
                let g = f.entry(i, j).sub(&snap.component(i).mul(snap.component(j))?)?;
                g_bar.add_assign_scaled(*w, &g)?;
            }
            acc = acc.add(&apply_kernel(&g_bar, &khat, |xi| Complex64::new(0.0, xi[j])))?;
        }
        acc = acc.sub(&apply_kernel(&q_bar, &khat, |xi| Complex64::new(0.0, xi[i])))?;
        out.push(acc);
    }
    VectorField::new(out)
}

/// `(alpha (x) grad beta) * (q - p)` with `p` the Riesz pressure snapshots.
pub fn mollified_pressure_gap(
    u: &TimeSeries<VectorField>,
    q: &TimeSeries<ScalarField>,
    forcing: &TimeSeries<TensorField>,
    mollifiers: &MollifierPair,
    t: f64,
) -> Result<VectorField> {
    check_series(u, q, forcing)?;
    let grid = *u.snapshots()[0].grid();
    let (a, _) = time_weights(u.times(), &mollifiers.time, t)?;
    let khat = kernel_spectrum(&mollifiers.space, &grid)?;
    let mut gap = ScalarField::zeros(grid);
    for (k, w) in a.iter().enumerate() {
        if *w == 0.0 {
            continue;
        }
        let p = riesz_pressure(&u.snapshots()[k], &forcing.snapshots()[k])?;
        gap.add_assign_scaled(*w, &q.snapshots()[k].sub(&p)?)?;
    }
    let comps = (0..grid.dim())
        .map(|i| apply_kernel(&gap, &khat, |xi| Complex64::new(0.0, xi[i])))
        .collect();
    VectorField::new(comps)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EpsilonRow {
    pub eps: f64,
    /// `||A_eps - grad(q - p)(t)||_{L^2}` for the pressure gap.
    pub gap_error: f64,
    /// Observed order against the previous row.
    pub order: Option<f64>,
    /// `||A_eps||_{L^2}` of the mollified momentum balance with pressure `q`.
    pub residual: f64,
}

/// Convergence of the mollified pressure gap to `grad(q - p)(t)` as `eps`
/// decreases. `t` must be a snapshot time.
pub fn epsilon_limit_study(
    u: &TimeSeries<VectorField>,
    q: &TimeSeries<ScalarField>,
    forcing: &TimeSeries<TensorField>,
    base: &MollifierPair,
    eps: &[f64],
    t: f64,
) -> Result<Vec<EpsilonRow>> {
    check_series(u, q, forcing)?;
    if eps.is_empty() || eps.windows(2).any(|w| w[1] >= w[0]) || eps.iter().any(|e| *e <= 0.0) {
        return Err(Error::InvalidParameter("epsilon sequence must be positive and decreasing".into()));
    }
    // below one cell the sampled kernel no longer sees its own profile
    let h = u.snapshots()[0].grid().spacing();
    let finest = base.space.radius() * eps[eps.len() - 1];
    if finest < h {
        return Err(Error::InvalidParameter(format!(
            "finest spatial radius {finest} is below the grid spacing {h}"
        )));
    }
    let interval = u.interval();
    let k = u
        .times()
        .iter()
        .position(|s| (s - t).abs() <= 1e-9 * interval.max(1.0))
        .ok_or_else(|| Error::InvalidParameter(format!("t = {t} is not a snapshot time")))?;
    let p = riesz_pressure(&u.snapshots()[k], &forcing.snapshots()[k])?;
    let target = gradient(&q.snapshots()[k].sub(&p)?)?;

    let rows = eps
        .par_iter()
        .map(|&e| {
            let pair = base.scaled(e)?;
            let gap = mollified_pressure_gap(u, q, forcing, &pair, t)?;
            let residual = residual_field(u, q, forcing, &pair, t)?.l2_norm();
            Ok((e, gap.sub(&target)?.l2_norm(), residual))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out: Vec<EpsilonRow> = Vec::with_capacity(rows.len());
    for (idx, &(e, gap_error, residual)) in rows.iter().enumerate() {
        let order = (idx > 0).then(|| {
            let (e0, g0, _) = rows[idx - 1];
            (g0 / gap_error).ln() / (e0 / e).ln()
        });
        out.push(EpsilonRow { eps: e, gap_error, order, residual });
    }
    Ok(out)
}

/// `eps,gap_error,order,residual` rows; the first order is empty.
pub fn epsilon_table_csv(rows: &[EpsilonRow]) -> String {
    let mut out = String::from("eps,gap_error,order,residual\n");
    for r in rows {
        let order = r.order.map(|o| format!("{o:.6}")).unwrap_or_default();
        out.push_str(&format!("{},{:.12e},{},{:.12e}\n", r.eps, r.gap_error, order, r.residual));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::maximal_function;

    #[test]
    fn bump_mass_support_symmetry() {
        let tol = Tolerance { relative: 1e-13, absolute: 0.0 };
        let b1 = standard_bump(1, 0.3).unwrap();
        let m1 = integrate(|t| b1.eval(&[t]), -0.3, 0.3, tol).unwrap();
        assert!((m1 - 1.0).abs() < 1e-10);
        let b2 = standard_bump(2, 0.7).unwrap();
        let m2 = integrate(|r| 2.0 * PI * r * b2.eval_radius(r), 0.0, 0.7, tol).unwrap();
        assert!((m2 - 1.0).abs() < 1e-10);
        let b3 = standard_bump(3, 1.5).unwrap();
        let m3 = integrate(|r| 4.0 * PI * r * r * b3.eval_radius(r), 0.0, 1.5, tol).unwrap();
        assert!((m3 - 1.0).abs() < 1e-10);
        assert_eq!(b2.eval(&[0.7, 0.0]), 0.0);
        assert_eq!(b2.eval(&[0.3, -0.2]), b2.eval(&[-0.3, 0.2]));
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let a = standard_bump(1, 0.5).unwrap();
        let h = 1e-6;
        for t in [-0.3, -0.1, 0.0, 0.2, 0.45] {
            let fd = (a.eval(&[t + h]) - a.eval(&[t - h])) / (2.0 * h);
            assert!((fd - a.derivative_1d(t)).abs() < 1e-6 * (1.0 + fd.abs()));
        }
    }

    #[test]
    fn smooth_step_limits() {
        assert_eq!(smooth_step(-1.0), 0.0);
        assert_eq!(smooth_step(1.0), 1.0);
        assert!((smooth_step(0.5) - 0.5).abs() < 1e-15);
        let mut prev = 0.0;
        for k in 1..100 {
            let v = smooth_step(k as f64 / 100.0);
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn mollify_constant_and_mean() {
        let grid = GridSpec::periodic_2pi(2, 64).unwrap();
        let beta = standard_bump(2, 0.5).unwrap();
        let c = mollify_space(&ScalarField::constant(grid, 2.5), &beta).unwrap();
        assert!(c.values().iter().all(|v| (v - 2.5).abs() < 1e-12));
        let f = ScalarField::from_fn(grid, |x| (x[0] + 0.3).sin() * (2.0 * x[1]).cos() + 0.7);
        let m = mollify_space(&f, &beta).unwrap();
        assert!((m.mean() - f.mean()).abs() < 1e-12);
    }

    #[test]
    fn mollified_sine_is_damped_by_kernel_coefficient() {
        let grid = GridSpec::periodic_2pi(2, 256).unwrap();
        let beta = standard_bump(2, 0.6).unwrap();
        let f = ScalarField::from_fn(grid, |x| x[0].sin());
        let m = mollify_space(&f, &beta).unwrap();
        // continuous coefficient: int beta(y) cos(y_1) dy in polar coordinates
        let tol = Tolerance { relative: 1e-12, absolute: 1e-15 };
        let coef = integrate(
            |r| {
                r * beta.eval_radius(r)
                    * integrate(|th: f64| (r * th.cos()).cos(), 0.0, 2.0 * PI, tol).unwrap()
            },
            0.0,
            0.6,
            tol,
        )
        .unwrap();
        assert!(coef > 0.0 && coef <= 1.0);
        let e = m.relative_l2_error(&f.scale(coef)).unwrap();
        assert!(e < 1e-6);
    }

    #[test]
    fn domination_by_maximal_function() {
        let grid = GridSpec::new(2, 64, 8.0).unwrap();
        let beta = standard_bump(2, 0.8).unwrap();
        let f = ScalarField::from_fn(grid, |x| (3.0 * x[0]).sin() * (-x[1] * x[1]).exp() - 0.2);
        let m = mollify_space(&f, &beta).unwrap();
        let mf = maximal_function(&f, &[0.8]).unwrap();
        let c = beta.domination_constant(&grid).unwrap();
        for (a, b) in m.values().iter().zip(mf.values()) {
            assert!(a.abs() <= c * b * (1.0 + 1e-12) + 1e-14);
        }
    }

    #[test]
    fn smoothing_does_not_increase_gradient() {
        let grid = GridSpec::periodic_2pi(2, 64).unwrap();
        let beta = standard_bump(2, 0.4).unwrap();
        let f = ScalarField::from_fn(grid, |x| (x[0] + 2.0 * x[1]).sin() + 0.5 * (3.0 * x[0]).cos());
        let m = mollify_space(&f, &beta).unwrap();
        let gf = gradient(&f).unwrap().max_abs();
        let gm = gradient(&m).unwrap().max_abs();
        assert!(gm <= gf * (1.0 + 1e-9));
    }

    #[test]
    fn rejects_oversized_support() {
        let grid = GridSpec::periodic_2pi(2, 16).unwrap();
        let beta = standard_bump(2, 4.0).unwrap();
        assert!(matches!(
            mollify_space(&ScalarField::zeros(grid), &beta),
            Err(Error::SupportTooLarge { .. })
        ));
    }

    #[test]
    fn harmonic_residuals() {
        let grid = GridSpec::periodic_2pi(2, 32).unwrap();
        assert!(harmonic_residual(&ScalarField::constant(grid, 3.0)).unwrap() < 1e-13);
        let s = ScalarField::from_fn(grid, |x| x[0].sin());
        assert!((harmonic_residual(&s).unwrap() - s.l2_norm()).abs() < 1e-12);
    }

    fn zero_series(grid: GridSpec, len: usize) -> (TimeSeries<VectorField>, TimeSeries<ScalarField>, TimeSeries<TensorField>) {
        (
            TimeSeries::uniform(0.01, vec![VectorField::zeros(grid); len]).unwrap(),
            TimeSeries::uniform(0.01, vec![ScalarField::zeros(grid); len]).unwrap(),
            TimeSeries::uniform(0.01, vec![TensorField::zeros(grid); len]).unwrap(),
        )
    }

    #[test]
    fn zero_data_zero_residual_and_window_checks() {
        let grid = GridSpec::periodic_2pi(2, 16).unwrap();
        let (u, q, f) = zero_series(grid, 41);
        let pair = MollifierPair::new(2, 0.1, 0.5).unwrap();
        let a = residual_field(&u, &q, &f, &pair, 0.2).unwrap();
        assert_eq!(a.max_abs(), 0.0);
        assert!(matches!(residual_field(&u, &q, &f, &pair, 0.05), Err(Error::Inadmissible(_))));
        let thin = MollifierPair::new(2, 0.02, 0.5).unwrap();
        assert!(matches!(residual_field(&u, &q, &f, &thin, 0.2), Err(Error::InsufficientData(_))));
    }

    #[test]
    fn manufactured_gap_converges_at_second_order() {
        let grid = GridSpec::periodic_2pi(2, 64).unwrap();
        let len = 201;
        let (u, _, f) = zero_series(grid, len);
        // q - p = cos(t) sin(x_1) with p = 0 for zero data
        let q = TimeSeries::uniform(
            0.01,
            (0..len)
                .map(|k| {
                    let t = 0.01 * k as f64;
                    ScalarField::from_fn(grid, move |x| t.cos() * x[0].sin())
                })
                .collect(),
        )
        .unwrap();
        let base = MollifierPair::new(2, 0.8, 1.6).unwrap();
        let rows = epsilon_limit_study(&u, &q, &f, &base, &[0.5, 0.25, 0.125], 1.0).unwrap();
        for w in rows.windows(2) {
            assert!(w[1].gap_error < w[0].gap_error);
        }
        assert!(rows[2].order.unwrap() > 1.8, "{rows:?}");
        let csv = epsilon_table_csv(&rows);
        assert!(csv.starts_with("eps,gap_error,order,residual\n0.5,"));
    }

    #[test]
    fn study_rejects_sub_cell_kernels() {
        let grid = GridSpec::periodic_2pi(2, 32).unwrap();
        let (u, q, f) = zero_series(grid, 101);
        let base = MollifierPair::new(2, 0.4, 0.8).unwrap();
        let err = epsilon_limit_study(&u, &q, &f, &base, &[1.0, 0.5, 0.125], 0.5);
        assert!(matches!(err, Err(Error::InvalidParameter(_))));
        assert!(epsilon_limit_study(&u, &q, &f, &base, &[1.0, 0.5], 0.5).is_ok());
    }
}
