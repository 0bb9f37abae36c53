//! Exponent bookkeeping and grid-level checks of the functional inequalities
//! behind the pressure estimates.
//!
//! Exponents are exact rationals so the relations `2/a + d/r = d`,
//! `1/r = 1/2 + 1/b` and the midpoint choices of `sigma`, `eta` hold exactly.

use std::f64::consts::PI;

use num_rational::Rational64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::{integrate, Tolerance};
use crate::spectral::{gradient, ScalarField, TensorField, VectorField};
use crate::weights::{weighted_norm, WeightSpec};

/// Minimum slack demanded of every strict inequality.
pub const STRICT_SLACK: f64 = 1e-9;

/// Relative slack of the quadrature-level inequality checks.
pub const CHECK_SLACK: f64 = 1e-9;

pub fn to_f64(q: Rational64) -> f64 {
    *q.numer() as f64 / *q.denom() as f64
}

/// Parses `"3/2"`, `"1.6"`, `"2"` or `"-0.25"` into an exact rational.
pub fn parse_exact(s: &str) -> Result<Rational64> {
    let s = s.trim();
    let bad = || Error::InvalidParameter(format!("not an exact rational: {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: i64 = n.trim().parse().map_err(|_| bad())?;
        let d: i64 = d.trim().parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(bad());
        }
        return Ok(Rational64::new(n, d));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) || frac.len() > 15 {
        return Err(bad());
    }
    let scale = 10i64.pow(frac.len() as u32);
    let whole: i64 = if int.is_empty() { 0 } else { int.parse().map_err(|_| bad())? };
    let part: i64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
    let value = Rational64::new(whole * scale + part, scale);
    Ok(if neg { -value } else { value })
}

fn rat(n: i64) -> Rational64 {
    Rational64::from_integer(n)
}

fn check_dim_gamma(d: i64, gamma: Rational64) -> Result<()> {
    if !(2..=3).contains(&d) {
        return Err(Error::InvalidParameter(format!("dimension {d}")));
    }
    if !(gamma > rat(0) && gamma < rat(d)) {
        return Err(Error::Inadmissible(format!("gamma = {gamma} outside (0, {d})")));
    }
    Ok(())
}

fn strictly_less(a: Rational64, b: Rational64) -> bool {
    to_f64(b) - to_f64(a) >= STRICT_SLACK && a < b
}

/// `min{d/(d-1), d/gamma}`, the upper end of the range of `r` and `sigma`.
pub fn upper_exponent(d: i64, gamma: Rational64) -> Rational64 {
    let a = Rational64::new(d, d - 1);
    let b = rat(d) / gamma;
    a.min(b)
}

/// `a = 2 / (d - d/r)` and `b = 1 / (1/r - 1/2)` for `1 < r <= d/(d-1)`.
pub fn exponent_relations(d: i64, r: Rational64) -> Result<(Rational64, Rational64)> {
    if !(2..=3).contains(&d) {
        return Err(Error::InvalidParameter(format!("dimension {d}")));
    }
    if !(r > rat(1) && r <= Rational64::new(d, d - 1)) {
        return Err(Error::Inadmissible(format!("r = {r} outside (1, {}]", Rational64::new(d, d - 1))));
    }
    let a = rat(2) / (rat(d) - rat(d) / r);
    let b = (r.recip() - Rational64::new(1, 2)).recip();
    Ok((a, b))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SigmaEta {
    #[serde(serialize_with = "ser_rational")]
    pub sigma: Rational64,
    #[serde(serialize_with = "ser_rational")]
    pub eta: Rational64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ExponentSet {
    pub d: i64,
    #[serde(serialize_with = "ser_rational")]
    pub gamma: Rational64,
    #[serde(serialize_with = "ser_rational")]
    pub r: Rational64,
    #[serde(serialize_with = "ser_rational")]
    pub a: Rational64,
    #[serde(serialize_with = "ser_rational")]
    pub b: Rational64,
    #[serde(serialize_with = "ser_rational")]
    pub sigma: Rational64,
    #[serde(serialize_with = "ser_rational")]
    pub eta: Rational64,
}

fn ser_rational<S: serde::Serializer>(q: &Rational64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&q.to_string())
}

/// Admissible `(a, b)` for `1 < r < min{d/(d-1), d/gamma}`, together with the
/// midpoint `sigma`, `eta`; every defining relation is re-checked.
pub fn solve_exponents(d: i64, gamma: Rational64, r: Rational64) -> Result<ExponentSet> {
    check_dim_gamma(d, gamma)?;
    let upper = upper_exponent(d, gamma);
    if !(strictly_less(rat(1), r) && strictly_less(r, upper)) {
        return Err(Error::Inadmissible(format!("r = {r} outside (1, {upper})")));
    }
    let (a, b) = exponent_relations(d, r)?;
    let se = select_sigma_eta(d, gamma)?;
    let set = ExponentSet { d, gamma, r, a, b, sigma: se.sigma, eta: se.eta };
    set.verify()?;
    Ok(set)
}

/// `sigma` = midpoint of `(1, min{d/(d-1), d/gamma})`, `eta` = midpoint of
/// `(max{gamma, d(2 - sigma)/(2 sigma) + gamma/2}, d/sigma)`.
pub fn select_sigma_eta(d: i64, gamma: Rational64) -> Result<SigmaEta> {
    check_dim_gamma(d, gamma)?;
    // r -> 1+ limit of d(2-r)/(2r) + gamma/2 must stay below d
    let limit = Rational64::new(d, 2) + gamma / 2;
    if !(limit < rat(d)) {
        return Err(Error::Inadmissible(format!("d/2 + gamma/2 = {limit} is not below {d}")));
    }
    let sigma = (rat(1) + upper_exponent(d, gamma)) / 2;
    let lower = eta_lower(d, gamma, sigma);
    let upper = rat(d) / sigma;
    assert!(
        strictly_less(lower, upper),
        "empty eta interval ({lower}, {upper}) for d = {d}, gamma = {gamma}"
    );
    Ok(SigmaEta { sigma, eta: (lower + upper) / 2 })
}

fn eta_lower(d: i64, gamma: Rational64, sigma: Rational64) -> Rational64 {
    let t = rat(d) * (rat(2) - sigma) / (rat(2) * sigma) + gamma / 2;
    gamma.max(t)
}

impl ExponentSet {
    /// Checks every relation and strict inequality of the set.
    pub fn verify(&self) -> Result<()> {
        let d = rat(self.d);
        let fail = |what: &str| Err(Error::Inadmissible(format!("{what} fails for {self:?}")));
        if rat(2) / self.a + d / self.r != d {
            return fail("2/a + d/r = d");
        }
        if self.r.recip() != Rational64::new(1, 2) + self.b.recip() {
            return fail("1/r = 1/2 + 1/b");
        }
        let upper = upper_exponent(self.d, self.gamma);
        if !(strictly_less(rat(1), self.r) && strictly_less(self.r, upper)) {
            return fail("1 < r < min{d/(d-1), d/gamma}");
        }
        let gap = d - d / self.r;
        if !(strictly_less(rat(0), gap) && strictly_less(gap, rat(1))) {
            return fail("0 < d - d/r < 1");
        }
        if !(strictly_less(rat(1), self.sigma) && strictly_less(self.sigma, upper)) {
            return fail("1 < sigma < min{d/(d-1), d/gamma}");
        }
        let lower = eta_lower(self.d, self.gamma, self.sigma);
        if !(strictly_less(lower, self.eta)
            && strictly_less(self.eta, d / self.sigma)
            && strictly_less(d / self.sigma, d))
        {
            return fail("max{gamma, d(2-sigma)/(2 sigma) + gamma/2} < eta < d/sigma < d");
        }
        Ok(())
    }
}

/// `(eta - gamma/2) * 2 sigma / (2 - sigma)`, which must exceed `d` for the
/// weight in the sum-space bound to be integrable.
pub fn sum_space_exponent(gamma: Rational64, sigma: Rational64, eta: Rational64) -> Rational64 {
    (eta - gamma / 2) * (rat(2) * sigma / (rat(2) - sigma))
}

/// Tensor with entry `(i, j) = d_j u_i`.
pub fn velocity_gradient(u: &VectorField) -> Result<TensorField> {
    let mut comps = Vec::with_capacity(u.dim() * u.dim());
    for c in u.components() {
        comps.extend(gradient(c)?.into_components());
    }
    TensorField::new(comps)
}

/// `||sqrt(w) f||_{L^s}` for a pointwise magnitude, i.e. the `L^s` norm with
/// weight `w_gamma^(s/2)`.
fn sqrt_weighted<F: crate::weights::Magnitude>(f: &F, s: f64, gamma: f64, dim: usize) -> Result<f64> {
    weighted_norm(f, s, &WeightSpec::new(dim, gamma * s / 2.0)?)
}

/// `||sqrt(w) u||_{L^b} / ((||sqrt(w) u||_2 + ||sqrt(w) grad u||_2)^theta ||sqrt(w) u||_2^(1-theta))`
/// with `theta = d/2 - d/b`.
pub fn gagliardo_nirenberg_ratio(
    u: &VectorField,
    grad_u: &TensorField,
    spec: &WeightSpec,
    b: f64,
) -> Result<f64> {
    if u.grid() != grad_u.grid() || grad_u.dim() != u.dim() {
        return Err(Error::GridMismatch);
    }
    let d = u.dim() as f64;
    let theta = d / 2.0 - d / b;
    if !(b >= 2.0 && (0.0..=1.0).contains(&theta)) {
        return Err(Error::InvalidParameter(format!("interpolation exponent b = {b}")));
    }
    let gamma = spec.gamma();
    let l2 = sqrt_weighted(u, 2.0, gamma, u.dim())?;
    let grad_sq: f64 = grad_u
        .components()
        .iter()
        .map(|c| sqrt_weighted(c, 2.0, gamma, u.dim()).map(|v| v * v))
        .sum::<Result<f64>>()?;
    let lb = sqrt_weighted(u, b, gamma, u.dim())?;
    let denom = (l2 + grad_sq.sqrt()).powf(theta) * l2.powf(1.0 - theta);
    if denom == 0.0 {
        return Err(Error::ZeroNorm(0));
    }
    Ok(lb / denom)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InequalityCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

impl InequalityCheck {
    fn new(lhs: f64, rhs: f64) -> Self {
        Self { lhs, rhs, pass: lhs <= rhs * (1.0 + CHECK_SLACK) }
    }
}

/// `||u_i u_j||_{L^r_{w_{r gamma}}} <= ||sqrt(w) u_i||_{L^2} ||sqrt(w) u_j||_{L^b}`.
pub fn holder_product_check(
    ui: &ScalarField,
    uj: &ScalarField,
    spec: &WeightSpec,
    r: f64,
    b: f64,
) -> Result<InequalityCheck> {
    if ((1.0 / r) - (0.5 + 1.0 / b)).abs() > 1e-12 {
        return Err(Error::InvalidParameter(format!("1/r = 1/2 + 1/b violated by r = {r}, b = {b}")));
    }
    let d = ui.grid().dim();
    let gamma = spec.gamma();
    let lhs = weighted_norm(&ui.mul(uj)?, r, &WeightSpec::new(d, r * gamma)?)?;
    let rhs = sqrt_weighted(ui, 2.0, gamma, d)? * sqrt_weighted(uj, b, gamma, d)?;
    Ok(InequalityCheck::new(lhs, rhs))
}

/// Partner of `uj` that attains equality in [`holder_product_check`]:
/// `|sqrt(w) u_i|^2 = |sqrt(w) u_j|^b`.
pub fn holder_extremal_partner(uj: &ScalarField, spec: &WeightSpec, b: f64) -> Result<ScalarField> {
    let grid = *uj.grid();
    let w = spec.sample(&grid)?;
    let values = uj
        .values()
        .iter()
        .zip(&w)
        .map(|(v, w)| (w.sqrt() * v.abs()).powf(b / 2.0) / w.sqrt())
        .collect();
    ScalarField::new(grid, values)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SumSpaceCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub exponent: f64,
    pub pass: bool,
}

/// `int |g|^s w_{s eta} <= (int (|g|^s w_{s gamma/2})^{2/s})^{s/2}
///  (int (1+|x|)^{-(s eta - s gamma/2) 2/(2-s)})^{1-s/2}` with `s = sigma`, `g = g1 + g2`.
pub fn sum_space_embedding_check(
    g1: &ScalarField,
    g2: &ScalarField,
    exps: &ExponentSet,
) -> Result<SumSpaceCheck> {
    let exponent = sum_space_exponent(exps.gamma, exps.sigma, exps.eta);
    if !(exponent > rat(exps.d)) {
        return Err(Error::Inadmissible(format!(
            "(eta - gamma/2) 2 sigma/(2 - sigma) = {exponent} does not exceed d = {}",
            exps.d
        )));
    }
    let g = g1.add(g2)?;
    g.check_finite()?;
    let grid = *g.grid();
    let (s, eta, gamma) = (to_f64(exps.sigma), to_f64(exps.eta), to_f64(exps.gamma));
    let hd = grid.cell_volume();
    let (mut lhs, mut first, mut second) = (0.0, 0.0, 0.0);
    for (i, v) in g.values().iter().enumerate() {
        let base = 1.0 + grid.radius(i);
        let gs = v.abs().powf(s);
        lhs += gs * base.powf(-s * eta);
        first += (gs * base.powf(-s * gamma / 2.0)).powf(2.0 / s);
        second += base.powf(-(s * eta - s * gamma / 2.0) * 2.0 / (2.0 - s));
    }
    let lhs = lhs * hd;
    let rhs = (first * hd).powf(s / 2.0) * (second * hd).powf(1.0 - s / 2.0);
    Ok(SumSpaceCheck { lhs, rhs, exponent: to_f64(exponent), pass: lhs <= rhs * (1.0 + CHECK_SLACK) })
}

/// Monomial `x_1^p1 x_2^p2 x_3^p3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Monomial {
    pub powers: [u32; 3],
}

impl Monomial {
    pub fn new(powers: [u32; 3]) -> Self {
        Self { powers }
    }

    pub fn degree(&self) -> u32 {
        self.powers.iter().sum()
    }

    /// `|w^alpha|^s` on the unit sphere.
    fn angular(&self, omega: [f64; 3], s: f64) -> f64 {
        omega
            .iter()
            .zip(self.powers)
            .map(|(o, p)| o.abs().powi(p as i32))
            .product::<f64>()
            .powf(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrowthRow {
    pub radius: f64,
    pub integral: f64,
    /// Ratio to the previous row.
    pub ratio: Option<f64>,
    /// `2^(sigma k + d - sigma eta)`.
    pub predicted: f64,
}

/// `int_{|x| <= R} |P|^sigma w_{sigma eta}` along a radius sequence.
///
/// The integrand separates into `rho^(sigma k + d - 1) (1 + rho)^(-sigma eta)`
/// times an angular factor; both are integrated by adaptive quadrature.
pub fn polynomial_norm_growth(
    poly: Monomial,
    dim: usize,
    sigma: f64,
    eta: f64,
    radii: &[f64],
) -> Result<Vec<GrowthRow>> {
    let k = poly.degree();
    if k == 0 {
        return Err(Error::InvalidParameter("constant polynomials are excluded".into()));
    }
    if !(2..=3).contains(&dim) || poly.powers[dim..].iter().any(|p| *p != 0) {
        return Err(Error::InvalidParameter(format!("monomial {poly:?} in dimension {dim}")));
    }
    if !(sigma * eta < dim as f64) {
        return Err(Error::Inadmissible(format!("sigma eta = {} is not below d", sigma * eta)));
    }
    if radii.is_empty() || radii.windows(2).any(|w| w[1] <= w[0]) || radii[0] <= 0.0 {
        return Err(Error::InvalidParameter("radii must be positive and increasing".into()));
    }
    let tol = Tolerance { relative: 1e-11, absolute: 0.0 };
    let angular = match dim {
        2 => integrate(|t: f64| poly.angular([t.cos(), t.sin(), 0.0], sigma), 0.0, 2.0 * PI, tol)?,
        _ => integrate(
            |th: f64| {
                th.sin()
                    * integrate(
                        |ph: f64| poly.angular([th.sin() * ph.cos(), th.sin() * ph.sin(), th.cos()], sigma),
                        0.0,
                        2.0 * PI,
                        tol,
                    )
                    .unwrap_or(f64::NAN)
            },
            0.0,
            PI,
            tol,
        )?,
    };
    let power = sigma * k as f64 + dim as f64 - 1.0;
    let radial = |rho: f64| rho.powf(power) * (1.0 + rho).powf(-sigma * eta);
    let predicted = 2f64.powf(sigma * k as f64 + dim as f64 - sigma * eta);
    let mut rows: Vec<GrowthRow> = Vec::with_capacity(radii.len());
    let mut cumulative = 0.0;
    let mut prev_r = 0.0;
    for &r in radii {
        cumulative += integrate(radial, prev_r, r, tol)?;
        prev_r = r;
        let integral = angular * cumulative;
        let ratio = rows.last().map(|p| integral / p.integral);
        rows.push(GrowthRow { radius: r, integral, ratio, predicted });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Rational64 {
        parse_exact(s).unwrap()
    }

    #[test]
    fn parsing() {
        assert_eq!(q("3/2"), Rational64::new(3, 2));
        assert_eq!(q("1.6"), Rational64::new(8, 5));
        assert_eq!(q("2"), rat(2));
        assert_eq!(q("-0.25"), Rational64::new(-1, 4));
        assert!(parse_exact("1e3").is_err());
        assert!(parse_exact("1/0").is_err());
        assert!(parse_exact(".").is_err());
    }

    #[test]
    fn relation_examples() {
        assert_eq!(exponent_relations(3, q("3/2")).unwrap(), (rat(2), rat(6)));
        assert_eq!(exponent_relations(2, q("4/3")).unwrap(), (rat(4), rat(4)));
        let set = solve_exponents(2, rat(1), q("4/3")).unwrap();
        assert_eq!((set.a, set.b), (rat(4), rat(4)));
        assert!(matches!(solve_exponents(3, rat(2), q("1.6")), Err(Error::Inadmissible(_))));
        // the boundary r = d/(d-1) is excluded from the admissible range
        assert!(solve_exponents(3, rat(1), q("3/2")).is_err());
        let inner = solve_exponents(3, rat(1), q("6/5")).unwrap();
        assert_eq!(inner.a, rat(4));
        assert_eq!(inner.b, rat(3));
    }

    #[test]
    fn sigma_eta_examples() {
        let a = select_sigma_eta(3, rat(2)).unwrap();
        assert_eq!((a.sigma, a.eta), (Rational64::new(5, 4), Rational64::new(11, 5)));
        let b = select_sigma_eta(2, rat(1)).unwrap();
        assert_eq!((b.sigma, b.eta), (Rational64::new(3, 2), Rational64::new(7, 6)));
        assert_eq!(sum_space_exponent(rat(2), a.sigma, a.eta), rat(4));
        assert!(select_sigma_eta(3, rat(3)).is_err());
    }

    #[test]
    fn gn_ratio_homogeneous() {
        let grid = crate::spectral::GridSpec::new(2, 32, 8.0).unwrap();
        let u = crate::corpus::velocity_corpus(grid, 1, 3, 5).remove(0);
        let spec = WeightSpec::new(2, 1.0).unwrap();
        let g = velocity_gradient(&u).unwrap();
        let r1 = gagliardo_nirenberg_ratio(&u, &g, &spec, 4.0).unwrap();
        let r2 = gagliardo_nirenberg_ratio(&u.scale(-7.5), &g.scale(-7.5), &spec, 4.0).unwrap();
        assert!((r1 - r2).abs() < 1e-10 * r1);
        let z = VectorField::zeros(grid);
        assert!(matches!(
            gagliardo_nirenberg_ratio(&z, &velocity_gradient(&z).unwrap(), &spec, 4.0),
            Err(Error::ZeroNorm(_))
        ));
    }

    #[test]
    fn holder_cases() {
        let grid = crate::spectral::GridSpec::periodic_2pi(2, 64).unwrap();
        let spec = WeightSpec::new(2, 1.0).unwrap();
        let s = ScalarField::from_fn(grid, |x| x[0].sin());
        let c = holder_product_check(&s, &s, &spec, 4.0 / 3.0, 4.0).unwrap();
        assert!(c.pass && c.lhs > 0.0);
        let z = holder_product_check(&s, &ScalarField::zeros(grid), &spec, 4.0 / 3.0, 4.0).unwrap();
        assert_eq!((z.lhs, z.rhs), (0.0, 0.0));
        let partner = holder_extremal_partner(&s, &spec, 4.0).unwrap();
        let e = holder_product_check(&partner, &s, &spec, 4.0 / 3.0, 4.0).unwrap();
        assert!(e.lhs / e.rhs >= 0.99 && e.pass, "{e:?}");
        assert!(holder_product_check(&s, &s, &spec, 1.5, 4.0).is_err());
    }

    #[test]
    fn sum_space_cases() {
        let grid = crate::spectral::GridSpec::new(2, 32, 8.0).unwrap();
        let set = solve_exponents(2, rat(1), q("4/3")).unwrap();
        let zero = ScalarField::zeros(grid);
        let c = sum_space_embedding_check(&zero, &zero, &set).unwrap();
        assert_eq!(c.lhs, 0.0);
        assert!(c.pass);
        let f = crate::corpus::scalar_corpus(grid, 2, 3, 8);
        let c = sum_space_embedding_check(&f[0], &f[1], &set).unwrap();
        assert!(c.pass && c.lhs > 0.0);
    }

    #[test]
    fn growth_of_linear_monomial() {
        let radii: Vec<f64> = (0..=14).map(|k| 2f64.powi(k)).collect();
        let rows = polynomial_norm_growth(Monomial::new([1, 0, 0]), 2, 1.5, 7.0 / 6.0, &radii).unwrap();
        for w in rows.windows(2) {
            assert!(w[1].integral > w[0].integral);
        }
        let last = rows.last().unwrap();
        assert!((last.ratio.unwrap() / last.predicted - 1.0).abs() < 0.1);
        assert!((last.predicted - 2f64.powf(1.75)).abs() < 1e-12);
        assert!(polynomial_norm_growth(Monomial::new([0, 0, 0]), 2, 1.5, 7.0 / 6.0, &radii).is_err());
    }

    #[test]
    fn growth_of_quadratic_monomial_in_3d() {
        let radii: Vec<f64> = (0..=12).map(|k| 2f64.powi(k)).collect();
        let rows = polynomial_norm_growth(Monomial::new([1, 1, 0]), 3, 1.25, 2.2, &radii).unwrap();
        let last = rows.last().unwrap();
        assert!((last.ratio.unwrap() / last.predicted - 1.0).abs() < 0.1);
        assert!(last.predicted > 2f64.powf(1.75));
    }
}
