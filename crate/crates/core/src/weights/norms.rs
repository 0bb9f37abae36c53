use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};
use crate::spectral::{GridSpec, ScalarField, TimeSeries, VectorField};

/// The power weight `w_gamma(x) = (1 + |x|)^(-gamma)` on `R^d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightSpec {
    dim: usize,
    gamma: f64,
    exponent: Option<f64>,
}

impl WeightSpec {
    /// `gamma = 0` is accepted as the degenerate weight `w = 1`.
    pub fn new(dim: usize, gamma: f64) -> Result<Self> {
        if !(2..=3).contains(&dim) {
            return Err(Error::InvalidParameter(format!("weight dimension {dim}")));
        }
        if !(gamma.is_finite() && gamma >= 0.0) {
            return Err(Error::InvalidParameter(format!("weight exponent gamma = {gamma}")));
        }
        Ok(Self { dim, gamma, exponent: None })
    }

    /// Attaches a Lebesgue exponent `p` in `(1, inf)`.
    pub fn with_exponent(mut self, p: f64) -> Result<Self> {
        if !(p.is_finite() && p > 1.0) {
            return Err(Error::InvalidParameter(format!("Lebesgue exponent p = {p}")));
        }
        self.exponent = Some(p);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn exponent(&self) -> Option<f64> {
        self.exponent
    }

    /// Same dimension, weight exponent multiplied by `factor` (`w_gamma^factor`).
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.dim, self.gamma * factor)
    }

    /// Checks the A_p hypothesis `0 <= gamma < d`.
    pub fn require_ap(&self) -> Result<()> {
        if self.gamma < self.dim as f64 {
            Ok(())
        } else {
            Err(Error::Inadmissible(format!(
                "power weight exponent {} must be below the dimension {}",
                self.gamma, self.dim
            )))
        }
    }

    pub fn eval_radius(&self, r: f64) -> f64 {
        (1.0 + r).powf(-self.gamma)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.eval_radius(x.iter().map(|v| v * v).sum::<f64>().sqrt())
    }

    /// Weight sampled at every grid point.
    pub fn sample(&self, grid: &GridSpec) -> Result<Vec<f64>> {
        self.check_grid(grid)?;
        Ok((0..grid.len()).map(|i| self.eval_radius(grid.radius(i))).collect())
    }

    fn check_grid(&self, grid: &GridSpec) -> Result<()> {
        if grid.dim() == self.dim {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "weight of dimension {} on a {}-dimensional grid",
                self.dim,
                grid.dim()
            )))
        }
    }
}

/// `weight_eval`: `(1 + |x|)^(-gamma)`.
pub fn weight_eval(spec: &WeightSpec, x: &[f64]) -> f64 {
    spec.eval(x)
}

/// Fields with a pointwise magnitude `|f(x)|`.
pub trait Magnitude {
    fn grid(&self) -> &GridSpec;
    fn abs_values(&self) -> Result<Vec<f64>>;
}

impl Magnitude for ScalarField {
    fn grid(&self) -> &GridSpec {
        ScalarField::grid(self)
    }

    fn abs_values(&self) -> Result<Vec<f64>> {
        self.check_finite()?;
        Ok(self.values().iter().map(|v| v.abs()).collect())
    }
}

impl Magnitude for VectorField {
    fn grid(&self) -> &GridSpec {
        VectorField::grid(self)
    }

    fn abs_values(&self) -> Result<Vec<f64>> {
        self.check_finite()?;
        Ok(self.magnitude().into_values())
    }
}

fn check_lebesgue(p: f64) -> Result<()> {
    if p.is_finite() && p >= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("Lebesgue exponent {p} outside [1, inf)")))
    }
}

/// `(sum |f|^p w_gamma h^d)^(1/p)` over the box.
pub fn weighted_norm<F: Magnitude + ?Sized>(f: &F, p: f64, spec: &WeightSpec) -> Result<f64> {
    check_lebesgue(p)?;
    let grid = f.grid();
    let w = spec.sample(grid)?;
    let mags = f.abs_values()?;
    let sum: f64 = mags.iter().zip(&w).map(|(m, w)| m.powf(p) * w).sum();
    Ok((sum * grid.cell_volume()).powf(1.0 / p))
}

/// Time exponent of a mixed norm; `Infinity` takes the max over snapshots.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeExponent {
    Finite(f64),
    Infinity,
}

impl TimeExponent {
    pub fn from_f64(a: f64) -> Self {
        if a.is_infinite() {
            Self::Infinity
        } else {
            Self::Finite(a)
        }
    }
}

/// `L^a((0,T), L^r_w)` norm of a uniformly sampled series, rectangle rule in time
/// with weight `T / len` per snapshot.
pub fn mixed_norm<F: Magnitude>(
    series: &TimeSeries<F>,
    time_exp: TimeExponent,
    space_exp: f64,
    spec: &WeightSpec,
) -> Result<f64> {
    if series.is_empty() {
        return Err(Error::InsufficientData("empty series".into()));
    }
    let norms = series
        .snapshots()
        .iter()
        .map(|f| weighted_norm(f, space_exp, spec))
        .collect::<Result<Vec<_>>>()?;
    time_norm(&norms, series.horizon(), time_exp)
}

/// Rectangle-rule `L^a(0,T)` norm of per-snapshot values.
pub fn time_norm(values: &[f64], horizon: f64, time_exp: TimeExponent) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::InsufficientData("empty series".into()));
    }
    ensure_finite(values, "time series norms")?;
    Ok(match time_exp {
        TimeExponent::Infinity => values.iter().fold(0.0, |m: f64, v| m.max(v.abs())),
        TimeExponent::Finite(a) => {
            check_lebesgue(a)?;
            let dt = horizon / values.len() as f64;
            (values.iter().map(|v| v.abs().powf(a)).sum::<f64>() * dt).powf(1.0 / a)
        }
    })
}

/// Fraction of a grid cell inside the ball of radius `radius`, linear ramp
/// across one cell width around the boundary.
fn ball_coverage(r: f64, radius: f64, h: f64) -> f64 {
    ((radius - r) / h + 0.5).clamp(0.0, 1.0)
}

/// `R^-2 int_{B(0,R)} |u|^2` for each radius.
pub fn b2_profile(u: &VectorField, radii: &[f64]) -> Result<Vec<(f64, f64)>> {
    let grid = *u.grid();
    if grid.dim() != 2 {
        return Err(Error::InvalidParameter("the B_2 norm is defined for d = 2".into()));
    }
    if radii.is_empty() {
        return Err(Error::InvalidParameter("empty radius set".into()));
    }
    u.check_finite()?;
    let h = grid.spacing();
    let sq: Vec<f64> = u.magnitude().values().iter().map(|m| m * m).collect();
    radii
        .iter()
        .map(|&radius| {
            if !(radius >= 1.0) {
                return Err(Error::InvalidParameter(format!("B_2 radius {radius} < 1")));
            }
            if radius > 0.5 * grid.length() {
                return Err(Error::SupportTooLarge { support: radius, allowed: 0.5 * grid.length() });
            }
            let integral: f64 = sq
                .iter()
                .enumerate()
                .map(|(i, v)| v * ball_coverage(grid.radius(i), radius, h))
                .sum::<f64>()
                * grid.cell_volume();
            Ok((radius, integral / (radius * radius)))
        })
        .collect()
}

/// `sup_R (R^-2 int_{|y| <= R} |u|^2)^(1/2)` over the sampled radii.
pub fn b2_norm(u: &VectorField, radii: &[f64]) -> Result<f64> {
    let profile = b2_profile(u, radii)?;
    Ok(profile.iter().fold(0.0, |m: f64, (_, v)| m.max(*v)).sqrt())
}

/// Corpus-level constants of the chain `L^2_{w_gamma} -> B_2 -> L^p_{w_delta}` in `d = 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EmbeddingConstants {
    /// `min ||u||_{L^2_{w_gamma}} / ||u||_{B_2}`.
    pub weighted_over_b2: f64,
    /// `min ||u||_{B_2} / ||u||_{L^p_{w_delta}}`.
    pub b2_over_weighted: f64,
}

pub fn embedding_constants(
    corpus: &[VectorField],
    gamma: f64,
    delta: f64,
    p: f64,
    radii: &[f64],
) -> Result<EmbeddingConstants> {
    if !(gamma > 0.0 && gamma <= 2.0 && delta > 2.0) {
        return Err(Error::Inadmissible(format!(
            "embedding chain needs 0 < gamma <= 2 < delta, got gamma = {gamma}, delta = {delta}"
        )));
    }
    if corpus.is_empty() {
        return Err(Error::InsufficientData("empty corpus".into()));
    }
    let w_gamma = WeightSpec::new(2, gamma)?;
    let w_delta = WeightSpec::new(2, delta)?;
    let mut lower = f64::INFINITY;
    let mut upper = f64::INFINITY;
    for (k, u) in corpus.iter().enumerate() {
        let b2 = b2_norm(u, radii)?;
        let l2g = weighted_norm(u, 2.0, &w_gamma)?;
        let lpd = weighted_norm(u, p, &w_delta)?;
        if b2 == 0.0 || lpd == 0.0 {
            return Err(Error::ZeroNorm(k));
        }
        lower = lower.min(l2g / b2);
        upper = upper.min(b2 / lpd);
    }
    Ok(EmbeddingConstants { weighted_over_b2: lower, b2_over_weighted: upper })
}
