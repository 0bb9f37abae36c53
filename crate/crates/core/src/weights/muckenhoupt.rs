//! The reverse-Hölder (A_p) functional of a power weight over balls.
//!
//! The weight is radial, so a ball average reduces to a one-dimensional
//! integral over spheres `|y| = s` weighted by the measure of the part of the
//! sphere inside the ball. That measure is known in closed form in `d = 2, 3`.

use std::f64::consts::PI;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::{integrate_pieces, Tolerance};

use super::norms::WeightSpec;

const QUADRATURE: Tolerance = Tolerance { relative: 1e-9, absolute: 1e-300 };

/// Slack on the case bounds, matching the quadrature tolerance budget.
pub const BOUND_SLACK: f64 = 1e-3;
/// Slack on the Jensen lower bound `value >= 1`.
pub const JENSEN_SLACK: f64 = 1e-6;

fn ball_volume(dim: usize, radius: f64) -> f64 {
    match dim {
        2 => PI * radius * radius,
        _ => 4.0 / 3.0 * PI * radius.powi(3),
    }
}

/// Measure of `{|y| = s} ∩ B(c e_1, R)`.
fn slice_measure(dim: usize, s: f64, c: f64, radius: f64) -> f64 {
    if s <= 0.0 {
        return 0.0;
    }
    if s + c <= radius {
        return match dim {
            2 => 2.0 * PI * s,
            _ => 4.0 * PI * s * s,
        };
    }
    let kappa = ((s * s + c * c - radius * radius) / (2.0 * s * c)).clamp(-1.0, 1.0);
    match dim {
        2 => 2.0 * s * kappa.acos(),
        _ => 2.0 * PI * s * s * (1.0 - kappa),
    }
}

/// Average of the radial function `g(|y|)` over the ball of radius `radius`
/// centred at distance `center` from the origin.
pub fn ball_average_radial(
    dim: usize,
    center: f64,
    radius: f64,
    g: impl Fn(f64) -> f64,
) -> Result<f64> {
    let points: Vec<f64> = if center < radius {
        vec![0.0, radius - center, radius + center]
    } else {
        vec![center - radius, center + radius]
    };
    let integral =
        integrate_pieces(|s| g(s) * slice_measure(dim, s, center, radius), &points, QUADRATURE)?;
    Ok(integral / ball_volume(dim, radius))
}

fn check_args(p: f64, center: f64, radius: f64) -> Result<()> {
    if !(p.is_finite() && p > 1.0) {
        return Err(Error::InvalidParameter(format!("A_p exponent p = {p}")));
    }
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::InvalidParameter(format!("ball radius {radius}")));
    }
    if !(center.is_finite() && center >= 0.0) {
        return Err(Error::InvalidParameter(format!("ball centre distance {center}")));
    }
    Ok(())
}

/// `(avg_B w)^(1/p) (avg_B w^(-1/(p-1)))^(1-1/p)` over `B(x, R)` with `|x| = center`.
pub fn muckenhoupt_functional(spec: &WeightSpec, p: f64, center: f64, radius: f64) -> Result<f64> {
    check_args(p, center, radius)?;
    let d = spec.dim();
    let gamma = spec.gamma();
    let dual = 1.0 / (p - 1.0);
    let avg_w = ball_average_radial(d, center, radius, |s| (1.0 + s).powf(-gamma))?;
    let avg_dual = ball_average_radial(d, center, radius, |s| (1.0 + s).powf(gamma * dual))?;
    Ok(avg_w.powf(1.0 / p) * avg_dual.powf(1.0 - 1.0 / p))
}

/// Which branch of the case analysis a ball falls into.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BallCase {
    /// `R <= 1`.
    Small,
    /// `R > 1` and `|x| > 10 R`.
    Far,
    /// `R > 1` and `|x| <= 10 R`.
    Near,
}

impl BallCase {
    pub fn classify(center: f64, radius: f64) -> Self {
        if radius <= 1.0 {
            Self::Small
        } else if center > 10.0 * radius {
            Self::Far
        } else {
            Self::Near
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Self::Small => "small",
            Self::Far => "far",
            Self::Near => "near",
        }
    }

    /// Explicit bound on the functional; the near case has none.
    pub fn bound(&self, delta: f64, p: f64) -> Option<f64> {
        match self {
            Self::Small => Some(4f64.powf(delta / p)),
            Self::Far => Some((11.0f64 / 9.0).powf(delta / p)),
            Self::Near => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MuckenhouptSample {
    pub center: f64,
    pub radius: f64,
    pub case: BallCase,
    pub value: f64,
    pub bound: Option<f64>,
    pub pass: bool,
}

/// Centres along one ray and a logarithmic ladder of radii.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanLattice {
    pub centers: Vec<f64>,
    pub radii: Vec<f64>,
}

impl ScanLattice {
    /// Centres `0, 1, ..., 100`, radii `2^-3, ..., 2^6`.
    pub fn standard() -> Self {
        Self {
            centers: (0..=100).map(f64::from).collect(),
            radii: (-3..=6).map(|k| 2f64.powi(k)).collect(),
        }
    }

    /// Inserts the arithmetic midpoint between consecutive centres and the
    /// geometric midpoint between consecutive radii.
    pub fn refined(&self) -> Self {
        fn interleave(v: &[f64], mid: impl Fn(f64, f64) -> f64) -> Vec<f64> {
            let mut out = Vec::with_capacity(2 * v.len());
            for w in v.windows(2) {
                out.push(w[0]);
                out.push(mid(w[0], w[1]));
            }
            out.extend(v.last());
            out
        }
        Self {
            centers: interleave(&self.centers, |a, b| 0.5 * (a + b)),
            radii: interleave(&self.radii, |a, b| (a * b).sqrt()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CaseSummary {
    pub case: BallCase,
    pub samples: usize,
    pub max_value: Option<f64>,
    pub bound: Option<f64>,
    pub violations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MuckenhouptSummary {
    pub dim: usize,
    pub delta: f64,
    pub p: f64,
    pub samples: usize,
    pub supremum: f64,
    pub argmax_center: f64,
    pub argmax_radius: f64,
    pub min_value: f64,
    pub cases: Vec<CaseSummary>,
    pub all_pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MuckenhouptReport {
    pub dim: usize,
    pub delta: f64,
    pub p: f64,
    pub samples: Vec<MuckenhouptSample>,
}

impl MuckenhouptReport {
    /// Largest sampled value with its `(center, radius)`; first one wins on ties.
    pub fn supremum(&self) -> (f64, f64, f64) {
        self.samples.iter().fold((f64::NEG_INFINITY, 0.0, 0.0), |best, s| {
            if s.value > best.0 {
                (s.value, s.center, s.radius)
            } else {
                best
            }
        })
    }

    pub fn all_pass(&self) -> bool {
        self.samples.iter().all(|s| s.pass)
    }

    pub fn summary(&self) -> MuckenhouptSummary {
        let (supremum, argmax_center, argmax_radius) = self.supremum();
        let cases = [BallCase::Small, BallCase::Far, BallCase::Near]
            .into_iter()
            .map(|case| {
                let of_case: Vec<_> = self.samples.iter().filter(|s| s.case == case).collect();
                CaseSummary {
                    case,
                    samples: of_case.len(),
                    max_value: of_case.iter().map(|s| s.value).reduce(f64::max),
                    bound: case.bound(self.delta, self.p),
                    violations: of_case.iter().filter(|s| !s.pass).count(),
                }
            })
            .collect();
        MuckenhouptSummary {
            dim: self.dim,
            delta: self.delta,
            p: self.p,
            samples: self.samples.len(),
            supremum,
            argmax_center,
            argmax_radius,
            min_value: self.samples.iter().map(|s| s.value).fold(f64::INFINITY, f64::min),
            cases,
            all_pass: self.all_pass(),
        }
    }

    /// `center,radius,case,value,bound,pass`; the bound is empty for the near case.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("center,radius,case,value,bound,pass\n");
        for s in &self.samples {
            let bound = s.bound.map(|b| format!("{b:.12e}")).unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{},{:.12e},{},{}",
                s.center,
                s.radius,
                s.case.label(),
                s.value,
                bound,
                s.pass
            );
        }
        out
    }
}

/// Evaluates the functional on every `(center, radius)` pair of the lattice
/// and checks the case bounds and the Jensen lower bound.
pub fn muckenhoupt_scan(
    spec: &WeightSpec,
    p: f64,
    centers: &[f64],
    radii: &[f64],
) -> Result<MuckenhouptReport> {
    spec.require_ap()?;
    if centers.is_empty() || radii.is_empty() {
        return Err(Error::InvalidParameter("empty scan lattice".into()));
    }
    let delta = spec.gamma();
    let pairs: Vec<(f64, f64)> =
        centers.iter().flat_map(|&c| radii.iter().map(move |&r| (c, r))).collect();
    let samples = pairs
        .par_iter()
        .map(|&(center, radius)| {
            let value = muckenhoupt_functional(spec, p, center, radius)?;
            let case = BallCase::classify(center, radius);
            let bound = case.bound(delta, p);
            let pass = value.is_finite()
                && value >= 1.0 - JENSEN_SLACK
                && bound.is_none_or(|b| value <= b * (1.0 + BOUND_SLACK));
            Ok(MuckenhouptSample { center, radius, case, value, bound, pass })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MuckenhouptReport { dim: spec.dim(), delta, p, samples })
}
