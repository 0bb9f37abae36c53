//! Real-space pressure from the second derivatives of the Laplace fundamental
//! solution, split by a radial cut-off `phi` into a near and a far part.
//!
//! With `-Laplacian G = delta`, the kernel of `R_i R_j` is
//!
//! ```text
//! d_i d_j G = p.v. c_d (d w_i w_j - delta_ij) / |y|^d  -  (delta_ij / d) delta_0,
//! ```
//!
//! where `w = y / |y|`, `c_2 = 1 / (2 pi)` and `c_3 = 1 / (4 pi)`.
//!
//! The far part `(1 - phi) d_i d_j G` is smooth and is summed with the
//! rectangle rule (evaluated as a periodic convolution); the near part is the
//! punctured rectangle rule on the stencil `|y| < support`. Together they form
//! the punctured lattice sum of the kernel, whose error against the principal
//! value integral is local: for each even multi-index `a` it is
//! `d^a g(x) / a! * h^|a| C_a`, with `C_a` the lattice defect of `K y^a` on the
//! unit lattice. The defects for `|a| = 2, 4` are subtracted.

use std::f64::consts::PI;
use std::sync::OnceLock;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::mollification::smooth_step;
use crate::quadrature::{integrate, Tolerance};
use crate::spectral::{circular_convolution, derivative, GridSpec, ScalarField, TensorField, VectorField};

use super::stress_tensor;

/// Relative magnitude below which `g` counts as zero for the support check.
const SUPPORT_THRESHOLD: f64 = 1e-10;

/// Radial cut-off: `1` on `[0, plateau]`, `0` beyond `support`, smooth between.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffSpec {
    plateau: f64,
    support: f64,
}

impl CutoffSpec {
    pub fn new(plateau: f64, support: f64) -> Result<Self> {
        if !(plateau.is_finite() && plateau > 0.0) {
            return Err(Error::InvalidParameter(format!("cut-off plateau {plateau}")));
        }
        if !(support.is_finite() && support > plateau) {
            return Err(Error::InvalidParameter(format!(
                "cut-off support {support} must exceed the plateau {plateau}"
            )));
        }
        Ok(Self { plateau, support })
    }

    pub fn plateau(&self) -> f64 {
        self.plateau
    }

    pub fn support(&self) -> f64 {
        self.support
    }

    pub fn eval(&self, r: f64) -> f64 {
        1.0 - smooth_step((r - self.plateau) / (self.support - self.plateau))
    }

    /// `int_0^inf phi(r) r dr`.
    pub fn radial_moment(&self) -> Result<f64> {
        self.radial_moment_of_order(1)
    }

    /// `int_0^inf phi(r) r^k dr`.
    pub fn radial_moment_of_order(&self, k: i32) -> Result<f64> {
        let tol = Tolerance { relative: 1e-13, absolute: 0.0 };
        let tail = integrate(|r| self.eval(r) * r.powi(k), self.plateau, self.support, tol)?;
        Ok(self.plateau.powi(k + 1) / (k + 1) as f64 + tail)
    }
}

/// Fundamental solution of `-Laplacian` in `R^d` at distance `r`.
pub fn green_function(dim: usize, r: f64) -> f64 {
    match dim {
        2 => -r.ln() / (2.0 * PI),
        _ => 1.0 / (4.0 * PI * r),
    }
}

fn kernel_constant(dim: usize) -> f64 {
    match dim {
        2 => 1.0 / (2.0 * PI),
        _ => 1.0 / (4.0 * PI),
    }
}

/// `d_i d_j G(y)` for `y != 0`; entries beyond `dim` are zero.
pub fn green_hessian(dim: usize, y: &[f64]) -> [[f64; 3]; 3] {
    let r2: f64 = y[..dim].iter().map(|v| v * v).sum();
    let r = r2.sqrt();
    let c = kernel_constant(dim) / r.powi(dim as i32);
    let mut k = [[0.0; 3]; 3];
    for i in 0..dim {
        for j in 0..dim {
            let delta = if i == j { 1.0 } else { 0.0 };
            k[i][j] = c * (dim as f64 * y[i] * y[j] / r2 - delta);
        }
    }
    k
}

/// Upper-triangle index pairs with their multiplicity in a symmetric sum.
fn pairs(dim: usize) -> Vec<(usize, usize, f64)> {
    let mut out = Vec::new();
    for i in 0..dim {
        for j in i..dim {
            out.push((i, j, if i == j { 1.0 } else { 2.0 }));
        }
    }
    out
}

fn kron(a: usize, b: usize) -> f64 {
    if a == b {
        1.0
    } else {
        0.0
    }
}

/// Nonzero integer points of `[-reach, reach]^d`.
fn lattice_points(dim: usize, reach: isize) -> Vec<[isize; 3]> {
    let span: Vec<isize> = (-reach..=reach).collect();
    let third: &[isize] = if dim == 3 { &span } else { &[0] };
    let mut out = Vec::new();
    for &a in &span {
        for &b in &span {
            for &c in third {
                if (a, b, c) != (0, 0, 0) {
                    out.push([a, b, c]);
                }
            }
        }
    }
    out
}

/// Sum over the perfect matchings of `idx` of the product of Kronecker deltas.
fn pairings(idx: &[usize]) -> f64 {
    if idx.is_empty() {
        return 1.0;
    }
    let first = idx[0];
    let mut total = 0.0;
    for m in 1..idx.len() {
        if idx[m] == first {
            let rest: Vec<usize> =
                idx[1..].iter().enumerate().filter(|(k, _)| k + 1 != m).map(|(_, v)| *v).collect();
            total += pairings(&rest);
        }
    }
    total
}

/// `int psi(|y|) K_ij(y) y^a dy` with `radial = int psi(r) r^(|a| - 1) dr`.
///
/// Uses `c_d |S^(d-1)| = 1` and the sphere moments
/// `avg(w_a1 ... w_a2m) = pairings / (d (d + 2) ... (d + 2m - 2))`.
fn kernel_moment(dim: usize, i: usize, j: usize, index: &[usize], radial: f64) -> f64 {
    let d = dim as f64;
    let m = index.len() / 2;
    let denom = |terms: usize| (0..terms).map(|t| d + 2.0 * t as f64).product::<f64>();
    let mut full = vec![i, j];
    full.extend_from_slice(index);
    radial * (d * pairings(&full) / denom(m + 1) - kron(i, j) * pairings(index) / denom(m))
}

/// `C_a / a!` for one symmetric multi-index, given as sorted axes.
struct Defect {
    index: Vec<usize>,
    value: f64,
}

fn sorted_indices(dim: usize, order: usize) -> Vec<Vec<usize>> {
    if order == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for head in sorted_indices(dim, order - 1) {
        let start = head.last().copied().unwrap_or(0);
        for a in start..dim {
            let mut v = head.clone();
            v.push(a);
            out.push(v);
        }
    }
    out
}

fn factorial_of_counts(index: &[usize]) -> f64 {
    (0..3)
        .map(|a| {
            let c = index.iter().filter(|v| **v == a).count();
            (1..=c).product::<usize>() as f64
        })
        .product()
}

/// Window used to measure the unit-lattice defects. The transition spans
/// many cells so that only the singular point contributes.
const DEFECT_WINDOW: (f64, f64) = (8.0, 40.0);

fn compute_lattice_defects(dim: usize, window: CutoffSpec) -> Result<Vec<Vec<Defect>>> {
    let points = lattice_points(dim, window.support().ceil() as isize);
    let radial2 = window.radial_moment_of_order(1)?;
    let radial4 = window.radial_moment_of_order(3)?;
    // (y, psi K(y)) inside the window; sums below run in a fixed order
    let samples: Vec<([f64; 3], [[f64; 3]; 3])> = points
        .par_iter()
        .filter_map(|p| {
            let y = [p[0] as f64, p[1] as f64, p[2] as f64];
            let psi = window.eval((y[0] * y[0] + y[1] * y[1] + y[2] * y[2]).sqrt());
            (psi != 0.0).then(|| (y, green_hessian(dim, &y).map(|row| row.map(|k| psi * k))))
        })
        .collect();
    let mut out = Vec::new();
    for (i, j, _) in pairs(dim) {
        let mut defects = Vec::new();
        for order in [2usize, 4] {
            let radial = if order == 2 { radial2 } else { radial4 };
            for index in sorted_indices(dim, order) {
                let lattice: f64 =
                    samples.iter().map(|(y, k)| k[i][j] * index.iter().map(|&a| y[a]).product::<f64>()).sum();
                let value = (lattice - kernel_moment(dim, i, j, &index, radial)) / factorial_of_counts(&index);
                defects.push(Defect { index, value });
            }
        }
        out.push(defects);
    }
    Ok(out)
}

/// Unit-lattice defects per `(i, j)` pair, computed once per dimension.
fn lattice_defects(dim: usize) -> &'static [Vec<Defect>] {
    static CACHE: [OnceLock<Vec<Vec<Defect>>>; 2] = [OnceLock::new(), OnceLock::new()];
    CACHE[dim - 2].get_or_init(|| {
        let window = CutoffSpec::new(DEFECT_WINDOW.0, DEFECT_WINDOW.1).expect("valid window");
        compute_lattice_defects(dim, window).expect("defect quadrature converges")
    })
}

/// Samples with `|x_a| <= L/4` on every axis.
pub fn inner_half_box_mask(grid: &GridSpec) -> Vec<bool> {
    let quarter = 0.25 * grid.length() * (1.0 + 1e-12);
    (0..grid.len())
        .map(|i| grid.point(i)[..grid.dim()].iter().all(|x| x.abs() <= quarter))
        .collect()
}

/// Relative L^2 distance on the masked samples after removing each field's
/// masked mean.
pub fn relative_error_up_to_constant(
    a: &ScalarField,
    reference: &ScalarField,
    mask: &[bool],
) -> Result<f64> {
    a.same_grid(reference)?;
    if mask.len() != a.values().len() {
        return Err(Error::GridMismatch);
    }
    let count = mask.iter().filter(|m| **m).count();
    if count == 0 {
        return Err(Error::InsufficientData("empty mask".into()));
    }
    let masked_mean = |f: &ScalarField| {
        f.values().iter().zip(mask).filter(|(_, m)| **m).map(|(v, _)| v).sum::<f64>() / count as f64
    };
    let (ma, mr) = (masked_mean(a), masked_mean(reference));
    let (mut num, mut den) = (0.0, 0.0);
    for ((x, y), m) in a.values().iter().zip(reference.values()).zip(mask) {
        if *m {
            num += ((x - ma) - (y - mr)).powi(2);
            den += (y - mr).powi(2);
        }
    }
    Ok(if den == 0.0 { num.sqrt() } else { (num / den).sqrt() })
}

fn support_radius(g: &TensorField) -> f64 {
    let grid = g.grid();
    let gmax = g.components().iter().map(ScalarField::max_abs).fold(0.0, f64::max);
    if gmax == 0.0 {
        return 0.0;
    }
    let threshold = SUPPORT_THRESHOLD * gmax;
    (0..grid.len())
        .filter(|&i| g.components().iter().any(|c| c.values()[i].abs() > threshold))
        .map(|i| grid.radius(i))
        .fold(0.0, f64::max)
}

struct StencilPoint {
    shift: [usize; 3],
    weights: Vec<f64>,
}

/// Mean-free pressure `sum_ij (d_i d_j G) * (u_i u_j - F_ij)` by real-space quadrature.
///
/// Requires `g = u (x) u - F` to vanish (relative to its maximum) outside the
/// ball of radius `L/4`, and the cut-off support to be at most `L/8`. On the
/// inner half-box the periodic layout then coincides with the free-space sum.
pub fn green_convolution_pressure(
    u: &VectorField,
    forcing: &TensorField,
    cutoff: &CutoffSpec,
) -> Result<ScalarField> {
    let grid = *u.grid();
    let d = grid.dim();
    let n = grid.n();
    let length = grid.length();
    let allowed = length / 8.0;
    if cutoff.support() > allowed * (1.0 + 1e-12) {
        return Err(Error::SupportTooLarge { support: cutoff.support(), allowed });
    }
    let g = stress_tensor(u, forcing)?.symmetrized();
    let data_support = support_radius(&g);
    if data_support > 0.25 * length {
        return Err(Error::SupportTooLarge { support: data_support, allowed: 0.25 * length });
    }
    if data_support == 0.0 {
        return Ok(ScalarField::zeros(grid));
    }
    let pairs = pairs(d);
    let hd = grid.cell_volume();

    // far part: periodic convolution with (1 - phi) K laid out on offsets
    let mut far = ScalarField::zeros(grid);
    for &(i, j, mult) in &pairs {
        let kernel: Vec<f64> = (0..grid.len())
            .map(|s| {
                let r = grid.offset_radius(s);
                if r == 0.0 {
                    return 0.0;
                }
                let k = green_hessian(d, &grid.offset(s));
                (1.0 - cutoff.eval(r)) * k[i][j] * hd
            })
            .collect();
        let term = circular_convolution(g.entry(i, j), &ScalarField::new(grid, kernel)?)?;
        far.add_assign_scaled(mult, &term)?;
    }

    // near stencil
    let reach = (cutoff.support() / grid.spacing()).ceil() as usize;
    let mut stencil = Vec::new();
    for steps in lattice_points(d, reach as isize) {
        let mut y = [0.0; 3];
        for axis in 0..d {
            y[axis] = steps[axis] as f64 * grid.spacing();
        }
        let phi = cutoff.eval((y[0] * y[0] + y[1] * y[1] + y[2] * y[2]).sqrt());
        if phi == 0.0 {
            continue;
        }
        let k = green_hessian(d, &y);
        let weights: Vec<f64> = pairs.iter().map(|&(i, j, _)| phi * k[i][j] * hd).collect();
        let mut shift = [0usize; 3];
        for axis in 0..d {
            shift[axis] = steps[axis].rem_euclid(n as isize) as usize;
        }
        stencil.push(StencilPoint { shift, weights });
    }

    // interleaved samples for cache-friendly stencil sums
    let np = pairs.len();
    let mut packed = vec![0.0; grid.len() * np];
    for (p, &(i, j, mult)) in pairs.iter().enumerate() {
        for (idx, v) in g.entry(i, j).values().iter().enumerate() {
            packed[idx * np + p] = mult * v;
        }
    }
    let mask = n - 1;
    let near_values: Vec<f64> = (0..grid.len())
        .into_par_iter()
        .map(|idx| {
            let x = grid.unflatten(idx);
            let here = &packed[idx * np..(idx + 1) * np];
            let mut acc = 0.0;
            for s in &stencil {
                let mut src = [0usize; 3];
                for axis in 0..d {
                    src[axis] = (x[axis] + n - s.shift[axis]) & mask;
                }
                let j = grid.flatten(src);
                let there = &packed[j * np..(j + 1) * np];
                for p in 0..np {
                    acc += s.weights[p] * (there[p] - here[p]);
                }
            }
            acc
        })
        .collect();
    let mut total = ScalarField::new(grid, near_values)?.add(&far)?;

    // lattice defects, scaled from the unit lattice
    for (p, &(i, j, mult)) in pairs.iter().enumerate() {
        for defect in &lattice_defects(d)[p] {
            let coef = defect.value * grid.spacing().powi(defect.index.len() as i32);
            if coef == 0.0 {
                continue;
            }
            let mut dg = g.entry(i, j).clone();
            for &axis in &defect.index {
                dg = derivative(&dg, axis)?;
            }
            total.add_assign_scaled(-mult * coef, &dg)?;
        }
    }

    // local part of the distributional kernel
    for i in 0..d {
        total.add_assign_scaled(-1.0 / d as f64, g.entry(i, i))?;
    }
    Ok(total.mean_subtracted())
}
