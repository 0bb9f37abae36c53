//! Seeded random band-limited test fields.
//!
//! Fields are stored as explicit trigonometric series, so the same function
//! can be sampled on grids of different resolution (refinement studies).

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::Result;
use crate::spectral::{GridSpec, ScalarField, VectorField};

#[derive(Debug, Clone, PartialEq)]
struct Term {
    mode: [i64; 3],
    cos: [f64; 3],
    sin: [f64; 3],
}

/// `sum_m a_m cos(xi_m . x) + b_m sin(xi_m . x)` with `xi_m = 2 pi m / L`,
/// vector-valued with `components` entries.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigSeries {
    dim: usize,
    length: f64,
    components: usize,
    terms: Vec<Term>,
}

impl TrigSeries {
    /// Random mean-free series with modes `0 < |m|_inf <= max_mode` and
    /// amplitudes damped by `1 / (1 + |m|^2)`. With `solenoidal`, each
    /// coefficient vector is projected orthogonally to its mode so the field
    /// is divergence-free.
    pub fn random(
        dim: usize,
        length: f64,
        components: usize,
        max_mode: i64,
        solenoidal: bool,
        rng: &mut impl Rng,
    ) -> Self {
        let mut terms = Vec::new();
        let range = -max_mode..=max_mode;
        let third: Vec<i64> = if dim == 3 { range.clone().collect() } else { vec![0] };
        for m0 in range.clone() {
            for m1 in range.clone() {
                for &m2 in &third {
                    let mode = [m0, m1, m2];
                    // one representative of each +-m pair
                    if !is_positive_half(mode) {
                        continue;
                    }
                    let damp = 1.0 / (1.0 + (m0 * m0 + m1 * m1 + m2 * m2) as f64);
                    let mut cos = [0.0; 3];
                    let mut sin = [0.0; 3];
                    for c in 0..components {
                        cos[c] = damp * rng.gen_range(-1.0..1.0);
                        sin[c] = damp * rng.gen_range(-1.0..1.0);
                    }
                    if solenoidal {
                        project_out(&mut cos, mode, dim);
                        project_out(&mut sin, mode, dim);
                    }
                    terms.push(Term { mode, cos, sin });
                }
            }
        }
        Self { dim, length, components, terms }
    }

    pub fn eval(&self, x: &[f64], out: &mut [f64]) {
        out[..self.components].iter_mut().for_each(|v| *v = 0.0);
        let k = 2.0 * PI / self.length;
        for t in &self.terms {
            let phase: f64 = (0..self.dim).map(|a| k * t.mode[a] as f64 * x[a]).sum();
            let (s, c) = phase.sin_cos();
            for (i, o) in out[..self.components].iter_mut().enumerate() {
                *o += t.cos[i] * c + t.sin[i] * s;
            }
        }
    }

    pub fn sample_scalar(&self, grid: GridSpec) -> ScalarField {
        let values = self.sample_with(&grid, |t, z, out| out[0] += t.cos[0] * z.re + t.sin[0] * z.im);
        ScalarField::new(grid, values.into_iter().map(|v| v[0]).collect()).expect("grid-sized samples")
    }

    pub fn sample_vector(&self, grid: GridSpec) -> VectorField {
        let c = self.components;
        let values = self.sample_with(&grid, |t, z, out| {
            for (i, o) in out[..c].iter_mut().enumerate() {
                *o += t.cos[i] * z.re + t.sin[i] * z.im;
            }
        });
        let comps = (0..c)
            .map(|i| ScalarField::new(grid, values.iter().map(|v| v[i]).collect()).expect("grid-sized samples"))
            .collect();
        VectorField::new(comps).expect("components share the grid")
    }

    /// Scalar derivative `d_axis` of component 0, evaluated analytically.
    pub fn sample_derivative(&self, grid: GridSpec, axis: usize) -> ScalarField {
        let k = 2.0 * PI / self.length;
        let values = self.sample_with(&grid, |t, z, out| {
            out[0] += k * t.mode[axis] as f64 * (t.sin[0] * z.re - t.cos[0] * z.im);
        });
        ScalarField::new(grid, values.into_iter().map(|v| v[0]).collect()).expect("grid-sized samples")
    }

    /// Accumulates `add(term, exp(i xi_m . x), out)` over all terms at every
    /// sample, with the exponentials built from per-axis tables.
    fn sample_with(&self, grid: &GridSpec, add: impl Fn(&Term, Complex64, &mut [f64; 3]) + Sync) -> Vec<[f64; 3]> {
        let n = grid.n();
        let k = 2.0 * PI / self.length;
        let top = self.terms.iter().flat_map(|t| t.mode).map(i64::abs).max().unwrap_or(0);
        // table[m + top][j] = exp(i k m x_j)
        let table: Vec<Vec<Complex64>> = (-top..=top)
            .map(|m| (0..n).map(|j| Complex64::from_polar(1.0, k * m as f64 * grid.coordinate(j))).collect())
            .collect();
        let dim = self.dim;
        (0..grid.len())
            .into_par_iter()
            .map(|idx| {
                let ijk = grid.unflatten(idx);
                let mut out = [0.0; 3];
                for t in &self.terms {
                    let mut z = Complex64::new(1.0, 0.0);
                    for a in 0..dim {
                        z *= table[(t.mode[a] + top) as usize][ijk[a]];
                    }
                    add(t, z, &mut out);
                }
                out
            })
            .collect()
    }
}

fn is_positive_half(m: [i64; 3]) -> bool {
    m.iter().find(|&&v| v != 0).is_some_and(|&v| v > 0)
}

fn project_out(v: &mut [f64; 3], mode: [i64; 3], dim: usize) {
    let m2: f64 = mode[..dim].iter().map(|&k| (k * k) as f64).sum();
    let dot: f64 = (0..dim).map(|a| v[a] * mode[a] as f64).sum();
    for a in 0..dim {
        v[a] -= dot * mode[a] as f64 / m2;
    }
}

/// `count` independent random mean-free scalar series.
pub fn scalar_series(dim: usize, length: f64, count: usize, max_mode: i64, seed: u64) -> Vec<TrigSeries> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| TrigSeries::random(dim, length, 1, max_mode, false, &mut rng)).collect()
}

/// `count` independent random divergence-free velocity series.
pub fn velocity_series(dim: usize, length: f64, count: usize, max_mode: i64, seed: u64) -> Vec<TrigSeries> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| TrigSeries::random(dim, length, dim, max_mode, true, &mut rng)).collect()
}

/// Samples `count` random mean-free scalar fields on `grid`.
pub fn scalar_corpus(grid: GridSpec, count: usize, max_mode: i64, seed: u64) -> Vec<ScalarField> {
    scalar_series(grid.dim(), grid.length(), count, max_mode, seed)
        .iter()
        .map(|s| s.sample_scalar(grid))
        .collect()
}

/// Samples `count` random divergence-free velocity fields on `grid`.
pub fn velocity_corpus(grid: GridSpec, count: usize, max_mode: i64, seed: u64) -> Vec<VectorField> {
    velocity_series(grid.dim(), grid.length(), count, max_mode, seed)
        .iter()
        .map(|s| s.sample_vector(grid))
        .collect()
}

/// Multiplies every sample of `f` by `envelope(x)`.
pub fn with_envelope(f: &ScalarField, envelope: impl Fn(&[f64]) -> f64) -> Result<ScalarField> {
    let e = ScalarField::from_fn(*f.grid(), envelope);
    f.mul(&e)
}
