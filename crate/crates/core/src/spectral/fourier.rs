//! Real-to-complex transforms on [`GridSpec`] boxes and Fourier multipliers.
//!
//! The forward transform is unnormalised; the inverse divides by the number
//! of samples. Only the half-spectrum along the last axis is stored. Before
//! every inverse transform the self-conjugate bins are projected onto the
//! reals, so inverse transforms always yield exactly real fields.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use realfft::{ComplexToReal, RealFftPlanner, RealToComplex};
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

use super::field::ScalarField;
use super::grid::GridSpec;

/// FFT plans for one `(dim, n)` pair. Shared across threads.
pub struct FftPlan {
    dim: usize,
    n: usize,
    r2c: Arc<dyn RealToComplex<f64>>,
    c2r: Arc<dyn ComplexToReal<f64>>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl FftPlan {
    fn build(dim: usize, n: usize) -> Self {
        let mut real = RealFftPlanner::<f64>::new();
        let mut complex = FftPlanner::<f64>::new();
        Self {
            dim,
            n,
            r2c: real.plan_fft_forward(n),
            c2r: real.plan_fft_inverse(n),
            forward: complex.plan_fft_forward(n),
            inverse: complex.plan_fft_inverse(n),
        }
    }

    /// Cached plan for `grid`.
    pub fn for_grid(grid: &GridSpec) -> Arc<FftPlan> {
        static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Arc<FftPlan>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut map = cache.lock().expect("fft plan cache poisoned");
        map.entry((grid.dim(), grid.n()))
            .or_insert_with(|| Arc::new(FftPlan::build(grid.dim(), grid.n())))
            .clone()
    }

    fn forward_real(&self, values: &[f64]) -> Vec<Complex64> {
        let n = self.n;
        let nh = n / 2 + 1;
        let rows = values.len() / n;
        let mut out = vec![Complex64::new(0.0, 0.0); rows * nh];
        let mut input = vec![0.0; n];
        let mut scratch = self.r2c.make_scratch_vec();
        for (row, dst) in values.chunks_exact(n).zip(out.chunks_exact_mut(nh)) {
            input.copy_from_slice(row);
            self.r2c
                .process_with_scratch(&mut input, dst, &mut scratch)
                .expect("r2c buffer sizes");
        }
        let fft = &self.forward;
        self.transform_leading_axes(&mut out, fft.as_ref());
        out
    }

    fn inverse_real(&self, spectrum: &mut [Complex64]) -> Vec<f64> {
        let n = self.n;
        let nh = n / 2 + 1;
        let fft = &self.inverse;
        self.transform_leading_axes(spectrum, fft.as_ref());
        let rows = spectrum.len() / nh;
        let mut out = vec![0.0; rows * n];
        let mut scratch = self.c2r.make_scratch_vec();
        let scale = 1.0 / (rows * n) as f64;
        for (src, dst) in spectrum.chunks_exact_mut(nh).zip(out.chunks_exact_mut(n)) {
            src[0].im = 0.0;
            src[nh - 1].im = 0.0;
            self.c2r
                .process_with_scratch(src, dst, &mut scratch)
                .expect("c2r buffer sizes");
            for v in dst.iter_mut() {
                *v *= scale;
            }
        }
        out
    }

    /// Complex transform along every axis except the (halved) last one.
    fn transform_leading_axes(&self, data: &mut [Complex64], fft: &dyn Fft<f64>) {
        let n = self.n;
        let nh = n / 2 + 1;
        let mut line = vec![Complex64::new(0.0, 0.0); n];
        let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
        // axis stride in the half-spectrum layout, for axes 0..dim-1
        let strides: Vec<usize> = match self.dim {
            2 => vec![nh],
            _ => vec![n * nh, nh],
        };
        let total = data.len();
        for &stride in &strides {
            // every line along this axis starts at an index whose coordinate on the axis is 0
            for start in 0..total {
                if (start / stride) % n != 0 {
                    continue;
                }
                for (k, slot) in line.iter_mut().enumerate() {
                    *slot = data[start + k * stride];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for (k, v) in line.iter().enumerate() {
                    data[start + k * stride] = *v;
                }
            }
        }
    }
}

/// Half-spectrum of a real field.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    grid: GridSpec,
    coeffs: Vec<Complex64>,
}

impl Spectrum {
    pub fn forward(field: &ScalarField) -> Spectrum {
        let grid = *field.grid();
        let plan = FftPlan::for_grid(&grid);
        Spectrum { grid, coeffs: plan.forward_real(field.values()) }
    }

    pub fn zeros(grid: GridSpec) -> Spectrum {
        Spectrum { grid, coeffs: vec![Complex64::new(0.0, 0.0); grid.spectral_len()] }
    }

    pub fn inverse(&self) -> ScalarField {
        let mut work = self.coeffs.clone();
        self.inverse_in_place(&mut work)
    }

    pub fn into_field(mut self) -> ScalarField {
        let mut coeffs = std::mem::take(&mut self.coeffs);
        self.inverse_in_place(&mut coeffs)
    }

    fn inverse_in_place(&self, coeffs: &mut [Complex64]) -> ScalarField {
        let plan = FftPlan::for_grid(&self.grid);
        ScalarField::from_raw(self.grid, plan.inverse_real(coeffs))
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// Multiplies every coefficient by `symbol(xi)`; `xi` has `d` entries.
    pub fn apply_symbol(&mut self, symbol: impl Fn(&[f64]) -> Complex64) {
        let d = self.grid.dim();
        for (s, c) in self.coeffs.iter_mut().enumerate() {
            let xi = self.grid.wavevector(s);
            *c *= symbol(&xi[..d]);
        }
    }

    pub fn map_symbol(&self, symbol: impl Fn(&[f64]) -> Complex64) -> Spectrum {
        let mut out = self.clone();
        out.apply_symbol(symbol);
        out
    }

    pub fn add_assign(&mut self, other: &Spectrum) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += b;
        }
        Ok(())
    }

    /// Sum of `|c|^2` over the full (Hermitian-completed) spectrum.
    pub fn full_energy(&self) -> f64 {
        let n = self.grid.n();
        let nh = n / 2 + 1;
        self.coeffs
            .iter()
            .enumerate()
            .map(|(s, c)| {
                let k_last = s % nh;
                // interior last-axis bins stand for themselves and their conjugate partner
                let mult = if k_last == 0 || k_last == nh - 1 { 1.0 } else { 2.0 };
                mult * c.norm_sqr()
            })
            .sum()
    }
}

/// Precomputed Fourier symbol on the half-spectrum of one grid.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiplierOp {
    grid: GridSpec,
    symbol: Vec<Complex64>,
}

impl MultiplierOp {
    /// Evaluates `symbol(xi)` on every mode with `xi != 0`; modes whose
    /// effective wavevector vanishes receive `zero_mode`.
    pub fn from_symbol(
        grid: GridSpec,
        zero_mode: Complex64,
        symbol: impl Fn(&[f64]) -> Complex64,
    ) -> Self {
        let d = grid.dim();
        let symbol = (0..grid.spectral_len())
            .map(|s| {
                let xi = grid.wavevector(s);
                if xi.iter().all(|&x| x == 0.0) {
                    zero_mode
                } else {
                    symbol(&xi[..d])
                }
            })
            .collect();
        Self { grid, symbol }
    }

    pub fn identity(grid: GridSpec) -> Self {
        let one = Complex64::new(1.0, 0.0);
        Self::from_symbol(grid, one, |_| one)
    }

    /// `R_j = d_j / sqrt(-Laplacian)`: symbol `i xi_j / |xi|`, zero at the origin.
    pub fn riesz(grid: GridSpec, axis: usize) -> Result<Self> {
        check_axis(&grid, axis)?;
        Ok(Self::from_symbol(grid, Complex64::new(0.0, 0.0), |xi| {
            Complex64::new(0.0, xi[axis] / norm(xi))
        }))
    }

    /// `d_j`: symbol `i xi_j`.
    pub fn derivative(grid: GridSpec, axis: usize) -> Result<Self> {
        check_axis(&grid, axis)?;
        Ok(Self::from_symbol(grid, Complex64::new(0.0, 0.0), |xi| Complex64::new(0.0, xi[axis])))
    }

    /// Laplacian: symbol `-|xi|^2`.
    pub fn laplacian(grid: GridSpec) -> Self {
        Self::from_symbol(grid, Complex64::new(0.0, 0.0), |xi| Complex64::new(-norm_sqr(xi), 0.0))
    }

    /// `sqrt(-Laplacian)`: symbol `|xi|`.
    pub fn half_laplacian(grid: GridSpec) -> Self {
        Self::from_symbol(grid, Complex64::new(0.0, 0.0), |xi| Complex64::new(norm(xi), 0.0))
    }

    /// Inverse Laplacian: symbol `-1/|xi|^2`, zero at the origin.
    pub fn inverse_laplacian(grid: GridSpec) -> Self {
        Self::from_symbol(grid, Complex64::new(0.0, 0.0), |xi| {
            Complex64::new(-1.0 / norm_sqr(xi), 0.0)
        })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn symbol(&self) -> &[Complex64] {
        &self.symbol
    }

    /// Pointwise product of symbols, i.e. operator composition.
    pub fn compose(&self, other: &MultiplierOp) -> Result<MultiplierOp> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let symbol = self.symbol.iter().zip(&other.symbol).map(|(a, b)| a * b).collect();
        Ok(Self { grid: self.grid, symbol })
    }

    pub fn apply_spectrum(&self, spectrum: &mut Spectrum) -> Result<()> {
        if self.grid != spectrum.grid {
            return Err(Error::GridMismatch);
        }
        for (c, s) in spectrum.coeffs.iter_mut().zip(&self.symbol) {
            *c *= s;
        }
        Ok(())
    }

    pub fn apply(&self, field: &ScalarField) -> Result<ScalarField> {
        if self.grid != *field.grid() {
            return Err(Error::GridMismatch);
        }
        field.check_finite()?;
        let mut spec = Spectrum::forward(field);
        self.apply_spectrum(&mut spec)?;
        Ok(spec.into_field())
    }
}

pub(crate) fn check_axis(grid: &GridSpec, axis: usize) -> Result<()> {
    if axis < grid.dim() {
        Ok(())
    } else {
        Err(Error::AxisOutOfRange { axis, dim: grid.dim() })
    }
}

pub(crate) fn norm_sqr(xi: &[f64]) -> f64 {
    xi.iter().map(|x| x * x).sum()
}

pub(crate) fn norm(xi: &[f64]) -> f64 {
    norm_sqr(xi).sqrt()
}
