use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Periodic, origin-centred box `[-L/2, L/2)^d` sampled with `n` points per axis.
///
/// Samples are stored row-major: axis 0 varies slowest, axis `d - 1` fastest.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    dim: usize,
    n: usize,
    length: f64,
}

impl GridSpec {
    pub fn new(dim: usize, n: usize, length: f64) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(Error::InvalidGrid(format!("dimension must be 2 or 3, got {dim}")));
        }
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "points per axis must be a power of two >= 8, got {n}"
            )));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidGrid(format!("side length must be positive, got {length}")));
        }
        Ok(Self { dim, n, length })
    }

    /// The `[-pi, pi)^d` box, on which `sin(x_1)` is a single Fourier mode.
    pub fn periodic_2pi(dim: usize, n: usize) -> Result<Self> {
        Self::new(dim, n, 2.0 * PI)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.n as f64
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    pub fn box_volume(&self) -> f64 {
        self.length.powi(self.dim as i32)
    }

    /// Number of real samples.
    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Number of complex coefficients in the half-spectrum (last axis halved).
    pub fn spectral_len(&self) -> usize {
        self.n.pow(self.dim as u32 - 1) * (self.n / 2 + 1)
    }

    pub fn coordinate(&self, k: usize) -> f64 {
        -0.5 * self.length + k as f64 * self.spacing()
    }

    /// Per-axis indices of a flat sample index. Unused trailing entries are 0.
    pub fn unflatten(&self, idx: usize) -> [usize; 3] {
        let n = self.n;
        match self.dim {
            2 => [idx / n, idx % n, 0],
            _ => [idx / (n * n), (idx / n) % n, idx % n],
        }
    }

    pub fn flatten(&self, ijk: [usize; 3]) -> usize {
        let n = self.n;
        match self.dim {
            2 => ijk[0] * n + ijk[1],
            _ => (ijk[0] * n + ijk[1]) * n + ijk[2],
        }
    }

    /// Physical coordinates of a sample. Unused trailing entries are 0.
    pub fn point(&self, idx: usize) -> [f64; 3] {
        let ijk = self.unflatten(idx);
        let mut x = [0.0; 3];
        for axis in 0..self.dim {
            x[axis] = self.coordinate(ijk[axis]);
        }
        x
    }

    /// Distance of a sample from the origin.
    pub fn radius(&self, idx: usize) -> f64 {
        let x = self.point(idx);
        (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt()
    }

    /// Periodic displacement of sample `idx` from sample 0, wrapped into
    /// `[-L/2, L/2)` per axis. Used to lay out convolution kernels.
    pub fn offset(&self, idx: usize) -> [f64; 3] {
        let ijk = self.unflatten(idx);
        let mut x = [0.0; 3];
        for axis in 0..self.dim {
            let k = ijk[axis] as f64;
            let k = if ijk[axis] < self.n / 2 { k } else { k - self.n as f64 };
            x[axis] = k * self.spacing();
        }
        x
    }

    pub fn offset_radius(&self, idx: usize) -> f64 {
        let x = self.offset(idx);
        (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt()
    }

    /// Integer mode numbers of a half-spectrum index, in `[-n/2, n/2)` on the
    /// full axes and `[0, n/2]` on the halved last axis.
    pub fn mode(&self, spectral_idx: usize) -> [i64; 3] {
        let n = self.n;
        let nh = n / 2 + 1;
        let signed = |k: usize| -> i64 {
            if k < n / 2 {
                k as i64
            } else {
                k as i64 - n as i64
            }
        };
        match self.dim {
            2 => [signed(spectral_idx / nh), (spectral_idx % nh) as i64, 0],
            _ => {
                let k2 = spectral_idx % nh;
                let rest = spectral_idx / nh;
                [signed(rest / n), signed(rest % n), k2 as i64]
            }
        }
    }

    /// Wavevector `2 pi m / L` used by every multiplier.
    ///
    /// Components on the Nyquist plane (`|m| = n/2`) are mapped to zero: the
    /// sampled Nyquist mode is its own conjugate partner, and an odd symbol
    /// there would break the real-output guarantee.
    pub fn wavevector(&self, spectral_idx: usize) -> [f64; 3] {
        let m = self.mode(spectral_idx);
        let half = (self.n / 2) as i64;
        let scale = 2.0 * PI / self.length;
        let mut xi = [0.0; 3];
        for axis in 0..self.dim {
            if m[axis].abs() != half {
                xi[axis] = scale * m[axis] as f64;
            }
        }
        xi
    }

    pub fn is_nyquist_free(&self, spectral_idx: usize) -> bool {
        let half = (self.n / 2) as i64;
        self.mode(spectral_idx)[..self.dim].iter().all(|m| m.abs() != half)
    }
}
