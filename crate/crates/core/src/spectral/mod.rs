//! Fourier-multiplier calculus on periodic boxes.

mod field;
mod fourier;
mod grid;
mod ops;
pub mod snapshot;

pub use field::{ScalarField, TensorField, TimeSeries, VectorField};
pub use fourier::{FftPlan, MultiplierOp, Spectrum};
pub use grid::GridSpec;
pub use ops::{
    circular_convolution, derivative, divergence, gradient, inverse_laplacian, laplacian, leray_project, max_curl,
    riesz_transform,
};
pub(crate) use ops::riesz_symbol;
