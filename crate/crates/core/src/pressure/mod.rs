//! Reconstructions of the pressure from a velocity `u` and a forcing tensor `F`.
//!
//! All routes act on `g_ij = u_i u_j - F_ij` and return mean-free fields.

mod green;

pub use green::{
    green_convolution_pressure, green_function, green_hessian, inner_half_box_mask,
    relative_error_up_to_constant, CutoffSpec,
};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::{
    gradient, inverse_laplacian, riesz_symbol, GridSpec, ScalarField, Spectrum, TensorField, VectorField,
};

/// `g = u (x) u - F`.
pub fn stress_tensor(u: &VectorField, forcing: &TensorField) -> Result<TensorField> {
    if u.grid() != forcing.grid() || u.dim() != forcing.dim() {
        return Err(Error::GridMismatch);
    }
    u.check_finite()?;
    forcing.check_finite()?;
    TensorField::outer(u, u)?.sub(forcing)
}

/// `p = sum_ij R_i R_j (u_i u_j - F_ij)`.
pub fn riesz_pressure(u: &VectorField, forcing: &TensorField) -> Result<ScalarField> {
    let g = stress_tensor(u, forcing)?;
    let grid = *g.grid();
    let d = grid.dim();
    let mut acc = Spectrum::zeros(grid);
    for i in 0..d {
        for j in 0..d {
            let s = Spectrum::forward(g.entry(i, j))
                .map_symbol(|xi| riesz_symbol(xi, i) * riesz_symbol(xi, j));
            acc.add_assign(&s)?;
        }
    }
    Ok(acc.into_field())
}

/// `-sum_ij d_i d_j (u_i u_j - F_ij)`, the right-hand side of the pressure Poisson equation.
pub fn pressure_source(u: &VectorField, forcing: &TensorField) -> Result<ScalarField> {
    let g = stress_tensor(u, forcing)?;
    let grid = *g.grid();
    let d = grid.dim();
    let mut acc = Spectrum::zeros(grid);
    for i in 0..d {
        for j in 0..d {
            let s = Spectrum::forward(g.entry(i, j))
                .map_symbol(|xi| Complex64::new(xi[i] * xi[j], 0.0));
            acc.add_assign(&s)?;
        }
    }
    Ok(acc.into_field())
}

/// Solves `Laplacian p = -sum_ij d_i d_j (u_i u_j - F_ij)` for the mean-free `p`.
pub fn poisson_pressure(u: &VectorField, forcing: &TensorField) -> Result<ScalarField> {
    inverse_laplacian(&pressure_source(u, forcing)?)
}

pub fn pressure_gradient(p: &ScalarField) -> Result<VectorField> {
    gradient(p)
}

/// Gaussian bump data `u = grad e^(-|x|^2/s)`, `F_12 = F_21 = x_1 x_2 e^(-2|x|^2/s)`
/// with `s = width2`.
///
/// Both `int u (x) u` and `int F` have vanishing trace-free part, so the
/// pressure decays like `|x|^(-d-2)` and periodic images stay negligible on
/// boxes a few widths across.
pub fn gaussian_bump_data(grid: GridSpec, width2: f64) -> Result<(VectorField, TensorField)> {
    if !(width2.is_finite() && width2 > 0.0) {
        return Err(Error::InvalidParameter(format!("bump width {width2}")));
    }
    let sq = |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>();
    let u = VectorField::from_fn(grid, |x, out| {
        let e = (-sq(x) / width2).exp();
        for (o, xi) in out.iter_mut().zip(x) {
            *o = -2.0 * xi / width2 * e;
        }
    });
    let b = ScalarField::from_fn(grid, |x| x[0] * x[1] * (-2.0 * sq(x) / width2).exp());
    let f = TensorField::zeros(grid).with_entry(0, 1, b.clone())?.with_entry(1, 0, b)?;
    Ok((u, f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::max_curl;

    fn taylor_green(grid: GridSpec) -> VectorField {
        VectorField::from_fn(grid, |x, out| {
            out[0] = x[0].cos() * x[1].sin();
            out[1] = -x[0].sin() * x[1].cos();
        })
    }

    #[test]
    fn zero_data() {
        let grid = GridSpec::periodic_2pi(2, 16).unwrap();
        let p = riesz_pressure(&VectorField::zeros(grid), &TensorField::zeros(grid)).unwrap();
        assert_eq!(p.max_abs(), 0.0);
        let q = poisson_pressure(&VectorField::zeros(grid), &TensorField::zeros(grid)).unwrap();
        assert_eq!(q.max_abs(), 0.0);
    }

    #[test]
    fn single_forcing_entry() {
        let grid = GridSpec::periodic_2pi(2, 16).unwrap();
        let f = TensorField::zeros(grid)
            .with_entry(0, 0, ScalarField::from_fn(grid, |x| x[0].sin()))
            .unwrap();
        let expected = ScalarField::from_fn(grid, |x| x[0].sin());
        let u = VectorField::zeros(grid);
        assert!(riesz_pressure(&u, &f).unwrap().relative_l2_error(&expected).unwrap() < 1e-13);
        assert!(poisson_pressure(&u, &f).unwrap().relative_l2_error(&expected).unwrap() < 1e-13);
    }

    #[test]
    fn taylor_green_pressure() {
        let grid = GridSpec::periodic_2pi(2, 32).unwrap();
        let u = taylor_green(grid);
        let f = TensorField::zeros(grid);
        let expected = ScalarField::from_fn(grid, |x| -0.25 * ((2.0 * x[0]).cos() + (2.0 * x[1]).cos()));
        let p = riesz_pressure(&u, &f).unwrap();
        assert!(p.mean_subtracted().relative_l2_error(&expected).unwrap() < 1e-10);
        let q = poisson_pressure(&u, &f).unwrap();
        assert!(q.relative_l2_error(&p).unwrap() < 1e-12);

        let grad = pressure_gradient(&p).unwrap();
        let gx = ScalarField::from_fn(grid, |x| 0.5 * (2.0 * x[0]).sin());
        let gy = ScalarField::from_fn(grid, |x| 0.5 * (2.0 * x[1]).sin());
        assert!(grad.component(0).relative_l2_error(&gx).unwrap() < 1e-10);
        assert!(grad.component(1).relative_l2_error(&gy).unwrap() < 1e-10);
        assert!(max_curl(&grad).unwrap() < 1e-12);
    }

    #[test]
    fn shear_flow_has_no_pressure() {
        let grid = GridSpec::periodic_2pi(2, 32).unwrap();
        let u = VectorField::from_fn(grid, |x, out| {
            out[0] = x[1].sin();
            out[1] = 0.0;
        });
        let f = TensorField::zeros(grid);
        assert!(riesz_pressure(&u, &f).unwrap().max_abs() < 1e-14);
        assert!(poisson_pressure(&u, &f).unwrap().max_abs() < 1e-14);
    }

    #[test]
    fn gradient_of_constant_vanishes() {
        let grid = GridSpec::periodic_2pi(3, 8).unwrap();
        let g = pressure_gradient(&ScalarField::constant(grid, 7.0)).unwrap();
        assert!(g.max_abs() < 1e-14);
    }

    #[test]
    fn mismatched_grids() {
        let a = GridSpec::periodic_2pi(2, 16).unwrap();
        let b = GridSpec::periodic_2pi(2, 32).unwrap();
        let r = riesz_pressure(&VectorField::zeros(a), &TensorField::zeros(b));
        assert!(matches!(r, Err(Error::GridMismatch)));
    }
}
