//! Differential and singular-integral operators as Fourier multipliers.
//!
//! All operators use the effective wavevector of [`GridSpec::wavevector`] and
//! map the zero mode of `R_j` and of the inverse Laplacian to zero, so their
//! outputs are mean-free.

use num_complex::Complex64;

use crate::error::Result;

use super::field::{ScalarField, VectorField};
use super::fourier::{check_axis, norm, norm_sqr, Spectrum};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

pub(crate) fn riesz_symbol(xi: &[f64], axis: usize) -> Complex64 {
    let r = norm(xi);
    if r == 0.0 {
        ZERO
    } else {
        Complex64::new(0.0, xi[axis] / r)
    }
}

pub(crate) fn inverse_laplacian_symbol(xi: &[f64]) -> Complex64 {
    let r2 = norm_sqr(xi);
    if r2 == 0.0 {
        ZERO
    } else {
        Complex64::new(-1.0 / r2, 0.0)
    }
}

/// `j`-th Riesz transform (`axis` is zero-based).
pub fn riesz_transform(f: &ScalarField, axis: usize) -> Result<ScalarField> {
    check_axis(f.grid(), axis)?;
    f.check_finite()?;
    let mut spec = Spectrum::forward(f);
    spec.apply_symbol(|xi| riesz_symbol(xi, axis));
    Ok(spec.into_field())
}

/// Solves `Laplacian u = f` for the mean-free `u`; the mean of `f` is discarded.
pub fn inverse_laplacian(f: &ScalarField) -> Result<ScalarField> {
    f.check_finite()?;
    let mut spec = Spectrum::forward(f);
    spec.apply_symbol(inverse_laplacian_symbol);
    Ok(spec.into_field())
}

pub fn laplacian(f: &ScalarField) -> Result<ScalarField> {
    f.check_finite()?;
    let mut spec = Spectrum::forward(f);
    spec.apply_symbol(|xi| Complex64::new(-norm_sqr(xi), 0.0));
    Ok(spec.into_field())
}

pub fn derivative(f: &ScalarField, axis: usize) -> Result<ScalarField> {
    check_axis(f.grid(), axis)?;
    f.check_finite()?;
    let mut spec = Spectrum::forward(f);
    spec.apply_symbol(|xi| Complex64::new(0.0, xi[axis]));
    Ok(spec.into_field())
}

pub fn gradient(f: &ScalarField) -> Result<VectorField> {
    f.check_finite()?;
    let spec = Spectrum::forward(f);
    let comps = (0..f.grid().dim())
        .map(|axis| spec.map_symbol(|xi| Complex64::new(0.0, xi[axis])).into_field())
        .collect();
    VectorField::new(comps)
}

pub fn divergence(v: &VectorField) -> Result<ScalarField> {
    v.check_finite()?;
    let grid = *v.grid();
    let mut acc = Spectrum::zeros(grid);
    for (axis, comp) in v.components().iter().enumerate() {
        let spec = Spectrum::forward(comp).map_symbol(|xi| Complex64::new(0.0, xi[axis]));
        acc.add_assign(&spec)?;
    }
    Ok(acc.into_field())
}

/// Largest antisymmetric derivative `|d_i v_j - d_j v_i|` over all pairs and points.
pub fn max_curl(v: &VectorField) -> Result<f64> {
    let d = v.dim();
    let mut worst: f64 = 0.0;
    for i in 0..d {
        for j in (i + 1)..d {
            let a = derivative(v.component(j), i)?;
            let b = derivative(v.component(i), j)?;
            worst = worst.max(a.sub(&b)?.max_abs());
        }
    }
    Ok(worst)
}

/// Orthogonal projection onto divergence-free fields, `I + R (x) R`.
///
/// The mean flow (zero mode) is divergence-free and passes through unchanged.
pub fn leray_project(v: &VectorField) -> Result<VectorField> {
    v.check_finite()?;
    let grid = *v.grid();
    let d = v.dim();
    let specs: Vec<Spectrum> = v.components().iter().map(Spectrum::forward).collect();
    let mut out: Vec<Spectrum> = specs.clone();
    for s in 0..grid.spectral_len() {
        let xi = grid.wavevector(s);
        let r2 = norm_sqr(&xi[..d]);
        if r2 == 0.0 {
            continue;
        }
        let dot: Complex64 = (0..d).map(|k| specs[k].coeffs()[s] * xi[k]).sum();
        for (k, o) in out.iter_mut().enumerate() {
            o.coeffs_mut()[s] -= dot * (xi[k] / r2);
        }
    }
    VectorField::new(out.into_iter().map(Spectrum::into_field).collect())
}

/// Discrete periodic convolution `sum_k K[k] f[x - k]`.
///
/// `kernel` is laid out with zero displacement at sample 0 (see
/// [`GridSpec::offset`](super::GridSpec::offset)); no `h^d` factor is applied.
pub fn circular_convolution(f: &ScalarField, kernel: &ScalarField) -> Result<ScalarField> {
    f.same_grid(kernel)?;
    f.check_finite()?;
    kernel.check_finite()?;
    let mut spec = Spectrum::forward(f);
    let k = Spectrum::forward(kernel);
    for (a, b) in spec.coeffs_mut().iter_mut().zip(k.coeffs()) {
        *a *= b;
    }
    Ok(spec.into_field())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::spectral::grid::GridSpec;

    fn g2(n: usize) -> GridSpec {
        GridSpec::periodic_2pi(2, n).unwrap()
    }

    fn close(a: &ScalarField, b: &ScalarField, tol: f64) {
        let diff = a.sub(b).unwrap().max_abs();
        let scale = b.max_abs().max(1.0);
        assert!(diff <= tol * scale, "difference {diff:e} exceeds {tol:e}");
    }

    #[test]
    fn riesz_of_sine_is_cosine() {
        let g = g2(32);
        let f = ScalarField::from_fn(g, |x| x[0].sin());
        let r = riesz_transform(&f, 0).unwrap();
        close(&r, &ScalarField::from_fn(g, |x| x[0].cos()), 1e-12);
    }

    #[test]
    fn riesz_of_oblique_mode() {
        let g = g2(32);
        let f = ScalarField::from_fn(g, |x| (x[0] + 2.0 * x[1]).sin());
        let r = riesz_transform(&f, 1).unwrap();
        let expected = ScalarField::from_fn(g, |x| 2.0 / 5f64.sqrt() * (x[0] + 2.0 * x[1]).cos());
        close(&r, &expected, 1e-12);
    }

    #[test]
    fn riesz_of_constant_vanishes() {
        let g = GridSpec::periodic_2pi(3, 8).unwrap();
        for axis in 0..3 {
            let r = riesz_transform(&ScalarField::constant(g, 4.2), axis).unwrap();
            assert!(r.max_abs() < 1e-14);
        }
    }

    #[test]
    fn riesz_rejects_bad_axis_and_nan() {
        let g = g2(16);
        let f = ScalarField::zeros(g);
        assert!(matches!(
            riesz_transform(&f, 2),
            Err(Error::AxisOutOfRange { axis: 2, dim: 2 })
        ));
        let mut bad = f.clone();
        bad.values_mut()[0] = f64::NAN;
        assert!(matches!(riesz_transform(&bad, 0), Err(Error::NonFinite(_))));
    }

    #[test]
    fn inverse_laplacian_examples() {
        let g = g2(32);
        let minus_sin = ScalarField::from_fn(g, |x| -x[0].sin());
        close(
            &inverse_laplacian(&minus_sin).unwrap(),
            &ScalarField::from_fn(g, |x| x[0].sin()),
            1e-12,
        );
        assert!(inverse_laplacian(&ScalarField::zeros(g)).unwrap().max_abs() == 0.0);

        let g3 = GridSpec::periodic_2pi(3, 16).unwrap();
        let f = ScalarField::from_fn(g3, |x| (2.0 * x[1]).cos());
        let u = inverse_laplacian(&f).unwrap();
        close(&u, &ScalarField::from_fn(g3, |x| -0.25 * (2.0 * x[1]).cos()), 1e-12);
        assert!(u.mean().abs() < 1e-15);
    }

    #[test]
    fn derivative_examples() {
        let g = g2(32);
        let grad = gradient(&ScalarField::from_fn(g, |x| x[0].sin())).unwrap();
        close(grad.component(0), &ScalarField::from_fn(g, |x| x[0].cos()), 1e-12);
        assert!(grad.component(1).max_abs() < 1e-13);

        let f = ScalarField::from_fn(g, |x| (x[0] + 2.0 * x[1]).sin());
        close(&laplacian(&f).unwrap(), &f.scale(-5.0), 1e-12);
    }

    #[test]
    fn divergence_of_curl_type_field_vanishes() {
        let g = g2(32);
        let psi = ScalarField::from_fn(g, |x| (x[0] - x[1]).sin() * (2.0 * x[1]).cos());
        let grad = gradient(&psi).unwrap();
        let v = VectorField::new(vec![grad.component(1).scale(-1.0), grad.component(0).clone()])
            .unwrap();
        assert!(divergence(&v).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn divergence_of_gradient_is_laplacian() {
        let g = GridSpec::new(3, 16, 5.0).unwrap();
        let f = ScalarField::from_fn(g, |x| (-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2])).exp());
        let a = divergence(&gradient(&f).unwrap()).unwrap();
        let b = laplacian(&f).unwrap();
        assert!(a.relative_l2_error(&b).unwrap() < 1e-12);
    }

    #[test]
    fn leray_examples() {
        let g = g2(32);
        let shear = VectorField::from_fn(g, |x, out| {
            out[0] = x[1].sin();
            out[1] = 0.0;
        });
        let p = leray_project(&shear).unwrap();
        assert!(p.sub(&shear).unwrap().max_abs() < 1e-12);

        let f = ScalarField::from_fn(g, |x| (x[0] + x[1]).cos() + (3.0 * x[1]).sin());
        let p = leray_project(&gradient(&f).unwrap()).unwrap();
        assert!(p.max_abs() < 1e-12);

        let mixed = VectorField::from_fn(g, |x, out| {
            out[0] = x[0].sin() + x[1].cos();
            out[1] = (x[0] * 2.0).cos() * x[1].sin();
        });
        let p = leray_project(&mixed).unwrap();
        assert!(divergence(&p).unwrap().max_abs() < 1e-12);
        let pp = leray_project(&p).unwrap();
        assert!(pp.sub(&p).unwrap().max_abs() < 1e-12);
    }
}
