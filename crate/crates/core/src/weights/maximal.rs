use serde::Serialize;

use crate::error::{Error, Result};
use crate::spectral::{circular_convolution, riesz_transform, GridSpec, ScalarField};

use super::norms::{weighted_norm, WeightSpec};

/// Normalised indicator of the discrete ball `|offset| <= radius`, laid out
/// for [`circular_convolution`].
pub fn ball_kernel(grid: &GridSpec, radius: f64) -> Result<ScalarField> {
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::InvalidParameter(format!("ball radius {radius}")));
    }
    let half = 0.5 * grid.length();
    if radius > half {
        return Err(Error::SupportTooLarge { support: radius, allowed: half });
    }
    let mut values: Vec<f64> =
        (0..grid.len()).map(|i| f64::from(u8::from(grid.offset_radius(i) <= radius))).collect();
    let count: f64 = values.iter().sum();
    values.iter_mut().for_each(|v| *v /= count);
    ScalarField::new(*grid, values)
}

/// `max_{R in radii}` of the ball average of `|f|` around every grid point.
pub fn maximal_function(f: &ScalarField, radii: &[f64]) -> Result<ScalarField> {
    if radii.is_empty() {
        return Err(Error::InvalidParameter("empty radius set".into()));
    }
    f.check_finite()?;
    let abs = f.map(f64::abs);
    let mut out: Option<ScalarField> = None;
    for &radius in radii {
        let avg = circular_convolution(&abs, &ball_kernel(f.grid(), radius)?)?;
        out = Some(match out {
            None => avg,
            Some(acc) => acc.zip_with(&avg, f64::max)?,
        });
    }
    Ok(out.expect("non-empty radius set"))
}

#[derive(Debug, Clone, PartialEq)]
pub enum BoundedOperator {
    /// Riesz transform along a zero-based axis.
    Riesz { axis: usize },
    Maximal { radii: Vec<f64> },
}

impl BoundedOperator {
    pub fn apply(&self, f: &ScalarField) -> Result<ScalarField> {
        match self {
            Self::Riesz { axis } => riesz_transform(f, *axis),
            Self::Maximal { radii } => maximal_function(f, radii),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OperatorBound {
    /// Largest ratio over the corpus.
    pub constant: f64,
    pub ratios: Vec<f64>,
}

/// `max_f ||op f||_{L^p_w} / ||f||_{L^p_w}` over the corpus.
pub fn operator_bound_estimate(
    op: &BoundedOperator,
    corpus: &[ScalarField],
    p: f64,
    spec: &WeightSpec,
) -> Result<OperatorBound> {
    spec.require_ap()?;
    if !(p.is_finite() && p > 1.0) {
        return Err(Error::InvalidParameter(format!("Lebesgue exponent p = {p}")));
    }
    if corpus.is_empty() {
        return Err(Error::InsufficientData("empty corpus".into()));
    }
    let ratios = corpus
        .iter()
        .enumerate()
        .map(|(k, f)| {
            let base = weighted_norm(f, p, spec)?;
            if base == 0.0 {
                return Err(Error::ZeroNorm(k));
            }
            Ok(weighted_norm(&op.apply(f)?, p, spec)? / base)
        })
        .collect::<Result<Vec<_>>>()?;
    let constant = ratios.iter().copied().fold(0.0, f64::max);
    Ok(OperatorBound { constant, ratios })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_has_unit_mass_and_symmetry() {
        let grid = GridSpec::new(2, 32, 8.0).unwrap();
        let k = ball_kernel(&grid, 1.3).unwrap();
        assert!((k.values().iter().sum::<f64>() - 1.0).abs() < 1e-14);
        assert!(k.values()[0] > 0.0);
        assert_eq!(k.values()[grid.flatten([1, 0, 0])], k.values()[grid.flatten([31, 0, 0])]);
        assert!(matches!(ball_kernel(&grid, 4.5), Err(Error::SupportTooLarge { .. })));
    }

    #[test]
    fn constants_and_zero() {
        let grid = GridSpec::new(3, 16, 8.0).unwrap();
        let m = maximal_function(&ScalarField::constant(grid, -2.5), &[0.5, 1.0, 3.0]).unwrap();
        assert!(m.values().iter().all(|v| (v - 2.5).abs() < 1e-13));
        let z = maximal_function(&ScalarField::zeros(grid), &[1.0]).unwrap();
        assert!(z.max_abs() < 1e-300);
    }

    #[test]
    fn gaussian_bump_at_origin() {
        let grid = GridSpec::new(2, 128, 16.0).unwrap();
        let f = ScalarField::from_fn(grid, |x| (-(x[0] * x[0] + x[1] * x[1])).exp());
        let radii = [0.25, 0.5, 1.0, 2.0];
        let m = maximal_function(&f, &radii).unwrap();
        let origin = grid.flatten([64, 64, 0]);
        // direct average over the smallest discrete ball around the origin
        let (mut sum, mut count) = (0.0, 0.0);
        for i in 0..grid.len() {
            if grid.radius(i) <= radii[0] {
                sum += f.values()[i];
                count += 1.0;
            }
        }
        assert!((m.values()[origin] - sum / count).abs() < 1e-12);
        // dominates |f| up to the averaging error of the smallest ball
        for i in 0..grid.len() {
            assert!(m.values()[i] >= f.values()[i].abs() - 0.05);
        }
    }

    #[test]
    fn pointwise_dominates_smallest_average() {
        let grid = GridSpec::new(2, 32, 6.0).unwrap();
        let f = ScalarField::from_fn(grid, |x| (x[0] * 2.0).sin() * x[1].cos());
        let m = maximal_function(&f, &[0.4, 1.2]).unwrap();
        let small = maximal_function(&f, &[0.4]).unwrap();
        for (a, b) in m.values().iter().zip(small.values()) {
            assert!(a >= b);
        }
    }

    #[test]
    fn maximal_ratio_on_constants_is_one() {
        let grid = GridSpec::new(2, 32, 8.0).unwrap();
        let spec = WeightSpec::new(2, 1.0).unwrap();
        let op = BoundedOperator::Maximal { radii: vec![0.5, 1.0] };
        let b = operator_bound_estimate(&op, &[ScalarField::constant(grid, 3.0)], 2.0, &spec)
            .unwrap();
        assert!((b.constant - 1.0).abs() < 1e-13);
    }

    #[test]
    fn riesz_ratio_unweighted_single_modes() {
        let grid = GridSpec::periodic_2pi(2, 32).unwrap();
        let spec = WeightSpec::new(2, 0.0).unwrap();
        let corpus: Vec<_> = [(1.0, 0.0), (1.0, 2.0), (3.0, -1.0)]
            .iter()
            .map(|&(a, b)| ScalarField::from_fn(grid, move |x| (a * x[0] + b * x[1]).sin()))
            .collect();
        for axis in 0..2 {
            let b =
                operator_bound_estimate(&BoundedOperator::Riesz { axis }, &corpus, 2.0, &spec)
                    .unwrap();
            assert!(b.constant <= 1.0 + 1e-10);
        }
    }

    #[test]
    fn zero_corpus_member_rejected() {
        let grid = GridSpec::new(2, 16, 4.0).unwrap();
        let spec = WeightSpec::new(2, 1.0).unwrap();
        let r = operator_bound_estimate(
            &BoundedOperator::Riesz { axis: 0 },
            &[ScalarField::zeros(grid)],
            2.0,
            &spec,
        );
        assert!(matches!(r, Err(Error::ZeroNorm(0))));
    }
}
