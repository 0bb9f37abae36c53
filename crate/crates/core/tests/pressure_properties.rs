use proptest::prelude::*;
use rieszlab::corpus::{scalar_corpus, velocity_corpus};
use rieszlab::pressure::{
    gaussian_bump_data, green_convolution_pressure, inner_half_box_mask, poisson_pressure, relative_error_up_to_constant,
    riesz_pressure, CutoffSpec,
};
use rieszlab::spectral::{GridSpec, ScalarField, TensorField, VectorField};

fn grids() -> impl Strategy<Value = GridSpec> {
    prop_oneof![Just(GridSpec::periodic_2pi(2, 32).unwrap()), Just(GridSpec::new(3, 16, 4.0).unwrap())]
}

fn forcing(grid: GridSpec, seed: u64) -> TensorField {
    let d = grid.dim();
    TensorField::new(scalar_corpus(grid, d * d, 2, seed)).unwrap()
}

fn close(a: &ScalarField, b: &ScalarField, tol: f64) -> bool {
    let scale = a.max_abs().max(b.max_abs()).max(1e-300);
    a.sub(b).unwrap().max_abs() <= tol * scale
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn riesz_and_poisson_routes_agree(grid in grids(), s1 in any::<u64>(), s2 in any::<u64>()) {
        let u = velocity_corpus(grid, 1, 3, s1).remove(0);
        let f = forcing(grid, s2);
        let p = riesz_pressure(&u, &f).unwrap();
        let q = poisson_pressure(&u, &f).unwrap();
        prop_assert!(q.relative_l2_error(&p).unwrap() < 1e-12);
    }

    #[test]
    fn linear_in_the_forcing(grid in grids(), s1 in any::<u64>(), s2 in any::<u64>(), c in -3.0f64..3.0) {
        let zero = VectorField::zeros(grid);
        let (f, g) = (forcing(grid, s1), forcing(grid, s2));
        let lhs = riesz_pressure(&zero, &f.scale(c).add(&g).unwrap()).unwrap();
        let rhs = riesz_pressure(&zero, &f).unwrap().scale(c)
            .add(&riesz_pressure(&zero, &g).unwrap()).unwrap();
        prop_assert!(close(&lhs, &rhs, 1e-12));
    }

    #[test]
    fn only_the_symmetric_part_matters(grid in grids(), s1 in any::<u64>(), s2 in any::<u64>()) {
        let u = velocity_corpus(grid, 1, 2, s1).remove(0);
        let f = forcing(grid, s2);
        let a = riesz_pressure(&u, &f).unwrap();
        prop_assert!(close(&a, &riesz_pressure(&u, &f.transpose()).unwrap(), 1e-12));
        prop_assert!(close(&a, &riesz_pressure(&u, &f.symmetrized()).unwrap(), 1e-12));
    }

    #[test]
    fn quadratic_in_the_velocity(grid in grids(), seed in any::<u64>(), c in -3.0f64..3.0) {
        let u = velocity_corpus(grid, 1, 2, seed).remove(0);
        let f = TensorField::zeros(grid);
        let a = riesz_pressure(&u, &f).unwrap().scale(c * c);
        prop_assert!(close(&a, &riesz_pressure(&u.scale(c), &f).unwrap(), 1e-12));
    }

    #[test]
    fn isotropic_forcing_adds_no_pressure(grid in grids(), seed in any::<u64>(), c in -3.0f64..3.0) {
        let u = velocity_corpus(grid, 1, 2, seed).remove(0);
        let mut iso = TensorField::zeros(grid);
        for i in 0..grid.dim() {
            iso = iso.with_entry(i, i, ScalarField::constant(grid, c)).unwrap();
        }
        let a = riesz_pressure(&u, &TensorField::zeros(grid)).unwrap();
        prop_assert!(close(&a, &riesz_pressure(&u, &iso).unwrap(), 1e-12));
    }
}

#[test]
fn green_route_matches_riesz_in_two_dimensions() {
    let grid = GridSpec::new(2, 64, 16.0).unwrap();
    let (u, f) = gaussian_bump_data(grid, 1.0).unwrap();
    let reference = riesz_pressure(&u, &f).unwrap();
    let mask = inner_half_box_mask(&grid);
    let narrow = green_convolution_pressure(&u, &f, &CutoffSpec::new(0.5, 1.0).unwrap()).unwrap();
    let wide = green_convolution_pressure(&u, &f, &CutoffSpec::new(1.0, 2.0).unwrap()).unwrap();
    assert!(relative_error_up_to_constant(&narrow, &reference, &mask).unwrap() < 1e-3);
    assert!(relative_error_up_to_constant(&wide, &narrow, &mask).unwrap() < 1e-3);
}

#[test]
fn green_route_converges_under_refinement() {
    let err = |n: usize| {
        let grid = GridSpec::new(2, n, 16.0).unwrap();
        let (u, f) = gaussian_bump_data(grid, 1.0).unwrap();
        let p = green_convolution_pressure(&u, &f, &CutoffSpec::new(1.0, 2.0).unwrap()).unwrap();
        relative_error_up_to_constant(&p, &riesz_pressure(&u, &f).unwrap(), &inner_half_box_mask(&grid)).unwrap()
    };
    let (coarse, fine) = (err(32), err(64));
    assert!(fine < coarse, "{coarse} -> {fine}");
}
