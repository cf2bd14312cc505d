use spectral_lab::analysis::shifted_divisor_count;
use spectral_lab::counting::{counting_function, counting_grid, shifted_pair_count, IndexBase};
use spectral_lab::descriptor::parse_product;
use spectral_lab::spectra::{Family, ProductOperator};
use spectral_lab::weyl::{equal_order_coefficients, weyl_coefficients, WeylExpansion};
use spectral_lab::zeta::{laurent_at_pole, ExtrapolationConfig, ZetaEvaluator};

fn folded_square(c: f64) -> ProductOperator {
    let f = Family::folded(c, 1).unwrap();
    ProductOperator::new(f.clone(), f)
}

#[test]
fn quadrant_model_counts_four_times_pair_count() {
    for c in [1.0, 2.0, 7.0, 2.5] {
        let op = folded_square(c);
        for lambda in [10.0, 1234.5, 1e6, 3.3e8] {
            let n = counting_function(&op, lambda).unwrap();
            let d = shifted_pair_count(c, lambda, IndexBase::FromZero).unwrap();
            assert_eq!(n, 4 * d, "c={c} λ={lambda}");
        }
        // D_c(λ) = N(λ²)/4
        let d = shifted_divisor_count(c, 1e4, IndexBase::FromZero).unwrap();
        assert_eq!(4 * d, counting_function(&op, 1e8).unwrap());
    }
}

/// Δ_c oscillates, so single samples can tick upwards (c = 2 does between
/// 10⁴ and 10⁶); the supremum over each two-decade window must fall.
#[test]
fn weyl_expansion_error_shrinks() {
    for c in 1..=20 {
        let c = c as f64;
        let (c1, c1p) = equal_order_coefficients(c).unwrap();
        let w = WeylExpansion {
            z0: 0.5,
            coeff_log: c1,
            coeff_plain: c1p,
            remainder_exponent_hint: 0.0,
        };
        let op = folded_square(c);
        let err = |l: f64| (counting_function(&op, l).unwrap() as f64 - w.predict(l)).abs() / l.sqrt();
        let windows: Vec<f64> = [3.0, 5.0, 7.0]
            .iter()
            .map(|a| {
                (0..=40)
                    .map(|i| err(10f64.powf(a + i as f64 / 20.0)))
                    .fold(0.0, f64::max)
            })
            .collect();
        assert!(windows[0] > windows[1] && windows[1] > windows[2], "c = {c}: {windows:?}");
        assert!(err(1e8) < err(1e4), "c = {c}");
    }
}

#[test]
fn closed_form_route_matches_extrapolation_for_mixed_factors() {
    let op = parse_product("circle(c=0)xfolded(c=3)").unwrap();
    let (w, _) = weyl_coefficients(&op, 1e-13).unwrap();
    let f = ZetaEvaluator::for_operator(&op);
    let ld = laurent_at_pole(&f, 0.5, 2, ExtrapolationConfig::default()).unwrap();
    assert!((ld.a2 - 1.0).abs() < 1e-8);
    assert!((2.0 * ld.a1 - 4.0 - w.coeff_plain).abs() < 1e-7);
}

#[test]
fn higher_power_factors() {
    // ((n²+1)(m²+1))² ≤ λ is the k = 1 count at √λ
    let k1 = parse_product("circle(c=1)xcircle(c=1)").unwrap();
    let k2 = parse_product("circle(c=1,k=2)xcircle(c=1,k=2)").unwrap();
    for lambda in [1e4, 1e8, 1e12] {
        assert_eq!(
            counting_function(&k2, lambda).unwrap(),
            counting_function(&k1, lambda.sqrt()).unwrap()
        );
    }
    let (w1, _) = weyl_coefficients(&k1, 1e-13).unwrap();
    let (w2, _) = weyl_coefficients(&k2, 1e-13).unwrap();
    assert_eq!(w2.z0, 0.25);
    assert!((w2.coeff_log - w1.coeff_log / 2.0).abs() < 1e-14);
    assert!((w2.coeff_plain - w1.coeff_plain).abs() < 1e-12);
}

#[test]
fn grid_results_do_not_depend_on_pool_size() {
    let op = parse_product("circle(c=2)xcircle(c=3,k=2)").unwrap();
    let grid: Vec<f64> = (0..60).map(|i| 10f64.powf(1.0 + i as f64 / 6.0)).collect();
    let at = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| counting_grid(&op, &grid))
            .into_iter()
            .map(Result::unwrap)
            .collect::<Vec<_>>()
    };
    assert_eq!(at(1), at(4));
}
