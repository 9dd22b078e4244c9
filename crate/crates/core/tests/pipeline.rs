use std::sync::Arc;

use ncpot::matcore::random::random_tuple;
use ncpot::potential::{build_potential, PotentialConfig};
use ncpot::{DemilinearMap, FreeDomain, FreeMap, MatrixTuple, NcPoly, SeedStream};
use proptest::prelude::*;

fn product_map() -> FreeMap {
    FreeMap::black_box(
        2,
        1,
        Arc::new(|x: &MatrixTuple| {
            let (a, b) = (x.component(0), x.component(1));
            MatrixTuple::new(vec![&(a * b) * a])
        }),
    )
}

#[test]
fn block_derivative_matches_limit_for_black_box() {
    let f = product_map();
    let mut rng = SeedStream::new(1).rng();
    for n in 1..=3 {
        let x = random_tuple(2, n, 1.0, &mut rng);
        let h = random_tuple(2, n, 1.0, &mut rng);
        let exact = f.nc_derivative(&x, &h).unwrap();
        let limit = f.nc_derivative_limit(&x, &h, &[1e-2, 5e-3, 2.5e-3, 1.25e-3]).unwrap();
        assert!(!limit.diverging);
        assert!(exact.dist(&limit.value) < 1e-5 * (1.0 + exact.frobenius_norm()));
    }
}

#[test]
fn black_box_and_symbolic_derivatives_agree() {
    let sym = FreeMap::from_poly(NcPoly::parse("x1*x2*x1", 2, 1).unwrap());
    let bb = product_map();
    let mut rng = SeedStream::new(2).rng();
    let x = random_tuple(2, 3, 1.0, &mut rng);
    let h = random_tuple(2, 3, 1.0, &mut rng);
    let a = sym.nc_derivative(&x, &h).unwrap();
    let b = bb.nc_derivative(&x, &h).unwrap();
    assert!(a.dist(&b) < 1e-12);
}

#[test]
fn reconstruction_differs_from_potential_by_a_constant() {
    let f = FreeMap::from_poly(NcPoly::parse("x1*x2 + x2^2", 2, 1).unwrap());
    let t = f.derivative_as_demilinear().unwrap();
    let domain = FreeDomain::full(2);
    let config = PotentialConfig {
        samples: 64,
        ..PotentialConfig::default()
    };
    let fhat = build_potential(&t, &domain, &[1, 2], config).unwrap();
    let mut rng = SeedStream::new(3).rng();
    let report = fhat.offset_against(&f, 4, &mut rng).unwrap();
    assert!(report.non_scalar_residual < 1e-8, "{report:?}");
    assert!(report.spread < 1e-8, "{report:?}");
}

#[test]
fn commutator_fails_the_curl_test() {
    let t = DemilinearMap::from_poly(ncpot::DemiPoly::parse("x1*h1 - h1*x1", 1, 1).unwrap());
    let mut rng = SeedStream::new(4).rng();
    let report = t.curl_free_test(&FreeDomain::full(1), &[2], 5, &mut rng, 1e-9).unwrap();
    assert!(!report.curl_free);
    assert!(report.worst_point.is_some());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn derivatives_are_exact_and_integrate_back(seed in any::<u64>(), g in 1usize..=3) {
        let mut rng = SeedStream::new(seed).rng();
        let p = NcPoly::random(g, 1, 4, 5, &mut rng);
        let report = p.formal_derivative().antiderivative();
        prop_assert!(report.exact);
        let q = report.potential.unwrap();
        let x = random_tuple(g, 2, 1.0, &mut rng);
        let lhs = q.eval(&x).unwrap();
        let rhs = p.without_constant().eval(&x).unwrap();
        prop_assert!(lhs.dist(&rhs) < 1e-9 * (1.0 + rhs.frobenius_norm()));
    }

    #[test]
    fn formal_and_block_derivatives_agree(seed in any::<u64>(), n in 1usize..=3) {
        let mut rng = SeedStream::new(seed).rng();
        let p = NcPoly::random(2, 1, 4, 4, &mut rng);
        let x = random_tuple(2, n, 1.0, &mut rng);
        let h = random_tuple(2, n, 1.0, &mut rng);
        let block = FreeMap::from_poly(p.clone()).nc_derivative(&x, &h).unwrap();
        let formal = p.formal_derivative().eval(&x, &h).unwrap();
        prop_assert!(block.dist(&formal) < 1e-10 * (1.0 + formal.frobenius_norm()));
    }

    #[test]
    fn exact_maps_are_curl_free(seed in any::<u64>()) {
        let mut rng = SeedStream::new(seed).rng();
        let p = NcPoly::random(2, 1, 3, 4, &mut rng);
        let t = DemilinearMap::from_poly(p.formal_derivative());
        let x = random_tuple(2, 2, 1.0, &mut rng);
        let h = random_tuple(2, 2, 1.0, &mut rng);
        let k = random_tuple(2, 2, 1.0, &mut rng);
        let curl = t.free_curl(&x, &h, &k).unwrap();
        prop_assert!(curl.frobenius_norm() < 1e-10 * (1.0 + x.frobenius_norm()).powi(3));
    }
}
