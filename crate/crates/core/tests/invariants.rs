use lipdist_core::distance::{epsilon_star, EstimateConfig, Method};
use lipdist_core::dyadic::{carleson_box_value, carleson_sup, enlarge, DyadicCube, HalfSpaceSet};
use lipdist_core::gridfn::{parse_function_spec, synthesize};
use lipdist_core::secdiff::{build_s, holder_seminorm};
use proptest::prelude::*;

fn random_set(n: usize, j_max: u32, seed: u64, density: u64) -> HalfSpaceSet {
    HalfSpaceSet::from_predicate(n, j_max, |c| {
        let h = (c.flat() as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ seed.wrapping_mul(c.level() as u64 + 7);
        h % 100 < density
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn box_value_additive(seed in 0u64..10_000, n in 1usize..=2) {
        let a = random_set(n, 5, seed, 40);
        let b = HalfSpaceSet::from_predicate(n, 5, |c| !a.contains(&c) && c.flat() % 3 == 0);
        let u = a.union(&b).unwrap();
        for q in [DyadicCube::unit(n), DyadicCube::from_flat(n, 1, 1), DyadicCube::from_flat(n, 2, 2)] {
            let lhs = carleson_box_value(&u, &q);
            let rhs = carleson_box_value(&a, &q) + carleson_box_value(&b, &q);
            prop_assert!((lhs - rhs).abs() < 1e-12);
        }
    }

    #[test]
    fn profile_monotone_under_inclusion(seed in 0u64..10_000) {
        let a = random_set(1, 9, seed, 30);
        let b = a.union(&random_set(1, 9, seed + 1, 20)).unwrap();
        let ra = carleson_sup(&a, 3..=9, 0.1).unwrap();
        let rb = carleson_sup(&b, 3..=9, 0.1).unwrap();
        for (x, y) in ra.values.iter().zip(&rb.values) {
            prop_assert!(x <= y);
        }
    }

    #[test]
    fn enlarge_contains_and_grows(seed in 0u64..10_000, r in 0.0f64..2.0) {
        let a = random_set(1, 8, seed, 5);
        let small = enlarge(&a, r);
        let big = enlarge(&a, r + 0.5);
        prop_assert!(a.is_subset(&small));
        prop_assert!(small.is_subset(&big));
    }

    #[test]
    fn secdiff_sets_covariant(seed in 0u64..500, k in -2i32..=2, frac in 0.05f64..0.95) {
        let f = synthesize(&parse_function_spec(&format!("lacunary-random s=0.5 levels=6 seed={seed}")).unwrap(), 1, 9).unwrap();
        let lambda = 2f64.powi(k);
        let eps = frac * holder_seminorm(&f, 0.5).unwrap();
        let a = build_s(&f, 0.5, eps, 7, 8).unwrap();
        let b = build_s(&f.scale(lambda), 0.5, lambda * eps, 7, 8).unwrap();
        prop_assert_eq!(a, b);
    }
}

#[test]
fn epsilon_star_homogeneous() {
    let f = synthesize(&parse_function_spec("weierstrass s=1 levels=8").unwrap(), 1, 10).unwrap();
    let cfg = EstimateConfig {
        j_range: 4..=8,
        ..EstimateConfig::default()
    };
    for m in Method::ALL {
        let a = epsilon_star(&f, 1.0, m, &cfg).unwrap();
        let b = epsilon_star(&f.scale(0.25), 1.0, m, &cfg).unwrap();
        assert_eq!(a.eps_star * 0.25, b.eps_star, "{m}");
        assert!(a.monotone(), "{m}: {} sign changes", a.sign_changes);
    }
}
