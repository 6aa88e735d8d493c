//! Property tests for invariants that hold for every parameter, point or seed.

use polymer_core::distributions::laws::*;
use polymer_core::lattice::burke;
use polymer_core::lattice::rwre::{self, BetaEnvironment};
use polymer_core::lattice::{path_enumeration, simulate, simulate_ordered, Encoding, FillOrder};
use polymer_core::maps::identities;
use polymer_core::stattest::gof::sidak;
use polymer_core::stattest::ks::ks_two_sample_statistic;
use polymer_core::{Chain, DistributionSpec, ScalarTransform, Temperature};
use proptest::prelude::*;

fn continuous_law() -> impl Strategy<Value = DistributionSpec> {
    let p = || 0.2f64..8.0;
    prop_oneof![
        (p(), p()).prop_map(|(a, b)| gam(a, b)),
        (p(), p()).prop_map(|(a, b)| ig(a, b)),
        (p(), p()).prop_map(|(a, b)| be(a, b)),
        (p(), p()).prop_map(|(a, b)| ib(a, b)),
        (p(), p()).prop_map(|(a, b)| beprime(a, b)),
        (p(), p()).prop_map(|(a, b)| al(a, b)),
        (p(), -3.0f64..3.0).prop_map(|(a, s)| sexp(a, s)),
    ]
}

fn discrete_law() -> impl Strategy<Value = DistributionSpec> {
    let r = || 0.05f64..0.95;
    prop_oneof![
        (r(), -3i64..3, prop_oneof![Just(0.5), Just(1.0), Just(2.0)]).prop_map(|(t, o, s)| ssgeo(t, o, s)),
        (r(), r(), prop_oneof![Just(0.5), Just(1.0)]).prop_map(|(a, b, s)| sdal(a, b, s)),
    ]
}

fn invertible_step() -> impl Strategy<Value = ScalarTransform> {
    prop_oneof![
        Just(ScalarTransform::Reciprocal),
        Just(ScalarTransform::Q),
        Just(ScalarTransform::Qinv),
        Just(ScalarTransform::J),
        Just(ScalarTransform::Negate),
        (0.25f64..4.0, -2.0f64..2.0).prop_map(|(k, h)| ScalarTransform::Affine { k, h }),
    ]
}

fn zero_step() -> impl Strategy<Value = ScalarTransform> {
    prop_oneof![
        Just(ScalarTransform::Reciprocal),
        Just(ScalarTransform::Q),
        Just(ScalarTransform::Qinv),
        (0.5f64..2.0).prop_map(ScalarTransform::scale),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cdf_is_monotone_with_clean_edges(spec in prop_oneof![continuous_law(), discrete_law()]) {
        let (lo, hi) = spec.support();
        prop_assert!(spec.cdf(lo) <= 1e-12 || spec.mass(lo) > 0.0);
        prop_assert!(spec.cdf(hi) >= 1.0 - 1e-12);
        let a = if lo.is_finite() { lo } else { -50.0 };
        let b = if hi.is_finite() { hi } else { 50.0 };
        let mut prev = 0.0;
        for i in 0..=1000 {
            let c = spec.cdf(a + (b - a) * i as f64 / 1000.0);
            prop_assert!(c >= prev - 1e-15 && c <= 1.0 + 1e-15);
            prev = c;
        }
    }

    #[test]
    fn negation_reflects_the_cdf(spec in prop_oneof![continuous_law(), discrete_law()], y in -5.0f64..5.0) {
        let neg = spec.negated();
        prop_assert!((neg.cdf(y) - (1.0 - spec.cdf_lt(-y))).abs() <= 1e-12);
    }

    #[test]
    fn negated_laplace_swaps_rates(a in 0.1f64..10.0, b in 0.1f64..10.0, y in -5.0f64..5.0) {
        prop_assert!((al(a, b).negated().cdf(y) - al(b, a).cdf(y)).abs() <= 1e-12);
    }

    #[test]
    fn chains_invert(steps in prop::collection::vec(invertible_step(), 1..6), x in 0.02f64..0.98) {
        let chain = Chain::of(&steps);
        let inv = chain.inverse().unwrap();
        if let Ok(y) = chain.apply(x) {
            prop_assume!(y.abs() < 1e6);
            let back = inv.apply(y).unwrap();
            prop_assert!((back - x).abs() <= 1e-8, "{steps:?}: {x} -> {y} -> {back}");
        }
    }

    #[test]
    fn zero_images_compose(steps in prop::collection::vec(zero_step(), 1..6), x in 0.1f64..4.0) {
        let eps = 1e-3;
        let chain = Chain::of(&steps);
        let zero = chain.zero_image().unwrap();
        // Walk the zero-temperature values; Q needs a positive argument bounded away from 0.
        let mut v = x;
        let mut bound = 1e-9;
        for s in &steps {
            match s {
                ScalarTransform::Q => {
                    prop_assume!(v >= 0.1);
                    bound += -eps * polymer_core::transforms::log1mexp(-v / eps);
                }
                ScalarTransform::Qinv => bound += eps * std::f64::consts::LN_2,
                ScalarTransform::Affine { k, .. } => bound += eps * k.ln().abs(),
                _ => {}
            }
            v = Chain::of(&[*s]).zero_image().unwrap().apply(v).unwrap();
        }
        let pre = chain.conjugate(x, eps);
        prop_assume!(pre.is_ok());
        let lim = zero.apply(x).unwrap();
        prop_assert!((pre.unwrap() - lim).abs() <= bound, "{steps:?} at {x}");
        prop_assert_eq!(lim, v);
    }

    #[test]
    fn identities_hold_on_any_seed(seed in any::<u64>()) {
        for e in identities::registry() {
            let r = e.check(200, seed).unwrap();
            prop_assert!(r.passed(), "{} seed {seed}", e.key);
        }
    }

    #[test]
    fn sidak_split_recovers_the_family_level(alpha in 1e-4f64..0.2, k in 1usize..200) {
        let a = sidak(alpha, k);
        prop_assert!(a <= alpha + 1e-15);
        prop_assert!((1.0 - (1.0 - a).powi(k as i32) - alpha).abs() <= 1e-12);
    }

    #[test]
    fn two_sample_ks_is_a_symmetric_distance(
        a in prop::collection::vec(-10.0f64..10.0, 1..60),
        b in prop::collection::vec(-10.0f64..10.0, 1..60),
    ) {
        let d = ks_two_sample_statistic(&a, &b);
        prop_assert!((0.0..=1.0).contains(&d));
        prop_assert_eq!(d, ks_two_sample_statistic(&b, &a));
        prop_assert_eq!(ks_two_sample_statistic(&a, &a), 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn fill_order_does_not_change_any_bit(k in 0usize..64, n in 1usize..15, m in 1usize..15, seed in any::<u64>()) {
        let reg = burke::registry();
        let e = &reg[k % reg.len()];
        let rows = simulate_ordered(&e.model, n, m, &e.boundary, seed, FillOrder::Rows).unwrap();
        for order in [FillOrder::Columns, FillOrder::AntiDiagonals] {
            let other = simulate_ordered(&e.model, n, m, &e.boundary, seed, order).unwrap();
            prop_assert_eq!(rows.to_csv(), other.to_csv(), "{} {:?}", e.key, order);
        }
        prop_assert!(rows.consistency().unwrap().ok(), "{}", e.key);
    }

    #[test]
    fn zero_temperature_z_is_the_path_minimum(k in 0usize..64, n in 1usize..7, m in 1usize..7, seed in any::<u64>()) {
        let zero: Vec<_> = burke::registry().iter().filter(|e| e.model.temperature == Temperature::Zero).collect();
        let e = zero[k % zero.len()];
        let g = simulate(&e.model, n, m, &e.boundary, seed).unwrap();
        for a in 0..=n {
            for b in 0..=m {
                let z = match g.encoding {
                    Encoding::Index { scale } => g.z_index(a, b).unwrap() as f64 * scale,
                    _ => g.z(a, b),
                };
                prop_assert_eq!(path_enumeration(&g, a, b).unwrap(), z, "{} ({},{})", e.key, a, b);
            }
        }
    }

    #[test]
    fn walk_recursion_matches_enumeration(
        values in prop::collection::vec(0.0f64..=1.0, 64),
        n in -1i64..10,
        m in 1usize..=8,
    ) {
        let env = BetaEnvironment::new(8, 8, values).unwrap();
        let r = rwre::rwre_partition(&env, n, m).unwrap();
        prop_assert!((0.0..=1.0 + 1e-12).contains(&r));
        prop_assert!((r - rwre::path_enumeration(&env, n, m).unwrap()).abs() <= 1e-12);
        prop_assert!((r - rwre::sheared_partition(&env, n, m).unwrap()).abs() <= 1e-12);
    }
}
