mod common;

use common::random_complex;
use lmstab::harness::McOptions;
use lmstab::perturbation::{add_one_cost, estimate_delta_tilde, lipschitz_envelope};
use lmstab::statistics::{
    cocycle_count_bounded, f_alpha, isolated_count, local_statistic, nn_faces_all, BuiltinG, LocalStatistic,
};
use lmstab::topology::components;
use lmstab::{parse_statistic, Ambient, ModelParams, PairedSample, Statistic, WeightDistribution, WeightedComplex};
use proptest::prelude::*;

const STATS: &[&str] = &[
    "nn",
    "nn-alpha:0.7",
    "isolated",
    "cocycle:3",
    "cocycle:6",
    "betti:4",
    "local:one:2",
    "local:isolated:1",
    "local:cocycle:2",
    "local:components:3",
];

fn assert_close(a: f64, b: f64, what: &str) {
    assert!((a - b).abs() <= 1e-9 * (1.0 + a.abs().max(b.abs())), "{what}: {a} vs {b}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn statistics_are_isomorphism_invariant(
        seed in any::<u64>(),
        perm in Just((0..8usize).collect::<Vec<_>>()).prop_shuffle(),
    ) {
        let x = random_complex(8, 2, 0.3, seed);
        let y = x.permuted(&perm).unwrap();
        for text in STATS {
            let f = parse_statistic(text).unwrap();
            assert_close(f.evaluate(&x), f.evaluate(&y), text);
        }
    }

    #[test]
    fn add_one_costs_respect_lipschitz(seed in any::<u64>(), w in 0.01f64..5.0, w2 in 0.01f64..5.0) {
        let x = random_complex(8, 2, 0.3, seed);
        let tau = seed % x.ambient().top_count();
        for text in STATS.iter().filter(|s| **s != "nn") {
            let f = parse_statistic(text).unwrap();
            let h = f.lipschitz(2);
            let add = add_one_cost(f.as_ref(), &x, tau, w).abs();
            prop_assert!(add <= lipschitz_envelope(&h, true, w, false, w2) + 1e-9, "{} add {}", text, add);
            let moved = (f.evaluate(&x.with_simplex(tau, w)) - f.evaluate(&x.with_simplex(tau, w2))).abs();
            prop_assert!(moved <= lipschitz_envelope(&h, true, w, true, w2) + 1e-9, "{} move {}", text, moved);
        }
    }

    #[test]
    fn nn_weight_changes_respect_lipschitz(seed in any::<u64>(), w in 0.0f64..20.0) {
        let params = ModelParams::new(7, 2, 1.0, WeightDistribution::Exponential { mean: 7.0 }).unwrap();
        let x = PairedSample::new(&params, seed).unwrap().primary();
        let tau = seed % x.ambient().top_count();
        let f = parse_statistic("nn").unwrap();
        let old = x.weight(tau).unwrap();
        let change = (f.evaluate(&x) - f.evaluate(&x.with_simplex(tau, w))).abs();
        prop_assert!(change <= f.lipschitz(2).eval(old, w) + 1e-9);
    }
}

#[test]
fn coupling_identities_hold_per_sample() {
    let params = ModelParams::new(12, 2, 1.0, WeightDistribution::Exponential { mean: 12.0 }).unwrap();
    for seed in 0..200u64 {
        let s = PairedSample::new(&params, seed).unwrap();
        let nn = nn_faces_all(&s);
        for alpha in [0.5, 2.0, 6.0] {
            let thresholded = s.threshold(alpha);
            let beyond = nn.iter().filter(|&&v| v > alpha).count();
            assert_eq!(isolated_count(&thresholded), beyond);
            let capped: f64 = nn.iter().map(|v| v.min(alpha)).sum();
            assert_close(f_alpha(&thresholded, alpha), capped, "f_alpha");
        }
    }
}

#[test]
fn graph_cocycles_count_components() {
    for seed in 0..50u64 {
        let x = random_complex(10, 1, 0.15, seed);
        assert_eq!(cocycle_count_bounded(&x, 10), components(&x).len());
    }
}

#[test]
fn cocycle_add_one_cost_is_nonpositive() {
    let f = parse_statistic("cocycle:5").unwrap();
    for seed in 0..400u64 {
        let x = random_complex(8, 2, 0.15, seed);
        for tau in [seed % 56, (seed * 13 + 5) % 56] {
            let cost = add_one_cost(f.as_ref(), &x, tau, 1.0);
            assert!(cost <= 0.0, "seed={seed} tau={tau} cost={cost}");
            assert_eq!(cost, cost.round());
        }
    }
}

#[test]
fn all_faces_maximal_costs_exactly_minus_one() {
    let amb = Ambient::new(9, 2).unwrap();
    let tau = amb.rank_of(&[0, 1, 2]);
    let far = WeightedComplex::new(amb.clone(), vec![(amb.rank_of(&[4, 5, 6]), 1.0)]).unwrap();
    for m in 3..6 {
        let f = parse_statistic(&format!("cocycle:{m}")).unwrap();
        assert_eq!(add_one_cost(f.as_ref(), &far, tau, 1.0), -1.0);
        assert_eq!(add_one_cost(f.as_ref(), &WeightedComplex::empty(amb.clone()), tau, 1.0), -1.0);
    }
}

#[test]
fn local_cocycle_functional_matches_component_count() {
    for seed in 0..40u64 {
        let x = random_complex(8, 2, 0.2, seed);
        for m in 1..6 {
            let local = local_statistic(&x, &BuiltinG::Cocycle, m);
            assert_close(local, cocycle_count_bounded(&x, m) as f64, &format!("seed={seed} m={m}"));
        }
    }
}

#[test]
fn stabilized_differences_vanish_exactly() {
    let opts = McOptions::new(60, 9);
    let params = ModelParams::new(10, 2, 0.15, WeightDistribution::Exponential { mean: 1.0 }).unwrap();
    let check = |f: &dyn Statistic, k: usize| {
        let est = estimate_delta_tilde(f, &params, k, &opts).unwrap();
        assert_eq!(est.point_estimate, 0.0, "{} k={k}", f.name());
        assert!(est.zero_variance);
    };
    for k in 1..=3 {
        check(parse_statistic("nn-alpha:0.8").unwrap().as_ref(), k);
    }
    for g in BuiltinG::ALL {
        for m in 1..=2 {
            check(&LocalStatistic::builtin(g, m), 2 * m);
        }
    }
    for text in ["isolated", "cocycle:2", "betti:2"] {
        check(parse_statistic(text).unwrap().as_ref(), 4);
    }
}
