use lmstab::bounds::{bound_add_one, bound_corollary, bound_main, gamma_bound, BoundInputs};
use proptest::prelude::*;

fn inputs() -> impl Strategy<Value = BoundInputs> {
    (
        (50.0f64..1e6, 1usize..4, 0.01f64..3.0, 1usize..6),
        (0.1f64..10.0, 1.0f64..5.0, 0.0f64..1.0, 0.0f64..1.0, 0.0f64..1.0, 0.5f64..3.0),
    )
        .prop_map(|((n, d, lambda, k), (s, j, delta, rho, gamma, c))| BoundInputs {
            n,
            d,
            lambda,
            k,
            sigma_sq: s * n.powi(d as i32),
            j,
            delta,
            rho,
            gamma,
            c,
        })
}

type Eval = fn(&BoundInputs) -> lmstab::Result<f64>;
const ALL: [Eval; 3] = [bound_main, bound_add_one, bound_corollary];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn bounds_increase_in_their_error_terms(base in inputs(), bump in 1.01f64..3.0) {
        for eval in ALL {
            let v = eval(&base).unwrap();
            prop_assert!(v.is_finite() && v >= 0.0);
            for field in 0..5 {
                let mut up = base;
                match field {
                    0 => up.delta = base.delta * bump + 0.01,
                    1 => up.j *= bump,
                    2 => up.c *= bump,
                    3 => up.lambda *= bump,
                    _ => up.sigma_sq /= bump,
                }
                prop_assert!(eval(&up).unwrap() >= v, "field {}", field);
            }
        }
        for eval in [bound_main, bound_add_one] {
            let mut up = base;
            up.gamma = (base.gamma * bump + 0.01).min(1.0);
            up.rho = base.rho * bump + 0.01;
            prop_assert!(eval(&up).unwrap() >= eval(&base).unwrap());
        }
        let mut far = base;
        far.k += 1;
        prop_assert!(bound_corollary(&far).unwrap() >= bound_corollary(&base).unwrap());
    }

    #[test]
    fn gamma_bound_grows_with_k(n in 10.0f64..1e5, d in 1usize..4, lambda in 0.01f64..3.0, k in 1usize..8) {
        prop_assert!(gamma_bound(n, d, lambda, k + 1) >= gamma_bound(n, d, lambda, k));
    }
}

#[test]
fn corollary_vanishes_along_admissible_sequences() {
    for d in 1..=3 {
        let mut prev = f64::INFINITY;
        let mut first = None;
        for e in 3..=14 {
            let n = 10f64.powi(e);
            let k = 2;
            let v = bound_corollary(&BoundInputs::new(n, d, 1.0 / d as f64, k)).unwrap();
            assert!(v < prev, "d={d} n={n}: {v} >= {prev}");
            prev = v;
            first.get_or_insert(v);
        }
        assert!(prev < 0.3 * first.unwrap(), "d={d}: {prev}");
    }
}

#[test]
fn invalid_inputs_are_rejected() {
    let mut i = BoundInputs::new(100.0, 1, 1.0, 1);
    i.sigma_sq = 0.0;
    assert!(bound_main(&i).is_err());
    let mut i = BoundInputs::new(100.0, 1, 1.0, 1);
    i.delta = f64::NAN;
    assert!(bound_corollary(&i).is_err());
}
