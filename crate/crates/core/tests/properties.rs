//! Randomized invariants over small systems.

use fatpoints::combinatorics::{forms, n_bounds, to_count};
use fatpoints::oracle::{self, FieldConfig};
use fatpoints::prover::{plan, verify, Certificate, Prover, ProverConfig, Rule};
use fatpoints::systems::classify;
use fatpoints::LinearSystem;
use num_bigint::BigInt;
use proptest::prelude::*;

fn small_system() -> impl Strategy<Value = LinearSystem> {
    (2u32..=4, 2u32..=5, proptest::collection::vec((1u32..=4, 0u64..=6), 0..3)).prop_filter_map(
        "too many columns",
        |(r, d, pts)| {
            let s = LinearSystem::with_points(r, d, &pts).ok()?;
            (s.columns() <= BigInt::from(200)).then_some(s)
        },
    )
}

fn nodes_case() -> impl Strategy<Value = (u32, u32, u64)> {
    (2u32..=5, 2u32..=6).prop_flat_map(|(r, d)| {
        let top = to_count(&n_bounds(r, d).1).unwrap() + 2;
        (Just(r), Just(d), 1..=top)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn text_round_trip(s in small_system()) {
        let back: LinearSystem = s.to_string().parse().unwrap();
        prop_assert_eq!(back.to_string(), s.to_string());
        prop_assert_eq!(back, s);
    }

    #[test]
    fn oracle_never_below_expected(s in small_system(), seed in any::<u64>()) {
        let rep = oracle::dimension(&s, &FieldConfig::with_seed(seed)).unwrap();
        prop_assert!(rep.dim >= rep.expected, "{}: {} < {}", s, rep.dim, rep.expected);
        prop_assert!(rep.dim < forms(s.r(), s.d()));
    }

    #[test]
    fn one_more_node_costs_at_most_one((r, d, n) in nodes_case()) {
        let cfg = FieldConfig::default();
        let a = oracle::dimension(&LinearSystem::nodes(r, d, n).unwrap(), &cfg).unwrap().dim;
        let b = oracle::dimension(&LinearSystem::nodes(r, d, n + 1).unwrap(), &cfg).unwrap().dim;
        prop_assert!(b <= a);
        prop_assert!(b >= (&a - (r + 1)).max(BigInt::from(-1)));
    }

    #[test]
    fn classification_matches_oracle((r, d, n) in nodes_case()) {
        let s = LinearSystem::nodes(r, d, n).unwrap();
        let dim = oracle::dimension(&s, &FieldConfig::default()).unwrap().dim;
        let want = classify::classify(r, d, n).closed_form_dim.unwrap_or_else(|| s.expected_dim());
        prop_assert_eq!(dim, want);
    }

    #[test]
    fn certificates_verify_and_agree((r, d, n) in nodes_case()) {
        let mut p = Prover::new(ProverConfig::default());
        let cert = p.prove(r, d, n).unwrap();
        let back = Certificate::from_json(&cert.to_json()).unwrap();
        prop_assert!(verify(&back, &FieldConfig::with_seed(9)).unwrap().is_accept());
        let s = LinearSystem::nodes(r, d, n).unwrap();
        let dim = oracle::dimension(&s, &FieldConfig::with_seed(4)).unwrap().dim;
        prop_assert_eq!(&cert.root.claim.value, &dim);
    }

    #[test]
    fn step_rule_only_in_high_dimension(r in 2u32..=12, n in 0u64..=40, simple in 0u64..=4) {
        let s = LinearSystem::with_points(r, 3, &[(2, n), (1, simple)]).unwrap();
        if plan(&s).rule == Rule::CubicStep {
            prop_assert!(r >= 8);
        }
    }

    #[test]
    fn tampered_value_rejected((r, d, n) in nodes_case()) {
        let mut cert = Prover::new(ProverConfig::default()).prove(r, d, n).unwrap();
        cert.root.claim.value += 1;
        prop_assert!(!verify(&cert, &FieldConfig::default()).unwrap().is_accept());
    }
}
