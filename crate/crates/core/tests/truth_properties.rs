use nalseq::*;
use proptest::prelude::*;

fn truth() -> impl Strategy<Value = Truth> {
    (0.0..=1.0f64, 0.0..0.99f64).prop_map(|(f, c)| TruthValue::new(f, c).unwrap())
}

fn in_bounds(t: Truth) -> bool {
    (0.0..=1.0).contains(&t.frequency()) && (0.0..1.0).contains(&t.confidence())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn outputs_stay_in_bounds(a in truth(), b in truth()) {
        prop_assert!(in_bounds(revise(a, b)));
        prop_assert!(in_bounds(deduce(a, b)));
        let e = expectation(a);
        prop_assert!((0.0..=1.0).contains(&e));
    }

    #[test]
    fn revision_commutes(a in truth(), b in truth()) {
        let (x, y) = (revise(a, b), revise(b, a));
        prop_assert!((x.frequency() - y.frequency()).abs() <= 1e-12);
        prop_assert!((x.confidence() - y.confidence()).abs() <= 1e-12);
    }

    #[test]
    fn revision_keeps_confidence(a in truth(), b in truth()) {
        let c = revise(a, b).confidence();
        prop_assert!(c >= a.confidence().max(b.confidence()));
    }

    #[test]
    fn deduction_loses_confidence(a in truth(), b in truth()) {
        let c = deduce(a, b).confidence();
        let product = a.confidence() * b.confidence();
        prop_assert!(c <= product + 1e-15);
        prop_assert!(product <= a.confidence().min(b.confidence()));
    }

    #[test]
    fn folding_units_matches_counting(
        obs in proptest::collection::vec(any::<bool>(), 1..40),
        shuffle_seed in any::<u64>(),
    ) {
        // Any order of the same observations gives the same truth.
        let mut order = obs.clone();
        let mut s = shuffle_seed;
        for i in (1..order.len()).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            order.swap(i, (s >> 33) as usize % (i + 1));
        }
        let folded = order
            .iter()
            .map(|&p| unit_evidence(p, 1.0))
            .reduce(revise)
            .unwrap();
        let positive = obs.iter().filter(|&&p| p).count() as f64;
        let oracle = truth_from_evidence(EvidenceCount::new(positive, obs.len() as f64).unwrap(), 1.0).unwrap();
        prop_assert!((folded.frequency() - oracle.frequency()).abs() <= 1e-9);
        prop_assert!((folded.confidence() - oracle.confidence()).abs() <= 1e-9);
        // Independent count: c = n / (n + 1).
        let n = obs.len() as f64;
        prop_assert!((oracle.confidence() - n / (n + 1.0)).abs() <= 1e-12);
        prop_assert!((oracle.frequency() - positive / n).abs() <= 1e-12);
    }

    #[test]
    fn deduction_monotone_in_confidence(a in truth(), b in truth(), bump in 0.0..0.5f64) {
        let stronger = TruthValue::new(a.frequency(), (a.confidence() + bump).min(0.99)).unwrap();
        prop_assert!(deduce(stronger, b).confidence() >= deduce(a, b).confidence() - 1e-15);
    }

    #[test]
    fn budget_decay_is_geometric(p in 0.0..=1.0f64, d in 0.01..0.99f64, q in 0.0..=1.0f64, k in 0usize..30) {
        let mut b = Budget::new(p, d, q).unwrap();
        for _ in 0..k {
            b = decay_budget(b);
        }
        let expected = (p - q).abs() * d.powi(k as i32);
        prop_assert!(((b.priority() - q).abs() - expected).abs() <= 1e-12);
    }
}
