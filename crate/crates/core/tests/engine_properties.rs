use std::collections::HashSet;

use nalseq::*;
use proptest::prelude::*;

fn config() -> impl Strategy<Value = Config> {
    (1usize..6, 1usize..8, 0usize..12, 0usize..2, any::<u64>()).prop_flat_map(
        |(nodes, cap, capacity, mode, seed)| {
            (1..=nodes).prop_map(move |sample| Config {
                nodes_per_column: nodes,
                hypothesis_sample_size: sample,
                max_new_links_per_step: cap,
                link_capacity_per_column: capacity,
                node_selection: if mode == 0 {
                    NodeSelection::Uniform
                } else {
                    NodeSelection::Winners
                },
                rng_seed: seed,
                ..Config::default()
            })
        },
    )
}

fn sequence() -> impl Strategy<Value = Vec<Symbol>> {
    proptest::collection::vec(
        proptest::sample::select(vec!['A', 'B', 'C', 'D', 'E']),
        1..150,
    )
    .prop_map(|v| v.into_iter().map(Symbol::from).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn step_invariants(cfg in config(), seq in sequence()) {
        let mut m = Learner::new(cfg.clone()).unwrap();
        for s in &seq {
            let net = m.network();
            let anticipated = net.column_of(s).is_some_and(|c| {
                m.pre_active_nodes().iter().any(|&n| net.node(n).unwrap().column == c)
            });
            let r = m.step(s);
            prop_assert_eq!(r.burst, !anticipated);
            prop_assert!(r.new_links <= cfg.max_new_links_per_step);
            if r.correct {
                prop_assert_eq!(r.predicted.as_ref(), Some(s));
            }
            let net = m.network();
            for (c, _) in net.columns() {
                prop_assert!(net.owned_links(c) <= cfg.link_capacity_per_column);
            }
            let mut seen = HashSet::new();
            for (l, _) in &m.last_revision().cases {
                prop_assert!(seen.insert(*l), "link {} revised twice", l);
            }
            for (_, link) in net.links() {
                prop_assert_ne!(net.node(link.source).unwrap().column, net.node(link.target).unwrap().column);
            }
        }
    }
}

#[test]
fn replay_is_identical_across_seeds() {
    let seq: Vec<Symbol> = "ABCDXBCYABCDABCDXBCY"
        .repeat(10)
        .chars()
        .map(Symbol::from)
        .collect();
    for seed in 0..10 {
        let run = || {
            let mut m = Learner::new(Config {
                rng_seed: seed,
                ..Config::default()
            })
            .unwrap();
            let reports: Vec<StepReport> = seq.iter().map(|s| m.step(s)).collect();
            (format!("{reports:?}"), m.network().export_dot(0.0))
        };
        assert_eq!(run(), run(), "seed {seed}");
    }
}
