use nalseq::*;
use proptest::prelude::*;

#[derive(Debug, Clone)]
enum Op {
    Link(usize, usize),
    Evict(usize, usize),
}

fn ops() -> impl Strategy<Value = Vec<Op>> {
    proptest::collection::vec(
        prop_oneof![
            3 => (0usize..16, 0usize..16).prop_map(|(a, b)| Op::Link(a, b)),
            1 => (0usize..4, 0usize..6).prop_map(|(c, cap)| Op::Evict(c, cap)),
        ],
        0..120,
    )
}

fn network() -> (Memory, Vec<NodeId>) {
    let cfg = NetworkConfig {
        nodes_per_column: 4,
        ..NetworkConfig::default()
    };
    let mut net = Memory::new(cfg).unwrap();
    for c in "ABCD".chars() {
        net.get_or_create_column(&Symbol::from(c));
    }
    let nodes = net.nodes().iter().map(|n| n.id).collect();
    (net, nodes)
}

proptest! {
    #[test]
    fn structure_stays_consistent(ops in ops()) {
        let (mut net, nodes) = network();
        let columns: Vec<ColumnId> = net.columns().map(|(id, _)| id).collect();
        let mut last_cap: Vec<Option<usize>> = vec![None; columns.len()];
        for op in ops {
            match op {
                Op::Link(a, b) => {
                    let same = net.node(nodes[a]).unwrap().column == net.node(nodes[b]).unwrap().column;
                    let res = net.create_link(nodes[a], nodes[b]);
                    prop_assert_eq!(res.is_err(), same);
                    if res.is_ok() {
                        let src = net.node(nodes[a]).unwrap().column;
                        last_cap[src.index()] = None;
                    }
                }
                Op::Evict(c, cap) => {
                    let before = net.owned_links(columns[c]);
                    let evicted = net.evict_excess(columns[c], cap).unwrap();
                    prop_assert_eq!(evicted, before.saturating_sub(cap));
                    last_cap[c] = Some(cap);
                }
            }
            for (i, cap) in last_cap.iter().enumerate() {
                if let Some(cap) = cap {
                    prop_assert!(net.owned_links(columns[i]) <= *cap);
                }
            }
        }
        let mut total = 0;
        for (id, link) in net.links() {
            total += 1;
            let (s, t) = (net.node(link.source).unwrap(), net.node(link.target).unwrap());
            prop_assert_ne!(s.column, t.column);
            prop_assert!(net.links_from(link.source).unwrap().contains(&id));
            prop_assert!(net.links_into(link.target).unwrap().contains(&id));
            prop_assert_eq!(net.find_link(link.source, link.target), Some(id));
        }
        prop_assert_eq!(total, net.link_count());
        for &n in &nodes {
            for &l in net.links_from(n).unwrap() {
                prop_assert_eq!(net.link(l).unwrap().source, n);
            }
            for &l in net.links_into(n).unwrap() {
                prop_assert_eq!(net.link(l).unwrap().target, n);
            }
        }
        let owned: usize = columns.iter().map(|&c| net.owned_links(c)).sum();
        prop_assert_eq!(owned, net.link_count());
        prop_assert_eq!(net.export_dot(0.0), net.export_dot(0.0));
    }
}
