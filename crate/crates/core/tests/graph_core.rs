use gonflow::graph::{
    check_flow, max_flow, max_flow_value, multigraph_to_weighted, weighted_outdegrees, weighted_to_multigraph, Flow,
    FlowNetwork, FlowViolation, Multigraph, Orientation, WeightedGraph,
};
use proptest::prelude::*;

fn graph(n: usize, edges: &[(usize, usize, i64)]) -> WeightedGraph {
    WeightedGraph::from_edges(n, edges).unwrap()
}

#[test]
fn expansion_examples() {
    let tri = graph(3, &[(0, 1, 1), (1, 2, 2), (2, 0, 3)]);
    let m = weighted_to_multigraph(&tri);
    assert_eq!(m.graph.num_edges(), 6);
    assert_eq!(m.origin, vec![0, 1, 1, 2, 2, 2]);

    let path = graph(3, &[(0, 1, 1), (1, 2, 1)]);
    assert_eq!(weighted_to_multigraph(&path).graph.num_edges(), 2);

    let fat = graph(2, &[(0, 1, 5)]);
    let m = weighted_to_multigraph(&fat);
    assert_eq!((m.graph.num_vertices(), m.graph.num_edges()), (2, 5));
    assert_eq!(multigraph_to_weighted(&m.graph).unwrap(), fat);
}

#[test]
fn collapse_examples() {
    let m = Multigraph::from_edges(2, vec![(0, 1), (0, 1), (1, 0)]).unwrap();
    let g = multigraph_to_weighted(&m).unwrap();
    assert_eq!(g.num_edges(), 1);
    assert_eq!(g.edge(0).w, 3);

    let simple = Multigraph::from_edges(3, vec![(0, 1), (1, 2)]).unwrap();
    assert!(multigraph_to_weighted(&simple).unwrap().edges().iter().all(|e| e.w == 1));

    let looped = Multigraph::from_edges(2, vec![(0, 1), (1, 1)]).unwrap();
    assert!(multigraph_to_weighted(&looped).is_err());
}

#[test]
fn outdegree_examples() {
    let tri = graph(3, &[(0, 1, 1), (1, 2, 1), (2, 0, 1)]);
    assert_eq!(weighted_outdegrees(&tri, &Orientation::all_forward(3)).unwrap(), vec![1, 1, 1]);

    let star = graph(4, &[(0, 1, 1), (0, 2, 1), (0, 3, 1)]);
    assert_eq!(weighted_outdegrees(&star, &Orientation::all_forward(3)).unwrap(), vec![3, 0, 0, 0]);

    let heavy = graph(2, &[(0, 1, 4)]);
    assert_eq!(weighted_outdegrees(&heavy, &Orientation::all_forward(1)).unwrap(), vec![4, 0]);

    assert!(weighted_outdegrees(&tri, &Orientation::all_forward(2)).is_err());
}

fn network(n: usize, s: usize, t: usize, arcs: &[(usize, usize, i64)]) -> FlowNetwork {
    let mut net = FlowNetwork::new(n, s, t).unwrap();
    for &(a, b, c) in arcs {
        net.add_arc(a, b, c).unwrap();
    }
    net
}

#[test]
fn check_flow_examples() {
    let net = network(2, 0, 1, &[(0, 1, 2)]);
    let r = check_flow(&net, &Flow::zero(1));
    assert!(r.is_valid() && r.is_circulation());
    let r = check_flow(&net, &Flow { values: vec![2] });
    assert!(r.is_valid());
    assert_eq!(r.value, 2);

    let path = network(3, 0, 2, &[(0, 1, 5), (1, 2, 5)]);
    let r = check_flow(&path, &Flow { values: vec![2, 1] });
    assert!(r.violations.contains(&FlowViolation::Conservation { node: 1, excess: -1 })
        || r.violations.iter().any(|v| matches!(v, FlowViolation::Conservation { node: 1, .. })));

    let r = check_flow(&net, &Flow { values: vec![3] });
    assert!(r.violations.iter().any(|v| matches!(v, FlowViolation::OverCapacity { .. })));
    let r = check_flow(&net, &Flow { values: vec![-1] });
    assert!(r.violations.iter().any(|v| matches!(v, FlowViolation::Negative { .. })));
}

#[test]
fn max_flow_examples() {
    assert_eq!(max_flow_value(&network(2, 0, 1, &[(0, 1, 3)])).unwrap(), 3);
    let two_paths = network(4, 0, 3, &[(0, 1, 2), (1, 3, 2), (0, 2, 5), (2, 3, 5)]);
    assert_eq!(max_flow_value(&two_paths).unwrap(), 7);
    let diamond = network(4, 0, 3, &[(0, 1, 9), (0, 2, 9), (1, 3, 1), (2, 3, 1)]);
    let f = max_flow(&diamond).unwrap();
    let r = check_flow(&diamond, &f);
    assert!(r.is_valid());
    assert_eq!(r.value, 2);
}

fn arb_graph() -> impl Strategy<Value = WeightedGraph> {
    (2usize..7)
        .prop_flat_map(|n| {
            let tree = proptest::collection::vec((0usize..1000, 1i64..5), n - 1);
            let extra = proptest::collection::vec((0..n, 0..n, 1i64..5), 0..5);
            (Just(n), tree, extra)
        })
        .prop_map(|(n, tree, extra)| {
            let mut g = WeightedGraph::new(n);
            for (v, (p, w)) in tree.into_iter().enumerate() {
                g.add_edge(p % (v + 1), v + 1, w).unwrap();
            }
            for (a, b, w) in extra {
                if a != b && g.find_edge(a, b).is_none() {
                    g.add_edge(a, b, w).unwrap();
                }
            }
            g
        })
}

fn arb_network() -> impl Strategy<Value = FlowNetwork> {
    (2usize..6)
        .prop_flat_map(|n| (Just(n), proptest::collection::vec((0..n, 0..n, 1i64..5), 1..9)))
        .prop_map(|(n, arcs)| {
            let arcs: Vec<_> = arcs.into_iter().filter(|(a, b, _)| a != b).collect();
            network(n, 0, n - 1, &arcs)
        })
}

/// Minimum cut by enumerating every source side.
fn min_cut(net: &FlowNetwork) -> i64 {
    let n = net.num_nodes();
    (0u32..1 << n)
        .filter(|m| m >> net.source & 1 == 1 && m >> net.sink & 1 == 0)
        .map(|m| {
            net.arcs()
                .iter()
                .filter(|a| m >> a.tail & 1 == 1 && m >> a.head & 1 == 0)
                .map(|a| a.cap)
                .sum::<i64>()
        })
        .min()
        .unwrap()
}

proptest! {
    #[test]
    fn expansion_round_trips(g in arb_graph()) {
        let m = weighted_to_multigraph(&g);
        prop_assert_eq!(m.graph.num_edges() as i64, g.total_weight());
        prop_assert_eq!(multigraph_to_weighted(&m.graph).unwrap(), g);
    }

    #[test]
    fn outdegrees_sum_to_total_weight(g in arb_graph(), bits in any::<u64>()) {
        let o = Orientation::new((0..g.num_edges()).map(|e| bits >> e & 1 == 1).collect());
        let out = weighted_outdegrees(&g, &o).unwrap();
        prop_assert_eq!(out.iter().sum::<i64>(), g.total_weight());
        prop_assert!(out.iter().all(|&d| d >= 0));
    }

    #[test]
    fn max_flow_equals_min_cut(net in arb_network()) {
        let f = max_flow(&net).unwrap();
        let r = check_flow(&net, &f);
        prop_assert!(r.is_valid());
        prop_assert_eq!(r.value, min_cut(&net));
    }

    #[test]
    fn check_flow_matches_the_definition(net in arb_network(), raw in proptest::collection::vec(-1i64..5, 8)) {
        let values: Vec<i64> = (0..net.num_arcs()).map(|a| raw[a % raw.len()]).collect();
        let f = Flow { values: values.clone() };
        let bounded = net.arcs().iter().zip(&values).all(|(a, &x)| (a.lower..=a.cap).contains(&x));
        let conserved = (0..net.num_nodes())
            .filter(|&v| v != net.source && v != net.sink)
            .all(|v| f.excess_out(&net, v) == 0);
        prop_assert_eq!(check_flow(&net, &f).is_valid(), bounded && conserved);
    }
}
