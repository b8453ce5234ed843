use std::collections::BTreeMap;

use gonflow::cds_dp::{feasibility_precheck, run_crbds, solve_cds, solve_crbds, summarize_children, CdsConfig, Characteristic};
use gonflow::corpus;
use gonflow::graph::WeightedGraph;
use gonflow::oracles::{oracle_cds, oracle_crbds, OracleConfig};
use gonflow::problem::{CdsInstance, CrbdsInstance, DominationAnswer};
use gonflow::tree::TreePartition;
use proptest::prelude::*;

/// Reds are `0..reds`; `edges` are (red, blue) pairs.
fn crbds(reds: usize, blues: usize, caps: &[i64], edges: &[(usize, usize)], budget: usize) -> CrbdsInstance {
    let n = reds + blues;
    let e: Vec<_> = edges.iter().map(|&(r, b)| (r, b, 1)).collect();
    let mut capacity = caps.to_vec();
    capacity.resize(n, 0);
    CrbdsInstance {
        graph: WeightedGraph::from_edges(n, &e).unwrap(),
        red: (0..n).map(|v| v < reds).collect(),
        capacity,
        pins: vec![None; n],
        budget,
    }
}

fn single(inst: &CrbdsInstance) -> TreePartition {
    TreePartition::single_bag(inst.graph.num_vertices())
}

#[test]
fn precheck_examples() {
    assert!(!feasibility_precheck(&crbds(1, 2, &[1], &[(0, 1), (0, 2)], 1)).unwrap());
    assert!(feasibility_precheck(&crbds(2, 2, &[1, 1], &[(0, 2), (1, 3)], 2)).unwrap());
    assert!(feasibility_precheck(&crbds(2, 2, &[1, 1], &[(0, 2), (1, 2), (1, 3)], 2)).unwrap());
}

#[test]
fn leaf_table_of_one_pair() {
    let inst = crbds(1, 1, &[1], &[(0, 1)], 1);
    let run = run_crbds(&inst, &single(&inst), &CdsConfig::default()).unwrap();
    let a: BTreeMap<Characteristic, usize> = run.tables[0].a().map(|(c, s)| (c.clone(), s)).collect();
    let entry = |served: u64, r: i64| a.get(&Characteristic { served, reds: vec![r] }).copied();
    assert_eq!(entry(1, 0), Some(1));
    assert_eq!(entry(0, 1), Some(1));
    assert_eq!(entry(0, 0), Some(0));
}

#[test]
fn solve_examples() {
    let pair = crbds(1, 1, &[1], &[(0, 1)], 1);
    assert_eq!(solve_crbds(&pair, &single(&pair), &CdsConfig::default()).unwrap().min_size(), Some(1));

    let two = crbds(2, 2, &[2, 1], &[(0, 2), (0, 3), (1, 3)], 1);
    match solve_crbds(&two, &single(&two), &CdsConfig::default()).unwrap() {
        DominationAnswer::Within { min_size: 1, witness } => assert_eq!(witness.dominators, vec![0]),
        other => panic!("{other:?}"),
    }

    let short = crbds(1, 2, &[1], &[(0, 1), (0, 2)], 1);
    assert_eq!(solve_crbds(&short, &single(&short), &CdsConfig::default()).unwrap(), DominationAnswer::Infeasible);
}

#[test]
fn cds_examples() {
    let cfg = CdsConfig::default();
    let lone = CdsInstance { graph: WeightedGraph::new(1), capacity: vec![1], budget: 1 };
    match solve_cds(&lone, &TreePartition::single_bag(1), &cfg).unwrap() {
        DominationAnswer::Within { min_size: 1, witness } => assert_eq!(witness.dominators, vec![0]),
        other => panic!("{other:?}"),
    }

    let star = WeightedGraph::from_edges(4, &[(0, 1, 1), (0, 2, 1), (0, 3, 1)]).unwrap();
    let inst = CdsInstance { graph: star, capacity: vec![3, 1, 1, 1], budget: 1 };
    let p = TreePartition { bags: vec![vec![0], vec![1], vec![2], vec![3]], arcs: vec![(0, 1), (0, 2), (0, 3)], root: 0 };
    assert_eq!(solve_cds(&inst, &p, &cfg).unwrap().min_size(), Some(1));

    let path = WeightedGraph::from_edges(5, &[(0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 4, 1)]).unwrap();
    let inst = CdsInstance { graph: path, capacity: vec![1; 5], budget: 2 };
    let p = TreePartition::path((0..5).map(|v| vec![v]).collect());
    let truth = oracle_cds(&inst, &OracleConfig::default()).unwrap();
    assert_eq!(truth, DominationAnswer::OverBudget { min_size: 3 });
    assert_eq!(solve_cds(&inst, &p, &cfg).unwrap(), truth);
}

#[test]
fn pins_break_the_spread_bound() {
    // Parent bag {p}; child bag {r, b} with b pinned to r; below the child,
    // m leaf bags {l_i, y_i} where l_i is adjacent to r and to a private y_i.
    // Serving b from p forbids r, and then every leaf needs its own red.
    let m = 6;
    let n = 3 + 2 * m;
    let mut edges = vec![(0, 2, 1), (1, 2, 1)];
    let mut bags = vec![vec![0], vec![1, 2]];
    let mut arcs = vec![(0, 1)];
    for i in 0..m {
        let (l, y) = (3 + 2 * i, 4 + 2 * i);
        edges.push((1, l, 1));
        edges.push((y, l, 1));
        bags.push(vec![l, y]);
        arcs.push((1, 2 + i));
    }
    let red: Vec<bool> = (0..n).map(|v| v <= 1 || (v >= 4 && v % 2 == 0)).collect();
    let capacity: Vec<i64> = (0..n).map(|v| if v == 1 { m as i64 + 1 } else if red[v] { 1 } else { 0 }).collect();
    let mut pins = vec![None; n];
    pins[2] = Some(1);
    let inst = CrbdsInstance { graph: WeightedGraph::from_edges(n, &edges).unwrap(), red, capacity, pins, budget: n };
    let p = TreePartition { bags, arcs, root: 0 };

    let run = run_crbds(&inst, &p, &CdsConfig::default()).unwrap();
    let c: BTreeMap<Characteristic, usize> = run.tables[1].c().map(|(k, s)| (k.clone(), s)).collect();
    let via_r = c[&Characteristic { served: 0, reds: vec![0] }];
    let via_p = c[&Characteristic { served: 0, reds: vec![1] }];
    assert_eq!((via_r, via_p), (1, m));
    assert!(via_p - via_r > 2 * run.width);

    let truth = oracle_crbds(&inst, &OracleConfig::default()).unwrap();
    assert_eq!(run.answer.min_size(), truth.min_size());
    assert_eq!(truth.min_size(), Some(1));
}

#[test]
fn normalisation_round_trips() {
    let key = |s: u64| Characteristic { served: s, reds: vec![] };
    let t1: BTreeMap<_, _> = [(key(0), 3), (key(1), 4)].into();
    let t2: BTreeMap<_, _> = [(key(0), 1), (key(1), 2)].into();
    let t3: BTreeMap<_, _> = [(key(0), 1)].into();
    let s = summarize_children(&[t1.clone(), t2, t3]).unwrap();
    assert_eq!(s.minima, vec![3, 1, 1]);
    assert_eq!(s.m_tot, 5);
    assert_eq!(s.classes.len(), 2);
    let (norm, members) = &s.classes[0];
    assert_eq!(members, &vec![0, 1]);
    let back: BTreeMap<_, _> = norm.iter().map(|(k, v)| (k.clone(), v + s.minima[0])).collect();
    assert_eq!(back, t1);
    assert!(summarize_children(&[BTreeMap::new()]).is_none());
}

fn pin_safe(inst: &CrbdsInstance, p: &TreePartition) -> bool {
    let of = p.bag_of(inst.graph.num_vertices());
    inst.pins.iter().enumerate().all(|(b, r)| r.is_none_or(|r| of[b] == of[r]))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn crbds_matches_oracle(seed in any::<u64>(), r in 1usize..5, b in 1usize..5, pinned in any::<bool>()) {
        let mut rng = corpus::rng(seed);
        let inst = corpus::random_crbds(&mut rng, r, b, 3, pinned);
        let mut p = corpus::random_tree_partition(&mut rng, &inst.graph, 3);
        if !pin_safe(&inst, &p) {
            p = single(&inst);
        }
        let d = solve_crbds(&inst, &p, &CdsConfig::default()).unwrap();
        let truth = oracle_crbds(&inst, &OracleConfig::default()).unwrap();
        prop_assert_eq!(d.min_size(), truth.min_size());
        if let DominationAnswer::Within { min_size, witness } = &d {
            prop_assert_eq!(inst.check_witness(witness).unwrap(), *min_size);
        }
    }

    #[test]
    fn more_capacity_never_costs_more(seed in any::<u64>(), n in 1usize..7, v in 0usize..7) {
        let mut rng = corpus::rng(seed);
        let g = corpus::random_connected_graph(&mut rng, n, 2, 1);
        let inst = corpus::random_cds(&mut rng, g, 2);
        let p = corpus::random_tree_partition(&mut rng, &inst.graph, n);
        prop_assume!(p.width() <= 4);
        let mut more = inst.clone();
        more.capacity[v % n] += 1;
        let before = solve_cds(&inst, &p, &CdsConfig::default()).unwrap().min_size();
        let after = solve_cds(&more, &p, &CdsConfig::default()).unwrap().min_size();
        match (before, after) {
            (Some(x), Some(y)) => prop_assert!(y <= x),
            (Some(_), None) => prop_assert!(false, "extra capacity made the instance infeasible"),
            _ => {}
        }
    }
}
