use gonflow::corpus;
use gonflow::graph::check_flow;
use gonflow::hardness::{
    binpacking_to_aonf, binpacking_to_too, nnccm_to_aonf, oracle_binpacking, oracle_nnccm, simulate_nnccm,
    witness_flow_from_run, ArcRole, NnccmMachine, NnccmRun, RunOutcome, Test,
};
use gonflow::oracles::{oracle_aonf, oracle_lifted, AonfRoute, OracleConfig};
use gonflow::tree::validate_path_decomposition;
use proptest::prelude::*;
use rand::Rng;

fn test(i: usize, a: u32, j: usize, b: u32) -> Test {
    Test { i, a, j, b }
}

#[test]
fn simulation_examples() {
    let free = NnccmMachine::new(2, 1, vec![]).unwrap();
    assert_eq!(simulate_nnccm(&free, &NnccmRun { values: vec![] }).unwrap(), RunOutcome::Accept);

    let m = NnccmMachine::new(2, 1, vec![test(1, 0, 2, 0)]).unwrap();
    assert_eq!(simulate_nnccm(&m, &NnccmRun { values: vec![vec![0, 0]] }).unwrap(), RunOutcome::Reject(1));
    assert_eq!(simulate_nnccm(&m, &NnccmRun { values: vec![vec![1, 0]] }).unwrap(), RunOutcome::Accept);
    assert!(simulate_nnccm(&m, &NnccmRun { values: vec![vec![2, 0]] }).is_err());
    assert!(NnccmMachine::new(1, 1, vec![test(1, 0, 2, 0)]).is_err());
}

#[test]
fn machine_oracle_examples() {
    let free = NnccmMachine::new(1, 2, vec![]).unwrap();
    assert!(oracle_nnccm(&free, 1 << 20).unwrap().is_some());
    let stuck = NnccmMachine::new(1, 0, vec![test(1, 0, 1, 0)]).unwrap();
    assert!(oracle_nnccm(&stuck, 1 << 20).unwrap().is_none());
    let m = NnccmMachine::new(2, 1, vec![test(1, 0, 2, 0)]).unwrap();
    let run = oracle_nnccm(&m, 1 << 20).unwrap().unwrap();
    assert_eq!(simulate_nnccm(&m, &run).unwrap(), RunOutcome::Accept);
}

#[test]
fn network_constants_and_census() {
    let m = NnccmMachine::new(1, 1, vec![test(1, 1, 1, 0)]).unwrap();
    let net = nnccm_to_aonf(&m).unwrap();
    assert_eq!(net.big_l, 4);
    assert_eq!(net.value(), 6);

    for (k, b, tests) in [(1usize, 1u32, 1usize), (2, 2, 2), (2, 1, 0), (3, 2, 3)] {
        let t: Vec<_> = (0..tests).map(|x| test(1 + x % k, (x as u32) % (b + 1), 1 + (x + 1) % k, 0)).collect();
        let m = NnccmMachine::new(k, b, t).unwrap();
        let net = nnccm_to_aonf(&m).unwrap();
        let (k, b, n) = (k, b as usize, tests);
        let census = k + k + k * b * (n + 1) + k * (n + 1) * (b + 1) + k * n * (b + 1) + 5 * n;
        assert_eq!(net.roles.len(), census);
        let checks = net.roles.iter().filter(|(r, _)| matches!(r, ArcRole::CheckIn { .. } | ArcRole::CheckMid { .. } | ArcRole::CheckOut { .. })).count();
        assert_eq!(checks, 5 * n);
        let edges: Vec<_> = net.instance.network.arcs().iter().map(|a| (a.tail, a.head)).collect();
        let width = validate_path_decomposition(net.instance.network.num_nodes(), &edges, &net.path_decomposition).unwrap();
        assert!(width <= 4 * k + 4, "width {width} for k = {k}");
    }
}

#[test]
fn witness_flow_examples() {
    let free = NnccmMachine::new(2, 2, vec![]).unwrap();
    let net = nnccm_to_aonf(&free).unwrap();
    let f = witness_flow_from_run(&free, &net, &NnccmRun { values: vec![] }).unwrap();
    let r = check_flow(&net.instance.network, &f);
    assert!(r.is_valid());
    assert_eq!(r.value, net.value());
    assert!(net.instance.is_satisfied_by(&f));

    // One half fires: one unit crosses the check gadget.
    let m = NnccmMachine::new(2, 1, vec![test(1, 0, 2, 0)]).unwrap();
    let net = nnccm_to_aonf(&m).unwrap();
    let f = witness_flow_from_run(&m, &net, &NnccmRun { values: vec![vec![1, 0]] }).unwrap();
    assert!(net.instance.is_satisfied_by(&f));
    let mid: i64 = net
        .roles
        .iter()
        .filter(|(r, _)| matches!(r, ArcRole::CheckMid { test: 1 }))
        .map(|(_, arcs)| f.values[arcs[0]])
        .sum();
    assert_eq!(mid, 1);

    assert!(witness_flow_from_run(&m, &net, &NnccmRun { values: vec![vec![0, 0]] }).is_err());
}

#[test]
fn packing_examples() {
    let too = binpacking_to_too(&[1, 2, 3], 3, 2).unwrap();
    let g = &too.instance.graph;
    assert_eq!((g.num_vertices(), g.num_edges()), (5, 6));
    assert_eq!(too.instance.targets, vec![3, 3, 1, 2, 3]);
    assert_eq!(too.vertex_cover, vec![0, 1]);

    let net = binpacking_to_aonf(&[1, 2, 3], 3, 2).unwrap();
    assert_eq!((net.network.num_nodes(), net.network.num_arcs(), net.value), (7, 11, 6));

    assert!(oracle_binpacking(&[1, 2, 3], 3, 2).unwrap().is_some());
    assert!(oracle_binpacking(&[2, 2, 2], 3, 2).unwrap().is_none());
    assert!(oracle_binpacking(&[5], 5, 1).unwrap().is_some());
    assert!(oracle_binpacking(&[1, 2], 2, 2).is_err());
    assert!(binpacking_to_too(&[1, 2], 2, 2).is_err());
    assert!(binpacking_to_aonf(&[1, 2], 2, 2).is_err());

    let cfg = OracleConfig::default();
    let single = binpacking_to_too(&[1, 1, 2], 4, 1).unwrap();
    let o = oracle_lifted(&single.instance, &cfg).unwrap().unwrap();
    assert_eq!(single.packing_from_orientation(&o), vec![0, 0, 0]);
    let none = binpacking_to_too(&[2, 2, 2], 3, 2).unwrap();
    assert!(oracle_lifted(&none.instance, &cfg).unwrap().is_none());
    assert!(oracle_aonf(&binpacking_to_aonf(&[2, 2, 2], 3, 2).unwrap(), AonfRoute::Auto, &cfg).unwrap().is_none());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn machines_match_their_networks(seed in any::<u64>(), k in 1usize..3, b in 0u32..3, n in 0usize..4) {
        let mut rng = corpus::rng(seed);
        let tests = (0..n)
            .map(|_| test(rng.gen_range(1..=k), rng.gen_range(0..=b), rng.gen_range(1..=k), rng.gen_range(0..=b)))
            .collect();
        let m = NnccmMachine::new(k, b, tests).unwrap();
        let net = nnccm_to_aonf(&m).unwrap();
        let run = oracle_nnccm(&m, 1 << 20).unwrap();
        let flow = oracle_aonf(&net.instance, AonfRoute::Ilp, &OracleConfig::default()).unwrap();
        prop_assert_eq!(run.is_some(), flow.is_some());
        if let Some(run) = run {
            let f = witness_flow_from_run(&m, &net, &run).unwrap();
            prop_assert!(net.instance.is_satisfied_by(&f));
        }
    }

    #[test]
    fn packings_agree(items in proptest::collection::vec(1i64..5, 1..6), bins in 1usize..4) {
        let total: i64 = items.iter().sum();
        prop_assume!(total % bins as i64 == 0);
        let size = total / bins as i64;
        let direct = oracle_binpacking(&items, size, bins).unwrap();
        let net = binpacking_to_aonf(&items, size, bins).unwrap();
        let flow = oracle_aonf(&net, AonfRoute::Auto, &OracleConfig::default()).unwrap();
        prop_assert_eq!(direct.is_some(), flow.is_some());
        if let Some(p) = direct {
            let mut load = vec![0; bins];
            p.iter().zip(&items).for_each(|(&b, &a)| load[b] += a);
            prop_assert!(load.iter().all(|&l| l == size));
        }
    }
}
