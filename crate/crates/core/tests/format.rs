use gonflow::corpus;
use gonflow::format::{
    check_witness, parse_instance, parse_machine, parse_morphism, parse_partition, parse_witness, write_domination,
    write_flow, write_instance, write_machine, write_morphism, write_orientation, write_partition, Instance,
    PartitionFile, ProblemKind, WitnessCheck,
};
use gonflow::graph::Orientation;
use gonflow::hardness::{NnccmMachine, Test};
use gonflow::problem::CoInstance;
use gonflow::Error;
use proptest::prelude::*;
use rand::Rng;

fn random_instance(seed: u64, kind: ProblemKind) -> Instance {
    let mut rng = corpus::rng(seed);
    let n = rng.gen_range(2..=6);
    let extra = rng.gen_range(0..=3);
    let g = corpus::random_connected_graph(&mut rng, n, extra, 4);
    match kind {
        ProblemKind::Oro => Instance::Oro(corpus::random_oro(&mut rng, g)),
        ProblemKind::Too => Instance::Too(corpus::random_too(&mut rng, g)),
        ProblemKind::Cmo => Instance::Cmo(corpus::random_cmo(&mut rng, g)),
        ProblemKind::Mmo => Instance::Mmo(corpus::random_mmo(&mut rng, g)),
        ProblemKind::Co => Instance::Co(CoInstance { graph: g }),
        ProblemKind::Uflb => Instance::Uflb(corpus::random_uflb(&mut rng, g)),
        ProblemKind::Aonf => {
            let arcs = rng.gen_range(n - 1..=n + 2);
            Instance::Aonf(corpus::random_aonf(&mut rng, n, arcs, 4))
        }
        ProblemKind::Cds => Instance::Cds(corpus::random_cds(&mut rng, g, 3)),
        ProblemKind::Crbds => {
            let (r, b, pins) = (rng.gen_range(1..=3), rng.gen_range(1..=3), rng.gen_bool(0.5));
            Instance::Crbds(corpus::random_crbds(&mut rng, r, b, 3, pins))
        }
    }
}

#[test]
fn kinds_parse_by_name() {
    for k in ProblemKind::ALL {
        assert_eq!(ProblemKind::from_name(k.name()), Some(k));
        assert_eq!(ProblemKind::from_name(&k.name().to_lowercase()), Some(k));
    }
    assert_eq!(ProblemKind::from_name("SAT"), None);
}

#[test]
fn diagnostics_carry_positions() {
    let text = "problem CO\nv 0\nv 1\ne 0 0 1 x\n";
    match parse_instance(text) {
        Err(Error::Parse { line: 4, column: 9, .. }) => {}
        other => panic!("{other:?}"),
    }
    match parse_instance("problem CO\nv 0\nv 2\n") {
        Err(Error::Parse { line: 3, .. }) => {}
        other => panic!("{other:?}"),
    }
    assert!(parse_instance("v 0\n").is_err());
    assert!(parse_partition("tnode 0\nbag 0 0\nfrobnicate\n").is_err());
}

#[test]
fn comments_and_blank_lines_are_ignored() {
    let text = "# a path\nproblem CO\n\nv 0   # first\nv 1\ne 0 0 1 2\n";
    let inst = parse_instance(text).unwrap();
    assert_eq!(inst.kind(), ProblemKind::Co);
    assert_eq!(inst.graph().unwrap().edge(0).w, 2);
}

#[test]
fn witness_checks() {
    let inst = parse_instance("problem TOO\nv 0\nv 1\ne 0 0 1 2\ntarget 0 2\ntarget 1 0\n").unwrap();
    let g = inst.graph().unwrap();
    let good = parse_witness(&write_orientation(g, &Orientation::all_forward(1))).unwrap();
    assert_eq!(check_witness(&inst, &good).unwrap(), WitnessCheck::Valid { size: None });
    let bad = parse_witness("orient 0 1 0\n").unwrap();
    assert!(matches!(check_witness(&inst, &bad).unwrap(), WitnessCheck::Invalid(_)));
    let missing = parse_witness("flow 0 2\n").unwrap();
    assert!(check_witness(&inst, &missing).is_err() || matches!(check_witness(&inst, &missing), Ok(WitnessCheck::Invalid(_))));
}

#[test]
fn machine_files() {
    let m = NnccmMachine::new(2, 2, vec![Test { i: 2, a: 1, j: 1, b: 2 }]).unwrap();
    let text = write_machine(&m);
    assert_eq!(parse_machine(&text).unwrap(), m);
    assert!(parse_machine("counters 1\nbound 1\ntest 1 2 1 0\n").is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn instances_round_trip(seed in any::<u64>(), kind in 0usize..9) {
        let inst = random_instance(seed, ProblemKind::ALL[kind]);
        let text = write_instance(&inst);
        prop_assert_eq!(parse_instance(&text).unwrap(), inst);
    }

    #[test]
    fn partitions_round_trip(seed in any::<u64>(), n in 1usize..8, bags in 1usize..5) {
        let mut rng = corpus::rng(seed);
        let g = corpus::random_connected_graph(&mut rng, n, 2, 2);
        let p = corpus::random_tree_partition(&mut rng, &g, bags);
        let file = PartitionFile::new(p.clone());
        let back = parse_partition(&write_partition(&file)).unwrap();
        prop_assert_eq!(back.partition, p);
        prop_assert!(!back.pathdecomp);
    }

    #[test]
    fn morphisms_round_trip(seed in any::<u64>(), nodes in 2usize..5, d in 1i64..4) {
        let mut rng = corpus::rng(seed);
        let s = corpus::random_morphism(&mut rng, nodes, d);
        let text = write_morphism(&s.graph, &s.morphism);
        let (g, m) = parse_morphism(&text).unwrap();
        prop_assert_eq!(g, s.graph);
        prop_assert_eq!(m, s.morphism);
    }

    #[test]
    fn witnesses_round_trip(seed in any::<u64>(), bits in any::<u64>()) {
        let inst = random_instance(seed, ProblemKind::Oro);
        let g = inst.graph().unwrap();
        let o = Orientation::new((0..g.num_edges()).map(|e| bits >> e & 1 == 1).collect());
        prop_assert_eq!(parse_witness(&write_orientation(g, &o)).unwrap().orientation(g).unwrap(), o);

        let values: Vec<i64> = (0..6).map(|i| (bits >> (4 * i) & 7) as i64).collect();
        let f = gonflow::graph::Flow { values: values.clone() };
        prop_assert_eq!(parse_witness(&write_flow(&f)).unwrap().flow(6).unwrap().values, values);

        let n = 5;
        let dominators: Vec<usize> = (0..n).filter(|v| bits >> v & 1 == 1).collect();
        let assignment = (0..n).map(|v| dominators.first().filter(|&&d| d != v).copied()).collect();
        let w = gonflow::problem::DominationWitness { dominators, assignment };
        prop_assert_eq!(parse_witness(&write_domination(&w)).unwrap().domination(n).unwrap(), w);
    }
}
