use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use gonflow::corpus;
use gonflow::format::{self, Instance, PartitionFile};
use gonflow::tree::TreePartition;
use tempfile::TempDir;

const TRIANGLE_ORO: &str = "problem ORO\nv 0\nv 1\nv 2\ne 0 0 1 1\ne 1 1 2 1\ne 2 2 0 1\n\
    interval 0 1 1\ninterval 1 1 1\ninterval 2 1 1\n";

const TRIANGLE_PARTITION: &str = "tnode 0\ntnode 1\ntarc 0 1\nbag 0 0\nbag 1 1 2\n";

const FOUR_CYCLE_FOLD: &str = "v 0\nv 1\nv 2\nv 3\ne 0 0 1 1\ne 1 1 2 1\ne 2 2 3 1\ne 3 3 0 1\n\
    tnode 0\ntnode 1\ntnode 2\ntarc 0 1\ntarc 1 2\n\
    vmap 0 0\nvmap 1 1\nvmap 2 2\nvmap 3 1\n\
    emap 0 0\nemap 1 1\nemap 2 1\nemap 3 0\n\
    index 0 1\nindex 1 1\nindex 2 1\nindex 3 1\n";

fn gonflow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gonflow")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn file(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn triangle_oro_fpt_writes_a_witness() {
    let dir = TempDir::new().unwrap();
    let inst = file(&dir, "tri.txt", TRIANGLE_ORO);
    let part = file(&dir, "tri.part", TRIANGLE_PARTITION);
    let wit = dir.path().join("w.txt");
    let out = gonflow(&["solve", "oro", "--input", s(&inst), "--partition", s(&part), "--method", "fpt", "--witness", s(&wit)]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).trim(), "yes");
    assert!(wit.exists());

    let check = gonflow(&["validate", "witness", "--input", s(&inst), "--witness", s(&wit)]);
    assert_eq!(code(&check), 0, "{}", stdout(&check));
}

#[test]
fn unknown_subcommand_is_an_input_error() {
    assert_eq!(code(&gonflow(&["frobnicate"])), 3);
    assert_eq!(code(&gonflow(&["solve", "oro"])), 3);
    assert_eq!(code(&gonflow(&["--help"])), 0);
}

#[test]
fn missing_or_malformed_files_exit_3() {
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("nope.txt");
    assert_eq!(code(&gonflow(&["solve", "oro", "--input", s(&missing)])), 3);
    let bad = file(&dir, "bad.txt", "problem ORO\nv 0\ne 0 0 7 1\n");
    let out = gonflow(&["solve", "oro", "--input", s(&bad)]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
    let tri = file(&dir, "tri.txt", TRIANGLE_ORO);
    assert_eq!(code(&gonflow(&["solve", "too", "--input", s(&tri)])), 3);
}

#[test]
fn morphism_validation_and_conversion() {
    let dir = TempDir::new().unwrap();
    let m = file(&dir, "fold.txt", FOUR_CYCLE_FOLD);
    let out = gonflow(&["validate", "morphism", s(&m)]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).trim(), "ok degree=2");

    let part = dir.path().join("fold.part");
    let out = gonflow(&["convert", "morphism-to-partition", s(&m), "--output", s(&part)]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).starts_with("ok breadth=2"));

    let co = file(&dir, "c4.txt", "problem CO\nv 0\nv 1\nv 2\nv 3\ne 0 0 1 1\ne 1 1 2 1\ne 2 2 3 1\ne 3 3 0 1\n");
    let out = gonflow(&["validate", "partition", "--input", s(&co), "--partition", s(&part)]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let out = gonflow(&["solve", "co", "--input", s(&co), "--partition", s(&part)]);
    assert_eq!(stdout(&out).trim(), "yes");
}

#[test]
fn invalid_partition_is_reported() {
    let dir = TempDir::new().unwrap();
    let inst = file(&dir, "tri.txt", TRIANGLE_ORO);
    let part = file(&dir, "p.txt", "tnode 0\ntnode 1\ntnode 2\ntarc 0 1\ntarc 1 2\nbag 0 0\nbag 1 1\nbag 2 2\n");
    let out = gonflow(&["validate", "partition", "--input", s(&inst), "--partition", s(&part)]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).starts_with("invalid:"));
    assert_eq!(code(&gonflow(&["solve", "oro", "--input", s(&inst), "--partition", s(&part)])), 3);
}

#[test]
fn reduce_writes_provenance_and_trivial_no() {
    let dir = TempDir::new().unwrap();
    let aonf = file(&dir, "a.txt", "problem AONF\nv 0\nv 1\nv 2\narc 0 0 1 2\narc 1 1 2 2\narc 2 0 2 1\nsource 0\nsink 2\nvalue 3\n");
    let out_path = dir.path().join("too.txt");
    let out = gonflow(&["reduce", "aonf-to-too", "--input", s(&aonf), "--output", s(&out_path)]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let prov = std::fs::read_to_string(dir.path().join("too.txt.prov")).unwrap();
    assert!(prov.starts_with("reduction aonf-to-too\n"));
    assert!(prov.contains("vertex 3 arc 0\n"));
    assert!(prov.contains("edge 5 arc 2\n"));
    assert_eq!(code(&gonflow(&["solve", "too", "--input", s(&out_path)])), 0);

    let odd = file(&dir, "odd.txt", "problem CO\nv 0\nv 1\ne 0 0 1 1\n");
    let no = dir.path().join("no.txt");
    let out = gonflow(&["reduce", "co-to-too", "--input", s(&odd), "--output", s(&no)]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).starts_with("trivial-no"));
    assert_eq!(code(&gonflow(&["solve", "oro", "--input", s(&no)])), 1);

    let wrong = gonflow(&["reduce", "cds-to-crbds", "--input", s(&odd), "--output", s(&no)]);
    assert_eq!(code(&wrong), 3);
}

#[test]
fn domination_answers() {
    let dir = TempDir::new().unwrap();
    let path3 = "problem CDS\nv 0\nv 1\nv 2\ne 0 0 1 1\ne 1 1 2 1\n";
    let within = file(&dir, "w.txt", &format!("{path3}cap 0 1\ncap 1 2\ncap 2 1\nbudget 1\n"));
    let over = file(&dir, "o.txt", &format!("{path3}cap 0 1\ncap 1 1\ncap 2 1\nbudget 1\n"));
    for method in ["fpt", "oracle"] {
        let out = gonflow(&["solve", "cds", "--input", s(&within), "--method", method]);
        assert_eq!((code(&out), stdout(&out).trim().to_string()), (0, "size 1".to_string()));
        let out = gonflow(&["solve", "cds", "--input", s(&over), "--method", method]);
        assert_eq!((code(&out), stdout(&out).trim().to_string()), (1, "over-budget min-size=2".to_string()));
    }
    let infeasible = file(&dir, "i.txt", "problem CRBDS\nv 0\nv 1\nv 2\ne 0 0 1 1\ne 1 0 2 1\nred 0\nblue 1 2\ncap 0 1\nbudget 1\n");
    let out = gonflow(&["solve", "crbds", "--input", s(&infeasible)]);
    assert_eq!((code(&out), stdout(&out).trim()), (1, "infeasible"));
}

#[test]
fn json_mirrors_the_answer() {
    let dir = TempDir::new().unwrap();
    let inst = file(&dir, "tri.txt", TRIANGLE_ORO);
    let out = gonflow(&["--json", "solve", "oro", "--input", s(&inst)]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["answer"], "yes");
    assert_eq!(v["exit"], 0);
    let out = gonflow(&["solve", "oro", "--input", s(&dir.path().join("x")), "--json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["exit"], 3);
    assert!(v["error"].as_str().unwrap().contains("cannot read"));
}

#[test]
fn resource_budget_exits_2() {
    let dir = TempDir::new().unwrap();
    let ilp = file(&dir, "i.txt", "var x 0 5\nvar y 0 5\ncon 1*x + 2*y <= 7\ncon 1*x + 1*y >= 3\nmin 1*x - 1*y\n");
    let out = gonflow(&["ilp", "solve", s(&ilp)]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).starts_with("optimal -3"));
    let out = Command::new(env!("CARGO_BIN_EXE_gonflow"))
        .args(["ilp", "solve", s(&ilp)])
        .env("GONFLOW_NODE_BUDGET", "0")
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);

    // Vertex 0 of a weight-4 triangle alone in its bag gives breadth 8.
    let heavy = file(&dir, "h.txt", "problem CO\nv 0\nv 1\nv 2\ne 0 0 1 4\ne 1 1 2 4\ne 2 0 2 4\n");
    let part = file(&dir, "h.part", TRIANGLE_PARTITION);
    assert_eq!(code(&gonflow(&["solve", "co", "--input", s(&heavy), "--partition", s(&part)])), 2);
    assert_eq!(code(&gonflow(&["solve", "co", "--input", s(&heavy), "--partition", s(&part), "--no-limit"])), 0);
}

#[test]
fn generators_round_trip() {
    let dir = TempDir::new().unwrap();
    let machine = file(&dir, "m.txt", "counters 1\nbound 1\ntest 1 0 1 0\n");
    let net = dir.path().join("n.txt");
    let pd = dir.path().join("n.part");
    let out = gonflow(&["generate", "nnccm-aonf", "--machine", s(&machine), "--output", s(&net), "--partition", s(&pd)]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let out = gonflow(&["validate", "pathdecomp", "--input", s(&net), "--partition", s(&pd)]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    assert_eq!(code(&gonflow(&["solve", "aonf", "--input", s(&net), "--method", "oracle"])), 0);

    let too = dir.path().join("bp.txt");
    let out = gonflow(&["generate", "binpacking-too", "--items", "1,2,3", "--bins", "2", "--size", "3", "--output", s(&too)]);
    assert_eq!(code(&out), 0);
    assert_eq!(code(&gonflow(&["solve", "too", "--input", s(&too)])), 0);
    let out = gonflow(&["generate", "binpacking-too", "--items", "2,2,2", "--bins", "2", "--size", "3", "--output", s(&too)]);
    assert_eq!(code(&out), 0);
    assert_eq!(code(&gonflow(&["solve", "too", "--input", s(&too), "--method", "oracle"])), 1);
    assert_eq!(code(&gonflow(&["solve", "too", "--input", s(&too)])), 1);

    let aonf = dir.path().join("ba.txt");
    let out = gonflow(&["generate", "binpacking-aonf", "--items", "2,2,3,1", "--bins", "2", "--size", "4", "--output", s(&aonf)]);
    assert_eq!(code(&out), 0);
    assert_eq!(code(&gonflow(&["solve", "aonf", "--input", s(&aonf), "--method", "oracle"])), 0);
}

#[test]
fn selftest_quick_subset_passes() {
    let out = gonflow(&["selftest", "--quick", "--only", "5,7"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 2);
    assert!(text.lines().all(|l| l.contains("PASS")));
}

/// fpt and oracle give the same exit code on every valid (instance,
/// partition) pair of a seeded corpus covering all nine problems.
#[test]
fn fpt_and_oracle_exit_codes_agree() {
    let dir = TempDir::new().unwrap();
    let mut rng = corpus::rng(0xc11);
    let mut checked = 0;
    for round in 0..6 {
        let g = || corpus::random_connected_graph(&mut corpus::rng(round * 97 + checked), 4, 2, 2);
        let instances = vec![
            Instance::Oro(corpus::random_oro(&mut rng, g())),
            Instance::Too(corpus::random_too(&mut rng, g())),
            Instance::Cmo(corpus::random_cmo(&mut rng, g())),
            Instance::Mmo(corpus::random_mmo(&mut rng, g())),
            Instance::Co(corpus::random_co(g())),
            Instance::Uflb(corpus::random_uflb(&mut rng, g())),
            Instance::Aonf(corpus::random_aonf(&mut rng, 4, 5, 2)),
            Instance::Cds(corpus::random_cds(&mut rng, g(), 2)),
            Instance::Crbds(corpus::random_crbds(&mut rng, 2, 3, 2, round % 2 == 0)),
        ];
        for inst in instances {
            let graph = match &inst {
                Instance::Aonf(a) => a.network.underlying_weighted(),
                other => other.graph().unwrap().clone(),
            };
            let mut random = corpus::random_tree_partition(&mut rng, &graph, 3);
            if let Instance::Crbds(x) = &inst {
                // The program needs every pinned pair inside one bag.
                let of = random.bag_of(graph.num_vertices());
                if x.pins.iter().enumerate().any(|(b, r)| r.is_some_and(|r| of[b] != of[r])) {
                    random = TreePartition::single_bag(graph.num_vertices());
                }
            }
            let partitions = [TreePartition::single_bag(graph.num_vertices()), random];
            let name = inst.kind().name().to_lowercase();
            let ipath = file(&dir, "inst.txt", &format::write_instance(&inst));
            for p in partitions {
                let ppath = file(&dir, "part.txt", &format::write_partition(&PartitionFile::new(p)));
                let run = |method: &str| {
                    code(&gonflow(&["solve", &name, "--input", s(&ipath), "--partition", s(&ppath), "--method", method, "--no-limit"]))
                };
                let (fpt, oracle) = (run("fpt"), run("oracle"));
                assert!(fpt <= 1, "fpt exit {fpt} on\n{}", format::write_instance(&inst));
                assert_eq!(fpt, oracle, "{}", format::write_instance(&inst));
                checked += 1;
            }
        }
    }
    assert_eq!(checked, 6 * 9 * 2);
}
