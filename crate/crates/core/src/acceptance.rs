//! The acceptance corpus. Each criterion compares a solver against a
//! brute-force oracle (or a structural bound) over a fixed, seeded set of
//! instances and reports one line. Every criterion requires 100%
//! agreement; there is no tolerance to tune.

use std::time::{Duration, Instant};

use rand::Rng;

use crate::cds_dp::{solve_cds, solve_crbds, CdsConfig};
use crate::corpus::{self, CorpusRng};
use crate::error::Result;
use crate::format::{self, Instance, WitnessCheck};
use crate::graph::{check_flow, Orientation, WeightedGraph};
use crate::hardness::{
    binpacking_to_aonf, binpacking_to_too, nnccm_to_aonf, oracle_binpacking, oracle_nnccm, witness_flow_from_run,
    NnccmMachine, Test,
};
use crate::ilp::{solve_exhaustive, IlpOutcome, IlpSolver};
use crate::oracles::{
    oracle_aonf, oracle_cds, oracle_crbds, oracle_enumerate_orientations, oracle_lifted, oracle_oro, oracle_uflb,
    AonfRoute, OracleConfig,
};
use crate::oro_dp::{solve_aonf, solve_lifted, solve_oro, solve_oro_subdivided, solve_uflb, OroConfig};
use crate::problem::{CoInstance, CrbdsInstance, DominationAnswer};
use crate::reductions::{aonf_to_too, cds_to_crbds, too_to_cmo, too_to_co, uflb_to_co, LiftToOro, Lifted};
use crate::tree::{morphism_to_tree_partition, validate_harmonic_morphism, validate_tree_partition, TreePartition};

/// Required fraction of agreeing instances, for every criterion.
pub const REQUIRED_AGREEMENT: f64 = 1.0;
/// Base seed; criterion `i` uses `SEED + i`.
pub const SEED: u64 = 0x5eed_2024;
/// Failure messages kept per criterion.
const KEEP_FAILURES: usize = 8;

/// Corpus sizes. [`Scale::full`] is the acceptance contract; the quick
/// scale is a smoke test.
#[derive(Clone, Copy, Debug)]
pub struct Scale {
    pub c1_max_vertices: usize,
    pub c1_max_edges: usize,
    pub c1_weights: &'static [i64],
    pub c2_family: usize,
    pub c2_flow: usize,
    pub c3_exhaustive_side: usize,
    pub c3_pinned: usize,
    pub c3_cds: usize,
    pub c4_per_reduction: usize,
    pub c5_morphisms: usize,
    /// `None` checks every machine.
    pub c6_sample: Option<usize>,
    pub c7_max_items: usize,
    pub c8_per_problem: usize,
    pub c9_models: usize,
}

impl Scale {
    pub fn full() -> Self {
        Self {
            c1_max_vertices: 5,
            c1_max_edges: 6,
            c1_weights: &[1, 2, 3],
            c2_family: 500,
            c2_flow: 300,
            c3_exhaustive_side: 4,
            c3_pinned: 500,
            c3_cds: 300,
            c4_per_reduction: 200,
            c5_morphisms: 100,
            c6_sample: None,
            c7_max_items: 6,
            c8_per_problem: 100,
            c9_models: 1000,
        }
    }

    pub fn quick() -> Self {
        Self {
            c1_max_vertices: 4,
            c1_max_edges: 5,
            c1_weights: &[1, 2],
            c2_family: 60,
            c2_flow: 40,
            c3_exhaustive_side: 2,
            c3_pinned: 50,
            c3_cds: 40,
            c4_per_reduction: 30,
            c5_morphisms: 100,
            c6_sample: Some(60),
            c7_max_items: 4,
            c8_per_problem: 15,
            c9_models: 200,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CriterionReport {
    pub id: u8,
    pub title: &'static str,
    pub checked: usize,
    pub failed: usize,
    pub failures: Vec<String>,
    pub note: String,
    pub elapsed: Duration,
}

impl CriterionReport {
    pub fn passed(&self) -> bool {
        self.checked > 0 && (self.checked - self.failed) as f64 >= REQUIRED_AGREEMENT * self.checked as f64
    }

    pub fn line(&self) -> String {
        let mut s = format!(
            "criterion {} {}: {} ({}/{} agree{}; {:.1}s)",
            self.id,
            if self.passed() { "PASS" } else { "FAIL" },
            self.title,
            self.checked - self.failed,
            self.checked,
            if self.note.is_empty() { String::new() } else { format!("; {}", self.note) },
            self.elapsed.as_secs_f64()
        );
        for f in &self.failures {
            s.push_str("\n    ");
            s.push_str(f);
        }
        s
    }
}

struct Tally {
    checked: usize,
    failed: usize,
    failures: Vec<String>,
}

impl Tally {
    fn new() -> Self {
        Self { checked: 0, failed: 0, failures: Vec::new() }
    }

    fn check(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.fail(msg());
        }
    }

    fn fail(&mut self, msg: String) {
        self.failed += 1;
        if self.failures.len() < KEEP_FAILURES {
            self.failures.push(msg);
        }
    }

    /// Records an error as a failed check.
    fn ok<T>(&mut self, r: Result<T>, what: impl FnOnce() -> String) -> Option<T> {
        match r {
            Ok(x) => Some(x),
            Err(e) => {
                self.checked += 1;
                self.fail(format!("{}: {e}", what()));
                None
            }
        }
    }

    fn report(self, id: u8, title: &'static str, note: String, start: Instant) -> CriterionReport {
        CriterionReport {
            id,
            title,
            checked: self.checked,
            failed: self.failed,
            failures: self.failures,
            note,
            elapsed: start.elapsed(),
        }
    }
}

fn seeded(id: u64) -> CorpusRng {
    corpus::rng(SEED + id)
}

fn oracle_cfg() -> OracleConfig {
    OracleConfig { max_edges: 64, ..OracleConfig::default() }
}

fn same_domination(a: &DominationAnswer, b: &DominationAnswer) -> bool {
    match (a, b) {
        (DominationAnswer::Infeasible, DominationAnswer::Infeasible) => true,
        (DominationAnswer::OverBudget { min_size: x }, DominationAnswer::OverBudget { min_size: y }) => x == y,
        (DominationAnswer::Within { min_size: x, .. }, DominationAnswer::Within { min_size: y, .. }) => x == y,
        _ => false,
    }
}

fn describe(a: &DominationAnswer) -> String {
    match a {
        DominationAnswer::Infeasible => "infeasible".into(),
        DominationAnswer::OverBudget { min_size } => format!("over-budget (min {min_size})"),
        DominationAnswer::Within { min_size, .. } => format!("size {min_size}"),
    }
}

/// ORO over every small connected graph, weight vector and partition.
pub fn criterion1(scale: &Scale) -> CriterionReport {
    let start = Instant::now();
    let mut t = Tally::new();
    let mut rng = seeded(1);
    let cfg = OroConfig::unbounded();
    let ocfg = oracle_cfg();
    let mut instances = 0usize;
    let mut yes = 0usize;
    for n in 1..=scale.c1_max_vertices {
        for edges in corpus::connected_graphs(n, scale.c1_max_edges) {
            let shape = corpus::weighted(n, &edges, &vec![1; edges.len()]);
            let partitions = corpus::all_tree_partitions(&shape, 3);
            for weights in corpus::weight_vectors(edges.len(), scale.c1_weights) {
                let g = corpus::weighted(n, &edges, &weights);
                let inst = corpus::random_oro(&mut rng, g);
                instances += 1;
                let Some(truth) = t.ok(oracle_oro(&inst, &ocfg), || format!("oracle on {edges:?} {weights:?}")) else {
                    continue;
                };
                yes += usize::from(truth.is_some());
                for p in &partitions {
                    let Some(d) = t.ok(solve_oro(&inst, p, &cfg), || format!("dp on {edges:?} {weights:?} {p:?}")) else {
                        continue;
                    };
                    let witness_ok = d.witness().is_none_or(|o| inst.is_satisfied_by(o));
                    t.check(d.is_yes() == truth.is_some() && witness_ok, || {
                        format!("ORO {edges:?} w={weights:?} {:?} bags={:?}: dp {} oracle {}", inst.intervals, p.bags, d.is_yes(), truth.is_some())
                    });
                }
            }
        }
    }
    t.report(1, "ORO exactness", format!("{instances} instances, {yes} yes"), start)
}

fn random_family_graph(rng: &mut CorpusRng) -> WeightedGraph {
    let n = rng.gen_range(1..=6);
    let extra = rng.gen_range(0..=4);
    corpus::random_connected_graph(rng, n, extra, 4)
}

fn family_check<I: LiftToOro + std::fmt::Debug>(
    t: &mut Tally,
    rng: &mut CorpusRng,
    name: &str,
    inst: &I,
    g: &WeightedGraph,
    accept: impl Fn(&Orientation) -> bool,
) -> bool {
    let part = corpus::random_tree_partition(rng, g, 4);
    let truth = oracle_enumerate_orientations(g.num_edges(), &oracle_cfg(), &accept);
    let Some(truth) = t.ok(truth, || format!("{name} oracle on {inst:?}")) else {
        return false;
    };
    let Some(d) = t.ok(solve_lifted(inst, None, &part, &OroConfig::unbounded()), || format!("{name} dp on {inst:?}")) else {
        return false;
    };
    let witness_ok = d.witness().is_none_or(&accept);
    t.check(d.is_yes() == truth.is_some() && witness_ok, || {
        format!("{name} {inst:?} bags={:?}: dp {} oracle {}", part.bags, d.is_yes(), truth.is_some())
    });
    truth.is_some()
}

/// TOO/CMO/MMO/CO, UFLB and AoNF against their oracles.
pub fn criterion2(scale: &Scale) -> CriterionReport {
    let start = Instant::now();
    let mut t = Tally::new();
    let mut rng = seeded(2);
    let mut yes = 0usize;
    for _ in 0..scale.c2_family {
        let g = random_family_graph(&mut rng);
        let inst = corpus::random_too(&mut rng, g.clone());
        yes += usize::from(family_check(&mut t, &mut rng, "TOO", &inst, &g, |o| inst.is_satisfied_by(o)));
    }
    for _ in 0..scale.c2_family {
        let g = random_family_graph(&mut rng);
        let inst = corpus::random_cmo(&mut rng, g.clone());
        yes += usize::from(family_check(&mut t, &mut rng, "CMO", &inst, &g, |o| inst.is_satisfied_by(o)));
    }
    for _ in 0..scale.c2_family {
        let g = random_family_graph(&mut rng);
        let inst = corpus::random_mmo(&mut rng, g.clone());
        yes += usize::from(family_check(&mut t, &mut rng, "MMO", &inst, &g, |o| inst.is_satisfied_by(o)));
    }
    for _ in 0..scale.c2_family {
        let n = rng.gen_range(1..=6);
        let extra = rng.gen_range(0..=4);
        // Half the graphs get doubled weights so every degree is even.
        let g = if rng.gen_bool(0.5) {
            let base = corpus::random_connected_graph(&mut rng, n, extra, 2);
            let e: Vec<_> = base.edges().iter().map(|e| (e.u, e.v, 2 * e.w)).collect();
            WeightedGraph::from_edges(n, &e).expect("same vertices")
        } else {
            corpus::random_connected_graph(&mut rng, n, extra, 4)
        };
        let inst = CoInstance { graph: g.clone() };
        yes += usize::from(family_check(&mut t, &mut rng, "CO", &inst, &g, |o| inst.is_satisfied_by(o)));
    }
    let ocfg = oracle_cfg();
    let cfg = OroConfig::unbounded();
    for _ in 0..scale.c2_flow {
        let n = rng.gen_range(2..=5);
        let extra = rng.gen_range(0..=5 - (n - 1));
        let g = corpus::random_connected_graph(&mut rng, n, extra, 4);
        let inst = corpus::random_uflb(&mut rng, g.clone());
        let part = corpus::random_tree_partition(&mut rng, &g, 3);
        let (Some(truth), Some(d)) = (
            t.ok(oracle_uflb(&inst, &ocfg), || format!("UFLB oracle on {inst:?}")),
            t.ok(solve_uflb(&inst, &part, &cfg), || format!("UFLB dp on {inst:?}")),
        ) else {
            continue;
        };
        yes += usize::from(truth.is_some());
        let witness_ok = d.witness().is_none_or(|(o, f)| inst.is_satisfied_by(o, f));
        t.check(d.is_yes() == truth.is_some() && witness_ok, || {
            format!("UFLB {inst:?} bags={:?}: dp {} oracle {}", part.bags, d.is_yes(), truth.is_some())
        });
    }
    for _ in 0..scale.c2_flow {
        let n = rng.gen_range(2..=5);
        let arcs = rng.gen_range(n - 1..=5);
        let inst = corpus::random_aonf(&mut rng, n, arcs, 4);
        let part = corpus::random_tree_partition(&mut rng, &inst.network.underlying_weighted(), 3);
        let (Some(truth), Some(by_ilp), Some(d)) = (
            t.ok(oracle_aonf(&inst, AonfRoute::Enumerate, &ocfg), || format!("AoNF oracle on {inst:?}")),
            t.ok(oracle_aonf(&inst, AonfRoute::Ilp, &ocfg), || format!("AoNF ILP oracle on {inst:?}")),
            t.ok(solve_aonf(&inst, &part, &cfg), || format!("AoNF dp on {inst:?}")),
        ) else {
            continue;
        };
        yes += usize::from(truth.is_some());
        let witness_ok = d.witness().is_none_or(|f| inst.is_satisfied_by(f));
        t.check(d.is_yes() == truth.is_some() && by_ilp.is_some() == truth.is_some() && witness_ok, || {
            format!("AoNF {inst:?} bags={:?}: dp {} oracle {} ilp {}", part.bags, d.is_yes(), truth.is_some(), by_ilp.is_some())
        });
    }
    let total = 4 * scale.c2_family + 2 * scale.c2_flow;
    t.report(2, "family exactness (TOO/CMO/MMO/CO/UFLB/AoNF)", format!("{total} instances, {yes} yes"), start)
}

fn pins_share_bags(inst: &CrbdsInstance, p: &TreePartition) -> bool {
    let of = p.bag_of(inst.graph.num_vertices());
    inst.pins.iter().enumerate().all(|(b, r)| r.is_none_or(|r| of[b] == of[r]))
}

fn crbds_check(t: &mut Tally, inst: &CrbdsInstance, p: &TreePartition, truth: &DominationAnswer) {
    let Some(d) = t.ok(solve_crbds(inst, p, &CdsConfig::default()), || format!("CRBDS dp on {inst:?} {p:?}")) else {
        return;
    };
    let witness_ok = match &d {
        DominationAnswer::Within { min_size, witness } => inst.check_witness(witness).ok() == Some(*min_size),
        _ => true,
    };
    t.check(same_domination(&d, truth) && witness_ok, || {
        format!("CRBDS {inst:?} bags={:?}: dp {} oracle {}", p.bags, describe(&d), describe(truth))
    });
}

/// Capacitated red-blue and capacitated dominating set minima.
pub fn criterion3(scale: &Scale) -> CriterionReport {
    let start = Instant::now();
    let mut t = Tally::new();
    let mut rng = seeded(3);
    let ocfg = oracle_cfg();
    let side = scale.c3_exhaustive_side;
    let mut exhaustive = 0usize;
    for r in 0..=side {
        for b in 0..=side {
            for mut inst in corpus::all_crbds(r, b, 3) {
                inst.budget = rng.gen_range(0..=r);
                exhaustive += 1;
                let Some(truth) = t.ok(oracle_crbds(&inst, &ocfg), || format!("CRBDS oracle on {inst:?}")) else {
                    continue;
                };
                crbds_check(&mut t, &inst, &TreePartition::single_bag(r + b), &truth);
                let p = corpus::random_tree_partition(&mut rng, &inst.graph, 3);
                crbds_check(&mut t, &inst, &p, &truth);
            }
        }
    }
    for _ in 0..scale.c3_pinned {
        let (r, b) = (rng.gen_range(1..=4), rng.gen_range(1..=4));
        let inst = corpus::random_crbds(&mut rng, r, b, 3, true);
        let Some(truth) = t.ok(oracle_crbds(&inst, &ocfg), || format!("CRBDS oracle on {inst:?}")) else {
            continue;
        };
        let mut p = corpus::random_tree_partition(&mut rng, &inst.graph, 4);
        if !pins_share_bags(&inst, &p) {
            p = TreePartition::single_bag(r + b);
        }
        crbds_check(&mut t, &inst, &p, &truth);
    }
    let mut cds = 0;
    while cds < scale.c3_cds {
        let n = rng.gen_range(1..=7);
        let extra = rng.gen_range(0..=3);
        let g = corpus::random_connected_graph(&mut rng, n, extra, 1);
        let inst = corpus::random_cds(&mut rng, g, 3);
        let Some(p) = (0..100)
            .map(|_| corpus::random_tree_partition(&mut rng, &inst.graph, n))
            .find(|p| p.width() <= 3)
        else {
            continue;
        };
        cds += 1;
        let (Some(truth), Some(d)) = (
            t.ok(oracle_cds(&inst, &ocfg), || format!("CDS oracle on {inst:?}")),
            t.ok(solve_cds(&inst, &p, &CdsConfig::default()), || format!("CDS dp on {inst:?} {p:?}")),
        ) else {
            continue;
        };
        let witness_ok = match &d {
            DominationAnswer::Within { min_size, witness } => inst.check_witness(witness).ok() == Some(*min_size),
            _ => true,
        };
        t.check(same_domination(&d, &truth) && witness_ok, || {
            format!("CDS {inst:?} bags={:?}: dp {} oracle {}", p.bags, describe(&d), describe(&truth))
        });
    }
    let note = format!(
        "{exhaustive} red-blue instances (all up to isomorphism, up to {side}+{side}), {} pinned, {} CDS; spread assertions armed",
        scale.c3_pinned, scale.c3_cds
    );
    t.report(3, "CRBDS/CDS exactness", note, start)
}

fn small_graph(rng: &mut CorpusRng, max_n: usize, max_w: i64) -> WeightedGraph {
    let n = rng.gen_range(1..=max_n);
    let extra = rng.gen_range(0..=3);
    corpus::random_connected_graph(rng, n, extra, max_w)
}

/// Oracle answers agree across every reduction and witnesses translate
/// back.
pub fn criterion4(scale: &Scale) -> CriterionReport {
    let start = Instant::now();
    let mut t = Tally::new();
    let mut rng = seeded(4);
    let ocfg = oracle_cfg();
    let k = scale.c4_per_reduction;

    fn lift_case<I: LiftToOro + std::fmt::Debug>(
        t: &mut Tally,
        name: &str,
        inst: &I,
        g: &WeightedGraph,
        accept: impl Fn(&Orientation) -> bool,
    ) {
        let ocfg = oracle_cfg();
        let Some(truth) = t.ok(oracle_enumerate_orientations(g.num_edges(), &ocfg, &accept), || format!("{name} enumeration")) else {
            return;
        };
        let out = match inst.lift_to_oro() {
            Lifted::TrivialNo(_) => None,
            Lifted::Instance(oro) => match t.ok(oracle_oro(&oro, &ocfg), || format!("{name} lifted oracle")) {
                Some(x) => x,
                None => return,
            },
        };
        let back_ok = out.as_ref().is_none_or(&accept);
        t.check(truth.is_some() == out.is_some() && back_ok, || {
            format!("lift {name} {inst:?}: input {} output {}", truth.is_some(), out.is_some())
        });
    }

    for _ in 0..k {
        let g = small_graph(&mut rng, 5, 3);
        let inst = corpus::random_too(&mut rng, g.clone());
        lift_case(&mut t, "TOO", &inst, &g, |o| inst.is_satisfied_by(o));
        let inst = corpus::random_cmo(&mut rng, g.clone());
        lift_case(&mut t, "CMO", &inst, &g, |o| inst.is_satisfied_by(o));
        let inst = corpus::random_mmo(&mut rng, g.clone());
        lift_case(&mut t, "MMO", &inst, &g, |o| inst.is_satisfied_by(o));
        let inst = CoInstance { graph: g.clone() };
        lift_case(&mut t, "CO", &inst, &g, |o| inst.is_satisfied_by(o));
    }

    for _ in 0..k {
        let n = rng.gen_range(2..=5);
        let arcs = rng.gen_range(n - 1..=6);
        let inst = corpus::random_aonf(&mut rng, n, arcs, 3);
        let (Some(truth), Some(r)) = (
            t.ok(oracle_aonf(&inst, AonfRoute::Enumerate, &ocfg), || "aonf oracle".into()),
            t.ok(aonf_to_too(&inst, None), || format!("aonf_to_too on {inst:?}")),
        ) else {
            continue;
        };
        let Some(out) = t.ok(oracle_lifted(&r.instance, &ocfg), || "TOO oracle".into()) else { continue };
        let back_ok = out.as_ref().is_none_or(|o| inst.is_satisfied_by(&r.flow_from_orientation(&inst, o)));
        t.check(truth.is_some() == out.is_some() && back_ok, || {
            format!("aonf_to_too {inst:?}: input {} output {}", truth.is_some(), out.is_some())
        });
    }

    for _ in 0..k {
        let g = small_graph(&mut rng, 5, 3);
        let inst = corpus::random_too(&mut rng, g.clone());
        let accept = |o: &Orientation| inst.is_satisfied_by(o);
        let (Some(truth), Some(r)) = (
            t.ok(oracle_enumerate_orientations(g.num_edges(), &ocfg, accept), || "TOO enumeration".into()),
            t.ok(too_to_co(&inst), || format!("too_to_co on {inst:?}")),
        ) else {
            continue;
        };
        let Some(out) = t.ok(oracle_lifted(&r.instance, &ocfg), || "CO oracle".into()) else { continue };
        let back_ok = out.as_ref().is_none_or(|o| inst.is_satisfied_by(&r.orientation_back(o)));
        let forward_ok = truth.as_ref().is_none_or(|o| r.instance.is_satisfied_by(&r.orientation_forward(&inst, o)));
        t.check(truth.is_some() == out.is_some() && back_ok && forward_ok, || {
            format!("too_to_co {inst:?}: input {} output {}", truth.is_some(), out.is_some())
        });
    }

    for _ in 0..k {
        let g = small_graph(&mut rng, 5, 3);
        let inst = corpus::random_too(&mut rng, g.clone());
        let accept = |o: &Orientation| inst.is_satisfied_by(o);
        let Some(truth) = t.ok(oracle_enumerate_orientations(g.num_edges(), &ocfg, accept), || "TOO enumeration".into()) else {
            continue;
        };
        let out = match too_to_cmo(&inst) {
            Lifted::TrivialNo(_) => None,
            Lifted::Instance(cmo) => match t.ok(oracle_lifted(&cmo, &ocfg), || "CMO oracle".into()) {
                Some(x) => x,
                None => continue,
            },
        };
        let back_ok = out.as_ref().is_none_or(accept);
        t.check(truth.is_some() == out.is_some() && back_ok, || {
            format!("too_to_cmo {inst:?}: input {} output {}", truth.is_some(), out.is_some())
        });
    }

    for _ in 0..k {
        let n = rng.gen_range(2..=4);
        let extra = rng.gen_range(0..=4 - (n - 1));
        let g = corpus::random_connected_graph(&mut rng, n, extra, 3);
        let inst = corpus::random_uflb(&mut rng, g);
        let (Some(truth), Some(r)) = (
            t.ok(oracle_uflb(&inst, &ocfg), || "UFLB oracle".into()),
            t.ok(uflb_to_co(&inst, None), || format!("uflb_to_co on {inst:?}")),
        ) else {
            continue;
        };
        let (out, back_ok) = match &r {
            Lifted::TrivialNo(_) => (false, true),
            Lifted::Instance(red) => match t.ok(oracle_lifted(&red.instance, &ocfg), || "CO oracle".into()) {
                None => continue,
                Some(o) => {
                    let ok = o.as_ref().is_none_or(|o| {
                        let (orient, flow) = red.witness_back(&inst, o);
                        inst.is_satisfied_by(&orient, &flow)
                    });
                    (o.is_some(), ok)
                }
            },
        };
        t.check(truth.is_some() == out && back_ok, || format!("uflb_to_co {inst:?}: input {} output {out}", truth.is_some()));
    }

    for _ in 0..k {
        let g = small_graph(&mut rng, 5, 1);
        let inst = corpus::random_cds(&mut rng, g, 3);
        let (Some(truth), Some(r)) = (
            t.ok(oracle_cds(&inst, &ocfg), || "CDS oracle".into()),
            t.ok(cds_to_crbds(&inst, None), || format!("cds_to_crbds on {inst:?}")),
        ) else {
            continue;
        };
        let Some(out) = t.ok(oracle_crbds(&r.instance, &ocfg), || "CRBDS oracle".into()) else { continue };
        let back_ok = match &out {
            DominationAnswer::Within { min_size, witness } => inst.check_witness(&r.witness_back(witness)).ok() == Some(*min_size),
            _ => true,
        };
        t.check(same_domination(&truth, &out) && back_ok, || {
            format!("cds_to_crbds {inst:?}: input {} output {}", describe(&truth), describe(&out))
        });
    }
    t.report(4, "reduction soundness", format!("{k} instances per reduction, 9 reductions"), start)
}

/// Partitions built from harmonic morphisms respect the breadth and size
/// bounds, and solving over them matches the oracle.
pub fn criterion5(scale: &Scale) -> CriterionReport {
    let start = Instant::now();
    let mut t = Tally::new();
    let mut rng = seeded(5);
    let ocfg = oracle_cfg();
    let mut families = std::collections::BTreeMap::new();
    for i in 0..scale.c5_morphisms {
        let sample = match i % 5 {
            0 => corpus::cycle_fold(rng.gen_range(2..=5)),
            1 => {
                let (n, w) = (rng.gen_range(2..=6), rng.gen_range(1..=3));
                corpus::tree_identity(&mut rng, n, w)
            }
            _ => {
                let (nodes, d) = (rng.gen_range(2..=4), rng.gen_range(1..=3));
                corpus::random_morphism(&mut rng, nodes, d)
            }
        };
        *families.entry(sample.family).or_insert(0usize) += 1;
        let degree = validate_harmonic_morphism(&sample.morphism);
        let g = &sample.graph;
        let Some((sub, p)) = t.ok(morphism_to_tree_partition(g, &sample.morphism), || format!("conversion of {sample:?}")) else {
            continue;
        };
        let breadth = validate_tree_partition(&sub.graph, &p);
        let within = match (&breadth, &degree) {
            (Ok(b), Ok(d)) => b.value <= *d && p.num_nodes() <= 2 * g.num_vertices(),
            _ => false,
        };
        t.check(within, || format!("{} sample: breadth {breadth:?}, degree {degree:?}, {} nodes for {} vertices", sample.family, p.num_nodes(), g.num_vertices()));
        // Solving over the produced partition agrees with the oracle.
        let inst = corpus::random_oro(&mut rng, g.clone());
        if g.num_edges() <= 16 {
            let (Some(truth), Some(d)) = (
                t.ok(oracle_oro(&inst, &ocfg), || "oracle".into()),
                t.ok(solve_oro_subdivided(&inst, &sub, &p, &OroConfig::unbounded()), || "dp over the morphism partition".into()),
            ) else {
                continue;
            };
            let ok = d.is_yes() == truth.is_some() && d.witness().is_none_or(|o| inst.is_satisfied_by(o));
            t.check(ok, || format!("{} sample: dp {} oracle {}", sample.family, d.is_yes(), truth.is_some()));
        }
    }
    let note = families.iter().map(|(f, c)| format!("{c} {f}")).collect::<Vec<_>>().join(", ");
    t.report(5, "morphism partition bounds", note, start)
}

fn all_machines() -> Vec<NnccmMachine> {
    let mut out = Vec::new();
    for k in 1..=2usize {
        for bound in 0..=2u32 {
            let tests: Vec<Test> = (1..=k)
                .flat_map(|i| (0..=bound).flat_map(move |a| (1..=k).flat_map(move |j| (0..=bound).map(move |b| Test { i, a, j, b }))))
                .collect();
            out.push(NnccmMachine { counters: k, bound, tests: vec![] });
            for &x in &tests {
                out.push(NnccmMachine { counters: k, bound, tests: vec![x] });
            }
            for &x in &tests {
                for &y in &tests {
                    out.push(NnccmMachine { counters: k, bound, tests: vec![x, y] });
                }
            }
        }
    }
    out
}

/// Counter machines against their all-or-nothing flow encodings.
pub fn criterion6(scale: &Scale) -> CriterionReport {
    let start = Instant::now();
    let mut t = Tally::new();
    let mut machines = all_machines();
    let total = machines.len();
    if let Some(s) = scale.c6_sample {
        use rand::seq::SliceRandom;
        let mut rng = seeded(6);
        machines.shuffle(&mut rng);
        machines.truncate(s);
    }
    let cfg = OracleConfig { ilp: IlpSolver::with_node_budget(Some(20_000_000)), ..oracle_cfg() };
    let mut accepting = 0;
    for m in &machines {
        let (Some(run), Some(net)) = (
            t.ok(oracle_nnccm(m, 1 << 20), || format!("machine oracle on {m:?}")),
            t.ok(nnccm_to_aonf(m), || format!("generator on {m:?}")),
        ) else {
            continue;
        };
        let Some(flow) = t.ok(oracle_aonf(&net.instance, AonfRoute::Ilp, &cfg), || format!("AoNF oracle on {m:?}")) else {
            continue;
        };
        let flow_ok = flow.as_ref().is_none_or(|f| net.instance.is_satisfied_by(f));
        t.check(run.is_some() == flow.is_some() && flow_ok, || {
            format!("{m:?}: machine accepts {} network accepts {}", run.is_some(), flow.is_some())
        });
        if let Some(run) = run {
            accepting += 1;
            let built = witness_flow_from_run(m, &net, &run);
            let ok = built.as_ref().is_ok_and(|f| {
                let r = check_flow(&net.instance.network, f);
                r.is_valid() && r.value == net.value() && net.instance.is_satisfied_by(f)
            });
            t.check(ok, || format!("{m:?}: witness flow from the run is invalid"));
        }
    }
    let note = format!("{} of {total} machines, {accepting} accepting", machines.len());
    t.report(6, "counter machine cross-check", note, start)
}

fn multisets(max_len: usize, max_item: i64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    fn go(cur: &mut Vec<i64>, min: i64, max_len: usize, max_item: i64, out: &mut Vec<Vec<i64>>) {
        if !cur.is_empty() {
            out.push(cur.clone());
        }
        if cur.len() == max_len {
            return;
        }
        for a in min..=max_item {
            cur.push(a);
            go(cur, a, max_len, max_item, out);
            cur.pop();
        }
    }
    go(&mut Vec::new(), 1, max_len, max_item, &mut out);
    out
}

/// Bin packing: the packing oracle and both encodings agree.
pub fn criterion7(scale: &Scale) -> CriterionReport {
    let start = Instant::now();
    let mut t = Tally::new();
    let ocfg = oracle_cfg();
    let mut instances = 0;
    let mut yes = 0;
    for items in multisets(scale.c7_max_items, 6) {
        let total: i64 = items.iter().sum();
        let largest = *items.iter().max().expect("non-empty");
        for bins in 1..=total as usize {
            let size = total / bins as i64;
            if size * bins as i64 != total || size < largest {
                continue;
            }
            instances += 1;
            let (Some(direct), Some(too), Some(aonf)) = (
                t.ok(oracle_binpacking(&items, size, bins), || "packing oracle".into()),
                t.ok(binpacking_to_too(&items, size, bins), || "packing to TOO".into()),
                t.ok(binpacking_to_aonf(&items, size, bins), || "packing to AoNF".into()),
            ) else {
                continue;
            };
            let (Some(o), Some(f)) = (
                t.ok(oracle_lifted(&too.instance, &ocfg), || format!("TOO oracle on {items:?} B={size} k={bins}")),
                t.ok(oracle_aonf(&aonf, AonfRoute::Auto, &ocfg), || format!("AoNF oracle on {items:?} B={size} k={bins}")),
            ) else {
                continue;
            };
            yes += usize::from(direct.is_some());
            let packing_ok = o.as_ref().is_none_or(|o| {
                let bin = too.packing_from_orientation(o);
                let mut load = vec![0; bins];
                bin.iter().zip(&items).for_each(|(&b, &a)| load[b] += a);
                load.iter().all(|&l| l == size)
            });
            t.check(direct.is_some() == o.is_some() && o.is_some() == f.is_some() && packing_ok, || {
                format!("{items:?} B={size} k={bins}: direct {} TOO {} AoNF {}", direct.is_some(), o.is_some(), f.is_some())
            });
        }
    }
    t.report(7, "bin packing three-way agreement", format!("{instances} instances, {yes} yes"), start)
}

fn round_trip(t: &mut Tally, inst: &Instance, witness_text: &str, origin: &str) {
    let text = format::write_instance(inst);
    let parsed = format::parse_instance(&text);
    let checked = parsed.and_then(|p| {
        let w = format::parse_witness(witness_text)?;
        format::check_witness(&p, &w)
    });
    t.check(matches!(checked, Ok(WitnessCheck::Valid { .. })), || {
        format!("{origin} witness for {} rejected: {checked:?}", inst.kind())
    });
}

/// Every yes answer yields a witness file accepted by the validator.
pub fn criterion8(scale: &Scale) -> CriterionReport {
    let start = Instant::now();
    let mut t = Tally::new();
    let mut rng = seeded(8);
    let ocfg = oracle_cfg();
    let cfg = OroConfig::unbounded();
    for _ in 0..scale.c8_per_problem {
        let g = small_graph(&mut rng, 5, 3);
        let p = corpus::random_tree_partition(&mut rng, &g, 3);
        let cases = [
            Instance::Oro(corpus::random_oro(&mut rng, g.clone())),
            Instance::Too(corpus::random_too(&mut rng, g.clone())),
            Instance::Cmo(corpus::random_cmo(&mut rng, g.clone())),
            Instance::Mmo(corpus::random_mmo(&mut rng, g.clone())),
            Instance::Co(CoInstance { graph: g.clone() }),
        ];
        for inst in &cases {
            let (fpt, oracle) = match inst {
                Instance::Oro(x) => (solve_lifted(x, None, &p, &cfg), oracle_lifted(x, &ocfg)),
                Instance::Too(x) => (solve_lifted(x, None, &p, &cfg), oracle_lifted(x, &ocfg)),
                Instance::Cmo(x) => (solve_lifted(x, None, &p, &cfg), oracle_lifted(x, &ocfg)),
                Instance::Mmo(x) => (solve_lifted(x, None, &p, &cfg), oracle_lifted(x, &ocfg)),
                Instance::Co(x) => (solve_lifted(x, None, &p, &cfg), oracle_lifted(x, &ocfg)),
                _ => unreachable!("orientation problems only"),
            };
            if let Some(d) = t.ok(fpt, || "fpt solve".into()) {
                if let Some(o) = d.witness() {
                    round_trip(&mut t, inst, &format::write_orientation(&g, o), "fpt");
                }
            }
            if let Some(Some(o)) = t.ok(oracle, || "oracle solve".into()) {
                round_trip(&mut t, inst, &format::write_orientation(&g, &o), "oracle");
            }
        }
        if g.num_vertices() >= 2 {
            let u = corpus::random_uflb(&mut rng, g.clone());
            if let Some(d) = t.ok(solve_uflb(&u, &p, &cfg), || "fpt UFLB".into()) {
                if let Some((o, f)) = d.witness() {
                    let text = format::write_orientation(&u.graph, o) + &format::write_flow(f);
                    round_trip(&mut t, &Instance::Uflb(u.clone()), &text, "fpt");
                }
            }
            if let Some(Some((o, f))) = t.ok(oracle_uflb(&u, &ocfg), || "oracle UFLB".into()) {
                let text = format::write_orientation(&u.graph, &o) + &format::write_flow(&f);
                round_trip(&mut t, &Instance::Uflb(u), &text, "oracle");
            }
        }
        let n = rng.gen_range(2..=5);
        let arcs = rng.gen_range(n - 1..=6);
        let a = corpus::random_aonf(&mut rng, n, arcs, 3);
        let ap = corpus::random_tree_partition(&mut rng, &a.network.underlying_weighted(), 3);
        if let Some(d) = t.ok(solve_aonf(&a, &ap, &cfg), || "fpt AoNF".into()) {
            if let Some(f) = d.witness() {
                round_trip(&mut t, &Instance::Aonf(a.clone()), &format::write_flow(f), "fpt");
            }
        }
        if let Some(Some(f)) = t.ok(oracle_aonf(&a, AonfRoute::Auto, &ocfg), || "oracle AoNF".into()) {
            round_trip(&mut t, &Instance::Aonf(a), &format::write_flow(&f), "oracle");
        }
        let cg = small_graph(&mut rng, 5, 1);
        let c = corpus::random_cds(&mut rng, cg.clone(), 3);
        let cp = corpus::random_tree_partition(&mut rng, &cg, 5);
        for (origin, ans) in [("fpt", solve_cds(&c, &cp, &CdsConfig::default())), ("oracle", oracle_cds(&c, &ocfg))] {
            if let Some(DominationAnswer::Within { witness, .. }) = t.ok(ans, || format!("{origin} CDS")) {
                round_trip(&mut t, &Instance::Cds(c.clone()), &format::write_domination(&witness), origin);
            }
        }
        let (reds, pinned) = (rng.gen_range(1..=3), rng.gen_bool(0.5));
        let rb = corpus::random_crbds(&mut rng, reds, 3, 2, pinned);
        let single = TreePartition::single_bag(rb.graph.num_vertices());
        for (origin, ans) in [("fpt", solve_crbds(&rb, &single, &CdsConfig::default())), ("oracle", oracle_crbds(&rb, &ocfg))] {
            if let Some(DominationAnswer::Within { witness, .. }) = t.ok(ans, || format!("{origin} CRBDS")) {
                round_trip(&mut t, &Instance::Crbds(rb.clone()), &format::write_domination(&witness), origin);
            }
        }
    }
    t.report(8, "witness round trip", format!("{} rounds over all nine problems", scale.c8_per_problem), start)
}

/// Branch and bound against exhaustive enumeration.
pub fn criterion9(scale: &Scale) -> CriterionReport {
    let start = Instant::now();
    let mut t = Tally::new();
    let mut rng = seeded(9);
    let mut feasible = 0;
    for _ in 0..scale.c9_models {
        let m = corpus::random_ilp(&mut rng, 6, 8);
        let (Some(bb), Some(ex)) = (
            t.ok(IlpSolver::default().solve(&m), || "branch and bound".into()),
            t.ok(solve_exhaustive(&m, u128::MAX), || "enumeration".into()),
        ) else {
            continue;
        };
        feasible += usize::from(ex.is_feasible());
        let ok = match (&bb, &ex) {
            (IlpOutcome::Infeasible, IlpOutcome::Infeasible) => true,
            (IlpOutcome::Feasible(x), IlpOutcome::Feasible(_)) => m.is_satisfied_by(x),
            (IlpOutcome::Optimal { assignment, value }, IlpOutcome::Optimal { value: v2, .. }) => {
                value == v2 && m.is_satisfied_by(assignment) && m.objective_value(assignment) == Some(*value)
            }
            _ => false,
        };
        t.check(ok, || format!("model {m:?}: branch and bound {bb:?}, enumeration {ex:?}"));
    }
    t.report(9, "ILP soundness", format!("{} models, {feasible} feasible", scale.c9_models), start)
}

pub fn run_criterion(id: u8, scale: &Scale) -> Option<CriterionReport> {
    Some(match id {
        1 => criterion1(scale),
        2 => criterion2(scale),
        3 => criterion3(scale),
        4 => criterion4(scale),
        5 => criterion5(scale),
        6 => criterion6(scale),
        7 => criterion7(scale),
        8 => criterion8(scale),
        9 => criterion9(scale),
        _ => return None,
    })
}
