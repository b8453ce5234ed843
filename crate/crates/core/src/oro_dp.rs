//! Fingerprint dynamic program for outdegree restricted orientation over a
//! tree partition, and the solvers for the problems that reduce to it.
//!
//! An empty node is placed above the partition root, so every real node
//! `i` owns exactly one arc, the one to its parent. The table of that arc
//! maps each realisable fingerprint (outdegree of every parent-bag vertex
//! towards the subtree of `i`) to the choice that realised it first.

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::graph::{EdgeId, Flow, Orientation, VertexId};
use crate::ilp::{IlpModel, IlpSolver, Relation};
use crate::problem::{AonfInstance, Interval, OroInstance, UflbInstance};
use crate::reductions::{aonf_to_too, uflb_to_co, Lifted, LiftToOro};
use crate::tree::{validate_tree_partition, NodeId, RootedTree, Subdivision, TreePartition};

#[derive(Clone, Copy, Debug)]
pub struct OroConfig {
    /// Largest accepted partition breadth; `None` disables the check.
    pub max_breadth: Option<i64>,
    /// Largest number of local orientations enumerated for one arc.
    pub max_local_orientations: u64,
    pub ilp: IlpSolver,
}

impl Default for OroConfig {
    fn default() -> Self {
        Self { max_breadth: Some(6), max_local_orientations: 1 << 20, ilp: IlpSolver::default() }
    }
}

impl OroConfig {
    pub fn unbounded() -> Self {
        Self { max_breadth: None, ..Self::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decision<W> {
    Yes(W),
    No,
}

impl<W> Decision<W> {
    pub fn is_yes(&self) -> bool {
        matches!(self, Decision::Yes(_))
    }

    pub fn witness(&self) -> Option<&W> {
        match self {
            Decision::Yes(w) => Some(w),
            Decision::No => None,
        }
    }

    pub fn map<U>(self, f: impl FnOnce(W) -> U) -> Decision<U> {
        match self {
            Decision::Yes(w) => Decision::Yes(f(w)),
            Decision::No => Decision::No,
        }
    }
}

/// Instance on the subdivided graph: subdivision vertices must keep the
/// flow of their edge, so their interval is the edge weight.
pub fn preprocess(inst: &OroInstance, sub: &Subdivision) -> Result<OroInstance> {
    if sub.base != inst.graph {
        return Err(Error::invalid("subdivision is not based on the instance graph"));
    }
    let mut intervals = inst.intervals.clone();
    for x in inst.graph.num_vertices()..sub.graph.num_vertices() {
        let e = sub.vertex_origin[x].expect("subdivision vertex has an origin");
        intervals.push(Interval::point(inst.graph.edge(e).w));
    }
    Ok(OroInstance { graph: sub.graph.clone(), intervals })
}

#[derive(Clone, Debug)]
struct Choice {
    /// Local orientation, bit `j` set when local edge `j` is reversed.
    rho: u64,
    /// Per child class, the fingerprint indices used and how often.
    blueprint: Vec<Vec<(usize, i64)>>,
}

/// Fingerprints of the arc from `node` to its parent, over the positions
/// of the parent bag (empty for the partition root).
#[derive(Clone, Debug)]
pub struct ArcTable {
    pub node: NodeId,
    entries: BTreeMap<Vec<i64>, Choice>,
}

impl ArcTable {
    pub fn fingerprints(&self) -> impl Iterator<Item = &Vec<i64>> {
        self.entries.keys()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, f: &[i64]) -> bool {
        self.entries.contains_key(f)
    }
}

/// Grouping of the children of one node by table equality.
#[derive(Clone, Debug)]
struct ChildClass {
    members: Vec<NodeId>,
    fingerprints: Vec<Vec<i64>>,
}

/// All arc tables of one run, kept for witness reconstruction and tests.
#[derive(Clone, Debug)]
pub struct OroTables {
    pub breadth: i64,
    pub tables: Vec<ArcTable>,
    rooted: RootedTree,
    local: Vec<Vec<EdgeId>>,
    classes: Vec<Vec<ChildClass>>,
}

impl OroTables {
    /// The root arc table is non-empty exactly when a good orientation exists.
    pub fn accepts(&self) -> bool {
        !self.tables[self.rooted.root].is_empty()
    }

    pub fn num_classes(&self, node: NodeId) -> usize {
        self.classes[node].len()
    }
}

pub fn compute_tables(inst: &OroInstance, t: &TreePartition, cfg: &OroConfig) -> Result<OroTables> {
    inst.validate()?;
    let g = &inst.graph;
    let breadth = validate_tree_partition(g, t).map_err(|v| {
        let list: Vec<String> = v.iter().map(ToString::to_string).collect();
        Error::invalid(format!("invalid tree partition: {}", list.join("; ")))
    })?;
    if let Some(cap) = cfg.max_breadth {
        if breadth.value > cap {
            return Err(Error::resource(format!("breadth {} exceeds the limit {cap}", breadth.value)));
        }
    }
    let k = breadth.value;
    let n = g.num_vertices();
    let nodes = t.num_nodes();
    let rooted = t.rooted();
    let owner = t.bag_of(n);
    let mut pos = vec![0usize; n];
    for bag in &t.bags {
        for (i, &v) in bag.iter().enumerate() {
            pos[v] = i;
        }
    }

    let mut local = vec![Vec::new(); nodes];
    for (e, edge) in g.edges().iter().enumerate() {
        let (a, b) = (owner[edge.u], owner[edge.v]);
        let home = if a == b || rooted.parent[a] == Some(b) { a } else { b };
        local[home].push(e);
    }

    let mut tables: Vec<Option<ArcTable>> = vec![None; nodes];
    let mut classes = vec![Vec::new(); nodes];
    for node in rooted.postorder() {
        let edges = &local[node];
        if edges.len() >= 64 || (1u64 << edges.len()) > cfg.max_local_orientations {
            return Err(Error::resource(format!(
                "node {node} has {} local edges; too many orientations to enumerate",
                edges.len()
            )));
        }
        let bag = &t.bags[node];
        let parent_len = rooted.parent[node].map_or(0, |p| t.bags[p].len());

        let mut node_classes: Vec<ChildClass> = Vec::new();
        for &c in &rooted.children[node] {
            let table = tables[c].as_ref().expect("children come first in postorder");
            let fps: Vec<Vec<i64>> = table.entries.keys().cloned().collect();
            match node_classes.iter_mut().find(|cl| cl.fingerprints == fps) {
                Some(cl) => cl.members.push(c),
                None => node_classes.push(ChildClass { members: vec![c], fingerprints: fps }),
            }
        }

        let mut entries = BTreeMap::new();
        if node_classes.iter().any(|cl| cl.fingerprints.is_empty()) {
            // Some subtree has no partial solution at all.
            tables[node] = Some(ArcTable { node, entries });
            classes[node] = node_classes;
            continue;
        }
        let mut cache: HashMap<Vec<i64>, Option<Vec<Vec<(usize, i64)>>>> = HashMap::new();
        let m = edges.len();
        for mask in 0..(1u64 << m) {
            let mut alpha = vec![0i64; bag.len()];
            let mut fp = vec![0i64; parent_len];
            for (j, &e) in edges.iter().enumerate() {
                let edge = g.edge(e);
                let reversed = mask >> (m - 1 - j) & 1 == 1;
                let tail = if reversed { edge.v } else { edge.u };
                if owner[tail] == node {
                    alpha[pos[tail]] += edge.w;
                } else {
                    fp[pos[tail]] += edge.w;
                }
            }
            for &x in &fp {
                assert!(x <= k, "fingerprint value {x} exceeds breadth {k}");
            }
            if entries.contains_key(&fp) {
                continue;
            }
            let blueprint = match cache.get(&alpha) {
                Some(b) => b.clone(),
                None => {
                    let b = extend(inst, bag, &alpha, &node_classes, &cfg.ilp)?;
                    cache.insert(alpha, b.clone());
                    b
                }
            };
            if let Some(blueprint) = blueprint {
                // Bit order above is most significant first; store the
                // per-edge reversal flags in edge order.
                let rho = (0..m).fold(0u64, |acc, j| acc | ((mask >> (m - 1 - j) & 1) << j));
                entries.insert(fp, Choice { rho, blueprint });
            }
        }
        tables[node] = Some(ArcTable { node, entries });
        classes[node] = node_classes;
    }
    Ok(OroTables {
        breadth: k,
        tables: tables.into_iter().map(|t| t.expect("every node processed")).collect(),
        rooted,
        local,
        classes,
    })
}

/// Decides whether the local outdegrees `alpha` of the bag can be completed
/// by child fingerprints; returns the blueprint when they can.
fn extend(
    inst: &OroInstance,
    bag: &[VertexId],
    alpha: &[i64],
    classes: &[ChildClass],
    solver: &IlpSolver,
) -> Result<Option<Vec<Vec<(usize, i64)>>>> {
    if classes.is_empty() {
        let ok = bag.iter().zip(alpha).all(|(&v, &a)| inst.intervals[v].contains(a));
        return Ok(ok.then(Vec::new));
    }
    let mut model = IlpModel::<i64>::new();
    let mut vars = Vec::with_capacity(classes.len());
    for (ci, cl) in classes.iter().enumerate() {
        let count = cl.members.len() as i64;
        let ids: Vec<_> = (0..cl.fingerprints.len())
            .map(|fi| model.add_var(format!("g_{ci}_{fi}"), 0, count))
            .collect();
        model.add_constraint(ids.iter().map(|&x| (x, 1)).collect(), Relation::Eq, count)?;
        vars.push(ids);
    }
    for (p, &v) in bag.iter().enumerate() {
        let mut terms = Vec::new();
        for (ci, cl) in classes.iter().enumerate() {
            for (fi, f) in cl.fingerprints.iter().enumerate() {
                if f[p] != 0 {
                    terms.push((vars[ci][fi], f[p]));
                }
            }
        }
        let iv = inst.intervals[v];
        let lo = iv.lo.checked_sub(alpha[p]).ok_or(Error::Overflow("interval bound"))?;
        let hi = iv.hi.checked_sub(alpha[p]).ok_or(Error::Overflow("interval bound"))?;
        if terms.is_empty() {
            if lo > 0 || hi < 0 {
                return Ok(None);
            }
            continue;
        }
        model.add_constraint(terms.clone(), Relation::Ge, lo)?;
        model.add_constraint(terms, Relation::Le, hi)?;
    }
    let outcome = solver.solve(&model)?;
    let Some(x) = outcome.assignment() else {
        return Ok(None);
    };
    let blueprint = vars
        .iter()
        .map(|ids| ids.iter().enumerate().filter(|&(_, &id)| x[id] > 0).map(|(fi, &id)| (fi, x[id])).collect())
        .collect();
    Ok(Some(blueprint))
}

impl OroTables {
    /// Reassembles a good orientation top-down from the recorded choices.
    pub fn witness(&self, inst: &OroInstance) -> Option<Orientation> {
        let root = self.rooted.root;
        let start = self.tables[root].entries.keys().next()?.clone();
        let mut forward = vec![true; inst.graph.num_edges()];
        let mut stack = vec![(root, start)];
        while let Some((node, fp)) = stack.pop() {
            let choice = &self.tables[node].entries[&fp];
            for (j, &e) in self.local[node].iter().enumerate() {
                forward[e] = choice.rho >> j & 1 == 0;
            }
            for (cl, uses) in self.classes[node].iter().zip(&choice.blueprint) {
                let mut members = cl.members.iter();
                for &(fi, count) in uses {
                    for _ in 0..count {
                        let child = *members.next().expect("blueprint matches class size");
                        stack.push((child, cl.fingerprints[fi].clone()));
                    }
                }
            }
        }
        Some(Orientation::new(forward))
    }
}

/// Decides outdegree restricted orientation given a tree partition of the
/// instance graph.
pub fn solve_oro(inst: &OroInstance, t: &TreePartition, cfg: &OroConfig) -> Result<Decision<Orientation>> {
    let tables = compute_tables(inst, t, cfg)?;
    if !tables.accepts() {
        return Ok(Decision::No);
    }
    let o = tables.witness(inst).expect("accepting tables yield a witness");
    if !inst.is_satisfied_by(&o) {
        return Err(Error::invalid("internal error: reconstructed orientation is not good"));
    }
    Ok(Decision::Yes(o))
}

/// As [`solve_oro`], with the partition given on a subdivision of the graph.
pub fn solve_oro_subdivided(
    inst: &OroInstance,
    sub: &Subdivision,
    t: &TreePartition,
    cfg: &OroConfig,
) -> Result<Decision<Orientation>> {
    let pre = preprocess(inst, sub)?;
    Ok(solve_oro(&pre, t, cfg)?.map(|o| sub.project_orientation(&o)))
}

/// Solves any problem that embeds into outdegree restricted orientation on
/// the same graph (TOO, CMO, MMO, CO). The witness is an orientation of
/// the input graph.
pub fn solve_lifted<I: LiftToOro>(
    inst: &I,
    sub: Option<&Subdivision>,
    t: &TreePartition,
    cfg: &OroConfig,
) -> Result<Decision<Orientation>> {
    match inst.lift_to_oro() {
        Lifted::TrivialNo(_) => Ok(Decision::No),
        Lifted::Instance(oro) => match sub {
            Some(s) => solve_oro_subdivided(&oro, s, t, cfg),
            None => solve_oro(&oro, t, cfg),
        },
    }
}

fn check_input_breadth(g: &crate::graph::WeightedGraph, t: &TreePartition, cfg: &OroConfig) -> Result<()> {
    let b = validate_tree_partition(g, t).map_err(|v| {
        let list: Vec<String> = v.iter().map(ToString::to_string).collect();
        Error::invalid(format!("invalid tree partition: {}", list.join("; ")))
    })?;
    match cfg.max_breadth {
        Some(cap) if b.value > cap => {
            Err(Error::resource(format!("breadth {} exceeds the limit {cap}", b.value)))
        }
        _ => Ok(()),
    }
}

/// Undirected flow with lower bounds through the circulating orientation
/// reduction. The breadth limit applies to the input partition.
pub fn solve_uflb(
    inst: &UflbInstance,
    t: &TreePartition,
    cfg: &OroConfig,
) -> Result<Decision<(Orientation, Flow)>> {
    inst.validate()?;
    check_input_breadth(&inst.graph, t, cfg)?;
    let red = match uflb_to_co(inst, Some(t))? {
        Lifted::TrivialNo(_) => return Ok(Decision::No),
        Lifted::Instance(r) => r,
    };
    let inner = OroConfig { max_breadth: None, ..*cfg };
    let part = red.partition.as_ref().expect("partition is transported");
    let d = solve_lifted(&red.instance, None, part, &inner)?;
    Ok(d.map(|o| red.witness_back(inst, &o)))
}

/// All-or-nothing flow through target outdegree orientation. The partition
/// is over the nodes of the network.
pub fn solve_aonf(inst: &AonfInstance, t: &TreePartition, cfg: &OroConfig) -> Result<Decision<Flow>> {
    inst.validate()?;
    check_input_breadth(&inst.network.underlying_weighted(), t, cfg)?;
    let red = aonf_to_too(inst, Some(t))?;
    let inner = OroConfig { max_breadth: None, ..*cfg };
    let part = red.partition.as_ref().expect("partition is transported");
    let d = solve_lifted(&red.instance, None, part, &inner)?;
    Ok(d.map(|o| red.flow_from_orientation(inst, &o)))
}
