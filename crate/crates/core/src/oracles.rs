//! Brute-force deciders that work straight from the problem definitions.
//! They share no code with the dynamic programs and serve as references
//! for small instances.

use crate::error::{Error, Result};
use crate::graph::{feasible_flow_with_lower_bounds, max_flow_value, Flow, FlowNetwork, Orientation, VertexId};
use crate::ilp::{IlpModel, IlpSolver, Relation};
use crate::problem::{
    uflb_network, AonfInstance, CdsInstance, CrbdsInstance, DominationAnswer, DominationWitness, OroInstance,
    UflbInstance,
};
use crate::reductions::{LiftToOro, Lifted};

pub use crate::hardness::{oracle_binpacking, oracle_nnccm};

#[derive(Clone, Copy, Debug)]
pub struct OracleConfig {
    /// Most edges an orientation search will branch on.
    pub max_edges: usize,
    /// Most candidate dominators (red vertices, or all vertices for CDS).
    pub max_candidates: usize,
    /// Most arcs the all-or-nothing enumerator handles; larger networks go
    /// to the integer program under [`AonfRoute::Auto`].
    pub max_enumerated_arcs: usize,
    pub ilp: IlpSolver,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self { max_edges: 24, max_candidates: 20, max_enumerated_arcs: 30, ilp: IlpSolver::default() }
    }
}

/// First satisfying orientation, searching edges in order with the forward
/// direction tried first.
pub fn oracle_oro(inst: &OroInstance, cfg: &OracleConfig) -> Result<Option<Orientation>> {
    inst.validate()?;
    let g = &inst.graph;
    let m = g.num_edges();
    if m > cfg.max_edges {
        return Err(Error::resource(format!("{m} edges exceed the oracle cap {}", cfg.max_edges)));
    }
    let n = g.num_vertices();
    let mut remaining = g.weighted_degrees();
    let mut out = vec![0i64; n];
    if (0..n).any(|v| inst.intervals[v].lo > remaining[v] || inst.intervals[v].hi < 0) {
        return Ok(None);
    }
    let mut forward = vec![true; m];

    fn viable(inst: &OroInstance, out: &[i64], remaining: &[i64], v: VertexId) -> bool {
        out[v] <= inst.intervals[v].hi && out[v] + remaining[v] >= inst.intervals[v].lo
    }

    fn go(
        inst: &OroInstance,
        e: usize,
        out: &mut [i64],
        remaining: &mut [i64],
        forward: &mut [bool],
    ) -> bool {
        if e == forward.len() {
            return true;
        }
        let edge = inst.graph.edge(e);
        remaining[edge.u] -= edge.w;
        remaining[edge.v] -= edge.w;
        for dir in [true, false] {
            let tail = if dir { edge.u } else { edge.v };
            out[tail] += edge.w;
            forward[e] = dir;
            if viable(inst, out, remaining, edge.u)
                && viable(inst, out, remaining, edge.v)
                && go(inst, e + 1, out, remaining, forward)
            {
                return true;
            }
            out[tail] -= edge.w;
        }
        remaining[edge.u] += edge.w;
        remaining[edge.v] += edge.w;
        false
    }

    Ok(go(inst, 0, &mut out, &mut remaining, &mut forward).then(|| Orientation::new(forward)))
}

/// Oracle for any problem that lifts to outdegree restricted orientation
/// on the same graph (TOO, CMO, MMO, CO).
pub fn oracle_lifted<I: LiftToOro>(inst: &I, cfg: &OracleConfig) -> Result<Option<Orientation>> {
    match inst.lift_to_oro() {
        Lifted::Instance(oro) => oracle_oro(&oro, cfg),
        Lifted::TrivialNo(_) => Ok(None),
    }
}

/// First orientation (in binary counting order, edge 0 fastest, forward
/// first) accepted by `accept`; no pruning at all.
pub fn oracle_enumerate_orientations(
    m: usize,
    cfg: &OracleConfig,
    mut accept: impl FnMut(&Orientation) -> bool,
) -> Result<Option<Orientation>> {
    if m > cfg.max_edges {
        return Err(Error::resource(format!("{m} edges exceed the oracle cap {}", cfg.max_edges)));
    }
    for mask in 0u64..1 << m {
        let o = Orientation::new((0..m).map(|e| mask >> e & 1 == 0).collect());
        if accept(&o) {
            return Ok(Some(o));
        }
    }
    Ok(None)
}

/// Every orientation in turn, each checked for a flow meeting the lower
/// bounds along it.
pub fn oracle_uflb(inst: &UflbInstance, cfg: &OracleConfig) -> Result<Option<(Orientation, Flow)>> {
    inst.validate()?;
    let m = inst.graph.num_edges();
    if m > cfg.max_edges {
        return Err(Error::resource(format!("{m} edges exceed the oracle cap {}", cfg.max_edges)));
    }
    for mask in 0u64..1 << m {
        let o = Orientation::new((0..m).map(|e| mask >> e & 1 == 0).collect());
        let net = uflb_network(inst, &o)?;
        if let Some(f) = feasible_flow_with_lower_bounds(&net, inst.value) {
            return Ok(Some((o, f)));
        }
    }
    Ok(None)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AonfRoute {
    Enumerate,
    Ilp,
    Auto,
}

pub fn oracle_aonf(inst: &AonfInstance, route: AonfRoute, cfg: &OracleConfig) -> Result<Option<Flow>> {
    inst.validate()?;
    let m = inst.network.num_arcs();
    match route {
        AonfRoute::Enumerate => aonf_enumerate(inst, cfg),
        AonfRoute::Ilp => aonf_ilp(inst, cfg),
        AonfRoute::Auto if m <= cfg.max_enumerated_arcs => aonf_enumerate(inst, cfg),
        AonfRoute::Auto => aonf_ilp(inst, cfg),
    }
}

/// Net outflow each node must reach.
fn aonf_demand(inst: &AonfInstance) -> Vec<i64> {
    let net = &inst.network;
    let mut demand = vec![0i64; net.num_nodes()];
    demand[net.source] = inst.value;
    demand[net.sink] = -inst.value;
    demand
}

fn aonf_enumerate(inst: &AonfInstance, cfg: &OracleConfig) -> Result<Option<Flow>> {
    let net = &inst.network;
    let m = net.num_arcs();
    if m > cfg.max_enumerated_arcs {
        return Err(Error::resource(format!("{m} arcs exceed the enumeration cap {}", cfg.max_enumerated_arcs)));
    }
    let demand = aonf_demand(inst);
    // Nodes whose incident arcs are all decided once arc `i` is.
    let mut closes = vec![Vec::new(); m];
    let mut last = vec![None; net.num_nodes()];
    for (i, a) in net.arcs().iter().enumerate() {
        last[a.tail] = Some(i);
        last[a.head] = Some(i);
    }
    for (v, l) in last.iter().enumerate() {
        match l {
            Some(i) => closes[*i].push(v),
            None if demand[v] != 0 => return Ok(None),
            None => {}
        }
    }
    let mut excess = vec![0i64; net.num_nodes()];
    let mut used = vec![false; m];

    fn go(net: &FlowNetwork, i: usize, closes: &[Vec<usize>], demand: &[i64], excess: &mut [i64], used: &mut [bool]) -> bool {
        if i == used.len() {
            return true;
        }
        let a = net.arc(i);
        for take in [false, true] {
            if take {
                excess[a.tail] += a.cap;
                excess[a.head] -= a.cap;
            }
            used[i] = take;
            if closes[i].iter().all(|&v| excess[v] == demand[v]) && go(net, i + 1, closes, demand, excess, used) {
                return true;
            }
            if take {
                excess[a.tail] -= a.cap;
                excess[a.head] += a.cap;
            }
        }
        false
    }

    Ok(go(net, 0, &closes, &demand, &mut excess, &mut used).then(|| Flow {
        values: used.iter().zip(net.arcs()).map(|(&u, a)| if u { a.cap } else { 0 }).collect(),
    }))
}

fn aonf_ilp(inst: &AonfInstance, cfg: &OracleConfig) -> Result<Option<Flow>> {
    let net = &inst.network;
    let mut model = IlpModel::<i64>::new();
    let vars: Vec<_> = (0..net.num_arcs()).map(|a| model.add_var(format!("y{a}"), 0, 1)).collect();
    let demand = aonf_demand(inst);
    let mut rows = vec![Vec::new(); net.num_nodes()];
    for (a, arc) in net.arcs().iter().enumerate() {
        rows[arc.tail].push((vars[a], arc.cap));
        rows[arc.head].push((vars[a], -arc.cap));
    }
    for (v, row) in rows.into_iter().enumerate() {
        if row.is_empty() {
            if demand[v] != 0 {
                return Ok(None);
            }
            continue;
        }
        model.add_constraint(row, Relation::Eq, demand[v])?;
    }
    let outcome = cfg.ilp.solve(&model)?;
    Ok(outcome.assignment().map(|y| Flow {
        values: y.iter().zip(net.arcs()).map(|(&u, a)| u * a.cap).collect(),
    }))
}

/// Assignment of `servees` to `servers` within capacity, if one exists.
/// `can_serve(s, d)` says whether server `d` may serve `s`.
fn assign(
    n: usize,
    servees: &[VertexId],
    servers: &[VertexId],
    capacity: &[i64],
    can_serve: impl Fn(VertexId, VertexId) -> bool,
) -> Result<Option<Vec<Option<VertexId>>>> {
    let mut assignment = vec![None; n];
    if servees.is_empty() {
        return Ok(Some(assignment));
    }
    // Nodes: source, servees, servers, sink.
    let s = 0;
    let t = 1 + servees.len() + servers.len();
    let mut net = FlowNetwork::new(t + 1, s, t)?;
    let mut pair_arcs = Vec::new();
    let mut source_arcs = Vec::new();
    for (i, &b) in servees.iter().enumerate() {
        source_arcs.push(net.add_arc(s, 1 + i, 1)?);
        let mut any = false;
        for (j, &r) in servers.iter().enumerate() {
            if capacity[r] > 0 && can_serve(b, r) {
                pair_arcs.push((net.add_arc(1 + i, 1 + servees.len() + j, 1)?, b, r));
                any = true;
            }
        }
        if !any {
            return Ok(None);
        }
    }
    for (j, &r) in servers.iter().enumerate() {
        if capacity[r] > 0 {
            net.add_arc(1 + servees.len() + j, t, capacity[r])?;
        }
    }
    let f = crate::graph::max_flow(&net)?;
    let value: i64 = source_arcs.iter().map(|&a| f.values[a]).sum();
    if value < servees.len() as i64 {
        return Ok(None);
    }
    for (a, b, r) in pair_arcs {
        if f.values[a] > 0 {
            assignment[b] = Some(r);
        }
    }
    Ok(Some(assignment))
}

/// Subsets of `items` of size `k` in lexicographic order.
fn for_each_subset(items: &[VertexId], k: usize, f: &mut dyn FnMut(&[VertexId]) -> Result<bool>) -> Result<bool> {
    fn go(items: &[VertexId], k: usize, start: usize, cur: &mut Vec<VertexId>, f: &mut dyn FnMut(&[VertexId]) -> Result<bool>) -> Result<bool> {
        if cur.len() == k {
            return f(cur);
        }
        for i in start..items.len() {
            if items.len() - i < k - cur.len() {
                break;
            }
            cur.push(items[i]);
            if go(items, k, i + 1, cur, f)? {
                return Ok(true);
            }
            cur.pop();
        }
        Ok(false)
    }
    go(items, k, 0, &mut Vec::new(), f)
}

/// Smallest dominating set found by trying candidate sets by size, with a
/// feasibility test per set. When feasibility is `monotone` (supersets of
/// feasible sets are feasible) the full set is tried first.
fn smallest(
    candidates: &[VertexId],
    budget: usize,
    monotone: bool,
    mut test: impl FnMut(&[VertexId]) -> Result<Option<DominationWitness>>,
) -> Result<DominationAnswer> {
    if monotone && test(candidates)?.is_none() {
        return Ok(DominationAnswer::Infeasible);
    }
    for k in 0..=candidates.len() {
        let mut found = None;
        for_each_subset(candidates, k, &mut |d| {
            found = test(d)?;
            Ok(found.is_some())
        })?;
        if let Some(witness) = found {
            return Ok(if k <= budget {
                DominationAnswer::Within { min_size: k, witness }
            } else {
                DominationAnswer::OverBudget { min_size: k }
            });
        }
    }
    Ok(DominationAnswer::Infeasible)
}

pub fn oracle_crbds(inst: &CrbdsInstance, cfg: &OracleConfig) -> Result<DominationAnswer> {
    inst.validate()?;
    let reds = inst.reds();
    if reds.len() > cfg.max_candidates {
        return Err(Error::resource(format!("{} red vertices exceed the oracle cap {}", reds.len(), cfg.max_candidates)));
    }
    let n = inst.graph.num_vertices();
    let adj = {
        let mut adj = vec![vec![false; n]; n];
        for e in inst.graph.edges() {
            adj[e.u][e.v] = true;
            adj[e.v][e.u] = true;
        }
        adj
    };
    let blues = inst.blues();
    // A chosen red must serve its pinned blues, so adding reds can break
    // feasibility.
    let monotone = inst.pins.iter().all(Option::is_none);
    smallest(&reds, inst.budget, monotone, |d| {
        let mut chosen = vec![false; n];
        for &r in d {
            chosen[r] = true;
        }
        let mut capacity = inst.capacity.clone();
        let mut forced = Vec::new();
        let mut free = Vec::new();
        for &b in &blues {
            match inst.pins[b] {
                Some(p) if chosen[p] => {
                    capacity[p] -= 1;
                    forced.push((b, p));
                }
                _ => free.push(b),
            }
        }
        if capacity.iter().any(|&c| c < 0) {
            return Ok(None);
        }
        let Some(mut assignment) = assign(n, &free, d, &capacity, |b, r| adj[b][r])? else {
            return Ok(None);
        };
        for (b, p) in forced {
            assignment[b] = Some(p);
        }
        Ok(Some(DominationWitness { dominators: d.to_vec(), assignment }))
    })
}

pub fn oracle_cds(inst: &CdsInstance, cfg: &OracleConfig) -> Result<DominationAnswer> {
    inst.validate()?;
    let n = inst.graph.num_vertices();
    if n > cfg.max_candidates {
        return Err(Error::resource(format!("{n} vertices exceed the oracle cap {}", cfg.max_candidates)));
    }
    let mut adj = vec![vec![false; n]; n];
    for e in inst.graph.edges() {
        adj[e.u][e.v] = true;
        adj[e.v][e.u] = true;
    }
    let all: Vec<VertexId> = (0..n).collect();
    smallest(&all, inst.budget, true, |d| {
        let mut chosen = vec![false; n];
        for &v in d {
            chosen[v] = true;
        }
        let rest: Vec<_> = (0..n).filter(|&v| !chosen[v]).collect();
        Ok(assign(n, &rest, d, &inst.capacity, |v, x| adj[v][x])?
            .map(|assignment| DominationWitness { dominators: d.to_vec(), assignment }))
    })
}

/// Maximum flow value, exposed for cross-checks of the flow routines.
pub fn oracle_max_flow(net: &FlowNetwork) -> Result<i64> {
    max_flow_value(net)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::WeightedGraph;
    use crate::problem::{Interval, TooInstance};

    fn triangle() -> WeightedGraph {
        WeightedGraph::from_edges(3, &[(0, 1, 1), (1, 2, 1), (2, 0, 1)]).unwrap()
    }

    #[test]
    fn oro_triangle() {
        let cfg = OracleConfig::default();
        let yes = OroInstance { graph: triangle(), intervals: vec![Interval::point(1); 3] };
        let o = oracle_oro(&yes, &cfg).unwrap().unwrap();
        assert!(yes.is_satisfied_by(&o));
        let no = OroInstance { graph: triangle(), intervals: vec![Interval::point(2), Interval::point(2), Interval::new(0, 3)] };
        assert!(oracle_oro(&no, &cfg).unwrap().is_none());
        let too = TooInstance { graph: triangle(), targets: vec![2, 1, 0] };
        assert!(oracle_lifted(&too, &cfg).unwrap().is_some());
    }

    #[test]
    fn edge_cap_is_a_resource_error() {
        let cfg = OracleConfig { max_edges: 2, ..OracleConfig::default() };
        let inst = OroInstance { graph: triangle(), intervals: vec![Interval::new(0, 3); 3] };
        assert!(oracle_oro(&inst, &cfg).unwrap_err().is_resource());
    }

    #[test]
    fn aonf_routes_agree() {
        let cfg = OracleConfig::default();
        let mut net = FlowNetwork::new(4, 0, 3).unwrap();
        net.add_arc(0, 1, 2).unwrap();
        net.add_arc(0, 2, 3).unwrap();
        net.add_arc(1, 3, 2).unwrap();
        net.add_arc(2, 3, 1).unwrap();
        for (value, yes) in [(0, true), (2, true), (3, false), (5, false)] {
            let inst = AonfInstance { network: net.clone(), value };
            for route in [AonfRoute::Enumerate, AonfRoute::Ilp] {
                let r = oracle_aonf(&inst, route, &cfg).unwrap();
                assert_eq!(r.is_some(), yes, "value {value} route {route:?}");
                if let Some(f) = r {
                    assert!(inst.is_satisfied_by(&f));
                }
            }
        }
    }

    #[test]
    fn crbds_with_pin() {
        let cfg = OracleConfig::default();
        // Star: red centre 0 with capacity 1, blue leaves 1..=3; each leaf
        // also has a private red neighbour.
        let mut g = WeightedGraph::new(7);
        for leaf in 1..=3 {
            g.add_edge(0, leaf, 1).unwrap();
            g.add_edge(leaf, leaf + 3, 1).unwrap();
        }
        let red = vec![true, false, false, false, true, true, true];
        let mut inst = CrbdsInstance { graph: g, red, capacity: vec![1; 7], pins: vec![None; 7], budget: 5 };
        assert_eq!(oracle_crbds(&inst, &cfg).unwrap().min_size(), Some(3));
        inst.pins[1] = Some(0);
        inst.pins[2] = Some(0);
        let ans = oracle_crbds(&inst, &cfg).unwrap();
        assert_eq!(ans.min_size(), Some(3));
        if let DominationAnswer::Within { witness, .. } = ans {
            assert_eq!(inst.check_witness(&witness).unwrap(), 3);
            assert!(!witness.dominators.contains(&0));
        }
    }

    #[test]
    fn cds_star_and_path() {
        let cfg = OracleConfig::default();
        let star = WeightedGraph::from_edges(4, &[(0, 1, 1), (0, 2, 1), (0, 3, 1)]).unwrap();
        let inst = CdsInstance { graph: star.clone(), capacity: vec![3, 1, 1, 1], budget: 4 };
        assert_eq!(oracle_cds(&inst, &cfg).unwrap().min_size(), Some(1));
        let inst = CdsInstance { graph: star, capacity: vec![1, 1, 1, 1], budget: 2 };
        assert_eq!(oracle_cds(&inst, &cfg).unwrap(), DominationAnswer::OverBudget { min_size: 3 });
        let path = WeightedGraph::from_edges(5, &[(0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 4, 1)]).unwrap();
        let inst = CdsInstance { graph: path, capacity: vec![1; 5], budget: 5 };
        assert_eq!(oracle_cds(&inst, &cfg).unwrap().min_size(), Some(3));
    }
}
