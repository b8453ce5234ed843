//! Instance types for the orientation, flow and domination problems, with
//! well-formedness checks and witness validators.

use crate::error::{Error, Result};
use crate::graph::{
    check_flow, weighted_outdegrees, Flow, FlowNetwork, Orientation, VertexId, WeightedGraph,
};

/// Closed integer interval; empty when `lo > hi`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Interval {
    pub lo: i64,
    pub hi: i64,
}

impl Interval {
    pub fn new(lo: i64, hi: i64) -> Self {
        Self { lo, hi }
    }

    pub fn point(x: i64) -> Self {
        Self { lo: x, hi: x }
    }

    pub fn contains(&self, x: i64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn is_empty(&self) -> bool {
        self.lo > self.hi
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        other.is_empty() || (self.lo <= other.lo && other.hi <= self.hi)
    }
}

/// Orientation whose weighted outdegree lies in a prescribed interval at every vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OroInstance {
    pub graph: WeightedGraph,
    pub intervals: Vec<Interval>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TooInstance {
    pub graph: WeightedGraph,
    pub targets: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CmoInstance {
    pub graph: WeightedGraph,
    pub bounds: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MmoInstance {
    pub graph: WeightedGraph,
    pub max_out: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoInstance {
    pub graph: WeightedGraph,
}

/// Undirected flow with lower bounds. Edge weights of `graph` are the capacities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UflbInstance {
    pub graph: WeightedGraph,
    pub lower: Vec<i64>,
    pub source: VertexId,
    pub sink: VertexId,
    pub value: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AonfInstance {
    pub network: FlowNetwork,
    pub value: i64,
}

/// Capacitated dominating set. Edge weights of `graph` are ignored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CdsInstance {
    pub graph: WeightedGraph,
    pub capacity: Vec<i64>,
    pub budget: usize,
}

/// Capacitated red-blue dominating set. `capacity` is meaningful on red
/// vertices only. A pin `pins[b] = Some(r)` requires blue `b` to be served
/// by red `r` whenever `r` is chosen.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrbdsInstance {
    pub graph: WeightedGraph,
    pub red: Vec<bool>,
    pub capacity: Vec<i64>,
    pub pins: Vec<Option<VertexId>>,
    pub budget: usize,
}

fn check_arity(what: &str, found: usize, expected: usize) -> Result<()> {
    if found != expected {
        return Err(Error::invalid(format!("{what} has {found} entries for {expected} vertices")));
    }
    Ok(())
}

fn check_connected(g: &WeightedGraph) -> Result<()> {
    if !g.is_connected() {
        return Err(Error::invalid("graph is disconnected"));
    }
    Ok(())
}

impl OroInstance {
    pub fn validate(&self) -> Result<()> {
        check_arity("interval list", self.intervals.len(), self.graph.num_vertices())?;
        check_connected(&self.graph)
    }

    pub fn is_satisfied_by(&self, o: &Orientation) -> bool {
        match weighted_outdegrees(&self.graph, o) {
            Ok(out) => out.iter().zip(&self.intervals).all(|(&d, iv)| iv.contains(d)),
            Err(_) => false,
        }
    }
}

impl TooInstance {
    pub fn validate(&self) -> Result<()> {
        check_arity("target list", self.targets.len(), self.graph.num_vertices())?;
        check_connected(&self.graph)
    }

    pub fn is_satisfied_by(&self, o: &Orientation) -> bool {
        weighted_outdegrees(&self.graph, o).is_ok_and(|out| out == self.targets)
    }
}

impl CmoInstance {
    pub fn validate(&self) -> Result<()> {
        check_arity("bound list", self.bounds.len(), self.graph.num_vertices())?;
        check_connected(&self.graph)
    }

    pub fn is_satisfied_by(&self, o: &Orientation) -> bool {
        weighted_outdegrees(&self.graph, o)
            .is_ok_and(|out| out.iter().zip(&self.bounds).all(|(d, m)| d <= m))
    }
}

impl MmoInstance {
    pub fn validate(&self) -> Result<()> {
        check_connected(&self.graph)
    }

    pub fn is_satisfied_by(&self, o: &Orientation) -> bool {
        weighted_outdegrees(&self.graph, o).is_ok_and(|out| out.iter().all(|&d| d <= self.max_out))
    }
}

impl CoInstance {
    pub fn validate(&self) -> Result<()> {
        check_connected(&self.graph)
    }

    pub fn is_satisfied_by(&self, o: &Orientation) -> bool {
        let deg = self.graph.weighted_degrees();
        weighted_outdegrees(&self.graph, o)
            .is_ok_and(|out| out.iter().zip(&deg).all(|(&d, &r)| 2 * d == r))
    }
}

/// Directed network of a UFLB orientation: arc `e` follows edge `e`.
pub fn uflb_network(inst: &UflbInstance, o: &Orientation) -> Result<FlowNetwork> {
    let mut n = FlowNetwork::new(inst.graph.num_vertices(), inst.source, inst.sink)?;
    for (e, edge) in inst.graph.edges().iter().enumerate() {
        let (a, b) = o.arc(&inst.graph, e);
        n.add_arc_with_lower(a, b, edge.w, inst.lower[e])?;
    }
    Ok(n)
}

impl UflbInstance {
    pub fn validate(&self) -> Result<()> {
        let n = self.graph.num_vertices();
        if self.lower.len() != self.graph.num_edges() {
            return Err(Error::invalid("one lower bound per edge is required"));
        }
        for (e, (&l, edge)) in self.lower.iter().zip(self.graph.edges()).enumerate() {
            if l < 0 || l > edge.w {
                return Err(Error::invalid(format!("edge {e}: lower bound {l} outside [0, {}]", edge.w)));
            }
        }
        if self.source >= n || self.sink >= n {
            return Err(Error::invalid("source or sink is not a vertex"));
        }
        if self.source == self.sink {
            return Err(Error::invalid("source and sink coincide"));
        }
        if self.value < 0 {
            return Err(Error::invalid("negative flow value"));
        }
        check_connected(&self.graph)
    }

    pub fn is_satisfied_by(&self, o: &Orientation, f: &Flow) -> bool {
        if o.forward.len() != self.graph.num_edges() {
            return false;
        }
        match uflb_network(self, o) {
            Ok(n) => {
                let r = check_flow(&n, f);
                r.is_valid() && r.value == self.value
            }
            Err(_) => false,
        }
    }
}

impl AonfInstance {
    pub fn validate(&self) -> Result<()> {
        if self.network.source == self.network.sink {
            return Err(Error::invalid("source and sink coincide"));
        }
        if self.network.has_lower_bounds() {
            return Err(Error::invalid("all-or-nothing arcs carry no lower bounds"));
        }
        if self.value < 0 {
            return Err(Error::invalid("negative flow value"));
        }
        if !self.network.is_connected() {
            return Err(Error::invalid("network is disconnected"));
        }
        Ok(())
    }

    pub fn is_satisfied_by(&self, f: &Flow) -> bool {
        let r = check_flow(&self.network, f);
        r.is_valid()
            && r.value == self.value
            && f.values.iter().zip(self.network.arcs()).all(|(&x, a)| x == 0 || x == a.cap)
    }
}

/// Dominating set witness: chosen vertices plus the server of every
/// vertex that must be served (`None` for vertices that need no server).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DominationWitness {
    pub dominators: Vec<VertexId>,
    pub assignment: Vec<Option<VertexId>>,
}

fn adjacency(g: &WeightedGraph) -> Vec<Vec<bool>> {
    let n = g.num_vertices();
    let mut adj = vec![vec![false; n]; n];
    for e in g.edges() {
        adj[e.u][e.v] = true;
        adj[e.v][e.u] = true;
    }
    adj
}

impl CdsInstance {
    pub fn validate(&self) -> Result<()> {
        check_arity("capacity list", self.capacity.len(), self.graph.num_vertices())?;
        if let Some(v) = self.capacity.iter().position(|&c| c < 1) {
            return Err(Error::invalid(format!("vertex {v} has capacity below 1")));
        }
        check_connected(&self.graph)
    }

    /// Size of the dominating set when the witness is valid (ignoring the budget).
    pub fn check_witness(&self, w: &DominationWitness) -> Result<usize> {
        let n = self.graph.num_vertices();
        let adj = adjacency(&self.graph);
        let mut chosen = vec![false; n];
        for &d in &w.dominators {
            if d >= n || chosen[d] {
                return Err(Error::invalid(format!("dominator {d} unknown or repeated")));
            }
            chosen[d] = true;
        }
        if w.assignment.len() != n {
            return Err(Error::invalid("assignment must cover every vertex"));
        }
        let mut load = vec![0i64; n];
        for v in 0..n {
            match (chosen[v], w.assignment[v]) {
                (true, None) => {}
                (true, Some(_)) => return Err(Error::invalid(format!("dominator {v} is assigned"))),
                (false, None) => return Err(Error::invalid(format!("vertex {v} is not dominated"))),
                (false, Some(d)) => {
                    if d >= n || !chosen[d] || !adj[v][d] {
                        return Err(Error::invalid(format!("vertex {v} assigned to non-adjacent or unchosen {d}")));
                    }
                    load[d] += 1;
                }
            }
        }
        for v in 0..n {
            if load[v] > self.capacity[v] {
                return Err(Error::invalid(format!("dominator {v} serves {} > capacity {}", load[v], self.capacity[v])));
            }
        }
        Ok(w.dominators.len())
    }
}

impl CrbdsInstance {
    pub fn validate(&self) -> Result<()> {
        let n = self.graph.num_vertices();
        check_arity("colour list", self.red.len(), n)?;
        check_arity("capacity list", self.capacity.len(), n)?;
        check_arity("pin list", self.pins.len(), n)?;
        for e in self.graph.edges() {
            if self.red[e.u] == self.red[e.v] {
                return Err(Error::invalid(format!("edge {}-{} does not join red and blue", e.u, e.v)));
            }
        }
        for v in 0..n {
            if self.red[v] && self.capacity[v] < 1 {
                return Err(Error::invalid(format!("red vertex {v} has capacity below 1")));
            }
        }
        let adj = adjacency(&self.graph);
        for (b, pin) in self.pins.iter().enumerate() {
            if let Some(r) = *pin {
                if self.red[b] || r >= n || !self.red[r] || !adj[b][r] {
                    return Err(Error::invalid(format!("pin {b}->{r} must join a blue vertex to an adjacent red one")));
                }
            }
        }
        Ok(())
    }

    pub fn reds(&self) -> Vec<VertexId> {
        (0..self.red.len()).filter(|&v| self.red[v]).collect()
    }

    pub fn blues(&self) -> Vec<VertexId> {
        (0..self.red.len()).filter(|&v| !self.red[v]).collect()
    }

    pub fn check_witness(&self, w: &DominationWitness) -> Result<usize> {
        let n = self.graph.num_vertices();
        let adj = adjacency(&self.graph);
        let mut chosen = vec![false; n];
        for &d in &w.dominators {
            if d >= n || !self.red[d] || chosen[d] {
                return Err(Error::invalid(format!("dominator {d} is unknown, blue or repeated")));
            }
            chosen[d] = true;
        }
        if w.assignment.len() != n {
            return Err(Error::invalid("assignment must cover every vertex"));
        }
        let mut load = vec![0i64; n];
        for v in 0..n {
            if self.red[v] {
                if w.assignment[v].is_some() {
                    return Err(Error::invalid(format!("red vertex {v} is assigned")));
                }
                continue;
            }
            let Some(d) = w.assignment[v] else {
                return Err(Error::invalid(format!("blue vertex {v} is not dominated")));
            };
            if d >= n || !chosen[d] || !adj[v][d] {
                return Err(Error::invalid(format!("blue vertex {v} assigned to non-adjacent or unchosen {d}")));
            }
            if let Some(p) = self.pins[v] {
                if chosen[p] && p != d {
                    return Err(Error::invalid(format!("blue vertex {v} is pinned to chosen {p}")));
                }
            }
            load[d] += 1;
        }
        for v in 0..n {
            if load[v] > self.capacity[v] {
                return Err(Error::invalid(format!("red vertex {v} serves {} > capacity {}", load[v], self.capacity[v])));
            }
        }
        Ok(w.dominators.len())
    }
}

/// Answer of a minimisation problem with a budget.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DominationAnswer {
    Infeasible,
    OverBudget { min_size: usize },
    Within { min_size: usize, witness: DominationWitness },
}

impl DominationAnswer {
    pub fn min_size(&self) -> Option<usize> {
        match self {
            Self::Infeasible => None,
            Self::OverBudget { min_size } | Self::Within { min_size, .. } => Some(*min_size),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn intervals() {
        assert!(Interval::new(1, 3).contains(2));
        assert!(Interval::new(2, 1).is_empty());
        assert!(Interval::new(0, 5).contains_interval(&Interval::new(1, 2)));
    }

    #[test]
    fn co_and_too_checks() {
        let g = WeightedGraph::from_edges(3, &[(0, 1, 1), (1, 2, 1), (2, 0, 1)]).unwrap();
        let co = CoInstance { graph: g.clone() };
        assert!(co.is_satisfied_by(&Orientation::all_forward(3)));
        assert!(!co.is_satisfied_by(&Orientation::new(vec![true, true, false])));
        let too = TooInstance { graph: g, targets: vec![1, 1, 1] };
        assert!(too.is_satisfied_by(&Orientation::all_forward(3)));
    }

    #[test]
    fn crbds_pin_is_enforced() {
        let g = WeightedGraph::from_edges(3, &[(0, 1, 1), (2, 1, 1)]).unwrap();
        let mut inst = CrbdsInstance {
            graph: g,
            red: vec![true, false, true],
            capacity: vec![1, 0, 1],
            pins: vec![None, Some(0), None],
            budget: 2,
        };
        inst.validate().unwrap();
        let w = DominationWitness { dominators: vec![0, 2], assignment: vec![None, Some(2), None] };
        assert!(inst.check_witness(&w).is_err());
        inst.pins[1] = None;
        assert_eq!(inst.check_witness(&w).unwrap(), 2);
    }
}
