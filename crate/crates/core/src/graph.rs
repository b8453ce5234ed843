//! Multigraphs, weighted simple graphs, orientations and flow networks.
//!
//! Vertices and edges are dense indices. An edge id is its position in the
//! edge list and stays fixed for the lifetime of a graph value; every
//! transformation that builds a new graph reports where the new ids came
//! from.

use std::collections::{BTreeMap, VecDeque};

use crate::error::{Error, Result};

pub type VertexId = usize;
pub type EdgeId = usize;
pub type ArcId = usize;

/// An undirected multigraph. Parallel edges and loops are allowed.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Multigraph {
    num_vertices: usize,
    edges: Vec<(VertexId, VertexId)>,
}

impl Multigraph {
    pub fn new(num_vertices: usize) -> Self {
        Self { num_vertices, edges: Vec::new() }
    }

    pub fn from_edges(num_vertices: usize, edges: Vec<(VertexId, VertexId)>) -> Result<Self> {
        let mut g = Self::new(num_vertices);
        for (u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn add_vertex(&mut self) -> VertexId {
        self.num_vertices += 1;
        self.num_vertices - 1
    }

    pub fn add_edge(&mut self, u: VertexId, v: VertexId) -> Result<EdgeId> {
        if u >= self.num_vertices || v >= self.num_vertices {
            return Err(Error::invalid(format!("edge {u}-{v} references an undeclared vertex")));
        }
        self.edges.push((u, v));
        Ok(self.edges.len() - 1)
    }

    pub(crate) fn set_edge(&mut self, e: EdgeId, u: VertexId, v: VertexId) {
        self.edges[e] = (u, v);
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edge(&self, e: EdgeId) -> (VertexId, VertexId) {
        self.edges[e]
    }

    pub fn edges(&self) -> &[(VertexId, VertexId)] {
        &self.edges
    }

    pub fn is_loop(&self, e: EdgeId) -> bool {
        let (u, v) = self.edges[e];
        u == v
    }

    pub fn has_loops(&self) -> bool {
        self.edges.iter().any(|&(u, v)| u == v)
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.edges
            .iter()
            .map(|&(a, b)| usize::from(a == v) + usize::from(b == v))
            .sum()
    }

    pub fn is_connected(&self) -> bool {
        is_connected(self.num_vertices, self.edges.iter().copied())
    }
}

/// One edge of a [`WeightedGraph`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct WeightedEdge {
    pub u: VertexId,
    pub v: VertexId,
    pub w: i64,
}

impl WeightedEdge {
    pub fn other(&self, x: VertexId) -> VertexId {
        if x == self.u {
            self.v
        } else {
            self.u
        }
    }

    pub fn touches(&self, x: VertexId) -> bool {
        self.u == x || self.v == x
    }
}

/// A simple graph with positive integer edge weights.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WeightedGraph {
    num_vertices: usize,
    edges: Vec<WeightedEdge>,
}

impl WeightedGraph {
    pub fn new(num_vertices: usize) -> Self {
        Self { num_vertices, edges: Vec::new() }
    }

    pub fn from_edges(num_vertices: usize, edges: &[(VertexId, VertexId, i64)]) -> Result<Self> {
        let mut g = Self::new(num_vertices);
        for &(u, v, w) in edges {
            g.add_edge(u, v, w)?;
        }
        Ok(g)
    }

    pub fn add_vertex(&mut self) -> VertexId {
        self.num_vertices += 1;
        self.num_vertices - 1
    }

    pub fn add_edge(&mut self, u: VertexId, v: VertexId, w: i64) -> Result<EdgeId> {
        if u >= self.num_vertices || v >= self.num_vertices {
            return Err(Error::invalid(format!("edge {u}-{v} references an undeclared vertex")));
        }
        if u == v {
            return Err(Error::invalid(format!("loop at vertex {u} in a simple graph")));
        }
        if w < 1 {
            return Err(Error::invalid(format!("edge {u}-{v} has non-positive weight {w}")));
        }
        if self.find_edge(u, v).is_some() {
            return Err(Error::invalid(format!("parallel edge {u}-{v} in a simple graph")));
        }
        self.edges.push(WeightedEdge { u, v, w });
        Ok(self.edges.len() - 1)
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edge(&self, e: EdgeId) -> WeightedEdge {
        self.edges[e]
    }

    pub fn edges(&self) -> &[WeightedEdge] {
        &self.edges
    }

    pub fn find_edge(&self, u: VertexId, v: VertexId) -> Option<EdgeId> {
        self.edges
            .iter()
            .position(|e| (e.u == u && e.v == v) || (e.u == v && e.v == u))
    }

    pub fn total_weight(&self) -> i64 {
        self.edges.iter().map(|e| e.w).sum()
    }

    /// Sum of the weights of the edges incident to every vertex.
    pub fn weighted_degrees(&self) -> Vec<i64> {
        let mut deg = vec![0; self.num_vertices];
        for e in &self.edges {
            deg[e.u] += e.w;
            deg[e.v] += e.w;
        }
        deg
    }

    /// Incident edge ids per vertex.
    pub fn incidence(&self) -> Vec<Vec<EdgeId>> {
        let mut inc = vec![Vec::new(); self.num_vertices];
        for (id, e) in self.edges.iter().enumerate() {
            inc[e.u].push(id);
            inc[e.v].push(id);
        }
        inc
    }

    pub fn is_connected(&self) -> bool {
        is_connected(self.num_vertices, self.edges.iter().map(|e| (e.u, e.v)))
    }
}

pub(crate) fn is_connected(n: usize, edges: impl Iterator<Item = (usize, usize)>) -> bool {
    if n == 0 {
        return true;
    }
    let mut adj = vec![Vec::new(); n];
    for (u, v) in edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([0]);
    seen[0] = true;
    let mut count = 1;
    while let Some(x) = queue.pop_front() {
        for &y in &adj[x] {
            if !seen[y] {
                seen[y] = true;
                count += 1;
                queue.push_back(y);
            }
        }
    }
    count == n
}

/// Multigraph obtained by expanding every weight-`w` edge into `w` parallel
/// edges, together with the originating weighted edge of each parallel edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpandedMultigraph {
    pub graph: Multigraph,
    pub origin: Vec<EdgeId>,
}

pub fn weighted_to_multigraph(g: &WeightedGraph) -> ExpandedMultigraph {
    let mut graph = Multigraph::new(g.num_vertices());
    let mut origin = Vec::with_capacity(g.total_weight() as usize);
    for (id, e) in g.edges().iter().enumerate() {
        for _ in 0..e.w {
            graph.edges.push((e.u, e.v));
            origin.push(id);
        }
    }
    ExpandedMultigraph { graph, origin }
}

/// Collapses parallel edges into a single weighted edge. Weighted edges are
/// numbered, and their endpoints ordered, by the first occurrence of their
/// vertex pair.
pub fn multigraph_to_weighted(m: &Multigraph) -> Result<WeightedGraph> {
    if let Some(e) = m.edges().iter().position(|&(u, v)| u == v) {
        return Err(Error::invalid(format!(
            "edge {e} is a loop; loops have no weighted counterpart"
        )));
    }
    let mut order: Vec<(VertexId, VertexId)> = Vec::new();
    let mut weight: BTreeMap<(VertexId, VertexId), i64> = BTreeMap::new();
    for &(u, v) in m.edges() {
        let entry = weight.entry((u.min(v), u.max(v))).or_insert_with(|| {
            order.push((u, v));
            0
        });
        *entry += 1;
    }
    let mut g = WeightedGraph::new(m.num_vertices());
    for (u, v) in order {
        g.add_edge(u, v, weight[&(u.min(v), u.max(v))])?;
    }
    Ok(g)
}

/// A total orientation: `forward[e]` is true when edge `e = uv` points `u -> v`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Orientation {
    pub forward: Vec<bool>,
}

impl Orientation {
    pub fn new(forward: Vec<bool>) -> Self {
        Self { forward }
    }

    pub fn all_forward(m: usize) -> Self {
        Self { forward: vec![true; m] }
    }

    /// Tail and head of edge `e` under this orientation.
    pub fn arc(&self, g: &WeightedGraph, e: EdgeId) -> (VertexId, VertexId) {
        let edge = g.edge(e);
        if self.forward[e] {
            (edge.u, edge.v)
        } else {
            (edge.v, edge.u)
        }
    }

    pub fn tail(&self, g: &WeightedGraph, e: EdgeId) -> VertexId {
        self.arc(g, e).0
    }
}

/// Total weight of the edges directed out of each vertex.
pub fn weighted_outdegrees(g: &WeightedGraph, o: &Orientation) -> Result<Vec<i64>> {
    if o.forward.len() != g.num_edges() {
        return Err(Error::invalid(format!(
            "orientation covers {} edges but the graph has {}",
            o.forward.len(),
            g.num_edges()
        )));
    }
    let mut out = vec![0i64; g.num_vertices()];
    for (id, e) in g.edges().iter().enumerate() {
        let tail = if o.forward[id] { e.u } else { e.v };
        out[tail] += e.w;
    }
    Ok(out)
}

/// Same as [`weighted_outdegrees`] for an orientation that may leave some
/// edges undecided; fails when any edge is missing.
pub fn weighted_outdegrees_partial(g: &WeightedGraph, o: &[Option<bool>]) -> Result<Vec<i64>> {
    if let Some(e) = o.iter().position(Option::is_none) {
        return Err(Error::invalid(format!("edge {e} has no direction")));
    }
    let forward = o.iter().map(|d| d.unwrap_or(true)).collect();
    weighted_outdegrees(g, &Orientation::new(forward))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct NetworkArc {
    pub tail: VertexId,
    pub head: VertexId,
    pub cap: i64,
    pub lower: i64,
}

/// A directed network with integral capacities and optional lower bounds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlowNetwork {
    num_nodes: usize,
    arcs: Vec<NetworkArc>,
    pub source: VertexId,
    pub sink: VertexId,
}

impl FlowNetwork {
    pub fn new(num_nodes: usize, source: VertexId, sink: VertexId) -> Result<Self> {
        if source >= num_nodes || sink >= num_nodes {
            return Err(Error::invalid("source or sink is not a node of the network"));
        }
        Ok(Self { num_nodes, arcs: Vec::new(), source, sink })
    }

    pub fn add_node(&mut self) -> VertexId {
        self.num_nodes += 1;
        self.num_nodes - 1
    }

    pub fn add_arc(&mut self, tail: VertexId, head: VertexId, cap: i64) -> Result<ArcId> {
        self.add_arc_with_lower(tail, head, cap, 0)
    }

    pub fn add_arc_with_lower(
        &mut self,
        tail: VertexId,
        head: VertexId,
        cap: i64,
        lower: i64,
    ) -> Result<ArcId> {
        if tail >= self.num_nodes || head >= self.num_nodes {
            return Err(Error::invalid(format!("arc {tail}->{head} references an undeclared node")));
        }
        if cap < 1 {
            return Err(Error::invalid(format!("arc {tail}->{head} has non-positive capacity {cap}")));
        }
        if lower < 0 || lower > cap {
            return Err(Error::invalid(format!(
                "arc {tail}->{head} has lower bound {lower} outside [0, {cap}]"
            )));
        }
        self.arcs.push(NetworkArc { tail, head, cap, lower });
        Ok(self.arcs.len() - 1)
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn num_arcs(&self) -> usize {
        self.arcs.len()
    }

    pub fn arc(&self, a: ArcId) -> NetworkArc {
        self.arcs[a]
    }

    pub fn arcs(&self) -> &[NetworkArc] {
        &self.arcs
    }

    pub fn has_lower_bounds(&self) -> bool {
        self.arcs.iter().any(|a| a.lower > 0)
    }

    pub fn total_capacity(&self) -> i64 {
        self.arcs.iter().map(|a| a.cap).sum()
    }

    /// Undirected weighted view (capacities as weights). Antiparallel and
    /// parallel arcs are merged by summing their capacities.
    pub fn underlying_weighted(&self) -> WeightedGraph {
        let m = Multigraph {
            num_vertices: self.num_nodes,
            edges: Vec::new(),
        };
        let mut g = WeightedGraph::new(m.num_vertices);
        for a in &self.arcs {
            if a.tail == a.head {
                continue;
            }
            match g.find_edge(a.tail, a.head) {
                Some(e) => g.edges[e].w += a.cap,
                None => {
                    g.edges.push(WeightedEdge { u: a.tail, v: a.head, w: a.cap });
                }
            }
        }
        g
    }

    pub fn is_connected(&self) -> bool {
        is_connected(self.num_nodes, self.arcs.iter().map(|a| (a.tail, a.head)))
    }
}

/// Flow value per arc.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Flow {
    pub values: Vec<i64>,
}

impl Flow {
    pub fn zero(arcs: usize) -> Self {
        Self { values: vec![0; arcs] }
    }

    /// Outflow minus inflow at `v`.
    pub fn excess_out(&self, n: &FlowNetwork, v: VertexId) -> i64 {
        n.arcs()
            .iter()
            .zip(&self.values)
            .map(|(a, &f)| {
                let mut d = 0;
                if a.tail == v {
                    d += f;
                }
                if a.head == v {
                    d -= f;
                }
                d
            })
            .sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FlowViolation {
    WrongArity { expected: usize, found: usize },
    Negative { arc: ArcId, value: i64 },
    OverCapacity { arc: ArcId, value: i64, cap: i64 },
    UnderLowerBound { arc: ArcId, value: i64, lower: i64 },
    Conservation { node: VertexId, excess: i64 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlowReport {
    pub value: i64,
    pub violations: Vec<FlowViolation>,
}

impl FlowReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn is_circulation(&self) -> bool {
        self.is_valid() && self.value == 0
    }
}

pub fn check_flow(n: &FlowNetwork, f: &Flow) -> FlowReport {
    let mut violations = Vec::new();
    if f.values.len() != n.num_arcs() {
        violations.push(FlowViolation::WrongArity {
            expected: n.num_arcs(),
            found: f.values.len(),
        });
        return FlowReport { value: 0, violations };
    }
    for (id, (a, &x)) in n.arcs().iter().zip(&f.values).enumerate() {
        if x < 0 {
            violations.push(FlowViolation::Negative { arc: id, value: x });
        } else if x > a.cap {
            violations.push(FlowViolation::OverCapacity { arc: id, value: x, cap: a.cap });
        }
        if x >= 0 && x < a.lower {
            violations.push(FlowViolation::UnderLowerBound { arc: id, value: x, lower: a.lower });
        }
    }
    let mut excess = vec![0i64; n.num_nodes()];
    for (a, &x) in n.arcs().iter().zip(&f.values) {
        excess[a.tail] += x;
        excess[a.head] -= x;
    }
    for (node, &ex) in excess.iter().enumerate() {
        if node != n.source && node != n.sink && ex != 0 {
            violations.push(FlowViolation::Conservation { node, excess: ex });
        }
    }
    FlowReport { value: excess[n.source], violations }
}

/// Residual graph used by the augmenting path routine.
struct Residual {
    head: Vec<usize>,
    cap: Vec<i64>,
    adj: Vec<Vec<usize>>,
}

impl Residual {
    fn new(n: usize) -> Self {
        Self { head: Vec::new(), cap: Vec::new(), adj: vec![Vec::new(); n] }
    }

    fn add(&mut self, u: usize, v: usize, c: i64) -> usize {
        let id = self.head.len();
        self.head.push(v);
        self.cap.push(c);
        self.adj[u].push(id);
        self.head.push(u);
        self.cap.push(0);
        self.adj[v].push(id + 1);
        id
    }

    /// Shortest augmenting paths until none remain.
    fn run(&mut self, s: usize, t: usize) -> i64 {
        if s == t {
            return 0;
        }
        let n = self.adj.len();
        let mut total = 0;
        loop {
            let mut pred = vec![usize::MAX; n];
            let mut seen = vec![false; n];
            seen[s] = true;
            let mut queue = VecDeque::from([s]);
            while let Some(x) = queue.pop_front() {
                if x == t {
                    break;
                }
                for &id in &self.adj[x] {
                    let y = self.head[id];
                    if !seen[y] && self.cap[id] > 0 {
                        seen[y] = true;
                        pred[y] = id;
                        queue.push_back(y);
                    }
                }
            }
            if !seen[t] {
                return total;
            }
            let mut bottleneck = i64::MAX;
            let mut x = t;
            while x != s {
                let id = pred[x];
                bottleneck = bottleneck.min(self.cap[id]);
                x = self.head[id ^ 1];
            }
            let mut x = t;
            while x != s {
                let id = pred[x];
                self.cap[id] -= bottleneck;
                self.cap[id ^ 1] += bottleneck;
                x = self.head[id ^ 1];
            }
            total += bottleneck;
        }
    }
}

/// Integral maximum s-t flow by shortest augmenting paths. Lower bounds
/// are not supported here; see [`feasible_flow_with_lower_bounds`].
pub fn max_flow(n: &FlowNetwork) -> Result<Flow> {
    if n.has_lower_bounds() {
        return Err(Error::invalid("max_flow does not accept lower bounds"));
    }
    let mut r = Residual::new(n.num_nodes());
    let ids: Vec<usize> = n.arcs().iter().map(|a| r.add(a.tail, a.head, a.cap)).collect();
    r.run(n.source, n.sink);
    let values = ids
        .iter()
        .zip(n.arcs())
        .map(|(&id, a)| a.cap - r.cap[id])
        .collect();
    Ok(Flow { values })
}

pub fn max_flow_value(n: &FlowNetwork) -> Result<i64> {
    let f = max_flow(n)?;
    Ok(f.excess_out(n, n.source))
}

/// An s-t flow of exactly `value` respecting lower bounds and capacities,
/// if one exists. Uses the usual reduction of lower bounds to a
/// circulation with demands.
pub fn feasible_flow_with_lower_bounds(n: &FlowNetwork, value: i64) -> Option<Flow> {
    if value < 0 {
        return None;
    }
    let nodes = n.num_nodes();
    let super_s = nodes;
    let super_t = nodes + 1;
    let mut r = Residual::new(nodes + 2);
    let mut balance = vec![0i64; nodes];
    let mut ids = Vec::with_capacity(n.num_arcs());
    for a in n.arcs() {
        ids.push(r.add(a.tail, a.head, a.cap - a.lower));
        balance[a.head] += a.lower;
        balance[a.tail] -= a.lower;
    }
    // Return arc t -> s carrying exactly `value`.
    if n.source != n.sink {
        balance[n.source] += value;
        balance[n.sink] -= value;
    } else if value != 0 {
        return None;
    }
    let mut need = 0;
    for (v, &b) in balance.iter().enumerate() {
        if b > 0 {
            r.add(super_s, v, b);
            need += b;
        } else if b < 0 {
            r.add(v, super_t, -b);
        }
    }
    if r.run(super_s, super_t) != need {
        return None;
    }
    let values = ids
        .iter()
        .zip(n.arcs())
        .map(|(&id, a)| a.lower + (a.cap - a.lower - r.cap[id]))
        .collect();
    Some(Flow { values })
}
