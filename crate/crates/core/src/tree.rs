//! Tree partitions, subdivisions, refinements and harmonic morphisms.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::graph::{
    weighted_to_multigraph, EdgeId, Multigraph, Orientation, VertexId, WeightedGraph,
};

pub type NodeId = usize;

/// Bags indexed by the nodes of a tree. Node ids are dense; `arcs` lists the
/// tree edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreePartition {
    pub bags: Vec<Vec<VertexId>>,
    pub arcs: Vec<(NodeId, NodeId)>,
    pub root: NodeId,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Breadth {
    pub value: i64,
    pub max_bag: usize,
    pub max_arc_weight: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PartitionViolation {
    EmptyTree,
    RootOutOfRange(NodeId),
    ArcOutOfRange(usize),
    NotATree(String),
    UnknownVertex { node: NodeId, vertex: VertexId },
    DuplicateVertex { vertex: VertexId, first: NodeId, second: NodeId },
    MissingVertex(VertexId),
    NonLocalEdge { edge: EdgeId, u_node: NodeId, v_node: NodeId },
}

impl std::fmt::Display for PartitionViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::EmptyTree => write!(f, "tree has no nodes"),
            Self::RootOutOfRange(r) => write!(f, "root {r} is not a node"),
            Self::ArcOutOfRange(a) => write!(f, "arc {a} references an unknown node"),
            Self::NotATree(why) => write!(f, "not a tree: {why}"),
            Self::UnknownVertex { node, vertex } => {
                write!(f, "bag {node} holds unknown vertex {vertex}")
            }
            Self::DuplicateVertex { vertex, first, second } => {
                write!(f, "non-partition: vertex {vertex} in bags {first} and {second}")
            }
            Self::MissingVertex(v) => write!(f, "non-partition: vertex {v} in no bag"),
            Self::NonLocalEdge { edge, u_node, v_node } => write!(
                f,
                "edge locality: edge {edge} joins bags {u_node} and {v_node} which are not adjacent"
            ),
        }
    }
}

/// Checks that `n` nodes and `arcs` form a tree.
pub(crate) fn tree_shape_violations(n: usize, arcs: &[(NodeId, NodeId)]) -> Vec<PartitionViolation> {
    let mut out = Vec::new();
    if n == 0 {
        out.push(PartitionViolation::EmptyTree);
        return out;
    }
    for (i, &(a, b)) in arcs.iter().enumerate() {
        if a >= n || b >= n {
            out.push(PartitionViolation::ArcOutOfRange(i));
        }
    }
    if !out.is_empty() {
        return out;
    }
    if arcs.len() + 1 != n {
        out.push(PartitionViolation::NotATree(format!("{n} nodes but {} arcs", arcs.len())));
        return out;
    }
    if !crate::graph::is_connected(n, arcs.iter().copied()) {
        out.push(PartitionViolation::NotATree("disconnected".into()));
    }
    out
}

/// Rooted view of a tree given by node count and arcs.
#[derive(Clone, Debug)]
pub struct RootedTree {
    pub root: NodeId,
    pub parent: Vec<Option<NodeId>>,
    pub children: Vec<Vec<NodeId>>,
    pub depth: Vec<usize>,
    /// Nodes in breadth-first order from the root.
    pub order: Vec<NodeId>,
}

impl RootedTree {
    pub fn new(n: usize, arcs: &[(NodeId, NodeId)], root: NodeId) -> Self {
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in arcs {
            adj[a].push(b);
            adj[b].push(a);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        let mut parent = vec![None; n];
        let mut children = vec![Vec::new(); n];
        let mut depth = vec![0; n];
        let mut seen = vec![false; n];
        let mut order = Vec::with_capacity(n);
        let mut queue = VecDeque::from([root]);
        seen[root] = true;
        while let Some(x) = queue.pop_front() {
            order.push(x);
            for &y in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    parent[y] = Some(x);
                    depth[y] = depth[x] + 1;
                    children[x].push(y);
                    queue.push_back(y);
                }
            }
        }
        Self { root, parent, children, depth, order }
    }

    /// Children before parents.
    pub fn postorder(&self) -> Vec<NodeId> {
        self.order.iter().rev().copied().collect()
    }

    /// Node sequence from `a` to `b`, both included.
    pub fn path(&self, a: NodeId, b: NodeId) -> Vec<NodeId> {
        let (mut x, mut y) = (a, b);
        let mut left = Vec::new();
        let mut right = Vec::new();
        while self.depth[x] > self.depth[y] {
            left.push(x);
            x = self.parent[x].expect("non-root has a parent");
        }
        while self.depth[y] > self.depth[x] {
            right.push(y);
            y = self.parent[y].expect("non-root has a parent");
        }
        while x != y {
            left.push(x);
            right.push(y);
            x = self.parent[x].expect("non-root has a parent");
            y = self.parent[y].expect("non-root has a parent");
        }
        left.push(x);
        left.extend(right.into_iter().rev());
        left
    }

    pub fn are_adjacent(&self, a: NodeId, b: NodeId) -> bool {
        self.parent[a] == Some(b) || self.parent[b] == Some(a)
    }
}

impl TreePartition {
    pub fn single_bag(n: usize) -> Self {
        Self { bags: vec![(0..n).collect()], arcs: Vec::new(), root: 0 }
    }

    /// Path-shaped partition with one bag per entry.
    pub fn path(bags: Vec<Vec<VertexId>>) -> Self {
        let arcs = (1..bags.len()).map(|i| (i - 1, i)).collect();
        Self { bags, arcs, root: 0 }
    }

    pub fn num_nodes(&self) -> usize {
        self.bags.len()
    }

    pub fn rooted(&self) -> RootedTree {
        RootedTree::new(self.bags.len(), &self.arcs, self.root)
    }

    /// Node holding each vertex; `usize::MAX` for vertices in no bag.
    pub fn bag_of(&self, n: usize) -> Vec<NodeId> {
        let mut of = vec![usize::MAX; n];
        for (node, bag) in self.bags.iter().enumerate() {
            for &v in bag {
                if v < n {
                    of[v] = node;
                }
            }
        }
        of
    }

    pub fn width(&self) -> usize {
        self.bags.iter().map(Vec::len).max().unwrap_or(0)
    }
}

/// Checks every clause of the tree partition definition and returns the
/// breadth when all hold.
pub fn validate_tree_partition(
    g: &WeightedGraph,
    t: &TreePartition,
) -> std::result::Result<Breadth, Vec<PartitionViolation>> {
    let mut out = tree_shape_violations(t.bags.len(), &t.arcs);
    if !t.bags.is_empty() && t.root >= t.bags.len() {
        out.push(PartitionViolation::RootOutOfRange(t.root));
    }
    if !out.is_empty() {
        return Err(out);
    }
    let n = g.num_vertices();
    let mut owner = vec![usize::MAX; n];
    for (node, bag) in t.bags.iter().enumerate() {
        for &v in bag {
            if v >= n {
                out.push(PartitionViolation::UnknownVertex { node, vertex: v });
            } else if owner[v] != usize::MAX {
                out.push(PartitionViolation::DuplicateVertex { vertex: v, first: owner[v], second: node });
            } else {
                owner[v] = node;
            }
        }
    }
    for (v, &o) in owner.iter().enumerate() {
        if o == usize::MAX {
            out.push(PartitionViolation::MissingVertex(v));
        }
    }
    if !out.is_empty() {
        return Err(out);
    }
    let rooted = t.rooted();
    let mut arc_weight = vec![0i64; t.bags.len()];
    for (id, e) in g.edges().iter().enumerate() {
        let (a, b) = (owner[e.u], owner[e.v]);
        if a == b {
            continue;
        }
        if rooted.parent[a] == Some(b) {
            arc_weight[a] += e.w;
        } else if rooted.parent[b] == Some(a) {
            arc_weight[b] += e.w;
        } else {
            out.push(PartitionViolation::NonLocalEdge { edge: id, u_node: a, v_node: b });
        }
    }
    if !out.is_empty() {
        return Err(out);
    }
    let max_bag = t.width();
    let max_arc_weight = arc_weight.iter().copied().max().unwrap_or(0);
    Ok(Breadth { value: (max_bag as i64).max(max_arc_weight), max_bag, max_arc_weight })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PathDecompViolation {
    UnknownVertex { bag: usize, vertex: VertexId },
    MissingVertex(VertexId),
    UncoveredEdge { u: VertexId, v: VertexId },
    NotContiguous(VertexId),
}

impl std::fmt::Display for PathDecompViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::UnknownVertex { bag, vertex } => write!(f, "bag {bag} holds unknown vertex {vertex}"),
            Self::MissingVertex(v) => write!(f, "vertex {v} in no bag"),
            Self::UncoveredEdge { u, v } => write!(f, "no bag holds both ends of {u}-{v}"),
            Self::NotContiguous(v) => write!(f, "bags holding vertex {v} are not consecutive"),
        }
    }
}

/// Checks a path decomposition given as a sequence of bags over `n` vertices
/// and returns its width (largest bag minus one).
pub fn validate_path_decomposition(
    n: usize,
    edges: &[(VertexId, VertexId)],
    bags: &[Vec<VertexId>],
) -> std::result::Result<usize, Vec<PathDecompViolation>> {
    let mut out = Vec::new();
    let mut first = vec![usize::MAX; n];
    let mut last = vec![0usize; n];
    let mut count = vec![0usize; n];
    for (i, bag) in bags.iter().enumerate() {
        let mut seen_here = std::collections::BTreeSet::new();
        for &v in bag {
            if v >= n {
                out.push(PathDecompViolation::UnknownVertex { bag: i, vertex: v });
                continue;
            }
            if !seen_here.insert(v) {
                continue;
            }
            if first[v] == usize::MAX {
                first[v] = i;
            }
            last[v] = i;
            count[v] += 1;
        }
    }
    for v in 0..n {
        if first[v] == usize::MAX {
            out.push(PathDecompViolation::MissingVertex(v));
        } else if last[v] - first[v] + 1 != count[v] {
            out.push(PathDecompViolation::NotContiguous(v));
        }
    }
    if out.is_empty() {
        for &(u, v) in edges {
            let lo = first[u].max(first[v]);
            let hi = last[u].min(last[v]);
            if lo > hi {
                out.push(PathDecompViolation::UncoveredEdge { u, v });
            }
        }
    }
    if out.is_empty() {
        Ok(bags.iter().map(Vec::len).max().unwrap_or(1).saturating_sub(1))
    } else {
        Err(out)
    }
}

/// A subdivision of a weighted graph. Base vertices keep their ids; the
/// interior vertices of the chain replacing base edge `e` are listed in
/// `chains[e]`, ordered from `e.u` to `e.v`. Every segment keeps the weight
/// of its base edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subdivision {
    pub base: WeightedGraph,
    pub graph: WeightedGraph,
    pub chains: Vec<Vec<VertexId>>,
    pub edge_origin: Vec<EdgeId>,
    pub vertex_origin: Vec<Option<EdgeId>>,
    segments: Vec<Vec<EdgeId>>,
}

impl Subdivision {
    pub fn identity(g: &WeightedGraph) -> Self {
        Self::new(g.clone(), vec![Vec::new(); g.num_edges()]).expect("identity subdivision")
    }

    pub fn new(base: WeightedGraph, chains: Vec<Vec<VertexId>>) -> Result<Self> {
        if chains.len() != base.num_edges() {
            return Err(Error::invalid("one chain per base edge is required"));
        }
        let n = base.num_vertices();
        let extra: usize = chains.iter().map(Vec::len).sum();
        let mut vertex_origin = vec![None; n + extra];
        for (e, chain) in chains.iter().enumerate() {
            for &x in chain {
                if x < n || x >= n + extra {
                    return Err(Error::invalid(format!(
                        "subdivision vertex {x} of edge {e} must be numbered in {n}..{}",
                        n + extra
                    )));
                }
                if vertex_origin[x].is_some() {
                    return Err(Error::invalid(format!("subdivision vertex {x} used twice")));
                }
                vertex_origin[x] = Some(e);
            }
        }
        let mut graph = WeightedGraph::new(n + extra);
        let mut edge_origin = Vec::new();
        let mut segments = Vec::with_capacity(chains.len());
        for (e, chain) in chains.iter().enumerate() {
            let be = base.edge(e);
            let mut prev = be.u;
            let mut segs = Vec::with_capacity(chain.len() + 1);
            for &x in chain.iter().chain(std::iter::once(&be.v)) {
                segs.push(graph.add_edge(prev, x, be.w)?);
                edge_origin.push(e);
                prev = x;
            }
            segments.push(segs);
        }
        Ok(Self { base, graph, chains, edge_origin, vertex_origin, segments })
    }

    pub fn is_identity(&self) -> bool {
        self.chains.iter().all(Vec::is_empty)
    }

    pub fn num_subdivision_vertices(&self) -> usize {
        self.graph.num_vertices() - self.base.num_vertices()
    }

    /// Edges of the subdivided graph replacing base edge `e`, from `e.u` to `e.v`.
    pub fn segments(&self, e: EdgeId) -> &[EdgeId] {
        &self.segments[e]
    }

    /// Base orientation read from the first segment of every chain.
    pub fn project_orientation(&self, o: &Orientation) -> Orientation {
        let forward = (0..self.base.num_edges())
            .map(|e| {
                let first = self.segments[e][0];
                o.tail(&self.graph, first) == self.base.edge(e).u
            })
            .collect();
        Orientation::new(forward)
    }

    /// Orients every segment of a chain along its base edge.
    pub fn lift_orientation(&self, o: &Orientation) -> Orientation {
        let mut forward = vec![true; self.graph.num_edges()];
        for e in 0..self.base.num_edges() {
            for &s in &self.segments[e] {
                // Segments are created from the u-side, so `true` follows the chain.
                forward[s] = o.forward[e];
            }
        }
        Orientation::new(forward)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RefineOp {
    Leaf(VertexId),
    Subdivide(EdgeId),
}

/// A multigraph obtained from `base` by the logged operations. Base vertices
/// and edges keep their ids; every operation appends one vertex and one edge.
/// Subdividing `e = ab` keeps id `e` for `a-x` and appends `x-b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Refinement {
    pub base: Multigraph,
    pub graph: Multigraph,
    pub ops: Vec<RefineOp>,
}

impl Refinement {
    pub fn is_original_vertex(&self, v: VertexId) -> bool {
        v < self.base.num_vertices()
    }
}

pub fn replay_refinement(base: &Multigraph, ops: &[RefineOp]) -> Result<Refinement> {
    let mut graph = base.clone();
    for (step, &op) in ops.iter().enumerate() {
        match op {
            RefineOp::Leaf(v) => {
                if v >= graph.num_vertices() {
                    return Err(Error::invalid(format!(
                        "refinement step {step}: leaf at unknown vertex {v}"
                    )));
                }
                let x = graph.add_vertex();
                graph.add_edge(v, x)?;
            }
            RefineOp::Subdivide(e) => {
                if e >= graph.num_edges() {
                    return Err(Error::invalid(format!(
                        "refinement step {step}: subdivide unknown edge {e}"
                    )));
                }
                let (a, b) = graph.edge(e);
                let x = graph.add_vertex();
                graph.set_edge(e, a, x);
                graph.add_edge(x, b)?;
            }
        }
    }
    Ok(Refinement { base: base.clone(), graph, ops: ops.to_vec() })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TargetTree {
    pub num_nodes: usize,
    pub arcs: Vec<(NodeId, NodeId)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HarmonicMorphism {
    pub source: Refinement,
    pub tree: TargetTree,
    pub vmap: Vec<NodeId>,
    /// Index into `tree.arcs` per source edge.
    pub emap: Vec<usize>,
    pub index: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MorphismViolation {
    BadTree(String),
    Arity(String),
    Loop(EdgeId),
    NonPositiveIndex(EdgeId),
    NotHomomorphic(EdgeId),
    NotHarmonic { vertex: VertexId, indices: Vec<(usize, i64)> },
    DegreeVaries { expected: i64, found: i64, at: String },
}

impl std::fmt::Display for MorphismViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::BadTree(why) => write!(f, "target is not a tree: {why}"),
            Self::Arity(why) => write!(f, "{why}"),
            Self::Loop(e) => write!(f, "source edge {e} is a loop"),
            Self::NonPositiveIndex(e) => write!(f, "edge {e} has non-positive index"),
            Self::NotHomomorphic(e) => write!(f, "edge {e} is not mapped onto the arc joining its end images"),
            Self::NotHarmonic { vertex, indices } => {
                write!(f, "harmonicity violated at vertex {vertex}:")?;
                for (arc, m) in indices {
                    write!(f, " arc {arc} index {m};")?;
                }
                Ok(())
            }
            Self::DegreeVaries { expected, found, at } => {
                write!(f, "degree {found} at {at} differs from {expected}")
            }
        }
    }
}

/// Checks homomorphism, harmonicity and degree constancy, returning the degree.
pub fn validate_harmonic_morphism(
    m: &HarmonicMorphism,
) -> std::result::Result<i64, Vec<MorphismViolation>> {
    let h = &m.source.graph;
    let t = &m.tree;
    let mut out = Vec::new();
    for v in tree_shape_violations(t.num_nodes, &t.arcs) {
        out.push(MorphismViolation::BadTree(v.to_string()));
    }
    if m.vmap.len() != h.num_vertices() {
        out.push(MorphismViolation::Arity(format!(
            "vertex map covers {} of {} vertices",
            m.vmap.len(),
            h.num_vertices()
        )));
    }
    if m.emap.len() != h.num_edges() || m.index.len() != h.num_edges() {
        out.push(MorphismViolation::Arity(format!(
            "edge map/index cover {}/{} of {} edges",
            m.emap.len(),
            m.index.len(),
            h.num_edges()
        )));
    }
    if !out.is_empty() {
        return Err(out);
    }
    if m.vmap.iter().any(|&x| x >= t.num_nodes) || m.emap.iter().any(|&a| a >= t.arcs.len()) {
        out.push(MorphismViolation::Arity("map references unknown tree node or arc".into()));
        return Err(out);
    }
    for (e, &(a, b)) in h.edges().iter().enumerate() {
        if a == b {
            out.push(MorphismViolation::Loop(e));
            continue;
        }
        if m.index[e] < 1 {
            out.push(MorphismViolation::NonPositiveIndex(e));
        }
        let (x, y) = t.arcs[m.emap[e]];
        let (p, q) = (m.vmap[a], m.vmap[b]);
        if !((x == p && y == q) || (x == q && y == p)) {
            out.push(MorphismViolation::NotHomomorphic(e));
        }
    }
    if !out.is_empty() {
        return Err(out);
    }
    let mut incident_arcs = vec![Vec::new(); t.num_nodes];
    for (i, &(a, b)) in t.arcs.iter().enumerate() {
        incident_arcs[a].push(i);
        incident_arcs[b].push(i);
    }
    // m_e(v) per vertex, keyed by arc.
    let mut dir_index: Vec<std::collections::BTreeMap<usize, i64>> =
        vec![Default::default(); h.num_vertices()];
    for (e, &(a, b)) in h.edges().iter().enumerate() {
        *dir_index[a].entry(m.emap[e]).or_default() += m.index[e];
        *dir_index[b].entry(m.emap[e]).or_default() += m.index[e];
    }
    let mut vertex_index = vec![0i64; h.num_vertices()];
    for v in 0..h.num_vertices() {
        let arcs = &incident_arcs[m.vmap[v]];
        if arcs.is_empty() {
            vertex_index[v] = 1;
            continue;
        }
        let indices: Vec<(usize, i64)> =
            arcs.iter().map(|&a| (a, dir_index[v].get(&a).copied().unwrap_or(0))).collect();
        if indices.iter().any(|&(_, x)| x != indices[0].1) {
            out.push(MorphismViolation::NotHarmonic { vertex: v, indices });
        } else {
            vertex_index[v] = indices[0].1;
        }
    }
    if !out.is_empty() {
        return Err(out);
    }
    let mut per_arc = vec![0i64; t.arcs.len()];
    for e in 0..h.num_edges() {
        per_arc[m.emap[e]] += m.index[e];
    }
    let mut per_node = vec![0i64; t.num_nodes];
    for v in 0..h.num_vertices() {
        per_node[m.vmap[v]] += vertex_index[v];
    }
    let degree = per_arc.first().copied().unwrap_or(per_node[0]);
    for (a, &d) in per_arc.iter().enumerate() {
        if d != degree {
            out.push(MorphismViolation::DegreeVaries { expected: degree, found: d, at: format!("arc {a}") });
        }
    }
    for (x, &d) in per_node.iter().enumerate() {
        if d != degree {
            out.push(MorphismViolation::DegreeVaries { expected: degree, found: d, at: format!("node {x}") });
        }
    }
    if out.is_empty() {
        Ok(degree)
    } else {
        Err(out)
    }
}

/// Builds a tree partition of a subdivision of `g` from a harmonic morphism
/// of a refinement of the multigraph of `g`.
pub fn morphism_to_tree_partition(
    g: &WeightedGraph,
    m: &HarmonicMorphism,
) -> Result<(Subdivision, TreePartition)> {
    if let Err(violations) = validate_harmonic_morphism(m) {
        let text: Vec<String> = violations.iter().map(ToString::to_string).collect();
        return Err(Error::invalid(format!("morphism is not harmonic: {}", text.join("; "))));
    }
    let expected = weighted_to_multigraph(g).graph;
    if m.source.base != expected {
        return Err(Error::invalid(
            "morphism source is not recorded as a refinement of the multigraph of the input graph",
        ));
    }
    let n = g.num_vertices();
    let t = &m.tree;
    let rooted = RootedTree::new(t.num_nodes, &t.arcs, 0);

    // Bag per vertex (original and subdivision), chains per base edge.
    let mut bag_of: Vec<NodeId> = m.vmap[..n].to_vec();
    let mut chains: Vec<Vec<VertexId>> = Vec::with_capacity(g.num_edges());
    for e in g.edges() {
        let path = rooted.path(bag_of[e.u], bag_of[e.v]);
        let mut chain = Vec::new();
        for &node in &path[1..path.len().saturating_sub(1)] {
            chain.push(bag_of.len());
            bag_of.push(node);
        }
        chains.push(chain);
    }

    // Drop empty nodes.
    let mut occupied = vec![false; t.num_nodes];
    let mut has_original = vec![false; t.num_nodes];
    for (v, &node) in bag_of.iter().enumerate() {
        occupied[node] = true;
        if v < n {
            has_original[node] = true;
        }
    }
    let kept_arcs: Vec<(NodeId, NodeId)> =
        t.arcs.iter().copied().filter(|&(a, b)| occupied[a] && occupied[b]).collect();
    let mut degree = vec![0usize; t.num_nodes];
    for &(a, b) in &kept_arcs {
        degree[a] += 1;
        degree[b] += 1;
    }
    let anchor = (0..t.num_nodes).find(|&x| has_original[x]).unwrap_or(0);
    let pruned = RootedTree::new(t.num_nodes, &kept_arcs, anchor);

    // Contract degree-2 nodes without original vertices into their parent.
    let mut rep: Vec<NodeId> = (0..t.num_nodes).collect();
    let mut alive_vertex = vec![true; bag_of.len()];
    let mut chain_pos: Vec<(usize, usize)> = vec![(usize::MAX, 0); bag_of.len()];
    for (e, chain) in chains.iter().enumerate() {
        for (i, &x) in chain.iter().enumerate() {
            chain_pos[x] = (e, i);
        }
    }
    for &node in &pruned.order {
        if !occupied[node] || has_original[node] || degree[node] != 2 {
            continue;
        }
        let Some(parent) = pruned.parent[node] else { continue };
        let target = rep[parent];
        rep[node] = target;
        for v in 0..bag_of.len() {
            if alive_vertex[v] && v >= n && bag_of[v] == node {
                // The path through a degree-2 node enters from the parent side;
                // merging the vertex away keeps that neighbour in the parent bag.
                let (e, _) = chain_pos[v];
                let live: Vec<VertexId> =
                    chains[e].iter().copied().filter(|&x| alive_vertex[x]).collect();
                let pos = live.iter().position(|&x| x == v).expect("vertex on its chain");
                let be = g.edge(e);
                let prev = if pos == 0 { be.u } else { live[pos - 1] };
                let next = if pos + 1 == live.len() { be.v } else { live[pos + 1] };
                let in_target = |x: VertexId| rep[bag_of[x]] == target;
                debug_assert!(in_target(prev) || in_target(next));
                alive_vertex[v] = false;
            }
        }
    }
    for x in 0..t.num_nodes {
        let mut r = x;
        while rep[r] != r {
            r = rep[r];
        }
        rep[x] = r;
    }

    // Renumber surviving nodes and subdivision vertices.
    let mut node_id = vec![usize::MAX; t.num_nodes];
    let mut next_node = 0;
    for x in 0..t.num_nodes {
        if occupied[x] && rep[x] == x {
            node_id[x] = next_node;
            next_node += 1;
        }
    }
    let mut new_vertex = vec![usize::MAX; bag_of.len()];
    (0..n).for_each(|v| new_vertex[v] = v);
    let mut next_vertex = n;
    let mut final_chains = Vec::with_capacity(chains.len());
    for chain in &chains {
        let mut c = Vec::new();
        for &x in chain {
            if alive_vertex[x] {
                new_vertex[x] = next_vertex;
                c.push(next_vertex);
                next_vertex += 1;
            }
        }
        final_chains.push(c);
    }
    let mut bags = vec![Vec::new(); next_node];
    for (v, &node) in bag_of.iter().enumerate() {
        if alive_vertex[v] {
            bags[node_id[rep[node]]].push(new_vertex[v]);
        }
    }
    for bag in &mut bags {
        bag.sort_unstable();
    }
    let mut arcs: Vec<(NodeId, NodeId)> = kept_arcs
        .iter()
        .map(|&(a, b)| (node_id[rep[a]], node_id[rep[b]]))
        .filter(|&(a, b)| a != b)
        .map(|(a, b)| (a.min(b), a.max(b)))
        .collect();
    arcs.sort_unstable();
    arcs.dedup();
    let sub = Subdivision::new(g.clone(), final_chains)?;
    Ok((sub, TreePartition { bags, arcs, root: 0 }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle4() -> WeightedGraph {
        WeightedGraph::from_edges(4, &[(0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 0, 1)]).unwrap()
    }

    fn fold4() -> HarmonicMorphism {
        let base = weighted_to_multigraph(&cycle4()).graph;
        let source = replay_refinement(&base, &[]).unwrap();
        HarmonicMorphism {
            source,
            tree: TargetTree { num_nodes: 3, arcs: vec![(0, 1), (1, 2)] },
            vmap: vec![0, 1, 2, 1],
            emap: vec![0, 1, 1, 0],
            index: vec![1; 4],
        }
    }

    #[test]
    fn path_partition_breadth_one() {
        let g = WeightedGraph::from_edges(3, &[(0, 1, 1), (1, 2, 1)]).unwrap();
        let t = TreePartition::path(vec![vec![0], vec![1], vec![2]]);
        assert_eq!(validate_tree_partition(&g, &t).unwrap().value, 1);
    }

    /// Bag {b,d} has size 2 and each tree arc carries two unit edges.
    #[test]
    fn cycle_partition_breadth_two() {
        let t = TreePartition::path(vec![vec![0], vec![1, 3], vec![2]]);
        let b = validate_tree_partition(&cycle4(), &t).unwrap();
        assert_eq!((b.value, b.max_bag, b.max_arc_weight), (2, 2, 2));
    }

    #[test]
    fn overlapping_bags_rejected() {
        let g = WeightedGraph::from_edges(3, &[(0, 1, 1), (1, 2, 1)]).unwrap();
        let t = TreePartition::path(vec![vec![0, 1], vec![1, 2]]);
        let errs = validate_tree_partition(&g, &t).unwrap_err();
        assert!(errs.iter().any(|e| matches!(e, PartitionViolation::DuplicateVertex { vertex: 1, .. })));
    }

    #[test]
    fn non_local_edge_and_bad_tree() {
        let g = WeightedGraph::from_edges(3, &[(0, 2, 1)]).unwrap();
        let t = TreePartition::path(vec![vec![0], vec![1], vec![2]]);
        let errs = validate_tree_partition(&g, &t).unwrap_err();
        assert!(matches!(errs[0], PartitionViolation::NonLocalEdge { edge: 0, .. }));
        let cyc = TreePartition { bags: vec![vec![0], vec![1], vec![2]], arcs: vec![(0, 1), (1, 2), (2, 0)], root: 0 };
        assert!(validate_tree_partition(&g, &cyc).is_err());
    }

    #[test]
    fn identity_morphism_of_tree() {
        let g = WeightedGraph::from_edges(4, &[(0, 1, 1), (1, 2, 1), (1, 3, 1)]).unwrap();
        let source = replay_refinement(&weighted_to_multigraph(&g).graph, &[]).unwrap();
        let m = HarmonicMorphism {
            source,
            tree: TargetTree { num_nodes: 4, arcs: vec![(0, 1), (1, 2), (1, 3)] },
            vmap: vec![0, 1, 2, 3],
            emap: vec![0, 1, 2],
            index: vec![1; 3],
        };
        assert_eq!(validate_harmonic_morphism(&m), Ok(1));
        let (sub, t) = morphism_to_tree_partition(&g, &m).unwrap();
        assert!(sub.is_identity());
        assert!(t.bags.iter().all(|b| b.len() == 1));
        assert_eq!(validate_tree_partition(&sub.graph, &t).unwrap().value, 1);
    }

    /// b and d each see one edge in each direction, a and c one edge toward
    /// their only arc, so every index is 1 and the degree is 2.
    #[test]
    fn folded_cycle() {
        assert_eq!(validate_harmonic_morphism(&fold4()), Ok(2));
        let (sub, t) = morphism_to_tree_partition(&cycle4(), &fold4()).unwrap();
        assert!(sub.is_identity());
        assert_eq!(t.bags, vec![vec![0], vec![1, 3], vec![2]]);
        assert_eq!(validate_tree_partition(&sub.graph, &t).unwrap().value, 2);
        assert!(t.num_nodes() <= 8);
    }

    #[test]
    fn unequal_indices_are_not_harmonic() {
        let g = WeightedGraph::from_edges(3, &[(0, 1, 1), (1, 2, 1)]).unwrap();
        let source = replay_refinement(&weighted_to_multigraph(&g).graph, &[]).unwrap();
        let m = HarmonicMorphism {
            source,
            tree: TargetTree { num_nodes: 3, arcs: vec![(0, 1), (1, 2)] },
            vmap: vec![0, 1, 2],
            emap: vec![0, 1],
            index: vec![1, 2],
        };
        let errs = validate_harmonic_morphism(&m).unwrap_err();
        assert!(errs.iter().any(|e| matches!(e, MorphismViolation::NotHarmonic { vertex: 1, .. })));
    }

    /// Double edge, bridge of index 2, double edge: every vertex in its own
    /// bag and every tree arc carries weight at most 2.
    #[test]
    fn banana_chain_breadth_two() {
        let g = WeightedGraph::from_edges(4, &[(0, 1, 2), (1, 2, 1), (2, 3, 2)]).unwrap();
        let source = replay_refinement(&weighted_to_multigraph(&g).graph, &[]).unwrap();
        let m = HarmonicMorphism {
            source,
            tree: TargetTree { num_nodes: 4, arcs: vec![(0, 1), (1, 2), (2, 3)] },
            vmap: vec![0, 1, 2, 3],
            emap: vec![0, 0, 1, 2, 2],
            index: vec![1, 1, 2, 1, 1],
        };
        assert_eq!(validate_harmonic_morphism(&m), Ok(2));
        let (sub, t) = morphism_to_tree_partition(&g, &m).unwrap();
        assert_eq!(t.bags, vec![vec![0], vec![1], vec![2], vec![3]]);
        assert_eq!(validate_tree_partition(&sub.graph, &t).unwrap().value, 2);
    }

    #[test]
    fn refinement_replay() {
        let base = Multigraph::from_edges(2, vec![(0, 1)]).unwrap();
        assert_eq!(replay_refinement(&base, &[]).unwrap().graph, base);
        let sub = replay_refinement(&base, &[RefineOp::Subdivide(0)]).unwrap().graph;
        assert_eq!(sub.num_vertices(), 3);
        assert_eq!(sub.degree(2), 2);
        assert_eq!(sub.edges(), &[(0, 2), (2, 1)]);
        let leaves = replay_refinement(&base, &[RefineOp::Leaf(0), RefineOp::Leaf(0)]).unwrap().graph;
        assert_eq!(leaves.degree(2), 1);
        assert_eq!(leaves.degree(3), 1);
        assert_eq!(leaves.degree(0), 3);
        assert!(replay_refinement(&base, &[RefineOp::Subdivide(4)]).is_err());
        assert!(replay_refinement(&base, &[RefineOp::Leaf(9)]).is_err());
    }

    /// Long path folded onto a path tree through a subdivided edge: the
    /// intermediate bag only holds a subdivision vertex and gets contracted.
    #[test]
    fn subdivided_edge_across_two_arcs() {
        // G: single edge 0-1. H: subdivide it once; map 0->n0, x->n1, 1->n2.
        let g = WeightedGraph::from_edges(2, &[(0, 1, 1)]).unwrap();
        let source = replay_refinement(&weighted_to_multigraph(&g).graph, &[RefineOp::Subdivide(0)]).unwrap();
        let m = HarmonicMorphism {
            source,
            tree: TargetTree { num_nodes: 3, arcs: vec![(0, 1), (1, 2)] },
            vmap: vec![0, 2, 1],
            emap: vec![0, 1],
            index: vec![1, 1],
        };
        assert_eq!(validate_harmonic_morphism(&m), Ok(1));
        let (sub, t) = morphism_to_tree_partition(&g, &m).unwrap();
        assert!(sub.is_identity());
        assert_eq!(t.num_nodes(), 2);
        assert_eq!(validate_tree_partition(&sub.graph, &t).unwrap().value, 1);
    }

    #[test]
    fn path_decomposition_checks() {
        let edges = [(0, 1), (1, 2)];
        assert_eq!(validate_path_decomposition(3, &edges, &[vec![0, 1], vec![1, 2]]), Ok(1));
        assert!(validate_path_decomposition(3, &edges, &[vec![0, 1], vec![2]]).is_err());
        assert!(validate_path_decomposition(3, &edges, &[vec![0, 1], vec![2], vec![1, 2]]).is_err());
    }

    #[test]
    fn subdivision_orientation_round_trip() {
        let g = WeightedGraph::from_edges(2, &[(0, 1, 3)]).unwrap();
        let sub = Subdivision::new(g, vec![vec![2, 3]]).unwrap();
        assert_eq!(sub.graph.num_edges(), 3);
        assert!(sub.graph.edges().iter().all(|e| e.w == 3));
        let o = Orientation::new(vec![false]);
        let lifted = sub.lift_orientation(&o);
        assert_eq!(sub.project_orientation(&lifted), o);
    }
}
