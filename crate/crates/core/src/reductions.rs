//! Instance transformations between the orientation, flow and domination
//! problems. Each reduction keeps enough provenance to translate a witness
//! of its output back to a witness of its input, and carries tree
//! partitions along where the solvers need them.

use crate::error::{Error, Result};
use crate::graph::{EdgeId, Flow, Orientation, VertexId, WeightedGraph};
use crate::problem::{
    AonfInstance, CdsInstance, CmoInstance, CoInstance, CrbdsInstance, DominationWitness,
    Interval, MmoInstance, OroInstance, TooInstance, UflbInstance,
};
use crate::tree::{NodeId, Subdivision, TreePartition};

/// Reason a reduction short-circuited to a fixed no-instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TrivialNo {
    OddDegree { vertex: VertexId, degree: i64 },
    SumMismatch { weights: i64, targets: i64 },
    /// The capacity between two adjacent bags separates source and sink
    /// and is smaller than the requested value.
    CutTooSmall { bags: (NodeId, NodeId), capacity: i64, value: i64 },
}

impl std::fmt::Display for TrivialNo {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::OddDegree { vertex, degree } => {
                write!(f, "vertex {vertex} has odd weighted degree {degree}")
            }
            Self::SumMismatch { weights, targets } => {
                write!(f, "total weight {weights} differs from total target {targets}")
            }
            Self::CutTooSmall { bags, capacity, value } => write!(
                f,
                "bags {} and {} are separated by capacity {capacity} < value {value}",
                bags.0, bags.1
            ),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Lifted<T> {
    Instance(T),
    TrivialNo(TrivialNo),
}

impl<T> Lifted<T> {
    pub fn instance(&self) -> Option<&T> {
        match self {
            Lifted::Instance(x) => Some(x),
            Lifted::TrivialNo(_) => None,
        }
    }
}

/// Instances that embed directly into outdegree restricted orientation on
/// the same graph; witnesses carry over unchanged.
pub trait LiftToOro {
    fn lift_to_oro(&self) -> Lifted<OroInstance>;
}

impl LiftToOro for TooInstance {
    fn lift_to_oro(&self) -> Lifted<OroInstance> {
        let intervals = self.targets.iter().map(|&d| Interval::point(d)).collect();
        Lifted::Instance(OroInstance { graph: self.graph.clone(), intervals })
    }
}

impl LiftToOro for CmoInstance {
    fn lift_to_oro(&self) -> Lifted<OroInstance> {
        let intervals = self.bounds.iter().map(|&m| Interval::new(0, m)).collect();
        Lifted::Instance(OroInstance { graph: self.graph.clone(), intervals })
    }
}

impl LiftToOro for MmoInstance {
    fn lift_to_oro(&self) -> Lifted<OroInstance> {
        mmo_to_cmo(self).lift_to_oro()
    }
}

impl LiftToOro for CoInstance {
    fn lift_to_oro(&self) -> Lifted<OroInstance> {
        match co_to_too(self) {
            Lifted::Instance(too) => too.lift_to_oro(),
            Lifted::TrivialNo(t) => Lifted::TrivialNo(t),
        }
    }
}

impl LiftToOro for OroInstance {
    fn lift_to_oro(&self) -> Lifted<OroInstance> {
        Lifted::Instance(self.clone())
    }
}

pub fn mmo_to_cmo(inst: &MmoInstance) -> CmoInstance {
    CmoInstance { graph: inst.graph.clone(), bounds: vec![inst.max_out; inst.graph.num_vertices()] }
}

/// Circulating orientation as targets of half the weighted degree.
pub fn co_to_too(inst: &CoInstance) -> Lifted<TooInstance> {
    let deg = inst.graph.weighted_degrees();
    if let Some(v) = deg.iter().position(|d| d % 2 != 0) {
        return Lifted::TrivialNo(TrivialNo::OddDegree { vertex: v, degree: deg[v] });
    }
    Lifted::Instance(TooInstance { graph: inst.graph.clone(), targets: deg.iter().map(|d| d / 2).collect() })
}

/// Output of [`aonf_to_too`]. Arc `a` becomes edges `2a` (tail to
/// midpoint) and `2a + 1` (midpoint to head); all quantities are in
/// doubled units.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AonfToToo {
    pub instance: TooInstance,
    pub midpoint: Vec<VertexId>,
    pub partition: Option<TreePartition>,
}

pub fn aonf_to_too(inst: &AonfInstance, partition: Option<&TreePartition>) -> Result<AonfToToo> {
    inst.validate()?;
    let net = &inst.network;
    let n = net.num_nodes();
    let m = net.num_arcs();
    let mut graph = WeightedGraph::new(n + m);
    let mut beta = vec![0i64; n + m];
    let mut midpoint = Vec::with_capacity(m);
    for (a, arc) in net.arcs().iter().enumerate() {
        if arc.tail == arc.head {
            return Err(Error::invalid(format!("arc {a} is a loop")));
        }
        let mid = n + a;
        graph.add_edge(arc.tail, mid, arc.cap)?;
        graph.add_edge(mid, arc.head, arc.cap)?;
        beta[mid] += arc.cap;
        beta[arc.head] += arc.cap;
        midpoint.push(mid);
    }
    let mut targets = beta;
    targets[net.source] = targets[net.source].checked_add(inst.value).ok_or(Error::Overflow("aonf targets"))?;
    targets[net.sink] -= inst.value;
    let partition = match partition {
        None => None,
        Some(t) => Some(aonf_partition(inst, t)?),
    };
    Ok(AonfToToo { instance: TooInstance { graph, targets }, midpoint, partition })
}

/// Midpoints of arcs inside a bag stay there; midpoints of arcs across a
/// tree arc go into a new node subdividing that tree arc.
fn aonf_partition(inst: &AonfInstance, t: &TreePartition) -> Result<TreePartition> {
    let net = &inst.network;
    let n = net.num_nodes();
    let owner = t.bag_of(n);
    if owner.contains(&usize::MAX) {
        return Err(Error::invalid("partition does not cover every node of the network"));
    }
    let mut bags = t.bags.clone();
    let mut arc_node = vec![usize::MAX; t.arcs.len()];
    let mut arcs = Vec::new();
    for (i, &(a, b)) in t.arcs.iter().enumerate() {
        let x = bags.len();
        bags.push(Vec::new());
        arc_node[i] = x;
        arcs.push((a, x));
        arcs.push((x, b));
    }
    for (e, arc) in net.arcs().iter().enumerate() {
        let (p, q) = (owner[arc.tail], owner[arc.head]);
        let mid = n + e;
        if p == q {
            bags[p].push(mid);
        } else {
            let i = t
                .arcs
                .iter()
                .position(|&(a, b)| (a, b) == (p, q) || (a, b) == (q, p))
                .ok_or_else(|| Error::invalid(format!("arc {e} joins non-adjacent bags")))?;
            bags[arc_node[i]].push(mid);
        }
    }
    Ok(drop_empty_arc_nodes(bags, arcs, t.root, t.bags.len()))
}

/// Removes empty nodes introduced by subdividing tree arcs, reconnecting
/// their two neighbours.
fn drop_empty_arc_nodes(
    bags: Vec<Vec<VertexId>>,
    arcs: Vec<(NodeId, NodeId)>,
    root: NodeId,
    first_new: usize,
) -> TreePartition {
    let mut keep: Vec<bool> = bags.iter().enumerate().map(|(i, b)| i < first_new || !b.is_empty()).collect();
    keep.iter_mut().take(first_new).for_each(|k| *k = true);
    let mut neighbours: Vec<Vec<NodeId>> = vec![Vec::new(); bags.len()];
    for &(a, b) in &arcs {
        neighbours[a].push(b);
        neighbours[b].push(a);
    }
    let mut new_arcs = Vec::new();
    for &(a, b) in &arcs {
        if keep[a] && keep[b] {
            new_arcs.push((a, b));
        }
    }
    for x in first_new..bags.len() {
        if !keep[x] {
            let nb = &neighbours[x];
            debug_assert_eq!(nb.len(), 2);
            new_arcs.push((nb[0], nb[1]));
        }
    }
    let mut id = vec![usize::MAX; bags.len()];
    let mut out_bags = Vec::new();
    for (x, bag) in bags.into_iter().enumerate() {
        if keep[x] {
            id[x] = out_bags.len();
            let mut bag = bag;
            bag.sort_unstable();
            out_bags.push(bag);
        }
    }
    let arcs = new_arcs.into_iter().map(|(a, b)| (id[a], id[b])).collect();
    TreePartition { bags: out_bags, arcs, root: id[root] }
}

impl AonfToToo {
    /// Full flow on exactly the arcs whose tail edge points at the midpoint.
    pub fn flow_from_orientation(&self, inst: &AonfInstance, o: &Orientation) -> Flow {
        let g = &self.instance.graph;
        let values = inst
            .network
            .arcs()
            .iter()
            .enumerate()
            .map(|(a, arc)| if o.tail(g, 2 * a) == arc.tail { arc.cap } else { 0 })
            .collect();
        Flow { values }
    }

    pub fn orientation_from_flow(&self, inst: &AonfInstance, f: &Flow) -> Orientation {
        let mut forward = Vec::with_capacity(2 * inst.network.num_arcs());
        for (a, arc) in inst.network.arcs().iter().enumerate() {
            let full = f.values[a] == arc.cap && arc.cap > 0;
            forward.push(full);
            forward.push(full);
        }
        Orientation::new(forward)
    }
}

/// Output of [`too_to_co`]. Original edges keep their ids; the auxiliary
/// source `s`, sink `t` and their edges follow.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TooToCo {
    pub instance: CoInstance,
    pub demands: Vec<i64>,
    pub alpha: i64,
    pub terminals: Option<(VertexId, VertexId)>,
    pub ts_edge: Option<EdgeId>,
    pub original_edges: usize,
}

pub fn too_to_co(inst: &TooInstance) -> Result<TooToCo> {
    let g = &inst.graph;
    let n = g.num_vertices();
    let deg = g.weighted_degrees();
    let demands: Vec<i64> = (0..n).map(|v| deg[v] - 2 * inst.targets[v]).collect();
    let total: i64 = demands.iter().map(|d| d.abs()).sum();
    let alpha = total / 2;
    let mut graph = g.clone();
    let mut terminals = None;
    let mut ts_edge = None;
    if total > 0 {
        let s = graph.add_vertex();
        let t = graph.add_vertex();
        terminals = Some((s, t));
        if alpha > 0 {
            ts_edge = Some(graph.add_edge(t, s, alpha)?);
        }
        for (v, &d) in demands.iter().enumerate() {
            if d < 0 {
                graph.add_edge(s, v, -d)?;
            }
        }
        for (v, &d) in demands.iter().enumerate() {
            if d > 0 {
                graph.add_edge(v, t, d)?;
            }
        }
    }
    Ok(TooToCo {
        instance: CoInstance { graph },
        demands,
        alpha,
        terminals,
        ts_edge,
        original_edges: g.num_edges(),
    })
}

impl TooToCo {
    /// Restricts a circulating orientation to the original edges, first
    /// reversing everything if the `t-s` edge points from `s` to `t`.
    pub fn orientation_back(&self, o: &Orientation) -> Orientation {
        let flip = self.ts_edge.is_some_and(|e| !o.forward[e]);
        let forward = o.forward[..self.original_edges].iter().map(|&d| d != flip).collect();
        Orientation::new(forward)
    }

    pub fn orientation_forward(&self, inst: &TooInstance, o: &Orientation) -> Orientation {
        let mut forward = o.forward.clone();
        let g = &self.instance.graph;
        for e in self.original_edges..g.num_edges() {
            // t->s, s->v and v->t are all stored in that direction.
            let _ = inst;
            forward.push(true);
            debug_assert!(g.edge(e).w > 0);
        }
        Orientation::new(forward)
    }
}

/// Target outdegree as chosen maximum outdegree when every edge is accounted for.
pub fn too_to_cmo(inst: &TooInstance) -> Lifted<CmoInstance> {
    let weights = inst.graph.total_weight();
    let targets: i64 = inst.targets.iter().sum();
    if weights != targets {
        return Lifted::TrivialNo(TrivialNo::SumMismatch { weights, targets });
    }
    Lifted::Instance(CmoInstance { graph: inst.graph.clone(), bounds: inst.targets.clone() })
}

/// One original edge of a UFLB instance after the transformation: a heavy
/// path and `c - l` light paths, each given by its two edges (from `u`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeGadget {
    pub heavy: (EdgeId, EdgeId),
    pub light: Vec<(EdgeId, EdgeId)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UflbToCo {
    pub instance: CoInstance,
    pub gadgets: Vec<EdgeGadget>,
    /// Edges of the closing source-sink path, starting at the source.
    pub st_path: Vec<EdgeId>,
    pub partition: Option<TreePartition>,
}

pub fn uflb_to_co(inst: &UflbInstance, partition: Option<&TreePartition>) -> Result<Lifted<UflbToCo>> {
    inst.validate()?;
    let g = &inst.graph;
    let n = g.num_vertices();
    let (s, t) = (inst.source, inst.sink);

    // Placement of new vertices in the refined tree: every tree arc gets a
    // node of its own, and in-bag light paths get leaf nodes.
    struct Layout {
        owner: Vec<NodeId>,
        bags: Vec<Vec<VertexId>>,
        arcs: Vec<(NodeId, NodeId)>,
        arc_node: Vec<NodeId>,
        tree_arcs: Vec<(NodeId, NodeId)>,
        root: NodeId,
        base_nodes: usize,
    }
    let mut layout = match partition {
        None => None,
        Some(tp) => {
            let owner = tp.bag_of(n);
            if owner.contains(&usize::MAX) {
                return Err(Error::invalid("partition does not cover every vertex"));
            }
            let rooted = tp.rooted();
            if owner[s] != owner[t] {
                let path = rooted.path(owner[s], owner[t]);
                let (a, b) = (path[0], path[1]);
                let capacity: i64 = g
                    .edges()
                    .iter()
                    .filter(|e| {
                        (owner[e.u] == a && owner[e.v] == b) || (owner[e.u] == b && owner[e.v] == a)
                    })
                    .map(|e| e.w)
                    .sum();
                if inst.value > capacity {
                    return Ok(Lifted::TrivialNo(TrivialNo::CutTooSmall {
                        bags: (a, b),
                        capacity,
                        value: inst.value,
                    }));
                }
            }
            let mut bags = tp.bags.clone();
            let mut arcs = Vec::new();
            let mut arc_node = Vec::new();
            for &(a, b) in &tp.arcs {
                let x = bags.len();
                bags.push(Vec::new());
                arc_node.push(x);
                arcs.push((a, x));
                arcs.push((x, b));
            }
            Some(Layout {
                owner,
                bags,
                arcs,
                arc_node,
                tree_arcs: tp.arcs.clone(),
                root: tp.root,
                base_nodes: tp.bags.len(),
            })
        }
    };

    let mut graph = WeightedGraph::new(n);
    let mut gadgets = Vec::with_capacity(g.num_edges());
    let place = |layout: &mut Option<Layout>, x: VertexId, u: VertexId, v: VertexId, leaf: bool| {
        if let Some(l) = layout {
            let (p, q) = (l.owner[u], l.owner[v]);
            let node = if p == q {
                if leaf {
                    let y = l.bags.len();
                    l.bags.push(Vec::new());
                    l.arcs.push((p, y));
                    y
                } else {
                    p
                }
            } else {
                let i = l
                    .tree_arcs
                    .iter()
                    .position(|&(a, b)| (a, b) == (p, q) || (a, b) == (q, p))
                    .expect("partition checked for locality");
                l.arc_node[i]
            };
            l.bags[node].push(x);
        }
    };
    for (e, edge) in g.edges().iter().enumerate() {
        let (c, l) = (edge.w, inst.lower[e]);
        let h = graph.add_vertex();
        place(&mut layout, h, edge.u, edge.v, false);
        let heavy = (graph.add_edge(edge.u, h, c + l)?, graph.add_edge(h, edge.v, c + l)?);
        let mut light = Vec::new();
        for _ in 0..(c - l) {
            let x = graph.add_vertex();
            place(&mut layout, x, edge.u, edge.v, true);
            light.push((graph.add_edge(edge.u, x, 1)?, graph.add_edge(x, edge.v, 1)?));
        }
        gadgets.push(EdgeGadget { heavy, light });
    }

    let mut st_path = Vec::new();
    if inst.value > 0 {
        let w = 2 * inst.value;
        // Interior nodes of the refined tree path from s to t; at least one.
        let interior: Vec<Option<NodeId>> = match &layout {
            None => vec![None],
            Some(l) => {
                let refined = crate::tree::RootedTree::new(l.bags.len(), &l.arcs, l.root);
                let path = refined.path(l.owner[s], l.owner[t]);
                if path.len() == 1 {
                    vec![Some(path[0])]
                } else {
                    path[1..path.len() - 1].iter().map(|&x| Some(x)).collect()
                }
            }
        };
        let mut prev = s;
        for node in interior {
            let x = graph.add_vertex();
            if let (Some(l), Some(node)) = (layout.as_mut(), node) {
                l.bags[node].push(x);
            }
            st_path.push(graph.add_edge(prev, x, w)?);
            prev = x;
        }
        st_path.push(graph.add_edge(prev, t, w)?);
    }

    let partition = layout.map(|l| {
        let base = l.base_nodes;
        let (bags, arcs, root) = (l.bags, l.arcs, l.root);
        // Arc nodes that stayed empty are spliced out; leaf nodes never are empty.
        drop_empty_arc_nodes_keep_leaves(bags, arcs, root, base)
    });
    Ok(Lifted::Instance(UflbToCo { instance: CoInstance { graph }, gadgets, st_path, partition }))
}

fn drop_empty_arc_nodes_keep_leaves(
    bags: Vec<Vec<VertexId>>,
    arcs: Vec<(NodeId, NodeId)>,
    root: NodeId,
    first_new: usize,
) -> TreePartition {
    // Leaf nodes for light paths are never empty, so only arc nodes can be
    // dropped, and those have exactly two neighbours.
    drop_empty_arc_nodes(bags, arcs, root, first_new)
}

impl UflbToCo {
    /// Orientation and flow of the original instance from a circulating
    /// orientation of the output.
    pub fn witness_back(&self, inst: &UflbInstance, o: &Orientation) -> (Orientation, Flow) {
        let flip = self.st_path.first().is_some_and(|&e| o.forward[e]);
        let dir = |e: EdgeId| o.forward[e] != flip;
        let mut forward = Vec::with_capacity(self.gadgets.len());
        let mut values = Vec::with_capacity(self.gadgets.len());
        for (e, gadget) in self.gadgets.iter().enumerate() {
            let d = dir(gadget.heavy.0);
            let gamma = gadget.light.iter().filter(|&&(first, _)| dir(first) == d).count() as i64;
            forward.push(d);
            values.push(inst.lower[e] + gamma);
        }
        (Orientation::new(forward), Flow { values })
    }

    /// Circulating orientation of the output from a flow of the original.
    pub fn witness_forward(&self, inst: &UflbInstance, o: &Orientation, f: &Flow) -> Orientation {
        let g = &self.instance.graph;
        let mut forward = vec![true; g.num_edges()];
        for (e, gadget) in self.gadgets.iter().enumerate() {
            let d = o.forward[e];
            forward[gadget.heavy.0] = d;
            forward[gadget.heavy.1] = d;
            let along = (f.values[e] - inst.lower[e]) as usize;
            for (i, &(a, b)) in gadget.light.iter().enumerate() {
                let same = i < along;
                forward[a] = if same { d } else { !d };
                forward[b] = forward[a];
            }
        }
        // The closing path carries the value back from t to s.
        for &e in &self.st_path {
            forward[e] = false;
        }
        Orientation::new(forward)
    }
}

/// Output of [`cds_to_crbds`]: vertex `v` becomes red `2v` and blue `2v + 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CdsToCrbds {
    pub instance: CrbdsInstance,
    pub partition: Option<TreePartition>,
}

pub fn cds_to_crbds(inst: &CdsInstance, partition: Option<&TreePartition>) -> Result<CdsToCrbds> {
    inst.validate()?;
    let n = inst.graph.num_vertices();
    let mut graph = WeightedGraph::new(2 * n);
    for v in 0..n {
        graph.add_edge(2 * v, 2 * v + 1, 1)?;
    }
    for e in inst.graph.edges() {
        graph.add_edge(2 * e.u, 2 * e.v + 1, 1)?;
        graph.add_edge(2 * e.v, 2 * e.u + 1, 1)?;
    }
    let red = (0..2 * n).map(|x| x % 2 == 0).collect();
    let capacity = (0..2 * n).map(|x| if x % 2 == 0 { inst.capacity[x / 2] + 1 } else { 0 }).collect();
    let pins = (0..2 * n).map(|x| if x % 2 == 1 { Some(x - 1) } else { None }).collect();
    let partition = partition.map(|t| TreePartition {
        bags: t.bags.iter().map(|b| b.iter().flat_map(|&v| [2 * v, 2 * v + 1]).collect()).collect(),
        arcs: t.arcs.clone(),
        root: t.root,
    });
    Ok(CdsToCrbds {
        instance: CrbdsInstance { graph, red, capacity, pins, budget: inst.budget },
        partition,
    })
}

impl CdsToCrbds {
    pub fn witness_back(&self, w: &DominationWitness) -> DominationWitness {
        let n = self.instance.graph.num_vertices() / 2;
        let dominators: Vec<VertexId> = w.dominators.iter().map(|&r| r / 2).collect();
        let mut chosen = vec![false; n];
        dominators.iter().for_each(|&d| chosen[d] = true);
        let assignment = (0..n)
            .map(|v| if chosen[v] { None } else { w.assignment[2 * v + 1].map(|r| r / 2) })
            .collect();
        DominationWitness { dominators, assignment }
    }
}

/// Chain gadget replacing the subdivision vertices of one red-blue edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainGadget {
    pub red_end: VertexId,
    pub blue_end: VertexId,
    /// `(x, y, z)` per subdivision vertex, from the red end.
    pub triples: Vec<(VertexId, VertexId, VertexId)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gadgetized {
    pub instance: CrbdsInstance,
    pub partition: TreePartition,
    pub chains: Vec<ChainGadget>,
    pub extra_dominators: usize,
}

/// Replaces every subdivision vertex of a red-blue graph by a blue `x`, a
/// red `y` of capacity 2 and a blue `z` private to `y`, so that the
/// partition of the subdivision becomes a partition of a graph with the
/// same answer up to the number of gadgets.
pub fn gadgetize_subdivisions(
    inst: &CrbdsInstance,
    sub: &Subdivision,
    partition: &TreePartition,
) -> Result<Gadgetized> {
    if sub.base.num_vertices() != inst.graph.num_vertices()
        || sub.base.num_edges() != inst.graph.num_edges()
        || sub.base.edges().iter().zip(inst.graph.edges()).any(|(a, b)| (a.u, a.v) != (b.u, b.v))
    {
        return Err(Error::invalid("subdivision does not match the instance graph"));
    }
    let n = inst.graph.num_vertices();
    let mut graph = WeightedGraph::new(n);
    let mut red = inst.red.clone();
    let mut capacity = inst.capacity.clone();
    let mut pins = inst.pins.clone();
    let mut replace: Vec<Vec<VertexId>> = vec![Vec::new(); sub.graph.num_vertices()];
    let mut chains = Vec::new();
    let mut extra = 0;
    for (e, edge) in inst.graph.edges().iter().enumerate() {
        let chain = &sub.chains[e];
        if chain.is_empty() {
            graph.add_edge(edge.u, edge.v, 1)?;
            continue;
        }
        let (r, b, ordered): (VertexId, VertexId, Vec<VertexId>) = if inst.red[edge.u] {
            (edge.u, edge.v, chain.clone())
        } else {
            (edge.v, edge.u, chain.iter().rev().copied().collect())
        };
        if inst.pins[b] == Some(r) {
            return Err(Error::invalid(format!("pinned edge {e} cannot be subdivided")));
        }
        let mut triples = Vec::new();
        let mut prev_red = None;
        for &s in &ordered {
            let x = graph.add_vertex();
            let y = graph.add_vertex();
            let z = graph.add_vertex();
            red.extend([false, true, false]);
            capacity.extend([0, 2, 0]);
            pins.extend([None, None, None]);
            match prev_red {
                None => graph.add_edge(r, x, 1)?,
                Some(py) => graph.add_edge(py, x, 1)?,
            };
            graph.add_edge(y, x, 1)?;
            graph.add_edge(y, z, 1)?;
            prev_red = Some(y);
            replace[s] = vec![x, y, z];
            triples.push((x, y, z));
            extra += 1;
        }
        graph.add_edge(prev_red.expect("non-empty chain"), b, 1)?;
        chains.push(ChainGadget { red_end: r, blue_end: b, triples });
    }
    let bags = partition
        .bags
        .iter()
        .map(|bag| {
            let mut out = Vec::new();
            for &v in bag {
                if v < n {
                    out.push(v);
                } else {
                    out.extend_from_slice(&replace[v]);
                }
            }
            out.sort_unstable();
            out
        })
        .collect();
    let instance = CrbdsInstance { graph, red, capacity, pins, budget: inst.budget + extra };
    Ok(Gadgetized {
        instance,
        partition: TreePartition { bags, arcs: partition.arcs.clone(), root: partition.root },
        chains,
        extra_dominators: extra,
    })
}

impl Gadgetized {
    pub fn witness_back(&self, original_vertices: usize, w: &DominationWitness) -> DominationWitness {
        let n = original_vertices;
        let dominators = w.dominators.iter().copied().filter(|&d| d < n).collect();
        let mut assignment: Vec<Option<VertexId>> = w.assignment[..n].to_vec();
        for chain in &self.chains {
            let last_y = chain.triples.last().expect("non-empty chain").1;
            if assignment[chain.blue_end] == Some(last_y) {
                assignment[chain.blue_end] = Some(chain.red_end);
            }
        }
        DominationWitness { dominators, assignment }
    }
}
