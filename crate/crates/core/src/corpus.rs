//! Instance generators for the test corpus: exhaustive small graphs and
//! partitions, seeded random instances of every problem, and random
//! harmonic morphisms.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::Rng;

use crate::graph::{weighted_to_multigraph, FlowNetwork, Orientation, VertexId, WeightedGraph};
use crate::ilp::{IlpModel, Relation};
use crate::problem::{
    AonfInstance, CdsInstance, CmoInstance, CoInstance, CrbdsInstance, Interval, MmoInstance, OroInstance,
    TooInstance, UflbInstance,
};
use crate::tree::{
    replay_refinement, validate_tree_partition, HarmonicMorphism, NodeId, RefineOp, TargetTree, TreePartition,
};

pub type CorpusRng = rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> CorpusRng {
    rand::SeedableRng::seed_from_u64(seed)
}

/// Connected simple graphs on exactly `n` vertices with at most `max_edges`
/// edges, one per isomorphism class, as sorted edge lists.
pub fn connected_graphs(n: usize, max_edges: usize) -> Vec<Vec<(VertexId, VertexId)>> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    let perms = permutations(n);
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for mask in 0u32..1 << pairs.len() {
        if mask.count_ones() as usize > max_edges {
            continue;
        }
        let edges: Vec<_> = (0..pairs.len()).filter(|&i| mask >> i & 1 == 1).map(|i| pairs[i]).collect();
        if !is_connected(n, &edges) {
            continue;
        }
        let canon = perms
            .iter()
            .map(|p| {
                let mut e: Vec<_> = edges.iter().map(|&(u, v)| (p[u].min(p[v]), p[u].max(p[v]))).collect();
                e.sort_unstable();
                e
            })
            .min()
            .unwrap_or_default();
        if seen.insert(canon) {
            out.push(edges);
        }
    }
    out
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

fn is_connected(n: usize, edges: &[(usize, usize)]) -> bool {
    if n == 0 {
        return true;
    }
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        if p[x] != x {
            p[x] = find(p, p[x]);
        }
        p[x]
    }
    let mut parts = n;
    for &(u, v) in edges {
        let (a, b) = (find(&mut parent, u), find(&mut parent, v));
        if a != b {
            parent[a] = b;
            parts -= 1;
        }
    }
    parts == 1
}

/// Every weight vector over `weights` for `m` edges, in lexicographic order.
pub fn weight_vectors(m: usize, weights: &[i64]) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..m {
        out = out.into_iter().flat_map(|p| weights.iter().map(move |&w| [p.clone(), vec![w]].concat())).collect();
    }
    out
}

pub fn weighted(n: usize, edges: &[(VertexId, VertexId)], weights: &[i64]) -> WeightedGraph {
    let list: Vec<_> = edges.iter().zip(weights).map(|(&(u, v), &w)| (u, v, w)).collect();
    WeightedGraph::from_edges(n, &list).expect("edges are in range")
}

/// Set partitions of `0..n` into at most `k` blocks (restricted growth
/// strings).
fn set_partitions(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    fn go(n: usize, k: usize, cur: &mut Vec<usize>, blocks: usize, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for b in 0..(blocks + 1).min(k) {
            cur.push(b);
            go(n, k, cur, blocks.max(b + 1), out);
            cur.pop();
        }
    }
    go(n, k, &mut Vec::new(), 0, &mut out);
    out
}

/// Every valid tree partition of `g` over at most `max_bags` bags (3 at
/// most), with every tree shape on the blocks and node 0 as root. The
/// single-bag partition comes first.
pub fn all_tree_partitions(g: &WeightedGraph, max_bags: usize) -> Vec<TreePartition> {
    assert!(max_bags <= 3, "tree shapes are enumerated for at most three bags");
    let n = g.num_vertices();
    let mut out = Vec::new();
    for rgs in set_partitions(n, max_bags) {
        let k = rgs.iter().max().map_or(1, |m| m + 1);
        let mut bags = vec![Vec::new(); k];
        for (v, &b) in rgs.iter().enumerate() {
            bags[b].push(v);
        }
        let shapes: Vec<Vec<(NodeId, NodeId)>> = match k {
            1 => vec![vec![]],
            2 => vec![vec![(0, 1)]],
            _ => vec![vec![(0, 1), (1, 2)], vec![(1, 0), (0, 2)], vec![(0, 2), (2, 1)]],
        };
        for arcs in shapes {
            let t = TreePartition { bags: bags.clone(), arcs, root: 0 };
            if validate_tree_partition(g, &t).is_ok() {
                out.push(t);
            }
        }
    }
    out
}

/// A valid tree partition of the graph on `n` vertices with the given
/// edges: random vertex placements on a random tree with up to `max_bags`
/// nodes, falling back to merged breadth-first layers.
pub fn random_tree_partition<R: Rng>(
    rng: &mut R,
    g: &WeightedGraph,
    max_bags: usize,
) -> TreePartition {
    let n = g.num_vertices();
    for _ in 0..20 {
        let k = rng.gen_range(1..=max_bags.max(1));
        let arcs: Vec<_> = (1..k).map(|i| (rng.gen_range(0..i), i)).collect();
        let mut bags = vec![Vec::new(); k];
        for v in 0..n {
            bags[rng.gen_range(0..k)].push(v);
        }
        if bags.iter().any(Vec::is_empty) {
            continue;
        }
        let t = TreePartition { bags, arcs, root: rng.gen_range(0..k) };
        if validate_tree_partition(g, &t).is_ok() {
            return t;
        }
    }
    layered_partition(rng, g)
}

fn layered_partition<R: Rng>(rng: &mut R, g: &WeightedGraph) -> TreePartition {
    let n = g.num_vertices();
    if n == 0 {
        return TreePartition::single_bag(0);
    }
    let inc = g.incidence();
    let mut layer = vec![usize::MAX; n];
    // Every component starts its own search at layer 0.
    let first = rng.gen_range(0..n);
    for start in std::iter::once(first).chain(0..n) {
        if layer[start] != usize::MAX {
            continue;
        }
        layer[start] = 0;
        let mut queue = std::collections::VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for &e in &inc[v] {
                let w = g.edge(e).other(v);
                if layer[w] == usize::MAX {
                    layer[w] = layer[v] + 1;
                    queue.push_back(w);
                }
            }
        }
    }
    let depth = layer.iter().copied().max().unwrap_or(0);
    // Merge runs of consecutive layers.
    let mut group = vec![0usize; depth + 1];
    for d in 1..=depth {
        group[d] = group[d - 1] + usize::from(rng.gen_bool(0.6));
    }
    let mut bags = vec![Vec::new(); group[depth] + 1];
    for v in 0..n {
        bags[group[layer[v]]].push(v);
    }
    TreePartition::path(bags)
}

/// Random connected graph: a random spanning tree plus `extra` further
/// edges (parallel edges are avoided), weights in `1..=max_w`.
pub fn random_connected_graph<R: Rng>(rng: &mut R, n: usize, extra: usize, max_w: i64) -> WeightedGraph {
    let mut g = WeightedGraph::new(n);
    let mut present = BTreeSet::new();
    for v in 1..n {
        let u = rng.gen_range(0..v);
        g.add_edge(u, v, rng.gen_range(1..=max_w)).expect("in range");
        present.insert((u, v));
    }
    let mut tries = 0;
    let mut added = 0;
    while added < extra && tries < 50 && n >= 2 {
        tries += 1;
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u == v || !present.insert((u.min(v), u.max(v))) {
            continue;
        }
        g.add_edge(u, v, rng.gen_range(1..=max_w)).expect("in range");
        added += 1;
    }
    g
}

pub fn random_orientation<R: Rng>(rng: &mut R, m: usize) -> Orientation {
    Orientation::new((0..m).map(|_| rng.gen_bool(0.5)).collect())
}

/// Intervals around the outdegrees of a random orientation (a yes
/// instance), or random sub-intervals of `[0, degree]`, each with
/// probability one half.
pub fn random_intervals<R: Rng>(rng: &mut R, g: &WeightedGraph) -> Vec<Interval> {
    let deg = g.weighted_degrees();
    if rng.gen_bool(0.5) {
        let o = random_orientation(rng, g.num_edges());
        let out = crate::graph::weighted_outdegrees(g, &o).expect("total orientation");
        out.iter()
            .map(|&d| {
                let lo = d - rng.gen_range(0..=1);
                Interval::new(lo.max(0), d + rng.gen_range(0..=1))
            })
            .collect()
    } else {
        deg.iter()
            .map(|&d| {
                let a = rng.gen_range(0..=d);
                let b = rng.gen_range(0..=d);
                if rng.gen_bool(0.3) {
                    Interval::point(a)
                } else {
                    Interval::new(a.min(b), a.max(b))
                }
            })
            .collect()
    }
}

pub fn random_oro<R: Rng>(rng: &mut R, g: WeightedGraph) -> OroInstance {
    let intervals = random_intervals(rng, &g);
    OroInstance { graph: g, intervals }
}

fn outdegrees_of_random_orientation<R: Rng>(rng: &mut R, g: &WeightedGraph) -> Vec<i64> {
    let o = random_orientation(rng, g.num_edges());
    crate::graph::weighted_outdegrees(g, &o).expect("total orientation")
}

pub fn random_too<R: Rng>(rng: &mut R, g: WeightedGraph) -> TooInstance {
    let mut targets = outdegrees_of_random_orientation(rng, &g);
    if rng.gen_bool(0.4) && !targets.is_empty() {
        // Move one unit between two vertices; keeps the sum.
        let a = rng.gen_range(0..targets.len());
        let b = rng.gen_range(0..targets.len());
        targets[a] += 1;
        targets[b] -= 1;
        if targets[b] < 0 {
            targets[b] = 0;
        }
    }
    TooInstance { graph: g, targets }
}

pub fn random_cmo<R: Rng>(rng: &mut R, g: WeightedGraph) -> CmoInstance {
    let bounds = outdegrees_of_random_orientation(rng, &g)
        .into_iter()
        .map(|d| (d + rng.gen_range(-1..=1)).max(0))
        .collect();
    CmoInstance { graph: g, bounds }
}

pub fn random_mmo<R: Rng>(rng: &mut R, g: WeightedGraph) -> MmoInstance {
    let best = outdegrees_of_random_orientation(rng, &g).into_iter().max().unwrap_or(0);
    MmoInstance { max_out: (best + rng.gen_range(-2..=0)).max(0), graph: g }
}

pub fn random_co(g: WeightedGraph) -> CoInstance {
    CoInstance { graph: g }
}

pub fn random_uflb<R: Rng>(rng: &mut R, g: WeightedGraph) -> UflbInstance {
    let n = g.num_vertices();
    let lower = g.edges().iter().map(|e| if rng.gen_bool(0.4) { rng.gen_range(1..=e.w) } else { 0 }).collect();
    let source = rng.gen_range(0..n);
    let mut sink = rng.gen_range(0..n - 1);
    if sink >= source {
        sink += 1;
    }
    let total = g.total_weight();
    UflbInstance { value: rng.gen_range(0..=total), graph: g, lower, source, sink }
}

/// Random connected network on `n` nodes with `arcs` arcs, capacities in
/// `1..=max_cap`, source 0 and sink `n - 1`, value in `[0, total capacity]`.
pub fn random_aonf<R: Rng>(rng: &mut R, n: usize, arcs: usize, max_cap: i64) -> AonfInstance {
    assert!(n >= 2 && arcs + 1 >= n);
    loop {
        let mut net = FlowNetwork::new(n, 0, n - 1).expect("distinct terminals");
        for v in 1..n {
            let u = rng.gen_range(0..v);
            let (a, b) = if rng.gen_bool(0.5) { (u, v) } else { (v, u) };
            net.add_arc(a, b, rng.gen_range(1..=max_cap)).expect("positive capacity");
        }
        while net.num_arcs() < arcs {
            let a = rng.gen_range(0..n);
            let b = rng.gen_range(0..n);
            if a != b {
                net.add_arc(a, b, rng.gen_range(1..=max_cap)).expect("positive capacity");
            }
        }
        let total = net.total_capacity();
        let value = rng.gen_range(0..=total);
        if net.is_connected() {
            return AonfInstance { network: net, value };
        }
    }
}

pub fn random_cds<R: Rng>(rng: &mut R, g: WeightedGraph, max_cap: i64) -> CdsInstance {
    let n = g.num_vertices();
    let capacity = (0..n).map(|_| rng.gen_range(1..=max_cap)).collect();
    CdsInstance { graph: unit_weights(&g), capacity, budget: rng.gen_range(0..=n) }
}

fn unit_weights(g: &WeightedGraph) -> WeightedGraph {
    let edges: Vec<_> = g.edges().iter().map(|e| (e.u, e.v, 1)).collect();
    WeightedGraph::from_edges(g.num_vertices(), &edges).expect("same vertices")
}

/// Every red-blue instance with `r` reds, `b` blues and red capacities in
/// `1..=max_cap`, up to isomorphism. Reds are `0..r`; the budget is `r`.
pub fn all_crbds(r: usize, b: usize, max_cap: i64) -> impl Iterator<Item = CrbdsInstance> {
    let caps = weight_vectors(r, &(1..=max_cap).collect::<Vec<_>>());
    let perms = permutations(r);
    // A blue vertex is its neighbourhood mask; blues are interchangeable,
    // so only non-decreasing mask sequences are listed.
    let mut masks = Vec::new();
    let mut cur = Vec::with_capacity(b);
    mask_multisets(&mut cur, 0, b, 1 << r, &mut masks);
    masks.into_iter().flat_map(move |m| {
        let perms = perms.clone();
        caps.clone().into_iter().filter_map(move |c| {
            let canonical = perms.iter().all(|p| {
                let pc: Vec<i64> = (0..r).map(|i| c[p[i]]).collect();
                let mut pm: Vec<u32> = m
                    .iter()
                    .map(|&x| (0..r).filter(|&i| x >> p[i] & 1 == 1).map(|i| 1 << i).sum())
                    .collect();
                pm.sort_unstable();
                (&c, &m) <= (&pc, &pm)
            });
            canonical.then(|| crbds_from_masks(r, &m, c))
        })
    })
}

fn mask_multisets(cur: &mut Vec<u32>, min: u32, len: usize, limit: u32, out: &mut Vec<Vec<u32>>) {
    if cur.len() == len {
        out.push(cur.clone());
        return;
    }
    for x in min..limit {
        cur.push(x);
        mask_multisets(cur, x, len, limit, out);
        cur.pop();
    }
}

fn crbds_from_masks(r: usize, masks: &[u32], mut capacity: Vec<i64>) -> CrbdsInstance {
    let b = masks.len();
    let edges: Vec<_> = masks
        .iter()
        .enumerate()
        .flat_map(|(y, &m)| (0..r).filter(move |&x| m >> x & 1 == 1).map(move |x| (x, r + y, 1)))
        .collect();
    capacity.extend(std::iter::repeat_n(0, b));
    CrbdsInstance {
        graph: WeightedGraph::from_edges(r + b, &edges).expect("in range"),
        red: (0..r + b).map(|v| v < r).collect(),
        capacity,
        pins: vec![None; r + b],
        budget: r,
    }
}

/// Random red-blue instance; with `pins` some blues are pinned to an
/// adjacent red.
pub fn random_crbds<R: Rng>(rng: &mut R, r: usize, b: usize, max_cap: i64, pins: bool) -> CrbdsInstance {
    let n = r + b;
    let mut edges = Vec::new();
    for x in 0..r {
        for y in r..n {
            if rng.gen_bool(0.5) {
                edges.push((x, y, 1));
            }
        }
    }
    let graph = WeightedGraph::from_edges(n, &edges).expect("in range");
    let mut pin = vec![None; n];
    if pins {
        for &(x, y, _) in &edges {
            if pin[y].is_none() && rng.gen_bool(0.3) {
                pin[y] = Some(x);
            }
        }
    }
    CrbdsInstance {
        graph,
        red: (0..n).map(|v| v < r).collect(),
        capacity: (0..n).map(|v| if v < r { rng.gen_range(1..=max_cap) } else { 0 }).collect(),
        pins: pin,
        budget: rng.gen_range(0..=r),
    }
}

/// Random integer program with up to `max_vars` variables, bounds inside
/// `[-max_bound, max_bound]`, a few constraints and usually an objective.
pub fn random_ilp<R: Rng>(rng: &mut R, max_vars: usize, max_bound: i64) -> IlpModel<i64> {
    let mut m = IlpModel::new();
    let n = rng.gen_range(1..=max_vars);
    for i in 0..n {
        let a = rng.gen_range(-max_bound..=max_bound);
        let b = rng.gen_range(-max_bound..=max_bound);
        m.add_var(format!("x{i}"), a.min(b), a.max(b));
    }
    for _ in 0..rng.gen_range(0..=4) {
        let mut terms = Vec::new();
        for v in 0..n {
            let c = rng.gen_range(-4..=4);
            if c != 0 && rng.gen_bool(0.6) {
                terms.push((v, c));
            }
        }
        let rel = *[Relation::Le, Relation::Ge, Relation::Eq].choose(rng).expect("non-empty");
        let rhs = rng.gen_range(-10..=10);
        m.add_constraint(terms, rel, rhs).expect("valid variables");
    }
    if rng.gen_bool(0.7) {
        let terms = (0..n).map(|v| (v, rng.gen_range(-3..=3))).collect();
        m.set_objective(terms).expect("valid variables");
    }
    m
}

/// A weighted graph with a harmonic morphism of (a refinement of) its
/// multigraph to a tree.
#[derive(Clone, Debug)]
pub struct MorphismSample {
    pub graph: WeightedGraph,
    pub morphism: HarmonicMorphism,
    pub degree: i64,
    pub family: &'static str,
}

/// Fold of the cycle on `2k` vertices onto a path with `k + 1` nodes.
pub fn cycle_fold(k: usize) -> MorphismSample {
    let n = 2 * k;
    let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n, 1)).collect();
    let graph = WeightedGraph::from_edges(n, &edges).expect("in range");
    let node = |i: usize| i.min(n - i);
    let vmap: Vec<_> = (0..n).map(node).collect();
    let arcs: Vec<_> = (0..k).map(|i| (i, i + 1)).collect();
    let emap = (0..n).map(|i| node(i).min(node((i + 1) % n))).collect();
    let source = replay_refinement(&weighted_to_multigraph(&graph).graph, &[]).expect("empty trace");
    let morphism = HarmonicMorphism {
        source,
        tree: TargetTree { num_nodes: k + 1, arcs },
        vmap,
        emap,
        index: vec![1; n],
    };
    MorphismSample { graph, morphism, degree: 2, family: "cycle-fold" }
}

/// A random tree with uniform weight `w` mapped to itself; every parallel
/// copy has index 1, so the degree is `w`.
pub fn tree_identity<R: Rng>(rng: &mut R, n: usize, w: i64) -> MorphismSample {
    assert!(n >= 2);
    let edges: Vec<_> = (1..n).map(|v| (rng.gen_range(0..v), v, w)).collect();
    let graph = WeightedGraph::from_edges(n, &edges).expect("in range");
    let multi = weighted_to_multigraph(&graph);
    let source = replay_refinement(&multi.graph, &[]).expect("empty trace");
    let morphism = HarmonicMorphism {
        source,
        tree: TargetTree { num_nodes: n, arcs: edges.iter().map(|&(u, v, _)| (u, v)).collect() },
        vmap: (0..n).collect(),
        emap: multi.origin.clone(),
        index: vec![1; multi.graph.num_edges()],
    };
    MorphismSample { graph, morphism, degree: w, family: "tree-identity" }
}

/// Random harmonic morphism of degree `d`: every tree node gets a random
/// composition of `d` as the local degrees of its vertices, adjacent nodes
/// are joined by a random transport plan (entry `x` becomes an edge of
/// weight `c <= x` whose copies split `x` into indices), and then random
/// tree arcs are subdivided and random leaf nodes added through the
/// refinement trace.
pub fn random_morphism<R: Rng>(rng: &mut R, nodes: usize, d: i64) -> MorphismSample {
    assert!(nodes >= 2 && d >= 1);
    loop {
        if let Some(s) = try_random_morphism(rng, nodes, d) {
            return s;
        }
    }
}

fn try_random_morphism<R: Rng>(rng: &mut R, nodes: usize, d: i64) -> Option<MorphismSample> {
    let mut tree_arcs: Vec<(NodeId, NodeId)> = (1..nodes).map(|i| (rng.gen_range(0..i), i)).collect();
    // Local degrees per node.
    let mut layer: Vec<Vec<(VertexId, i64)>> = Vec::new();
    let mut vmap = Vec::new();
    for t in 0..nodes {
        let mut rest = d;
        let mut here = Vec::new();
        while rest > 0 {
            let part = rng.gen_range(1..=rest);
            here.push((vmap.len(), part));
            vmap.push(t);
            rest -= part;
        }
        layer.push(here);
    }
    let n = vmap.len();
    // Transport plans: (u, v, weight, indices of copies).
    let mut gedges: Vec<(VertexId, VertexId, Vec<i64>)> = Vec::new();
    for &(a, b) in &tree_arcs {
        let mut rows: Vec<(VertexId, i64)> = layer[a].clone();
        let mut cols: Vec<(VertexId, i64)> = layer[b].clone();
        let mut plan: BTreeMap<(VertexId, VertexId), i64> = BTreeMap::new();
        while let Some(i) = (0..rows.len()).filter(|&i| rows[i].1 > 0).collect::<Vec<_>>().choose(rng).copied() {
            let j = *(0..cols.len()).filter(|&j| cols[j].1 > 0).collect::<Vec<_>>().choose(rng)?;
            let x = rng.gen_range(1..=rows[i].1.min(cols[j].1));
            *plan.entry((rows[i].0, cols[j].0)).or_default() += x;
            rows[i].1 -= x;
            cols[j].1 -= x;
        }
        for ((u, v), x) in plan {
            let copies = rng.gen_range(1..=x.min(3));
            let mut parts = vec![1i64; copies as usize];
            for _ in 0..x - copies {
                let k = rng.gen_range(0..parts.len());
                parts[k] += 1;
            }
            gedges.push((u, v, parts));
        }
    }
    let list: Vec<_> = gedges.iter().map(|(u, v, p)| (*u, *v, p.len() as i64)).collect();
    let graph = WeightedGraph::from_edges(n, &list).ok()?;
    if !graph.is_connected() {
        return None;
    }
    let base = weighted_to_multigraph(&graph).graph;
    let mut index: Vec<i64> = gedges.iter().flat_map(|(_, _, p)| p.iter().copied()).collect();

    // Refinement: subdivide whole tree arcs, then hang leaf nodes.
    let mut ops = Vec::new();
    let mut h = base.clone();
    let mut num_nodes = nodes;
    let arc_count = tree_arcs.len();
    for a in 0..arc_count {
        if !rng.gen_bool(0.3) {
            continue;
        }
        let (x, y) = tree_arcs[a];
        let mid = num_nodes;
        num_nodes += 1;
        tree_arcs[a] = (x, mid);
        tree_arcs.push((mid, y));
        let crossing: Vec<_> = (0..h.num_edges())
            .filter(|&e| {
                let (p, q) = h.edge(e);
                (vmap[p], vmap[q]) == (x, y) || (vmap[p], vmap[q]) == (y, x)
            })
            .collect();
        for e in crossing {
            ops.push(RefineOp::Subdivide(e));
            let (p, q) = h.edge(e);
            let m = h.add_vertex();
            h.set_edge(e, p, m);
            h.add_edge(m, q).ok()?;
            vmap.push(mid);
            index.push(index[e]);
        }
    }
    if rng.gen_bool(0.4) {
        let t = rng.gen_range(0..num_nodes);
        let leaf = num_nodes;
        num_nodes += 1;
        tree_arcs.push((t, leaf));
        let here: Vec<VertexId> = (0..h.num_vertices()).filter(|&v| vmap[v] == t).collect();
        for v in here {
            let m_v = local_degree(&h, &vmap, &index, v);
            ops.push(RefineOp::Leaf(v));
            let x = h.add_vertex();
            h.add_edge(v, x).ok()?;
            vmap.push(leaf);
            index.push(m_v);
        }
    }
    let source = replay_refinement(&base, &ops).ok()?;
    debug_assert_eq!(source.graph, h);
    let arc_of: BTreeMap<(NodeId, NodeId), usize> =
        tree_arcs.iter().enumerate().flat_map(|(i, &(a, b))| [((a, b), i), ((b, a), i)]).collect();
    let emap = (0..h.num_edges())
        .map(|e| {
            let (p, q) = h.edge(e);
            arc_of.get(&(vmap[p], vmap[q])).copied()
        })
        .collect::<Option<Vec<_>>>()?;
    let morphism = HarmonicMorphism { source, tree: TargetTree { num_nodes, arcs: tree_arcs }, vmap, emap, index };
    Some(MorphismSample { graph, morphism, degree: d, family: "random-transport" })
}

/// Index sum of `v` towards the node of any one neighbour; harmonicity
/// makes the choice irrelevant.
fn local_degree(h: &crate::graph::Multigraph, vmap: &[NodeId], index: &[i64], v: VertexId) -> i64 {
    let mut by_node: BTreeMap<NodeId, i64> = BTreeMap::new();
    for e in 0..h.num_edges() {
        let (p, q) = h.edge(e);
        if p == v || q == v {
            let other = if p == v { q } else { p };
            *by_node.entry(vmap[other]).or_default() += index[e];
        }
    }
    by_node.values().next().copied().unwrap_or(1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::validate_harmonic_morphism;

    #[test]
    fn red_blue_counts_up_to_isomorphism() {
        assert_eq!(all_crbds(1, 1, 1).count(), 2);
        // Two unit reds, one blue: no edge, one edge, both edges.
        assert_eq!(all_crbds(2, 1, 1).count(), 3);
        // With capacities 1 and 2 the reds are distinguishable again.
        assert_eq!(all_crbds(2, 1, 2).count(), 3 + 4 + 3);
        assert_eq!(all_crbds(0, 3, 3).count(), 1);
    }

    #[test]
    fn small_graph_counts() {
        // Connected graphs up to isomorphism on 1..=4 vertices: 1, 1, 2, 6.
        let counts: Vec<_> = (1..=4).map(|n| connected_graphs(n, 6).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 6]);
        // On 5 vertices with at most 6 edges: 3 trees, 5 unicyclic, 5 more.
        assert_eq!(connected_graphs(5, 6).len(), 13);
    }

    #[test]
    fn partitions_are_valid() {
        let g = weighted(4, &[(0, 1), (1, 2), (2, 3), (3, 0)], &[1, 1, 1, 1]);
        let all = all_tree_partitions(&g, 3);
        assert!(all[0].bags.len() == 1);
        assert!(all.iter().all(|t| validate_tree_partition(&g, t).is_ok()));
        let mut r = rng(1);
        for _ in 0..50 {
            let t = random_tree_partition(&mut r, &g, 3);
            assert!(validate_tree_partition(&g, &t).is_ok());
        }
    }

    #[test]
    fn morphisms_are_harmonic() {
        assert_eq!(validate_harmonic_morphism(&cycle_fold(3).morphism), Ok(2));
        let mut r = rng(7);
        for _ in 0..200 {
            let (nodes, d) = (r.gen_range(2..=4), r.gen_range(1..=3));
            let s = random_morphism(&mut r, nodes, d);
            assert_eq!(validate_harmonic_morphism(&s.morphism), Ok(s.degree), "{s:?}");
            let (n, w) = (r.gen_range(2..=5), r.gen_range(1..=2));
            let t = tree_identity(&mut r, n, w);
            assert_eq!(validate_harmonic_morphism(&t.morphism), Ok(t.degree));
        }
    }
}
