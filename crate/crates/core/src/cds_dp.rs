//! Minimisation program for capacitated red-blue dominating set over a
//! tree partition of bounded width, and its front end for capacitated
//! dominating set.
//!
//! Every node carries three tables. `A` ranges over partial solutions of
//! the subtree keyed by (blues of the bag already served, residual
//! capacity of the bag's reds capped at the width). `B` additionally knows
//! which parent-bag blues the subtree serves. `C` has every blue of the bag
//! served, keyed by (parent-bag blues served from below, load put on each
//! parent-bag red). A node's `A` table is assembled from its children's
//! `C` tables by one integer program per reachable residual profile.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::graph::{max_flow, FlowNetwork, VertexId};
use crate::ilp::{IlpModel, IlpSolver, Relation};
use crate::problem::{CdsInstance, CrbdsInstance, DominationAnswer, DominationWitness};
use crate::reductions::{cds_to_crbds, gadgetize_subdivisions};
use crate::tree::{validate_tree_partition, NodeId, RootedTree, Subdivision, TreePartition};

#[derive(Clone, Copy, Debug)]
pub struct CdsConfig {
    /// Largest accepted bag size; `None` disables the check.
    pub max_width: Option<usize>,
    pub ilp: IlpSolver,
}

impl Default for CdsConfig {
    fn default() -> Self {
        Self { max_width: Some(10), ilp: IlpSolver::default() }
    }
}

/// A set of blues (bit mask over a fixed vertex list) with one integer per
/// red of the relevant bag: residual capacity in `A`, load in `C`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Characteristic {
    pub served: u64,
    pub reds: Vec<i64>,
}

#[derive(Clone, Debug)]
enum ABack {
    Local {
        chosen: Vec<VertexId>,
        /// In-bag servers of bag blues.
        assign: Vec<(VertexId, VertexId)>,
        /// Eps characteristic chosen for each child.
        children: Vec<(NodeId, Characteristic)>,
    },
}

#[derive(Clone, Debug)]
struct Entry<B> {
    size: usize,
    back: B,
}

/// Tables of one node. Masks of `a` are over `blues`; masks of `b` over
/// `blues` followed by `parent_blues`; masks of `c` over `parent_blues`.
#[derive(Clone, Debug, Default)]
pub struct NodeTables {
    pub reds: Vec<VertexId>,
    pub blues: Vec<VertexId>,
    pub parent_reds: Vec<VertexId>,
    pub parent_blues: Vec<VertexId>,
    a: BTreeMap<Characteristic, Entry<ABack>>,
    b: BTreeMap<u64, Entry<(Characteristic, Vec<(VertexId, VertexId)>)>>,
    c: BTreeMap<Characteristic, Entry<(u64, Vec<(VertexId, VertexId)>)>>,
}

impl NodeTables {
    pub fn a(&self) -> impl Iterator<Item = (&Characteristic, usize)> {
        self.a.iter().map(|(k, e)| (k, e.size))
    }

    pub fn b(&self) -> impl Iterator<Item = (u64, usize)> + '_ {
        self.b.iter().map(|(&k, e)| (k, e.size))
    }

    pub fn c(&self) -> impl Iterator<Item = (&Characteristic, usize)> {
        self.c.iter().map(|(k, e)| (k, e.size))
    }
}

/// Children of one node grouped by their normalised eps tables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChildSummary {
    pub minima: Vec<usize>,
    pub m_tot: usize,
    /// Normalised table and member children (indices into the input list).
    pub classes: Vec<(BTreeMap<Characteristic, usize>, Vec<usize>)>,
}

/// Subtracts each child's minimum and groups equal normalised tables.
/// Returns `None` when some child table is empty.
pub fn summarize_children(tables: &[BTreeMap<Characteristic, usize>]) -> Option<ChildSummary> {
    let mut minima = Vec::with_capacity(tables.len());
    let mut classes: Vec<(BTreeMap<Characteristic, usize>, Vec<usize>)> = Vec::new();
    for (idx, t) in tables.iter().enumerate() {
        let m = *t.values().min()?;
        minima.push(m);
        let norm: BTreeMap<_, _> = t.iter().map(|(k, &v)| (k.clone(), v - m)).collect();
        match classes.iter_mut().find(|(c, _)| *c == norm) {
            Some((_, members)) => members.push(idx),
            None => classes.push((norm, vec![idx])),
        }
    }
    Some(ChildSummary { m_tot: minima.iter().sum(), minima, classes })
}

/// Whether a capacity-respecting assignment exists at all, ignoring the
/// budget. A red whose pinned blues exceed its capacity can never be
/// chosen; every other red is taken and serves its pinned blues.
pub fn feasibility_precheck(inst: &CrbdsInstance) -> Result<bool> {
    inst.validate()?;
    let n = inst.graph.num_vertices();
    let mut pinned = vec![0i64; n];
    for p in inst.pins.iter().flatten() {
        pinned[*p] += 1;
    }
    let usable: Vec<bool> = (0..n).map(|v| inst.red[v] && pinned[v] <= inst.capacity[v]).collect();
    let (s, t) = (n, n + 1);
    let mut net = FlowNetwork::new(n + 2, s, t)?;
    let mut free = 0;
    for b in 0..n {
        if inst.red[b] || inst.pins[b].is_some_and(|p| usable[p]) {
            continue;
        }
        free += 1;
        net.add_arc(s, b, 1)?;
    }
    for e in inst.graph.edges() {
        let (r, b) = if inst.red[e.u] { (e.u, e.v) } else { (e.v, e.u) };
        if usable[r] && !inst.pins[b].is_some_and(|p| usable[p]) {
            net.add_arc(b, r, 1)?;
        }
    }
    for r in 0..n {
        if usable[r] && inst.capacity[r] - pinned[r] > 0 {
            net.add_arc(r, t, inst.capacity[r] - pinned[r])?;
        }
    }
    let f = max_flow(&net)?;
    Ok(f.excess_out(&net, s) == free)
}

/// Everything the program needs about the instance, indexed by vertex.
struct Ctx<'a> {
    inst: &'a CrbdsInstance,
    adj: Vec<Vec<bool>>,
    k: i64,
    check_spreads: bool,
    ilp: IlpSolver,
}

impl Ctx<'_> {
    fn adjacent(&self, a: VertexId, b: VertexId) -> bool {
        self.adj[a][b]
    }
}

/// Fate of one bag blue while enumerating local choices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Fate {
    Open,
    Served(usize),
    Below,
}

/// Enumerates fates of `blues` given chosen reds (`cap` is their remaining
/// capacity, zero for unchosen ones).
fn enumerate_fates(
    ctx: &Ctx,
    reds: &[VertexId],
    chosen: u64,
    blues: &[VertexId],
    allow_below: &[bool],
    out: &mut Vec<(Vec<Fate>, Vec<i64>)>,
) {
    fn go(
        ctx: &Ctx,
        reds: &[VertexId],
        chosen: u64,
        blues: &[VertexId],
        allow_below: &[bool],
        i: usize,
        fates: &mut Vec<Fate>,
        cap: &mut Vec<i64>,
        out: &mut Vec<(Vec<Fate>, Vec<i64>)>,
    ) {
        if i == blues.len() {
            out.push((fates.clone(), cap.clone()));
            return;
        }
        let b = blues[i];
        let forced = ctx.inst.pins[b]
            .and_then(|p| reds.iter().position(|&r| r == p))
            .filter(|&ri| chosen >> ri & 1 == 1);
        if forced.is_none() {
            fates.push(Fate::Open);
            go(ctx, reds, chosen, blues, allow_below, i + 1, fates, cap, out);
            fates.pop();
            if allow_below[i] {
                fates.push(Fate::Below);
                go(ctx, reds, chosen, blues, allow_below, i + 1, fates, cap, out);
                fates.pop();
            }
        }
        for (ri, &r) in reds.iter().enumerate() {
            if forced.is_some_and(|f| f != ri) {
                continue;
            }
            if chosen >> ri & 1 == 1 && cap[ri] > 0 && ctx.adjacent(b, r) {
                cap[ri] -= 1;
                fates.push(Fate::Served(ri));
                go(ctx, reds, chosen, blues, allow_below, i + 1, fates, cap, out);
                fates.pop();
                cap[ri] += 1;
            }
        }
    }
    let cap: Vec<i64> = reds
        .iter()
        .enumerate()
        .map(|(ri, &r)| if chosen >> ri & 1 == 1 { ctx.inst.capacity[r] } else { 0 })
        .collect();
    go(ctx, reds, chosen, blues, allow_below, 0, &mut Vec::new(), &mut cap.clone(), out);
}

/// Outcome of the child-selection program for one residual profile.
#[derive(Clone, Debug)]
struct Selection {
    cost: usize,
    /// Per child (index into the node's child list), its eps characteristic.
    picks: Vec<Characteristic>,
}

/// Residual profiles reachable by choosing one eps per child, serving
/// exactly `below` and never exceeding `cap`.
fn reachable_profiles(
    children: &[&BTreeMap<Characteristic, Entry<(u64, Vec<(VertexId, VertexId)>)>>],
    below: u64,
    cap: &[i64],
) -> BTreeSet<Vec<i64>> {
    let mut states: BTreeSet<(u64, Vec<i64>)> = BTreeSet::from([(0, vec![0; cap.len()])]);
    for table in children {
        let mut next = BTreeSet::new();
        for (covered, used) in &states {
            for key in table.keys() {
                if key.served & !below != 0 || key.served & covered != 0 {
                    continue;
                }
                let u: Vec<i64> = used.iter().zip(&key.reds).map(|(a, b)| a + b).collect();
                if u.iter().zip(cap).all(|(x, c)| x <= c) {
                    next.insert((covered | key.served, u));
                }
            }
        }
        states = next;
        if states.is_empty() {
            break;
        }
    }
    states.into_iter().filter(|(c, _)| *c == below).map(|(_, u)| u).collect()
}

/// The integer program choosing how many children of each class take each
/// eps characteristic, for a fixed target residual profile `h`.
fn select_children(
    ctx: &Ctx,
    summary: &ChildSummary,
    nblues: usize,
    below: u64,
    cap: &[i64],
    h: &[i64],
) -> Result<Option<Selection>> {
    let mut model = IlpModel::<i64>::new();
    let mut vars: Vec<Vec<(usize, &Characteristic, i64)>> = Vec::new();
    for (ci, (table, members)) in summary.classes.iter().enumerate() {
        let n = members.len() as i64;
        let mut list = Vec::new();
        for (key, &cost) in table {
            if key.served & !below != 0 || key.reds.iter().zip(cap).any(|(g, c)| g > c) {
                continue;
            }
            let id = model.add_var(format!("x_{ci}_{}", list.len()), 0, n);
            list.push((id, key, cost as i64));
        }
        if list.is_empty() {
            return Ok(None);
        }
        model.add_constraint(list.iter().map(|&(id, _, _)| (id, 1)).collect(), Relation::Eq, n)?;
        vars.push(list);
    }
    for p in 0..nblues {
        let terms: Vec<_> = vars
            .iter()
            .flatten()
            .filter(|(_, key, _)| key.served >> p & 1 == 1)
            .map(|&(id, _, _)| (id, 1))
            .collect();
        let want = (below >> p & 1) as i64;
        if terms.is_empty() {
            if want == 1 {
                return Ok(None);
            }
            continue;
        }
        model.add_constraint(terms, Relation::Eq, want)?;
    }
    for (ri, (&c, &hv)) in cap.iter().zip(h).enumerate() {
        let terms: Vec<_> = vars
            .iter()
            .flatten()
            .filter(|(_, key, _)| key.reds[ri] != 0)
            .map(|&(id, key, _)| (id, key.reds[ri]))
            .collect();
        let (rel, rhs) = if hv < ctx.k { (Relation::Eq, c - hv) } else { (Relation::Le, c - ctx.k) };
        if terms.is_empty() {
            let ok = match rel {
                Relation::Eq => rhs == 0,
                _ => rhs >= 0,
            };
            if !ok {
                return Ok(None);
            }
            continue;
        }
        model.add_constraint(terms, rel, rhs)?;
    }
    let objective: Vec<_> = vars.iter().flatten().filter(|v| v.2 != 0).map(|&(id, _, c)| (id, c)).collect();
    model.set_objective(objective)?;
    let outcome = ctx.ilp.solve(&model)?;
    let Some(x) = outcome.assignment() else {
        return Ok(None);
    };
    let cost: i64 = vars.iter().flatten().map(|&(id, _, c)| c * x[id]).sum();
    let mut picks = vec![None; summary.minima.len()];
    for ((_, members), list) in summary.classes.iter().zip(&vars) {
        let mut it = members.iter();
        for &(id, key, _) in list {
            for _ in 0..x[id] {
                let child = *it.next().expect("class sizes match");
                picks[child] = Some(key.clone());
            }
        }
    }
    Ok(Some(Selection {
        cost: cost as usize,
        picks: picks.into_iter().map(|p| p.expect("every child picked")).collect(),
    }))
}

/// Computes the `A` table of `node` from the `C` tables of its children.
fn node_a_table(
    ctx: &Ctx,
    children: &[NodeId],
    tables: &[NodeTables],
    out: &mut NodeTables,
) -> Result<()> {
    let reds = out.reds.clone();
    let blues = out.blues.clone();
    let child_c: Vec<_> = children.iter().map(|&c| &tables[c].c).collect();
    let plain: Vec<BTreeMap<Characteristic, usize>> =
        child_c.iter().map(|t| t.iter().map(|(k, e)| (k.clone(), e.size)).collect()).collect();
    let Some(summary) = summarize_children(&plain) else {
        return Ok(());
    };
    let allow_below: Vec<bool> =
        (0..blues.len()).map(|p| child_c.iter().any(|t| t.keys().any(|k| k.served >> p & 1 == 1))).collect();
    let mut memo: HashMap<(u64, Vec<i64>), Vec<(Vec<i64>, Option<Selection>)>> = HashMap::new();
    for chosen in 0u64..(1 << reds.len()) {
        let mut fates = Vec::new();
        enumerate_fates(ctx, &reds, chosen, &blues, &allow_below, &mut fates);
        for (fate, cap) in fates {
            let mut below = 0u64;
            let mut served = 0u64;
            for (p, f) in fate.iter().enumerate() {
                match f {
                    Fate::Open => {}
                    Fate::Served(_) => served |= 1 << p,
                    Fate::Below => {
                        below |= 1 << p;
                        served |= 1 << p;
                    }
                }
            }
            let key = (below, cap.clone());
            if !memo.contains_key(&key) {
                let mut results = Vec::new();
                if children.is_empty() {
                    if below == 0 {
                        let h: Vec<i64> = cap.iter().map(|&c| c.min(ctx.k)).collect();
                        results.push((h, Some(Selection { cost: 0, picks: Vec::new() })));
                    }
                } else {
                    let mut profiles: BTreeSet<Vec<i64>> = BTreeSet::new();
                    for used in reachable_profiles(&child_c, below, &cap) {
                        profiles.insert(cap.iter().zip(&used).map(|(c, u)| (c - u).min(ctx.k)).collect());
                    }
                    for h in profiles {
                        let sel = select_children(ctx, &summary, blues.len(), below, &cap, &h)?;
                        results.push((h, sel));
                    }
                }
                memo.insert(key.clone(), results);
            }
            let q = chosen.count_ones() as usize;
            for (h, sel) in &memo[&key] {
                let Some(sel) = sel else { continue };
                let size = q + summary.m_tot + sel.cost;
                let ch = Characteristic { served, reds: h.clone() };
                if out.a.get(&ch).is_none_or(|e| size < e.size) {
                    let chosen_list = (0..reds.len()).filter(|&ri| chosen >> ri & 1 == 1).map(|ri| reds[ri]).collect();
                    let assign = fate
                        .iter()
                        .enumerate()
                        .filter_map(|(p, f)| match f {
                            Fate::Served(ri) => Some((blues[p], reds[*ri])),
                            _ => None,
                        })
                        .collect();
                    let picks = children.iter().copied().zip(sel.picks.iter().cloned()).collect();
                    out.a.insert(
                        ch,
                        Entry { size, back: ABack::Local { chosen: chosen_list, assign, children: picks } },
                    );
                }
            }
        }
    }
    Ok(())
}

/// All ways to send each of `from` either nowhere (when `optional`) or to
/// an adjacent red of `to` with spare capacity. Yields the chosen senders
/// mask and pairs.
fn map_blues(
    ctx: &Ctx,
    from: &[VertexId],
    to: &[VertexId],
    cap: &[i64],
    optional: bool,
    visit: &mut dyn FnMut(u64, &[(VertexId, VertexId)], &[i64]),
) {
    fn go(
        ctx: &Ctx,
        from: &[VertexId],
        to: &[VertexId],
        cap: &mut Vec<i64>,
        load: &mut Vec<i64>,
        optional: bool,
        i: usize,
        mask: u64,
        pairs: &mut Vec<(VertexId, VertexId)>,
        visit: &mut dyn FnMut(u64, &[(VertexId, VertexId)], &[i64]),
    ) {
        if i == from.len() {
            visit(mask, pairs, load);
            return;
        }
        let b = from[i];
        if optional {
            go(ctx, from, to, cap, load, optional, i + 1, mask, pairs, visit);
        }
        for (ri, &r) in to.iter().enumerate() {
            if cap[ri] > 0 && ctx.adjacent(b, r) {
                cap[ri] -= 1;
                load[ri] += 1;
                pairs.push((b, r));
                go(ctx, from, to, cap, load, optional, i + 1, mask | 1 << i, pairs, visit);
                pairs.pop();
                load[ri] -= 1;
                cap[ri] += 1;
            }
        }
    }
    let mut cap = cap.to_vec();
    let mut load = vec![0; to.len()];
    go(ctx, from, to, &mut cap, &mut load, optional, 0, 0, &mut Vec::new(), visit);
}

fn a_to_b(ctx: &Ctx, t: &mut NodeTables) {
    let nb = t.blues.len();
    let mut b: BTreeMap<u64, Entry<(Characteristic, Vec<(VertexId, VertexId)>)>> = BTreeMap::new();
    for (key, entry) in &t.a {
        map_blues(ctx, &t.parent_blues, &t.reds, &key.reds, true, &mut |mask, pairs, _| {
            let d = key.served | mask << nb;
            if b.get(&d).is_none_or(|e| entry.size < e.size) {
                b.insert(d, Entry { size: entry.size, back: (key.clone(), pairs.to_vec()) });
            }
        });
    }
    t.b = b;
}

fn b_to_c(ctx: &Ctx, t: &mut NodeTables) {
    let nb = t.blues.len();
    let all = (1u64 << nb) - 1;
    let unbounded = vec![i64::MAX; t.parent_reds.len()];
    let mut c: BTreeMap<Characteristic, Entry<(u64, Vec<(VertexId, VertexId)>)>> = BTreeMap::new();
    // The mappings only depend on which bag blues are still open.
    let mut options: HashMap<u64, Vec<(Vec<i64>, Vec<(VertexId, VertexId)>)>> = HashMap::new();
    for (&d, entry) in &t.b {
        let inner = d & all;
        let outer = d >> nb;
        let list = options.entry(inner).or_insert_with(|| {
            let open: Vec<VertexId> = (0..nb).filter(|&p| inner >> p & 1 == 0).map(|p| t.blues[p]).collect();
            let mut seen: BTreeMap<Vec<i64>, Vec<(VertexId, VertexId)>> = BTreeMap::new();
            map_blues(ctx, &open, &t.parent_reds, &unbounded, false, &mut |_, pairs, load| {
                seen.entry(load.to_vec()).or_insert_with(|| pairs.to_vec());
            });
            seen.into_iter().collect()
        });
        for (g, pairs) in list.iter() {
            let key = Characteristic { served: outer, reds: g.clone() };
            if c.get(&key).is_none_or(|e| entry.size < e.size) {
                c.insert(key, Entry { size: entry.size, back: (d, pairs.clone()) });
            }
        }
    }
    t.c = c;
}

fn check_spreads(ctx: &Ctx, node: NodeId, t: &NodeTables) {
    if !ctx.check_spreads {
        return;
    }
    let alpha = t.b.get(&0).map(|e| e.size);
    let alpha = alpha.unwrap_or_else(|| panic!("node {node}: no peps serves nothing although a solution exists"));
    for (&d, e) in &t.b {
        let size = d.count_ones() as usize;
        assert!(
            alpha <= e.size && e.size <= alpha + size,
            "node {node}: peps size {} outside [{alpha}, {}]",
            e.size,
            alpha + size
        );
    }
    if let (Some(lo), Some(hi)) = (t.c.values().map(|e| e.size).min(), t.c.values().map(|e| e.size).max()) {
        assert!(hi - lo <= 2 * ctx.k as usize, "node {node}: eps sizes spread {lo}..{hi} beyond 2k");
    }
}

/// Full result of the program, with tables kept for inspection.
#[derive(Clone, Debug)]
pub struct CrbdsRun {
    pub width: usize,
    pub tables: Vec<NodeTables>,
    pub answer: DominationAnswer,
}

pub fn solve_crbds(inst: &CrbdsInstance, t: &TreePartition, cfg: &CdsConfig) -> Result<DominationAnswer> {
    Ok(run_crbds(inst, t, cfg)?.answer)
}

pub fn run_crbds(inst: &CrbdsInstance, t: &TreePartition, cfg: &CdsConfig) -> Result<CrbdsRun> {
    inst.validate()?;
    let g = &inst.graph;
    let n = g.num_vertices();
    validate_tree_partition(g, t).map_err(|v| {
        let list: Vec<String> = v.iter().map(ToString::to_string).collect();
        Error::invalid(format!("invalid tree partition: {}", list.join("; ")))
    })?;
    let width = t.width();
    if let Some(cap) = cfg.max_width {
        if width > cap {
            return Err(Error::resource(format!("width {width} exceeds the limit {cap}")));
        }
    }
    let owner = t.bag_of(n);
    for (b, pin) in inst.pins.iter().enumerate() {
        if let Some(r) = *pin {
            if owner[b] != owner[r] {
                return Err(Error::invalid(format!("pinned pair {b}->{r} lies in different bags")));
            }
        }
    }
    for bag in &t.bags {
        let blues = bag.iter().filter(|&&v| !inst.red[v]).count();
        if blues > 31 || bag.len() - blues > 31 {
            return Err(Error::resource("bag too large for the table encoding"));
        }
    }
    let empty = CrbdsRun { width, tables: Vec::new(), answer: DominationAnswer::Infeasible };
    if !feasibility_precheck(inst)? {
        return Ok(empty);
    }
    let mut adj = vec![vec![false; n]; n];
    for e in g.edges() {
        adj[e.u][e.v] = true;
        adj[e.v][e.u] = true;
    }
    let ctx = Ctx {
        inst,
        adj,
        k: width as i64,
        check_spreads: inst.pins.iter().all(Option::is_none),
        ilp: cfg.ilp,
    };
    let rooted: RootedTree = t.rooted();
    let split = |bag: &[VertexId]| -> (Vec<VertexId>, Vec<VertexId>) {
        let mut bag = bag.to_vec();
        bag.sort_unstable();
        bag.into_iter().partition(|&v| inst.red[v])
    };
    let mut tables: Vec<NodeTables> = vec![NodeTables::default(); t.num_nodes()];
    for node in rooted.postorder() {
        let (reds, blues) = split(&t.bags[node]);
        let (parent_reds, parent_blues) = match rooted.parent[node] {
            Some(p) => split(&t.bags[p]),
            None => (Vec::new(), Vec::new()),
        };
        let mut nt = NodeTables { reds, blues, parent_reds, parent_blues, ..NodeTables::default() };
        node_a_table(&ctx, &rooted.children[node], &tables, &mut nt)?;
        if rooted.parent[node].is_some() {
            a_to_b(&ctx, &mut nt);
            b_to_c(&ctx, &mut nt);
            check_spreads(&ctx, node, &nt);
            if nt.c.is_empty() {
                return Ok(empty);
            }
        }
        tables[node] = nt;
    }

    let root = rooted.root;
    let all = (1u64 << tables[root].blues.len()) - 1;
    let best = tables[root]
        .a
        .iter()
        .filter(|(k, _)| k.served == all)
        .min_by_key(|(_, e)| e.size)
        .map(|(k, e)| (k.clone(), e.size));
    let Some((key, size)) = best else {
        return Ok(CrbdsRun { width, tables, answer: DominationAnswer::Infeasible });
    };
    if size > inst.budget {
        return Ok(CrbdsRun { width, tables, answer: DominationAnswer::OverBudget { min_size: size } });
    }
    let witness = rebuild(inst, &tables, root, &key);
    let checked = inst.check_witness(&witness)?;
    if checked != size {
        return Err(Error::invalid(format!("internal error: witness has size {checked}, expected {size}")));
    }
    Ok(CrbdsRun { width, tables, answer: DominationAnswer::Within { min_size: size, witness } })
}

/// Replays the recorded choices top-down.
fn rebuild(inst: &CrbdsInstance, tables: &[NodeTables], root: NodeId, key: &Characteristic) -> DominationWitness {
    let n = inst.graph.num_vertices();
    let mut dominators = Vec::new();
    let mut assignment = vec![None; n];
    let mut stack = vec![(root, key.clone())];
    while let Some((node, key)) = stack.pop() {
        let ABack::Local { chosen, assign, children } = &tables[node].a[&key].back;
        dominators.extend(chosen.iter().copied());
        for &(b, r) in assign {
            assignment[b] = Some(r);
        }
        for (child, ckey) in children {
            let ct = &tables[*child];
            let (d, pairs) = &ct.c[ckey].back;
            for &(b, r) in pairs {
                assignment[b] = Some(r);
            }
            let (akey, pairs) = &ct.b[d].back;
            for &(b, r) in pairs {
                assignment[b] = Some(r);
            }
            stack.push((*child, akey.clone()));
        }
    }
    dominators.sort_unstable();
    DominationWitness { dominators, assignment }
}

/// Partition given on a subdivision of the instance graph: subdivision
/// vertices are replaced by gadgets first.
pub fn solve_crbds_subdivided(
    inst: &CrbdsInstance,
    sub: &Subdivision,
    t: &TreePartition,
    cfg: &CdsConfig,
) -> Result<DominationAnswer> {
    let gz = gadgetize_subdivisions(inst, sub, t)?;
    let n = inst.graph.num_vertices();
    let extra = gz.extra_dominators;
    Ok(match solve_crbds(&gz.instance, &gz.partition, cfg)? {
        DominationAnswer::Infeasible => DominationAnswer::Infeasible,
        DominationAnswer::OverBudget { min_size } => DominationAnswer::OverBudget { min_size: min_size - extra },
        DominationAnswer::Within { min_size, witness } => {
            let w = gz.witness_back(n, &witness);
            DominationAnswer::Within { min_size: min_size - extra, witness: w }
        }
    })
}

/// Capacitated dominating set through the red-blue doubling; the partition
/// is over the instance graph.
pub fn solve_cds(inst: &CdsInstance, t: &TreePartition, cfg: &CdsConfig) -> Result<DominationAnswer> {
    let red = cds_to_crbds(inst, Some(t))?;
    let part = red.partition.as_ref().expect("partition is transported");
    Ok(match solve_crbds(&red.instance, part, cfg)? {
        DominationAnswer::Within { min_size, witness } => {
            DominationAnswer::Within { min_size, witness: red.witness_back(&witness) }
        }
        other => other,
    })
}
