//! Generators for the hard instance families: checking counter machines
//! encoded as all-or-nothing flow networks, and bin packing encoded as
//! target outdegree orientation and as all-or-nothing flow.

use crate::error::{Error, Result};
use crate::graph::{ArcId, Flow, FlowNetwork, VertexId, WeightedGraph};
use crate::problem::{AonfInstance, TooInstance};

/// One check `(i, a, j, b)`: reject when counter `i` equals `a` and
/// counter `j` equals `b`. Counters are numbered from 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Test {
    pub i: usize,
    pub a: u32,
    pub j: usize,
    pub b: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NnccmMachine {
    pub counters: usize,
    pub bound: u32,
    pub tests: Vec<Test>,
}

impl NnccmMachine {
    pub fn new(counters: usize, bound: u32, tests: Vec<Test>) -> Result<Self> {
        let m = Self { counters, bound, tests };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if self.counters == 0 {
            return Err(Error::invalid("a machine needs at least one counter"));
        }
        for (t, x) in self.tests.iter().enumerate() {
            let ok = (1..=self.counters).contains(&x.i)
                && (1..=self.counters).contains(&x.j)
                && x.a <= self.bound
                && x.b <= self.bound;
            if !ok {
                return Err(Error::invalid(format!("test {} = {:?} out of range", t + 1, x)));
            }
        }
        Ok(())
    }

    /// Whether the values `values` (indexed from 0) make test `t` reject.
    fn fires(&self, t: usize, values: &[u32]) -> bool {
        let x = self.tests[t];
        values[x.i - 1] == x.a && values[x.j - 1] == x.b
    }
}

/// Counter values in force during each test, in test order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NnccmRun {
    pub values: Vec<Vec<u32>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RunOutcome {
    Accept,
    /// Test number, counted from 1.
    Reject(usize),
}

pub fn simulate_nnccm(m: &NnccmMachine, run: &NnccmRun) -> Result<RunOutcome> {
    m.validate()?;
    if run.values.len() != m.tests.len() {
        return Err(Error::invalid(format!(
            "run has {} steps for {} tests",
            run.values.len(),
            m.tests.len()
        )));
    }
    let mut prev = vec![0u32; m.counters];
    for (t, v) in run.values.iter().enumerate() {
        if v.len() != m.counters {
            return Err(Error::invalid(format!("step {} has {} counters", t + 1, v.len())));
        }
        if v.iter().zip(&prev).any(|(x, p)| x < p || *x > m.bound) {
            return Err(Error::invalid(format!("step {} decreases a counter or exceeds the bound", t + 1)));
        }
        prev.clone_from(v);
    }
    for t in 0..m.tests.len() {
        if m.fires(t, &run.values[t]) {
            return Ok(RunOutcome::Reject(t + 1));
        }
    }
    Ok(RunOutcome::Accept)
}

/// Smallest accepting run in breadth-first order of counter vectors, if
/// any exists. `cap` limits the number of counter vectors per step.
pub fn oracle_nnccm(m: &NnccmMachine, cap: u64) -> Result<Option<NnccmRun>> {
    m.validate()?;
    let per_step = (m.bound as u64 + 1).checked_pow(m.counters as u32).unwrap_or(u64::MAX);
    if per_step.saturating_mul(m.tests.len().max(1) as u64) > cap {
        return Err(Error::resource(format!("{per_step} counter vectors per step exceed the cap {cap}")));
    }
    let all: Vec<Vec<u32>> = {
        let mut out = vec![Vec::new()];
        for _ in 0..m.counters {
            out = out
                .into_iter()
                .flat_map(|p| (0..=m.bound).map(move |x| [p.clone(), vec![x]].concat()))
                .collect();
        }
        out
    };
    let index = |v: &[u32]| v.iter().fold(0usize, |acc, &x| acc * (m.bound as usize + 1) + x as usize);
    // reach[t][i]: predecessor index of vector i at step t, if reachable.
    let mut reach: Vec<Vec<Option<usize>>> = Vec::with_capacity(m.tests.len());
    let start = index(&vec![0; m.counters]);
    let mut current: Vec<bool> = (0..all.len()).map(|i| i == start).collect();
    for t in 0..m.tests.len() {
        let mut next = vec![None; all.len()];
        for (i, v) in all.iter().enumerate() {
            if m.fires(t, v) {
                continue;
            }
            // Any reachable vector below v can be raised to v.
            if let Some(p) = (0..all.len()).find(|&p| current[p] && all[p].iter().zip(v).all(|(a, b)| a <= b)) {
                next[i] = Some(p);
            }
        }
        current = next.iter().map(Option::is_some).collect();
        reach.push(next);
        if !current.iter().any(|&x| x) {
            return Ok(None);
        }
    }
    if m.tests.is_empty() {
        return Ok(Some(NnccmRun { values: Vec::new() }));
    }
    let mut i = current.iter().position(|&x| x).expect("some vector reachable");
    let mut values = vec![Vec::new(); m.tests.len()];
    for t in (0..m.tests.len()).rev() {
        values[t] = all[i].clone();
        i = reach[t][i].expect("reachable vectors have predecessors");
    }
    Ok(Some(NnccmRun { values }))
}

/// Where each arc of the machine network came from, before parallel arcs
/// were split by a midpoint.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArcRole {
    SourceToV { counter: usize },
    WToSink { counter: usize },
    /// The `copy`-th capacity-2 arc from the source into `w_{counter,time}`.
    Refill { counter: usize, time: usize, copy: usize },
    /// `v_{counter,time} -> w_{counter,time}` for value `alpha`.
    Hold { counter: usize, time: usize, alpha: u32 },
    /// `w_{counter,time} -> v_{counter,time+1}` for value `alpha`.
    Advance { counter: usize, time: usize, alpha: u32 },
    /// Check gadget of test `test` (from 1): `w -> x1` for half `half`.
    CheckIn { test: usize, half: usize },
    CheckMid { test: usize },
    /// `x2 -> v` for half `half`.
    CheckOut { test: usize, half: usize },
}

/// Output of [`nnccm_to_aonf`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NnccmNetwork {
    pub instance: AonfInstance,
    pub big_l: i64,
    /// Role of each logical arc, and the arcs of the final network
    /// carrying it (one arc, or two when split by a midpoint).
    pub roles: Vec<(ArcRole, Vec<ArcId>)>,
    pub path_decomposition: Vec<Vec<VertexId>>,
}

impl NnccmNetwork {
    pub fn value(&self) -> i64 {
        self.instance.value
    }
}

struct Ids {
    k: usize,
    n: usize,
}

impl Ids {
    const S: VertexId = 0;
    const T: VertexId = 1;

    fn v(&self, j: usize, t: usize) -> VertexId {
        2 + j * (self.n + 1) + t
    }

    fn w(&self, j: usize, t: usize) -> VertexId {
        2 + self.k * (self.n + 1) + j * (self.n + 1) + t
    }

    /// Check gadget vertex `h` (0 or 1) of test `i` (from 1).
    fn x(&self, i: usize, h: usize) -> VertexId {
        2 + 2 * self.k * (self.n + 1) + 2 * (i - 1) + h
    }

    fn count(&self) -> usize {
        2 + 2 * self.k * (self.n + 1) + 2 * self.n
    }
}

/// Network whose all-or-nothing flows of value `k (L + 2B)` encode the
/// accepting runs of `m`. Counters are 0-based in vertex names.
pub fn nnccm_to_aonf(m: &NnccmMachine) -> Result<NnccmNetwork> {
    m.validate()?;
    let (k, n, b) = (m.counters, m.tests.len(), m.bound);
    let big_l = 4 * k as i64 * n.max(1) as i64 * b.max(1) as i64;
    let value = k as i64 * (big_l + 2 * b as i64);
    let ids = Ids { k, n };

    // Logical arcs, possibly parallel.
    let mut logical: Vec<(ArcRole, VertexId, VertexId, i64)> = Vec::new();
    for j in 0..k {
        logical.push((ArcRole::SourceToV { counter: j }, Ids::S, ids.v(j, 0), big_l));
    }
    for j in 0..k {
        logical.push((ArcRole::WToSink { counter: j }, ids.w(j, n), Ids::T, big_l + 2 * b as i64));
    }
    for j in 0..k {
        for t in 0..=n {
            for copy in 0..b as usize {
                logical.push((ArcRole::Refill { counter: j, time: t, copy }, Ids::S, ids.w(j, t), 2));
            }
        }
    }
    for j in 0..k {
        for t in 0..=n {
            for alpha in 0..=b {
                logical.push((ArcRole::Hold { counter: j, time: t, alpha }, ids.v(j, t), ids.w(j, t), big_l + 2 * alpha as i64));
            }
        }
    }
    for j in 0..k {
        for t in 0..n {
            let test = m.tests[t];
            for alpha in 0..=b {
                let firing = [(test.i, test.a), (test.j, test.b)]
                    .iter()
                    .filter(|&&(c, a)| c - 1 == j && a == alpha)
                    .count() as i64;
                let cap = big_l + 2 * alpha as i64 - firing;
                logical.push((ArcRole::Advance { counter: j, time: t, alpha }, ids.w(j, t), ids.v(j, t + 1), cap));
            }
        }
    }
    for (t, test) in m.tests.iter().enumerate() {
        let i = t + 1;
        for (half, c) in [test.i, test.j].into_iter().enumerate() {
            logical.push((ArcRole::CheckIn { test: i, half }, ids.w(c - 1, t), ids.x(i, 0), 1));
        }
        logical.push((ArcRole::CheckMid { test: i }, ids.x(i, 0), ids.x(i, 1), 1));
        for (half, c) in [test.i, test.j].into_iter().enumerate() {
            logical.push((ArcRole::CheckOut { test: i, half }, ids.x(i, 1), ids.v(c - 1, i), 1));
        }
    }

    // Base path decomposition.
    let mut bags: Vec<Vec<VertexId>> = Vec::new();
    if n == 0 {
        let mut bag = vec![Ids::S, Ids::T];
        for j in 0..k {
            bag.push(ids.v(j, 0));
            bag.push(ids.w(j, 0));
        }
        bags.push(bag);
    }
    for i in 0..n {
        let mut bag = vec![Ids::S, Ids::T];
        for j in 0..k {
            bag.extend([ids.v(j, i), ids.v(j, i + 1), ids.w(j, i), ids.w(j, i + 1)]);
        }
        bag.extend([ids.x(i + 1, 0), ids.x(i + 1, 1)]);
        bag.sort_unstable();
        bags.push(bag);
    }

    let mut multiplicity = std::collections::HashMap::new();
    for &(_, u, v, _) in &logical {
        *multiplicity.entry((u, v)).or_insert(0usize) += 1;
    }
    let mut net = FlowNetwork::new(ids.count(), Ids::S, Ids::T)?;
    let mut roles = Vec::with_capacity(logical.len());
    // Midpoints are placed in extra bags right after the first bag holding
    // both endpoints.
    let mut extra: Vec<Vec<VertexId>> = vec![Vec::new(); bags.len()];
    for &(role, u, v, cap) in &logical {
        if multiplicity[&(u, v)] > 1 {
            let mid = net.add_node();
            let a = net.add_arc(u, mid, cap)?;
            let c = net.add_arc(mid, v, cap)?;
            let host = bags
                .iter()
                .position(|bag| bag.contains(&u) && bag.contains(&v))
                .expect("every arc lies in a bag");
            extra[host].push(mid);
            roles.push((role, vec![a, c]));
        } else {
            let a = net.add_arc(u, v, cap)?;
            roles.push((role, vec![a]));
        }
    }
    let mut path_decomposition = Vec::new();
    for (bag, mids) in bags.into_iter().zip(extra) {
        path_decomposition.push(bag.clone());
        for mid in mids {
            let mut with = bag.clone();
            with.push(mid);
            path_decomposition.push(with);
        }
    }
    Ok(NnccmNetwork { instance: AonfInstance { network: net, value }, big_l, roles, path_decomposition })
}

/// The flow of an accepting run, with every counter raised to the bound
/// after the last test.
pub fn witness_flow_from_run(m: &NnccmMachine, net: &NnccmNetwork, run: &NnccmRun) -> Result<Flow> {
    match simulate_nnccm(m, run)? {
        RunOutcome::Accept => {}
        RunOutcome::Reject(t) => {
            return Err(Error::invalid(format!("run rejects at test {t}")));
        }
    }
    let (n, b) = (m.tests.len(), m.bound);
    // value[j][t]: counter j at v_{j,t}; t = 0 initial, t = 1..n tests.
    let value = |j: usize, t: usize| -> u32 {
        if t == 0 {
            0
        } else if t <= n {
            run.values[t - 1][j]
        } else {
            b
        }
    };
    let fires = |test: usize, half: usize| -> bool {
        let x = m.tests[test - 1];
        let (c, a) = if half == 0 { (x.i, x.a) } else { (x.j, x.b) };
        value(c - 1, test) == a
    };
    let l = net.big_l;
    let mut values = vec![0i64; net.instance.network.num_arcs()];
    for (role, arcs) in &net.roles {
        let f = match *role {
            ArcRole::SourceToV { .. } => l,
            ArcRole::WToSink { .. } => l + 2 * b as i64,
            ArcRole::Refill { counter, time, copy } => {
                if (copy as u32) < value(counter, time + 1) - value(counter, time) {
                    2
                } else {
                    0
                }
            }
            ArcRole::Hold { counter, time, alpha } => {
                if value(counter, time) == alpha {
                    l + 2 * alpha as i64
                } else {
                    0
                }
            }
            ArcRole::Advance { counter, time, alpha } => {
                if value(counter, time + 1) == alpha {
                    net.instance.network.arc(arcs[0]).cap
                } else {
                    0
                }
            }
            ArcRole::CheckIn { test, half } | ArcRole::CheckOut { test, half } => i64::from(fires(test, half)),
            ArcRole::CheckMid { test } => i64::from(fires(test, 0) || fires(test, 1)),
        };
        for &a in arcs {
            values[a] = f;
        }
    }
    Ok(Flow { values })
}

fn check_packing_input(items: &[i64], size: i64, bins: usize) -> Result<()> {
    if items.iter().any(|&a| a < 1) || size < 0 {
        return Err(Error::invalid("items must be positive and the bin size non-negative"));
    }
    let total: i64 = items.iter().sum();
    if total != size * bins as i64 {
        return Err(Error::invalid(format!("item sum {total} differs from {bins} bins of size {size}")));
    }
    Ok(())
}

/// Complete bipartite graph between bins `v_j` (vertices `0..k`) and items
/// `w_i` (vertices `k..k+n`); item edges weigh the item size.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PackingOrientation {
    pub instance: TooInstance,
    /// The bin vertices, which cover every edge.
    pub vertex_cover: Vec<VertexId>,
}

pub fn binpacking_to_too(items: &[i64], size: i64, bins: usize) -> Result<PackingOrientation> {
    check_packing_input(items, size, bins)?;
    let (k, n) = (bins, items.len());
    let mut graph = WeightedGraph::new(k + n);
    for (i, &a) in items.iter().enumerate() {
        for j in 0..k {
            graph.add_edge(j, k + i, a)?;
        }
    }
    let mut targets = vec![size * k as i64 - size; k];
    targets.extend_from_slice(items);
    Ok(PackingOrientation { instance: TooInstance { graph, targets }, vertex_cover: (0..k).collect() })
}

impl PackingOrientation {
    /// Bin of each item: the bin its item vertex points to.
    pub fn packing_from_orientation(&self, o: &crate::graph::Orientation) -> Vec<usize> {
        let g = &self.instance.graph;
        let k = self.vertex_cover.len();
        let n = g.num_vertices() - k;
        let mut bin = vec![usize::MAX; n];
        for e in 0..g.num_edges() {
            let (tail, head) = o.arc(g, e);
            if tail >= k {
                bin[tail - k] = head;
            }
        }
        bin
    }
}

/// Source `0`, items `1..=n`, bins `n+1..=n+k`, sink `n+k+1`.
pub fn binpacking_to_aonf(items: &[i64], size: i64, bins: usize) -> Result<AonfInstance> {
    check_packing_input(items, size, bins)?;
    let (k, n) = (bins, items.len());
    let t = n + k + 1;
    let mut net = FlowNetwork::new(n + k + 2, 0, t)?;
    for (i, &a) in items.iter().enumerate() {
        net.add_arc(0, 1 + i, a)?;
    }
    for (i, &a) in items.iter().enumerate() {
        for j in 0..k {
            net.add_arc(1 + i, n + 1 + j, a)?;
        }
    }
    if size > 0 {
        for j in 0..k {
            net.add_arc(n + 1 + j, t, size)?;
        }
    }
    Ok(AonfInstance { network: net, value: size * k as i64 })
}

/// Exact bin packing by depth-first search; returns the bin of each item.
pub fn oracle_binpacking(items: &[i64], size: i64, bins: usize) -> Result<Option<Vec<usize>>> {
    check_packing_input(items, size, bins)?;
    let mut order: Vec<usize> = (0..items.len()).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(items[i]));
    let mut load = vec![0i64; bins];
    let mut bin = vec![usize::MAX; items.len()];
    fn go(items: &[i64], order: &[usize], size: i64, pos: usize, load: &mut [i64], bin: &mut [usize]) -> bool {
        if pos == order.len() {
            return load.iter().all(|&l| l == size);
        }
        let i = order[pos];
        for j in 0..load.len() {
            // Bins with equal load are interchangeable.
            if load[..j].contains(&load[j]) || load[j] + items[i] > size {
                continue;
            }
            load[j] += items[i];
            bin[i] = j;
            if go(items, order, size, pos + 1, load, bin) {
                return true;
            }
            load[j] -= items[i];
        }
        false
    }
    Ok(go(items, &order, size, 0, &mut load, &mut bin).then_some(bin))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::check_flow;
    use crate::tree::validate_path_decomposition;

    fn t(i: usize, a: u32, j: usize, b: u32) -> Test {
        Test { i, a, j, b }
    }

    #[test]
    fn simulate_examples() {
        let m = NnccmMachine::new(2, 1, vec![]).unwrap();
        assert_eq!(simulate_nnccm(&m, &NnccmRun { values: vec![] }).unwrap(), RunOutcome::Accept);
        let m = NnccmMachine::new(2, 1, vec![t(1, 0, 2, 0)]).unwrap();
        assert_eq!(simulate_nnccm(&m, &NnccmRun { values: vec![vec![0, 0]] }).unwrap(), RunOutcome::Reject(1));
        assert_eq!(simulate_nnccm(&m, &NnccmRun { values: vec![vec![1, 0]] }).unwrap(), RunOutcome::Accept);
        assert!(simulate_nnccm(&m, &NnccmRun { values: vec![vec![2, 0]] }).is_err());
    }

    #[test]
    fn oracle_examples() {
        let m = NnccmMachine::new(1, 0, vec![]).unwrap();
        assert!(oracle_nnccm(&m, 1000).unwrap().is_some());
        let m = NnccmMachine::new(1, 0, vec![t(1, 0, 1, 0)]).unwrap();
        assert!(oracle_nnccm(&m, 1000).unwrap().is_none());
        let m = NnccmMachine::new(2, 1, vec![t(1, 0, 2, 0)]).unwrap();
        let run = oracle_nnccm(&m, 1000).unwrap().unwrap();
        assert_eq!(simulate_nnccm(&m, &run).unwrap(), RunOutcome::Accept);
    }

    #[test]
    fn network_parameters_and_census() {
        let m = NnccmMachine::new(1, 1, vec![t(1, 0, 1, 1)]).unwrap();
        let net = nnccm_to_aonf(&m).unwrap();
        assert_eq!(net.big_l, 4);
        assert_eq!(net.value(), 6);
        for (k, b, n) in [(1usize, 1u32, 1usize), (2, 2, 2), (2, 1, 3)] {
            let tests = (0..n).map(|x| t(1 + x % k, 0, k, b)).collect();
            let m = NnccmMachine::new(k, b, tests).unwrap();
            let net = nnccm_to_aonf(&m).unwrap();
            let (kk, bb, nn) = (k, b as usize, n);
            let census = kk + kk + kk * bb * (nn + 1) + kk * (nn + 1) * (bb + 1) + kk * nn * (bb + 1) + 5 * nn;
            assert_eq!(net.roles.len(), census);
            let edges: Vec<_> = net.instance.network.arcs().iter().map(|a| (a.tail, a.head)).collect();
            validate_path_decomposition(net.instance.network.num_nodes(), &edges, &net.path_decomposition).unwrap();
        }
    }

    #[test]
    fn witness_flow_is_valid() {
        let m = NnccmMachine::new(2, 2, vec![t(1, 0, 2, 1), t(1, 1, 1, 2)]).unwrap();
        let run = NnccmRun { values: vec![vec![0, 0], vec![1, 2]] };
        assert_eq!(simulate_nnccm(&m, &run).unwrap(), RunOutcome::Accept);
        let net = nnccm_to_aonf(&m).unwrap();
        let f = witness_flow_from_run(&m, &net, &run).unwrap();
        assert!(net.instance.is_satisfied_by(&f), "{:?}", check_flow(&net.instance.network, &f));
        let bad = NnccmRun { values: vec![vec![0, 1], vec![1, 2]] };
        assert!(witness_flow_from_run(&m, &net, &bad).is_err());
    }

    #[test]
    fn packing_generators() {
        let p = binpacking_to_too(&[1, 2, 3], 3, 2).unwrap();
        assert_eq!(p.instance.graph.num_vertices(), 5);
        assert_eq!(p.instance.targets, vec![3, 3, 1, 2, 3]);
        let a = binpacking_to_aonf(&[1, 2, 3], 3, 2).unwrap();
        assert_eq!(a.network.num_nodes(), 7);
        assert_eq!(a.network.num_arcs(), 11);
        assert_eq!(a.value, 6);
        assert!(binpacking_to_too(&[1, 2], 2, 2).is_err());
    }

    #[test]
    fn packing_oracle() {
        assert!(oracle_binpacking(&[1, 2, 3], 3, 2).unwrap().is_some());
        assert!(oracle_binpacking(&[2, 2, 2], 3, 2).unwrap().is_none());
        assert_eq!(oracle_binpacking(&[5], 5, 1).unwrap(), Some(vec![0]));
    }
}
