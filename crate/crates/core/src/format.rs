//! The line-oriented text format shared by instances, witnesses,
//! partitions, morphisms, counter machines and integer programs.
//!
//! Every line is a keyword followed by whitespace-separated fields; `#`
//! starts a comment. Vertex, edge and arc ids must be dense from 0.
//! Errors carry the 1-based line and column of the offending token.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::{weighted_to_multigraph, EdgeId, Flow, FlowNetwork, Orientation, VertexId, WeightedGraph};
use crate::hardness::{NnccmMachine, Test};
use crate::ilp::{IlpModel, Relation};
use crate::problem::{
    AonfInstance, CdsInstance, CmoInstance, CoInstance, CrbdsInstance, DominationWitness, Interval, MmoInstance,
    OroInstance, TooInstance, UflbInstance,
};
use crate::tree::{replay_refinement, HarmonicMorphism, NodeId, RefineOp, Subdivision, TargetTree, TreePartition};

#[derive(Clone, Copy, Debug)]
struct Token<'a> {
    line: usize,
    column: usize,
    text: &'a str,
}

impl Token<'_> {
    fn err(&self, msg: impl Into<String>) -> Error {
        Error::parse(self.line, self.column, msg)
    }

    fn parse<T: std::str::FromStr>(&self, what: &str) -> Result<T> {
        self.text.parse().map_err(|_| self.err(format!("expected {what}, found `{}`", self.text)))
    }

    fn id(&self) -> Result<usize> {
        self.parse("a non-negative id")
    }

    fn int(&self) -> Result<i64> {
        self.parse("an integer")
    }
}

struct Line<'a> {
    number: usize,
    end: usize,
    tokens: Vec<Token<'a>>,
}

impl<'a> Line<'a> {
    fn keyword(&self) -> &'a str {
        self.tokens[0].text
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::parse(self.number, self.tokens[0].column, msg)
    }

    /// Field `i` after the keyword.
    fn field(&self, i: usize) -> Result<Token<'a>> {
        self.tokens
            .get(i + 1)
            .copied()
            .ok_or_else(|| Error::parse(self.number, self.end + 1, format!("`{}` needs more fields", self.keyword())))
    }

    fn fields(&self) -> &[Token<'a>] {
        &self.tokens[1..]
    }

    fn arity(&self, min: usize, max: usize) -> Result<()> {
        let n = self.tokens.len() - 1;
        if n < min {
            return Err(self.field(n).unwrap_err());
        }
        if n > max {
            return Err(self.tokens[max + 1].err(format!("unexpected extra field for `{}`", self.keyword())));
        }
        Ok(())
    }
}

fn lines(text: &str) -> Vec<Line<'_>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let body = raw.split('#').next().unwrap_or("");
        let mut tokens = Vec::new();
        let mut start = None;
        for (pos, ch) in body.char_indices().chain(std::iter::once((body.len(), ' '))) {
            match (ch.is_whitespace(), start) {
                (false, None) => start = Some(pos),
                (true, Some(s)) => {
                    tokens.push(Token { line: i + 1, column: body[..s].chars().count() + 1, text: &body[s..pos] });
                    start = None;
                }
                _ => {}
            }
        }
        if !tokens.is_empty() {
            out.push(Line { number: i + 1, end: body.trim_end().chars().count(), tokens });
        }
    }
    out
}

/// Ids declared by lines like `v <id>`, checked to be dense from 0.
#[derive(Default)]
struct IdSet<'a> {
    seen: BTreeMap<usize, Token<'a>>,
    what: &'static str,
}

impl<'a> IdSet<'a> {
    fn new(what: &'static str) -> Self {
        Self { seen: BTreeMap::new(), what }
    }

    fn insert(&mut self, tok: Token<'a>) -> Result<usize> {
        let id = tok.id()?;
        if self.seen.insert(id, tok).is_some() {
            return Err(tok.err(format!("{} {id} declared twice", self.what)));
        }
        Ok(id)
    }

    fn dense_len(&self) -> Result<usize> {
        for (expected, (&id, tok)) in self.seen.iter().enumerate() {
            if id != expected {
                return Err(tok.err(format!("{} ids must be 0..n-1; {expected} is missing", self.what)));
            }
        }
        Ok(self.seen.len())
    }
}

fn vertex_ref(tok: Token<'_>, n: usize) -> Result<VertexId> {
    let v = tok.id()?;
    if v >= n {
        return Err(tok.err(format!("unknown vertex {v}")));
    }
    Ok(v)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ProblemKind {
    Oro,
    Too,
    Cmo,
    Mmo,
    Co,
    Uflb,
    Aonf,
    Cds,
    Crbds,
}

impl ProblemKind {
    pub const ALL: [ProblemKind; 9] = [
        Self::Oro,
        Self::Too,
        Self::Cmo,
        Self::Mmo,
        Self::Co,
        Self::Uflb,
        Self::Aonf,
        Self::Cds,
        Self::Crbds,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Oro => "ORO",
            Self::Too => "TOO",
            Self::Cmo => "CMO",
            Self::Mmo => "MMO",
            Self::Co => "CO",
            Self::Uflb => "UFLB",
            Self::Aonf => "AONF",
            Self::Cds => "CDS",
            Self::Crbds => "CRBDS",
        }
    }

    /// Case-insensitive.
    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name().eq_ignore_ascii_case(s))
    }
}

impl std::fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Instance {
    Oro(OroInstance),
    Too(TooInstance),
    Cmo(CmoInstance),
    Mmo(MmoInstance),
    Co(CoInstance),
    Uflb(UflbInstance),
    Aonf(AonfInstance),
    Cds(CdsInstance),
    Crbds(CrbdsInstance),
}

impl Instance {
    pub fn kind(&self) -> ProblemKind {
        match self {
            Self::Oro(_) => ProblemKind::Oro,
            Self::Too(_) => ProblemKind::Too,
            Self::Cmo(_) => ProblemKind::Cmo,
            Self::Mmo(_) => ProblemKind::Mmo,
            Self::Co(_) => ProblemKind::Co,
            Self::Uflb(_) => ProblemKind::Uflb,
            Self::Aonf(_) => ProblemKind::Aonf,
            Self::Cds(_) => ProblemKind::Cds,
            Self::Crbds(_) => ProblemKind::Crbds,
        }
    }

    /// Number of vertices (network nodes for AONF).
    pub fn num_vertices(&self) -> usize {
        match self {
            Self::Aonf(a) => a.network.num_nodes(),
            _ => self.graph().map_or(0, WeightedGraph::num_vertices),
        }
    }

    /// Underlying weighted graph; `None` for AONF.
    pub fn graph(&self) -> Option<&WeightedGraph> {
        match self {
            Self::Oro(x) => Some(&x.graph),
            Self::Too(x) => Some(&x.graph),
            Self::Cmo(x) => Some(&x.graph),
            Self::Mmo(x) => Some(&x.graph),
            Self::Co(x) => Some(&x.graph),
            Self::Uflb(x) => Some(&x.graph),
            Self::Aonf(_) => None,
            Self::Cds(x) => Some(&x.graph),
            Self::Crbds(x) => Some(&x.graph),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Oro(x) => x.validate(),
            Self::Too(x) => x.validate(),
            Self::Cmo(x) => x.validate(),
            Self::Mmo(x) => x.validate(),
            Self::Co(x) => x.validate(),
            Self::Uflb(x) => x.validate(),
            Self::Aonf(x) => x.validate(),
            Self::Cds(x) => x.validate(),
            Self::Crbds(x) => x.validate(),
        }
    }
}

/// Parses and validates an instance file.
pub fn parse_instance(text: &str) -> Result<Instance> {
    let ls = lines(text);
    let Some(first) = ls.first() else {
        return Err(Error::parse(1, 1, "empty instance file"));
    };
    let problem_line = ls
        .iter()
        .find(|l| l.keyword() == "problem")
        .ok_or_else(|| first.err("missing `problem` line"))?;
    problem_line.arity(1, 1)?;
    let ptok = problem_line.field(0)?;
    let kind = ProblemKind::from_name(ptok.text).ok_or_else(|| ptok.err(format!("unknown problem `{}`", ptok.text)))?;

    let mut vertices = IdSet::new("vertex");
    let mut edge_ids = IdSet::new("edge");
    let mut arc_ids = IdSet::new("arc");
    let mut edge_lines = Vec::new();
    let mut arc_lines = Vec::new();
    let mut rest = Vec::new();
    for l in &ls {
        match l.keyword() {
            "problem" => {
                if !std::ptr::eq(l, problem_line) {
                    return Err(l.err("duplicate `problem` line"));
                }
            }
            "v" => {
                l.arity(1, 1)?;
                vertices.insert(l.field(0)?)?;
            }
            "e" => {
                let extra = usize::from(kind == ProblemKind::Uflb);
                l.arity(4, 4 + extra)?;
                edge_ids.insert(l.field(0)?)?;
                edge_lines.push(l);
            }
            "arc" if kind == ProblemKind::Aonf => {
                l.arity(4, 5)?;
                arc_ids.insert(l.field(0)?)?;
                arc_lines.push(l);
            }
            _ => rest.push(l),
        }
    }
    let n = vertices.dense_len()?;
    let m = edge_ids.dense_len()?;
    let mut edges: Vec<Option<(VertexId, VertexId, i64, i64)>> = vec![None; m];
    for l in &edge_lines {
        let id = l.field(0)?.id()?;
        let u = vertex_ref(l.field(1)?, n)?;
        let v = vertex_ref(l.field(2)?, n)?;
        let w = l.field(3)?.int()?;
        if w < 1 {
            return Err(l.field(3)?.err("edge weights must be positive"));
        }
        if u == v {
            return Err(l.field(2)?.err("loops are not allowed"));
        }
        let lower = match l.tokens.get(5) {
            Some(t) => t.int()?,
            None => 0,
        };
        edges[id] = Some((u, v, w, lower));
    }
    let mut graph = WeightedGraph::new(n);
    let mut lower = Vec::with_capacity(m);
    for e in edges.into_iter().flatten() {
        graph.add_edge(e.0, e.1, e.2)?;
        lower.push(e.3);
    }

    // Per-vertex directives.
    let mut per_vertex: BTreeMap<&str, Vec<Option<(i64, i64)>>> = BTreeMap::new();
    let mut scalar: BTreeMap<&str, (Token<'_>, i64)> = BTreeMap::new();
    let mut colours: Vec<Option<bool>> = vec![None; n];
    let mut pins: Vec<Option<VertexId>> = vec![None; n];
    let allowed: &[&str] = match kind {
        ProblemKind::Oro => &["interval"],
        ProblemKind::Too => &["target"],
        ProblemKind::Cmo => &["bound"],
        ProblemKind::Mmo => &["maxout"],
        ProblemKind::Co => &[],
        ProblemKind::Uflb => &["source", "sink", "value"],
        ProblemKind::Aonf => &["source", "sink", "value"],
        ProblemKind::Cds => &["cap", "budget"],
        ProblemKind::Crbds => &["cap", "budget", "red", "blue", "pin"],
    };
    for l in rest {
        let kw = l.keyword();
        if !allowed.contains(&kw) {
            return Err(l.err(format!("`{kw}` is not a directive of problem {kind}")));
        }
        match kw {
            "interval" | "target" | "bound" | "cap" => {
                let two = kw == "interval";
                l.arity(2 + usize::from(two), 2 + usize::from(two))?;
                let v = vertex_ref(l.field(0)?, n)?;
                let a = l.field(1)?.int()?;
                let b = if two { l.field(2)?.int()? } else { a };
                let slot = per_vertex.entry(kw).or_insert_with(|| vec![None; n]);
                if slot[v].replace((a, b)).is_some() {
                    return Err(l.field(0)?.err(format!("`{kw}` given twice for vertex {v}")));
                }
            }
            "maxout" | "source" | "sink" | "value" | "budget" => {
                l.arity(1, 1)?;
                let tok = l.field(0)?;
                if scalar.insert(kw, (tok, tok.int()?)).is_some() {
                    return Err(l.err(format!("duplicate `{kw}` line")));
                }
            }
            "red" | "blue" => {
                for &tok in l.fields() {
                    let v = vertex_ref(tok, n)?;
                    if colours[v].replace(kw == "red").is_some() {
                        return Err(tok.err(format!("vertex {v} coloured twice")));
                    }
                }
            }
            "pin" => {
                l.arity(2, 2)?;
                let b = vertex_ref(l.field(0)?, n)?;
                let r = vertex_ref(l.field(1)?, n)?;
                if pins[b].replace(r).is_some() {
                    return Err(l.field(0)?.err(format!("vertex {b} pinned twice")));
                }
            }
            _ => unreachable!("filtered by the allowed list"),
        }
    }
    let need = |kw: &str| -> Result<Vec<(i64, i64)>> {
        let Some(slot) = per_vertex.get(kw) else {
            if n == 0 {
                return Ok(Vec::new());
            }
            return Err(problem_line.err(format!("missing `{kw}` lines")));
        };
        slot.iter()
            .enumerate()
            .map(|(v, x)| x.ok_or_else(|| problem_line.err(format!("missing `{kw}` for vertex {v}"))))
            .collect()
    };
    let get = |kw: &str| -> Result<(Token<'_>, i64)> {
        scalar.get(kw).copied().ok_or_else(|| problem_line.err(format!("missing `{kw}` line")))
    };
    let id_of = |kw: &str, bound: usize| -> Result<VertexId> {
        let (tok, x) = get(kw)?;
        if x < 0 || x as usize >= bound {
            return Err(tok.err(format!("unknown vertex {x}")));
        }
        Ok(x as usize)
    };
    let non_negative = |kw: &str| -> Result<usize> {
        let (tok, x) = get(kw)?;
        usize::try_from(x).map_err(|_| tok.err(format!("`{kw}` must be non-negative")))
    };

    if kind != ProblemKind::Uflb && lower.iter().any(|&x| x != 0) {
        return Err(problem_line.err("edge lower bounds only exist for UFLB"));
    }
    let inst = match kind {
        ProblemKind::Oro => {
            let intervals = need("interval")?.into_iter().map(|(a, b)| Interval::new(a, b)).collect();
            Instance::Oro(OroInstance { graph, intervals })
        }
        ProblemKind::Too => Instance::Too(TooInstance { graph, targets: need("target")?.into_iter().map(|x| x.0).collect() }),
        ProblemKind::Cmo => Instance::Cmo(CmoInstance { graph, bounds: need("bound")?.into_iter().map(|x| x.0).collect() }),
        ProblemKind::Mmo => Instance::Mmo(MmoInstance { graph, max_out: get("maxout")?.1 }),
        ProblemKind::Co => Instance::Co(CoInstance { graph }),
        ProblemKind::Uflb => Instance::Uflb(UflbInstance {
            source: id_of("source", n)?,
            sink: id_of("sink", n)?,
            value: get("value")?.1,
            graph,
            lower,
        }),
        ProblemKind::Aonf => {
            let a = arc_ids.dense_len()?;
            let mut arcs = vec![None; a];
            for l in &arc_lines {
                let id = l.field(0)?.id()?;
                let tail = vertex_ref(l.field(1)?, n)?;
                let head = vertex_ref(l.field(2)?, n)?;
                let cap = l.field(3)?.int()?;
                if cap < 1 {
                    return Err(l.field(3)?.err("capacities must be positive"));
                }
                if let Some(t) = l.tokens.get(5) {
                    if t.int()? != 0 {
                        return Err(t.err("all-or-nothing arcs carry no lower bounds"));
                    }
                }
                arcs[id] = Some((tail, head, cap));
            }
            let mut net = FlowNetwork::new(n, id_of("source", n)?, id_of("sink", n)?)?;
            for (tail, head, cap) in arcs.into_iter().flatten() {
                net.add_arc(tail, head, cap)?;
            }
            if m > 0 {
                return Err(edge_lines[0].err("AONF instances use `arc` lines, not `e`"));
            }
            Instance::Aonf(AonfInstance { network: net, value: get("value")?.1 })
        }
        ProblemKind::Cds => Instance::Cds(CdsInstance {
            graph,
            capacity: need("cap")?.into_iter().map(|x| x.0).collect(),
            budget: non_negative("budget")?,
        }),
        ProblemKind::Crbds => {
            let red = colours
                .iter()
                .enumerate()
                .map(|(v, c)| c.ok_or_else(|| problem_line.err(format!("vertex {v} has no colour"))))
                .collect::<Result<Vec<bool>>>()?;
            let caps = per_vertex.get("cap").cloned().unwrap_or_else(|| vec![None; n]);
            let mut capacity = vec![0; n];
            for v in 0..n {
                match (red[v], caps[v]) {
                    (true, Some((c, _))) => capacity[v] = c,
                    (true, None) => return Err(problem_line.err(format!("red vertex {v} has no `cap`"))),
                    (false, Some(_)) => return Err(problem_line.err(format!("blue vertex {v} has a `cap`"))),
                    (false, None) => {}
                }
            }
            Instance::Crbds(CrbdsInstance { graph, red, capacity, pins, budget: non_negative("budget")? })
        }
    };
    inst.validate().map_err(|e| match e {
        Error::Invalid(msg) => problem_line.err(msg),
        other => other,
    })?;
    Ok(inst)
}

fn write_graph(out: &mut String, g: &WeightedGraph, lower: Option<&[i64]>) {
    for v in 0..g.num_vertices() {
        let _ = writeln!(out, "v {v}");
    }
    for (id, e) in g.edges().iter().enumerate() {
        let _ = write!(out, "e {id} {} {} {}", e.u, e.v, e.w);
        if let Some(l) = lower {
            let _ = write!(out, " {}", l[id]);
        }
        out.push('\n');
    }
}

pub fn write_instance(inst: &Instance) -> String {
    let mut out = format!("problem {}\n", inst.kind());
    match inst {
        Instance::Oro(x) => {
            write_graph(&mut out, &x.graph, None);
            for (v, i) in x.intervals.iter().enumerate() {
                let _ = writeln!(out, "interval {v} {} {}", i.lo, i.hi);
            }
        }
        Instance::Too(x) => {
            write_graph(&mut out, &x.graph, None);
            for (v, d) in x.targets.iter().enumerate() {
                let _ = writeln!(out, "target {v} {d}");
            }
        }
        Instance::Cmo(x) => {
            write_graph(&mut out, &x.graph, None);
            for (v, d) in x.bounds.iter().enumerate() {
                let _ = writeln!(out, "bound {v} {d}");
            }
        }
        Instance::Mmo(x) => {
            write_graph(&mut out, &x.graph, None);
            let _ = writeln!(out, "maxout {}", x.max_out);
        }
        Instance::Co(x) => write_graph(&mut out, &x.graph, None),
        Instance::Uflb(x) => {
            write_graph(&mut out, &x.graph, Some(&x.lower));
            let _ = writeln!(out, "source {}\nsink {}\nvalue {}", x.source, x.sink, x.value);
        }
        Instance::Aonf(x) => {
            let net = &x.network;
            for v in 0..net.num_nodes() {
                let _ = writeln!(out, "v {v}");
            }
            for (id, a) in net.arcs().iter().enumerate() {
                let _ = writeln!(out, "arc {id} {} {} {}", a.tail, a.head, a.cap);
            }
            let _ = writeln!(out, "source {}\nsink {}\nvalue {}", net.source, net.sink, x.value);
        }
        Instance::Cds(x) => {
            write_graph(&mut out, &x.graph, None);
            for (v, c) in x.capacity.iter().enumerate() {
                let _ = writeln!(out, "cap {v} {c}");
            }
            let _ = writeln!(out, "budget {}", x.budget);
        }
        Instance::Crbds(x) => {
            write_graph(&mut out, &x.graph, None);
            let list = |want: bool| -> String {
                (0..x.red.len()).filter(|&v| x.red[v] == want).map(|v| format!(" {v}")).collect()
            };
            let _ = writeln!(out, "red{}", list(true));
            let _ = writeln!(out, "blue{}", list(false));
            for v in x.reds() {
                let _ = writeln!(out, "cap {v} {}", x.capacity[v]);
            }
            for (b, p) in x.pins.iter().enumerate() {
                if let Some(r) = p {
                    let _ = writeln!(out, "pin {b} {r}");
                }
            }
            let _ = writeln!(out, "budget {}", x.budget);
        }
    }
    out
}

/// Witness lines as written; interpretation depends on the instance.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Witness {
    pub orient: Vec<(EdgeId, VertexId, VertexId)>,
    pub flow: Vec<(usize, i64)>,
    pub dominators: Vec<VertexId>,
    pub assign: Vec<(VertexId, VertexId)>,
    /// Line of the first occurrence of each kind, for diagnostics.
    lines: BTreeMap<&'static str, usize>,
}

pub fn parse_witness(text: &str) -> Result<Witness> {
    let mut w = Witness::default();
    for l in lines(text) {
        let kw: &'static str = match l.keyword() {
            "orient" => {
                l.arity(3, 3)?;
                w.orient.push((l.field(0)?.id()?, l.field(1)?.id()?, l.field(2)?.id()?));
                "orient"
            }
            "flow" => {
                l.arity(2, 2)?;
                w.flow.push((l.field(0)?.id()?, l.field(1)?.int()?));
                "flow"
            }
            "dominator" => {
                l.arity(1, 1)?;
                w.dominators.push(l.field(0)?.id()?);
                "dominator"
            }
            "assign" => {
                l.arity(2, 2)?;
                w.assign.push((l.field(0)?.id()?, l.field(1)?.id()?));
                "assign"
            }
            other => return Err(l.err(format!("unknown witness line `{other}`"))),
        };
        w.lines.entry(kw).or_insert(l.number);
    }
    Ok(w)
}

impl Witness {
    fn at(&self, kw: &str, msg: impl Into<String>) -> Error {
        Error::parse(self.lines.get(kw).copied().unwrap_or(1), 1, msg)
    }

    pub fn orientation(&self, g: &WeightedGraph) -> Result<Orientation> {
        let m = g.num_edges();
        let mut forward = vec![None; m];
        for &(e, tail, head) in &self.orient {
            if e >= m {
                return Err(self.at("orient", format!("unknown edge {e}")));
            }
            let edge = g.edge(e);
            let dir = if (tail, head) == (edge.u, edge.v) {
                true
            } else if (tail, head) == (edge.v, edge.u) {
                false
            } else {
                return Err(self.at("orient", format!("edge {e} does not join {tail} and {head}")));
            };
            if forward[e].replace(dir).is_some() {
                return Err(self.at("orient", format!("edge {e} oriented twice")));
            }
        }
        let forward = forward
            .into_iter()
            .enumerate()
            .map(|(e, d)| d.ok_or_else(|| self.at("orient", format!("edge {e} is not oriented"))))
            .collect::<Result<_>>()?;
        Ok(Orientation::new(forward))
    }

    /// Flow over `arcs` arcs; unlisted arcs carry 0.
    pub fn flow(&self, arcs: usize) -> Result<Flow> {
        let mut values = vec![0; arcs];
        let mut seen = vec![false; arcs];
        for &(a, f) in &self.flow {
            if a >= arcs || std::mem::replace(&mut seen[a], true) {
                return Err(self.at("flow", format!("arc {a} unknown or repeated")));
            }
            values[a] = f;
        }
        Ok(Flow { values })
    }

    pub fn domination(&self, n: usize) -> Result<DominationWitness> {
        let mut assignment = vec![None; n];
        for &(v, d) in &self.assign {
            if v >= n || assignment[v].replace(d).is_some() {
                return Err(self.at("assign", format!("vertex {v} unknown or assigned twice")));
            }
        }
        Ok(DominationWitness { dominators: self.dominators.clone(), assignment })
    }
}

pub fn write_orientation(g: &WeightedGraph, o: &Orientation) -> String {
    let mut out = String::new();
    for e in 0..g.num_edges() {
        let (t, h) = o.arc(g, e);
        let _ = writeln!(out, "orient {e} {t} {h}");
    }
    out
}

pub fn write_flow(f: &Flow) -> String {
    let mut out = String::new();
    for (a, x) in f.values.iter().enumerate() {
        let _ = writeln!(out, "flow {a} {x}");
    }
    out
}

pub fn write_domination(w: &DominationWitness) -> String {
    let mut out = String::new();
    for d in &w.dominators {
        let _ = writeln!(out, "dominator {d}");
    }
    for (v, d) in w.assignment.iter().enumerate() {
        if let Some(d) = d {
            let _ = writeln!(out, "assign {v} {d}");
        }
    }
    out
}

/// Result of checking a witness against an instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WitnessCheck {
    /// Valid; for domination problems, the number of dominators.
    Valid { size: Option<usize> },
    Invalid(String),
}

pub fn check_witness(inst: &Instance, w: &Witness) -> Result<WitnessCheck> {
    use WitnessCheck::*;
    let orientation_ok = |g: &WeightedGraph, ok: &dyn Fn(&Orientation) -> bool| -> Result<WitnessCheck> {
        let o = w.orientation(g)?;
        Ok(if ok(&o) { Valid { size: None } } else { Invalid("orientation violates the outdegree constraints".into()) })
    };
    match inst {
        Instance::Oro(x) => orientation_ok(&x.graph, &|o| x.is_satisfied_by(o)),
        Instance::Too(x) => orientation_ok(&x.graph, &|o| x.is_satisfied_by(o)),
        Instance::Cmo(x) => orientation_ok(&x.graph, &|o| x.is_satisfied_by(o)),
        Instance::Mmo(x) => orientation_ok(&x.graph, &|o| x.is_satisfied_by(o)),
        Instance::Co(x) => orientation_ok(&x.graph, &|o| x.is_satisfied_by(o)),
        Instance::Uflb(x) => {
            let o = w.orientation(&x.graph)?;
            let f = w.flow(x.graph.num_edges())?;
            Ok(if x.is_satisfied_by(&o, &f) { Valid { size: None } } else { Invalid("flow is not feasible along the orientation".into()) })
        }
        Instance::Aonf(x) => {
            let f = w.flow(x.network.num_arcs())?;
            Ok(if x.is_satisfied_by(&f) { Valid { size: None } } else { Invalid("not an all-or-nothing flow of the requested value".into()) })
        }
        Instance::Cds(x) => {
            let d = w.domination(x.graph.num_vertices())?;
            Ok(match x.check_witness(&d) {
                Ok(size) if size <= x.budget => Valid { size: Some(size) },
                Ok(size) => Invalid(format!("{size} dominators exceed the budget {}", x.budget)),
                Err(e) => Invalid(e.to_string()),
            })
        }
        Instance::Crbds(x) => {
            let d = w.domination(x.graph.num_vertices())?;
            Ok(match x.check_witness(&d) {
                Ok(size) if size <= x.budget => Valid { size: Some(size) },
                Ok(size) => Invalid(format!("{size} dominators exceed the budget {}", x.budget)),
                Err(e) => Invalid(e.to_string()),
            })
        }
    }
}

/// A partition file: a tree partition (or, with `pathdecomp`, a path
/// decomposition whose bags may overlap), optionally of a subdivision of
/// the instance graph given by `subdivide <edge> <vertex...>` lines.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionFile {
    pub partition: TreePartition,
    pub pathdecomp: bool,
    /// Chain vertices per base edge, present when any `subdivide` line is.
    pub chains: Option<BTreeMap<EdgeId, Vec<VertexId>>>,
    root_given: bool,
}

impl PartitionFile {
    pub fn new(partition: TreePartition) -> Self {
        Self { partition, pathdecomp: false, chains: None, root_given: true }
    }

    /// The subdivision of `g` described by the file (the identity when
    /// there are no `subdivide` lines).
    pub fn subdivision(&self, g: &WeightedGraph) -> Result<Subdivision> {
        let Some(chains) = &self.chains else {
            return Ok(Subdivision::identity(g));
        };
        if let Some(&e) = chains.keys().find(|&&e| e >= g.num_edges()) {
            return Err(Error::invalid(format!("subdivide line names unknown edge {e}")));
        }
        let full = (0..g.num_edges()).map(|e| chains.get(&e).cloned().unwrap_or_default()).collect();
        Subdivision::new(g.clone(), full)
    }
}

pub fn parse_partition(text: &str) -> Result<PartitionFile> {
    let mut nodes = IdSet::new("tree node");
    let mut bag_lines = Vec::new();
    let mut arcs = Vec::new();
    let mut root = None;
    let mut pathdecomp = false;
    let mut chains: Option<BTreeMap<EdgeId, Vec<VertexId>>> = None;
    let ls = lines(text);
    for l in &ls {
        match l.keyword() {
            "tnode" => {
                l.arity(1, 1)?;
                nodes.insert(l.field(0)?)?;
            }
            "tarc" => {
                l.arity(2, 2)?;
                arcs.push((l.field(0)?, l.field(1)?));
            }
            "bag" => {
                l.arity(1, usize::MAX)?;
                bag_lines.push(l);
            }
            "root" => {
                l.arity(1, 1)?;
                if root.replace(l.field(0)?).is_some() {
                    return Err(l.err("duplicate `root` line"));
                }
            }
            "pathdecomp" => {
                l.arity(0, 0)?;
                pathdecomp = true;
            }
            "subdivide" => {
                l.arity(1, usize::MAX)?;
                let e = l.field(0)?.id()?;
                let chain = l.fields()[1..].iter().map(|t| t.id()).collect::<Result<Vec<_>>>()?;
                if chains.get_or_insert_with(BTreeMap::new).insert(e, chain).is_some() {
                    return Err(l.field(0)?.err(format!("edge {e} subdivided twice")));
                }
            }
            other => return Err(l.err(format!("unknown partition line `{other}`"))),
        }
    }
    // Nodes named only in bag lines count as declared.
    for l in &bag_lines {
        let tok = l.field(0)?;
        if !nodes.seen.contains_key(&tok.id()?) {
            nodes.insert(tok)?;
        }
    }
    let count = nodes.dense_len()?;
    let mut bags: Vec<Option<Vec<VertexId>>> = vec![None; count];
    for l in &bag_lines {
        let node = l.field(0)?.id()?;
        let vs = l.fields()[1..].iter().map(|t| t.id()).collect::<Result<Vec<_>>>()?;
        if bags[node].replace(vs).is_some() {
            return Err(l.field(0)?.err(format!("node {node} has two bags")));
        }
    }
    let node_ref = |t: Token<'_>| -> Result<NodeId> {
        let x = t.id()?;
        if x >= count {
            return Err(t.err(format!("unknown tree node {x}")));
        }
        Ok(x)
    };
    let arcs = arcs.into_iter().map(|(a, b)| Ok((node_ref(a)?, node_ref(b)?))).collect::<Result<Vec<_>>>()?;
    let root_given = root.is_some();
    let root = match root {
        Some(t) => node_ref(t)?,
        None => 0,
    };
    let bags = bags.into_iter().map(Option::unwrap_or_default).collect::<Vec<_>>();
    let arcs = if pathdecomp && arcs.is_empty() { (1..count).map(|i| (i - 1, i)).collect() } else { arcs };
    Ok(PartitionFile { partition: TreePartition { bags, arcs, root }, pathdecomp, chains, root_given })
}

pub fn write_partition(p: &PartitionFile) -> String {
    let mut out = String::new();
    if p.pathdecomp {
        out.push_str("pathdecomp\n");
    }
    for node in 0..p.partition.num_nodes() {
        let _ = writeln!(out, "tnode {node}");
    }
    for &(a, b) in &p.partition.arcs {
        let _ = writeln!(out, "tarc {a} {b}");
    }
    for (node, bag) in p.partition.bags.iter().enumerate() {
        let _ = write!(out, "bag {node}");
        for v in bag {
            let _ = write!(out, " {v}");
        }
        out.push('\n');
    }
    if p.root_given || p.partition.root != 0 {
        let _ = writeln!(out, "root {}", p.partition.root);
    }
    if let Some(chains) = &p.chains {
        for (e, chain) in chains {
            let _ = write!(out, "subdivide {e}");
            for x in chain {
                let _ = write!(out, " {x}");
            }
            out.push('\n');
        }
    }
    out
}

/// A morphism file: the base weighted graph (`v`, `e`), the refinement
/// trace (`refine subdivide <e>`, `refine leaf <v>`), the target tree
/// (`tnode`, `tarc`, numbered by order of appearance) and the maps
/// (`vmap`, `emap`, `index`) over the refined multigraph. Multigraph edges
/// number the copies of weighted edge 0 first, then edge 1, and so on.
pub fn parse_morphism(text: &str) -> Result<(WeightedGraph, HarmonicMorphism)> {
    let ls = lines(text);
    let mut vertices = IdSet::new("vertex");
    let mut edge_ids = IdSet::new("edge");
    let mut nodes = IdSet::new("tree node");
    let mut edge_lines = Vec::new();
    let mut tarcs = Vec::new();
    let mut ops = Vec::new();
    let mut maps: BTreeMap<&str, Vec<&Line<'_>>> = BTreeMap::new();
    for l in &ls {
        match l.keyword() {
            "v" => {
                l.arity(1, 1)?;
                vertices.insert(l.field(0)?)?;
            }
            "e" => {
                l.arity(4, 4)?;
                edge_ids.insert(l.field(0)?)?;
                edge_lines.push(l);
            }
            "tnode" => {
                l.arity(1, 1)?;
                nodes.insert(l.field(0)?)?;
            }
            "tarc" => {
                l.arity(2, 2)?;
                tarcs.push((l.field(0)?, l.field(1)?));
            }
            "refine" => {
                l.arity(2, 2)?;
                let what = l.field(0)?;
                let x = l.field(1)?.id()?;
                ops.push(match what.text {
                    "subdivide" => RefineOp::Subdivide(x),
                    "leaf" => RefineOp::Leaf(x),
                    other => return Err(what.err(format!("unknown refinement `{other}`"))),
                });
            }
            "vmap" | "emap" | "index" => {
                l.arity(2, 2)?;
                maps.entry(l.keyword()).or_default().push(l);
            }
            other => return Err(l.err(format!("unknown morphism line `{other}`"))),
        }
    }
    let n = vertices.dense_len()?;
    let m = edge_ids.dense_len()?;
    let mut edges = vec![(0, 0, 0); m];
    for l in &edge_lines {
        let id = l.field(0)?.id()?;
        let w = l.field(3)?.int()?;
        if w < 1 {
            return Err(l.field(3)?.err("edge weights must be positive"));
        }
        edges[id] = (vertex_ref(l.field(1)?, n)?, vertex_ref(l.field(2)?, n)?, w);
    }
    let g = WeightedGraph::from_edges(n, &edges)?;
    let refinement = replay_refinement(&weighted_to_multigraph(&g).graph, &ops)?;
    let count = nodes.dense_len()?;
    let node_ref = |t: Token<'_>| -> Result<NodeId> {
        let x = t.id()?;
        if x >= count {
            return Err(t.err(format!("unknown tree node {x}")));
        }
        Ok(x)
    };
    let arcs = tarcs.into_iter().map(|(a, b)| Ok((node_ref(a)?, node_ref(b)?))).collect::<Result<Vec<_>>>()?;
    let hn = refinement.graph.num_vertices();
    let hm = refinement.graph.num_edges();
    let table = |kw: &str, size: usize, check: &dyn Fn(Token<'_>) -> Result<i64>| -> Result<Vec<i64>> {
        let mut out = vec![None; size];
        for l in maps.get(kw).map(Vec::as_slice).unwrap_or_default() {
            let key = l.field(0)?;
            let k = key.id()?;
            if k >= size {
                return Err(key.err(format!("`{kw}` names unknown id {k}")));
            }
            if out[k].replace(check(l.field(1)?)?).is_some() {
                return Err(key.err(format!("`{kw}` given twice for {k}")));
            }
        }
        out.into_iter()
            .enumerate()
            .map(|(k, x)| x.ok_or_else(|| Error::parse(1, 1, format!("missing `{kw}` for {k}"))))
            .collect()
    };
    let vmap = table("vmap", hn, &|t| Ok(node_ref(t)? as i64))?;
    let emap = table("emap", hm, &|t| {
        let a = t.id()?;
        if a >= arcs.len() {
            return Err(t.err(format!("unknown tree arc {a}")));
        }
        Ok(a as i64)
    })?;
    let index = table("index", hm, &|t| t.int())?;
    let morphism = HarmonicMorphism {
        source: refinement,
        tree: TargetTree { num_nodes: count, arcs },
        vmap: vmap.into_iter().map(|x| x as usize).collect(),
        emap: emap.into_iter().map(|x| x as usize).collect(),
        index,
    };
    Ok((g, morphism))
}

pub fn write_morphism(g: &WeightedGraph, m: &HarmonicMorphism) -> String {
    let mut out = String::new();
    write_graph(&mut out, g, None);
    for op in &m.source.ops {
        let _ = match op {
            RefineOp::Subdivide(e) => writeln!(out, "refine subdivide {e}"),
            RefineOp::Leaf(v) => writeln!(out, "refine leaf {v}"),
        };
    }
    for node in 0..m.tree.num_nodes {
        let _ = writeln!(out, "tnode {node}");
    }
    for (a, b) in &m.tree.arcs {
        let _ = writeln!(out, "tarc {a} {b}");
    }
    for (v, t) in m.vmap.iter().enumerate() {
        let _ = writeln!(out, "vmap {v} {t}");
    }
    for (e, a) in m.emap.iter().enumerate() {
        let _ = writeln!(out, "emap {e} {a}");
    }
    for (e, r) in m.index.iter().enumerate() {
        let _ = writeln!(out, "index {e} {r}");
    }
    out
}

pub fn parse_machine(text: &str) -> Result<NnccmMachine> {
    let mut counters = None;
    let mut bound = None;
    let mut tests = Vec::new();
    let mut first_line = None;
    for l in lines(text) {
        first_line.get_or_insert(l.number);
        match l.keyword() {
            "counters" => {
                l.arity(1, 1)?;
                if counters.replace(l.field(0)?.id()?).is_some() {
                    return Err(l.err("duplicate `counters` line"));
                }
            }
            "bound" => {
                l.arity(1, 1)?;
                if bound.replace(l.field(0)?.parse::<u32>("a bound")?).is_some() {
                    return Err(l.err("duplicate `bound` line"));
                }
            }
            "test" => {
                l.arity(4, 4)?;
                tests.push(Test {
                    i: l.field(0)?.id()?,
                    a: l.field(1)?.parse("a counter value")?,
                    j: l.field(2)?.id()?,
                    b: l.field(3)?.parse("a counter value")?,
                });
            }
            other => return Err(l.err(format!("unknown machine line `{other}`"))),
        }
    }
    let line = first_line.unwrap_or(1);
    let counters = counters.ok_or_else(|| Error::parse(line, 1, "missing `counters` line"))?;
    let bound = bound.ok_or_else(|| Error::parse(line, 1, "missing `bound` line"))?;
    NnccmMachine::new(counters, bound, tests).map_err(|e| Error::parse(line, 1, e.to_string()))
}

pub fn write_machine(m: &NnccmMachine) -> String {
    let mut out = format!("counters {}\nbound {}\n", m.counters, m.bound);
    for t in &m.tests {
        let _ = writeln!(out, "test {} {} {} {}", t.i, t.a, t.j, t.b);
    }
    out
}

/// Integer program text: `var <name> <lo> <hi>`, `con <terms> <op> <rhs>`
/// with terms like `2*x + -1*y - z` and `op` one of `<=`, `>=`, `=`, and an
/// optional `min <terms>`.
pub fn parse_ilp(text: &str) -> Result<IlpModel<i64>> {
    let mut model = IlpModel::<i64>::new();
    let mut objective_seen = false;
    for l in lines(text) {
        match l.keyword() {
            "var" => {
                l.arity(3, 3)?;
                let name = l.field(0)?;
                if model.var_by_name(name.text).is_some() {
                    return Err(name.err(format!("variable `{}` declared twice", name.text)));
                }
                model.add_var(name.text, l.field(1)?.int()?, l.field(2)?.int()?);
            }
            "con" => {
                let f = l.fields();
                let Some(pos) = f.iter().position(|t| matches!(t.text, "<=" | ">=" | "=" | "==")) else {
                    return Err(l.err("constraint needs one of <=, >=, ="));
                };
                let rel = match f[pos].text {
                    "<=" => Relation::Le,
                    ">=" => Relation::Ge,
                    _ => Relation::Eq,
                };
                if f.len() != pos + 2 {
                    return Err(l.field(pos + 1).map_or_else(|e| e, |t| t.err("expected a single right-hand side")));
                }
                let terms = parse_terms(&model, &f[..pos], &l)?;
                model.add_constraint(terms, rel, f[pos + 1].int()?)?;
            }
            "min" => {
                if std::mem::replace(&mut objective_seen, true) {
                    return Err(l.err("duplicate objective"));
                }
                let terms = parse_terms(&model, l.fields(), &l)?;
                model.set_objective(terms)?;
            }
            other => return Err(l.err(format!("unknown ILP line `{other}`"))),
        }
    }
    Ok(model)
}

fn parse_terms(model: &IlpModel<i64>, toks: &[Token<'_>], l: &Line<'_>) -> Result<Vec<(usize, i64)>> {
    let mut terms = Vec::new();
    let mut sign = 1i64;
    let mut expect_term = true;
    for t in toks {
        match t.text {
            "+" | "-" if expect_term || terms.is_empty() => {
                if t.text == "-" {
                    sign = -sign;
                }
            }
            "+" | "-" => {
                sign = if t.text == "-" { -1 } else { 1 };
                expect_term = true;
            }
            _ => {
                if !expect_term {
                    return Err(t.err("expected `+` or `-` between terms"));
                }
                let (coef, name, name_col) = match t.text.split_once('*') {
                    Some((c, v)) => {
                        let c = c.parse::<i64>().map_err(|_| t.err(format!("bad coefficient `{c}`")))?;
                        (c, v, t.column + t.text.find('*').unwrap() + 1)
                    }
                    None => match t.text.parse::<i64>() {
                        Ok(_) => return Err(t.err("constants belong on the right-hand side")),
                        Err(_) => {
                            let (neg, v) = match t.text.strip_prefix('-') {
                                Some(v) => (-1, v),
                                None => (1, t.text),
                            };
                            (neg, v, t.column)
                        }
                    },
                };
                let var = model
                    .var_by_name(name)
                    .ok_or_else(|| Error::parse(t.line, name_col, format!("unknown variable `{name}`")))?;
                terms.push((var, sign * coef));
                sign = 1;
                expect_term = false;
            }
        }
    }
    if expect_term && !terms.is_empty() || (terms.is_empty() && !toks.is_empty()) {
        return Err(l.err("dangling sign in linear expression"));
    }
    Ok(terms)
}

#[cfg(test)]
mod tests {
    use super::*;

    const TRIANGLE: &str = "problem ORO\nv 0\nv 1\nv 2\ne 0 0 1 1\ne 1 1 2 1\ne 2 2 0 1\n\
                            interval 0 1 1\ninterval 1 1 1\ninterval 2 1 1\n";

    #[test]
    fn instance_round_trip() {
        let inst = parse_instance(TRIANGLE).unwrap();
        assert_eq!(inst.kind(), ProblemKind::Oro);
        assert_eq!(parse_instance(&write_instance(&inst)).unwrap(), inst);
    }

    #[test]
    fn errors_have_positions() {
        let bad = TRIANGLE.replace("e 1 1 2 1", "e 1 1 7 1");
        match parse_instance(&bad) {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (6, 7)),
            other => panic!("{other:?}"),
        }
        let bad = TRIANGLE.replace("interval 2 1 1\n", "");
        assert!(matches!(parse_instance(&bad), Err(Error::Parse { .. })));
        let bad = TRIANGLE.replace("e 2 2 0 1\n", "");
        assert!(parse_instance(&bad).is_ok());
        let disconnected = "problem CO\nv 0\nv 1\n";
        assert!(matches!(parse_instance(disconnected), Err(Error::Parse { .. })));
        let unknown = "problem XYZ\n";
        assert!(matches!(parse_instance(unknown), Err(Error::Parse { line: 1, column: 9, .. })));
    }

    #[test]
    fn every_kind_round_trips() {
        let texts = [
            "problem TOO\nv 0\nv 1\ne 0 0 1 2\ntarget 0 2\ntarget 1 0\n",
            "problem CMO\nv 0\nv 1\ne 0 0 1 2\nbound 0 1\nbound 1 1\n",
            "problem MMO\nv 0\nv 1\ne 0 0 1 2\nmaxout 2\n",
            "problem CO\nv 0\nv 1\ne 0 0 1 2\n",
            "problem UFLB\nv 0\nv 1\ne 0 0 1 2 1\nsource 0\nsink 1\nvalue 2\n",
            "problem AONF\nv 0\nv 1\narc 0 0 1 3\nsource 0\nsink 1\nvalue 3\n",
            "problem CDS\nv 0\nv 1\ne 0 0 1 1\ncap 0 1\ncap 1 1\nbudget 1\n",
            "problem CRBDS\nv 0\nv 1\ne 0 0 1 1\nred 0\nblue 1\ncap 0 1\npin 1 0\nbudget 1\n",
        ];
        for t in texts {
            let inst = parse_instance(t).unwrap_or_else(|e| panic!("{t}: {e}"));
            assert_eq!(write_instance(&inst), t);
        }
    }

    #[test]
    fn witness_round_trip() {
        let inst = parse_instance(TRIANGLE).unwrap();
        let g = inst.graph().unwrap();
        let o = Orientation::all_forward(3);
        let w = parse_witness(&write_orientation(g, &o)).unwrap();
        assert_eq!(w.orientation(g).unwrap(), o);
        assert_eq!(check_witness(&inst, &w).unwrap(), WitnessCheck::Valid { size: None });
        let w = parse_witness("orient 0 1 0\norient 1 1 2\norient 2 2 0\n").unwrap();
        assert!(matches!(check_witness(&inst, &w).unwrap(), WitnessCheck::Invalid(_)));
        assert!(parse_witness("orient 0 1\n").is_err());
        let d = DominationWitness { dominators: vec![0], assignment: vec![None, Some(0)] };
        let w = parse_witness(&write_domination(&d)).unwrap();
        assert_eq!(w.domination(2).unwrap(), d);
    }

    #[test]
    fn partition_round_trip() {
        let text = "tnode 0\ntnode 1\ntarc 0 1\nbag 0 0 1\nbag 1 2 3\nroot 1\nsubdivide 2 3\n";
        let p = parse_partition(text).unwrap();
        assert_eq!(p.partition.root, 1);
        assert_eq!(p.chains.as_ref().unwrap()[&2], vec![3]);
        assert_eq!(write_partition(&p), text);
        let pd = parse_partition("pathdecomp\nbag 0 0 1\nbag 1 1 2\n").unwrap();
        assert!(pd.pathdecomp);
        assert_eq!(pd.partition.arcs, vec![(0, 1)]);
        assert!(parse_partition("tarc 0 5\nbag 0 1\n").is_err());
    }

    #[test]
    fn morphism_fold_of_four_cycle() {
        let text = "v 0\nv 1\nv 2\nv 3\ne 0 0 1 1\ne 1 1 2 1\ne 2 2 3 1\ne 3 3 0 1\n\
                    tnode 0\ntnode 1\ntnode 2\ntarc 0 1\ntarc 1 2\n\
                    vmap 0 0\nvmap 1 1\nvmap 2 2\nvmap 3 1\n\
                    emap 0 0\nemap 1 1\nemap 2 1\nemap 3 0\n\
                    index 0 1\nindex 1 1\nindex 2 1\nindex 3 1\n";
        let (g, m) = parse_morphism(text).unwrap();
        assert_eq!(crate::tree::validate_harmonic_morphism(&m), Ok(2));
        let again = parse_morphism(&write_morphism(&g, &m)).unwrap();
        assert_eq!(again, (g, m));
    }

    #[test]
    fn machine_round_trip() {
        let m = parse_machine("counters 2\nbound 1\ntest 1 0 2 1\n").unwrap();
        assert_eq!(m.tests, vec![Test { i: 1, a: 0, j: 2, b: 1 }]);
        assert_eq!(parse_machine(&write_machine(&m)).unwrap(), m);
        assert!(parse_machine("counters 1\nbound 1\ntest 1 0 2 0\n").is_err());
    }

    #[test]
    fn ilp_text() {
        let m = parse_ilp("var x 0 5\nvar y 0 5\ncon 1*x + 2*y <= 7\ncon x - y >= -1\nmin -1*x - y\n").unwrap();
        assert_eq!(m.num_vars(), 2);
        match crate::ilp::solve_ilp(&m).unwrap() {
            crate::ilp::IlpOutcome::Optimal { value, .. } => assert_eq!(value, -6),
            other => panic!("{other:?}"),
        }
        match parse_ilp("var x 0 1\ncon 1*z <= 1\n") {
            Err(Error::Parse { line: 2, column: 7, .. }) => {}
            other => panic!("{other:?}"),
        }
        assert!(parse_ilp("var x 0 1\ncon x + <= 1\n").is_err());
    }
}
