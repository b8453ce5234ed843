mod generate;
mod reduce;
mod solve;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use gonflow::acceptance::{run_criterion, Scale};
use gonflow::format::{self, Instance, PartitionFile, WitnessCheck};
use gonflow::graph::WeightedGraph;
use gonflow::ilp::{IlpOutcome, IlpSolver};
use gonflow::tree::{morphism_to_tree_partition, validate_harmonic_morphism, validate_path_decomposition, validate_tree_partition};

/// Exit statuses shared by every subcommand.
pub const EXIT_YES: u8 = 0;
pub const EXIT_NO: u8 = 1;
pub const EXIT_RESOURCE: u8 = 2;
pub const EXIT_INPUT: u8 = 3;

#[derive(Parser)]
#[command(name = "gonflow", version, about = "Exact solvers for orientation, flow and domination problems over tree partitions")]
struct Cli {
    /// Print a JSON object instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a partition, morphism, path decomposition or witness.
    #[command(subcommand)]
    Validate(Validate),
    #[command(subcommand)]
    Convert(Convert),
    /// Apply a reduction to an instance file.
    Reduce(reduce::ReduceArgs),
    /// Decide an instance with the tree-partition algorithm or an oracle.
    Solve(solve::SolveArgs),
    /// Emit hardness instances.
    #[command(subcommand)]
    Generate(generate::Generate),
    /// Run the acceptance corpus.
    Selftest {
        /// Smoke-test sizes instead of the full corpus.
        #[arg(long)]
        quick: bool,
        /// Only these criteria, e.g. `--only 1,7`.
        #[arg(long, value_delimiter = ',')]
        only: Vec<u8>,
    },
    #[command(subcommand)]
    Ilp(IlpCommand),
}

#[derive(Subcommand)]
enum Validate {
    /// Tree partition of the graph of an instance; prints the breadth.
    Partition {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        partition: PathBuf,
    },
    /// Harmonic morphism file; prints the degree.
    Morphism { file: PathBuf },
    /// Path decomposition of the graph (or network) of an instance.
    Pathdecomp {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        partition: PathBuf,
    },
    /// Witness file against an instance.
    Witness {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        witness: PathBuf,
    },
}

#[derive(Subcommand)]
enum Convert {
    /// Tree partition of a subdivision from a harmonic morphism.
    MorphismToPartition {
        file: PathBuf,
        /// Partition file to write; stdout when absent.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum IlpCommand {
    /// Solve an integer program given as `var`/`con`/`min` lines.
    Solve { file: PathBuf },
}

/// What a subcommand reports: its exit status, text lines and the JSON
/// mirror.
pub struct Outcome {
    pub code: u8,
    pub lines: Vec<String>,
    pub json: Value,
}

impl Outcome {
    pub fn new(code: u8, line: impl Into<String>, json: Value) -> Self {
        Self { code, lines: vec![line.into()], json }
    }
}

pub fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

pub fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

pub fn load_instance(path: &Path) -> Result<Instance> {
    let text = read(path)?;
    format::parse_instance(&text).with_context(|| format!("in {}", path.display()))
}

pub fn load_partition(path: &Path) -> Result<PartitionFile> {
    let text = read(path)?;
    format::parse_partition(&text).with_context(|| format!("in {}", path.display()))
}

/// The graph a partition of `inst` lives on: the instance graph, or the
/// underlying graph of a flow network.
pub fn partition_graph(inst: &Instance) -> WeightedGraph {
    match inst {
        Instance::Aonf(a) => a.network.underlying_weighted(),
        other => other.graph().expect("graph problems carry a graph").clone(),
    }
}

/// ILP solver honouring `GONFLOW_NODE_BUDGET` (a node count, or `none`).
pub fn ilp_solver() -> Result<IlpSolver> {
    match std::env::var("GONFLOW_NODE_BUDGET") {
        Err(_) => Ok(IlpSolver::default()),
        Ok(v) if v.eq_ignore_ascii_case("none") => Ok(IlpSolver::with_node_budget(None)),
        Ok(v) => {
            let n: u64 = v.trim().parse().with_context(|| format!("GONFLOW_NODE_BUDGET={v} is not a number"))?;
            Ok(IlpSolver::with_node_budget(Some(n)))
        }
    }
}

fn validate(cmd: Validate) -> Result<Outcome> {
    match cmd {
        Validate::Partition { input, partition } => {
            let inst = load_instance(&input)?;
            let file = load_partition(&partition)?;
            let g = file.subdivision(&partition_graph(&inst))?.graph;
            match validate_tree_partition(&g, &file.partition) {
                Ok(b) => Ok(Outcome::new(
                    EXIT_YES,
                    format!("ok breadth={} width={} nodes={}", b.value, b.max_bag, file.partition.num_nodes()),
                    json!({"valid": true, "breadth": b.value, "width": b.max_bag, "nodes": file.partition.num_nodes()}),
                )),
                Err(v) => Ok(violations(v.iter().map(ToString::to_string).collect())),
            }
        }
        Validate::Morphism { file } => {
            let text = read(&file)?;
            let (_, m) = format::parse_morphism(&text).with_context(|| format!("in {}", file.display()))?;
            match validate_harmonic_morphism(&m) {
                Ok(d) => Ok(Outcome::new(EXIT_YES, format!("ok degree={d}"), json!({"valid": true, "degree": d}))),
                Err(v) => Ok(violations(v.iter().map(ToString::to_string).collect())),
            }
        }
        Validate::Pathdecomp { input, partition } => {
            let inst = load_instance(&input)?;
            let file = load_partition(&partition)?;
            let (n, edges): (usize, Vec<(usize, usize)>) = match &inst {
                Instance::Aonf(a) => (a.network.num_nodes(), a.network.arcs().iter().map(|a| (a.tail, a.head)).collect()),
                other => {
                    let g = other.graph().expect("graph problem");
                    (g.num_vertices(), g.edges().iter().map(|e| (e.u, e.v)).collect())
                }
            };
            let bags = path_order(&file)?;
            match validate_path_decomposition(n, &edges, &bags) {
                Ok(w) => Ok(Outcome::new(EXIT_YES, format!("ok width={w} bags={}", bags.len()), json!({"valid": true, "width": w, "bags": bags.len()}))),
                Err(v) => Ok(violations(v.iter().map(ToString::to_string).collect())),
            }
        }
        Validate::Witness { input, witness } => {
            let inst = load_instance(&input)?;
            let text = read(&witness)?;
            let w = format::parse_witness(&text).with_context(|| format!("in {}", witness.display()))?;
            match format::check_witness(&inst, &w)? {
                WitnessCheck::Valid { size: Some(s) } => {
                    Ok(Outcome::new(EXIT_YES, format!("ok size={s}"), json!({"valid": true, "size": s})))
                }
                WitnessCheck::Valid { size: None } => Ok(Outcome::new(EXIT_YES, "ok", json!({"valid": true}))),
                WitnessCheck::Invalid(reason) => Ok(violations(vec![reason])),
            }
        }
    }
}

/// Bags of a path decomposition in path order.
fn path_order(file: &PartitionFile) -> Result<Vec<Vec<usize>>> {
    let p = &file.partition;
    let n = p.num_nodes();
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in &p.arcs {
        adj[a].push(b);
        adj[b].push(a);
    }
    if p.arcs.len() + 1 != n || adj.iter().any(|a| a.len() > 2) {
        bail!("the bags of a path decomposition must form a path");
    }
    let Some(start) = (0..n).find(|&v| adj[v].len() <= 1) else { bail!("no end node") };
    let mut order = vec![start];
    let mut prev = usize::MAX;
    while order.len() < n {
        let cur = *order.last().expect("non-empty");
        let Some(&next) = adj[cur].iter().find(|&&x| x != prev) else { bail!("the bags of a path decomposition must form a path") };
        prev = cur;
        order.push(next);
    }
    Ok(order.into_iter().map(|v| p.bags[v].clone()).collect())
}

fn violations(list: Vec<String>) -> Outcome {
    let lines = list.iter().map(|v| format!("invalid: {v}")).collect();
    Outcome { code: EXIT_NO, lines, json: json!({"valid": false, "violations": list}) }
}

fn convert(cmd: Convert) -> Result<Outcome> {
    let Convert::MorphismToPartition { file, output } = cmd;
    let text = read(&file)?;
    let (g, m) = format::parse_morphism(&text).with_context(|| format!("in {}", file.display()))?;
    let (sub, p) = morphism_to_tree_partition(&g, &m)?;
    let b = validate_tree_partition(&sub.graph, &p)
        .map_err(|v| anyhow::anyhow!("internal error: produced partition is invalid: {v:?}"))?;
    let mut pf = PartitionFile::new(p);
    let chains: std::collections::BTreeMap<_, _> =
        sub.chains.iter().enumerate().filter(|(_, c)| !c.is_empty()).map(|(e, c)| (e, c.clone())).collect();
    if !chains.is_empty() {
        pf.chains = Some(chains);
    }
    let out = format::write_partition(&pf);
    let summary = format!("ok breadth={} nodes={} subdivisions={}", b.value, pf.partition.num_nodes(), sub.num_subdivision_vertices());
    let json = json!({"breadth": b.value, "nodes": pf.partition.num_nodes(), "subdivisions": sub.num_subdivision_vertices()});
    match output {
        Some(path) => {
            write(&path, &out)?;
            Ok(Outcome::new(EXIT_YES, summary, json))
        }
        None => {
            let mut lines: Vec<String> = out.lines().map(str::to_string).collect();
            lines.push(format!("# {summary}"));
            Ok(Outcome { code: EXIT_YES, lines, json: json!({"partition": out, "summary": json}) })
        }
    }
}

fn selftest(quick: bool, only: Vec<u8>) -> Result<Outcome> {
    let scale = if quick { Scale::quick() } else { Scale::full() };
    let mut lines = Vec::new();
    let mut reports = Vec::new();
    let mut ok = true;
    for id in 1..=9u8 {
        if !only.is_empty() && !only.contains(&id) {
            continue;
        }
        let r = run_criterion(id, &scale).expect("criteria 1 to 9 exist");
        ok &= r.passed();
        lines.push(r.line());
        reports.push(json!({
            "criterion": r.id, "passed": r.passed(), "title": r.title, "checked": r.checked,
            "failed": r.failed, "note": r.note, "seconds": r.elapsed.as_secs_f64(),
        }));
    }
    if reports.is_empty() {
        bail!("no criterion selected; criteria are numbered 1 to 9");
    }
    Ok(Outcome { code: if ok { EXIT_YES } else { EXIT_NO }, lines, json: json!({"passed": ok, "criteria": reports}) })
}

fn ilp(cmd: IlpCommand) -> Result<Outcome> {
    let IlpCommand::Solve { file } = cmd;
    let text = read(&file)?;
    let m = format::parse_ilp(&text).with_context(|| format!("in {}", file.display()))?;
    let out = ilp_solver()?.solve(&m)?;
    let names: Vec<&str> = m.vars().iter().map(|v| v.name.as_str()).collect();
    let assignment = |x: &[i64]| -> (Vec<String>, Value) {
        let lines = names.iter().zip(x).map(|(n, v)| format!("{n} = {v}")).collect();
        let obj: serde_json::Map<String, Value> = names.iter().zip(x).map(|(n, v)| (n.to_string(), json!(v))).collect();
        (lines, Value::Object(obj))
    };
    Ok(match out {
        IlpOutcome::Infeasible => Outcome::new(EXIT_NO, "infeasible", json!({"status": "infeasible"})),
        IlpOutcome::Feasible(x) => {
            let (mut lines, obj) = assignment(&x);
            lines.insert(0, "feasible".into());
            Outcome { code: EXIT_YES, lines, json: json!({"status": "feasible", "assignment": obj}) }
        }
        IlpOutcome::Optimal { assignment: x, value } => {
            let (mut lines, obj) = assignment(&x);
            lines.insert(0, format!("optimal {value}"));
            Outcome { code: EXIT_YES, lines, json: json!({"status": "optimal", "value": value, "assignment": obj}) }
        }
    })
}

fn run(cli: Cli) -> Result<Outcome> {
    match cli.command {
        Command::Validate(v) => validate(v),
        Command::Convert(c) => convert(c),
        Command::Reduce(r) => reduce::run(r),
        Command::Solve(s) => solve::run(s),
        Command::Generate(g) => generate::run(g),
        Command::Selftest { quick, only } => selftest(quick, only),
        Command::Ilp(i) => ilp(i),
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.chain().find_map(|e| e.downcast_ref::<gonflow::Error>()) {
        Some(gonflow::Error::Resource(_) | gonflow::Error::Overflow(_)) => EXIT_RESOURCE,
        _ => EXIT_INPUT,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT } else { EXIT_YES });
        }
    };
    let json = cli.json;
    match run(cli) {
        Ok(out) => {
            if json {
                let mut obj = out.json;
                if let Value::Object(map) = &mut obj {
                    map.insert("exit".into(), json!(out.code));
                }
                println!("{obj}");
            } else {
                for l in &out.lines {
                    println!("{l}");
                }
            }
            ExitCode::from(out.code)
        }
        Err(e) => {
            let code = exit_code(&e);
            if json {
                println!("{}", json!({"error": format!("{e:#}"), "exit": code}));
            } else {
                eprintln!("error: {e:#}");
            }
            ExitCode::from(code)
        }
    }
}
