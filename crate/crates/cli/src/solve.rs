use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::{Args, ValueEnum};
use serde_json::json;

use gonflow::cds_dp::{solve_cds, solve_crbds, solve_crbds_subdivided, CdsConfig};
use gonflow::format::{self, Instance, ProblemKind};
use gonflow::graph::{Flow, Orientation, WeightedGraph};
use gonflow::oracles::{oracle_aonf, oracle_cds, oracle_crbds, oracle_lifted, oracle_uflb, AonfRoute, OracleConfig};
use gonflow::oro_dp::{solve_aonf, solve_lifted, solve_uflb, Decision, OroConfig};
use gonflow::problem::DominationAnswer;
use gonflow::reductions::LiftToOro;
use gonflow::tree::{Subdivision, TreePartition};

use crate::{ilp_solver, load_instance, load_partition, partition_graph, write, Outcome, EXIT_NO, EXIT_YES};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    /// Dynamic program over the tree partition.
    Fpt,
    /// Brute force from the definition.
    Oracle,
}

#[derive(Args)]
pub struct SolveArgs {
    /// Problem name (ORO, TOO, CMO, MMO, CO, UFLB, AONF, CDS, CRBDS); must
    /// match the instance file.
    problem: String,
    #[arg(long)]
    input: PathBuf,
    /// Tree partition; a single bag when absent.
    #[arg(long)]
    partition: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "fpt")]
    method: Method,
    /// Write a witness here on a yes answer.
    #[arg(long)]
    witness: Option<PathBuf>,
    /// Drop the breadth and bag-size limits of the dynamic programs.
    #[arg(long)]
    no_limit: bool,
}

enum Answer {
    Decision { yes: bool, witness: Option<String> },
    Domination(DominationAnswer),
}

fn orientation(d: Decision<Orientation>, g: &WeightedGraph) -> Answer {
    Answer::Decision { yes: d.is_yes(), witness: d.witness().map(|o| format::write_orientation(g, o)) }
}

fn fpt(inst: &Instance, args: &SolveArgs) -> Result<Answer> {
    let ilp = ilp_solver()?;
    let mut oro = OroConfig { ilp, ..OroConfig::default() };
    let mut cds = CdsConfig { ilp, ..CdsConfig::default() };
    if args.no_limit {
        oro.max_breadth = None;
        cds.max_width = None;
    }
    let base = partition_graph(inst);
    let (sub, t): (Option<Subdivision>, TreePartition) = match &args.partition {
        None => (None, TreePartition::single_bag(base.num_vertices())),
        Some(p) => {
            let file = load_partition(p)?;
            let sub = file.subdivision(&base)?;
            (if sub.is_identity() { None } else { Some(sub) }, file.partition)
        }
    };
    let s = sub.as_ref();
    let no_chains = |what: &str| -> Result<()> {
        if sub.is_some() {
            bail!("{what} takes a partition of the instance graph itself; subdivided partitions are supported for the orientation problems and CRBDS");
        }
        Ok(())
    };
    Ok(match inst {
        Instance::Oro(x) => orientation(solve_lifted(x, s, &t, &oro)?, &x.graph),
        Instance::Too(x) => orientation(solve_lifted(x, s, &t, &oro)?, &x.graph),
        Instance::Cmo(x) => orientation(solve_lifted(x, s, &t, &oro)?, &x.graph),
        Instance::Mmo(x) => orientation(solve_lifted(x, s, &t, &oro)?, &x.graph),
        Instance::Co(x) => orientation(solve_lifted(x, s, &t, &oro)?, &x.graph),
        Instance::Uflb(x) => {
            no_chains("UFLB")?;
            let d = solve_uflb(x, &t, &oro)?;
            Answer::Decision { yes: d.is_yes(), witness: d.witness().map(|(o, f)| uflb_witness(&x.graph, o, f)) }
        }
        Instance::Aonf(x) => {
            no_chains("AONF")?;
            let d = solve_aonf(x, &t, &oro)?;
            Answer::Decision { yes: d.is_yes(), witness: d.witness().map(format::write_flow) }
        }
        Instance::Cds(x) => {
            no_chains("CDS")?;
            Answer::Domination(solve_cds(x, &t, &cds)?)
        }
        Instance::Crbds(x) => Answer::Domination(match &sub {
            Some(s) => solve_crbds_subdivided(x, s, &t, &cds)?,
            None => solve_crbds(x, &t, &cds)?,
        }),
    })
}

fn uflb_witness(g: &WeightedGraph, o: &Orientation, f: &Flow) -> String {
    format!("{}{}", format::write_orientation(g, o), format::write_flow(f))
}

/// Any partition given is ignored.
fn oracle(inst: &Instance) -> Result<Answer> {
    let cfg = OracleConfig { ilp: ilp_solver()?, ..OracleConfig::default() };
    fn lifted<I: LiftToOro>(x: &I, g: &WeightedGraph, cfg: &OracleConfig) -> Result<Answer> {
        let o = oracle_lifted(x, cfg)?;
        Ok(Answer::Decision { yes: o.is_some(), witness: o.map(|o| format::write_orientation(g, &o)) })
    }
    match inst {
        Instance::Oro(x) => lifted(x, &x.graph, &cfg),
        Instance::Too(x) => lifted(x, &x.graph, &cfg),
        Instance::Cmo(x) => lifted(x, &x.graph, &cfg),
        Instance::Mmo(x) => lifted(x, &x.graph, &cfg),
        Instance::Co(x) => lifted(x, &x.graph, &cfg),
        Instance::Uflb(x) => {
            let w = oracle_uflb(x, &cfg)?;
            Ok(Answer::Decision { yes: w.is_some(), witness: w.map(|(o, f)| uflb_witness(&x.graph, &o, &f)) })
        }
        Instance::Aonf(x) => {
            let f = oracle_aonf(x, AonfRoute::Auto, &cfg)?;
            Ok(Answer::Decision { yes: f.is_some(), witness: f.as_ref().map(format::write_flow) })
        }
        Instance::Cds(x) => Ok(Answer::Domination(oracle_cds(x, &cfg)?)),
        Instance::Crbds(x) => Ok(Answer::Domination(oracle_crbds(x, &cfg)?)),
    }
}

pub fn run(args: SolveArgs) -> Result<Outcome> {
    let Some(kind) = ProblemKind::from_name(&args.problem) else {
        bail!("unknown problem {:?}", args.problem);
    };
    let inst = load_instance(&args.input)?;
    if inst.kind() != kind {
        bail!("{} holds a {} instance, not {kind}", args.input.display(), inst.kind());
    }
    let answer = match args.method {
        Method::Fpt => fpt(&inst, &args)?,
        Method::Oracle => oracle(&inst)?,
    };
    let method = match args.method {
        Method::Fpt => "fpt",
        Method::Oracle => "oracle",
    };
    let (code, line, mut json, witness) = match answer {
        Answer::Decision { yes, witness } => {
            let word = if yes { "yes" } else { "no" };
            (if yes { EXIT_YES } else { EXIT_NO }, word.to_string(), json!({"answer": word}), witness)
        }
        Answer::Domination(DominationAnswer::Infeasible) => (EXIT_NO, "infeasible".into(), json!({"answer": "infeasible"}), None),
        Answer::Domination(DominationAnswer::OverBudget { min_size }) => (
            EXIT_NO,
            format!("over-budget min-size={min_size}"),
            json!({"answer": "over-budget", "min_size": min_size}),
            None,
        ),
        Answer::Domination(DominationAnswer::Within { min_size, witness }) => (
            EXIT_YES,
            format!("size {min_size}"),
            json!({"answer": "size", "min_size": min_size}),
            Some(format::write_domination(&witness)),
        ),
    };
    json["problem"] = json!(kind.name());
    json["method"] = json!(method);
    if let (Some(path), Some(text)) = (&args.witness, &witness) {
        write(path, text)?;
        json["witness"] = json!(path.display().to_string());
    }
    Ok(Outcome::new(code, line, json))
}
