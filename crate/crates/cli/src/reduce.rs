use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::{Args, ValueEnum};
use serde_json::json;

use gonflow::format::{self, Instance, PartitionFile};
use gonflow::graph::WeightedGraph;
use gonflow::problem::{Interval, OroInstance};
use gonflow::reductions::{
    aonf_to_too, cds_to_crbds, co_to_too, mmo_to_cmo, too_to_cmo, too_to_co, uflb_to_co, LiftToOro, Lifted, TrivialNo,
};
use gonflow::tree::TreePartition;

use crate::{load_instance, load_partition, write, Outcome, EXIT_YES};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Reduction {
    /// Any orientation problem to ORO on the same graph.
    Lift,
    MmoToCmo,
    CoToToo,
    TooToCmo,
    TooToCo,
    AonfToToo,
    UflbToCo,
    CdsToCrbds,
}

#[derive(Args)]
pub struct ReduceArgs {
    #[arg(value_enum)]
    reduction: Reduction,
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
    /// Tree partition of the input, carried over to the output.
    #[arg(long)]
    partition: Option<PathBuf>,
    /// Where to write the carried-over partition (default `<output>.partition`).
    #[arg(long)]
    partition_output: Option<PathBuf>,
    /// Provenance sidecar (default `<output>.prov`).
    #[arg(long)]
    provenance: Option<PathBuf>,
}

/// Origin of one output element.
enum From {
    Vertex(usize),
    Edge(usize),
    Arc(usize),
    New,
}

impl std::fmt::Display for From {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            From::Vertex(v) => write!(f, "vertex {v}"),
            From::Edge(e) => write!(f, "edge {e}"),
            From::Arc(a) => write!(f, "arc {a}"),
            From::New => f.write_str("new"),
        }
    }
}

struct Reduced {
    instance: Instance,
    vertices: Vec<From>,
    edges: Vec<From>,
    partition: Option<TreePartition>,
}

fn same_graph(instance: Instance, g: &WeightedGraph, partition: Option<TreePartition>) -> Reduced {
    Reduced {
        instance,
        vertices: (0..g.num_vertices()).map(From::Vertex).collect(),
        edges: (0..g.num_edges()).map(From::Edge).collect(),
        partition,
    }
}

/// Canonical no-instance: one vertex whose outdegree must be 1.
fn trivial_no_text(reason: &TrivialNo) -> String {
    let oro = OroInstance { graph: WeightedGraph::new(1), intervals: vec![Interval::new(1, 1)] };
    format!("# trivial-no {reason}\n{}", format::write_instance(&Instance::Oro(oro)))
}

fn lifted<T>(l: Lifted<T>) -> std::result::Result<T, TrivialNo> {
    match l {
        Lifted::Instance(x) => Ok(x),
        Lifted::TrivialNo(t) => Err(t),
    }
}

fn reduce(r: Reduction, inst: &Instance, part: Option<&TreePartition>) -> Result<std::result::Result<Reduced, TrivialNo>> {
    let kept = || part.cloned();
    Ok(Ok(match (r, inst) {
        (Reduction::Lift, Instance::Aonf(_) | Instance::Uflb(_) | Instance::Cds(_) | Instance::Crbds(_)) => {
            bail!("lift applies to ORO, TOO, CMO, MMO and CO instances")
        }
        (Reduction::Lift, i) => {
            let g = i.graph().expect("orientation problem");
            let l = match i {
                Instance::Oro(x) => x.lift_to_oro(),
                Instance::Too(x) => x.lift_to_oro(),
                Instance::Cmo(x) => x.lift_to_oro(),
                Instance::Mmo(x) => x.lift_to_oro(),
                Instance::Co(x) => x.lift_to_oro(),
                _ => unreachable!(),
            };
            match lifted(l) {
                Ok(oro) => same_graph(Instance::Oro(oro), g, kept()),
                Err(t) => return Ok(Err(t)),
            }
        }
        (Reduction::MmoToCmo, Instance::Mmo(x)) => same_graph(Instance::Cmo(mmo_to_cmo(x)), &x.graph, kept()),
        (Reduction::CoToToo, Instance::Co(x)) => match lifted(co_to_too(x)) {
            Ok(too) => same_graph(Instance::Too(too), &x.graph, kept()),
            Err(t) => return Ok(Err(t)),
        },
        (Reduction::TooToCmo, Instance::Too(x)) => match lifted(too_to_cmo(x)) {
            Ok(cmo) => same_graph(Instance::Cmo(cmo), &x.graph, kept()),
            Err(t) => return Ok(Err(t)),
        },
        (Reduction::TooToCo, Instance::Too(x)) => {
            let red = too_to_co(x)?;
            let n = x.graph.num_vertices();
            let out = &red.instance.graph;
            let vertices = (0..out.num_vertices()).map(|v| if v < n { From::Vertex(v) } else { From::New }).collect();
            let edges =
                (0..out.num_edges()).map(|e| if e < red.original_edges { From::Edge(e) } else { From::New }).collect();
            // The terminals join the root bag.
            let partition = part.map(|p| {
                let mut p = p.clone();
                if let Some((s, t)) = red.terminals {
                    p.bags[p.root].extend([s, t]);
                }
                p
            });
            Reduced { instance: Instance::Co(red.instance), vertices, edges, partition }
        }
        (Reduction::AonfToToo, Instance::Aonf(x)) => {
            let red = aonf_to_too(x, part)?;
            let n = x.network.num_nodes();
            let vertices = (0..red.instance.graph.num_vertices())
                .map(|v| if v < n { From::Vertex(v) } else { From::Arc(v - n) })
                .collect();
            let edges = (0..red.instance.graph.num_edges()).map(|e| From::Arc(e / 2)).collect();
            Reduced { instance: Instance::Too(red.instance), vertices, edges, partition: red.partition }
        }
        (Reduction::UflbToCo, Instance::Uflb(x)) => {
            let red = match lifted(uflb_to_co(x, part)?) {
                Ok(r) => r,
                Err(t) => return Ok(Err(t)),
            };
            let g = &red.instance.graph;
            let n = x.graph.num_vertices();
            let mut vertices: Vec<From> = (0..g.num_vertices()).map(|v| if v < n { From::Vertex(v) } else { From::New }).collect();
            let mut edges: Vec<From> = (0..g.num_edges()).map(|_| From::New).collect();
            for (e, gadget) in red.gadgets.iter().enumerate() {
                for &(a, b) in std::iter::once(&gadget.heavy).chain(&gadget.light) {
                    for id in [a, b] {
                        edges[id] = From::Edge(e);
                        let we = g.edge(id);
                        for v in [we.u, we.v] {
                            if v >= n {
                                vertices[v] = From::Edge(e);
                            }
                        }
                    }
                }
            }
            Reduced { instance: Instance::Co(red.instance), vertices, edges, partition: red.partition }
        }
        (Reduction::CdsToCrbds, Instance::Cds(x)) => {
            let red = cds_to_crbds(x, part)?;
            let n = x.graph.num_vertices();
            let vertices = (0..2 * n).map(|v| From::Vertex(v / 2)).collect();
            let edges = (0..n).map(From::Vertex).chain((0..x.graph.num_edges()).flat_map(|e| [From::Edge(e), From::Edge(e)])).collect();
            Reduced { instance: Instance::Crbds(red.instance), vertices, edges, partition: red.partition }
        }
        (r, i) => bail!("reduction {} does not apply to {} instances", r.to_possible_value().expect("named").get_name(), i.kind()),
    }))
}

pub fn run(args: ReduceArgs) -> Result<Outcome> {
    let inst = load_instance(&args.input)?;
    let part = match &args.partition {
        Some(p) => {
            let file = load_partition(p)?;
            if file.chains.is_some() {
                bail!("reductions take a partition of the instance graph itself, without subdivide lines");
            }
            Some(file.partition)
        }
        None => None,
    };
    let name = args.reduction.to_possible_value().expect("named").get_name().to_string();
    let prov_path = args.provenance.clone().unwrap_or_else(|| sidecar(&args.output, "prov"));
    match reduce(args.reduction, &inst, part.as_ref())? {
        Err(reason) => {
            write(&args.output, &trivial_no_text(&reason))?;
            write(&prov_path, &format!("reduction {name}\ntrivial-no {reason}\n"))?;
            Ok(Outcome::new(
                EXIT_YES,
                format!("trivial-no {reason}"),
                json!({"reduction": name, "trivial_no": reason.to_string()}),
            ))
        }
        Ok(red) => {
            write(&args.output, &format::write_instance(&red.instance))?;
            let mut prov = format!("reduction {name}\n");
            for (v, from) in red.vertices.iter().enumerate() {
                prov.push_str(&format!("vertex {v} {from}\n"));
            }
            for (e, from) in red.edges.iter().enumerate() {
                prov.push_str(&format!("edge {e} {from}\n"));
            }
            write(&prov_path, &prov)?;
            let mut json = json!({
                "reduction": name,
                "from": inst.kind().name(),
                "to": red.instance.kind().name(),
                "vertices": red.vertices.len(),
                "edges": red.edges.len(),
            });
            let mut line = format!(
                "ok {} -> {} vertices={} edges={}",
                inst.kind(),
                red.instance.kind(),
                red.vertices.len(),
                red.edges.len()
            );
            if let Some(p) = red.partition.filter(|_| part.is_some()) {
                let path = args.partition_output.clone().unwrap_or_else(|| sidecar(&args.output, "partition"));
                write(&path, &format::write_partition(&PartitionFile::new(p)))?;
                line.push_str(&format!(" partition={}", path.display()));
                json["partition"] = json!(path.display().to_string());
            }
            Ok(Outcome::new(EXIT_YES, line, json))
        }
    }
}

fn sidecar(output: &std::path::Path, ext: &str) -> PathBuf {
    let mut s = output.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}
