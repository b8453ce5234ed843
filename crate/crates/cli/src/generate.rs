use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, Subcommand};
use serde_json::json;

use gonflow::format::{self, Instance, PartitionFile};
use gonflow::hardness::{binpacking_to_aonf, binpacking_to_too, nnccm_to_aonf};
use gonflow::tree::TreePartition;

use crate::{read, write, Outcome, EXIT_YES};

#[derive(Subcommand)]
pub enum Generate {
    /// All-or-nothing flow network simulating a counter machine; the
    /// partition file receives a path decomposition of the network.
    NnccmAonf {
        #[arg(long)]
        machine: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[arg(long)]
        partition: Option<PathBuf>,
    },
    /// Target outdegree orientation encoding a bin packing instance.
    BinpackingToo(Packing),
    /// All-or-nothing flow encoding a bin packing instance.
    BinpackingAonf(Packing),
}

#[derive(Args)]
pub struct Packing {
    /// Item sizes, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    items: Vec<i64>,
    #[arg(long)]
    bins: usize,
    /// Bin size.
    #[arg(long)]
    size: i64,
    #[arg(long)]
    output: PathBuf,
}

fn summary(inst: &Instance) -> String {
    match inst {
        Instance::Aonf(a) => format!("nodes={} arcs={} value={}", a.network.num_nodes(), a.network.num_arcs(), a.value),
        other => {
            let g = other.graph().expect("graph problem");
            format!("vertices={} edges={}", g.num_vertices(), g.num_edges())
        }
    }
}

pub fn run(cmd: Generate) -> Result<Outcome> {
    match cmd {
        Generate::NnccmAonf { machine, output, partition } => {
            let m = format::parse_machine(&read(&machine)?).with_context(|| format!("in {}", machine.display()))?;
            let net = nnccm_to_aonf(&m)?;
            let inst = Instance::Aonf(net.instance.clone());
            let header = format!(
                "# generated nnccm-aonf\n# counters {} bound {} tests {}\n# L {} value {}\n",
                m.counters,
                m.bound,
                m.tests.len(),
                net.big_l,
                net.value()
            );
            write(&output, &format!("{header}{}", format::write_instance(&inst)))?;
            let mut line = format!("ok {} L={}", summary(&inst), net.big_l);
            let mut json = json!({"nodes": net.instance.network.num_nodes(), "arcs": net.instance.network.num_arcs(),
                "value": net.value(), "big_l": net.big_l});
            if let Some(path) = partition {
                let width = net.path_decomposition.iter().map(Vec::len).max().unwrap_or(1).saturating_sub(1);
                let mut pf = PartitionFile::new(TreePartition::path(net.path_decomposition.clone()));
                pf.pathdecomp = true;
                write(&path, &format::write_partition(&pf))?;
                line.push_str(&format!(" pathwidth<={width}"));
                json["pathwidth"] = json!(width);
            }
            Ok(Outcome::new(EXIT_YES, line, json))
        }
        Generate::BinpackingToo(p) => {
            let red = binpacking_to_too(&p.items, p.size, p.bins)?;
            let inst = Instance::Too(red.instance);
            let cover: Vec<String> = red.vertex_cover.iter().map(ToString::to_string).collect();
            let header = format!("# generated binpacking-too\n# vertex cover {}\n", cover.join(" "));
            write(&p.output, &format!("{header}{}", format::write_instance(&inst)))?;
            Ok(Outcome::new(
                EXIT_YES,
                format!("ok {} cover={}", summary(&inst), red.vertex_cover.len()),
                json!({"vertex_cover": red.vertex_cover}),
            ))
        }
        Generate::BinpackingAonf(p) => {
            let inst = Instance::Aonf(binpacking_to_aonf(&p.items, p.size, p.bins)?);
            write(&p.output, &format!("# generated binpacking-aonf\n{}", format::write_instance(&inst)))?;
            Ok(Outcome::new(EXIT_YES, format!("ok {}", summary(&inst)), json!({"summary": summary(&inst)})))
        }
    }
}
