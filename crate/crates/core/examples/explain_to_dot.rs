//! Explain one corpus bug and write the selected subgraph as Graphviz DOT
//! (and the unselected graph next to it).
//!
//!     cargo run --example explain_to_dot [bug-id] [out.dot]
//!     dot -Tsvg out.dot > out.svg

use cpr::harness::{explain_bug, Corpus, ExplainConfig, PipelineConfig};
use cpr::model::ModelHandle;
use cpr::partition::to_dot;
use cpr::perturb::{AugmentOp, Perturber};

fn main() -> cpr::Result<()> {
    let mut args = std::env::args().skip(1);
    let id = args.next().unwrap_or_else(|| "bound-sum".into());
    let out = args.next().unwrap_or_else(|| "explanation.dot".into());

    let mut cfg = PipelineConfig::default();
    cfg.perturb.op = AugmentOp::RD;
    cfg.perturb.alpha = 0.3;
    let corpus = Corpus::bundled();
    let e = explain_bug(corpus.get(&id)?, &ModelHandle::toy(), &Perturber::bundled(), &cfg, &ExplainConfig::default())?;
    for w in &e.graph.warnings {
        eprintln!("warning: {w}");
    }
    println!("k = {}, {} of {} nodes kept", e.k, e.graph.nodes.len(), e.pre_selection.nodes.len());
    for (target, node) in e.graph.nodes.iter().enumerate() {
        if let Some(src) = e.graph.strongest_source(target) {
            println!("  {:>10} <- {:<10} ({:?})", node.text, e.graph.nodes[src].text, e.graph.nodes[src].role);
        }
    }
    std::fs::write(&out, to_dot(&e.graph))?;
    std::fs::write(out.replace(".dot", ".pre.dot"), to_dot(&e.pre_selection))?;
    println!("wrote {out}");
    Ok(())
}
