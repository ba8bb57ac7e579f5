//! Evaluate the bundled toy repairer on the bundled corpus, with and
//! without causal reranking, for every augmentation operator.
//!
//!     cargo run --release --example toy_eval

use cpr::harness::{sweep, Corpus, CorpusMetadata, PipelineConfig};
use cpr::model::ModelHandle;
use cpr::perturb::Perturber;

fn main() -> cpr::Result<()> {
    let corpus = Corpus::bundled();
    let meta = CorpusMetadata::bundled();
    let report = sweep(&corpus, &ModelHandle::toy(), &Perturber::bundled(), &PipelineConfig::default())?;
    println!("{} bugs, {} listed as mis-prioritized", corpus.len(), meta.mis_prioritized.len());
    println!("op   without  with");
    for row in &report.rows {
        println!("{:<4} {:>7} {:>5}", row.op.as_str(), row.fixed_baseline, row.fixed_with_ci);
    }
    let sr = &report.rows[0];
    let moved: Vec<&str> = sr
        .per_bug
        .iter()
        .filter(|b| b.baseline_rank != Some(1) && b.reranked_rank == Some(1))
        .map(|b| b.id.as_str())
        .collect();
    println!("promoted to rank 1 under SR: {moved:?}");
    Ok(())
}
