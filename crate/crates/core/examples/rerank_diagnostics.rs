//! Show why reranking reorders one mis-prioritized bug: per-candidate
//! stability, relevance and blended score at several mixing weights.
//!
//!     cargo run --example rerank_diagnostics [bug-id]

use cpr::harness::{analyze, Corpus, PipelineConfig};
use cpr::model::ModelHandle;
use cpr::perturb::Perturber;

fn main() -> cpr::Result<()> {
    let id = std::env::args().nth(1).unwrap_or_else(|| "mp-cursor-step".into());
    let corpus = Corpus::bundled();
    let bug = corpus.get(&id)?;
    let fixed = bug.fixed_tokens();
    println!("{id}: {}\n  comment: {}\n  fixed:   {}", bug.buggy, bug.comment, bug.fixed);

    let model = ModelHandle::toy();
    for lambda in [0.0, 0.25, 0.5, 1.0] {
        let mut cfg = PipelineConfig::default();
        cfg.rerank.lambda_mix = lambda;
        let a = analyze(&bug.input()?, &model, &Perturber::bundled(), &cfg)?;
        println!("\nlambda_mix = {lambda}");
        for (rank, s) in a.reranked.scored.iter().enumerate() {
            let mark = if s.candidate.tokens.same_texts(&fixed) { "*" } else { " " };
            println!(
                "{mark}{}. was {}  model {:+.3}  stability {:.2}  relevance {:.2}  final {:.3}",
                rank + 1,
                s.model_rank,
                s.candidate.model_score,
                s.stability,
                s.normalized_relevance,
                s.final_score
            );
        }
    }
    println!("\nround trips to the model: {}", model.round_trips());
    Ok(())
}
