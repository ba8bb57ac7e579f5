//! Dependency estimation against a model whose answer is its own input.
//! Every code token should depend most on the output token with the same
//! text, which makes this a sanity check for any estimator setting.
//!
//!     cargo run --example copy_model_dependencies [logistic|pmi]

use std::sync::Arc;

use cpr::causal::{EstimatorConfig, Method};
use cpr::harness::{analyze, PipelineConfig};
use cpr::model::{CopyModel, ModelHandle, ProgramInput};
use cpr::perturb::{AugmentOp, PerturbationConfig, Perturber};
use cpr::tokenizer::{tokenize_code, tokenize_comment, Stopwords, Stream};

fn main() -> cpr::Result<()> {
    let method = match std::env::args().nth(1).as_deref() {
        Some("pmi") => Method::Pmi,
        _ => Method::Logistic,
    };
    let input = ProgramInput::new(
        tokenize_code("if ( d > best ) { best = d ; }"),
        tokenize_comment("keep the smallest distance seen so far", Stopwords::bundled()),
    )?;
    let cfg = PipelineConfig {
        perturb: PerturbationConfig {
            alpha: 0.3,
            m_dist: 200,
            op: AugmentOp::RD,
            seed: 2024,
            perturb_code: true,
            perturb_comment: true,
        },
        estimator: EstimatorConfig { method, ..Default::default() },
        ..Default::default()
    };
    let model = ModelHandle::in_process(Arc::new(CopyModel));
    let a = analyze(&input, &model, &Perturber::bundled(), &cfg)?;
    let w = &a.dependencies;
    println!("{} samples, {} inputs x {} outputs ({method:?})", a.samples.len() + 1, w.inputs(), w.outputs());
    for (i, t) in w.input_vocab.iter().enumerate() {
        if t.stream != Stream::Code {
            continue;
        }
        let j = w.strongest_output(i).expect("outputs exist");
        let mark = if w.output_vocab[j] == t.text { "" } else { "  <- mismatch" };
        println!("{:>6}@{:<2} -> {:<6} {:>7.3}{mark}", t.text, t.position, w.output_vocab[j], w.weight(i, j));
    }
    Ok(())
}
