//! Plug an in-process model into the pipeline by implementing
//! `RepairModel`. This one flips the first comparison operator, and only
//! when the comment says "strict".
//!
//!     cargo run --example custom_model

use std::sync::Arc;

use cpr::error::ModelError;
use cpr::harness::{explain_input, ExplainConfig, PipelineConfig};
use cpr::model::{ModelHandle, ProgramInput, RepairCandidate, RepairModel, RepairOutput};
use cpr::perturb::{AugmentOp, Perturber};
use cpr::tokenizer::{tokenize_code, tokenize_comment, Language, Stopwords, TokenSequence};

struct StrictFlipper;

impl RepairModel for StrictFlipper {
    fn name(&self) -> &str {
        "strict-flipper"
    }

    fn repair(&self, input: &ProgramInput, beam: usize) -> Result<RepairOutput, ModelError> {
        let mut texts = input.code().owned_texts();
        let strict = input.comment().texts().contains(&"strict");
        let mut candidates = vec![RepairCandidate::new(input.code().clone(), -1.0)?];
        if let Some(op) = texts.iter_mut().find(|t| *t == "<=" || *t == ">=") {
            *op = if op == "<=" { "<".into() } else { ">".into() };
            let score = if strict { -0.1 } else { -2.0 };
            candidates.push(RepairCandidate::new(TokenSequence::code_from_texts(&texts, Language::Other), score)?);
        }
        RepairOutput::new(candidates, beam)
    }
}

fn main() -> cpr::Result<()> {
    let input = ProgramInput::new(
        tokenize_code("while ( lo <= hi ) { mid = ( lo + hi ) / 2 ; }"),
        tokenize_comment("search while the bounds are in strict order", Stopwords::bundled()),
    )?;
    let model = ModelHandle::in_process(Arc::new(StrictFlipper));
    let mut cfg = PipelineConfig::default();
    cfg.perturb.op = AugmentOp::RD;
    cfg.perturb.alpha = 0.3;
    let e = explain_input(&input, &model, &Perturber::bundled(), &cfg, &ExplainConfig::default())?;
    println!("top answer: {}", e.analysis.baseline.top().tokens);
    let w = &e.analysis.dependencies;
    if let Some(j) = w.output_index("<") {
        let i = w.strongest_input(j).expect("inputs exist");
        println!("`<` depends most on {:?} (weight {:.2})", w.input_vocab[i].text, w.weight(i, j));
    }
    println!("{}", serde_json::to_string_pretty(&e.graph.to_json()).expect("graph serializes"));
    Ok(())
}
