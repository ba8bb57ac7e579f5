//! Tokenize a buggy loop and its comment, then show a few perturbed
//! variants under each augmentation operator.
//!
//!     cargo run --example tokenize_and_perturb

use cpr::model::ProgramInput;
use cpr::perturb::{AugmentOp, PerturbationConfig, Perturber};
use cpr::tokenizer::{detokenize, tokenize_code, tokenize_comment, Stopwords};

fn main() -> cpr::Result<()> {
    let code = tokenize_code("for(int i=0;i<=len;i++){sum+=a[i];}");
    let comment = tokenize_comment("Add up every element, with the upper limit exclusive.", Stopwords::bundled());
    println!("code    ({:>2}): {}", code.len(), detokenize(&code));
    println!("comment ({:>2}): {}", comment.len(), detokenize(&comment));
    for t in comment.tokens() {
        print!("{}:{:?} ", t.text, t.kind);
    }
    println!("\n");

    let input = ProgramInput::new(code, comment)?;
    let perturber = Perturber::bundled();
    for op in AugmentOp::ALL {
        let cfg = PerturbationConfig {
            alpha: 0.3,
            m_dist: 3,
            op,
            seed: 42,
            perturb_code: false,
            perturb_comment: true,
        };
        println!("{}:", op.as_str());
        for s in perturber.generate(&input, &cfg)? {
            let dropped = s.retained_mask.iter().filter(|&&k| !k).count();
            println!("  #{} [{dropped} changed] {}", s.index, detokenize(&s.comment));
        }
    }
    Ok(())
}
