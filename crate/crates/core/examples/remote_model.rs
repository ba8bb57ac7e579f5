//! Drive a model that lives in another process over the line protocol.
//!
//! With no argument this starts a tiny Python echo model; pass any model
//! spec (`cmd:<command>` or `http:<url>`) to use your own.
//!
//!     cargo run --example remote_model
//!     cargo run --example remote_model -- 'cmd:python3 my_model.py'

use std::time::Duration;

use cpr::harness::{analyze, Corpus, PipelineConfig};
use cpr::model::ModelHandle;
use cpr::perturb::{AugmentOp, Perturber};

const ECHO: &str = r#"
import json, sys
for line in sys.stdin:
    msg = json.loads(line)
    if "hello" in msg:
        print(json.dumps({"hello": {"protocol": 1, "name": "echo"}}), flush=True)
    else:
        print(json.dumps({"id": msg["id"], "candidates": [{"tokens": msg["code_tokens"], "score": 0.0}]}), flush=True)
"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join("cpr-remote-example");
    std::fs::create_dir_all(&dir)?;
    let spec = match std::env::args().nth(1) {
        Some(s) => s,
        None => {
            let script = dir.join("echo.py");
            std::fs::write(&script, ECHO)?;
            format!("cmd:python3 -u {}", script.display())
        }
    };
    let model = ModelHandle::from_spec(&spec, Duration::from_secs(30))?.with_spill_dir(dir.join("cache"));
    println!("connected to {} ({})", model.name(), model.identity());

    let corpus = Corpus::bundled();
    let bug = corpus.get("tail-item")?;
    let mut cfg = PipelineConfig::default();
    cfg.perturb.op = AugmentOp::RD;
    cfg.perturb.alpha = 0.3;
    cfg.perturb.perturb_code = true;
    let a = analyze(&bug.input()?, &model, &Perturber::bundled(), &cfg)?;
    println!("top answer: {}", a.baseline.top().tokens);
    println!(
        "{} perturbed queries, {} reached the model this run, {} responses cached",
        a.perturbed_outputs.len(),
        model.round_trips(),
        model.cache().len()
    );
    Ok(())
}
