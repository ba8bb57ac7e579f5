use std::process::Command;
use std::sync::Arc;

use cpr::causal::{DependencyMatrix, EstimatorConfig, InputToken, Method};
use cpr::harness::{analyze, explain_bug, Corpus, CorpusMetadata, ExplainConfig, PipelineConfig};
use cpr::model::{CopyModel, ModelHandle, ProgramInput, RepairCandidate};
use cpr::perturb::{AugmentOp, PerturbationConfig, Perturber};
use cpr::rerank::{changed_positions, relevance_score};
use cpr::tokenizer::{tokenize_code, tokenize_comment, Stopwords, Stream};
use serde_json::Value;

fn cpr() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cpr"))
}

fn rd(seed: u64) -> PipelineConfig {
    PipelineConfig {
        perturb: PerturbationConfig {
            alpha: 0.3,
            m_dist: 100,
            op: AugmentOp::RD,
            seed,
            perturb_code: false,
            perturb_comment: true,
        },
        ..Default::default()
    }
}

#[test]
fn toy_model_fixes_exclusive_loop() {
    let input = ProgramInput::new(
        tokenize_code("for ( i = 0 ; i <= n ; i ++ )"),
        tokenize_comment("loop is exclusive of n", Stopwords::bundled()),
    )
    .unwrap();
    let out = ModelHandle::toy().query(&input, 5).unwrap();
    assert_eq!(out.top().tokens.texts(), tokenize_code("for ( i = 0 ; i < n ; i ++ )").texts());

    let plain = ProgramInput::new(tokenize_code("x = y ;"), tokenize_comment("copy y", Stopwords::bundled())).unwrap();
    let out = ModelHandle::toy().query(&plain, 5).unwrap();
    assert_eq!(out.len(), 1);
    assert_eq!(out.top().tokens.texts(), plain.code().texts());
}

#[test]
fn mis_prioritized_bugs_are_promoted() {
    let corpus = Corpus::bundled();
    let meta = CorpusMetadata::bundled();
    let model = ModelHandle::toy();
    assert!(!meta.mis_prioritized.is_empty());
    for id in &meta.mis_prioritized {
        let bug = corpus.get(id).unwrap();
        let a = analyze(&bug.input().unwrap(), &model, &Perturber::bundled(), &PipelineConfig::default()).unwrap();
        let fixed = bug.fixed_tokens();
        assert_eq!(a.baseline.rank_of(&fixed), Some(2), "{id}");
        assert_eq!(a.reranked.output.rank_of(&fixed), Some(1), "{id}");
        assert_eq!(a.perturbed_outputs.len(), 100);
    }
}

#[test]
fn exclusive_loop_explanation_points_at_the_comment() {
    let corpus = Corpus::bundled();
    let bug = corpus.get("bound-sum").unwrap();
    let e = explain_bug(bug, &ModelHandle::toy(), &Perturber::bundled(), &rd(7), &ExplainConfig::default()).unwrap();
    let json = e.graph.to_json();
    let nodes = json["nodes"].as_array().unwrap();
    let target = nodes
        .iter()
        .find(|n| n["text"] == "<" && n["role"] == "repaired_code")
        .expect("`<` is in the explanation")["id"]
        .as_u64()
        .unwrap();
    let strongest = json["edges"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|edge| edge["target"] == target)
        .max_by(|a, b| a["weight"].as_f64().unwrap().total_cmp(&b["weight"].as_f64().unwrap()))
        .unwrap();
    let source = &nodes[strongest["source"].as_u64().unwrap() as usize];
    assert!(source["text"] == "exclusive" || source["text"] == "<=", "{source}");
}

#[test]
fn identity_patch_gives_flagged_empty_explanation() {
    let corpus = Corpus::bundled();
    let bug = corpus.get("none-gap").unwrap();
    let model = ModelHandle::in_process(Arc::new(CopyModel));
    let e = explain_bug(bug, &model, &Perturber::bundled(), &rd(3), &ExplainConfig::default()).unwrap();
    assert!(e.graph.is_empty());
    assert!(!e.graph.warnings.is_empty());
    assert!(e.analysis.dependencies.input_vocab.iter().any(|t| t.stream == Stream::Comment));
}

#[test]
fn copy_model_sees_no_cause_for_a_new_token() {
    let corpus = Corpus::bundled();
    let bug = corpus.get("bound-sum").unwrap();
    let input = bug.input().unwrap();
    let mut cfg = rd(5);
    cfg.perturb.perturb_code = true;
    cfg.perturb.m_dist = 200;
    let a = analyze(&input, &ModelHandle::in_process(Arc::new(CopyModel)), &Perturber::bundled(), &cfg).unwrap();
    // Changing `<=` into `<`, which the copy model never emits.
    let candidate = RepairCandidate::new(bug.fixed_tokens(), 0.0).unwrap();
    let changed = changed_positions(input.code(), &candidate.tokens);
    assert_eq!(changed.len(), 1);
    let rel = relevance_score(&candidate, &a.dependencies, &changed);
    assert!(rel.score <= 1e-6);
    assert_eq!(rel.missing, ["<"]);
}

#[test]
fn single_changed_token_takes_its_best_weight() {
    let deps = DependencyMatrix {
        input_vocab: ["a", "b"]
            .iter()
            .enumerate()
            .map(|(i, t)| InputToken { text: t.to_string(), stream: Stream::Code, position: i })
            .collect(),
        output_vocab: vec!["x".into(), "y".into()],
        w: vec![0.5, -1.0, 2.5, 0.25],
        bias: vec![0.0, 0.0],
        method: Method::Logistic,
        config: EstimatorConfig::default(),
        constant_inputs: vec![false, false],
        columns: vec![],
    };
    let c = RepairCandidate::new(tokenize_code("x"), 0.0).unwrap();
    assert_eq!(relevance_score(&c, &deps, &[0]).score, 2.5);
    assert_eq!(relevance_score(&c, &deps, &[]).score, 0.0);
}

#[test]
fn cli_explain_writes_graph_and_pre_selection() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("bound.dot");
    let status = cpr()
        .args(["explain", "--bug", "bound-sum", "--op", "RD", "--alpha", "0.3", "--pre-selection", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let dot = std::fs::read_to_string(&out).unwrap();
    assert!(dot.starts_with("digraph explanation {"));
    assert!(dot.contains("fillcolor=blue"));
    assert!(dir.path().join("bound.pre.dot").exists());

    let json_out = dir.path().join("bound.json");
    assert!(cpr()
        .args(["explain", "--bug", "bound-sum", "--op", "RD", "--alpha", "0.3", "--select", "1", "--out"])
        .arg(&json_out)
        .status()
        .unwrap()
        .success());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&json_out).unwrap()).unwrap();
    assert_eq!(v["clusters"].as_array().unwrap().len(), 1);
}

#[test]
fn cli_perturb_and_rerank() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("samples.jsonl");
    assert!(cpr()
        .args(["perturb", "--bug", "bound-sum", "--op", "RS", "--mdist", "12", "--out"])
        .arg(&out)
        .status()
        .unwrap()
        .success());
    let lines: Vec<Value> = std::fs::read_to_string(&out)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 12);
    for (i, l) in lines.iter().enumerate() {
        assert_eq!(l["index"], i);
        assert!(l["retained"].as_array().unwrap().iter().all(|k| k == true));
    }

    let run = cpr()
        .args(["rerank", "--bug", "mp-pointer-bound", "--explain-rerank"])
        .output()
        .unwrap();
    assert!(run.status.success());
    let v: Value = serde_json::from_slice(&run.stdout).unwrap();
    assert_eq!(v["reference_rank_before"], 2);
    assert_eq!(v["reference_rank_after"], 1);
    let first = &v["candidates"][0];
    assert_eq!(first["model_rank"], 2);
    assert!(first["stability"].as_f64().unwrap() > v["candidates"][1]["stability"].as_f64().unwrap());
}

#[test]
fn cli_sweep_report_has_every_operator() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("sweep.json");
    assert!(cpr()
        .args(["eval", "--sweep-ops", "--mdist", "20", "--report"])
        .arg(&report)
        .output()
        .unwrap()
        .status
        .success());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    let ops: Vec<&str> = v["rows"].as_array().unwrap().iter().map(|r| r["op"].as_str().unwrap()).collect();
    assert_eq!(ops, ["SR", "RI", "RS", "RD", "BT"]);
}

#[test]
fn cli_exit_codes() {
    let code = |args: &[&str]| cpr().args(args).output().unwrap().status.code();
    assert_eq!(code(&["eval", "--alpha", "1.5"]), Some(1));
    assert_eq!(code(&["explain", "--bug", "no-such-bug"]), Some(1));
    assert_eq!(code(&["eval", "--op", "XX"]), Some(1));
    assert_eq!(code(&["eval", "--corpus", "/nonexistent/corpus.jsonl"]), Some(1));
    assert_eq!(code(&["rerank", "--bug", "bound-sum", "--model", "cmd:false"]), Some(2));
    assert_eq!(code(&["rerank", "--bug", "bound-sum", "--model", "http://127.0.0.1:9"]), Some(2));
    assert_eq!(code(&["--help"]), Some(0));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.jsonl");
    std::fs::write(&bad, "{\"id\":\"a\",\"language\":\"c\",\"buggy\":\"x\",\"comment\":\"\"}\n").unwrap();
    let run = cpr().args(["eval", "--corpus"]).arg(&bad).output().unwrap();
    assert_eq!(run.status.code(), Some(1));
    let err = String::from_utf8_lossy(&run.stderr);
    assert!(err.contains("fixed") && err.contains("line 1"), "{err}");
}

#[test]
fn seed_env_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let run = |seed: &str, name: &str| {
        let out = dir.path().join(name);
        assert!(cpr()
            .args(["perturb", "--bug", "bound-sum", "--op", "RD", "--alpha", "0.5", "--seed", "1", "--out"])
            .arg(&out)
            .env("CPR_SEED", seed)
            .status()
            .unwrap()
            .success());
        std::fs::read_to_string(out).unwrap()
    };
    assert_eq!(run("99", "a.jsonl"), run("99", "b.jsonl"));
    assert_ne!(run("99", "c.jsonl"), run("100", "d.jsonl"));
}
