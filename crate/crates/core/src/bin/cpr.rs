use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};

use cpr::causal::Method;
use cpr::harness::{self, Corpus, ExplainConfig, PipelineConfig};
use cpr::model::ModelHandle;
use cpr::partition::to_dot;
use cpr::perturb::{AugmentOp, Perturber};
use cpr::Error;

#[derive(Parser)]
#[command(name = "cpr", version, about = "Explain and rerank black-box program repair models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the explanation graph for one bug.
    Explain(ExplainArgs),
    /// Count bugs fixed before and after reranking.
    Eval(EvalArgs),
    /// Write the perturbed variants of one bug as JSON Lines.
    Perturb(PerturbArgs),
    /// Show the reranked candidate list for one bug.
    Rerank(RerankArgs),
}

#[derive(Args)]
struct Common {
    /// JSON Lines corpus; the bundled synthetic corpus when omitted.
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// toy | copy | cmd:<shell command> | http:<base url>
    #[arg(long, default_value = "toy")]
    model: String,
    #[arg(long, default_value = "SR")]
    op: AugmentOp,
    #[arg(long, default_value_t = 0.1)]
    alpha: f64,
    #[arg(long, default_value_t = 100)]
    mdist: usize,
    /// Perturbation seed; CPR_SEED takes precedence.
    #[arg(long)]
    seed: Option<u64>,
    /// Perturb the code stream as well as the comment.
    #[arg(long)]
    perturb_code: bool,
    /// Weight of causal evidence when reranking.
    #[arg(long, default_value_t = 0.5)]
    lambda: f64,
    #[arg(long, default_value_t = 5)]
    beam: usize,
    #[arg(long, default_value = "logistic", value_parser = parse_method)]
    method: Method,
    /// Model query timeout in seconds.
    #[arg(long, default_value_t = 30)]
    timeout: u64,
    /// Directory for the on-disk response cache.
    #[arg(long)]
    cache_dir: Option<PathBuf>,
}

#[derive(Args)]
struct ExplainArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    bug: String,
    /// Co-cluster count; derived from graph size when omitted.
    #[arg(long)]
    k: Option<usize>,
    /// Number of clusters kept.
    #[arg(long, default_value_t = 3)]
    select: usize,
    #[arg(long, default_value_t = 0.75)]
    tau: f64,
    /// Output file, .dot or .json; JSON on stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the graph before selection, next to --out.
    #[arg(long)]
    pre_selection: bool,
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    common: Common,
    /// Run every augmentation operator.
    #[arg(long)]
    sweep_ops: bool,
    /// Report path; stdout when omitted.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Bugs evaluated at once; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    workers: usize,
}

#[derive(Args)]
struct PerturbArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    bug: String,
    /// JSON Lines output; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RerankArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    bug: String,
    /// Print per-candidate stability, relevance and final score.
    #[arg(long)]
    explain_rerank: bool,
}

fn parse_method(s: &str) -> Result<Method, String> {
    match s.to_ascii_lowercase().as_str() {
        "logistic" => Ok(Method::Logistic),
        "pmi" => Ok(Method::Pmi),
        _ => Err(format!("unknown method {s:?}, expected logistic|pmi")),
    }
}

impl Common {
    fn corpus(&self) -> Result<Corpus, Error> {
        match &self.corpus {
            Some(path) => Ok(Corpus::load(path)?),
            None => Ok(Corpus::bundled()),
        }
    }

    fn model(&self) -> Result<ModelHandle, Error> {
        let handle = ModelHandle::from_spec(&self.model, Duration::from_secs(self.timeout))?;
        Ok(match &self.cache_dir {
            Some(dir) => handle.with_spill_dir(dir),
            None => handle,
        })
    }

    fn config(&self) -> Result<PipelineConfig, Error> {
        let mut cfg = PipelineConfig::default();
        cfg.perturb.op = self.op;
        cfg.perturb.alpha = self.alpha;
        cfg.perturb.m_dist = self.mdist;
        cfg.perturb.perturb_code = self.perturb_code;
        if let Some(seed) = self.seed {
            cfg.perturb.seed = seed;
        }
        cfg.rerank.lambda_mix = self.lambda;
        cfg.estimator.method = self.method;
        cfg.beam = self.beam;
        let cfg = cfg.with_env_seed()?;
        cfg.validate()?;
        Ok(cfg)
    }
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), Error> {
    match path {
        Some(p) => fs::write(p, text)?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            if !text.ends_with('\n') {
                out.write_all(b"\n")?;
            }
        }
    }
    Ok(())
}

fn render(graph: &cpr::partition::ExplanationGraph, path: Option<&Path>) -> String {
    match path.and_then(|p| p.extension()).and_then(|e| e.to_str()) {
        Some("dot") | Some("gv") => to_dot(graph),
        _ => serde_json::to_string_pretty(&graph.to_json()).expect("graph serializes"),
    }
}

fn pre_selection_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match out.extension() {
        Some(ext) => format!("{stem}.pre.{}", ext.to_string_lossy()),
        None => format!("{stem}.pre"),
    };
    out.with_file_name(name)
}

fn explain(args: ExplainArgs) -> Result<(), Error> {
    let corpus = args.common.corpus()?;
    let bug = corpus.get(&args.bug)?;
    let cfg = args.common.config()?;
    let ex = ExplainConfig {
        k: args.k,
        select: args.select,
        tau: args.tau,
    };
    let model = args.common.model()?;
    let explanation = harness::explain_bug(bug, &model, &Perturber::bundled(), &cfg, &ex)?;
    for w in &explanation.graph.warnings {
        eprintln!("warning: {w}");
    }
    let out = args.out.as_deref();
    write_output(out, &render(&explanation.graph, out))?;
    if args.pre_selection {
        match out {
            Some(p) => {
                let pre = pre_selection_path(p);
                write_output(Some(&pre), &render(&explanation.pre_selection, Some(p)))?;
            }
            None => write_output(None, &render(&explanation.pre_selection, None))?,
        }
    }
    Ok(())
}

fn eval(args: EvalArgs) -> Result<(), Error> {
    let corpus = args.common.corpus()?;
    let mut cfg = args.common.config()?;
    cfg.workers = args.workers;
    let model = args.common.model()?;
    let perturber = Perturber::bundled();
    let json = if args.sweep_ops {
        let s = harness::sweep(&corpus, &model, &perturber, &cfg)?;
        for r in &s.rows {
            eprintln!(
                "{:<3} fixed w/o CI {:>3}  with CI {:>3}  of {}",
                r.op.as_str(),
                r.fixed_baseline,
                r.fixed_with_ci,
                r.bug_count
            );
        }
        serde_json::to_string_pretty(&s)?
    } else {
        let r = harness::evaluate(&corpus, &model, &perturber, &cfg)?;
        eprintln!(
            "fixed w/o CI {}  with CI {}  of {} ({} errors)",
            r.fixed_baseline, r.fixed_with_ci, r.bug_count, r.errors
        );
        r.to_json_pretty()
    };
    write_output(args.report.as_deref(), &json)
}

fn perturb(args: PerturbArgs) -> Result<(), Error> {
    let corpus = args.common.corpus()?;
    let bug = corpus.get(&args.bug)?;
    let cfg = args.common.config()?;
    let samples = Perturber::bundled().generate(&bug.input()?, &cfg.perturb)?;
    let mut text = String::new();
    for s in &samples {
        let line = serde_json::json!({
            "index": s.index,
            "op": s.op,
            "code": s.code.texts(),
            "comment": s.comment.texts(),
            "retained": s.retained_mask,
        });
        text.push_str(&line.to_string());
        text.push('\n');
    }
    write_output(args.out.as_deref(), &text)
}

fn rerank(args: RerankArgs) -> Result<(), Error> {
    let corpus = args.common.corpus()?;
    let bug = corpus.get(&args.bug)?;
    let cfg = args.common.config()?;
    let model = args.common.model()?;
    let analysis = harness::analyze(&bug.input()?, &model, &Perturber::bundled(), &cfg)?;
    let fixed = bug.fixed_tokens();
    if args.explain_rerank {
        let mut diag = analysis.reranked.diagnostics();
        diag["bug"] = bug.id.clone().into();
        diag["reference_rank_before"] = analysis.baseline.rank_of(&fixed).into();
        diag["reference_rank_after"] = analysis.reranked.output.rank_of(&fixed).into();
        write_output(None, &serde_json::to_string_pretty(&diag)?)
    } else {
        let mut text = String::new();
        for (i, s) in analysis.reranked.scored.iter().enumerate() {
            let mark = if s.candidate.tokens.same_texts(&fixed) { " *" } else { "" };
            text.push_str(&format!(
                "{}. (was {}) {:.3}  {}{mark}\n",
                i + 1,
                s.model_rank,
                s.final_score,
                s.candidate.tokens
            ));
        }
        write_output(None, &text)
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Explain(a) => explain(a),
        Command::Eval(a) => eval(a),
        Command::Perturb(a) => perturb(a),
        Command::Rerank(a) => rerank(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
