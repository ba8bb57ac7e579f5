use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{analyze, Corpus, PipelineConfig};
use crate::error::Error;
use crate::model::ModelHandle;
use crate::perturb::{AugmentOp, Perturber};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BugResult {
    pub id: String,
    /// 1-based rank of the reference fix in the model's list.
    pub baseline_rank: Option<usize>,
    /// Same, after reranking.
    pub reranked_rank: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
}

/// Bugs fixed by the model's top-1 answer, before and after reranking.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub corpus: String,
    pub model: String,
    pub op: AugmentOp,
    /// What the two counts compare.
    pub comparison: String,
    pub bug_count: usize,
    pub fixed_baseline: usize,
    pub fixed_with_ci: usize,
    pub errors: usize,
    pub config: PipelineConfig,
    pub per_bug: Vec<BugResult>,
}

impl EvalReport {
    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// One report per augmentation operator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub corpus: String,
    pub model: String,
    pub rows: Vec<EvalReport>,
}

impl SweepReport {
    pub fn row(&self, op: AugmentOp) -> Option<&EvalReport> {
        self.rows.iter().find(|r| r.op == op)
    }
}

pub const COMPARISON: &str = "exact-match top-1 before vs after causal reranking";

fn run_bug(bug: &super::BugRecord, model: &ModelHandle, perturber: &Perturber, cfg: &PipelineConfig) -> BugResult {
    let outcome = bug
        .input()
        .map_err(Error::from)
        .and_then(|input| analyze(&input, model, perturber, cfg));
    match outcome {
        Ok(a) => {
            let fixed = bug.fixed_tokens();
            BugResult {
                id: bug.id.clone(),
                baseline_rank: a.baseline.rank_of(&fixed),
                reranked_rank: a.reranked.output.rank_of(&fixed),
                error: None,
            }
        }
        Err(e) => {
            log::warn!("bug {}: {e}", bug.id);
            BugResult {
                id: bug.id.clone(),
                baseline_rank: None,
                reranked_rank: None,
                error: Some(e.to_string()),
            }
        }
    }
}

/// Runs the pipeline on every bug. Per-bug failures are recorded and count
/// as not fixed; the report keeps corpus order.
pub fn evaluate(corpus: &Corpus, model: &ModelHandle, perturber: &Perturber, cfg: &PipelineConfig) -> Result<EvalReport, Error> {
    cfg.validate()?;
    let work = || -> Vec<BugResult> {
        corpus
            .bugs
            .par_iter()
            .map(|bug| run_bug(bug, model, perturber, cfg))
            .collect()
    };
    let per_bug = if cfg.workers == 0 {
        work()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.workers)
            .build()
            .map_err(|e| std::io::Error::other(e.to_string()))?
            .install(work)
    };
    Ok(EvalReport {
        corpus: corpus.name.clone(),
        model: model.name().to_string(),
        op: cfg.perturb.op,
        comparison: COMPARISON.into(),
        bug_count: corpus.len(),
        fixed_baseline: per_bug.iter().filter(|b| b.baseline_rank == Some(1)).count(),
        fixed_with_ci: per_bug.iter().filter(|b| b.reranked_rank == Some(1)).count(),
        errors: per_bug.iter().filter(|b| b.error.is_some()).count(),
        config: cfg.clone(),
        per_bug,
    })
}

/// [`evaluate`] once per augmentation operator, otherwise identical settings.
pub fn sweep(corpus: &Corpus, model: &ModelHandle, perturber: &Perturber, cfg: &PipelineConfig) -> Result<SweepReport, Error> {
    let rows = AugmentOp::ALL
        .iter()
        .map(|&op| {
            let mut c = cfg.clone();
            c.perturb.op = op;
            evaluate(corpus, model, perturber, &c)
        })
        .collect::<Result<_, _>>()?;
    Ok(SweepReport {
        corpus: corpus.name.clone(),
        model: model.name().to_string(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::parse_corpus;

    fn tiny() -> Corpus {
        Corpus {
            name: "tiny".into(),
            bugs: parse_corpus(concat!(
                r#"{"id":"loop","language":"java","buggy":"for ( i = 0 ; i <= n ; i ++ )","comment":"visit every index exclusive of n","fixed":"for ( i = 0 ; i < n ; i ++ )"}"#,
                "\n",
                r#"{"id":"none","language":"java","buggy":"return a ;","comment":"give back the value","fixed":"return b ;"}"#,
            ))
            .unwrap(),
        }
    }

    #[test]
    fn empty_corpus_reports_zero() {
        let c = Corpus { name: "e".into(), bugs: vec![] };
        let r = evaluate(&c, &ModelHandle::toy(), &Perturber::bundled(), &PipelineConfig::default()).unwrap();
        assert_eq!((r.bug_count, r.fixed_baseline, r.fixed_with_ci), (0, 0, 0));
        assert!(r.per_bug.is_empty());
    }

    #[test]
    fn counts_match_ranks() {
        let cfg = PipelineConfig {
            perturb: crate::perturb::PerturbationConfig { m_dist: 20, ..Default::default() },
            ..Default::default()
        };
        let r = evaluate(&tiny(), &ModelHandle::toy(), &Perturber::bundled(), &cfg).unwrap();
        assert_eq!(r.bug_count, 2);
        assert_eq!(r.per_bug[0].id, "loop");
        assert_eq!(r.per_bug[0].baseline_rank, Some(1));
        assert_eq!(r.per_bug[1].baseline_rank, None);
        assert_eq!(r.fixed_baseline, 1);
        assert_eq!(r.fixed_with_ci, 1);
        let fixed = r.per_bug.iter().filter(|b| b.reranked_rank == Some(1)).count();
        assert_eq!(fixed, r.fixed_with_ci);
    }

    #[test]
    fn sweep_has_one_row_per_op() {
        let cfg = PipelineConfig {
            perturb: crate::perturb::PerturbationConfig { m_dist: 5, ..Default::default() },
            ..Default::default()
        };
        let s = sweep(&tiny(), &ModelHandle::toy(), &Perturber::bundled(), &cfg).unwrap();
        let ops: Vec<AugmentOp> = s.rows.iter().map(|r| r.op).collect();
        assert_eq!(ops, AugmentOp::ALL.to_vec());
    }
}
