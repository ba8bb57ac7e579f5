//! Dependency estimation from perturbed queries.
//!
//! Each perturbed sample becomes one row: the features are which original
//! input tokens it retained, the labels are which output tokens appear in
//! the model's top-1 answer. One binary classifier per output token then
//! yields an input × output weight matrix.

mod logistic;
mod matrix;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use logistic::{logistic_fit, pmi_score, LogisticFit, LogisticObjective};
pub use matrix::BinaryMatrix;

use crate::error::CausalError;
use crate::model::{ProgramInput, RepairOutput};
use crate::perturb::PerturbedSample;
use crate::tokenizer::Stream;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputToken {
    pub text: String,
    pub stream: Stream,
    /// Position within its own stream.
    pub position: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignMatrix {
    /// N × n retention features; row 0 is the unperturbed input.
    pub x: BinaryMatrix,
    /// N × v presence labels over `output_vocab`.
    pub y: BinaryMatrix,
    pub input_vocab: Vec<InputToken>,
    pub output_vocab: Vec<String>,
}

impl DesignMatrix {
    pub fn samples(&self) -> usize {
        self.x.rows()
    }

    pub fn output_index(&self, text: &str) -> Option<usize> {
        self.output_vocab.iter().position(|t| t == text)
    }
}

/// Stacks the unperturbed row and one row per perturbed sample.
///
/// Output vocabulary order is first appearance: the unperturbed top-1, then
/// the samples' top-1 outputs in sample order. Labels are set membership of
/// token text.
pub fn build_design_matrix(
    input: &ProgramInput,
    samples: &[PerturbedSample],
    outputs: &[RepairOutput],
    unperturbed: &RepairOutput,
) -> Result<DesignMatrix, CausalError> {
    if samples.len() != outputs.len() {
        return Err(CausalError::Alignment {
            samples: samples.len(),
            outputs: outputs.len(),
        });
    }
    let input_vocab: Vec<InputToken> = input
        .code()
        .tokens()
        .iter()
        .chain(input.comment().tokens())
        .map(|t| InputToken {
            text: t.text.clone(),
            stream: t.stream,
            position: t.position,
        })
        .collect();
    let n = input_vocab.len();
    if n == 0 {
        return Err(CausalError::Empty("input has no tokens".into()));
    }
    if let Some(bad) = samples.iter().find(|s| s.retained_mask.len() != n) {
        return Err(CausalError::Empty(format!(
            "sample {} has a mask of {} entries for {n} input tokens",
            bad.index,
            bad.retained_mask.len()
        )));
    }

    let tops: Vec<Vec<&str>> = std::iter::once(unperturbed)
        .chain(outputs)
        .map(|o| o.top().tokens.texts())
        .collect();
    let mut output_vocab: Vec<String> = Vec::new();
    let mut index = std::collections::HashMap::new();
    for top in &tops {
        for &t in top {
            index.entry(t).or_insert_with(|| {
                output_vocab.push(t.to_string());
                output_vocab.len() - 1
            });
        }
    }

    let rows = samples.len() + 1;
    let mut x = BinaryMatrix::zeros(rows, n);
    for j in 0..n {
        x.set(0, j, true);
    }
    for (r, s) in samples.iter().enumerate() {
        for (j, &keep) in s.retained_mask.iter().enumerate() {
            x.set(r + 1, j, keep);
        }
    }
    let mut y = BinaryMatrix::zeros(rows, output_vocab.len());
    for (r, top) in tops.iter().enumerate() {
        for t in top {
            y.set(r, index[t], true);
        }
    }
    Ok(DesignMatrix {
        x,
        y,
        input_vocab,
        output_vocab,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Logistic,
    Pmi,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimatorConfig {
    pub method: Method,
    pub lambda: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        Self {
            method: Method::Logistic,
            lambda: 1e-3,
            tol: 1e-6,
            max_iter: 500,
        }
    }
}

/// Per-output-column fit status.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnFit {
    pub constant_label: bool,
    pub iterations: usize,
    pub converged: bool,
}

/// Estimated association weights, `n` input tokens × `v` output tokens.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DependencyMatrix {
    pub input_vocab: Vec<InputToken>,
    pub output_vocab: Vec<String>,
    /// Row-major `n × v`.
    #[serde(rename = "W")]
    pub w: Vec<f64>,
    pub bias: Vec<f64>,
    pub method: Method,
    pub config: EstimatorConfig,
    /// Input tokens that never varied across samples (weight fixed at 0).
    pub constant_inputs: Vec<bool>,
    pub columns: Vec<ColumnFit>,
}

impl DependencyMatrix {
    pub fn inputs(&self) -> usize {
        self.input_vocab.len()
    }

    pub fn outputs(&self) -> usize {
        self.output_vocab.len()
    }

    #[inline]
    pub fn weight(&self, input: usize, output: usize) -> f64 {
        self.w[input * self.outputs() + output]
    }

    pub fn output_index(&self, text: &str) -> Option<usize> {
        self.output_vocab.iter().position(|t| t == text)
    }

    /// Output column with the largest weight for `input` (first on ties).
    pub fn strongest_output(&self, input: usize) -> Option<usize> {
        (0..self.outputs()).reduce(|best, j| {
            if self.weight(input, j) > self.weight(input, best) {
                j
            } else {
                best
            }
        })
    }

    /// Input row with the largest weight into `output` (first on ties).
    pub fn strongest_input(&self, output: usize) -> Option<usize> {
        (0..self.inputs()).reduce(|best, i| {
            if self.weight(i, output) > self.weight(best, output) {
                i
            } else {
                best
            }
        })
    }

    /// Largest positive weight into `output`, or 0.
    pub fn max_positive_incoming(&self, output: usize) -> f64 {
        (0..self.inputs())
            .map(|i| self.weight(i, output))
            .fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "input_vocab": self.input_vocab,
            "output_vocab": self.output_vocab,
            "W": self.w,
            "bias": self.bias,
            "method": self.method,
            "config": self.config,
        })
    }
}

fn smoothed_logit(y: &[bool]) -> f64 {
    let ones = y.iter().filter(|&&v| v).count() as f64;
    let p = (ones + 0.5) / (y.len() as f64 + 1.0);
    (p / (1.0 - p)).ln()
}

/// Fits one independent model per output column.
pub fn estimate_dependencies(
    dm: &DesignMatrix,
    cfg: &EstimatorConfig,
) -> Result<DependencyMatrix, CausalError> {
    let n = dm.x.cols();
    let v = dm.y.cols();
    if dm.x.rows() == 0 {
        return Err(CausalError::Empty("design matrix has no rows".into()));
    }
    let constant_inputs: Vec<bool> = (0..n).map(|j| dm.x.column_is_constant(j)).collect();
    let active: Vec<usize> = (0..n).filter(|&j| !constant_inputs[j]).collect();
    let xa = dm.x.select_columns(&active);

    let fitted: Vec<(Vec<f64>, f64, ColumnFit)> = (0..v)
        .into_par_iter()
        .map(|j| {
            let y = dm.y.column(j);
            let constant = dm.y.column_is_constant(j);
            if constant || active.is_empty() {
                return Ok((
                    vec![0.0; active.len()],
                    smoothed_logit(&y),
                    ColumnFit {
                        constant_label: constant,
                        iterations: 0,
                        converged: true,
                    },
                ));
            }
            match cfg.method {
                Method::Logistic => {
                    let fit = logistic_fit(&xa, &y, cfg.lambda, cfg.tol, cfg.max_iter).map_err(|e| {
                        CausalError::NumericalAt {
                            input: "*".into(),
                            output: dm.output_vocab[j].clone(),
                            message: e.to_string(),
                        }
                    })?;
                    if let Some(k) = fit.weights.iter().position(|w| !w.is_finite()) {
                        return Err(CausalError::NumericalAt {
                            input: dm.input_vocab[active[k]].text.clone(),
                            output: dm.output_vocab[j].clone(),
                            message: "non-finite weight".into(),
                        });
                    }
                    Ok((
                        fit.weights,
                        fit.bias,
                        ColumnFit {
                            constant_label: false,
                            iterations: fit.iterations,
                            converged: fit.converged,
                        },
                    ))
                }
                Method::Pmi => Ok((
                    pmi_score(&xa, &y),
                    smoothed_logit(&y),
                    ColumnFit {
                        constant_label: false,
                        iterations: 0,
                        converged: true,
                    },
                )),
            }
        })
        .collect::<Result<_, CausalError>>()?;

    let mut w = vec![0.0; n * v];
    let mut bias = Vec::with_capacity(v);
    let mut columns = Vec::with_capacity(v);
    for (j, (weights, b, col)) in fitted.into_iter().enumerate() {
        for (k, &i) in active.iter().enumerate() {
            w[i * v + j] = weights[k];
        }
        bias.push(b);
        columns.push(col);
    }
    Ok(DependencyMatrix {
        input_vocab: dm.input_vocab.clone(),
        output_vocab: dm.output_vocab.clone(),
        w,
        bias,
        method: cfg.method,
        config: *cfg,
        constant_inputs,
        columns,
    })
}
