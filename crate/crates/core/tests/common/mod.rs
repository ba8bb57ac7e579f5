//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::HashMap;

use cpr::causal::{BinaryMatrix, DesignMatrix, InputToken};
use cpr::partition::BipartiteGraph;
use cpr::tokenizer::Stream;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn choose2(n: usize) -> f64 {
    (n * n.saturating_sub(1)) as f64 / 2.0
}

/// Adjusted Rand index between two labelings of the same items.
pub fn adjusted_rand_index(a: &[usize], b: &[usize]) -> f64 {
    assert_eq!(a.len(), b.len());
    let mut table: HashMap<(usize, usize), usize> = HashMap::new();
    let mut rows: HashMap<usize, usize> = HashMap::new();
    let mut cols: HashMap<usize, usize> = HashMap::new();
    for (&x, &y) in a.iter().zip(b) {
        *table.entry((x, y)).or_default() += 1;
        *rows.entry(x).or_default() += 1;
        *cols.entry(y).or_default() += 1;
    }
    let index: f64 = table.values().map(|&n| choose2(n)).sum();
    let sum_a: f64 = rows.values().map(|&n| choose2(n)).sum();
    let sum_b: f64 = cols.values().map(|&n| choose2(n)).sum();
    let total = choose2(a.len());
    let expected = sum_a * sum_b / total;
    let max = (sum_a + sum_b) / 2.0;
    if max == expected {
        return 1.0;
    }
    (index - expected) / (max - expected)
}

/// Every one of the 2^n retention masks, in binary counting order.
pub fn all_masks(n: usize) -> Vec<Vec<bool>> {
    (0..1usize << n)
        .map(|bits| (0..n).map(|i| bits >> i & 1 == 1).collect())
        .collect()
}

/// P(y=1 | x_i=1) − P(y=1 | x_i=0), counted directly over the rows.
pub fn conditional_lift(x: &[Vec<bool>], y: &[bool], i: usize) -> f64 {
    let (mut on, mut on_y, mut off, mut off_y) = (0usize, 0usize, 0usize, 0usize);
    for (row, &label) in x.iter().zip(y) {
        if row[i] {
            on += 1;
            on_y += label as usize;
        } else {
            off += 1;
            off_y += label as usize;
        }
    }
    let p = |num: usize, den: usize| if den == 0 { 0.0 } else { num as f64 / den as f64 };
    p(on_y, on) - p(off_y, off)
}

/// Design matrix from explicit rows; inputs named `t0..`, outputs `o0..`.
pub fn design(x: &[Vec<bool>], ys: &[Vec<bool>]) -> DesignMatrix {
    let n = x[0].len();
    DesignMatrix {
        x: BinaryMatrix::from_rows(x),
        y: BinaryMatrix::from_rows(
            &(0..x.len())
                .map(|r| ys.iter().map(|col| col[r]).collect::<Vec<bool>>())
                .collect::<Vec<_>>(),
        ),
        input_vocab: (0..n)
            .map(|i| InputToken {
                text: format!("t{i}"),
                stream: Stream::Comment,
                position: i,
            })
            .collect(),
        output_vocab: (0..ys.len()).map(|j| format!("o{j}")).collect(),
    }
}

/// Argmax over all (input, output) pairs; first wins on ties.
pub fn argmax_pair(n: usize, v: usize, score: impl Fn(usize, usize) -> f64) -> (usize, usize) {
    let mut best = (0, 0);
    let mut best_s = f64::NEG_INFINITY;
    for i in 0..n {
        for j in 0..v {
            let s = score(i, j);
            if s > best_s {
                best_s = s;
                best = (i, j);
            }
        }
    }
    best
}

/// Central finite difference of `f` along each coordinate.
pub fn central_difference(f: impl Fn(&[f64]) -> f64, at: &[f64], h: f64) -> Vec<f64> {
    (0..at.len())
        .map(|k| {
            let mut hi = at.to_vec();
            let mut lo = at.to_vec();
            hi[k] += h;
            lo[k] -= h;
            (f(&hi) - f(&lo)) / (2.0 * h)
        })
        .collect()
}

/// Block-diagonal weights: `blocks` blocks of `size × size`, `intra` inside,
/// `inter` everywhere else. Returns the table and the planted labels of the
/// rows (the columns carry the same labels).
pub fn planted_blocks(blocks: usize, size: usize, intra: f64, inter: f64) -> (Vec<Vec<f64>>, Vec<usize>) {
    let n = blocks * size;
    let labels: Vec<usize> = (0..n).map(|i| i / size).collect();
    let w = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if labels[i] == labels[j] { intra } else { inter })
                .collect()
        })
        .collect();
    (w, labels)
}

/// Random weighted bipartite table with no empty row or column.
pub fn random_weights(rng: &mut ChaCha8Rng, density: f64) -> Vec<Vec<f64>> {
    let rows = rng.gen_range(2..=14);
    let cols = rng.gen_range(2..=14);
    let mut w: Vec<Vec<f64>> = (0..rows)
        .map(|_| {
            (0..cols)
                .map(|_| if rng.gen_bool(density) { rng.gen_range(0.05..3.0) } else { 0.0 })
                .collect()
        })
        .collect();
    for i in 0..rows {
        if w[i].iter().all(|&x| x == 0.0) {
            let j = rng.gen_range(0..cols);
            w[i][j] = rng.gen_range(0.05..3.0);
        }
    }
    for j in 0..cols {
        if (0..rows).all(|i| w[i][j] == 0.0) {
            let i = rng.gen_range(0..rows);
            w[i][j] = rng.gen_range(0.05..3.0);
        }
    }
    w
}

/// Whether the bipartite graph is a single connected component.
pub fn is_connected(g: &BipartiteGraph) -> bool {
    let nl = g.left.len();
    let total = nl + g.right.len();
    let mut parent: Vec<usize> = (0..total).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for e in &g.edges {
        let (a, b) = (find(&mut parent, e.left), find(&mut parent, nl + e.right));
        parent[a] = b;
    }
    let root = find(&mut parent, 0);
    (0..total).all(|x| find(&mut parent, x) == root)
}

/// ‖A v_k − σ_k u_k‖∞ over every computed singular triplet.
pub fn svd_residual(a: &cpr::partition::Dense, s: &cpr::partition::Svd) -> f64 {
    let mut worst: f64 = 0.0;
    for k in 0..s.singular_values.len() {
        let av = a.mul_vec(&s.v[k]);
        for (x, u) in av.iter().zip(&s.u[k]) {
            worst = worst.max((x - s.singular_values[k] * u).abs());
        }
    }
    worst
}

/// Python program speaking the line protocol: echoes the code tokens back.
pub const ECHO_SERVER: &str = r#"
import json, sys
for line in sys.stdin:
    try:
        msg = json.loads(line)
    except ValueError as e:
        print(json.dumps({"id": None, "error": str(e)}), flush=True)
        continue
    if "hello" in msg:
        print(json.dumps({"hello": {"protocol": 1, "name": "echo"}}), flush=True)
    elif "id" not in msg:
        print(json.dumps({"id": None, "error": "missing id"}), flush=True)
    else:
        print(json.dumps({"id": msg["id"], "candidates": [{"tokens": msg["code_tokens"], "score": 0.0}]}), flush=True)
"#;

pub fn python3() -> Option<&'static str> {
    std::process::Command::new("python3")
        .arg("--version")
        .output()
        .ok()
        .filter(|o| o.status.success())
        .map(|_| "python3")
}
