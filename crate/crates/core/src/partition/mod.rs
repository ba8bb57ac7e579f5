//! From a dependency matrix to an explanation graph: threshold the weights
//! into a bipartite token graph, co-cluster it, and keep the densest
//! clusters.

mod dot;
mod kmeans;
mod spectral;
mod svd;

use serde::{Deserialize, Serialize};

pub use dot::to_dot;
pub use kmeans::{kmeans, KMeans, MAX_LLOYD_ITERATIONS};
pub use spectral::{
    adjacency, degrees, embedding_dim, normalized_adjacency, normalized_svd, spectral_coclusters,
    CoClustering,
};
pub use svd::{svd, Dense, Svd};

use crate::causal::DependencyMatrix;
use crate::error::ConfigError;
use crate::tokenizer::Stream;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LeftNode {
    /// Row in the dependency matrix.
    pub input: usize,
    pub text: String,
    pub stream: Stream,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RightNode {
    /// Column in the dependency matrix.
    pub output: usize,
    pub text: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub left: usize,
    pub right: usize,
    pub weight: f64,
}

/// Input tokens on the left, output tokens on the right, positive weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BipartiteGraph {
    pub left: Vec<LeftNode>,
    pub right: Vec<RightNode>,
    pub edges: Vec<Edge>,
    /// Set when no positive weight existed.
    pub warning: Option<String>,
}

impl BipartiteGraph {
    /// Graph over a dense weight table; zero and negative entries are not
    /// edges and isolated nodes are dropped. Left nodes are tagged as code.
    pub fn from_dense(weights: &[Vec<f64>]) -> Self {
        let left: Vec<LeftNode> = (0..weights.len())
            .map(|i| LeftNode {
                input: i,
                text: format!("x{i}"),
                stream: Stream::Code,
            })
            .collect();
        let cols = weights.first().map_or(0, Vec::len);
        let right: Vec<RightNode> = (0..cols)
            .map(|j| RightNode {
                output: j,
                text: format!("y{j}"),
            })
            .collect();
        let mut edges = Vec::new();
        for (i, row) in weights.iter().enumerate() {
            for (j, &w) in row.iter().enumerate() {
                if w > 0.0 {
                    edges.push(Edge { left: i, right: j, weight: w });
                }
            }
        }
        Self::compact(left, right, edges)
    }

    fn compact(left: Vec<LeftNode>, right: Vec<RightNode>, edges: Vec<Edge>) -> Self {
        let mut lmap = vec![usize::MAX; left.len()];
        let mut rmap = vec![usize::MAX; right.len()];
        for e in &edges {
            lmap[e.left] = 0;
            rmap[e.right] = 0;
        }
        let mut keep_left = Vec::new();
        for (i, node) in left.into_iter().enumerate() {
            if lmap[i] == 0 {
                lmap[i] = keep_left.len();
                keep_left.push(node);
            }
        }
        let mut keep_right = Vec::new();
        for (j, node) in right.into_iter().enumerate() {
            if rmap[j] == 0 {
                rmap[j] = keep_right.len();
                keep_right.push(node);
            }
        }
        let edges = edges
            .into_iter()
            .map(|e| Edge {
                left: lmap[e.left],
                right: rmap[e.right],
                weight: e.weight,
            })
            .collect();
        Self {
            left: keep_left,
            right: keep_right,
            edges,
            warning: None,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn max_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.weight).fold(0.0, f64::max)
    }
}

/// Lower nearest-rank quantile of `sorted` (ascending, non-empty).
fn quantile(sorted: &[f64], tau: f64) -> f64 {
    let idx = (tau * (sorted.len() - 1) as f64).floor() as usize;
    sorted[idx.min(sorted.len() - 1)]
}

/// Keeps weights (clipped at 0) that reach the `tau`-quantile of all
/// positive weights.
pub fn build_bipartite(deps: &DependencyMatrix, tau: f64) -> Result<BipartiteGraph, ConfigError> {
    if !(0.0..1.0).contains(&tau) {
        return Err(ConfigError::OutOfRange {
            name: "tau",
            range: "[0, 1)",
            value: tau,
        });
    }
    let left: Vec<LeftNode> = deps
        .input_vocab
        .iter()
        .enumerate()
        .map(|(i, t)| LeftNode {
            input: i,
            text: t.text.clone(),
            stream: t.stream,
        })
        .collect();
    let right: Vec<RightNode> = deps
        .output_vocab
        .iter()
        .enumerate()
        .map(|(j, t)| RightNode {
            output: j,
            text: t.clone(),
        })
        .collect();
    let mut positive: Vec<f64> = deps.w.iter().copied().filter(|&w| w > 0.0).collect();
    if positive.is_empty() {
        let mut g = BipartiteGraph::compact(left, right, Vec::new());
        g.warning = Some("no positive dependency weights".into());
        return Ok(g);
    }
    positive.sort_by(f64::total_cmp);
    let threshold = quantile(&positive, tau);
    let mut edges = Vec::new();
    for i in 0..deps.inputs() {
        for j in 0..deps.outputs() {
            let w = deps.weight(i, j);
            if w > 0.0 && w >= threshold {
                edges.push(Edge { left: i, right: j, weight: w });
            }
        }
    }
    Ok(BipartiteGraph::compact(left, right, edges))
}

/// `min(8, ⌈√min(|left|, |right|)⌉)`, at least 1.
pub fn default_k(g: &BipartiteGraph) -> usize {
    let smaller = g.left.len().min(g.right.len()) as f64;
    (smaller.sqrt().ceil() as usize).clamp(1, 8)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    BuggyCode,
    Comment,
    RepairedCode,
}

impl Role {
    pub fn of_input(stream: Stream) -> Self {
        match stream {
            Stream::Code => Role::BuggyCode,
            Stream::Comment => Role::Comment,
        }
    }

    pub fn color(self) -> &'static str {
        match self {
            Role::BuggyCode => "green",
            Role::Comment => "yellow",
            Role::RepairedCode => "blue",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExplanationNode {
    pub text: String,
    pub role: Role,
    pub cluster: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExplanationEdge {
    pub source: usize,
    pub target: usize,
    pub weight: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelectedCluster {
    pub id: usize,
    pub score: f64,
}

/// The rendered explanation: nodes colored by role, edges from input
/// tokens to repaired-code tokens.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ExplanationGraph {
    pub nodes: Vec<ExplanationNode>,
    pub edges: Vec<ExplanationEdge>,
    pub selected_clusters: Vec<SelectedCluster>,
    pub warnings: Vec<String>,
}

impl ExplanationGraph {
    /// The whole graph before selection, optionally annotated with clusters.
    pub fn unselected(g: &BipartiteGraph, cc: Option<&CoClustering>) -> Self {
        let mut nodes: Vec<ExplanationNode> = g
            .left
            .iter()
            .enumerate()
            .map(|(i, n)| ExplanationNode {
                text: n.text.clone(),
                role: Role::of_input(n.stream),
                cluster: cc.map(|c| c.row_assign[i]),
            })
            .collect();
        nodes.extend(g.right.iter().enumerate().map(|(j, n)| ExplanationNode {
            text: n.text.clone(),
            role: Role::RepairedCode,
            cluster: cc.map(|c| c.col_assign[j]),
        }));
        let offset = g.left.len();
        Self {
            nodes,
            edges: g
                .edges
                .iter()
                .map(|e| ExplanationEdge {
                    source: e.left,
                    target: offset + e.right,
                    weight: e.weight,
                })
                .collect(),
            selected_clusters: Vec::new(),
            warnings: g.warning.iter().cloned().collect(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "nodes": self.nodes.iter().enumerate().map(|(i, n)| serde_json::json!({
                "id": i,
                "text": n.text,
                "role": n.role,
                "color": n.role.color(),
                "cluster": n.cluster,
            })).collect::<Vec<_>>(),
            "edges": self.edges,
            "clusters": self.selected_clusters,
            "warnings": self.warnings,
        })
    }

    /// Edges grouped by target, each with its heaviest source.
    pub fn strongest_source(&self, target: usize) -> Option<usize> {
        self.edges
            .iter()
            .filter(|e| e.target == target)
            .max_by(|a, b| a.weight.total_cmp(&b.weight))
            .map(|e| e.source)
    }
}

/// Scores each co-cluster by edge density and keeps the `top` densest.
///
/// Density of cluster `c` is its intra-cluster edge weight divided by
/// `|left(c)|·|right(c)|`. Kept clusters are renumbered `0..` by descending
/// density; only their intra-cluster edges are emitted.
pub fn select_explanation(cc: &CoClustering, g: &BipartiteGraph, top: usize) -> ExplanationGraph {
    let k = cc.k;
    let mut left_size = vec![0usize; k];
    let mut right_size = vec![0usize; k];
    for &c in &cc.row_assign {
        left_size[c] += 1;
    }
    for &c in &cc.col_assign {
        right_size[c] += 1;
    }
    let mut mass = vec![0.0; k];
    for e in &g.edges {
        let c = cc.row_assign[e.left];
        if cc.col_assign[e.right] == c {
            mass[c] += e.weight;
        }
    }
    let mut scored: Vec<(usize, f64)> = (0..k)
        .filter(|&c| left_size[c] > 0 && right_size[c] > 0 && mass[c] > 0.0)
        .map(|c| (c, mass[c] / (left_size[c] * right_size[c]) as f64))
        .collect();
    if scored.is_empty() {
        return ExplanationGraph {
            warnings: vec!["no cluster links input and output tokens".into()],
            ..Default::default()
        };
    }
    scored.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    scored.truncate(top.max(1));

    let relabel = |c: usize| scored.iter().position(|&(id, _)| id == c);
    let mut nodes = Vec::new();
    let mut left_at = vec![None; g.left.len()];
    for (i, n) in g.left.iter().enumerate() {
        if let Some(label) = relabel(cc.row_assign[i]) {
            left_at[i] = Some(nodes.len());
            nodes.push(ExplanationNode {
                text: n.text.clone(),
                role: Role::of_input(n.stream),
                cluster: Some(label),
            });
        }
    }
    let mut right_at = vec![None; g.right.len()];
    for (j, n) in g.right.iter().enumerate() {
        if let Some(label) = relabel(cc.col_assign[j]) {
            right_at[j] = Some(nodes.len());
            nodes.push(ExplanationNode {
                text: n.text.clone(),
                role: Role::RepairedCode,
                cluster: Some(label),
            });
        }
    }
    let edges = g
        .edges
        .iter()
        .filter(|e| cc.row_assign[e.left] == cc.col_assign[e.right])
        .filter_map(|e| {
            Some(ExplanationEdge {
                source: left_at[e.left]?,
                target: right_at[e.right]?,
                weight: e.weight,
            })
        })
        .collect();
    ExplanationGraph {
        nodes,
        edges,
        selected_clusters: scored
            .iter()
            .enumerate()
            .map(|(label, &(_, score))| SelectedCluster { id: label, score })
            .collect(),
        warnings: Vec::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::causal::{ColumnFit, EstimatorConfig, InputToken, Method};

    fn deps(w: &[Vec<f64>]) -> DependencyMatrix {
        let n = w.len();
        let v = w[0].len();
        DependencyMatrix {
            input_vocab: (0..n)
                .map(|i| InputToken {
                    text: format!("in{i}"),
                    stream: if i % 2 == 0 { Stream::Code } else { Stream::Comment },
                    position: i,
                })
                .collect(),
            output_vocab: (0..v).map(|j| format!("out{j}")).collect(),
            w: w.iter().flatten().copied().collect(),
            bias: vec![0.0; v],
            method: Method::Logistic,
            config: EstimatorConfig::default(),
            constant_inputs: vec![false; n],
            columns: vec![
                ColumnFit {
                    constant_label: false,
                    iterations: 0,
                    converged: true
                };
                v
            ],
        }
    }

    #[test]
    fn tau_zero_keeps_all_positive() {
        let d = deps(&[vec![0.5, -1.0, 0.0], vec![2.0, 0.1, 0.3]]);
        let g = build_bipartite(&d, 0.0).unwrap();
        assert_eq!(g.edges.len(), 4);
        assert!(g.edges.iter().all(|e| e.weight > 0.0));
    }

    #[test]
    fn single_positive_entry() {
        let d = deps(&[vec![-0.5, 0.0], vec![0.0, 0.7]]);
        let g = build_bipartite(&d, 0.5).unwrap();
        assert_eq!(g.edges.len(), 1);
        assert_eq!(g.left.len() + g.right.len(), 2);
        assert_eq!(g.left[0].text, "in1");
        assert_eq!(g.right[0].text, "out1");
    }

    #[test]
    fn no_positive_weights_warns() {
        let d = deps(&[vec![-0.5, 0.0]]);
        let g = build_bipartite(&d, 0.5).unwrap();
        assert!(g.is_empty());
        assert!(g.warning.is_some());
        assert!(build_bipartite(&d, 1.0).is_err());
    }

    #[test]
    fn densest_cluster_wins() {
        let g = BipartiteGraph::from_dense(&[vec![0.9, 0.0], vec![0.0, 0.1]]);
        let cc = CoClustering {
            k: 2,
            row_assign: vec![1, 0],
            col_assign: vec![1, 0],
        };
        let ex = select_explanation(&cc, &g, 1);
        assert_eq!(ex.edges.len(), 1);
        assert_eq!(ex.edges[0].weight, 0.9);
        assert_eq!(ex.selected_clusters, vec![SelectedCluster { id: 0, score: 0.9 }]);
        assert!(ex.nodes.iter().all(|n| n.cluster == Some(0)));

        let all = select_explanation(&cc, &g, 5);
        assert_eq!(all.edges.len(), 2);
        assert_eq!(all.selected_clusters[1].score, 0.1);
    }

    #[test]
    fn cross_cluster_edges_are_dropped() {
        let g = BipartiteGraph::from_dense(&[vec![1.0, 1.0], vec![0.0, 1.0]]);
        let cc = CoClustering {
            k: 2,
            row_assign: vec![0, 1],
            col_assign: vec![0, 1],
        };
        let ex = select_explanation(&cc, &g, 2);
        assert_eq!(ex.edges.len(), 2);
        for e in &ex.edges {
            assert_eq!(ex.nodes[e.source].cluster, ex.nodes[e.target].cluster);
            assert_ne!(ex.nodes[e.source].role, Role::RepairedCode);
            assert_eq!(ex.nodes[e.target].role, Role::RepairedCode);
        }
    }

    #[test]
    fn no_linked_cluster_is_flagged() {
        let g = BipartiteGraph::from_dense(&[vec![1.0]]);
        let cc = CoClustering {
            k: 2,
            row_assign: vec![0],
            col_assign: vec![1],
        };
        let ex = select_explanation(&cc, &g, 3);
        assert!(ex.is_empty());
        assert_eq!(ex.warnings.len(), 1);
    }

    #[test]
    fn default_k_rule() {
        let g = BipartiteGraph::from_dense(&vec![vec![1.0; 30]; 20]);
        assert_eq!(default_k(&g), 5);
        let big = BipartiteGraph::from_dense(&vec![vec![1.0; 100]; 100]);
        assert_eq!(default_k(&big), 8);
    }
}
