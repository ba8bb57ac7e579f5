//! Bipartite spectral co-clustering (Dhillon, 2001).

use serde::{Deserialize, Serialize};

use super::kmeans::kmeans;
use super::svd::{svd, Dense, Svd};
use super::BipartiteGraph;
use crate::error::PartitionError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoClustering {
    pub k: usize,
    /// Cluster id per left (input) node.
    pub row_assign: Vec<usize>,
    /// Cluster id per right (output) node.
    pub col_assign: Vec<usize>,
}

/// Weighted adjacency `A` (left × right).
pub fn adjacency(g: &BipartiteGraph) -> Dense {
    let mut a = Dense::zeros(g.left.len(), g.right.len());
    for e in &g.edges {
        a.set(e.left, e.right, a.get(e.left, e.right) + e.weight);
    }
    a
}

/// Degrees of left and right nodes.
pub fn degrees(a: &Dense) -> (Vec<f64>, Vec<f64>) {
    let d1 = (0..a.rows).map(|i| (0..a.cols).map(|j| a.get(i, j)).sum()).collect();
    let d2 = (0..a.cols).map(|j| (0..a.rows).map(|i| a.get(i, j)).sum()).collect();
    (d1, d2)
}

/// `D1^{-1/2} A D2^{-1/2}`.
pub fn normalized_adjacency(g: &BipartiteGraph) -> Result<Dense, PartitionError> {
    let a = adjacency(g);
    let (d1, d2) = degrees(&a);
    if let Some(i) = d1.iter().position(|&d| d <= 0.0) {
        return Err(PartitionError::ZeroDegree(i));
    }
    if let Some(j) = d2.iter().position(|&d| d <= 0.0) {
        return Err(PartitionError::ZeroDegree(g.left.len() + j));
    }
    let mut an = a;
    for i in 0..an.rows {
        for j in 0..an.cols {
            let v = an.get(i, j) / (d1[i] * d2[j]).sqrt();
            an.set(i, j, v);
        }
    }
    Ok(an)
}

/// Singular triplets of the normalized adjacency, largest first.
pub fn normalized_svd(g: &BipartiteGraph) -> Result<Svd, PartitionError> {
    Ok(svd(&normalized_adjacency(g)?))
}

/// Number of singular vectors used to separate `k` clusters: `⌈log2 k⌉`.
pub fn embedding_dim(k: usize) -> usize {
    if k <= 1 {
        0
    } else {
        (usize::BITS - (k - 1).leading_zeros()) as usize
    }
}

/// Co-clusters left and right nodes jointly into `k` groups.
///
/// Embeds every node with singular vectors `2..=ℓ+1` of the normalized
/// adjacency (left nodes scaled by `D1^{-1/2}`, right by `D2^{-1/2}`) and
/// runs k-means on the stacked embedding.
pub fn spectral_coclusters(g: &BipartiteGraph, k: usize, seed: u64) -> Result<CoClustering, PartitionError> {
    let (nl, nr) = (g.left.len(), g.right.len());
    if nl == 0 || nr == 0 || g.edges.is_empty() {
        return Err(PartitionError::EmptyGraph);
    }
    if k == 0 || k > nl + nr {
        return Err(PartitionError::InvalidK { k, available: nl + nr });
    }
    if k == 1 {
        return Ok(CoClustering {
            k,
            row_assign: vec![0; nl],
            col_assign: vec![0; nr],
        });
    }
    let a = adjacency(g);
    let (d1, d2) = degrees(&a);
    let decomposition = normalized_svd(g)?;
    let available = decomposition.singular_values.len().saturating_sub(1);
    let dim = embedding_dim(k).min(available).max(1);

    let mut points: Vec<Vec<f64>> = Vec::with_capacity(nl + nr);
    for (i, d) in d1.iter().enumerate() {
        let s = d.sqrt().recip();
        points.push((1..=dim).map(|c| coordinate(&decomposition.u, c, i) * s).collect());
    }
    for (j, d) in d2.iter().enumerate() {
        let s = d.sqrt().recip();
        points.push((1..=dim).map(|c| coordinate(&decomposition.v, c, j) * s).collect());
    }
    let km = kmeans(&points, k, seed)?;
    let (rows, cols) = km.assignment.split_at(nl);
    Ok(CoClustering {
        k,
        row_assign: rows.to_vec(),
        col_assign: cols.to_vec(),
    })
}

fn coordinate(vectors: &[Vec<f64>], component: usize, node: usize) -> f64 {
    vectors.get(component).map_or(0.0, |v| v[node])
}
