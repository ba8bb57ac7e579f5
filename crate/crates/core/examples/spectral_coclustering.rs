//! Co-cluster a noisy block-structured weight table and pick the densest
//! blocks as the explanation.
//!
//!     cargo run --example spectral_coclustering

use cpr::partition::{select_explanation, spectral_coclusters, BipartiteGraph};
use rand::{Rng, SeedableRng};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
    let (blocks, size) = (3, 4);
    let n = blocks * size;
    let weights: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let strength = if i / size == j / size { 1.0 + (i / size) as f64 } else { 0.0 };
                    strength + rng.gen_range(0.0..0.05)
                })
                .collect()
        })
        .collect();
    let g = BipartiteGraph::from_dense(&weights);
    let cc = spectral_coclusters(&g, blocks, 7)?;
    println!("rows    {:?}", cc.row_assign);
    println!("columns {:?}", cc.col_assign);

    let picked = select_explanation(&cc, &g, 1);
    for c in &picked.selected_clusters {
        println!("kept cluster {} (density {:.3})", c.id, c.score);
    }
    let names: Vec<&str> = picked.nodes.iter().map(|n| n.text.as_str()).collect();
    println!("nodes {names:?}, {} edges", picked.edges.len());
    Ok(())
}
