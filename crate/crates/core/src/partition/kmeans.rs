use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::PartitionError;

pub const MAX_LLOYD_ITERATIONS: usize = 300;

#[derive(Debug, Clone, PartialEq)]
pub struct KMeans {
    pub assignment: Vec<usize>,
    pub centroids: Vec<Vec<f64>>,
    /// Within-cluster sum of squares after seeding and after each Lloyd step.
    pub objective_history: Vec<f64>,
    pub iterations: usize,
}

impl KMeans {
    pub fn objective(&self) -> f64 {
        *self.objective_history.last().expect("history is never empty")
    }
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn wcss(points: &[Vec<f64>], centroids: &[Vec<f64>], assignment: &[usize]) -> f64 {
    points
        .iter()
        .zip(assignment)
        .map(|(p, &c)| sq_dist(p, &centroids[c]))
        .sum()
}

fn seed_plus_plus(points: &[Vec<f64>], k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let mut chosen = vec![rng.gen_range(0..points.len())];
    let mut d2: Vec<f64> = points.iter().map(|p| sq_dist(p, &points[chosen[0]])).collect();
    while chosen.len() < k {
        let total: f64 = d2.iter().sum();
        let next = if total > 0.0 {
            let mut target = rng.gen::<f64>() * total;
            let mut pick = None;
            for (i, &d) in d2.iter().enumerate() {
                if d > 0.0 {
                    pick = Some(i);
                    if target < d {
                        break;
                    }
                    target -= d;
                }
            }
            pick.expect("positive mass exists")
        } else {
            // All remaining points coincide with a centre; take an unused index.
            let unused: Vec<usize> = (0..points.len()).filter(|i| !chosen.contains(i)).collect();
            unused[rng.gen_range(0..unused.len())]
        };
        chosen.push(next);
        for (i, p) in points.iter().enumerate() {
            d2[i] = d2[i].min(sq_dist(p, &points[next]));
        }
    }
    chosen.into_iter().map(|i| points[i].clone()).collect()
}

/// Lloyd's algorithm from a seeded k-means++ start. A point only changes
/// cluster when another centroid is strictly closer.
pub fn kmeans(points: &[Vec<f64>], k: usize, seed: u64) -> Result<KMeans, PartitionError> {
    if k == 0 || k > points.len() {
        return Err(PartitionError::InvalidK {
            k,
            available: points.len(),
        });
    }
    let dim = points[0].len();
    if points.iter().any(|p| p.len() != dim) {
        return Err(PartitionError::Dimension);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centroids = seed_plus_plus(points, k, &mut rng);
    let nearest = |p: &[f64], centroids: &[Vec<f64>], current: Option<usize>| {
        let mut best = current.unwrap_or(0);
        let mut best_d = sq_dist(p, &centroids[best]);
        for (c, cen) in centroids.iter().enumerate() {
            let d = sq_dist(p, cen);
            if d < best_d {
                best = c;
                best_d = d;
            }
        }
        best
    };
    let mut assignment: Vec<usize> = points.iter().map(|p| nearest(p, &centroids, None)).collect();
    let mut history = vec![wcss(points, &centroids, &assignment)];
    let mut iterations = 0;

    loop {
        // Refill empty clusters with the point farthest from its centroid.
        for c in 0..k {
            if assignment.contains(&c) {
                continue;
            }
            let (far, _) = points
                .iter()
                .enumerate()
                .filter(|(i, _)| assignment.iter().filter(|&&a| a == assignment[*i]).count() > 1)
                .map(|(i, p)| (i, sq_dist(p, &centroids[assignment[i]])))
                .fold((usize::MAX, -1.0), |acc, (i, d)| if d > acc.1 { (i, d) } else { acc });
            if far != usize::MAX {
                assignment[far] = c;
            }
        }
        for (c, centroid) in centroids.iter_mut().enumerate() {
            let members: Vec<&Vec<f64>> = points
                .iter()
                .zip(&assignment)
                .filter(|(_, &a)| a == c)
                .map(|(p, _)| p)
                .collect();
            if members.is_empty() {
                continue;
            }
            for (d, value) in centroid.iter_mut().enumerate() {
                *value = members.iter().map(|p| p[d]).sum::<f64>() / members.len() as f64;
            }
        }
        history.push(wcss(points, &centroids, &assignment));
        iterations += 1;

        let next: Vec<usize> = points
            .iter()
            .zip(&assignment)
            .map(|(p, &a)| nearest(p, &centroids, Some(a)))
            .collect();
        if next == assignment || iterations >= MAX_LLOYD_ITERATIONS {
            break;
        }
        assignment = next;
    }

    Ok(KMeans {
        assignment,
        centroids,
        objective_history: history,
        iterations,
    })
}
