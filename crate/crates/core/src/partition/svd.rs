//! Small dense matrices and a one-sided Jacobi SVD.

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Dense {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Dense {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    /// `self · v`.
    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }
}

/// Thin SVD `A = U Σ Vᵀ` with `min(rows, cols)` singular triplets sorted by
/// descending singular value. `u[k]` and `v[k]` are the k-th left/right
/// singular vectors.
#[derive(Debug, Clone)]
pub struct Svd {
    pub singular_values: Vec<f64>,
    pub u: Vec<Vec<f64>>,
    pub v: Vec<Vec<f64>>,
}

const MAX_SWEEPS: usize = 80;

/// Hestenes one-sided Jacobi: orthogonalize the columns of `A` by plane
/// rotations, accumulating the rotations into `V`.
pub fn svd(a: &Dense) -> Svd {
    if a.rows < a.cols {
        let t = svd(&a.transpose());
        return Svd {
            singular_values: t.singular_values,
            u: t.v,
            v: t.u,
        };
    }
    let (m, n) = (a.rows, a.cols);
    // Column-major working copies.
    let mut cols: Vec<Vec<f64>> = (0..n).map(|j| (0..m).map(|i| a.get(i, j)).collect()).collect();
    let mut vecs: Vec<Vec<f64>> = (0..n)
        .map(|j| (0..n).map(|i| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, 0.0);
                for i in 0..m {
                    let (x, y) = (cols[p][i], cols[q][i]);
                    alpha += x * x;
                    beta += y * y;
                    gamma += x * y;
                }
                if gamma == 0.0 || gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(&mut cols, p, q, c, s);
                rotate(&mut vecs, p, q, c, s);
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<f64> = cols.iter().map(|c| c.iter().map(|x| x * x).sum::<f64>().sqrt()).collect();
    order.sort_by(|&a, &b| norms[b].total_cmp(&norms[a]).then(a.cmp(&b)));

    let mut out = Svd {
        singular_values: Vec::with_capacity(n),
        u: Vec::with_capacity(n),
        v: Vec::with_capacity(n),
    };
    for &j in &order {
        let sigma = norms[j];
        let u = if sigma > 0.0 {
            cols[j].iter().map(|x| x / sigma).collect()
        } else {
            vec![0.0; m]
        };
        out.singular_values.push(sigma);
        out.u.push(u);
        out.v.push(vecs[j].clone());
    }
    out
}

fn rotate(cols: &mut [Vec<f64>], p: usize, q: usize, c: f64, s: f64) {
    let (lo, hi) = cols.split_at_mut(q);
    let (xp, xq) = (&mut lo[p], &mut hi[0]);
    for (x, y) in xp.iter_mut().zip(xq.iter_mut()) {
        let (a, b) = (*x, *y);
        *x = c * a - s * b;
        *y = s * a + c * b;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn residual(a: &Dense, s: &Svd) -> f64 {
        let mut worst: f64 = 0.0;
        for k in 0..s.singular_values.len() {
            let av = a.mul_vec(&s.v[k]);
            for (x, u) in av.iter().zip(&s.u[k]) {
                worst = worst.max((x - s.singular_values[k] * u).abs());
            }
        }
        worst
    }

    #[test]
    fn diagonal_matrix() {
        let mut a = Dense::zeros(3, 3);
        a.set(0, 0, 1.0);
        a.set(1, 1, 3.0);
        a.set(2, 2, 2.0);
        let s = svd(&a);
        assert_eq!(s.singular_values, vec![3.0, 2.0, 1.0]);
        assert!(residual(&a, &s) < 1e-14);
    }

    #[test]
    fn wide_and_tall_agree() {
        let a = Dense {
            rows: 2,
            cols: 3,
            data: vec![1.0, 2.0, 0.5, -1.0, 0.25, 4.0],
        };
        let s = svd(&a);
        let t = svd(&a.transpose());
        for (x, y) in s.singular_values.iter().zip(&t.singular_values) {
            assert!((x - y).abs() < 1e-12);
        }
        assert!(residual(&a, &s) < 1e-12);
    }

    #[test]
    fn rank_deficient() {
        let a = Dense {
            rows: 3,
            cols: 2,
            data: vec![1.0, 2.0, 2.0, 4.0, 3.0, 6.0],
        };
        let s = svd(&a);
        assert!(s.singular_values[1].abs() < 1e-12);
        assert!((s.singular_values[0] - (70f64).sqrt()).abs() < 1e-12);
        assert!(residual(&a, &s) < 1e-12);
    }
}
