//! Longest-common-subsequence alignment over token texts.

/// Matched index pairs `(i, j)` of an LCS between `a` and `b`, in increasing
/// order. Among all maximum alignments, the one using the earliest positions
/// of `a` is returned.
pub fn lcs_pairs<T: PartialEq>(a: &[T], b: &[T]) -> Vec<(usize, usize)> {
    let (n, m) = (a.len(), b.len());
    if n == 0 || m == 0 {
        return Vec::new();
    }
    // suffix[i][j] = LCS length of a[i..], b[j..]
    let width = m + 1;
    let mut suffix = vec![0u32; (n + 1) * width];
    for i in (0..n).rev() {
        for j in (0..m).rev() {
            suffix[i * width + j] = if a[i] == b[j] {
                suffix[(i + 1) * width + j + 1] + 1
            } else {
                suffix[(i + 1) * width + j].max(suffix[i * width + j + 1])
            };
        }
    }
    let at = |i: usize, j: usize| suffix[i * width + j];
    let mut pairs = Vec::with_capacity(at(0, 0) as usize);
    let (mut i, mut j) = (0, 0);
    while i < n && j < m {
        if a[i] == b[j] && at(i, j) == at(i + 1, j + 1) + 1 {
            pairs.push((i, j));
            i += 1;
            j += 1;
        } else if at(i, j + 1) == at(i, j) {
            // a[i] may still be matched further along b
            j += 1;
        } else {
            i += 1;
        }
    }
    pairs
}

pub fn lcs_len<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    lcs_pairs(a, b).len()
}

/// `|LCS| / max(len)`; two empty sequences are identical.
pub fn similarity<T: PartialEq>(a: &[T], b: &[T]) -> f64 {
    let longest = a.len().max(b.len());
    if longest == 0 {
        return 1.0;
    }
    lcs_len(a, b) as f64 / longest as f64
}
