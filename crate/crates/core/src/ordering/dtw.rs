use crate::error::{Error, Result};
use crate::geometry::Point;

/// Dynamic time warping distance between two point sequences.
///
/// Fills the accumulated cost matrix
/// `M(a, b) = |p_a - q_b| + min(M(a-1, b-1), M(a, b-1), M(a-1, b))`
/// with `M(0, 0) = |p_0 - q_0|` and cumulative first row and column, and
/// returns the terminal entry.
pub fn dtw_distance(a: &[Point], b: &[Point]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySequence);
    }
    Ok(dtw_with(a.len(), b.len(), |i, j| a[i].distance(b[j]), &mut Vec::new()))
}

/// DTW over an arbitrary pairwise cost; `row` is scratch space reused
/// between calls. Keeps a single row of the matrix.
pub(crate) fn dtw_with(n: usize, m: usize, cost: impl Fn(usize, usize) -> f64, row: &mut Vec<f64>) -> f64 {
    row.clear();
    row.resize(m, 0.0);
    let mut acc = 0.0;
    for (j, slot) in row.iter_mut().enumerate() {
        acc += cost(0, j);
        *slot = acc;
    }
    for i in 1..n {
        // row[j] holds M(i-1, j) until overwritten
        let mut diag = row[0];
        row[0] += cost(i, 0);
        for j in 1..m {
            let up = row[j];
            let best = diag.min(up).min(row[j - 1]);
            diag = up;
            row[j] = cost(i, j) + best;
        }
    }
    row[m - 1]
}
