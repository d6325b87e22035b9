//! Linear assignment (Hungarian method) and bipartite perfect matching.

use nalgebra::DMatrix;

/// Minimum-cost perfect assignment on a square cost matrix.
///
/// Returns `assign` with row `i` matched to column `assign[i]`, and the total
/// cost. O(n³) shortest-augmenting-path formulation with potentials.
pub fn hungarian(cost: &DMatrix<f64>) -> (Vec<usize>, f64) {
    let n = cost.nrows();
    assert_eq!(n, cost.ncols(), "hungarian needs a square matrix");
    if n == 0 {
        return (Vec::new(), 0.0);
    }
    // 1-based internals; column 0 is a sentinel.
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; n + 1];
    let mut row_of = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        row_of[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = row_of[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost[(i0 - 1, j - 1)] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[row_of[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if row_of[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            row_of[j0] = row_of[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assign = vec![0usize; n];
    for j in 1..=n {
        assign[row_of[j] - 1] = j - 1;
    }
    let total = assign.iter().enumerate().map(|(i, &j)| cost[(i, j)]).sum();
    (assign, total)
}

/// Perfect matching in the bipartite graph with an edge `(i, j)` wherever
/// `allowed(i, j)`, by repeated augmenting paths. Returns `match[i] = j`.
pub fn perfect_matching(n: usize, allowed: impl Fn(usize, usize) -> bool) -> Option<Vec<usize>> {
    let adj: Vec<Vec<usize>> = (0..n)
        .map(|i| (0..n).filter(|&j| allowed(i, j)).collect())
        .collect();
    let mut col_owner: Vec<Option<usize>> = vec![None; n];
    for i in 0..n {
        let mut visited = vec![false; n];
        if !augment(i, &adj, &mut visited, &mut col_owner) {
            return None;
        }
    }
    let mut assign = vec![0usize; n];
    for (j, owner) in col_owner.iter().enumerate() {
        assign[owner.expect("perfect matching covers every column")] = j;
    }
    Some(assign)
}

fn augment(
    row: usize,
    adj: &[Vec<usize>],
    visited: &mut [bool],
    col_owner: &mut [Option<usize>],
) -> bool {
    for &j in &adj[row] {
        if visited[j] {
            continue;
        }
        visited[j] = true;
        let free = match col_owner[j] {
            None => true,
            Some(other) => augment(other, adj, visited, col_owner),
        };
        if free {
            col_owner[j] = Some(row);
            return true;
        }
    }
    false
}
