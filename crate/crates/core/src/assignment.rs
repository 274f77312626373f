//! Square linear assignment with deterministic tie-breaking.
//!
//! The optimum is found with the O(n^3) shortest augmenting path form of the
//! Hungarian method. Its dual potentials identify every optimal assignment:
//! an assignment is optimal iff it only uses edges with zero reduced cost.
//! Among those, the lexicographically smallest row-to-column mapping is
//! selected by a greedy pass with augmenting-path repair.

/// Row-to-column assignment of a square weight matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    /// `mapping[row]` is the column assigned to `row`.
    pub mapping: Vec<usize>,
    /// Total weight of the assignment, summed in row order.
    pub value: f64,
}

const NONE: usize = usize::MAX;

/// Maximizes `sum_i weights[i * n + mapping[i]]` over all bijections.
///
/// Ties between optimal assignments are resolved toward the
/// lexicographically smallest `mapping`.
pub fn max_weight_assignment(weights: &[f64], n: usize) -> Assignment {
    assert_eq!(weights.len(), n * n, "weight matrix must be n x n");
    if n == 0 {
        return Assignment {
            mapping: Vec::new(),
            value: 0.0,
        };
    }
    let cost: Vec<f64> = weights.iter().map(|w| -w).collect();
    let (row_to_col, u, v) = hungarian_min(&cost, n);

    let scale = weights.iter().fold(1.0_f64, |acc, w| acc.max(w.abs()));
    let eps = 1e-12 * n as f64 * scale;
    let mut tight = vec![false; n * n];
    for i in 0..n {
        for j in 0..n {
            tight[i * n + j] = cost[i * n + j] - u[i] - v[j] <= eps;
        }
        tight[i * n + row_to_col[i]] = true;
    }

    let mapping = lexicographic_perfect_matching(&tight, n, row_to_col);
    let value = mapping
        .iter()
        .enumerate()
        .map(|(i, &j)| weights[i * n + j])
        .sum();
    Assignment { mapping, value }
}

/// Returns the optimal row-to-column matching plus row and column potentials
/// with `cost[i][j] - u[i] - v[j] >= 0`, zero on matched pairs.
fn hungarian_min(cost: &[f64], n: usize) -> (Vec<usize>, Vec<f64>, Vec<f64>) {
    // 1-based internally, index 0 is the virtual root column/row
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    let a = |i: usize, j: usize| cost[(i - 1) * n + (j - 1)];

    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = a(i0, j) - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut row_to_col = vec![0; n];
    for j in 1..=n {
        row_to_col[p[j] - 1] = j - 1;
    }
    (row_to_col, u[1..].to_vec(), v[1..].to_vec())
}

/// Lexicographically smallest perfect matching of the bipartite graph
/// `allowed`, given one perfect matching `start` of it.
fn lexicographic_perfect_matching(allowed: &[bool], n: usize, start: Vec<usize>) -> Vec<usize> {
    let mut row_to_col = start;
    let mut col_to_row = vec![NONE; n];
    for (i, &j) in row_to_col.iter().enumerate() {
        col_to_row[j] = i;
    }

    for i in 0..n {
        for t in 0..n {
            if !allowed[i * n + t] {
                continue;
            }
            if row_to_col[i] == t {
                break;
            }
            let owner = col_to_row[t];
            if owner < i {
                continue;
            }
            let saved = (row_to_col.clone(), col_to_row.clone());
            let freed = row_to_col[i];
            row_to_col[i] = t;
            col_to_row[t] = i;
            col_to_row[freed] = NONE;
            let mut visited = vec![false; n];
            if augment(
                owner,
                i,
                allowed,
                n,
                &mut row_to_col,
                &mut col_to_row,
                &mut visited,
            ) {
                break;
            }
            (row_to_col, col_to_row) = saved;
        }
    }
    row_to_col
}

/// Kuhn augmenting path from `row`, never touching columns owned by rows
/// `<= fixed`.
fn augment(
    row: usize,
    fixed: usize,
    allowed: &[bool],
    n: usize,
    row_to_col: &mut [usize],
    col_to_row: &mut [usize],
    visited: &mut [bool],
) -> bool {
    for j in 0..n {
        if !allowed[row * n + j] || visited[j] {
            continue;
        }
        let owner = col_to_row[j];
        if owner != NONE && owner <= fixed {
            continue;
        }
        visited[j] = true;
        if owner == NONE || augment(owner, fixed, allowed, n, row_to_col, col_to_row, visited) {
            row_to_col[row] = j;
            col_to_row[j] = row;
            return true;
        }
    }
    false
}
