//! Linear sum assignment.
//!
//! The solver is the shortest-augmenting-path Hungarian method with row and
//! column potentials, O(n³) on integers. Because every optimal assignment
//! uses only edges that are tight under an optimal dual, the lexicographically
//! smallest optimal assignment is recovered afterwards by fixing rows in order
//! and rerouting along alternating paths in the tight subgraph.

use num_integer::Integer;

use crate::cost::Rational;
use crate::error::{Error, Result};

/// An optimal assignment: `rows[i]` is the column chosen for row `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    pub rows: Vec<usize>,
    pub total: Rational,
}

/// Solves a square rational cost matrix exactly.
pub fn solve_lsap(costs: &[Vec<Rational>]) -> Result<Assignment> {
    let n = costs.len();
    let mut lcm = 1i64;
    for (row, r) in costs.iter().enumerate() {
        if r.len() != n {
            return Err(Error::NonSquare { row, len: r.len(), expected: n });
        }
        for (col, c) in r.iter().enumerate() {
            if *c.numer() < 0 {
                return Err(Error::NegativeCost { row, col });
            }
            lcm = lcm.lcm(c.denom());
        }
    }
    let mut flat = Vec::with_capacity(n * n);
    for r in costs {
        for c in r {
            flat.push(c.numer().checked_mul(lcm / c.denom()).ok_or(Error::Overflow)?);
        }
    }
    let (rows, total) = solve_scaled(&flat, n);
    Ok(Assignment { rows, total: Rational::new(total, lcm) })
}

/// Integer solver over a row-major `n × n` matrix with non-negative entries.
/// Returns the lexicographically smallest optimal assignment and its total.
pub fn solve_scaled(cost: &[i64], n: usize) -> (Vec<usize>, i64) {
    debug_assert_eq!(cost.len(), n * n);
    if n == 0 {
        return (Vec::new(), 0);
    }
    let (mut row_to_col, u, v) = hungarian(cost, n);
    let tight = |i: usize, j: usize| cost[i * n + j] - u[i] - v[j] == 0;
    let mut col_to_row = vec![0; n];
    for (i, &j) in row_to_col.iter().enumerate() {
        col_to_row[j] = i;
    }

    for i in 0..n {
        for j in 0..n {
            if !tight(i, j) {
                continue;
            }
            if row_to_col[i] == j {
                break;
            }
            let holder = col_to_row[j];
            if holder < i {
                continue;
            }
            let freed = row_to_col[i];
            let mut seen = vec![false; n];
            seen[j] = true;
            let mut path = Vec::new();
            if reroute(holder, freed, i, n, &tight, &col_to_row, &mut seen, &mut path) {
                // path holds (row, new column) pairs
                for &(r, c) in &path {
                    row_to_col[r] = c;
                    col_to_row[c] = r;
                }
                row_to_col[i] = j;
                col_to_row[j] = i;
                break;
            }
        }
    }

    let total = row_to_col.iter().enumerate().map(|(i, &j)| cost[i * n + j]).sum();
    (row_to_col, total)
}

/// Minimum total of a rectangular `rows × cols` problem with
/// `rows <= cols`, every row assigned. Entries may be negative.
pub(crate) fn min_total_rect(cost: &[i64], rows: usize, cols: usize) -> i64 {
    debug_assert!(rows <= cols && cost.len() == rows * cols);
    if rows == 0 {
        return 0;
    }
    let (assigned, _, _) = hungarian_rect(cost, rows, cols);
    assigned.iter().enumerate().map(|(i, &j)| cost[i * cols + j]).sum()
}

#[allow(clippy::too_many_arguments)]
fn reroute(
    row: usize,
    target: usize,
    fixed_upto: usize,
    n: usize,
    tight: &impl Fn(usize, usize) -> bool,
    col_to_row: &[usize],
    seen: &mut [bool],
    path: &mut Vec<(usize, usize)>,
) -> bool {
    for c in 0..n {
        if seen[c] || !tight(row, c) {
            continue;
        }
        if c == target {
            path.push((row, c));
            return true;
        }
        let next = col_to_row[c];
        if next <= fixed_upto {
            continue;
        }
        seen[c] = true;
        path.push((row, c));
        if reroute(next, target, fixed_upto, n, tight, col_to_row, seen, path) {
            return true;
        }
        path.pop();
    }
    false
}

/// Returns an optimal assignment plus dual potentials with
/// `cost[i][j] >= u[i] + v[j]`, equality on assigned pairs.
fn hungarian(cost: &[i64], n: usize) -> (Vec<usize>, Vec<i64>, Vec<i64>) {
    hungarian_rect(cost, n, n)
}

fn hungarian_rect(cost: &[i64], n: usize, m: usize) -> (Vec<usize>, Vec<i64>, Vec<i64>) {
    // 1-based internal indexing; column 0 is the virtual source.
    let inf = i64::MAX / 4;
    let mut u = vec![0i64; n + 1];
    let mut v = vec![0i64; m + 1];
    let mut p = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![inf; m + 1];
        let mut used = vec![false; m + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0;
            for j in 1..=m {
                if used[j] {
                    continue;
                }
                let cur = cost[(i0 - 1) * m + (j - 1)] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=m {
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
    for j in 1..=m {
        if p[j] != 0 {
            row_to_col[p[j] - 1] = j - 1;
        }
    }
    (row_to_col, u[1..].to_vec(), v[1..].to_vec())
}
