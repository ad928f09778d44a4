//! Exact minimum-cost assignment for rectangular `M × N` matrices, `M ≤ N`.
//!
//! Shortest augmenting path Hungarian method with row/column potentials. Each
//! row is inserted once and augmented along a Dijkstra-like search over the
//! columns, giving `O(M² N)` time; for the square case this is the usual
//! `O(N³)` bound. Columns that never receive a row are the unmatched
//! predictions. This is equivalent to padding the matrix with `N − M` constant
//! rows, which add the same total to every completion and so never change the
//! optimal assignment of the real rows.

use super::{Assignment, CostMatrix};
use crate::error::{invalid, Result};
use crate::num::Scalar;

pub fn solve_hungarian<T: Scalar>(cost: &CostMatrix<T>) -> Result<Assignment<T>> {
    let c = cost.entries();
    let (rows, cols) = c.dim();
    if c.iter().any(|v| !v.is_finite()) {
        return Err(invalid("cost matrix contains a non-finite entry"));
    }
    if rows > cols {
        return Err(crate::Error::TooManyGroundTruths { gt: rows, pred: cols });
    }
    if rows == 0 {
        return Ok(Assignment {
            matched_pred_of_gt: Vec::new(),
            total_cost: T::zero(),
        });
    }

    // 1-based: index 0 is the virtual source column / unassigned row
    let inf = T::infinity();
    let mut u = vec![T::zero(); rows + 1];
    let mut v = vec![T::zero(); cols + 1];
    let mut row_of_col = vec![0usize; cols + 1];
    let mut way = vec![0usize; cols + 1];
    let mut minv = vec![inf; cols + 1];
    let mut used = vec![false; cols + 1];

    for i in 1..=rows {
        row_of_col[0] = i;
        let mut j0 = 0usize;
        minv.fill(inf);
        used.fill(false);

        loop {
            used[j0] = true;
            let i0 = row_of_col[j0];
            let row = c.row(i0 - 1);
            let ui0 = u[i0];
            let mut delta = inf;
            let mut j1 = 0usize;

            for j in 1..=cols {
                if used[j] {
                    continue;
                }
                let reduced = row[j - 1] - ui0 - v[j];
                if reduced < minv[j] {
                    minv[j] = reduced;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }

            for j in 0..=cols {
                if used[j] {
                    u[row_of_col[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }

            j0 = j1;
            if row_of_col[j0] == 0 {
                break;
            }
        }

        // augment along the alternating path back to the source
        loop {
            let j1 = way[j0];
            row_of_col[j0] = row_of_col[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut matched = vec![usize::MAX; rows];
    for j in 1..=cols {
        if row_of_col[j] != 0 {
            matched[row_of_col[j] - 1] = j - 1;
        }
    }
    debug_assert!(matched.iter().all(|&j| j != usize::MAX));
    let total_cost = cost.total(&matched);
    Ok(Assignment {
        matched_pred_of_gt: matched,
        total_cost,
    })
}
