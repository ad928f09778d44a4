//! Exhaustive assignment search, used to check the Hungarian solver.

use super::{Assignment, CostMatrix};
use crate::error::{invalid, Error, Result};
use crate::num::Scalar;

/// Largest row count the brute-force search accepts.
pub const ORACLE_MAX_ROWS: usize = 8;

/// Globally optimal assignment by enumerating every injection of rows into columns.
///
/// Injections are visited in lexicographic order and only a strictly smaller
/// total replaces the incumbent, so ties resolve to the lexicographically
/// smallest assignment vector. Totals accumulate row by row, matching
/// [`CostMatrix::total`].
pub fn brute_force_assignment<T: Scalar>(cost: &CostMatrix<T>) -> Result<Assignment<T>> {
    let c = cost.entries();
    let (rows, cols) = c.dim();
    if rows > ORACLE_MAX_ROWS {
        return Err(Error::OracleTooLarge {
            rows,
            max: ORACLE_MAX_ROWS,
        });
    }
    if rows > cols {
        return Err(Error::TooManyGroundTruths { gt: rows, pred: cols });
    }
    if c.iter().any(|v| !v.is_finite()) {
        return Err(invalid("cost matrix contains a non-finite entry"));
    }

    let mut search = Search {
        cost,
        used: vec![false; cols],
        current: Vec::with_capacity(rows),
        best: None,
    };
    search.descend(T::zero());
    let (matched_pred_of_gt, total_cost) = search.best.unwrap_or((Vec::new(), T::zero()));
    Ok(Assignment {
        matched_pred_of_gt,
        total_cost,
    })
}

struct Search<'a, T> {
    cost: &'a CostMatrix<T>,
    used: Vec<bool>,
    current: Vec<usize>,
    best: Option<(Vec<usize>, T)>,
}

impl<T: Scalar> Search<'_, T> {
    fn descend(&mut self, partial: T) {
        let row = self.current.len();
        if row == self.cost.m_gt() {
            let better = match &self.best {
                Some((_, best)) => partial < *best,
                None => true,
            };
            if better {
                self.best = Some((self.current.clone(), partial));
            }
            return;
        }
        for j in 0..self.cost.n_pred() {
            if self.used[j] {
                continue;
            }
            self.used[j] = true;
            self.current.push(j);
            self.descend(partial + self.cost.get(row, j));
            self.current.pop();
            self.used[j] = false;
        }
    }
}

/// Every injection of `rows` rows into `cols` columns, lexicographically ordered.
///
/// Test helper for callers that need the full optimal set rather than one optimum.
pub fn enumerate_injections(rows: usize, cols: usize) -> Vec<Vec<usize>> {
    fn rec(rows: usize, cols: usize, used: &mut [bool], cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == rows {
            out.push(cur.clone());
            return;
        }
        for j in 0..cols {
            if !used[j] {
                used[j] = true;
                cur.push(j);
                rec(rows, cols, used, cur, out);
                cur.pop();
                used[j] = false;
            }
        }
    }
    let mut out = Vec::new();
    if rows <= cols {
        rec(rows, cols, &mut vec![false; cols], &mut Vec::new(), &mut out);
    }
    out
}
