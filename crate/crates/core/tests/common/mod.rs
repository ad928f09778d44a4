#![allow(dead_code)]

use kmo_match::synth::SceneRng;
use kmo_match::{CostMatrix, GtPoint, Point, PredPoint};

pub fn random_points(rng: &mut SceneRng, n: usize, scale: f64) -> Vec<Point<f64>> {
    (0..n)
        .map(|_| Point::new(rng.uniform() * scale, rng.uniform() * scale))
        .collect()
}

pub fn random_gt(rng: &mut SceneRng, n: usize, scale: f64) -> Vec<GtPoint<f64>> {
    random_points(rng, n, scale).into_iter().map(GtPoint::from).collect()
}

pub fn random_pred(rng: &mut SceneRng, n: usize, scale: f64) -> Vec<PredPoint<f64>> {
    (0..n)
        .map(|_| {
            let x = rng.uniform() * scale;
            let y = rng.uniform() * scale;
            PredPoint::new(x, y, rng.uniform())
        })
        .collect()
}

/// Scalar L1 distance, written out independently of the library.
pub fn l1(ax: f64, ay: f64, bx: f64, by: f64) -> f64 {
    (ax - bx).abs() + (ay - by).abs()
}

/// Mean of the k smallest distances to other points, by explicit nested loops.
pub fn knn_oracle(pts: &[(f64, f64)], k: usize, dist: fn(f64, f64, f64, f64) -> f64) -> Vec<f64> {
    let n = pts.len();
    let kk = k.min(n.saturating_sub(1));
    (0..n)
        .map(|i| {
            if kk == 0 {
                return 0.0;
            }
            let mut d = Vec::new();
            for j in 0..n {
                if j != i {
                    d.push(dist(pts[i].0, pts[i].1, pts[j].0, pts[j].1));
                }
            }
            d.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let mut s = 0.0;
            for v in &d[..kk] {
                s += v;
            }
            s / kk as f64
        })
        .collect()
}

/// Minimum over every injection, with totals summed row by row.
pub fn exhaustive_min(c: &CostMatrix<f64>) -> f64 {
    let (m, n) = (c.m_gt(), c.n_pred());
    fn rec(c: &CostMatrix<f64>, row: usize, m: usize, n: usize, used: &mut Vec<bool>, acc: f64, best: &mut f64) {
        if row == m {
            if acc < *best {
                *best = acc;
            }
            return;
        }
        for j in 0..n {
            if !used[j] {
                used[j] = true;
                rec(c, row + 1, m, n, used, acc + c.get(row, j), best);
                used[j] = false;
            }
        }
    }
    let mut best = f64::INFINITY;
    rec(c, 0, m, n, &mut vec![false; n], 0.0, &mut best);
    best
}
