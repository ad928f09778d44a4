//! Counting pairs of match segments that intersect.
//!
//! Orientation tests are exact (128-bit integer arithmetic) when all four
//! points involved have integer coordinates of magnitude at most 2⁵³; otherwise
//! an orientation whose magnitude is within 1e-9 of the product of the two
//! edge lengths is treated as collinear.

use std::cmp::Ordering;

use crate::geometry::Point;
use crate::num::Scalar;

const REL_EPS: f64 = 1e-9;
const EXACT_LIMIT: f64 = 9_007_199_254_740_992.0; // 2^53

fn as_int(v: f64) -> Option<i64> {
    (v.fract() == 0.0 && v.abs() <= EXACT_LIMIT).then_some(v as i64)
}

fn int_point(p: (f64, f64)) -> Option<(i128, i128)> {
    Some((as_int(p.0)? as i128, as_int(p.1)? as i128))
}

fn orientation(p: (f64, f64), q: (f64, f64), r: (f64, f64), exact: bool) -> Ordering {
    if exact {
        let (p, q, r) = (int_point(p).unwrap(), int_point(q).unwrap(), int_point(r).unwrap());
        let cross = (q.0 - p.0) * (r.1 - p.1) - (q.1 - p.1) * (r.0 - p.0);
        return cross.cmp(&0);
    }
    let (ux, uy) = (q.0 - p.0, q.1 - p.1);
    let (vx, vy) = (r.0 - p.0, r.1 - p.1);
    let cross = ux * vy - uy * vx;
    let scale = ux.hypot(uy) * vx.hypot(vy);
    if cross.abs() <= REL_EPS * scale {
        Ordering::Equal
    } else {
        cross.partial_cmp(&0.0).unwrap_or(Ordering::Equal)
    }
}

/// `r` lies within the bounding box of `p`–`q` (assumes collinearity).
fn within_box(p: (f64, f64), q: (f64, f64), r: (f64, f64)) -> bool {
    r.0 >= p.0.min(q.0) && r.0 <= p.0.max(q.0) && r.1 >= p.1.min(q.1) && r.1 <= p.1.max(q.1)
}

fn tuple<T: Scalar>(p: Point<T>) -> (f64, f64) {
    (p.x.to_f64().unwrap_or(f64::NAN), p.y.to_f64().unwrap_or(f64::NAN))
}

/// Whether closed segments `a`–`b` and `c`–`d` share at least one point.
pub fn segments_intersect<T: Scalar>(a: Point<T>, b: Point<T>, c: Point<T>, d: Point<T>) -> bool {
    let (a, b, c, d) = (tuple(a), tuple(b), tuple(c), tuple(d));
    let exact = [a, b, c, d].iter().all(|&p| int_point(p).is_some());
    let o1 = orientation(a, b, c, exact);
    let o2 = orientation(a, b, d, exact);
    let o3 = orientation(c, d, a, exact);
    let o4 = orientation(c, d, b, exact);
    let eq = Ordering::Equal;

    if o1 != o2 && o3 != o4 && o1 != eq && o2 != eq && o3 != eq && o4 != eq {
        return true;
    }
    (o1 == eq && within_box(a, b, c))
        || (o2 == eq && within_box(a, b, d))
        || (o3 == eq && within_box(c, d, a))
        || (o4 == eq && within_box(c, d, b))
}

/// Number of ground-truth pairs `i < j` whose match segments intersect.
pub fn count_crossings<T: Scalar>(gt: &[Point<T>], pred: &[Point<T>], matched_pred_of_gt: &[usize]) -> usize {
    let segs: Vec<(Point<T>, Point<T>)> = matched_pred_of_gt
        .iter()
        .enumerate()
        .map(|(i, &j)| (gt[i], pred[j]))
        .collect();
    let mut n = 0;
    for (i, &(a, b)) in segs.iter().enumerate() {
        for &(c, d) in &segs[i + 1..] {
            if segments_intersect(a, b, c, d) {
                n += 1;
            }
        }
    }
    n
}
