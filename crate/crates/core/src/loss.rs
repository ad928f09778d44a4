//! Forward values of the point-regression and classification losses.

use crate::error::{invalid, Result};
use crate::geometry::{Frame, Metric, Point, PointSet};
use crate::num::Scalar;

/// Weight of the localization term in the total loss.
pub const DEFAULT_LAMBDA: f64 = 2.5;
/// Confidences are clamped to `[ε, 1 − ε]` before taking logarithms.
pub const CONFIDENCE_EPS: f64 = 1e-7;

/// Rescales a point set into `[0,1]²` using its frame; the result has a unit frame.
pub fn normalize_points<T: Scalar>(s: &PointSet<T>) -> Result<PointSet<T>> {
    let frame = s.frame();
    frame.validate()?;
    let points = s.iter().map(|&p| frame.normalize(p)).collect();
    PointSet::new(points, Frame::unit())
}

/// Mean L1 distance between each ground truth and its assigned prediction.
///
/// Returns 0 for an empty ground-truth list.
pub fn loc_loss<T: Scalar>(gt: &[Point<T>], pred: &[Point<T>], matched_pred_of_gt: &[usize]) -> Result<T> {
    if matched_pred_of_gt.len() != gt.len() {
        return Err(invalid(format!(
            "assignment has {} entries for {} ground-truth points",
            matched_pred_of_gt.len(),
            gt.len()
        )));
    }
    let mut seen = vec![false; pred.len()];
    for &j in matched_pred_of_gt {
        if j >= pred.len() {
            return Err(invalid(format!(
                "assignment index {j} out of range for {} predictions",
                pred.len()
            )));
        }
        if std::mem::replace(&mut seen[j], true) {
            return Err(invalid(format!("prediction {j} assigned twice")));
        }
    }
    if gt.is_empty() {
        return Ok(T::zero());
    }
    let sum = gt
        .iter()
        .zip(matched_pred_of_gt)
        .fold(T::zero(), |acc, (&g, &j)| acc + Metric::L1.distance(g, pred[j]));
    Ok(sum / T::from_count(gt.len()))
}

/// Parameters of the focal classification loss.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FocalParams<T> {
    pub alpha: T,
    pub gamma: T,
}

impl<T: Scalar> Default for FocalParams<T> {
    fn default() -> Self {
        Self {
            alpha: T::lit(0.25),
            gamma: T::lit(2.0),
        }
    }
}

/// Focal term `−α (1 − p_t)^γ ln p_t` for one prediction.
pub fn focal_term<T: Scalar>(confidence: T, is_person: bool, params: FocalParams<T>) -> T {
    let eps = T::lit(CONFIDENCE_EPS);
    let p = confidence.max(eps).min(T::one() - eps);
    let pt = if is_person { p } else { T::one() - p };
    -params.alpha * (T::one() - pt).powf(params.gamma) * pt.ln()
}

/// Mean focal loss over all predictions; `labels[j]` is true for matched predictions.
pub fn focal_cls_loss<T: Scalar>(confidences: &[T], labels: &[bool], params: FocalParams<T>) -> Result<T> {
    if confidences.len() != labels.len() {
        return Err(invalid(format!(
            "{} confidences but {} labels",
            confidences.len(),
            labels.len()
        )));
    }
    if confidences.is_empty() {
        return Ok(T::zero());
    }
    if let Some(c) = confidences.iter().find(|c| c.is_nan()) {
        return Err(invalid(format!("confidence {c} is not a number")));
    }
    let sum = confidences
        .iter()
        .zip(labels)
        .fold(T::zero(), |acc, (&c, &l)| acc + focal_term(c, l, params));
    Ok(sum / T::from_count(confidences.len()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossReport<T> {
    pub loc: T,
    pub cls: T,
    pub total: T,
}

/// `cls + lambda · loc`.
pub fn total_loss<T: Scalar>(loc: T, cls: T, lambda: T) -> Result<LossReport<T>> {
    if loc.is_nan() || cls.is_nan() || loc < T::zero() || cls < T::zero() {
        return Err(invalid(format!(
            "loss terms must be non-negative, got loc={loc} cls={cls}"
        )));
    }
    Ok(LossReport {
        loc,
        cls,
        total: cls + lambda * loc,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalize_examples() {
        let s = PointSet::new(
            vec![Point::new(0.0, 0.0), Point::new(256.0, 256.0), Point::new(128.0, 64.0)],
            Frame::new(256.0, 256.0).unwrap(),
        )
        .unwrap();
        let n = normalize_points(&s).unwrap();
        assert_eq!(
            n.points(),
            &[Point::new(0.0, 0.0), Point::new(1.0, 1.0), Point::new(0.5, 0.25)]
        );
        assert_eq!(n.frame(), Frame::unit());
    }

    #[test]
    fn loc_loss_examples() {
        let gt = [Point::new(0.1, 0.1), Point::new(0.5, 0.5)];
        assert_eq!(loc_loss(&gt, &gt, &[0, 1]).unwrap(), 0.0);
        let one = [Point::new(0.0, 0.0)];
        let off = [Point::new(0.1, 0.2)];
        assert!((loc_loss::<f64>(&one, &off, &[0]).unwrap() - 0.3).abs() < 1e-15);
    }

    #[test]
    fn loc_loss_rejects_bad_assignment() {
        let gt = [Point::new(0.0, 0.0), Point::new(1.0, 0.0)];
        let pred = [Point::new(0.0, 0.0), Point::new(1.0, 0.0)];
        assert!(loc_loss(&gt, &pred, &[0]).is_err());
        assert!(loc_loss(&gt, &pred, &[0, 2]).is_err());
        assert!(loc_loss(&gt, &pred, &[1, 1]).is_err());
    }

    #[test]
    fn focal_saturated_positive() {
        let v = focal_cls_loss(&[1.0 - 1e-7; 4], &[true; 4], FocalParams::default()).unwrap();
        assert!((0.0..1e-5).contains(&v));
    }

    #[test]
    fn focal_reduces_to_bce() {
        let params = FocalParams { alpha: 1.0, gamma: 0.0 };
        let v = focal_cls_loss(&[0.5], &[true], params).unwrap();
        assert!((v - std::f64::consts::LN_2).abs() < 1e-15);
        let neg = focal_cls_loss(&[0.2], &[false], params).unwrap();
        assert!((neg + 0.8f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn focal_clamps_extremes() {
        let v = focal_cls_loss::<f64>(&[0.0, 1.0], &[true, false], FocalParams::default()).unwrap();
        assert!(v.is_finite() && v > 0.0);
    }

    #[test]
    fn focal_length_mismatch() {
        assert!(focal_cls_loss(&[0.5, 0.5], &[true], FocalParams::<f64>::default()).is_err());
    }

    #[test]
    fn total_examples() {
        assert_eq!(total_loss(0.0, 0.0, 2.5).unwrap().total, 0.0);
        assert_eq!(total_loss(1.0, 0.0, DEFAULT_LAMBDA).unwrap().total, 2.5);
        assert!((total_loss::<f64>(0.2, 0.3, 2.5).unwrap().total - 0.8).abs() < 1e-15);
        assert!(total_loss(-0.1, 0.0, 2.5).is_err());
        assert!(total_loss(0.0, f64::NAN, 2.5).is_err());
    }
}
