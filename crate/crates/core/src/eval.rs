//! Localization precision/recall/F1 and counting error metrics.
//!
//! Predictions and ground truth are paired one-to-one by a minimum total
//! Euclidean distance assignment; a pair is a true positive when its distance
//! is strictly below the ground truth's threshold σ.
//!
//! Empty-set conventions: precision is 1 when no prediction survives, recall
//! is 1 when there is no ground truth, and F1 is 0 when precision + recall is 0.

use ndarray::Array2;

use crate::error::{invalid, Error, Result};
use crate::geometry::{ensure_finite, Metric, Point};
use crate::matcher::{solve_hungarian, CostMatrix, GtPoint, PredPoint};
use crate::num::Scalar;

/// Default confidence threshold separating heads from background.
pub const DEFAULT_TAU: f64 = 0.35;
/// Thresholds of the swept protocol: 1, 2, …, 100 pixels.
pub const SWEEP_SIGMAS: std::ops::RangeInclusive<u32> = 1..=100;

/// Keeps predictions with `confidence >= tau`, preserving order.
pub fn filter_by_confidence<T: Scalar>(pred: &[PredPoint<T>], tau: T) -> Vec<PredPoint<T>> {
    pred.iter().filter(|p| p.confidence >= tau).copied().collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchedPair<T> {
    pub gt: usize,
    pub pred: usize,
    pub distance: T,
}

/// Outcome of one-to-one threshold matching.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdMatch<T> {
    pub tp: usize,
    pub fp: usize,
    pub fn_count: usize,
    /// Every assigned pair, true positive or not, in ground-truth order.
    pub pairs: Vec<MatchedPair<T>>,
}

/// Minimum total Euclidean distance one-to-one pairing (no threshold applied).
///
/// The smaller side indexes the rows of the assignment problem.
pub fn optimal_pairs<T: Scalar>(gt: &[Point<T>], pred: &[Point<T>]) -> Result<Vec<MatchedPair<T>>> {
    ensure_finite(gt)?;
    ensure_finite(pred)?;
    if gt.is_empty() || pred.is_empty() {
        return Ok(Vec::new());
    }
    let gt_rows = gt.len() <= pred.len();
    let (rows, cols) = if gt_rows { (gt, pred) } else { (pred, gt) };
    let dist = Array2::from_shape_fn((rows.len(), cols.len()), |(i, j)| Metric::L2.distance(rows[i], cols[j]));
    let assignment = solve_hungarian(&CostMatrix::new(dist.clone())?)?;
    let mut pairs: Vec<MatchedPair<T>> = assignment
        .matched_pred_of_gt
        .iter()
        .enumerate()
        .map(|(r, &c)| {
            let (g, p) = if gt_rows { (r, c) } else { (c, r) };
            MatchedPair {
                gt: g,
                pred: p,
                distance: dist[[r, c]],
            }
        })
        .collect();
    pairs.sort_by_key(|p| p.gt);
    Ok(pairs)
}

fn check_sigmas<T: Scalar>(sigma_of_gt: &[T], n_gt: usize) -> Result<()> {
    if sigma_of_gt.len() != n_gt {
        return Err(invalid(format!(
            "{} thresholds for {n_gt} ground-truth points",
            sigma_of_gt.len()
        )));
    }
    match sigma_of_gt.iter().position(|&s| !(s > T::zero() && s.is_finite())) {
        Some(i) => Err(invalid(format!(
            "threshold {i} must be positive, got {}",
            sigma_of_gt[i]
        ))),
        None => Ok(()),
    }
}

fn count_hits<T: Scalar>(pairs: &[MatchedPair<T>], sigma_of: impl Fn(usize) -> T) -> usize {
    pairs.iter().filter(|p| p.distance < sigma_of(p.gt)).count()
}

/// Pairs predictions with ground truth and counts TP/FP/FN against per-GT thresholds.
pub fn threshold_match<T: Scalar>(gt: &[Point<T>], pred: &[Point<T>], sigma_of_gt: &[T]) -> Result<ThresholdMatch<T>> {
    check_sigmas(sigma_of_gt, gt.len())?;
    let pairs = optimal_pairs(gt, pred)?;
    let tp = count_hits(&pairs, |i| sigma_of_gt[i]);
    Ok(ThresholdMatch {
        tp,
        fp: pred.len() - tp,
        fn_count: gt.len() - tp,
        pairs,
    })
}

/// Box-derived threshold: half the head box diagonal.
pub fn sigma_nwpu<T: Scalar>(box_w: T, box_h: T) -> Result<T> {
    if !(box_w > T::zero() && box_h > T::zero()) || !box_w.is_finite() || !box_h.is_finite() {
        return Err(invalid(format!(
            "head box must have positive extents, got {box_w}x{box_h}"
        )));
    }
    Ok(box_w.hypot(box_h) / T::lit(2.0))
}

/// Threshold protocol for localization scoring.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SigmaMode<T> {
    /// One radius for every ground truth (4 or 8 pixels are customary).
    Fixed(T),
    /// Per-ground-truth radius from the head box.
    Nwpu,
    /// Scores averaged over σ = 1…100 pixels.
    QnrfSweep,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prf<T> {
    pub precision: T,
    pub recall: T,
    pub f1: T,
}

impl<T: Scalar> Prf<T> {
    pub fn from_counts(tp: usize, fp: usize, fn_count: usize) -> Self {
        let ratio = |num: usize, den: usize| {
            if den == 0 {
                T::one()
            } else {
                T::from_count(num) / T::from_count(den)
            }
        };
        let precision = ratio(tp, tp + fp);
        let recall = ratio(tp, tp + fn_count);
        let sum = precision + recall;
        let f1 = if sum > T::zero() {
            T::lit(2.0) * precision * recall / sum
        } else {
            T::zero()
        };
        Self { precision, recall, f1 }
    }
}

/// Counts and scores at one threshold of a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaScore<T> {
    pub sigma: T,
    pub tp: usize,
    pub fp: usize,
    pub fn_count: usize,
    pub precision: T,
    pub recall: T,
    pub f1: T,
}

impl<T: Scalar> SigmaScore<T> {
    fn new(sigma: T, tp: usize, fp: usize, fn_count: usize) -> Self {
        let prf = Prf::from_counts(tp, fp, fn_count);
        Self {
            sigma,
            tp,
            fp,
            fn_count,
            precision: prf.precision,
            recall: prf.recall,
            f1: prf.f1,
        }
    }
}

/// Localization scores for one scene or an aggregate of scenes.
///
/// In sweep mode `precision`, `recall` and `f1` are arithmetic means over the
/// thresholds, and the counts are those at the largest threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport<T> {
    pub tp: usize,
    pub fp: usize,
    pub fn_count: usize,
    pub precision: T,
    pub recall: T,
    pub f1: T,
    pub sigma_mode: SigmaMode<T>,
    pub per_sigma: Option<Vec<SigmaScore<T>>>,
}

impl<T: Scalar> EvalReport<T> {
    fn single(mode: SigmaMode<T>, tp: usize, fp: usize, fn_count: usize) -> Self {
        let prf = Prf::from_counts(tp, fp, fn_count);
        Self {
            tp,
            fp,
            fn_count,
            precision: prf.precision,
            recall: prf.recall,
            f1: prf.f1,
            sigma_mode: mode,
            per_sigma: None,
        }
    }

    fn sweep(per_sigma: Vec<SigmaScore<T>>) -> Self {
        let n = T::from_count(per_sigma.len());
        let mean = |f: fn(&SigmaScore<T>) -> T| per_sigma.iter().map(f).fold(T::zero(), |a, b| a + b) / n;
        let last = *per_sigma.last().expect("non-empty sweep");
        Self {
            tp: last.tp,
            fp: last.fp,
            fn_count: last.fn_count,
            precision: mean(|s| s.precision),
            recall: mean(|s| s.recall),
            f1: mean(|s| s.f1),
            sigma_mode: SigmaMode::QnrfSweep,
            per_sigma: Some(per_sigma),
        }
    }
}

fn sweep_sigmas<T: Scalar>() -> impl Iterator<Item = T> {
    SWEEP_SIGMAS.map(|s| T::lit(f64::from(s)))
}

/// Scores one scene's (already confidence-filtered) predictions.
pub fn eval_localization<T: Scalar>(gt: &[GtPoint<T>], pred: &[Point<T>], mode: SigmaMode<T>) -> Result<EvalReport<T>> {
    gt.iter().try_for_each(GtPoint::validate)?;
    let gt_points: Vec<Point<T>> = gt.iter().map(|g| g.point).collect();
    match mode {
        SigmaMode::Fixed(sigma) => {
            let m = threshold_match(&gt_points, pred, &vec![sigma; gt.len()])?;
            Ok(EvalReport::single(mode, m.tp, m.fp, m.fn_count))
        }
        SigmaMode::Nwpu => {
            let sigmas = gt
                .iter()
                .enumerate()
                .map(|(index, g)| match (g.box_w, g.box_h) {
                    (Some(w), Some(h)) => sigma_nwpu(w, h),
                    _ => Err(Error::MissingBox { index }),
                })
                .collect::<Result<Vec<T>>>()?;
            let m = threshold_match(&gt_points, pred, &sigmas)?;
            Ok(EvalReport::single(mode, m.tp, m.fp, m.fn_count))
        }
        SigmaMode::QnrfSweep => {
            let pairs = optimal_pairs(&gt_points, pred)?;
            let per_sigma = sweep_sigmas()
                .map(|sigma: T| {
                    let tp = count_hits(&pairs, |_| sigma);
                    SigmaScore::new(sigma, tp, pred.len() - tp, gt.len() - tp)
                })
                .collect();
            Ok(EvalReport::sweep(per_sigma))
        }
    }
}

/// Combines per-scene reports by summing counts (per threshold in sweep mode).
pub fn aggregate_reports<T: Scalar>(reports: &[EvalReport<T>]) -> Result<EvalReport<T>> {
    let first = reports.first().ok_or(Error::EmptySet("report list"))?;
    let mode = first.sigma_mode;
    if reports
        .iter()
        .any(|r| std::mem::discriminant(&r.sigma_mode) != std::mem::discriminant(&mode))
    {
        return Err(invalid("cannot aggregate reports with different threshold modes"));
    }
    match mode {
        SigmaMode::QnrfSweep => {
            let template = first
                .per_sigma
                .as_ref()
                .ok_or_else(|| invalid("sweep report lacks per-threshold scores"))?;
            let per_sigma = template
                .iter()
                .enumerate()
                .map(|(t, s)| {
                    let (mut tp, mut fp, mut fn_count) = (0, 0, 0);
                    for r in reports {
                        let row = r
                            .per_sigma
                            .as_ref()
                            .and_then(|v| v.get(t))
                            .ok_or_else(|| invalid("sweep reports differ in length"))?;
                        tp += row.tp;
                        fp += row.fp;
                        fn_count += row.fn_count;
                    }
                    Ok(SigmaScore::new(s.sigma, tp, fp, fn_count))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(EvalReport::sweep(per_sigma))
        }
        _ => {
            let tp = reports.iter().map(|r| r.tp).sum();
            let fp = reports.iter().map(|r| r.fp).sum();
            let fn_count = reports.iter().map(|r| r.fn_count).sum();
            Ok(EvalReport::single(mode, tp, fp, fn_count))
        }
    }
}

/// Predicted and annotated head count of one image.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CountPair {
    pub predicted: usize,
    pub actual: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CountingMetrics<T> {
    /// Mean absolute count error.
    pub mae: T,
    /// Root of the mean squared count error.
    pub mse: T,
}

pub fn counting_metrics<T: Scalar>(pairs: &[CountPair]) -> Result<CountingMetrics<T>> {
    if pairs.is_empty() {
        return Err(Error::EmptySet("count pairs"));
    }
    let n = T::from_count(pairs.len());
    let (abs, sq) = pairs.iter().fold((T::zero(), T::zero()), |(a, s), p| {
        let e = T::from_count(p.predicted.abs_diff(p.actual));
        (a + e, s + e * e)
    });
    Ok(CountingMetrics {
        mae: abs / n,
        mse: (sq / n).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gts(c: &[(f64, f64)]) -> Vec<GtPoint<f64>> {
        c.iter().map(|&(x, y)| GtPoint::new(x, y)).collect()
    }

    fn pts(c: &[(f64, f64)]) -> Vec<Point<f64>> {
        c.iter().map(|&(x, y)| Point::new(x, y)).collect()
    }

    #[test]
    fn filter_examples() {
        let p: Vec<_> = [0.2, 0.35, 0.9].iter().map(|&c| PredPoint::new(0.0, 0.0, c)).collect();
        assert_eq!(filter_by_confidence(&p, 0.0), p);
        assert_eq!(filter_by_confidence(&p, 0.35), p[1..].to_vec());
        assert!(filter_by_confidence(&p, 1.0).is_empty());
    }

    #[test]
    fn threshold_exact_and_empty() {
        let g = pts(&[(1.0, 2.0), (5.0, 5.0), (9.0, 1.0)]);
        let m = threshold_match(&g, &g, &[0.5; 3]).unwrap();
        assert_eq!((m.tp, m.fp, m.fn_count), (3, 0, 0));
        let m = threshold_match(&g, &[], &[0.5; 3]).unwrap();
        assert_eq!((m.tp, m.fp, m.fn_count), (0, 0, 3));
    }

    #[test]
    fn threshold_pairing_by_total_distance() {
        // pairings: identity 3 + 1 = 4, swapped 11 + 8 = 19
        let g = pts(&[(0.0, 0.0), (10.0, 0.0)]);
        let p = pts(&[(3.0, 0.0), (11.0, 0.0)]);
        let m = threshold_match(&g, &p, &[4.0, 4.0]).unwrap();
        assert_eq!(m.tp, 2);
        assert_eq!(m.pairs.iter().map(|q| q.pred).collect::<Vec<_>>(), vec![0, 1]);
        let m = threshold_match(&g, &p, &[3.0, 3.0]).unwrap();
        assert_eq!((m.tp, m.fp, m.fn_count), (1, 1, 1));
    }

    #[test]
    fn threshold_more_preds_than_gt_and_back() {
        let g = pts(&[(0.0, 0.0)]);
        let p = pts(&[(50.0, 0.0), (1.0, 0.0)]);
        let m = threshold_match(&g, &p, &[2.0]).unwrap();
        assert_eq!((m.tp, m.fp, m.fn_count), (1, 1, 0));
        let m = threshold_match(&p, &g, &[2.0, 2.0]).unwrap();
        assert_eq!((m.tp, m.fp, m.fn_count), (1, 0, 1));
        assert_eq!(
            m.pairs,
            vec![MatchedPair {
                gt: 1,
                pred: 0,
                distance: 1.0
            }]
        );
    }

    #[test]
    fn threshold_rejects_bad_sigma() {
        let g = pts(&[(0.0, 0.0)]);
        assert!(threshold_match(&g, &g, &[0.0]).is_err());
        assert!(threshold_match(&g, &g, &[1.0, 1.0]).is_err());
    }

    #[test]
    fn sigma_nwpu_examples() {
        assert_eq!(sigma_nwpu(6.0, 8.0).unwrap(), 5.0);
        assert!(sigma_nwpu(2.0, 0.0).is_err());
        assert!((sigma_nwpu::<f64>(10.0, 10.0).unwrap() - 200f64.sqrt() / 2.0).abs() < 1e-12);
        assert!((sigma_nwpu::<f64>(10.0, 10.0).unwrap() - 7.0711).abs() < 1e-4);
    }

    #[test]
    fn eval_self_and_empty() {
        let g = gts(&[(1.0, 1.0), (20.0, 3.0)]);
        let p: Vec<_> = g.iter().map(|x| x.point).collect();
        let r = eval_localization(&g, &p, SigmaMode::Fixed(4.0)).unwrap();
        assert_eq!((r.precision, r.recall, r.f1), (1.0, 1.0, 1.0));
        let r = eval_localization(&g, &[], SigmaMode::Fixed(4.0)).unwrap();
        assert_eq!((r.precision, r.recall, r.f1), (1.0, 0.0, 0.0));
        let r = eval_localization::<f64>(&[], &[], SigmaMode::Fixed(4.0)).unwrap();
        assert_eq!((r.precision, r.recall, r.f1), (1.0, 1.0, 1.0));
        let r = eval_localization(&[], &p, SigmaMode::Fixed(4.0)).unwrap();
        assert_eq!((r.tp, r.fp, r.precision, r.recall, r.f1), (0, 2, 0.0, 1.0, 0.0));
    }

    #[test]
    fn eval_nwpu_requires_boxes() {
        let g = vec![GtPoint::new(0.0, 0.0).with_box(6.0, 8.0), GtPoint::new(9.0, 9.0)];
        let p = pts(&[(0.0, 0.0)]);
        assert_eq!(
            eval_localization(&g, &p, SigmaMode::Nwpu),
            Err(Error::MissingBox { index: 1 })
        );
        let r = eval_localization(&g[..1], &pts(&[(4.9, 0.0)]), SigmaMode::Nwpu).unwrap();
        assert_eq!(r.tp, 1);
        let r = eval_localization(&g[..1], &pts(&[(5.0, 0.0)]), SigmaMode::Nwpu).unwrap();
        assert_eq!(r.tp, 0);
    }

    #[test]
    fn qnrf_sweep_matched_at_two_and_a_half() {
        // direct summation: 2 thresholds score 0, 98 score 1
        let g = gts(&[(0.0, 0.0), (100.0, 0.0), (0.0, 100.0)]);
        let p = pts(&[(1.5, 2.0), (100.0, 2.5), (2.5, 100.0)]);
        let r = eval_localization(&g, &p, SigmaMode::QnrfSweep).unwrap();
        let per = r.per_sigma.as_ref().unwrap();
        assert_eq!(per.len(), 100);
        for s in per {
            let want = if s.sigma <= 2.0 { 0.0 } else { 1.0 };
            assert_eq!((s.precision, s.recall, s.f1), (want, want, want));
        }
        assert!((r.precision - 0.98).abs() < 1e-12);
        assert!((r.recall - 0.98).abs() < 1e-12);
        assert!((r.f1 - 0.98).abs() < 1e-12);
    }

    #[test]
    fn aggregate_sums_counts() {
        let g = gts(&[(0.0, 0.0), (10.0, 0.0)]);
        let a = eval_localization(&g, &pts(&[(0.0, 0.0)]), SigmaMode::Fixed(4.0)).unwrap();
        let b = eval_localization(
            &g,
            &pts(&[(0.0, 0.0), (10.0, 0.0), (50.0, 50.0)]),
            SigmaMode::Fixed(4.0),
        )
        .unwrap();
        let agg = aggregate_reports(&[a, b]).unwrap();
        assert_eq!((agg.tp, agg.fp, agg.fn_count), (3, 1, 1));
        assert_eq!(agg.precision, 0.75);
        let q = eval_localization(&g, &pts(&[(0.0, 0.0)]), SigmaMode::QnrfSweep).unwrap();
        let agg = aggregate_reports(&[q.clone(), q]).unwrap();
        assert_eq!(agg.per_sigma.unwrap()[0].tp, 2);
    }

    #[test]
    fn counting_examples() {
        let m: CountingMetrics<f64> = counting_metrics(&[CountPair {
            predicted: 4,
            actual: 4,
        }])
        .unwrap();
        assert_eq!((m.mae, m.mse), (0.0, 0.0));
        let m: CountingMetrics<f64> = counting_metrics(&[CountPair {
            predicted: 10,
            actual: 7,
        }])
        .unwrap();
        assert_eq!((m.mae, m.mse), (3.0, 3.0));
        let m: CountingMetrics<f64> = counting_metrics(&[
            CountPair {
                predicted: 0,
                actual: 1,
            },
            CountPair {
                predicted: 0,
                actual: 7,
            },
        ])
        .unwrap();
        assert_eq!((m.mae, m.mse), (4.0, 5.0));
        assert_eq!(counting_metrics::<f64>(&[]), Err(Error::EmptySet("count pairs")));
    }
}
