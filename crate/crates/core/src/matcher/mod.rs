//! One-to-one matching of predicted points to ground truth.
//!
//! Two costs are available. The plain cost of pairing ground truth `i` with
//! prediction `j` is the L1 distance of their normalized coordinates minus the
//! prediction confidence. The context cost (KMO) adds the absolute difference
//! between the two points' mean k-nearest-neighbor distances, so a prediction
//! sitting in a dense cluster is discouraged from claiming an isolated ground
//! truth point, and vice versa. Predictions left unassigned are background.

mod hungarian;
mod oracle;

use ndarray::Array2;

pub use hungarian::solve_hungarian;
pub use oracle::{brute_force_assignment, enumerate_injections, ORACLE_MAX_ROWS};

use crate::error::{invalid, Error, Result};
use crate::geometry::{knn_mean_distance, Frame, Metric, NeighborFeature, Point};
use crate::num::Scalar;

/// Number of neighbors averaged by the context cost unless configured otherwise.
pub const DEFAULT_K: usize = 4;

/// Annotated head location, optionally with the head box used by box-derived thresholds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GtPoint<T> {
    pub point: Point<T>,
    pub box_w: Option<T>,
    pub box_h: Option<T>,
}

impl<T: Scalar> GtPoint<T> {
    pub fn new(x: T, y: T) -> Self {
        Self {
            point: Point::new(x, y),
            box_w: None,
            box_h: None,
        }
    }

    pub fn with_box(mut self, w: T, h: T) -> Self {
        self.box_w = Some(w);
        self.box_h = Some(h);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !self.point.is_finite() {
            return Err(invalid("ground-truth coordinate is not finite"));
        }
        for (name, v) in [("box_w", self.box_w), ("box_h", self.box_h)] {
            if let Some(v) = v {
                if !(v > T::zero() && v.is_finite()) {
                    return Err(invalid(format!("{name} must be positive, got {v}")));
                }
            }
        }
        Ok(())
    }
}

impl<T> From<Point<T>> for GtPoint<T> {
    fn from(point: Point<T>) -> Self {
        Self {
            point,
            box_w: None,
            box_h: None,
        }
    }
}

/// A predicted head location with its confidence and, optionally, a neighbor
/// feature estimated by the network (in normalized coordinate units).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PredPoint<T> {
    pub point: Point<T>,
    pub confidence: T,
    pub knn_feature: Option<T>,
}

impl<T: Scalar> PredPoint<T> {
    pub fn new(x: T, y: T, confidence: T) -> Self {
        Self {
            point: Point::new(x, y),
            confidence,
            knn_feature: None,
        }
    }

    pub fn with_knn(mut self, feature: T) -> Self {
        self.knn_feature = Some(feature);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !self.point.is_finite() {
            return Err(invalid("prediction coordinate is not finite"));
        }
        if !(self.confidence >= T::zero() && self.confidence <= T::one()) {
            return Err(invalid(format!(
                "confidence must lie in [0,1], got {}",
                self.confidence
            )));
        }
        if let Some(f) = self.knn_feature {
            if !(f >= T::zero() && f.is_finite()) {
                return Err(invalid(format!("knn feature must be finite and >= 0, got {f}")));
            }
        }
        Ok(())
    }
}

/// `M × N` matrix of pairing costs, ground truth on rows, predictions on columns.
///
/// Always finite with `M ≤ N`.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix<T> {
    entries: Array2<T>,
}

impl<T: Scalar> CostMatrix<T> {
    pub fn new(entries: Array2<T>) -> Result<Self> {
        let (m, n) = entries.dim();
        if m > n {
            return Err(Error::TooManyGroundTruths { gt: m, pred: n });
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(invalid("cost matrix contains a non-finite entry"));
        }
        Ok(Self { entries })
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        Self::new(rows_to_array(rows)?)
    }

    /// Skips validation; solvers re-check their own preconditions.
    pub fn from_rows_unchecked(rows: Vec<Vec<T>>) -> Self {
        Self {
            entries: rows_to_array(rows).expect("rectangular rows"),
        }
    }

    pub fn entries(&self) -> &Array2<T> {
        &self.entries
    }

    pub fn into_entries(self) -> Array2<T> {
        self.entries
    }

    pub fn m_gt(&self) -> usize {
        self.entries.nrows()
    }

    pub fn n_pred(&self) -> usize {
        self.entries.ncols()
    }

    #[inline]
    pub fn get(&self, gt: usize, pred: usize) -> T {
        self.entries[[gt, pred]]
    }

    /// Sum of the selected entries, accumulated in row order.
    pub fn total(&self, matched_pred_of_gt: &[usize]) -> T {
        matched_pred_of_gt
            .iter()
            .enumerate()
            .fold(T::zero(), |acc, (i, &j)| acc + self.get(i, j))
    }
}

fn rows_to_array<T: Scalar>(rows: Vec<Vec<T>>) -> Result<Array2<T>> {
    let m = rows.len();
    let n = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != n) {
        return Err(invalid("cost rows have differing lengths"));
    }
    Array2::from_shape_vec((m, n), rows.into_iter().flatten().collect()).map_err(|e| invalid(e.to_string()))
}

/// Injective mapping from ground-truth rows to prediction columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment<T> {
    pub matched_pred_of_gt: Vec<usize>,
    pub total_cost: T,
}

impl<T> Assignment<T> {
    /// True when every row has a distinct column below `n_pred`.
    pub fn is_injective_within(&self, n_pred: usize) -> bool {
        let mut seen = vec![false; n_pred];
        self.matched_pred_of_gt.iter().all(|&j| {
            if j >= n_pred || seen[j] {
                return false;
            }
            seen[j] = true;
            true
        })
    }

    /// Prediction indices that no ground truth claimed, ascending.
    pub fn unassigned(&self, n_pred: usize) -> Vec<usize> {
        let mut taken = vec![false; n_pred];
        for &j in &self.matched_pred_of_gt {
            taken[j] = true;
        }
        (0..n_pred).filter(|&j| !taken[j]).collect()
    }
}

/// Full outcome of matching one scene.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchResult<T> {
    pub assignment: Assignment<T>,
    /// Cost of each ground truth's selected pairing, in ground-truth order.
    pub pair_costs: Vec<T>,
    /// Predictions classified as background.
    pub background_preds: Vec<usize>,
}

impl<T> MatchResult<T> {
    /// Per-prediction positive/background labels for the classification loss.
    pub fn labels(&self, n_pred: usize) -> Vec<bool> {
        let mut labels = vec![false; n_pred];
        for &j in &self.assignment.matched_pred_of_gt {
            labels[j] = true;
        }
        labels
    }
}

/// Matching cost family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CostKind {
    /// Distance minus confidence.
    L1,
    /// Distance plus neighbor-context difference minus confidence.
    #[default]
    Kmo,
}

/// Where prediction-side neighbor features come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KnnSource {
    /// Each prediction carries its own `knn_feature`.
    Supplied,
    /// Computed from the predicted point set itself.
    #[default]
    Computed,
}

/// Parameters of the neighbor-context term.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KmoParams {
    pub k: usize,
    pub source: KnnSource,
    /// Distance used for the neighbor features themselves.
    pub metric: Metric,
}

impl Default for KmoParams {
    fn default() -> Self {
        Self {
            k: DEFAULT_K,
            source: KnnSource::Computed,
            metric: Metric::L1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct MatchConfig {
    pub cost: CostKind,
    pub kmo: KmoParams,
}

fn check_inputs<T: Scalar>(gt: &[GtPoint<T>], pred: &[PredPoint<T>], frame: &Frame<T>) -> Result<()> {
    if gt.is_empty() {
        return Err(Error::EmptySet("ground truth"));
    }
    if gt.len() > pred.len() {
        return Err(Error::TooManyGroundTruths {
            gt: gt.len(),
            pred: pred.len(),
        });
    }
    frame.validate()?;
    gt.iter().try_for_each(GtPoint::validate)?;
    pred.iter().try_for_each(PredPoint::validate)
}

fn normalized_gt<T: Scalar>(gt: &[GtPoint<T>], frame: &Frame<T>) -> Vec<Point<T>> {
    gt.iter().map(|g| frame.normalize(g.point)).collect()
}

fn normalized_pred<T: Scalar>(pred: &[PredPoint<T>], frame: &Frame<T>) -> Vec<Point<T>> {
    pred.iter().map(|p| frame.normalize(p.point)).collect()
}

/// Distance-minus-confidence cost on coordinates normalized by `frame`.
///
/// Pass [`Frame::unit`] to work directly in pixel units.
pub fn build_cost_l1<T: Scalar>(gt: &[GtPoint<T>], pred: &[PredPoint<T>], frame: Frame<T>) -> Result<CostMatrix<T>> {
    check_inputs(gt, pred, &frame)?;
    let g = normalized_gt(gt, &frame);
    let p = normalized_pred(pred, &frame);
    let entries = Array2::from_shape_fn((g.len(), p.len()), |(i, j)| {
        Metric::L1.distance(g[i], p[j]) - pred[j].confidence
    });
    CostMatrix::new(entries)
}

/// Ground-truth and prediction neighbor features in normalized units.
pub fn kmo_features<T: Scalar>(
    gt: &[GtPoint<T>],
    pred: &[PredPoint<T>],
    params: &KmoParams,
    frame: Frame<T>,
) -> Result<(NeighborFeature<T>, NeighborFeature<T>)> {
    check_inputs(gt, pred, &frame)?;
    if params.k == 0 {
        return Err(invalid("k must be at least 1"));
    }
    let gt_feature = knn_mean_distance(&normalized_gt(gt, &frame), params.k, params.metric)?;
    let pred_feature = match params.source {
        KnnSource::Supplied => NeighborFeature {
            values: pred
                .iter()
                .enumerate()
                .map(|(index, p)| p.knn_feature.ok_or(Error::MissingFeature { index }))
                .collect::<Result<_>>()?,
        },
        KnnSource::Computed => knn_mean_distance(&normalized_pred(pred, &frame), params.k, params.metric)?,
    };
    Ok((gt_feature, pred_feature))
}

/// Context cost: [`build_cost_l1`] plus `|gt_feature[i] − pred_feature[j]|`.
pub fn build_cost_kmo<T: Scalar>(
    gt: &[GtPoint<T>],
    pred: &[PredPoint<T>],
    params: &KmoParams,
    frame: Frame<T>,
) -> Result<CostMatrix<T>> {
    let (gk, pk) = kmo_features(gt, pred, params, frame)?;
    let mut entries = build_cost_l1(gt, pred, frame)?.into_entries();
    for ((i, j), e) in entries.indexed_iter_mut() {
        *e += (gk[i] - pk[j]).abs();
    }
    CostMatrix::new(entries)
}

/// Builds the configured cost and solves the assignment.
pub fn match_points<T: Scalar>(
    gt: &[GtPoint<T>],
    pred: &[PredPoint<T>],
    frame: Frame<T>,
    config: &MatchConfig,
) -> Result<MatchResult<T>> {
    let cost = match config.cost {
        CostKind::L1 => build_cost_l1(gt, pred, frame)?,
        CostKind::Kmo => build_cost_kmo(gt, pred, &config.kmo, frame)?,
    };
    let assignment = solve_hungarian(&cost)?;
    let pair_costs = assignment
        .matched_pred_of_gt
        .iter()
        .enumerate()
        .map(|(i, &j)| cost.get(i, j))
        .collect();
    let background_preds = assignment.unassigned(pred.len());
    Ok(MatchResult {
        assignment,
        pair_costs,
        background_preds,
    })
}
