//! Context-aware Hungarian matching of predicted head points to ground truth,
//! with the matching losses, crowd localization and counting metrics, and a
//! seeded synthetic scene generator.
//!
//! All numeric code is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! at the crate root fix the common `f64` instantiation.
//!
//! ```
//! use kmo_match::{match_points, Frame, GtPoint64, MatchConfig, PredPoint64};
//!
//! let gt = [GtPoint64::new(10.0, 10.0), GtPoint64::new(40.0, 12.0)];
//! let pred = [
//!     PredPoint64::new(41.0, 12.0, 0.9),
//!     PredPoint64::new(200.0, 90.0, 0.2),
//!     PredPoint64::new(11.0, 9.0, 0.8),
//! ];
//! let frame = Frame::new(256.0, 128.0).unwrap();
//! let result = match_points(&gt, &pred, frame, &MatchConfig::default()).unwrap();
//! assert_eq!(result.assignment.matched_pred_of_gt, vec![2, 0]);
//! assert_eq!(result.background_preds, vec![1]);
//! ```

pub mod error;
pub mod eval;
pub mod geometry;
pub mod loss;
pub mod matcher;
pub mod num;
pub mod synth;

pub use error::{Error, Result};
pub use eval::{
    aggregate_reports, counting_metrics, eval_localization, filter_by_confidence, sigma_nwpu, threshold_match,
    CountPair, CountingMetrics, EvalReport, Prf, SigmaMode, SigmaScore, ThresholdMatch,
};
pub use geometry::{knn_mean_distance, pairwise_distance, Frame, Metric, NeighborFeature, Point, PointSet};
pub use loss::{focal_cls_loss, loc_loss, normalize_points, total_loss, FocalParams, LossReport};
pub use matcher::{
    brute_force_assignment, build_cost_kmo, build_cost_l1, match_points, solve_hungarian, Assignment, CostKind,
    CostMatrix, GtPoint, KmoParams, KnnSource, MatchConfig, MatchResult, PredPoint,
};
pub use num::Scalar;

pub type Point64 = Point<f64>;
pub type Point32 = Point<f32>;
pub type PointSet64 = PointSet<f64>;
pub type GtPoint64 = GtPoint<f64>;
pub type PredPoint64 = PredPoint<f64>;
pub type CostMatrix64 = CostMatrix<f64>;
pub type Assignment64 = Assignment<f64>;
pub type MatchResult64 = MatchResult<f64>;
pub type EvalReport64 = EvalReport<f64>;
pub type GtPoint32 = GtPoint<f32>;
pub type PredPoint32 = PredPoint<f32>;
pub type CostMatrix32 = CostMatrix<f32>;

/// Crate version, shared by the command-line reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
