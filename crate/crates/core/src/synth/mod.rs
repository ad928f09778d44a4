//! Seeded synthetic scenes, detector-style perturbations and matching
//! ambiguity statistics.
//!
//! Every function here is a pure function of its arguments and seed. See
//! [`SceneRng`] for the exact random stream.

mod crossing;
mod fixture;
mod rng;

pub use crossing::{count_crossings, segments_intersect};
pub use fixture::{two_density_scene, TwoDensityParams, TwoDensityScene};
pub use rng::SceneRng;

use crate::error::{Error, Result};
use crate::geometry::{Frame, Point};
use crate::matcher::{match_points, Assignment, CostKind, GtPoint, KmoParams, MatchConfig, PredPoint};
use crate::num::Scalar;

/// Spatial layout of generated ground truth.
#[derive(Debug, Clone, PartialEq)]
pub enum Pattern {
    /// Row-major lattice starting at `origin`, x varying fastest.
    Grid { spacing: f64, origin: (f64, f64) },
    /// Gaussian blobs; point `i` belongs to center `i mod centers.len()`.
    Clusters { centers: Vec<(f64, f64)>, spread: f64 },
    /// Independent uniform positions over the frame.
    Uniform,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SceneSpec {
    pub pattern: Pattern,
    pub n_points: usize,
    pub frame: (f64, f64),
    /// Head box attached to every generated point, if any.
    pub head_box: Option<(f64, f64)>,
    pub seed: u64,
}

fn spec_err(msg: impl Into<String>) -> Error {
    Error::InvalidSpec(msg.into())
}

impl SceneSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_points == 0 {
            return Err(spec_err("n_points must be at least 1"));
        }
        let (w, h) = self.frame;
        if !(w > 0.0 && h > 0.0 && w.is_finite() && h.is_finite()) {
            return Err(spec_err(format!("frame must be positive, got {w}x{h}")));
        }
        if let Some((bw, bh)) = self.head_box {
            if !(bw > 0.0 && bh > 0.0 && bw.is_finite() && bh.is_finite()) {
                return Err(spec_err("head box extents must be positive"));
            }
        }
        match &self.pattern {
            Pattern::Grid { spacing, origin } => {
                if !(*spacing > 0.0 && spacing.is_finite()) {
                    return Err(spec_err("grid spacing must be positive"));
                }
                if !(origin.0.is_finite() && origin.1.is_finite()) {
                    return Err(spec_err("grid origin must be finite"));
                }
            }
            Pattern::Clusters { centers, spread } => {
                if centers.is_empty() {
                    return Err(spec_err("clusters pattern needs at least one center"));
                }
                if !(*spread >= 0.0 && spread.is_finite()) {
                    return Err(spec_err("cluster spread must be non-negative"));
                }
                if centers.iter().any(|c| !(c.0.is_finite() && c.1.is_finite())) {
                    return Err(spec_err("cluster centers must be finite"));
                }
            }
            Pattern::Uniform => {}
        }
        Ok(())
    }
}

/// Lattice shape used for `n` requested grid points: `floor(√n)` columns and as
/// many complete rows as fit, so the actual count may be below `n`.
pub fn grid_shape(n: usize) -> (usize, usize) {
    let mut cols = (n as f64).sqrt() as usize;
    while cols * cols > n {
        cols -= 1;
    }
    while (cols + 1) * (cols + 1) <= n {
        cols += 1;
    }
    let cols = cols.max(1);
    (cols, n / cols)
}

/// Generates ground truth inside `[0, w] × [0, h]`.
///
/// Grid requests are rounded down to the largest complete lattice; the
/// returned length is the actual count. A lattice that leaves the frame is an
/// [`Error::InvalidSpec`].
pub fn gen_scene<T: Scalar>(spec: &SceneSpec) -> Result<Vec<GtPoint<T>>> {
    spec.validate()?;
    let (w, h) = spec.frame;
    let mut rng = SceneRng::new(spec.seed);
    let raw: Vec<(f64, f64)> = match &spec.pattern {
        Pattern::Grid { spacing, origin } => {
            let (cols, rows) = grid_shape(spec.n_points);
            let pts: Vec<(f64, f64)> = (0..cols * rows)
                .map(|i| {
                    (
                        origin.0 + (i % cols) as f64 * spacing,
                        origin.1 + (i / cols) as f64 * spacing,
                    )
                })
                .collect();
            if pts
                .iter()
                .any(|&(x, y)| !(0.0..=w).contains(&x) || !(0.0..=h).contains(&y))
            {
                return Err(spec_err(format!(
                    "{cols}x{rows} lattice with spacing {spacing} does not fit in a {w}x{h} frame"
                )));
            }
            pts
        }
        Pattern::Clusters { centers, spread } => (0..spec.n_points)
            .map(|i| {
                let c = centers[i % centers.len()];
                let x = c.0 + spread * rng.normal();
                let y = c.1 + spread * rng.normal();
                (x.clamp(0.0, w), y.clamp(0.0, h))
            })
            .collect(),
        Pattern::Uniform => (0..spec.n_points)
            .map(|_| {
                let x = rng.uniform() * w;
                let y = rng.uniform() * h;
                (x, y)
            })
            .collect(),
    };
    Ok(raw
        .into_iter()
        .map(|(x, y)| {
            let g = GtPoint::new(T::lit(x), T::lit(y));
            match spec.head_box {
                Some((bw, bh)) => g.with_box(T::lit(bw), T::lit(bh)),
                None => g,
            }
        })
        .collect())
}

/// How perturbed predictions receive confidences.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConfModel {
    Constant(f64),
    /// `mean + sd · N(0,1)`, clamped to `[0, 1]`.
    Noisy {
        mean: f64,
        sd: f64,
    },
}

/// Detector error model applied to ground truth to obtain predictions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbSpec {
    /// Per-coordinate Gaussian standard deviation, pixels.
    pub jitter_sigma: f64,
    /// Probability of dropping each point.
    pub drop_rate: f64,
    /// Spurious points appended, as a fraction of the ground-truth count (rounded).
    pub spurious_rate: f64,
    pub translate: (f64, f64),
    pub conf_model: ConfModel,
    pub seed: u64,
}

impl Default for PerturbSpec {
    fn default() -> Self {
        Self {
            jitter_sigma: 0.0,
            drop_rate: 0.0,
            spurious_rate: 0.0,
            translate: (0.0, 0.0),
            conf_model: ConfModel::Constant(1.0),
            seed: 0,
        }
    }
}

impl PerturbSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.jitter_sigma >= 0.0 && self.jitter_sigma.is_finite()) {
            return Err(spec_err("jitter_sigma must be non-negative"));
        }
        if !(0.0..=1.0).contains(&self.drop_rate) {
            return Err(spec_err("drop_rate must lie in [0,1]"));
        }
        if !(self.spurious_rate >= 0.0 && self.spurious_rate.is_finite()) {
            return Err(spec_err("spurious_rate must be non-negative"));
        }
        if !(self.translate.0.is_finite() && self.translate.1.is_finite()) {
            return Err(spec_err("translation must be finite"));
        }
        match self.conf_model {
            ConfModel::Constant(c) if !(0.0..=1.0).contains(&c) => {
                Err(spec_err("constant confidence must lie in [0,1]"))
            }
            ConfModel::Noisy { mean, sd } if !(0.0..=1.0).contains(&mean) || !(sd >= 0.0 && sd.is_finite()) => {
                Err(spec_err("noisy confidence needs mean in [0,1] and sd >= 0"))
            }
            _ => Ok(()),
        }
    }
}

/// Turns ground truth into predictions: translate, jitter, drop, append
/// spurious uniform points in `frame`, then assign confidences.
///
/// Random draws happen in a fixed order (two normals per point, one uniform
/// per point for dropping, two uniforms per spurious point, then confidence
/// draws), regardless of which rates are zero.
pub fn perturb<T: Scalar>(gt: &[GtPoint<T>], frame: Frame<T>, spec: &PerturbSpec) -> Result<Vec<PredPoint<T>>> {
    spec.validate()?;
    frame.validate()?;
    let mut rng = SceneRng::new(spec.seed);
    let to_f = |v: T| v.to_f64().unwrap_or(f64::NAN);

    let moved: Vec<(f64, f64)> = gt
        .iter()
        .map(|g| {
            let x = to_f(g.point.x) + spec.translate.0;
            let y = to_f(g.point.y) + spec.translate.1;
            let jx = spec.jitter_sigma * rng.normal();
            let jy = spec.jitter_sigma * rng.normal();
            (x + jx, y + jy)
        })
        .collect();
    let mut kept: Vec<(f64, f64)> = moved.into_iter().filter(|_| rng.uniform() >= spec.drop_rate).collect();

    let n_spurious = (spec.spurious_rate * gt.len() as f64).round() as usize;
    let (w, h) = (to_f(frame.width), to_f(frame.height));
    for _ in 0..n_spurious {
        let x = rng.uniform() * w;
        let y = rng.uniform() * h;
        kept.push((x, y));
    }

    Ok(kept
        .into_iter()
        .map(|(x, y)| {
            let c = match spec.conf_model {
                ConfModel::Constant(c) => c,
                ConfModel::Noisy { mean, sd } => (mean + sd * rng.normal()).clamp(0.0, 1.0),
            };
            PredPoint::new(T::lit(x), T::lit(y), T::lit(c))
        })
        .collect())
}

/// Side-by-side comparison of the plain and context-aware assignments.
#[derive(Debug, Clone, PartialEq)]
pub struct AmbiguityReport<T> {
    pub l1_assignment: Assignment<T>,
    pub kmo_assignment: Assignment<T>,
    /// Ground truths assigned to different predictions by the two costs.
    pub n_differing_pairs: usize,
    pub l1_crossings: usize,
    pub kmo_crossings: usize,
}

/// Matches under both costs with every confidence set to 1 and counts
/// disagreements and crossing match segments.
pub fn ambiguity_report<T: Scalar>(
    gt: &[GtPoint<T>],
    pred: &[PredPoint<T>],
    frame: Frame<T>,
    k: usize,
) -> Result<AmbiguityReport<T>> {
    let uniform: Vec<PredPoint<T>> = pred
        .iter()
        .map(|p| PredPoint {
            confidence: T::one(),
            ..*p
        })
        .collect();
    let kmo = KmoParams {
        k,
        ..KmoParams::default()
    };
    let l1 = match_points(
        gt,
        &uniform,
        frame,
        &MatchConfig {
            cost: CostKind::L1,
            kmo,
        },
    )?;
    let ctx = match_points(
        gt,
        &uniform,
        frame,
        &MatchConfig {
            cost: CostKind::Kmo,
            kmo,
        },
    )?;

    let gt_pts: Vec<Point<T>> = gt.iter().map(|g| g.point).collect();
    let pred_pts: Vec<Point<T>> = pred.iter().map(|p| p.point).collect();
    let l1_a = l1.assignment;
    let kmo_a = ctx.assignment;
    let n_differing_pairs = l1_a
        .matched_pred_of_gt
        .iter()
        .zip(&kmo_a.matched_pred_of_gt)
        .filter(|(a, b)| a != b)
        .count();
    Ok(AmbiguityReport {
        l1_crossings: count_crossings(&gt_pts, &pred_pts, &l1_a.matched_pred_of_gt),
        kmo_crossings: count_crossings(&gt_pts, &pred_pts, &kmo_a.matched_pred_of_gt),
        n_differing_pairs,
        l1_assignment: l1_a,
        kmo_assignment: kmo_a,
    })
}
