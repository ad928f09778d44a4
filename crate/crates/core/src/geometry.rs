//! Point containers, pairwise distances and the k-nearest-neighbor
//! mean-distance feature used as matching context.

use std::cmp::Ordering;
use std::ops::Deref;

use ndarray::Array2;

use crate::error::{invalid, Error, Result};
use crate::num::Scalar;

/// A 2-D location in pixel (or normalized) coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point<T> {
    pub x: T,
    pub y: T,
}

impl<T: Scalar> Point<T> {
    pub fn new(x: T, y: T) -> Self {
        Self { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn translate(self, dx: T, dy: T) -> Self {
        Self::new(self.x + dx, self.y + dy)
    }

    pub fn scale(self, c: T) -> Self {
        Self::new(self.x * c, self.y * c)
    }
}

/// Width and height of the image (or crop) a point set lives in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame<T> {
    pub width: T,
    pub height: T,
}

impl<T: Scalar> Frame<T> {
    pub fn new(width: T, height: T) -> Result<Self> {
        let frame = Self { width, height };
        frame.validate()?;
        Ok(frame)
    }

    /// The unit frame; normalizing against it leaves coordinates untouched.
    pub fn unit() -> Self {
        Self {
            width: T::one(),
            height: T::one(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.width > T::zero() && self.height > T::zero()) || !self.width.is_finite() || !self.height.is_finite() {
            return Err(invalid(format!(
                "frame dimensions must be positive and finite, got {}x{}",
                self.width, self.height
            )));
        }
        Ok(())
    }

    /// Maps a point into `[0,1]²` by dividing each coordinate by its frame dimension.
    pub fn normalize(&self, p: Point<T>) -> Point<T> {
        Point::new(p.x / self.width, p.y / self.height)
    }
}

/// An ordered list of points together with the frame they were annotated in.
///
/// Duplicate points are allowed.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet<T> {
    points: Vec<Point<T>>,
    frame: Frame<T>,
}

impl<T: Scalar> PointSet<T> {
    pub fn new(points: Vec<Point<T>>, frame: Frame<T>) -> Result<Self> {
        frame.validate()?;
        ensure_finite(&points)?;
        Ok(Self { points, frame })
    }

    pub fn points(&self) -> &[Point<T>] {
        &self.points
    }

    pub fn frame(&self) -> Frame<T> {
        self.frame
    }

    pub fn frame_width(&self) -> T {
        self.frame.width
    }

    pub fn frame_height(&self) -> T {
        self.frame.height
    }

    pub fn into_points(self) -> Vec<Point<T>> {
        self.points
    }
}

impl<T> Deref for PointSet<T> {
    type Target = [Point<T>];

    fn deref(&self) -> &[Point<T>] {
        &self.points
    }
}

/// Distance used between two points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Metric {
    /// Manhattan distance `|dx| + |dy|`.
    #[default]
    L1,
    /// Euclidean distance.
    L2,
}

impl Metric {
    #[inline]
    pub fn distance<T: Scalar>(self, a: Point<T>, b: Point<T>) -> T {
        let dx = a.x - b.x;
        let dy = a.y - b.y;
        match self {
            Metric::L1 => dx.abs() + dy.abs(),
            Metric::L2 => dx.hypot(dy),
        }
    }
}

/// Per-point mean distance to the k nearest other points of the same set.
#[derive(Debug, Clone, PartialEq)]
pub struct NeighborFeature<T> {
    pub values: Vec<T>,
}

impl<T> Deref for NeighborFeature<T> {
    type Target = [T];

    fn deref(&self) -> &[T] {
        &self.values
    }
}

pub(crate) fn ensure_finite<T: Scalar>(points: &[Point<T>]) -> Result<()> {
    match points.iter().position(|p| !p.is_finite()) {
        Some(i) => Err(invalid(format!("point {i} has a non-finite coordinate"))),
        None => Ok(()),
    }
}

/// Dense `|a| × |b|` matrix of distances between every point of `a` and every point of `b`.
pub fn pairwise_distance<T: Scalar>(a: &[Point<T>], b: &[Point<T>], metric: Metric) -> Result<Array2<T>> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySet("point set"));
    }
    ensure_finite(a)?;
    ensure_finite(b)?;
    Ok(Array2::from_shape_fn((a.len(), b.len()), |(i, j)| {
        metric.distance(a[i], b[j])
    }))
}

/// Mean distance from each point to its `k` nearest other points.
///
/// `k` is clamped to `len - 1`; a singleton set yields `[0]`. Neighbors at equal
/// distance are ranked by lower index, and coincident points count as distance 0.
pub fn knn_mean_distance<T: Scalar>(points: &[Point<T>], k: usize, metric: Metric) -> Result<NeighborFeature<T>> {
    if points.is_empty() {
        return Err(Error::EmptySet("point set"));
    }
    if k == 0 {
        return Err(invalid("k must be at least 1"));
    }
    ensure_finite(points)?;

    let n = points.len();
    let k = k.min(n - 1);
    if k == 0 {
        return Ok(NeighborFeature {
            values: vec![T::zero()],
        });
    }
    let denom = T::from_count(k);

    let mut row: Vec<(T, usize)> = Vec::with_capacity(n - 1);
    let values = points
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            row.clear();
            row.extend(
                points
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .map(|(j, &q)| (metric.distance(p, q), j)),
            );
            // finite inputs give finite distances, so partial_cmp never fails
            row.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal).then(a.1.cmp(&b.1)));
            let sum = row[..k].iter().fold(T::zero(), |acc, &(d, _)| acc + d);
            sum / denom
        })
        .collect();
    Ok(NeighborFeature { values })
}
