//! Scene files and report envelopes.

use std::collections::BTreeSet;
use std::path::Path;

use kmo_match::{Frame, GtPoint64, PredPoint, PredPoint64};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const SCHEMA: &str = "kmo-match/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GtRecord {
    pub x: f64,
    pub y: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PredRecord {
    pub x: f64,
    pub y: f64,
    pub score: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub knn: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneFile {
    pub scene_id: String,
    pub width: f64,
    pub height: f64,
    pub gt: Vec<GtRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pred: Option<Vec<PredRecord>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneDoc {
    pub schema: String,
    pub scenes: Vec<SceneFile>,
}

impl From<&GtPoint64> for GtRecord {
    fn from(g: &GtPoint64) -> Self {
        Self {
            x: g.point.x,
            y: g.point.y,
            w: g.box_w,
            h: g.box_h,
        }
    }
}

impl From<&PredPoint64> for PredRecord {
    fn from(p: &PredPoint64) -> Self {
        Self {
            x: p.point.x,
            y: p.point.y,
            score: p.confidence,
            knn: p.knn_feature,
        }
    }
}

impl SceneFile {
    pub fn frame(&self) -> Result<Frame<f64>, CliError> {
        Frame::new(self.width, self.height).map_err(|e| CliError::data(&self.scene_id, e))
    }

    pub fn gt_points(&self) -> Result<Vec<GtPoint64>, CliError> {
        self.gt
            .iter()
            .map(|r| {
                let g = match (r.w, r.h) {
                    (Some(w), Some(h)) => GtPoint64::new(r.x, r.y).with_box(w, h),
                    (None, None) => GtPoint64::new(r.x, r.y),
                    _ => {
                        return Err(CliError::Schema(format!(
                            "scene {}: head box needs both w and h",
                            self.scene_id
                        )))
                    }
                };
                g.validate().map_err(|e| CliError::data(&self.scene_id, e))?;
                Ok(g)
            })
            .collect()
    }

    /// Predictions of the scene; a scene without a `pred` section is a schema error.
    pub fn pred_points(&self) -> Result<Vec<PredPoint64>, CliError> {
        let recs = self
            .pred
            .as_ref()
            .ok_or_else(|| CliError::Schema(format!("scene {} has no pred section", self.scene_id)))?;
        recs.iter()
            .map(|r| {
                let mut p = PredPoint::new(r.x, r.y, r.score);
                p.knn_feature = r.knn;
                p.validate().map_err(|e| CliError::data(&self.scene_id, e))?;
                Ok(p)
            })
            .collect()
    }
}

impl SceneDoc {
    pub fn new(mut scenes: Vec<SceneFile>) -> Self {
        scenes.sort_by(|a, b| a.scene_id.cmp(&b.scene_id));
        Self {
            schema: SCHEMA.to_string(),
            scenes,
        }
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let doc: SceneDoc =
            serde_json::from_str(&text).map_err(|e| CliError::Schema(format!("{}: {e}", path.display())))?;
        if doc.schema != SCHEMA {
            return Err(CliError::Schema(format!(
                "{}: unsupported schema {:?}, expected {SCHEMA:?}",
                path.display(),
                doc.schema
            )));
        }
        let mut seen = BTreeSet::new();
        let dups: BTreeSet<&str> = doc
            .scenes
            .iter()
            .filter(|s| !seen.insert(s.scene_id.as_str()))
            .map(|s| s.scene_id.as_str())
            .collect();
        if !dups.is_empty() {
            return Err(CliError::Schema(format!(
                "{}: duplicate scene ids: {}",
                path.display(),
                dups.into_iter().collect::<Vec<_>>().join(", ")
            )));
        }
        Ok(doc)
    }
}

/// Pairs scenes of two files by id, sorted by id.
pub fn align<'a>(gt: &'a SceneDoc, pred: &'a SceneDoc) -> Result<Vec<(&'a SceneFile, &'a SceneFile)>, CliError> {
    let gt_ids: BTreeSet<&str> = gt.scenes.iter().map(|s| s.scene_id.as_str()).collect();
    let pred_ids: BTreeSet<&str> = pred.scenes.iter().map(|s| s.scene_id.as_str()).collect();
    if gt_ids != pred_ids {
        let only_gt: Vec<&str> = gt_ids.difference(&pred_ids).copied().collect();
        let only_pred: Vec<&str> = pred_ids.difference(&gt_ids).copied().collect();
        return Err(CliError::Schema(format!(
            "scene ids differ; only in gt: [{}]; only in pred: [{}]",
            only_gt.join(", "),
            only_pred.join(", ")
        )));
    }
    let mut pairs: Vec<_> = gt
        .scenes
        .iter()
        .map(|g| {
            let p = pred
                .scenes
                .iter()
                .find(|p| p.scene_id == g.scene_id)
                .expect("ids checked");
            (g, p)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.scene_id.cmp(&b.0.scene_id));
    Ok(pairs)
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::Internal(e.to_string()))?;
    s.push('\n');
    Ok(s)
}
