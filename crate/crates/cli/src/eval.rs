use std::io::Write;

use kmo_match::{
    aggregate_reports, counting_metrics, eval_localization, filter_by_confidence, CountPair, CountingMetrics,
    EvalReport64, Point64, SigmaMode, SigmaScore,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::CliError;
use crate::format::{align, to_json, SceneDoc, SceneFile, SCHEMA};
use crate::{emit, thread_pool, usage, EvalArgs, SigmaModeArg};

#[derive(Debug, Serialize)]
struct SigmaRow {
    sigma: f64,
    tp: usize,
    fp: usize,
    #[serde(rename = "fn")]
    fn_count: usize,
    precision: f64,
    recall: f64,
    f1: f64,
}

impl From<&SigmaScore<f64>> for SigmaRow {
    fn from(s: &SigmaScore<f64>) -> Self {
        Self {
            sigma: s.sigma,
            tp: s.tp,
            fp: s.fp,
            fn_count: s.fn_count,
            precision: s.precision,
            recall: s.recall,
            f1: s.f1,
        }
    }
}

#[derive(Debug, Serialize)]
struct Scores {
    tp: usize,
    fp: usize,
    #[serde(rename = "fn")]
    fn_count: usize,
    precision: f64,
    recall: f64,
    f1: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    per_sigma: Option<Vec<SigmaRow>>,
}

impl From<&EvalReport64> for Scores {
    fn from(r: &EvalReport64) -> Self {
        Self {
            tp: r.tp,
            fp: r.fp,
            fn_count: r.fn_count,
            precision: r.precision,
            recall: r.recall,
            f1: r.f1,
            per_sigma: r.per_sigma.as_ref().map(|v| v.iter().map(SigmaRow::from).collect()),
        }
    }
}

#[derive(Debug, Serialize)]
struct SceneEval {
    scene_id: String,
    n_gt: usize,
    /// Predictions surviving the confidence threshold.
    n_pred: usize,
    #[serde(flatten)]
    scores: Scores,
}

#[derive(Debug, Serialize)]
struct Counting {
    mae: f64,
    mse: f64,
}

#[derive(Debug, Serialize)]
struct EvalJson {
    schema: &'static str,
    command: &'static str,
    sigma_mode: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    sigma: Option<f64>,
    tau: f64,
    scenes: Vec<SceneEval>,
    aggregate: Scores,
    counting: Counting,
}

fn eval_scene(
    gt_scene: &SceneFile,
    pred_scene: &SceneFile,
    mode: SigmaMode<f64>,
    tau: f64,
) -> Result<(EvalReport64, CountPair), CliError> {
    let id = &gt_scene.scene_id;
    let gt = gt_scene.gt_points()?;
    let kept: Vec<Point64> = filter_by_confidence(&pred_scene.pred_points()?, tau)
        .iter()
        .map(|p| p.point)
        .collect();
    let report = eval_localization(&gt, &kept, mode).map_err(|e| CliError::data(id, e))?;
    let counts = CountPair {
        predicted: kept.len(),
        actual: gt.len(),
    };
    Ok((report, counts))
}

pub(crate) fn run(a: &EvalArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    if !(0.0..=1.0).contains(&a.tau) {
        return Err(usage("tau", "must lie in [0, 1]"));
    }
    let (mode, mode_name, sigma) = match a.sigma_mode {
        SigmaModeArg::Fixed => {
            if !(a.sigma > 0.0 && a.sigma.is_finite()) {
                return Err(usage("sigma", "must be positive"));
            }
            (SigmaMode::Fixed(a.sigma), "fixed", Some(a.sigma))
        }
        SigmaModeArg::Nwpu => (SigmaMode::Nwpu, "nwpu", None),
        SigmaModeArg::Qnrf => (SigmaMode::QnrfSweep, "qnrf", None),
    };
    let pool = thread_pool(a.parallelism)?;
    let gt_doc = SceneDoc::load(&a.gt)?;
    let pred_doc = SceneDoc::load(&a.pred)?;
    let pairs = align(&gt_doc, &pred_doc)?;
    if pairs.is_empty() {
        return Err(CliError::Schema("no scenes to evaluate".into()));
    }
    let results: Vec<(EvalReport64, CountPair)> = pool.install(|| {
        pairs
            .par_iter()
            .map(|(g, p)| eval_scene(g, p, mode, a.tau))
            .collect::<Result<_, _>>()
    })?;

    let reports: Vec<EvalReport64> = results.iter().map(|(r, _)| r.clone()).collect();
    let counts: Vec<CountPair> = results.iter().map(|(_, c)| *c).collect();
    let internal = |e: kmo_match::Error| CliError::Internal(e.to_string());
    let aggregate = aggregate_reports(&reports).map_err(internal)?;
    let counting: CountingMetrics<f64> = counting_metrics(&counts).map_err(internal)?;

    let scenes = pairs
        .iter()
        .zip(&results)
        .map(|((g, _), (r, c))| SceneEval {
            scene_id: g.scene_id.clone(),
            n_gt: c.actual,
            n_pred: c.predicted,
            scores: Scores::from(r),
        })
        .collect::<Vec<_>>();
    let summary = format!(
        "eval: {} scenes, sigma {mode_name}, tau {}, P {:.4} R {:.4} F1 {:.4}, MAE {:.3} MSE {:.3}",
        scenes.len(),
        a.tau,
        aggregate.precision,
        aggregate.recall,
        aggregate.f1,
        counting.mae,
        counting.mse
    );
    let report = EvalJson {
        schema: SCHEMA,
        command: "eval",
        sigma_mode: mode_name,
        sigma,
        tau: a.tau,
        scenes,
        aggregate: Scores::from(&aggregate),
        counting: Counting {
            mae: counting.mae,
            mse: counting.mse,
        },
    };
    emit(a.report.as_deref(), &to_json(&report)?, &summary, stdout, stderr)
}
