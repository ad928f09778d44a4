use std::io::Write;

use kmo_match::synth::ambiguity_report;
use kmo_match::{match_points, CostKind, KmoParams, KnnSource, MatchConfig};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::CliError;
use crate::format::{align, to_json, SceneDoc, SceneFile, SCHEMA};
use crate::{emit, thread_pool, usage, CostArg, KnnSourceArg, MatchArgs};

#[derive(Debug, Serialize)]
struct Ambiguity {
    l1_assignment: Vec<usize>,
    kmo_assignment: Vec<usize>,
    l1_total_cost: f64,
    kmo_total_cost: f64,
    n_differing_pairs: usize,
    l1_crossings: usize,
    kmo_crossings: usize,
}

#[derive(Debug, Serialize)]
struct SceneMatch {
    scene_id: String,
    n_gt: usize,
    n_pred: usize,
    matched_pred_of_gt: Vec<usize>,
    total_cost: f64,
    pair_costs: Vec<f64>,
    background_preds: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ambiguity: Option<Ambiguity>,
}

#[derive(Debug, Serialize)]
struct MatchReport {
    schema: &'static str,
    command: &'static str,
    cost: &'static str,
    k: usize,
    knn_source: &'static str,
    scenes: Vec<SceneMatch>,
}

fn match_scene(
    gt_scene: &SceneFile,
    pred_scene: &SceneFile,
    config: &MatchConfig,
    compare: bool,
) -> Result<SceneMatch, CliError> {
    let id = &gt_scene.scene_id;
    let frame = gt_scene.frame()?;
    let gt = gt_scene.gt_points()?;
    let pred = pred_scene.pred_points()?;
    let mut out = SceneMatch {
        scene_id: id.clone(),
        n_gt: gt.len(),
        n_pred: pred.len(),
        matched_pred_of_gt: Vec::new(),
        total_cost: 0.0,
        pair_costs: Vec::new(),
        background_preds: (0..pred.len()).collect(),
        ambiguity: None,
    };
    // A scene without ground truth leaves every prediction as background.
    if gt.is_empty() {
        if compare {
            out.ambiguity = Some(Ambiguity {
                l1_assignment: Vec::new(),
                kmo_assignment: Vec::new(),
                l1_total_cost: 0.0,
                kmo_total_cost: 0.0,
                n_differing_pairs: 0,
                l1_crossings: 0,
                kmo_crossings: 0,
            });
        }
        return Ok(out);
    }
    let result = match_points(&gt, &pred, frame, config).map_err(|e| CliError::data(id, e))?;
    out.matched_pred_of_gt = result.assignment.matched_pred_of_gt;
    out.total_cost = result.assignment.total_cost;
    out.pair_costs = result.pair_costs;
    out.background_preds = result.background_preds;
    if compare {
        let r = ambiguity_report(&gt, &pred, frame, config.kmo.k).map_err(|e| CliError::data(id, e))?;
        out.ambiguity = Some(Ambiguity {
            l1_total_cost: r.l1_assignment.total_cost,
            kmo_total_cost: r.kmo_assignment.total_cost,
            l1_assignment: r.l1_assignment.matched_pred_of_gt,
            kmo_assignment: r.kmo_assignment.matched_pred_of_gt,
            n_differing_pairs: r.n_differing_pairs,
            l1_crossings: r.l1_crossings,
            kmo_crossings: r.kmo_crossings,
        });
    }
    Ok(out)
}

pub(crate) fn run(a: &MatchArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    if a.k == 0 {
        return Err(usage("k", "must be at least 1"));
    }
    let pool = thread_pool(a.parallelism)?;
    let gt_doc = SceneDoc::load(&a.gt)?;
    let pred_doc = SceneDoc::load(&a.pred)?;
    let pairs = align(&gt_doc, &pred_doc)?;
    let config = MatchConfig {
        cost: match a.cost {
            CostArg::L1 => CostKind::L1,
            CostArg::Kmo => CostKind::Kmo,
        },
        kmo: KmoParams {
            k: a.k,
            source: match a.knn_source {
                KnnSourceArg::Computed => KnnSource::Computed,
                KnnSourceArg::Supplied => KnnSource::Supplied,
            },
            ..KmoParams::default()
        },
    };
    let scenes: Vec<SceneMatch> = pool.install(|| {
        pairs
            .par_iter()
            .map(|(g, p)| match_scene(g, p, &config, a.compare))
            .collect::<Result<_, _>>()
    })?;

    let n_gt: usize = scenes.iter().map(|s| s.n_gt).sum();
    let n_pred: usize = scenes.iter().map(|s| s.n_pred).sum();
    let total: f64 = scenes.iter().map(|s| s.total_cost).sum();
    let cost = match a.cost {
        CostArg::L1 => "l1",
        CostArg::Kmo => "kmo",
    };
    let mut summary = format!(
        "match: {} scenes, {n_gt} gt, {n_pred} predictions, cost {cost}, total cost {total:.6}",
        scenes.len()
    );
    if a.compare {
        let differing: usize = scenes
            .iter()
            .filter_map(|s| s.ambiguity.as_ref())
            .map(|x| x.n_differing_pairs)
            .sum();
        summary.push_str(&format!(", {differing} pairs differ between l1 and kmo"));
    }
    let report = MatchReport {
        schema: SCHEMA,
        command: "match",
        cost,
        k: a.k,
        knn_source: match a.knn_source {
            KnnSourceArg::Computed => "computed",
            KnnSourceArg::Supplied => "supplied",
        },
        scenes,
    };
    emit(a.report.as_deref(), &to_json(&report)?, &summary, stdout, stderr)
}
