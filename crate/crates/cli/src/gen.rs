use std::io::Write;

use kmo_match::synth::{
    gen_scene, perturb, two_density_scene, ConfModel, Pattern, PerturbSpec, SceneSpec, TwoDensityParams,
};
use kmo_match::{Frame, GtPoint64, PredPoint64};

use crate::error::CliError;
use crate::format::{to_json, GtRecord, PredRecord, SceneDoc, SceneFile};
use crate::{emit, usage, ConfArg, GenArgs, PatternArg};

/// Predictions of scene `s` are drawn from this seed offset so they never
/// share a stream with the ground truth.
const PERTURB_SEED_OFFSET: u64 = 1 << 63;

fn parse_centers(s: &str) -> Result<Vec<(f64, f64)>, CliError> {
    s.split(';')
        .filter(|c| !c.trim().is_empty())
        .map(|c| crate::parse_pair(c).map_err(|e| usage("centers", &e)))
        .collect()
}

fn check(a: &GenArgs) -> Result<(), CliError> {
    let positive = |v: f64| v > 0.0 && v.is_finite();
    if a.n == 0 {
        return Err(usage("n", "must be at least 1"));
    }
    if a.scenes == 0 {
        return Err(usage("scenes", "must be at least 1"));
    }
    if !positive(a.width) {
        return Err(usage("width", "must be positive"));
    }
    if !positive(a.height) {
        return Err(usage("height", "must be positive"));
    }
    if !positive(a.spacing) {
        return Err(usage("spacing", "must be positive"));
    }
    if !(a.spread >= 0.0 && a.spread.is_finite()) {
        return Err(usage("spread", "must be non-negative"));
    }
    if !(a.jitter >= 0.0 && a.jitter.is_finite()) {
        return Err(usage("jitter", "must be non-negative"));
    }
    if !(0.0..=1.0).contains(&a.drop_rate) {
        return Err(usage("drop-rate", "must lie in [0, 1]"));
    }
    if !(a.spurious_rate >= 0.0 && a.spurious_rate.is_finite()) {
        return Err(usage("spurious-rate", "must be non-negative"));
    }
    if !(0.0..=1.0).contains(&a.conf_value) {
        return Err(usage("conf-value", "must lie in [0, 1]"));
    }
    if !(0.0..=1.0).contains(&a.conf_mean) {
        return Err(usage("conf-mean", "must lie in [0, 1]"));
    }
    if !(a.conf_sd >= 0.0 && a.conf_sd.is_finite()) {
        return Err(usage("conf-sd", "must be non-negative"));
    }
    if let Some(b) = &a.head_box {
        if !b.iter().all(|&v| positive(v)) {
            return Err(usage("box", "extents must be positive"));
        }
    }
    Ok(())
}

fn scene_id(i: usize) -> String {
    format!("scene-{i:04}")
}

fn build_scene(a: &GenArgs, i: usize, pattern: &Pattern) -> Result<SceneFile, CliError> {
    let seed = a.seed.wrapping_add(i as u64);
    let to_usage = |e: kmo_match::Error| CliError::Usage(e.to_string());
    let (gt, pred): (Vec<GtPoint64>, Vec<PredPoint64>) = if a.pattern == PatternArg::TwoDensity {
        let params = TwoDensityParams {
            frame: (a.width, a.height),
            ..TwoDensityParams::default()
        };
        let scene = two_density_scene(seed, &params).map_err(to_usage)?;
        (scene.gt, scene.pred)
    } else {
        let spec = SceneSpec {
            pattern: pattern.clone(),
            n_points: a.n,
            frame: (a.width, a.height),
            head_box: a.head_box.as_ref().map(|b| (b[0], b[1])),
            seed,
        };
        let gt = gen_scene(&spec).map_err(to_usage)?;
        let perturb_spec = PerturbSpec {
            jitter_sigma: a.jitter,
            drop_rate: a.drop_rate,
            spurious_rate: a.spurious_rate,
            translate: (a.dx, a.dy),
            conf_model: match a.conf {
                ConfArg::Const => ConfModel::Constant(a.conf_value),
                ConfArg::Noisy => ConfModel::Noisy {
                    mean: a.conf_mean,
                    sd: a.conf_sd,
                },
            },
            seed: seed.wrapping_add(PERTURB_SEED_OFFSET),
        };
        let frame = Frame::new(a.width, a.height).map_err(to_usage)?;
        let pred = perturb(&gt, frame, &perturb_spec).map_err(to_usage)?;
        (gt, pred)
    };
    Ok(SceneFile {
        scene_id: scene_id(i),
        width: a.width,
        height: a.height,
        gt: gt.iter().map(GtRecord::from).collect(),
        pred: (!a.no_pred).then(|| pred.iter().map(PredRecord::from).collect()),
    })
}

pub(crate) fn run(a: &GenArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    check(a)?;
    let pattern = match a.pattern {
        PatternArg::Grid => Pattern::Grid {
            spacing: a.spacing,
            origin: a.origin,
        },
        PatternArg::Clusters => Pattern::Clusters {
            centers: match &a.centers {
                Some(s) => parse_centers(s)?,
                None => vec![(a.width / 2.0, a.height / 2.0)],
            },
            spread: a.spread,
        },
        PatternArg::Uniform | PatternArg::TwoDensity => Pattern::Uniform,
    };
    if let Pattern::Clusters { centers, .. } = &pattern {
        if centers.is_empty() {
            return Err(usage("centers", "needs at least one x,y pair"));
        }
    }
    let scenes = (0..a.scenes)
        .map(|i| build_scene(a, i, &pattern))
        .collect::<Result<Vec<_>, _>>()?;
    let n_gt: usize = scenes.iter().map(|s| s.gt.len()).sum();
    let n_pred: usize = scenes.iter().filter_map(|s| s.pred.as_ref()).map(Vec::len).sum();
    let summary = format!(
        "gen: {} scenes, {n_gt} gt points, {n_pred} predictions, seed {}",
        scenes.len(),
        a.seed
    );
    let json = to_json(&SceneDoc::new(scenes))?;
    emit(a.out.as_deref(), &json, &summary, stdout, stderr)
}
