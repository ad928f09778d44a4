use std::io::Write;
use std::time::Instant;

use kmo_match::synth::SceneRng;
use kmo_match::{build_cost_kmo, build_cost_l1, solve_hungarian, Frame, GtPoint64, KmoParams, PredPoint64};
use serde::Serialize;

use crate::error::CliError;
use crate::format::{to_json, SCHEMA};
use crate::{emit, usage, BenchArgs, CostArg};

#[derive(Debug, Serialize)]
struct Trial {
    trial: usize,
    millis: f64,
    total_cost: f64,
}

#[derive(Debug, Serialize)]
struct BenchReport {
    schema: &'static str,
    command: &'static str,
    cost: &'static str,
    n: usize,
    m: usize,
    seed: u64,
    median_ms: f64,
    p95_ms: f64,
    trials: Vec<Trial>,
}

fn instance(seed: u64, m: usize, n: usize) -> (Vec<GtPoint64>, Vec<PredPoint64>) {
    let mut rng = SceneRng::new(seed);
    let gt = (0..m)
        .map(|_| {
            let x = rng.uniform();
            GtPoint64::new(x, rng.uniform())
        })
        .collect();
    let pred = (0..n)
        .map(|_| {
            let x = rng.uniform();
            let y = rng.uniform();
            PredPoint64::new(x, y, rng.uniform())
        })
        .collect();
    (gt, pred)
}

fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    }
}

/// Nearest-rank percentile.
fn percentile(sorted: &[f64], p: f64) -> f64 {
    let rank = ((p / 100.0) * sorted.len() as f64).ceil() as usize;
    sorted[rank.clamp(1, sorted.len()) - 1]
}

pub(crate) fn run(a: &BenchArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    if a.n == 0 {
        return Err(usage("n", "must be at least 1"));
    }
    if a.trials == 0 {
        return Err(usage("trials", "must be at least 1"));
    }
    let m = (a.n / 2).max(1);
    let frame = Frame::unit();
    let params = KmoParams::default();
    let mut trials = Vec::with_capacity(a.trials);
    for t in 0..a.trials {
        let (gt, pred) = instance(a.seed.wrapping_add(t as u64), m, a.n);
        let start = Instant::now();
        let cost = match a.cost {
            CostArg::Kmo => build_cost_kmo(&gt, &pred, &params, frame),
            CostArg::L1 => build_cost_l1(&gt, &pred, frame),
        }
        .and_then(|c| solve_hungarian(&c))
        .map_err(|e| CliError::Internal(e.to_string()))?;
        let millis = start.elapsed().as_secs_f64() * 1e3;
        trials.push(Trial {
            trial: t,
            millis,
            total_cost: cost.total_cost,
        });
    }
    let mut sorted: Vec<f64> = trials.iter().map(|t| t.millis).collect();
    sorted.sort_by(f64::total_cmp);
    let report = BenchReport {
        schema: SCHEMA,
        command: "bench",
        cost: match a.cost {
            CostArg::Kmo => "kmo",
            CostArg::L1 => "l1",
        },
        n: a.n,
        m,
        seed: a.seed,
        median_ms: median(&sorted),
        p95_ms: percentile(&sorted, 95.0),
        trials,
    };
    let summary = format!(
        "bench: n {} m {m} cost {} trials {}, median {:.3} ms, p95 {:.3} ms",
        a.n, report.cost, a.trials, report.median_ms, report.p95_ms
    );
    emit(a.report.as_deref(), &to_json(&report)?, &summary, stdout, stderr)
}
