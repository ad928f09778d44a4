#![allow(clippy::needless_range_loop)]

mod common;

use common::*;
use kmo_match::matcher::enumerate_injections;
use kmo_match::synth::{two_density_scene, SceneRng, TwoDensityParams};
use kmo_match::*;
use proptest::prelude::*;

#[test]
fn l1_cost_matches_scalar_recomputation() {
    let mut rng = SceneRng::new(3);
    let frame = Frame::new(320.0, 240.0).unwrap();
    let gt = random_gt(&mut rng, 3, 240.0);
    let pred = random_pred(&mut rng, 4, 240.0);
    let c = build_cost_l1(&gt, &pred, frame).unwrap();
    for (i, g) in gt.iter().enumerate() {
        for (j, p) in pred.iter().enumerate() {
            let want = l1(
                g.point.x / 320.0,
                g.point.y / 240.0,
                p.point.x / 320.0,
                p.point.y / 240.0,
            ) - p.confidence;
            assert!((c.get(i, j) - want).abs() < 1e-12, "({i},{j})");
        }
    }
}

#[test]
fn kmo_cost_two_density_frozen() {
    // values from an independent exhaustive computation, k = 2, 100x100 frame
    let gt: Vec<GtPoint64> = [(10.0, 10.0), (12.0, 10.0), (10.0, 12.0), (40.0, 40.0)]
        .iter()
        .map(|&(x, y)| GtPoint::new(x, y))
        .collect();
    let pred: Vec<PredPoint64> = [
        (11.0, 11.0, 0.9),
        (13.0, 11.0, 0.8),
        (11.0, 13.0, 0.7),
        (35.0, 35.0, 0.6),
        (80.0, 20.0, 0.5),
    ]
    .iter()
    .map(|&(x, y, c)| PredPoint::new(x, y, c))
    .collect();
    let frame = Frame::new(100.0, 100.0).unwrap();
    let params = KmoParams {
        k: 2,
        ..KmoParams::default()
    };
    let c = build_cost_kmo(&gt, &pred, &params, frame).unwrap();
    let want = [
        [-0.88, -0.75, -0.65, 0.34, 0.96],
        [-0.87, -0.78, -0.66, 0.31, 0.93],
        [-0.87, -0.76, -0.68, 0.31, 0.93],
        [0.24, 0.31, 0.41, -0.38, 0.20],
    ];
    for i in 0..4 {
        for j in 0..5 {
            assert!(
                (c.get(i, j) - want[i][j]).abs() < 1e-12,
                "({i},{j}) {} vs {}",
                c.get(i, j),
                want[i][j]
            );
        }
    }
    let a = solve_hungarian(&c).unwrap();
    assert_eq!(a.matched_pred_of_gt, vec![0, 1, 2, 3]);
    assert!((a.total_cost + 2.72).abs() < 1e-12);
}

#[test]
fn kmo_cost_matches_scalar_recomputation() {
    let mut rng = SceneRng::new(17);
    let frame = Frame::new(256.0, 256.0).unwrap();
    for _ in 0..20 {
        let gt = random_gt(&mut rng, 4, 256.0);
        let pred = random_pred(&mut rng, 5, 256.0);
        let params = KmoParams {
            k: 2,
            ..KmoParams::default()
        };
        let c = build_cost_kmo(&gt, &pred, &params, frame).unwrap();
        let g: Vec<(f64, f64)> = gt.iter().map(|p| (p.point.x / 256.0, p.point.y / 256.0)).collect();
        let p: Vec<(f64, f64)> = pred.iter().map(|p| (p.point.x / 256.0, p.point.y / 256.0)).collect();
        let gk = knn_oracle(&g, 2, l1);
        let pk = knn_oracle(&p, 2, l1);
        for i in 0..4 {
            for j in 0..5 {
                let want = l1(g[i].0, g[i].1, p[j].0, p[j].1) - pred[j].confidence + (gk[i] - pk[j]).abs();
                assert!((c.get(i, j) - want).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn kmo_equals_l1_when_features_coincide() {
    let mut rng = SceneRng::new(5);
    let frame = Frame::new(100.0, 100.0).unwrap();
    let gt = random_gt(&mut rng, 1, 100.0);
    let pred: Vec<_> = random_pred(&mut rng, 6, 100.0)
        .into_iter()
        .map(|p| p.with_knn(0.0))
        .collect();
    let params = KmoParams {
        source: KnnSource::Supplied,
        ..KmoParams::default()
    };
    let kmo = build_cost_kmo(&gt, &pred, &params, frame).unwrap();
    let plain = build_cost_l1(&gt, &pred, frame).unwrap();
    assert_eq!(kmo, plain);
}

#[test]
fn hungarian_agrees_with_oracle_on_random_instances() {
    let mut rng = SceneRng::new(2024);
    for _ in 0..1000 {
        let m = 1 + (rng.uniform() * 7.0) as usize;
        let n = m + (rng.uniform() * (10 - m) as f64) as usize;
        let n = n.clamp(m, 9);
        let rows: Vec<Vec<f64>> = (0..m).map(|_| (0..n).map(|_| rng.range(-1.0, 2.0)).collect()).collect();
        let c = CostMatrix::from_rows(rows).unwrap();
        let h = solve_hungarian(&c).unwrap();
        let b = brute_force_assignment(&c).unwrap();
        assert!(h.is_injective_within(n) && h.matched_pred_of_gt.len() == m);
        assert!(
            (h.total_cost - b.total_cost).abs() < 1e-9,
            "{} vs {}",
            h.total_cost,
            b.total_cost
        );
        assert!((h.total_cost - exhaustive_min(&c)).abs() < 1e-9);
        assert!((h.total_cost - c.total(&h.matched_pred_of_gt)).abs() < 1e-9);
    }
}

#[test]
fn hungarian_square_500_is_consistent() {
    let mut rng = SceneRng::new(9);
    let frame = Frame::new(256.0, 256.0).unwrap();
    let gt = random_gt(&mut rng, 250, 256.0);
    let pred = random_pred(&mut rng, 500, 256.0);
    let c = build_cost_kmo(&gt, &pred, &KmoParams::default(), frame).unwrap();
    let a = solve_hungarian(&c).unwrap();
    assert!(a.is_injective_within(500));
    assert_eq!(a.matched_pred_of_gt.len(), 250);
    // no single swap of an assigned column for a free one, or of two rows, improves the total
    let free = a.unassigned(500);
    for i in 0..250 {
        let cur = c.get(i, a.matched_pred_of_gt[i]);
        for &j in &free {
            assert!(c.get(i, j) >= cur - 1e-9);
        }
    }
    for i in 0..250 {
        for k in i + 1..250 {
            let (ji, jk) = (a.matched_pred_of_gt[i], a.matched_pred_of_gt[k]);
            assert!(c.get(i, jk) + c.get(k, ji) >= c.get(i, ji) + c.get(k, jk) - 1e-9);
        }
    }
}

#[test]
fn row_constant_keeps_optimal_set() {
    let mut rng = SceneRng::new(77);
    for _ in 0..100 {
        let (m, n) = (3, 5);
        // entries on a coarse grid so ties are common and the optimal set is non-trivial
        let rows: Vec<Vec<f64>> = (0..m)
            .map(|_| (0..n).map(|_| (rng.uniform() * 4.0).floor()).collect())
            .collect();
        let row = (rng.uniform() * m as f64) as usize;
        let shift = 3.0;
        let c = CostMatrix::from_rows(rows.clone()).unwrap();
        let mut shifted_rows = rows;
        shifted_rows[row].iter_mut().for_each(|v| *v += shift);
        let s = CostMatrix::from_rows(shifted_rows).unwrap();

        let all = enumerate_injections(m, n);
        let best = exhaustive_min(&c);
        let optimal = |cm: &CostMatrix<f64>, target: f64| -> Vec<Vec<usize>> {
            all.iter()
                .filter(|a| (cm.total(a) - target).abs() < 1e-9)
                .cloned()
                .collect()
        };
        assert_eq!(optimal(&c, best), optimal(&s, best + shift));
        let hs = solve_hungarian(&s).unwrap();
        assert!((hs.total_cost - shift - best).abs() < 1e-9);
        assert!(optimal(&c, best).contains(&hs.matched_pred_of_gt));
    }
}

#[test]
fn match_points_is_deterministic() {
    let mut rng = SceneRng::new(1);
    let frame = Frame::new(256.0, 256.0).unwrap();
    let gt = random_gt(&mut rng, 40, 256.0);
    let pred = random_pred(&mut rng, 60, 256.0);
    let cfg = MatchConfig::default();
    let a = match_points(&gt, &pred, frame, &cfg).unwrap();
    let b = match_points(&gt, &pred, frame, &cfg).unwrap();
    assert_eq!(a.assignment.matched_pred_of_gt, b.assignment.matched_pred_of_gt);
    assert_eq!(a.assignment.total_cost.to_bits(), b.assignment.total_cost.to_bits());
    assert_eq!(a.background_preds.len(), 20);
}

#[test]
fn two_background_predictions() {
    let gt = [GtPoint64::new(5.0, 5.0), GtPoint64::new(50.0, 5.0)];
    let pred = [
        PredPoint64::new(5.0, 6.0, 0.9),
        PredPoint64::new(90.0, 90.0, 0.9),
        PredPoint64::new(51.0, 5.0, 0.9),
        PredPoint64::new(30.0, 70.0, 0.9),
    ];
    let r = match_points(&gt, &pred, Frame::new(100.0, 100.0).unwrap(), &MatchConfig::default()).unwrap();
    assert_eq!(r.background_preds, vec![1, 3]);
}

#[test]
fn two_density_scene_separates_costs() {
    let params = TwoDensityParams::default();
    let scene = two_density_scene::<f64>(0, &params).unwrap();
    let l1_cfg = MatchConfig {
        cost: CostKind::L1,
        ..MatchConfig::default()
    };
    let kmo_cfg = MatchConfig::default();
    let l1 = match_points(&scene.gt, &scene.pred, scene.frame, &l1_cfg).unwrap();
    let kmo = match_points(&scene.gt, &scene.pred, scene.frame, &kmo_cfg).unwrap();
    assert!(scene.dense_pred_to_sparse_gt(&l1.assignment.matched_pred_of_gt));
    assert!(!scene.dense_pred_to_sparse_gt(&kmo.assignment.matched_pred_of_gt));
    let c1 = build_cost_l1(&scene.gt, &scene.pred, scene.frame).unwrap();
    let ck = build_cost_kmo(&scene.gt, &scene.pred, &KmoParams::default(), scene.frame).unwrap();
    assert!((brute_force_assignment(&c1).unwrap().total_cost - l1.assignment.total_cost).abs() < 1e-9);
    assert!((brute_force_assignment(&ck).unwrap().total_cost - kmo.assignment.total_cost).abs() < 1e-9);
}

#[test]
fn f32_matching_agrees_with_f64() {
    let mut rng = SceneRng::new(8);
    let gt64 = random_gt(&mut rng, 6, 100.0);
    let pred64 = random_pred(&mut rng, 8, 100.0);
    let gt32: Vec<GtPoint32> = gt64
        .iter()
        .map(|g| GtPoint::new(g.point.x as f32, g.point.y as f32))
        .collect();
    let pred32: Vec<PredPoint32> = pred64
        .iter()
        .map(|p| PredPoint::new(p.point.x as f32, p.point.y as f32, p.confidence as f32))
        .collect();
    let c64 = build_cost_kmo(&gt64, &pred64, &KmoParams::default(), Frame::new(100.0, 100.0).unwrap()).unwrap();
    let c32 = build_cost_kmo(
        &gt32,
        &pred32,
        &KmoParams::default(),
        Frame::new(100.0f32, 100.0).unwrap(),
    )
    .unwrap();
    let a64 = solve_hungarian(&c64).unwrap();
    let a32 = solve_hungarian(&c32).unwrap();
    // compare optimal values: f32 rounding may legitimately pick a different near-tie
    assert!((a64.total_cost - f64::from(a32.total_cost)).abs() < 1e-4);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn kmo_decomposes_into_l1_plus_context(
        gt in prop::collection::vec((0.0f64..512.0, 0.0f64..512.0), 1..8),
        extra in prop::collection::vec((0.0f64..512.0, 0.0f64..512.0, 0.0f64..=1.0), 0..6),
        k in 1usize..6,
    ) {
        let gt: Vec<GtPoint64> = gt.iter().map(|&(x, y)| GtPoint::new(x, y)).collect();
        let mut pred: Vec<PredPoint64> = gt.iter().map(|g| PredPoint::new(512.0 - g.point.y, g.point.x, 0.5)).collect();
        pred.extend(extra.iter().map(|&(x, y, c)| PredPoint::new(x, y, c)));
        let frame = Frame::new(512.0, 512.0).unwrap();
        let params = KmoParams { k, ..KmoParams::default() };
        let kmo = build_cost_kmo(&gt, &pred, &params, frame).unwrap();
        let plain = build_cost_l1(&gt, &pred, frame).unwrap();
        let g: Vec<(f64, f64)> = gt.iter().map(|p| (p.point.x / 512.0, p.point.y / 512.0)).collect();
        let p: Vec<(f64, f64)> = pred.iter().map(|p| (p.point.x / 512.0, p.point.y / 512.0)).collect();
        let gk = knn_oracle(&g, k, l1);
        let pk = knn_oracle(&p, k, l1);
        for i in 0..gt.len() {
            for j in 0..pred.len() {
                let ctx = (gk[i] - pk[j]).abs();
                prop_assert!(ctx >= 0.0);
                prop_assert!((kmo.get(i, j) - plain.get(i, j) - ctx).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn assignments_are_injective_and_complete(
        m in 1usize..12, extra in 0usize..6, seed in any::<u64>(),
    ) {
        let mut rng = SceneRng::new(seed);
        let n = m + extra;
        let rows: Vec<Vec<f64>> = (0..m).map(|_| (0..n).map(|_| rng.range(-5.0, 5.0)).collect()).collect();
        let c = CostMatrix::from_rows(rows).unwrap();
        let a = solve_hungarian(&c).unwrap();
        prop_assert_eq!(a.matched_pred_of_gt.len(), m);
        prop_assert!(a.is_injective_within(n));
        prop_assert_eq!(a.unassigned(n).len(), n - m);
    }
}
