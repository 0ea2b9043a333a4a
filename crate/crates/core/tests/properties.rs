use std::sync::Arc;

use landscape_core::aas::{compute_ert, gap_closure, ErtTable, InstanceKey, PerformanceRecord};
use landscape_core::ela::nbc::nearest_better;
use landscape_core::ela::{compute_all, ElaConfig, FeatureVector};
use landscape_core::fitmap::{multichannel, rasterize_2d, reduce_mean, MapStack};
use landscape_core::preprocess::{normalize_objective, preprocess_pipeline, Encoding, ProcessedDesign};
use landscape_core::sampling::{create_initial_design, evaluate_design, Design, SamplingStrategy};
use landscape_core::space::{
    apply_transform, builtin_problem, BuiltinFunction, Cell, ObjectiveTransform, SearchSpace, VariableSpec,
};
use proptest::prelude::*;

fn evaluated(fi: usize, iid: u64, dim: usize, seed: u64) -> Design {
    let f = BuiltinFunction::ALL[fi % BuiltinFunction::ALL.len()];
    let p = builtin_problem(f, iid, dim).unwrap();
    let d = create_initial_design(p.space.clone(), 50 * dim, SamplingStrategy::LatinHypercube, seed).unwrap();
    evaluate_design(&p, &d).unwrap()
}

fn features(d: &Design) -> FeatureVector {
    let pd = preprocess_pipeline(d, Encoding::None, 0.0).unwrap();
    compute_all(&pd, &ElaConfig::default(), 11).unwrap()
}

fn max_abs_dev(a: &FeatureVector, b: &FeatureVector) -> f64 {
    assert!(a.names().eq(b.names()));
    a.iter()
        .zip(b.iter())
        .map(|((_, x), (_, y))| match (x.value(), y.value()) {
            (Some(x), Some(y)) => (x - y).abs(),
            (None, None) => 0.0,
            _ => f64::INFINITY,
        })
        .fold(0.0, f64::max)
}

/// Largest deviation measured relative to `max(1, |value|)`.
fn max_rel_dev(a: &FeatureVector, b: &FeatureVector) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|((_, x), (_, y))| match (x.value(), y.value()) {
            (Some(x), Some(y)) => (x - y).abs() / x.abs().max(1.0),
            (None, None) => 0.0,
            _ => f64::INFINITY,
        })
        .fold(0.0, f64::max)
}

fn mixed_space() -> Arc<SearchSpace> {
    Arc::new(
        SearchSpace::new(vec![
            VariableSpec::continuous("lr", 1e-4, 1.0),
            VariableSpec::integer("depth", 1, 12),
            VariableSpec::categorical("kernel", ["rbf", "linear", "poly"]),
            VariableSpec::categorical("booster", ["gbtree", "dart"]),
        ])
        .unwrap(),
    )
}

fn mixed_design(seed: u64, n: usize) -> Design {
    let d = create_initial_design(mixed_space(), n, SamplingStrategy::LatinHypercube, seed).unwrap();
    let y = d
        .rows()
        .iter()
        .map(|r| {
            let lr = r[0].as_f64().unwrap();
            let depth = r[1].as_f64().unwrap();
            let k = match r[2] {
                Cell::Cat(c) => c as f64,
                _ => 0.0,
            };
            (lr - 0.3).powi(2) + 0.1 * depth + k
        })
        .collect();
    d.with_objective(y).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn power_of_two_scaling_is_bit_exact(fi in 0usize..5, iid in 0u64..20, seed in 0u64..1000, k in -20i32..20) {
        let d = evaluated(fi, iid, 2, seed);
        let t = ObjectiveTransform::new(2f64.powi(k), 0.0).unwrap();
        let scaled = d.with_objective(apply_transform(&t, d.y().unwrap())).unwrap();
        let a = preprocess_pipeline(&d, Encoding::None, 0.0).unwrap();
        let b = preprocess_pipeline(&scaled, Encoding::None, 0.0).unwrap();
        prop_assert_eq!(a.yn(), b.yn());
        prop_assert_eq!(max_abs_dev(&features(&d), &features(&scaled)), 0.0);
    }

    #[test]
    fn shift_scale_invariance_within_rounding(
        fi in 0usize..5, iid in 0u64..20, seed in 0u64..1000,
        log_a in -3.0f64..3.0, b in -1e6f64..1e6,
    ) {
        let d = evaluated(fi, iid, 2, seed);
        let t = ObjectiveTransform::new(10f64.powf(log_a), b).unwrap();
        let moved = d.with_objective(apply_transform(&t, d.y().unwrap())).unwrap();
        let a = preprocess_pipeline(&d, Encoding::None, 0.0).unwrap();
        let m = preprocess_pipeline(&moved, Encoding::None, 0.0).unwrap();
        let dev = a.yn().iter().zip(m.yn()).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
        prop_assert!(dev < 1e-6, "normalized objective moved by {dev}");
    }

    #[test]
    fn identical_normalized_input_gives_identical_features(fi in 0usize..5, iid in 0u64..20, seed in 0u64..1000) {
        let d = evaluated(fi, iid, 3, seed);
        prop_assert_eq!(max_abs_dev(&features(&d), &features(&d.clone())), 0.0);
    }

    #[test]
    fn row_permutation_invariance(fi in 0usize..5, seed in 0u64..1000, rot in 1usize..149) {
        let d = evaluated(fi, 1, 3, seed);
        let pd = preprocess_pipeline(&d, Encoding::None, 0.0).unwrap();
        let n = pd.n();
        let perm: Vec<usize> = (0..n).map(|i| (i * 7 + rot) % n).collect();
        let mut sorted = perm.clone();
        sorted.sort_unstable();
        prop_assume!(sorted.iter().enumerate().all(|(i, &p)| i == p));
        let xs: Vec<Vec<f64>> = perm.iter().map(|&i| pd.xn()[i].clone()).collect();
        let ys: Vec<f64> = perm.iter().map(|&i| pd.yn()[i]).collect();
        let shuffled = ProcessedDesign::from_unit(xs, ys).unwrap();
        let base = ProcessedDesign::from_unit(pd.xn().to_vec(), pd.yn().to_vec()).unwrap();
        let cfg = ElaConfig::default();
        let dev = max_rel_dev(&compute_all(&base, &cfg, 5).unwrap(), &compute_all(&shuffled, &cfg, 5).unwrap());
        prop_assert!(dev <= 1e-9, "deviation {dev}");
    }

    #[test]
    fn one_hot_rows_sum_to_one(seed in 0u64..10_000, n in 10usize..80) {
        let pd = preprocess_pipeline(&mixed_design(seed, n), Encoding::OneHot, 0.0).unwrap();
        for group in pd.column_map().iter().skip(2) {
            for row in pd.xn() {
                let s: f64 = group.iter().map(|&c| row[c]).sum();
                prop_assert_eq!(s, 1.0);
            }
        }
        prop_assert!(pd.xn().iter().flatten().chain(pd.yn()).all(|v| (0.0..=1.0).contains(v)));
    }

    #[test]
    fn target_encoding_keeps_width_and_range(seed in 0u64..10_000, m in 0.0f64..50.0) {
        let pd = preprocess_pipeline(&mixed_design(seed, 40), Encoding::Target, m).unwrap();
        prop_assert_eq!(pd.dim(), 4);
        prop_assert!(pd.xn().iter().flatten().all(|v| (0.0..=1.0).contains(v)));
    }

    #[test]
    fn normalization_preserves_order(y in prop::collection::vec(-1e6f64..1e6, 2..60)) {
        prop_assume!(y.iter().any(|&v| v != y[0]));
        let yn = normalize_objective(&y).unwrap();
        for i in 0..y.len() {
            for j in 0..y.len() {
                if y[i] < y[j] {
                    prop_assert!(yn[i] <= yn[j]);
                }
            }
        }
        let argmin = |v: &[f64]| (0..v.len()).min_by(|&a, &b| v[a].total_cmp(&v[b])).unwrap();
        prop_assert_eq!(yn[argmin(&y)], 0.0);
        prop_assert!(yn.iter().all(|v| (0.0..=1.0).contains(v)));
    }

    #[test]
    fn nearest_better_never_closer_than_nearest(seed in 0u64..10_000, dim in 1usize..5) {
        let d = evaluated((seed % 5) as usize, seed % 7, dim, seed);
        let pd = preprocess_pipeline(&d, Encoding::None, 0.0).unwrap();
        let nb = nearest_better(pd.xn(), pd.yn());
        for (i, e) in nb.nearest_better.iter().enumerate() {
            match e {
                Some((_, dist)) => prop_assert!(*dist >= nb.nn_dist[i]),
                None => prop_assert_eq!(i, nb.best),
            }
        }
    }

    #[test]
    fn raster_occupancy_bounded_by_sample(seed in 0u64..10_000, dim in 2usize..5, r in 2usize..64) {
        let d = evaluated((seed % 5) as usize, 2, dim, seed);
        let pd = preprocess_pipeline(&d, Encoding::None, 0.0).unwrap();
        let m = rasterize_2d(&pd, (0, 1), r).unwrap();
        prop_assert!(m.occupied() <= pd.n());
        let stack = multichannel(&pd, r).unwrap();
        prop_assert_eq!(stack.channels.len(), dim * (dim - 1) / 2);
        let reduced = reduce_mean(&stack).unwrap();
        prop_assert!(reduced.pixels().iter().flatten().all(|v| (0.0..=1.0).contains(v)));
        let copies = MapStack { channels: vec![m.clone(); 3], pairs: vec![(0, 1); 3] };
        let mean = reduce_mean(&copies).unwrap();
        prop_assert_eq!(mean.pixels(), m.pixels());
    }

    #[test]
    fn ert_is_run_order_invariant(
        runs in prop::collection::vec((1u64..500, any::<bool>()), 1..20),
        rot in 0usize..20,
    ) {
        let recs: Vec<PerformanceRecord> = runs
            .iter()
            .enumerate()
            .map(|(i, &(e, s))| PerformanceRecord {
                fid: "f".into(), iid: "1".into(), algorithm: "a".into(),
                run: i as u64, evaluations: e, success: s, budget: 500,
            })
            .collect();
        let mut rotated = recs.clone();
        rotated.rotate_left(rot % recs.len());
        rotated.reverse();
        prop_assert_eq!(compute_ert(&recs), compute_ert(&rotated));
    }

    #[test]
    fn gap_closure_is_scale_invariant(
        vbs in 1.0f64..1e4, gap in 1.0f64..1e4, model in 0.0f64..2e4, c in 1e-3f64..1e3,
    ) {
        let sbs = vbs + gap;
        let g = gap_closure(sbs, vbs, model).unwrap();
        let gs = gap_closure(c * sbs, c * vbs, c * model).unwrap();
        prop_assert!((g - gs).abs() <= 1e-9 * (1.0 + g.abs()));
        prop_assert!(g <= 1.0 + 1e-12 || model < vbs);
    }

    #[test]
    fn labels_survive_monotone_rescaling(
        erts in prop::collection::vec(prop::collection::vec(1.0f64..1e5, 3), 2..12),
        pow in 0.2f64..3.0, mul in 1e-2f64..1e2,
    ) {
        let keys: Vec<InstanceKey> = (0..erts.len()).map(|i| InstanceKey::new("f", i.to_string())).collect();
        let algs: Vec<String> = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
        let base = ErtTable::from_erts(keys.clone(), algs.clone(), &erts).unwrap();
        let warped: Vec<Vec<f64>> = erts.iter().map(|r| r.iter().map(|e| mul * e.powf(pow)).collect()).collect();
        let other = ErtTable::from_erts(keys, algs, &warped).unwrap();
        prop_assert_eq!(base.best_algorithms(), other.best_algorithms());
    }
}

#[test]
fn vbs_bounds_every_selection() {
    use landscape_core::aas::{sbs, vbs_performance};
    let keys: Vec<InstanceKey> = (0..4).map(|i| InstanceKey::new("f", i.to_string())).collect();
    let algs: Vec<String> = ["a", "b"].iter().map(|s| s.to_string()).collect();
    let erts = vec![vec![5.0, 3.0], vec![1.0, 9.0], vec![4.0, 4.0], vec![7.0, 2.0]];
    let t = ErtTable::from_erts(keys, algs, &erts).unwrap();
    let v = vbs_performance(&t).unwrap();
    let s = t.algorithm_index(&sbs(&t).unwrap()).unwrap();
    for (i, row) in erts.iter().enumerate() {
        assert!(row.iter().all(|&e| v[i] <= e));
        assert!(v[i] <= row[s]);
    }
}


