use lsi_bench::harness::{checksum, ladder, run_workload, tune, RunConfig};
use lsi_core::workload::generate;
use lsi_core::{
    build_index, count_in_range, generate_dataset, DatasetSpec, IndexConfig, IndexKind, QueryKind,
    SearchMode, WorkloadSpec,
};

const QUICK: RunConfig = RunConfig { warmup: 0, reps: 1 };

#[test]
fn checksum_matches_brute_force_counts() {
    let data = generate_dataset(&DatasetSpec::clustered(40_000, 5)).unwrap();
    let w = generate(&data, &WorkloadSpec::new(QueryKind::Uniform, 1e-3, 100, 6)).unwrap();
    let queries = w.range_queries();
    let expected = checksum(queries.iter().map(|q| count_in_range(&data, q)));
    for kind in IndexKind::ALL {
        let index = build_index(kind, &data, 64, &IndexConfig::default()).unwrap();
        for mode in SearchMode::ALL {
            let r = run_workload(&index, &queries, mode, &QUICK).unwrap();
            assert_eq!(r.aggregate.checksum, expected, "{kind} {mode}");
            assert_eq!(r.last_rep.len(), queries.len());
            let a = &r.aggregate;
            assert!(a.index_ns + a.refine_ns + a.scan_ns <= a.mean_ns);
        }
    }
}

#[test]
fn quadtree_scan_cost_grows_with_leaf_threshold() {
    let data = generate_dataset(&DatasetSpec::clustered(100_000, 8)).unwrap();
    for (kind, sel) in [(QueryKind::Skewed, 1e-5), (QueryKind::Uniform, 1e-3)] {
        let w = generate(&data, &WorkloadSpec::new(kind, sel, 300, 9)).unwrap();
        let t = tune(
            &data,
            &w.range_queries(),
            IndexKind::Quadtree,
            SearchMode::Binary,
            &ladder(4, 4096).unwrap(),
            &QUICK,
            &IndexConfig::default(),
        )
        .unwrap();
        let scanned: Vec<f64> = t
            .candidates
            .iter()
            .map(|c| c.aggregate.scanned_mean)
            .collect();
        assert!(
            scanned.windows(2).all(|p| p[0] <= p[1]),
            "{kind}: {scanned:?}"
        );
    }
}

#[test]
fn zero_reps_rejected() {
    let data = generate_dataset(&DatasetSpec::uniform(100, 1)).unwrap();
    let index = build_index(IndexKind::Str, &data, 8, &IndexConfig::default()).unwrap();
    let r = run_workload(
        &index,
        &[],
        SearchMode::Learned,
        &RunConfig { warmup: 0, reps: 0 },
    );
    assert!(r.is_err());
}
