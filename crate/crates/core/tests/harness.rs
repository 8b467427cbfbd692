use std::collections::BTreeMap;

use dvop_core::graph::fixtures::{six_vertex, witness_example};
use dvop_core::harness::{perf_profile, rows_from_csv, rows_to_csv, HarnessError};
use dvop_core::*;

fn inputs(list: Vec<Instance>) -> Vec<BenchInput> {
    list.into_iter().map(BenchInput::from_instance).collect()
}

#[test]
fn worked_examples_all_methods() {
    let report = run_bench(
        &inputs(vec![six_vertex(2), witness_example(2)]),
        &Method::ALL,
        Objective::MinDouble,
        &MethodOptions::default(),
        3,
    )
    .unwrap();
    assert_eq!(report.rows.len(), 8);
    assert!(report.errors.is_empty() && report.disagreements.is_empty());
    let mut values: BTreeMap<&str, Vec<u128>> = BTreeMap::new();
    for r in &report.rows {
        assert_eq!(r.status, Status::Optimal, "{r:?}");
        values
            .entry(&r.instance)
            .or_default()
            .push(r.objective.unwrap());
    }
    assert_eq!(values["six_vertex"], [2; 4]);
    // The two-double order shown for this graph is not optimal: (0,1,2,4,5,3)
    // has a single double.
    assert_eq!(values["witness_example"], [1; 4]);
    let methods: Vec<&str> = report.rows.iter().map(|r| r.method.as_str()).collect();
    assert_eq!(
        methods,
        ["oracle", "dfs", "naive", "witness", "oracle", "dfs", "naive", "witness"]
    );
}

#[test]
fn infeasible_rows_and_errors() {
    let report = run_bench(
        &inputs(vec![six_vertex(3)]),
        &Method::ALL,
        Objective::MinDouble,
        &MethodOptions::default(),
        2,
    )
    .unwrap();
    assert!(report
        .rows
        .iter()
        .all(|r| r.status == Status::Infeasible && r.objective.is_none()));

    let nodes = run_bench(
        &inputs(vec![six_vertex(2)]),
        &Method::ALL,
        Objective::MinNodes,
        &MethodOptions::default(),
        2,
    )
    .unwrap();
    let status: Vec<Status> = nodes.rows.iter().map(|r| r.status).collect();
    assert_eq!(
        status,
        [
            Status::Optimal,
            Status::Optimal,
            Status::Error,
            Status::Error
        ]
    );
    assert_eq!(nodes.rows[0].objective, Some(12));
    assert_eq!(nodes.errors.len(), 2);
    assert!(nodes.disagreements.is_empty());

    assert!(matches!(
        run_bench(
            &inputs(vec![six_vertex(2)]),
            &[],
            Objective::MinDouble,
            &MethodOptions::default(),
            1
        ),
        Err(HarnessError::NoMethods)
    ));
    assert!(matches!(
        run_bench(
            &[],
            &Method::ALL,
            Objective::MinDouble,
            &MethodOptions::default(),
            1
        ),
        Err(HarnessError::NoInstances)
    ));
}

#[test]
fn batch_is_reproducible_and_profiles_are_monotone() {
    let list: Vec<Instance> = (0..12)
        .map(|i| gen_random(9, 0.6, 2, 400 + i).unwrap())
        .collect();
    let run = |workers| {
        run_bench(
            &inputs(list.clone()),
            &Method::ALL,
            Objective::MinDouble,
            &MethodOptions::default(),
            workers,
        )
        .unwrap()
    };
    let (a, b) = (run(1), run(4));
    assert!(a.disagreements.is_empty());
    let strip = |rows: &[BenchRow]| -> Vec<(String, String, Status, Option<u128>)> {
        rows.iter()
            .map(|r| (r.instance.clone(), r.method.clone(), r.status, r.objective))
            .collect()
    };
    assert_eq!(strip(&a.rows), strip(&b.rows));
    assert_eq!(rows_from_csv(&rows_to_csv(&a.rows)).unwrap(), a.rows);

    let profile = perf_profile(&a.rows);
    for m in Method::ALL {
        let curve: Vec<_> = profile.iter().filter(|p| p.method == m.name()).collect();
        assert!(!curve.is_empty());
        assert!(curve
            .windows(2)
            .all(|w| w[0].tau < w[1].tau && w[0].fraction <= w[1].fraction));
        assert_eq!(curve.last().unwrap().fraction, 1.0);
    }
}
