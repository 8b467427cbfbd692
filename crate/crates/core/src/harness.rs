//! Batch runs of several methods over several instances, CSV result rows,
//! and performance-profile data.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dfs::{solution_from_order, solve, DfsOptions};
use crate::graph::{parse_instance, Instance};
use crate::naive::{solve_naive, NaiveOptions};
use crate::oracle::Oracle;
use crate::solution::{Objective, Solution, Stats, Status};
use crate::witness::{solve_witness, PreBreak, WitnessOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Oracle,
    Dfs,
    Naive,
    Witness,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Oracle, Method::Dfs, Method::Naive, Method::Witness];

    pub fn name(self) -> &'static str {
        match self {
            Method::Oracle => "oracle",
            Method::Dfs => "dfs",
            Method::Naive => "naive",
            Method::Witness => "witness",
        }
    }

    /// Whether the method handles `objective`.
    pub fn supports(self, objective: Objective) -> bool {
        objective == Objective::MinDouble || matches!(self, Method::Oracle | Method::Dfs)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown method `{0}`")]
pub struct UnknownMethod(pub String);

impl FromStr for Method {
    type Err = UnknownMethod;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| UnknownMethod(s.into()))
    }
}

/// Settings shared by all methods of a run.
#[derive(Debug, Clone, Copy)]
pub struct MethodOptions {
    pub time_limit: Option<Duration>,
    pub use_presolve: bool,
    pub nogood: bool,
    pub pre_break: PreBreak,
    /// Witness decomposition: prune nodes with the completion bound.
    pub node_bound: bool,
    pub oracle_cap: usize,
}

impl Default for MethodOptions {
    fn default() -> Self {
        Self {
            time_limit: None,
            use_presolve: true,
            nogood: false,
            pre_break: PreBreak::None,
            node_bound: true,
            oracle_cap: crate::oracle::DEFAULT_CAP,
        }
    }
}

/// Runs one method; `Err` carries a message for an ERROR row.
pub fn run_method(
    inst: &Instance,
    method: Method,
    objective: Objective,
    opts: &MethodOptions,
) -> Result<Solution, String> {
    if !method.supports(objective) {
        return Err(format!(
            "{method} does not solve MIN {}",
            objective.to_string().to_uppercase()
        ));
    }
    Ok(match method {
        Method::Oracle => {
            let start = Instant::now();
            let best = Oracle::new(opts.oracle_cap)
                .brute_optimum(inst, objective)
                .map_err(|e| e.to_string())?;
            let stats = Stats {
                time_ms: start.elapsed().as_secs_f64() * 1e3,
                ..Stats::default()
            };
            match best {
                Some((value, ord)) => {
                    solution_from_order(inst, Status::Optimal, value, ord.perm().to_vec(), stats)
                }
                None => Solution::infeasible(stats),
            }
        }
        Method::Dfs => solve(
            inst,
            objective,
            &DfsOptions {
                time_limit: opts.time_limit,
                use_presolve: opts.use_presolve,
                ..DfsOptions::default()
            },
        ),
        Method::Naive => {
            solve_naive(
                inst,
                &NaiveOptions {
                    time_limit: opts.time_limit,
                    use_presolve: opts.use_presolve,
                    nogood: opts.nogood,
                    ..NaiveOptions::default()
                },
            )
            .solution
        }
        Method::Witness => {
            solve_witness(
                inst,
                &WitnessOptions {
                    time_limit: opts.time_limit,
                    pre_break: opts.pre_break,
                    use_presolve: opts.use_presolve,
                    node_bound: opts.node_bound,
                    ..WitnessOptions::default()
                },
            )
            .solution
        }
    })
}

/// One result line. Field names are the CSV header.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub instance: String,
    pub n: usize,
    pub density: f64,
    #[serde(rename = "K")]
    pub k: usize,
    pub method: String,
    pub status: Status,
    pub objective: Option<u128>,
    pub time_ms: f64,
    pub choice_points_or_bb_nodes: u64,
    pub cuts: usize,
    pub cliques_considered: usize,
}

/// An instance to benchmark, or why it could not be read.
#[derive(Debug, Clone)]
pub struct BenchInput {
    pub name: String,
    pub instance: Result<Instance, String>,
}

impl BenchInput {
    pub fn from_instance(inst: Instance) -> Self {
        Self {
            name: inst.name.clone(),
            instance: Ok(inst),
        }
    }

    /// Reads a file; failures become ERROR rows later.
    pub fn from_path(path: &Path) -> Self {
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        let instance = std::fs::read_to_string(path)
            .map_err(|e| format!("{}: {e}", path.display()))
            .and_then(|text| parse_instance(&text).map_err(|e| format!("{}: {e}", path.display())))
            .map(|mut inst| {
                if inst.name.is_empty() {
                    inst.name = name.clone();
                }
                inst
            });
        Self { name, instance }
    }
}

/// Methods that disagree on one instance.
#[derive(Debug, Clone, PartialEq)]
pub struct Disagreement {
    pub instance: String,
    /// `(method, status, objective)` of every finished row.
    pub results: Vec<(String, Status, Option<u128>)>,
}

#[derive(Debug, Clone)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    pub disagreements: Vec<Disagreement>,
    /// `(instance, method, message)` of every ERROR row.
    pub errors: Vec<(String, String, String)>,
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("no methods given")]
    NoMethods,
    #[error("no instances given")]
    NoInstances,
    #[error("malformed bench CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("bench CSV lacks column {0:?}")]
    MissingColumn(&'static str),
}

/// Header of the bench CSV, in column order.
pub const BENCH_COLUMNS: [&str; 11] = [
    "instance",
    "n",
    "density",
    "K",
    "method",
    "status",
    "objective",
    "time_ms",
    "choice_points_or_bb_nodes",
    "cuts",
    "cliques_considered",
];

/// Runs every `(instance, method)` pair on `workers` threads. Rows come
/// back instance by instance in the given method order.
pub fn run_bench(
    inputs: &[BenchInput],
    methods: &[Method],
    objective: Objective,
    opts: &MethodOptions,
    workers: usize,
) -> Result<BenchReport, HarnessError> {
    if methods.is_empty() {
        return Err(HarnessError::NoMethods);
    }
    if inputs.is_empty() {
        return Err(HarnessError::NoInstances);
    }
    let tasks: Vec<(usize, Method)> = (0..inputs.len())
        .flat_map(|i| methods.iter().map(move |&m| (i, m)))
        .collect();
    let next = AtomicUsize::new(0);
    // One slot per task: the row and an error message if the run failed.
    type Slot = Option<(BenchRow, Option<String>)>;
    let results: Mutex<Vec<Slot>> = Mutex::new(vec![None; tasks.len()]);
    std::thread::scope(|scope| {
        for _ in 0..workers.clamp(1, tasks.len()) {
            scope.spawn(|| loop {
                let t = next.fetch_add(1, Ordering::Relaxed);
                let Some(&(i, method)) = tasks.get(t) else {
                    break;
                };
                let out = run_task(&inputs[i], method, objective, opts);
                results
                    .lock()
                    .expect("no worker panics while holding the lock")[t] = Some(out);
            });
        }
    });
    let mut rows = Vec::with_capacity(tasks.len());
    let mut errors = Vec::new();
    for r in results.into_inner().expect("workers joined") {
        let (row, err) = r.expect("every task ran");
        if let Some(e) = err {
            errors.push((row.instance.clone(), row.method.clone(), e));
        }
        rows.push(row);
    }
    let disagreements = find_disagreements(&rows);
    Ok(BenchReport {
        rows,
        disagreements,
        errors,
    })
}

fn run_task(
    input: &BenchInput,
    method: Method,
    objective: Objective,
    opts: &MethodOptions,
) -> (BenchRow, Option<String>) {
    let mut row = BenchRow {
        instance: input.name.clone(),
        n: 0,
        density: 0.0,
        k: 0,
        method: method.name().into(),
        status: Status::Error,
        objective: None,
        time_ms: 0.0,
        choice_points_or_bb_nodes: 0,
        cuts: 0,
        cliques_considered: 0,
    };
    let inst = match &input.instance {
        Ok(inst) => inst,
        Err(e) => return (row, Some(e.clone())),
    };
    row.n = inst.n();
    row.density = inst.density();
    row.k = inst.k();
    // A panicking solver becomes an ERROR row rather than ending the batch.
    let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| {
        run_method(inst, method, objective, opts)
    }))
    .unwrap_or_else(|_| Err("solver panicked".into()));
    match outcome {
        Ok(sol) => {
            row.status = sol.status;
            row.objective = sol.objective;
            row.time_ms = sol.stats.time_ms;
            row.choice_points_or_bb_nodes = sol.stats.choice_points;
            row.cuts = sol.stats.cuts;
            row.cliques_considered = sol.stats.cliques_considered;
            (row, None)
        }
        Err(e) => (row, Some(e)),
    }
}

/// Instances where finished rows (OPTIMAL or INFEASIBLE) disagree.
pub fn find_disagreements(rows: &[BenchRow]) -> Vec<Disagreement> {
    let mut by_instance: BTreeMap<&str, Vec<&BenchRow>> = BTreeMap::new();
    for r in rows {
        if matches!(r.status, Status::Optimal | Status::Infeasible) {
            by_instance.entry(&r.instance).or_default().push(r);
        }
    }
    by_instance
        .into_iter()
        .filter(|(_, rs)| {
            let outcomes: BTreeSet<Option<u128>> = rs.iter().map(|r| r.objective).collect();
            outcomes.len() > 1
        })
        .map(|(name, rs)| Disagreement {
            instance: name.into(),
            results: rs
                .iter()
                .map(|r| (r.method.clone(), r.status, r.objective))
                .collect(),
        })
        .collect()
}

/// Always starts with the header, even without rows.
pub fn rows_to_csv(rows: &[BenchRow]) -> String {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(Vec::new());
    w.write_record(BENCH_COLUMNS).expect("in-memory write");
    for r in rows {
        w.serialize(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
}

pub fn rows_from_csv(text: &str) -> Result<Vec<BenchRow>, HarnessError> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let headers = r.headers()?.clone();
    if let Some(missing) = BENCH_COLUMNS
        .iter()
        .find(|c| !headers.iter().any(|h| h == **c))
    {
        return Err(HarnessError::MissingColumn(missing));
    }
    Ok(r.deserialize().collect::<Result<Vec<BenchRow>, _>>()?)
}

/// Per-run statistics of one `solve` call.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsRow {
    pub method: String,
    pub status: Status,
    pub objective: Option<u128>,
    pub time_ms: f64,
    pub choice_points_or_bb_nodes: u64,
    pub cuts: usize,
    pub iterations: usize,
    pub cliques_considered: usize,
    pub iis_time_ms: f64,
}

impl StatsRow {
    pub fn new(method: Method, sol: &Solution) -> Self {
        Self {
            method: method.name().into(),
            status: sol.status,
            objective: sol.objective,
            time_ms: sol.stats.time_ms,
            choice_points_or_bb_nodes: sol.stats.choice_points,
            cuts: sol.stats.cuts,
            iterations: sol.stats.iterations,
            cliques_considered: sol.stats.cliques_considered,
            iis_time_ms: sol.stats.iis_time_ms,
        }
    }

    /// Header line plus this row.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.serialize(self).expect("in-memory write");
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfilePoint {
    pub method: String,
    pub tau: f64,
    pub fraction: f64,
}

/// Times below this (ms) count as equal when forming ratios.
const TIME_FLOOR_MS: f64 = 1e-3;

/// For each method and each ratio `tau` that occurs (plus 1), the fraction
/// of instances the method solved within `tau` times the fastest solve.
pub fn perf_profile(rows: &[BenchRow]) -> Vec<ProfilePoint> {
    let solved = |r: &BenchRow| matches!(r.status, Status::Optimal | Status::Infeasible);
    let instances: BTreeSet<&str> = rows.iter().map(|r| r.instance.as_str()).collect();
    let mut methods: Vec<&str> = Vec::new();
    for r in rows {
        if !methods.contains(&r.method.as_str()) {
            methods.push(&r.method);
        }
    }
    let mut best: BTreeMap<&str, f64> = BTreeMap::new();
    for r in rows.iter().filter(|r| solved(r)) {
        let t = r.time_ms.max(TIME_FLOOR_MS);
        best.entry(&r.instance)
            .and_modify(|b| *b = b.min(t))
            .or_insert(t);
    }
    let mut ratios: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
    for r in rows.iter().filter(|r| solved(r)) {
        ratios
            .entry(&r.method)
            .or_default()
            .push(r.time_ms.max(TIME_FLOOR_MS) / best[r.instance.as_str()]);
    }
    let mut taus: Vec<f64> = ratios.values().flatten().copied().collect();
    taus.push(1.0);
    taus.sort_by(f64::total_cmp);
    taus.dedup();
    let total = instances.len().max(1) as f64;
    let mut out = Vec::new();
    for m in methods {
        let mine = ratios.get(m).map(Vec::as_slice).unwrap_or(&[]);
        for &tau in &taus {
            out.push(ProfilePoint {
                method: m.into(),
                tau,
                fraction: mine.iter().filter(|&&r| r <= tau).count() as f64 / total,
            });
        }
    }
    out
}

/// Bench CSV in, `method,tau,fraction` CSV out.
pub fn perf_profile_csv(bench_csv: &str) -> Result<String, HarnessError> {
    let rows = rows_from_csv(bench_csv)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    for p in perf_profile(&rows) {
        w.serialize(p).expect("in-memory write");
    }
    Ok(String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8"))
}
