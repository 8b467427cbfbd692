//! Exact solvers for minimising double vertices and branch-and-prune tree
//! size over discretization vertex orders.
//!
//! A discretization order places `K+1` pairwise adjacent vertices first and
//! then every further vertex after at least `K` of its neighbours. A vertex
//! at rank `K` or later with exactly `K` adjacent predecessors is *double*.

pub mod dfs;
pub mod graph;
pub mod harness;
pub mod instgen;
pub mod modelgen;
pub mod naive;
pub mod oracle;
pub mod order;
pub mod presolve;
pub mod solution;
pub mod witness;

pub use dfs::{solve, validate_formulation, DfsOptions, Formulation};
pub use graph::{enumerate_cliques, min_degree, parse_instance, Clique, Instance, ParseError};
pub use harness::{
    run_bench, run_method, BenchInput, BenchReport, BenchRow, Method, MethodOptions, StatsRow,
};
pub use instgen::{gen_random, gen_synthetic, GenError, Rng, Synthetic};
pub use modelgen::{export, verify_counts, ExportOptions, ModelKind, ModelSummary};
pub use naive::{solve_naive, BendersCut, NaiveOptions, NaiveRun};
pub use oracle::{Oracle, OracleError, ParetoPoint};
pub use order::{check_order, greedy_dvop, DoublePattern, OrderError, OrderReport, VertexOrder};
pub use presolve::{presolve, PresolveOptions, PresolveResult};
pub use solution::{Deadline, Objective, Solution, Stats, Status};
pub use witness::{solve_witness, CycleCut, PreBreak, WitnessOptions, WitnessRun, WitnessState};
