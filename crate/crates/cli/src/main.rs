use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use dvop_core::harness::{perf_profile_csv, rows_to_csv};
use dvop_core::*;

#[derive(Parser)]
#[command(
    name = "dvop",
    version,
    about = "Exact solvers for minimum-double vertex orders"
)]
struct Cli {
    /// Wall-clock limit per solver run, in seconds.
    #[arg(long, global = true, value_name = "SECONDS")]
    time_limit: Option<f64>,
    /// Seed for the instance generators.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Worker threads for `bench` (default: available cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Write the main output here instead of stdout.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance and print the solution and a stats row.
    Solve {
        instance: PathBuf,
        #[arg(long, default_value = "dfs")]
        method: Method,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Print the objective image and Pareto frontier of a small instance.
    Pareto { instance: PathBuf },
    /// Print the variable fixings and cover inequalities.
    Presolve { instance: PathBuf },
    /// Generate an instance.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Write an LP model and print its size summary.
    Export {
        instance: PathBuf,
        #[arg(long)]
        model: ModelKind,
        /// One rank labeling per clique instead of every ordering.
        #[arg(long)]
        unordered_cliques: bool,
    },
    /// Run several methods over several instances and write result rows.
    Bench {
        #[arg(required = true)]
        instances: Vec<PathBuf>,
        /// Comma-separated methods.
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "oracle,dfs,naive,witness"
        )]
        methods: Vec<Method>,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Turn bench rows into performance-profile points.
    Profile { bench: PathBuf },
}

#[derive(Subcommand)]
enum GenCommand {
    /// Independent edges with a fixed probability.
    Random {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        density: f64,
        #[arg(long)]
        k: usize,
    },
    /// Planted order with a known number of doubles.
    Synthetic {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        doubles: usize,
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        #[arg(long)]
        n: usize,
    },
}

#[derive(Args)]
struct SolverArgs {
    #[arg(long, value_enum, default_value_t = ObjectiveArg::Double)]
    objective: ObjectiveArg,
    #[arg(long)]
    no_presolve: bool,
    /// Naive decomposition: plain no-good cuts instead of IIS cuts.
    #[arg(long)]
    nogood: bool,
    /// Witness decomposition: cycle cuts added before the search.
    #[arg(long, value_enum, default_value_t = PreBreakArg::None)]
    pre_break: PreBreakArg,
    /// Witness decomposition: find cycles only at leaves of the search.
    #[arg(long)]
    no_node_bound: bool,
    /// Largest instance the oracle accepts.
    #[arg(long, default_value_t = dvop_core::oracle::DEFAULT_CAP)]
    oracle_cap: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum ObjectiveArg {
    Double,
    Nodes,
}

#[derive(Clone, Copy, ValueEnum)]
enum PreBreakArg {
    None,
    #[value(name = "2")]
    Two,
    #[value(name = "23")]
    TwoThree,
}

impl SolverArgs {
    fn objective(&self) -> Objective {
        match self.objective {
            ObjectiveArg::Double => Objective::MinDouble,
            ObjectiveArg::Nodes => Objective::MinNodes,
        }
    }

    fn options(&self, time_limit: Option<Duration>) -> MethodOptions {
        MethodOptions {
            time_limit,
            use_presolve: !self.no_presolve,
            nogood: self.nogood,
            pre_break: match self.pre_break {
                PreBreakArg::None => PreBreak::None,
                PreBreakArg::Two => PreBreak::TwoCycles,
                PreBreakArg::TwoThree => PreBreak::TwoAndThreeCycles,
            },
            node_bound: !self.no_node_bound,
            oracle_cap: self.oracle_cap,
        }
    }
}

fn read_instance(path: &Path) -> Result<Instance> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut inst = parse_instance(&text).with_context(|| format!("parsing {}", path.display()))?;
    if inst.name.is_empty() {
        inst.name = path
            .file_stem()
            .unwrap_or_default()
            .to_string_lossy()
            .into_owned();
    }
    Ok(inst)
}

fn emit(output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn time_limit(seconds: Option<f64>) -> Result<Option<Duration>> {
    seconds
        .map(|s| Duration::try_from_secs_f64(s).with_context(|| format!("bad time limit {s}")))
        .transpose()
}

fn run(cli: Cli) -> Result<ExitCode> {
    let limit = time_limit(cli.time_limit)?;
    let out = cli.output.as_deref();
    match cli.command {
        Command::Solve {
            instance,
            method,
            solver,
        } => {
            let inst = read_instance(&instance)?;
            let sol = run_method(&inst, method, solver.objective(), &solver.options(limit))
                .map_err(anyhow::Error::msg)?;
            let text = format!("{}{}", sol.to_text(), StatsRow::new(method, &sol).to_csv());
            emit(out, &text)?;
        }
        Command::Pareto { instance } => {
            let inst = read_instance(&instance)?;
            let (image, front) = Oracle::default().objective_image_and_pareto(&inst)?;
            let mut text = String::from("nodes,doubles,dominated\n");
            for p in &image {
                text.push_str(&format!(
                    "{},{},{}\n",
                    p.nodes_obj,
                    p.doubles_obj,
                    !front.contains(p)
                ));
            }
            emit(out, &text)?;
        }
        Command::Presolve { instance } => {
            let inst = read_instance(&instance)?;
            emit(out, &presolve(&inst, &PresolveOptions::default()).to_text())?;
        }
        Command::Gen(GenCommand::Random { n, density, k }) => {
            emit(out, &gen_random(n, density, k, cli.seed)?.render())?;
        }
        Command::Gen(GenCommand::Synthetic {
            k,
            doubles,
            noise,
            n,
        }) => {
            emit(
                out,
                &gen_synthetic(k, doubles, noise, n, cli.seed)?
                    .instance
                    .render(),
            )?;
        }
        Command::Export {
            instance,
            model,
            unordered_cliques,
        } => {
            let inst = read_instance(&instance)?;
            let opts = ExportOptions { unordered_cliques };
            let (lp, summary) = export(&inst, model, &opts);
            if let Some(w) = &summary.warning {
                eprintln!("warning: {w}");
            }
            match out {
                Some(p) => {
                    emit(Some(p), &lp)?;
                    print!("{}", summary.to_csv());
                }
                None => {
                    print!("{lp}");
                    eprint!("{}", summary.to_csv());
                }
            }
        }
        Command::Bench {
            instances,
            methods,
            solver,
        } => {
            let inputs: Vec<BenchInput> =
                instances.iter().map(|p| BenchInput::from_path(p)).collect();
            let workers = cli
                .workers
                .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
            let report = run_bench(
                &inputs,
                &methods,
                solver.objective(),
                &solver.options(limit),
                workers,
            )?;
            emit(out, &rows_to_csv(&report.rows))?;
            for (instance, method, message) in &report.errors {
                eprintln!("error: {instance} {method}: {message}");
            }
            if !report.disagreements.is_empty() {
                for d in &report.disagreements {
                    eprintln!("disagreement on {}: {:?}", d.instance, d.results);
                }
                return Ok(ExitCode::from(2));
            }
        }
        Command::Profile { bench } => {
            let text = fs::read_to_string(&bench)
                .with_context(|| format!("reading {}", bench.display()))?;
            emit(out, &perf_profile_csv(&text)?)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn pre_break_names() {
        let cli = Cli::try_parse_from([
            "dvop",
            "solve",
            "x",
            "--method",
            "witness",
            "--pre-break",
            "23",
        ])
        .unwrap();
        let Command::Solve { solver, .. } = cli.command else {
            panic!()
        };
        assert_eq!(solver.options(None).pre_break, PreBreak::TwoAndThreeCycles);
        assert!(Cli::try_parse_from(["dvop", "solve", "x", "--pre-break", "4"]).is_err());
    }
}
