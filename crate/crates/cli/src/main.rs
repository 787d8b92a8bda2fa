//! `gtx`: command-line front end for the gt-exchange library.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use gt_exchange::analysis::{pmnk_exact, pmnk_montecarlo, randomized_lower_bound};
use gt_exchange::harness::{
    compare_table, gen_instance, randomized_bound_configs, run_batch, write_outputs, BatchConfig,
    OracleMode,
};
use gt_exchange::io::{instance_to_json, parse_schedule, read_instance, RunReport, ScheduleFile};
use gt_exchange::oracle::{optimal_alpha, SearchLimits};
use gt_exchange::{apply_schedule, upper_bound, Algorithm, TieRule, Validation};

/// Environment variable consulted for the seed when no `--seed` flag is given.
const SEED_ENV: &str = "GTX_SEED";

#[derive(Parser)]
#[command(
    name = "gtx",
    version,
    about = "Give-and-take segment exchange: schedules, optima and coverage"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random instance of uniform k-subsets.
    Gen {
        #[arg(short)]
        m: usize,
        #[arg(short)]
        n: usize,
        #[arg(short)]
        k: usize,
        #[arg(long, env = SEED_ENV, default_value_t = 0)]
        seed: u64,
        /// Allow a node to start with the whole universe.
        #[arg(long)]
        relax: bool,
        /// Write here instead of stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run one algorithm on an instance, or replay a schedule file.
    Run {
        instance: PathBuf,
        #[arg(long, value_parser = parse_algorithm, conflicts_with = "schedule", required_unless_present = "schedule")]
        algo: Option<Algorithm>,
        /// Replay this schedule instead of running an algorithm.
        #[arg(long)]
        schedule: Option<PathBuf>,
        #[command(flatten)]
        tie: TieArgs,
        /// Seed for the randomized algorithm.
        #[arg(long, env = SEED_ENV, default_value_t = 0)]
        seed: u64,
        /// Also write the bare schedule file here.
        #[arg(long)]
        emit_schedule: Option<PathBuf>,
        #[arg(long)]
        relax: bool,
    },
    /// Exact optimum by exhaustive search.
    Optimal {
        instance: PathBuf,
        #[command(flatten)]
        limits: LimitArgs,
        #[arg(long)]
        relax: bool,
    },
    /// Batch of random instances through the selected algorithms.
    Batch(BatchArgs),
    /// Probability that m uniform k-subsets cover all n segments.
    Pmnk {
        #[arg(short)]
        m: usize,
        #[arg(short)]
        n: usize,
        #[arg(short)]
        k: usize,
        /// Estimate by sampling instead of computing the exact fraction.
        #[arg(long)]
        monte_carlo: bool,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, env = SEED_ENV, default_value_t = 0)]
        seed: u64,
    },
    /// Lower bound on the randomized algorithm's expected aggregate cardinality.
    Bound {
        #[arg(short)]
        m: usize,
        #[arg(short)]
        n: usize,
        #[arg(short)]
        k: usize,
        /// Print the per-phase trace as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Side-by-side summary of several batches. Defaults to the five
    /// randomized-algorithm bound settings.
    Table {
        /// Batch config files (JSON); each becomes one block.
        configs: Vec<PathBuf>,
        #[arg(long, env = SEED_ENV, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
struct TieArgs {
    /// Break ties uniformly at random from this seed instead of by lowest pair.
    #[arg(long)]
    tie_seed: Option<u64>,
}

impl TieArgs {
    fn rule(&self) -> TieRule {
        self.tie_seed
            .map_or(TieRule::LowestPair, |seed| TieRule::SeededRandom { seed })
    }
}

#[derive(Args)]
struct LimitArgs {
    #[arg(long, default_value_t = SearchLimits::default().max_states)]
    max_states: u64,
    #[arg(long, default_value_t = SearchLimits::default().max_seconds)]
    max_seconds: f64,
}

impl LimitArgs {
    fn limits(&self) -> Result<SearchLimits> {
        Ok(SearchLimits::new(self.max_states, self.max_seconds)?)
    }
}

#[derive(Args)]
struct BatchArgs {
    /// JSON config; explicit flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(short)]
    m: Option<usize>,
    #[arg(short)]
    n: Option<usize>,
    #[arg(short)]
    k: Option<usize>,
    #[arg(long)]
    runs: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated ids: rand, glink, poly, ginc, rare.
    #[arg(long, value_delimiter = ',', value_parser = parse_algorithm)]
    algos: Option<Vec<Algorithm>>,
    /// Compute certified optima and success rates.
    #[arg(long)]
    exact: bool,
    #[arg(long)]
    max_states: Option<u64>,
    #[arg(long)]
    max_seconds: Option<f64>,
    #[command(flatten)]
    tie: TieArgs,
    #[arg(long)]
    relax: bool,
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    summary: Option<PathBuf>,
}

impl BatchArgs {
    fn config(&self) -> Result<BatchConfig> {
        let mut config = match &self.config {
            Some(path) => serde_json::from_str::<BatchConfig>(&read(path)?)
                .with_context(|| format!("parsing batch config {}", path.display()))?,
            None => match (self.m, self.n, self.k) {
                (Some(m), Some(n), Some(k)) => {
                    let mut c = BatchConfig::new(m, n, k);
                    c.seed = env_seed()?.unwrap_or(0);
                    c
                }
                _ => bail!("give -m, -n and -k, or --config"),
            },
        };
        if let Some(m) = self.m {
            config.m = m;
        }
        if let Some(n) = self.n {
            config.n = n;
        }
        if let Some(k) = self.k {
            config.k = k;
        }
        if let Some(runs) = self.runs {
            config.runs = runs;
        }
        if let Some(seed) = self.seed {
            config.seed = seed;
        }
        if let Some(algos) = &self.algos {
            config.algorithms = algos.clone();
        }
        if self.exact {
            config.oracle = OracleMode::Exact;
        }
        if let Some(s) = self.max_states {
            config.limits.max_states = s;
        }
        if let Some(s) = self.max_seconds {
            config.limits.max_seconds = s;
        }
        if self.tie.tie_seed.is_some() {
            config.tie = self.tie.rule();
        }
        if self.relax {
            config.validation = Validation::Relaxed;
        }
        if self.csv.is_some() {
            config.csv_out = self.csv.clone();
        }
        if self.summary.is_some() {
            config.summary_out = self.summary.clone();
        }
        Ok(config)
    }
}

fn parse_algorithm(s: &str) -> Result<Algorithm, String> {
    s.parse().map_err(|e: gt_exchange::Error| e.to_string())
}

fn env_seed() -> Result<Option<u64>> {
    match std::env::var(SEED_ENV) {
        Ok(v) => Ok(Some(
            v.trim()
                .parse()
                .with_context(|| format!("{SEED_ENV}={v} is not a u64"))?,
        )),
        Err(_) => Ok(None),
    }
}

fn validation(relax: bool) -> Validation {
    if relax {
        Validation::Relaxed
    } else {
        Validation::Strict
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn emit(text: &str, output: Option<&Path>) -> Result<()> {
    match output {
        Some(path) => fs::write(path, format!("{text}\n"))
            .with_context(|| format!("writing {}", path.display())),
        None => say(text),
    }
}

/// Writes a line to stdout; a closed pipe (`gtx ... | head`) is not an error.
fn say(text: &str) -> Result<()> {
    match writeln!(io::stdout().lock(), "{text}") {
        Err(e) if e.kind() == io::ErrorKind::BrokenPipe => Ok(()),
        other => Ok(other?),
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Gen {
            m,
            n,
            k,
            seed,
            relax,
            output,
        } => {
            let inst = gen_instance(m, n, k, seed, validation(relax))?;
            emit(&instance_to_json(&inst), output.as_deref())
        }
        Command::Run {
            instance,
            algo,
            schedule,
            tie,
            seed,
            emit_schedule,
            relax,
        } => {
            let inst = read_instance(&instance, validation(relax))
                .with_context(|| format!("loading {}", instance.display()))?;
            let report = match (algo, schedule) {
                (Some(algo), _) => RunReport::from_run(&inst, &algo.run(&inst, seed, tie.rule())),
                (None, Some(path)) => {
                    let links = parse_schedule(&read(&path)?, inst.m())?;
                    let (state, sched) = apply_schedule(&inst, &links)?;
                    RunReport::new(&inst, &sched, &state)
                }
                (None, None) => unreachable!("clap requires one of --algo and --schedule"),
            };
            if let Some(path) = emit_schedule {
                let file = ScheduleFile {
                    steps: report.steps.clone(),
                };
                emit(&serde_json::to_string(&file)?, Some(&path))?;
            }
            emit(&serde_json::to_string_pretty(&report)?, None)
        }
        Command::Optimal {
            instance,
            limits,
            relax,
        } => {
            let inst = read_instance(&instance, validation(relax))
                .with_context(|| format!("loading {}", instance.display()))?;
            let opt = optimal_alpha(&inst, limits.limits()?);
            let out = serde_json::json!({
                "alpha": opt.alpha,
                "exact": opt.exact,
                "upper_bound": upper_bound(&inst),
                "states_visited": opt.states_visited,
                "witness": ScheduleFile::from_links(&opt.witness.links()).steps,
                "final_sets": opt.final_state.sets().iter().map(|s| s.to_one_based()).collect::<Vec<_>>(),
            });
            emit(&serde_json::to_string_pretty(&out)?, None)?;
            if !opt.exact {
                eprintln!(
                    "search limit reached: alpha {} is a lower bound, not a certified optimum",
                    opt.alpha
                );
            }
            Ok(())
        }
        Command::Batch(args) => {
            let config = args.config()?;
            let report = run_batch(&config)?;
            write_outputs(&config, &report)?;
            emit(&serde_json::to_string_pretty(&report)?, None)
        }
        Command::Pmnk {
            m,
            n,
            k,
            monte_carlo,
            trials,
            seed,
        } => {
            if monte_carlo {
                let est = pmnk_montecarlo(m, n, k, trials, seed)?;
                say(&format!(
                    "p({m},{n},{k}) ~ {:.6} +/- {:.6} (monte carlo, {} trials, seed {})",
                    est.estimate, est.stderr, est.trials, est.seed
                ))?;
            } else {
                let p = pmnk_exact(m, n, k)?;
                say(&format!("p({m},{n},{k}) = {p} = {:.9e} (exact)", p.value()))?;
            }
            Ok(())
        }
        Command::Bound { m, n, k, json } => {
            let (bound, trace) = randomized_lower_bound(m, n, k)?;
            if json {
                emit(&serde_json::to_string_pretty(&trace)?, None)
            } else {
                for (p, s) in trace.cardinalities.iter().enumerate() {
                    match trace.factors.get(p) {
                        Some(f) => {
                            say(&format!("phase {:>2}: s = {s:.4}  factor = {f:.4}", p + 1))?
                        }
                        None => say(&format!("phase {:>2}: s = {s:.4}", p + 1))?,
                    }
                }
                say(&format!(
                    "bound({m},{n},{k}) = {bound:.3}  ({:.4} of m*n)",
                    bound / (m * n) as f64
                ))
            }
        }
        Command::Table { configs, seed } => {
            let configs = if configs.is_empty() {
                randomized_bound_configs(seed)
            } else {
                configs
                    .iter()
                    .map(|p| {
                        serde_json::from_str::<BatchConfig>(&read(p)?)
                            .with_context(|| format!("parsing {}", p.display()))
                    })
                    .collect::<Result<_>>()?
            };
            say(compare_table(&configs)?.to_string().trim_end())
        }
    }
}

fn main() -> std::process::ExitCode {
    match run(Cli::parse()) {
        Ok(()) => std::process::ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::ExitCode::FAILURE
        }
    }
}
