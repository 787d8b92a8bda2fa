//! Seeded benchmarking of the heuristics against the exact optimum.
//!
//! A batch draws `runs` random instances (each node an independent uniform
//! `k`-subset), runs every configured algorithm on each and, when asked,
//! the exact search. Per-run rows go to CSV; the summary reports mean
//! aggregate cardinality with a normal-approximation 95% interval, and,
//! over runs whose optimum is certified exact, the success rate and the
//! mean shortfall in percent of the optimum.

use std::fmt::{self, Write as _};
use std::path::PathBuf;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algorithms::{Algorithm, TieRule};
use crate::analysis::{pmnk_exact, randomized_lower_bound};
use crate::error::{Error, Result};
use crate::model::{upper_bound, Instance, Validation};
use crate::oracle::{optimal_alpha, SearchLimits};
use crate::segset::SegmentSet;

/// Instance whose nodes each hold an independent uniform `k`-subset.
pub fn gen_instance(
    m: usize,
    n: usize,
    k: usize,
    seed: u64,
    validation: Validation,
) -> Result<Instance> {
    if k > n {
        return Err(Error::InvalidArgument(format!("k = {k} exceeds n = {n}")));
    }
    if n > crate::segset::MAX_SEGMENTS {
        return Err(Error::UniverseTooLarge { n });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sets = (0..m)
        .map(|_| SegmentSet::from_indices(n, sample(&mut rng, n, k)))
        .collect::<Result<Vec<_>>>()?;
    Instance::new(n, sets, validation)
}

fn splitmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

/// Seed of run `run` in a batch. The map `run ↦ seed` is injective for a
/// fixed master seed: an odd-stride walk followed by a bijective mixer.
pub fn run_seed(master: u64, run: u64) -> u64 {
    splitmix64(master.wrapping_add(run.wrapping_add(1).wrapping_mul(GOLDEN)))
}

/// Seed handed to `algorithm` within a run, so the instance stream and the
/// algorithm streams never share state.
fn algorithm_seed(run_seed: u64, algorithm: Algorithm) -> u64 {
    splitmix64(run_seed ^ (algorithm as u64 + 1).wrapping_mul(0xd1b5_4a32_d192_ed03))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OracleMode {
    Exact,
    #[default]
    Skip,
}

fn default_runs() -> usize {
    100
}

fn default_algorithms() -> Vec<Algorithm> {
    Algorithm::ALL.to_vec()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BatchConfig {
    pub m: usize,
    pub n: usize,
    pub k: usize,
    #[serde(default = "default_runs")]
    pub runs: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_algorithms")]
    pub algorithms: Vec<Algorithm>,
    #[serde(default)]
    pub oracle: OracleMode,
    #[serde(default)]
    pub limits: SearchLimits,
    #[serde(default)]
    pub tie: TieRule,
    #[serde(default)]
    pub validation: Validation,
    #[serde(default)]
    pub csv_out: Option<PathBuf>,
    #[serde(default)]
    pub summary_out: Option<PathBuf>,
}

impl BatchConfig {
    pub fn new(m: usize, n: usize, k: usize) -> Self {
        BatchConfig {
            m,
            n,
            k,
            runs: default_runs(),
            seed: 0,
            algorithms: default_algorithms(),
            oracle: OracleMode::Skip,
            limits: SearchLimits::default(),
            tie: TieRule::LowestPair,
            validation: Validation::Strict,
            csv_out: None,
            summary_out: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.runs == 0 {
            return Err(Error::InvalidArgument("runs must be at least 1".into()));
        }
        if self.m < 2 {
            return Err(Error::TooFewNodes { m: self.m });
        }
        if self.k == 0 || self.k > self.n {
            return Err(Error::InvalidArgument(format!(
                "need 1 <= k <= n, got k = {}, n = {}",
                self.k, self.n
            )));
        }
        if self.algorithms.is_empty() {
            return Err(Error::InvalidArgument("no algorithms selected".into()));
        }
        SearchLimits::new(self.limits.max_states, self.limits.max_seconds)?;
        Ok(())
    }
}

/// One CSV row: one algorithm on one run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunRecord {
    pub run: usize,
    pub seed: u64,
    pub algorithm: Algorithm,
    pub alpha: usize,
    pub optimal: Option<usize>,
    pub exact_flag: bool,
    pub steps: usize,
    pub post_sweep_steps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlgorithmSummary {
    pub algorithm: Algorithm,
    pub runs: usize,
    pub mean_alpha: f64,
    pub std_alpha: f64,
    pub ci95_half_width: f64,
    /// Runs with a certified-exact optimum; success and shortfall use only these.
    pub exact_runs: usize,
    pub success_rate: Option<f64>,
    pub mean_shortfall_pct: Option<f64>,
}

/// Summary statistics from per-run rows, grouped by algorithm in order of
/// first appearance.
pub fn summarize(records: &[RunRecord]) -> Vec<AlgorithmSummary> {
    let mut order: Vec<Algorithm> = Vec::new();
    for r in records {
        if !order.contains(&r.algorithm) {
            order.push(r.algorithm);
        }
    }
    order
        .into_iter()
        .map(|algorithm| {
            let rows: Vec<&RunRecord> = records
                .iter()
                .filter(|r| r.algorithm == algorithm)
                .collect();
            let count = rows.len();
            let mean = rows.iter().map(|r| r.alpha as f64).sum::<f64>() / count as f64;
            let var = if count > 1 {
                rows.iter()
                    .map(|r| (r.alpha as f64 - mean).powi(2))
                    .sum::<f64>()
                    / (count - 1) as f64
            } else {
                0.0
            };
            let std = var.sqrt();

            let exact: Vec<(usize, usize)> = rows
                .iter()
                .filter(|r| r.exact_flag)
                .filter_map(|r| r.optimal.map(|opt| (r.alpha, opt)))
                .collect();
            let (success_rate, mean_shortfall_pct) = if exact.is_empty() {
                (None, None)
            } else {
                let hits = exact.iter().filter(|(a, o)| a == o).count();
                let shortfall = exact
                    .iter()
                    .map(|&(a, o)| {
                        if o == 0 {
                            0.0
                        } else {
                            100.0 * o.saturating_sub(a) as f64 / o as f64
                        }
                    })
                    .sum::<f64>()
                    / exact.len() as f64;
                (Some(hits as f64 / exact.len() as f64), Some(shortfall))
            };

            AlgorithmSummary {
                algorithm,
                runs: count,
                mean_alpha: mean,
                std_alpha: std,
                ci95_half_width: 1.96 * std / (count as f64).sqrt(),
                exact_runs: exact.len(),
                success_rate,
                mean_shortfall_pct,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Coverage {
    /// Reduced fraction, e.g. `"1/2"`.
    pub exact: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BatchReport {
    pub m: usize,
    pub n: usize,
    pub k: usize,
    pub runs: usize,
    pub seed: u64,
    pub coverage: Coverage,
    /// Fraction of generated instances whose initial union is the universe.
    pub observed_coverage: f64,
    pub mean_upper_bound: f64,
    pub oracle: OracleMode,
    pub exact_oracle_runs: usize,
    pub inexact_oracle_runs: usize,
    pub algorithms: Vec<AlgorithmSummary>,
    #[serde(skip)]
    pub records: Vec<RunRecord>,
}

struct RunOutcome {
    records: Vec<RunRecord>,
    upper_bound: usize,
    covered: bool,
    oracle_exact: Option<bool>,
}

fn execute_run(config: &BatchConfig, run: usize) -> Result<RunOutcome> {
    let seed = run_seed(config.seed, run as u64);
    let instance = gen_instance(config.m, config.n, config.k, seed, config.validation)?;
    let (optimal, exact) = match config.oracle {
        OracleMode::Exact => {
            let opt = optimal_alpha(&instance, config.limits);
            (Some(opt.alpha), opt.exact)
        }
        OracleMode::Skip => (None, false),
    };
    let records = config
        .algorithms
        .iter()
        .map(|&algorithm| {
            let alg_seed = algorithm_seed(seed, algorithm);
            let tie = match config.tie {
                TieRule::LowestPair => TieRule::LowestPair,
                TieRule::SeededRandom { .. } => TieRule::SeededRandom { seed: alg_seed },
            };
            let result = algorithm.run(&instance, alg_seed, tie);
            RunRecord {
                run,
                seed,
                algorithm,
                alpha: result.alpha,
                optimal,
                exact_flag: exact,
                steps: result.schedule.len(),
                post_sweep_steps: result.post_sweep_steps,
            }
        })
        .collect();
    Ok(RunOutcome {
        records,
        upper_bound: upper_bound(&instance),
        covered: instance.realized_universe().is_full(),
        oracle_exact: optimal.map(|_| exact),
    })
}

/// Runs a batch. Runs execute in parallel; results are assembled in run
/// order, so the report depends only on the configuration.
pub fn run_batch(config: &BatchConfig) -> Result<BatchReport> {
    config.validate()?;
    let outcomes = (0..config.runs)
        .into_par_iter()
        .map(|run| execute_run(config, run))
        .collect::<Result<Vec<_>>>()?;

    let p = pmnk_exact(config.m, config.n, config.k)?;
    let records: Vec<RunRecord> = outcomes
        .iter()
        .flat_map(|o| o.records.iter().cloned())
        .collect();
    let runs = config.runs as f64;
    Ok(BatchReport {
        m: config.m,
        n: config.n,
        k: config.k,
        runs: config.runs,
        seed: config.seed,
        coverage: Coverage {
            exact: p.to_string(),
            value: p.value(),
        },
        observed_coverage: outcomes.iter().filter(|o| o.covered).count() as f64 / runs,
        mean_upper_bound: outcomes.iter().map(|o| o.upper_bound as f64).sum::<f64>() / runs,
        oracle: config.oracle,
        exact_oracle_runs: outcomes
            .iter()
            .filter(|o| o.oracle_exact == Some(true))
            .count(),
        inexact_oracle_runs: outcomes
            .iter()
            .filter(|o| o.oracle_exact == Some(false))
            .count(),
        algorithms: summarize(&records),
        records,
    })
}

pub fn records_to_csv(records: &[RunRecord]) -> Result<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for r in records {
        writer.serialize(r)?;
    }
    let bytes = writer.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn records_from_csv(text: &str) -> Result<Vec<RunRecord>> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    reader
        .deserialize()
        .map(|r| r.map_err(Error::from))
        .collect()
}

/// Writes the CSV and JSON summary to the paths named in `config`, if any.
pub fn write_outputs(config: &BatchConfig, report: &BatchReport) -> Result<()> {
    if let Some(path) = &config.csv_out {
        std::fs::write(path, records_to_csv(&report.records)?)?;
    }
    if let Some(path) = &config.summary_out {
        std::fs::write(path, serde_json::to_string_pretty(report)? + "\n")?;
    }
    Ok(())
}

/// Batch reports laid out side by side; `Display` renders the text table.
#[derive(Debug, Clone, Default)]
pub struct ComparisonTable {
    pub reports: Vec<BatchReport>,
}

pub fn compare_table(configs: &[BatchConfig]) -> Result<ComparisonTable> {
    Ok(ComparisonTable {
        reports: configs.iter().map(run_batch).collect::<Result<_>>()?,
    })
}

/// Five reference settings for the randomized algorithm and its bound.
pub fn randomized_bound_configs(seed: u64) -> Vec<BatchConfig> {
    [
        (60, 100, 3),
        (60, 100, 5),
        (60, 100, 7),
        (80, 200, 15),
        (100, 300, 15),
    ]
    .into_iter()
    .map(|(m, n, k)| BatchConfig {
        seed,
        algorithms: vec![Algorithm::Randomized],
        ..BatchConfig::new(m, n, k)
    })
    .collect()
}

fn fmt_opt(v: Option<f64>, scale: f64, suffix: &str) -> String {
    v.map_or_else(|| "-".to_string(), |x| format!("{:.1}{suffix}", x * scale))
}

impl fmt::Display for ComparisonTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (idx, r) in self.reports.iter().enumerate() {
            if idx > 0 {
                writeln!(f)?;
            }
            writeln!(
                f,
                "(m,n,k) = ({},{},{})  runs = {}  seed = {}",
                r.m, r.n, r.k, r.runs, r.seed
            )?;
            let p = r.coverage.value;
            let p = if p != 0.0 && p < 1e-4 {
                format!("{p:.4e}")
            } else {
                format!("{p:.6}")
            };
            writeln!(
                f,
                "p(m,n,k) = {p} (exact), observed coverage {:.2}",
                r.observed_coverage
            )?;
            let mut oracle = format!("parity upper bound (mean) = {:.1}", r.mean_upper_bound);
            if r.oracle == OracleMode::Exact {
                let _ = write!(
                    oracle,
                    "  oracle exact on {}/{} runs",
                    r.exact_oracle_runs, r.runs
                );
            }
            writeln!(f, "{oracle}")?;
            let bound = randomized_lower_bound(r.m, r.n, r.k).ok().map(|(b, _)| b);
            writeln!(
                f,
                "{:<20}{:>12}{:>10}{:>10}{:>10}{:>12}{:>13}",
                "algorithm", "mean alpha", "std", "95% CI", "success", "shortfall", "lower bound"
            )?;
            for s in &r.algorithms {
                let lb = match (s.algorithm, bound) {
                    (Algorithm::Randomized, Some(b)) => format!("{b:.1}"),
                    _ => "-".to_string(),
                };
                writeln!(
                    f,
                    "{:<20}{:>12.1}{:>10.1}{:>10}{:>10}{:>12}{:>13}",
                    s.algorithm.name(),
                    s.mean_alpha,
                    s.std_alpha,
                    format!("±{:.1}", s.ci95_half_width),
                    fmt_opt(s.success_rate, 100.0, "%"),
                    fmt_opt(s.mean_shortfall_pct, 1.0, "%"),
                    lb
                )?;
            }
        }
        Ok(())
    }
}
