//! Wall-clock comparison harness for the indexes.
//!
//! Not a statistics package: it times index builds and per-query searches
//! with `Instant`, averages over a few repeats, and emits a serializable
//! report. Parameter sweeps re-generate the scenario along one axis and run
//! the same measurement at every point.

use std::str::FromStr;
use std::sync::Arc;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::model::{ModelError, RoviQuery, UserStore, VisualVocabulary};
use crate::oracle::{IndexKind, Oracle, RoviSearcher};
use crate::qiv::QivParams;
use crate::workload::{generate_dataset, generate_workload, WorkloadError, WorkloadSpec};

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("repeats must be positive")]
    ZeroRepeats,
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Workload(#[from] WorkloadError),
}

/// Measurement knobs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct BenchConfig {
    /// Untimed passes over the whole workload before measuring.
    pub warmup: usize,
    /// Timed passes; per-query times are averaged over these.
    pub repeats: usize,
    /// Also time the linear scan, as the "no index" yardstick.
    pub include_oracle: bool,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self { warmup: 5, repeats: 10, include_oracle: false }
    }
}

/// One query's timing under one index.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct QueryBench {
    pub mean_ns: u64,
    pub result_size: usize,
}

/// One index's timings over the workload.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IndexBench {
    pub index: String,
    pub build_ms: f64,
    pub mean_query_ms: f64,
    pub median_query_ms: f64,
    pub p95_query_ms: f64,
    pub per_query: Vec<QueryBench>,
}

/// Where and how a report was produced.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnvInfo {
    pub os: String,
    pub arch: String,
    pub cpus: usize,
    pub crate_version: String,
    /// Set when the clock's granularity is coarser than a microsecond; the
    /// repeat count is raised to compensate.
    pub timer_warning: Option<String>,
}

/// Everything needed to interpret or reproduce a run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchReport {
    pub n_users: usize,
    pub n_queries: usize,
    /// The configuration actually measured with: repeats may exceed the
    /// requested value when the timer is coarse.
    pub config: BenchConfig,
    pub indexes: Vec<IndexBench>,
    pub env: EnvInfo,
}

impl BenchReport {
    pub fn index(&self, name: &str) -> Option<&IndexBench> {
        self.indexes.iter().find(|b| b.index == name)
    }
}

/// A sweep re-runs the benchmark while varying one spec field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepAxis {
    Size,
    QueryWords,
    GammaG,
    GammaV,
    RegionFraction,
}

impl SweepAxis {
    /// The points measured along this axis.
    pub fn values(self) -> Vec<f64> {
        match self {
            SweepAxis::Size => vec![20_000.0, 65_000.0, 110_000.0, 155_000.0, 200_000.0],
            SweepAxis::QueryWords => vec![50.0, 75.0, 100.0, 125.0, 150.0],
            SweepAxis::GammaG | SweepAxis::GammaV => vec![0.1, 0.2, 0.3, 0.4, 0.5],
            SweepAxis::RegionFraction => vec![0.01, 0.02, 0.03, 0.04, 0.05],
        }
    }

    /// `base` with this axis set to `value`.
    pub fn apply(self, base: &WorkloadSpec, value: f64) -> WorkloadSpec {
        let mut spec = base.clone();
        match self {
            SweepAxis::Size => spec.n_users = value as usize,
            SweepAxis::QueryWords => spec.n_query_words = value as usize,
            SweepAxis::GammaG => spec.gamma_g = value,
            SweepAxis::GammaV => spec.gamma_v = value,
            SweepAxis::RegionFraction => spec.query_region_fraction = value,
        }
        spec
    }
}

impl std::fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SweepAxis::Size => "size",
            SweepAxis::QueryWords => "words",
            SweepAxis::GammaG => "gamma-g",
            SweepAxis::GammaV => "gamma-v",
            SweepAxis::RegionFraction => "region",
        })
    }
}

impl FromStr for SweepAxis {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "size" => Ok(SweepAxis::Size),
            "words" => Ok(SweepAxis::QueryWords),
            "gamma-g" => Ok(SweepAxis::GammaG),
            "gamma-v" => Ok(SweepAxis::GammaV),
            "region" => Ok(SweepAxis::RegionFraction),
            other => Err(format!(
                "unknown sweep axis {other:?}; expected size, words, gamma-g, gamma-v or region"
            )),
        }
    }
}

/// One sweep point: the varied value and its full report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepPoint {
    pub value: f64,
    pub report: BenchReport,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepReport {
    pub axis: SweepAxis,
    pub base: WorkloadSpec,
    pub seed: u64,
    pub points: Vec<SweepPoint>,
}

/// Times builds and queries for the given index kinds over a fixed workload.
pub fn run_bench(
    users: &Arc<UserStore>,
    vocab: &Arc<VisualVocabulary>,
    queries: &[RoviQuery],
    kinds: &[IndexKind],
    params: QivParams,
    config: &BenchConfig,
) -> Result<BenchReport, BenchError> {
    if config.repeats == 0 {
        return Err(BenchError::ZeroRepeats);
    }
    // A clock coarser than a microsecond cannot resolve single fast queries;
    // average over proportionally more repeats and say so in the report.
    let mut config = *config;
    let resolution = timer_resolution_ns();
    let timer_warning = (resolution > 1_000).then(|| {
        let scaled = config.repeats.saturating_mul((resolution / 1_000 + 1) as usize);
        let warning = format!(
            "timer granularity is {resolution} ns (worse than 1 us); \
             repeats raised from {} to {scaled}",
            config.repeats
        );
        config.repeats = scaled;
        warning
    });

    let mut subjects: Vec<(Box<dyn RoviSearcher>, f64)> = Vec::new();
    if config.include_oracle {
        let t0 = Instant::now();
        let oracle = Oracle::new(users.clone(), vocab.clone())?;
        subjects.push((Box::new(oracle), ms(t0.elapsed())));
    }
    for &kind in kinds {
        let t0 = Instant::now();
        let index = kind.build(users.clone(), vocab.clone(), params)?;
        subjects.push((index, ms(t0.elapsed())));
    }

    let indexes = subjects
        .iter()
        .map(|(searcher, build_ms)| time_searcher(searcher.as_ref(), *build_ms, queries, &config))
        .collect();

    Ok(BenchReport {
        n_users: users.len(),
        n_queries: queries.len(),
        config,
        indexes,
        env: EnvInfo {
            os: std::env::consts::OS.to_owned(),
            arch: std::env::consts::ARCH.to_owned(),
            cpus: std::thread::available_parallelism().map_or(1, |n| n.get()),
            crate_version: env!("CARGO_PKG_VERSION").to_owned(),
            timer_warning,
        },
    })
}

/// Generates data and queries at every axis point and benchmarks each.
pub fn run_sweep(
    axis: SweepAxis,
    base: &WorkloadSpec,
    seed: u64,
    kinds: &[IndexKind],
    params: QivParams,
    config: &BenchConfig,
) -> Result<SweepReport, BenchError> {
    let mut points = Vec::new();
    for value in axis.values() {
        let spec = axis.apply(base, value);
        let (users, vocab) = generate_dataset(&spec, seed)?;
        let queries = generate_workload(&spec, &users, seed)?;
        let report = run_bench(&users, &vocab, &queries, kinds, params, config)?;
        points.push(SweepPoint { value, report });
    }
    Ok(SweepReport { axis, base: base.clone(), seed, points })
}

fn time_searcher(
    searcher: &dyn RoviSearcher,
    build_ms: f64,
    queries: &[RoviQuery],
    config: &BenchConfig,
) -> IndexBench {
    for _ in 0..config.warmup {
        for q in queries {
            std::hint::black_box(searcher.search(q));
        }
    }
    let mut totals = vec![0u64; queries.len()];
    let mut sizes = vec![0usize; queries.len()];
    for _ in 0..config.repeats {
        for (i, q) in queries.iter().enumerate() {
            let t0 = Instant::now();
            let result = std::hint::black_box(searcher.search(q));
            totals[i] += t0.elapsed().as_nanos() as u64;
            sizes[i] = result.len();
        }
    }
    let per_query: Vec<QueryBench> = totals
        .iter()
        .zip(&sizes)
        .map(|(&total, &result_size)| QueryBench {
            mean_ns: total / config.repeats as u64,
            result_size,
        })
        .collect();
    let mut sorted: Vec<u64> = per_query.iter().map(|q| q.mean_ns).collect();
    sorted.sort_unstable();
    let ms_at = |rank: usize| sorted.get(rank).map_or(0.0, |&ns| ns as f64 / 1e6);
    let n = sorted.len();
    IndexBench {
        index: searcher.name().to_owned(),
        build_ms,
        mean_query_ms: sorted.iter().sum::<u64>() as f64 / 1e6 / n.max(1) as f64,
        median_query_ms: ms_at(n / 2),
        // Nearest-rank 95th percentile.
        p95_query_ms: ms_at(((n * 95).div_ceil(100)).saturating_sub(1)),
        per_query,
    }
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

/// Smallest positive `Instant` delta observed across a few probes.
fn timer_resolution_ns() -> u64 {
    let mut best = u64::MAX;
    for _ in 0..32 {
        let t0 = Instant::now();
        let mut d = t0.elapsed();
        while d.is_zero() {
            d = t0.elapsed();
        }
        best = best.min(d.as_nanos() as u64);
    }
    best.max(1)
}
