//! Seeded Monte Carlo harness.
//!
//! Trial `k` of a run draws everything from `rng::trial_seed(master_seed, k)`,
//! so results do not depend on how trials are scheduled across workers.
//! Aggregation is an index-ordered fold.

use rayon::prelude::*;

use crate::bounds::{self, ClusterSizeHistogram};
use crate::channel::transmit;
use crate::clusterer::{cluster_axis, decision_error_count, pairwise_error_count, Axis};
use crate::decoder::{exact_pe_from_counts, majority_decode, DEFAULT_SIZE_CAP};
use crate::error::{Error, Result};
use crate::generator::{degenerate_event_t, prob_t_union_bound, sample_block_matrix};
use crate::model::{ChannelParams, GenerationLaw, TiePolicy};
use crate::rng::{stage_rng, trial_seed, Stage};

/// Which stages a trial runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Decode with the true partitions.
    KnownClusters,
    /// Cluster rows and columns; no decoding.
    ClusteringOnly,
    /// Cluster, then decode with the estimated partitions.
    FullPipeline,
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "known_clusters" => Ok(Mode::KnownClusters),
            "clustering_only" => Ok(Mode::ClusteringOnly),
            "full_pipeline" => Ok(Mode::FullPipeline),
            other => Err(Error::param("mode", format!("unknown mode `{other}`"))),
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::KnownClusters => "known_clusters",
            Mode::ClusteringOnly => "clustering_only",
            Mode::FullPipeline => "full_pipeline",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub law: GenerationLaw,
    pub ch: ChannelParams,
    pub tie: TiePolicy,
    pub mode: Mode,
    pub trials: u64,
    pub master_seed: u64,
    /// Fixes `m = beta * n` when sweeping over `n`.
    pub aspect_beta: Option<f64>,
}

impl ExperimentConfig {
    pub fn new(
        law: GenerationLaw,
        ch: ChannelParams,
        mode: Mode,
        trials: u64,
        master_seed: u64,
    ) -> Self {
        Self {
            law,
            ch,
            tie: TiePolicy::FairCoin,
            mode,
            trials,
            master_seed,
            aspect_beta: None,
        }
    }

    pub fn with_tie(mut self, tie: TiePolicy) -> Self {
        self.tie = tie;
        self
    }
}

/// Outcome of one trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct TrialResult {
    pub decode_error: bool,
    pub row_cluster_exact: bool,
    pub col_cluster_exact: bool,
    /// Pairs whose same/different status differs between the estimated and
    /// true row partitions.
    pub row_pairwise_errors: u64,
    /// Raw pairwise threshold decisions that disagree with the truth.
    pub row_decision_errors: u64,
    pub degenerate_t: bool,
    pub tie_occurred: bool,
}

/// Runs trial `trial_index` of `cfg`.
pub fn run_trial(cfg: &ExperimentConfig, trial_index: u64) -> Result<TrialResult> {
    if cfg.trials == 0 {
        return Err(Error::param("trials", "must be at least 1"));
    }
    let seed = trial_seed(cfg.master_seed, trial_index);
    let x = sample_block_matrix(&cfg.law, &mut stage_rng(seed, Stage::Generator))?;
    let y = transmit(&x, &cfg.ch, &mut stage_rng(seed, Stage::Channel));

    let mut out = TrialResult {
        row_cluster_exact: true,
        col_cluster_exact: true,
        degenerate_t: degenerate_event_t(&x),
        ..TrialResult::default()
    };

    let (rows, cols) = match cfg.mode {
        Mode::KnownClusters => (x.row_partition().clone(), x.col_partition().clone()),
        Mode::ClusteringOnly | Mode::FullPipeline => {
            let d0 = bounds::mu_delta_d0(&cfg.ch).d0.min(1.0);
            let rows = cluster_axis(&y, d0, Axis::Rows)?;
            let cols = cluster_axis(&y, d0, Axis::Columns)?;
            out.row_cluster_exact = rows == *x.row_partition();
            out.col_cluster_exact = cols == *x.col_partition();
            out.row_pairwise_errors = pairwise_error_count(&rows, x.row_partition())?;
            out.row_decision_errors = decision_error_count(&y, d0, Axis::Rows, x.row_partition())?;
            (rows, cols)
        }
    };

    if cfg.mode != Mode::ClusteringOnly {
        let decoded =
            majority_decode(&y, &rows, &cols, cfg.tie, &mut stage_rng(seed, Stage::Ties))?;
        out.tie_occurred = decoded.tie_occurred;
        out.decode_error = !decoded.estimate.same_entries(&x)
            || (cfg.tie == TiePolicy::CountAsError && decoded.tie_occurred);
    }
    Ok(out)
}

/// Wilson score interval for `successes` out of `trials`, clamped to `[0, 1]`.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> Result<(f64, f64)> {
    if trials == 0 {
        return Err(Error::param("trials", "must be at least 1"));
    }
    if successes > trials {
        return Err(Error::param("successes", "exceeds trials"));
    }
    let n = trials as f64;
    let phat = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = phat + z2 / (2.0 * n);
    let half = z * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt();
    // The endpoints at 0 and n successes are exactly 0 and 1.
    let low = if successes == 0 {
        0.0
    } else {
        (center - half) / denom
    };
    let high = if successes == trials {
        1.0
    } else {
        (center + half) / denom
    };
    Ok((low.clamp(0.0, 1.0), high.clamp(0.0, 1.0)))
}

pub const Z95: f64 = 1.96;

/// Rate of one event with its 95% Wilson interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorEstimate {
    pub successes: u64,
    pub trials: u64,
    pub rate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl ErrorEstimate {
    pub fn new(successes: u64, trials: u64) -> Result<Self> {
        let (ci_low, ci_high) = wilson_interval(successes, trials, Z95)?;
        let rate = successes as f64 / trials as f64;
        Ok(Self {
            successes,
            trials,
            rate,
            ci_low: ci_low.min(rate),
            ci_high: ci_high.max(rate),
        })
    }

    /// Half the interval width.
    pub fn half_width(&self) -> f64 {
        (self.ci_high - self.ci_low) / 2.0
    }

    /// Binomial standard error of the rate.
    pub fn std_error(&self) -> f64 {
        (self.rate * (1.0 - self.rate) / self.trials as f64).sqrt()
    }
}

/// Recorded error events.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Event {
    DecodeError,
    RowClusterError,
    ColClusterError,
    DegenerateT,
    Tie,
}

impl Event {
    pub fn name(self) -> &'static str {
        match self {
            Event::DecodeError => "decode_error",
            Event::RowClusterError => "row_cluster_error",
            Event::ColClusterError => "col_cluster_error",
            Event::DegenerateT => "degenerate_t",
            Event::Tie => "tie",
        }
    }

    fn occurred(self, t: &TrialResult) -> bool {
        match self {
            Event::DecodeError => t.decode_error,
            Event::RowClusterError => !t.row_cluster_exact,
            Event::ColClusterError => !t.col_cluster_exact,
            Event::DegenerateT => t.degenerate_t,
            Event::Tie => t.tie_occurred,
        }
    }

    /// Events recorded in `mode`, in CSV column order.
    pub fn for_mode(mode: Mode) -> &'static [Event] {
        match mode {
            Mode::KnownClusters => &[Event::DecodeError, Event::DegenerateT, Event::Tie],
            Mode::ClusteringOnly => &[
                Event::RowClusterError,
                Event::ColClusterError,
                Event::DegenerateT,
            ],
            Mode::FullPipeline => &[
                Event::DecodeError,
                Event::RowClusterError,
                Event::ColClusterError,
                Event::DegenerateT,
                Event::Tie,
            ],
        }
    }
}

/// Aggregated estimates for one configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct EventRates {
    pub events: Vec<(Event, ErrorEstimate)>,
    /// Mean of `row_pairwise_errors` over trials.
    pub mean_row_pairwise_errors: f64,
    /// Mean of `row_decision_errors` over trials.
    pub mean_row_decision_errors: f64,
}

impl EventRates {
    pub fn get(&self, event: Event) -> Option<&ErrorEstimate> {
        self.events
            .iter()
            .find(|(e, _)| *e == event)
            .map(|(_, est)| est)
    }
}

/// All trial results of `cfg`, ordered by trial index. Runs on the current
/// rayon pool.
pub fn run_trials(cfg: &ExperimentConfig) -> Result<Vec<TrialResult>> {
    (0..cfg.trials)
        .into_par_iter()
        .map(|k| run_trial(cfg, k))
        .collect()
}

/// Runs all trials and aggregates every event recorded for `cfg.mode`.
pub fn estimate_error_rates(cfg: &ExperimentConfig) -> Result<EventRates> {
    let results = run_trials(cfg)?;
    aggregate(cfg.mode, &results)
}

pub fn aggregate(mode: Mode, results: &[TrialResult]) -> Result<EventRates> {
    let trials = results.len() as u64;
    let events = Event::for_mode(mode)
        .iter()
        .map(|&e| {
            let hits = results.iter().filter(|t| e.occurred(t)).count() as u64;
            ErrorEstimate::new(hits, trials).map(|est| (e, est))
        })
        .collect::<Result<Vec<_>>>()?;
    let mean =
        |f: fn(&TrialResult) -> u64| results.iter().map(f).sum::<u64>() as f64 / trials as f64;
    Ok(EventRates {
        events,
        mean_row_pairwise_errors: mean(|t| t.row_pairwise_errors),
        mean_row_decision_errors: mean(|t| t.row_decision_errors),
    })
}

/// Parameter a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    /// Joint cluster size `m0 * n0`.
    ClusterSize,
    Epsilon,
    P,
    /// Column count; rows follow `aspect_beta` when set.
    N,
}

impl std::str::FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "m0n0" | "cluster_size" => Ok(SweepAxis::ClusterSize),
            "epsilon" | "eps" => Ok(SweepAxis::Epsilon),
            "p" => Ok(SweepAxis::P),
            "n" => Ok(SweepAxis::N),
            other => Err(Error::param(
                "axis",
                format!("unknown sweep axis `{other}`"),
            )),
        }
    }
}

impl std::fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SweepAxis::ClusterSize => "m0n0",
            SweepAxis::Epsilon => "epsilon",
            SweepAxis::P => "p",
            SweepAxis::N => "n",
        })
    }
}

/// Closed-form companions to a sweep row, for equal cluster sizes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticColumns {
    pub p1: f64,
    pub g_eps: f64,
    pub g_p1: f64,
    pub exp_lower: f64,
    pub exp_upper: f64,
    pub exp_upper_valid: bool,
    /// Exact known-cluster error for `cfg.tie`; NaN above the size cap.
    pub exact_pe: f64,
    pub prob_t_bound: f64,
    /// NaN when undefined.
    pub decodable_min_size: f64,
    pub undecodable_max_size: f64,
}

/// Default `delta` for the undecodable threshold in sweep reports.
pub const REPORT_DELTA: f64 = 0.5;

impl AnalyticColumns {
    pub fn compute(cfg: &ExperimentConfig, delta: f64) -> Result<Self> {
        let law = &cfg.law;
        let clusters = law.r() * law.t();
        let size = law.cluster_size();
        let hist = ClusterSizeHistogram::uniform(size, clusters)?;
        let (g_eps, g_p1) = bounds::error_prob_bounds(&hist, &cfg.ch);
        let (exp_lower, exp_upper) = bounds::exponential_bounds(&hist, &cfg.ch);
        let exact_pe =
            match exact_pe_from_counts(&[(size, clusters)], &cfg.ch, cfg.tie, DEFAULT_SIZE_CAP) {
                Ok(v) => v,
                Err(Error::SizeCapExceeded { .. }) => f64::NAN,
                Err(e) => return Err(e),
            };
        let th = bounds::size_thresholds(law.m, law.n, &cfg.ch, delta)?;
        Ok(Self {
            p1: bounds::p1(&cfg.ch),
            g_eps,
            g_p1,
            exp_lower,
            exp_upper: exp_upper.value,
            exp_upper_valid: exp_upper.valid,
            exact_pe,
            prob_t_bound: prob_t_union_bound(law.r(), law.t()),
            decodable_min_size: th.decodable_min_size.unwrap_or(f64::NAN),
            undecodable_max_size: th.undecodable_max_size.unwrap_or(f64::NAN),
        })
    }

    pub const NAMES: [&'static str; 10] = [
        "p1",
        "G_eps",
        "G_p1",
        "exp_lower",
        "exp_upper",
        "exp_upper_valid",
        "exact_pe",
        "prob_T_bound",
        "decodable_min_size",
        "undecodable_max_size",
    ];

    pub fn values(&self) -> [f64; 10] {
        [
            self.p1,
            self.g_eps,
            self.g_p1,
            self.exp_lower,
            self.exp_upper,
            if self.exp_upper_valid { 1.0 } else { 0.0 },
            self.exact_pe,
            self.prob_t_bound,
            self.decodable_min_size,
            self.undecodable_max_size,
        ]
    }
}

/// One row of a sweep table.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub cfg: ExperimentConfig,
    pub rates: EventRates,
    pub analytic: AnalyticColumns,
}

/// Result of a sweep (or of a single configuration: one row).
#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub mode: Mode,
    pub rows: Vec<SweepRow>,
}

/// Configuration obtained from `base` by setting `axis` to `value`.
pub fn configure(base: &ExperimentConfig, axis: SweepAxis, value: f64) -> Result<ExperimentConfig> {
    let mut cfg = base.clone();
    match axis {
        SweepAxis::Epsilon => cfg.ch = ChannelParams::new(value, base.ch.p())?,
        SweepAxis::P => cfg.ch = ChannelParams::new(base.ch.epsilon(), value)?,
        SweepAxis::ClusterSize => {
            let size = as_count("m0n0", value)?;
            let (m0, n0) = split_cluster_size(size, base.law.m, base.law.n)?;
            cfg.law = GenerationLaw::new(base.law.m, base.law.n, m0, n0, base.law.permute)?;
        }
        SweepAxis::N => {
            let n = as_count("n", value)?;
            let m = match base.aspect_beta {
                Some(beta) => as_count("m", (beta * n as f64).round())?,
                None => base.law.m,
            };
            cfg.law = GenerationLaw::new(m, n, base.law.m0, base.law.n0, base.law.permute)?;
        }
    }
    Ok(cfg)
}

fn as_count(name: &'static str, value: f64) -> Result<usize> {
    if value >= 1.0 && value.fract() == 0.0 && value <= usize::MAX as f64 {
        Ok(value as usize)
    } else {
        Err(Error::param(
            name,
            format!("{value} is not a positive integer"),
        ))
    }
}

/// Splits a joint cluster size into `m0 * n0` with `m0 | m`, `n0 | n`,
/// choosing the most square factorization (ties favour `m0 <= n0`).
pub fn split_cluster_size(size: usize, m: usize, n: usize) -> Result<(usize, usize)> {
    (1..=size)
        .filter(|&m0| {
            size.is_multiple_of(m0) && m.is_multiple_of(m0) && n.is_multiple_of(size / m0)
        })
        .map(|m0| (m0, size / m0))
        .min_by_key(|&(m0, n0)| (m0.abs_diff(n0), m0 > n0))
        .ok_or_else(|| {
            Error::param(
                "m0n0",
                format!("no factorization of {size} divides a {m}x{n} matrix"),
            )
        })
}

/// Runs `base` once per value of `axis`.
pub fn sweep(base: &ExperimentConfig, axis: SweepAxis, values: &[f64]) -> Result<ResultTable> {
    let rows = values
        .iter()
        .map(|&v| {
            let cfg = configure(base, axis, v)?;
            run_row(cfg)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ResultTable {
        mode: base.mode,
        rows,
    })
}

/// Single-configuration table.
pub fn single(cfg: &ExperimentConfig) -> Result<ResultTable> {
    Ok(ResultTable {
        mode: cfg.mode,
        rows: vec![run_row(cfg.clone())?],
    })
}

fn run_row(cfg: ExperimentConfig) -> Result<SweepRow> {
    let rates = estimate_error_rates(&cfg)?;
    let analytic = AnalyticColumns::compute(&cfg, REPORT_DELTA)?;
    Ok(SweepRow {
        cfg,
        rates,
        analytic,
    })
}
