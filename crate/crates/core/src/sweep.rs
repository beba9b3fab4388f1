//! Experiment drivers: synthetic ground-truth sweeps over the insertion
//! probability, and the real-network protocol that compares perturbed and
//! filtered variants against their unperturbed references.

use std::collections::HashSet;
use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{
    assumption_r_threshold, combined_precondition_warnings, tau_window, ParamWindow, RegimeParams,
    WindowMode,
};
use crate::error::{Error, Result};
use crate::filter::{edge_overlap, passes, tau_filter, FilterConfig};
use crate::geometry::{
    estimate_ball_mass_lower, estimate_doubling_constant, sample_points, suggest_radius,
    PointSample, SpaceSpec,
};
use crate::graph::{build_r_graph, Graph, GraphLabel};
use crate::metrics::{
    compare_metric_pairs, compare_metrics, hop_distances, hop_distances_pairs, HopMatrix,
    MetricComparison,
};
use crate::perturb::{perturb, PerturbationParams};
use crate::rng::{self, tags};

/// How the neighborhood radius is chosen for a synthetic run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RadiusMode {
    /// Use this radius directly.
    Explicit(f64),
    /// multiplier times the mean k-th nearest neighbor distance.
    Knn { multiplier: f64, k: usize },
}

/// Whether metric comparisons run over all vertex pairs or a fixed random
/// subset (for large n). The subset is drawn once per run and shared by all
/// variants, so comparisons stay paired.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairsMode {
    All,
    Sampled(usize),
}

impl fmt::Display for PairsMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PairsMode::All => write!(f, "all"),
            PairsMode::Sampled(count) => write!(f, "sampled:{count}"),
        }
    }
}

impl FromStr for PairsMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "all" {
            return Ok(PairsMode::All);
        }
        let digits = s.strip_prefix("sampled:").unwrap_or(s);
        let count: usize = digits
            .parse()
            .map_err(|_| Error::parameter(format!("bad pairs mode `{s}` (use `all` or a count)")))?;
        if count == 0 {
            return Err(Error::parameter("sampled pair count must be positive"));
        }
        Ok(PairsMode::Sampled(count))
    }
}

impl Serialize for PairsMode {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            PairsMode::All => ser.serialize_str("all"),
            PairsMode::Sampled(count) => ser.serialize_u64(*count as u64),
        }
    }
}

impl<'de> Deserialize<'de> for PairsMode {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Count(u64),
            Label(String),
        }
        match Raw::deserialize(de)? {
            Raw::Count(c) if c > 0 => Ok(PairsMode::Sampled(c as usize)),
            Raw::Count(_) => Err(serde::de::Error::custom("pair count must be positive")),
            Raw::Label(s) => PairsMode::from_str(&s).map_err(serde::de::Error::custom),
        }
    }
}

fn default_trials() -> usize {
    10
}

fn default_pairs_mode() -> PairsMode {
    PairsMode::All
}

/// Configuration of a synthetic ground-truth sweep. Mirrors the TOML schema
/// of the `sweep` subcommand key for key.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub space: SpaceSpec,
    pub n: usize,
    pub r_mode: RadiusMode,
    pub p: f64,
    pub q_grid: Vec<f64>,
    /// Jaccard threshold; omit to let the run calibrate one from the grid.
    #[serde(default)]
    pub tau: Option<f64>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    pub master_seed: u64,
    #[serde(default = "default_pairs_mode")]
    pub pairs_mode: PairsMode,
}

impl SweepConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: SweepConfig = toml::from_str(text)
            .map_err(|e| Error::parameter(format!("bad sweep config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_toml_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        self.space.validate()?;
        if self.n < 3 {
            return Err(Error::parameter(format!("n must be >= 3, got {}", self.n)));
        }
        match self.r_mode {
            RadiusMode::Explicit(r) if !(r > 0.0) => {
                return Err(Error::parameter(format!("radius must be positive, got {r}")));
            }
            RadiusMode::Knn { multiplier, k } => {
                if !(multiplier > 0.0) {
                    return Err(Error::parameter("knn multiplier must be positive"));
                }
                if k == 0 || k >= self.n {
                    return Err(Error::parameter(format!(
                        "knn k must satisfy 1 <= k < n, got {k}"
                    )));
                }
            }
            _ => {}
        }
        if !(0.0..=1.0).contains(&self.p) {
            return Err(Error::parameter(format!("p must be in [0,1], got {}", self.p)));
        }
        if self.q_grid.is_empty() {
            return Err(Error::parameter("q_grid must be nonempty"));
        }
        for w in self.q_grid.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::parameter("q_grid must be strictly ascending"));
            }
        }
        for &q in &self.q_grid {
            if !(0.0..=1.0).contains(&q) {
                return Err(Error::parameter(format!("q values must be in [0,1], got {q}")));
            }
        }
        if let Some(tau) = self.tau {
            FilterConfig::new(tau)?;
        }
        if self.trials == 0 {
            return Err(Error::parameter("trials must be >= 1"));
        }
        if let PairsMode::Sampled(0) = self.pairs_mode {
            return Err(Error::parameter("sampled pair count must be positive"));
        }
        Ok(())
    }
}

/// Which side of the comparison a report row describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Variant {
    Observed,
    Filtered,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Variant::Observed => write!(f, "observed"),
            Variant::Filtered => write!(f, "filtered"),
        }
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "observed" => Ok(Variant::Observed),
            "filtered" => Ok(Variant::Filtered),
            other => Err(Error::parameter(format!("unknown variant `{other}`"))),
        }
    }
}

/// One (q, trial, variant) measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub q: f64,
    pub trial: usize,
    pub variant: Variant,
    pub r2approx: f64,
    pub delta_n: Option<f64>,
    pub good_index_count: u64,
    pub runtime_ms: f64,
}

impl SweepRow {
    /// Equality on everything except the wall-clock field.
    pub fn same_result(&self, other: &SweepRow) -> bool {
        self.q == other.q
            && self.trial == other.trial
            && self.variant == other.variant
            && self.r2approx == other.r2approx
            && self.delta_n == other.delta_n
            && self.good_index_count == other.good_index_count
    }
}

/// Configuration echo and calibration values attached to a report.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepMeta {
    /// "synthetic" or "realnet:<path>"
    pub label: String,
    pub space: Option<SpaceSpec>,
    pub n: usize,
    /// edge count of the reference graph (calibration true graph, or the
    /// input network for realnet runs)
    pub reference_edges: usize,
    pub r_used: Option<f64>,
    pub p: f64,
    pub q_grid: Vec<f64>,
    pub tau: f64,
    pub trials: usize,
    pub master_seed: u64,
    pub pairs_mode: PairsMode,
    pub s_hat: Option<f64>,
    pub l_hat: Option<f64>,
    pub insertion_window: Option<ParamWindow>,
    pub combined_window: Option<ParamWindow>,
    pub warnings: Vec<String>,
}

/// Rows plus metadata from one sweep run.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub meta: SweepMeta,
    pub rows: Vec<SweepRow>,
}

impl SweepReport {
    /// Determinism comparison: metadata and all row fields except runtimes.
    pub fn same_results(&self, other: &SweepReport) -> bool {
        self.meta == other.meta
            && self.rows.len() == other.rows.len()
            && self.rows.iter().zip(&other.rows).all(|(a, b)| a.same_result(b))
    }

    /// Mean of a row statistic over trials for one (q, variant) cell.
    pub fn mean_over_trials(&self, q: f64, variant: Variant, stat: impl Fn(&SweepRow) -> Option<f64>) -> Option<f64> {
        let values: Vec<f64> = self
            .rows
            .iter()
            .filter(|row| row.q == q && row.variant == variant)
            .filter_map(stat)
            .collect();
        if values.is_empty() {
            None
        } else {
            Some(values.iter().sum::<f64>() / values.len() as f64)
        }
    }
}

/// Threshold grid the auto-selection rule searches.
pub const TAU_GRID: [f64; 4] = [0.02, 0.05, 0.1, 0.2];
/// Fraction of present true edges a candidate threshold must retain.
pub const TAU_RETENTION: f64 = 0.99;
/// Above this vertex count, realnet runs default to sampled pairs.
pub const LARGE_N_THRESHOLD: usize = 20_000;
/// Pair-subset size used by the realnet default on large networks.
pub const DEFAULT_SAMPLED_PAIRS: usize = 1_000_000;

/// Default threshold rule: build the q = 0 observed graph (deletions only),
/// and take the most aggressive grid value that still retains at least 99%
/// of the true edges present in it. Falls back to the smallest grid value
/// when none qualifies. Deterministic given the seed.
pub fn choose_tau(true_graph: &Graph, p: f64, master_seed: u64) -> Result<f64> {
    let observed = if p == 0.0 {
        true_graph.clone().with_label(GraphLabel::Observed)
    } else {
        perturb(
            true_graph,
            &PerturbationParams { p, q: 0.0, seed: rng::derive_seed(master_seed, tags::TAU_CAL, 1) },
        )?
    };
    let overlaps: Vec<(u64, u64)> = observed
        .edges()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(u, v)| edge_overlap(&observed, u, v))
        .collect();
    if overlaps.is_empty() {
        return Ok(TAU_GRID[0]);
    }
    let needed = TAU_RETENTION * overlaps.len() as f64;
    for &tau in TAU_GRID.iter().rev() {
        let scaled = FilterConfig { tau }.tau_scaled();
        let kept = overlaps.iter().filter(|&&(i, u)| passes(i, u, scaled)).count();
        if kept as f64 >= needed {
            return Ok(tau);
        }
    }
    Ok(TAU_GRID[0])
}

fn resolve_radius(mode: &RadiusMode, sample: &PointSample) -> Result<f64> {
    match *mode {
        RadiusMode::Explicit(r) => Ok(r),
        RadiusMode::Knn { multiplier, k } => suggest_radius(sample, multiplier, k),
    }
}

/// Uniform random distinct vertex pairs (i < j). Falls back to the full pair
/// list when `count` covers it.
pub fn sample_pairs(n: usize, count: usize, seed: u64) -> Vec<(u32, u32)> {
    let total = n * (n - 1) / 2;
    if count >= total {
        let mut all = Vec::with_capacity(total);
        for i in 0..n as u32 {
            for j in (i + 1)..n as u32 {
                all.push((i, j));
            }
        }
        return all;
    }
    let mut rng = rng::stream(seed);
    let mut chosen = HashSet::with_capacity(count);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let a = rng.random_range(0..n as u32);
        let b = rng.random_range(0..n as u32);
        if a == b {
            continue;
        }
        let pair = if a < b { (a, b) } else { (b, a) };
        if chosen.insert(pair) {
            out.push(pair);
        }
    }
    out
}

/// Hop metric of a graph in the requested pairs mode.
enum MetricView {
    Full(HopMatrix),
    Pairs(Vec<u16>),
}

fn metric_view(g: &Graph, pairs: Option<&[(u32, u32)]>) -> Result<MetricView> {
    Ok(match pairs {
        None => MetricView::Full(hop_distances(g)),
        Some(pairs) => MetricView::Pairs(hop_distances_pairs(g, pairs)?),
    })
}

fn compare_views(reference: &MetricView, other: &MetricView) -> Result<MetricComparison> {
    match (reference, other) {
        (MetricView::Full(a), MetricView::Full(b)) => compare_metrics(a, b),
        (MetricView::Pairs(a), MetricView::Pairs(b)) => compare_metric_pairs(a, b),
        _ => Err(Error::parameter("mismatched metric views")),
    }
}

/// Run the synthetic protocol: per trial, sample points, build the true
/// graph, then for each q perturb, filter, and compare both variants against
/// the true metric. Deterministic in `master_seed`; trials run in parallel
/// on disjoint substreams.
pub fn run_synthetic_sweep(cfg: &SweepConfig) -> Result<SweepReport> {
    cfg.validate()?;
    let master = cfg.master_seed;

    // calibration pass: radius, measure estimates, threshold selection
    let cal_sample = sample_points(&cfg.space, cfg.n, rng::derive_seed(master, tags::TAU_CAL, 0))?;
    let r_cal = resolve_radius(&cfg.r_mode, &cal_sample)?;
    let s_hat = estimate_ball_mass_lower(&cal_sample, r_cal)?;
    let l_hat = estimate_doubling_constant(&cal_sample, 4.0 * r_cal, 2)?;
    let g_cal = build_r_graph(&cal_sample, r_cal)?;
    let tau = match cfg.tau {
        Some(t) => t,
        None => choose_tau(&g_cal, cfg.p, master)?,
    };
    let filter_cfg = FilterConfig::new(tau)?;

    let mut warnings = Vec::new();
    let threshold = assumption_r_threshold(cfg.n)?;
    if s_hat < threshold {
        warnings.push(format!(
            "ball-mass estimate {s_hat:.6} at r = {r_cal:.6} is below the required {threshold:.6}; \
degree and common-neighbor guarantees may not apply"
        ));
    }

    let q_max = *cfg.q_grid.last().unwrap();
    let l_for_windows = cfg.space.known_doubling.unwrap_or(l_hat).max(1.0);
    let regime = RegimeParams {
        n: cfg.n,
        s: s_hat.clamp(f64::MIN_POSITIVE, 1.0),
        l: l_for_windows,
        c: (q_max / s_hat).max(1e-9),
        p: cfg.p,
        q: q_max,
    };
    let insertion_window = tau_window(&regime, WindowMode::InsertionOnly).ok();
    let combined_window = tau_window(&regime, WindowMode::Combined).ok();
    if cfg.p > 0.0 || q_max > 0.0 {
        warnings.extend(combined_precondition_warnings(&regime));
    }

    let pair_set: Option<Vec<(u32, u32)>> = match cfg.pairs_mode {
        PairsMode::All => None,
        PairsMode::Sampled(count) => {
            Some(sample_pairs(cfg.n, count, rng::derive_seed(master, tags::PAIRS, 0)))
        }
    };

    let per_trial: Vec<Vec<SweepRow>> = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| -> Result<Vec<SweepRow>> {
            let sample =
                sample_points(&cfg.space, cfg.n, rng::derive_seed(master, tags::SAMPLE, trial as u64))?;
            let r = resolve_radius(&cfg.r_mode, &sample)?;
            let g_star = build_r_graph(&sample, r)?;
            let d_star = metric_view(&g_star, pair_set.as_deref())?;
            let perturb_seed = rng::derive_seed(master, tags::PERTURB, trial as u64);
            let mut rows = Vec::with_capacity(2 * cfg.q_grid.len());
            for &q in &cfg.q_grid {
                let start = Instant::now();
                let observed = perturb(&g_star, &PerturbationParams { p: cfg.p, q, seed: perturb_seed })?;
                let d_obs = metric_view(&observed, pair_set.as_deref())?;
                let cmp_obs = compare_views(&d_star, &d_obs)?;
                rows.push(SweepRow {
                    q,
                    trial,
                    variant: Variant::Observed,
                    r2approx: cmp_obs.r2approx,
                    delta_n: cmp_obs.delta_n,
                    good_index_count: cmp_obs.good_index_count,
                    runtime_ms: start.elapsed().as_secs_f64() * 1e3,
                });
                let start = Instant::now();
                let filtered = tau_filter(&observed, &filter_cfg)?;
                let d_filt = metric_view(&filtered, pair_set.as_deref())?;
                let cmp_filt = compare_views(&d_star, &d_filt)?;
                rows.push(SweepRow {
                    q,
                    trial,
                    variant: Variant::Filtered,
                    r2approx: cmp_filt.r2approx,
                    delta_n: cmp_filt.delta_n,
                    good_index_count: cmp_filt.good_index_count,
                    runtime_ms: start.elapsed().as_secs_f64() * 1e3,
                });
            }
            Ok(rows)
        })
        .collect::<Result<_>>()?;

    let mut rows: Vec<SweepRow> = per_trial.into_iter().flatten().collect();
    rows.sort_by(|a, b| {
        a.q.partial_cmp(&b.q)
            .unwrap()
            .then(a.trial.cmp(&b.trial))
            .then(a.variant.cmp(&b.variant))
    });

    Ok(SweepReport {
        meta: SweepMeta {
            label: "synthetic".to_string(),
            space: Some(cfg.space.clone()),
            n: cfg.n,
            reference_edges: g_cal.edge_count(),
            r_used: Some(r_cal),
            p: cfg.p,
            q_grid: cfg.q_grid.clone(),
            tau,
            trials: cfg.trials,
            master_seed: master,
            pairs_mode: cfg.pairs_mode,
            s_hat: Some(s_hat),
            l_hat: Some(l_hat),
            insertion_window,
            combined_window,
            warnings,
        },
        rows,
    })
}

/// Run the real-network protocol on an edge-list file: insertion-only
/// perturbation at each q, comparing the perturbed graph against the input
/// network and the filtered-after-perturbed graph against the directly
/// filtered network.
///
/// Pass `pairs_mode: None` for the default policy: all pairs up to
/// `LARGE_N_THRESHOLD` vertices, a fixed seeded subset of
/// `DEFAULT_SAMPLED_PAIRS` pairs beyond it.
pub fn run_realnet_experiment(
    edge_list_path: impl AsRef<Path>,
    q_grid: &[f64],
    tau: f64,
    trials: usize,
    master_seed: u64,
    pairs_mode: Option<PairsMode>,
) -> Result<SweepReport> {
    let path = edge_list_path.as_ref();
    let g = Graph::read_edge_list(path, GraphLabel::External)?;
    if g.n() < 2 {
        return Err(Error::parameter(format!(
            "network has {} vertices; need at least 2",
            g.n()
        )));
    }
    let pairs_mode = pairs_mode.unwrap_or(if g.n() > LARGE_N_THRESHOLD {
        PairsMode::Sampled(DEFAULT_SAMPLED_PAIRS)
    } else {
        PairsMode::All
    });
    if q_grid.is_empty() {
        return Err(Error::parameter("q grid must be nonempty"));
    }
    for w in q_grid.windows(2) {
        if w[0] >= w[1] {
            return Err(Error::parameter("q grid must be strictly ascending"));
        }
    }
    for &q in q_grid {
        if !(0.0..=1.0).contains(&q) {
            return Err(Error::parameter(format!("q values must be in [0,1], got {q}")));
        }
    }
    if trials == 0 {
        return Err(Error::parameter("trials must be >= 1"));
    }
    let filter_cfg = FilterConfig::new(tau)?;

    let pair_set: Option<Vec<(u32, u32)>> = match pairs_mode {
        PairsMode::All => None,
        PairsMode::Sampled(count) => {
            Some(sample_pairs(g.n(), count, rng::derive_seed(master_seed, tags::PAIRS, 0)))
        }
    };

    // reference metrics: the input network and its directly filtered version
    let g_filtered = tau_filter(&g, &filter_cfg)?;
    let d_ref_observed = metric_view(&g, pair_set.as_deref())?;
    let d_ref_filtered = metric_view(&g_filtered, pair_set.as_deref())?;

    let per_trial: Vec<Vec<SweepRow>> = (0..trials)
        .into_par_iter()
        .map(|trial| -> Result<Vec<SweepRow>> {
            let seed = rng::derive_seed(master_seed, tags::PERTURB, trial as u64);
            let mut rows = Vec::with_capacity(2 * q_grid.len());
            for &q in q_grid {
                let start = Instant::now();
                let perturbed = perturb(&g, &PerturbationParams { p: 0.0, q, seed })?;
                let d_pert = metric_view(&perturbed, pair_set.as_deref())?;
                let cmp_obs = compare_views(&d_ref_observed, &d_pert)?;
                rows.push(SweepRow {
                    q,
                    trial,
                    variant: Variant::Observed,
                    r2approx: cmp_obs.r2approx,
                    delta_n: cmp_obs.delta_n,
                    good_index_count: cmp_obs.good_index_count,
                    runtime_ms: start.elapsed().as_secs_f64() * 1e3,
                });
                let start = Instant::now();
                let filtered = tau_filter(&perturbed, &filter_cfg)?;
                let d_filt = metric_view(&filtered, pair_set.as_deref())?;
                let cmp_filt = compare_views(&d_ref_filtered, &d_filt)?;
                rows.push(SweepRow {
                    q,
                    trial,
                    variant: Variant::Filtered,
                    r2approx: cmp_filt.r2approx,
                    delta_n: cmp_filt.delta_n,
                    good_index_count: cmp_filt.good_index_count,
                    runtime_ms: start.elapsed().as_secs_f64() * 1e3,
                });
            }
            Ok(rows)
        })
        .collect::<Result<_>>()?;

    let mut rows: Vec<SweepRow> = per_trial.into_iter().flatten().collect();
    rows.sort_by(|a, b| {
        a.q.partial_cmp(&b.q)
            .unwrap()
            .then(a.trial.cmp(&b.trial))
            .then(a.variant.cmp(&b.variant))
    });

    Ok(SweepReport {
        meta: SweepMeta {
            label: format!("realnet:{}", path.display()),
            space: None,
            n: g.n(),
            reference_edges: g.edge_count(),
            r_used: None,
            p: 0.0,
            q_grid: q_grid.to_vec(),
            tau,
            trials,
            master_seed,
            pairs_mode,
            s_hat: None,
            l_hat: None,
            insertion_window: None,
            combined_window: None,
            warnings: Vec::new(),
        },
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy_config() -> SweepConfig {
        SweepConfig {
            space: SpaceSpec::circle(1.0),
            n: 150,
            r_mode: RadiusMode::Explicit(0.1),
            p: 0.0,
            q_grid: vec![0.0, 0.02],
            tau: Some(0.05),
            trials: 2,
            master_seed: 11,
            pairs_mode: PairsMode::All,
        }
    }

    #[test]
    fn no_noise_rows_are_perfect() {
        let cfg = SweepConfig {
            q_grid: vec![0.0],
            tau: Some(0.0),
            ..toy_config()
        };
        let report = run_synthetic_sweep(&cfg).unwrap();
        assert_eq!(report.rows.len(), 4);
        for row in &report.rows {
            assert_eq!(row.r2approx, 1.0, "{row:?}");
            assert_eq!(row.delta_n, Some(0.0));
        }
    }

    #[test]
    fn sweep_is_deterministic() {
        let cfg = toy_config();
        let a = run_synthetic_sweep(&cfg).unwrap();
        let b = run_synthetic_sweep(&cfg).unwrap();
        assert!(a.same_results(&b));
        let c = run_synthetic_sweep(&SweepConfig { master_seed: 12, ..cfg }).unwrap();
        assert!(!a.same_results(&c));
    }

    #[test]
    fn sampled_pairs_mode_runs() {
        let cfg = SweepConfig {
            pairs_mode: PairsMode::Sampled(500),
            ..toy_config()
        };
        let report = run_synthetic_sweep(&cfg).unwrap();
        for row in &report.rows {
            assert!(row.good_index_count <= 500);
            assert!((0.0..=1.0).contains(&row.r2approx));
        }
    }

    #[test]
    fn rows_are_sorted_and_complete() {
        let report = run_synthetic_sweep(&toy_config()).unwrap();
        // one observed and one filtered row per (q, trial)
        assert_eq!(report.rows.len(), 2 * 2 * 2);
        let mut expected = Vec::new();
        for &q in &[0.0, 0.02] {
            for trial in 0..2 {
                for variant in [Variant::Observed, Variant::Filtered] {
                    expected.push((q, trial, variant));
                }
            }
        }
        let got: Vec<_> = report.rows.iter().map(|r| (r.q, r.trial, r.variant)).collect();
        assert_eq!(got, expected);
    }

    #[test]
    fn filtered_edges_subset_of_observed() {
        // the filter only removes edges, on any graph it is handed
        let sample = sample_points(&SpaceSpec::circle(1.0), 200, 5).unwrap();
        let g = build_r_graph(&sample, 0.08).unwrap();
        let obs = perturb(&g, &PerturbationParams { p: 0.1, q: 0.01, seed: 3 }).unwrap();
        let filt = tau_filter(&obs, &FilterConfig { tau: 0.1 }).unwrap();
        for (u, v) in filt.edges() {
            assert!(obs.has_edge(u, v));
        }
    }

    #[test]
    fn choose_tau_returns_grid_value() {
        let sample = sample_points(&SpaceSpec::circle(1.0), 600, 9).unwrap();
        let g = build_r_graph(&sample, 0.1).unwrap();
        let tau = choose_tau(&g, 0.0, 42).unwrap();
        assert!(TAU_GRID.contains(&tau));
        // dense enough circle graphs keep every edge at the top threshold
        assert_eq!(tau, 0.2);
    }

    #[test]
    fn choose_tau_backs_off_when_retention_fails() {
        // a long path: every edge has Jaccard 0, so only the smallest grid
        // value can be returned
        let edges: Vec<(u32, u32)> = (0..99u32).map(|i| (i, i + 1)).collect();
        let g = Graph::from_edges(100, edges, GraphLabel::TrueGraph).unwrap();
        let tau = choose_tau(&g, 0.0, 1).unwrap();
        assert_eq!(tau, TAU_GRID[0]);
    }

    #[test]
    fn config_validation_catches_bad_grids() {
        let mut cfg = toy_config();
        cfg.q_grid = vec![];
        assert!(cfg.validate().is_err());
        cfg.q_grid = vec![0.1, 0.05];
        assert!(cfg.validate().is_err());
        cfg.q_grid = vec![0.1, 1.5];
        assert!(cfg.validate().is_err());
        cfg = toy_config();
        cfg.trials = 0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn config_round_trips_through_toml() {
        let text = r#"
n = 150
p = 0.1
q_grid = [0.0, 0.01, 0.02]
master_seed = 7

[space]
kind = "circle"
circumference = 1.0

[r_mode]
knn = { multiplier = 2.0, k = 10 }
"#;
        let cfg = SweepConfig::from_toml_str(text).unwrap();
        assert_eq!(cfg.trials, 10, "default trials");
        assert_eq!(cfg.pairs_mode, PairsMode::All);
        assert_eq!(cfg.tau, None);
        assert_eq!(cfg.r_mode, RadiusMode::Knn { multiplier: 2.0, k: 10 });
        assert_eq!(cfg.space, SpaceSpec::circle(1.0));

        let text2 = toml::to_string(&cfg).unwrap();
        let cfg2 = SweepConfig::from_toml_str(&text2).unwrap();
        assert_eq!(cfg, cfg2);
    }

    #[test]
    fn realnet_q_zero_is_perfect() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("net.edges");
        let sample = sample_points(&SpaceSpec::circle(1.0), 120, 3).unwrap();
        let g = build_r_graph(&sample, 0.1).unwrap();
        g.write_edge_list(&path).unwrap();

        let report =
            run_realnet_experiment(&path, &[0.0], 0.05, 2, 99, None).unwrap();
        for row in &report.rows {
            assert_eq!(row.r2approx, 1.0);
            assert_eq!(row.delta_n, Some(0.0));
        }
    }

    #[test]
    fn realnet_full_insertion_stays_well_formed() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("tiny.edges");
        std::fs::write(&path, "# n=10\n0 1\n1 2\n2 3\n4 5\n6 7\n8 9\n").unwrap();
        let report =
            run_realnet_experiment(&path, &[1.0], 0.1, 1, 5, None).unwrap();
        assert_eq!(report.rows.len(), 2);
        for row in &report.rows {
            assert!((0.0..=1.0).contains(&row.r2approx));
            assert!(row.good_index_count <= 45);
        }
    }

    #[test]
    fn realnet_missing_file_is_io_error() {
        let err = run_realnet_experiment(
            "/nonexistent/net.edges",
            &[0.0],
            0.1,
            1,
            5,
            None,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
    }

    #[test]
    fn pairs_mode_parses_and_prints() {
        assert_eq!("all".parse::<PairsMode>().unwrap(), PairsMode::All);
        assert_eq!("1000".parse::<PairsMode>().unwrap(), PairsMode::Sampled(1000));
        assert_eq!(
            "sampled:500".parse::<PairsMode>().unwrap(),
            PairsMode::Sampled(500)
        );
        assert!("bogus".parse::<PairsMode>().is_err());
        assert_eq!(PairsMode::Sampled(10).to_string(), "sampled:10");
    }
}
