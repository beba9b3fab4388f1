//! proximet: a toolkit for studying how well shortest-path structure
//! survives random edge noise on proximity graphs.
//!
//! The pipeline: sample points from a hidden metric-measure space
//! ([`geometry`]), connect everything within radius r ([`graph`]), add
//! random edge deletions and insertions ([`perturb`]), prune suspect edges
//! by their Jaccard index ([`filter`]), and quantify how far the surviving
//! shortest-path metric strays from the true one ([`metrics`]). The
//! [`bounds`] module evaluates the closed-form parameter conditions under
//! which filtering provably recovers the metric within a factor of two, and
//! [`sweep`] / [`plot`] drive whole experiments and render their curves.

// `!(x > 0.0)`-style guards are deliberate: they reject NaN along with the
// out-of-range values. Indexed loops stay where they walk several parallel
// arrays at once.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod bounds;
pub mod error;
pub mod filter;
pub mod geometry;
pub mod graph;
pub mod metrics;
pub mod perturb;
pub mod plot;
pub mod rng;
pub mod sweep;

mod spatial;

pub use bounds::{
    assumption_r_threshold, deletion_p_bound, feasibility_report, tau_window, FeasibilityReport,
    ParamWindow, RegimeParams, WindowMode,
};
pub use error::{Error, Result};
pub use filter::{
    classify_extra_edges, jaccard_index, tau_filter, write_edge_scores, EdgeClassification,
    FilterConfig,
};
pub use geometry::{
    check_epsilon_sample, estimate_ball_mass_lower, estimate_doubling_constant, sample_points,
    space_distance, suggest_radius, EpsilonSampleCheck, PointSample, SpaceKind, SpaceSpec,
};
pub use graph::{
    build_r_graph, common_neighbors, neighbor_stats, Graph, GraphLabel, NeighborStats,
};
pub use metrics::{
    compare_metric_pairs, compare_metrics, compare_metrics_with_violations, hop_distances,
    hop_distances_pairs, metric_sup_diff, normalized_l2_error, space_distances, two_approx_rate,
    DistMatrix, HopMatrix, MetricComparison, SupDiff, INF_HOPS,
};
pub use perturb::{perturb, perturb_reference, perturbation_stats, PerturbationParams, PerturbationStats};
pub use plot::{emit_plots, read_report_csv, write_report_csv, REPORT_CSV_HEADER, REPORT_SCHEMA};
pub use sweep::{
    choose_tau, run_realnet_experiment, run_synthetic_sweep, sample_pairs, PairsMode, RadiusMode,
    SweepConfig, SweepMeta, SweepReport, SweepRow, Variant, DEFAULT_SAMPLED_PAIRS,
    LARGE_N_THRESHOLD, TAU_GRID, TAU_RETENTION,
};
