//! Jaccard index of observed edges and single-pass threshold filtering,
//! plus edge classification against a known true graph.

use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, GraphLabel};

/// Threshold comparisons happen on integers: an edge passes when
/// `intersection * TAU_SCALE >= round(tau * TAU_SCALE) * union`. This keeps
/// the inclusive boundary exact for any tau written with <= 9 decimals.
const TAU_SCALE: u64 = 1_000_000_000;

/// Jaccard filtering threshold in [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FilterConfig {
    pub tau: f64,
}

impl FilterConfig {
    pub fn new(tau: f64) -> Result<Self> {
        let cfg = FilterConfig { tau };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.tau) {
            return Err(Error::parameter(format!(
                "tau must be in [0,1], got {}",
                self.tau
            )));
        }
        Ok(())
    }

    #[inline]
    pub(crate) fn tau_scaled(&self) -> u64 {
        (self.tau * TAU_SCALE as f64).round() as u64
    }
}

/// Intersection and union sizes behind an edge's Jaccard index. Both
/// endpoints belong to the union because each neighbors the other.
#[inline]
pub(crate) fn edge_overlap(g: &Graph, u: u32, v: u32) -> (u64, u64) {
    let inter = g.common_neighbor_count(u, v) as u64;
    let union = g.degree(u) as u64 + g.degree(v) as u64 - inter;
    (inter, union)
}

#[inline]
pub(crate) fn passes(inter: u64, union: u64, tau_scaled: u64) -> bool {
    inter * TAU_SCALE >= tau_scaled * union
}

/// Jaccard index |N(u) ∩ N(v)| / |N(u) ∪ N(v)| of a vertex pair. Non-edges
/// take the convention J = 0, as does 0/0.
pub fn jaccard_index(g: &Graph, u: usize, v: usize) -> Result<f64> {
    g.check_vertex(u)?;
    g.check_vertex(v)?;
    if u == v {
        return Err(Error::parameter("jaccard index needs two distinct vertices"));
    }
    if !g.has_edge(u as u32, v as u32) {
        return Ok(0.0);
    }
    let (inter, union) = edge_overlap(g, u as u32, v as u32);
    if union == 0 {
        return Ok(0.0);
    }
    Ok(inter as f64 / union as f64)
}

/// Single-pass Jaccard filtering: keep exactly the edges whose index on the
/// *input* graph clears tau (inclusive). Never iterated.
pub fn tau_filter(g: &Graph, cfg: &FilterConfig) -> Result<Graph> {
    cfg.validate()?;
    let tau_scaled = cfg.tau_scaled();
    let edges: Vec<(u32, u32)> = g.edges().collect();
    let kept: Vec<(u32, u32)> = edges
        .into_par_iter()
        .filter(|&(u, v)| {
            let (inter, union) = edge_overlap(g, u, v);
            passes(inter, union, tau_scaled)
        })
        .collect();
    Graph::from_edges(g.n(), kept, GraphLabel::Filtered)
}

/// Observed-edge classification against a known true graph. `realbad` edges
/// are the inserted ones whose endpoints share no true-graph neighbor; they
/// are the only insertions that can distort the metric beyond a factor 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeClassification {
    /// edges present in both graphs
    pub good: usize,
    /// inserted edges with no common true-graph neighbor
    pub realbad: usize,
    /// inserted edges whose endpoints share a true-graph neighbor
    pub benign_extra: usize,
    pub realbad_edges: Vec<(u32, u32)>,
    pub benign_edges: Vec<(u32, u32)>,
}

pub fn classify_extra_edges(observed: &Graph, true_graph: &Graph) -> Result<EdgeClassification> {
    if observed.n() != true_graph.n() {
        return Err(Error::parameter(format!(
            "vertex count mismatch: {} vs {}",
            observed.n(),
            true_graph.n()
        )));
    }
    let mut out = EdgeClassification {
        good: 0,
        realbad: 0,
        benign_extra: 0,
        realbad_edges: Vec::new(),
        benign_edges: Vec::new(),
    };
    for (u, v) in observed.edges() {
        if true_graph.has_edge(u, v) {
            out.good += 1;
        } else if true_graph.common_neighbor_count(u, v) > 0 {
            out.benign_extra += 1;
            out.benign_edges.push((u, v));
        } else {
            out.realbad += 1;
            out.realbad_edges.push((u, v));
        }
    }
    Ok(out)
}

/// Per-edge score dump: CSV with columns u,v,intersection,union,jaccard.
pub fn write_edge_scores(g: &Graph, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::from("u,v,intersection,union,jaccard\n");
    for (u, v) in g.edges() {
        let (inter, union) = edge_overlap(g, u, v);
        let j = if union == 0 { 0.0 } else { inter as f64 / union as f64 };
        let _ = writeln!(out, "{u},{v},{inter},{union},{j}");
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}
