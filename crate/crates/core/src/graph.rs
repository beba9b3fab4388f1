//! Simple undirected graphs on vertex indices, r-neighborhood graph
//! construction, and the degree / common-neighbor statistics the parameter
//! bounds lean on.

use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{PointSample, SpaceKind};
use crate::spatial::{CircleIndex, GridIndex};

/// Which role a graph plays in an experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphLabel {
    TrueGraph,
    Observed,
    Filtered,
    External,
}

/// Simple undirected unweighted graph in CSR form. Adjacency lists are
/// sorted, self-loop free, and symmetric by construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    offsets: Vec<u32>,
    targets: Vec<u32>,
    label: GraphLabel,
}

impl Graph {
    /// Build from an undirected edge list. Orientation and duplicates are
    /// normalized away; self-loops are rejected.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (u32, u32)>, label: GraphLabel) -> Result<Self> {
        let mut norm: Vec<(u32, u32)> = Vec::new();
        for (a, b) in edges {
            if a == b {
                return Err(Error::parameter(format!("self-loop on vertex {a}")));
            }
            let (u, v) = if a < b { (a, b) } else { (b, a) };
            if v as usize >= n {
                return Err(Error::Index { vertex: v as usize, n });
            }
            norm.push((u, v));
        }
        norm.sort_unstable();
        norm.dedup();

        let mut offsets = vec![0u32; n + 1];
        for &(u, v) in &norm {
            offsets[u as usize + 1] += 1;
            offsets[v as usize + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let mut cursor = offsets.clone();
        let mut targets = vec![0u32; norm.len() * 2];
        // edges are sorted by (u, v); appending in this order leaves every
        // adjacency slice sorted without a second pass
        for &(u, v) in &norm {
            targets[cursor[u as usize] as usize] = v;
            cursor[u as usize] += 1;
        }
        for &(u, v) in &norm {
            targets[cursor[v as usize] as usize] = u;
            cursor[v as usize] += 1;
        }
        // the second append pass interleaves, so restore sortedness per slice
        let mut g = Graph { n, offsets, targets, label };
        g.sort_adjacency();
        Ok(g)
    }

    fn sort_adjacency(&mut self) {
        let offsets = self.offsets.clone();
        let targets = &mut self.targets;
        for v in 0..self.n {
            targets[offsets[v] as usize..offsets[v + 1] as usize].sort_unstable();
        }
    }

    pub fn empty(n: usize, label: GraphLabel) -> Self {
        Graph { n, offsets: vec![0; n + 1], targets: Vec::new(), label }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    #[inline]
    pub fn neighbors(&self, v: u32) -> &[u32] {
        &self.targets[self.offsets[v as usize] as usize..self.offsets[v as usize + 1] as usize]
    }

    #[inline]
    pub fn degree(&self, v: u32) -> usize {
        self.neighbors(v).len()
    }

    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }

    pub fn label(&self) -> GraphLabel {
        self.label
    }

    pub fn with_label(mut self, label: GraphLabel) -> Self {
        self.label = label;
        self
    }

    /// Iterate undirected edges once each, as (u, v) with u < v.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        (0..self.n as u32).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .copied()
                .filter(move |&v| v > u)
                .map(move |v| (u, v))
        })
    }

    pub fn check_vertex(&self, v: usize) -> Result<()> {
        if v >= self.n {
            return Err(Error::Index { vertex: v, n: self.n });
        }
        Ok(())
    }

    /// Structural sanity check used by tests and file loading: sorted
    /// adjacency, no self-loops or duplicates, and full symmetry.
    pub fn validate(&self) -> Result<()> {
        for v in 0..self.n as u32 {
            let adj = self.neighbors(v);
            for w in adj.windows(2) {
                if w[0] >= w[1] {
                    return Err(Error::parameter(format!(
                        "adjacency of {v} not strictly sorted"
                    )));
                }
            }
            for &u in adj {
                if u == v {
                    return Err(Error::parameter(format!("self-loop on {v}")));
                }
                if u as usize >= self.n {
                    return Err(Error::Index { vertex: u as usize, n: self.n });
                }
                if !self.has_edge(u, v) {
                    return Err(Error::parameter(format!("edge ({v},{u}) not symmetric")));
                }
            }
        }
        Ok(())
    }

    /// |N(u) ∩ N(v)| by merging the two sorted adjacency lists.
    #[inline]
    pub(crate) fn common_neighbor_count(&self, u: u32, v: u32) -> usize {
        merge_count(self.neighbors(u), self.neighbors(v))
    }

    /// Write the edge-list text format: a `# n=<count>` header and one
    /// `u v` line per undirected edge.
    pub fn write_edge_list(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut out = String::new();
        let _ = writeln!(out, "# n={}", self.n);
        for (u, v) in self.edges() {
            let _ = writeln!(out, "{u} {v}");
        }
        std::fs::write(path, out).map_err(|e| Error::io(path, e))
    }

    /// Read the edge-list text format. Vertex count comes from the
    /// `# n=<count>` header when present, otherwise max index + 1.
    pub fn read_edge_list(path: impl AsRef<Path>, label: GraphLabel) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut declared_n: Option<usize> = None;
        let mut edges: Vec<(u32, u32)> = Vec::new();
        let mut max_idx = 0u32;
        for (idx, raw) in text.lines().enumerate() {
            let lineno = idx + 1;
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(comment) = line.strip_prefix('#') {
                let comment = comment.trim();
                if let Some(v) = comment.strip_prefix("n=") {
                    declared_n = Some(v.trim().parse().map_err(|_| {
                        Error::parse(path, lineno, format!("bad vertex count `{v}`"))
                    })?);
                }
                continue;
            }
            let mut it = line.split_whitespace();
            let (a, b) = match (it.next(), it.next(), it.next()) {
                (Some(a), Some(b), None) => (a, b),
                _ => {
                    return Err(Error::parse(
                        path,
                        lineno,
                        "expected exactly two vertex indices".to_string(),
                    ))
                }
            };
            let u: u32 = a
                .parse()
                .map_err(|_| Error::parse(path, lineno, format!("bad vertex index `{a}`")))?;
            let v: u32 = b
                .parse()
                .map_err(|_| Error::parse(path, lineno, format!("bad vertex index `{b}`")))?;
            if u == v {
                return Err(Error::parse(path, lineno, format!("self-loop on vertex {u}")));
            }
            max_idx = max_idx.max(u).max(v);
            edges.push((u, v));
        }
        let inferred = if edges.is_empty() { 0 } else { max_idx as usize + 1 };
        let n = declared_n.unwrap_or(inferred);
        if inferred > n {
            return Err(Error::parse(
                path,
                1,
                format!("vertex index {} exceeds declared n={}", max_idx, n),
            ));
        }
        Graph::from_edges(n, edges, label)
    }
}

#[inline]
fn merge_count(a: &[u32], b: &[u32]) -> usize {
    let (mut i, mut j, mut count) = (0usize, 0usize, 0usize);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                count += 1;
                i += 1;
                j += 1;
            }
        }
    }
    count
}

/// Build the r-neighborhood graph: an edge wherever the space distance is
/// <= r (closed ball, ties included).
pub fn build_r_graph(sample: &PointSample, r: f64) -> Result<Graph> {
    if !(r > 0.0) {
        return Err(Error::parameter(format!("radius must be positive, got {r}")));
    }
    let n = sample.len();
    let edges: Vec<(u32, u32)> = match sample.space().kind {
        SpaceKind::Circle { .. } => {
            let idx = CircleIndex::from_sample(sample).expect("circle sample");
            (0..n as u32)
                .into_par_iter()
                .flat_map_iter(|i| {
                    let mut local = Vec::new();
                    idx.for_each_within(sample.point(i as usize)[0], r, |j| {
                        if j > i {
                            local.push((i, j));
                        }
                    });
                    local.into_iter()
                })
                .collect()
        }
        _ => {
            let grid = GridIndex::build(sample, r);
            (0..n as u32)
                .into_par_iter()
                .flat_map_iter(|i| {
                    let mut local = Vec::new();
                    let p = sample.point(i as usize);
                    grid.for_each_within(
                        p,
                        r,
                        |j| sample.distance(i as usize, j as usize),
                        |j, _| {
                            if j > i {
                                local.push((i, j));
                            }
                        },
                    );
                    local.into_iter()
                })
                .collect()
        }
    };
    Graph::from_edges(n, edges, GraphLabel::TrueGraph)
}

/// Reference r-graph construction by the O(n^2) all-pairs scan. Kept for
/// oracle tests against the indexed path.
pub fn build_r_graph_all_pairs(sample: &PointSample, r: f64) -> Result<Graph> {
    if !(r > 0.0) {
        return Err(Error::parameter(format!("radius must be positive, got {r}")));
    }
    let n = sample.len();
    let mut edges = Vec::new();
    for i in 0..n as u32 {
        for j in (i + 1)..n as u32 {
            if sample.distance(i as usize, j as usize) <= r {
                edges.push((i, j));
            }
        }
    }
    Graph::from_edges(n, edges, GraphLabel::TrueGraph)
}

/// Minimum degree and minimum common-neighbor count over edges, reported
/// against the threshold s(n-1)/3.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NeighborStats {
    pub min_degree: usize,
    /// None when the graph has no edges (the minimum is vacuous / +inf).
    pub min_common_over_edges: Option<usize>,
    pub degree_threshold: f64,
    pub common_threshold: f64,
}

impl NeighborStats {
    pub fn degree_exceeds_threshold(&self) -> bool {
        self.min_degree as f64 > self.degree_threshold
    }

    pub fn common_exceeds_threshold(&self) -> bool {
        match self.min_common_over_edges {
            Some(c) => c as f64 > self.common_threshold,
            None => true,
        }
    }
}

pub fn neighbor_stats(g: &Graph, s_estimate: f64) -> Result<NeighborStats> {
    if !(0.0..=1.0).contains(&s_estimate) {
        return Err(Error::parameter(format!(
            "s estimate must be in [0,1], got {s_estimate}"
        )));
    }
    let threshold = s_estimate * (g.n().saturating_sub(1)) as f64 / 3.0;
    let min_degree = (0..g.n() as u32).map(|v| g.degree(v)).min().unwrap_or(0);
    let edge_list: Vec<(u32, u32)> = g.edges().collect();
    let min_common = edge_list
        .par_iter()
        .map(|&(u, v)| g.common_neighbor_count(u, v))
        .min();
    Ok(NeighborStats {
        min_degree,
        min_common_over_edges: min_common,
        degree_threshold: threshold,
        common_threshold: threshold,
    })
}

/// |N(u) ∩ N(v)| with index checks.
pub fn common_neighbors(g: &Graph, u: usize, v: usize) -> Result<usize> {
    g.check_vertex(u)?;
    g.check_vertex(v)?;
    if u == v {
        return Err(Error::parameter("common_neighbors needs two distinct vertices"));
    }
    Ok(g.common_neighbor_count(u as u32, v as u32))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{sample_points, PointSample, SpaceSpec};
    use rand::Rng;

    fn complete(n: usize) -> Graph {
        let mut edges = Vec::new();
        for u in 0..n as u32 {
            for v in (u + 1)..n as u32 {
                edges.push((u, v));
            }
        }
        Graph::from_edges(n, edges, GraphLabel::External).unwrap()
    }

    fn cycle(n: usize) -> Graph {
        let edges = (0..n as u32).map(|u| (u, (u + 1) % n as u32));
        Graph::from_edges(n, edges, GraphLabel::External).unwrap()
    }

    #[test]
    fn line_points_give_path_edges() {
        // pairwise distances 0.5, 0.7, 1.2
        let pts = PointSample::euclidean_points(1, vec![0.0, 0.5, 1.2]);
        let g = build_r_graph(&pts, 0.6).unwrap();
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1)]);
        assert_eq!(g.label(), GraphLabel::TrueGraph);
        // the edge predicate is a closed ball: 0.7 <= 0.7 brings (1,2) in
        let g = build_r_graph(&pts, 0.7).unwrap();
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1), (1, 2)]);
    }

    #[test]
    fn radius_above_diameter_gives_complete_graph() {
        let s = SpaceSpec::unit_square();
        let sample = sample_points(&s, 30, 9).unwrap();
        let g = build_r_graph(&sample, 2.0).unwrap();
        assert_eq!(g.edge_count(), 30 * 29 / 2);
    }

    #[test]
    fn equally_spaced_circle_is_a_cycle() {
        let coords: Vec<f64> = (0..8).map(|i| i as f64 * 0.125).collect();
        let sample = PointSample::from_parts(SpaceSpec::circle(1.0), 1, coords, 0).unwrap();
        let g = build_r_graph(&sample, 0.125).unwrap();
        assert_eq!(g.edge_count(), 8);
        for v in 0..8 {
            assert_eq!(g.degree(v), 2, "vertex {v}");
        }
    }

    #[test]
    fn indexed_build_matches_all_pairs_scan() {
        let specs = [
            SpaceSpec::circle(1.0),
            SpaceSpec::unit_square(),
            SpaceSpec::hyperboloid(1.5),
        ];
        let mut rng = crate::rng::substream(7, 0x67, 0);
        for trial in 0..100 {
            let spec = &specs[trial % specs.len()];
            let n = 20 + rng.random_range(0..480);
            let r = rng.random_range(0.02..0.5);
            let sample = sample_points(spec, n, 5000 + trial as u64).unwrap();
            let fast = build_r_graph(&sample, r).unwrap();
            let slow = build_r_graph_all_pairs(&sample, r).unwrap();
            assert_eq!(fast, slow, "trial {trial} n={n} r={r}");
        }
    }

    #[test]
    fn edge_sets_monotone_in_radius() {
        let sample = sample_points(&SpaceSpec::circle(1.0), 200, 3).unwrap();
        let g_small = build_r_graph(&sample, 0.02).unwrap();
        let g_big = build_r_graph(&sample, 0.05).unwrap();
        for (u, v) in g_small.edges() {
            assert!(g_big.has_edge(u, v));
        }
    }

    #[test]
    fn adjacency_is_symmetric_and_sorted() {
        let sample = sample_points(&SpaceSpec::unit_cube(), 300, 12).unwrap();
        let g = build_r_graph(&sample, 0.3).unwrap();
        g.validate().unwrap();
    }

    #[test]
    fn stats_on_complete_graph() {
        let g = complete(4);
        let st = neighbor_stats(&g, 0.0).unwrap();
        assert_eq!(st.min_degree, 3);
        assert_eq!(st.min_common_over_edges, Some(2));
        assert!(st.degree_exceeds_threshold());
    }

    #[test]
    fn stats_on_cycle() {
        let g = cycle(8);
        let st = neighbor_stats(&g, 0.5).unwrap();
        assert_eq!(st.min_degree, 2);
        assert_eq!(st.min_common_over_edges, Some(0));
        assert_eq!(st.degree_threshold, 0.5 * 7.0 / 3.0);
    }

    #[test]
    fn stats_on_edgeless_graph() {
        let g = Graph::empty(5, GraphLabel::External);
        let st = neighbor_stats(&g, 0.2).unwrap();
        assert_eq!(st.min_common_over_edges, None);
        assert!(st.common_exceeds_threshold());
    }

    #[test]
    fn common_neighbor_hand_counts() {
        let k3 = complete(3);
        assert_eq!(common_neighbors(&k3, 0, 1).unwrap(), 1);
        let path = Graph::from_edges(3, [(0u32, 1u32), (1, 2)], GraphLabel::External).unwrap();
        assert_eq!(common_neighbors(&path, 0, 2).unwrap(), 1);
        assert!(matches!(
            common_neighbors(&path, 0, 7),
            Err(Error::Index { .. })
        ));
    }

    #[test]
    fn common_neighbors_match_brute_force() {
        let mut rng = crate::rng::substream(21, 0xbeef, 0);
        for trial in 0..50 {
            let n = rng.random_range(2..=64usize);
            let p = rng.random_range(0.05..0.5);
            let mut edges = Vec::new();
            for u in 0..n as u32 {
                for v in (u + 1)..n as u32 {
                    if rng.random::<f64>() < p {
                        edges.push((u, v));
                    }
                }
            }
            let g = Graph::from_edges(n, edges, GraphLabel::External).unwrap();
            for _ in 0..20 {
                let u = rng.random_range(0..n);
                let v = rng.random_range(0..n);
                if u == v {
                    continue;
                }
                let brute = (0..n)
                    .filter(|&w| w != u && w != v)
                    .filter(|&w| g.has_edge(u as u32, w as u32) && g.has_edge(v as u32, w as u32))
                    .count();
                assert_eq!(common_neighbors(&g, u, v).unwrap(), brute, "trial {trial}");
            }
        }
    }

    #[test]
    fn edge_list_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.edges");
        let sample = sample_points(&SpaceSpec::circle(1.0), 100, 77).unwrap();
        let g = build_r_graph(&sample, 0.05).unwrap();
        g.write_edge_list(&path).unwrap();
        let back = Graph::read_edge_list(&path, GraphLabel::TrueGraph).unwrap();
        assert_eq!(g, back);
    }

    #[test]
    fn edge_list_header_preserves_isolated_vertices() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("iso.edges");
        let g = Graph::from_edges(10, [(0u32, 1u32)], GraphLabel::External).unwrap();
        g.write_edge_list(&path).unwrap();
        let back = Graph::read_edge_list(&path, GraphLabel::External).unwrap();
        assert_eq!(back.n(), 10);
        assert_eq!(back.edge_count(), 1);
    }

    #[test]
    fn edge_list_errors_carry_line_numbers() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.edges");
        std::fs::write(&path, "0 1\n1 x\n").unwrap();
        match Graph::read_edge_list(&path, GraphLabel::External) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        std::fs::write(&path, "0 1\n2 2\n").unwrap();
        assert!(Graph::read_edge_list(&path, GraphLabel::External).is_err());
        std::fs::write(&path, "0 1 2\n").unwrap();
        assert!(Graph::read_edge_list(&path, GraphLabel::External).is_err());
    }
}
