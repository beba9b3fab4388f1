//! Shortest-path hop metrics and every comparison statistic the experiments
//! report: 2-approximation rate, RMS / normalized L2 error over the
//! good-index set, and the sup-norm gap against the hidden space metric.

use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::PointSample;
use crate::graph::Graph;

/// Sentinel hop count for disconnected pairs. Never produced by arithmetic;
/// finite hop counts saturate one below it.
pub const INF_HOPS: u16 = u16::MAX;
const MAX_FINITE_HOPS: u16 = u16::MAX - 1;

/// Symmetric n x n matrix of shortest-path hop counts with a zero diagonal
/// and `INF_HOPS` marking disconnected pairs. Stored as 16-bit saturating
/// integers so co-authorship-scale networks stay in memory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HopMatrix {
    n: usize,
    data: Vec<u16>,
}

impl HopMatrix {
    pub fn from_data(n: usize, data: Vec<u16>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::parameter(format!(
                "hop matrix data length {} != {n}^2",
                data.len()
            )));
        }
        let m = HopMatrix { n, data };
        for i in 0..n {
            if m.get(i, i) != 0 {
                return Err(Error::parameter(format!("nonzero diagonal at {i}")));
            }
            for j in (i + 1)..n {
                if m.get(i, j) != m.get(j, i) {
                    return Err(Error::parameter(format!("asymmetric at ({i},{j})")));
                }
            }
        }
        Ok(m)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u16 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[u16] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    /// Row-major CSV dump with the literal `inf` for disconnected pairs.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut out = String::new();
        for i in 0..self.n {
            for j in 0..self.n {
                if j > 0 {
                    out.push(',');
                }
                let h = self.get(i, j);
                if h == INF_HOPS {
                    out.push_str("inf");
                } else {
                    let _ = write!(out, "{h}");
                }
            }
            out.push('\n');
        }
        std::fs::write(path, out).map_err(|e| Error::io(path, e))
    }

    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut data = Vec::new();
        let mut n = 0usize;
        for (idx, line) in text.lines().enumerate() {
            let lineno = idx + 1;
            if line.trim().is_empty() {
                continue;
            }
            let mut width = 0usize;
            for token in line.split(',') {
                let token = token.trim();
                let h = if token == "inf" {
                    INF_HOPS
                } else {
                    token.parse::<u16>().map_err(|_| {
                        Error::parse(path, lineno, format!("bad hop count `{token}`"))
                    })?
                };
                data.push(h);
                width += 1;
            }
            if n == 0 {
                n = width;
            } else if width != n {
                return Err(Error::parse(path, lineno, "ragged hop matrix row".to_string()));
            }
        }
        HopMatrix::from_data(n, data)
    }
}

fn bfs_row(g: &Graph, source: u32, row: &mut [u16], queue: &mut Vec<u32>) {
    row.fill(INF_HOPS);
    queue.clear();
    row[source as usize] = 0;
    queue.push(source);
    let mut head = 0usize;
    while head < queue.len() {
        let u = queue[head];
        head += 1;
        let du = row[u as usize];
        let dv = if du >= MAX_FINITE_HOPS { MAX_FINITE_HOPS } else { du + 1 };
        for &v in g.neighbors(u) {
            if row[v as usize] == INF_HOPS {
                row[v as usize] = dv;
                queue.push(v);
            }
        }
    }
}

/// All-pairs hop counts by one breadth-first search per source, parallel
/// over sources.
pub fn hop_distances(g: &Graph) -> HopMatrix {
    let n = g.n();
    let mut data = vec![0u16; n * n];
    data.par_chunks_mut(n.max(1)).enumerate().for_each(|(s, row)| {
        let mut queue = Vec::with_capacity(n);
        bfs_row(g, s as u32, row, &mut queue);
    });
    HopMatrix { n, data }
}

/// Hop counts for an explicit pair list only (large-n mode). One BFS per
/// distinct source vertex in the list.
pub fn hop_distances_pairs(g: &Graph, pairs: &[(u32, u32)]) -> Result<Vec<u16>> {
    let n = g.n();
    for &(u, v) in pairs {
        if u as usize >= n || v as usize >= n {
            return Err(Error::Index { vertex: u.max(v) as usize, n });
        }
    }
    let mut order: Vec<u32> = (0..pairs.len() as u32).collect();
    order.sort_unstable_by_key(|&i| pairs[i as usize].0);
    let mut groups: Vec<(u32, &[u32])> = Vec::new();
    let mut start = 0usize;
    while start < order.len() {
        let src = pairs[order[start] as usize].0;
        let mut end = start + 1;
        while end < order.len() && pairs[order[end] as usize].0 == src {
            end += 1;
        }
        groups.push((src, &order[start..end]));
        start = end;
    }
    let filled: Vec<(u32, u16)> = groups
        .par_iter()
        .flat_map_iter(|&(src, idxs)| {
            let mut row = vec![0u16; n];
            let mut queue = Vec::with_capacity(n);
            bfs_row(g, src, &mut row, &mut queue);
            idxs.iter()
                .map(|&i| (i, row[pairs[i as usize].1 as usize]))
                .collect::<Vec<_>>()
                .into_iter()
        })
        .collect();
    let mut out = vec![0u16; pairs.len()];
    for (i, h) in filled {
        out[i as usize] = h;
    }
    Ok(out)
}

/// Comparison record for two hop metrics over the same vertex set.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricComparison {
    /// Fraction of pairs within a multiplicative factor 2, both-infinite
    /// pairs counting as good and mixed pairs as bad.
    pub r2approx: f64,
    /// RMS error over the good-index set; None when that set is empty.
    pub delta_rms: Option<f64>,
    /// RMS error normalized by the reference metric's RMS magnitude; None
    /// when undefined (empty good set or reference has no finite pair).
    pub delta_n: Option<f64>,
    /// |I_good|: pairs that are both finite or both infinite.
    pub good_index_count: u64,
    /// Pairs violating the 2-approximation relation, when collected.
    pub violating_pairs: Option<Vec<(u32, u32)>>,
}

/// Fixed header for the one-row CSV emitted by `evaluate`.
pub const METRIC_COMPARISON_CSV_HEADER: &str =
    "pairs,pairs_mode,r2approx,delta_rms,delta_n,good_index_count";

impl MetricComparison {
    pub fn csv_row(&self, pairs: u64, pairs_mode: &str) -> String {
        let fmt = |x: Option<f64>| x.map_or("nan".to_string(), |v| format!("{v}"));
        format!(
            "{pairs},{pairs_mode},{},{},{},{}",
            self.r2approx,
            fmt(self.delta_rms),
            fmt(self.delta_n),
            self.good_index_count
        )
    }
}

#[derive(Default, Clone, Copy)]
struct CompareAcc {
    pairs: u64,
    ok_2approx: u64,
    good: u64,
    diff_sq_sum: f64,
    ref_finite: u64,
    ref_sq_sum: f64,
}

impl CompareAcc {
    #[inline]
    fn take(&mut self, d: u16, d2: u16) {
        self.pairs += 1;
        let d_inf = d == INF_HOPS;
        let d2_inf = d2 == INF_HOPS;
        match (d_inf, d2_inf) {
            (true, true) => {
                // infinite on both sides: 2-approx relation holds, zero error
                self.ok_2approx += 1;
                self.good += 1;
            }
            (false, false) => {
                let a = d as u32;
                let b = d2 as u32;
                if 2 * b >= a && b <= 2 * a {
                    self.ok_2approx += 1;
                }
                self.good += 1;
                let diff = d as f64 - d2 as f64;
                self.diff_sq_sum += diff * diff;
            }
            _ => {}
        }
        if !d_inf {
            self.ref_finite += 1;
            self.ref_sq_sum += (d as f64) * (d as f64);
        }
    }

    fn merge(mut self, other: CompareAcc) -> CompareAcc {
        self.pairs += other.pairs;
        self.ok_2approx += other.ok_2approx;
        self.good += other.good;
        self.diff_sq_sum += other.diff_sq_sum;
        self.ref_finite += other.ref_finite;
        self.ref_sq_sum += other.ref_sq_sum;
        self
    }

    fn finish(self, violating: Option<Vec<(u32, u32)>>) -> MetricComparison {
        let delta_rms = if self.good > 0 {
            Some((self.diff_sq_sum / self.good as f64).sqrt())
        } else {
            None
        };
        let delta_n = match (delta_rms, self.ref_finite) {
            (Some(rms), f) if f > 0 => {
                let norm = (self.ref_sq_sum / f as f64).sqrt();
                if norm > 0.0 { Some(rms / norm) } else { None }
            }
            _ => None,
        };
        MetricComparison {
            r2approx: if self.pairs > 0 {
                self.ok_2approx as f64 / self.pairs as f64
            } else {
                0.0
            },
            delta_rms,
            delta_n,
            good_index_count: self.good,
            violating_pairs: violating,
        }
    }
}

fn check_same_n(d: &HopMatrix, d2: &HopMatrix) -> Result<usize> {
    if d.n() != d2.n() {
        return Err(Error::parameter(format!(
            "hop matrix size mismatch: {} vs {}",
            d.n(),
            d2.n()
        )));
    }
    if d.n() < 2 {
        return Err(Error::parameter("need at least 2 vertices".to_string()));
    }
    Ok(d.n())
}

/// Full comparison over all i < j pairs of two hop matrices; the first
/// argument is the reference metric the normalizer comes from.
pub fn compare_metrics(reference: &HopMatrix, other: &HopMatrix) -> Result<MetricComparison> {
    let n = check_same_n(reference, other)?;
    let acc = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut acc = CompareAcc::default();
            let row = reference.row(i);
            let row2 = other.row(i);
            for j in (i + 1)..n {
                acc.take(row[j], row2[j]);
            }
            acc
        })
        .reduce(CompareAcc::default, CompareAcc::merge);
    Ok(acc.finish(None))
}

/// Like `compare_metrics`, but also collects the pairs violating the
/// 2-approximation relation.
pub fn compare_metrics_with_violations(
    reference: &HopMatrix,
    other: &HopMatrix,
) -> Result<MetricComparison> {
    let n = check_same_n(reference, other)?;
    let mut acc = CompareAcc::default();
    let mut violating = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let before = acc.ok_2approx;
            acc.take(reference.get(i, j), other.get(i, j));
            let satisfied = acc.ok_2approx > before;
            if !satisfied {
                violating.push((i as u32, j as u32));
            }
        }
    }
    Ok(acc.finish(Some(violating)))
}

/// Comparison over an explicit pair list; entries must be aligned (the k-th
/// hop count of each side belongs to the same vertex pair).
pub fn compare_metric_pairs(reference: &[u16], other: &[u16]) -> Result<MetricComparison> {
    if reference.len() != other.len() {
        return Err(Error::parameter(format!(
            "pair list length mismatch: {} vs {}",
            reference.len(),
            other.len()
        )));
    }
    if reference.is_empty() {
        return Err(Error::parameter("empty pair list".to_string()));
    }
    let mut acc = CompareAcc::default();
    for (&d, &d2) in reference.iter().zip(other) {
        acc.take(d, d2);
    }
    Ok(acc.finish(None))
}

/// Fraction of pairs where `other` 2-approximates `reference`.
pub fn two_approx_rate(reference: &HopMatrix, other: &HopMatrix) -> Result<f64> {
    Ok(compare_metrics(reference, other)?.r2approx)
}

/// RMS and normalized-L2 error over the good-index set.
pub fn normalized_l2_error(reference: &HopMatrix, other: &HopMatrix) -> Result<MetricComparison> {
    compare_metrics(reference, other)
}

/// Packed upper-triangular matrix of space distances over a sample.
#[derive(Debug, Clone)]
pub struct DistMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DistMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    fn index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < j);
        i * self.n - i * (i + 1) / 2 + (j - i - 1)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        match i.cmp(&j) {
            std::cmp::Ordering::Less => self.data[self.index(i, j)],
            std::cmp::Ordering::Greater => self.data[self.index(j, i)],
            std::cmp::Ordering::Equal => 0.0,
        }
    }
}

/// All pairwise space distances of a sample.
pub fn space_distances(sample: &PointSample) -> DistMatrix {
    let n = sample.len();
    let mut data = vec![0.0f64; n * (n - 1) / 2];
    // row i owns the contiguous block of pairs (i, i+1..n)
    let mut slices: Vec<(usize, &mut [f64])> = Vec::with_capacity(n);
    let mut rest = data.as_mut_slice();
    for i in 0..n.saturating_sub(1) {
        let (head, tail) = rest.split_at_mut(n - 1 - i);
        slices.push((i, head));
        rest = tail;
    }
    slices.into_par_iter().for_each(|(i, row)| {
        for (off, slot) in row.iter_mut().enumerate() {
            *slot = sample.distance(i, i + 1 + off);
        }
    });
    DistMatrix { n, data }
}

/// Worst-case gap between the scaled hop metric and the space metric.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupDiff {
    /// max over connected pairs of |r * hops(i,j) - d_X(i,j)|
    pub sup: f64,
    /// pairs excluded because they are disconnected in the graph
    pub disconnected_pairs: u64,
}

pub fn metric_sup_diff(d_true: &HopMatrix, r: f64, d_x: &DistMatrix) -> Result<SupDiff> {
    if d_true.n() != d_x.n() {
        return Err(Error::parameter(format!(
            "size mismatch: hops {} vs distances {}",
            d_true.n(),
            d_x.n()
        )));
    }
    if !(r > 0.0) {
        return Err(Error::parameter(format!("radius must be positive, got {r}")));
    }
    let n = d_true.n();
    let (sup, excluded) = (0..n)
        .into_par_iter()
        .map(|i| {
            let row = d_true.row(i);
            let mut local_sup = 0.0f64;
            let mut local_excluded = 0u64;
            for j in (i + 1)..n {
                let h = row[j];
                if h == INF_HOPS {
                    local_excluded += 1;
                } else {
                    let diff = (r * h as f64 - d_x.get(i, j)).abs();
                    local_sup = local_sup.max(diff);
                }
            }
            (local_sup, local_excluded)
        })
        .reduce(|| (0.0, 0), |a, b| (a.0.max(b.0), a.1 + b.1));
    Ok(SupDiff { sup, disconnected_pairs: excluded })
}
