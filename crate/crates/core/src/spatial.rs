//! Fixed-radius neighbor search over point samples.
//!
//! Two small structures cover every space kind: a uniform grid over the
//! ambient coordinates (any dimension, Euclidean/chordal metrics) and a
//! sorted-angle index for the circle, whose metric wraps around.

use crate::geometry::{PointSample, SpaceKind};

/// Sorted positions on a circle of circumference `c`. Range counting and
/// nearest-neighbor queries are binary searches, so estimators stay cheap
/// even at n = 1e5.
pub(crate) struct CircleIndex {
    c: f64,
    sorted: Vec<f64>,
    ids: Vec<u32>,
}

impl CircleIndex {
    pub fn new(c: f64, positions: Vec<f64>) -> Self {
        let mut order: Vec<u32> = (0..positions.len() as u32).collect();
        order.sort_by(|&a, &b| {
            positions[a as usize]
                .partial_cmp(&positions[b as usize])
                .unwrap()
        });
        let sorted = order.iter().map(|&i| positions[i as usize]).collect();
        CircleIndex { c, sorted, ids: order }
    }

    pub fn from_sample(sample: &PointSample) -> Option<Self> {
        match sample.space().kind {
            SpaceKind::Circle { circumference } => Some(Self::new(
                circumference,
                sample.iter_points().map(|p| p[0]).collect(),
            )),
            _ => None,
        }
    }

    fn rank(&self, t: f64) -> usize {
        self.sorted.partition_point(|&x| x < t)
    }

    fn count_in(&self, a: f64, b: f64) -> usize {
        // closed interval [a, b] inside [0, c)
        self.sorted.partition_point(|&x| x <= b) - self.rank(a)
    }

    /// Number of stored positions within arc distance <= r of `t`.
    pub fn count_within(&self, t: f64, r: f64) -> usize {
        if 2.0 * r >= self.c {
            return self.sorted.len();
        }
        let lo = (t - r).rem_euclid(self.c);
        let hi = (t + r).rem_euclid(self.c);
        if lo <= hi {
            self.count_in(lo, hi)
        } else {
            self.count_in(0.0, hi) + self.count_in(lo, self.c)
        }
    }

    /// Visit the original index of every stored position within arc distance
    /// <= r of `t`.
    pub fn for_each_within(&self, t: f64, r: f64, mut visit: impl FnMut(u32)) {
        if 2.0 * r >= self.c {
            for &id in &self.ids {
                visit(id);
            }
            return;
        }
        let mut visit_range = |a: f64, b: f64| {
            let i = self.rank(a);
            let j = self.sorted.partition_point(|&x| x <= b);
            for k in i..j {
                visit(self.ids[k]);
            }
        };
        let lo = (t - r).rem_euclid(self.c);
        let hi = (t + r).rem_euclid(self.c);
        if lo <= hi {
            visit_range(lo, hi);
        } else {
            visit_range(0.0, hi);
            visit_range(lo, self.c);
        }
    }

    /// Arc distance from `t` to the nearest stored position.
    pub fn nearest_dist(&self, t: f64) -> f64 {
        let n = self.sorted.len();
        debug_assert!(n > 0);
        let i = self.rank(t);
        let right = self.sorted[i % n];
        let left = self.sorted[(i + n - 1) % n];
        arc(self.c, t, right).min(arc(self.c, t, left))
    }

    /// Arc distance from the point at sorted rank `i` to its k-th nearest
    /// other stored position (k >= 1).
    pub fn kth_neighbor_dist(&self, i: usize, k: usize) -> f64 {
        let n = self.sorted.len();
        debug_assert!(k < n);
        let t = self.sorted[i];
        let (mut l, mut r) = (1usize, 1usize);
        let mut kth = 0.0;
        for _ in 0..k {
            let dl = arc(self.c, t, self.sorted[(i + n - l) % n]);
            let dr = arc(self.c, t, self.sorted[(i + r) % n]);
            if dl <= dr {
                kth = dl;
                l += 1;
            } else {
                kth = dr;
                r += 1;
            }
        }
        kth
    }
}

fn arc(c: f64, a: f64, b: f64) -> f64 {
    let d = (a - b).abs() % c;
    d.min(c - d)
}

/// Uniform bucket grid over ambient coordinates. Cells are hypercubes of a
/// fixed width; queries scan the block of cells that can intersect the ball.
pub(crate) struct GridIndex {
    dim: usize,
    cell: f64,
    mins: Vec<f64>,
    shape: Vec<usize>,
    strides: Vec<usize>,
    starts: Vec<u32>,
    items: Vec<u32>,
}

impl GridIndex {
    /// Build with the given cell width (usually the query radius).
    pub fn build(sample: &PointSample, cell: f64) -> Self {
        let n = sample.len();
        let dim = sample.dim();
        let mut mins = vec![f64::INFINITY; dim];
        let mut maxs = vec![f64::NEG_INFINITY; dim];
        for p in sample.iter_points() {
            for d in 0..dim {
                mins[d] = mins[d].min(p[d]);
                maxs[d] = maxs[d].max(p[d]);
            }
        }
        if n == 0 {
            mins.iter_mut().for_each(|m| *m = 0.0);
            maxs.iter_mut().for_each(|m| *m = 0.0);
        }
        let mut shape = Vec::with_capacity(dim);
        for d in 0..dim {
            let extent = (maxs[d] - mins[d]).max(0.0);
            let cells = if cell > 0.0 { (extent / cell).floor() as usize + 1 } else { 1 };
            shape.push(cells.max(1));
        }
        let mut strides = vec![0usize; dim];
        let mut acc = 1usize;
        for d in 0..dim {
            strides[d] = acc;
            acc = acc.saturating_mul(shape[d]);
        }
        let ncells = acc.max(1);

        let cell_of = |p: &[f64]| -> usize {
            let mut id = 0usize;
            for d in 0..dim {
                let c = if cell > 0.0 {
                    (((p[d] - mins[d]) / cell).floor() as isize).max(0) as usize
                } else {
                    0
                };
                id += c.min(shape[d] - 1) * strides[d];
            }
            id
        };

        let mut starts = vec![0u32; ncells + 1];
        for p in sample.iter_points() {
            starts[cell_of(p) + 1] += 1;
        }
        for i in 0..ncells {
            starts[i + 1] += starts[i];
        }
        let mut cursor = starts.clone();
        let mut items = vec![0u32; n];
        for (i, p) in sample.iter_points().enumerate() {
            let c = cell_of(p);
            items[cursor[c] as usize] = i as u32;
            cursor[c] += 1;
        }

        GridIndex { dim, cell, mins, shape, strides, starts, items }
    }

    /// Build with a cell width targeting roughly `per_cell` points per cell
    /// (used when there is no natural query radius).
    pub fn build_auto(sample: &PointSample, per_cell: f64) -> Self {
        let n = sample.len().max(1);
        let dim = sample.dim().max(1);
        let mut mins = vec![f64::INFINITY; dim];
        let mut maxs = vec![f64::NEG_INFINITY; dim];
        for p in sample.iter_points() {
            for d in 0..dim {
                mins[d] = mins[d].min(p[d]);
                maxs[d] = maxs[d].max(p[d]);
            }
        }
        let mut volume = 1.0f64;
        let mut max_extent = 0.0f64;
        for d in 0..dim {
            let e = (maxs[d] - mins[d]).max(0.0);
            max_extent = max_extent.max(e);
            if e > 0.0 {
                volume *= e;
            }
        }
        let cell = if max_extent == 0.0 {
            1.0
        } else {
            (volume * per_cell / n as f64)
                .powf(1.0 / dim as f64)
                .min(max_extent)
                .max(max_extent * 1e-9)
        };
        Self::build(sample, cell)
    }

    fn cell_coords_of(&self, p: &[f64]) -> Vec<isize> {
        (0..self.dim)
            .map(|d| {
                let c = ((p[d] - self.mins[d]) / self.cell).floor() as isize;
                c.clamp(0, self.shape[d] as isize - 1)
            })
            .collect()
    }

    fn cell_items(&self, id: usize) -> &[u32] {
        &self.items[self.starts[id] as usize..self.starts[id + 1] as usize]
    }

    /// Visit every stored index whose cell lies within `rings` cells
    /// (Chebyshev) of the cell containing `p`.
    fn for_each_candidate(&self, p: &[f64], rings: usize, mut visit: impl FnMut(u32)) {
        let center = self.cell_coords_of(p);
        let r = rings as isize;
        let mut lo = Vec::with_capacity(self.dim);
        let mut hi = Vec::with_capacity(self.dim);
        for d in 0..self.dim {
            lo.push((center[d] - r).max(0));
            hi.push((center[d] + r).min(self.shape[d] as isize - 1));
        }
        let mut cursor = lo.clone();
        loop {
            let mut id = 0usize;
            for d in 0..self.dim {
                id += cursor[d] as usize * self.strides[d];
            }
            for &j in self.cell_items(id) {
                visit(j);
            }
            let mut d = 0;
            loop {
                if d == self.dim {
                    return;
                }
                cursor[d] += 1;
                if cursor[d] <= hi[d] {
                    break;
                }
                cursor[d] = lo[d];
                d += 1;
            }
        }
    }

    /// Visit `(index, distance)` for every stored point within metric
    /// distance <= r of `p`. `dist_to` must compute the metric the caller
    /// cares about; it is invoked on grid candidates only.
    pub fn for_each_within(
        &self,
        p: &[f64],
        r: f64,
        mut dist_to: impl FnMut(u32) -> f64,
        mut visit: impl FnMut(u32, f64),
    ) {
        let rings = if self.cell > 0.0 { (r / self.cell).ceil() as usize } else { 1 };
        self.for_each_candidate(p, rings.max(1), |j| {
            let d = dist_to(j);
            if d <= r {
                visit(j, d);
            }
        });
    }

    fn max_rings(&self) -> usize {
        self.shape.iter().copied().max().unwrap_or(1)
    }

    /// Distance to the nearest stored point (excluding `skip`), found by
    /// expanding the search block. Points outside a block of `ring` cells are
    /// at distance >= ring * cell, which bounds the stop condition.
    pub fn nearest_dist(
        &self,
        p: &[f64],
        skip: Option<u32>,
        mut dist_to: impl FnMut(u32) -> f64,
    ) -> f64 {
        let mut best = f64::INFINITY;
        let max_rings = self.max_rings();
        let mut ring = 0usize;
        loop {
            self.for_each_candidate(p, ring, |j| {
                if Some(j) == skip {
                    return;
                }
                let d = dist_to(j);
                if d < best {
                    best = d;
                }
            });
            if best <= ring as f64 * self.cell || ring >= max_rings {
                return best;
            }
            ring += 1;
        }
    }

    /// Distance from stored point `i` at coordinates `p` to its k-th nearest
    /// other stored point (k >= 1). Exact via expanding block search.
    pub fn kth_neighbor_dist(
        &self,
        p: &[f64],
        i: u32,
        k: usize,
        mut dist_to: impl FnMut(u32) -> f64,
    ) -> f64 {
        let mut heap: std::collections::BinaryHeap<OrderedF64> =
            std::collections::BinaryHeap::with_capacity(k + 1);
        let max_rings = self.max_rings();
        let mut ring = 0usize;
        loop {
            // Each pass rescans the whole block, so the heap is rebuilt from
            // scratch to avoid double-counting points seen in earlier passes.
            heap.clear();
            self.for_each_candidate(p, ring, |j| {
                if j == i {
                    return;
                }
                heap.push(OrderedF64(dist_to(j)));
                if heap.len() > k {
                    heap.pop();
                }
            });
            let kth = heap.peek().filter(|_| heap.len() == k).map(|x| x.0);
            if kth.is_some_and(|d| d <= ring as f64 * self.cell) || ring >= max_rings {
                return kth.unwrap_or(f64::INFINITY);
            }
            ring += 1;
        }
    }
}

#[derive(PartialEq, Clone, Copy)]
struct OrderedF64(f64);
impl Eq for OrderedF64 {}
impl PartialOrd for OrderedF64 {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for OrderedF64 {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.partial_cmp(&other.0).unwrap_or(std::cmp::Ordering::Equal)
    }
}
