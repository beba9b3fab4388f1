//! Hidden metric-measure spaces: definitions, i.i.d. samplers, and the
//! measure-side estimators (ball-mass lower bound, doubling constant,
//! radius suggestion, epsilon-sample check) consumed elsewhere.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{self, tags};
use crate::spatial::{CircleIndex, GridIndex};

/// Tolerance for "this point lies on the space" checks.
pub const ON_SPACE_TOLERANCE: f64 = 1e-9;

/// Which compact space a sample is drawn from, plus its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SpaceKind {
    /// Circle of the given circumference; points are arc positions in
    /// [0, circumference) and distance is the wrap-around arc length.
    Circle { circumference: f64 },
    /// Uniform measure on [0,1]^2 with Euclidean distance.
    UnitSquare,
    /// Uniform measure on [0,1]^3 with Euclidean distance.
    UnitCube,
    /// Surface x^2 + y^2 - z^2 = 1 truncated to |z| <= z_max, sampled
    /// proportionally to surface area; distance is chordal (ambient
    /// Euclidean).
    Hyperboloid { z_max: f64 },
    /// Unit sphere with density proportional to 1 + alpha * cos(latitude);
    /// alpha = 0 is the uniform measure. Distance is chordal.
    SphereNonuniform { alpha: f64 },
    /// Finite point set read from a text file; the measure is uniform over
    /// the listed points and distance is Euclidean.
    PointcloudFile { path: PathBuf },
}

/// A space kind together with an optional externally-known doubling constant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceSpec {
    #[serde(flatten)]
    pub kind: SpaceKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub known_doubling: Option<f64>,
}

impl From<SpaceKind> for SpaceSpec {
    fn from(kind: SpaceKind) -> Self {
        SpaceSpec { kind, known_doubling: None }
    }
}

impl SpaceSpec {
    pub fn circle(circumference: f64) -> Self {
        SpaceKind::Circle { circumference }.into()
    }

    pub fn unit_square() -> Self {
        SpaceKind::UnitSquare.into()
    }

    pub fn unit_cube() -> Self {
        SpaceKind::UnitCube.into()
    }

    pub fn hyperboloid(z_max: f64) -> Self {
        SpaceKind::Hyperboloid { z_max }.into()
    }

    pub fn sphere_nonuniform(alpha: f64) -> Self {
        SpaceKind::SphereNonuniform { alpha }.into()
    }

    pub fn pointcloud(path: impl Into<PathBuf>) -> Self {
        SpaceKind::PointcloudFile { path: path.into() }.into()
    }

    pub fn with_known_doubling(mut self, l: f64) -> Self {
        self.known_doubling = Some(l);
        self
    }

    /// Ambient coordinate dimension, when it is fixed by the kind.
    pub fn dim(&self) -> Option<usize> {
        match self.kind {
            SpaceKind::Circle { .. } => Some(1),
            SpaceKind::UnitSquare => Some(2),
            SpaceKind::UnitCube | SpaceKind::Hyperboloid { .. } | SpaceKind::SphereNonuniform { .. } => {
                Some(3)
            }
            SpaceKind::PointcloudFile { .. } => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match &self.kind {
            SpaceKind::Circle { circumference } => {
                if !(*circumference > 0.0) {
                    return Err(Error::parameter(format!(
                        "circle circumference must be positive, got {circumference}"
                    )));
                }
            }
            SpaceKind::Hyperboloid { z_max } => {
                if !(*z_max > 0.0) {
                    return Err(Error::parameter(format!(
                        "hyperboloid z_max must be positive, got {z_max}"
                    )));
                }
            }
            SpaceKind::SphereNonuniform { alpha } => {
                if !(*alpha >= 0.0) {
                    return Err(Error::parameter(format!(
                        "sphere density skew alpha must be >= 0, got {alpha}"
                    )));
                }
            }
            SpaceKind::UnitSquare | SpaceKind::UnitCube | SpaceKind::PointcloudFile { .. } => {}
        }
        if let Some(l) = self.known_doubling {
            if !(l >= 1.0) {
                return Err(Error::parameter(format!(
                    "known doubling constant must be >= 1, got {l}"
                )));
            }
        }
        Ok(())
    }

    /// Distance between two points assumed to lie on the space. For the
    /// circle this is the wrap-around arc length; everywhere else it is the
    /// ambient Euclidean distance (chordal on curved surfaces).
    #[inline]
    pub fn distance(&self, a: &[f64], b: &[f64]) -> f64 {
        match self.kind {
            SpaceKind::Circle { circumference } => {
                let d = (a[0] - b[0]).abs() % circumference;
                d.min(circumference - d)
            }
            _ => euclidean(a, b),
        }
    }

    /// Check that `p` lies on the space, to `ON_SPACE_TOLERANCE`.
    pub fn validate_point(&self, p: &[f64]) -> Result<()> {
        let tol = ON_SPACE_TOLERANCE;
        let fail = |msg: String| Err(Error::Domain(msg));
        match &self.kind {
            SpaceKind::Circle { circumference } => {
                if p.len() != 1 {
                    return fail(format!("circle points are 1-d, got {}-d", p.len()));
                }
                if p[0] < -tol || p[0] >= circumference + tol {
                    return fail(format!("arc position {} outside [0, {circumference})", p[0]));
                }
            }
            SpaceKind::UnitSquare | SpaceKind::UnitCube => {
                let d = if self.kind == SpaceKind::UnitSquare { 2 } else { 3 };
                if p.len() != d {
                    return fail(format!("expected {d}-d point, got {}-d", p.len()));
                }
                for &x in p {
                    if x < -tol || x > 1.0 + tol {
                        return fail(format!("coordinate {x} outside [0, 1]"));
                    }
                }
            }
            SpaceKind::Hyperboloid { z_max } => {
                if p.len() != 3 {
                    return fail(format!("hyperboloid points are 3-d, got {}-d", p.len()));
                }
                let residual = p[0] * p[0] + p[1] * p[1] - p[2] * p[2] - 1.0;
                if residual.abs() > tol {
                    return fail(format!("x^2+y^2-z^2-1 = {residual} exceeds tolerance"));
                }
                if p[2].abs() > z_max + tol {
                    return fail(format!("|z| = {} exceeds z_max = {z_max}", p[2].abs()));
                }
            }
            SpaceKind::SphereNonuniform { .. } => {
                if p.len() != 3 {
                    return fail(format!("sphere points are 3-d, got {}-d", p.len()));
                }
                let residual = p[0] * p[0] + p[1] * p[1] + p[2] * p[2] - 1.0;
                if residual.abs() > tol {
                    return fail(format!("x^2+y^2+z^2-1 = {residual} exceeds tolerance"));
                }
            }
            SpaceKind::PointcloudFile { .. } => {
                if p.is_empty() {
                    return fail("point has no coordinates".to_string());
                }
            }
        }
        Ok(())
    }

    fn kind_name(&self) -> &'static str {
        match self.kind {
            SpaceKind::Circle { .. } => "circle",
            SpaceKind::UnitSquare => "unit-square",
            SpaceKind::UnitCube => "unit-cube",
            SpaceKind::Hyperboloid { .. } => "hyperboloid",
            SpaceKind::SphereNonuniform { .. } => "sphere-nonuniform",
            SpaceKind::PointcloudFile { .. } => "pointcloud-file",
        }
    }

    /// Key/value lines describing the space in comment headers (point files
    /// and sweep reports).
    pub(crate) fn meta_pairs(&self) -> Vec<(&'static str, String)> {
        let mut out = vec![("space", self.kind_name().to_string())];
        match &self.kind {
            SpaceKind::Circle { circumference } => out.push(("circumference", format!("{circumference}"))),
            SpaceKind::Hyperboloid { z_max } => out.push(("z_max", format!("{z_max}"))),
            SpaceKind::SphereNonuniform { alpha } => out.push(("alpha", format!("{alpha}"))),
            _ => {}
        }
        if let Some(l) = self.known_doubling {
            out.push(("known_doubling", format!("{l}")));
        }
        out
    }
}

/// Distance between two points of a space, with domain checks.
pub fn space_distance(space: &SpaceSpec, a: &[f64], b: &[f64]) -> Result<f64> {
    space.validate_point(a)?;
    space.validate_point(b)?;
    if a.len() != b.len() {
        return Err(Error::Domain(format!(
            "dimension mismatch: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    Ok(space.distance(a, b))
}

#[inline]
fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// n points on a space, stored as a flat row-major coordinate array.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSample {
    space: SpaceSpec,
    seed: u64,
    dim: usize,
    coords: Vec<f64>,
}

impl PointSample {
    /// Assemble a sample from explicit coordinates, validating each point
    /// against the space.
    pub fn from_parts(space: SpaceSpec, dim: usize, coords: Vec<f64>, seed: u64) -> Result<Self> {
        space.validate()?;
        if dim == 0 || !coords.len().is_multiple_of(dim) {
            return Err(Error::parameter(format!(
                "coordinate array of length {} is not a multiple of dim {dim}",
                coords.len()
            )));
        }
        if let Some(d) = space.dim() {
            if d != dim {
                return Err(Error::parameter(format!(
                    "space expects {d}-d points, got dim {dim}"
                )));
            }
        }
        for p in coords.chunks_exact(dim) {
            space.validate_point(p)?;
        }
        Ok(PointSample { space, seed, dim, coords })
    }

    /// An in-memory Euclidean point set (no backing file).
    pub fn euclidean_points(dim: usize, coords: Vec<f64>) -> Self {
        PointSample {
            space: SpaceSpec::pointcloud(PathBuf::new()),
            seed: 0,
            dim,
            coords,
        }
    }

    /// Load a point cloud file verbatim, one vertex per line.
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let (dim, coords, header) = parse_points_text(path)?;
        let space = space_from_header(&header, path)?;
        let seed = header
            .get("seed")
            .and_then(|s| s.parse::<u64>().ok())
            .unwrap_or(0);
        Ok(PointSample { space, seed, dim, coords })
    }

    pub fn space(&self) -> &SpaceSpec {
        &self.space
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter_points(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    /// Space distance between stored points i and j.
    #[inline]
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.space.distance(self.point(i), self.point(j))
    }

    /// Write the sample as a point cloud file. A comment header records the
    /// space so downstream commands can rebuild the right metric; readers
    /// that ignore comments still get a plain Euclidean cloud.
    pub fn write_points_file(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut out = String::new();
        for (key, value) in self.space.meta_pairs() {
            let _ = writeln!(out, "# {key}: {value}");
        }
        let _ = writeln!(out, "# seed: {}", self.seed);
        let _ = writeln!(out, "# n: {}", self.len());
        for p in self.iter_points() {
            for (d, x) in p.iter().enumerate() {
                if d > 0 {
                    out.push(' ');
                }
                let _ = write!(out, "{x}");
            }
            out.push('\n');
        }
        std::fs::write(path, out).map_err(|e| Error::io(path, e))
    }
}

pub(crate) fn space_from_header(header: &BTreeMap<String, String>, path: &Path) -> Result<SpaceSpec> {
    let parse_f64 = |key: &str| -> Result<f64> {
        header
            .get(key)
            .ok_or_else(|| Error::parameter(format!("points header missing `{key}`")))?
            .parse::<f64>()
            .map_err(|_| Error::parameter(format!("points header `{key}` is not a number")))
    };
    let mut spec: SpaceSpec = match header.get("space").map(String::as_str) {
        Some("circle") => SpaceSpec::circle(parse_f64("circumference")?),
        Some("unit-square") => SpaceSpec::unit_square(),
        Some("unit-cube") => SpaceSpec::unit_cube(),
        Some("hyperboloid") => SpaceSpec::hyperboloid(parse_f64("z_max")?),
        Some("sphere-nonuniform") => SpaceSpec::sphere_nonuniform(parse_f64("alpha")?),
        Some("pointcloud-file") | None => SpaceSpec::pointcloud(path),
        Some(other) => {
            return Err(Error::parameter(format!(
                "unknown space kind `{other}` in points header"
            )))
        }
    };
    if header.contains_key("known_doubling") {
        spec.known_doubling = Some(parse_f64("known_doubling")?);
    }
    Ok(spec)
}

/// Parse a point cloud text file: one point per line, whitespace-separated
/// coordinates, `#` comments ignored. `# key: value` comments are collected.
fn parse_points_text(path: &Path) -> Result<(usize, Vec<f64>, BTreeMap<String, String>)> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut dim = 0usize;
    let mut coords = Vec::new();
    let mut header = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if let Some((k, v)) = comment.split_once(':') {
                header.insert(k.trim().to_string(), v.trim().to_string());
            }
            continue;
        }
        let mut row = Vec::new();
        for token in line.split_whitespace() {
            let x: f64 = token.parse().map_err(|_| {
                Error::parse(path, lineno, format!("`{token}` is not a decimal coordinate"))
            })?;
            row.push(x);
        }
        if dim == 0 {
            dim = row.len();
        } else if row.len() != dim {
            return Err(Error::parse(
                path,
                lineno,
                format!("expected {dim} coordinates, found {}", row.len()),
            ));
        }
        coords.extend_from_slice(&row);
    }
    if coords.is_empty() {
        return Err(Error::parse(path, 1, "point cloud file has no points".to_string()));
    }
    Ok((dim, coords, header))
}

/// Draw n points i.i.d. from the space's measure. Deterministic in `seed`.
pub fn sample_points(space: &SpaceSpec, n: usize, seed: u64) -> Result<PointSample> {
    space.validate()?;
    if n < 2 {
        return Err(Error::parameter(format!("need at least 2 points, got {n}")));
    }
    let mut rng = rng::substream(seed, tags::SAMPLE, 0);
    let (dim, coords) = match &space.kind {
        SpaceKind::Circle { circumference } => {
            let c = *circumference;
            (1, (0..n).map(|_| c * rng.random::<f64>()).collect())
        }
        SpaceKind::UnitSquare => (2, (0..2 * n).map(|_| rng.random::<f64>()).collect()),
        SpaceKind::UnitCube => (3, (0..3 * n).map(|_| rng.random::<f64>()).collect()),
        SpaceKind::Hyperboloid { z_max } => {
            let zm = *z_max;
            // surface-area density in z is sqrt(1 + 2 z^2); reject against
            // its maximum at |z| = z_max
            let envelope = (1.0 + 2.0 * zm * zm).sqrt();
            let mut coords = Vec::with_capacity(3 * n);
            for _ in 0..n {
                let z = loop {
                    let z = rng.random_range(-zm..zm);
                    let u: f64 = rng.random();
                    if u * envelope <= (1.0 + 2.0 * z * z).sqrt() {
                        break z;
                    }
                };
                let theta = rng.random_range(0.0..TAU);
                let rho = (1.0 + z * z).sqrt();
                coords.push(rho * theta.cos());
                coords.push(rho * theta.sin());
                coords.push(z);
            }
            (3, coords)
        }
        SpaceKind::SphereNonuniform { alpha } => {
            let a = *alpha;
            let mut coords = Vec::with_capacity(3 * n);
            for _ in 0..n {
                // uniform-on-sphere proposal (z uniform), reject against
                // 1 + alpha * cos(latitude) = 1 + alpha * sqrt(1 - z^2)
                let z: f64 = loop {
                    let z: f64 = rng.random_range(-1.0..1.0);
                    let u: f64 = rng.random();
                    if u * (1.0 + a) <= 1.0 + a * (1.0 - z * z).sqrt() {
                        break z;
                    }
                };
                let theta = rng.random_range(0.0..TAU);
                let rho = (1.0 - z * z).sqrt();
                coords.push(rho * theta.cos());
                coords.push(rho * theta.sin());
                coords.push(z);
            }
            (3, coords)
        }
        SpaceKind::PointcloudFile { path } => {
            let (dim, cloud, _) = parse_points_text(path)?;
            let m = cloud.len() / dim;
            let mut coords = Vec::with_capacity(n * dim);
            for _ in 0..n {
                let i = rng.random_range(0..m);
                coords.extend_from_slice(&cloud[i * dim..(i + 1) * dim]);
            }
            (dim, coords)
        }
    };
    Ok(PointSample { space: space.clone(), seed, dim, coords })
}

/// Empirical lower bound on the mass of radius-r/2 balls: the minimum over
/// sample points x of |V ∩ B(x, r/2)| / n (the center counts itself).
pub fn estimate_ball_mass_lower(sample: &PointSample, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::parameter(format!("radius must be positive, got {r}")));
    }
    let n = sample.len();
    let radius = r / 2.0;
    let min_count = if let Some(idx) = CircleIndex::from_sample(sample) {
        (0..n)
            .into_par_iter()
            .map(|i| idx.count_within(sample.point(i)[0], radius))
            .min()
            .unwrap_or(0)
    } else {
        let grid = GridIndex::build(sample, radius);
        (0..n)
            .into_par_iter()
            .map(|i| {
                let p = sample.point(i);
                let mut count = 0usize;
                grid.for_each_within(p, radius, |j| sample.distance(i, j as usize), |_, _| count += 1);
                count
            })
            .min()
            .unwrap_or(0)
    };
    Ok(min_count as f64 / n as f64)
}

/// Largest number of centers scanned by `estimate_doubling_constant`; above
/// this the centers are a seeded subsample of the vertices.
const MAX_DOUBLING_CENTERS: usize = 2048;

/// Empirical doubling constant: max over centers x and dyadic radii R with
/// 2R <= radius_cap of |V ∩ B(x, 2R)| / |V ∩ B(x, R)|.
pub fn estimate_doubling_constant(
    sample: &PointSample,
    radius_cap: f64,
    n_scales: usize,
) -> Result<f64> {
    if !(radius_cap > 0.0) {
        return Err(Error::parameter(format!(
            "radius cap must be positive, got {radius_cap}"
        )));
    }
    if n_scales == 0 {
        return Err(Error::parameter("need at least one radius scale".to_string()));
    }
    let n = sample.len();
    let centers: Vec<usize> = if n <= MAX_DOUBLING_CENTERS {
        (0..n).collect()
    } else {
        let mut rng = rng::substream(sample.seed(), tags::CENTERS, 0);
        rand::seq::index::sample(&mut rng, n, MAX_DOUBLING_CENTERS).into_vec()
    };

    let circle = CircleIndex::from_sample(sample);
    let mut best = 1.0f64;
    for scale in 0..n_scales {
        let r_small = radius_cap / 2.0 / (1 << scale) as f64;
        let r_big = 2.0 * r_small;
        let ratio_max = if let Some(idx) = &circle {
            centers
                .par_iter()
                .map(|&i| {
                    let t = sample.point(i)[0];
                    let small = idx.count_within(t, r_small).max(1);
                    let big = idx.count_within(t, r_big);
                    big as f64 / small as f64
                })
                .reduce(|| 1.0, f64::max)
        } else {
            let grid = GridIndex::build(sample, r_small);
            centers
                .par_iter()
                .map(|&i| {
                    let p = sample.point(i);
                    let mut small = 0usize;
                    let mut big = 0usize;
                    grid.for_each_within(
                        p,
                        r_big,
                        |j| sample.distance(i, j as usize),
                        |_, d| {
                            big += 1;
                            if d <= r_small {
                                small += 1;
                            }
                        },
                    );
                    big as f64 / small.max(1) as f64
                })
                .reduce(|| 1.0, f64::max)
        };
        best = best.max(ratio_max);
    }
    Ok(best)
}

/// Radius heuristic: multiplier times the mean distance from a vertex to its
/// k-th nearest neighbor.
pub fn suggest_radius(sample: &PointSample, multiplier: f64, k: usize) -> Result<f64> {
    let n = sample.len();
    if k == 0 || k >= n {
        return Err(Error::parameter(format!(
            "k must satisfy 1 <= k < n, got k = {k} with n = {n}"
        )));
    }
    if !(multiplier > 0.0) {
        return Err(Error::parameter(format!(
            "multiplier must be positive, got {multiplier}"
        )));
    }
    let sum = if let Some(idx) = CircleIndex::from_sample(sample) {
        (0..n)
            .into_par_iter()
            .map(|i| idx.kth_neighbor_dist(i, k))
            .sum::<f64>()
    } else {
        let grid = GridIndex::build_auto(sample, (k + 1) as f64);
        (0..n)
            .into_par_iter()
            .map(|i| {
                grid.kth_neighbor_dist(sample.point(i), i as u32, k, |j| {
                    sample.distance(i, j as usize)
                })
            })
            .sum::<f64>()
    };
    Ok(multiplier * sum / n as f64)
}

/// Result of a Monte Carlo epsilon-sample check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsilonSampleCheck {
    /// True when every probe point was within `epsilon` of a sample point.
    /// Sound as a "not an epsilon-sample" certificate, heuristic as "is".
    pub is_epsilon_sample: bool,
    /// Largest probe-to-sample distance observed.
    pub worst_gap: f64,
    /// Number of probe points actually placed.
    pub probes_used: usize,
}

/// Probe the space on a deterministic quasi-uniform pattern and report
/// whether every probe is within `epsilon` of some sample point.
pub fn check_epsilon_sample(
    sample: &PointSample,
    epsilon: f64,
    probe_count: usize,
) -> Result<EpsilonSampleCheck> {
    if !(epsilon > 0.0) {
        return Err(Error::parameter(format!("epsilon must be positive, got {epsilon}")));
    }
    if probe_count == 0 {
        return Err(Error::parameter("probe_count must be positive".to_string()));
    }
    let probes = probe_points(sample, probe_count);
    let dim = sample.dim();
    let n_probes = probes.len() / dim;

    let worst_gap = if let Some(idx) = CircleIndex::from_sample(sample) {
        probes
            .par_chunks_exact(dim)
            .map(|p| idx.nearest_dist(p[0]))
            .reduce(|| 0.0, f64::max)
    } else {
        let grid = GridIndex::build_auto(sample, 2.0);
        probes
            .par_chunks_exact(dim)
            .map(|p| grid.nearest_dist(p, None, |j| sample.space().distance(p, sample.point(j as usize))))
            .reduce(|| 0.0, f64::max)
    };

    Ok(EpsilonSampleCheck {
        is_epsilon_sample: worst_gap <= epsilon,
        worst_gap,
        probes_used: n_probes,
    })
}

/// Deterministic quasi-uniform probe pattern for each space kind, flattened
/// with the sample's dimension.
fn probe_points(sample: &PointSample, probe_count: usize) -> Vec<f64> {
    let m = probe_count;
    match &sample.space().kind {
        SpaceKind::Circle { circumference } => {
            let c = *circumference;
            (0..m).map(|i| c * i as f64 / m as f64).collect()
        }
        SpaceKind::UnitSquare => {
            let g = (m as f64).sqrt().ceil() as usize;
            let g = g.max(2);
            let mut out = Vec::with_capacity(2 * g * g);
            for i in 0..g {
                for j in 0..g {
                    out.push(i as f64 / (g - 1) as f64);
                    out.push(j as f64 / (g - 1) as f64);
                }
            }
            out
        }
        SpaceKind::UnitCube => {
            let g = (m as f64).cbrt().ceil() as usize;
            let g = g.max(2);
            let mut out = Vec::with_capacity(3 * g * g * g);
            for i in 0..g {
                for j in 0..g {
                    for k in 0..g {
                        out.push(i as f64 / (g - 1) as f64);
                        out.push(j as f64 / (g - 1) as f64);
                        out.push(k as f64 / (g - 1) as f64);
                    }
                }
            }
            out
        }
        SpaceKind::Hyperboloid { z_max } => {
            let zm = *z_max;
            let g_theta = (m as f64).sqrt().ceil() as usize;
            let g_z = m.div_ceil(g_theta).max(2);
            let mut out = Vec::with_capacity(3 * g_theta * g_z);
            for i in 0..g_theta {
                let theta = TAU * i as f64 / g_theta as f64;
                for j in 0..g_z {
                    let z = -zm + 2.0 * zm * j as f64 / (g_z - 1) as f64;
                    let rho = (1.0 + z * z).sqrt();
                    out.push(rho * theta.cos());
                    out.push(rho * theta.sin());
                    out.push(z);
                }
            }
            out
        }
        SpaceKind::SphereNonuniform { .. } => {
            // Fibonacci lattice
            let golden = std::f64::consts::PI * (3.0 - 5.0f64.sqrt());
            let mut out = Vec::with_capacity(3 * m);
            for i in 0..m {
                let z = 1.0 - 2.0 * (i as f64 + 0.5) / m as f64;
                let rho = (1.0 - z * z).sqrt();
                let phi = golden * i as f64;
                out.push(rho * phi.cos());
                out.push(rho * phi.sin());
                out.push(z);
            }
            out
        }
        SpaceKind::PointcloudFile { .. } => {
            // the cloud itself is the densest available reference set
            let n = sample.len();
            let stride = n.div_ceil(m).max(1);
            let mut out = Vec::new();
            let mut i = 0;
            while i < n {
                out.extend_from_slice(sample.point(i));
                i += stride;
            }
            out
        }
    }
}
