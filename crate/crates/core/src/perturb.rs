//! Random edge deletion and non-edge insertion on a true graph.
//!
//! Deletions and insertions draw from disjoint substreams of the params seed,
//! so sweeping the insertion rate never changes which edges get deleted.

use std::collections::HashSet;

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, GraphLabel};
use crate::rng::{self, tags};

/// Deletion probability p, insertion probability q, and the seed the whole
/// perturbation is derived from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbationParams {
    pub p: f64,
    pub q: f64,
    pub seed: u64,
}

impl PerturbationParams {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.p) {
            return Err(Error::parameter(format!("p must be in [0,1], got {}", self.p)));
        }
        if !(0.0..=1.0).contains(&self.q) {
            return Err(Error::parameter(format!("q must be in [0,1], got {}", self.q)));
        }
        Ok(())
    }
}

/// How many rejection draws to spend per requested insertion before falling
/// back to a full pass over the non-edge space.
const REJECTION_ATTEMPT_FACTOR: u64 = 100;

/// Observed graph: each true edge kept with probability 1-p, each non-edge
/// inserted with probability q. Deterministic in `params.seed`.
///
/// Insertions are drawn as a binomial count followed by a uniform choice of
/// that many distinct non-edges, which matches per-pair Bernoulli sampling in
/// distribution without touching all O(n^2) pairs.
pub fn perturb(true_graph: &Graph, params: &PerturbationParams) -> Result<Graph> {
    params.validate()?;
    let n = true_graph.n();

    let mut delete_rng = rng::substream(params.seed, tags::DELETE, 0);
    let mut kept: Vec<(u32, u32)> = Vec::with_capacity(true_graph.edge_count());
    for (u, v) in true_graph.edges() {
        if delete_rng.random::<f64>() >= params.p {
            kept.push((u, v));
        }
    }

    let mut insert_rng = rng::substream(params.seed, tags::INSERT, 0);
    let total_pairs = n as u64 * (n as u64).saturating_sub(1) / 2;
    let non_edges = total_pairs - true_graph.edge_count() as u64;
    let k = if non_edges == 0 || params.q == 0.0 {
        0
    } else if params.q == 1.0 {
        non_edges
    } else {
        Binomial::new(non_edges, params.q)
            .expect("validated q")
            .sample(&mut insert_rng)
    };

    let mut inserted: HashSet<(u32, u32)> = HashSet::with_capacity(k as usize);
    if k > 0 {
        let cap = k.saturating_mul(REJECTION_ATTEMPT_FACTOR);
        let mut attempts = 0u64;
        while (inserted.len() as u64) < k && attempts < cap {
            attempts += 1;
            let a = insert_rng.random_range(0..n as u32);
            let b = insert_rng.random_range(0..n as u32);
            if a == b {
                continue;
            }
            let pair = if a < b { (a, b) } else { (b, a) };
            if true_graph.has_edge(pair.0, pair.1) {
                continue;
            }
            inserted.insert(pair);
        }
        if (inserted.len() as u64) < k {
            // dense graphs starve rejection sampling; take a uniform
            // k-subset by one reservoir pass over the non-edges instead
            inserted.clear();
            let mut reservoir: Vec<(u32, u32)> = Vec::with_capacity(k as usize);
            let mut seen = 0u64;
            for u in 0..n as u32 {
                for v in (u + 1)..n as u32 {
                    if true_graph.has_edge(u, v) {
                        continue;
                    }
                    if (reservoir.len() as u64) < k {
                        reservoir.push((u, v));
                    } else {
                        let j = insert_rng.random_range(0..=seen);
                        if j < k {
                            reservoir[j as usize] = (u, v);
                        }
                    }
                    seen += 1;
                }
            }
            inserted.extend(reservoir);
        }
    }

    kept.extend(inserted);
    Graph::from_edges(n, kept, GraphLabel::Observed)
}

/// Reference perturbation: one Bernoulli draw per vertex pair, O(n^2).
/// Same two substreams as the fast path; kept for distribution oracles.
pub fn perturb_reference(true_graph: &Graph, params: &PerturbationParams) -> Result<Graph> {
    params.validate()?;
    let n = true_graph.n();
    let mut delete_rng = rng::substream(params.seed, tags::DELETE, 0);
    let mut insert_rng = rng::substream(params.seed, tags::INSERT, 0);
    let mut edges = Vec::new();
    for u in 0..n as u32 {
        for v in (u + 1)..n as u32 {
            if true_graph.has_edge(u, v) {
                if delete_rng.random::<f64>() >= params.p {
                    edges.push((u, v));
                }
            } else if insert_rng.random::<f64>() < params.q {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, edges, GraphLabel::Observed)
}

/// Edge bookkeeping between a true graph and an observed graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PerturbationStats {
    /// |E* \ Ê|
    pub deleted: usize,
    /// |Ê \ E*|
    pub inserted: usize,
    /// |E* ∩ Ê|
    pub retained: usize,
}

pub fn perturbation_stats(true_graph: &Graph, observed: &Graph) -> Result<PerturbationStats> {
    if true_graph.n() != observed.n() {
        return Err(Error::parameter(format!(
            "vertex count mismatch: {} vs {}",
            true_graph.n(),
            observed.n()
        )));
    }
    let mut stats = PerturbationStats { deleted: 0, inserted: 0, retained: 0 };
    for (u, v) in true_graph.edges() {
        if observed.has_edge(u, v) {
            stats.retained += 1;
        } else {
            stats.deleted += 1;
        }
    }
    stats.inserted = observed.edge_count() - stats.retained;
    Ok(stats)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize) -> Graph {
        let edges = (0..n as u32).map(|u| (u, (u + 1) % n as u32));
        Graph::from_edges(n, edges, GraphLabel::TrueGraph).unwrap()
    }

    fn complete(n: usize) -> Graph {
        let mut edges = Vec::new();
        for u in 0..n as u32 {
            for v in (u + 1)..n as u32 {
                edges.push((u, v));
            }
        }
        Graph::from_edges(n, edges, GraphLabel::TrueGraph).unwrap()
    }

    fn edge_set(g: &Graph) -> Vec<(u32, u32)> {
        g.edges().collect()
    }

    #[test]
    fn no_noise_is_identity() {
        let g = cycle(12);
        let out = perturb(&g, &PerturbationParams { p: 0.0, q: 0.0, seed: 5 }).unwrap();
        assert_eq!(edge_set(&g), edge_set(&out));
        assert_eq!(out.label(), GraphLabel::Observed);
    }

    #[test]
    fn full_deletion_empties_the_graph() {
        let g = cycle(12);
        let out = perturb(&g, &PerturbationParams { p: 1.0, q: 0.0, seed: 5 }).unwrap();
        assert_eq!(out.edge_count(), 0);
    }

    #[test]
    fn full_insertion_completes_the_graph() {
        let g = cycle(10);
        let out = perturb(&g, &PerturbationParams { p: 0.0, q: 1.0, seed: 5 }).unwrap();
        assert_eq!(out.edge_count(), 45);
    }

    #[test]
    fn perturbation_is_deterministic() {
        let g = cycle(30);
        let params = PerturbationParams { p: 0.3, q: 0.05, seed: 1234 };
        let a = perturb(&g, &params).unwrap();
        let b = perturb(&g, &params).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn deletions_do_not_depend_on_q() {
        let g = cycle(40);
        let a = perturb(&g, &PerturbationParams { p: 0.5, q: 0.0, seed: 9 }).unwrap();
        let b = perturb(&g, &PerturbationParams { p: 0.5, q: 0.2, seed: 9 }).unwrap();
        let retained_a: Vec<_> = edge_set(&a)
            .into_iter()
            .filter(|&(u, v)| g.has_edge(u, v))
            .collect();
        let retained_b: Vec<_> = edge_set(&b)
            .into_iter()
            .filter(|&(u, v)| g.has_edge(u, v))
            .collect();
        assert_eq!(retained_a, retained_b);
    }

    #[test]
    fn deletion_only_is_subset_insertion_only_is_superset() {
        let g = cycle(25);
        let del = perturb(&g, &PerturbationParams { p: 0.4, q: 0.0, seed: 3 }).unwrap();
        for (u, v) in del.edges() {
            assert!(g.has_edge(u, v));
        }
        let ins = perturb(&g, &PerturbationParams { p: 0.0, q: 0.2, seed: 3 }).unwrap();
        for (u, v) in g.edges() {
            assert!(ins.has_edge(u, v));
        }
    }

    #[test]
    fn stats_hand_cases() {
        let g = complete(3);
        let same = perturbation_stats(&g, &g).unwrap();
        assert_eq!(same, PerturbationStats { deleted: 0, inserted: 0, retained: 3 });

        let none = Graph::empty(3, GraphLabel::Observed);
        let wiped = perturbation_stats(&g, &none).unwrap();
        assert_eq!(wiped, PerturbationStats { deleted: 3, inserted: 0, retained: 0 });

        let grown = perturbation_stats(&none.clone().with_label(GraphLabel::TrueGraph), &g).unwrap();
        assert_eq!(grown, PerturbationStats { deleted: 0, inserted: 3, retained: 0 });

        let tiny = Graph::empty(2, GraphLabel::Observed);
        assert!(perturbation_stats(&g, &tiny).is_err());
    }

    #[test]
    fn deleted_plus_retained_is_true_edge_count() {
        let g = cycle(50);
        for seed in 0..20 {
            let obs = perturb(&g, &PerturbationParams { p: 0.37, q: 0.02, seed }).unwrap();
            let st = perturbation_stats(&g, &obs).unwrap();
            assert_eq!(st.deleted + st.retained, g.edge_count());
        }
    }

    /// 8-cycle, p=0.5, q=0.1: retained ~ Bin(8, 1/2), inserted ~ Bin(20, 0.1).
    /// Sample means over 10^4 seeds stay within 3 standard errors.
    #[test]
    fn moments_match_exact_binomials() {
        let g = cycle(8);
        let trials = 10_000u64;
        let (mut retained_sum, mut inserted_sum) = (0f64, 0f64);
        for seed in 0..trials {
            let obs = perturb(&g, &PerturbationParams { p: 0.5, q: 0.1, seed }).unwrap();
            let st = perturbation_stats(&g, &obs).unwrap();
            retained_sum += st.retained as f64;
            inserted_sum += st.inserted as f64;
        }
        let t = trials as f64;
        let retained_mean = retained_sum / t;
        let inserted_mean = inserted_sum / t;
        let se_retained = (8.0 * 0.25f64).sqrt() / t.sqrt();
        let se_inserted = (20.0 * 0.1 * 0.9f64).sqrt() / t.sqrt();
        assert!(
            (retained_mean - 4.0).abs() <= 3.0 * se_retained,
            "retained mean {retained_mean}"
        );
        assert!(
            (inserted_mean - 2.0).abs() <= 3.0 * se_inserted,
            "inserted mean {inserted_mean}"
        );
    }

    #[test]
    fn reference_mode_identity_cases() {
        let g = cycle(10);
        let out = perturb_reference(&g, &PerturbationParams { p: 0.0, q: 0.0, seed: 2 }).unwrap();
        assert_eq!(edge_set(&g), edge_set(&out));
        let all = perturb_reference(&g, &PerturbationParams { p: 0.0, q: 1.0, seed: 2 }).unwrap();
        assert_eq!(all.edge_count(), 45);
    }

    #[test]
    fn dense_graph_insertion_falls_back_to_enumeration() {
        // nearly complete graph: rejection will starve, reservoir kicks in
        let n = 40;
        let mut edges = Vec::new();
        for u in 0..n as u32 {
            for v in (u + 1)..n as u32 {
                if !(u == 0 && v < 6) {
                    edges.push((u, v));
                }
            }
        }
        let g = Graph::from_edges(n, edges, GraphLabel::TrueGraph).unwrap();
        let out = perturb(&g, &PerturbationParams { p: 0.0, q: 0.9, seed: 4 }).unwrap();
        assert!(out.edge_count() >= g.edge_count());
        assert!(out.edge_count() <= n * (n - 1) / 2);
    }

    #[test]
    fn invalid_probabilities_rejected() {
        let g = cycle(5);
        assert!(perturb(&g, &PerturbationParams { p: -0.1, q: 0.0, seed: 0 }).is_err());
        assert!(perturb(&g, &PerturbationParams { p: 0.0, q: 1.5, seed: 0 }).is_err());
    }
}
