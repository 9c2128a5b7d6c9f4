//! Distance matrices to embed: random Euclidean points and graph hop distances.

use std::collections::VecDeque;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};

/// Resamples allowed when a random graph comes out disconnected.
pub const CONNECT_RETRIES: usize = 32;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DatasetSource {
    RandomPoints {
        n: usize,
        ambient_dim: usize,
    },
    ErdosRenyi {
        n: usize,
        p: f64,
    },
    BarabasiAlbert {
        n: usize,
        m: usize,
    },
    /// Points sampled in an embedding geometry.
    Sampled {
        geometry: String,
        dim: usize,
    },
    Explicit,
}

impl DatasetSource {
    /// Short name used in reports.
    pub fn label(&self) -> &'static str {
        match self {
            DatasetSource::RandomPoints { .. } => "points",
            DatasetSource::ErdosRenyi { .. } => "er",
            DatasetSource::BarabasiAlbert { .. } => "ba",
            DatasetSource::Sampled { .. } => "sampled",
            DatasetSource::Explicit => "explicit",
        }
    }
}

/// A symmetric `n × n` distance matrix with zero diagonal, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceDataset {
    n: usize,
    d: Vec<f64>,
    pub source: DatasetSource,
    pub seed: u64,
}

impl DistanceDataset {
    pub fn from_matrix(d: Vec<f64>, n: usize, source: DatasetSource, seed: u64) -> Result<Self> {
        if d.len() != n * n {
            return Err(Error::Dimension {
                op: "DistanceDataset",
                left: n * n,
                right: d.len(),
            });
        }
        for i in 0..n {
            if d[i * n + i] != 0.0 {
                return Err(Error::domain("DistanceDataset", "nonzero diagonal"));
            }
            for j in 0..n {
                let v = d[i * n + j];
                if !(v.is_finite() && v >= 0.0) || v != d[j * n + i] {
                    return Err(Error::domain(
                        "DistanceDataset",
                        format!("entry ({i}, {j}) = {v} is not a symmetric nonnegative distance"),
                    ));
                }
            }
        }
        Ok(DistanceDataset { n, d, source, seed })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.d[i * self.n + j]
    }

    pub fn matrix(&self) -> &[f64] {
        &self.d
    }
}

/// All-pairs hop distances of an undirected graph; infinite distances are an error.
pub fn graph_distances(n: usize, edges: &[(usize, usize)]) -> Result<Vec<f64>> {
    let adj = adjacency(n, edges);
    hop_distances(&adj).ok_or(Error::Disconnected(0))
}

fn adjacency(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    adj
}

fn hop_distances(adj: &[Vec<usize>]) -> Option<Vec<f64>> {
    let n = adj.len();
    let mut out = vec![0.0; n * n];
    let mut queue = VecDeque::new();
    for s in 0..n {
        let mut dist = vec![usize::MAX; n];
        dist[s] = 0;
        queue.push_back(s);
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        for (j, &h) in dist.iter().enumerate() {
            if h == usize::MAX {
                return None;
            }
            out[s * n + j] = h as f64;
        }
    }
    Some(out)
}

fn euclidean_matrix(points: &[Vec<f64>]) -> Vec<f64> {
    let n = points.len();
    let mut d = vec![0.0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let v = points[i]
                .iter()
                .zip(&points[j])
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            d[i * n + j] = v;
            d[j * n + i] = v;
        }
    }
    d
}

fn erdos_renyi(rng: &mut impl Rng, n: usize, p: f64) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random::<f64>() < p {
                edges.push((i, j));
            }
        }
    }
    edges
}

/// Preferential attachment grown from a star on `m + 1` nodes.
fn barabasi_albert(rng: &mut impl Rng, n: usize, m: usize) -> Vec<(usize, usize)> {
    let mut edges: Vec<(usize, usize)> = (1..=m.min(n - 1)).map(|j| (0, j)).collect();
    // every edge endpoint once, so uniform draws are degree-proportional
    let mut ends: Vec<usize> = edges.iter().flat_map(|&(a, b)| [a, b]).collect();
    for v in m + 1..n {
        let mut targets: Vec<usize> = Vec::with_capacity(m);
        while targets.len() < m {
            let &u = ends.choose(rng).expect("the seed star has edges");
            if !targets.contains(&u) {
                targets.push(u);
            }
        }
        for u in targets {
            edges.push((u, v));
            ends.extend([u, v]);
        }
    }
    edges
}

pub fn generate_dataset(source: &DatasetSource, seed: u64) -> Result<DistanceDataset> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (d, n) = match *source {
        DatasetSource::RandomPoints { n, ambient_dim } => {
            let points: Vec<Vec<f64>> = (0..n)
                .map(|_| {
                    (0..ambient_dim)
                        .map(|_| rng.sample(StandardNormal))
                        .collect()
                })
                .collect();
            (euclidean_matrix(&points), n)
        }
        DatasetSource::ErdosRenyi { n, p } => {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::domain(
                    "erdos_renyi",
                    format!("p = {p} outside [0, 1]"),
                ));
            }
            let mut found = None;
            for _ in 0..CONNECT_RETRIES {
                let adj = adjacency(n, &erdos_renyi(&mut rng, n, p));
                if let Some(d) = hop_distances(&adj) {
                    found = Some(d);
                    break;
                }
            }
            (found.ok_or(Error::Disconnected(CONNECT_RETRIES))?, n)
        }
        DatasetSource::BarabasiAlbert { n, m } => {
            if m == 0 || m >= n {
                return Err(Error::domain(
                    "barabasi_albert",
                    format!("need 1 <= m < n, got m = {m}"),
                ));
            }
            (graph_distances(n, &barabasi_albert(&mut rng, n, m))?, n)
        }
        DatasetSource::Sampled { .. } | DatasetSource::Explicit => {
            return Err(Error::domain(
                "generate_dataset",
                "sampled and explicit datasets are built by their own constructors",
            ))
        }
    };
    DistanceDataset::from_matrix(d, n, source.clone(), seed)
}
