//! Embedding distance matrices into competing geometries.
//!
//! A configuration `Y` of `n` chart points is fitted to a target matrix `D` by
//! minimizing the stress `(1/n²) Σ_{i≠j} (D_ij − ρ(y_i, y_j))²`. The Hilbert-family
//! distances are replaced by their log-sum-exp smoothing during descent, with the
//! smoothing factor raised geometrically over the run; reported losses always use the
//! exact distances.

pub mod dataset;
pub mod geometry;
pub mod optim;

pub use dataset::{generate_dataset, graph_distances, DatasetSource, DistanceDataset};
pub use geometry::GeometryKind;
pub use optim::Adam;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct EmbedConfig {
    pub dim: usize,
    pub iters: usize,
    pub learning_rate: f64,
    /// Learning rate at the last step as a fraction of the initial one.
    pub final_lr_fraction: f64,
    /// Smoothing factor `T` at the first step.
    pub smoothing: f64,
    /// Smoothing factor at the last step.
    pub final_smoothing: f64,
    /// Standard deviation of the initial chart coordinates.
    pub init_scale: f64,
    /// Independent initializations; the run with the lowest final loss is kept.
    pub restarts: usize,
    pub seed: u64,
}

impl Default for EmbedConfig {
    fn default() -> Self {
        EmbedConfig {
            dim: 3,
            iters: 1500,
            learning_rate: 0.1,
            final_lr_fraction: 0.05,
            smoothing: 20.0,
            final_smoothing: 1000.0,
            init_scale: 0.1,
            restarts: 8,
            seed: 0,
        }
    }
}

impl EmbedConfig {
    fn validate(&self) -> Result<()> {
        let positive = |v: f64| v > 0.0 && v.is_finite();
        if self.dim == 0
            || self.restarts == 0
            || !positive(self.learning_rate)
            || !positive(self.final_lr_fraction)
            || !positive(self.smoothing)
            || !positive(self.final_smoothing)
            || !(self.init_scale >= 0.0)
        {
            return Err(Error::domain(
                "EmbedConfig",
                format!("invalid configuration {self:?}"),
            ));
        }
        Ok(())
    }

    /// Geometric interpolation from `start` at step 0 to `end` at the last step.
    fn schedule(&self, start: f64, end: f64, step: usize) -> f64 {
        if self.iters <= 1 {
            return start;
        }
        start * (end / start).powf(step as f64 / (self.iters - 1) as f64)
    }
}

#[derive(Debug, Clone)]
pub struct EmbeddingRun {
    pub kind: GeometryKind,
    pub config: EmbedConfig,
    /// `n` chart points.
    pub y: Vec<Vec<f64>>,
    /// Exact loss before each step, followed by the final loss.
    pub loss_history: Vec<f64>,
}

impl EmbeddingRun {
    pub fn initial_loss(&self) -> f64 {
        self.loss_history[0]
    }

    pub fn final_loss(&self) -> f64 {
        *self
            .loss_history
            .last()
            .expect("history holds the initial loss")
    }
}

fn check_shape(data: &DistanceDataset, y: &[Vec<f64>]) -> Result<()> {
    if y.len() != data.n() {
        return Err(Error::Dimension {
            op: "embedding_loss",
            left: data.n(),
            right: y.len(),
        });
    }
    Ok(())
}

/// `(1/n²) Σ_{i≠j} (D_ij − ρ(y_i, y_j))²` with exact distances.
pub fn embedding_loss(data: &DistanceDataset, y: &[Vec<f64>], kind: GeometryKind) -> Result<f64> {
    check_shape(data, y)?;
    let n = data.n();
    let rows: Result<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut acc = 0.0;
            for j in 0..n {
                if j != i {
                    let r = data.get(i, j) - kind.distance(&y[i], &y[j])?;
                    acc += r * r;
                }
            }
            Ok(acc)
        })
        .collect();
    Ok(rows?.iter().sum::<f64>() / (n * n) as f64)
}

/// The optimization objective (smoothed for the Hilbert family) and its gradient.
pub fn smoothed_loss_and_gradient(
    data: &DistanceDataset,
    y: &[Vec<f64>],
    kind: GeometryKind,
    smoothing: f64,
) -> Result<(f64, Vec<Vec<f64>>)> {
    check_shape(data, y)?;
    let n = data.n();
    let scale = 1.0 / (n * n) as f64;
    // each row owns its gradient, so rows run independently and sum in a fixed order
    let rows: Vec<(f64, Vec<f64>)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut loss = 0.0;
            let mut grad = vec![0.0; y[i].len()];
            for j in 0..n {
                if j == i {
                    continue;
                }
                let (rho, g) = kind.smoothed_distance_grad(&y[i], &y[j], smoothing);
                let r = rho - data.get(i, j);
                loss += r * r;
                // pairs (i, j) and (j, i) both depend on y_i
                for (acc, gk) in grad.iter_mut().zip(g) {
                    *acc += 4.0 * scale * r * gk;
                }
            }
            (loss * scale, grad)
        })
        .collect();
    let loss: f64 = rows.iter().map(|(l, _)| l).sum();
    if !loss.is_finite() {
        return Err(Error::Divergence { iteration: 0, loss });
    }
    Ok((loss, rows.into_iter().map(|(_, g)| g).collect()))
}

/// Standard normal chart coordinates scaled by `scale`, retracted into the chart.
pub fn random_chart_points(
    kind: GeometryKind,
    n: usize,
    dim: usize,
    scale: f64,
    rng: &mut impl Rng,
) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| {
            let mut p: Vec<f64> = (0..kind.chart_dim(dim))
                .map(|_| scale * rng.sample::<f64, _>(StandardNormal))
                .collect();
            kind.retract(&mut p);
            p
        })
        .collect()
}

/// Distances among `n` random points of the geometry; an exactly realizable target.
pub fn sample_in_geometry(
    kind: GeometryKind,
    n: usize,
    dim: usize,
    spread: f64,
    seed: u64,
) -> Result<DistanceDataset> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts = random_chart_points(kind, n, dim, spread, &mut rng);
    let mut d = vec![0.0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let v = kind.distance(&pts[i], &pts[j])?;
            d[i * n + j] = v;
            d[j * n + i] = v;
        }
    }
    DistanceDataset::from_matrix(
        d,
        n,
        DatasetSource::Sampled {
            geometry: kind.name().into(),
            dim,
        },
        seed,
    )
}

/// Fits `data` in `kind` with Adam, a geometric learning-rate decay and a geometric
/// increase of the smoothing factor. The stress is not convex, so each of
/// `config.restarts` initializations is descended and the best final loss wins; restart
/// `r` draws from stream `r` of the seeded generator.
pub fn optimize_embedding(
    data: &DistanceDataset,
    kind: GeometryKind,
    config: &EmbedConfig,
) -> Result<EmbeddingRun> {
    config.validate()?;
    let mut best: Option<EmbeddingRun> = None;
    for restart in 0..config.restarts {
        let run = descend(data, kind, config, restart as u64)?;
        if best
            .as_ref()
            .is_none_or(|b| run.final_loss() < b.final_loss())
        {
            best = Some(run);
        }
    }
    Ok(best.expect("at least one restart"))
}

fn descend(
    data: &DistanceDataset,
    kind: GeometryKind,
    config: &EmbedConfig,
    restart: u64,
) -> Result<EmbeddingRun> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(restart);
    let mut y = random_chart_points(kind, data.n(), config.dim, config.init_scale, &mut rng);
    let width = kind.chart_dim(config.dim);
    let mut flat: Vec<f64> = y.concat();
    let mut adam = Adam::new(flat.len());
    let mut history = Vec::with_capacity(config.iters + 1);
    for step in 0..config.iters {
        history.push(embedding_loss(data, &y, kind)?);
        let smoothing = config.schedule(config.smoothing, config.final_smoothing, step);
        let lr = config.schedule(
            config.learning_rate,
            config.learning_rate * config.final_lr_fraction,
            step,
        );
        let (loss, grad) = smoothed_loss_and_gradient(data, &y, kind, smoothing).map_err(|_| {
            Error::Divergence {
                iteration: step,
                loss: f64::NAN,
            }
        })?;
        if !loss.is_finite() {
            return Err(Error::Divergence {
                iteration: step,
                loss,
            });
        }
        adam.update(&mut flat, &grad.concat(), lr);
        for (row, chunk) in y.iter_mut().zip(flat.chunks_mut(width)) {
            kind.retract(chunk);
            row.copy_from_slice(chunk);
        }
    }
    let last = embedding_loss(data, &y, kind)?;
    if !last.is_finite() {
        return Err(Error::Divergence {
            iteration: config.iters,
            loss: last,
        });
    }
    history.push(last);
    Ok(EmbeddingRun {
        kind,
        config: config.clone(),
        y,
        loss_history: history,
    })
}

/// One line of a geometry comparison.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmbedRow {
    pub dataset: String,
    pub geometry: String,
    pub t: Option<f64>,
    pub dim: usize,
    pub final_loss: f64,
    pub iters: usize,
    pub seed: u64,
}

/// Final losses over every `(kind, dim)` combination, kinds outermost.
pub fn compare_geometries(
    data: &DistanceDataset,
    dims: &[usize],
    kinds: &[GeometryKind],
    config: &EmbedConfig,
) -> Result<Vec<EmbedRow>> {
    let mut rows = Vec::with_capacity(dims.len() * kinds.len());
    for &kind in kinds {
        for &dim in dims {
            let cfg = EmbedConfig {
                dim,
                ..config.clone()
            };
            let run = optimize_embedding(data, kind, &cfg)?;
            rows.push(EmbedRow {
                dataset: data.source.label().into(),
                geometry: kind.name().into(),
                t: kind.temperature(),
                dim,
                final_loss: run.final_loss(),
                iters: cfg.iters,
                seed: cfg.seed,
            });
        }
    }
    Ok(rows)
}
