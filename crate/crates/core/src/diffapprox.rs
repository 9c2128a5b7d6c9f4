//! Differentiable surrogates of the tempered Funk and Hilbert distances.
//!
//! `LSE_t(x, T) = (1/T) log_t Σ_i exp_t(T x_i)` replaces the max of the log-ratios.
//! It is evaluated in the shifted form `(1/T)(M ⊕_t log_t Σ_i exp_t(T x_i ⊖_t M))` with
//! `M = max_i T x_i`, whose summands all lie in `[0, 1]`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::talgebra::Temperature;
use crate::temparam::{ensure_compatible, from_codensity, CoSimplexPoint};
use crate::tgeometry::{t_hilbert_raw, t_var_norm};

/// Mismatch used when the mismatched mode is switched on without a value.
pub const DEFAULT_DELTA: f64 = 0.02;
/// Number of histogram bins over `[-1, 1]`.
pub const HISTOGRAM_BINS: usize = 101;
const PAIRS_PER_CHUNK: usize = 1024;

/// Smoothing factor `T` and optional temperature mismatch `δ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothingConfig {
    smoothing: f64,
    delta: f64,
}

impl SmoothingConfig {
    pub fn new(smoothing: f64, delta: f64) -> Result<Self> {
        if !(smoothing > 0.0 && smoothing.is_finite()) {
            return Err(Error::domain(
                "SmoothingConfig",
                format!("T = {smoothing} must be positive"),
            ));
        }
        if !(0.0..1.0).contains(&delta) {
            return Err(Error::domain(
                "SmoothingConfig",
                format!("delta = {delta} must lie in [0, 1)"),
            ));
        }
        Ok(SmoothingConfig { smoothing, delta })
    }

    pub fn smoothing(&self) -> f64 {
        self.smoothing
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Temperature of the smooth max: `1 − δ` in mismatched mode, `temp` otherwise.
    pub fn max_temperature(&self, temp: Temperature) -> Temperature {
        if self.delta > 0.0 {
            Temperature::new(1.0 - self.delta).expect("1 - delta < 2")
        } else {
            temp
        }
    }
}

/// The pieces of the shifted evaluation.
enum Shifted {
    /// `M` and the normalized terms `exp_t(y_i ⊖_t M)` with their sum.
    Regular { m: f64, terms: Vec<f64>, sum: f64 },
    /// `t > 1` and some `y_i` beyond the pole: the sum is infinite.
    Saturated,
}

fn shifted(x: &[f64], smoothing: f64, temp: Temperature) -> Result<Shifted> {
    if x.is_empty() {
        return Err(Error::domain("lse_t", "empty vector"));
    }
    let m = x
        .iter()
        .map(|v| smoothing * v)
        .fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return Err(Error::domain("lse_t", "non-finite input"));
    }
    if !temp.is_regular(m) {
        return if temp.t() > 1.0 {
            Ok(Shifted::Saturated)
        } else {
            Err(Error::domain(
                "lse_t",
                format!("every exp_t(T x_i) is clipped at t = {}", temp.t()),
            ))
        };
    }
    let terms: Vec<f64> = x
        .iter()
        .map(|v| {
            if temp.is_one() {
                (smoothing * v - m).exp()
            } else {
                temp.exp(temp.sub(smoothing * v, m))
            }
        })
        .collect();
    let sum = terms.iter().sum();
    Ok(Shifted::Regular { m, terms, sum })
}

/// `(1/T) log_t Σ_i exp_t(T x_i)`. For `t > 1`, inputs beyond the pole of `exp_t`
/// saturate at the supremum `1/(T(t−1))` of `log_t / T`.
pub fn lse_t(x: &[f64], smoothing: f64, temp: Temperature) -> Result<f64> {
    Ok(match shifted(x, smoothing, temp)? {
        Shifted::Saturated => 1.0 / (smoothing * (temp.t() - 1.0)),
        Shifted::Regular { m, sum, .. } => temp.add(m, temp.log(sum)) / smoothing,
    })
}

/// `∂ LSE_t / ∂x_i = (exp_t(T x_i) / Σ_j exp_t(T x_j))^t`, zero when saturated.
pub fn lse_t_gradient(x: &[f64], smoothing: f64, temp: Temperature) -> Result<Vec<f64>> {
    Ok(match shifted(x, smoothing, temp)? {
        Shifted::Saturated => vec![0.0; x.len()],
        Shifted::Regular { terms, sum, .. } => terms
            .into_iter()
            .map(|e| {
                let w = e / sum;
                if temp.is_one() {
                    w
                } else {
                    w.powf(temp.t())
                }
            })
            .collect(),
    })
}

/// `(ε^ℓ, ε^r)` with `ε^ℓ = log_t(1 + (d−1) e)`, `ε^r = log_t((d−1) + e)` and
/// `e = exp_t(⊖_t ‖T x‖_var)`.
pub fn lse_epsilons(x: &[f64], smoothing: f64, temp: Temperature) -> Result<(f64, f64)> {
    let y: Vec<f64> = x.iter().map(|v| smoothing * v).collect();
    let var = t_var_norm(&y, temp)?;
    let e = temp.exp(temp.neg(var));
    let others = (x.len() - 1) as f64;
    Ok((temp.log(1.0 + others * e), temp.log(others + e)))
}

/// Lower and upper bounds `(1/T)(max_i T x_i ⊕_t ε^{ℓ,r})` on [`lse_t`], valid when every
/// `exp_t(T x_i)` is finite and positive.
pub fn lse_error_bounds(x: &[f64], smoothing: f64, temp: Temperature) -> Result<(f64, f64)> {
    let (el, er) = lse_epsilons(x, smoothing, temp)?;
    let m = x
        .iter()
        .map(|v| smoothing * v)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok((temp.add(m, el) / smoothing, temp.add(m, er) / smoothing))
}

/// The same bounds written as ordinary sums: `max_i x_i + (1/T)(exp_t M)^{1−t} ε`.
pub fn lse_error_bounds_additive(
    x: &[f64],
    smoothing: f64,
    temp: Temperature,
) -> Result<(f64, f64)> {
    let (el, er) = lse_epsilons(x, smoothing, temp)?;
    let top = x.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let scale = temp.scale(smoothing * top) / smoothing;
    Ok((top + scale * el, top + scale * er))
}

fn log_ratios(p: &[f64], q: &[f64], temp: Temperature) -> Vec<f64> {
    p.iter()
        .zip(q)
        .map(|(a, b)| temp.log_exp(a.ln() - b.ln()))
        .collect()
}

/// `LSE(log_t(p̃/q̃), T)` on raw positive vectors.
pub fn diff_funk_values(
    p: &[f64],
    q: &[f64],
    temp: Temperature,
    cfg: SmoothingConfig,
) -> Result<f64> {
    lse_t(
        &log_ratios(p, q, temp),
        cfg.smoothing,
        cfg.max_temperature(temp),
    )
}

/// `ρ_dFD(p̃, q̃) ⊕_t ρ_dFD(q̃, p̃)` on raw positive vectors.
pub fn diff_hilbert_values(
    p: &[f64],
    q: &[f64],
    temp: Temperature,
    cfg: SmoothingConfig,
) -> Result<f64> {
    let a = diff_funk_values(p, q, temp, cfg)?;
    let b = diff_funk_values(q, p, temp, cfg)?;
    Ok(temp.add(a, b))
}

pub fn diff_funk(p: &CoSimplexPoint, q: &CoSimplexPoint, cfg: SmoothingConfig) -> Result<f64> {
    ensure_compatible("diff_funk", p, q)?;
    diff_funk_values(p.values(), q.values(), p.temp(), cfg)
}

pub fn diff_hilbert(p: &CoSimplexPoint, q: &CoSimplexPoint, cfg: SmoothingConfig) -> Result<f64> {
    ensure_compatible("diff_hilbert", p, q)?;
    diff_hilbert_values(p.values(), q.values(), p.temp(), cfg)
}

/// Gradient of [`diff_hilbert_values`] with respect to both raw vectors.
pub fn diff_hilbert_gradient_values(
    p: &[f64],
    q: &[f64],
    temp: Temperature,
    cfg: SmoothingConfig,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let lse_temp = cfg.max_temperature(temp);
    let (x, z) = (log_ratios(p, q, temp), log_ratios(q, p, temp));
    let (a, b) = (
        lse_t(&x, cfg.smoothing, lse_temp)?,
        lse_t(&z, cfg.smoothing, lse_temp)?,
    );
    let (ga, gb) = (
        lse_t_gradient(&x, cfg.smoothing, lse_temp)?,
        lse_t_gradient(&z, cfg.smoothing, lse_temp)?,
    );
    // ∂(a ⊕ b)/∂a = 1 + (1−t) b
    let (wa, wb) = (temp.scale(b), temp.scale(a));
    let t = temp.t();
    let mut grad_p = Vec::with_capacity(p.len());
    let mut grad_q = Vec::with_capacity(p.len());
    for i in 0..p.len() {
        let (r, s) = (p[i] / q[i], q[i] / p[i]);
        // d log_t(u/v)/du = (u/v)^{-t}/v, d log_t(u/v)/dv = -(u/v)^{1-t}/v
        let dx_dp = r.powf(-t) / q[i];
        let dx_dq = -r.powf(1.0 - t) / q[i];
        let dz_dq = s.powf(-t) / p[i];
        let dz_dp = -s.powf(1.0 - t) / p[i];
        grad_p.push(wa * ga[i] * dx_dp + wb * gb[i] * dz_dp);
        grad_q.push(wa * ga[i] * dx_dq + wb * gb[i] * dz_dq);
    }
    Ok((grad_p, grad_q))
}

pub fn diff_hilbert_gradient(
    p: &CoSimplexPoint,
    q: &CoSimplexPoint,
    cfg: SmoothingConfig,
) -> Result<(Vec<f64>, Vec<f64>)> {
    ensure_compatible("diff_hilbert_gradient", p, q)?;
    diff_hilbert_gradient_values(p.values(), q.values(), p.temp(), cfg)
}

/// Binned normalized relative errors `(ρ_dHG − ρ_HG)/ρ_HG` over random pairs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorHistogram {
    pub t: f64,
    #[serde(rename = "T")]
    pub smoothing: f64,
    pub delta: f64,
    pub d: usize,
    /// Bin centres.
    pub bins: Vec<f64>,
    pub counts: Vec<u64>,
    pub mean: f64,
    pub sd: f64,
    #[serde(skip)]
    pub negative: u64,
    #[serde(skip)]
    pub positive: u64,
}

impl ErrorHistogram {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn negative_fraction(&self) -> f64 {
        self.negative as f64 / self.total() as f64
    }

    pub fn positive_fraction(&self) -> f64 {
        self.positive as f64 / self.total() as f64
    }
}

/// A point drawn uniformly from the simplex and lifted to the co-simplex.
pub fn random_cosimplex_values(rng: &mut impl rand::Rng, d: usize, temp: Temperature) -> Vec<f64> {
    loop {
        let e: Vec<f64> = (0..d).map(|_| Exp1.sample(rng)).collect();
        let s: f64 = e.iter().sum();
        let v: Vec<f64> = e.iter().map(|x| from_codensity(x / s, temp)).collect();
        if v.iter().all(|x| *x > 0.0) {
            return v;
        }
    }
}

fn bin_of(err: f64) -> usize {
    let w = 2.0 / HISTOGRAM_BINS as f64;
    (((err.clamp(-1.0, 1.0) + 1.0) / w) as usize).min(HISTOGRAM_BINS - 1)
}

/// Monte-Carlo histogram of relative errors. Pairs are generated in fixed chunks, each
/// with its own stream of a generator seeded by `seed`, so the result does not depend on
/// the number of worker threads.
pub fn relative_error_histogram(
    n_pairs: usize,
    d: usize,
    temp: Temperature,
    cfg: SmoothingConfig,
    seed: u64,
) -> Result<ErrorHistogram> {
    if n_pairs == 0 || d < 2 {
        return Err(Error::domain(
            "relative_error_histogram",
            "need n_pairs >= 1 and d >= 2",
        ));
    }
    let chunks = n_pairs.div_ceil(PAIRS_PER_CHUNK);
    let errors: Result<Vec<Vec<f64>>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let len = PAIRS_PER_CHUNK.min(n_pairs - c * PAIRS_PER_CHUNK);
            (0..len)
                .map(|_| {
                    let p = random_cosimplex_values(&mut rng, d, temp);
                    let q = random_cosimplex_values(&mut rng, d, temp);
                    let exact = t_hilbert_raw(&p, &q, temp);
                    let smooth = diff_hilbert_values(&p, &q, temp, cfg)?;
                    Ok((smooth - exact) / exact)
                })
                .collect()
        })
        .collect();
    let errors: Vec<f64> = errors?.into_iter().flatten().collect();
    let n = errors.len() as f64;
    let mean = errors.iter().sum::<f64>() / n;
    let var = errors.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / n;
    let mut counts = vec![0u64; HISTOGRAM_BINS];
    for &e in &errors {
        counts[bin_of(e)] += 1;
    }
    let w = 2.0 / HISTOGRAM_BINS as f64;
    Ok(ErrorHistogram {
        t: temp.t(),
        smoothing: cfg.smoothing,
        delta: cfg.delta,
        d,
        bins: (0..HISTOGRAM_BINS)
            .map(|i| -1.0 + (i as f64 + 0.5) * w)
            .collect(),
        counts,
        mean,
        sd: var.sqrt(),
        negative: errors.iter().filter(|&&e| e < 0.0).count() as u64,
        positive: errors.iter().filter(|&&e| e > 0.0).count() as u64,
    })
}
