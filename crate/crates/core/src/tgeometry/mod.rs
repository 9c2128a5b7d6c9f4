//! Tempered Funk and Hilbert geometry.
//!
//! On the co-simplex the distances reduce to ratios of components:
//!
//! ```text
//! ρ_FD(p̃, q̃) = log_t max_i p̃_i/q̃_i
//! ρ_HG(p̃, q̃) = log_t (max_i p̃_i/q̃_i) / (min_i p̃_i/q̃_i) = log_t exp ρ_HG at t = 1
//! ```
//!
//! Ratios are accumulated as log-ratios and only exponentiated (through `log_t ∘ exp`)
//! at the end, so extreme components do not overflow.

pub mod domain;
pub mod sampling;

pub use domain::{
    ray_boundary, t_funk_domain, t_funk_domain_with_norm, t_hilbert_domain,
    t_hilbert_domain_with_norm, Boundary, ConvexDomain, Norm,
};
pub use sampling::{
    sample_ball, sample_balls, sample_bisector, BallKind, BisectorSample, GridCell, SimplexGrid,
    DEFAULT_RESOLUTION, IN_EQUALITY_REGION, ON_BISECTOR,
};

use crate::error::{Error, Result};
use crate::talgebra::Temperature;
use crate::temparam::{self, ensure_compatible, CoSimplexPoint};

fn log_ratio_extremes(p: &[f64], q: &[f64]) -> (f64, f64) {
    p.iter()
        .zip(q)
        .map(|(a, b)| a.ln() - b.ln())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| {
            (lo.min(x), hi.max(x))
        })
}

/// `log_t max_i p̃_i/q̃_i`.
pub fn t_funk_cosimplex(p: &CoSimplexPoint, q: &CoSimplexPoint) -> Result<f64> {
    ensure_compatible("t_funk_cosimplex", p, q)?;
    let (_, hi) = log_ratio_extremes(p.values(), q.values());
    Ok(p.temp().log_exp(hi))
}

/// `log_t (max_i p̃_i/q̃_i)/(min_i p̃_i/q̃_i)`.
pub fn t_hilbert_cosimplex(p: &CoSimplexPoint, q: &CoSimplexPoint) -> Result<f64> {
    ensure_compatible("t_hilbert_cosimplex", p, q)?;
    Ok(t_hilbert_raw(p.values(), q.values(), p.temp()))
}

/// The tempered Hilbert distance between the rays of two positive vectors. It is
/// projective: scaling either argument leaves it unchanged.
pub fn t_hilbert_raw(p: &[f64], q: &[f64], temp: Temperature) -> f64 {
    let (lo, hi) = log_ratio_extremes(p, q);
    temp.log_exp(hi - lo)
}

/// The classic Hilbert distance `log (max/min)` of the component ratios.
pub fn hilbert_raw(p: &[f64], q: &[f64]) -> f64 {
    let (lo, hi) = log_ratio_extremes(p, q);
    hi - lo
}

/// `max_i x_i ⊖_t min_i x_i`, the tempered variation semi-norm.
pub fn t_var_norm(x: &[f64], temp: Temperature) -> Result<f64> {
    let Some(lo) = x.iter().cloned().reduce(f64::min) else {
        return Ok(0.0);
    };
    let hi = x.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !temp.is_regular(lo) {
        return Err(Error::domain(
            "t_var_norm",
            format!("minimum {lo} is clipped at t = {}", temp.t()),
        ));
    }
    Ok(temp.sub(hi, lo))
}

fn require_all_regular(op: &'static str, u: &[f64], temp: Temperature) -> Result<()> {
    match u.iter().find(|&&x| !temp.is_regular(x)) {
        Some(x) => Err(Error::domain(
            op,
            format!("component {x} is clipped at t = {}", temp.t()),
        )),
        None => Ok(()),
    }
}

/// The radius of the smallest normed-space ball containing `u`:
/// `max_{i≠j} u_i ⊖_t u_j` over ordered pairs.
///
/// For `t ≤ 1` this equals the maximum of `|u_i ⊖_t u_j|`; for `t > 1` the absolute
/// value would pick up the negative member of each pair, whose magnitude exceeds that
/// of the positive one, and the isometry with the co-simplex would be lost.
pub fn t_nh_norm(u: &[f64], temp: Temperature) -> Result<f64> {
    require_all_regular("t_nh_norm", u, temp)?;
    if u.len() < 2 {
        return Ok(0.0);
    }
    // largest and second largest entries give max_{i≠j} u_i for every j in O(d)
    let (mut first, mut second, mut arg) = (f64::NEG_INFINITY, f64::NEG_INFINITY, 0);
    for (i, &x) in u.iter().enumerate() {
        if x > first {
            second = first;
            first = x;
            arg = i;
        } else if x > second {
            second = x;
        }
    }
    Ok(u.iter()
        .enumerate()
        .map(|(j, &uj)| temp.sub(if j == arg { second } else { first }, uj))
        .fold(f64::NEG_INFINITY, f64::max))
}

/// `max_{i≠j} |u_i ⊖_t u_j|`, the literal absolute-value reading of the normed-space
/// ball. Agrees with [`t_nh_norm`] for `t ≤ 1`.
pub fn t_nh_norm_abs(u: &[f64], temp: Temperature) -> Result<f64> {
    require_all_regular("t_nh_norm_abs", u, temp)?;
    let mut best: f64 = 0.0;
    for (i, &a) in u.iter().enumerate() {
        for (j, &b) in u.iter().enumerate() {
            if i != j {
                best = best.max(temp.sub(a, b).abs());
            }
        }
    }
    Ok(best)
}

/// `ρ_var(log_t p̃, log_t q̃)`, the Hilbert distance through the unconstrained coordinates.
pub fn isometry_unconstrained(p: &CoSimplexPoint, q: &CoSimplexPoint) -> Result<f64> {
    ensure_compatible("isometry_unconstrained", p, q)?;
    let temp = p.temp();
    let (a, b) = (temparam::natural_link(p), temparam::natural_link(q));
    let u: Vec<f64> = a
        .theta
        .iter()
        .zip(&b.theta)
        .map(|(x, y)| temp.sub(*x, *y))
        .collect();
    t_var_norm(&u, temp)
}

/// `ρ_NH(θ̌, θ̌')`, the Hilbert distance through the constrained coordinates.
pub fn isometry_constrained(p: &CoSimplexPoint, q: &CoSimplexPoint) -> Result<f64> {
    ensure_compatible("isometry_constrained", p, q)?;
    let temp = p.temp();
    let (a, b) = (temparam::constrained_link(p), temparam::constrained_link(q));
    nh_distance(&a.theta_check, &b.theta_check, temp)
}

/// `‖v ⊖_t v'‖_NH` between two points of the constrained surface.
pub fn nh_distance(v: &[f64], w: &[f64], temp: Temperature) -> Result<f64> {
    require_all_regular("nh_distance", w, temp)?;
    let u: Vec<f64> = v.iter().zip(w).map(|(x, y)| temp.sub(*x, *y)).collect();
    t_nh_norm(&u, temp)
}

/// Merges the co-densities of each block: block `i` becomes `(Σ_{j∈X_i} p̃_j^{1/t*})^{t*}`.
pub fn coarse_grain(p: &CoSimplexPoint, partition: &[Vec<usize>]) -> Result<CoSimplexPoint> {
    let d = p.dim();
    let mut seen = vec![false; d];
    for block in partition {
        if block.is_empty() {
            return Err(Error::InvalidPartition("empty block".into()));
        }
        for &j in block {
            if j >= d || std::mem::replace(&mut seen[j], true) {
                return Err(Error::InvalidPartition(format!(
                    "index {j} is out of range or repeated"
                )));
            }
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(Error::InvalidPartition(
            "blocks do not cover every index".into(),
        ));
    }
    let temp = p.temp();
    let c = p.codensity();
    let merged: Vec<f64> = partition
        .iter()
        .map(|block| block.iter().map(|&j| c[j]).sum::<f64>())
        .collect();
    CoSimplexPoint::from_probability(&merged, temp)
}

/// Hilbert distance of a pair before and after a positive linear map, applied to the
/// raw vectors without renormalizing.
pub fn check_contraction(
    a: &[Vec<f64>],
    p: &CoSimplexPoint,
    q: &CoSimplexPoint,
) -> Result<(f64, f64)> {
    ensure_compatible("check_contraction", p, q)?;
    let d = p.dim();
    if a.len() != d || a.iter().any(|row| row.len() != d) {
        return Err(Error::Dimension {
            op: "check_contraction",
            left: d,
            right: a.len(),
        });
    }
    if a.iter().flatten().any(|&x| !(x > 0.0 && x.is_finite())) {
        return Err(Error::NonPositiveMatrix);
    }
    let apply = |v: &[f64]| -> Vec<f64> {
        a.iter()
            .map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum())
            .collect()
    };
    let temp = p.temp();
    let before = t_hilbert_raw(p.values(), q.values(), temp);
    let after = t_hilbert_raw(&apply(p.values()), &apply(q.values()), temp);
    Ok((before, after))
}
