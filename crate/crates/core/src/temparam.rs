//! Discrete tempered exponential measures and their dual coordinates.
//!
//! A point `p̃` of the co-simplex `Δ̃_t^d` is a positive vector whose *co-density*
//! `p = p̃^{1/t*}` is a probability vector. Three coordinate systems are dual to it:
//!
//! | form          | coordinates               | dual function                         |
//! |---------------|---------------------------|---------------------------------------|
//! | minimal       | `θ̂_i = log_t(p̃_i/p̃_d)`     | `log_t (1 + Σ exp_t^{1/t*} θ̂_i)^{t*}`  |
//! | unconstrained | `θ = log_t p̃`              | `t* (Σ exp_t^{1/t*} θ_i − 1)`          |
//! | constrained   | `θ̌ = log_t(p̃ / λ̃_t(p̃))`    | `log_t (Σ exp_t^{1/t*} θ̌_i)^{t*}`      |

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::talgebra::Temperature;

/// Smallest admissible component of a co-simplex point.
pub const MIN_COMPONENT: f64 = 1e-12;
/// Co-density mass drift accepted (and corrected) by the constructors.
pub const MAX_DRIFT: f64 = 1e-6;

/// A discrete TEM: positive `values` with `Σ values_i^{1/t*} = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPoint", into = "RawPoint")]
pub struct CoSimplexPoint {
    temp: Temperature,
    values: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawPoint {
    t: f64,
    values: Vec<f64>,
}

impl TryFrom<RawPoint> for CoSimplexPoint {
    type Error = Error;

    fn try_from(raw: RawPoint) -> Result<Self> {
        CoSimplexPoint::new(raw.values, Temperature::new(raw.t)?)
    }
}

impl From<CoSimplexPoint> for RawPoint {
    fn from(p: CoSimplexPoint) -> Self {
        RawPoint {
            t: p.temp.t(),
            values: p.values,
        }
    }
}

fn check_positive(op: &'static str, v: &[f64]) -> Result<()> {
    if v.is_empty() {
        return Err(Error::domain(op, "empty vector"));
    }
    match v.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
        Some(x) => Err(Error::domain(
            op,
            format!("component {x} is not finite and positive"),
        )),
        None => Ok(()),
    }
}

/// `x^{1/t*} = x^{2-t}`.
#[inline]
pub(crate) fn to_codensity(x: f64, temp: Temperature) -> f64 {
    if temp.is_one() {
        x
    } else {
        x.powf(2.0 - temp.t())
    }
}

#[inline]
pub(crate) fn from_codensity(x: f64, temp: Temperature) -> f64 {
    if temp.is_one() {
        x
    } else {
        x.powf(temp.t_star())
    }
}

impl CoSimplexPoint {
    /// Validates a co-simplex point, re-normalizing small co-density drift.
    pub fn new(values: Vec<f64>, temp: Temperature) -> Result<Self> {
        check_positive("CoSimplexPoint::new", &values)?;
        let mass: f64 = values.iter().map(|&v| to_codensity(v, temp)).sum();
        if (mass - 1.0).abs() > MAX_DRIFT {
            return Err(Error::domain(
                "CoSimplexPoint::new",
                format!("co-density mass {mass} deviates from 1 by more than {MAX_DRIFT}"),
            ));
        }
        Self::finish(values, mass, temp)
    }

    /// Lifts a probability vector: `p̃ = p^{t*}`.
    pub fn from_probability(p: &[f64], temp: Temperature) -> Result<Self> {
        check_positive("from_probability", p)?;
        let mass: f64 = p.iter().sum();
        if (mass - 1.0).abs() > MAX_DRIFT {
            return Err(Error::domain(
                "from_probability",
                format!("probabilities sum to {mass}"),
            ));
        }
        let values = p.iter().map(|&x| from_codensity(x / mass, temp)).collect();
        Self::finish(values, 1.0, temp)
    }

    /// Projects any positive vector onto the co-simplex along its ray.
    pub fn from_raw(v: &[f64], temp: Temperature) -> Result<Self> {
        check_positive("from_raw", v)?;
        // scale by the largest entry first so powers cannot overflow
        let top = v.iter().cloned().fold(0.0, f64::max);
        let scaled: Vec<f64> = v.iter().map(|x| x / top).collect();
        let mass: f64 = scaled.iter().map(|&x| to_codensity(x, temp)).sum();
        Self::finish(scaled, mass, temp)
    }

    fn finish(mut values: Vec<f64>, mass: f64, temp: Temperature) -> Result<Self> {
        if mass != 1.0 {
            let scale = from_codensity(mass, temp);
            values.iter_mut().for_each(|v| *v /= scale);
        }
        if let Some(v) = values.iter().find(|&&v| !(v > MIN_COMPONENT)) {
            return Err(Error::domain(
                "CoSimplexPoint",
                format!("component {v} is below the interior threshold {MIN_COMPONENT}"),
            ));
        }
        Ok(CoSimplexPoint { temp, values })
    }

    pub fn uniform(d: usize, temp: Temperature) -> Result<Self> {
        Self::from_probability(&vec![1.0 / d as f64; d], temp)
    }

    pub fn temp(&self) -> Temperature {
        self.temp
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// `p = p̃^{1/t*}`, a probability vector.
    pub fn codensity(&self) -> Vec<f64> {
        self.values
            .iter()
            .map(|&v| to_codensity(v, self.temp))
            .collect()
    }
}

pub(crate) fn ensure_compatible(
    op: &'static str,
    p: &CoSimplexPoint,
    q: &CoSimplexPoint,
) -> Result<()> {
    if p.dim() != q.dim() {
        return Err(Error::Dimension {
            op,
            left: p.dim(),
            right: q.dim(),
        });
    }
    if p.temp().t() != q.temp().t() {
        return Err(Error::TemperatureMismatch {
            left: p.temp().t(),
            right: q.temp().t(),
        });
    }
    Ok(())
}

pub fn codensity(p: &CoSimplexPoint) -> Vec<f64> {
    p.codensity()
}

pub fn from_probability(p: &[f64], temp: Temperature) -> Result<CoSimplexPoint> {
    CoSimplexPoint::from_probability(p, temp)
}

/// `F_t(p̃) = Σ_i (p̃_i log_t p̃_i − log_{t−1} p̃_i)`, defined on any positive vector.
/// Its gradient is `log_t p̃`.
pub fn neg_tempered_entropy_values(values: &[f64], temp: Temperature) -> f64 {
    let down = temp.shifted_down();
    values.iter().map(|&v| v * temp.log(v) - down.log(v)).sum()
}

pub fn neg_tempered_entropy(p: &CoSimplexPoint) -> f64 {
    neg_tempered_entropy_values(p.values(), p.temp())
}

/// Minimal coordinates `θ̂ ∈ R^{d−1}` relative to the last component.
#[derive(Debug, Clone, PartialEq)]
pub struct MinimalParams {
    pub theta_hat: Vec<f64>,
    /// `G_t(θ̂) = log_t(1/p̃_d)`.
    pub cumulant: f64,
    pub temp: Temperature,
}

pub fn minimal_link(p: &CoSimplexPoint) -> MinimalParams {
    let temp = p.temp();
    let (last, head) = p.values().split_last().expect("points are non-empty");
    MinimalParams {
        theta_hat: head.iter().map(|&v| temp.log(v / last)).collect(),
        cumulant: temp.log(1.0 / last),
        temp,
    }
}

fn regular_exps(op: &'static str, theta: &[f64], temp: Temperature) -> Result<Vec<f64>> {
    theta
        .iter()
        .map(|&x| {
            let e = temp.exp(x);
            if e > 0.0 && e.is_finite() {
                Ok(e)
            } else {
                Err(Error::domain(
                    op,
                    format!("exp_t({x}) is clipped at t = {}", temp.t()),
                ))
            }
        })
        .collect()
}

/// `1 + Σ exp_t(θ̂_i)^{1/t*}` together with the exponentials.
fn minimal_partition(theta_hat: &[f64], temp: Temperature) -> Result<(f64, Vec<f64>)> {
    let e = regular_exps("minimal", theta_hat, temp)?;
    let z = 1.0 + e.iter().map(|&x| to_codensity(x, temp)).sum::<f64>();
    Ok((z, e))
}

pub fn minimal_inverse_link(theta_hat: &[f64], temp: Temperature) -> Result<CoSimplexPoint> {
    let (z, mut e) = minimal_partition(theta_hat, temp)?;
    let last = 1.0 / from_codensity(z, temp);
    e.iter_mut().for_each(|x| *x *= last);
    e.push(last);
    CoSimplexPoint::new(e, temp)
}

/// `log_t[(1 + Σ exp_t^{1/t*} θ̂_i)^{t*}]`; its gradient is the minimal inverse link.
pub fn minimal_dual(theta_hat: &[f64], temp: Temperature) -> Result<f64> {
    let (z, _) = minimal_partition(theta_hat, temp)?;
    Ok(temp.log_exp(temp.t_star() * z.ln()))
}

/// `Σ_{i<d} p̃_i[θ̂_i(p̃) − θ̂_i(q̃)] − log_t(1/p̃_d) + log_t(1/q̃_d)`.
pub fn bregman_minimal(p: &CoSimplexPoint, q: &CoSimplexPoint) -> Result<f64> {
    ensure_compatible("bregman_minimal", p, q)?;
    let (mp, mq) = (minimal_link(p), minimal_link(q));
    let inner: f64 = p
        .values()
        .iter()
        .zip(mp.theta_hat.iter().zip(&mq.theta_hat))
        .map(|(v, (a, b))| v * (a - b))
        .sum();
    Ok(inner - mp.cumulant + mq.cumulant)
}

/// Unconstrained coordinates `θ = log_t p̃`.
#[derive(Debug, Clone, PartialEq)]
pub struct NaturalParams {
    pub theta: Vec<f64>,
    pub temp: Temperature,
}

pub fn natural_link(p: &CoSimplexPoint) -> NaturalParams {
    let temp = p.temp();
    NaturalParams {
        theta: p.values().iter().map(|&v| temp.log(v)).collect(),
        temp,
    }
}

pub fn natural_inverse_link(theta: &NaturalParams) -> Result<CoSimplexPoint> {
    let e = regular_exps("natural_inverse_link", &theta.theta, theta.temp)?;
    CoSimplexPoint::new(e, theta.temp)
}

/// `t* (Σ exp_t^{1/t*} θ_i − 1)`; its gradient is `exp_t θ`.
pub fn unconstrained_dual(theta: &NaturalParams) -> Result<f64> {
    let temp = theta.temp;
    let e = regular_exps("unconstrained_dual", &theta.theta, temp)?;
    let s: f64 = e.iter().map(|&x| to_codensity(x, temp)).sum();
    Ok(temp.t_star() * (s - 1.0))
}

/// The Lagrange multiplier `λ_t = log_t[(Σ p̃^{1−t} / Σ p̃^{2−2t})^{1/(1−t)}]` of the
/// co-simplex constraint. At `t = 1` this is the log-inverse geometric mean.
pub fn lagrange_lambda(p: &CoSimplexPoint) -> f64 {
    let temp = p.temp();
    let d = p.dim() as f64;
    if temp.is_one() {
        return -p.values().iter().map(|v| v.ln()).sum::<f64>() / d;
    }
    // Σ p̃^k = d + Σ expm1(k ln p̃) keeps the ratio accurate near t = 1.
    let k = temp.one_minus();
    let (s1, s2) = p.values().iter().fold((0.0, 0.0), |(a, b), v| {
        let l = v.ln();
        (a + (k * l).exp_m1(), b + (2.0 * k * l).exp_m1())
    });
    let ln_ratio = (s1 / d).ln_1p() - (s2 / d).ln_1p();
    temp.log_exp(ln_ratio / k)
}

/// Constrained coordinates `θ̌`, lying on the tangent space `p̃^{1−t} · θ̌ = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstrainedParams {
    pub theta_check: Vec<f64>,
    pub temp: Temperature,
}

/// `p̃^{1−t}`, the normal of the co-simplex at `p̃`.
pub fn normal(p: &CoSimplexPoint) -> Vec<f64> {
    let k = p.temp().one_minus();
    p.values()
        .iter()
        .map(|&v| if p.temp().is_one() { 1.0 } else { v.powf(k) })
        .collect()
}

/// `θ̌ = log_t p̃ ⊕_t λ_t = log_t p̃ + λ_t p̃^{1−t}`.
pub fn constrained_link(p: &CoSimplexPoint) -> ConstrainedParams {
    let temp = p.temp();
    let lambda = lagrange_lambda(p);
    ConstrainedParams {
        theta_check: p
            .values()
            .iter()
            .zip(normal(p))
            .map(|(&v, n)| temp.log(v) + lambda * n)
            .collect(),
        temp,
    }
}

/// `P_t(p̃) = I − n nᵀ / ‖n‖²` with `n = p̃^{1−t}`.
pub fn tangent_projection(p: &CoSimplexPoint) -> Vec<Vec<f64>> {
    let n = normal(p);
    let nn: f64 = n.iter().map(|x| x * x).sum();
    (0..n.len())
        .map(|i| {
            (0..n.len())
                .map(|j| f64::from(u8::from(i == j)) - n[i] * n[j] / nn)
                .collect()
        })
        .collect()
}

/// `exp_t θ̌ / (Σ exp_t^{1/t*} θ̌)^{t*}`, allowing clipped (zero) components.
pub fn tempered_softmax_raw(theta_check: &[f64], temp: Temperature) -> Result<Vec<f64>> {
    let (z, e) = softmax_partition(theta_check, temp)?;
    let scale = from_codensity(z, temp);
    Ok(e.into_iter().map(|x| x / scale).collect())
}

/// The inverse link of the constrained form. Clipped components leave the interior of
/// the co-simplex and are rejected.
pub fn tempered_softmax(theta_check: &[f64], temp: Temperature) -> Result<CoSimplexPoint> {
    let v = tempered_softmax_raw(theta_check, temp)?;
    CoSimplexPoint::new(v, temp)
}

fn softmax_partition(theta: &[f64], temp: Temperature) -> Result<(f64, Vec<f64>)> {
    if theta.is_empty() {
        return Err(Error::domain("tempered_softmax", "empty vector"));
    }
    if temp.is_one() {
        // shift by the max; the common factor cancels in the normalization
        let m = theta.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let e: Vec<f64> = theta.iter().map(|x| (x - m).exp()).collect();
        return Ok((e.iter().sum(), e));
    }
    let e: Vec<f64> = theta.iter().map(|&x| temp.exp(x)).collect();
    if e.iter().any(|x| !x.is_finite()) {
        return Err(Error::domain(
            "tempered_softmax",
            format!("exp_t beyond its pole at t = {}", temp.t()),
        ));
    }
    let z: f64 = e.iter().map(|&x| to_codensity(x, temp)).sum();
    if z <= 0.0 {
        return Err(Error::domain(
            "tempered_softmax",
            "every component is clipped",
        ));
    }
    Ok((z, e))
}

/// `log_t[(Σ exp_t^{1/t*} θ̌_i)^{t*}]`; its gradient is the tempered softmax.
pub fn constrained_dual(theta_check: &[f64], temp: Temperature) -> Result<f64> {
    let (z, _) = softmax_partition(theta_check, temp)?;
    if temp.is_one() {
        let m = theta_check
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max);
        return Ok(m + z.ln());
    }
    Ok(temp.log_exp(temp.t_star() * z.ln()))
}
