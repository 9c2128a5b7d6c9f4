//! The tempered calculus.
//!
//! The t-derivative `D_t f = lim (f(x+δ) ⊖_t f(x))/δ = f'(x) / (1 + (1−t) f(x))` is
//! inverted by the t-integral `F(b) ⊖_t F(a)`. Riemann t-sums accumulate with `⊕_t`;
//! integrating the tautological Lagrangian of a convex domain along a ray gives the
//! tempered Funk distance.

use crate::error::{Error, Result};
use crate::talgebra::Temperature;
use crate::tgeometry::ConvexDomain;

/// Default relative step for finite-difference t-derivatives.
pub const DERIVATIVE_STEP: f64 = 1e-5;
/// Step of the finite-difference velocity of curves without an analytic one.
pub const VELOCITY_STEP: f64 = 1e-6;

fn require_regular(op: &'static str, y: f64, temp: Temperature) -> Result<()> {
    if temp.is_regular(y) {
        Ok(())
    } else {
        Err(Error::domain(
            op,
            format!("1 + (1 - t) * {y} <= 0 at t = {}", temp.t()),
        ))
    }
}

/// Central-difference t-derivative with step `h`.
pub fn t_derivative(f: impl Fn(f64) -> f64, x: f64, temp: Temperature, h: f64) -> Result<f64> {
    let fx = f(x);
    require_regular("t_derivative", fx, temp)?;
    let forward = temp.sub(f(x + h), fx);
    let backward = temp.sub(f(x - h), fx);
    Ok((forward - backward) / (2.0 * h))
}

/// `f'(x) / (1 + (1−t) f(x))`.
pub fn t_derivative_closed(f_prime: f64, f_x: f64, temp: Temperature) -> Result<f64> {
    require_regular("t_derivative_closed", f_x, temp)?;
    Ok(f_prime / temp.scale(f_x))
}

/// The solution of `D_t f = K` with `f(0) = 0`: `f(x) = (e^{(1−t)Kx} − 1)/(1−t)`.
pub fn const_t_derivative_solution(k: f64, temp: Temperature) -> impl Fn(f64) -> f64 + Clone {
    move |x| {
        if temp.is_one() {
            k * x
        } else {
            let c = temp.one_minus();
            (c * k * x).exp_m1() / c
        }
    }
}

/// `e^a − 1 − a`, accurate for small `a`.
fn exp_m1_minus_id(a: f64) -> f64 {
    if a.abs() < 1e-2 {
        let a2 = a * a;
        a2 * (0.5 + a * (1.0 / 6.0 + a * (1.0 / 24.0 + a * (1.0 / 120.0 + a / 720.0))))
    } else {
        a.exp_m1() - a
    }
}

/// The solution of `D_t D_t f = K` with `f(0) = D_t f(0) = 0`:
/// `f(x) = (exp(φ((1−t)Kx) / ((1−t)K)) − 1)/(1−t)` with `φ(a) = e^a − 1 − a`.
pub fn const_t_second_derivative_solution(
    k: f64,
    temp: Temperature,
) -> impl Fn(f64) -> f64 + Clone {
    move |x| {
        if k == 0.0 {
            return 0.0;
        }
        if temp.is_one() {
            return 0.5 * k * x * x;
        }
        let c = temp.one_minus();
        (exp_m1_minus_id(c * k * x) / (c * k)).exp_m1() / c
    }
}

/// Knots `a = x_0 < … < x_n = b` and one sample point inside each cell.
#[derive(Debug, Clone, PartialEq)]
pub struct Division {
    knots: Vec<f64>,
    sample_points: Vec<f64>,
}

impl Division {
    pub fn new(knots: Vec<f64>, sample_points: Vec<f64>) -> Result<Self> {
        if knots.len() < 2 || sample_points.len() + 1 != knots.len() {
            return Err(Error::domain(
                "Division",
                "need n + 1 knots and n sample points",
            ));
        }
        for (w, &xi) in knots.windows(2).zip(&sample_points) {
            if !(w[0] < w[1]) {
                return Err(Error::domain("Division", "knots must increase strictly"));
            }
            if !(w[0] <= xi && xi <= w[1]) {
                return Err(Error::domain(
                    "Division",
                    format!("sample {xi} outside its cell"),
                ));
            }
        }
        Ok(Division {
            knots,
            sample_points,
        })
    }

    /// `n` equal cells sampled at their midpoints.
    pub fn uniform(a: f64, b: f64, n: usize) -> Result<Self> {
        if n == 0 || !(a < b) {
            return Err(Error::domain("Division::uniform", "need a < b and n >= 1"));
        }
        let h = (b - a) / n as f64;
        let knots = (0..=n)
            .map(|i| if i == n { b } else { a + i as f64 * h })
            .collect();
        let samples = (0..n).map(|i| a + (i as f64 + 0.5) * h).collect();
        Division::new(knots, samples)
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn sample_points(&self) -> &[f64] {
        &self.sample_points
    }

    pub fn len(&self) -> usize {
        self.sample_points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sample_points.is_empty()
    }

    /// The largest cell width.
    pub fn step(&self) -> f64 {
        self.knots
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(0.0, f64::max)
    }

    fn terms<'a>(&'a self, f: impl Fn(f64) -> f64 + 'a) -> impl Iterator<Item = f64> + 'a {
        self.knots
            .windows(2)
            .zip(&self.sample_points)
            .map(move |(w, &xi)| (w[1] - w[0]) * f(xi))
    }
}

/// `⊕_t`-sum of `terms` in the given order.
///
/// Since `1 + (1−t)(a ⊕_t b) = (1 + (1−t)a)(1 + (1−t)b)`, the sum is evaluated as
/// `log_t exp(Σ ln(1 + (1−t) x_i)/(1−t))`, which avoids the drift of a long chain of
/// `⊕_t` operations.
pub fn t_sum(terms: impl IntoIterator<Item = f64>, temp: Temperature) -> Result<f64> {
    if temp.is_one() {
        return Ok(terms.into_iter().sum());
    }
    let c = temp.one_minus();
    let mut log_scale = 0.0;
    for x in terms {
        require_regular("t_sum", x, temp)?;
        log_scale += (c * x).ln_1p();
    }
    Ok(temp.log_exp(log_scale / c))
}

/// The Riemann t-sum `(⊕_t)_i |I_i| f(ξ_i)`.
pub fn riemann_t_sum(
    f: impl Fn(f64) -> f64,
    division: &Division,
    temp: Temperature,
) -> Result<f64> {
    t_sum(division.terms(f), temp)
}

/// Like [`riemann_t_sum`], accumulating the cells in `order` with explicit `⊕_t` steps.
pub fn riemann_t_sum_ordered(
    f: impl Fn(f64) -> f64,
    division: &Division,
    temp: Temperature,
    order: &[usize],
) -> Result<f64> {
    let terms: Vec<f64> = division.terms(f).collect();
    let mut acc = 0.0;
    for &i in order {
        let x = *terms.get(i).ok_or_else(|| {
            Error::domain("riemann_t_sum_ordered", format!("cell {i} out of range"))
        })?;
        require_regular("riemann_t_sum_ordered", x, temp)?;
        acc = temp.add(acc, x);
        require_regular("riemann_t_sum_ordered", acc, temp)?;
    }
    Ok(acc)
}

/// `F(b) ⊖_t F(a)` for a t-primitive `F` of the integrand.
pub fn t_integral(
    primitive: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    temp: Temperature,
) -> Result<f64> {
    let fa = primitive(a);
    require_regular("t_integral", fa, temp)?;
    Ok(temp.sub(primitive(b), fa))
}

/// The Riemann t-sum of `f` over `n_cells` equal midpoint cells of `[a, b]`.
pub fn t_integral_numeric(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    temp: Temperature,
    n_cells: usize,
) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    if a > b {
        let forward = t_integral_numeric(f, b, a, temp, n_cells)?;
        return Ok(temp.neg(forward));
    }
    riemann_t_sum(f, &Division::uniform(a, b, n_cells)?, temp)
}

/// `inf{τ > 0 : x + ξ/τ ∈ Ω}`, the tautological Finsler Lagrangian. For the simplex,
/// `ξ` is taken to be tangent (its entries sum to 0).
pub fn tautological_lagrangian(domain: &ConvexDomain, x: &[f64], xi: &[f64]) -> Result<f64> {
    domain.require("tautological_lagrangian", x)?;
    if xi.len() != x.len() {
        return Err(Error::Dimension {
            op: "tautological_lagrangian",
            left: x.len(),
            right: xi.len(),
        });
    }
    if xi.iter().all(|&v| v == 0.0) {
        return Ok(0.0);
    }
    if let ConvexDomain::HalfSpace { normal, offset } = domain {
        let rate: f64 = normal.iter().zip(xi).map(|(a, b)| a * b).sum();
        let slack = offset - normal.iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
        return Ok((rate / slack).max(0.0));
    }
    Ok(domain
        .exit_parameter(x, xi)
        .map_or(0.0, |lambda| 1.0 / lambda))
}

type PathFn = Box<dyn Fn(f64) -> Vec<f64> + Send + Sync>;

/// A smooth path `γ : [0, 1] → R^n`.
pub struct Curve {
    position: PathFn,
    velocity: Option<PathFn>,
}

impl std::fmt::Debug for Curve {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Curve")
            .field("analytic_velocity", &self.velocity.is_some())
            .finish()
    }
}

impl Curve {
    pub fn new(position: impl Fn(f64) -> Vec<f64> + Send + Sync + 'static) -> Self {
        Curve {
            position: Box::new(position),
            velocity: None,
        }
    }

    pub fn with_velocity(
        mut self,
        velocity: impl Fn(f64) -> Vec<f64> + Send + Sync + 'static,
    ) -> Self {
        self.velocity = Some(Box::new(velocity));
        self
    }

    /// The straight segment from `r` to `s`.
    pub fn segment(r: Vec<f64>, s: Vec<f64>) -> Self {
        let v: Vec<f64> = s.iter().zip(&r).map(|(a, b)| a - b).collect();
        let dir = v.clone();
        Curve::new(move |u| r.iter().zip(&v).map(|(a, b)| a + u * b).collect())
            .with_velocity(move |_| dir.clone())
    }

    pub fn constant(p: Vec<f64>) -> Self {
        let n = p.len();
        Curve::new(move |_| p.clone()).with_velocity(move |_| vec![0.0; n])
    }

    pub fn position(&self, u: f64) -> Vec<f64> {
        (self.position)(u)
    }

    /// Analytic velocity if supplied, otherwise central differences (one-sided at the
    /// ends of `[0, 1]`).
    pub fn velocity(&self, u: f64) -> Vec<f64> {
        if let Some(v) = &self.velocity {
            return v(u);
        }
        let lo = (u - VELOCITY_STEP).max(0.0);
        let hi = (u + VELOCITY_STEP).min(1.0);
        let (a, b) = (self.position(lo), self.position(hi));
        a.iter().zip(&b).map(|(x, y)| (y - x) / (hi - lo)).collect()
    }
}

/// The forward t-length `∫_t F(γ(u), γ̇(u)) d_t u` over `[0, 1]`, as a midpoint Riemann
/// t-sum with `n_cells` cells.
pub fn t_length(
    domain: &ConvexDomain,
    curve: &Curve,
    temp: Temperature,
    n_cells: usize,
) -> Result<f64> {
    let division = Division::uniform(0.0, 1.0, n_cells)?;
    let mut terms = Vec::with_capacity(n_cells);
    for (w, &u) in division.knots().windows(2).zip(division.sample_points()) {
        let x = curve.position(u);
        if !domain.contains(&x) {
            return Err(Error::OutsideDomain { op: "t_length" });
        }
        terms.push((w[1] - w[0]) * tautological_lagrangian(domain, &x, &curve.velocity(u))?);
    }
    t_sum(terms, temp)
}

/// The point at forward t-Funk distance `tau` from `r` along direction `xi`:
/// `r + ((1 − exp_t(⊖_t τ)) / F(r, ξ)) ξ`.
pub fn t_geodesic_point(
    domain: &ConvexDomain,
    r: &[f64],
    xi: &[f64],
    tau: f64,
    temp: Temperature,
) -> Result<Vec<f64>> {
    let f = tautological_lagrangian(domain, r, xi)?;
    if !(f > 0.0) {
        return Err(Error::domain(
            "t_geodesic_point",
            "the ray never leaves the domain",
        ));
    }
    require_regular("t_geodesic_point", tau, temp)?;
    let shrink = temp.exp(temp.neg(tau));
    if !(shrink > 0.0 && shrink.is_finite()) {
        return Err(Error::domain(
            "t_geodesic_point",
            format!("exp_t(⊖_t {tau}) is clipped at t = {}", temp.t()),
        ));
    }
    let c = (1.0 - shrink) / f;
    Ok(r.iter().zip(xi).map(|(a, b)| a + c * b).collect())
}
