//! Tempered Klein and Poincaré disk models.
//!
//! Both models measure hyperbolic distance on the open unit ball; their tempered
//! variants apply `ψ_{t,χ}(u) = χ log_t exp(u/χ)` with `χ = 1/2` to the distance. The
//! radial map `π(k) = k / (1 + √(1 − ‖k‖²))` is an isometry from Klein to Poincaré for
//! the classical and the tempered distances alike.

use crate::error::{Error, Result};
use crate::talgebra::Temperature;

/// `χ` used by the tempered model distances.
pub const CHI: f64 = 0.5;
/// Bisection budget of [`fractional_point`].
pub const MAX_BISECTIONS: usize = 200;
/// Bracket width at which [`fractional_point`] stops.
pub const BISECTION_TOLERANCE: f64 = 1e-10;

/// A point of the open unit ball.
#[derive(Debug, Clone, PartialEq)]
pub struct DiskPoint {
    coords: Vec<f64>,
}

impl DiskPoint {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.iter().any(|x| !x.is_finite()) || norm2(&coords) >= 1.0 {
            return Err(Error::OutsideDomain {
                op: "DiskPoint::new",
            });
        }
        Ok(DiskPoint { coords })
    }

    pub fn origin(dim: usize) -> Self {
        DiskPoint {
            coords: vec![0.0; dim],
        }
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

fn check_dims(op: &'static str, r: &DiskPoint, s: &DiskPoint) -> Result<()> {
    if r.dim() == s.dim() {
        Ok(())
    } else {
        Err(Error::Dimension {
            op,
            left: r.dim(),
            right: s.dim(),
        })
    }
}

/// `χ log_t exp(u/χ)`.
pub fn psi(u: f64, temp: Temperature, chi: f64) -> f64 {
    chi * temp.log_exp(u / chi)
}

/// `arccosh((1 − r·s) / √((1−‖r‖²)(1−‖s‖²)))`, evaluated as an `arsinh` of the
/// Lagrange-identity form to stay accurate for nearby points.
pub fn klein_distance(r: &DiskPoint, s: &DiskPoint) -> Result<f64> {
    check_dims("klein_distance", r, s)?;
    let (a, b) = (r.coords(), s.coords());
    let diff: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    let mut wedge = 0.0;
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            let w = a[i] * b[j] - a[j] * b[i];
            wedge += w * w;
        }
    }
    let denom = ((1.0 - norm2(a)) * (1.0 - norm2(b))).sqrt();
    Ok(((diff - wedge).max(0.0).sqrt() / denom).asinh())
}

/// `arccosh(1 + 2‖r−s‖² / ((1−‖r‖²)(1−‖s‖²)))`, evaluated as
/// `2 arsinh(‖r−s‖ / √((1−‖r‖²)(1−‖s‖²)))`.
pub fn poincare_distance(r: &DiskPoint, s: &DiskPoint) -> Result<f64> {
    check_dims("poincare_distance", r, s)?;
    let (a, b) = (r.coords(), s.coords());
    let diff: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    let denom = ((1.0 - norm2(a)) * (1.0 - norm2(b))).sqrt();
    Ok(2.0 * (diff.sqrt() / denom).asinh())
}

pub fn tempered_klein(r: &DiskPoint, s: &DiskPoint, temp: Temperature) -> Result<f64> {
    Ok(psi(klein_distance(r, s)?, temp, CHI))
}

pub fn tempered_poincare(r: &DiskPoint, s: &DiskPoint, temp: Temperature) -> Result<f64> {
    Ok(psi(poincare_distance(r, s)?, temp, CHI))
}

/// `((1 − √(1−‖k‖²)) / ‖k‖²) k`, written as `k / (1 + √(1−‖k‖²))` so the origin needs no
/// special case.
pub fn klein_to_poincare(k: &DiskPoint) -> DiskPoint {
    let f = 1.0 / (1.0 + (1.0 - norm2(k.coords())).sqrt());
    DiskPoint {
        coords: k.coords().iter().map(|x| f * x).collect(),
    }
}

/// The inverse radial map `2p / (1 + ‖p‖²)`.
pub fn poincare_to_klein(p: &DiskPoint) -> DiskPoint {
    let f = 2.0 / (1.0 + norm2(p.coords()));
    DiskPoint {
        coords: p.coords().iter().map(|x| f * x).collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    Klein,
    Poincare,
}

impl Model {
    pub fn name(self) -> &'static str {
        match self {
            Model::Klein => "klein",
            Model::Poincare => "poincare",
        }
    }
}

/// The point on the geodesic from `r` to `s` whose tempered distance to `r` is `alpha`
/// times that of `s`, together with its Euclidean parameter along the Klein segment.
pub fn fractional_point_with_parameter(
    r: &DiskPoint,
    s: &DiskPoint,
    alpha: f64,
    temp: Temperature,
    model: Model,
) -> Result<(DiskPoint, f64)> {
    check_dims("fractional_point", r, s)?;
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::domain(
            "fractional_point",
            format!("alpha = {alpha} outside [0, 1]"),
        ));
    }
    if r == s {
        return Err(Error::domain("fractional_point", "endpoints coincide"));
    }
    // Klein geodesics are chords; Poincaré is solved through the radial isometry.
    let (kr, ks) = match model {
        Model::Klein => (r.clone(), s.clone()),
        Model::Poincare => (poincare_to_klein(r), poincare_to_klein(s)),
    };
    let along = |lambda: f64| DiskPoint {
        coords: kr
            .coords()
            .iter()
            .zip(ks.coords())
            .map(|(a, b)| a + lambda * (b - a))
            .collect(),
    };
    let target = alpha * tempered_klein(&kr, &ks, temp)?;
    let (mut lo, mut hi) = (0.0, 1.0);
    let mut steps = 0;
    while hi - lo > BISECTION_TOLERANCE {
        if steps == MAX_BISECTIONS {
            return Err(Error::NoConvergence {
                op: "fractional_point",
                iterations: steps,
            });
        }
        let mid = 0.5 * (lo + hi);
        if tempered_klein(&kr, &along(mid), temp)? < target {
            lo = mid;
        } else {
            hi = mid;
        }
        steps += 1;
    }
    let lambda = match alpha {
        0.0 => 0.0,
        1.0 => 1.0,
        _ => 0.5 * (lo + hi),
    };
    let k = along(lambda);
    let point = match model {
        Model::Klein => k,
        Model::Poincare => klein_to_poincare(&k),
    };
    Ok((point, lambda))
}

pub fn fractional_point(
    r: &DiskPoint,
    s: &DiskPoint,
    alpha: f64,
    temp: Temperature,
    model: Model,
) -> Result<DiskPoint> {
    fractional_point_with_parameter(r, s, alpha, temp, model).map(|(p, _)| p)
}
