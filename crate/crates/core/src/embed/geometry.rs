//! The four target geometries and their chart coordinates.
//!
//! - Euclidean: `R^dim`.
//! - Hyperboloid: `y ∈ R^dim` lifted to `(√(1+‖y‖²), y)` on the upper sheet.
//! - Hilbert simplex: log-coordinates `y ∈ R^{dim+1}` of a point of the open
//!   `dim`-simplex, defined up to an additive constant; the distance is the variation
//!   semi-norm `max_k (y−y')_k − min_k (y−y')_k`.
//! - Tempered Hilbert: `log_t exp` of the Hilbert simplex distance.

use crate::error::{Error, Result};
use crate::talgebra::Temperature;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GeometryKind {
    Euclidean,
    Hyperboloid,
    HilbertSimplex,
    THilbert(Temperature),
}

impl GeometryKind {
    pub fn name(&self) -> &'static str {
        match self {
            GeometryKind::Euclidean => "euclidean",
            GeometryKind::Hyperboloid => "hyperboloid",
            GeometryKind::HilbertSimplex => "hilbert_simplex",
            GeometryKind::THilbert(_) => "t_hilbert",
        }
    }

    /// Temperature of the Hilbert-family kinds.
    pub fn temperature(&self) -> Option<f64> {
        match self {
            GeometryKind::HilbertSimplex => Some(1.0),
            GeometryKind::THilbert(t) => Some(t.t()),
            _ => None,
        }
    }

    /// The four kinds compared by the harness, with the given temperature for the last.
    pub fn all(temp: Temperature) -> [GeometryKind; 4] {
        [
            GeometryKind::Euclidean,
            GeometryKind::Hyperboloid,
            GeometryKind::HilbertSimplex,
            GeometryKind::THilbert(temp),
        ]
    }

    fn is_hilbert(&self) -> bool {
        matches!(
            self,
            GeometryKind::HilbertSimplex | GeometryKind::THilbert(_)
        )
    }

    /// Number of chart coordinates for a manifold of dimension `dim`.
    pub fn chart_dim(&self, dim: usize) -> usize {
        if self.is_hilbert() {
            dim + 1
        } else {
            dim
        }
    }

    /// Brings a chart point back to its canonical representative: Hilbert
    /// log-coordinates are centred. The other charts are global.
    pub fn retract(&self, y: &mut [f64]) {
        if self.is_hilbert() {
            let mean = y.iter().sum::<f64>() / y.len() as f64;
            y.iter_mut().for_each(|v| *v -= mean);
        }
    }

    fn outer(&self, h: f64) -> (f64, f64) {
        match self {
            GeometryKind::THilbert(t) => (t.log_exp(h), (t.one_minus() * h).exp()),
            _ => (h, 1.0),
        }
    }

    /// Exact distance between two chart points.
    pub fn distance(&self, a: &[f64], b: &[f64]) -> Result<f64> {
        if a.len() != b.len() {
            return Err(Error::Dimension {
                op: "geometry_distance",
                left: a.len(),
                right: b.len(),
            });
        }
        let d = match self {
            GeometryKind::Euclidean => euclidean(a, b),
            GeometryKind::Hyperboloid => {
                let (q, ..) = hyperboloid_chord(a, b);
                2.0 * (q.sqrt() / 2.0).asinh()
            }
            GeometryKind::HilbertSimplex | GeometryKind::THilbert(_) => {
                let (lo, hi) = a
                    .iter()
                    .zip(b)
                    .map(|(x, y)| x - y)
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), z| {
                        (lo.min(z), hi.max(z))
                    });
                self.outer(hi - lo).0
            }
        };
        if d.is_finite() {
            Ok(d)
        } else {
            Err(Error::domain(
                "geometry_distance",
                format!("{} chart violation", self.name()),
            ))
        }
    }

    /// The distance minimized during optimization (smoothed by `smoothing` for the
    /// Hilbert family) and its gradient with respect to `a`.
    pub fn smoothed_distance_grad(&self, a: &[f64], b: &[f64], smoothing: f64) -> (f64, Vec<f64>) {
        match self {
            GeometryKind::Euclidean => {
                let d = euclidean(a, b);
                let g = if d > 0.0 {
                    a.iter().zip(b).map(|(x, y)| (x - y) / d).collect()
                } else {
                    vec![0.0; a.len()]
                };
                (d, g)
            }
            GeometryKind::Hyperboloid => {
                let (q, dx0, x0a) = hyperboloid_chord(a, b);
                let d = 2.0 * (q.sqrt() / 2.0).asinh();
                if q <= 0.0 {
                    return (d, vec![0.0; a.len()]);
                }
                // d = 2 asinh(√q/2), ∂d/∂q = 1/(√q √(4+q))
                let dd_dq = 1.0 / (q.sqrt() * (4.0 + q).sqrt());
                let g = a
                    .iter()
                    .zip(b)
                    .map(|(x, y)| dd_dq * 2.0 * ((x - y) - dx0 * x / x0a))
                    .collect();
                (d, g)
            }
            GeometryKind::HilbertSimplex | GeometryKind::THilbert(_) => {
                let z: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
                let (up, w_up) = soft_max(&z, smoothing, 1.0);
                let (down, w_down) = soft_max(&z, smoothing, -1.0);
                let (value, slope) = self.outer(up + down);
                let g = w_up
                    .iter()
                    .zip(&w_down)
                    .map(|(u, v)| slope * (u - v))
                    .collect();
                (value, g)
            }
        }
    }
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Squared Minkowski chord `q = ‖Δy‖² − (Δx₀)²`, `Δx₀` and `x₀(a)`; `Δx₀` is computed as
/// `(‖a‖² − ‖b‖²)/(x₀(a) + x₀(b))` to avoid cancellation.
fn hyperboloid_chord(a: &[f64], b: &[f64]) -> (f64, f64, f64) {
    let (na, nb): (f64, f64) = (a.iter().map(|x| x * x).sum(), b.iter().map(|x| x * x).sum());
    let (x0a, x0b) = ((1.0 + na).sqrt(), (1.0 + nb).sqrt());
    let dx0 = (na - nb) / (x0a + x0b);
    let dy: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    ((dy - dx0 * dx0).max(0.0), dx0, x0a)
}

/// `LSE_1(sign · z, T)` and its softmax weights.
fn soft_max(z: &[f64], smoothing: f64, sign: f64) -> (f64, Vec<f64>) {
    let m = z.iter().map(|v| sign * v).fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = z
        .iter()
        .map(|v| (smoothing * (sign * v - m)).exp())
        .collect();
    let s: f64 = e.iter().sum();
    (
        m + s.ln() / smoothing,
        e.into_iter().map(|x| x / s).collect(),
    )
}
