//! Tempered Funk and Hilbert distances on convex bodies.

use crate::error::{Error, Result};
use crate::talgebra::Temperature;

/// Tolerance on `Σ x_i = 1` for points of the open probability simplex.
const SIMPLEX_SLACK: f64 = 1e-9;

/// A convex body supporting closed-form membership and ray–boundary intersection.
#[derive(Debug, Clone, PartialEq)]
pub enum ConvexDomain {
    /// The open probability simplex `{x ∈ R^d : x_i > 0, Σ x_i = 1}`.
    Simplex { dim: usize },
    /// The open Euclidean ball.
    Ball { center: Vec<f64>, radius: f64 },
    /// The open half-space `{x : ν·x < c}`.
    HalfSpace { normal: Vec<f64>, offset: f64 },
}

/// Where the ray from `r` through `s` leaves the domain.
#[derive(Debug, Clone, PartialEq)]
pub enum Boundary {
    Point(Vec<f64>),
    AtInfinity,
}

/// Norm used in the Funk ratio. The Hilbert cross-ratio does not depend on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Norm {
    L1,
    #[default]
    L2,
}

impl Norm {
    pub fn eval(self, v: &[f64]) -> f64 {
        match self {
            Norm::L1 => v.iter().map(|x| x.abs()).sum(),
            Norm::L2 => v.iter().map(|x| x * x).sum::<f64>().sqrt(),
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn diff(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

impl ConvexDomain {
    pub fn unit_ball(dim: usize) -> Self {
        ConvexDomain::Ball {
            center: vec![0.0; dim],
            radius: 1.0,
        }
    }

    pub fn dimension(&self) -> usize {
        match self {
            ConvexDomain::Simplex { dim } => *dim,
            ConvexDomain::Ball { center, .. } => center.len(),
            ConvexDomain::HalfSpace { normal, .. } => normal.len(),
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        if x.len() != self.dimension() || x.iter().any(|v| !v.is_finite()) {
            return false;
        }
        match self {
            ConvexDomain::Simplex { .. } => {
                x.iter().all(|&v| v > 0.0) && (x.iter().sum::<f64>() - 1.0).abs() < SIMPLEX_SLACK
            }
            ConvexDomain::Ball { center, radius } => Norm::L2.eval(&diff(x, center)) < *radius,
            ConvexDomain::HalfSpace { normal, offset } => dot(normal, x) < *offset,
        }
    }

    pub(crate) fn require(&self, op: &'static str, x: &[f64]) -> Result<()> {
        if x.len() != self.dimension() {
            return Err(Error::Dimension {
                op,
                left: self.dimension(),
                right: x.len(),
            });
        }
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::OutsideDomain { op })
        }
    }

    /// The exit parameter `λ ≥ 0` of the ray `x + λ v`, or `None` if the ray stays
    /// inside. `x` must be interior.
    pub(crate) fn exit_parameter(&self, x: &[f64], v: &[f64]) -> Option<f64> {
        match self {
            ConvexDomain::Simplex { .. } => x
                .iter()
                .zip(v)
                .filter(|(_, &vi)| vi < 0.0)
                .map(|(&xi, &vi)| -xi / vi)
                .reduce(f64::min),
            ConvexDomain::Ball { center, radius } => {
                // |x - c + λ v|² = R², positive root
                let w = diff(x, center);
                let a = dot(v, v);
                if a == 0.0 {
                    return None;
                }
                let b = dot(&w, v);
                let c = dot(&w, &w) - radius * radius;
                let disc = (b * b - a * c).max(0.0);
                // c < 0 inside; the stable form of (-b + √disc)/a
                Some(if b <= 0.0 {
                    (-b + disc.sqrt()) / a
                } else {
                    -c / (b + disc.sqrt())
                })
            }
            ConvexDomain::HalfSpace { normal, offset } => {
                let rate = dot(normal, v);
                (rate > 0.0).then(|| (offset - dot(normal, x)) / rate)
            }
        }
    }
}

/// The point where the ray from `r` through `s` meets the boundary.
pub fn ray_boundary(domain: &ConvexDomain, r: &[f64], s: &[f64]) -> Result<Boundary> {
    domain.require("ray_boundary", r)?;
    domain.require("ray_boundary", s)?;
    let v = diff(s, r);
    if v.iter().all(|&x| x == 0.0) {
        return Err(Error::domain("ray_boundary", "r and s coincide"));
    }
    Ok(match domain.exit_parameter(r, &v) {
        None => Boundary::AtInfinity,
        Some(lambda) => {
            let mut b: Vec<f64> = r.iter().zip(&v).map(|(x, y)| x + lambda * y).collect();
            if let ConvexDomain::Simplex { .. } = domain {
                // snap the face that was hit
                for bi in b.iter_mut() {
                    if bi.abs() < 1e-15 {
                        *bi = 0.0;
                    }
                }
            }
            Boundary::Point(b)
        }
    })
}

/// `log_t(‖r − s̄‖ / ‖s − s̄‖)` measured in `norm`; 0 for `r = s` or `s̄` at infinity.
pub fn t_funk_domain_with_norm(
    domain: &ConvexDomain,
    r: &[f64],
    s: &[f64],
    temp: Temperature,
    norm: Norm,
) -> Result<f64> {
    domain.require("t_funk_domain", r)?;
    domain.require("t_funk_domain", s)?;
    if r == s {
        return Ok(0.0);
    }
    match ray_boundary(domain, r, s)? {
        Boundary::AtInfinity => Ok(0.0),
        Boundary::Point(b) => {
            let ratio = norm.eval(&diff(r, &b)) / norm.eval(&diff(s, &b));
            Ok(temp.log(ratio))
        }
    }
}

pub fn t_funk_domain(
    domain: &ConvexDomain,
    r: &[f64],
    s: &[f64],
    temp: Temperature,
) -> Result<f64> {
    t_funk_domain_with_norm(domain, r, s, temp, Norm::L2)
}

/// `ρ_FD(r, s) ⊕_t ρ_FD(s, r)`, the tempered Hilbert distance.
pub fn t_hilbert_domain_with_norm(
    domain: &ConvexDomain,
    r: &[f64],
    s: &[f64],
    temp: Temperature,
    norm: Norm,
) -> Result<f64> {
    let a = t_funk_domain_with_norm(domain, r, s, temp, norm)?;
    let b = t_funk_domain_with_norm(domain, s, r, temp, norm)?;
    Ok(temp.add(a, b))
}

pub fn t_hilbert_domain(
    domain: &ConvexDomain,
    r: &[f64],
    s: &[f64],
    temp: Temperature,
) -> Result<f64> {
    t_hilbert_domain_with_norm(domain, r, s, temp, Norm::L2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn temp(t: f64) -> Temperature {
        Temperature::new(t).unwrap()
    }

    #[test]
    fn ray_examples() {
        let ball = ConvexDomain::unit_ball(2);
        assert_eq!(
            ray_boundary(&ball, &[0.0, 0.0], &[0.5, 0.0]).unwrap(),
            Boundary::Point(vec![1.0, 0.0])
        );
        let h = ConvexDomain::HalfSpace {
            normal: vec![1.0, 0.0],
            offset: 1.0,
        };
        assert_eq!(
            ray_boundary(&h, &[0.0, 0.0], &[-1.0, 0.0]).unwrap(),
            Boundary::AtInfinity
        );
        let simplex = ConvexDomain::Simplex { dim: 3 };
        let c = [1.0 / 3.0; 3];
        let toward = [0.5, 0.25, 0.25];
        match ray_boundary(&simplex, &c, &toward).unwrap() {
            Boundary::Point(b) => {
                assert_relative_eq!(b[0], 1.0, epsilon = 1e-15);
                assert_eq!(b[1], 0.0);
                assert_eq!(b[2], 0.0);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(ray_boundary(&ball, &[0.0, 0.0], &[2.0, 0.0]).is_err());
    }

    #[test]
    fn funk_on_an_interval() {
        let seg = ConvexDomain::Ball {
            center: vec![0.5],
            radius: 0.5,
        };
        assert_relative_eq!(
            t_funk_domain(&seg, &[0.5], &[0.75], temp(1.0)).unwrap(),
            2f64.ln(),
            epsilon = 1e-15
        );
        assert_relative_eq!(
            t_funk_domain(&seg, &[0.5], &[0.75], temp(0.5)).unwrap(),
            2.0 * (2f64.sqrt() - 1.0),
            epsilon = 1e-15
        );
        assert_eq!(t_funk_domain(&seg, &[0.3], &[0.3], temp(0.5)).unwrap(), 0.0);
    }

    #[test]
    fn hilbert_on_the_disk_is_twice_klein() {
        let ball = ConvexDomain::unit_ball(2);
        let (r, s) = ([0.1, -0.3], [0.4, 0.2]);
        let rs = dot(&r, &s);
        let klein = ((1.0 - rs) / ((1.0 - dot(&r, &r)) * (1.0 - dot(&s, &s))).sqrt()).acosh();
        let h = t_hilbert_domain(&ball, &r, &s, temp(1.0)).unwrap();
        assert_relative_eq!(h, 2.0 * klein, max_relative = 1e-13);
        let l1 = t_hilbert_domain_with_norm(&ball, &r, &s, temp(1.3), Norm::L1).unwrap();
        let l2 = t_hilbert_domain(&ball, &r, &s, temp(1.3)).unwrap();
        assert_relative_eq!(l1, l2, max_relative = 1e-13);
    }

    #[test]
    fn half_space_funk_vanishes_on_contained_rays() {
        let h = ConvexDomain::HalfSpace {
            normal: vec![1.0, 0.0],
            offset: 1.0,
        };
        assert_eq!(
            t_funk_domain(&h, &[0.0, 0.0], &[-1.0, 0.5], temp(0.7)).unwrap(),
            0.0
        );
        assert!(t_funk_domain(&h, &[-1.0, 0.5], &[0.0, 0.0], temp(0.7)).unwrap() > 0.0);
    }
}
