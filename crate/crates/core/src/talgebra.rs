//! The deformed scalar algebra.
//!
//! Tempered logarithm and exponential
//!
//! ```text
//! log_t x = (x^{1-t} - 1) / (1 - t)
//! exp_t y = [1 + (1 - t) y]_+^{1/(1-t)}
//! ```
//!
//! together with the tempered addition `a ⊕_t b = log_t(exp_t a · exp_t b)` and
//! subtraction `a ⊖_t b = log_t(exp_t a / exp_t b)`. Both reduce to the ordinary
//! operations at `t = 1`.
//!
//! A scalar `x` is *regular* at temperature `t` when `1 + (1 - t) x > 0`, i.e. when
//! `exp_t x` is finite and strictly positive. For `t < 1` the irregular half-line is
//! where `exp_t` clips to zero; for `t > 1` it lies beyond the pole of `exp_t`.

use crate::error::{Error, Result};

/// `|t - 1|` below which the classic `ln`/`exp` branch is used.
pub const UNIT_DISPATCH: f64 = 1e-10;

/// The deformation parameter `t < 2` with its conjugate exponent `t* = 1/(2 - t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Temperature {
    t: f64,
    t_star: f64,
}

impl Temperature {
    pub const ONE: Temperature = Temperature {
        t: 1.0,
        t_star: 1.0,
    };

    pub fn new(t: f64) -> Result<Self> {
        if !t.is_finite() || t >= 2.0 {
            return Err(Error::InvalidTemperature(t));
        }
        Ok(Self::unrestricted(t))
    }

    // Only the co-simplex lift needs a deformation at t* >= 2.
    fn unrestricted(t: f64) -> Self {
        Temperature {
            t,
            t_star: 1.0 / (2.0 - t),
        }
    }

    #[inline]
    pub fn t(&self) -> f64 {
        self.t
    }

    #[inline]
    pub fn t_star(&self) -> f64 {
        self.t_star
    }

    /// `1 - t`.
    #[inline]
    pub fn one_minus(&self) -> f64 {
        1.0 - self.t
    }

    #[inline]
    pub fn is_one(&self) -> bool {
        (self.t - 1.0).abs() < UNIT_DISPATCH
    }

    /// The deformation at parameter `t*`, used when lifting a tempered measure to its
    /// co-density. This is the one place a parameter `>= 2` can appear (for `t >= 1.5`).
    pub fn conjugate(&self) -> Temperature {
        Self::unrestricted(self.t_star)
    }

    /// The deformation at parameter `t - 1`, used by the negative tempered entropy.
    pub fn shifted_down(&self) -> Temperature {
        Self::unrestricted(self.t - 1.0)
    }

    /// `1 + (1 - t) x > 0`.
    #[inline]
    pub fn is_regular(&self, x: f64) -> bool {
        self.is_one() || 1.0 + self.one_minus() * x > 0.0
    }

    /// Tempered logarithm without argument checks. Returns `-1/(1-t)` at `x = 0` for
    /// `t < 1`, `1/(t-1)` at `x = +inf` for `t > 1`, and NaN for `x < 0`.
    #[inline]
    pub fn log(&self, x: f64) -> f64 {
        if self.is_one() {
            x.ln()
        } else {
            let k = self.one_minus();
            (k * x.ln()).exp_m1() / k
        }
    }

    /// Tempered exponential. Clips to `0` for `t < 1` and returns `+inf` past the pole
    /// for `t > 1`.
    #[inline]
    pub fn exp(&self, y: f64) -> f64 {
        if self.is_one() {
            return y.exp();
        }
        let k = self.one_minus();
        let base = k * y;
        if base > -1.0 {
            (base.ln_1p() / k).exp()
        } else if k > 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    }

    /// `a ⊕_t b = a + b + (1 - t) a b`, unchecked.
    #[inline]
    pub fn add(&self, a: f64, b: f64) -> f64 {
        if self.is_one() {
            a + b
        } else {
            a + b + self.one_minus() * (a * b)
        }
    }

    /// `a ⊖_t b = (a - b) / (1 + (1 - t) b)`, unchecked.
    #[inline]
    pub fn sub(&self, a: f64, b: f64) -> f64 {
        if self.is_one() {
            a - b
        } else {
            (a - b) / (1.0 + self.one_minus() * b)
        }
    }

    /// `⊖_t x = 0 ⊖_t x`, unchecked.
    #[inline]
    pub fn neg(&self, x: f64) -> f64 {
        self.sub(0.0, x)
    }

    /// `log_t(exp u)`, evaluated without forming `exp u`.
    #[inline]
    pub fn log_exp(&self, u: f64) -> f64 {
        if self.is_one() {
            u
        } else {
            let k = self.one_minus();
            (k * u).exp_m1() / k
        }
    }

    /// `(exp_t y)^{1-t} = 1 + (1 - t) y`, the factor by which `⊕_t` rescales its second
    /// operand.
    #[inline]
    pub fn scale(&self, y: f64) -> f64 {
        if self.is_one() {
            1.0
        } else {
            1.0 + self.one_minus() * y
        }
    }
}

/// Tempered logarithm, rejecting nonpositive arguments.
pub fn log_t(x: f64, temp: Temperature) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::domain(
            "log_t",
            format!("argument {x} is not positive"),
        ));
    }
    Ok(temp.log(x))
}

/// Tempered exponential. Clipping is defined behaviour and never an error.
pub fn exp_t(y: f64, temp: Temperature) -> f64 {
    temp.exp(y)
}

fn require_regular(op: &'static str, x: f64, temp: Temperature) -> Result<()> {
    if temp.is_regular(x) {
        Ok(())
    } else {
        Err(Error::domain(
            op,
            format!("exp_t({x}) is not finite and positive at t = {}", temp.t()),
        ))
    }
}

pub fn t_add(a: f64, b: f64, temp: Temperature) -> Result<f64> {
    require_regular("t_add", a, temp)?;
    require_regular("t_add", b, temp)?;
    Ok(temp.add(a, b))
}

pub fn t_sub(a: f64, b: f64, temp: Temperature) -> Result<f64> {
    require_regular("t_sub", b, temp)?;
    Ok(temp.sub(a, b))
}

pub fn t_neg(x: f64, temp: Temperature) -> Result<f64> {
    t_sub(0.0, x, temp)
}
