//! Scalar abstraction shared by the closed-form curve formulas.
//!
//! The same formula bodies are evaluated over `f64`, over `Complex64` (for
//! the imaginary-`μ` limit to the six-vertex curve) and over [`Dual`] numbers,
//! which carry an exact first derivative alongside the value.

use num_complex::Complex64;
use std::ops::{Add, Div, Mul, Neg, Sub};

pub trait Scalar:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Div<Output = Self> + Neg<Output = Self>
{
    fn cst(x: f64) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn ln(self) -> Self;
    fn sqrt(self) -> Self;
    /// Real part of the underlying value, used for branch decisions only.
    fn re(self) -> f64;

    fn cot(self) -> Self {
        self.cos() / self.sin()
    }
    fn powi(self, k: u32) -> Self {
        (0..k).fold(Self::cst(1.0), |acc, _| acc * self)
    }
}

impl Scalar for f64 {
    fn cst(x: f64) -> Self {
        x
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn re(self) -> f64 {
        self
    }
}

impl Scalar for Complex64 {
    fn cst(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn sin(self) -> Self {
        Complex64::sin(self)
    }
    fn cos(self) -> Self {
        Complex64::cos(self)
    }
    fn ln(self) -> Self {
        Complex64::ln(self)
    }
    fn sqrt(self) -> Self {
        Complex64::sqrt(self)
    }
    fn re(self) -> f64 {
        self.re
    }
}

/// Forward-mode dual number `v + d·ε` with `ε² = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dual<T> {
    pub v: T,
    pub d: T,
}

impl<T: Scalar> Dual<T> {
    /// The independent variable at `x` (derivative one).
    pub fn var(x: T) -> Self {
        Dual { v: x, d: T::cst(1.0) }
    }
    pub fn constant(x: T) -> Self {
        Dual { v: x, d: T::cst(0.0) }
    }
}

impl<T: Scalar> Add for Dual<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Dual { v: self.v + o.v, d: self.d + o.d }
    }
}

impl<T: Scalar> Sub for Dual<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Dual { v: self.v - o.v, d: self.d - o.d }
    }
}

impl<T: Scalar> Mul for Dual<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Dual { v: self.v * o.v, d: self.d * o.v + self.v * o.d }
    }
}

impl<T: Scalar> Div for Dual<T> {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let q = self.v / o.v;
        Dual { v: q, d: (self.d - q * o.d) / o.v }
    }
}

impl<T: Scalar> Neg for Dual<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Dual { v: -self.v, d: -self.d }
    }
}

impl<T: Scalar> Scalar for Dual<T> {
    fn cst(x: f64) -> Self {
        Dual::constant(T::cst(x))
    }
    fn sin(self) -> Self {
        Dual { v: self.v.sin(), d: self.d * self.v.cos() }
    }
    fn cos(self) -> Self {
        Dual { v: self.v.cos(), d: -(self.d * self.v.sin()) }
    }
    fn ln(self) -> Self {
        Dual { v: self.v.ln(), d: self.d / self.v }
    }
    fn sqrt(self) -> Self {
        let s = self.v.sqrt();
        Dual { v: s, d: self.d / (T::cst(2.0) * s) }
    }
    fn re(self) -> f64 {
        self.v.re()
    }
    fn cot(self) -> Self {
        let s = self.v.sin();
        let c = self.v.cos();
        Dual { v: c / s, d: -(self.d / (s * s)) }
    }
}

/// Value and first derivative of `f` at `x`.
pub fn with_derivative<T: Scalar, F: Fn(Dual<T>) -> Dual<T>>(f: F, x: T) -> (T, T) {
    let y = f(Dual::var(x));
    (y.v, y.d)
}
