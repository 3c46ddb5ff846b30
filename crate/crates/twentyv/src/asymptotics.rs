//! Large-`n` one-point function in parametric form.
//!
//! Everything is parametrized by an angle `ξ`: the six-vertex spectral
//! variable `σ(ξ)`, the exponential growth rate `f(σ(ξ))`, the twenty-vertex
//! variable `τ(ξ)` and the mean escape height `r(τ(ξ)) = τ/τ′ · f′`.
//!
//! The formula bodies are generic over [`Scalar`] so they can be evaluated on
//! dual numbers (exact `ξ`-derivatives) and at complex `μ`.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::weights::AngleParams;
use std::f64::consts::PI;

/// Below this `|ξ|` the bracket `α·cot(αξ) − cot ξ` is taken from its series.
pub const SERIES_CUTOFF: f64 = 1e-4;

/// Angles as generic scalars; `μ` may be complex.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Angles<T> {
    pub eta: T,
    pub lambda: T,
    pub mu: T,
}

impl<T: Scalar> Angles<T> {
    pub fn new(eta: T, lambda: T, mu: T) -> Self {
        Angles { eta, lambda, mu }
    }

    pub fn from_params(p: &AngleParams) -> Self {
        Angles { eta: T::cst(p.eta()), lambda: T::cst(p.lambda()), mu: T::cst(p.mu()) }
    }

    /// `μ → −μ`.
    pub fn mirrored(&self) -> Self {
        Angles { mu: -self.mu, ..*self }
    }

    /// Lifts the angles to dual numbers with zero derivative.
    pub fn lift(&self) -> Angles<crate::scalar::Dual<T>> {
        use crate::scalar::Dual;
        Angles { eta: Dual::constant(self.eta), lambda: Dual::constant(self.lambda), mu: Dual::constant(self.mu) }
    }
}

pub fn alpha(eta: f64) -> f64 {
    PI / (PI - 2.0 * eta)
}

fn alpha_of<T: Scalar>(eta: T) -> T {
    T::cst(PI) / (T::cst(PI) - T::cst(2.0) * eta)
}

fn half<T: Scalar>(x: T) -> T {
    x / T::cst(2.0)
}

/// `α·cot(αξ) − cot ξ`, finite at `ξ = 0`.
pub fn cot_difference<T: Scalar>(xi: T, eta: T) -> T {
    let al = alpha_of(eta);
    if xi.re().abs() < SERIES_CUTOFF {
        let a2 = al * al;
        let a4 = a2 * a2;
        let a6 = a4 * a2;
        let one = T::cst(1.0);
        let x2 = xi * xi;
        -(a2 - one) * xi / T::cst(3.0)
            - (a4 - one) * xi * x2 / T::cst(45.0)
            - T::cst(2.0) * (a6 - one) * xi * x2 * x2 / T::cst(945.0)
    } else {
        al * (al * xi).cot() - xi.cot()
    }
}

/// `cot(ξ+λ−η) − cot ξ + α·cot(αξ) − α·cot(α(ξ+λ−η))`.
pub fn bracket<T: Scalar>(xi: T, a: &Angles<T>) -> T {
    let al = alpha_of(a.eta);
    let u = xi + a.lambda - a.eta;
    u.cot() - al * (al * u).cot() + cot_difference(xi, a.eta)
}

/// `sin(ξ+λ+η)·sin(ξ+λ−η)`.
pub fn p1<T: Scalar>(xi: T, a: &Angles<T>) -> T {
    (xi + a.lambda + a.eta).sin() * (xi + a.lambda - a.eta).sin()
}

/// `sin(ξ+(λ−η+μ)/2)·sin(ξ+(λ+3η+μ)/2)`.
pub fn p2<T: Scalar>(xi: T, a: &Angles<T>) -> T {
    let three = T::cst(3.0);
    (xi + half(a.lambda - a.eta + a.mu)).sin() * (xi + half(a.lambda + three * a.eta + a.mu)).sin()
}

pub fn sigma_of<T: Scalar>(xi: T, a: &Angles<T>) -> T {
    (a.lambda + a.eta).sin() * (xi + a.lambda - a.eta).sin()
        / ((a.lambda - a.eta).sin() * (xi + a.lambda + a.eta).sin())
}

/// `sin(αξ)/(α·sin ξ)`, equal to one at `ξ = 0`.
fn sine_ratio<T: Scalar>(xi: T, eta: T) -> T {
    let al = alpha_of(eta);
    if xi.re().abs() < SERIES_CUTOFF {
        let a2 = al * al;
        let x2 = xi * xi;
        T::cst(1.0)
            + (T::cst(1.0) - a2) * x2 / T::cst(6.0)
            + (T::cst(7.0) - T::cst(10.0) * a2 + T::cst(3.0) * a2 * a2) * x2 * x2 / T::cst(360.0)
    } else {
        (al * xi).sin() / (al * xi.sin())
    }
}

pub fn f_of<T: Scalar>(xi: T, a: &Angles<T>) -> T {
    let al = alpha_of(a.eta);
    let le = a.lambda - a.eta;
    ((al * le).sin() * (xi + le).sin() * sine_ratio(xi, a.eta) / (le.sin() * (al * (xi + le)).sin())).ln()
}

pub fn tau_of<T: Scalar>(xi: T, a: &Angles<T>) -> T {
    let three = T::cst(3.0);
    let hp = half(a.lambda + three * a.eta + a.mu);
    let hq = half(a.lambda - a.eta + a.mu);
    (a.lambda + a.eta).sin() * hp.sin() * (xi + a.lambda - a.eta).sin() * (xi + hq).sin()
        / ((a.lambda - a.eta).sin() * hq.sin() * (xi + a.lambda + a.eta).sin() * (xi + hp).sin())
}

pub fn g_of<T: Scalar>(xi: T, a: &Angles<T>) -> T {
    let hp = half(a.lambda + T::cst(3.0) * a.eta + a.mu);
    (xi + a.lambda - a.eta).sin() * hp.sin() / ((a.lambda - a.eta).sin() * (xi + hp).sin())
}

/// `bracket · P1` with the poles of `α·cot(α(ξ+λ−η))` cancelled against the
/// zeros of `P1` at `ξ+λ−η = 0` and `ξ+λ+η = π`.
pub fn bracket_p1<T: Scalar>(xi: T, a: &Angles<T>) -> T {
    let two = T::cst(2.0);
    let u = xi + a.lambda - a.eta;
    let w = T::cst(PI) - two * a.eta - u;
    let al = alpha_of(a.eta);
    // −α·cot(αu)·P1, in whichever form is regular
    let pole = if w.re().abs() < u.re().abs() {
        u.sin() * (al * w).cos() / sine_ratio(w, a.eta)
    } else {
        -(u + two * a.eta).sin() * (al * u).cos() / sine_ratio(u, a.eta)
    };
    u.cos() * (u + two * a.eta).sin() + pole + cot_difference(xi, a.eta) * p1(xi, a)
}

pub fn r_of<T: Scalar>(xi: T, a: &Angles<T>) -> T {
    let (q1, q2) = (p1(xi, a), p2(xi, a));
    bracket_p1(xi, a) * q2 / ((T::cst(2.0) * a.eta).sin() * (q1 + q2))
}

fn check_range(xi: f64, lo: f64, hi: f64) -> Result<()> {
    let tol = 1e-12;
    if !(xi.is_finite() && xi >= lo - tol && xi <= hi + tol) {
        return Err(Error::Range(format!("xi={xi} outside [{lo}, {hi}]")));
    }
    Ok(())
}

/// `ξ`-range on which `τ(ξ)` and `r(τ(ξ))` are used: from the shear endpoint
/// `−(λ−η+μ)/2` to the normal far endpoint `π−λ−η`.
pub fn xi_range(p: &AngleParams) -> (f64, f64) {
    (-(p.lambda() - p.eta() + p.mu()) / 2.0, PI - p.lambda() - p.eta())
}

pub fn sigma_xi(xi: f64, p: &AngleParams) -> Result<f64> {
    check_range(xi, 0.0, PI - p.lambda() - p.eta())?;
    Ok(sigma_of(xi, &Angles::from_params(p)))
}

/// `f(σ(ξ))` on `[0, π−λ−η)`, continuous at `ξ = 0` with value zero.
pub fn f_sigma(xi: f64, p: &AngleParams) -> Result<f64> {
    let hi = PI - p.lambda() - p.eta();
    check_range(xi, 0.0, hi)?;
    if (xi - hi).abs() < 1e-12 {
        return Err(Error::Range("f diverges at the far endpoint".into()));
    }
    Ok(f_of(xi, &Angles::from_params(p)))
}

pub fn tau_xi(xi: f64, p: &AngleParams) -> Result<f64> {
    let (lo, hi) = xi_range(p);
    check_range(xi, lo, hi)?;
    Ok(tau_of(xi, &Angles::from_params(p)))
}

pub fn r_xi(xi: f64, p: &AngleParams) -> Result<f64> {
    let (lo, hi) = xi_range(p);
    check_range(xi, lo, hi)?;
    Ok(r_of(xi, &Angles::from_params(p)))
}

pub fn g_xi(xi: f64, p: &AngleParams) -> Result<f64> {
    let (lo, hi) = xi_range(p);
    check_range(xi, lo, hi)?;
    Ok(g_of(xi, &Angles::from_params(p)))
}

/// `τ̃(ξ)`: [`tau_xi`] at `−μ`.
pub fn tilde_tau_xi(xi: f64, p: &AngleParams) -> Result<f64> {
    tau_xi(xi, &p.mirrored())
}

/// `r̃(τ̃(ξ))`: [`r_xi`] at `−μ`.
pub fn tilde_r_xi(xi: f64, p: &AngleParams) -> Result<f64> {
    r_xi(xi, &p.mirrored())
}

/// `τ(ξ)` on the line `μ = λ − 5η`.
pub fn tau_special(xi: f64, eta: f64, lambda: f64) -> f64 {
    (lambda + eta).sin() * (xi + lambda - 3.0 * eta).sin() / ((lambda - 3.0 * eta).sin() * (xi + lambda + eta).sin())
}

/// `r(τ(ξ))` on the line `μ = λ − 5η`.
pub fn r_special(xi: f64, eta: f64, lambda: f64) -> f64 {
    let a = Angles::new(eta, lambda, lambda - 5.0 * eta);
    bracket(xi, &a) * (xi + lambda + eta).sin() * (xi + lambda - 3.0 * eta).sin() / (4.0 * eta).sin()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alpha_values() {
        assert!((alpha(PI / 8.0) - 4.0 / 3.0).abs() < 1e-15);
        assert!((alpha(PI / 6.0) - 1.5).abs() < 1e-15);
        assert!((alpha(1e-12) - 1.0).abs() < 1e-11);
    }

    #[test]
    fn series_matches_direct_evaluation() {
        let eta = 0.37;
        let al = alpha(eta);
        let x: f64 = 1e-3;
        let direct = al / (al * x).tan() - 1.0 / x.tan();
        let a2 = al * al;
        let series =
            -(a2 - 1.0) * x / 3.0 - (a2 * a2 - 1.0) * x.powi(3) / 45.0 - 2.0 * (a2.powi(3) - 1.0) * x.powi(5) / 945.0;
        assert!((direct - series).abs() < 1e-8);
        assert_eq!(cot_difference(0.0, eta), 0.0);
    }

    #[test]
    fn normalizations_at_zero() {
        let p = AngleParams::new(0.3, 1.5, 0.4).unwrap();
        assert!((sigma_xi(0.0, &p).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(f_sigma(0.0, &p).unwrap(), 0.0);
        assert!((tau_xi(0.0, &p).unwrap() - 1.0).abs() < 1e-15);
        assert!(f_sigma(-0.1, &p).is_err());
    }
}
