//! Tangent method for the escape path.
//!
//! The escape path leaving the last column at height `ℓ` and reaching the
//! bottom at horizontal distance `m` has partition function `≈ e^{n S(ℓ,m)}`.
//! `S` is the maximum over step densities `p3..p6` of an entropy-plus-weight
//! action. The line from `(1, ℓ)` with slope fixed by the saddle point of the
//! last-column refined partition function is tangent to the arctic curve.
//!
//! Stationarity reduces to two unknowns: with `u = L/(α1 A)` and
//! `v = M/(α2 A)` every density is `p_i = A α_i u^{a_i} v^{b_i}` and `(u, v)`
//! lies on the curve `Δ(u, v) = det(I − T) = 0`. On that curve `S = −ℓ ln u − m ln v`.

use crate::asymptotics::{p1, p2, r_of, tau_of, Angles};
use crate::error::{Error, Result};
use crate::numeric::{brent, det};
use crate::scalar::{Dual, Scalar};
use crate::weights::{compute_weights, inverted_weights, AngleParams, VertexWeights};
use std::f64::consts::PI;

/// `|α_i|` below this counts as zero and the step type is dropped.
pub const ALPHA_ZERO: f64 = 1e-12;

/// `(a_i, b_i, c_i)` exponents of `u`, `v` and `1/ω0` for steps 3..6.
const EXPONENTS: [(f64, f64, f64); 4] = [(1.0, 1.0, 1.0), (2.0, 1.0, 2.0), (1.0, 2.0, 2.0), (2.0, 2.0, 3.0)];

/// Coefficients of `det(I − T)`; `alpha[k]` is `α_{k+1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaCoeffs {
    pub alpha: [f64; 6],
}

impl AlphaCoeffs {
    /// `α_i` for `i` in `1..=6`.
    pub fn get(&self, i: usize) -> f64 {
        self.alpha[i - 1]
    }

    fn active(&self, k: usize) -> bool {
        self.alpha[k + 2].abs() > ALPHA_ZERO
    }

    /// `Δ(u, v) = 1 − α1 u − α2 v − α3 uv − α4 u²v − α5 uv² − α6 u²v²`.
    pub fn delta(&self, u: f64, v: f64) -> f64 {
        let a = self.alpha;
        1.0 - a[0] * u - a[1] * v - a[2] * u * v - a[3] * u * u * v - a[4] * u * v * v - a[5] * u * u * v * v
    }
}

pub fn alpha_coeffs(w: &VertexWeights) -> AlphaCoeffs {
    let [o0, o1, o2, o3, o4, o5, o6] = w.omega;
    AlphaCoeffs {
        alpha: [
            o1 / o0,
            o6 / o0,
            (o0 * o3 + o4 * o4 - o1 * o6) / (o0 * o0),
            (o2 * o2 - o1 * o3) / (o0 * o0),
            (o5 * o5 - o6 * o3) / (o0 * o0),
            (2.0 * o2 * o4 * o5 + o1 * o6 * o3 - o3 * o4 * o4 - o1 * o5 * o5 - o6 * o2 * o2) / (o0 * o0 * o0),
        ],
    }
}

/// Single-step transfer matrix of the escape path.
pub fn transfer_matrix(w: &VertexWeights, u: f64, v: f64) -> [[f64; 3]; 3] {
    let [o0, o1, o2, o3, o4, o5, o6] = w.omega;
    [
        [o1 * u / o0, o2 * u / o0, o4 * u / o0],
        [o2 * u * v / o0, o3 * u * v / o0, o5 * u * v / o0],
        [o4 * v / o0, o5 * v / o0, o6 * v / o0],
    ]
}

/// `det(I − T(u, v))` by direct elimination.
pub fn delta_det(w: &VertexWeights, u: f64, v: f64) -> f64 {
    let t = transfer_matrix(w, u, v);
    let m: Vec<Vec<f64>> =
        (0..3).map(|i| (0..3).map(|j| if i == j { 1.0 - t[i][j] } else { -t[i][j] }).collect()).collect();
    det(&m)
}

/// Which geometry the action describes. `Shear` evaluates at `1 − ℓ` and
/// expects the coefficients of [`inverted_weights`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    Normal,
    Shear,
}

/// A point of the action's domain; `p[k]` is `p_{k+3}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActionPoint {
    pub ell: f64,
    pub m: f64,
    pub p: [f64; 4],
}

struct Reduced {
    a: f64,
    l: f64,
    m: f64,
}

fn reduced(ell: f64, m: f64, p: &[f64; 4]) -> Reduced {
    let mut r = Reduced { a: ell + m, l: ell, m };
    for (k, &(ea, eb, ec)) in EXPONENTS.iter().enumerate() {
        r.a -= ec * p[k];
        r.l -= ea * p[k];
        r.m -= eb * p[k];
    }
    r
}

fn effective_ell(ell: f64, variant: Variant) -> f64 {
    match variant {
        Variant::Normal => ell,
        Variant::Shear => 1.0 - ell,
    }
}

fn xlnx_over(x: f64, a: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * (x / a).ln()
    }
}

/// `S(ℓ, m, p3..p6)`; steps with `α_i = 0` must have `p_i = 0`.
pub fn action(ap: &ActionPoint, al: &AlphaCoeffs, variant: Variant) -> Result<f64> {
    let ell = effective_ell(ap.ell, variant);
    let r = reduced(ell, ap.m, &ap.p);
    let infeasible = || Err(Error::Domain(format!("infeasible action point {ap:?}")));
    if r.a < 0.0 || r.l < 0.0 || r.m < 0.0 {
        return infeasible();
    }
    let mut s = xlnx_over(r.a, 1.0) - xlnx_over(r.l, al.alpha[0]) - xlnx_over(r.m, al.alpha[1]);
    for k in 0..4 {
        let pk = ap.p[k];
        if pk == 0.0 {
            continue;
        }
        if !al.active(k) || pk / al.alpha[k + 2] < 0.0 {
            return infeasible();
        }
        s -= xlnx_over(pk, al.alpha[k + 2]);
    }
    Ok(s)
}

/// Stationary point of the action at fixed `(ℓ, m)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Maximizer {
    pub value: f64,
    pub p: [f64; 4],
    /// Reduced variables `(u, v)` on `Δ = 0`.
    pub u: f64,
    pub v: f64,
}

impl Maximizer {
    /// `∂S/∂ℓ` for the geometry's own `ℓ`, by the envelope theorem.
    pub fn d_ell(&self) -> f64 {
        -self.u.ln()
    }
}

/// Smaller positive root `v` of `Δ(u, v) = 0`.
fn v_on_curve(al: &AlphaCoeffs, u: f64) -> Option<f64> {
    let a = al.alpha;
    let rhs = 1.0 - a[0] * u;
    let qa = a[4] * u + a[5] * u * u;
    let qb = a[1] + a[2] * u + a[3] * u * u;
    let disc = qb * qb + 4.0 * qa * rhs;
    if rhs <= 0.0 || disc < 0.0 {
        return None;
    }
    let den = qb + disc.sqrt();
    (den > 0.0).then(|| 2.0 * rhs / den)
}

fn densities(al: &AlphaCoeffs, u: f64, v: f64) -> [f64; 4] {
    let mut q = [0.0; 4];
    for (k, &(ea, eb, _)) in EXPONENTS.iter().enumerate() {
        if al.active(k) {
            q[k] = al.alpha[k + 2] * u.powf(ea) * v.powf(eb);
        }
    }
    q
}

/// `(ℓ/A, m/A)` at a point of the curve.
fn moments(al: &AlphaCoeffs, u: f64, v: f64) -> (f64, f64) {
    let q = densities(al, u, v);
    let mut l = al.alpha[0] * u;
    let mut m = al.alpha[1] * v;
    for (k, &(ea, eb, _)) in EXPONENTS.iter().enumerate() {
        l += ea * q[k];
        m += eb * q[k];
    }
    (l, m)
}

fn gradient(ell: f64, m: f64, p: &[f64; 4], al: &AlphaCoeffs) -> Option<[f64; 4]> {
    let r = reduced(ell, m, p);
    if r.a <= 0.0 || r.l <= 0.0 || r.m <= 0.0 {
        return None;
    }
    let (ll, lm, la) = ((r.l / al.alpha[0]).ln(), (r.m / al.alpha[1]).ln(), r.a.ln());
    let mut g = [0.0; 4];
    for (k, &(ea, eb, ec)) in EXPONENTS.iter().enumerate() {
        if !al.active(k) {
            continue;
        }
        let ratio = p[k] / al.alpha[k + 2];
        if ratio <= 0.0 {
            return None;
        }
        g[k] = ea * ll + eb * lm - ec * la - ratio.ln();
    }
    Some(g)
}

fn norm(g: &[f64; 4]) -> f64 {
    g.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Solves `H x = g` on the active indices.
fn newton_step(ell: f64, m: f64, p: &[f64; 4], al: &AlphaCoeffs, g: &[f64; 4]) -> Option<[f64; 4]> {
    let r = reduced(ell, m, p);
    let idx: Vec<usize> = (0..4).filter(|&k| al.active(k)).collect();
    let n = idx.len();
    let mut h = vec![vec![0.0; n + 1]; n];
    for (i, &ki) in idx.iter().enumerate() {
        let (ai, bi, ci) = EXPONENTS[ki];
        for (j, &kj) in idx.iter().enumerate() {
            let (aj, bj, cj) = EXPONENTS[kj];
            h[i][j] = -ai * aj / r.l - bi * bj / r.m + ci * cj / r.a;
        }
        h[i][i] -= 1.0 / p[ki];
        h[i][n] = g[ki];
    }
    for c in 0..n {
        let piv = (c..n).max_by(|&x, &y| h[x][c].abs().total_cmp(&h[y][c].abs()))?;
        if h[piv][c].abs() < 1e-300 {
            return None;
        }
        h.swap(c, piv);
        for rr in 0..n {
            if rr != c {
                let f = h[rr][c] / h[c][c];
                for cc in c..=n {
                    h[rr][cc] -= f * h[c][cc];
                }
            }
        }
    }
    let mut x = [0.0; 4];
    for (i, &ki) in idx.iter().enumerate() {
        x[ki] = h[i][n] / h[i][i];
    }
    Some(x)
}

/// Stationary point of the action over `p3..p6` at fixed `(ℓ, m)`.
///
/// For positive `α3..α6` it is the interior maximum; a negative `α_i` makes
/// the corresponding direction convex and the point is a saddle. Converged
/// when the gradient norm is below `1e−10`.
pub fn maximize_action(ell: f64, m: f64, al: &AlphaCoeffs, variant: Variant) -> Result<Maximizer> {
    let le = effective_ell(ell, variant);
    if !(le > 0.0 && m > 0.0 && le.is_finite() && m.is_finite()) {
        return Err(Error::Domain(format!("need positive extents, got ell={le}, m={m}")));
    }
    if al.alpha[0] <= 0.0 || al.alpha[1] <= 0.0 {
        return Err(Error::Domain("alpha1 and alpha2 must be positive".into()));
    }
    let target = (le / m).ln();
    let ratio = |u: f64| -> Result<f64> {
        let v = v_on_curve(al, u).ok_or_else(|| Error::Domain(format!("no point of the curve at u={u}")))?;
        let (l, mm) = moments(al, u, v);
        if l <= 0.0 || mm <= 0.0 {
            return Err(Error::Domain(format!("non-positive moments at u={u}")));
        }
        Ok((l / mm).ln() - target)
    };
    let umax = 1.0 / al.alpha[0];
    let mut lo = umax * 1e-3;
    while ratio(lo)? > 0.0 {
        lo *= 1e-3;
        if lo < umax * 1e-300 {
            return Err(Error::Range("ell/m too small".into()));
        }
    }
    let mut gap = 1e-3;
    while ratio(umax * (1.0 - gap))? < 0.0 {
        gap *= 1e-3;
        if gap < 1e-15 {
            return Err(Error::Range("ell/m too large".into()));
        }
    }
    let u = brent(ratio, lo, umax * (1.0 - gap), 1e-16 * umax)?;
    let v = v_on_curve(al, u).ok_or_else(|| Error::Domain("lost the curve".into()))?;
    let (l, _) = moments(al, u, v);
    let amp = le / l;
    let q = densities(al, u, v);
    let mut p = q.map(|x| x * amp);

    let mut g = gradient(le, m, &p, al).ok_or_else(|| Error::Domain("reduction left the feasible region".into()))?;
    let mut gn = norm(&g);
    let mut iterations = 0;
    while gn >= 1e-10 {
        iterations += 1;
        if iterations > 50 {
            return Err(Error::Convergence { iterations, residual: gn });
        }
        let step = newton_step(le, m, &p, al, &g).ok_or(Error::Convergence { iterations, residual: gn })?;
        let mut t = 1.0;
        loop {
            let trial: [f64; 4] = std::array::from_fn(|k| p[k] - t * step[k]);
            if let Some(gt) = gradient(le, m, &trial, al) {
                if norm(&gt) < gn {
                    p = trial;
                    g = gt;
                    gn = norm(&g);
                    break;
                }
            }
            t *= 0.5;
            if t < 1e-12 {
                return Err(Error::Convergence { iterations, residual: gn });
            }
        }
    }
    let value = action(&ActionPoint { ell, m, p }, al, variant)?;
    let r = reduced(le, m, &p);
    Ok(Maximizer { value, p, u: r.l / (al.alpha[0] * r.a), v: r.m / (al.alpha[1] * r.a) })
}

/// `dS/dℓ` by Richardson-extrapolated central differences of the maximum.
pub fn ds_dl(ell: f64, m: f64, al: &AlphaCoeffs, variant: Variant) -> Result<f64> {
    let h = 1e-6 * ell.abs().max(1.0);
    let d = |h: f64| -> Result<f64> {
        let fp = maximize_action(ell + h, m, al, variant)?.value;
        let fm = maximize_action(ell - h, m, al, variant)?.value;
        Ok((fp - fm) / (2.0 * h))
    };
    let (d1, d2) = (d(h)?, d(h / 2.0)?);
    Ok((4.0 * d2 - d1) / 3.0)
}

/// The three portions of the arctic curve traced by tangent lines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    Normal,
    Shear,
    Final,
}

impl Branch {
    pub const ALL: [Branch; 3] = [Branch::Normal, Branch::Shear, Branch::Final];

    pub fn name(&self) -> &'static str {
        match self {
            Branch::Normal => "normal",
            Branch::Shear => "shear",
            Branch::Final => "final",
        }
    }

    /// Parameter range of the portion.
    pub fn range(&self, p: &AngleParams) -> (f64, f64) {
        let (e, l, m) = (p.eta(), p.lambda(), p.mu());
        match self {
            Branch::Normal => (0.0, PI - l - e),
            Branch::Shear => (-(l - e + m) / 2.0, 0.0),
            Branch::Final => (-(l - e - m) / 2.0, 0.0),
        }
    }

    /// Angles whose `τ`, `r` and slope formulas describe the portion.
    fn angles<T: Scalar>(&self, a: &Angles<T>) -> Angles<T> {
        match self {
            Branch::Final => a.mirrored(),
            _ => *a,
        }
    }
}

/// Slope `S(ξ)` of the tangent line on a portion.
pub fn closed_slope_of<T: Scalar>(xi: T, a: &Angles<T>, branch: Branch) -> T {
    let a = branch.angles(a);
    let (q1, q2) = (p1(xi, &a), p2(xi, &a));
    let two = T::cst(2.0);
    match branch {
        Branch::Normal => {
            let s = xi.sin() * (xi + two * a.eta).sin();
            q1 * (s + q2) / (s * (q1 + q2))
        }
        Branch::Shear | Branch::Final => {
            let hq = (a.lambda - a.eta + a.mu) / two;
            let hp = (a.lambda + T::cst(3.0) * a.eta + a.mu) / two;
            q1 * (two * xi + hq).sin() * hp.sin() / ((two * a.eta - xi).sin() * xi.sin() * (q1 + q2))
        }
    }
}

/// Height `R(ξ)` of the tangent line's anchor on a portion.
pub fn anchor_of<T: Scalar>(xi: T, a: &Angles<T>, branch: Branch) -> T {
    r_of(xi, &branch.angles(a))
}

fn check_branch_range(xi: f64, p: &AngleParams, branch: Branch) -> Result<()> {
    let (lo, hi) = branch.range(p);
    if !(xi >= lo - 1e-12 && xi <= hi + 1e-12) {
        return Err(Error::Range(format!("xi={xi} outside the {} range [{lo}, {hi}]", branch.name())));
    }
    Ok(())
}

pub fn closed_slopes(xi: f64, p: &AngleParams, branch: Branch) -> Result<f64> {
    check_branch_range(xi, p, branch)?;
    Ok(closed_slope_of(xi, &Angles::from_params(p), branch))
}

/// Slope from the saddle point at given `(τ, r)`, with `ω` the weights the
/// portion is built from.
fn slope_from_saddle(tau: f64, r: f64, w: &VertexWeights, shear: bool) -> Result<f64> {
    let al = alpha_coeffs(w);
    let target = (tau * al.alpha[0]).ln();
    let (variant, coeffs) =
        if shear { (Variant::Shear, alpha_coeffs(&inverted_weights(w))) } else { (Variant::Normal, al) };
    let sign = if shear { -1.0 } else { 1.0 };
    // sign·(dS/dℓ − target) increases with ln m
    let f = |lm: f64| -> Result<f64> { Ok(sign * (ds_dl(r, lm.exp(), &coeffs, variant)? - target)) };
    let (mut lo, mut hi) = (-1.0, 1.0);
    let mut tries = 0;
    while f(lo)? > 0.0 {
        lo -= 4.0;
        tries += 1;
        if tries > 8 {
            return Err(Error::Range(format!("slope root not bracketed below at tau={tau}")));
        }
    }
    while f(hi)? < 0.0 {
        hi += 4.0;
        tries += 1;
        if tries > 16 {
            return Err(Error::Range(format!("slope root not bracketed above at tau={tau}")));
        }
    }
    let m = brent(f, lo, hi, 1e-13)?.exp();
    Ok(if shear { 1.0 - (1.0 - r) / m } else { r / m })
}

/// Saddle-point slope at the parameter `ξ` of a portion.
pub fn slope_numeric_at_xi(xi: f64, p: &AngleParams, branch: Branch) -> Result<f64> {
    check_branch_range(xi, p, branch)?;
    let q = if branch == Branch::Final { p.mirrored() } else { *p };
    let a = Angles::from_params(&q);
    slope_from_saddle(tau_of(xi, &a), r_of(xi, &a), &compute_weights(&q), branch != Branch::Normal)
}

/// Saddle-point slope at spectral value `τ`, inverting `τ(ξ)` on the portion.
pub fn slope_numeric(tau: f64, p: &AngleParams, branch: Branch) -> Result<f64> {
    let q = if branch == Branch::Final { p.mirrored() } else { *p };
    let a = Angles::from_params(&q);
    let (lo, hi) = branch.range(p);
    let span = hi - lo;
    let (lo, hi) = (lo + 1e-12 * span, hi - 1e-12 * span);
    let xi = brent(|x| Ok(tau_of(x, &a) - tau), lo, hi, 1e-15)
        .map_err(|_| Error::Range(format!("tau={tau} outside the {} portion", branch.name())))?;
    slope_numeric_at_xi(xi, p, branch)
}

/// Tangency point of the family `y = R(ξ) − S(ξ)(x − 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    /// `x = 1 + R′/S′`.
    XTangent,
    /// Axes exchanged: `y = 1 + R′/S′`.
    YTangent,
}

/// Envelope point from `R` and `S` given as dual-number functions of `ξ`.
pub fn envelope<F, G>(r: F, s: G, xi: f64, orientation: Orientation) -> Result<(f64, f64)>
where
    F: Fn(Dual<f64>) -> Dual<f64>,
    G: Fn(Dual<f64>) -> Dual<f64>,
{
    let rr = r(Dual::var(xi));
    let ss = s(Dual::var(xi));
    if !(ss.d.abs() > 1e-14) || !rr.d.is_finite() {
        return Err(Error::Pole(format!("stationary slope at xi={xi}")));
    }
    let q = rr.d / ss.d;
    let (x, y) = (1.0 + q, rr.v - ss.v * q);
    Ok(match orientation {
        Orientation::XTangent => (x, y),
        Orientation::YTangent => (y, x),
    })
}

/// Envelope point of a portion of the twenty-vertex arctic curve.
pub fn branch_point(xi: f64, p: &AngleParams, branch: Branch) -> Result<(f64, f64)> {
    let a: Angles<Dual<f64>> = Angles::from_params(p);
    let orientation = if branch == Branch::Final { Orientation::YTangent } else { Orientation::XTangent };
    envelope(|x| anchor_of(x, &a, branch), |x| closed_slope_of(x, &a, branch), xi, orientation)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_alphas() {
        let al = alpha_coeffs(&VertexWeights::uniform(2.5));
        assert_eq!(al.alpha, [1.0, 1.0, 1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn stationary_value_has_reduced_form() {
        let al = alpha_coeffs(&compute_weights(&AngleParams::new(0.3, 1.4, 0.2).unwrap()));
        let mx = maximize_action(0.4, 0.9, &al, Variant::Normal).unwrap();
        let reduced = -0.4 * mx.u.ln() - 0.9 * mx.v.ln();
        assert!((mx.value - reduced).abs() < 1e-12);
        assert!(al.delta(mx.u, mx.v).abs() < 1e-12);
    }
}
