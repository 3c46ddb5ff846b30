//! Quarter-turn symmetric holey Aztec domino tilings (QTHADT).
//!
//! Tilings of the fundamental domain are families of non-intersecting
//! Schröder paths from `(0, j+1)` to `(j, 0)` whose first step is not a down
//! step, with weight `γ` per diagonal step. The partition function is
//! `det(I + M)`, where `M` counts single paths, and the refined version marks
//! top-row horizontal steps of the path leaving `(0, n)` by `τ`.

use crate::error::{Error, Result};
use crate::numeric::{det, det_exact};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;

/// Largest `n` accepted by [`partition`] and [`log_partition`].
pub const PARTITION_CAP: usize = 40;
/// Largest `n` accepted by the exact rational determinant.
pub const EXACT_CAP: usize = 16;
/// Largest `n` accepted by the path enumeration.
pub const BRUTE_CAP: usize = 5;

/// `γ = 1 + 2cos(4η)`.
pub fn gamma_of_eta(eta: f64) -> f64 {
    1.0 + 2.0 * (4.0 * eta).cos()
}

/// Square matrix generated by a two-variable series, `entries[i][j]` the
/// coefficient of `u^i v^j`.
#[derive(Debug, Clone, PartialEq)]
pub struct SchroderMatrix<T> {
    pub n: usize,
    pub entries: Vec<Vec<T>>,
}

/// Truncated product of power series in `u`.
fn series_mul<T: Clone + Num>(a: &[T], b: &[T], len: usize) -> Vec<T> {
    let mut out = vec![T::zero(); len];
    for (i, x) in a.iter().enumerate().take(len) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(len - i) {
            out[i + j] = out[i + j].clone() + x.clone() * y.clone();
        }
    }
    out
}

/// `1/(1 − r u)` truncated.
fn geometric<T: Clone + Num>(r: &T, len: usize) -> Vec<T> {
    let mut out = Vec::with_capacity(len);
    let mut p = T::one();
    for _ in 0..len {
        out.push(p.clone());
        p = p * r.clone();
    }
    out
}

/// Coefficients of `1/(1 − p u − v − q uv)`, indices `0..n` in each variable.
fn kernel<T: Clone + Num>(n: usize, p: &T, q: &T) -> Vec<Vec<T>> {
    let mut g = vec![vec![T::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            g[i][j] = if i == 0 && j == 0 {
                T::one()
            } else {
                let mut s = T::zero();
                if i > 0 {
                    s = s + p.clone() * g[i - 1][j].clone();
                }
                if j > 0 {
                    s = s + g[i][j - 1].clone();
                }
                if i > 0 && j > 0 {
                    s = s + q.clone() * g[i - 1][j - 1].clone();
                }
                s
            };
        }
    }
    g
}

/// `F_{B(σ)}` with `x = (b/a)²`, `y = (c/a)²`:
/// `1/(1−uv) + x·u/(1−u)·K(u,v) + x(s−1)·u/((1−u)(1−t u)) · ((1+(x−y)u)/(1−yu))^n v^{n−1}`
/// with `K = 1/(1 − y u − v − (x−y) uv)` and `t = y + x(s−1)`.
fn sixv_entries<T: Clone + Num>(n: usize, x: &T, y: &T, s: &T) -> Vec<Vec<T>> {
    let d = x.clone() - y.clone();
    let g = kernel(n, y, &d);
    let mut a = vec![vec![T::zero(); n]; n];
    for j in 0..n {
        let mut run = T::zero();
        for i in 0..n {
            a[i][j] = if i == j { T::one() } else { T::zero() } + x.clone() * run.clone();
            run = run + g[i][j].clone();
        }
    }
    let sm1 = s.clone() - T::one();
    if !sm1.is_zero() {
        let t = y.clone() + x.clone() * sm1.clone();
        let mut h = series_mul(&geometric(&T::one(), n), &geometric(&t, n), n);
        let ratio = series_mul(&[T::one(), d], &geometric(y, n), n);
        for _ in 0..n {
            h = series_mul(&h, &ratio, n);
        }
        let c = x.clone() * sm1;
        for i in 1..n {
            a[i][n - 1] = a[i][n - 1].clone() + c.clone() * h[i - 1].clone();
        }
    }
    a
}

/// `A(τ)`; `τ = 1` gives the unrefined matrix `A`.
pub fn build_matrix<T: Clone + Num>(n: usize, gamma: T, tau: T) -> SchroderMatrix<T> {
    let g = kernel(n, &T::one(), &gamma);
    let x = T::one() + gamma.clone();
    let mut a = vec![vec![T::zero(); n]; n];
    for j in 0..n {
        let mut run = T::zero();
        for i in 0..n {
            a[i][j] = if i == j { T::one() } else { T::zero() } + x.clone() * run.clone();
            run = run + g[i][j].clone();
        }
    }
    let tm1 = tau.clone() - T::one();
    if !tm1.is_zero() {
        // (τ−1)·u/((1−u)(1−τu)) · ((1+γu)/(1−u))^n in the last column
        let mut h = series_mul(&geometric(&T::one(), n), &geometric(&tau, n), n);
        let ratio = series_mul(&[T::one(), gamma], &geometric(&T::one(), n), n);
        for _ in 0..n {
            h = series_mul(&h, &ratio, n);
        }
        for i in 1..n {
            a[i][n - 1] = a[i][n - 1].clone() + tm1.clone() * h[i - 1].clone();
        }
    }
    SchroderMatrix { n, entries: a }
}

impl SchroderMatrix<f64> {
    pub fn determinant(&self) -> f64 {
        det(&self.entries)
    }
}

/// `B(σ)` of the six-vertex refined partition function with weights `a, b, c`.
pub fn sixv_matrix(n: usize, a: f64, b: f64, c: f64, sigma: f64) -> Result<SchroderMatrix<f64>> {
    if a == 0.0 {
        return Err(Error::Domain("a must be non-zero".into()));
    }
    let (x, y) = ((b / a).powi(2), (c / a).powi(2));
    Ok(SchroderMatrix { n, entries: sixv_entries(n, &x, &y, &sigma) })
}

fn check_n(n: usize, cap: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Domain("n must be at least 1".into()));
    }
    if n > cap {
        return Err(Error::Size { n, cap });
    }
    Ok(())
}

/// Refined partition function `det A(τ)`.
///
/// The determinant is evaluated exactly at the binary values of `γ` and `τ`
/// and rounded once; elimination in double precision loses the sign by
/// `n ≈ 30`.
pub fn partition(n: usize, gamma: f64, tau: f64) -> Result<f64> {
    let d = exact_at_floats(n, gamma, tau)?;
    Ok(d.to_f64().unwrap_or(f64::NAN))
}

/// Sign and `ln |det A(τ)|`, finite where [`partition`] overflows.
pub fn log_partition(n: usize, gamma: f64, tau: f64) -> Result<(f64, f64)> {
    let d = exact_at_floats(n, gamma, tau)?;
    if d.is_zero() {
        return Ok((0.0, f64::NEG_INFINITY));
    }
    let sign = if d.is_negative() { -1.0 } else { 1.0 };
    Ok((sign, ln_abs(d.numer()) - ln_abs(d.denom())))
}

fn exact_at_floats(n: usize, gamma: f64, tau: f64) -> Result<BigRational> {
    check_n(n, PARTITION_CAP)?;
    let exact = |x: f64| BigRational::from_float(x).ok_or_else(|| Error::Domain(format!("non-finite argument {x}")));
    Ok(det_exact(&build_matrix(n, exact(gamma)?, exact(tau)?).entries))
}

/// `ln |x|` for integers beyond the `f64` range.
fn ln_abs(x: &BigInt) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().unwrap_or(f64::NAN).abs().ln();
    }
    let shift = bits - 64;
    (x >> shift).to_f64().unwrap_or(f64::NAN).abs().ln() + shift as f64 * std::f64::consts::LN_2
}

/// Exact refined partition function for rational `γ`, `τ`.
pub fn partition_exact(n: usize, gamma: &BigRational, tau: &BigRational) -> Result<BigRational> {
    check_n(n, EXACT_CAP)?;
    Ok(det_exact(&build_matrix(n, gamma.clone(), tau.clone()).entries))
}

/// Coefficients `c_L` of `det A(τ) = Σ c_L τ^L`, by exact interpolation at
/// `τ = 0..n−1`.
pub fn tau_polynomial(n: usize, gamma: &BigRational) -> Result<Vec<BigRational>> {
    check_n(n, EXACT_CAP)?;
    let pts: Vec<BigRational> = (0..n).map(|k| BigRational::from_integer(BigInt::from(k))).collect();
    let vals = pts.iter().map(|t| partition_exact(n, gamma, t)).collect::<Result<Vec<_>>>()?;
    let mut coeffs = vec![BigRational::zero(); n];
    for (k, xk) in pts.iter().enumerate() {
        // Lagrange basis polynomial for node k
        let mut basis = vec![BigRational::one()];
        let mut denom = BigRational::one();
        for (m, xm) in pts.iter().enumerate() {
            if m == k {
                continue;
            }
            let mut next = vec![BigRational::zero(); basis.len() + 1];
            for (d, c) in basis.iter().enumerate() {
                next[d + 1] += c;
                next[d] -= c * xm;
            }
            basis = next;
            denom *= xk - xm;
        }
        let scale = &vals[k] / denom;
        for (d, c) in basis.iter().enumerate() {
            coeffs[d] += c * &scale;
        }
    }
    Ok(coeffs)
}

/// Parses `a/b`, an integer or a terminating decimal exactly.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let t = s.trim();
    let bad = || Error::Parse(format!("cannot parse rational '{s}'"));
    let int = |x: &str| x.parse::<BigInt>().map_err(|_| bad());
    if let Some((a, b)) = t.split_once('/') {
        let d = int(b)?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(int(a)?, d));
    }
    if let Some((a, b)) = t.split_once('.') {
        if b.is_empty() || !b.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let neg = a.starts_with('-');
        let whole = if a.is_empty() || a == "-" { BigInt::zero() } else { int(a)? };
        let scale = num_traits::pow(BigInt::from(10), b.len());
        let frac = BigRational::new(int(b)?, scale);
        let w = BigRational::from_integer(whole);
        return Ok(if neg { w - frac } else { w + frac });
    }
    Ok(BigRational::from_integer(int(t)?))
}

/// Largest `|det A(τ) − det B(σ)| / |det B(σ)|` over the samples, with
/// `a = c = 1`, `b² = 1+γ` and `τ = 1 + (1+γ)(σ−1)`.
pub fn identity_check(n: usize, gamma: f64, sigmas: &[f64]) -> Result<f64> {
    check_n(n, PARTITION_CAP)?;
    let mut worst = 0.0f64;
    for &s in sigmas {
        let tau = 1.0 + (1.0 + gamma) * (s - 1.0);
        let da = partition(n, gamma, tau)?;
        let db = det(&sixv_matrix(n, 1.0, (1.0 + gamma).sqrt(), 1.0, s)?.entries);
        worst = worst.max((da - db).abs() / db.abs().max(f64::MIN_POSITIVE));
    }
    Ok(worst)
}

/// Vertex list of one restricted Schröder path.
pub type SchroderPath = Vec<(usize, usize)>;

/// Non-intersecting family in the fundamental domain; `paths[j]` runs from
/// `(0, j+1)` to `(j, 0)` when present.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SchroderFamily {
    pub n: usize,
    pub paths: Vec<Option<SchroderPath>>,
}

fn is_diagonal(a: (usize, usize), b: (usize, usize)) -> bool {
    b.0 == a.0 + 1 && b.1 + 1 == a.1
}

impl SchroderFamily {
    /// The family with no paths.
    pub fn empty(n: usize) -> Self {
        SchroderFamily { n, paths: vec![None; n] }
    }

    pub fn path_count(&self) -> usize {
        self.paths.iter().flatten().count()
    }

    pub fn diagonals(&self) -> u32 {
        self.paths.iter().flatten().map(|p| p.windows(2).filter(|w| is_diagonal(w[0], w[1])).count() as u32).sum()
    }

    /// Horizontal steps in row `n` of the path leaving `(0, n)`; zero without it.
    pub fn top_horizontal(&self) -> u32 {
        let top = self.n;
        match self.paths.last() {
            Some(Some(p)) => p.windows(2).filter(|w| w[0].1 == top && w[1].1 == top).count() as u32,
            _ => 0,
        }
    }

    /// `γ^{#diag} τ^{#top}`.
    pub fn weight(&self, gamma: f64, tau: f64) -> f64 {
        gamma.powi(self.diagonals() as i32) * tau.powi(self.top_horizontal() as i32)
    }

    /// Endpoints, unit steps, the restriction on the first step and vertex
    /// disjointness.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Domain(m));
        if self.paths.len() != self.n {
            return bad(format!("{} path slots for n={}", self.paths.len(), self.n));
        }
        let mut seen = std::collections::HashSet::new();
        for (j, p) in self.paths.iter().enumerate() {
            let Some(p) = p else { continue };
            if p.first() != Some(&(0, j + 1)) || p.last() != Some(&(j, 0)) {
                return bad(format!("path {j} has wrong endpoints"));
            }
            for (k, w) in p.windows(2).enumerate() {
                let (a, b) = (w[0], w[1]);
                let step_ok = (b.0 == a.0 + 1 && b.1 == a.1) || (b.0 == a.0 && b.1 + 1 == a.1) || is_diagonal(a, b);
                if !step_ok || (k == 0 && b.0 == a.0) {
                    return bad(format!("path {j} has an illegal step at {a:?}"));
                }
            }
            for v in p {
                if !seen.insert(*v) {
                    return bad(format!("paths meet at {v:?}"));
                }
            }
        }
        Ok(())
    }
}

/// Path families grouped by (diagonal steps, top-row horizontal steps of the
/// path from `(0, n)`).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SchroderCensus {
    pub n: usize,
    pub counts: BTreeMap<(u32, u32), u64>,
}

impl SchroderCensus {
    pub fn from_families(n: usize, families: &[SchroderFamily]) -> Self {
        let mut counts = BTreeMap::new();
        for f in families {
            *counts.entry((f.diagonals(), f.top_horizontal())).or_insert(0) += 1;
        }
        SchroderCensus { n, counts }
    }

    pub fn families(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn weight(&self, gamma: f64, tau: f64) -> f64 {
        self.counts.iter().map(|(&(d, h), &c)| c as f64 * gamma.powi(d as i32) * tau.powi(h as i32)).sum()
    }

    pub fn weight_exact(&self, gamma: &BigRational, tau: &BigRational) -> BigRational {
        let mut s = BigRational::zero();
        for (&(d, h), &c) in &self.counts {
            s += BigRational::from_integer(BigInt::from(c))
                * num_traits::pow(gamma.clone(), d as usize)
                * num_traits::pow(tau.clone(), h as usize);
        }
        s
    }

    /// Coefficients of `τ^L` at fixed `γ`.
    pub fn tau_coefficients(&self, gamma: &BigRational) -> Vec<BigRational> {
        let mut out = vec![BigRational::zero(); self.n.max(1)];
        for (&(d, h), &c) in &self.counts {
            let h = h as usize;
            if h >= out.len() {
                out.resize(h + 1, BigRational::zero());
            }
            out[h] += BigRational::from_integer(BigInt::from(c)) * num_traits::pow(gamma.clone(), d as usize);
        }
        out
    }
}

/// All restricted paths from `(0, j+1)` to `(j, 0)`.
fn restricted_paths(j: usize) -> Vec<SchroderPath> {
    fn go(path: &mut SchroderPath, target: usize, out: &mut Vec<SchroderPath>) {
        let (x, y) = *path.last().expect("path is never empty");
        if (x, y) == (target, 0) {
            out.push(path.clone());
            return;
        }
        let mut next = Vec::with_capacity(3);
        if x < target {
            next.push((x + 1, y));
        }
        if y > 0 && path.len() > 1 {
            next.push((x, y - 1));
        }
        if x < target && y > 0 {
            next.push((x + 1, y - 1));
        }
        for v in next {
            path.push(v);
            go(path, target, out);
            path.pop();
        }
    }
    let mut out = Vec::new();
    go(&mut vec![(0, j + 1)], j, &mut out);
    out
}

/// Every non-intersecting restricted family, the empty one included, in a
/// deterministic order.
pub fn brute_families(n: usize) -> Result<Vec<SchroderFamily>> {
    check_n(n, BRUTE_CAP)?;
    let paths: Vec<_> = (0..n).map(restricted_paths).collect();
    let mut out = Vec::new();
    let mut current = SchroderFamily::empty(n);
    let mut used = std::collections::HashSet::new();
    place(0, &paths, &mut current, &mut used, &mut out);
    Ok(out)
}

fn place(
    j: usize,
    paths: &[Vec<SchroderPath>],
    current: &mut SchroderFamily,
    used: &mut std::collections::HashSet<(usize, usize)>,
    out: &mut Vec<SchroderFamily>,
) {
    if j == paths.len() {
        out.push(current.clone());
        return;
    }
    place(j + 1, paths, current, used, out);
    for p in &paths[j] {
        if p.iter().any(|v| used.contains(v)) {
            continue;
        }
        used.extend(p.iter().copied());
        current.paths[j] = Some(p.clone());
        place(j + 1, paths, current, used, out);
        current.paths[j] = None;
        for v in p {
            used.remove(v);
        }
    }
}

/// Census of [`brute_families`].
pub fn brute_census(n: usize) -> Result<SchroderCensus> {
    Ok(SchroderCensus::from_families(n, &brute_families(n)?))
}

/// Weighted family sum `Σ γ^{#diag} τ^{#top}` by direct enumeration.
pub fn brute_oracle(n: usize, gamma: f64, tau: f64) -> Result<f64> {
    Ok(brute_census(n)?.weight(gamma, tau))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_matrices() {
        assert_eq!(build_matrix(1, 0.7, 1.0).entries, vec![vec![1.0]]);
        let a = build_matrix(2, 0.5, 1.0).entries;
        assert_eq!(a, vec![vec![1.0, 0.0], vec![1.5, 2.5]]);
    }

    #[test]
    fn gamma_values() {
        use std::f64::consts::PI;
        assert!((gamma_of_eta(PI / 8.0) - 1.0).abs() < 1e-15);
        assert!(gamma_of_eta(PI / 6.0).abs() < 1e-15);
        assert!((gamma_of_eta(PI / 12.0) - 2.0).abs() < 1e-15);
    }
}
