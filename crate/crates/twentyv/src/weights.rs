//! Integrable weights of the twenty-vertex model.
//!
//! A node of the triangular lattice splits into three six-vertex nodes on the
//! Kagome lattice. When the three sublattice triples satisfy the Yang–Baxter
//! conditions the seven resulting weights are sine products of three angles
//! `(η, λ, μ)`. All weights here are the real moduli: each Kagome triple
//! carries a common phase that cancels in every product.

use crate::error::{Error, Result};
use std::f64::consts::PI;
use std::fmt;

/// Integrable angles. Construction enforces
/// `0 < η < λ < π − η` and `η − λ < μ < λ − η`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngleParams {
    eta: f64,
    lambda: f64,
    mu: f64,
}

impl AngleParams {
    pub fn new(eta: f64, lambda: f64, mu: f64) -> Result<Self> {
        let bad = |what: &str| Err(Error::Domain(format!("{what} (eta={eta}, lambda={lambda}, mu={mu})")));
        if !(eta.is_finite() && lambda.is_finite() && mu.is_finite()) {
            return bad("non-finite angle");
        }
        if eta <= 0.0 {
            return bad("0 < eta violated");
        }
        if lambda <= eta {
            return bad("eta < lambda violated");
        }
        if lambda >= PI - eta {
            return bad("lambda < pi - eta violated");
        }
        if mu <= eta - lambda {
            return bad("eta - lambda < mu violated");
        }
        if mu >= lambda - eta {
            return bad("mu < lambda - eta violated");
        }
        Ok(AngleParams { eta, lambda, mu })
    }

    /// The point where all seven weights coincide: `(π/8, 5π/8, 0)`.
    pub fn uniform() -> Self {
        AngleParams { eta: PI / 8.0, lambda: 5.0 * PI / 8.0, mu: 0.0 }
    }

    /// The one-parameter family `μ = λ − 5η`.
    pub fn on_special_line(eta: f64, lambda: f64) -> Result<Self> {
        Self::new(eta, lambda, lambda - 5.0 * eta)
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }
    pub fn lambda(&self) -> f64 {
        self.lambda
    }
    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// The same point with `μ → −μ` (always admissible).
    pub fn mirrored(&self) -> Self {
        AngleParams { mu: -self.mu, ..*self }
    }
}

impl fmt::Display for AngleParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "eta={} lambda={} mu={}", self.eta, self.lambda, self.mu)
    }
}

/// Parses an angle given in radians (`0.2618`) or as a rational multiple of
/// `π`: `pi`, `-pi/12`, `5*pi/8`, `5pi/8`, `2*pi`.
pub fn parse_angle(s: &str) -> Result<f64> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect::<String>().to_ascii_lowercase();
    let bad = || Error::Parse(format!("cannot parse angle '{s}'"));
    let Some(pos) = t.find("pi") else {
        return t.parse::<f64>().map_err(|_| bad());
    };
    let (head, tail) = (&t[..pos], &t[pos + 2..]);
    let head = head.strip_suffix('*').unwrap_or(head);
    let num = match head {
        "" | "+" => 1.0,
        "-" => -1.0,
        h => h.parse::<f64>().map_err(|_| bad())?,
    };
    let den = match tail {
        "" => 1.0,
        t => t.strip_prefix('/').ok_or_else(bad)?.parse::<f64>().map_err(|_| bad())?,
    };
    if den == 0.0 || !num.is_finite() {
        return Err(bad());
    }
    Ok(num * PI / den)
}

/// Three six-vertex weight triples, one per Kagome sublattice; index 0..3
/// stands for sublattice 1..3.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KagomeTriple {
    pub a: [f64; 3],
    pub b: [f64; 3],
    pub c: [f64; 3],
}

/// The seven twenty-vertex weights `ω0..ω6`, unnormalized.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VertexWeights {
    pub omega: [f64; 7],
}

impl VertexWeights {
    pub fn uniform(value: f64) -> Self {
        VertexWeights { omega: [value; 7] }
    }
    pub fn max(&self) -> f64 {
        self.omega.iter().cloned().fold(f64::MIN, f64::max)
    }
}

pub fn compute_weights(p: &AngleParams) -> VertexWeights {
    let (e, l, m) = (p.eta, p.lambda, p.mu);
    let s = f64::sin;
    let hp = s((l + 3.0 * e + m) / 2.0);
    let hm = s((l + 3.0 * e - m) / 2.0);
    let w = [
        s(l + e) * hp * hm,
        s(l - e) * s((l - e + m) / 2.0) * hm,
        s(2.0 * e) * s(l - e) * hm,
        s(2.0 * e).powi(3) + s(l + e) * s((l - e + m) / 2.0) * s((l - e - m) / 2.0),
        s(2.0 * e) * hp * hm,
        s(2.0 * e) * s(l - e) * hp,
        s(l - e) * hp * s((l - e - m) / 2.0),
    ];
    VertexWeights { omega: w }
}

pub fn kagome_triple(p: &AngleParams) -> KagomeTriple {
    shifted_kagome_triple(p, 0.0)
}

/// Kagome triples with the last spectral parameter rotated, `w → w·e^{−2i·shift}`.
///
/// Only sublattices 1 and 3 depend on `w`; each of their angles moves by
/// `shift`. `shift = 0` gives [`kagome_triple`].
pub fn shifted_kagome_triple(p: &AngleParams, shift: f64) -> KagomeTriple {
    let (e, l, m) = (p.eta, p.lambda, p.mu);
    let s = f64::sin;
    let c = s(2.0 * e);
    KagomeTriple {
        a: [s(l + e + shift), s((l + 3.0 * e - m) / 2.0), s((l + 3.0 * e + m) / 2.0 + shift)],
        b: [s(l - e + shift), s((l - e - m) / 2.0), s((l - e + m) / 2.0 + shift)],
        c: [c, c, c],
    }
}

pub fn yang_baxter_residuals(t: &KagomeTriple) -> [f64; 3] {
    let ([a1, a2, a3], [b1, b2, b3], [c1, c2, c3]) = (t.a, t.b, t.c);
    [
        a1 * b2 * c3 + c1 * c2 * b3 - b1 * a2 * c3,
        c1 * b2 * b3 + a1 * c2 * c3 - c1 * a2 * a3,
        c1 * b2 * c3 + a1 * c2 * b3 - b1 * c2 * a3,
    ]
}

pub fn omega_from_kagome(t: &KagomeTriple) -> VertexWeights {
    let ([a1, a2, a3], [b1, b2, b3], [c1, c2, c3]) = (t.a, t.b, t.c);
    VertexWeights {
        omega: [
            a1 * a2 * a3,
            b1 * a2 * b3,
            b1 * a2 * c3,
            a1 * b2 * b3 + c1 * c2 * c3,
            c1 * a2 * a3,
            b1 * c2 * a3,
            b1 * b2 * a3,
        ],
    }
}

/// Weights of the model seen through vertical-edge complementation and shear:
/// `ω0 ↔ ω1`, `ω2 ↔ ω4`.
pub fn inverted_weights(w: &VertexWeights) -> VertexWeights {
    let o = w.omega;
    VertexWeights { omega: [o[1], o[0], o[4], o[3], o[2], o[5], o[6]] }
}

/// Inbound edge bits of a node.
pub mod inbound {
    pub const N: u8 = 1;
    pub const NW: u8 = 2;
    pub const W: u8 = 4;
}

/// Outbound edge bits of a node.
pub mod outbound {
    pub const E: u8 = 1;
    pub const SE: u8 = 2;
    pub const S: u8 = 4;
}

/// Occupied inbound `{N, NW, W}` and outbound `{E, SE, S}` edges at a node.
///
/// Bit order encodes the osculating pairing: the k-th occupied inbound edge
/// connects to the k-th occupied outbound edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexPattern {
    pub inbound: u8,
    pub outbound: u8,
}

impl VertexPattern {
    pub const EMPTY: VertexPattern = VertexPattern { inbound: 0, outbound: 0 };
    pub const FULL: VertexPattern = VertexPattern { inbound: 7, outbound: 7 };

    pub fn new(inbound: u8, outbound: u8) -> Option<Self> {
        let p = VertexPattern { inbound, outbound };
        p.is_valid().then_some(p)
    }

    pub fn is_valid(&self) -> bool {
        self.inbound < 8 && self.outbound < 8 && self.inbound.count_ones() == self.outbound.count_ones()
    }

    /// All twenty conserving patterns.
    pub fn all() -> Vec<VertexPattern> {
        (0..8u8)
            .flat_map(|i| (0..8u8).map(move |o| VertexPattern { inbound: i, outbound: o }))
            .filter(|p| p.is_valid())
            .collect()
    }

    /// Patterns without diagonal edges: the six-vertex subset.
    pub fn is_six_vertex(&self) -> bool {
        self.inbound & inbound::NW == 0 && self.outbound & outbound::SE == 0
    }

    pub fn complement(&self) -> Self {
        VertexPattern { inbound: 7 ^ self.inbound, outbound: 7 ^ self.outbound }
    }

    /// Index of the weight `ω_k` carried by this pattern.
    pub fn weight_class(&self) -> usize {
        use inbound::{N, NW, W};
        use outbound::{E, S, SE};
        match self.inbound.count_ones() {
            0 | 3 => 0,
            2 => self.complement().weight_class(),
            _ => match (self.inbound, self.outbound) {
                (N, S) => 1,
                (NW, SE) => 3,
                (W, E) => 6,
                (N, SE) | (NW, S) => 2,
                (N, E) | (W, S) => 4,
                (W, SE) | (NW, E) => 5,
                _ => unreachable!("single-path pattern"),
            },
        }
    }

    /// Outbound bit paired with the given inbound bit, if occupied.
    pub fn partner(&self, in_bit: u8) -> Option<u8> {
        if self.inbound & in_bit == 0 {
            return None;
        }
        let rank = (self.inbound & (in_bit - 1)).count_ones();
        (0..3).map(|k| 1u8 << k).filter(|b| self.outbound & b != 0).nth(rank as usize)
    }

    /// Code in `0..64`, used for table lookups.
    pub fn code(&self) -> usize {
        (self.inbound as usize) | ((self.outbound as usize) << 3)
    }
}

impl fmt::Display for VertexPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = |bits: u8, n: [&str; 3]| {
            let v: Vec<&str> = (0..3).filter(|k| bits & (1 << k) != 0).map(|k| n[k]).collect();
            if v.is_empty() {
                "-".to_string()
            } else {
                v.join(",")
            }
        };
        write!(f, "{}>{}", names(self.inbound, ["N", "NW", "W"]), names(self.outbound, ["E", "SE", "S"]))
    }
}

/// Pattern → weight lookup table.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMap {
    table: [f64; 64],
}

impl WeightMap {
    pub fn get(&self, p: VertexPattern) -> f64 {
        self.table[p.code()]
    }

    /// A map giving every pattern the same weight.
    pub fn constant(value: f64) -> Self {
        vertex_weight_map(&VertexWeights::uniform(value))
    }
}

pub fn vertex_weight_map(w: &VertexWeights) -> WeightMap {
    let mut table = [0.0; 64];
    for p in VertexPattern::all() {
        table[p.code()] = w.omega[p.weight_class()];
    }
    WeightMap { table }
}

/// Six-vertex weights `(a, b, c)` as a pattern map: empty and crossing
/// patterns get `a`, straight paths `b`, turning paths `c`.
pub fn six_vertex_map(a: f64, b: f64, c: f64) -> WeightMap {
    let mut table = [0.0; 64];
    for p in VertexPattern::all().into_iter().filter(|p| p.is_six_vertex()) {
        table[p.code()] = match p.weight_class() {
            0 | 3 => a,
            1 | 6 => b,
            4 => c,
            _ => unreachable!("six-vertex patterns fall in classes 0, 1, 3, 4, 6"),
        };
    }
    WeightMap { table }
}

fn pole_check(x: f64, what: &str) -> Result<f64> {
    if x.abs() < 1e-14 {
        Err(Error::Pole(what.to_string()))
    } else {
        Ok(x)
    }
}

/// Spectral map `σ ↦ (τ, g)` relating refined six- and twenty-vertex sums.
/// The mirrored relation is obtained by passing `p.mirrored()`.
pub fn refined_map(sigma: f64, p: &AngleParams) -> Result<(f64, f64)> {
    let (e, l, m) = (p.eta, p.lambda, p.mu);
    let s = f64::sin;
    let den = pole_check(
        sigma * s(l - e) * s((l - e - m) / 2.0) - s(l + e) * s((l - 5.0 * e - m) / 2.0),
        "refined map denominator",
    )?;
    let num = sigma * s(l - e) * s((l + 3.0 * e - m) / 2.0) - s(l + e) * s((l - e - m) / 2.0);
    let tau = sigma * num / den * s((l + 3.0 * e + m) / 2.0) / s((l - e + m) / 2.0);
    let g = sigma * s(2.0 * e) * s((l + 3.0 * e + m) / 2.0) / den;
    Ok((tau, g))
}

/// `(σ, τ, g)` from ratios of shifted to unshifted Kagome weights, with the
/// last spectral parameter rotated by `θ = e^{−2i·shift}`.
pub fn theta_relations(shift: f64, p: &AngleParams) -> Result<(f64, f64, f64)> {
    let t0 = kagome_triple(p);
    let t = shifted_kagome_triple(p, shift);
    for (k, x) in t.a.iter().chain(t.b.iter()).enumerate() {
        pole_check(*x, &format!("shifted Kagome weight {k} vanishes"))?;
    }
    let sigma = t.b[0] * t0.a[0] / (t0.b[0] * t.a[0]);
    let tau = t.b[0] * t.b[2] * t0.a[0] * t0.a[2] / (t0.b[0] * t0.b[2] * t.a[0] * t.a[2]);
    let g = t0.c[0] * t.b[0] * t.c[2] * t0.a[2] / (t.c[0] * t0.b[0] * t0.c[2] * t.a[2]);
    Ok((sigma, tau, g))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twenty_patterns_in_ten_classes() {
        let all = VertexPattern::all();
        assert_eq!(all.len(), 20);
        let mut per_class = [0usize; 7];
        for p in &all {
            per_class[p.weight_class()] += 1;
            assert_eq!(p.weight_class(), p.complement().weight_class());
        }
        assert_eq!(per_class, [2, 2, 4, 2, 4, 4, 2]);
    }

    #[test]
    fn partner_pairs_by_rank() {
        let p = VertexPattern::new(inbound::N | inbound::W, outbound::E | outbound::S).unwrap();
        assert_eq!(p.partner(inbound::N), Some(outbound::E));
        assert_eq!(p.partner(inbound::W), Some(outbound::S));
        assert_eq!(p.partner(inbound::NW), None);
    }

    #[test]
    fn all_ones_triple() {
        let t = KagomeTriple { a: [1.0; 3], b: [1.0; 3], c: [1.0; 3] };
        assert_eq!(yang_baxter_residuals(&t), [1.0, 1.0, 1.0]);
        assert_eq!(omega_from_kagome(&t).omega, [1.0, 1.0, 1.0, 2.0, 1.0, 1.0, 1.0]);
    }

    #[test]
    fn inadmissible_is_rejected() {
        assert!(AngleParams::new(0.5, 0.4, 0.0).is_err());
        assert!(AngleParams::new(0.3, 1.0, 0.8).is_err());
        assert!(AngleParams::new(0.3, 3.0, 0.0).is_err());
    }
}
