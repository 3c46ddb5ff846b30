//! Exact weighted enumeration at small sizes.
//!
//! [`enumerate_20v`] and [`enumerate_6v`] run a row-frontier transfer over the
//! grid, top row first, one node at a time. The frontier holds the vertical
//! and diagonal edges crossing the cut plus the pending horizontal edge, so
//! memoization on it is exact. The uppermost path is tracked through the
//! frontier to produce the refined sums.
//!
//! [`list_configurations`] is a separate naive search used as an oracle.

use crate::error::{Error, Result};
use crate::lattice::{prescribed, Boundary, Configuration, Family, Step};
use crate::numeric::CompensatedSum;
use crate::weights::{
    compute_weights, inbound, kagome_triple, omega_from_kagome, outbound, refined_map, shifted_kagome_triple,
    six_vertex_map, vertex_weight_map, AngleParams, VertexPattern, WeightMap,
};
use std::collections::BTreeMap;

/// Default size caps.
pub const CAP_20V: usize = 4;
pub const CAP_6V: usize = 6;

/// Position-dependent node weight.
pub trait WeightOracle {
    fn weight(&self, x: usize, y: usize, p: VertexPattern) -> f64;
}

impl WeightOracle for WeightMap {
    fn weight(&self, _x: usize, _y: usize, p: VertexPattern) -> f64 {
        self.get(p)
    }
}

impl<F: Fn(usize, usize, VertexPattern) -> f64> WeightOracle for F {
    fn weight(&self, x: usize, y: usize, p: VertexPattern) -> f64 {
        self(x, y, p)
    }
}

/// One map for columns `1..n`, another for column `n`.
pub struct LastColumn<'a> {
    pub n: usize,
    pub bulk: &'a WeightMap,
    pub last: &'a WeightMap,
}

impl WeightOracle for LastColumn<'_> {
    fn weight(&self, x: usize, _y: usize, p: VertexPattern) -> f64 {
        if x == self.n {
            self.last.get(p)
        } else {
            self.bulk.get(p)
        }
    }
}

/// Total and refined partition sums; vectors are indexed by `L − 1`.
///
/// `hit_*` split by where the uppermost path first reaches column `n` and the
/// class of the step that brought it there; `top_*` by where it leaves row
/// `n` and the class of the step leaving it.
#[derive(Debug, Clone, PartialEq)]
pub struct RefinedPartition {
    pub n: usize,
    pub total: f64,
    pub hit_h: Vec<f64>,
    pub hit_d: Vec<f64>,
    pub top_v: Vec<f64>,
    pub top_d: Vec<f64>,
}

impl RefinedPartition {
    /// Relative defect of the two sum rules.
    pub fn sum_rule_defect(&self) -> f64 {
        let hit: f64 = self.hit_h.iter().chain(&self.hit_d).sum();
        let top: f64 = self.top_v.iter().chain(&self.top_d).sum();
        ((hit - self.total).abs()).max((top - self.total).abs()) / self.total.abs()
    }

    /// `Σ_L v[L−1]·t^{L−1}`.
    pub fn poly(v: &[f64], t: f64) -> f64 {
        v.iter().rev().fold(0.0, |acc, c| acc * t + c)
    }
}

// Frontier slot holding the tracked path.
const TRACK_H: u8 = 1;
const TRACK_CARRY: u8 = 2;
const TRACK_DONE: u8 = 3;
// 4 + k: vertical slot k; 4 + 16 + k: diagonal slot k.
const TRACK_V: u8 = 4;
const TRACK_D: u8 = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct State {
    vbits: u16,
    dbits: u16,
    carry: bool,
    h: bool,
    track: u8,
    // 0 = unrecorded; otherwise 2·L + (diagonal as u8)
    hit: u8,
    top: u8,
}

fn bit(word: u16, k: usize) -> bool {
    word >> k & 1 == 1
}

fn with_bit(word: u16, k: usize, v: bool) -> u16 {
    if v {
        word | 1 << k
    } else {
        word & !(1 << k)
    }
}

fn outbound_choices(count: u32, six: bool) -> impl Iterator<Item = u8> {
    (0..8u8).filter(move |o| o.count_ones() == count && !(six && o & outbound::SE != 0))
}

/// Exact refined enumeration of a domain-wall prescription, capped at `cap`.
pub fn enumerate_capped<O: WeightOracle>(n: usize, bc: Boundary, oracle: &O, cap: usize) -> Result<RefinedPartition> {
    if n == 0 {
        return Err(Error::Range("grid size must be positive".into()));
    }
    if n > cap || n > 15 {
        return Err(Error::Size { n, cap: cap.min(15) });
    }
    if bc == Boundary::Free {
        return Err(Error::Range("a free boundary cannot be enumerated".into()));
    }
    let six = bc == Boundary::SixVertex;
    let pres = |f: Family, x: usize, y: usize| prescribed(n, bc, f, x, y).unwrap_or(false);

    let corner = pres(Family::D, 0, n);
    let mut dbits = 0u16;
    for k in 0..=n {
        dbits = with_bit(dbits, k, pres(Family::D, k, n));
    }
    let start =
        State { vbits: 0, dbits, carry: false, h: true, track: if corner { TRACK_D } else { TRACK_H }, hit: 0, top: 0 };
    let mut layer: BTreeMap<State, CompensatedSum> = BTreeMap::new();
    let mut one = CompensatedSum::new();
    one.add(1.0);
    layer.insert(start, one);

    for y in (1..=n).rev() {
        // row start: horizontal carry from the left boundary, pending
        // left-boundary diagonal
        let mut next = BTreeMap::new();
        for (mut s, w) in layer {
            s.h = pres(Family::H, 0, y);
            s.carry = pres(Family::D, 0, y - 1);
            next.insert(s, w);
        }
        layer = next;
        for x in 1..=n {
            let mut next: BTreeMap<State, CompensatedSum> = BTreeMap::new();
            for (s, w) in &layer {
                let mut inb = 0u8;
                if bit(s.vbits, x) {
                    inb |= inbound::N;
                }
                if bit(s.dbits, x - 1) {
                    inb |= inbound::NW;
                }
                if s.h {
                    inb |= inbound::W;
                }
                let tracked_in = match s.track {
                    TRACK_H => Some(inbound::W),
                    t if t == TRACK_V + x as u8 => Some(inbound::N),
                    t if t == TRACK_D + (x - 1) as u8 => Some(inbound::NW),
                    _ => None,
                };
                for out in outbound_choices(inb.count_ones(), six) {
                    let e = out & outbound::E != 0;
                    let se = out & outbound::SE != 0;
                    let so = out & outbound::S != 0;
                    if x == n && (e != pres(Family::H, n, y) || se != pres(Family::D, n, y - 1)) {
                        continue;
                    }
                    if y == 1 && (so != pres(Family::V, x, 0) || se != pres(Family::D, x, 0)) {
                        continue;
                    }
                    let p = VertexPattern { inbound: inb, outbound: out };
                    let wt = oracle.weight(x, y, p);
                    if wt == 0.0 {
                        continue;
                    }
                    let mut t = *s;
                    t.h = e;
                    t.vbits = with_bit(t.vbits, x, so);
                    t.dbits = with_bit(t.dbits, x - 1, s.carry);
                    t.carry = se;
                    if s.track == TRACK_CARRY {
                        t.track = TRACK_D + (x - 1) as u8;
                    }
                    if let Some(ib) = tracked_in {
                        let ob = p.partner(ib).expect("tracked edge is occupied");
                        if x == n && t.hit == 0 {
                            t.hit = 2 * y as u8 + u8::from(ib == inbound::NW);
                        }
                        if y == n && ob != outbound::E && t.top == 0 {
                            t.top = 2 * x as u8 + u8::from(ob == outbound::SE);
                        }
                        t.track = match ob {
                            outbound::E => TRACK_H,
                            outbound::SE => TRACK_CARRY,
                            _ => TRACK_V + x as u8,
                        };
                        if t.hit != 0 && t.top != 0 {
                            t.track = TRACK_DONE;
                        }
                    }
                    if x == n {
                        t.dbits = with_bit(t.dbits, n, t.carry);
                        if t.track == TRACK_CARRY {
                            t.track = TRACK_D + n as u8;
                        }
                        t.carry = false;
                    }
                    let mut acc = CompensatedSum::new();
                    acc.add(w.value() * wt);
                    next.entry(t).or_default().merge(&acc);
                }
            }
            layer = next;
        }
    }

    let mut total = CompensatedSum::new();
    let mut hit_h = vec![CompensatedSum::new(); n];
    let mut hit_d = vec![CompensatedSum::new(); n];
    let mut top_v = vec![CompensatedSum::new(); n];
    let mut top_d = vec![CompensatedSum::new(); n];
    for (s, w) in layer {
        let mut bottom_ok = true;
        for k in 1..=n {
            bottom_ok &= bit(s.vbits, k) == pres(Family::V, k, 0);
            bottom_ok &= bit(s.dbits, k) == pres(Family::D, k, 0);
        }
        if !bottom_ok {
            continue;
        }
        debug_assert!(s.hit != 0 && s.top != 0);
        let v = w.value();
        total.add(v);
        let (hl, hd) = ((s.hit / 2) as usize, s.hit % 2 == 1);
        let hits = if hd { &mut hit_d } else { &mut hit_h };
        hits[hl - 1].add(v);
        let (tl, td) = ((s.top / 2) as usize, s.top % 2 == 1);
        let tops = if td { &mut top_d } else { &mut top_v };
        tops[tl - 1].add(v);
    }
    let vals = |v: Vec<CompensatedSum>| v.iter().map(CompensatedSum::value).collect();
    Ok(RefinedPartition {
        n,
        total: total.value(),
        hit_h: vals(hit_h),
        hit_d: vals(hit_d),
        top_v: vals(top_v),
        top_d: vals(top_d),
    })
}

/// Twenty-vertex enumeration under `DWBC1` or `DWBC2`, capped at [`CAP_20V`].
pub fn enumerate_20v<O: WeightOracle>(n: usize, bc: Boundary, oracle: &O) -> Result<RefinedPartition> {
    if !matches!(bc, Boundary::Dwbc1 | Boundary::Dwbc2) {
        return Err(Error::Range(format!("{bc} is not a twenty-vertex boundary condition")));
    }
    enumerate_capped(n, bc, oracle, CAP_20V)
}

/// Six-vertex domain-wall enumeration with weights `(a, b, c)`; the last
/// column uses `(a, b, c)` multiplied componentwise by `last_scale`.
pub fn enumerate_6v(n: usize, a: f64, b: f64, c: f64, last_scale: [f64; 3]) -> Result<RefinedPartition> {
    let bulk = six_vertex_map(a, b, c);
    let last = six_vertex_map(a * last_scale[0], b * last_scale[1], c * last_scale[2]);
    enumerate_capped(n, Boundary::SixVertex, &LastColumn { n, bulk: &bulk, last: &last }, CAP_6V)
}

/// All valid configurations, by plain depth-first search.
pub fn list_configurations(n: usize, bc: Boundary) -> Result<Vec<Configuration>> {
    let cap = if bc == Boundary::SixVertex { CAP_6V } else { CAP_20V };
    if n == 0 || n > cap {
        return Err(Error::Size { n, cap });
    }
    if bc == Boundary::Free {
        return Err(Error::Range("a free boundary cannot be enumerated".into()));
    }
    let nodes: Vec<(usize, usize)> = (1..=n).rev().flat_map(|y| (1..=n).map(move |x| (x, y))).collect();
    let mut out = Vec::new();
    let mut c = Configuration::boundary_only(n, bc);
    dfs(&mut c, &nodes, 0, bc == Boundary::SixVertex, &mut out);
    Ok(out)
}

fn dfs(c: &mut Configuration, nodes: &[(usize, usize)], k: usize, six: bool, out: &mut Vec<Configuration>) {
    if k == nodes.len() {
        if c.validate().is_ok() {
            out.push(c.clone());
        }
        return;
    }
    let (x, y) = nodes[k];
    let inb = c.raw_pattern(x, y).inbound;
    let n = c.n();
    for o in outbound_choices(inb.count_ones(), six) {
        let edges = [
            (Family::H, x, y, o & outbound::E != 0),
            (Family::D, x, y - 1, o & outbound::SE != 0),
            (Family::V, x, y - 1, o & outbound::S != 0),
        ];
        if edges.iter().any(|&(f, a, b, v)| prescribed(n, c.bc(), f, a, b).is_some_and(|p| p != v)) {
            continue;
        }
        for &(f, a, b, v) in &edges {
            c.set(f, a, b, v);
        }
        dfs(c, nodes, k + 1, six, out);
    }
    for &(f, a, b) in &[(Family::H, x, y), (Family::D, x, y - 1), (Family::V, x, y - 1)] {
        if prescribed(n, c.bc(), f, a, b).is_none() {
            c.set(f, a, b, false);
        }
    }
}

/// Refined sums computed configuration by configuration from a list.
pub fn refined_from_list<O: WeightOracle>(configs: &[Configuration], oracle: &O) -> Result<RefinedPartition> {
    let n = configs.first().map(Configuration::n).ok_or_else(|| Error::Range("empty configuration list".into()))?;
    let mut r = RefinedPartition {
        n,
        total: 0.0,
        hit_h: vec![0.0; n],
        hit_d: vec![0.0; n],
        top_v: vec![0.0; n],
        top_d: vec![0.0; n],
    };
    for c in configs {
        let w = c.weight_with(|x, y, p| oracle.weight(x, y, p))?;
        r.total += w;
        let (l, s) = c.hit_position()?;
        let hits = if s == Step::Diagonal { &mut r.hit_d } else { &mut r.hit_h };
        hits[l - 1] += w;
        let (l, s) = c.top_exit_position()?;
        let tops = if s == Step::Diagonal { &mut r.top_d } else { &mut r.top_v };
        tops[l - 1] += w;
    }
    Ok(r)
}

/// `(a2·a3)^{n²}`: the bulk factor between twenty- and six-vertex sums.
pub fn bulk_factor(n: usize, p: &AngleParams) -> f64 {
    let t = kagome_triple(p);
    (t.a[1] * t.a[2]).powi((n * n) as i32)
}

fn sixv_weights(p: &AngleParams) -> (f64, f64, f64) {
    let t = kagome_triple(p);
    (t.a[0], t.b[0], t.c[0])
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Relative defect of `Z20V = (a2·a3)^{n²}·Z6V[a1, b1, c1]` under DWBC2.
pub fn verify_total_identity(n: usize, p: &AngleParams) -> Result<f64> {
    let lhs = enumerate_20v(n, Boundary::Dwbc2, &vertex_weight_map(&compute_weights(p)))?.total;
    let (a, b, c) = sixv_weights(p);
    let rhs = bulk_factor(n, p) * enumerate_6v(n, a, b, c, [1.0; 3])?.total;
    Ok(rel(lhs, rhs))
}

/// Outcome of [`verify_refined_identity`].
#[derive(Debug, Clone, PartialEq)]
pub struct RefinedCheck {
    /// Worst relative defect over samples and both variants.
    pub max_error: f64,
    /// Samples skipped at a pole of the spectral map.
    pub skipped: Vec<f64>,
}

/// Checks the refined identities for the hit and the top-exit refinements at
/// each `σ`, using `(τ, g)` from [`refined_map`] with `μ` and with `−μ`.
pub fn verify_refined_identity(n: usize, p: &AngleParams, sigmas: &[f64]) -> Result<RefinedCheck> {
    let z20 = enumerate_20v(n, Boundary::Dwbc2, &vertex_weight_map(&compute_weights(p)))?;
    let (a, b, c) = sixv_weights(p);
    let z6 = enumerate_6v(n, a, b, c, [1.0; 3])?;
    let pref = bulk_factor(n, p);
    let mut check = RefinedCheck { max_error: 0.0, skipped: Vec::new() };
    for &sigma in sigmas {
        let rhs = pref * RefinedPartition::poly(&z6.hit_h, sigma);
        let (Ok((tau, g)), Ok((tt, gt))) = (refined_map(sigma, p), refined_map(sigma, &p.mirrored())) else {
            check.skipped.push(sigma);
            continue;
        };
        let lhs = RefinedPartition::poly(&z20.hit_h, tau) + g * RefinedPartition::poly(&z20.hit_d, tau);
        let lhs_t = RefinedPartition::poly(&z20.top_v, tt) + gt * RefinedPartition::poly(&z20.top_d, tt);
        check.max_error = check.max_error.max(rel(lhs, rhs)).max(rel(lhs_t, rhs));
    }
    Ok(check)
}

/// Relative defect of the last-column identity
/// `Z20V[θ] = (a2·a3)^{n²}·(a3[θ]/a3)^n·Z6V[θ]` with `θ = e^{−2i·shift}`.
pub fn verify_last_column(n: usize, p: &AngleParams, shift: f64) -> Result<f64> {
    let t0 = kagome_triple(p);
    let t = shifted_kagome_triple(p, shift);
    let bulk = vertex_weight_map(&compute_weights(p));
    let last = vertex_weight_map(&omega_from_kagome(&t));
    let lhs = enumerate_20v(n, Boundary::Dwbc2, &LastColumn { n, bulk: &bulk, last: &last })?.total;
    let scale = [t.a[0] / t0.a[0], t.b[0] / t0.b[0], t.c[0] / t0.c[0]];
    let z6 = enumerate_6v(n, t0.a[0], t0.b[0], t0.c[0], scale)?.total;
    let rhs = bulk_factor(n, p) * (t.a[2] / t0.a[2]).powi(n as i32) * z6;
    Ok(rel(lhs, rhs))
}
