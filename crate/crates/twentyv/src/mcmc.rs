//! Markov-chain samplers and their observables.
//!
//! The twenty-vertex chain works on plaquettes: the section of path joining
//! the NW and SE corners of a unit square is moved between the anti-diagonal
//! `D`, the bottom-left corner `BL` (W and S edges of the square) and the
//! top-right corner `TR` (N and E edges). The proposal kernel is symmetric;
//! acceptance is either `W′/W0` with `W0 = (max ω)^4` or Metropolis.
//!
//! The domino chain works on the Schröder-path encoding of the fundamental
//! domain, see [`QthadtChain`].

use crate::arctic::{closed_curve, full_curve_20v, ClosedCurve, SampleOptions};
use crate::enumerate::list_configurations;
use crate::error::{Error, Result};
use crate::lattice::{Boundary, Configuration, Family};
use crate::qthadt::SchroderFamily;
use crate::weights::{compute_weights, vertex_weight_map, AngleParams, WeightMap};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::HashMap;
use std::hash::Hash;

/// Acceptance rule for weighted chains.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Acceptance {
    /// `P = W′/W0`.
    Lyberg,
    /// `P = min(1, W′/W)`.
    Metropolis,
}

impl std::str::FromStr for Acceptance {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lyberg" => Ok(Acceptance::Lyberg),
            "metropolis" => Ok(Acceptance::Metropolis),
            _ => Err(Error::Parse(format!("unknown acceptance scheme '{s}'"))),
        }
    }
}

/// Elementary move of the NW–SE section of a plaquette.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PlaquetteMove {
    DiagToBl,
    BlToDiag,
    DiagToTr,
    TrToDiag,
}

/// Edge occupancy of the plaquette with lower-left node `(x, y)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Plaquette {
    left: bool,
    bottom: bool,
    top: bool,
    right: bool,
    diag: bool,
}

impl Plaquette {
    fn read(c: &Configuration, x: usize, y: usize) -> Self {
        Plaquette {
            left: c.get(Family::V, x, y),
            bottom: c.get(Family::H, x, y),
            top: c.get(Family::H, x, y + 1),
            right: c.get(Family::V, x + 1, y),
            diag: c.get(Family::D, x, y),
        }
    }

    fn bl(&self) -> bool {
        self.left && self.bottom
    }

    fn tr(&self) -> bool {
        self.top && self.right
    }

    fn bl_free(&self) -> bool {
        !self.left && !self.bottom
    }

    fn tr_free(&self) -> bool {
        !self.top && !self.right
    }
}

/// Moves available at a plaquette with their probabilities conditional on the
/// plaquette having been selected; at most two entries, total at most one.
///
/// A present section is picked uniformly. From `D` the targets are the
/// corners whose two edges are empty, each with equal probability; from a
/// corner the move to `D` happens with probability `1/m`, `m` the number of
/// targets the resulting `D` state offers.
pub fn plaquette_moves(c: &Configuration, x: usize, y: usize) -> Vec<(PlaquetteMove, f64)> {
    let (moves, k) = candidate_moves(c, x, y);
    moves[..k].to_vec()
}

fn candidate_moves(c: &Configuration, x: usize, y: usize) -> ([(PlaquetteMove, f64); 2], usize) {
    let p = Plaquette::read(c, x, y);
    let mut out = [(PlaquetteMove::DiagToBl, 0.0); 2];
    let mut k = 0;
    let sections = p.diag as usize + p.bl() as usize + p.tr() as usize;
    if sections == 0 {
        return (out, 0);
    }
    let pick = 1.0 / sections as f64;
    let mut push = |m, q| {
        out[k] = (m, q);
        k += 1;
    };
    if p.diag {
        let targets = (p.bl_free() as usize + p.tr_free() as usize) as f64;
        if p.bl_free() {
            push(PlaquetteMove::DiagToBl, pick / targets);
        }
        if p.tr_free() {
            push(PlaquetteMove::DiagToTr, pick / targets);
        }
    } else {
        if p.bl() {
            push(PlaquetteMove::BlToDiag, pick / (1 + p.tr_free() as usize) as f64);
        }
        if p.tr() {
            push(PlaquetteMove::TrToDiag, pick / (1 + p.bl_free() as usize) as f64);
        }
    }
    (out, k)
}

pub fn apply_move(c: &mut Configuration, x: usize, y: usize, mv: PlaquetteMove) {
    let (diag, bl, tr) = match mv {
        PlaquetteMove::DiagToBl => (false, Some(true), None),
        PlaquetteMove::BlToDiag => (true, Some(false), None),
        PlaquetteMove::DiagToTr => (false, None, Some(true)),
        PlaquetteMove::TrToDiag => (true, None, Some(false)),
    };
    c.set(Family::D, x, y, diag);
    if let Some(b) = bl {
        c.set(Family::V, x, y, b);
        c.set(Family::H, x, y, b);
    }
    if let Some(b) = tr {
        c.set(Family::H, x, y + 1, b);
        c.set(Family::V, x + 1, y, b);
    }
}

/// The DWBC1 configuration with every edge occupied at nodes `x + y ≤ n`,
/// the W and NW inputs routed S and SE on the line `x + y = n + 1`, and empty
/// nodes beyond.
pub fn init_diagonal(n: usize) -> Result<Configuration> {
    if n == 0 {
        return Err(Error::Domain("n must be at least 1".into()));
    }
    let mut c = Configuration::boundary_only(n, Boundary::Dwbc1);
    for x in 1..=n {
        for y in 1..=n {
            let s = x + y;
            if s <= n {
                c.set(Family::H, x, y, true);
            }
            if s <= n + 1 {
                c.set(Family::D, x, y - 1, true);
                c.set(Family::V, x, y - 1, true);
            }
        }
    }
    c.validate()?;
    Ok(c)
}

/// Twenty-vertex DWBC1 chain.
#[derive(Debug, Clone)]
pub struct TwentyVChain {
    config: Configuration,
    weights: WeightMap,
    w0: f64,
    acceptance: Acceptance,
    seed: u64,
    rng: ChaCha8Rng,
    steps: u64,
    accepted: u64,
}

impl TwentyVChain {
    /// Chain started from [`init_diagonal`].
    pub fn new(n: usize, params: &AngleParams, acceptance: Acceptance, seed: u64) -> Result<Self> {
        Self::from_config(init_diagonal(n)?, params, acceptance, seed)
    }

    pub fn from_config(config: Configuration, params: &AngleParams, acceptance: Acceptance, seed: u64) -> Result<Self> {
        config.validate()?;
        let w = compute_weights(params);
        if w.omega.iter().any(|&o| !(o > 0.0)) {
            return Err(Error::Domain("sampling needs positive weights".into()));
        }
        Ok(TwentyVChain {
            config,
            weights: vertex_weight_map(&w),
            w0: w.max().powi(4),
            acceptance,
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
            steps: 0,
            accepted: 0,
        })
    }

    pub fn config(&self) -> &Configuration {
        &self.config
    }

    pub fn n(&self) -> usize {
        self.config.n()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn accepted(&self) -> u64 {
        self.accepted
    }

    pub fn acceptance(&self) -> Acceptance {
        self.acceptance
    }

    fn local_weight(&self, x: usize, y: usize) -> f64 {
        let w = |a, b| self.weights.get(self.config.raw_pattern(a, b));
        w(x, y) * w(x + 1, y) * w(x, y + 1) * w(x + 1, y + 1)
    }

    fn acceptance_probability(&self, before: f64, after: f64) -> f64 {
        match self.acceptance {
            Acceptance::Lyberg => {
                let p = after / self.w0;
                assert!(p <= 1.0 + 1e-12, "W0 normalization violated: P = {p}");
                p
            }
            Acceptance::Metropolis => (after / before).min(1.0),
        }
    }

    /// One proposal; returns whether the configuration changed.
    pub fn step(&mut self) -> bool {
        self.steps += 1;
        let n = self.n();
        if n < 2 {
            return false;
        }
        let x = self.rng.gen_range(1..n);
        let y = self.rng.gen_range(1..n);
        let (moves, k) = candidate_moves(&self.config, x, y);
        let mut r: f64 = self.rng.gen();
        let Some(mv) = moves[..k].iter().find_map(|&(m, p)| {
            if r < p {
                Some(m)
            } else {
                r -= p;
                None
            }
        }) else {
            return false;
        };
        let before = self.local_weight(x, y);
        apply_move(&mut self.config, x, y, mv);
        let after = self.local_weight(x, y);
        if self.rng.gen::<f64>() < self.acceptance_probability(before, after) {
            self.accepted += 1;
            true
        } else {
            apply_move(&mut self.config, x, y, inverse(mv));
            false
        }
    }

    pub fn run(&mut self, steps: u64) {
        for _ in 0..steps {
            self.step();
        }
    }

    /// Exact one-step transition law from the current configuration,
    /// the holding probability included.
    pub fn transition_law(&self) -> Vec<(Configuration, f64)> {
        let n = self.n();
        let mut out: Vec<(Configuration, f64)> = Vec::new();
        let mut stay = 1.0;
        if n >= 2 {
            let pick = 1.0 / ((n - 1) * (n - 1)) as f64;
            for x in 1..n {
                for y in 1..n {
                    for (mv, p) in plaquette_moves(&self.config, x, y) {
                        let before = self.local_weight(x, y);
                        let mut probe = self.clone();
                        apply_move(&mut probe.config, x, y, mv);
                        let after = probe.local_weight(x, y);
                        let q = pick * p * self.acceptance_probability(before, after);
                        stay -= q;
                        out.push((probe.config, q));
                    }
                }
            }
        }
        out.push((self.config.clone(), stay));
        out
    }
}

fn inverse(mv: PlaquetteMove) -> PlaquetteMove {
    match mv {
        PlaquetteMove::DiagToBl => PlaquetteMove::BlToDiag,
        PlaquetteMove::BlToDiag => PlaquetteMove::DiagToBl,
        PlaquetteMove::DiagToTr => PlaquetteMove::TrToDiag,
        PlaquetteMove::TrToDiag => PlaquetteMove::DiagToTr,
    }
}

/// Default spacing between recorded samples: ten proposals per plaquette.
pub fn default_record_interval(n: usize) -> u64 {
    10 * (n * n) as u64
}

/// Normalized Boltzmann law over all DWBC1 configurations.
pub fn exact_distribution_20v(n: usize, params: &AngleParams) -> Result<HashMap<Configuration, f64>> {
    let map = vertex_weight_map(&compute_weights(params));
    let configs = list_configurations(n, Boundary::Dwbc1)?;
    let weights = configs.iter().map(|c| c.weight(&map)).collect::<Result<Vec<_>>>()?;
    let z: f64 = weights.iter().sum();
    Ok(configs.into_iter().zip(weights).map(|(c, w)| (c, w / z)).collect())
}

/// `½ Σ |p̂ − p|`; empirical states missing from `exact` count in full.
pub fn total_variation<K: Hash + Eq>(empirical: &HashMap<K, u64>, exact: &HashMap<K, f64>) -> f64 {
    let total: u64 = empirical.values().sum();
    if total == 0 {
        return 1.0;
    }
    let t = total as f64;
    let mut s: f64 = exact.iter().map(|(k, &p)| (empirical.get(k).copied().unwrap_or(0) as f64 / t - p).abs()).sum();
    s += empirical.iter().filter(|(k, _)| !exact.contains_key(k)).map(|(_, &c)| c as f64 / t).sum::<f64>();
    0.5 * s
}

/// Per-node frequency of an occupied outgoing SE edge, `grid[y−1][x−1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityField {
    pub n: usize,
    pub grid: Vec<Vec<f64>>,
    pub samples: u64,
}

impl DensityField {
    pub fn new(n: usize) -> Self {
        DensityField { n, grid: vec![vec![0.0; n]; n], samples: 0 }
    }

    /// Adds one sample to the running averages.
    pub fn record(&mut self, c: &Configuration) {
        self.record_with(|x, y| c.get(Family::D, x + 1, y));
    }

    /// Adds the sample `indicator(col, row)`, both zero-based.
    pub fn record_with<F: Fn(usize, usize) -> bool>(&mut self, indicator: F) {
        self.samples += 1;
        let k = self.samples as f64;
        for (y, row) in self.grid.iter_mut().enumerate() {
            for (x, g) in row.iter_mut().enumerate() {
                let v = indicator(x, y) as u8 as f64;
                *g += (v - *g) / k;
            }
        }
    }

    /// Grey-level cells, black for density one, one per node centred at
    /// `((x + ½)/n, (y + ½)/n)` in zero-based indices.
    pub fn svg_cells(&self, view: &crate::arctic::Viewport) -> String {
        let n = self.n as f64;
        let mut s = String::new();
        for (y, row) in self.grid.iter().enumerate() {
            for (x, &d) in row.iter().enumerate() {
                let (px, py) = view.map(x as f64 / n, (y + 1) as f64 / n);
                let (qx, qy) = view.map((x + 1) as f64 / n, y as f64 / n);
                let g = (255.0 * (1.0 - d.clamp(0.0, 1.0))).round() as u8;
                s.push_str(&format!(
                    "<rect x=\"{px:.3}\" y=\"{py:.3}\" width=\"{:.3}\" height=\"{:.3}\" fill=\"rgb({g},{g},{g})\"/>\n",
                    qx - px,
                    qy - py
                ));
            }
        }
        s
    }

    /// Sample-weighted average of two fields of equal size.
    pub fn merge(&mut self, other: &DensityField) {
        let total = self.samples + other.samples;
        if total == 0 {
            return;
        }
        let (a, b) = (self.samples as f64 / total as f64, other.samples as f64 / total as f64);
        for (r, s) in self.grid.iter_mut().zip(&other.grid) {
            for (g, h) in r.iter_mut().zip(s) {
                *g = a * *g + b * h;
            }
        }
        self.samples = total;
    }

    /// Mean absolute difference per node.
    pub fn l1_distance(&self, other: &DensityField) -> f64 {
        let s: f64 = self.grid.iter().flatten().zip(other.grid.iter().flatten()).map(|(a, b)| (a - b).abs()).sum();
        s / (self.n * self.n) as f64
    }

    /// Header `y,x,density`, rows in row-major order from `y = 1`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("y,x,density\n");
        for (y, row) in self.grid.iter().enumerate() {
            for (x, v) in row.iter().enumerate() {
                s.push_str(&format!("{},{},{}\n", y + 1, x + 1, v));
            }
        }
        s
    }
}

/// Field of a set of configurations.
pub fn density_diagonal(states: &[Configuration]) -> Result<DensityField> {
    let n = states.first().ok_or_else(|| Error::Domain("no states".into()))?.n();
    let mut f = DensityField::new(n);
    for c in states {
        f.record(c);
    }
    Ok(f)
}

/// Node `(x, y)` in unit-square coordinates `((x − ½)/n, (y − ½)/n)`.
pub fn node_position(n: usize, x: usize, y: usize) -> (f64, f64) {
    ((x as f64 - 0.5) / n as f64, (y as f64 - 0.5) / n as f64)
}

/// Result of [`equilibrate`].
#[derive(Debug, Clone)]
pub struct Equilibration {
    pub field: DensityField,
    pub windows: usize,
    pub last_l1: f64,
    pub converged: bool,
}

/// Runs windows of `window` recorded samples, spaced by `interval` steps,
/// until two consecutive window fields differ in L1 by less than `tol` or
/// `max_windows` is reached. The returned field is the last window.
pub fn equilibrate(
    chain: &mut TwentyVChain,
    interval: u64,
    window: usize,
    tol: f64,
    max_windows: usize,
) -> Equilibration {
    let n = chain.n();
    let mut prev: Option<DensityField> = None;
    let mut last_l1 = f64::INFINITY;
    for w in 1..=max_windows {
        let mut f = DensityField::new(n);
        for _ in 0..window {
            chain.run(interval);
            f.record(chain.config());
        }
        if let Some(p) = &prev {
            last_l1 = p.l1_distance(&f);
            if last_l1 < tol {
                return Equilibration { field: f, windows: w, last_l1, converged: true };
            }
        }
        prev = Some(f);
    }
    Equilibration {
        field: prev.unwrap_or_else(|| DensityField::new(n)),
        windows: max_windows,
        last_l1,
        converged: false,
    }
}

/// Liquid/frozen disagreement between a density field and the predicted
/// curve: a node is liquid in the field when its density lies in
/// `(threshold, 1 − threshold)`.
pub fn misclassification(field: &DensityField, curve: &ClosedCurve, threshold: f64) -> f64 {
    let n = field.n;
    let mut bad = 0usize;
    for y in 1..=n {
        for x in 1..=n {
            let d = field.grid[y - 1][x - 1];
            let liquid = d > threshold && d < 1.0 - threshold;
            let (px, py) = node_position(n, x, y);
            if liquid != curve.contains(px, py) {
                bad += 1;
            }
        }
    }
    bad as f64 / (n * n) as f64
}

/// Predicted liquid region of the twenty-vertex model.
pub fn predicted_region(params: &AngleParams) -> Result<ClosedCurve> {
    closed_curve(&full_curve_20v(params), &SampleOptions::adaptive(400, 2e-3))
}

/// `(u, v) = ((y + x)/2, (y − x)/2)`.
pub fn rotate_uv((x, y): (f64, f64)) -> (f64, f64) {
    ((y + x) / 2.0, (y - x) / 2.0)
}

/// Mean position `u(v)` of the uppermost path over a fixed grid of `v`.
#[derive(Debug, Clone, PartialEq)]
pub struct PathProfile {
    pub n: usize,
    pub v: Vec<f64>,
    pub u: Vec<f64>,
    pub samples: u64,
}

impl PathProfile {
    pub fn new(n: usize, v: Vec<f64>) -> Self {
        let u = vec![0.0; v.len()];
        PathProfile { n, v, u, samples: 0 }
    }

    pub fn record(&mut self, c: &Configuration) -> Result<()> {
        let path = c.uppermost_path()?;
        let pts: Vec<(f64, f64)> = path.iter().map(|&(x, y, _)| rotate_uv(node_position(self.n, x, y))).collect();
        self.samples += 1;
        let k = self.samples as f64;
        for (i, &v) in self.v.iter().enumerate() {
            // v strictly decreases along the path
            let u = pts
                .windows(2)
                .find(|w| w[0].1 >= v && v >= w[1].1)
                .map(|w| {
                    let t = (w[0].1 - v) / (w[0].1 - w[1].1);
                    w[0].0 + t * (w[1].0 - w[0].0)
                })
                .unwrap_or(f64::NAN);
            self.u[i] += (u - self.u[i]) / k;
        }
        Ok(())
    }
}

/// Mean uppermost path of a set of configurations.
pub fn outermost_mean(states: &[Configuration], v: Vec<f64>) -> Result<PathProfile> {
    let n = states.first().ok_or_else(|| Error::Domain("no states".into()))?.n();
    let mut p = PathProfile::new(n, v);
    for c in states {
        p.record(c)?;
    }
    Ok(p)
}

/// Largest `u` on the curve at height `v`, if the line meets it.
pub fn curve_outer_u(curve: &ClosedCurve, v: f64) -> Option<f64> {
    let pts: Vec<(f64, f64)> = curve.points.iter().map(|&p| rotate_uv(p)).collect();
    let mut best: Option<f64> = None;
    for i in 0..pts.len() {
        let (a, b) = (pts[i], pts[(i + 1) % pts.len()]);
        if (a.1 - v) * (b.1 - v) <= 0.0 && a.1 != b.1 {
            let t = (v - a.1) / (b.1 - a.1);
            let u = a.0 + t * (b.0 - a.0);
            best = Some(best.map_or(u, |m: f64| m.max(u)));
        }
    }
    best
}

/// Outcome of [`finite_size_fit`].
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteSizeFit {
    pub exponent: f64,
    pub prefactor: f64,
    /// `(n, mean deviation)` per size.
    pub deviations: Vec<(usize, f64)>,
}

/// Least-squares exponent `α` of `mean_v (u(v) − u_n(v)) ∝ n^α`.
pub fn finite_size_fit(profiles: &[PathProfile], curve: &ClosedCurve) -> Result<FiniteSizeFit> {
    if profiles.len() < 3 {
        return Err(Error::Domain(format!("finite-size fit needs at least 3 sizes, got {}", profiles.len())));
    }
    let mut deviations = Vec::with_capacity(profiles.len());
    for p in profiles {
        let mut s = 0.0;
        let mut k = 0usize;
        for (&v, &u) in p.v.iter().zip(&p.u) {
            if let Some(limit) = curve_outer_u(curve, v) {
                if u.is_finite() {
                    s += limit - u;
                    k += 1;
                }
            }
        }
        if k == 0 {
            return Err(Error::Domain(format!("no usable heights at n={}", p.n)));
        }
        let d = s / k as f64;
        if !(d > 0.0) {
            return Err(Error::Domain(format!("non-positive mean deviation {d:e} at n={}", p.n)));
        }
        deviations.push((p.n, d));
    }
    let xs: Vec<f64> = deviations.iter().map(|&(n, _)| (n as f64).ln()).collect();
    let ys: Vec<f64> = deviations.iter().map(|&(_, d)| d.ln()).collect();
    let m = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / m, ys.iter().sum::<f64>() / m);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let exponent = sxy / sxx;
    Ok(FiniteSizeFit { exponent, prefactor: (my - exponent * mx).exp(), deviations })
}

/// Chain on Schröder path families of the quarter-turn symmetric holey
/// domino tilings, stored as the fundamental domain.
///
/// Proposal slots, chosen uniformly:
/// - two flip flavors per unit cell: `TR` corner ↔ diagonal and `BL` corner
///   ↔ diagonal, the path images of the two domino flips;
/// - one boundary slot per pair `(j, j+1)`: path `j` ↔ path `j+1` obtained by
///   a leading diagonal step and a unit shift, moving both endpoints along
///   the periodic boundary;
/// - the cross-move: creation or annihilation of the path `(0,2) → (1,1) →
///   (1,0)`.
///
/// Each slot is an involution, so proposals are symmetric; acceptance is
/// `min(1, γ^{Δ#diag})`.
#[derive(Debug, Clone)]
pub struct QthadtChain {
    family: SchroderFamily,
    owner: Vec<Option<usize>>,
    gamma: f64,
    seed: u64,
    rng: ChaCha8Rng,
    steps: u64,
    accepted: u64,
}

/// Kind of QTHADT proposal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum QthadtSlot {
    /// Cell with lower-left corner `(a, b)`.
    FlipTr(usize, usize),
    FlipBl(usize, usize),
    /// Pair `(j, j+1)`.
    Shift(usize),
    Cross,
}

impl QthadtChain {
    /// Chain started from the empty family, the single state with no path.
    pub fn new(n: usize, gamma: f64, seed: u64) -> Result<Self> {
        Self::from_family(SchroderFamily::empty(n), gamma, seed)
    }

    pub fn from_family(family: SchroderFamily, gamma: f64, seed: u64) -> Result<Self> {
        if family.n == 0 {
            return Err(Error::Domain("n must be at least 1".into()));
        }
        if !(gamma > 0.0) {
            return Err(Error::Domain("sampling needs γ > 0".into()));
        }
        family.validate()?;
        let mut c = QthadtChain {
            owner: Vec::new(),
            family,
            gamma,
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
            steps: 0,
            accepted: 0,
        };
        c.rebuild_owner();
        Ok(c)
    }

    fn rebuild_owner(&mut self) {
        let n = self.family.n;
        self.owner = vec![None; (n + 1) * (n + 2)];
        for (j, p) in self.family.paths.iter().enumerate() {
            for &v in p.iter().flatten() {
                let i = self.idx(v);
                self.owner[i] = Some(j);
            }
        }
    }

    fn idx(&self, (x, y): (usize, usize)) -> usize {
        y * (self.family.n + 1) + x
    }

    fn owner_of(&self, v: (usize, usize)) -> Option<usize> {
        if v.0 > self.family.n || v.1 > self.family.n + 1 {
            return None;
        }
        self.owner[self.idx(v)]
    }

    pub fn family(&self) -> &SchroderFamily {
        &self.family
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Changes `γ` in place, for annealing schedules.
    pub fn set_gamma(&mut self, gamma: f64) -> Result<()> {
        if !(gamma > 0.0) {
            return Err(Error::Domain("sampling needs γ > 0".into()));
        }
        self.gamma = gamma;
        Ok(())
    }

    /// Whether a path leaves `(x, y)` by a diagonal step.
    pub fn diagonal_at(&self, x: usize, y: usize) -> bool {
        let Some(j) = self.owner_of((x, y)) else { return false };
        let p = self.family.paths[j].as_ref().expect("owner points at a path");
        p.windows(2).any(|w| w[0] == (x, y) && w[1] == (x + 1, y.wrapping_sub(1)))
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn accepted(&self) -> u64 {
        self.accepted
    }

    /// Number of proposal slots.
    pub fn slot_count(&self) -> usize {
        let n = self.family.n;
        2 * n * n + n.saturating_sub(1) + 1
    }

    pub fn slot(&self, k: usize) -> QthadtSlot {
        let n = self.family.n;
        let cells = n * n;
        if k < cells {
            QthadtSlot::FlipTr(k % n, k / n)
        } else if k < 2 * cells {
            QthadtSlot::FlipBl((k - cells) % n, (k - cells) / n)
        } else if k < 2 * cells + n - 1 {
            QthadtSlot::Shift(k - 2 * cells)
        } else {
            QthadtSlot::Cross
        }
    }

    /// The family reached through a slot, if the slot applies.
    pub fn propose(&self, slot: QthadtSlot) -> Option<SchroderFamily> {
        match slot {
            QthadtSlot::FlipTr(a, b) => self.flip(a, b, (a + 1, b + 1)),
            QthadtSlot::FlipBl(a, b) => self.flip(a, b, (a, b)),
            QthadtSlot::Shift(j) => self.shift(j),
            QthadtSlot::Cross => self.cross(),
        }
    }

    /// Toggles the section from `(a, b+1)` to `(a+1, b)` between the diagonal
    /// and the corner through `corner`.
    fn flip(&self, a: usize, b: usize, corner: (usize, usize)) -> Option<SchroderFamily> {
        let start = (a, b + 1);
        let end = (a + 1, b);
        let j = self.owner_of(start)?;
        let p = self.family.paths[j].as_ref()?;
        let k = p.iter().position(|&v| v == start)?;
        let mut q = p.clone();
        if p.get(k + 1) == Some(&end) {
            if self.owner_of(corner).is_some() || corner.0 > j {
                return None;
            }
            // a leading down step is forbidden
            if k == 0 && corner.0 == start.0 {
                return None;
            }
            q.insert(k + 1, corner);
        } else if p.get(k + 1) == Some(&corner) && p.get(k + 2) == Some(&end) {
            q.remove(k + 1);
        } else {
            return None;
        }
        let mut f = self.family.clone();
        f.paths[j] = Some(q);
        Some(f)
    }

    fn shift(&self, j: usize) -> Option<SchroderFamily> {
        let n = self.family.n;
        if j + 1 >= n {
            return None;
        }
        let mut f = self.family.clone();
        match (&self.family.paths[j], &self.family.paths[j + 1]) {
            (Some(p), None) => {
                let mut q = Vec::with_capacity(p.len() + 1);
                q.push((0, j + 2));
                q.extend(p.iter().map(|&(x, y)| (x + 1, y)));
                if q.iter().any(|&v| self.owner_of(v).is_some_and(|o| o != j)) {
                    return None;
                }
                f.paths[j] = None;
                f.paths[j + 1] = Some(q);
            }
            (None, Some(p)) => {
                if p.len() < 3 || p[1] != (1, j + 1) || p[2].0 == p[1].0 {
                    return None;
                }
                let q: Vec<_> = p[1..].iter().map(|&(x, y)| (x - 1, y)).collect();
                if q.iter().any(|&v| self.owner_of(v).is_some_and(|o| o != j + 1)) {
                    return None;
                }
                f.paths[j + 1] = None;
                f.paths[j] = Some(q);
            }
            _ => return None,
        }
        Some(f)
    }

    fn cross(&self) -> Option<SchroderFamily> {
        let n = self.family.n;
        if n < 2 {
            return None;
        }
        let minimal = vec![(0, 2), (1, 1), (1, 0)];
        let mut f = self.family.clone();
        match &self.family.paths[1] {
            None if minimal.iter().all(|&v| self.owner_of(v).is_none()) => f.paths[1] = Some(minimal),
            Some(p) if *p == minimal => f.paths[1] = None,
            _ => return None,
        }
        Some(f)
    }

    fn acceptance_probability(&self, next: &SchroderFamily) -> f64 {
        let dd = next.diagonals() as i32 - self.family.diagonals() as i32;
        self.gamma.powi(dd).min(1.0)
    }

    /// One proposal; returns whether the state changed.
    pub fn step(&mut self) -> bool {
        self.steps += 1;
        let k = self.rng.gen_range(0..self.slot_count());
        let Some(next) = self.propose(self.slot(k)) else {
            return false;
        };
        if self.rng.gen::<f64>() < self.acceptance_probability(&next) {
            self.family = next;
            self.rebuild_owner();
            self.accepted += 1;
            true
        } else {
            false
        }
    }

    pub fn run(&mut self, steps: u64) {
        for _ in 0..steps {
            self.step();
        }
    }

    /// Exact one-step transition law, the holding probability included.
    pub fn transition_law(&self) -> Vec<(SchroderFamily, f64)> {
        let pick = 1.0 / self.slot_count() as f64;
        let mut out = Vec::new();
        let mut stay = 1.0;
        for k in 0..self.slot_count() {
            if let Some(next) = self.propose(self.slot(k)) {
                let q = pick * self.acceptance_probability(&next);
                stay -= q;
                out.push((next, q));
            }
        }
        out.push((self.family.clone(), stay));
        out
    }
}

/// Normalized `γ^{#diag}` law over all families.
pub fn exact_distribution_qthadt(n: usize, gamma: f64) -> Result<HashMap<SchroderFamily, f64>> {
    let fams = crate::qthadt::brute_families(n)?;
    let z: f64 = fams.iter().map(|f| f.weight(gamma, 1.0)).sum();
    Ok(fams
        .into_iter()
        .map(|f| {
            let w = f.weight(gamma, 1.0) / z;
            (f, w)
        })
        .collect())
}

/// Largest `|π(C) P(C→C′) − π(C′) P(C′→C)|` over all pairs, from exact
/// transition laws.
pub fn detailed_balance_defect<K, F>(pi: &HashMap<K, f64>, law: F) -> f64
where
    K: Hash + Eq + Clone,
    F: Fn(&K) -> Vec<(K, f64)>,
{
    let mut kernel: HashMap<(K, K), f64> = HashMap::new();
    for c in pi.keys() {
        for (d, p) in law(c) {
            *kernel.entry((c.clone(), d)).or_insert(0.0) += p;
        }
    }
    let mut worst = 0.0f64;
    for ((c, d), &p) in &kernel {
        let back = kernel.get(&(d.clone(), c.clone())).copied().unwrap_or(0.0);
        let (pc, pd) = (pi.get(c).copied().unwrap_or(0.0), pi.get(d).copied().unwrap_or(0.0));
        worst = worst.max((pc * p - pd * back).abs());
    }
    worst
}

/// Whether every pattern of a configuration conserves paths.
pub fn all_nodes_valid(c: &Configuration) -> bool {
    let n = c.n();
    (1..=n).all(|x| (1..=n).all(|y| c.raw_pattern(x, y).is_valid()))
}
