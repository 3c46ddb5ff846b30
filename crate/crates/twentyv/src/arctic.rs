//! Arctic curves as envelopes of tangent-line families.
//!
//! A [`ParametricBranch`] is a family `y = R(ξ) − S(ξ)(x − 1)` (or its
//! axis-swapped form) over a `ξ` interval together with a rigid motion applied
//! to its envelope. Derivatives come from dual numbers.

use crate::asymptotics::{bracket_p1, cot_difference, p1, Angles};
use crate::error::{Error, Result};
use crate::scalar::{Dual, Scalar};
use crate::tangent::{anchor_of, closed_slope_of, envelope, Branch, Orientation};
use crate::weights::AngleParams;
use num_complex::Complex64;
use std::f64::consts::PI;
use std::fmt::Write as _;

/// Formula family generating `R` and `S`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Generator {
    TwentyV {
        params: AngleParams,
        branch: Branch,
    },
    /// `shear = false` is the normal portion.
    SixV {
        eta: f64,
        lambda: f64,
        shear: bool,
    },
    Qthadt {
        eta: f64,
    },
}

/// Rigid motion applied to envelope points.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Symmetry {
    Identity,
    /// `(x, y) → (1 − x, 1 − y)`.
    Rot180,
    /// `k` quarter turns about the origin, `(x, y) → (−y, x)` each.
    QuarterTurn(u8),
}

impl Symmetry {
    pub fn apply(&self, (x, y): (f64, f64)) -> (f64, f64) {
        match *self {
            Symmetry::Identity => (x, y),
            Symmetry::Rot180 => (1.0 - x, 1.0 - y),
            Symmetry::QuarterTurn(k) => (0..k % 4).fold((x, y), |(x, y), _| (-y, x)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParametricBranch {
    pub id: String,
    pub generator: Generator,
    pub range: (f64, f64),
    pub orientation: Orientation,
    pub symmetry: Symmetry,
    /// Set on portions that extend a formula past the range it was derived on.
    pub continuation: bool,
}

/// QTHADT anchor `ρ(ξ)`, regular at `ξ = 0` and `ξ = 2η`.
pub fn qthadt_rho<T: Scalar>(xi: T, eta: T) -> T {
    let two = T::cst(2.0);
    let h = two * eta - xi;
    let s4 = (T::cst(4.0) * eta).sin();
    let q = (xi + two * eta).sin() * h.sin() / s4;
    q * (cot_difference(xi, eta) + cot_difference(h, eta) - (T::cst(4.0) * eta - xi).cot())
        + (xi + two * eta).sin() * h.cos() / s4
}

/// QTHADT slope `β(ξ) = ℓ/m`.
pub fn qthadt_beta<T: Scalar>(xi: T, eta: T) -> T {
    let two = T::cst(2.0);
    (two * eta + xi).sin() * (two * eta - xi).sin() / (xi.sin() * (T::cst(4.0) * eta - xi).sin())
}

fn sixv_slope<T: Scalar>(xi: T, a: &Angles<T>, shear: bool) -> T {
    let two = T::cst(2.0);
    let den = if shear { (two * a.eta - xi).sin() * xi.sin() } else { xi.sin() * (xi + two * a.eta).sin() };
    p1(xi, a) / den
}

fn sixv_anchor<T: Scalar>(xi: T, a: &Angles<T>) -> T {
    bracket_p1(xi, a) / (T::cst(2.0) * a.eta).sin()
}

impl ParametricBranch {
    /// `(R, S)` at a dual-number `ξ`.
    pub fn anchor_and_slope(&self, xi: Dual<f64>) -> (Dual<f64>, Dual<f64>) {
        match self.generator {
            Generator::TwentyV { params, branch } => {
                let a: Angles<Dual<f64>> = Angles::from_params(&params);
                (anchor_of(xi, &a, branch), closed_slope_of(xi, &a, branch))
            }
            Generator::SixV { eta, lambda, shear } => {
                let a = Angles::new(Dual::constant(eta), Dual::constant(lambda), Dual::constant(0.0));
                (sixv_anchor(xi, &a), sixv_slope(xi, &a, shear))
            }
            Generator::Qthadt { eta } => {
                let e = Dual::constant(eta);
                (qthadt_rho(xi, e), qthadt_beta(xi, e))
            }
        }
    }

    /// Envelope point before the symmetry is applied.
    pub fn base_point(&self, xi: f64) -> Result<(f64, f64)> {
        let g = |x: Dual<f64>| self.anchor_and_slope(x);
        let (x, y) = envelope(|x| g(x).0, |x| g(x).1, xi, self.orientation)?;
        if !(x.is_finite() && y.is_finite()) {
            return Err(Error::Pole(format!("non-finite envelope at xi={xi}")));
        }
        Ok((x, y))
    }

    /// Envelope point at `ξ`.
    pub fn point(&self, xi: f64) -> Result<(f64, f64)> {
        Ok(self.symmetry.apply(self.base_point(xi)?))
    }

    /// Envelope point, with endpoints of the range taken by one-sided linear
    /// extrapolation from `ε = 1e−6·span`.
    pub fn point_robust(&self, xi: f64) -> Result<(f64, f64)> {
        let (lo, hi) = self.range;
        let eps = 1e-6 * (hi - lo);
        let near_lo = (xi - lo).abs() < 1e-9 * (hi - lo);
        let near_hi = (xi - hi).abs() < 1e-9 * (hi - lo);
        if !(near_lo || near_hi) {
            return self.point(xi);
        }
        let dir = if near_lo { 1.0 } else { -1.0 };
        let (a, b) = (self.point(xi + dir * eps)?, self.point(xi + 2.0 * dir * eps)?);
        Ok((2.0 * a.0 - b.0, 2.0 * a.1 - b.1))
    }

    /// `y + S(x−1) − R` at the unsymmetrized envelope point (axes swapped for
    /// `YTangent`); zero by construction.
    pub fn tangent_residual(&self, xi: f64) -> Result<f64> {
        let (x, y) = self.base_point(xi)?;
        let (r, s) = self.anchor_and_slope(Dual::constant(xi));
        Ok(match self.orientation {
            Orientation::XTangent => y + s.v * (x - 1.0) - r.v,
            Orientation::YTangent => x + s.v * (y - 1.0) - r.v,
        })
    }
}

fn twentyv_branch(p: &AngleParams, branch: Branch, symmetry: Symmetry) -> ParametricBranch {
    let suffix = if symmetry == Symmetry::Rot180 { "-rot180" } else { "" };
    ParametricBranch {
        id: format!("{}{}", branch.name(), suffix),
        generator: Generator::TwentyV { params: *p, branch },
        range: branch.range(p),
        orientation: if branch == Branch::Final { Orientation::YTangent } else { Orientation::XTangent },
        symmetry,
        continuation: false,
    }
}

/// The six portions of the twenty-vertex arctic curve in loop order:
/// normal, shear, rotated final, rotated normal, rotated shear, final.
pub fn full_curve_20v(p: &AngleParams) -> Vec<ParametricBranch> {
    use Symmetry::{Identity, Rot180};
    vec![
        twentyv_branch(p, Branch::Normal, Identity),
        twentyv_branch(p, Branch::Shear, Identity),
        twentyv_branch(p, Branch::Final, Rot180),
        twentyv_branch(p, Branch::Normal, Rot180),
        twentyv_branch(p, Branch::Shear, Rot180),
        twentyv_branch(p, Branch::Final, Identity),
    ]
}

/// Normal and shear portions of the six-vertex arctic curve with their
/// rotated images, in loop order.
pub fn curve_6v(eta: f64, lambda: f64) -> Result<Vec<ParametricBranch>> {
    if !(eta > 0.0 && eta < lambda && lambda < PI - eta) {
        return Err(Error::Domain(format!("need 0 < eta < lambda < pi - eta, got eta={eta}, lambda={lambda}")));
    }
    let mk = |shear: bool, symmetry: Symmetry| ParametricBranch {
        id: format!(
            "{}{}",
            if shear { "shear" } else { "normal" },
            if symmetry == Symmetry::Rot180 { "-rot180" } else { "" }
        ),
        generator: Generator::SixV { eta, lambda, shear },
        range: if shear { (-(lambda - eta), 0.0) } else { (0.0, PI - lambda - eta) },
        orientation: Orientation::XTangent,
        symmetry,
        continuation: false,
    };
    Ok(vec![
        mk(false, Symmetry::Identity),
        mk(true, Symmetry::Identity),
        mk(false, Symmetry::Rot180),
        mk(true, Symmetry::Rot180),
    ])
}

/// Envelope point of a twenty-vertex portion at `μ = i·big`, real part.
///
/// As `big → ∞` this tends to the six-vertex curve.
pub fn sixv_limit_point(xi: f64, eta: f64, lambda: f64, big: f64, branch: Branch) -> Result<(f64, f64)> {
    let c = |x: f64| Dual::constant(Complex64::new(x, 0.0));
    let a = Angles::new(c(eta), c(lambda), Dual::constant(Complex64::new(0.0, big)));
    let z = Dual::var(Complex64::new(xi, 0.0));
    let (r, s) = (anchor_of(z, &a, branch), closed_slope_of(z, &a, branch));
    if s.d.norm() < 1e-14 {
        return Err(Error::Pole(format!("stationary slope at xi={xi}")));
    }
    let q = r.d / s.d;
    let (x, y) = ((1.0 + q).re, (r.v - s.v * q).re);
    Ok(if branch == Branch::Final { (y, x) } else { (x, y) })
}

/// `[max(−2η, 2η−π/2), min(4η, π/2)]`.
pub fn qthadt_extended_range(eta: f64) -> (f64, f64) {
    ((-2.0 * eta).max(2.0 * eta - PI / 2.0), (4.0 * eta).min(PI / 2.0))
}

fn qthadt_branch(eta: f64, range: (f64, f64), id: &str, continuation: bool, turns: u8) -> ParametricBranch {
    ParametricBranch {
        id: if turns == 0 { id.to_string() } else { format!("{id}-rot{}", 90 * turns as u32) },
        generator: Generator::Qthadt { eta },
        range,
        orientation: Orientation::YTangent,
        symmetry: Symmetry::QuarterTurn(turns),
        continuation,
    }
}

/// QTHADT arctic curve: the derived portion on `[0, 2η]`, its two
/// extensions to the full fundamental domain (flagged as continuation) and
/// three quarter-turn copies of all three, in loop order.
pub fn curve_qthadt(eta: f64) -> Result<Vec<ParametricBranch>> {
    if !(eta > 0.0 && eta < PI / 4.0) {
        return Err(Error::Domain(format!("need 0 < eta < pi/4, got {eta}")));
    }
    let (lo, hi) = qthadt_extended_range(eta);
    let mut out = Vec::new();
    // clockwise from the fundamental domain
    for turns in [0, 3, 2, 1] {
        out.push(qthadt_branch(eta, (lo, 0.0), "extension-low", true, turns));
        out.push(qthadt_branch(eta, (0.0, 2.0 * eta), "fundamental", false, turns));
        out.push(qthadt_branch(eta, (2.0 * eta, hi), "extension-high", true, turns));
    }
    Ok(out)
}

/// The QTHADT parametrization continued analytically over `[lo, hi]`.
pub fn qthadt_continuation(eta: f64, lo: f64, hi: f64) -> ParametricBranch {
    qthadt_branch(eta, (lo, hi), "continuation", true, 0)
}

/// Closed form of the uniform normal portion, `ξ ∈ [0, π/4]`.
pub fn uniform_closed_form(xi: f64) -> (f64, f64) {
    let s3 = 3f64.sqrt();
    let (c2, s2) = ((2.0 * xi / 3.0).cos(), (2.0 * xi / 3.0).sin());
    let (c10, s10) = ((10.0 * xi / 3.0).cos(), (10.0 * xi / 3.0).sin());
    let x = (3.0 * (5.0 * c2 + c10) - s3 * (5.0 * s2 - s10)) / 18.0;
    let y = (s3 * (5.0 * c2 - c10) + 3.0 * (5.0 * s2 + s10)) / 18.0;
    (x, y)
}

/// Monomials of the uniform algebraic curve in `R = x²+y²`, `P = x²y²`.
fn uniform_monomials(x: f64, y: f64, r4_sign: f64) -> [f64; 7] {
    let r = x * x + y * y;
    let p = x * x * y * y;
    [
        3f64.powi(11) * r.powi(5),
        r4_sign * 3f64.powi(9) * 10.0 * r.powi(4),
        -(3f64.powi(6)) * 5.0 * r.powi(3),
        36.0 * 20.0 * 73.0 * r * r,
        -36.0 * 20.0 * 625.0 * p,
        -256.0 * 15.0 * r,
        -4096.0,
    ]
}

/// Left side of the algebraic equation of the uniform curve.
///
/// The `R⁴` coefficient is `−3⁹·10`; with `+3⁹·10` the equation is not
/// satisfied by [`uniform_closed_form`].
pub fn uniform_residual(x: f64, y: f64) -> f64 {
    uniform_monomials(x, y, -1.0).iter().sum()
}

/// [`uniform_residual`] divided by the largest monomial magnitude.
pub fn uniform_scaled_residual(x: f64, y: f64) -> f64 {
    scaled(uniform_monomials(x, y, -1.0))
}

/// Scaled residual of the equation with a positive `R⁴` coefficient.
pub fn uniform_scaled_residual_positive_r4(x: f64, y: f64) -> f64 {
    scaled(uniform_monomials(x, y, 1.0))
}

fn scaled(m: [f64; 7]) -> f64 {
    let big = m.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    m.iter().sum::<f64>().abs() / big
}

/// `a x² + b xy + c y² + d x + e y + f`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Conic {
    pub coeffs: [f64; 6],
}

impl Conic {
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let [a, b, c, d, e, f] = self.coeffs;
        a * x * x + b * x * y + c * y * y + d * x + e * y + f
    }

    /// Real roots in `x` at fixed `y`.
    pub fn solve_x(&self, y: f64) -> Vec<f64> {
        let [a, b, c, d, e, f] = self.coeffs;
        let (qa, qb, qc) = (a, b * y + d, c * y * y + e * y + f);
        let disc = qb * qb - 4.0 * qa * qc;
        if disc < 0.0 {
            return vec![];
        }
        let s = disc.sqrt();
        vec![(-qb - s) / (2.0 * qa), (-qb + s) / (2.0 * qa)]
    }
}

/// Limiting ellipses at `λ = π−η−εΛ2`, `μ = π−2η−ε(Λ2+Λ3)`, `ε → 0`.
/// The first lies in `y ≥ 1/2`, the second is its image under `(1−x, 1−y)`.
pub fn degenerate_ellipses(l2: f64, l3: f64) -> Result<[Conic; 2]> {
    if !(l2 > 0.0 && l3 > 0.0) {
        return Err(Error::Domain(format!("need positive Lambda2, Lambda3, got {l2}, {l3}")));
    }
    let (a, b) = (l3 + 2.0 * l2, 4.0 * l2 - l3);
    let k = 8.0 * l2 * l3;
    // (a x + b y + c)² + extra
    let square = |c: f64| [a * a, 2.0 * a * b, b * b, 2.0 * a * c, 2.0 * b * c, c * c];
    let mut e1 = square(-4.0 * l2);
    e1[2] += 2.0 * k;
    e1[4] -= 3.0 * k;
    e1[5] += k;
    let mut e2 = square(-2.0 * l2);
    e2[2] += 2.0 * k;
    e2[4] -= k;
    Ok([Conic { coeffs: e1 }, Conic { coeffs: e2 }])
}

/// Parameters approaching the ellipse limit at scale `ε`.
pub fn ellipse_limit_params(eta: f64, l2: f64, l3: f64, eps: f64) -> Result<AngleParams> {
    AngleParams::new(eta, PI - eta - eps * l2, PI - 2.0 * eta - eps * (l2 + l3))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolyPoint {
    pub xi: f64,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Polyline {
    pub branch_id: String,
    pub continuation: bool,
    pub points: Vec<PolyPoint>,
    /// False when some segment stayed above the spacing bound or some
    /// parameter value could not be evaluated.
    pub complete: bool,
}

impl Polyline {
    pub fn max_segment(&self) -> f64 {
        self.points.windows(2).map(|w| (w[1].x - w[0].x).hypot(w[1].y - w[0].y)).fold(0.0, f64::max)
    }

    pub fn first(&self) -> Option<(f64, f64)> {
        self.points.first().map(|p| (p.x, p.y))
    }

    pub fn last(&self) -> Option<(f64, f64)> {
        self.points.last().map(|p| (p.x, p.y))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleOptions {
    /// Initial equally spaced parameter values, endpoints included.
    pub npoints: usize,
    /// Segments longer than this are bisected in `ξ`.
    pub max_segment: f64,
    pub max_depth: u32,
}

impl SampleOptions {
    pub fn new(npoints: usize) -> Self {
        SampleOptions { npoints, max_segment: f64::INFINITY, max_depth: 0 }
    }

    pub fn adaptive(npoints: usize, max_segment: f64) -> Self {
        SampleOptions { npoints, max_segment, max_depth: 16 }
    }
}

/// Polyline through envelope points of a branch.
pub fn sample(branch: &ParametricBranch, opts: &SampleOptions) -> Result<Polyline> {
    if opts.npoints < 2 {
        return Err(Error::Domain("need at least two sample points".into()));
    }
    let (lo, hi) = branch.range;
    let eval = |xi: f64| branch.point_robust(xi).ok().map(|(x, y)| PolyPoint { xi, x, y });
    let mut complete = true;
    let mut seeds = Vec::with_capacity(opts.npoints);
    for k in 0..opts.npoints {
        let xi = lo + (hi - lo) * k as f64 / (opts.npoints - 1) as f64;
        match eval(xi) {
            Some(p) => seeds.push(p),
            None => complete = false,
        }
    }
    let mut points = Vec::with_capacity(seeds.len());
    for w in seeds.windows(2) {
        points.push(w[0]);
        refine(&eval, w[0], w[1], opts, 0, &mut points, &mut complete);
    }
    if let Some(&p) = seeds.last() {
        points.push(p);
    }
    Ok(Polyline { branch_id: branch.id.clone(), continuation: branch.continuation, points, complete })
}

fn refine<F: Fn(f64) -> Option<PolyPoint>>(
    eval: &F,
    a: PolyPoint,
    b: PolyPoint,
    opts: &SampleOptions,
    depth: u32,
    out: &mut Vec<PolyPoint>,
    complete: &mut bool,
) {
    if (b.x - a.x).hypot(b.y - a.y) <= opts.max_segment {
        return;
    }
    if depth >= opts.max_depth {
        *complete = false;
        return;
    }
    match eval(0.5 * (a.xi + b.xi)) {
        Some(m) => {
            refine(eval, a, m, opts, depth + 1, out, complete);
            out.push(m);
            refine(eval, m, b, opts, depth + 1, out, complete);
        }
        None => *complete = false,
    }
}

/// Branch polylines chained end to start into a closed loop.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedCurve {
    pub points: Vec<(f64, f64)>,
    /// Largest distance between consecutive branch ends, closing gap included.
    pub max_gap: f64,
}

fn dist(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0).hypot(a.1 - b.1)
}

/// Chains polylines in the given order, reversing each as needed.
pub fn close_loop(lines: &[Polyline]) -> Result<ClosedCurve> {
    let mut points: Vec<(f64, f64)> = Vec::new();
    let mut max_gap = 0.0f64;
    for (i, line) in lines.iter().enumerate() {
        let (Some(f), Some(l)) = (line.first(), line.last()) else {
            return Err(Error::Domain(format!("empty polyline {}", line.branch_id)));
        };
        let mut pts: Vec<(f64, f64)> = line.points.iter().map(|p| (p.x, p.y)).collect();
        if let Some(&prev) = points.last() {
            if dist(prev, l) < dist(prev, f) {
                pts.reverse();
            }
            max_gap = max_gap.max(dist(prev, pts[0]));
        } else if i + 1 < lines.len() {
            let next = &lines[i + 1];
            let (nf, nl) = (next.first().unwrap_or(f), next.last().unwrap_or(f));
            if dist(f, nf).min(dist(f, nl)) < dist(l, nf).min(dist(l, nl)) {
                pts.reverse();
            }
        }
        points.extend(pts);
    }
    if let (Some(&a), Some(&b)) = (points.first(), points.last()) {
        max_gap = max_gap.max(dist(a, b));
    }
    Ok(ClosedCurve { points, max_gap })
}

impl ClosedCurve {
    /// Even-odd point-in-polygon test.
    pub fn contains(&self, x: f64, y: f64) -> bool {
        let n = self.points.len();
        let mut inside = false;
        for i in 0..n {
            let (xi, yi) = self.points[i];
            let (xj, yj) = self.points[(i + n - 1) % n];
            if (yi > y) != (yj > y) && x < (xj - xi) * (y - yi) / (yj - yi) + xi {
                inside = !inside;
            }
        }
        inside
    }
}

/// Samples all branches and closes them into a loop.
pub fn closed_curve(branches: &[ParametricBranch], opts: &SampleOptions) -> Result<ClosedCurve> {
    let lines = branches.iter().map(|b| sample(b, opts)).collect::<Result<Vec<_>>>()?;
    close_loop(&lines)
}

/// Rows `xi,x,y,branch` under a header line.
pub fn polylines_to_csv(lines: &[Polyline]) -> String {
    let mut s = String::from("xi,x,y,branch\n");
    for l in lines {
        for p in &l.points {
            let _ = writeln!(s, "{:.12e},{:.12e},{:.12e},{}", p.xi, p.x, p.y, l.branch_id);
        }
    }
    s
}

/// Maps the model rectangle `[xmin, xmax] × [ymin, ymax]` onto a pixel box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Viewport {
    pub width: f64,
    pub height: f64,
    pub xmin: f64,
    pub xmax: f64,
    pub ymin: f64,
    pub ymax: f64,
}

impl Viewport {
    pub fn unit_square(pixels: f64) -> Self {
        Viewport { width: pixels, height: pixels, xmin: 0.0, xmax: 1.0, ymin: 0.0, ymax: 1.0 }
    }

    pub fn map(&self, x: f64, y: f64) -> (f64, f64) {
        let px = (x - self.xmin) / (self.xmax - self.xmin) * self.width;
        let py = (self.ymax - y) / (self.ymax - self.ymin) * self.height;
        (px, py)
    }
}

fn escape_xml(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// SVG overlay of polylines on the model frame; `metadata` pairs are embedded.
pub fn polylines_to_svg(lines: &[Polyline], view: &Viewport, metadata: &[(String, String)]) -> String {
    svg_with_underlay(lines, view, metadata, "")
}

/// As [`polylines_to_svg`] with raw SVG elements drawn below the curves.
pub fn svg_with_underlay(lines: &[Polyline], view: &Viewport, metadata: &[(String, String)], underlay: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
        w = view.width,
        h = view.height
    );
    s.push_str("<metadata>\n");
    for (k, v) in metadata {
        let _ = writeln!(s, r#"  <param name="{}" value="{}"/>"#, escape_xml(k), escape_xml(v));
    }
    s.push_str("</metadata>\n");
    s.push_str(underlay);
    let _ = writeln!(
        s,
        r#"<rect x="0" y="0" width="{}" height="{}" fill="none" stroke="black"/>"#,
        view.width, view.height
    );
    for l in lines {
        let mut d = String::new();
        for (i, p) in l.points.iter().enumerate() {
            let (px, py) = view.map(p.x, p.y);
            let _ = write!(d, "{}{:.3},{:.3} ", if i == 0 { "M" } else { "L" }, px, py);
        }
        let dash = if l.continuation { r#" stroke-dasharray="4,3""# } else { "" };
        let _ = writeln!(
            s,
            r#"<path id="{}" d="{}" fill="none" stroke="red" stroke-width="1.5"{}/>"#,
            escape_xml(&l.branch_id),
            d.trim_end(),
            dash
        );
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quarter_turns_compose() {
        assert_eq!(Symmetry::QuarterTurn(1).apply((1.0, 0.0)), (-0.0, 1.0));
        assert_eq!(Symmetry::QuarterTurn(4).apply((0.3, 0.7)), (0.3, 0.7));
        assert_eq!(Symmetry::Rot180.apply((0.25, 1.0)), (0.75, 0.0));
    }

    #[test]
    fn uniform_closed_form_starts_on_right_boundary() {
        assert!((uniform_closed_form(0.0).0 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn square_contains_center() {
        let c = ClosedCurve { points: vec![(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)], max_gap: 0.0 };
        assert!(c.contains(0.5, 0.5));
        assert!(!c.contains(1.5, 0.5));
    }
}
