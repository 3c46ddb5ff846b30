//! Edge-occupancy configurations on the `n × n` grid with anti-diagonals.
//!
//! Nodes are `(x, y)` with column `x = 1..=n` from left to right and row
//! `y = 1..=n` from bottom to top. Paths travel east, south-east and south:
//! they enter on the left boundary and leave on the bottom boundary.
//!
//! Edge families, each stored on an `(n+1) × (n+1)` index grid:
//! - `h(x, y)`: `(x, y) → (x+1, y)` for `x = 0..=n`, `y = 1..=n`;
//! - `v(x, y)`: `(x, y+1) → (x, y)` for `x = 1..=n`, `y = 0..=n`;
//! - `d(x, y)`: `(x, y+1) → (x+1, y)` whenever one endpoint is a node.

use crate::error::{Error, Result, Site};
use crate::weights::{inbound, outbound, VertexPattern, WeightMap};
use std::fmt;
use std::str::FromStr;

/// Fixed boundary prescription.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Boundary {
    /// Left and bottom boundaries occupied including both corner diagonals.
    Dwbc1,
    /// As [`Boundary::Dwbc1`] with both corner diagonals empty.
    Dwbc2,
    /// Six-vertex domain walls: no diagonal edges at all.
    SixVertex,
    /// No boundary prescription; only node conservation is checked.
    Free,
}

impl Boundary {
    pub fn name(&self) -> &'static str {
        match self {
            Boundary::Dwbc1 => "DWBC1",
            Boundary::Dwbc2 => "DWBC2",
            Boundary::SixVertex => "SIXV_DWBC",
            Boundary::Free => "FREE",
        }
    }

    fn dual(&self) -> Boundary {
        match self {
            Boundary::Dwbc1 => Boundary::Dwbc2,
            Boundary::Dwbc2 => Boundary::Dwbc1,
            other => *other,
        }
    }
}

impl fmt::Display for Boundary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Boundary {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "DWBC1" => Ok(Boundary::Dwbc1),
            "DWBC2" => Ok(Boundary::Dwbc2),
            "SIXV_DWBC" | "SIXV" | "6V" => Ok(Boundary::SixVertex),
            "FREE" => Ok(Boundary::Free),
            _ => Err(Error::Parse(format!("unknown boundary condition '{s}'"))),
        }
    }
}

/// Edge family selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    H,
    V,
    D,
}

/// Step class of the uppermost path at its hit or exit point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Step {
    Horizontal,
    Diagonal,
    Vertical,
}

/// Whether `(family, x, y)` names an edge with at least one endpoint on the grid.
pub fn is_edge(n: usize, f: Family, x: usize, y: usize) -> bool {
    match f {
        Family::H => x <= n && (1..=n).contains(&y),
        Family::V => (1..=n).contains(&x) && y <= n,
        Family::D => x <= n && y <= n && !(x == 0 && y == 0) && !(x == n && y == n),
    }
}

/// Whether the edge touches the boundary of the grid.
pub fn is_boundary_edge(n: usize, f: Family, x: usize, y: usize) -> bool {
    match f {
        Family::H => x == 0 || x == n,
        Family::V => y == 0 || y == n,
        Family::D => x == 0 || y == 0 || x == n || y == n,
    }
}

/// Prescribed occupancy of a boundary edge; `None` for interior edges or a
/// free boundary.
pub fn prescribed(n: usize, bc: Boundary, f: Family, x: usize, y: usize) -> Option<bool> {
    if bc == Boundary::Free || !is_edge(n, f, x, y) {
        return None;
    }
    if bc == Boundary::SixVertex && f == Family::D {
        return Some(false);
    }
    if !is_boundary_edge(n, f, x, y) {
        return None;
    }
    let corners = bc == Boundary::Dwbc1;
    Some(match f {
        Family::H => x == 0,
        Family::V => y == 0,
        Family::D => {
            if (x == 0 && y == n) || (x == n && y == 0) {
                corners
            } else {
                x == 0 || y == 0
            }
        }
    })
}

/// Occupancy of every edge of an `n × n` grid.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Configuration {
    n: usize,
    bc: Boundary,
    h: Vec<bool>,
    v: Vec<bool>,
    d: Vec<bool>,
}

impl Configuration {
    /// All edges at their boundary values, interior edges empty. Not valid in
    /// general.
    pub fn boundary_only(n: usize, bc: Boundary) -> Self {
        let size = (n + 1) * (n + 1);
        let mut c = Configuration { n, bc, h: vec![false; size], v: vec![false; size], d: vec![false; size] };
        for f in [Family::H, Family::V, Family::D] {
            for x in 0..=n {
                for y in 0..=n {
                    if let Some(b) = prescribed(n, bc, f, x, y) {
                        c.set(f, x, y, b);
                    }
                }
            }
        }
        c
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn bc(&self) -> Boundary {
        self.bc
    }

    fn idx(&self, x: usize, y: usize) -> usize {
        x * (self.n + 1) + y
    }

    pub fn get(&self, f: Family, x: usize, y: usize) -> bool {
        if !is_edge(self.n, f, x, y) {
            return false;
        }
        let i = self.idx(x, y);
        match f {
            Family::H => self.h[i],
            Family::V => self.v[i],
            Family::D => self.d[i],
        }
    }

    /// Sets an edge; writes to non-edges are ignored.
    pub fn set(&mut self, f: Family, x: usize, y: usize, value: bool) {
        if !is_edge(self.n, f, x, y) {
            return;
        }
        let i = self.idx(x, y);
        match f {
            Family::H => self.h[i] = value,
            Family::V => self.v[i] = value,
            Family::D => self.d[i] = value,
        }
    }

    /// Inbound/outbound occupancy at node `(x, y)` without checking conservation.
    pub fn raw_pattern(&self, x: usize, y: usize) -> VertexPattern {
        let mut i = 0;
        let mut o = 0;
        if self.get(Family::V, x, y) {
            i |= inbound::N;
        }
        if self.get(Family::D, x - 1, y) {
            i |= inbound::NW;
        }
        if self.get(Family::H, x - 1, y) {
            i |= inbound::W;
        }
        if self.get(Family::H, x, y) {
            o |= outbound::E;
        }
        if self.get(Family::D, x, y - 1) {
            o |= outbound::SE;
        }
        if self.get(Family::V, x, y - 1) {
            o |= outbound::S;
        }
        VertexPattern { inbound: i, outbound: o }
    }

    /// Pattern at node `(x, y)`; conservation is enforced.
    pub fn classify_vertex(&self, x: usize, y: usize) -> Result<VertexPattern> {
        let p = self.raw_pattern(x, y);
        if p.is_valid() {
            Ok(p)
        } else {
            Err(Error::InvalidConfiguration(Site::Node { x, y }))
        }
    }

    /// Checks boundary prescription and conservation at every node.
    pub fn validate(&self) -> Result<()> {
        let n = self.n;
        for f in [Family::H, Family::V, Family::D] {
            for x in 0..=n {
                for y in 0..=n {
                    if let Some(b) = prescribed(n, self.bc, f, x, y) {
                        if self.get(f, x, y) != b {
                            return Err(Error::InvalidConfiguration(Site::Boundary));
                        }
                    }
                }
            }
        }
        for x in 1..=n {
            for y in 1..=n {
                self.classify_vertex(x, y)?;
            }
        }
        Ok(())
    }

    /// Product of the node weights.
    pub fn weight(&self, map: &WeightMap) -> Result<f64> {
        self.weight_with(|_, _, p| map.get(p))
    }

    /// Product of `oracle(x, y, pattern)` over all nodes.
    pub fn weight_with<F: Fn(usize, usize, VertexPattern) -> f64>(&self, oracle: F) -> Result<f64> {
        let mut w = 1.0;
        for x in 1..=self.n {
            for y in 1..=self.n {
                w *= oracle(x, y, self.classify_vertex(x, y)?);
            }
        }
        Ok(w)
    }

    fn map_edges<F>(&self, bc: Boundary, mut f: F) -> Configuration
    where
        F: FnMut(Family, usize, usize, bool) -> (Family, usize, usize, bool),
    {
        let n = self.n;
        let size = (n + 1) * (n + 1);
        let mut out = Configuration { n, bc, h: vec![false; size], v: vec![false; size], d: vec![false; size] };
        for fam in [Family::H, Family::V, Family::D] {
            for x in 0..=n {
                for y in 0..=n {
                    if is_edge(n, fam, x, y) {
                        let (g, a, b, val) = f(fam, x, y, self.get(fam, x, y));
                        out.set(g, a, b, val);
                    }
                }
            }
        }
        out
    }

    /// Rotation by 180° about the centre of the grid, reversing path direction.
    pub fn rotate180(&self) -> Configuration {
        let n = self.n;
        let bc = if self.bc == Boundary::SixVertex { Boundary::SixVertex } else { Boundary::Free };
        self.map_edges(bc, |f, x, y, b| match f {
            Family::H => (Family::H, n - x, n + 1 - y, b),
            Family::V => (Family::V, n + 1 - x, n - y, b),
            Family::D => (Family::D, n - x, n - y, b),
        })
    }

    /// Toggles every edge.
    pub fn complement(&self) -> Configuration {
        self.map_edges(Boundary::Free, |f, x, y, b| (f, x, y, !b))
    }

    /// `rotate180 ∘ complement`: a bijection between the two domain-wall
    /// prescriptions.
    pub fn dual(&self) -> Configuration {
        let mut c = self.complement().rotate180();
        c.bc = self.bc.dual();
        c
    }

    /// Reflection `(x, y) → (y, x)` with path reversal; exchanges the roles of
    /// horizontal and vertical steps and preserves the domain-wall prescriptions.
    pub fn transpose(&self) -> Configuration {
        self.map_edges(self.bc, |f, x, y, b| match f {
            Family::H => (Family::V, y, x, b),
            Family::V => (Family::H, y, x, b),
            Family::D => (Family::D, y, x, b),
        })
    }

    /// Nodes visited by the uppermost path together with the inbound edge
    /// through which each was entered.
    pub fn uppermost_path(&self) -> Result<Vec<(usize, usize, u8)>> {
        let n = self.n;
        let first = self.raw_pattern(1, n);
        let start = [inbound::N, inbound::NW, inbound::W].into_iter().find(|b| first.inbound & b != 0);
        let Some(mut in_bit) = start else {
            return Ok(Vec::new());
        };
        let (mut x, mut y) = (1usize, n);
        let mut out = Vec::with_capacity(2 * n);
        loop {
            out.push((x, y, in_bit));
            let p = self.classify_vertex(x, y)?;
            let o = p.partner(in_bit).ok_or(Error::InvalidConfiguration(Site::Node { x, y }))?;
            match o {
                outbound::E => {
                    x += 1;
                    in_bit = inbound::W;
                }
                outbound::SE => {
                    x += 1;
                    y -= 1;
                    in_bit = inbound::NW;
                }
                _ => {
                    y -= 1;
                    in_bit = inbound::N;
                }
            }
            if x > n || y < 1 {
                return Ok(out);
            }
        }
    }

    /// Row `L` where the uppermost path first reaches column `n`, and the
    /// class of the step that brought it there.
    pub fn hit_position(&self) -> Result<(usize, Step)> {
        let path = self.uppermost_path()?;
        path.iter()
            .find(|(x, _, _)| *x == self.n)
            .map(|&(_, y, b)| (y, if b == inbound::NW { Step::Diagonal } else { Step::Horizontal }))
            .ok_or(Error::InvalidConfiguration(Site::Boundary))
    }

    /// Column `L` where the uppermost path leaves row `n`, and the class of
    /// the step leaving it.
    pub fn top_exit_position(&self) -> Result<(usize, Step)> {
        let path = self.uppermost_path()?;
        let n = self.n;
        let last =
            path.iter().take_while(|(_, y, _)| *y == n).last().ok_or(Error::InvalidConfiguration(Site::Boundary))?;
        let (x, y, b) = *last;
        let o = self.classify_vertex(x, y)?.partner(b).ok_or(Error::InvalidConfiguration(Site::Node { x, y }))?;
        Ok((x, if o == outbound::SE { Step::Diagonal } else { Step::Vertical }))
    }

    /// Text form: a header line `twentyv-config n=<n> bc=<bc>` followed by the
    /// records `h`, `v` and `d`, each a block of rows of `0`/`1` listed from
    /// the top row down.
    pub fn to_text(&self) -> String {
        let n = self.n;
        let mut s = format!("twentyv-config n={} bc={}\n", n, self.bc);
        let mut block = |name: &str, f: Family, xs: std::ops::RangeInclusive<usize>, ys: Vec<usize>| {
            s.push_str(name);
            s.push('\n');
            for y in ys {
                for x in xs.clone() {
                    s.push(if self.get(f, x, y) { '1' } else { '0' });
                }
                s.push('\n');
            }
        };
        block("h", Family::H, 0..=n, (1..=n).rev().collect());
        block("v", Family::V, 1..=n, (0..=n).rev().collect());
        block("d", Family::D, 0..=n, (0..=n).rev().collect());
        s
    }

    pub fn from_text(text: &str) -> Result<Configuration> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty input".into()))?;
        let mut n = None;
        let mut bc = None;
        let mut words = header.split_whitespace();
        if words.next() != Some("twentyv-config") {
            return Err(Error::Parse("missing twentyv-config header".into()));
        }
        for w in words {
            if let Some(v) = w.strip_prefix("n=") {
                n = Some(v.parse::<usize>().map_err(|e| Error::Parse(e.to_string()))?);
            } else if let Some(v) = w.strip_prefix("bc=") {
                bc = Some(v.parse::<Boundary>()?);
            }
        }
        let n = n.ok_or_else(|| Error::Parse("header lacks n".into()))?;
        let bc = bc.ok_or_else(|| Error::Parse("header lacks bc".into()))?;
        if n == 0 {
            return Err(Error::Parse("n must be positive".into()));
        }
        let size = (n + 1) * (n + 1);
        let mut c = Configuration { n, bc, h: vec![false; size], v: vec![false; size], d: vec![false; size] };
        let mut read_block = |name: &str,
                              f: Family,
                              xs: Vec<usize>,
                              ys: Vec<usize>,
                              lines: &mut dyn Iterator<Item = &str>|
         -> Result<()> {
            if lines.next() != Some(name) {
                return Err(Error::Parse(format!("expected record '{name}'")));
            }
            for y in ys {
                let row = lines.next().ok_or_else(|| Error::Parse(format!("record '{name}' truncated")))?;
                if row.len() != xs.len() {
                    return Err(Error::Parse(format!(
                        "record '{name}': row of length {} expected {}",
                        row.len(),
                        xs.len()
                    )));
                }
                for (x, ch) in xs.iter().zip(row.chars()) {
                    match ch {
                        '0' => {}
                        '1' => {
                            if !is_edge(n, f, *x, y) {
                                return Err(Error::Parse(format!("record '{name}': non-edge ({x}, {y}) set")));
                            }
                            c.set(f, *x, y, true);
                        }
                        _ => return Err(Error::Parse(format!("record '{name}': bad character '{ch}'"))),
                    }
                }
            }
            Ok(())
        };
        read_block("h", Family::H, (0..=n).collect(), (1..=n).rev().collect(), &mut lines)?;
        read_block("v", Family::V, (1..=n).collect(), (0..=n).rev().collect(), &mut lines)?;
        read_block("d", Family::D, (0..=n).collect(), (0..=n).rev().collect(), &mut lines)?;
        c.validate()?;
        Ok(c)
    }

    /// Re-encoding by vertical complementation and shear; see [`ShearedConfiguration`].
    pub fn shear_image(&self) -> Result<ShearedConfiguration> {
        if self.bc != Boundary::Dwbc2 {
            return Err(Error::Range("shear image is defined for DWBC2 configurations".into()));
        }
        self.validate()?;
        let n = self.n;
        let mut img = ShearedConfiguration { n, horizontal: Vec::new(), vertical: Vec::new(), diagonal: Vec::new() };
        let sh = |x: usize, y: usize| (x as i64, x as i64 + y as i64);
        for x in 0..=n {
            for y in 0..=n {
                if is_edge(n, Family::H, x, y) && self.get(Family::H, x, y) {
                    img.diagonal.push(sh(x, y));
                }
                if is_edge(n, Family::D, x, y) && self.get(Family::D, x, y) {
                    img.horizontal.push(sh(x, y + 1));
                }
                if is_edge(n, Family::V, x, y) && !self.get(Family::V, x, y) {
                    img.vertical.push(sh(x, y));
                }
            }
        }
        img.horizontal.sort_unstable();
        img.vertical.sort_unstable();
        img.diagonal.sort_unstable();
        Ok(img)
    }
}

/// Image of a configuration under vertical-edge complementation followed by
/// the shear `(x, y) → (x, x + y)`.
///
/// Paths of the image run from `S`, `SW`, `W` to `E`, `NE`, `N`: old
/// horizontal edges become `NE` diagonals, old anti-diagonals become
/// horizontal edges, and vertical edges are complemented and reversed.
/// Every edge is stored by its lower-left endpoint in sheared coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShearedConfiguration {
    pub n: usize,
    pub horizontal: Vec<(i64, i64)>,
    pub vertical: Vec<(i64, i64)>,
    pub diagonal: Vec<(i64, i64)>,
}

impl ShearedConfiguration {
    fn has(list: &[(i64, i64)], p: (i64, i64)) -> bool {
        list.binary_search(&p).is_ok()
    }

    /// Pattern at the image of node `(x, y)`, reflected top-to-bottom so that
    /// it reads as an ordinary east/south-east/south pattern: `SW, W, S`
    /// inbound become `NW, W, N`; `NE, E, N` outbound become `SE, E, S`.
    pub fn node_pattern(&self, x: usize, y: usize) -> Result<VertexPattern> {
        let (cx, cy) = (x as i64, x as i64 + y as i64);
        let mut i = 0;
        let mut o = 0;
        if Self::has(&self.diagonal, (cx - 1, cy - 1)) {
            i |= inbound::NW;
        }
        if Self::has(&self.horizontal, (cx - 1, cy)) {
            i |= inbound::W;
        }
        if Self::has(&self.vertical, (cx, cy - 1)) {
            i |= inbound::N;
        }
        if Self::has(&self.diagonal, (cx, cy)) {
            o |= outbound::SE;
        }
        if Self::has(&self.horizontal, (cx, cy)) {
            o |= outbound::E;
        }
        if Self::has(&self.vertical, (cx, cy)) {
            o |= outbound::S;
        }
        VertexPattern::new(i, o).ok_or(Error::InvalidConfiguration(Site::Node { x, y }))
    }

    /// Product of `map` over the reflected patterns of all nodes.
    pub fn weight(&self, map: &WeightMap) -> Result<f64> {
        let mut w = 1.0;
        for x in 1..=self.n {
            for y in 1..=self.n {
                w *= map.get(self.node_pattern(x, y)?);
            }
        }
        Ok(w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_node_dwbc2_is_w_to_s() {
        let c = Configuration::boundary_only(1, Boundary::Dwbc2);
        c.validate().unwrap();
        let p = c.classify_vertex(1, 1).unwrap();
        assert_eq!(p, VertexPattern::new(inbound::W, outbound::S).unwrap());
        assert_eq!(c.hit_position().unwrap(), (1, Step::Horizontal));
        assert_eq!(c.top_exit_position().unwrap(), (1, Step::Vertical));
    }

    #[test]
    fn single_node_dwbc1_has_both_corners() {
        let c = Configuration::boundary_only(1, Boundary::Dwbc1);
        c.validate().unwrap();
        let p = c.classify_vertex(1, 1).unwrap();
        assert_eq!(p, VertexPattern::new(inbound::W | inbound::NW, outbound::S | outbound::SE).unwrap());
        assert_eq!(c.hit_position().unwrap(), (1, Step::Diagonal));
    }

    #[test]
    fn text_round_trip() {
        let c = Configuration::boundary_only(1, Boundary::Dwbc1);
        let t = c.to_text();
        assert_eq!(Configuration::from_text(&t).unwrap(), c);
        assert!(Configuration::from_text("twentyv-config n=1\nh\n10\n").is_err());
    }
}
