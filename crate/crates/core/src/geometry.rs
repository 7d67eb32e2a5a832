//! Boolean distance functions on `[-1/2, 1/2]^d`.
//!
//! A Boolean distance is a binary tree whose leaves are coordinate indices
//! and whose inner nodes take the min or max of their children. Every
//! coordinate appears in exactly one leaf. `max` everywhere gives the
//! max-norm, `min` everywhere gives the minimum-component distance (MCD).
//!
//! Textual form: `expr := "x" INT | "min(" expr "," expr ")" | "max(" expr "," expr ")"`
//! with 0-based indices, e.g. `min(x0, max(x1, x2))`.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Topology {
    Torus,
    Cube,
}

impl FromStr for Topology {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "torus" | "t" => Ok(Topology::Torus),
            "cube" | "c" => Ok(Topology::Cube),
            other => Err(Error::param(format!("unknown topology {other:?}"))),
        }
    }
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Topology::Torus => "torus",
            Topology::Cube => "cube",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Combine {
    Min,
    Max,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum DistanceSpec {
    Leaf(usize),
    Combine {
        op: Combine,
        left: Box<DistanceSpec>,
        right: Box<DistanceSpec>,
    },
}

/// A position in `[-1/2, 1/2]^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct Point(pub Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::param("point must have at least one coordinate"));
        }
        if let Some(c) = coords.iter().find(|c| !(-0.5..=0.5).contains(*c)) {
            return Err(Error::param(format!("coordinate {c} outside [-1/2, 1/2]")));
        }
        Ok(Point(coords))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }
}

/// Distance along one coordinate. Torus distances wrap around and lie in
/// `[0, 1/2]`; cube distances are plain absolute differences in `[0, 1]`.
#[inline]
pub fn coordinate_distance(a: f64, b: f64, topology: Topology) -> f64 {
    let diff = (a - b).abs();
    match topology {
        Topology::Cube => diff,
        Topology::Torus => diff.min(1.0 - diff),
    }
}

impl DistanceSpec {
    pub fn leaf(index: usize) -> Self {
        DistanceSpec::Leaf(index)
    }

    pub fn combine(op: Combine, left: DistanceSpec, right: DistanceSpec) -> Self {
        DistanceSpec::Combine {
            op,
            left: Box::new(left),
            right: Box::new(right),
        }
    }

    /// Left-deep tree over coordinates `0..d` combining with `op`.
    pub fn uniform(op: Combine, d: usize) -> Self {
        assert!(d >= 1, "dimension must be at least 1");
        (1..d).fold(DistanceSpec::Leaf(0), |acc, i| {
            DistanceSpec::combine(op, acc, DistanceSpec::Leaf(i))
        })
    }

    pub fn max_norm(d: usize) -> Self {
        Self::uniform(Combine::Max, d)
    }

    pub fn mcd(d: usize) -> Self {
        Self::uniform(Combine::Min, d)
    }

    /// Parses the textual form and validates it against dimension `d`.
    pub fn parse(text: &str, d: usize) -> Result<Self> {
        let spec = Parser::new(text).parse()?;
        spec.validate(d)?;
        Ok(spec)
    }

    /// Number of leaves, which equals `d` for a valid spec.
    pub fn dim(&self) -> usize {
        match self {
            DistanceSpec::Leaf(_) => 1,
            DistanceSpec::Combine { left, right, .. } => left.dim() + right.dim(),
        }
    }

    /// Leaf indices in left-to-right order.
    pub fn coordinates(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.dim());
        self.collect_coordinates(&mut out);
        out
    }

    fn collect_coordinates(&self, out: &mut Vec<usize>) {
        match self {
            DistanceSpec::Leaf(i) => out.push(*i),
            DistanceSpec::Combine { left, right, .. } => {
                left.collect_coordinates(out);
                right.collect_coordinates(out);
            }
        }
    }

    /// Checks that the leaves are exactly `{0, ..., d-1}`, each once.
    pub fn validate(&self, d: usize) -> Result<()> {
        if d == 0 {
            return Err(Error::param("dimension must be at least 1"));
        }
        let mut counts = vec![0usize; d];
        for i in self.coordinates() {
            if i >= d {
                return Err(Error::CoordinateOutOfRange { index: i, d });
            }
            counts[i] += 1;
        }
        let missing: Vec<usize> = (0..d).filter(|&i| counts[i] == 0).collect();
        let repeated: Vec<usize> = (0..d).filter(|&i| counts[i] > 1).collect();
        if missing.is_empty() && repeated.is_empty() {
            Ok(())
        } else {
            Err(Error::Partition { missing, repeated })
        }
    }

    /// True when every inner node uses `op` (a single leaf counts too).
    pub fn is_uniform(&self, op: Combine) -> bool {
        match self {
            DistanceSpec::Leaf(_) => true,
            DistanceSpec::Combine {
                op: o, left, right, ..
            } => *o == op && left.is_uniform(op) && right.is_uniform(op),
        }
    }

    pub fn is_max_norm(&self) -> bool {
        self.is_uniform(Combine::Max)
    }

    pub fn is_mcd(&self) -> bool {
        self.is_uniform(Combine::Min)
    }

    /// Splits a root `min` chain into its operand subtrees, none of which
    /// has a `min` root. A spec without a `min` root yields itself.
    pub fn outer_min_blocks(&self) -> Vec<&DistanceSpec> {
        let mut out = Vec::new();
        self.collect_min_blocks(&mut out);
        out
    }

    fn collect_min_blocks<'a>(&'a self, out: &mut Vec<&'a DistanceSpec>) {
        match self {
            DistanceSpec::Combine {
                op: Combine::Min,
                left,
                right,
            } => {
                left.collect_min_blocks(out);
                right.collect_min_blocks(out);
            }
            other => out.push(other),
        }
    }

    /// Evaluates the tree given a per-coordinate distance function.
    #[inline]
    pub fn eval_with<F: Fn(usize) -> f64 + Copy>(&self, coord: F) -> f64 {
        match self {
            DistanceSpec::Leaf(i) => coord(*i),
            DistanceSpec::Combine { op, left, right } => {
                let l = left.eval_with(coord);
                let r = right.eval_with(coord);
                match op {
                    Combine::Min => l.min(r),
                    Combine::Max => l.max(r),
                }
            }
        }
    }

    /// Boolean distance between two coordinate slices without dimension checks.
    #[inline]
    pub fn distance_between(&self, topology: Topology, x: &[f64], y: &[f64]) -> f64 {
        self.eval_with(|i| coordinate_distance(x[i], y[i], topology))
    }

    /// Ball volume without argument validation. Negative radii give 0.
    pub fn volume(&self, r: f64) -> f64 {
        match self {
            DistanceSpec::Leaf(_) => (2.0 * r).clamp(0.0, 1.0),
            DistanceSpec::Combine { op, left, right } => {
                let l = left.volume(r);
                let rv = right.volume(r);
                let v = match op {
                    Combine::Max => l * rv,
                    Combine::Min => l + rv - l * rv,
                };
                v.clamp(0.0, 1.0)
            }
        }
    }
}

impl fmt::Display for DistanceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DistanceSpec::Leaf(i) => write!(f, "x{i}"),
            DistanceSpec::Combine { op, left, right } => {
                let name = match op {
                    Combine::Min => "min",
                    Combine::Max => "max",
                };
                write!(f, "{name}({left},{right})")
            }
        }
    }
}

pub fn parse_distance_spec(text: &str, d: usize) -> Result<DistanceSpec> {
    DistanceSpec::parse(text, d)
}

pub fn boolean_distance(spec: &DistanceSpec, topology: Topology, x: &Point, y: &Point) -> Result<f64> {
    let d = spec.dim();
    for p in [x, y] {
        if p.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: p.dim(),
            });
        }
    }
    Ok(spec.distance_between(topology, x.coords(), y.coords()))
}

/// Lebesgue measure of the torus ball `{x : ||x|| <= r}`, clamped to `[0, 1]`.
pub fn ball_volume(spec: &DistanceSpec, r: f64) -> Result<f64> {
    if r.is_nan() || r < 0.0 {
        return Err(Error::param(format!("radius must be non-negative, got {r}")));
    }
    Ok(spec.volume(r))
}

pub fn sample_position<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<Point> {
    if d < 1 {
        return Err(Error::param("dimension must be at least 1"));
    }
    Ok(Point(random_coords(d, rng)))
}

pub(crate) fn random_coords<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<f64> {
    (0..d).map(|_| rng.gen_range(-0.5..=0.5)).collect()
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Parser {
            src: text.as_bytes(),
            pos: 0,
        }
    }

    fn parse(mut self) -> Result<DistanceSpec> {
        let expr = self.expr()?;
        self.skip_ws();
        if self.pos != self.src.len() {
            return Err(self.error("unexpected trailing input"));
        }
        Ok(expr)
    }

    fn error(&self, msg: &str) -> Error {
        Error::Syntax {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn eat(&mut self, byte: u8) -> Result<()> {
        self.skip_ws();
        if self.src.get(self.pos) == Some(&byte) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected '{}'", byte as char)))
        }
    }

    fn keyword(&mut self, word: &str) -> bool {
        let rest = &self.src[self.pos..];
        if rest.len() >= word.len() && rest[..word.len()].eq_ignore_ascii_case(word.as_bytes()) {
            self.pos += word.len();
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<DistanceSpec> {
        self.skip_ws();
        let op = if self.keyword("min") {
            Combine::Min
        } else if self.keyword("max") {
            Combine::Max
        } else if self.keyword("x") {
            return self.index().map(DistanceSpec::Leaf);
        } else {
            return Err(self.error("expected 'x<index>', 'min(' or 'max('"));
        };
        self.eat(b'(')?;
        let left = self.expr()?;
        self.eat(b',')?;
        let right = self.expr()?;
        self.eat(b')')?;
        Ok(DistanceSpec::combine(op, left, right))
    }

    fn index(&mut self) -> Result<usize> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected coordinate index"));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Syntax {
                pos: start,
                msg: "coordinate index too large".into(),
            })
    }
}
