//! Text descriptions of surfaces.
//!
//! A spec is a list of `key: value` lines. Blank lines and lines starting
//! with `#` are ignored. Values are numbers, booleans, vectors `[a, b]`,
//! lists of vectors `[[a, b], [c, d]]` or, for the graph function `u`, an
//! expression in `x`, `y` (see [`Expr`]).
//!
//! ```text
//! kind: circle
//! radius: 1.0
//! center: [0,0]
//! spacing: 0.01
//! ```

mod expr;

use std::fmt;

pub use expr::{BinOp, Expr, Func};

use crate::error::{Error, Result};
use crate::geom::{sample_plane_disk, Dims, GridGraph, PlaneN, Polyline, ProfileSurface, Surface};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{message} at line {line}, column {column}")]
pub struct ParseError {
    pub message: String,
    pub line: usize,
    pub column: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SurfaceSpec {
    /// Regular polygon approximating a circle in the first two coordinates
    /// of `center` (2 or 3 coordinates).
    Circle {
        radius: f64,
        center: Vec<f64>,
        spacing: f64,
    },
    /// Round `n`-sphere as a profile surface.
    Sphere {
        n: usize,
        radius: f64,
        spacing: f64,
    },
    Polyline {
        points: Vec<Vec<f64>>,
        closed: bool,
        fixed: bool,
    },
    /// Graph of `u` (and `u2` for codimension 2) over the box `domain`.
    GridGraph {
        domain: Vec<[f64; 2]>,
        spacing: f64,
        u: Vec<Expr>,
    },
    Profile {
        n: usize,
        points: Vec<[f64; 2]>,
    },
    PlaneDisk {
        n: usize,
        k: usize,
        radius: f64,
        spacing: f64,
        base: Vec<f64>,
        frame: Option<Vec<Vec<f64>>>,
    },
}

#[derive(Debug, Clone)]
enum Value {
    Scalar(f64),
    Bool(bool),
    Vector(Vec<f64>),
    Matrix(Vec<Vec<f64>>),
    Expr(Expr),
}

struct Entry {
    value: Value,
    line: usize,
    column: usize,
}

fn err(message: impl Into<String>, line: usize, column: usize) -> ParseError {
    ParseError { message: message.into(), line, column }
}

fn parse_number(text: &str, line: usize, column: usize) -> Result<f64, ParseError> {
    let t = text.trim();
    let ok = !t.is_empty() && t.chars().all(|c| c.is_ascii_digit() || matches!(c, '.' | '-' | '+' | 'e' | 'E'));
    match t.parse::<f64>() {
        Ok(v) if ok && v.is_finite() => Ok(v),
        _ => Err(err(format!("malformed number '{t}'"), line, column)),
    }
}

fn parse_vector(text: &str, line: usize, column: usize) -> Result<Vec<f64>, ParseError> {
    let inner = text
        .trim()
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| err("expected '[...]'", line, column))?;
    if inner.trim().is_empty() {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    let mut offset = column + 1;
    for part in inner.split(',') {
        out.push(parse_number(part, line, offset)?);
        offset += part.chars().count() + 1;
    }
    Ok(out)
}

fn parse_matrix(text: &str, line: usize, column: usize) -> Result<Vec<Vec<f64>>, ParseError> {
    let t = text.trim();
    let inner = t
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| err("expected '[[...], ...]'", line, column))?;
    let mut rows = Vec::new();
    let mut depth = 0;
    let mut start = None;
    for (i, c) in inner.char_indices() {
        match c {
            '[' => {
                if depth != 0 {
                    return Err(err("nested list too deep", line, column + 1 + i));
                }
                depth = 1;
                start = Some(i);
            }
            ']' => {
                let s = start.take().ok_or_else(|| err("unbalanced ']'", line, column + 1 + i))?;
                depth = 0;
                rows.push(parse_vector(&inner[s..=i], line, column + 1 + s)?);
            }
            ',' | ' ' | '\t' => {}
            _ if depth == 0 => return Err(err(format!("unexpected '{c}' in list"), line, column + 1 + i)),
            _ => {}
        }
    }
    if depth != 0 {
        return Err(err("unbalanced '['", line, column));
    }
    Ok(rows)
}

const KEYS: &[(&str, &[&str])] = &[
    ("circle", &["radius", "center", "spacing"]),
    ("sphere", &["n", "radius", "spacing"]),
    ("polyline", &["points", "closed", "fixed"]),
    ("gridgraph", &["domain", "spacing", "u", "u2"]),
    ("profile", &["n", "points"]),
    ("planedisk", &["n", "k", "radius", "spacing", "base", "frame"]),
];

impl SurfaceSpec {
    pub fn parse(text: &str) -> Result<SurfaceSpec, ParseError> {
        let mut kind: Option<(String, usize)> = None;
        let mut raw_entries: Vec<(String, String, usize, usize, usize)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let indent = raw.len() - raw.trim_start().len();
            let colon = raw.find(':').ok_or_else(|| err("expected 'key: value'", line, indent + 1))?;
            let key = raw[..colon].trim().to_string();
            let rest = &raw[colon + 1..];
            let value_text = rest.trim();
            let column =
                raw[..colon + 1].chars().count() + 1 + (rest.chars().count() - rest.trim_start().chars().count());
            if value_text.is_empty() {
                return Err(err(format!("missing value for '{key}'"), line, column));
            }
            if key == "kind" {
                if kind.is_some() {
                    return Err(err("duplicate key 'kind'", line, indent + 1));
                }
                if !KEYS.iter().any(|(k, _)| *k == value_text) {
                    return Err(err(format!("unknown kind '{value_text}'"), line, column));
                }
                kind = Some((value_text.to_string(), line));
                continue;
            }
            if raw_entries.iter().any(|e| e.0 == key) {
                return Err(err(format!("duplicate key '{key}'"), line, indent + 1));
            }
            raw_entries.push((key, value_text.to_string(), line, column, indent + 1));
        }
        let (kind, kind_line) = kind.ok_or_else(|| err("missing 'kind'", 1, 1))?;
        let allowed = KEYS.iter().find(|(k, _)| *k == kind).map(|(_, v)| *v).unwrap_or(&[]);
        for (key, _, line, _, key_column) in &raw_entries {
            if !allowed.contains(&key.as_str()) {
                return Err(err(format!("unknown key '{key}' for kind '{kind}'"), *line, *key_column));
            }
        }
        let mut entries = Vec::with_capacity(raw_entries.len());
        for (key, value_text, line, column, key_column) in raw_entries {
            let value_text = value_text.as_str();
            let value = if key == "u" || key == "u2" {
                Value::Expr(Expr::parse_at(value_text, line, column)?)
            } else if value_text.starts_with("[[") || value_text == "[]" && key == "points" {
                Value::Matrix(parse_matrix(value_text, line, column)?)
            } else if value_text.starts_with('[') {
                Value::Vector(parse_vector(value_text, line, column)?)
            } else if value_text == "true" || value_text == "false" {
                Value::Bool(value_text == "true")
            } else {
                Value::Scalar(parse_number(value_text, line, column)?)
            };
            entries.push((key, Entry { value, line, column: key_column }));
        }
        let mut fields = Fields { entries, kind_line };
        let spec = match kind.as_str() {
            "circle" => SurfaceSpec::Circle {
                radius: fields.scalar("radius")?,
                center: fields.vector("center")?,
                spacing: fields.scalar("spacing")?,
            },
            "sphere" => SurfaceSpec::Sphere {
                n: fields.int("n")?,
                radius: fields.scalar("radius")?,
                spacing: fields.scalar("spacing")?,
            },
            "polyline" => SurfaceSpec::Polyline {
                points: fields.matrix("points")?,
                closed: fields.boolean("closed", false)?,
                fixed: fields.boolean("fixed", false)?,
            },
            "gridgraph" => {
                let domain = fields.matrix("domain")?;
                let line = fields.line_of("domain");
                let domain = domain
                    .into_iter()
                    .map(|r| match r[..] {
                        [a, b] => Ok([a, b]),
                        _ => Err(err("domain rows must be [lo, hi]", line, 1)),
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                let mut u = vec![fields.expr("u")?];
                if fields.has("u2") {
                    u.push(fields.expr("u2")?);
                }
                SurfaceSpec::GridGraph { domain, spacing: fields.scalar("spacing")?, u }
            }
            "profile" => {
                let n = fields.int("n")?;
                let line = fields.line_of("points");
                let points = fields
                    .matrix("points")?
                    .into_iter()
                    .map(|r| match r[..] {
                        [a, b] => Ok([a, b]),
                        _ => Err(err("profile points must be [r, z]", line, 1)),
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                SurfaceSpec::Profile { n, points }
            }
            "planedisk" => SurfaceSpec::PlaneDisk {
                n: fields.int("n")?,
                k: fields.int("k")?,
                radius: fields.scalar("radius")?,
                spacing: fields.scalar("spacing")?,
                base: fields.vector("base")?,
                frame: if fields.has("frame") { Some(fields.matrix("frame")?) } else { None },
            },
            _ => unreachable!(),
        };
        Ok(spec)
    }

    pub fn kind(&self) -> &'static str {
        match self {
            SurfaceSpec::Circle { .. } => "circle",
            SurfaceSpec::Sphere { .. } => "sphere",
            SurfaceSpec::Polyline { .. } => "polyline",
            SurfaceSpec::GridGraph { .. } => "gridgraph",
            SurfaceSpec::Profile { .. } => "profile",
            SurfaceSpec::PlaneDisk { .. } => "planedisk",
        }
    }

    pub fn build(&self) -> Result<Surface> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 {
                Ok(v)
            } else {
                Err(Error::InvalidSurface(format!("{name} must be positive")))
            }
        };
        match self {
            SurfaceSpec::Circle { radius, center, spacing } => {
                positive("radius", *radius)?;
                positive("spacing", *spacing)?;
                if !(2..=3).contains(&center.len()) {
                    return Err(Error::InvalidSurface("circle center needs 2 or 3 coordinates".into()));
                }
                let m = ((2.0 * std::f64::consts::PI * radius / spacing).round() as usize).max(3);
                Ok(Surface::Polyline(Polyline::circle(center, *radius, m)))
            }
            SurfaceSpec::Sphere { n, radius, spacing } => {
                positive("radius", *radius)?;
                positive("spacing", *spacing)?;
                Ok(Surface::Profile(ProfileSurface::sphere(*n, *radius, *spacing)?))
            }
            SurfaceSpec::Polyline { points, closed, fixed } => {
                let dim = points.first().map_or(0, Vec::len);
                if points.iter().any(|p| p.len() != dim) {
                    return Err(Error::InvalidSurface("polyline points differ in length".into()));
                }
                let vertices = points.iter().flatten().copied().collect();
                Ok(Surface::Polyline(Polyline::new(dim, vertices, *closed, *fixed)?))
            }
            SurfaceSpec::GridGraph { domain, spacing, u } => {
                positive("spacing", *spacing)?;
                let dims = Dims::new(domain.len(), u.len())?;
                if u.iter().any(|e| e.arity() > dims.n) {
                    return Err(Error::InvalidSurface(format!(
                        "u uses a coordinate beyond the {}-dimensional domain",
                        dims.n
                    )));
                }
                let lo: Vec<f64> = domain.iter().map(|d| d[0]).collect();
                let hi: Vec<f64> = domain.iter().map(|d| d[1]).collect();
                let cells = ((hi[0] - lo[0]) / spacing).round();
                if !(cells >= 1.0) {
                    return Err(Error::InvalidSurface("empty grid domain".into()));
                }
                let g = GridGraph::from_fn(dims, &lo, &hi, cells as usize, |x| u.iter().map(|e| e.eval(x)).collect())?;
                Ok(Surface::Graph(g))
            }
            SurfaceSpec::Profile { n, points } => Ok(Surface::Profile(ProfileSurface::new(*n, points.clone())?)),
            SurfaceSpec::PlaneDisk { n, k, radius, spacing, base, frame } => {
                let dims = Dims::new(*n, *k)?;
                if base.len() != dims.ambient() {
                    return Err(Error::InvalidSurface("plane base has wrong dimension".into()));
                }
                let plane = match frame {
                    None => PlaneN::coordinate(dims, base),
                    Some(rows) => {
                        if rows.len() != *n || rows.iter().any(|r| r.len() != dims.ambient()) {
                            return Err(Error::InvalidSurface("plane frame has wrong shape".into()));
                        }
                        let flat: Vec<f64> = rows.iter().flatten().copied().collect();
                        PlaneN::spanned_by(dims, base.clone(), &flat)?
                    }
                };
                Ok(Surface::Sampled(sample_plane_disk(&plane, *radius, *spacing)?))
            }
        }
    }
}

struct Fields {
    entries: Vec<(String, Entry)>,
    kind_line: usize,
}

impl Fields {
    fn has(&self, key: &str) -> bool {
        self.entries.iter().any(|(k, _)| k == key)
    }

    fn line_of(&self, key: &str) -> usize {
        self.entries.iter().find(|(k, _)| k == key).map_or(self.kind_line, |(_, e)| e.line)
    }

    fn take(&mut self, key: &str) -> Result<Entry, ParseError> {
        match self.entries.iter().position(|(k, _)| k == key) {
            Some(i) => Ok(self.entries.remove(i).1),
            None => Err(err(format!("missing key '{key}'"), self.kind_line, 1)),
        }
    }

    fn scalar(&mut self, key: &str) -> Result<f64, ParseError> {
        match self.take(key)? {
            Entry { value: Value::Scalar(v), .. } => Ok(v),
            e => Err(err(format!("'{key}' must be a number"), e.line, e.column)),
        }
    }

    fn int(&mut self, key: &str) -> Result<usize, ParseError> {
        let line = self.line_of(key);
        let v = self.scalar(key)?;
        if v >= 1.0 && v.fract() == 0.0 && v <= 64.0 {
            Ok(v as usize)
        } else {
            Err(err(format!("'{key}' must be a positive integer"), line, 1))
        }
    }

    fn boolean(&mut self, key: &str, default: bool) -> Result<bool, ParseError> {
        if !self.has(key) {
            return Ok(default);
        }
        match self.take(key)? {
            Entry { value: Value::Bool(b), .. } => Ok(b),
            e => Err(err(format!("'{key}' must be true or false"), e.line, e.column)),
        }
    }

    fn vector(&mut self, key: &str) -> Result<Vec<f64>, ParseError> {
        match self.take(key)? {
            Entry { value: Value::Vector(v), .. } => Ok(v),
            e => Err(err(format!("'{key}' must be a vector"), e.line, e.column)),
        }
    }

    fn matrix(&mut self, key: &str) -> Result<Vec<Vec<f64>>, ParseError> {
        match self.take(key)? {
            Entry { value: Value::Matrix(v), .. } => Ok(v),
            e => Err(err(format!("'{key}' must be a list of vectors"), e.line, e.column)),
        }
    }

    fn expr(&mut self, key: &str) -> Result<Expr, ParseError> {
        match self.take(key)? {
            Entry { value: Value::Expr(v), .. } => Ok(v),
            e => Err(err(format!("'{key}' must be an expression"), e.line, e.column)),
        }
    }
}

struct Vector<'a>(&'a [f64]);

impl fmt::Display for Vector<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "]")
    }
}

fn write_matrix<'a>(f: &mut fmt::Formatter<'_>, rows: impl Iterator<Item = &'a [f64]>) -> fmt::Result {
    write!(f, "[")?;
    for (i, r) in rows.enumerate() {
        if i > 0 {
            write!(f, ", ")?;
        }
        write!(f, "{}", Vector(r))?;
    }
    writeln!(f, "]")
}

/// Canonical form: fixed key order, shortest round-trip numbers.
impl fmt::Display for SurfaceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "kind: {}", self.kind())?;
        match self {
            SurfaceSpec::Circle { radius, center, spacing } => {
                writeln!(f, "radius: {radius}")?;
                writeln!(f, "center: {}", Vector(center))?;
                writeln!(f, "spacing: {spacing}")
            }
            SurfaceSpec::Sphere { n, radius, spacing } => {
                writeln!(f, "n: {n}")?;
                writeln!(f, "radius: {radius}")?;
                writeln!(f, "spacing: {spacing}")
            }
            SurfaceSpec::Polyline { points, closed, fixed } => {
                write!(f, "points: ")?;
                write_matrix(f, points.iter().map(Vec::as_slice))?;
                writeln!(f, "closed: {closed}")?;
                writeln!(f, "fixed: {fixed}")
            }
            SurfaceSpec::GridGraph { domain, spacing, u } => {
                write!(f, "domain: ")?;
                write_matrix(f, domain.iter().map(|d| &d[..]))?;
                writeln!(f, "spacing: {spacing}")?;
                for (i, e) in u.iter().enumerate() {
                    let key = if i == 0 { "u".to_string() } else { format!("u{}", i + 1) };
                    writeln!(f, "{key}: {e}")?;
                }
                Ok(())
            }
            SurfaceSpec::Profile { n, points } => {
                writeln!(f, "n: {n}")?;
                write!(f, "points: ")?;
                write_matrix(f, points.iter().map(|p| &p[..]))
            }
            SurfaceSpec::PlaneDisk { n, k, radius, spacing, base, frame } => {
                writeln!(f, "n: {n}")?;
                writeln!(f, "k: {k}")?;
                writeln!(f, "radius: {radius}")?;
                writeln!(f, "spacing: {spacing}")?;
                writeln!(f, "base: {}", Vector(base))?;
                if let Some(rows) = frame {
                    write!(f, "frame: ")?;
                    write_matrix(f, rows.iter().map(Vec::as_slice))?;
                }
                Ok(())
            }
        }
    }
}

impl std::str::FromStr for SurfaceSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(SurfaceSpec::parse(s)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_circle() {
        let s = SurfaceSpec::parse("kind: circle\nradius: 1.0\ncenter: [0,0]\nspacing: 0.01").unwrap();
        assert_eq!(s, SurfaceSpec::Circle { radius: 1.0, center: vec![0.0, 0.0], spacing: 0.01 });
        let Surface::Polyline(p) = s.build().unwrap() else { panic!() };
        assert_eq!(p.len(), 628);
    }

    #[test]
    fn unknown_kind_is_located() {
        let e = SurfaceSpec::parse("kind: banana").unwrap_err();
        assert!(e.to_string().starts_with("unknown kind 'banana' at line 1"), "{e}");
        assert_eq!(e.column, 7);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_numbers() {
        let e = SurfaceSpec::parse("kind: sphere\nn: 2\nradius: 2\nspacing: 0.1\ncolour: red").unwrap_err();
        assert_eq!(e.line, 5);
        assert!(e.message.contains("colour"));
        let e = SurfaceSpec::parse("kind: sphere\nn: 2\nradius: 2x\nspacing: 0.1").unwrap_err();
        assert_eq!((e.line, e.column), (3, 9));
        let e = SurfaceSpec::parse("kind: gridgraph\ndomain: [[0, 1]]\nspacing: 0.1\nu: x + tan(x)").unwrap_err();
        assert_eq!((e.line, e.column), (4, 8));
        assert!(SurfaceSpec::parse("kind: sphere\nradius: 2\nspacing: 0.1").is_err());
    }

    #[test]
    fn builds_every_kind() {
        let texts = [
            "kind: sphere\nn: 2\nradius: 2\nspacing: 0.05",
            "kind: polyline\npoints: [[0, 0], [1, 0], [1, 1]]\nfixed: true",
            "kind: gridgraph\ndomain: [[-1, 1], [-1, 1]]\nspacing: 0.1\nu: 0.1·cos(x) * y",
            "kind: gridgraph\ndomain: [[-1, 1]]\nspacing: 0.1\nu: x\nu2: x^2",
            "kind: profile\nn: 3\npoints: [[0, 1], [1, 0], [0, -1]]",
            "kind: planedisk\nn: 2\nk: 1\nradius: 1\nspacing: 0.1\nbase: [0, 0, 1]\nframe: [[1, 1, 0], [0, 0, 1]]",
        ];
        let dims = [(2, 1), (1, 1), (2, 1), (1, 2), (3, 1), (2, 1)];
        for (t, d) in texts.iter().zip(dims) {
            let spec = SurfaceSpec::parse(t).unwrap();
            let built = spec.build().unwrap();
            assert_eq!((built.dims().n, built.dims().k), d, "{t}");
            assert!(!built.to_sampled().is_empty());
            let again = SurfaceSpec::parse(&spec.to_string()).unwrap();
            assert_eq!(again, spec);
            assert_eq!(again.to_string(), spec.to_string());
        }
    }

    fn finite() -> impl Strategy<Value = f64> {
        prop_oneof![any::<f64>().prop_filter("finite", |v| v.is_finite()), -1e3f64..1e3]
    }

    proptest! {
        #[test]
        fn round_trips_bit_exactly(r in finite(), c in prop::collection::vec(finite(), 2..4), h in finite()) {
            let spec = SurfaceSpec::Circle { radius: r, center: c, spacing: h };
            let back = SurfaceSpec::parse(&spec.to_string()).unwrap();
            match (&back, &spec) {
                (SurfaceSpec::Circle { radius: a, center: ca, spacing: ha },
                 SurfaceSpec::Circle { radius: b, center: cb, spacing: hb }) => {
                    prop_assert_eq!(a.to_bits(), b.to_bits());
                    prop_assert_eq!(ha.to_bits(), hb.to_bits());
                    prop_assert!(ca.iter().zip(cb).all(|(x, y)| x.to_bits() == y.to_bits()));
                }
                _ => prop_assert!(false),
            }
        }

        #[test]
        fn profile_points_round_trip(pts in prop::collection::vec((0.0f64..10.0, finite()), 2..20)) {
            let spec = SurfaceSpec::Profile { n: 2, points: pts.into_iter().map(|(a, b)| [a, b]).collect() };
            prop_assert_eq!(SurfaceSpec::parse(&spec.to_string()).unwrap(), spec);
        }
    }
}
