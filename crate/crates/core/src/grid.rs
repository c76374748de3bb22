//! Regular-grid scalar fields, CSV ingestion and the built-in test surfaces.
//!
//! Nodes are stored row-major: row `i` runs along `y`, column `j` along `x`,
//! and the flat index of node `(i, j)` is `i * nx + j` (zero-based).

use std::f64::consts::PI;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::Vec2;

/// Smallest grid that still holds one 4x4 patch.
pub const MIN_NODES: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridField {
    nx: usize,
    ny: usize,
    dx: f64,
    dy: f64,
    origin: Vec2,
    values: Vec<f64>,
}

impl GridField {
    pub fn new(
        nx: usize,
        ny: usize,
        dx: f64,
        dy: f64,
        origin: Vec2,
        values: Vec<f64>,
    ) -> Result<Self> {
        if nx < MIN_NODES || ny < MIN_NODES {
            return Err(Error::InvalidGrid(format!(
                "grid must be at least {MIN_NODES}x{MIN_NODES}, got {nx}x{ny}"
            )));
        }
        if !(dx > 0.0 && dy > 0.0 && dx.is_finite() && dy.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "spacing must be positive and finite, got dx={dx}, dy={dy}"
            )));
        }
        if !origin.is_finite() {
            return Err(Error::InvalidGrid("origin must be finite".into()));
        }
        if values.len() != nx * ny {
            return Err(Error::InvalidGrid(format!(
                "expected {} values, found {}",
                nx * ny,
                values.len()
            )));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "value {} at node ({}, {}) is not finite",
                values[k],
                k / nx,
                k % nx
            )));
        }
        Ok(GridField {
            nx,
            ny,
            dx,
            dy,
            origin,
            values,
        })
    }

    /// Samples `f` at every node.
    pub fn from_fn(
        nx: usize,
        ny: usize,
        dx: f64,
        dy: f64,
        origin: Vec2,
        f: impl Fn(Vec2) -> f64,
    ) -> Result<Self> {
        let mut values = Vec::with_capacity(nx * ny);
        for i in 0..ny {
            for j in 0..nx {
                values.push(f(origin + Vec2::new(j as f64 * dx, i as f64 * dy)));
            }
        }
        GridField::new(nx, ny, dx, dy, origin, values)
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn dy(&self) -> f64 {
        self.dy
    }

    pub fn origin(&self) -> Vec2 {
        self.origin
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Diagonal step of one grid cell, `sqrt(dx^2 + dy^2)`.
    pub fn diag_step(&self) -> f64 {
        self.dx.hypot(self.dy)
    }

    pub fn flat_index(&self, row: usize, col: usize) -> Result<usize> {
        self.check_index(row, col)?;
        Ok(row * self.nx + col)
    }

    pub fn node_position(&self, row: usize, col: usize) -> Result<Vec2> {
        self.check_index(row, col)?;
        Ok(self.node_unchecked(row, col))
    }

    pub fn value(&self, row: usize, col: usize) -> Result<f64> {
        Ok(self.values[self.flat_index(row, col)?])
    }

    #[inline]
    pub(crate) fn node_unchecked(&self, row: usize, col: usize) -> Vec2 {
        self.origin + Vec2::new(col as f64 * self.dx, row as f64 * self.dy)
    }

    #[inline]
    pub(crate) fn value_unchecked(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.nx + col]
    }

    fn check_index(&self, row: usize, col: usize) -> Result<()> {
        if row < self.ny && col < self.nx {
            Ok(())
        } else {
            Err(Error::OutOfRange {
                row,
                col,
                nx: self.nx,
                ny: self.ny,
            })
        }
    }

    /// Position of the node opposite the origin.
    pub fn upper_corner(&self) -> Vec2 {
        self.node_unchecked(self.ny - 1, self.nx - 1)
    }

    /// `(min, max)` over all samples.
    pub fn value_range(&self) -> (f64, f64) {
        self.values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            })
    }

    /// Writes the grid in the CSV exchange format.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(
            w,
            "{},{},{:?},{:?},{:?},{:?}",
            self.nx, self.ny, self.dx, self.dy, self.origin.x, self.origin.y
        )?;
        let mut line = String::new();
        for row in self.values.chunks(self.nx) {
            line.clear();
            for (k, v) in row.iter().enumerate() {
                if k > 0 {
                    line.push(',');
                }
                // Debug formatting is the shortest representation that
                // parses back to the same f64.
                line.push_str(&format!("{v:?}"));
            }
            writeln!(w, "{line}")?;
        }
        Ok(())
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = std::io::BufWriter::new(file);
        self.write_csv(&mut w)
            .and_then(|_| w.flush())
            .map_err(|e| Error::io(path, e))
    }

    pub fn load_csv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse_csv(&text, path)
    }

    /// Parses CSV text; `path` only labels error messages.
    pub fn parse_csv(text: &str, path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let err = |line: usize, msg: String| Error::Parse {
            path: path.to_path_buf(),
            line,
            msg,
        };

        let mut lines = text.lines().enumerate().map(|(k, l)| (k + 1, l));
        let (hline, header) = lines
            .find(|(_, l)| !l.trim().is_empty())
            .ok_or_else(|| err(1, "empty file, expected header nx,ny,dx,dy,x0,y0".into()))?;
        let fields: Vec<&str> = header.split(',').map(str::trim).collect();
        if fields.len() != 6 {
            return Err(err(
                hline,
                format!(
                    "malformed header: expected 6 fields nx,ny,dx,dy,x0,y0, found {}",
                    fields.len()
                ),
            ));
        }
        let parse_count = |s: &str, name: &str| {
            s.parse::<usize>().map_err(|_| {
                err(
                    hline,
                    format!("malformed header: {name} '{s}' is not an integer"),
                )
            })
        };
        let parse_real = |s: &str, name: &str| {
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| {
                    err(
                        hline,
                        format!("malformed header: {name} '{s}' is not a finite number"),
                    )
                })
        };
        let nx = parse_count(fields[0], "nx")?;
        let ny = parse_count(fields[1], "ny")?;
        let dx = parse_real(fields[2], "dx")?;
        let dy = parse_real(fields[3], "dy")?;
        let x0 = parse_real(fields[4], "x0")?;
        let y0 = parse_real(fields[5], "y0")?;
        if nx < MIN_NODES || ny < MIN_NODES {
            return Err(err(
                hline,
                format!("grid must be at least {MIN_NODES}x{MIN_NODES}, got {nx}x{ny}"),
            ));
        }
        if !(dx > 0.0 && dy > 0.0) {
            return Err(err(
                hline,
                format!("spacing must be positive, got dx={dx}, dy={dy}"),
            ));
        }

        let expected = nx * ny;
        let mut values = Vec::with_capacity(expected);
        let mut last_line = hline;
        for (lineno, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            last_line = lineno;
            for tok in line.split(',') {
                let tok = tok.trim();
                let v: f64 = tok
                    .parse()
                    .map_err(|_| err(lineno, format!("'{tok}' is not a number")))?;
                if !v.is_finite() {
                    return Err(err(lineno, format!("non-finite value '{tok}'")));
                }
                values.push(v);
            }
        }
        if values.len() != expected {
            return Err(err(
                last_line,
                format!("expected {expected} values, found {}", values.len()),
            ));
        }
        GridField::new(nx, ny, dx, dy, Vec2::new(x0, y0), values)
    }
}

/// The six analytic test surfaces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TestFunction {
    /// Franke's function on `[0,1]^2`.
    F1,
    /// `sin(3x) cos(3y)` on `[-2,2]^2`.
    F2,
    /// `-(x - y)^2` on `[-1,1]^2`.
    F11,
    /// `sin(x + y^2)` on `[-3,3] x [-2,2]`.
    F12,
    /// `sin(3 pi (r + 1/4))` on `[-1,1]^2`.
    F13,
    /// `-2 (x^2 - y^2)^2 + 1` on `[-1,1]^2`.
    F14,
}

/// Axis-aligned rectangle `[lo.x, hi.x] x [lo.y, hi.y]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    pub lo: Vec2,
    pub hi: Vec2,
}

impl Domain {
    pub const fn new(xmin: f64, xmax: f64, ymin: f64, ymax: f64) -> Self {
        Domain {
            lo: Vec2::new(xmin, ymin),
            hi: Vec2::new(xmax, ymax),
        }
    }

    pub fn width(&self) -> f64 {
        self.hi.x - self.lo.x
    }

    pub fn height(&self) -> f64 {
        self.hi.y - self.lo.y
    }

    pub fn contains(&self, p: Vec2, tol: f64) -> bool {
        p.x >= self.lo.x - tol
            && p.x <= self.hi.x + tol
            && p.y >= self.lo.y - tol
            && p.y <= self.hi.y + tol
    }
}

impl TestFunction {
    pub const ALL: [TestFunction; 6] = [
        TestFunction::F1,
        TestFunction::F2,
        TestFunction::F11,
        TestFunction::F12,
        TestFunction::F13,
        TestFunction::F14,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TestFunction::F1 => "f1",
            TestFunction::F2 => "f2",
            TestFunction::F11 => "f11",
            TestFunction::F12 => "f12",
            TestFunction::F13 => "f13",
            TestFunction::F14 => "f14",
        }
    }

    pub fn domain(self) -> Domain {
        match self {
            TestFunction::F1 => Domain::new(0.0, 1.0, 0.0, 1.0),
            TestFunction::F2 => Domain::new(-2.0, 2.0, -2.0, 2.0),
            TestFunction::F11 | TestFunction::F13 | TestFunction::F14 => {
                Domain::new(-1.0, 1.0, -1.0, 1.0)
            }
            TestFunction::F12 => Domain::new(-3.0, 3.0, -2.0, 2.0),
        }
    }

    pub fn eval(self, p: Vec2) -> f64 {
        let (x, y) = (p.x, p.y);
        match self {
            TestFunction::F1 => franke_terms(p).iter().sum(),
            TestFunction::F2 => (3.0 * x).sin() * (3.0 * y).cos(),
            TestFunction::F11 => -(x - y) * (x - y),
            TestFunction::F12 => (x + y * y).sin(),
            TestFunction::F13 => (3.0 * PI * (x.hypot(y) + 0.25)).sin(),
            TestFunction::F14 => {
                let s = x * x - y * y;
                -2.0 * s * s + 1.0
            }
        }
    }

    /// Samples on an `nx` x `ny` grid spanning the domain, endpoints included.
    pub fn sample(self, nx: usize, ny: usize) -> Result<GridField> {
        if nx < MIN_NODES || ny < MIN_NODES {
            return Err(Error::InvalidGrid(format!(
                "grid must be at least {MIN_NODES}x{MIN_NODES}, got {nx}x{ny}"
            )));
        }
        let dom = self.domain();
        let dx = dom.width() / (nx - 1) as f64;
        let dy = dom.height() / (ny - 1) as f64;
        GridField::from_fn(nx, ny, dx, dy, dom.lo, |p| self.eval(p))
    }
}

/// The four Gaussian bumps of Franke's function. The second bump's `y` term
/// is linear, `(9y + 1) / 10`, not squared.
pub fn franke_terms(p: Vec2) -> [f64; 4] {
    let (x, y) = (p.x, p.y);
    [
        0.75 * (-(9.0 * x - 2.0).powi(2) / 4.0 - (9.0 * y - 2.0).powi(2) / 4.0).exp(),
        0.75 * (-(9.0 * x + 1.0).powi(2) / 49.0 - (9.0 * y + 1.0) / 10.0).exp(),
        0.5 * (-(9.0 * x - 7.0).powi(2) / 4.0 - (9.0 * y - 3.0).powi(2) / 4.0).exp(),
        -0.2 * (-(9.0 * x - 4.0).powi(2) - (9.0 * y - 7.0).powi(2)).exp(),
    ]
}

impl fmt::Display for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TestFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TestFunction::ALL
            .into_iter()
            .find(|tf| tf.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownName {
                what: "test function",
                given: s.to_string(),
                expected: "f1, f2, f11, f12, f13, f14".to_string(),
            })
    }
}
