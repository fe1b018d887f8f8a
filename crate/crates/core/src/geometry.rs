//! Points in the unit cube, ℓp distances, and the cube tessellation used by
//! the builder.
//!
//! Cells are half-open boxes `[k·s, (k+1)·s)` along every axis, except that
//! the upper face of the unit cube is closed into the last cell. Cell ids are
//! linear indices with the first axis most significant, so comparing two ids
//! is the same as comparing their coordinate vectors lexicographically.

use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, parse_err, Error, Result};

/// Hard cap on the number of cells a tessellation may have.
pub const MAX_CELLS: usize = 1 << 26;

/// The `p` of an ℓp norm, `1 <= p <= ∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Norm(f64);

impl Norm {
    pub const L1: Norm = Norm(1.0);
    pub const L2: Norm = Norm(2.0);
    pub const LINF: Norm = Norm(f64::INFINITY);

    pub fn new(p: f64) -> Result<Self> {
        if p.is_nan() || p < 1.0 {
            return Err(invalid(format!(
                "norm parameter p = {p} must satisfy 1 <= p <= inf"
            )));
        }
        Ok(Norm(p))
    }

    pub fn p(self) -> f64 {
        self.0
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }

    /// `d^(1/p)`: the ℓp length of the all-ones vector in `d` dimensions.
    pub fn unit_diagonal(self, d: usize) -> f64 {
        let d = d as f64;
        if self.is_infinite() {
            1.0
        } else if self.0 == 1.0 {
            d
        } else if self.0 == 2.0 {
            d.sqrt()
        } else {
            d.powf(1.0 / self.0)
        }
    }
}

impl Default for Norm {
    fn default() -> Self {
        Norm::L2
    }
}

impl fmt::Display for Norm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            f.write_str("inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl FromStr for Norm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "max" => Ok(Norm::LINF),
            other => {
                let p: f64 = other
                    .parse()
                    .map_err(|_| invalid(format!("cannot parse norm parameter {s:?}")))?;
                Norm::new(p)
            }
        }
    }
}

/// ℓp distance between two points of equal dimension.
pub fn lp_distance(a: &[f64], b: &[f64], norm: Norm) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let diffs = a.iter().zip(b).map(|(x, y)| (x - y).abs());
    let p = norm.p();
    if norm.is_infinite() {
        diffs.fold(0.0, f64::max)
    } else if p == 1.0 {
        diffs.sum()
    } else if p == 2.0 {
        diffs.map(|t| t * t).sum::<f64>().sqrt()
    } else {
        diffs.map(|t| t.powf(p)).sum::<f64>().powf(1.0 / p)
    }
}

/// A point of `[0,1]^d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(invalid("a point needs at least one coordinate"));
        }
        check_in_domain(&coords)?;
        Ok(Point(coords))
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

fn check_in_domain(coords: &[f64]) -> Result<()> {
    for (axis, &value) in coords.iter().enumerate() {
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::OutOfDomain { axis, value });
        }
    }
    Ok(())
}

/// `n` points of `[0,1]^d` stored contiguously; vertex `i` sits at
/// `point(i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Positions {
    dim: usize,
    coords: Vec<f64>,
}

impl Positions {
    pub fn from_flat(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("dimension must be at least 1"));
        }
        if !coords.len().is_multiple_of(dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: coords.len() % dim,
            });
        }
        check_in_domain(&coords)?;
        Ok(Positions { dim, coords })
    }

    pub fn from_points(points: &[Point]) -> Result<Self> {
        let dim = points
            .first()
            .map(Point::dim)
            .ok_or_else(|| invalid("no points"))?;
        let mut coords = Vec::with_capacity(points.len() * dim);
        for p in points {
            if p.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: p.dim(),
                });
            }
            coords.extend_from_slice(p.coords());
        }
        Ok(Positions { dim, coords })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub fn to_points(&self) -> Vec<Point> {
        self.iter().map(|c| Point(c.to_vec())).collect()
    }

    /// Writes the positions file format: a header `n d`, then one line of
    /// `d` coordinates per vertex. Coordinates use the shortest decimal
    /// representation that parses back to the same `f64`.
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{} {}", self.len(), self.dim)?;
        for p in self.iter() {
            let mut first = true;
            for c in p {
                if !first {
                    w.write_all(b" ")?;
                }
                first = false;
                write!(w, "{c:?}")?;
            }
            w.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn read_from<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines().enumerate().filter_map(|(i, l)| match l {
            Ok(l) if l.trim().is_empty() => None,
            other => Some((i + 1, other)),
        });
        let (lineno, header) = lines.next().ok_or_else(|| parse_err(1, "missing header"))?;
        let header = header?;
        let mut it = header.split_whitespace();
        let mut field = |name: &str| -> Result<usize> {
            it.next()
                .ok_or_else(|| parse_err(lineno, format!("missing {name}")))?
                .parse()
                .map_err(|_| parse_err(lineno, format!("bad {name}")))
        };
        let n = field("n")?;
        let dim = field("d")?;
        if dim == 0 {
            return Err(parse_err(lineno, "dimension must be at least 1"));
        }
        let mut coords = Vec::with_capacity(n * dim);
        for _ in 0..n {
            let (lineno, line) = lines
                .next()
                .ok_or_else(|| parse_err(lineno, format!("expected {n} point lines")))?;
            let line = line?;
            let before = coords.len();
            for tok in line.split_whitespace() {
                let v: f64 = tok
                    .parse()
                    .map_err(|_| parse_err(lineno, format!("bad coordinate {tok:?}")))?;
                coords.push(v);
            }
            if coords.len() - before != dim {
                return Err(parse_err(
                    lineno,
                    format!(
                        "expected {dim} coordinates, found {}",
                        coords.len() - before
                    ),
                ));
            }
        }
        if let Some((lineno, _)) = lines.next() {
            return Err(parse_err(lineno, "trailing data after the last point"));
        }
        Positions::from_flat(dim, coords)
    }
}

/// Identifier of one cell of a [`Tessellation`].
///
/// The wrapped value is the row-major linear index with axis 0 most
/// significant; use [`Tessellation::cell_coords`] for the coordinate vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CellId(pub usize);

impl CellId {
    pub fn index(self) -> usize {
        self.0
    }
}

/// A regular grid of `per_axis^d` cubes over `[0,1]^d`, addressed by
/// [`CellId`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CubeGrid {
    dim: usize,
    per_axis: usize,
    cell_count: usize,
}

impl CubeGrid {
    pub fn new(dim: usize, per_axis: usize) -> Result<Self> {
        if dim < 1 || per_axis < 1 {
            return Err(invalid(
                "a grid needs d >= 1 and at least one cell per axis",
            ));
        }
        let cell_count = (0..dim)
            .try_fold(1usize, |acc, _| acc.checked_mul(per_axis))
            .filter(|&c| c <= MAX_CELLS)
            .ok_or_else(|| {
                invalid(format!(
                    "{per_axis}^{dim} cells exceeds the limit of {MAX_CELLS}"
                ))
            })?;
        Ok(CubeGrid {
            dim,
            per_axis,
            cell_count,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn per_axis(&self) -> usize {
        self.per_axis
    }

    pub fn cell_count(&self) -> usize {
        self.cell_count
    }

    pub fn cells(&self) -> impl ExactSizeIterator<Item = CellId> {
        (0..self.cell_count).map(CellId)
    }

    pub fn cell_id(&self, coords: &[usize]) -> Result<CellId> {
        if coords.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: coords.len(),
            });
        }
        let mut index = 0;
        for &c in coords {
            if c >= self.per_axis {
                return Err(invalid(format!(
                    "cell coordinate {c} outside 0..{}",
                    self.per_axis
                )));
            }
            index = index * self.per_axis + c;
        }
        Ok(CellId(index))
    }

    pub fn cell_coords(&self, id: CellId) -> Vec<usize> {
        let mut coords = vec![0; self.dim];
        let mut rest = id.0;
        for slot in coords.iter_mut().rev() {
            *slot = rest % self.per_axis;
            rest /= self.per_axis;
        }
        coords
    }

    /// Cell containing `point`, which must lie in `[0,1]^d`.
    pub(crate) fn locate(&self, point: &[f64]) -> CellId {
        let last = self.per_axis - 1;
        let scale = self.per_axis as f64;
        let index = point.iter().fold(0usize, |acc, &x| {
            let k = ((x * scale) as usize).min(last);
            acc * self.per_axis + k
        });
        CellId(index)
    }

    pub fn are_friends(&self, a: CellId, b: CellId) -> bool {
        if a == b {
            return false;
        }
        let (mut x, mut y) = (a.0, b.0);
        for _ in 0..self.dim {
            if (x % self.per_axis).abs_diff(y % self.per_axis) > 1 {
                return false;
            }
            x /= self.per_axis;
            y /= self.per_axis;
        }
        true
    }

    /// Calls `f` on every friend of `a` in ascending id order.
    pub fn for_each_friend(&self, a: CellId, mut f: impl FnMut(CellId)) {
        let coords = self.cell_coords(a);
        let m = self.per_axis as isize;
        // Odometer over {-1, 0, 1}^d with axis 0 most significant, so the
        // output comes out sorted.
        let mut offsets = vec![-1isize; self.dim];
        'outer: loop {
            if offsets.iter().any(|&o| o != 0) {
                let mut index = 0usize;
                let mut inside = true;
                for (&c, &o) in coords.iter().zip(&offsets) {
                    let v = c as isize + o;
                    if v < 0 || v >= m {
                        inside = false;
                        break;
                    }
                    index = index * self.per_axis + v as usize;
                }
                if inside {
                    f(CellId(index));
                }
            }
            for slot in offsets.iter_mut().rev() {
                if *slot < 1 {
                    *slot += 1;
                    continue 'outer;
                }
                *slot = -1;
            }
            break;
        }
    }
}

/// Partition of `[0,1]^d` into `cells_per_axis^d` congruent cubes of side
/// `s`, sized so that points in the same or in friend cells are within the
/// connection radius.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Tessellation {
    grid: CubeGrid,
    radius: f64,
    norm: Norm,
    side: f64,
    expected_occupancy: f64,
}

impl Tessellation {
    /// Builds the tessellation for `n` points joined at radius `r` under
    /// `norm`, with `cells_per_axis = ⌈2·d^(1/p)/r⌉`.
    ///
    /// Radii of `2·d^(1/p)` and above give a single cell.
    pub fn new(dim: usize, radius: f64, norm: Norm, n: usize) -> Result<Self> {
        if dim < 1 {
            return Err(invalid("dimension must be at least 1"));
        }
        if radius.is_nan() || radius <= 0.0 {
            return Err(invalid(format!("radius must be positive, got {radius}")));
        }
        if n < 1 {
            return Err(invalid("n must be at least 1"));
        }
        let diag = norm.unit_diagonal(dim);
        let raw = (2.0 * diag / radius).ceil();
        if !raw.is_finite() || raw > MAX_CELLS as f64 {
            return Err(invalid(format!(
                "radius {radius} is too small to tessellate"
            )));
        }
        let mut per_axis = (raw as usize).max(1);
        // The ceiling above is computed in floating point; make sure the
        // diameter bound really holds.
        while 2.0 * diag / per_axis as f64 > radius {
            per_axis += 1;
        }
        let grid = CubeGrid::new(dim, per_axis)?;
        Ok(Tessellation {
            grid,
            radius,
            norm,
            side: 1.0 / per_axis as f64,
            expected_occupancy: n as f64 / grid.cell_count() as f64,
        })
    }

    pub fn grid(&self) -> &CubeGrid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.grid.dim
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn norm(&self) -> Norm {
        self.norm
    }

    pub fn cells_per_axis(&self) -> usize {
        self.grid.per_axis
    }

    pub fn side(&self) -> f64 {
        self.side
    }

    /// `K = s^d · n`, the expected number of points per cell.
    pub fn expected_occupancy(&self) -> f64 {
        self.expected_occupancy
    }

    pub fn cell_count(&self) -> usize {
        self.grid.cell_count
    }

    pub fn cells(&self) -> impl ExactSizeIterator<Item = CellId> {
        self.grid.cells()
    }

    pub fn cell_id(&self, coords: &[usize]) -> Result<CellId> {
        self.grid.cell_id(coords)
    }

    pub fn cell_coords(&self, id: CellId) -> Vec<usize> {
        self.grid.cell_coords(id)
    }

    /// The cell containing `point`. A coordinate equal to 1 falls in the
    /// last cell of its axis.
    pub fn cell_of(&self, point: &[f64]) -> Result<CellId> {
        if point.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: point.len(),
            });
        }
        check_in_domain(point)?;
        Ok(self.grid.locate(point))
    }

    /// Two distinct cells are friends when their closed boxes touch, i.e.
    /// their coordinate vectors are at Chebyshev distance 1.
    pub fn are_friends(&self, a: CellId, b: CellId) -> bool {
        self.grid.are_friends(a, b)
    }

    /// All friends of `a`, in ascending id order.
    pub fn friend_cells(&self, a: CellId) -> Vec<CellId> {
        let mut out = Vec::new();
        self.grid.for_each_friend(a, |c| out.push(c));
        out
    }

    pub fn for_each_friend(&self, a: CellId, f: impl FnMut(CellId)) {
        self.grid.for_each_friend(a, f)
    }
}
