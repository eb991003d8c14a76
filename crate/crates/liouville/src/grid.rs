//! Symmetric uniform grid on `[-L, L]` and parity-tagged sample fields.
//!
//! Every quantity in this crate lives on a [`Grid`] with nodes `x_j = j*h`,
//! `j = -M..=M`, `h = L/M`. The node at `x = 0` always exists (initial values
//! `v(0)`, `w(0)` live there) and nodes come in exact `±` pairs: `x_{-j}` is
//! the IEEE negation of `x_j`, so evenness and oddness can be demanded
//! bit-for-bit rather than up to rounding.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};
use std::io::{BufRead, Write};

/// Uniform symmetric grid: nodes `x_j = j*h` for `j = -M..=M` with `h = L/M`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridRepr", into = "GridRepr")]
pub struct Grid {
    l: f64,
    m: usize,
    h: f64,
}

impl Grid {
    /// Half-width `L > 0` and half-node-count `M >= 1`; `2M+1` nodes total.
    pub fn new(l: f64, m: usize) -> Result<Grid> {
        if !(l.is_finite() && l > 0.0) {
            return Err(Error::Config(format!("grid half-width L must be positive, got {l}")));
        }
        if m < 1 {
            return Err(Error::Config("grid needs M >= 1".into()));
        }
        Ok(Grid { l, m, h: l / m as f64 })
    }

    /// Half-width `L`.
    pub fn half_width(&self) -> f64 {
        self.l
    }

    /// Half node count `M`.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Mesh size `h = L/M`.
    pub fn h(&self) -> f64 {
        self.h
    }

    /// Total node count `N = 2M+1`.
    pub fn len(&self) -> usize {
        2 * self.m + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Index of the center node `x = 0`.
    pub fn center(&self) -> usize {
        self.m
    }

    /// Node coordinate by vector index `i = 0..N`.
    ///
    /// Computed as `(i - M) * h`, never as `-L + i*h`: the former makes
    /// `x_{-j}` the exact negation of `x_j`.
    pub fn node(&self, i: usize) -> f64 {
        (i as i64 - self.m as i64) as f64 * self.h
    }

    /// Node coordinate by signed index `j = -M..=M`.
    pub fn signed_node(&self, j: i64) -> f64 {
        j as f64 * self.h
    }

    /// All node coordinates in index order.
    pub fn nodes(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.node(i)).collect()
    }

    /// Stable hash of the grid parameters, for run manifests.
    pub fn grid_hash(&self) -> String {
        let mut hasher = DefaultHasher::new();
        self.l.to_bits().hash(&mut hasher);
        self.m.hash(&mut hasher);
        format!("{:016x}", hasher.finish())
    }
}

/// Declared symmetry of a field under `x -> -x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    /// `f(-x) = f(x)`, bit-exact on the sample vector.
    Even,
    /// `f(-x) = -f(x)` and `f(0) = 0`, bit-exact.
    Odd,
    /// No symmetry declared.
    None,
}

impl Parity {
    /// Parity of a pointwise product of two tagged fields.
    pub fn product(self, other: Parity) -> Parity {
        match (self, other) {
            (Parity::Even, Parity::Even) | (Parity::Odd, Parity::Odd) => Parity::Even,
            (Parity::Even, Parity::Odd) | (Parity::Odd, Parity::Even) => Parity::Odd,
            _ => Parity::None,
        }
    }

    /// Parity of a sum of two tagged fields.
    pub fn sum(self, other: Parity) -> Parity {
        if self == other {
            self
        } else {
            Parity::None
        }
    }

    /// The opposite symmetry class (transforms with odd kernels flip parity).
    pub fn flipped(self) -> Parity {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
            Parity::None => Parity::None,
        }
    }
}

/// Real samples on a [`Grid`] with a declared [`Parity`].
///
/// The parity tag is an invariant, not a hint: constructors and transforms
/// produce sample vectors that satisfy it bit-exactly (mirroring the `j >= 0`
/// half), and [`Field::from_values`] rejects vectors that do not.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FieldRepr", into = "FieldRepr")]
pub struct Field {
    grid: Grid,
    parity: Parity,
    values: Vec<f64>,
}

impl Field {
    /// Zero field with the given parity.
    pub fn zeros(grid: Grid, parity: Parity) -> Field {
        Field { grid, parity, values: vec![0.0; grid.len()] }
    }

    /// Sample an even function: `f` is evaluated on `x_j`, `j >= 0`, and
    /// mirrored, so evenness holds bit-exactly regardless of `f`.
    pub fn sample_even(grid: Grid, f: impl Fn(f64) -> f64) -> Field {
        let c = grid.center();
        let mut values = vec![0.0; grid.len()];
        for j in 0..=grid.m() {
            let y = f(grid.signed_node(j as i64));
            values[c + j] = y;
            values[c - j] = y;
        }
        Field { grid, parity: Parity::Even, values }
    }

    /// Sample an odd function (center forced to exactly 0, negated mirror).
    pub fn sample_odd(grid: Grid, f: impl Fn(f64) -> f64) -> Field {
        let c = grid.center();
        let mut values = vec![0.0; grid.len()];
        for j in 1..=grid.m() {
            let y = f(grid.signed_node(j as i64));
            values[c + j] = y;
            values[c - j] = -y;
        }
        Field { grid, parity: Parity::Odd, values }
    }

    /// Sample an arbitrary function; parity `None`.
    pub fn sample(grid: Grid, f: impl Fn(f64) -> f64) -> Field {
        let values = (0..grid.len()).map(|i| f(grid.node(i))).collect();
        Field { grid, parity: Parity::None, values }
    }

    /// Like [`Field::sample_even`] for evaluations that can fail (e.g.
    /// tabulated profiles queried outside their table).
    pub fn try_sample_even(
        grid: Grid,
        f: impl Fn(f64) -> Result<f64>,
    ) -> Result<Field> {
        let c = grid.center();
        let mut values = vec![0.0; grid.len()];
        for j in 0..=grid.m() {
            let y = f(grid.signed_node(j as i64))?;
            values[c + j] = y;
            values[c - j] = y;
        }
        Field::from_values(grid, Parity::Even, values)
    }

    /// Wrap an existing sample vector, validating length, finiteness and the
    /// declared parity (bit-exact).
    pub fn from_values(grid: Grid, parity: Parity, values: Vec<f64>) -> Result<Field> {
        if values.len() != grid.len() {
            return Err(Error::InvalidField(format!(
                "expected {} samples for M = {}, got {}",
                grid.len(),
                grid.m(),
                values.len()
            )));
        }
        if let Some(bad) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidField(format!(
                "non-finite sample {} at x = {}",
                values[bad],
                grid.node(bad)
            )));
        }
        let field = Field { grid, parity, values };
        field.check_parity()?;
        Ok(field)
    }

    fn check_parity(&self) -> Result<()> {
        let c = self.grid.center();
        match self.parity {
            Parity::Even => {
                for j in 1..=self.grid.m() {
                    if self.values[c + j].to_bits() != self.values[c - j].to_bits() {
                        return Err(Error::InvalidField(format!(
                            "declared even but values[{}] != values[{}]",
                            c + j,
                            c - j
                        )));
                    }
                }
            }
            Parity::Odd => {
                if self.values[c] != 0.0 {
                    return Err(Error::InvalidField("declared odd but f(0) != 0".into()));
                }
                for j in 1..=self.grid.m() {
                    if self.values[c + j].to_bits() != (-self.values[c - j]).to_bits() {
                        return Err(Error::InvalidField(format!(
                            "declared odd but values[{}] != -values[{}]",
                            c + j,
                            c - j
                        )));
                    }
                }
            }
            Parity::None => {}
        }
        Ok(())
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    /// Sample at signed node index `j` (`j = -M..=M`).
    pub fn at(&self, j: i64) -> f64 {
        self.values[(self.grid.center() as i64 + j) as usize]
    }

    /// Value at `x = 0`.
    pub fn center_value(&self) -> f64 {
        self.values[self.grid.center()]
    }

    /// Overwrite the `j < 0` half (and, for odd parity, the center) from the
    /// `j > 0` half so the declared parity holds bit-exactly. Used by
    /// transforms whose output parity is known analytically.
    pub(crate) fn enforce_parity(&mut self, parity: Parity) {
        let c = self.grid.center();
        match parity {
            Parity::Even => {
                for j in 1..=self.grid.m() {
                    self.values[c - j] = self.values[c + j];
                }
            }
            Parity::Odd => {
                self.values[c] = 0.0;
                for j in 1..=self.grid.m() {
                    self.values[c - j] = -self.values[c + j];
                }
            }
            Parity::None => {}
        }
        self.parity = parity;
    }

    /// Pointwise square; squares of even *or* odd fields are even.
    pub fn squared(&self) -> Field {
        let parity = self.parity.product(self.parity);
        let values = self.values.iter().map(|v| v * v).collect();
        Field { grid: self.grid, parity, values }
    }

    /// `ca*a + cb*b` with the induced parity tag.
    pub fn linear_combination(ca: f64, a: &Field, cb: f64, b: &Field) -> Result<Field> {
        check_same_grid(a, b)?;
        let values = a
            .values
            .iter()
            .zip(&b.values)
            .map(|(x, y)| ca * x + cb * y)
            .collect();
        Ok(Field { grid: a.grid, parity: a.parity.sum(b.parity), values })
    }

    /// Pointwise product with the induced parity tag.
    pub fn pointwise_mul(a: &Field, b: &Field) -> Result<Field> {
        check_same_grid(a, b)?;
        let values = a.values.iter().zip(&b.values).map(|(x, y)| x * y).collect();
        Ok(Field { grid: a.grid, parity: a.parity.product(b.parity), values })
    }

    /// Reflection `f(-x)` (reverses the sample vector).
    pub fn reflected(&self) -> Field {
        let mut values = self.values.clone();
        values.reverse();
        Field { grid: self.grid, parity: self.parity, values }
    }

    /// Write the `x,value` CSV representation (plotting format).
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "x,value")?;
        for i in 0..self.grid.len() {
            // `{}` on f64 is shortest-round-trip, so the text parses back to
            // the same bits even though CSV is not the archival format.
            writeln!(out, "{},{}", self.grid.node(i), self.values[i])?;
        }
        Ok(())
    }

    /// Read a field from the `x,value` CSV format, reconstructing the grid
    /// from the node column and detecting parity from the samples.
    pub fn read_csv<R: BufRead>(input: R) -> Result<Field> {
        let mut xs = Vec::new();
        let mut vals = Vec::new();
        for (lineno, line) in input.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || (lineno == 0 && line.starts_with('x')) {
                continue;
            }
            let (xs_str, v_str) = line
                .split_once(',')
                .ok_or_else(|| Error::Csv(format!("line {}: expected two fields", lineno + 1)))?;
            let x: f64 = xs_str
                .trim()
                .parse()
                .map_err(|_| Error::Csv(format!("line {}: bad x value {:?}", lineno + 1, xs_str)))?;
            let v: f64 = v_str
                .trim()
                .parse()
                .map_err(|_| Error::Csv(format!("line {}: bad value {:?}", lineno + 1, v_str)))?;
            xs.push(x);
            vals.push(v);
        }
        let n = xs.len();
        if n < 3 || n % 2 == 0 {
            return Err(Error::Csv(format!("expected an odd number (2M+1) of rows >= 3, got {n}")));
        }
        let m = (n - 1) / 2;
        let l = -xs[0];
        let grid = Grid::new(l, m).map_err(|e| Error::Csv(format!("bad node column: {e}")))?;
        for (i, &x) in xs.iter().enumerate() {
            let expect = grid.node(i);
            if (x - expect).abs() > 1e-9 * (1.0 + expect.abs()) {
                return Err(Error::Csv(format!(
                    "row {i}: node {x} does not match uniform grid node {expect}"
                )));
            }
        }
        let parity = detect_parity(&vals, m);
        Field::from_values(grid, parity, vals)
    }
}

fn detect_parity(values: &[f64], m: usize) -> Parity {
    let c = m;
    let even = (1..=m).all(|j| values[c + j].to_bits() == values[c - j].to_bits());
    if even {
        return Parity::Even;
    }
    let odd = values[c] == 0.0
        && (1..=m).all(|j| values[c + j].to_bits() == (-values[c - j]).to_bits());
    if odd {
        return Parity::Odd;
    }
    Parity::None
}

pub(crate) fn check_same_grid(a: &Field, b: &Field) -> Result<()> {
    if a.grid != b.grid {
        return Err(Error::GridMismatch {
            l_a: a.grid.half_width(),
            m_a: a.grid.m(),
            l_b: b.grid.half_width(),
            m_b: b.grid.m(),
        });
    }
    Ok(())
}

// --- serde envelope -------------------------------------------------------
//
// JSON layout: {"grid": {"L": .., "M": ..}, "parity": "...", "values": [..]}.
// serde_json emits shortest-round-trip decimals, so serialize/deserialize is
// bit-exact for finite values (and fields are finite by invariant).

#[derive(Serialize, Deserialize)]
struct GridRepr {
    #[serde(rename = "L")]
    l: f64,
    #[serde(rename = "M")]
    m: usize,
}

impl TryFrom<GridRepr> for Grid {
    type Error = Error;

    fn try_from(repr: GridRepr) -> Result<Grid> {
        Grid::new(repr.l, repr.m)
    }
}

impl From<Grid> for GridRepr {
    fn from(g: Grid) -> GridRepr {
        GridRepr { l: g.half_width(), m: g.m() }
    }
}

#[derive(Serialize, Deserialize)]
struct FieldRepr {
    grid: Grid,
    parity: Parity,
    values: Vec<f64>,
}

impl TryFrom<FieldRepr> for Field {
    type Error = Error;

    fn try_from(repr: FieldRepr) -> Result<Field> {
        Field::from_values(repr.grid, repr.parity, repr.values)
    }
}

impl From<Field> for FieldRepr {
    fn from(f: Field) -> FieldRepr {
        FieldRepr { grid: f.grid, parity: f.parity, values: f.values }
    }
}
