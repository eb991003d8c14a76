//! Prescribed curvature profiles `K` and the decay hypothesis they must
//! satisfy.
//!
//! The solvable regime needs `K` strictly positive, even, non-increasing in
//! `|x|`, and decaying at a rate tied to an exponent `δ > 0`:
//!
//! ```text
//! √K(x) + |x · ∂ₓ√K(x)|  ≤  C ⟨x⟩^{-1/2-δ},      ⟨x⟩ = (1+x²)^{1/2}.
//! ```
//!
//! [`check_assumption_a`] measures that bound on a grid. Built-in kinds:
//!
//! * **Gaussian** `K = e^{-x²}` — the harmonic-potential case (the drift
//!   `W = -∂ₓ log √K` equals `x`); satisfies the bound with `(C, δ) = (2, ½)`.
//! * **Power** `K = (1+x²)^{-(1+2δ)/2}` — so that `√K = ⟨x⟩^{-1/2-δ}` is the
//!   borderline decay itself; the sharp constant including the derivative
//!   term is `C = 3/2 + δ`.
//! * **Constant** `K ≡ c` — *violates* the decay hypothesis. Kept because
//!   `K ≡ 1` has a closed-form solution family and serves as the exact
//!   oracle; solvers record the violation in their reports instead of
//!   refusing to run.
//! * **Tabulated** — monotone cubic interpolation of a measured `(x, K)`
//!   table; queries outside the table are errors, not extrapolations.
//!
//! All evaluations go through `|x|`, so `K(-x)` is bit-identical to `K(x)`
//! and odd quantities (`∂ₓ√K`, `∂ₓK`, `∂ₓ log K`) are bit-exactly odd.

use crate::error::{Error, Result};
use crate::grid::{Field, Grid};
use std::io::BufRead;

/// The curvature kinds understood by the solver.
#[derive(Debug, Clone)]
pub enum ProfileKind {
    /// `K(x) = exp(-x²)`.
    Gaussian,
    /// `K(x) = (1+x²)^{-(1+2δ)/2}`, i.e. `√K = ⟨x⟩^{-1/2-δ}`.
    Power { delta: f64 },
    /// `K(x) = c`. No decay; see the module docs.
    Constant { c: f64 },
    /// Monotone cubic interpolant of tabulated values on `x >= 0`.
    Tabulated { table: MonotoneTable },
}

/// A prescribed curvature `K` together with the decay constants `(C, δ)`
/// under which it is known (analytically) to satisfy the hypothesis.
#[derive(Debug, Clone)]
pub struct CurvatureProfile {
    kind: ProfileKind,
    assumed_c: Option<f64>,
    assumed_delta: Option<f64>,
}

impl CurvatureProfile {
    /// Gaussian curvature `K = e^{-x²}`; admissible pair `(C, δ) = (2, ½)`
    /// (the ratio in [`check_assumption_a`] then peaks at `3^{3/2}/(2e) ≈
    /// 0.956` at `x² = 2`, comfortably below 1).
    pub fn gaussian() -> CurvatureProfile {
        CurvatureProfile {
            kind: ProfileKind::Gaussian,
            assumed_c: Some(2.0),
            assumed_delta: Some(0.5),
        }
    }

    /// Power-law curvature with decay exponent `δ > 0`. The sharp constant
    /// is `C = 3/2 + δ`: the ratio `1 + (1/2+δ)x²/(1+x²)` increases to that
    /// supremum as `x → ∞`.
    pub fn power(delta: f64) -> Result<CurvatureProfile> {
        if !(delta.is_finite() && delta > 0.0) {
            return Err(Error::Config(format!("power profile needs δ > 0, got {delta}")));
        }
        Ok(CurvatureProfile {
            kind: ProfileKind::Power { delta },
            assumed_c: Some(1.5 + delta),
            assumed_delta: Some(delta),
        })
    }

    /// Constant curvature `K ≡ c > 0`. Violates the decay hypothesis for
    /// every `(C, δ)`; kept as the exact-solution oracle.
    pub fn constant(c: f64) -> Result<CurvatureProfile> {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::Config(format!("constant profile needs c > 0, got {c}")));
        }
        Ok(CurvatureProfile { kind: ProfileKind::Constant { c }, assumed_c: None, assumed_delta: None })
    }

    /// Tabulated curvature from `(x, K)` knots on `x >= 0` (the even
    /// extension is implicit). Optionally annotate the `(C, δ)` pair the
    /// table is believed to satisfy.
    pub fn tabulated(
        xs: Vec<f64>,
        ks: Vec<f64>,
        assumed: Option<(f64, f64)>,
    ) -> Result<CurvatureProfile> {
        let table = MonotoneTable::new(xs, ks)?;
        Ok(CurvatureProfile {
            kind: ProfileKind::Tabulated { table },
            assumed_c: assumed.map(|(c, _)| c),
            assumed_delta: assumed.map(|(_, d)| d),
        })
    }

    /// Read a two-column `x,K` CSV (optional header, ascending `x` starting
    /// at 0) into a tabulated profile.
    pub fn tabulated_from_csv<R: BufRead>(input: R) -> Result<CurvatureProfile> {
        let mut xs = Vec::new();
        let mut ks = Vec::new();
        for (lineno, line) in input.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let (a, b) = line
                .split_once(',')
                .ok_or_else(|| Error::Csv(format!("line {}: expected two fields", lineno + 1)))?;
            match (a.trim().parse::<f64>(), b.trim().parse::<f64>()) {
                (Ok(x), Ok(k)) => {
                    xs.push(x);
                    ks.push(k);
                }
                _ if lineno == 0 => continue, // header row
                _ => {
                    return Err(Error::Csv(format!("line {}: bad numeric row {:?}", lineno + 1, line)))
                }
            }
        }
        CurvatureProfile::tabulated(xs, ks, None)
    }

    pub fn kind(&self) -> &ProfileKind {
        &self.kind
    }

    /// The `(C, δ)` pair this profile satisfies analytically, when known.
    pub fn assumed_constants(&self) -> Option<(f64, f64)> {
        match (self.assumed_c, self.assumed_delta) {
            (Some(c), Some(d)) => Some((c, d)),
            _ => None,
        }
    }

    /// True when the kind is known *a priori* to violate the decay
    /// hypothesis (constant curvature). Solver reports carry this flag.
    pub fn known_assumption_violation(&self) -> bool {
        matches!(self.kind, ProfileKind::Constant { .. })
    }

    /// Short human-readable description for manifests and logs.
    pub fn describe(&self) -> String {
        match &self.kind {
            ProfileKind::Gaussian => "gaussian".to_string(),
            ProfileKind::Power { delta } => format!("power(delta={delta})"),
            ProfileKind::Constant { c } => format!("constant(c={c})"),
            ProfileKind::Tabulated { table } => {
                format!("tabulated({} knots on [0, {}])", table.xs.len(), table.max_x())
            }
        }
    }

    /// `K(x)`; bit-exactly even. Gaussian tails below `|x| ≈ 38.6` of a
    /// *square*: note `K = e^{-x²}` underflows to 0 for `|x| ≳ 27`, while
    /// `√K` stays representable out to `|x| ≈ 38`; downstream code works in
    /// `√K` and `log K` precisely to keep such tails meaningful.
    pub fn eval_k(&self, x: f64) -> Result<f64> {
        let ax = x.abs();
        match &self.kind {
            ProfileKind::Gaussian => Ok((-ax * ax).exp()),
            ProfileKind::Power { delta } => Ok((1.0 + ax * ax).powf(-(0.5 + delta))),
            ProfileKind::Constant { c } => Ok(*c),
            ProfileKind::Tabulated { table } => table.eval(ax),
        }
    }

    /// `√K(x)`; bit-exactly even.
    pub fn eval_sqrt_k(&self, x: f64) -> Result<f64> {
        let ax = x.abs();
        match &self.kind {
            ProfileKind::Gaussian => Ok((-0.5 * ax * ax).exp()),
            ProfileKind::Power { delta } => Ok((1.0 + ax * ax).powf(-0.5 * (0.5 + delta))),
            ProfileKind::Constant { c } => Ok(c.sqrt()),
            ProfileKind::Tabulated { table } => Ok(table.eval(ax)?.sqrt()),
        }
    }

    /// `∂ₓ√K(x)`; bit-exactly odd.
    pub fn eval_dsqrt_k(&self, x: f64) -> Result<f64> {
        let ax = x.abs();
        let positive_branch = match &self.kind {
            ProfileKind::Gaussian => -ax * (-0.5 * ax * ax).exp(),
            ProfileKind::Power { delta } => {
                -(0.5 + delta) * ax * (1.0 + ax * ax).powf(-0.5 * (0.5 + delta) - 1.0)
            }
            ProfileKind::Constant { .. } => 0.0,
            ProfileKind::Tabulated { table } => {
                let k = table.eval(ax)?;
                table.eval_derivative(ax)? / (2.0 * k.sqrt())
            }
        };
        Ok(odd_extend(x, positive_branch))
    }

    /// `∂ₓK(x) = 2 √K ∂ₓ√K`; bit-exactly odd.
    pub fn eval_dk(&self, x: f64) -> Result<f64> {
        match &self.kind {
            // The interpolant's own derivative is the primary object here;
            // dsqrt is derived from it, not the other way round.
            ProfileKind::Tabulated { table } => Ok(odd_extend(x, table.eval_derivative(x.abs())?)),
            _ => Ok(2.0 * self.eval_sqrt_k(x)? * self.eval_dsqrt_k(x)?),
        }
    }

    /// Logarithmic derivative `∂ₓ log K = K'/K`; bit-exactly odd. Evaluated
    /// from closed forms where possible so it stays finite where `K` itself
    /// underflows (Gaussian far field).
    pub fn eval_dlog_k(&self, x: f64) -> Result<f64> {
        let ax = x.abs();
        let positive_branch = match &self.kind {
            ProfileKind::Gaussian => -2.0 * ax,
            ProfileKind::Power { delta } => -(1.0 + 2.0 * delta) * ax / (1.0 + ax * ax),
            ProfileKind::Constant { .. } => 0.0,
            ProfileKind::Tabulated { table } => table.eval_derivative(ax)? / table.eval(ax)?,
        };
        Ok(odd_extend(x, positive_branch))
    }

    /// `√K` sampled on a grid as an even field.
    pub fn sqrt_k_field(&self, grid: Grid) -> Result<Field> {
        Field::try_sample_even(grid, |x| self.eval_sqrt_k(x))
    }
}

/// Odd extension helper: maps the value on the positive axis to `sign(x) ·
/// value`, with an exact 0 at the origin.
fn odd_extend(x: f64, positive_branch: f64) -> f64 {
    if x > 0.0 {
        positive_branch
    } else if x < 0.0 {
        -positive_branch
    } else {
        0.0
    }
}

/// Outcome of the decay-hypothesis check. `pass` requires the pointwise
/// bound *and* the structural properties (evenness, positivity,
/// monotonicity in `|x|`) to hold on every grid node.
#[derive(Debug, Clone, serde::Serialize)]
pub struct AssumptionReport {
    pub pass: bool,
    /// Max over grid nodes of `(√K + |x ∂ₓ√K|) / (C ⟨x⟩^{-1/2-δ})`.
    pub worst_ratio: f64,
    /// Node where the max is attained.
    pub worst_x: f64,
    pub even_exact: bool,
    /// No sampled node is negative or NaN, and any exact zeros form an
    /// outward-closed tail — a fast profile is allowed to decay below the
    /// smallest positive double, but an interior hole is a real violation.
    pub all_positive: bool,
    pub monotone: bool,
}

/// Measure the decay bound `√K + |x ∂ₓ√K| ≤ C ⟨x⟩^{-1/2-δ}` on all nodes of
/// `grid`, along with evenness (bit-exact), positivity, and monotonicity in
/// `|x|`. Failures are reported, not thrown; the only errors are evaluation
/// errors (tabulated profile narrower than the grid).
pub fn check_assumption_a(
    profile: &CurvatureProfile,
    grid: Grid,
    c: f64,
    delta: f64,
) -> Result<AssumptionReport> {
    if !(c > 0.0 && delta > 0.0) {
        return Err(Error::Config(format!(
            "decay constants must be positive, got C = {c}, δ = {delta}"
        )));
    }
    let mut worst_ratio = f64::NEG_INFINITY;
    let mut worst_x = 0.0;
    let mut all_positive = true;
    let mut monotone = true;
    let mut even_exact = true;
    let mut prev_k = f64::INFINITY;
    let mut underflowed = false;
    for j in 0..=grid.m() as i64 {
        let x = grid.signed_node(j);
        let k = profile.eval_k(x)?;
        if k < 0.0 || k.is_nan() || (j == 0 && k == 0.0) {
            all_positive = false;
        } else if k == 0.0 {
            underflowed = true;
        } else if underflowed {
            // A positive sample beyond an exact zero is a hole in the
            // profile, not underflow of a decaying one.
            all_positive = false;
        }
        // Non-increasing in |x|, with a few ulps of slack for libm noise.
        if k > prev_k * (1.0 + 4.0 * f64::EPSILON) {
            monotone = false;
        }
        prev_k = k;
        if profile.eval_k(-x)?.to_bits() != k.to_bits() {
            even_exact = false;
        }
        let numer = profile.eval_sqrt_k(x)? + (x * profile.eval_dsqrt_k(x)?).abs();
        let denom = c * (1.0 + x * x).powf(-0.5 * (0.5 + delta));
        let ratio = numer / denom;
        if ratio > worst_ratio {
            worst_ratio = ratio;
            worst_x = x;
        }
    }
    Ok(AssumptionReport {
        pass: worst_ratio <= 1.0 && even_exact && all_positive && monotone,
        worst_ratio,
        worst_x,
        even_exact,
        all_positive,
        monotone,
    })
}

// --- monotone cubic table ----------------------------------------------------

/// Shape-preserving cubic Hermite interpolant (Fritsch–Carlson tangents) of
/// a positive, non-increasing table on `x >= 0`.
///
/// The tangent at `x = 0` is pinned to zero: the table represents the
/// positive half of an even `C¹` function, whose derivative must vanish at
/// the origin. Zero is always an admissible monotone tangent, so the
/// shape-preserving property is unaffected.
#[derive(Debug, Clone)]
pub struct MonotoneTable {
    xs: Vec<f64>,
    ys: Vec<f64>,
    /// Hermite tangents at the knots.
    slopes: Vec<f64>,
}

impl MonotoneTable {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<MonotoneTable> {
        if xs.len() != ys.len() {
            return Err(Error::BadTable(format!(
                "{} abscissae vs {} values",
                xs.len(),
                ys.len()
            )));
        }
        if xs.len() < 3 {
            return Err(Error::BadTable("need at least 3 knots".into()));
        }
        if xs[0] != 0.0 {
            return Err(Error::BadTable(format!(
                "table must start at x = 0 (even extension), got {}",
                xs[0]
            )));
        }
        for w in xs.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::BadTable(format!(
                    "abscissae must be strictly increasing, got {} after {}",
                    w[1], w[0]
                )));
            }
        }
        for (i, &y) in ys.iter().enumerate() {
            if !(y.is_finite() && y > 0.0) {
                return Err(Error::BadTable(format!("K must be positive, got {} at x = {}", y, xs[i])));
            }
        }
        for w in ys.windows(2) {
            if w[1] > w[0] {
                return Err(Error::BadTable(format!(
                    "K must be non-increasing, got {} after {}",
                    w[1], w[0]
                )));
            }
        }
        let slopes = fritsch_carlson_slopes(&xs, &ys);
        Ok(MonotoneTable { xs, ys, slopes })
    }

    pub fn max_x(&self) -> f64 {
        *self.xs.last().expect("table has knots")
    }

    fn segment(&self, x: f64) -> Result<usize> {
        if !(0.0..=self.max_x()).contains(&x) {
            return Err(Error::OutsideTable { x, max_x: self.max_x() });
        }
        // partition_point: first knot strictly greater than x, minus one.
        let idx = self.xs.partition_point(|&knot| knot <= x);
        Ok(idx.saturating_sub(1).min(self.xs.len() - 2))
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        let i = self.segment(x)?;
        let h = self.xs[i + 1] - self.xs[i];
        let t = (x - self.xs[i]) / h;
        let (y0, y1) = (self.ys[i], self.ys[i + 1]);
        let (m0, m1) = (self.slopes[i], self.slopes[i + 1]);
        let t2 = t * t;
        let t3 = t2 * t;
        Ok((2.0 * t3 - 3.0 * t2 + 1.0) * y0
            + (t3 - 2.0 * t2 + t) * h * m0
            + (-2.0 * t3 + 3.0 * t2) * y1
            + (t3 - t2) * h * m1)
    }

    pub fn eval_derivative(&self, x: f64) -> Result<f64> {
        let i = self.segment(x)?;
        let h = self.xs[i + 1] - self.xs[i];
        let t = (x - self.xs[i]) / h;
        let (y0, y1) = (self.ys[i], self.ys[i + 1]);
        let (m0, m1) = (self.slopes[i], self.slopes[i + 1]);
        let t2 = t * t;
        Ok((6.0 * t2 - 6.0 * t) * (y0 - y1) / h
            + (3.0 * t2 - 4.0 * t + 1.0) * m0
            + (3.0 * t2 - 2.0 * t) * m1)
    }
}

/// Fritsch–Carlson monotone tangents, with the left endpoint pinned to 0
/// (see [`MonotoneTable`]) and the usual shape-limited one-sided rule on the
/// right.
fn fritsch_carlson_slopes(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    let n = xs.len();
    let hs: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
    let secants: Vec<f64> = ys
        .windows(2)
        .zip(&hs)
        .map(|(w, &h)| (w[1] - w[0]) / h)
        .collect();
    let mut m = vec![0.0; n];
    for i in 1..n - 1 {
        let (d0, d1) = (secants[i - 1], secants[i]);
        if d0 * d1 <= 0.0 {
            m[i] = 0.0;
        } else {
            // Weighted harmonic mean; never exceeds 3·min(|d0|, |d1|).
            let w1 = 2.0 * hs[i] + hs[i - 1];
            let w2 = hs[i] + 2.0 * hs[i - 1];
            m[i] = (w1 + w2) / (w1 / d0 + w2 / d1);
        }
    }
    m[0] = 0.0; // even extension: zero slope at the origin
    m[n - 1] = shape_limited_endpoint(hs[n - 2], hs[n - 3], secants[n - 2], secants[n - 3]);
    m
}

fn shape_limited_endpoint(h_last: f64, h_prev: f64, d_last: f64, d_prev: f64) -> f64 {
    let m = ((2.0 * h_last + h_prev) * d_last - h_last * d_prev) / (h_last + h_prev);
    if m * d_last <= 0.0 {
        0.0
    } else if d_last * d_prev <= 0.0 && m.abs() > 3.0 * d_last.abs() {
        3.0 * d_last
    } else {
        m
    }
}
