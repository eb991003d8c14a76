//! Fixed-point solvers for the soliton profile `v`.
//!
//! The equation `(-Δ)^{1/2} w = K e^w` with finite total curvature is
//! equivalent, through the density root `v = √(K e^w)`, to the fixed-point
//! problem
//!
//! ```text
//! v = T_λ(v),       T_λ(u)(x) = λ √K(x) · exp( -½ ∫_0^x H(u²)(y) dy ),
//! ```
//!
//! where `λ = v(0)/√K(0) = e^{w(0)/2}` parameterizes the solution branch.
//! [`solve_picard`] iterates the map directly (optionally damped); it
//! contracts for small `λ` and remains the workhorse everywhere we have
//! tested. [`solve_newton`] solves the same root problem with the analytic
//! Jacobian from the linearization module and converges quadratically near
//! a solution — useful for polishing and for stiff spots on a branch.
//!
//! Everything here preserves structure by construction: iterates are even,
//! strictly positive, dominated by the envelope `λ√K`, and symmetric-
//! decreasing, because the map itself enforces those properties.

use crate::error::{Error, Result};
use crate::grid::{Field, Grid, Parity};
use crate::linearization;
use crate::model::CurvatureProfile;
use crate::transforms::{cumulative_integral, hilbert, integrate, l2_norm, x_norm};
use faer::prelude::SpSolver;
use serde::{Deserialize, Serialize};

/// Exponent magnitude beyond which the map is declared to have blown up
/// (comfortably inside f64 range; legitimate dynamics stay far below it).
pub const EXPONENT_LIMIT: f64 = 700.0;

/// Options for [`solve_picard`].
#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    /// Damping `θ ∈ (0, 1]` of the update `u ← (1-θ)u + θT(u)`.
    /// `None` picks `1` for `λ ≤ 1` and `0.5` above, where the undamped
    /// map is no longer a contraction empirically.
    pub theta: Option<f64>,
    /// Convergence tolerance on the `L²` residual `‖T(u) - u‖₂`.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolveOptions {
    fn default() -> SolveOptions {
        SolveOptions { theta: None, tol: 1e-10, max_iter: 500 }
    }
}

/// Options for [`solve_newton`].
#[derive(Debug, Clone, Copy)]
pub struct NewtonOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Directional lower bound on the Jacobian's smallest singular value;
    /// a Newton step implying a smaller one aborts with a diagnostic.
    pub margin_floor: f64,
}

impl Default for NewtonOptions {
    fn default() -> NewtonOptions {
        NewtonOptions { tol: 1e-10, max_iter: 25, margin_floor: 1e-6 }
    }
}

/// Outcome of a solve: the profile, the branch coordinates, and the
/// iteration record.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveReport {
    /// The computed soliton profile (even).
    pub v: Field,
    pub lambda: f64,
    /// `v(0)`; equals `λ√K(0)` to round-off for converged solves.
    pub v0: f64,
    /// `w(0) = log(v0²/K(0)) = 2 log λ`.
    pub w0: f64,
    /// Total curvature `Λ = ∫ v² dx`; lies in `(0, 2π)` for admissible
    /// profiles (approaches `2π` from below only in the constant-K
    /// boundary case).
    pub total_curvature: f64,
    pub iterations: usize,
    /// `‖T(v) - v‖₂` at the reported `v`.
    pub residual_l2: f64,
    /// The same residual in the solution-space norm.
    pub residual_x: f64,
    pub converged: bool,
    /// Geometric mean of successive residual ratios; `< 1` indicates the
    /// map contracted along this run. Absent when fewer than two residuals
    /// were observed.
    pub contraction_estimate: Option<f64>,
    /// True when the profile kind is known to violate the decay hypothesis
    /// (constant curvature); such solves are oracle/boundary cases.
    pub assumption_a_violated: bool,
}

/// The exponent field `h_u(x) = -∫_0^x H(u²)(y) dy`, so that
/// `T_λ(u) = λ√K · e^{h_u/2}`. For a solution, `w(x) = w(0) + h_v(x)`;
/// for symmetric-decreasing `u` it is nonpositive on the whole line.
pub fn h_function(u: &Field) -> Result<Field> {
    if u.parity() != Parity::Even {
        return Err(Error::InvalidField("h-function needs an even field".into()));
    }
    let mut integral = cumulative_integral(&hilbert(&u.squared())?);
    for val in integral.values_mut() {
        *val = -*val;
    }
    Ok(integral)
}

/// One application of the fixed-point map `T_λ`.
///
/// Output is even, strictly positive, and bounded by the envelope `λ√K`
/// whenever `u` is symmetric-decreasing. An exponent beyond
/// [`EXPONENT_LIMIT`] in magnitude aborts: the input is far outside the
/// regime where the map means anything.
pub fn fixed_point_map(u: &Field, lambda: f64, profile: &CurvatureProfile) -> Result<Field> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::Config(format!("lambda must be positive, got {lambda}")));
    }
    let grid = u.grid();
    let h = h_function(u)?;
    let sqrt_k = profile.sqrt_k_field(grid)?;
    let mut values = vec![0.0; grid.len()];
    for (i, slot) in values.iter_mut().enumerate() {
        let exponent = 0.5 * h.values()[i];
        if exponent.abs() > EXPONENT_LIMIT {
            return Err(Error::ExponentOverflow {
                exponent,
                x: grid.node(i),
                limit: EXPONENT_LIMIT,
            });
        }
        *slot = lambda * sqrt_k.values()[i] * exponent.exp();
    }
    Field::from_values(grid, Parity::Even, values)
}

/// Residual field `F(u, λ) = T_λ(u) - u`, the quantity driven to zero by
/// both solvers. Report its size in `L²` via [`l2_norm`] and in the
/// solution-space norm via [`x_norm`].
pub fn residual(u: &Field, lambda: f64, profile: &CurvatureProfile) -> Result<Field> {
    let t = fixed_point_map(u, lambda, profile)?;
    Field::linear_combination(1.0, &t, -1.0, u)
}

/// `w = log(v²/K)`, evaluated as `2(log v - log √K)` so that Gaussian-tail
/// magnitudes where `v²` and `K` both underflow still come out right.
pub fn w_from_v(v: &Field, profile: &CurvatureProfile) -> Result<Field> {
    let grid = v.grid();
    let sqrt_k = profile.sqrt_k_field(grid)?;
    let mut values = vec![0.0; grid.len()];
    for (i, slot) in values.iter_mut().enumerate() {
        let vi = v.values()[i];
        if !(vi > 0.0) {
            return Err(Error::Domain { what: "w_from_v needs v > 0", x: grid.node(i), value: vi });
        }
        *slot = 2.0 * (vi.ln() - sqrt_k.values()[i].ln());
    }
    let parity = if v.parity() == Parity::Even { Parity::Even } else { Parity::None };
    Field::from_values(grid, parity, values)
}

/// `v = √(K e^w) = √K · e^{w/2}` (the factored form never underflows where
/// the result is representable).
pub fn v_from_w(w: &Field, profile: &CurvatureProfile) -> Result<Field> {
    let grid = w.grid();
    let sqrt_k = profile.sqrt_k_field(grid)?;
    let mut values = vec![0.0; grid.len()];
    for (i, slot) in values.iter_mut().enumerate() {
        let exponent = 0.5 * w.values()[i];
        if exponent > EXPONENT_LIMIT {
            return Err(Error::ExponentOverflow {
                exponent,
                x: grid.node(i),
                limit: EXPONENT_LIMIT,
            });
        }
        *slot = sqrt_k.values()[i] * exponent.exp();
    }
    let parity = if w.parity() == Parity::Even { Parity::Even } else { Parity::None };
    Field::from_values(grid, parity, values)
}

/// The branch parameter from the initial value: `λ = e^{w(0)/2}`.
/// (`λ = v(0)/√K(0) = √(K(0)e^{w0})/√K(0)`; the curvature cancels.)
pub fn lambda_from_w0(w0: f64) -> f64 {
    (0.5 * w0).exp()
}

/// Total curvature `Λ = ∫ v² dx = ∫ K e^w dx`.
pub fn total_curvature(v: &Field) -> f64 {
    integrate(&v.squared())
}

/// The natural starting envelope `λ√K = T_λ(0)`, also the pointwise upper
/// bound every iterate stays below.
pub fn default_init(lambda: f64, profile: &CurvatureProfile, grid: Grid) -> Result<Field> {
    let mut f = profile.sqrt_k_field(grid)?;
    for val in f.values_mut() {
        *val *= lambda;
    }
    Ok(f)
}

fn validate_init(init: &Field, grid: Grid) -> Result<()> {
    if init.grid() != grid {
        return Err(Error::GridMismatch {
            l_a: init.grid().half_width(),
            m_a: init.grid().m(),
            l_b: grid.half_width(),
            m_b: grid.m(),
        });
    }
    if init.parity() != Parity::Even {
        return Err(Error::InvalidField("initial guess must be even".into()));
    }
    if let Some(bad) = init.values().iter().position(|&x| x < 0.0) {
        return Err(Error::InvalidField(format!(
            "initial guess must be nonnegative, got {} at x = {}",
            init.values()[bad],
            grid.node(bad)
        )));
    }
    Ok(())
}

fn contraction_estimate(history: &[f64]) -> Option<f64> {
    if history.len() < 2 || history[0] == 0.0 {
        return None;
    }
    let n = history.len();
    Some((history[n - 1] / history[0]).powf(1.0 / (n - 1) as f64))
}

#[allow(clippy::too_many_arguments)] // private constructor, call sites are adjacent
fn build_report(
    v: Field,
    lambda: f64,
    profile: &CurvatureProfile,
    iterations: usize,
    residual_l2: f64,
    residual_x: f64,
    converged: bool,
    history: &[f64],
) -> Result<SolveReport> {
    let v0 = v.center_value();
    let sqrt_k0 = profile.eval_sqrt_k(0.0)?;
    let w0 = 2.0 * (v0.ln() - sqrt_k0.ln());
    let total = total_curvature(&v);
    Ok(SolveReport {
        lambda,
        v0,
        w0,
        total_curvature: total,
        iterations,
        residual_l2,
        residual_x,
        converged,
        contraction_estimate: contraction_estimate(history),
        assumption_a_violated: profile.known_assumption_violation(),
        v,
    })
}

/// Damped Picard iteration `u ← (1-θ)u + θ T_λ(u)`.
///
/// Starts from `λ√K` (= `T_λ(0)`, the natural envelope) unless `init` is
/// given. On success the reported `v` is itself a `T`-image, so `v(0) =
/// λ√K(0)` holds exactly and the structural bounds are inherited from the
/// map. Non-convergence within `max_iter` is reported, not thrown; blowup
/// (NaN residual or exponent overflow) is an error.
pub fn solve_picard(
    lambda: f64,
    profile: &CurvatureProfile,
    grid: Grid,
    init: Option<&Field>,
    opts: SolveOptions,
) -> Result<SolveReport> {
    let theta = match opts.theta {
        Some(t) if !(0.0..=1.0).contains(&t) || t == 0.0 => {
            return Err(Error::Config(format!("damping must lie in (0, 1], got {t}")));
        }
        Some(t) => t,
        None => {
            if lambda <= 1.0 {
                1.0
            } else {
                0.5
            }
        }
    };
    if !(opts.tol > 0.0) || opts.max_iter == 0 {
        return Err(Error::Config("tolerance must be positive and max_iter nonzero".into()));
    }
    let mut u = match init {
        Some(f) => {
            validate_init(f, grid)?;
            f.clone()
        }
        None => default_init(lambda, profile, grid)?,
    };
    let mut history = Vec::new();
    let mut iter = 0;
    while iter < opts.max_iter {
        iter += 1;
        let t = fixed_point_map(&u, lambda, profile)?;
        let diff = Field::linear_combination(1.0, &t, -1.0, &u)?;
        let r = l2_norm(&diff);
        if !r.is_finite() {
            return Err(Error::Diverged(format!("residual became {r} at iteration {iter}")));
        }
        history.push(r);
        if r <= opts.tol {
            // Accept the T-image (exact v0, structural bounds), but make
            // sure the residual *at the accepted point* meets the tolerance.
            let t2 = fixed_point_map(&t, lambda, profile)?;
            let diff2 = Field::linear_combination(1.0, &t2, -1.0, &t)?;
            let r2 = l2_norm(&diff2);
            if r2 <= opts.tol {
                let rx = x_norm(&diff2)?;
                return build_report(t, lambda, profile, iter, r2, rx, true, &history);
            }
            u = t;
            continue;
        }
        u = Field::linear_combination(1.0 - theta, &u, theta, &t)?;
    }
    let diff = residual(&u, lambda, profile)?;
    let r = l2_norm(&diff);
    let rx = x_norm(&diff)?;
    build_report(u, lambda, profile, opts.max_iter, r, rx, false, &history)
}

/// Newton's method on `F(u) = T_λ(u) - u`, using the analytic Jacobian
/// `∂F = -T(u)·∫_0^x H(u·)  - 𝟙` assembled by the linearization module
/// (at a fixed point the integral part is exactly the linearized operator).
///
/// Quadratic near a solution; each step solves one dense system on the
/// even subspace. A step that implies a directional singular value below
/// `margin_floor` aborts with [`Error::NearSingular`].
pub fn solve_newton(
    lambda: f64,
    profile: &CurvatureProfile,
    grid: Grid,
    init: Option<&Field>,
    opts: NewtonOptions,
) -> Result<SolveReport> {
    if !(opts.tol > 0.0) || opts.max_iter == 0 {
        return Err(Error::Config("tolerance must be positive and max_iter nonzero".into()));
    }
    let mut u = match init {
        Some(f) => {
            validate_init(f, grid)?;
            f.clone()
        }
        None => default_init(lambda, profile, grid)?,
    };
    let m = grid.m();
    let c = grid.center();
    let mut history = Vec::new();
    let mut iter = 0;
    while iter < opts.max_iter {
        iter += 1;
        let t = fixed_point_map(&u, lambda, profile)?;
        let diff = Field::linear_combination(1.0, &t, -1.0, &u)?;
        let r = l2_norm(&diff);
        if !r.is_finite() {
            return Err(Error::Diverged(format!("residual became {r} at iteration {iter}")));
        }
        history.push(r);
        if r <= opts.tol {
            let t2 = fixed_point_map(&t, lambda, profile)?;
            let diff2 = Field::linear_combination(1.0, &t2, -1.0, &t)?;
            let r2 = l2_norm(&diff2);
            if r2 <= opts.tol {
                let rx = x_norm(&diff2)?;
                return build_report(t, lambda, profile, iter, r2, rx, true, &history);
            }
            u = t;
            continue;
        }
        // (J - 1)δ = -F on the even half-grid.
        let mut jac = linearization::jacobian_matrix(&u, &t)?;
        for i in 0..=m {
            jac[(i, i)] -= 1.0;
        }
        let rhs = faer::Mat::from_fn(m + 1, 1, |s, _| -diff.values()[c + s]);
        let delta = jac.partial_piv_lu().solve(&rhs);
        let rhs_norm = (0..=m).map(|s| rhs[(s, 0)] * rhs[(s, 0)]).sum::<f64>().sqrt();
        let delta_norm = (0..=m).map(|s| delta[(s, 0)] * delta[(s, 0)]).sum::<f64>().sqrt();
        if !delta_norm.is_finite() {
            return Err(Error::Diverged(format!("Newton step became {delta_norm}")));
        }
        if delta_norm > 0.0 {
            // ‖δ‖ ≤ ‖J⁻¹‖·‖F‖, so this ratio bounds a singular value of J
            // from above along the step direction.
            let directional_margin = rhs_norm / delta_norm;
            if directional_margin < opts.margin_floor {
                return Err(Error::NearSingular {
                    margin: directional_margin,
                    floor: opts.margin_floor,
                });
            }
        }
        let mut values = vec![0.0; grid.len()];
        for s in 0..=m {
            let updated = u.values()[c + s] + delta[(s, 0)];
            values[c + s] = updated;
            values[c - s] = updated;
        }
        u = Field::from_values(grid, Parity::Even, values)?;
    }
    let diff = residual(&u, lambda, profile)?;
    let r = l2_norm(&diff);
    let rx = x_norm(&diff)?;
    build_report(u, lambda, profile, opts.max_iter, r, rx, false, &history)
}
