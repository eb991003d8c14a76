//! Continuation of the soliton branch in the height parameter `λ`.
//!
//! A single damped fixed-point solve is reliable for moderate `λ`, but the
//! natural way to traverse the branch `λ ↦ v_λ` is to walk a geometric
//! ladder of heights, warm-starting each rung from the previous solution
//! (with a secant extrapolation once two rungs are available) and polishing
//! with a Newton step when plain iteration stalls. The walk records the
//! branch coordinates `(λ, v(0), w(0), Λ)` together with convergence data
//! at every rung, and aborts cleanly — partial records intact — if a rung
//! cannot be solved to tolerance.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Field, Grid};
use crate::linearization::nondegeneracy_margin;
use crate::model::CurvatureProfile;
use crate::solver::{self, NewtonOptions, SolveOptions, SolveReport};

/// How each rung of the ladder is solved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RungMethod {
    /// Damped fixed-point iteration only; a stall aborts the branch.
    Picard,
    /// Newton's method from the predictor at every rung.
    Newton,
    /// Fixed-point iteration first, Newton polish if it stalls (default).
    Hybrid,
}

/// Options for [`continue_branch`] and friends.
#[derive(Debug, Clone, Copy)]
pub struct BranchOptions {
    /// First rung of the geometric ladder. Small heights are deep in the
    /// contraction regime, so the cold start there is safe.
    pub lambda_start: f64,
    /// Number of multiplicative increments; the ladder has `steps + 1`
    /// rungs including both endpoints.
    pub steps: usize,
    pub method: RungMethod,
    pub solve: SolveOptions,
    pub newton: NewtonOptions,
    /// Compute the linearization margin at every rung. This costs one
    /// dense singular-value decomposition per rung, so it is off by
    /// default and meant for moderate grids.
    pub compute_margins: bool,
    /// Keep every rung's profile in [`Branch::solutions`] (memory scales
    /// with `steps × M`); otherwise only the last one is retained.
    pub keep_solutions: bool,
}

impl Default for BranchOptions {
    fn default() -> BranchOptions {
        BranchOptions {
            lambda_start: 0.05,
            steps: 40,
            method: RungMethod::Hybrid,
            solve: SolveOptions::default(),
            newton: NewtonOptions::default(),
            compute_margins: false,
            keep_solutions: false,
        }
    }
}

/// One accepted rung of a branch walk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchRecord {
    pub lambda: f64,
    /// Center value `v(0) = λ√K(0)`.
    pub v0: f64,
    /// Center height `w(0) = 2 log λ`.
    pub w0: f64,
    /// Total curvature `Λ = ∫ v² dx`.
    pub total_curvature: f64,
    pub residual_l2: f64,
    /// Linearization margin (smallest singular value of the linearized
    /// map minus identity); present when margins were requested.
    pub margin: Option<f64>,
    pub iterations: usize,
}

impl BranchRecord {
    fn from_report(report: &SolveReport, margin: Option<f64>) -> BranchRecord {
        BranchRecord {
            lambda: report.lambda,
            v0: report.v0,
            w0: report.w0,
            total_curvature: report.total_curvature,
            residual_l2: report.residual_l2,
            margin,
            iterations: report.iterations,
        }
    }
}

/// Where and why a branch walk stopped early.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BranchFailure {
    /// The rung that could not be solved.
    pub lambda: f64,
    pub reason: String,
}

/// Result of a branch walk: one record per accepted rung, in strictly
/// increasing `λ` order, plus the failure marker if the walk stopped
/// before the target.
#[derive(Debug, Clone)]
pub struct Branch {
    pub records: Vec<BranchRecord>,
    /// Every accepted profile when `keep_solutions` was set, otherwise
    /// empty (the last profile lives in `final_report`).
    pub solutions: Vec<Field>,
    /// Full report of the last accepted rung; `None` only when the very
    /// first rung failed.
    pub final_report: Option<SolveReport>,
    pub failure: Option<BranchFailure>,
}

impl Branch {
    /// True when every rung of the schedule was solved to tolerance.
    pub fn is_complete(&self) -> bool {
        self.failure.is_none()
    }
}

/// The geometric ladder from `start` to `target` with `steps`
/// multiplicative increments. Both endpoints are included exactly; the
/// interior rungs are `start·(target/start)^{k/steps}`.
pub fn lambda_schedule(start: f64, target: f64, steps: usize) -> Result<Vec<f64>> {
    if !(start > 0.0) || !start.is_finite() {
        return Err(Error::Config(format!("ladder start must be positive, got {start}")));
    }
    if !target.is_finite() || target <= start {
        return Err(Error::Config(format!(
            "ladder target must exceed the start ({start}), got {target}"
        )));
    }
    if steps == 0 {
        return Err(Error::Config("ladder needs at least one step".into()));
    }
    let ratio = target / start;
    let mut schedule = Vec::with_capacity(steps + 1);
    schedule.push(start);
    for k in 1..steps {
        schedule.push(start * ratio.powf(k as f64 / steps as f64));
    }
    schedule.push(target);
    if schedule.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Config(format!(
            "ladder of {steps} steps over [{start}, {target}] is not strictly increasing; \
             use fewer steps"
        )));
    }
    Ok(schedule)
}

/// Secant extrapolation of the previous two rungs to the next height,
/// clamped to the nonnegative cone (the fixed-point map only sees `u²`,
/// but initial data is kept in the admissible set).
fn predict(lambda: f64, prev: &(f64, Field), older: Option<&(f64, Field)>) -> Result<Field> {
    let (l1, v1) = prev;
    let mut guess = match older {
        // Only one rung so far: the profile scales linearly in λ to
        // leading order, so rescale it.
        None => Field::linear_combination(lambda / l1, v1, 0.0, v1)?,
        Some((l0, v0)) => {
            let t = (lambda - l1) / (l1 - l0);
            Field::linear_combination(1.0 + t, v1, -t, v0)?
        }
    };
    for value in guess.values_mut() {
        if *value < 0.0 {
            *value = 0.0;
        }
    }
    Ok(guess)
}

/// Solve one rung, honouring the method choice. Returns the report on
/// success and the failure reason otherwise.
fn solve_rung(
    lambda: f64,
    profile: &CurvatureProfile,
    grid: Grid,
    init: Option<&Field>,
    opts: &BranchOptions,
) -> std::result::Result<SolveReport, String> {
    let newton_from = |start: Option<&Field>| {
        match solver::solve_newton(lambda, profile, grid, start, opts.newton) {
            Ok(report) if report.converged => Ok(report),
            Ok(report) => Err(format!(
                "Newton stalled after {} iterations (residual {:.3e})",
                report.iterations, report.residual_l2
            )),
            Err(err) => Err(format!("Newton failed: {err}")),
        }
    };
    match opts.method {
        RungMethod::Newton => newton_from(init),
        RungMethod::Picard | RungMethod::Hybrid => {
            let polish = opts.method == RungMethod::Hybrid;
            match solver::solve_picard(lambda, profile, grid, init, opts.solve) {
                Ok(report) if report.converged => Ok(report),
                Ok(report) if polish => newton_from(Some(&report.v)),
                Ok(report) => Err(format!(
                    "fixed-point iteration stalled after {} iterations (residual {:.3e})",
                    report.iterations, report.residual_l2
                )),
                Err(err) if polish => {
                    newton_from(init).map_err(|newton_err| {
                        format!("fixed-point iteration blew up ({err}); {newton_err}")
                    })
                }
                Err(err) => Err(format!("fixed-point iteration blew up: {err}")),
            }
        }
    }
}

/// Walk an explicit strictly increasing schedule of heights.
///
/// Configuration problems (bad grid, bad profile, bad schedule) are hard
/// errors; a rung that fails to *solve* ends the walk early with the
/// partial records and the failing height in [`Branch::failure`].
pub fn run_schedule(
    schedule: &[f64],
    profile: &CurvatureProfile,
    grid: Grid,
    opts: &BranchOptions,
) -> Result<Branch> {
    for &lambda in schedule {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::Config(format!("schedule heights must be positive, got {lambda}")));
        }
    }
    if schedule.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Config("schedule heights must be strictly increasing".into()));
    }
    // Validate the profile/grid pairing up front so configuration errors
    // surface as such rather than as a failed first rung.
    profile.sqrt_k_field(grid)?;

    let mut branch =
        Branch { records: Vec::new(), solutions: Vec::new(), final_report: None, failure: None };
    let mut prev: Option<(f64, Field)> = None;
    let mut older: Option<(f64, Field)> = None;

    for &lambda in schedule {
        let init = match prev.as_ref() {
            None => None,
            Some(p) => Some(predict(lambda, p, older.as_ref())?),
        };
        let report = match solve_rung(lambda, profile, grid, init.as_ref(), opts) {
            Ok(report) => report,
            Err(reason) => {
                branch.failure = Some(BranchFailure { lambda, reason });
                return Ok(branch);
            }
        };
        let margin = if opts.compute_margins {
            let value = nondegeneracy_margin(&report.v)?;
            if !value.is_finite() {
                branch.failure = Some(BranchFailure {
                    lambda,
                    reason: format!("linearization margin was not finite ({value})"),
                });
                return Ok(branch);
            }
            Some(value)
        } else {
            None
        };
        branch.records.push(BranchRecord::from_report(&report, margin));
        if opts.keep_solutions {
            branch.solutions.push(report.v.clone());
        }
        older = prev.take();
        prev = Some((lambda, report.v.clone()));
        branch.final_report = Some(report);
    }
    Ok(branch)
}

/// Walk the branch from `opts.lambda_start` up to `lambda_target` on a
/// geometric ladder.
pub fn continue_branch(
    lambda_target: f64,
    profile: &CurvatureProfile,
    grid: Grid,
    opts: &BranchOptions,
) -> Result<Branch> {
    let schedule = lambda_schedule(opts.lambda_start, lambda_target, opts.steps)?;
    run_schedule(&schedule, profile, grid, opts)
}

/// Solve for a prescribed center height `w(0)` via `λ = e^{w0/2}`.
///
/// Heights at or below the ladder start are solved directly (they are in
/// the contraction regime); larger ones are reached by continuation.
pub fn solve_for_w0(
    w0_target: f64,
    profile: &CurvatureProfile,
    grid: Grid,
    opts: &BranchOptions,
) -> Result<SolveReport> {
    if !w0_target.is_finite() {
        return Err(Error::Config(format!("center height must be finite, got {w0_target}")));
    }
    let lambda = solver::lambda_from_w0(w0_target);
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::Config(format!(
            "center height {w0_target} maps to an unusable λ = {lambda}"
        )));
    }
    if lambda <= opts.lambda_start {
        let report = solver::solve_picard(lambda, profile, grid, None, opts.solve)?;
        if !report.converged {
            return Err(Error::Diverged(format!(
                "solve at λ = {lambda} stalled after {} iterations",
                report.iterations
            )));
        }
        return Ok(report);
    }
    let branch = continue_branch(lambda, profile, grid, opts)?;
    match branch.failure {
        Some(failure) => Err(Error::Diverged(format!(
            "continuation to λ = {lambda} stalled at λ = {}: {}",
            failure.lambda, failure.reason
        ))),
        None => branch
            .final_report
            .ok_or_else(|| Error::Diverged("continuation produced no rungs".into())),
    }
}

/// The sampled `λ ↦ Λ` curve.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CurvatureMap {
    /// `(λ, Λ)` pairs in the requested order.
    pub rows: Vec<(f64, f64)>,
    /// Whether the sampled total curvature was strictly increasing in λ.
    /// Reported as observed data, not asserted.
    pub monotone_increasing: bool,
}

/// Sample the total-curvature map over an explicit list of heights
/// (strictly increasing, all positive). An empty list yields an empty
/// table. Every height must solve; a stall is an error here because the
/// map is only meaningful when complete.
pub fn lambda_curvature_map(
    lambdas: &[f64],
    profile: &CurvatureProfile,
    grid: Grid,
    opts: &BranchOptions,
) -> Result<CurvatureMap> {
    if lambdas.is_empty() {
        return Ok(CurvatureMap { rows: Vec::new(), monotone_increasing: true });
    }
    let branch = run_schedule(lambdas, profile, grid, opts)?;
    if let Some(failure) = branch.failure {
        return Err(Error::Diverged(format!(
            "curvature map stalled at λ = {}: {}",
            failure.lambda, failure.reason
        )));
    }
    let rows: Vec<(f64, f64)> =
        branch.records.iter().map(|r| (r.lambda, r.total_curvature)).collect();
    let monotone_increasing = rows.windows(2).all(|w| w[1].1 > w[0].1);
    Ok(CurvatureMap { rows, monotone_increasing })
}

/// Header of the branch CSV format.
pub const BRANCH_CSV_HEADER: &str = "lambda,v0,w0,Lambda,residual_l2,margin,iterations";

/// Render branch records as CSV (shortest-round-trip floats; absent
/// margins become empty fields).
pub fn branch_csv(records: &[BranchRecord]) -> String {
    let mut out = String::with_capacity(64 * (records.len() + 1));
    out.push_str(BRANCH_CSV_HEADER);
    out.push('\n');
    for r in records {
        let _ = write!(
            out,
            "{},{},{},{},{},",
            r.lambda, r.v0, r.w0, r.total_curvature, r.residual_l2
        );
        if let Some(margin) = r.margin {
            let _ = write!(out, "{margin}");
        }
        let _ = writeln!(out, ",{}", r.iterations);
    }
    out
}

/// Write branch records to a CSV file.
pub fn write_branch_csv(path: &Path, records: &[BranchRecord]) -> Result<()> {
    std::fs::write(path, branch_csv(records))?;
    Ok(())
}

/// Read branch records back from CSV.
pub fn read_branch_csv(path: &Path) -> Result<Vec<BranchRecord>> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines();
    match lines.next() {
        Some(header) if header.trim() == BRANCH_CSV_HEADER => {}
        other => {
            return Err(Error::Csv(format!(
                "expected branch header '{BRANCH_CSV_HEADER}', found {other:?}"
            )));
        }
    }
    let mut records = Vec::new();
    for (idx, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 7 {
            return Err(Error::Csv(format!(
                "branch row {} has {} fields, expected 7",
                idx + 2,
                fields.len()
            )));
        }
        let num = |s: &str, what: &str| -> Result<f64> {
            s.trim()
                .parse::<f64>()
                .map_err(|e| Error::Csv(format!("branch row {}: bad {what}: {e}", idx + 2)))
        };
        let margin = match fields[5].trim() {
            "" => None,
            s => Some(num(s, "margin")?),
        };
        records.push(BranchRecord {
            lambda: num(fields[0], "lambda")?,
            v0: num(fields[1], "v0")?,
            w0: num(fields[2], "w0")?,
            total_curvature: num(fields[3], "Lambda")?,
            residual_l2: num(fields[4], "residual_l2")?,
            margin,
            iterations: fields[6].trim().parse::<usize>().map_err(|e| {
                Error::Csv(format!("branch row {}: bad iterations: {e}", idx + 2))
            })?,
        });
    }
    Ok(records)
}
