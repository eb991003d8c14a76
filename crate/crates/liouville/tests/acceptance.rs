//! The acceptance gate: twelve numbered end-to-end criteria, each printed
//! as a single pass/fail line (visible under `--nocapture` or on failure).
//! Budgets are fixed ahead of time; measured values on this machine carry
//! 10×–1000× headroom except where noted.

use std::time::{Duration, Instant};

use liouville::continuation::{self, BranchOptions};
use liouville::diagnostics::{self, Thresholds};
use liouville::grid::{Field, Grid};
use liouville::linearization;
use liouville::model::CurvatureProfile;
use liouville::solver::{self, SolveOptions};
use liouville::transforms::{self, hilbert, l2_distance, l2_norm};

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

struct Gate {
    failures: Vec<String>,
}

impl Gate {
    fn record(&mut self, number: usize, name: &str, pass: bool, detail: String) {
        let status = if pass { "PASS" } else { "FAIL" };
        println!("criterion {number:>2} [{status}] {name}: {detail}");
        if !pass {
            self.failures.push(format!("criterion {number} ({name}): {detail}"));
        }
    }
}

/// Contribution to the Hilbert transform of `1/(1+y²)` from `|y| > l`,
/// in closed form — the part a `[-l, l]`-supported quadrature cannot see.
/// (Cross-checked against adaptive quadrature in the oracle tests.)
fn lorentz_tail(x: f64, l: f64) -> f64 {
    (2.0 * x * (1.0 / l).atan() - ((l + x) / (l - x)).ln()) / (std::f64::consts::PI * (1.0 + x * x))
}

/// Max absolute error of the discrete Hilbert transform of the Lorentzian
/// over `|x| ≤ window`, against the full-line closed form (`raw`) and the
/// truncation-corrected reference (`corrected`).
fn lorentzian_errors(grid: Grid, window: f64) -> (f64, f64) {
    let f = Field::sample_even(grid, |x| 1.0 / (1.0 + x * x));
    let hf = hilbert(&f).unwrap();
    let (mut raw, mut corrected) = (0.0f64, 0.0f64);
    for i in 0..grid.len() {
        let x = grid.node(i);
        if x.abs() <= window {
            let exact = x / (1.0 + x * x);
            raw = raw.max((hf.values()[i] - exact).abs());
            corrected =
                corrected.max((hf.values()[i] - (exact - lorentz_tail(x, grid.half_width()))).abs());
        }
    }
    (raw, corrected)
}

/// Structural suite of criterion 6 on one converged solution.
fn structural_suite(v: &Field, lambda: f64, profile: &CurvatureProfile) -> Result<(), String> {
    let grid = v.grid();
    let m = grid.m();
    for j in 1..=m {
        if v.values()[m - j].to_bits() != v.values()[m + j].to_bits() {
            return Err(format!("evenness broken at node ±{j}"));
        }
    }
    let slack = 1e-8 * v.center_value();
    for j in 0..m as i64 {
        if v.at(j + 1) - v.at(j) > slack {
            return Err(format!("monotonicity broken at node {j}"));
        }
    }
    let envelope = solver::default_init(lambda, profile, grid).map_err(|e| e.to_string())?;
    for (vi, ei) in v.values().iter().zip(envelope.values()) {
        if *vi > ei * (1.0 + 1e-8) {
            return Err(format!("envelope exceeded: v = {vi:.6e} vs λ√K = {ei:.6e}"));
        }
    }
    Ok(())
}

#[test]
fn acceptance_criteria() {
    let mut gate = Gate { failures: Vec::new() };
    let gaussian = CurvatureProfile::gaussian();
    let constant = CurvatureProfile::constant(1.0).unwrap();
    let opts = SolveOptions::default();

    // ---- 1. Exact-oracle solve at the critical height -----------------
    let t = Instant::now();
    let grid_a = Grid::new(200.0, 1 << 13).unwrap();
    let oracle_run = solver::solve_picard(1.0, &constant, grid_a, None, opts).unwrap();
    let time_a = t.elapsed();
    let exact = diagnostics::exact_soliton(0.5, grid_a).unwrap();
    let rel_v = l2_distance(&oracle_run.v, &exact.v).unwrap() / l2_norm(&exact.v);
    let lam_err_a = (oracle_run.total_curvature - TWO_PI).abs();
    let t = Instant::now();
    let grid_b = Grid::new(800.0, 1 << 15).unwrap();
    let oracle_wide = solver::solve_picard(1.0, &constant, grid_b, None, opts).unwrap();
    let time_b = t.elapsed();
    let lam_err_b = (oracle_wide.total_curvature - TWO_PI).abs();
    let ratio = lam_err_a / lam_err_b;
    let pass = oracle_run.converged
        && oracle_wide.converged
        && rel_v <= 1e-2
        && lam_err_a / TWO_PI <= 2e-2
        && ratio >= 3.5
        && time_a <= Duration::from_secs(30)
        && time_b <= Duration::from_secs(30);
    gate.record(
        1,
        "exact-oracle solve",
        pass,
        format!(
            "rel v-error {rel_v:.2e} (≤1e-2), Λ-error {:.2e} rel (≤2e-2), \
             4×-domain error ratio {ratio:.3} (≥3.5, O(1/L)), times {time_a:.2?}/{time_b:.2?}",
            lam_err_a / TWO_PI
        ),
    );

    // ---- 2. Hilbert-transform oracle ----------------------------------
    let grid_h = Grid::new(40.0, 1 << 12).unwrap();
    let (raw, corr_a) = lorentzian_errors(grid_h, 20.0);
    let (_, corr_b) = lorentzian_errors(Grid::new(40.0, 1 << 13).unwrap(), 20.0);
    let order = (corr_a / corr_b).log2();
    let pass = raw <= 1e-4 && order >= 1.9;
    gate.record(
        2,
        "Hilbert oracle",
        pass,
        format!(
            "interior max error {raw:.3e} (≤1e-4); order {order:.2} under h-halving \
             (≥1.9, vs truncation-corrected reference)"
        ),
    );

    // ---- 3. Half-Laplacian identity ------------------------------------
    let psi = Field::sample_odd(grid_h, |x| 2.0 * x / (x * x + 1.0));
    let lhs = transforms::half_laplacian(&psi).unwrap();
    let (mut err2, mut norm2, mut full_err2, mut full_norm2) = (0.0, 0.0, 0.0, 0.0);
    for i in 0..grid_h.len() {
        let x = grid_h.node(i);
        let exact = 4.0 * x / ((1.0 + x * x) * (1.0 + x * x));
        let d = (lhs.values()[i] - exact) * (lhs.values()[i] - exact);
        let p = psi.values()[i] * psi.values()[i];
        full_err2 += d;
        full_norm2 += p;
        if x.abs() <= grid_h.half_width() / 2.0 {
            err2 += d;
            norm2 += p;
        }
    }
    let rel_interior = (err2 / norm2).sqrt();
    let rel_full = (full_err2 / full_norm2).sqrt();
    gate.record(
        3,
        "half-Laplacian identity",
        rel_interior <= 1e-3,
        format!(
            "interior rel L² {rel_interior:.3e} (≤1e-3; full-grid {rel_full:.3e} is the \
             h-independent domain-truncation floor)"
        ),
    );

    // ---- 4. Total-curvature window along the branch --------------------
    let grid_branch = Grid::new(30.0, 1 << 12).unwrap();
    let t = Instant::now();
    let branch_opts =
        BranchOptions { steps: 40, keep_solutions: true, ..BranchOptions::default() };
    let branch = continuation::continue_branch(2.0, &gaussian, grid_branch, &branch_opts).unwrap();
    let branch_time = t.elapsed();
    let complete = branch.is_complete() && branch.records.len() == 41;
    let window_ok = branch
        .records
        .iter()
        .all(|r| r.total_curvature > 0.0 && r.total_curvature < TWO_PI - 1e-3);
    let resid_ok = branch.records.iter().all(|r| r.residual_l2 <= 1e-8);
    let max_total = branch.records.iter().map(|r| r.total_curvature).fold(0.0, f64::max);
    let max_resid = branch.records.iter().map(|r| r.residual_l2).fold(0.0, f64::max);
    gate.record(
        4,
        "curvature window",
        complete && window_ok && resid_ok,
        format!(
            "41 records λ∈[0.05,2], max Λ {max_total:.4} (<2π−1e-3 = {:.4}), \
             max residual {max_resid:.2e} (≤1e-8)",
            TWO_PI - 1e-3
        ),
    );

    // ---- 5. Pohozaev identity at every record ---------------------------
    let mut worst_rel = 0.0f64;
    let mut worst_sign = f64::NEG_INFINITY;
    for v in &branch.solutions {
        let balance = diagnostics::pohozaev_balance(v, &gaussian).unwrap();
        worst_rel = worst_rel.max(balance.relative);
        worst_sign = worst_sign.max(balance.rhs);
    }
    gate.record(
        5,
        "Pohozaev identity",
        worst_rel <= 1e-3 && worst_sign < 0.0,
        format!(
            "worst relative residual {worst_rel:.2e} (≤1e-3), \
             largest ∫x(∂ₓK)eʷ = {worst_sign:.3e} (<0)"
        ),
    );

    // ---- 6. Structural suite on every converged solution ----------------
    let mut structural: Result<(), String> = Ok(());
    for (record, v) in branch.records.iter().zip(&branch.solutions) {
        if let Err(msg) = structural_suite(v, record.lambda, &gaussian) {
            structural = Err(format!("branch rung λ = {}: {msg}", record.lambda));
            break;
        }
    }
    if structural.is_ok() {
        structural = structural_suite(&oracle_run.v, oracle_run.lambda, &constant)
            .map_err(|msg| format!("constant-curvature solve: {msg}"));
    }
    gate.record(
        6,
        "symmetry/monotonicity/bound",
        structural.is_ok(),
        match &structural {
            Ok(()) => "evenness bit-exact, decay within 1e-8·v(0), v ≤ λ√K(1+1e-8) \
                       on 41 branch rungs + oracle solve"
                .to_string(),
            Err(msg) => msg.clone(),
        },
    );

    // ---- 7. Uniqueness as computation -----------------------------------
    let grid_u = Grid::new(30.0, 1 << 10).unwrap();
    let mut terminals = Vec::new();
    for scale in [0.25, 0.6, 1.0, 1.4, 1.75] {
        let envelope = solver::default_init(0.05, &gaussian, grid_u).unwrap();
        let init = Field::linear_combination(scale, &envelope, 0.0, &envelope).unwrap();
        let report = solver::solve_picard(0.05, &gaussian, grid_u, Some(&init), opts).unwrap();
        assert!(report.converged);
        terminals.push(report.v);
    }
    let mut worst_small = 0.0f64;
    for i in 0..terminals.len() {
        for j in (i + 1)..terminals.len() {
            worst_small = worst_small.max(l2_distance(&terminals[i], &terminals[j]).unwrap());
        }
    }
    let ladder_a = continuation::continue_branch(
        1.0,
        &gaussian,
        grid_u,
        &BranchOptions { steps: 10, ..BranchOptions::default() },
    )
    .unwrap();
    let ladder_b = continuation::continue_branch(
        1.0,
        &gaussian,
        grid_u,
        &BranchOptions { steps: 20, ..BranchOptions::default() },
    )
    .unwrap();
    let path_dist = l2_distance(
        &ladder_a.final_report.as_ref().unwrap().v,
        &ladder_b.final_report.as_ref().unwrap().v,
    )
    .unwrap();
    gate.record(
        7,
        "uniqueness as computation",
        worst_small <= 1e-8 && path_dist <= 1e-6,
        format!(
            "λ=0.05: 5 inits pairwise ≤ {worst_small:.2e} (≤1e-8); \
             λ=1 ladder path-independence {path_dist:.2e} (≤1e-6)"
        ),
    );

    // ---- 8. Nondegeneracy margins along the branch ----------------------
    let grid_margin = Grid::new(30.0, 512).unwrap();
    let margin_opts =
        BranchOptions { steps: 40, compute_margins: true, ..BranchOptions::default() };
    let margin_branch =
        continuation::continue_branch(2.0, &gaussian, grid_margin, &margin_opts).unwrap();
    let min_margin = margin_branch
        .records
        .iter()
        .map(|r| r.margin.expect("margins requested"))
        .fold(f64::INFINITY, f64::min);
    let grid_double = Grid::new(30.0, 1024).unwrap();
    let mut worst_drift = 0.0f64;
    for lambda in [0.05, 1.0, 2.0] {
        let coarse = solver::solve_picard(lambda, &gaussian, grid_margin, None, opts).unwrap();
        let fine = solver::solve_picard(lambda, &gaussian, grid_double, None, opts).unwrap();
        let mc = linearization::nondegeneracy_margin(&coarse.v).unwrap();
        let mf = linearization::nondegeneracy_margin(&fine.v).unwrap();
        worst_drift = worst_drift.max((mf - mc).abs() / mc);
    }
    gate.record(
        8,
        "nondegeneracy margin",
        margin_branch.is_complete() && min_margin > 1e-3 && worst_drift <= 5e-2,
        format!(
            "min σ_min(𝒦−𝟙) over 41 records {min_margin:.4} (>1e-3); \
             worst M-doubling drift {worst_drift:.2e} (≤5e-2)"
        ),
    );

    // ---- 9. Hankel positivity -------------------------------------------
    let mut worst_eig_ratio = 0.0f64;
    for m in [256usize, 1024, 1 << 11] {
        let matrix = transforms::hankel_matrix(Grid::new(40.0, m).unwrap());
        let eigs = matrix.selfadjoint_eigenvalues(faer::Side::Lower);
        let min_eig = eigs.iter().copied().fold(f64::INFINITY, f64::min);
        let max_eig = eigs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        worst_eig_ratio = worst_eig_ratio.max(-min_eig / max_eig);
    }
    use rand::Rng;
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(0x9a77);
    let form_grid = Grid::new(40.0, 512).unwrap();
    let mut min_form = f64::INFINITY;
    for _ in 0..50 {
        let mut values = vec![0.0; form_grid.len()];
        for j in 0..=form_grid.m() {
            let r = rng.gen_range(-1.0..1.0);
            values[form_grid.m() + j] = r;
            values[form_grid.m() - j] = r;
        }
        let g = Field::from_values(form_grid, liouville::grid::Parity::Even, values).unwrap();
        min_form = min_form.min(transforms::hankel_form(&g));
    }
    gate.record(
        9,
        "Hankel positivity",
        worst_eig_ratio <= 1e-10 && min_form >= 0.0,
        format!(
            "worst -λ_min/λ_max {worst_eig_ratio:.2e} (≤1e-10) up to M=2¹¹; \
             min of 50 seeded forms {min_form:.3e} (≥0)"
        ),
    );

    // ---- 10. Fréchet-derivative consistency ------------------------------
    let fd_solution = solver::solve_picard(1.0, &gaussian, grid_double, None, opts).unwrap();
    let fd_small =
        linearization::frechet_fd_check(&fd_solution.v, 1.0, &gaussian, 1e-5, 10, 0x5eed).unwrap();
    let fd_3 =
        linearization::frechet_fd_check(&fd_solution.v, 1.0, &gaussian, 1e-3, 10, 0x5eed).unwrap();
    let fd_4 =
        linearization::frechet_fd_check(&fd_solution.v, 1.0, &gaussian, 1e-4, 10, 0x5eed).unwrap();
    let fd_order = (fd_3 / fd_4).log10();
    gate.record(
        10,
        "Fréchet consistency",
        fd_small <= 1e-5 && fd_order >= 1.6,
        format!(
            "fd mismatch {fd_small:.2e} at ε=1e-5 (≤1e-5); \
             observed order {fd_order:.2} from ε∈{{1e-3,1e-4}} (≥1.6)"
        ),
    );

    // ---- 11. Asymptotic slope --------------------------------------------
    let slope_run = solver::solve_picard(1.0, &gaussian, grid_branch, None, opts).unwrap();
    let w_gauss = solver::w_from_v(&slope_run.v, &gaussian).unwrap();
    let fit_gauss = diagnostics::asymptotic_slope(&w_gauss, None).unwrap();
    let expected = diagnostics::expected_slope(slope_run.total_curvature);
    let gauss_rel = (fit_gauss.slope - expected).abs() / expected.abs();
    let w_oracle = solver::w_from_v(&oracle_run.v, &constant).unwrap();
    let fit_oracle = diagnostics::asymptotic_slope(&w_oracle, None).unwrap();
    let oracle_rel = (fit_oracle.slope + 2.0).abs() / 2.0;
    gate.record(
        11,
        "asymptotic slope",
        gauss_rel <= 5e-2 && oracle_rel <= 2e-2,
        format!(
            "fitted {:.5} vs -Λ/π = {expected:.5} (rel {gauss_rel:.2e} ≤ 5e-2); \
             oracle fitted {:.5} vs -2 (rel {oracle_rel:.2e} ≤ 2e-2)",
            fit_gauss.slope, fit_oracle.slope
        ),
    );

    // ---- 12. End-to-end runtime and the fast path -------------------------
    let t = Instant::now();
    let final_report = branch.final_report.as_ref().unwrap();
    let verification =
        diagnostics::verify_solution(final_report, &gaussian, &Thresholds::default()).unwrap();
    let verify_time = t.elapsed();
    let grid_fast = Grid::new(40.0, 1 << 13).unwrap();
    let probe = Field::sample_even(grid_fast, |x| 1.0 / (1.0 + x * x));
    let _ = hilbert(&probe).unwrap(); // warm the convolution plan
    let t = Instant::now();
    let reps = 5u32;
    for _ in 0..reps {
        let _ = hilbert(&probe).unwrap();
    }
    let fast = t.elapsed() / reps;
    let t = Instant::now();
    let dense = transforms::hilbert_dense(&probe).unwrap();
    let dense_time = t.elapsed();
    let speedup = dense_time.as_secs_f64() / fast.as_secs_f64();
    let agree = l2_distance(&dense, &hilbert(&probe).unwrap()).unwrap();
    let total_time = branch_time + verify_time;
    gate.record(
        12,
        "runtime and fast path",
        verification.passed
            && total_time <= Duration::from_secs(60)
            && speedup >= 5.0
            && agree < 1e-10,
        format!(
            "branch+verify {total_time:.2?} (≤60s); Toeplitz {fast:.1?} vs dense \
             {dense_time:.1?} at M=2¹³ → {speedup:.0}× (≥5×, paths agree to {agree:.1e})"
        ),
    );

    assert!(
        gate.failures.is_empty(),
        "acceptance criteria failed:\n{}",
        gate.failures.join("\n")
    );
}
