//! The constant-curvature equation has a two-parameter family of explicit
//! solutions — the stereographic "solitons"
//!
//! ```text
//!     w_μ(x) = ln( 2μ / (1 + μ²x²) ),       v_μ(x) = √(2μ) / √(1 + μ²x²),
//! ```
//!
//! each carrying total curvature exactly 2π on the full line. They are the
//! oracle for everything else: this example feeds them through the same
//! fixed-point map, quadrature, and diagnostics used on general profiles
//! and prints how close the discrete world comes to the analytic one.
//!
//! Run with `cargo run --release --example exact_soliton`.

use std::f64::consts::PI;

use liouville::diagnostics::{exact_soliton, truncated_total_curvature};
use liouville::grid::Grid;
use liouville::model::CurvatureProfile;
use liouville::solver::{fixed_point_map, total_curvature};
use liouville::transforms::{l2_distance, l2_norm};

fn main() -> liouville::error::Result<()> {
    let grid = Grid::new(60.0, 1 << 11)?;
    let profile = CurvatureProfile::constant(1.0)?;

    println!("exact solitons on [-60, 60], M = 2¹¹ (constant curvature K = 1)");
    println!();
    println!(
        "{:>6}  {:>9}  {:>12}  {:>12}  {:>12}",
        "μ", "λ=√(2μ)", "Λ(grid)", "Λ(analytic)", "‖T(v)-v‖₂/‖v‖₂"
    );

    for mu in [0.25, 0.5, 1.0, 2.0, 4.0] {
        let soliton = exact_soliton(mu, grid)?;
        // Quadrature of v² over the window vs the analytic truncated mass
        // 4·arctan(μL): the two should agree to discretization error, and
        // both sit below 2π by the tail mass ~ 4/(μL).
        let mass_grid = total_curvature(&soliton.v);
        let mass_truncated = truncated_total_curvature(mu, grid.half_width());
        // The soliton is the fixed point of T at its own height; feeding it
        // back through the map measures every operator in the chain at once.
        let image = fixed_point_map(&soliton.v, soliton.lambda, &profile)?;
        let residual = l2_distance(&image, &soliton.v)? / l2_norm(&soliton.v);
        println!(
            "{mu:>6.2}  {:>9.5}  {mass_grid:>12.8}  {mass_truncated:>12.8}  {residual:>12.2e}",
            soliton.lambda
        );
    }

    println!();
    println!("2π = {:.8}; the gap to Λ is the mass beyond the window,", 2.0 * PI);
    println!("4·arctan(1/(μL)) ≈ 4/(μL) — wider windows recover it at rate 1/L:");
    println!();
    println!("{:>8}  {:>14}  {:>14}", "L", "2π - Λ(grid)", "4·arctan(1/(μL))");
    let mu = 0.5;
    for l in [30.0, 60.0, 120.0, 240.0] {
        // Fixed mesh h = L/M across rows so only the window grows.
        let grid = Grid::new(l, (l / 30.0 * 512.0) as usize)?;
        let soliton = exact_soliton(mu, grid)?;
        let deficit = 2.0 * PI - total_curvature(&soliton.v);
        let analytic = 4.0 * (1.0 / (mu * l)).atan();
        println!("{l:>8}  {deficit:>14.6e}  {analytic:>14.6e}");
    }
    Ok(())
}
