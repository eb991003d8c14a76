//! Solver and verification toolkit for the nonlocal Liouville equation
//! `(-Δ)^{1/2} w = K e^w` on the real line.
//!
//! Solutions describe conformal metrics `e^{2w}|dx|²` on the line whose
//! curvature against the half-Laplacian is a prescribed even, decaying
//! profile `K > 0`; the total curvature `Λ = ∫ K e^w` of a finite-mass
//! solution is confined to the open window `(0, 2π)`. Everything here
//! works in the substituted unknown `v = √(K e^w)`, for which the problem
//! becomes a fixed-point equation `v = T_λ(v)` with
//!
//! ```text
//!     T_λ(u)(x) = λ √K(x) · exp( -½ ∫₀ˣ H(u²) ),      λ = e^{w(0)/2},
//! ```
//!
//! where `H` is the Hilbert transform. The map contracts for small `λ`,
//! keeps every iterate below the envelope `λ√K`, and preserves evenness
//! and monotone decay — which is exactly what the discrete operators in
//! this crate are built to respect bit-for-bit.
//!
//! # Start with the examples
//!
//! Each major capability has one runnable example (`cargo run --release
//! --example <name>`):
//!
//! * `solve_gaussian` — one end-to-end solve plus the full verification
//!   battery on the result.
//! * `exact_soliton` — the closed-form constant-curvature solitons used
//!   as oracles, and how the truncated window eats `O(1/L)` of their 2π.
//! * `hilbert_accuracy` — accuracy and speed of the discrete Hilbert
//!   transform (second-order core, closed-form truncation floor, FFT vs
//!   dense timing).
//! * `branch_gaussian` — continuation in the height parameter λ with
//!   per-rung residuals and nondegeneracy margins.
//! * `lambda_map` — the monotone total-curvature map λ ↦ Λ and its 2π
//!   ceiling.
//! * `w0_target` — solving for a prescribed center height `w(0)` instead
//!   of λ, and agreement of the two parameterizations.
//! * `nondegeneracy` — spectral certificates: kernel margins, Jacobian
//!   consistency, operator-norm samples, positivity of the Gram matrix.
//!
//! # Quick start
//!
//! ```
//! use liouville::{CurvatureProfile, Grid, SolveOptions};
//! use liouville::solver::solve_picard;
//! use liouville::diagnostics::{verify_solution, Thresholds};
//!
//! let profile = CurvatureProfile::gaussian();       // K(x) = e^{-x²}
//! let grid = Grid::new(30.0, 512)?;                 // [-30, 30], 1025 nodes
//! let report = solve_picard(1.0, &profile, grid, None, SolveOptions::default())?;
//! assert!(report.converged);
//! assert!(report.total_curvature > 0.0 && report.total_curvature < std::f64::consts::TAU);
//!
//! let verdict = verify_solution(&report, &profile, &Thresholds::default())?;
//! assert!(verdict.passed);
//! # Ok::<(), liouville::Error>(())
//! ```
//!
//! # Module map
//!
//! * [`grid`] — symmetric grids on `[-L, L]` and parity-tagged sample
//!   vectors ([`Field`]); evenness is enforced bit-exactly, not assumed.
//! * [`transforms`] — the discrete operator kit: Hilbert transform and
//!   logarithmic convolution (closed-form Toeplitz kernels applied via
//!   cached FFT plans), derivative, quadrature, and the Cauchy/Gram
//!   matrix behind the positivity argument.
//! * [`model`] — curvature profiles (Gaussian, power-law, constant,
//!   tabulated with a shape-preserving interpolant) and the decay
//!   hypothesis check.
//! * [`solver`] — the fixed-point map, damped Picard iteration, and a
//!   dense-Newton polish; solves report residuals, total curvature, and a
//!   contraction estimate.
//! * [`continuation`] — geometric λ-ladders with secant warm starts,
//!   height-targeted solves, the λ ↦ Λ map, and CSV round-trips of branch
//!   records.
//! * [`linearization`] — the derivative `𝒦` of the fixed-point map as an
//!   explicit matrix, kernel margins on the even subspace, and
//!   finite-difference consistency checks.
//! * [`diagnostics`] — solution verification: Pohozaev balance,
//!   asymptotic slope, integral-representation flatness, envelope and
//!   monotonicity checks, and the exact-soliton oracles.
//! * [`cli`] — the `liouville` binary: `solve`, `branch`, `verify`, and
//!   `selftest` subcommands over JSON configs with reproducible artifact
//!   output.

// `!(x > 0.0)` is used deliberately throughout: the negated form rejects
// NaN along with nonpositive values, where `x <= 0.0` would accept it.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod continuation;
pub mod diagnostics;
pub mod error;
pub mod grid;
pub mod linearization;
pub mod model;
pub mod solver;
pub mod transforms;

pub use error::{Error, Result};
pub use grid::{Field, Grid, Parity};
pub use model::{CurvatureProfile, ProfileKind};
pub use solver::{SolveOptions, SolveReport};
