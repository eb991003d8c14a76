//! Linearization of the fixed-point map and spectral certificates.
//!
//! At a profile `v` the fixed-point map linearizes to the integral operator
//!
//! ```text
//! (𝒦 f)(x) = -v(x) · ∫_0^x H(v·f)(y) dy,
//! ```
//!
//! so the Jacobian of the residual `F(u) = T(u) - u` at a solution is
//! `𝒦 - 𝟙`. This module builds the dense matrix of `𝒦` on the even
//! subspace, certifies invertibility of `𝒦 - 𝟙` by its smallest singular
//! value ([`nondegeneracy_margin`]), runs the constrained spectral kernel
//! check behind the monotonicity/uniqueness argument
//! ([`constrained_kernel_margin`]), and validates the analytic Jacobian
//! against central finite differences ([`frechet_fd_check`]).
//!
//! # Even-subspace coordinates
//!
//! Even fields are stored by their `x >= 0` samples `f_0..f_M`. The full-line
//! `L²` inner product restricted to even fields is `Σ_j W_j f_j g_j` with
//! trapezoid weights `W_0 = h, W_j = 2h (0 < j < M), W_M = h`; singular
//! values are always taken after conjugating matrices by `diag(√W)`, so they
//! are singular values with respect to that inner product, not the raw
//! coordinate one.

use crate::error::{Error, Result};
use crate::grid::{Field, Grid, Parity};
use crate::model::CurvatureProfile;
use crate::solver;
use crate::transforms::{
    cumulative_integral, half_laplacian, hilbert, hilbert_kernel_coeff, l2_norm, x_norm,
};
use faer::Mat;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;
use std::io::{Read, Write};

/// Spectral certificates for one solution profile.
#[derive(Debug, Clone, Serialize)]
pub struct LinearizationReport {
    /// Smallest singular value of `𝒦 - 𝟙` on the even subspace; positive
    /// values certify (discrete) local uniqueness of the solution.
    pub nondegeneracy_margin: f64,
    /// Smallest singular value of `(-Δ)^{1/2} - v²` on even fields with the
    /// `ψ(0) = 0` constraint; positive values are the discrete form of the
    /// trivial-kernel statement behind monotone dependence on the data.
    pub mono_margin: f64,
    /// Worst relative error of the analytic Jacobian against central finite
    /// differences of the residual map over random even directions.
    pub fd_consistency: f64,
    pub grid: Grid,
}

/// Trapezoid weights of the even-subspace inner product (see module docs).
pub fn even_weights(grid: Grid) -> Vec<f64> {
    let h = grid.h();
    let mut w = vec![2.0 * h; grid.m() + 1];
    w[0] = h;
    w[grid.m()] = h;
    w
}

/// Dense matrix of `f ↦ -t · ∫_0^x H(u·f)` on even-subspace coordinates.
///
/// `u` is the field inside the Hilbert transform and `t` the outer
/// prefactor; the linearization at a solution uses `u = t = v`, while a
/// Newton step at a general iterate `u` uses `t = T(u)`. Columns are
/// assembled from the closed-form Hilbert kernel, which agrees with the
/// FFT operator path to rounding.
pub(crate) fn jacobian_matrix(u: &Field, t: &Field) -> Result<Mat<f64>> {
    crate::grid::check_same_grid(u, t)?;
    if u.parity() != Parity::Even || t.parity() != Parity::Even {
        return Err(Error::InvalidField("jacobian needs even fields".into()));
    }
    let grid = u.grid();
    let m = grid.m();
    let c = grid.center();
    let half_h = 0.5 * grid.h();
    let uv = u.values();
    let tv = t.values();
    // Signed Hilbert coefficient for offsets -2M..2M, via c_|d| and oddness.
    let coeff: Vec<f64> = (0..=2 * m).map(hilbert_kernel_coeff).collect();
    let a = |d: i64| -> f64 {
        let c = coeff[d.unsigned_abs() as usize];
        if d < 0 {
            -c
        } else {
            c
        }
    };
    let mut mat = Mat::<f64>::zeros(m + 1, m + 1);
    let mut hg = vec![0.0; m + 1];
    for j in 0..=m {
        // H(u·e_j) on s >= 0, where e_j is the even unit sample at ±j.
        let uj = uv[c + j];
        if j == 0 {
            for (s, slot) in hg.iter_mut().enumerate() {
                *slot = uj * a(s as i64);
            }
        } else {
            for (s, slot) in hg.iter_mut().enumerate() {
                *slot = uj * (a(s as i64 - j as i64) + a(s as i64 + j as i64));
            }
        }
        // Cumulative trapezoid from the origin, then the outer -t factor.
        let mut acc = 0.0;
        mat[(0, j)] = 0.0;
        for s in 1..=m {
            acc += half_h * (hg[s - 1] + hg[s]);
            mat[(s, j)] = -tv[c + s] * acc;
        }
    }
    Ok(mat)
}

/// Matrix of the linearized operator `𝒦` at `v` on even-subspace
/// coordinates (`(M+1)×(M+1)`).
pub fn linearized_map_matrix(v: &Field) -> Result<Mat<f64>> {
    jacobian_matrix(v, v)
}

/// Apply `𝒦` to a single even field through the transform pipeline
/// (FFT Hilbert path); the matrix route must agree with this to rounding.
pub fn linearized_map_apply(v: &Field, f: &Field) -> Result<Field> {
    if v.parity() != Parity::Even || f.parity() != Parity::Even {
        return Err(Error::InvalidField("linearized map needs even fields".into()));
    }
    let vf = Field::pointwise_mul(v, f)?;
    let integral = cumulative_integral(&hilbert(&vf)?);
    let mut out = Field::pointwise_mul(v, &integral)?;
    for val in out.values_mut() {
        *val = -*val;
    }
    Ok(out)
}

/// Conjugate by the square-root weights: `D A D^{-1}`, `D = diag(√W)`.
fn weight_conjugate(a: &Mat<f64>, w: &[f64]) -> Mat<f64> {
    let n = a.nrows();
    let d: Vec<f64> = w.iter().map(|&x| x.sqrt()).collect();
    Mat::from_fn(n, n, |i, j| d[i] * a[(i, j)] / d[j])
}

fn smallest_singular_value(a: &Mat<f64>) -> f64 {
    a.singular_values()
        .into_iter()
        .fold(f64::INFINITY, f64::min)
}

/// Smallest singular value of `𝒦 - 𝟙` on the even subspace (weighted inner
/// product). Zero field gives exactly 1 (`𝒦 = 0` there).
pub fn nondegeneracy_margin(v: &Field) -> Result<f64> {
    let mut a = linearized_map_matrix(v)?;
    let n = a.nrows();
    for i in 0..n {
        a[(i, i)] -= 1.0;
    }
    let w = even_weights(v.grid());
    Ok(smallest_singular_value(&weight_conjugate(&a, &w)))
}

/// Matrix of the half-Laplacian on even-subspace coordinates, column by
/// column through the operator pipeline.
fn half_laplacian_even_matrix(grid: Grid) -> Result<Mat<f64>> {
    let m = grid.m();
    let c = grid.center();
    let mut mat = Mat::<f64>::zeros(m + 1, m + 1);
    for j in 0..=m {
        let e = Field::from_values(grid, Parity::Even, {
            let mut vals = vec![0.0; grid.len()];
            vals[c + j] = 1.0;
            vals[c - j] = 1.0;
            vals
        })
        .expect("unit even sample is a valid field");
        let col = half_laplacian(&e)?;
        for s in 0..=m {
            mat[(s, j)] = col.values()[c + s];
        }
    }
    Ok(mat)
}

/// Constrained spectral kernel check: smallest singular value of
/// `(-Δ)^{1/2} - v²` on even fields with `ψ(0) = 0`.
///
/// The constraint is realized by deleting the `x = 0` row and column of the
/// even-subspace matrix (a square restriction), after conjugating by the
/// inner-product weights. A positive margin is the discrete counterpart of
/// "no nontrivial even kernel vanishing at the origin". In the *odd* sector
/// the analogous operator genuinely has a kernel — see the module tests —
/// which is why the evenness restriction matters.
pub fn constrained_kernel_margin(v: &Field) -> Result<f64> {
    if v.parity() != Parity::Even {
        return Err(Error::InvalidField("kernel check needs an even field".into()));
    }
    let grid = v.grid();
    let m = grid.m();
    let c = grid.center();
    let mut a = half_laplacian_even_matrix(grid)?;
    let vv = v.values();
    for i in 0..=m {
        let vi = vv[c + i];
        a[(i, i)] -= vi * vi;
    }
    let w = even_weights(grid);
    let conj = weight_conjugate(&a, &w);
    let restricted = Mat::from_fn(m, m, |i, j| conj[(i + 1, j + 1)]);
    Ok(smallest_singular_value(&restricted))
}

/// Compare the analytic Jacobian `(𝒦 - 𝟙)d` of the residual map against a
/// central finite difference `(F(v+εd) - F(v-εd))/(2ε)` over `directions`
/// random even directions; returns the worst relative `L²` error.
///
/// Meaningful when `v` is (near) a solution for `lambda`: the analytic form
/// uses the fixed-point identity `T(v) = v`.
pub fn frechet_fd_check(
    v: &Field,
    lambda: f64,
    profile: &CurvatureProfile,
    epsilon: f64,
    directions: usize,
    seed: u64,
) -> Result<f64> {
    if !(1e-7..=1e-3).contains(&epsilon) {
        return Err(Error::Config(format!(
            "fd step must lie in [1e-7, 1e-3], got {epsilon}"
        )));
    }
    let grid = v.grid();
    let mut rng = StdRng::seed_from_u64(seed);
    let mut worst = 0.0_f64;
    for _ in 0..directions {
        let d = {
            let c = grid.center();
            let mut vals = vec![0.0; grid.len()];
            for j in 0..=grid.m() {
                let y: f64 = rng.gen_range(-1.0..1.0);
                vals[c + j] = y;
                vals[c - j] = y;
            }
            Field::from_values(grid, Parity::Even, vals).expect("mirrored samples are even")
        };
        let plus = Field::linear_combination(1.0, v, epsilon, &d)?;
        let minus = Field::linear_combination(1.0, v, -epsilon, &d)?;
        let f_plus = solver::residual(&plus, lambda, profile)?;
        let f_minus = solver::residual(&minus, lambda, profile)?;
        let fd = Field::linear_combination(
            0.5 / epsilon,
            &f_plus,
            -0.5 / epsilon,
            &f_minus,
        )?;
        let analytic = Field::linear_combination(1.0, &linearized_map_apply(v, &d)?, -1.0, &d)?;
        let denom = l2_norm(&analytic).max(1e-30);
        let err = l2_norm(&Field::linear_combination(1.0, &fd, -1.0, &analytic)?) / denom;
        worst = worst.max(err);
    }
    Ok(worst)
}

/// Bundle the three certificates for a solution at `lambda`.
pub fn analyze(v: &Field, lambda: f64, profile: &CurvatureProfile) -> Result<LinearizationReport> {
    Ok(LinearizationReport {
        nondegeneracy_margin: nondegeneracy_margin(v)?,
        mono_margin: constrained_kernel_margin(v)?,
        fd_consistency: frechet_fd_check(v, lambda, profile, 1e-5, 10, 0x5eed)?,
        grid: v.grid(),
    })
}

/// Measured bound constants `‖𝒦f‖_X / ‖f‖₂` over random even directions;
/// the maximum observed ratio is the empirical operator norm into the
/// solution space. All ratios must be finite.
pub fn boundedness_ratios(v: &Field, samples: usize, seed: u64) -> Result<Vec<f64>> {
    let grid = v.grid();
    let mut rng = StdRng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(samples);
    for _ in 0..samples {
        let c = grid.center();
        let mut vals = vec![0.0; grid.len()];
        for j in 0..=grid.m() {
            let y: f64 = rng.gen_range(-1.0..1.0);
            vals[c + j] = y;
            vals[c - j] = y;
        }
        let f = Field::from_values(grid, Parity::Even, vals).expect("mirrored samples are even");
        let image = linearized_map_apply(v, &f)?;
        out.push(x_norm(&image)? / l2_norm(&f));
    }
    Ok(out)
}

// --- binary matrix dump ------------------------------------------------------

const MATRIX_MAGIC: &[u8; 8] = b"LIOUMAT1";

/// Dump a dense matrix for offline analysis: 8-byte magic, little-endian
/// u64 row and column counts, then row-major little-endian f64 entries.
pub fn write_matrix_binary<W: Write>(mut out: W, mat: faer::MatRef<'_, f64>) -> Result<()> {
    out.write_all(MATRIX_MAGIC)?;
    out.write_all(&(mat.nrows() as u64).to_le_bytes())?;
    out.write_all(&(mat.ncols() as u64).to_le_bytes())?;
    for i in 0..mat.nrows() {
        for j in 0..mat.ncols() {
            out.write_all(&mat[(i, j)].to_le_bytes())?;
        }
    }
    Ok(())
}

/// Read back a matrix written by [`write_matrix_binary`].
pub fn read_matrix_binary<R: Read>(mut input: R) -> Result<Mat<f64>> {
    let mut magic = [0u8; 8];
    input.read_exact(&mut magic)?;
    if &magic != MATRIX_MAGIC {
        return Err(Error::InvalidField("not a matrix dump (bad magic)".into()));
    }
    let mut word = [0u8; 8];
    input.read_exact(&mut word)?;
    let rows = u64::from_le_bytes(word) as usize;
    input.read_exact(&mut word)?;
    let cols = u64::from_le_bytes(word) as usize;
    let mut data = vec![0.0; rows * cols];
    for slot in data.iter_mut() {
        input.read_exact(&mut word)?;
        *slot = f64::from_le_bytes(word);
    }
    Ok(Mat::from_fn(rows, cols, |i, j| data[i * cols + j]))
}
