//! Independent oracles and model diagnostics.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{build_scalar_graph, invert_block, VertexSubset};
use crate::model::{BlockPartition, InformationModel};

const POWER_MAX_ITERATIONS: usize = 10_000;
const POWER_TOLERANCE: f64 = 1e-10;

/// Dense inverse by LU with partial pivoting.
pub fn direct_inverse(model: &InformationModel) -> Result<DMatrix<f64>> {
    invert_block(model.information(), 0.0).ok_or(Error::Singular {
        deleted: Vec::new(),
    })
}

/// `ln |det M|` and the sign of `det M` from an LU factorization. The empty
/// matrix has determinant 1.
pub fn log_determinant(m: &DMatrix<f64>) -> (f64, f64) {
    if m.nrows() == 0 {
        return (0.0, 1.0);
    }
    let lu = m.clone().lu();
    let mut sign: f64 = lu.p().determinant();
    let mut log_abs = 0.0;
    for d in lu.u().diagonal().iter() {
        if *d == 0.0 {
            return (f64::NEG_INFINITY, 0.0);
        }
        sign *= d.signum();
        log_abs += d.abs().ln();
    }
    (log_abs, sign)
}

/// Principal submatrix with the rows and columns in `removed` deleted.
fn principal_minor(j: &DMatrix<f64>, removed: &VertexSubset) -> DMatrix<f64> {
    let keep: Vec<usize> = (0..j.nrows()).filter(|&i| !removed.contains(i)).collect();
    DMatrix::from_fn(keep.len(), keep.len(), |r, c| j[(keep[r], keep[c])])
}

/// `Σ_ωα` from the determinant form of the simple-path sum:
/// `Σ_p (-1)^ℓ φ[p] det J^{p} / det J`, where `J^{p}` removes the rows and
/// columns of every vertex on `p` and `φ[p]` is the product of edge entries
/// along `p`. Valid only for scalar (commuting) entries. Indices are 0-based.
pub fn determinant_formula_entry(
    model: &InformationModel,
    partition: &BlockPartition,
    alpha: usize,
    omega: usize,
) -> Result<f64> {
    if !partition.is_singletons() {
        return Err(Error::UnsupportedPartition(
            "the determinant formula needs commuting scalar entries",
        ));
    }
    let graph = build_scalar_graph(model);
    let n = graph.num_vertices();
    let j = model.information();
    let (log_det, det_sign) = log_determinant(j);
    if det_sign == 0.0 {
        return Err(Error::Singular {
            deleted: Vec::new(),
        });
    }

    let mut total = 0.0;
    for path in graph.simple_paths(&VertexSubset::empty(n), alpha, omega)? {
        let weight: f64 = path.vertices.windows(2).map(|e| j[(e[1], e[0])]).product();
        let removed = VertexSubset::from_vertices(n, path.vertices.iter().copied());
        let (log_minor, minor_sign) = log_determinant(&principal_minor(j, &removed));
        if minor_sign == 0.0 {
            continue;
        }
        let sign = if path.len() % 2 == 0 { 1.0 } else { -1.0 };
        total += sign * weight * minor_sign * det_sign * (log_minor - log_det).exp();
    }
    Ok(total)
}

/// Outcome of [`check_positive_definite`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Definiteness {
    PositiveDefinite,
    Singular,
    Indefinite,
}

/// Cholesky-based classification. A factorization whose smallest squared
/// pivot is below `1e-14` times the largest diagonal entry counts as singular.
pub fn check_positive_definite(model: &InformationModel) -> Definiteness {
    let j = model.information();
    let max_diag = j.diagonal().iter().fold(0.0f64, |m, d| m.max(d.abs()));
    match j.clone().cholesky() {
        Some(ch) => {
            let min_pivot = ch
                .l_dirty()
                .diagonal()
                .iter()
                .fold(f64::INFINITY, |m, d| m.min(d * d));
            if min_pivot <= 1e-14 * max_diag {
                Definiteness::Singular
            } else {
                Definiteness::PositiveDefinite
            }
        }
        None => {
            if invert_block(j, 0.0).is_none() {
                Definiteness::Singular
            } else {
                Definiteness::Indefinite
            }
        }
    }
}

/// Errors unless the model is numerically positive definite.
pub fn require_positive_definite(model: &InformationModel) -> Result<()> {
    match check_positive_definite(model) {
        Definiteness::PositiveDefinite => Ok(()),
        Definiteness::Singular => Err(Error::Singular {
            deleted: Vec::new(),
        }),
        Definiteness::Indefinite => Err(Error::NotPositiveDefinite),
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct DiagnosticReport {
    /// `ρ(|I - J|)`.
    pub spectral_radius_abs_r: f64,
    /// `ρ(|I - J|) < 1` (and the model is positive definite).
    pub is_walk_summable: bool,
    pub is_positive_definite: bool,
    pub min_eigenvalue_estimate: f64,
    /// False when a power iteration hit its iteration cap.
    pub converged: bool,
}

/// Walk-summability, definiteness and smallest-eigenvalue diagnostics.
pub fn diagnose(model: &InformationModel) -> DiagnosticReport {
    let j = model.information();
    let n = j.nrows();
    let abs_r = DMatrix::from_fn(n, n, |r, c| {
        let id = if r == c { 1.0 } else { 0.0 };
        (id - j[(r, c)]).abs()
    });
    let (rho, rho_converged) = perron_root(&abs_r);
    let is_positive_definite = check_positive_definite(model) == Definiteness::PositiveDefinite;
    let (min_eig, eig_converged) = min_eigenvalue(j, is_positive_definite);
    DiagnosticReport {
        spectral_radius_abs_r: rho,
        is_walk_summable: rho < 1.0 && is_positive_definite,
        is_positive_definite,
        min_eigenvalue_estimate: min_eig,
        converged: rho_converged && eig_converged,
    }
}

/// Spectral radius of a nonnegative matrix by power iteration from the
/// all-ones vector.
///
/// Iterates on `A + I`, which has the same Perron vector and cannot
/// oscillate on periodic (e.g. bipartite) patterns. Stops when the
/// Collatz-Wielandt bounds `min_i (Ax)_i/x_i <= ρ <= max_i (Ax)_i/x_i` meet
/// to the relative tolerance, or when the estimate stops moving.
pub fn perron_root(a: &DMatrix<f64>) -> (f64, bool) {
    let n = a.nrows();
    if n == 0 {
        return (0.0, true);
    }
    let mut x = DVector::from_element(n, 1.0);
    let mut previous = f64::NAN;
    for _ in 0..POWER_MAX_ITERATIONS {
        let ax = a * &x;
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for i in 0..n {
            let ratio = ax[i] / x[i];
            lo = lo.min(ratio);
            hi = hi.max(ratio);
        }
        if hi == 0.0 {
            return (0.0, true);
        }
        if hi - lo <= POWER_TOLERANCE * hi {
            return (0.5 * (hi + lo), true);
        }
        let shifted = ax + &x;
        let norm = shifted.amax();
        let estimate = norm / x.amax() - 1.0;
        x = shifted / norm;
        if (estimate - previous).abs() <= 1e-3 * POWER_TOLERANCE * estimate.abs() {
            return (hi, true);
        }
        previous = estimate;
    }
    let ax = a * &x;
    let hi = (0..n).map(|i| ax[i] / x[i]).fold(0.0, f64::max);
    (hi, false)
}

/// Dominant eigenvalue of a symmetric matrix by power iteration with a
/// Rayleigh-quotient estimate.
fn dominant_eigenvalue(m: &DMatrix<f64>) -> (f64, bool) {
    let n = m.nrows();
    // a deterministic start vector with no special symmetry
    let mut x = DVector::from_fn(n, |i, _| 1.0 + (i as f64 + 1.0).sqrt().fract());
    x /= x.norm();
    let mut previous = f64::NAN;
    for _ in 0..POWER_MAX_ITERATIONS {
        let y = m * &x;
        let lambda = x.dot(&y);
        let norm = y.norm();
        if norm == 0.0 {
            return (0.0, true);
        }
        x = y / norm;
        if (lambda - previous).abs() <= POWER_TOLERANCE * lambda.abs().max(f64::MIN_POSITIVE) {
            return (lambda, true);
        }
        previous = lambda;
    }
    (previous, false)
}

/// Smallest eigenvalue of `J`: inverse iteration when `J` is positive
/// definite, otherwise power iteration on `σI - J` with a Gershgorin shift.
fn min_eigenvalue(j: &DMatrix<f64>, positive_definite: bool) -> (f64, bool) {
    let n = j.nrows();
    if positive_definite {
        if let Some(inv) = invert_block(j, 0.0) {
            let (mu, ok) = dominant_eigenvalue(&inv);
            return (1.0 / mu, ok);
        }
    }
    let sigma = (0..n)
        .map(|r| {
            j[(r, r)]
                + (0..n)
                    .filter(|&c| c != r)
                    .map(|c| j[(r, c)].abs())
                    .sum::<f64>()
        })
        .fold(f64::NEG_INFINITY, f64::max);
    let shifted = DMatrix::identity(n, n) * sigma - j;
    let (mu, ok) = dominant_eigenvalue(&shifted);
    (sigma - mu, ok)
}
