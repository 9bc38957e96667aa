//! Exact symbolic ground truth for small instances.
//!
//! Two independent certified routes decide whether a matrix subspace
//! contains an element of rank at least `d`:
//!
//! - [`minors_all_zero`] expands every `d x d` minor of the symbolic
//!   combination `u_1 B_1 + ... + u_n B_n` and tests it for the zero
//!   polynomial. The subspace has no rank-`d` element exactly when all
//!   minors vanish identically.
//! - [`grid_decide`] evaluates the combination on the real integer grid
//!   `{0..d}^n` and rank-tests each point. A nonzero minor has degree at
//!   most `d` in each variable and no conjugated variables, so it cannot
//!   vanish on the whole grid; the two routes must always agree.
//!
//! Both are exponential by design and refuse oversized instances outright
//! rather than running unpredictably long.

mod poly;

pub use poly::{poly_det_symbolic, MultiPoly, PolyMat};

use itertools::Itertools;
use thiserror::Error;

use crate::linalg::{GaussianRational, Mat};
use crate::states::SubspaceBasis;

/// Soft limit on the number of spanning matrices (symbolic variables).
pub const MAX_BASIS_LEN: usize = 8;
/// Soft limit on the target rank (minor size).
pub const MAX_TARGET_RANK: usize = 16;
/// Soft limit on `(minor count) * 2^d`, the symbolic expansion budget.
pub const MAX_MINOR_WORK: u128 = 4_000_000;
/// Soft limit on the number of grid evaluation points `(d+1)^n`.
pub const MAX_GRID_POINTS: u128 = 300_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("instance too large for the exact oracle: {reason}")]
    TooLarge { reason: String },
    #[error("polynomial matrix is not square ({rows} rows, offending row has {cols} entries)")]
    NotSquare { rows: usize, cols: usize },
    #[error("polynomial matrix entries disagree in variable count")]
    MixedArity,
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// The symbolic combination `sum_k u_k * basis[k]` as a matrix of linear
/// forms in `n = basis.len()` variables.
fn symbolic_combination(basis: &SubspaceBasis) -> Vec<Vec<MultiPoly>> {
    let n = basis.len();
    let (db, da) = basis.shape();
    let mut rows = vec![vec![MultiPoly::zero(n); da]; db];
    for (k, m) in basis.mats().iter().enumerate() {
        for (r, row) in rows.iter_mut().enumerate() {
            for (c, slot) in row.iter_mut().enumerate() {
                let coeff = &m[(r, c)];
                if !coeff.is_zero() {
                    *slot = &*slot + &MultiPoly::var(n, k).scale(coeff);
                }
            }
        }
    }
    rows
}

fn check_minor_limits(basis: &SubspaceBasis, d: usize) -> Result<(), OracleError> {
    let (db, da) = basis.shape();
    let n = basis.len();
    if n > MAX_BASIS_LEN {
        return Err(OracleError::TooLarge {
            reason: format!("basis has {n} elements, limit {MAX_BASIS_LEN}"),
        });
    }
    if d > MAX_TARGET_RANK {
        return Err(OracleError::TooLarge {
            reason: format!("target rank {d} exceeds limit {MAX_TARGET_RANK}"),
        });
    }
    let minors = binomial(db, d) * binomial(da, d);
    let work = minors.saturating_mul(1u128 << d.min(127));
    if work > MAX_MINOR_WORK {
        return Err(OracleError::TooLarge {
            reason: format!("{minors} minors of size {d} exceed the expansion budget"),
        });
    }
    Ok(())
}

/// True iff every `d x d` minor of the symbolic combination of the basis is
/// identically zero — that is, iff the spanned subspace contains no matrix
/// of rank at least `d`. Exact and certified within the soft limits.
///
/// A target rank larger than `min(d_A, d_B)` has no minors at all and is
/// vacuously true; `d = 0` is vacuously false.
pub fn minors_all_zero(basis: &SubspaceBasis, d: usize) -> Result<bool, OracleError> {
    let (db, da) = basis.shape();
    if d == 0 {
        return Ok(false);
    }
    if d > da.min(db) {
        return Ok(true);
    }
    check_minor_limits(basis, d)?;
    let sym = symbolic_combination(basis);
    for row_set in (0..db).combinations(d) {
        for col_set in (0..da).combinations(d) {
            let rows: Vec<Vec<MultiPoly>> = row_set
                .iter()
                .map(|&r| col_set.iter().map(|&c| sym[r][c].clone()).collect())
                .collect();
            let minor = PolyMat::from_rows(rows).expect("minor is square and uniform");
            if !poly_det_symbolic(&minor).is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// True iff the combination has rank below `d` at every point of the real
/// integer grid `{0..d}^n` — an independent second oracle that must agree
/// with [`minors_all_zero`]: the minors are polynomials of per-variable
/// degree at most `d` with no conjugated variables, so a nonzero one cannot
/// vanish on a grid offering `d+1` values per variable.
pub fn grid_decide(basis: &SubspaceBasis, d: usize) -> Result<bool, OracleError> {
    let (db, da) = basis.shape();
    if d == 0 {
        return Ok(false);
    }
    if d > da.min(db) {
        return Ok(true);
    }
    let n = basis.len();
    if n > MAX_BASIS_LEN {
        return Err(OracleError::TooLarge {
            reason: format!("basis has {n} elements, limit {MAX_BASIS_LEN}"),
        });
    }
    let points = ((d + 1) as u128).checked_pow(n as u32).filter(|&p| p <= MAX_GRID_POINTS);
    if points.is_none() {
        return Err(OracleError::TooLarge {
            reason: format!("grid of ({})^{n} points exceeds limit {MAX_GRID_POINTS}", d + 1),
        });
    }
    let mut point = vec![0u32; n];
    loop {
        let coeffs: Vec<GaussianRational> =
            point.iter().map(|&v| GaussianRational::from_ints(v as i64, 0)).collect();
        let combo = Mat::linear_combination(&coeffs, basis.mats()).expect("basis is uniform");
        if combo.rank_exact() >= d {
            return Ok(false);
        }
        // Odometer increment over {0..d}^n.
        let mut pos = 0;
        loop {
            if pos == n {
                return Ok(true);
            }
            if point[pos] as usize == d {
                point[pos] = 0;
                pos += 1;
            } else {
                point[pos] += 1;
                break;
            }
        }
    }
}
