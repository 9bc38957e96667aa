//! Dense matrices over Gaussian rationals with fraction-free rank and
//! determinant.

use std::fmt;
use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

use super::{GaussianRational, LinalgError, Rational};

/// A dense row-major matrix of [`GaussianRational`] entries.
///
/// Serializes as a JSON array of rows, each row an array of scalars.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "MatRepr", into = "MatRepr")]
pub struct Mat {
    rows: usize,
    cols: usize,
    entries: Vec<GaussianRational>,
}

impl Mat {
    pub fn new(rows: usize, cols: usize, entries: Vec<GaussianRational>) -> Result<Self, LinalgError> {
        if entries.len() != rows * cols {
            return Err(LinalgError::EntryCount { rows, cols, got: entries.len() });
        }
        Ok(Self { rows, cols, entries })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, entries: vec![GaussianRational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for k in 0..n {
            m[(k, k)] = GaussianRational::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<GaussianRational>>) -> Result<Self, LinalgError> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != ncols {
                return Err(LinalgError::RaggedRows { row: r, expected: ncols, got: row.len() });
            }
        }
        Ok(Self { rows: nrows, cols: ncols, entries: rows.into_iter().flatten().collect() })
    }

    /// Convenience constructor from integer pairs `(re, im)`, row-major.
    pub fn from_int_rows(rows: &[&[(i64, i64)]]) -> Self {
        let data = rows
            .iter()
            .map(|r| r.iter().map(|&(a, b)| GaussianRational::from_ints(a, b)).collect())
            .collect();
        Self::from_rows(data).expect("literal rows are rectangular")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(GaussianRational::is_zero)
    }

    pub fn entries(&self) -> &[GaussianRational] {
        &self.entries
    }

    /// Sum of `|entry|^2` over all entries.
    pub fn frobenius_norm_sqr(&self) -> Rational {
        self.entries.iter().map(GaussianRational::norm_sqr).sum()
    }

    pub fn scale(&self, c: &GaussianRational) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| e * c).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, LinalgError> {
        self.check_same_shape(other)?;
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect();
        Ok(Self { rows: self.rows, cols: self.cols, entries })
    }

    pub fn matmul(&self, other: &Self) -> Result<Self, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::ShapeMismatch {
                expected_rows: self.cols,
                expected_cols: other.cols,
                got_rows: other.rows,
                got_cols: other.cols,
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let prod = a * &other[(k, j)];
                    out[(i, j)] += &prod;
                }
            }
        }
        Ok(out)
    }

    /// The exact linear combination `sum_k coeffs[k] * mats[k]`.
    pub fn linear_combination(
        coeffs: &[GaussianRational],
        mats: &[Mat],
    ) -> Result<Self, LinalgError> {
        if coeffs.len() != mats.len() {
            return Err(LinalgError::CoefficientCount { coeffs: coeffs.len(), mats: mats.len() });
        }
        let Some(first) = mats.first() else {
            return Err(LinalgError::EmptyCombination);
        };
        let mut acc = Self::zeros(first.rows, first.cols);
        for (c, m) in coeffs.iter().zip(mats) {
            acc.check_same_shape(m)?;
            if c.is_zero() {
                continue;
            }
            for (dst, src) in acc.entries.iter_mut().zip(&m.entries) {
                let prod = c * src;
                *dst += &prod;
            }
        }
        Ok(acc)
    }

    fn check_same_shape(&self, other: &Self) -> Result<(), LinalgError> {
        if self.shape() != other.shape() {
            return Err(LinalgError::ShapeMismatch {
                expected_rows: self.rows,
                expected_cols: self.cols,
                got_rows: other.rows,
                got_cols: other.cols,
            });
        }
        Ok(())
    }

    /// Exact rank over ℂ, by fraction-free (Bareiss) elimination with full
    /// pivoting. The pivot is the first nonzero entry of the remaining
    /// submatrix in column-major scan order, so results are reproducible.
    pub fn rank_exact(&self) -> usize {
        eliminate(&mut self.clone()).rank
    }

    /// Exact determinant of a square matrix.
    pub fn det_exact(&self) -> Result<GaussianRational, LinalgError> {
        if self.rows != self.cols {
            return Err(LinalgError::NotSquare { rows: self.rows, cols: self.cols });
        }
        let outcome = eliminate(&mut self.clone());
        if outcome.rank < self.rows {
            return Ok(GaussianRational::zero());
        }
        // The final pivot is the determinant of the row/column-permuted
        // matrix; undo the permutation signs.
        Ok(if outcome.odd_swaps { -outcome.last_pivot } else { outcome.last_pivot })
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        for i in 0..self.rows {
            self.entries.swap(i * self.cols + a, i * self.cols + b);
        }
    }
}

struct Elimination {
    rank: usize,
    odd_swaps: bool,
    last_pivot: GaussianRational,
}

/// One-pass Bareiss elimination. Each 2x2 cross-multiplication step divides
/// by the previous pivot; over the fraction field that division is always
/// exact and keeps intermediate entries at minor-determinant size.
fn eliminate(m: &mut Mat) -> Elimination {
    let (nr, nc) = (m.rows, m.cols);
    let mut prev = GaussianRational::one();
    let mut odd_swaps = false;
    let mut step = 0;
    while step < nr && step < nc {
        let pivot = (step..nc)
            .flat_map(|j| (step..nr).map(move |i| (i, j)))
            .find(|&(i, j)| !m[(i, j)].is_zero());
        let Some((pi, pj)) = pivot else { break };
        if pi != step {
            m.swap_rows(pi, step);
            odd_swaps = !odd_swaps;
        }
        if pj != step {
            m.swap_cols(pj, step);
            odd_swaps = !odd_swaps;
        }
        for i in step + 1..nr {
            for j in step + 1..nc {
                let num = &(&m[(i, j)] * &m[(step, step)]) - &(&m[(i, step)] * &m[(step, j)]);
                m[(i, j)] = &num / &prev;
            }
            m[(i, step)] = GaussianRational::zero();
        }
        prev = m[(step, step)].clone();
        step += 1;
    }
    Elimination { rank: step, odd_swaps, last_pivot: prev }
}

/// Stacks each matrix of `basis` as one row of its row-major flattening, so
/// the rank of the result is the dimension of the spanned matrix subspace.
///
/// An empty list yields the 0x0 matrix.
pub fn stack_vec(basis: &[Mat]) -> Result<Mat, LinalgError> {
    let Some(first) = basis.first() else {
        return Ok(Mat::zeros(0, 0));
    };
    let mut entries = Vec::with_capacity(basis.len() * first.entries.len());
    for m in basis {
        first.check_same_shape(m)?;
        entries.extend(m.entries.iter().cloned());
    }
    Mat::new(basis.len(), first.rows * first.cols, entries)
}

impl Index<(usize, usize)> for Mat {
    type Output = GaussianRational;
    fn index(&self, (i, j): (usize, usize)) -> &GaussianRational {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of {}x{}", self.rows, self.cols);
        &self.entries[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut GaussianRational {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of {}x{}", self.rows, self.cols);
        &mut self.entries[i * self.cols + j]
    }
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Mat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self[(i, j)].to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

#[derive(Serialize, Deserialize)]
struct MatRepr(Vec<Vec<GaussianRational>>);

impl From<Mat> for MatRepr {
    fn from(m: Mat) -> Self {
        let mut rows = Vec::with_capacity(m.rows);
        let mut it = m.entries.into_iter();
        for _ in 0..m.rows {
            rows.push(it.by_ref().take(m.cols).collect());
        }
        MatRepr(rows)
    }
}

impl TryFrom<MatRepr> for Mat {
    type Error = LinalgError;
    fn try_from(repr: MatRepr) -> Result<Self, LinalgError> {
        Mat::from_rows(repr.0)
    }
}
