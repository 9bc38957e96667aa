//! Sparse multivariate polynomials over Gaussian rationals, and square
//! polynomial matrices with exact symbolic determinants.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::linalg::GaussianRational;

use super::OracleError;

/// A sparse multivariate polynomial: a map from exponent vectors to nonzero
/// Gaussian-rational coefficients. The zero polynomial stores no terms.
///
/// All operands of an arithmetic operation must share the same variable
/// count; mixing arities is a programming error and panics.
#[derive(Clone, PartialEq, Eq)]
pub struct MultiPoly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, GaussianRational>,
}

impl MultiPoly {
    pub fn zero(nvars: usize) -> Self {
        Self { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: GaussianRational) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, GaussianRational::one())
    }

    /// The variable with 0-based index `idx`.
    pub fn var(nvars: usize, idx: usize) -> Self {
        assert!(idx < nvars, "variable index {idx} out of {nvars}");
        let mut exps = vec![0; nvars];
        exps[idx] = 1;
        let mut p = Self::zero(nvars);
        p.terms.insert(exps, GaussianRational::one());
        p
    }

    pub fn monomial(nvars: usize, exps: Vec<u32>, coeff: GaussianRational) -> Self {
        assert_eq!(exps.len(), nvars);
        let mut p = Self::zero(nvars);
        if !coeff.is_zero() {
            p.terms.insert(exps, coeff);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], &GaussianRational)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), c))
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// Maximum total degree of any term; 0 for the zero polynomial.
    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn coefficient(&self, exps: &[u32]) -> GaussianRational {
        self.terms.get(exps).cloned().unwrap_or_else(GaussianRational::zero)
    }

    /// Coefficient of the constant monomial.
    pub fn constant_part(&self) -> GaussianRational {
        self.coefficient(&vec![0; self.nvars])
    }

    /// Coefficient of the bare variable `idx` (degree-1 monomial).
    pub fn linear_coefficient(&self, idx: usize) -> GaussianRational {
        let mut exps = vec![0; self.nvars];
        exps[idx] = 1;
        self.coefficient(&exps)
    }

    pub fn scale(&self, c: &GaussianRational) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        Self {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    fn add_term(&mut self, exps: &[u32], coeff: &GaussianRational) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.get_mut(exps) {
            Some(slot) => {
                *slot += coeff;
                if slot.is_zero() {
                    self.terms.remove(exps);
                }
            }
            None => {
                self.terms.insert(exps.to_vec(), coeff.clone());
            }
        }
    }

    fn assert_same_arity(&self, other: &Self) {
        assert_eq!(
            self.nvars, other.nvars,
            "polynomial arity mismatch: {} vs {}",
            self.nvars, other.nvars
        );
    }
}

impl Add for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        self.assert_same_arity(rhs);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e, c);
        }
        out
    }
}

impl Sub for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        self + &(-rhs)
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        MultiPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }
}

impl Mul for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        self.assert_same_arity(rhs);
        let mut out = MultiPoly::zero(self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let exps: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                let coeff = ca * cb;
                out.add_term(&exps, &coeff);
            }
        }
        out
    }
}

impl fmt::Display for MultiPoly {
    /// Human-readable form with 1-based variables, e.g. `2*x1^2*x2 - x3`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (idx, (exps, coeff)) in self.terms.iter().enumerate() {
            if idx > 0 {
                write!(f, " + ")?;
            }
            let vars: Vec<String> = exps
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(v, &e)| if e == 1 { format!("x{}", v + 1) } else { format!("x{}^{}", v + 1, e) })
                .collect();
            if vars.is_empty() {
                write!(f, "({coeff})")?;
            } else if coeff.is_one() {
                write!(f, "{}", vars.join("*"))?;
            } else {
                write!(f, "({coeff})*{}", vars.join("*"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A square matrix of [`MultiPoly`] entries sharing one variable count.
#[derive(Clone, PartialEq, Eq)]
pub struct PolyMat {
    size: usize,
    nvars: usize,
    entries: Vec<MultiPoly>,
}

impl PolyMat {
    pub fn from_rows(rows: Vec<Vec<MultiPoly>>) -> Result<Self, OracleError> {
        let size = rows.len();
        let nvars = rows.first().and_then(|r| r.first()).map_or(0, MultiPoly::nvars);
        for row in &rows {
            if row.len() != size {
                return Err(OracleError::NotSquare { rows: size, cols: row.len() });
            }
            if row.iter().any(|p| p.nvars() != nvars) {
                return Err(OracleError::MixedArity);
            }
        }
        Ok(Self { size, nvars, entries: rows.into_iter().flatten().collect() })
    }

    pub fn zeros(size: usize, nvars: usize) -> Self {
        Self { size, nvars, entries: vec![MultiPoly::zero(nvars); size * size] }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn get(&self, r: usize, c: usize) -> &MultiPoly {
        &self.entries[r * self.size + c]
    }

    pub fn set(&mut self, r: usize, c: usize, p: MultiPoly) {
        assert_eq!(p.nvars(), self.nvars);
        self.entries[r * self.size + c] = p;
    }
}

impl fmt::Debug for PolyMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "PolyMat {}x{} [", self.size, self.size)?;
        for r in 0..self.size {
            let row: Vec<String> = (0..self.size).map(|c| self.get(r, c).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Exact symbolic determinant by Laplace (cofactor) expansion along rows,
/// memoized over column subsets so shared minors are expanded once.
/// Intended for sizes up to roughly 10–12; cost grows as `2^n`.
pub fn poly_det_symbolic(m: &PolyMat) -> MultiPoly {
    let n = m.size();
    if n == 0 {
        return MultiPoly::one(m.nvars());
    }
    assert!(n < usize::BITS as usize, "matrix too large for subset expansion");
    // minor[mask] = det of the top-|mask| rows restricted to columns in mask.
    let mut minor: Vec<Option<MultiPoly>> = vec![None; 1 << n];
    minor[0] = Some(MultiPoly::one(m.nvars()));
    for mask in 1usize..(1 << n) {
        let k = mask.count_ones() as usize;
        let row = k - 1;
        let mut acc = MultiPoly::zero(m.nvars());
        let mut sign_flip = (k - 1) % 2 == 1;
        let mut rest = mask;
        while rest != 0 {
            let col = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let entry = m.get(row, col);
            if !entry.is_zero() {
                let sub = minor[mask & !(1 << col)].as_ref().expect("smaller mask filled");
                let term = entry * sub;
                acc = if sign_flip { &acc - &term } else { &acc + &term };
            }
            sign_flip = !sign_flip;
        }
        minor[mask] = Some(acc);
    }
    minor[(1 << n) - 1].take().expect("full mask filled")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testkit::{g, random_scalar, rng};
    use rand::Rng;

    fn x(nvars: usize, i: usize) -> MultiPoly {
        MultiPoly::var(nvars, i)
    }

    #[test]
    fn det_single_variable() {
        let m = PolyMat::from_rows(vec![vec![x(1, 0)]]).unwrap();
        assert_eq!(poly_det_symbolic(&m), x(1, 0));
    }

    #[test]
    fn det_diagonal() {
        let m = PolyMat::from_rows(vec![
            vec![x(2, 0), MultiPoly::zero(2)],
            vec![MultiPoly::zero(2), x(2, 1)],
        ])
        .unwrap();
        assert_eq!(poly_det_symbolic(&m), &x(2, 0) * &x(2, 1));
    }

    #[test]
    fn det_w_state_instance() {
        // [[u2, u1], [u1, 0]] expands to -u1^2.
        let m = PolyMat::from_rows(vec![vec![x(2, 1), x(2, 0)], vec![x(2, 0), MultiPoly::zero(2)]])
            .unwrap();
        let det = poly_det_symbolic(&m);
        assert_eq!(det, -&(&x(2, 0) * &x(2, 0)));
    }

    #[test]
    fn det_of_upper_triangular_is_diagonal_product() {
        let mut rng = rng(0x0111);
        for _ in 0..50 {
            let n = rng.gen_range(1usize..=4);
            let nvars = 2;
            let mut m = PolyMat::zeros(n, nvars);
            let mut expected = MultiPoly::one(nvars);
            for r in 0..n {
                for c in r..n {
                    let p = random_linear(&mut rng, nvars);
                    if r == c {
                        expected = &expected * &p;
                    }
                    m.set(r, c, p);
                }
            }
            assert_eq!(poly_det_symbolic(&m), expected);
        }
    }

    #[test]
    fn det_matches_leibniz_expansion() {
        let mut rng = rng(0x1e1b);
        for _ in 0..30 {
            let n = rng.gen_range(1usize..=4);
            let rows: Vec<Vec<MultiPoly>> =
                (0..n).map(|_| (0..n).map(|_| random_linear(&mut rng, 2)).collect()).collect();
            let m = PolyMat::from_rows(rows).unwrap();
            assert_eq!(poly_det_symbolic(&m), leibniz_det(&m));
        }
    }

    #[test]
    fn rejects_ragged_and_mixed() {
        assert!(PolyMat::from_rows(vec![vec![x(1, 0)], vec![x(1, 0), x(1, 0)]]).is_err());
        assert!(PolyMat::from_rows(vec![vec![x(1, 0), x(2, 0)], vec![x(1, 0), x(1, 0)]]).is_err());
    }

    #[test]
    fn empty_det_is_one() {
        let m = PolyMat::from_rows(vec![]).unwrap();
        assert_eq!(poly_det_symbolic(&m), MultiPoly::one(0));
    }

    #[test]
    fn zero_coefficients_never_stored() {
        let a = MultiPoly::constant(2, g(2, 0));
        let b = MultiPoly::constant(2, g(-2, 0));
        assert_eq!((&a + &b).term_count(), 0);
        let p = &x(2, 0) + &MultiPoly::constant(2, g(1, 0));
        let q = &x(2, 0) - &MultiPoly::constant(2, g(1, 0));
        let prod = &p * &q; // x1^2 - 1: the cross terms cancel
        assert_eq!(prod.term_count(), 2);
        assert!(prod.terms().all(|(_, c)| !c.is_zero()));
    }

    #[test]
    fn display_reads_naturally() {
        let p = &(&x(2, 0) * &x(2, 0)) + &MultiPoly::monomial(2, vec![0, 1], g(-2, 0));
        assert_eq!(p.to_string(), "(-2)*x2 + x1^2");
    }

    pub(crate) fn random_linear(rng: &mut rand_chacha::ChaCha12Rng, nvars: usize) -> MultiPoly {
        let mut p = MultiPoly::constant(nvars, random_scalar(rng));
        for v in 0..nvars {
            p = &p + &MultiPoly::var(nvars, v).scale(&random_scalar(rng));
        }
        p
    }

    /// Reference determinant: explicit signed sum over all permutations,
    /// with the sign recomputed from inversion counts.
    pub(crate) fn leibniz_det(m: &PolyMat) -> MultiPoly {
        let n = m.size();
        let mut acc = MultiPoly::zero(m.nvars());
        let mut perm: Vec<usize> = (0..n).collect();
        loop {
            let inversions = (0..n)
                .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
                .filter(|&(a, b)| perm[a] > perm[b])
                .count();
            let mut term = MultiPoly::one(m.nvars());
            for (r, &c) in perm.iter().enumerate() {
                term = &term * m.get(r, c);
            }
            acc = if inversions % 2 == 0 { &acc + &term } else { &acc - &term };
            if !next_permutation(&mut perm) {
                break;
            }
        }
        acc
    }

    fn next_permutation(p: &mut [usize]) -> bool {
        if p.len() < 2 {
            return false;
        }
        let mut i = p.len() - 1;
        while i > 0 && p[i - 1] >= p[i] {
            i -= 1;
        }
        if i == 0 {
            return false;
        }
        let mut j = p.len() - 1;
        while p[j] <= p[i - 1] {
            j -= 1;
        }
        p.swap(i - 1, j);
        p[i..].reverse();
        true
    }
}
