//! Shared helpers for in-crate unit tests: seeded randomness and naive
//! reference computations kept independent of the production paths.

use num_bigint::BigInt;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::linalg::{GaussianRational, Mat, Rational};

pub fn rng(seed: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed)
}

pub fn g(re: i64, im: i64) -> GaussianRational {
    GaussianRational::from_ints(re, im)
}

pub fn q(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// A rational with numerator and denominator drawn from small integers.
pub fn random_rational(rng: &mut ChaCha12Rng) -> Rational {
    let num = rng.gen_range(-3i64..=3);
    let den = rng.gen_range(1i64..=3);
    q(num, den)
}

pub fn random_scalar(rng: &mut ChaCha12Rng) -> GaussianRational {
    GaussianRational::new(random_rational(rng), random_rational(rng))
}

/// A purely real small rational, for formula constants.
pub fn random_scalar_real(rng: &mut ChaCha12Rng) -> GaussianRational {
    GaussianRational::from_rational(random_rational(rng))
}

pub fn random_nonzero_scalar(rng: &mut ChaCha12Rng) -> GaussianRational {
    loop {
        let z = random_scalar(rng);
        if !z.is_zero() {
            return z;
        }
    }
}

pub fn random_matrix(rng: &mut ChaCha12Rng, rows: usize, cols: usize) -> Mat {
    let entries = (0..rows * cols).map(|_| random_scalar(rng)).collect();
    Mat::new(rows, cols, entries).unwrap()
}

pub fn random_nonzero_matrix(rng: &mut ChaCha12Rng, rows: usize, cols: usize) -> Mat {
    loop {
        let m = random_matrix(rng, rows, cols);
        if !m.is_zero() {
            return m;
        }
    }
}

pub fn random_invertible(rng: &mut ChaCha12Rng, n: usize) -> Mat {
    loop {
        let m = random_matrix(rng, n, n);
        if !m.det_exact().unwrap().is_zero() {
            return m;
        }
    }
}

/// Reference determinant by recursive first-row cofactor expansion.
pub fn naive_det(m: &Mat) -> GaussianRational {
    let n = m.rows();
    assert_eq!(n, m.cols());
    if n == 0 {
        return GaussianRational::one();
    }
    if n == 1 {
        return m[(0, 0)].clone();
    }
    let mut acc = GaussianRational::zero();
    for j in 0..n {
        if m[(0, j)].is_zero() {
            continue;
        }
        let mut sub = Vec::with_capacity(n - 1);
        for i in 1..n {
            let row: Vec<GaussianRational> =
                (0..n).filter(|&c| c != j).map(|c| m[(i, c)].clone()).collect();
            sub.push(row);
        }
        let minor = naive_det(&Mat::from_rows(sub).unwrap());
        let term = &m[(0, j)] * &minor;
        if j % 2 == 0 {
            acc += &term;
        } else {
            acc -= &term;
        }
    }
    acc
}
