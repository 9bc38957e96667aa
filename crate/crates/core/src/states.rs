//! Tripartite and bipartite pure states, and the Alice–Bob support subspace.
//!
//! A tripartite amplitude tensor is stored sparsely and unnormalized; every
//! decision downstream is invariant under global nonzero scaling, so
//! normalization factors (which would leave the rational field) are never
//! required. The Alice–Bob support of a tensor is spanned exactly by its
//! Charlie-index slices, which stay inside ℚ(i) — no eigendecomposition is
//! ever performed.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{rational_str, stack_vec, GaussianRational, Mat, Rational};

#[derive(Debug, Error)]
pub enum StateError {
    #[error("state has no nonzero amplitude")]
    AllZero,
    #[error("all dimensions must be at least 1, got {0}x{1}x{2}")]
    ZeroDimension(usize, usize, usize),
    #[error("entry index ({i},{j},{k}) outside dimensions {da}x{db}x{dc}")]
    IndexOutOfRange { i: usize, j: usize, k: usize, da: usize, db: usize, dc: usize },
    #[error("basis must contain at least one matrix")]
    EmptyBasis,
    #[error("basis matrices disagree in shape")]
    MixedShapes,
    #[error("expected a bipartite state (Charlie dimension 1), got d_C = {0}")]
    NotBipartite(usize),
    #[error("invalid state file: {0}")]
    Json(#[from] serde_json::Error),
}

/// An unnormalized tripartite pure state: a sparse amplitude tensor over
/// Gaussian rationals with dimensions `(d_A, d_B, d_C)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PureTensor3 {
    dims: (usize, usize, usize),
    amps: BTreeMap<(usize, usize, usize), GaussianRational>,
}

impl PureTensor3 {
    /// Builds a tensor from `(index, amplitude)` pairs. Amplitudes at a
    /// repeated index are summed; exact zeros are dropped; at least one
    /// nonzero amplitude must remain.
    pub fn new(
        dims: (usize, usize, usize),
        entries: impl IntoIterator<Item = ((usize, usize, usize), GaussianRational)>,
    ) -> Result<Self, StateError> {
        let (da, db, dc) = dims;
        if da == 0 || db == 0 || dc == 0 {
            return Err(StateError::ZeroDimension(da, db, dc));
        }
        let mut amps: BTreeMap<(usize, usize, usize), GaussianRational> = BTreeMap::new();
        for ((i, j, k), amp) in entries {
            if i >= da || j >= db || k >= dc {
                return Err(StateError::IndexOutOfRange { i, j, k, da, db, dc });
            }
            let slot = amps.entry((i, j, k)).or_insert_with(GaussianRational::zero);
            *slot += &amp;
        }
        amps.retain(|_, v| !v.is_zero());
        if amps.is_empty() {
            return Err(StateError::AllZero);
        }
        Ok(Self { dims, amps })
    }

    /// The tensor whose Charlie-index slices are exactly `mats`, with
    /// `d_C = mats.len()`. Zero matrices in `mats` simply contribute no
    /// amplitudes.
    pub fn from_slices(mats: &[Mat]) -> Result<Self, StateError> {
        let Some(first) = mats.first() else {
            return Err(StateError::EmptyBasis);
        };
        let (db, da) = first.shape();
        let mut entries = Vec::new();
        for (k, m) in mats.iter().enumerate() {
            if m.shape() != (db, da) {
                return Err(StateError::MixedShapes);
            }
            for j in 0..db {
                for i in 0..da {
                    if !m[(j, i)].is_zero() {
                        entries.push(((i, j, k), m[(j, i)].clone()));
                    }
                }
            }
        }
        Self::new((da, db, mats.len()), entries)
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        self.dims
    }

    pub fn amplitude(&self, i: usize, j: usize, k: usize) -> GaussianRational {
        self.amps.get(&(i, j, k)).cloned().unwrap_or_else(GaussianRational::zero)
    }

    /// The `d_B x d_A` matrix `T_k` with `T_k[j][i] = amplitude(i, j, k)`.
    pub fn slice(&self, k: usize) -> Mat {
        let (da, db, _) = self.dims;
        let mut m = Mat::zeros(db, da);
        for (&(i, j, kk), amp) in &self.amps {
            if kk == k {
                m[(j, i)] = amp.clone();
            }
        }
        m
    }

    /// Charlie indices whose slice is nonzero, ascending.
    pub fn nonzero_slice_indices(&self) -> Vec<usize> {
        let mut seen = vec![false; self.dims.2];
        for &(_, _, k) in self.amps.keys() {
            seen[k] = true;
        }
        seen.iter().enumerate().filter_map(|(k, &s)| s.then_some(k)).collect()
    }

    /// Sum of `|amplitude|^2` — the squared norm of the unnormalized state.
    pub fn norm_sqr(&self) -> Rational {
        self.amps.values().map(GaussianRational::norm_sqr).sum()
    }

    /// The tensor scaled by a nonzero constant.
    pub fn scaled(&self, c: &GaussianRational) -> Result<Self, StateError> {
        if c.is_zero() {
            return Err(StateError::AllZero);
        }
        let amps = self.amps.iter().map(|(idx, a)| (*idx, a * c)).collect();
        Ok(Self { dims: self.dims, amps })
    }

    pub fn from_json(text: &str) -> Result<Self, StateError> {
        let file: TensorFile = serde_json::from_str(text)?;
        file.try_into()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&TensorFile::from(self)).expect("tensor serializes")
    }
}

/// A bipartite pure state identified with its `d_B x d_A` coefficient
/// matrix mapping Alice's space into Bob's.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteState {
    matrix: Mat,
}

impl BipartiteState {
    pub fn new(matrix: Mat) -> Result<Self, StateError> {
        if matrix.rows() == 0 || matrix.cols() == 0 || matrix.is_zero() {
            return Err(StateError::AllZero);
        }
        Ok(Self { matrix })
    }

    /// Reads a bipartite state out of a tensor with `d_C = 1`.
    pub fn from_tensor(psi: &PureTensor3) -> Result<Self, StateError> {
        let (_, _, dc) = psi.dims();
        if dc != 1 {
            return Err(StateError::NotBipartite(dc));
        }
        Self::new(psi.slice(0))
    }

    pub fn matrix(&self) -> &Mat {
        &self.matrix
    }
}

/// An ordered spanning set for a subspace of `d_B x d_A` matrices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubspaceBasis {
    shape: (usize, usize),
    mats: Vec<Mat>,
}

impl SubspaceBasis {
    /// Requires a nonempty list of equally-shaped matrices, not all zero.
    /// Individual zero members are permitted.
    pub fn new(mats: Vec<Mat>) -> Result<Self, StateError> {
        let Some(first) = mats.first() else {
            return Err(StateError::EmptyBasis);
        };
        let shape = first.shape();
        if mats.iter().any(|m| m.shape() != shape) {
            return Err(StateError::MixedShapes);
        }
        if mats.iter().all(Mat::is_zero) {
            return Err(StateError::AllZero);
        }
        Ok(Self { shape, mats })
    }

    /// `(d_B, d_A)` — rows and columns of each member.
    pub fn shape(&self) -> (usize, usize) {
        self.shape
    }

    pub fn d_b(&self) -> usize {
        self.shape.0
    }

    pub fn d_a(&self) -> usize {
        self.shape.1
    }

    /// Number of spanning elements (not necessarily independent).
    pub fn len(&self) -> usize {
        self.mats.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mats.is_empty()
    }

    pub fn mats(&self) -> &[Mat] {
        &self.mats
    }
}

/// The Charlie-index slices of `psi`, in ascending index order with zero
/// slices dropped. Their span is exactly the support of the reduced
/// Alice–Bob state, so downstream decisions need no spectral data.
pub fn charlie_slices(psi: &PureTensor3) -> SubspaceBasis {
    let mats: Vec<Mat> = psi.nonzero_slice_indices().into_iter().map(|k| psi.slice(k)).collect();
    SubspaceBasis::new(mats).expect("a valid tensor has at least one nonzero slice")
}

/// Schmidt rank of a bipartite state: the exact rank of its coefficient
/// matrix. Always in `1..=min(d_A, d_B)`.
pub fn schmidt_rank(phi: &BipartiteState) -> usize {
    phi.matrix.rank_exact()
}

/// Dimension of the matrix subspace spanned by the basis members.
pub fn support_dim(basis: &SubspaceBasis) -> usize {
    stack_vec(basis.mats()).expect("basis members share a shape").rank_exact()
}

/// On-disk tensor format: `{"dims": [dA, dB, dC], "entries": [...]}` with
/// omitted entries meaning zero. Bipartite states use `dC = 1`.
#[derive(Debug, Serialize, Deserialize)]
pub struct TensorFile {
    pub dims: [usize; 3],
    pub entries: Vec<TensorFileEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct TensorFileEntry {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    #[serde(with = "rational_str")]
    pub re: Rational,
    #[serde(with = "rational_str")]
    pub im: Rational,
}

impl From<&PureTensor3> for TensorFile {
    fn from(psi: &PureTensor3) -> Self {
        let entries = psi
            .amps
            .iter()
            .map(|(&(i, j, k), amp)| TensorFileEntry {
                i,
                j,
                k,
                re: amp.re().clone(),
                im: amp.im().clone(),
            })
            .collect();
        TensorFile { dims: [psi.dims.0, psi.dims.1, psi.dims.2], entries }
    }
}

impl TryFrom<TensorFile> for PureTensor3 {
    type Error = StateError;

    fn try_from(file: TensorFile) -> Result<Self, StateError> {
        let entries = file
            .entries
            .into_iter()
            .map(|e| ((e.i, e.j, e.k), GaussianRational::new(e.re, e.im)));
        PureTensor3::new((file.dims[0], file.dims[1], file.dims[2]), entries)
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::testkit::{
        g, random_invertible, random_matrix, random_nonzero_matrix, random_scalar, rng,
    };
    use rand::Rng;

    pub(crate) fn ghz() -> PureTensor3 {
        PureTensor3::new((2, 2, 2), [((0, 0, 0), g(1, 0)), ((1, 1, 1), g(1, 0))]).unwrap()
    }

    pub(crate) fn w() -> PureTensor3 {
        PureTensor3::new(
            (2, 2, 2),
            [((0, 0, 1), g(1, 0)), ((0, 1, 0), g(1, 0)), ((1, 0, 0), g(1, 0))],
        )
        .unwrap()
    }

    #[test]
    fn ghz_slices() {
        let basis = charlie_slices(&ghz());
        assert_eq!(basis.shape(), (2, 2));
        assert_eq!(basis.mats().len(), 2);
        assert_eq!(basis.mats()[0], Mat::from_int_rows(&[&[(1, 0), (0, 0)], &[(0, 0), (0, 0)]]));
        assert_eq!(basis.mats()[1], Mat::from_int_rows(&[&[(0, 0), (0, 0)], &[(0, 0), (1, 0)]]));
    }

    #[test]
    fn w_slices() {
        let basis = charlie_slices(&w());
        assert_eq!(basis.mats().len(), 2);
        assert_eq!(basis.mats()[0], Mat::from_int_rows(&[&[(0, 0), (1, 0)], &[(1, 0), (0, 0)]]));
        assert_eq!(basis.mats()[1], Mat::from_int_rows(&[&[(1, 0), (0, 0)], &[(0, 0), (0, 0)]]));
    }

    #[test]
    fn product_tensor_drops_zero_slice() {
        let psi = PureTensor3::new((2, 2, 2), [((0, 0, 0), g(1, 0))]).unwrap();
        let basis = charlie_slices(&psi);
        assert_eq!(basis.mats().len(), 1);
        assert_eq!(basis.mats()[0], Mat::from_int_rows(&[&[(1, 0), (0, 0)], &[(0, 0), (0, 0)]]));
        assert_eq!(psi.nonzero_slice_indices(), vec![0]);
    }

    #[test]
    fn schmidt_rank_examples() {
        let bell = BipartiteState::new(Mat::identity(2)).unwrap();
        assert_eq!(schmidt_rank(&bell), 2);
        let product =
            BipartiteState::new(Mat::from_int_rows(&[&[(1, 0), (0, 0)], &[(0, 0), (0, 0)]]))
                .unwrap();
        assert_eq!(schmidt_rank(&product), 1);
        let ones =
            BipartiteState::new(Mat::from_int_rows(&[&[(1, 0), (1, 0)], &[(1, 0), (1, 0)]]))
                .unwrap();
        assert_eq!(schmidt_rank(&ones), 1);
    }

    #[test]
    fn support_dim_examples() {
        assert_eq!(support_dim(&charlie_slices(&ghz())), 2);
        assert_eq!(support_dim(&charlie_slices(&w())), 2);
        let m = Mat::from_int_rows(&[&[(1, 0), (2, 0)], &[(0, 0), (1, 0)]]);
        let dup = SubspaceBasis::new(vec![m.clone(), m]).unwrap();
        assert_eq!(support_dim(&dup), 1);
    }

    #[test]
    fn construction_errors() {
        assert!(matches!(
            PureTensor3::new((2, 2, 2), std::iter::empty()),
            Err(StateError::AllZero)
        ));
        assert!(matches!(
            PureTensor3::new((2, 2, 2), [((0, 0, 0), g(1, 0)), ((0, 0, 0), g(-1, 0))]),
            Err(StateError::AllZero)
        ));
        assert!(matches!(
            PureTensor3::new((2, 2, 2), [((0, 0, 2), g(1, 0))]),
            Err(StateError::IndexOutOfRange { .. })
        ));
        assert!(matches!(
            PureTensor3::new((0, 2, 2), [((0, 0, 0), g(1, 0))]),
            Err(StateError::ZeroDimension(..))
        ));
        assert!(BipartiteState::new(Mat::zeros(2, 2)).is_err());
        assert!(SubspaceBasis::new(vec![]).is_err());
        assert!(SubspaceBasis::new(vec![Mat::zeros(2, 2)]).is_err());
        assert!(SubspaceBasis::new(vec![Mat::zeros(2, 2), Mat::zeros(2, 3)]).is_err());
    }

    #[test]
    fn support_dim_invariant_under_slice_recombination() {
        let mut rng = rng(0x51eeb);
        for _ in 0..50 {
            let (da, db, dc) = (
                rng.gen_range(1usize..=3),
                rng.gen_range(1usize..=3),
                rng.gen_range(1usize..=3),
            );
            let psi = random_tensor(&mut rng, da, db, dc);
            let basis = charlie_slices(&psi);
            let n = basis.len();
            let recomb = random_invertible(&mut rng, n);
            let mixed: Vec<Mat> = (0..n)
                .map(|r| {
                    let coeffs: Vec<_> = (0..n).map(|c| recomb[(r, c)].clone()).collect();
                    Mat::linear_combination(&coeffs, basis.mats()).unwrap()
                })
                .collect();
            let mixed_basis = SubspaceBasis::new(mixed).unwrap();
            assert_eq!(support_dim(&mixed_basis), support_dim(&basis));
        }
    }

    #[test]
    fn schmidt_rank_invariant_under_invertible_factors() {
        let mut rng = rng(0x10ca1);
        for _ in 0..50 {
            let (da, db) = (rng.gen_range(1usize..=3), rng.gen_range(1usize..=3));
            let m = random_nonzero_matrix(&mut rng, db, da);
            let left = random_invertible(&mut rng, db);
            let right = random_invertible(&mut rng, da);
            let moved = left.matmul(&m).unwrap().matmul(&right).unwrap();
            assert_eq!(
                BipartiteState::new(moved).unwrap().matrix().rank_exact(),
                m.rank_exact()
            );
        }
    }

    #[test]
    fn product_tensors_have_unit_support() {
        let mut rng = rng(0x0ddba11);
        for _ in 0..30 {
            let (da, db, dc) = (
                rng.gen_range(1usize..=3),
                rng.gen_range(1usize..=3),
                rng.gen_range(1usize..=3),
            );
            let a: Vec<_> = (0..da).map(|_| random_scalar(&mut rng)).collect();
            let b: Vec<_> = (0..db).map(|_| random_scalar(&mut rng)).collect();
            let c: Vec<_> = (0..dc).map(|_| random_scalar(&mut rng)).collect();
            let mut entries = Vec::new();
            for (i, ai) in a.iter().enumerate() {
                for (j, bj) in b.iter().enumerate() {
                    for (k, ck) in c.iter().enumerate() {
                        entries.push(((i, j, k), &(ai * bj) * ck));
                    }
                }
            }
            let Ok(psi) = PureTensor3::new((da, db, dc), entries) else {
                continue; // a factor was zero
            };
            let basis = charlie_slices(&psi);
            assert_eq!(support_dim(&basis), 1);
            assert!(basis.mats().iter().all(|m| m.rank_exact() <= 1));
        }
    }

    #[test]
    fn slices_are_nonzero_and_bounded() {
        let mut rng = rng(0xcafe);
        for _ in 0..40 {
            let (da, db, dc) = (
                rng.gen_range(1usize..=3),
                rng.gen_range(1usize..=3),
                rng.gen_range(1usize..=4),
            );
            let psi = random_tensor(&mut rng, da, db, dc);
            let basis = charlie_slices(&psi);
            assert!(basis.len() <= dc);
            assert!(basis.mats().iter().all(|m| !m.is_zero()));
        }
    }

    #[test]
    fn from_slices_round_trips_charlie_slices() {
        let mut rng = rng(0x77aa);
        for _ in 0..30 {
            let mats: Vec<Mat> = (0..rng.gen_range(1usize..=3))
                .map(|_| random_nonzero_matrix(&mut rng, 2, 3))
                .collect();
            let psi = PureTensor3::from_slices(&mats).unwrap();
            assert_eq!(psi.dims(), (3, 2, mats.len()));
            let back = charlie_slices(&psi);
            assert_eq!(back.mats(), &mats[..]);
        }
    }

    #[test]
    fn json_format_round_trip() {
        let text = r#"{
            "dims": [2, 2, 2],
            "entries": [
                {"i": 0, "j": 0, "k": 0, "re": "1", "im": "0"},
                {"i": 1, "j": 1, "k": 1, "re": "-1/2", "im": "3"}
            ]
        }"#;
        let psi = PureTensor3::from_json(text).unwrap();
        assert_eq!(psi.amplitude(1, 1, 1), GaussianRational::new(crate::testkit::q(-1, 2), crate::testkit::q(3, 1)));
        let again = PureTensor3::from_json(&psi.to_json()).unwrap();
        assert_eq!(again, psi);
        assert!(matches!(PureTensor3::from_json("{"), Err(StateError::Json(_))));
        let all_zero = r#"{"dims": [1,1,1], "entries": []}"#;
        assert!(matches!(PureTensor3::from_json(all_zero), Err(StateError::AllZero)));
    }

    #[test]
    fn bipartite_from_tensor_requires_dc_one() {
        assert!(matches!(BipartiteState::from_tensor(&ghz()), Err(StateError::NotBipartite(2))));
        let flat = PureTensor3::new((2, 2, 1), [((0, 0, 0), g(1, 0)), ((1, 1, 0), g(1, 0))]).unwrap();
        let phi = BipartiteState::from_tensor(&flat).unwrap();
        assert_eq!(schmidt_rank(&phi), 2);
    }

    pub(crate) fn random_tensor(
        rng: &mut rand_chacha::ChaCha12Rng,
        da: usize,
        db: usize,
        dc: usize,
    ) -> PureTensor3 {
        loop {
            let mut entries = Vec::new();
            for i in 0..da {
                for j in 0..db {
                    for k in 0..dc {
                        if rng.gen_bool(0.6) {
                            entries.push(((i, j, k), random_scalar(rng)));
                        }
                    }
                }
            }
            if let Ok(psi) = PureTensor3::new((da, db, dc), entries) {
                return psi;
            }
        }
    }

    #[test]
    fn random_matrix_smoke() {
        let mut r = rng(1);
        let m = random_matrix(&mut r, 2, 2);
        assert_eq!(m.shape(), (2, 2));
    }
}
