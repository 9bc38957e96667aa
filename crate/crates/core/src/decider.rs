//! The randomized SLOCC convertibility decider.
//!
//! A tripartite state converts to a bipartite state of Schmidt rank `d`
//! exactly when the span of its Charlie slices contains a matrix of rank at
//! least `d`. The decision pipeline, cheapest certificate first:
//!
//! 1. **Slice shortcut** — every slice lies in the span, so a single slice
//!    of rank ≥ `d` certifies YES outright.
//! 2. **Flanders fast path** — a subspace of `d_B x d_A` matrices with no
//!    rank-`d` element has dimension below `d * max(d_A, d_B)`; meeting that
//!    bound certifies YES, and a witness is then abundant under sampling.
//! 3. **Exact mode** — the symbolic oracle settles small instances with
//!    zero error.
//! 4. **Sampling** — otherwise `t` independent points with integer real and
//!    imaginary parts in `{1..M}` are tried. Any point whose combination
//!    reaches rank `d` certifies YES. If all fail, the answer is NO with
//!    one-sided error at most `(2d/M)^t` by the Schwartz–Zippel bound.
//!
//! YES answers are always certified by an exact rank computation; only
//! sampled NO answers carry a nonzero (exactly reported) error bound.

use num_bigint::BigInt;
use num_traits::{Pow, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{rational_str, GaussianRational, Mat, Rational};
use crate::oracle::{self, OracleError};
use crate::states::{charlie_slices, support_dim, PureTensor3, StateError, SubspaceBasis};

/// Retry budget for the certified witness searches. Each attempt fails with
/// probability at most 1/32, so exhausting the budget is unreachable in
/// practice; it exists to keep the search a total function.
const WITNESS_SEARCH_CAP: u32 = 4096;

#[derive(Debug, Error)]
pub enum DecideError {
    #[error("target rank must be at least 1")]
    InvalidTargetRank,
    #[error("trial count must be at least 1")]
    NoTrials,
    #[error("set size {set_size} must be larger than 2*d = {twice_rank} for sampled decisions")]
    SetSizeTooSmall { set_size: u64, twice_rank: u64 },
    #[error("coefficient vector has {got} entries, basis has {expected}")]
    CoefficientCount { expected: usize, got: usize },
    #[error("the linear combination is zero; a witness needs a nonzero state")]
    ZeroCombination,
    #[error("witness search exhausted its retry budget; this indicates a defect")]
    WitnessSearchExhausted,
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    State(#[from] StateError),
}

/// Parameters of the randomized protocol: the sample set `{1..M}`, the
/// number of independent trials, and the seed that makes a run replayable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecisionParams {
    pub set_size: u64,
    pub trials: u32,
    pub seed: u64,
}

impl DecisionParams {
    /// Defaults: `M = 64 d` (per-trial failure at most 1/32) and `t = 20`
    /// (aggregate NO-error at most `32^-20`).
    pub fn defaults_for(target_rank: usize, seed: u64) -> Self {
        Self { set_size: 64 * target_rank.max(1) as u64, trials: 20, seed }
    }

    fn with_set_size(self, set_size: u64) -> Self {
        Self { set_size, ..self }
    }
}

/// One sampled coefficient vector: `n` Gaussian integers with real and
/// imaginary parts drawn uniformly from `{1..M}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SamplePoint {
    components: Vec<GaussianRational>,
}

impl SamplePoint {
    pub fn components(&self) -> &[GaussianRational] {
        &self.components
    }

    pub fn into_components(self) -> Vec<GaussianRational> {
        self.components
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Answer {
    Yes,
    No,
}

impl std::fmt::Display for Answer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Answer::Yes => "yes",
            Answer::No => "no",
        })
    }
}

/// Which stage of the pipeline produced the verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Flanders,
    SliceShortcut,
    Sampling,
    Oracle,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Flanders => "flanders",
            Method::SliceShortcut => "slice-shortcut",
            Method::Sampling => "sampling",
            Method::Oracle => "oracle",
        })
    }
}

/// A certified conversion witness: the coefficient vector, the combined
/// matrix `Pi(u)` with its exact rank, and the measurement Charlie performs
/// to leave Alice and Bob holding a state proportional to `Pi(u)`.
///
/// The measurement vector is indexed by the full Charlie dimension:
/// component `k` is the conjugate of the coefficient of slice `k`, with
/// zeros at dropped all-zero slices. Its stated outcome probability is the
/// exact rational `|Pi(u)|^2 / (|u|^2 * |psi|^2)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub u: Vec<GaussianRational>,
    pub pi_u: Mat,
    pub rank: usize,
    pub measurement: Vec<GaussianRational>,
    #[serde(with = "rational_str")]
    pub outcome_probability: Rational,
}

/// The decider's verdict together with everything needed to audit or replay
/// it. YES reports always carry a witness whose rank meets the target;
/// `error_bound` is zero for every certified answer and `(2d/M)^t` for a
/// sampled NO.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecisionReport {
    pub answer: Answer,
    pub target_rank: usize,
    pub method: Method,
    #[serde(flatten)]
    pub params: DecisionParams,
    #[serde(with = "rational_str")]
    pub error_bound: Rational,
    pub witness: Option<Witness>,
}

impl DecisionReport {
    fn certified(
        answer: Answer,
        target_rank: usize,
        method: Method,
        params: DecisionParams,
        witness: Option<Witness>,
    ) -> Self {
        Self { answer, target_rank, method, params, error_bound: Rational::zero(), witness }
    }

    fn sampled_no(target_rank: usize, params: DecisionParams) -> Self {
        let per_trial = Rational::new(BigInt::from(2 * target_rank as u64), BigInt::from(params.set_size));
        Self {
            answer: Answer::No,
            target_rank,
            method: Method::Sampling,
            params,
            error_bound: per_trial.pow(params.trials),
            witness: None,
        }
    }
}

/// Sufficient condition for convertibility: a subspace of dimension at
/// least `d * max(d_A, d_B)` must contain a matrix of rank at least `d`
/// (Flanders' bound). A `false` result is inconclusive, not infeasible.
pub fn flanders_check(basis: &SubspaceBasis, d: usize) -> bool {
    let (db, da) = basis.shape();
    support_dim(basis) as u128 >= d as u128 * da.max(db) as u128
}

/// The deterministic sample point for `(seed, trial, n, M)`: a ChaCha20
/// stream keyed by the seed, with the trial index as the stream number, so
/// trials are independent and individually reproducible. Each of the `2n`
/// integer parts is uniform over `{1..M}`.
pub fn sample_point(params: &DecisionParams, trial: u32, n: usize) -> SamplePoint {
    let m = params.set_size;
    assert!(m >= 1, "sample set must be nonempty");
    let mut rng = ChaCha20Rng::seed_from_u64(params.seed);
    rng.set_stream(trial as u64);
    let components = (0..n)
        .map(|_| {
            let a = rng.gen_range(1..=m);
            let b = rng.gen_range(1..=m);
            GaussianRational::from_bigints(BigInt::from(a), BigInt::from(b))
        })
        .collect();
    SamplePoint { components }
}

/// The exact combination `sum_k u[k] * basis[k]`.
pub fn assemble(basis: &SubspaceBasis, u: &[GaussianRational]) -> Result<Mat, DecideError> {
    if u.len() != basis.len() {
        return Err(DecideError::CoefficientCount { expected: basis.len(), got: u.len() });
    }
    Ok(Mat::linear_combination(u, basis.mats()).expect("basis members share a shape"))
}

/// Builds the certified witness for coefficient vector `u` over the kept
/// (nonzero) slices of `psi`. `basis` must be `charlie_slices(psi)`.
///
/// Projecting Charlie onto the normalized measurement vector leaves Alice
/// and Bob with a state proportional to `Pi(u)`; that fixes the measurement
/// components to the conjugates of `u`, and the outcome probability to
/// `|Pi(u)|^2 / (|u|^2 * |psi|^2)`.
pub fn make_witness(
    psi: &PureTensor3,
    basis: &SubspaceBasis,
    u: &[GaussianRational],
) -> Result<Witness, DecideError> {
    let kept = psi.nonzero_slice_indices();
    debug_assert_eq!(kept.len(), basis.len(), "basis must be the slice basis of psi");
    debug_assert!(
        kept.iter().zip(basis.mats()).all(|(&k, m)| &psi.slice(k) == m),
        "basis must be the slice basis of psi"
    );
    let pi_u = assemble(basis, u)?;
    if pi_u.is_zero() {
        return Err(DecideError::ZeroCombination);
    }
    let rank = pi_u.rank_exact();
    let mut measurement = vec![GaussianRational::zero(); psi.dims().2];
    for (&k, coeff) in kept.iter().zip(u) {
        measurement[k] = coeff.conj();
    }
    let u_norm: Rational = u.iter().map(GaussianRational::norm_sqr).sum();
    let outcome_probability = pi_u.frobenius_norm_sqr() / (u_norm * psi.norm_sqr());
    Ok(Witness { u: u.to_vec(), pi_u, rank, measurement, outcome_probability })
}

/// Decides whether `psi` converts under stochastic LOCC to a bipartite
/// state of Schmidt rank `d`.
///
/// Requires `d >= 1`; sampled mode additionally requires `t >= 1` and
/// `M > 2d`. With `exact` set, undecided instances go to the symbolic
/// oracle instead of sampling and the answer is always certified (the
/// oracle refuses oversized instances rather than guessing).
pub fn decide_slocc(
    psi: &PureTensor3,
    d: usize,
    params: &DecisionParams,
    exact: bool,
) -> Result<DecisionReport, DecideError> {
    decide_pipeline(psi, d, params, exact)
}

/// [`decide_slocc`] for a bare subspace basis. The basis is embedded as the
/// slices of a synthetic tripartite state (`d_C` = basis length), so
/// witnesses refer to that embedding; coefficient vectors index the nonzero
/// members in order.
pub fn decide_slocc_basis(
    basis: &SubspaceBasis,
    d: usize,
    params: &DecisionParams,
    exact: bool,
) -> Result<DecisionReport, DecideError> {
    let psi = PureTensor3::from_slices(basis.mats())?;
    decide_pipeline(&psi, d, params, exact)
}

/// Pure-oracle decision: the verdict comes from the symbolic minors test
/// alone and is always certified, with the pipeline shortcuts disabled.
/// YES answers still carry a sampled-and-verified witness.
pub fn decide_oracle_certified(
    psi: &PureTensor3,
    d: usize,
    params: &DecisionParams,
) -> Result<DecisionReport, DecideError> {
    if d == 0 {
        return Err(DecideError::InvalidTargetRank);
    }
    let basis = charlie_slices(psi);
    let (db, da) = basis.shape();
    if d > da.min(db) {
        return Ok(DecisionReport::certified(Answer::No, d, Method::Oracle, *params, None));
    }
    if oracle::minors_all_zero(&basis, d)? {
        return Ok(DecisionReport::certified(Answer::No, d, Method::Oracle, *params, None));
    }
    let witness = witness_search(psi, &basis, d, params)?;
    Ok(DecisionReport::certified(Answer::Yes, d, Method::Oracle, *params, Some(witness)))
}

fn decide_pipeline(
    psi: &PureTensor3,
    d: usize,
    params: &DecisionParams,
    exact: bool,
) -> Result<DecisionReport, DecideError> {
    if d == 0 {
        return Err(DecideError::InvalidTargetRank);
    }
    if params.trials == 0 {
        return Err(DecideError::NoTrials);
    }
    if !exact && params.set_size <= 2 * d as u64 {
        return Err(DecideError::SetSizeTooSmall {
            set_size: params.set_size,
            twice_rank: 2 * d as u64,
        });
    }
    let basis = charlie_slices(psi);
    let (db, da) = basis.shape();

    // No d x d submatrix even exists: certified NO on dimension grounds
    // (the minors test is vacuously true).
    if d > da.min(db) {
        return Ok(DecisionReport::certified(Answer::No, d, Method::Oracle, *params, None));
    }

    // Stage 1: a single slice of sufficient rank certifies YES.
    for (slot, mat) in basis.mats().iter().enumerate() {
        if mat.rank_exact() >= d {
            let mut u = vec![GaussianRational::zero(); basis.len()];
            u[slot] = GaussianRational::one();
            let witness = make_witness(psi, &basis, &u)?;
            return Ok(DecisionReport::certified(
                Answer::Yes,
                d,
                Method::SliceShortcut,
                *params,
                Some(witness),
            ));
        }
    }

    // Stage 2: Flanders' dimension bound certifies YES; witnesses are then
    // abundant, so sample until one is confirmed by an exact rank.
    if flanders_check(&basis, d) {
        let witness = witness_search(psi, &basis, d, params)?;
        return Ok(DecisionReport::certified(
            Answer::Yes,
            d,
            Method::Flanders,
            *params,
            Some(witness),
        ));
    }

    // Stage 3: exact mode delegates to the symbolic oracle.
    if exact {
        if oracle::minors_all_zero(&basis, d)? {
            return Ok(DecisionReport::certified(Answer::No, d, Method::Oracle, *params, None));
        }
        let witness = witness_search(psi, &basis, d, params)?;
        return Ok(DecisionReport::certified(Answer::Yes, d, Method::Oracle, *params, Some(witness)));
    }

    // Stage 4: Schwartz–Zippel sampling. Trials are pure functions of
    // (seed, trial index); the reported witness is the one from the lowest
    // successful index, so any execution order yields the same report.
    for trial in 0..params.trials {
        let u = sample_point(params, trial, basis.len());
        let pi_u = assemble(&basis, u.components())?;
        if pi_u.rank_exact() >= d {
            let witness = make_witness(psi, &basis, u.components())?;
            return Ok(DecisionReport::certified(
                Answer::Yes,
                d,
                Method::Sampling,
                *params,
                Some(witness),
            ));
        }
    }
    Ok(DecisionReport::sampled_no(d, *params))
}

/// Finds a coefficient vector whose combination reaches rank `d`, for
/// instances already certified to contain one. Samples over an enlarged set
/// (`M' = max(M, 64 d)`) so each attempt succeeds with probability at least
/// 31/32 regardless of the caller's `M`.
fn witness_search(
    psi: &PureTensor3,
    basis: &SubspaceBasis,
    d: usize,
    params: &DecisionParams,
) -> Result<Witness, DecideError> {
    let search_params = params.with_set_size(params.set_size.max(64 * d as u64));
    for trial in 0..WITNESS_SEARCH_CAP {
        let u = sample_point(&search_params, trial, basis.len());
        let pi_u = assemble(basis, u.components())?;
        if pi_u.rank_exact() >= d {
            return make_witness(psi, basis, u.components());
        }
    }
    Err(DecideError::WitnessSearchExhausted)
}
