//! Polynomial identity testing by reduction to SLOCC convertibility.
//!
//! A formula is compiled to a series-parallel algebraic branching program,
//! the ABP to a square matrix whose determinant is exactly the formula's
//! polynomial, and the matrix split into a pencil `P_0 + sum x_i P_i`. The
//! linear span of the pencil matrices contains a nonsingular matrix exactly
//! when that determinant is not identically zero, so feeding the pencil
//! matrices to the convertibility decider as Charlie slices (target rank =
//! matrix dimension) decides the identity.

mod parser;

pub use parser::{parse_formula, Formula, ParseError, ParseErrorKind};

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use thiserror::Error;

use crate::decider::{decide_slocc, DecideError, DecisionParams, DecisionReport};
use crate::linalg::{GaussianRational, Mat};
use crate::oracle::{MultiPoly, PolyMat};
use crate::states::PureTensor3;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PitError {
    #[error("matrix entry at ({row},{col}) has total degree {degree}, affine split needs degree <= 1")]
    EntryDegree { row: usize, col: usize, degree: u32 },
}

/// An edge label: a 1-based variable or a field constant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EdgeWeight {
    Var(usize),
    Const(GaussianRational),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbpEdge {
    pub from: usize,
    pub to: usize,
    pub weight: EdgeWeight,
}

/// A series-parallel algebraic branching program: an edge-weighted DAG
/// computing the sum over source-sink paths of the products of edge
/// weights. Vertices are numbered in topological order (source 0, sink
/// last), so every edge goes from a lower to a higher index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Abp {
    vertex_count: usize,
    source: usize,
    sink: usize,
    edges: Vec<AbpEdge>,
}

impl Abp {
    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn sink(&self) -> usize {
        self.sink
    }

    pub fn edges(&self) -> &[AbpEdge] {
        &self.edges
    }

    /// Largest variable index on any edge, 0 if none.
    pub fn var_count(&self) -> usize {
        self.edges
            .iter()
            .filter_map(|e| match e.weight {
                EdgeWeight::Var(i) => Some(i),
                EdgeWeight::Const(_) => None,
            })
            .max()
            .unwrap_or(0)
    }
}

/// Compiles a formula into an ABP by wiring each subformula between two
/// vertices: a leaf becomes a single edge, an addition shares both
/// endpoints (parallel composition), and a multiplication introduces one
/// midpoint (series composition). The vertex count is `2 + (number of
/// multiplication nodes)`, which never exceeds `size + 1`.
pub fn formula_to_abp(formula: &Formula) -> Abp {
    let mut edges: Vec<(usize, usize, EdgeWeight)> = Vec::new();
    let mut next_vertex = 2usize;
    wire(formula, 0, 1, &mut edges, &mut next_vertex);
    renumber_topologically(next_vertex, 0, 1, edges)
}

fn wire(
    node: &Formula,
    s: usize,
    t: usize,
    edges: &mut Vec<(usize, usize, EdgeWeight)>,
    next_vertex: &mut usize,
) {
    match node {
        Formula::Var(i) => edges.push((s, t, EdgeWeight::Var(*i))),
        Formula::Const(c) => edges.push((s, t, EdgeWeight::Const(c.clone()))),
        Formula::Add(l, r) => {
            wire(l, s, t, edges, next_vertex);
            wire(r, s, t, edges, next_vertex);
        }
        Formula::Mul(l, r) => {
            let mid = *next_vertex;
            *next_vertex += 1;
            wire(l, s, mid, edges, next_vertex);
            wire(r, mid, t, edges, next_vertex);
        }
    }
}

/// Relabels vertices in a deterministic topological order (Kahn's
/// algorithm with smallest-index tie break). The source is the unique
/// vertex with no incoming edge and lands at 0; the sink drains last.
fn renumber_topologically(
    n: usize,
    source: usize,
    sink: usize,
    edges: Vec<(usize, usize, EdgeWeight)>,
) -> Abp {
    let mut indegree = vec![0usize; n];
    let mut adjacency = vec![Vec::new(); n];
    for &(from, to, _) in &edges {
        indegree[to] += 1;
        adjacency[from].push(to);
    }
    let mut ready: BinaryHeap<Reverse<usize>> =
        (0..n).filter(|&v| indegree[v] == 0).map(Reverse).collect();
    let mut new_id = vec![usize::MAX; n];
    let mut position = 0;
    while let Some(Reverse(v)) = ready.pop() {
        new_id[v] = position;
        position += 1;
        for &to in &adjacency[v] {
            indegree[to] -= 1;
            if indegree[to] == 0 {
                ready.push(Reverse(to));
            }
        }
    }
    debug_assert_eq!(position, n, "series-parallel graphs are acyclic");
    debug_assert_eq!(new_id[source], 0, "the source is the unique entry vertex");
    debug_assert_eq!(new_id[sink], n - 1, "the sink drains last");
    let mut relabeled: Vec<AbpEdge> = edges
        .into_iter()
        .map(|(from, to, weight)| AbpEdge { from: new_id[from], to: new_id[to], weight })
        .collect();
    relabeled.sort_by_key(|e| (e.from, e.to));
    Abp { vertex_count: n, source: 0, sink: n - 1, edges: relabeled }
}

/// A square matrix of affine entries (total degree at most 1) in the
/// formula variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineMatrix {
    mat: PolyMat,
}

impl AffineMatrix {
    /// Validates the degree invariant on every entry.
    pub fn new(mat: PolyMat) -> Result<Self, PitError> {
        for row in 0..mat.size() {
            for col in 0..mat.size() {
                let degree = mat.get(row, col).total_degree();
                if degree > 1 {
                    return Err(PitError::EntryDegree { row, col, degree });
                }
            }
        }
        Ok(Self { mat })
    }

    pub fn size(&self) -> usize {
        self.mat.size()
    }

    pub fn nvars(&self) -> usize {
        self.mat.nvars()
    }

    pub fn poly_mat(&self) -> &PolyMat {
        &self.mat
    }
}

/// Realizes the ABP's path polynomial as an `N x N` determinant:
/// `B[j][k]` is minus the total weight of edges `j -> k`, every vertex but
/// the source carries a unit self-loop, and a unit back edge closes sink to
/// source.
///
/// Every cycle cover of `B` is forced through the back edge, so it consists
/// of one source-sink path plus self-loops. A path of length `L`
/// contributes permutation sign `(-1)^L` from its `(L+1)`-cycle and another
/// `(-1)^L` from the negated weights, hence exactly `+` its weight product:
/// `det(B)` is the path polynomial on the nose.
pub fn abp_to_matrix(abp: &Abp) -> AffineMatrix {
    let n = abp.vertex_count();
    let nvars = abp.var_count();
    let mut mat = PolyMat::zeros(n, nvars);
    for edge in abp.edges() {
        let weight = match &edge.weight {
            EdgeWeight::Var(i) => MultiPoly::var(nvars, i - 1),
            EdgeWeight::Const(c) => MultiPoly::constant(nvars, c.clone()),
        };
        let updated = mat.get(edge.from, edge.to) - &weight;
        mat.set(edge.from, edge.to, updated);
    }
    let one = MultiPoly::one(nvars);
    mat.set(abp.sink(), abp.source(), &*mat.get(abp.sink(), abp.source()) + &one);
    for v in 0..n {
        if v != abp.source() {
            let updated = mat.get(v, v) + &one;
            mat.set(v, v, updated);
        }
    }
    AffineMatrix::new(mat).expect("edge weights are affine")
}

/// The matrix pencil `P_0 + sum_i x_i P_i` extracted from an affine matrix:
/// `constant` holds the constant part, `coefficients[i-1]` the coefficient
/// matrix of `x_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PencilFamily {
    pub constant: Mat,
    pub coefficients: Vec<Mat>,
}

impl PencilFamily {
    /// All pencil matrices, constant part first.
    pub fn slices(&self) -> Vec<Mat> {
        let mut out = Vec::with_capacity(1 + self.coefficients.len());
        out.push(self.constant.clone());
        out.extend(self.coefficients.iter().cloned());
        out
    }

    /// Rebuilds the affine matrix `P_0 + sum_i x_i P_i`; exact inverse of
    /// [`pencil_split`].
    pub fn reassemble(&self) -> AffineMatrix {
        let n = self.constant.rows();
        let m = self.coefficients.len();
        let mut mat = PolyMat::zeros(n, m);
        for r in 0..n {
            for c in 0..n {
                let mut entry = MultiPoly::constant(m, self.constant[(r, c)].clone());
                for (i, pi) in self.coefficients.iter().enumerate() {
                    if !pi[(r, c)].is_zero() {
                        entry = &entry + &MultiPoly::var(m, i).scale(&pi[(r, c)]);
                    }
                }
                mat.set(r, c, entry);
            }
        }
        AffineMatrix::new(mat).expect("reassembled pencil is affine")
    }
}

/// Splits an affine matrix into its constant part and one coefficient
/// matrix per variable. A variable that appears nowhere yields a zero
/// coefficient matrix; a variable-free matrix yields an empty list.
pub fn pencil_split(affine: &AffineMatrix) -> PencilFamily {
    let n = affine.size();
    let m = affine.nvars();
    let mut constant = Mat::zeros(n, n);
    let mut coefficients = vec![Mat::zeros(n, n); m];
    for r in 0..n {
        for c in 0..n {
            let entry = affine.poly_mat().get(r, c);
            constant[(r, c)] = entry.constant_part();
            for (i, coeff_mat) in coefficients.iter_mut().enumerate() {
                coeff_mat[(r, c)] = entry.linear_coefficient(i);
            }
        }
    }
    PencilFamily { constant, coefficients }
}

/// Reduces identity testing of `formula` to a convertibility instance: the
/// returned tensor has the pencil matrices as its Charlie slices
/// (`d_A = d_B = N`, `d_C = m + 1`), and the formula's polynomial is not
/// identically zero exactly when the tensor converts to a bipartite state
/// of Schmidt rank `N` (the returned target).
pub fn pit_to_slocc(formula: &Formula) -> (PureTensor3, usize) {
    let affine = abp_to_matrix(&formula_to_abp(formula));
    let target = affine.size();
    let pencil = pencil_split(&affine);
    let psi = PureTensor3::from_slices(&pencil.slices())
        .expect("the pencil's constant part contains the unit back edge");
    (psi, target)
}

/// Full pipeline: reduce to a convertibility instance and decide it. A YES
/// answer means the formula's polynomial is not identically zero.
pub fn pit_decide(
    formula: &Formula,
    params: &DecisionParams,
    exact: bool,
) -> Result<DecisionReport, DecideError> {
    let (psi, target) = pit_to_slocc(formula);
    decide_slocc(&psi, target, params, exact)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decider::Answer;
    use crate::oracle::{minors_all_zero, poly_det_symbolic};
    use crate::states::charlie_slices;
    use crate::testkit::g;
    use rand::Rng;

    fn x(nvars: usize, i: usize) -> MultiPoly {
        MultiPoly::var(nvars, i)
    }

    /// Direct symbolic expansion of a formula — the reference the compiled
    /// determinant is checked against.
    pub(crate) fn expand_formula(f: &Formula, nvars: usize) -> MultiPoly {
        match f {
            Formula::Var(i) => MultiPoly::var(nvars, i - 1),
            Formula::Const(c) => MultiPoly::constant(nvars, c.clone()),
            Formula::Add(l, r) => &expand_formula(l, nvars) + &expand_formula(r, nvars),
            Formula::Mul(l, r) => &expand_formula(l, nvars) * &expand_formula(r, nvars),
        }
    }

    /// Sum over all source-sink paths of the edge weight products,
    /// enumerated explicitly.
    fn path_polynomial(abp: &Abp, nvars: usize) -> MultiPoly {
        fn weight_poly(w: &EdgeWeight, nvars: usize) -> MultiPoly {
            match w {
                EdgeWeight::Var(i) => MultiPoly::var(nvars, i - 1),
                EdgeWeight::Const(c) => MultiPoly::constant(nvars, c.clone()),
            }
        }
        fn walk(abp: &Abp, at: usize, acc: &MultiPoly, total: &mut MultiPoly, nvars: usize) {
            if at == abp.sink() {
                *total = &*total + acc;
                return;
            }
            for e in abp.edges().iter().filter(|e| e.from == at) {
                let next = acc * &weight_poly(&e.weight, nvars);
                walk(abp, e.to, &next, total, nvars);
            }
        }
        let mut total = MultiPoly::zero(nvars);
        walk(abp, abp.source(), &MultiPoly::one(nvars), &mut total, nvars);
        total
    }

    pub(crate) fn random_formula(rng: &mut rand_chacha::ChaCha12Rng, leaves: usize) -> Formula {
        if leaves <= 1 {
            return if rng.gen_bool(0.7) {
                Formula::var(rng.gen_range(1usize..=4))
            } else {
                Formula::Const(crate::testkit::random_scalar_real(rng))
            };
        }
        let left = rng.gen_range(1..leaves);
        let l = random_formula(rng, left);
        let r = random_formula(rng, leaves - left);
        if rng.gen_bool(0.5) {
            Formula::add(l, r)
        } else {
            Formula::mul(l, r)
        }
    }

    #[test]
    fn abp_shapes_for_leaves_and_compositions() {
        let v = formula_to_abp(&Formula::var(1));
        assert_eq!(v.vertex_count(), 2);
        assert_eq!(v.edges().len(), 1);
        assert_eq!((v.source(), v.sink()), (0, 1));
        assert_eq!(v.edges()[0], AbpEdge { from: 0, to: 1, weight: EdgeWeight::Var(1) });

        let sum = formula_to_abp(&parse_formula("x1+x2").unwrap());
        assert_eq!(sum.vertex_count(), 2);
        assert_eq!(sum.edges().len(), 2);
        assert!(sum.edges().iter().all(|e| (e.from, e.to) == (0, 1)));

        let prod = formula_to_abp(&parse_formula("x1*x2").unwrap());
        assert_eq!(prod.vertex_count(), 3);
        assert_eq!(prod.edges().len(), 2);
        assert_eq!(prod.edges()[0], AbpEdge { from: 0, to: 1, weight: EdgeWeight::Var(1) });
        assert_eq!(prod.edges()[1], AbpEdge { from: 1, to: 2, weight: EdgeWeight::Var(2) });
    }

    #[test]
    fn abp_edges_go_forward_and_size_is_bounded() {
        let mut rng = crate::testkit::rng(0xabf);
        for _ in 0..50 {
            let leaves = rng.gen_range(1usize..=8);
            let f = random_formula(&mut rng, leaves);
            let abp = formula_to_abp(&f);
            assert!(abp.edges().iter().all(|e| e.from < e.to));
            assert!(abp.vertex_count() <= f.size() + 1);
            let nvars = f.var_count();
            assert_eq!(path_polynomial(&abp, nvars), expand_formula(&f, nvars));
        }
    }

    #[test]
    fn matrix_examples() {
        // Var 1 -> [[0, -x1], [1, 1]].
        let m = abp_to_matrix(&formula_to_abp(&Formula::var(1)));
        assert_eq!(m.size(), 2);
        assert!(m.poly_mat().get(0, 0).is_zero());
        assert_eq!(m.poly_mat().get(0, 1), &-&x(1, 0));
        assert_eq!(m.poly_mat().get(1, 0), &MultiPoly::one(1));
        assert_eq!(m.poly_mat().get(1, 1), &MultiPoly::one(1));
        assert_eq!(poly_det_symbolic(m.poly_mat()), x(1, 0));

        // x1+x2 -> [[0, -x1-x2], [1, 1]].
        let m = abp_to_matrix(&formula_to_abp(&parse_formula("x1+x2").unwrap()));
        assert_eq!(m.size(), 2);
        assert_eq!(m.poly_mat().get(0, 1), &-&(&x(2, 0) + &x(2, 1)));
        assert_eq!(poly_det_symbolic(m.poly_mat()), &x(2, 0) + &x(2, 1));

        // x1*x2 -> [[0, -x1, 0], [0, 1, -x2], [1, 0, 1]].
        let m = abp_to_matrix(&formula_to_abp(&parse_formula("x1*x2").unwrap()));
        assert_eq!(m.size(), 3);
        assert_eq!(m.poly_mat().get(0, 1), &-&x(2, 0));
        assert_eq!(m.poly_mat().get(1, 2), &-&x(2, 1));
        assert_eq!(m.poly_mat().get(2, 0), &MultiPoly::one(2));
        assert!(m.poly_mat().get(0, 0).is_zero());
        assert!(m.poly_mat().get(0, 2).is_zero());
        assert_eq!(poly_det_symbolic(m.poly_mat()), &x(2, 0) * &x(2, 1));
    }

    #[test]
    fn determinant_fidelity_on_random_formulas() {
        let mut rng = crate::testkit::rng(0xde7);
        for _ in 0..40 {
            let leaves = rng.gen_range(1usize..=8);
            let f = random_formula(&mut rng, leaves);
            let affine = abp_to_matrix(&formula_to_abp(&f));
            assert!(affine.size() <= f.size() + 2);
            let det = poly_det_symbolic(affine.poly_mat());
            assert_eq!(det, expand_formula(&f, f.var_count()), "formula {f}");
        }
    }

    #[test]
    fn pencil_split_examples() {
        // [[0, -x1], [1, 1]] -> P0 = [[0,0],[1,1]], P1 = [[0,-1],[0,0]].
        let affine = abp_to_matrix(&formula_to_abp(&Formula::var(1)));
        let pencil = pencil_split(&affine);
        assert_eq!(pencil.constant, Mat::from_int_rows(&[&[(0, 0), (0, 0)], &[(1, 0), (1, 0)]]));
        assert_eq!(pencil.coefficients.len(), 1);
        assert_eq!(
            pencil.coefficients[0],
            Mat::from_int_rows(&[&[(0, 0), (-1, 0)], &[(0, 0), (0, 0)]])
        );

        // All-constant matrix: no coefficient matrices at all.
        let constant_only = abp_to_matrix(&formula_to_abp(&parse_formula("5").unwrap()));
        let pencil = pencil_split(&constant_only);
        assert!(pencil.coefficients.is_empty());

        // [[x1+x2, 0], [0, 1]] -> P1 = P2 = E11, P0 = E22.
        let mut pm = PolyMat::zeros(2, 2);
        pm.set(0, 0, &x(2, 0) + &x(2, 1));
        pm.set(1, 1, MultiPoly::one(2));
        let affine = AffineMatrix::new(pm).unwrap();
        let pencil = pencil_split(&affine);
        let e11 = Mat::from_int_rows(&[&[(1, 0), (0, 0)], &[(0, 0), (0, 0)]]);
        let e22 = Mat::from_int_rows(&[&[(0, 0), (0, 0)], &[(0, 0), (1, 0)]]);
        assert_eq!(pencil.constant, e22);
        assert_eq!(pencil.coefficients, vec![e11.clone(), e11]);
    }

    #[test]
    fn affine_matrix_rejects_higher_degree() {
        let mut pm = PolyMat::zeros(1, 1);
        pm.set(0, 0, &x(1, 0) * &x(1, 0));
        assert!(matches!(
            AffineMatrix::new(pm),
            Err(PitError::EntryDegree { row: 0, col: 0, degree: 2 })
        ));
    }

    #[test]
    fn pencil_round_trip() {
        let mut rng = crate::testkit::rng(0x9e9);
        for _ in 0..40 {
            let leaves = rng.gen_range(1usize..=7);
            let f = random_formula(&mut rng, leaves);
            let affine = abp_to_matrix(&formula_to_abp(&f));
            assert_eq!(pencil_split(&affine).reassemble(), affine);
        }
    }

    #[test]
    fn reduction_examples() {
        let (psi, d) = pit_to_slocc(&Formula::var(1));
        assert_eq!(d, 2);
        assert_eq!(psi.dims(), (2, 2, 2));
        assert!(!minors_all_zero(&charlie_slices(&psi), d).unwrap());

        let (psi, d) = pit_to_slocc(&parse_formula("1").unwrap());
        assert_eq!(d, 2);
        assert_eq!(psi.dims(), (2, 2, 1));
        assert_eq!(
            psi.slice(0).det_exact().unwrap(),
            g(1, 0),
            "B for the constant formula has determinant 1"
        );
        assert!(!minors_all_zero(&charlie_slices(&psi), d).unwrap());

        let (psi, d) = pit_to_slocc(&parse_formula("x1 - x1").unwrap());
        assert!(minors_all_zero(&charlie_slices(&psi), d).unwrap());
    }

    #[test]
    fn pit_decide_spec_cases() {
        let decide = |text: &str, exact: bool| {
            let f = parse_formula(text).unwrap();
            let (_, d) = pit_to_slocc(&f);
            let params = DecisionParams::defaults_for(d, 0x717);
            pit_decide(&f, &params, exact).unwrap().answer
        };
        for exact in [false, true] {
            assert_eq!(decide("x1*x2 - x2*x1", exact), Answer::No);
            assert_eq!(decide("(x1+x2)*x3 - x1*x3 - x2*x3", exact), Answer::No);
            assert_eq!(decide("x1 + 1", exact), Answer::Yes);
            assert_eq!(decide("x1*x1 - x1", exact), Answer::Yes);
        }
    }

    #[test]
    fn span_lemma_on_random_pencils() {
        // The linear span of the pencil matrices contains a nonsingular
        // matrix exactly when det(P0 + sum x_i P_i) is not identically
        // zero; both sides computed by the symbolic oracle.
        let mut rng = crate::testkit::rng(0x1e44a);
        for _ in 0..100 {
            let n = rng.gen_range(1usize..=3);
            let m = rng.gen_range(0usize..=2);
            let pencil = PencilFamily {
                constant: crate::testkit::random_matrix(&mut rng, n, n),
                coefficients: (0..m)
                    .map(|_| crate::testkit::random_matrix(&mut rng, n, n))
                    .collect(),
            };
            let slices = pencil.slices();
            let Ok(basis) = crate::states::SubspaceBasis::new(slices) else {
                continue; // all matrices zero
            };
            let span_has_nonsingular = !minors_all_zero(&basis, n).unwrap();
            let affine_det_nonzero = !poly_det_symbolic(pencil.reassemble().poly_mat()).is_zero();
            assert_eq!(span_has_nonsingular, affine_det_nonzero);
        }
    }
}
