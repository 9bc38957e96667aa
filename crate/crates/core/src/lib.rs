//! Exact decision engine for tripartite-to-bipartite SLOCC convertibility.
//!
//! Given a tripartite pure state shared by Alice, Bob and Charlie, this crate
//! decides whether it can be converted by stochastic LOCC into a bipartite
//! state of a given Schmidt rank. The criterion is purely linear-algebraic:
//! conversion is feasible exactly when the span of the state's Charlie-index
//! slices contains a matrix of rank at least the target — an instance of
//! Edmonds' problem on matrix subspaces.
//!
//! Everything runs over exact Gaussian-rational scalars, so YES answers are
//! always certified by an exact rank computation and only randomized NO
//! answers carry a (reported, exact) error bound. The [`pit`] module closes
//! the loop in the other direction: any arithmetic formula can be compiled
//! into such a decision instance, turning the engine into a polynomial
//! identity tester.
//!
//! Module map:
//! - [`linalg`]: Gaussian-rational scalars and fraction-free rank/determinant.
//! - [`states`]: tripartite/bipartite states and the slice basis of the
//!   Alice–Bob support.
//! - [`decider`]: the randomized decision procedure with certified witnesses.
//! - [`oracle`]: exact symbolic ground truth for small instances.
//! - [`pit`]: formula parsing, branching-program compilation, and the
//!   reduction from identity testing to convertibility.
//! - [`cli`]: the command-line front end.

pub mod cli;
pub mod decider;
pub mod linalg;
pub mod oracle;
pub mod pit;
pub mod states;

#[cfg(test)]
pub(crate) mod testkit;
