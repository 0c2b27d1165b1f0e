//! Exact symbolic computation with Lie algebra contractions and deformations.
//!
//! Everything in this crate is exact: scalars are Gaussian rationals (elements
//! of Q(i) with arbitrary-precision components), possibly carrying named
//! symbolic parameters and integer powers of the distinguished contraction
//! variable `eps`. There is no floating point anywhere, so every reported
//! invariant, limit, and certificate is a theorem about the input, not an
//! approximation.
//!
//! The crate is organised around a handful of layers:
//!
//! * [`scalar`] — Gaussian rationals, sparse multivariate (Laurent in `eps`)
//!   polynomials, rational-function closure, and `eps -> 0` limits.
//! * [`linalg`] — fraction-free exact linear algebra over those scalars.
//! * [`finite`] — finite-dimensional Lie algebras given by structure
//!   constants, with brackets, Jacobi defects, basis changes, and the
//!   classical invariants (derived series, centre, Killing rank).
//! * [`classify`] — the complete isomorphism classification of 3-dimensional
//!   complex Lie algebras.
//! * [`contraction`] — diagonal (generalised Inonu–Wigner) and curve
//!   contractions, enumeration over exponent grids, and exact feasibility of
//!   keep/kill target patterns via Fourier–Motzkin elimination.
//! * [`deformation`] — the low-degree Chevalley–Eilenberg complex, `H^2`,
//!   formal one-parameter families, and the reversal of a contraction into a
//!   deformation family.
//! * [`graded`] — infinite-dimensional graded algebras presented as bracket
//!   templates (Witt-type, loop, affine, and their higher-genus analogues),
//!   with graded contractions, windowed Jacobi checks, and a commutation
//!   check between affinisation and contraction.

pub mod algebras;
pub mod classify;
pub mod contraction;
pub mod deformation;
pub mod feasibility;
pub mod finite;
pub mod graded;
pub mod linalg;
pub mod scalar;
