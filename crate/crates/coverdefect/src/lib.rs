//! Exact computation of Witt-class defect invariants for knots and
//! 3-manifolds obtained from towers of finite abelian covers.
//!
//! The crate is organized bottom-up:
//!
//! * [`interval`] — certified dyadic interval arithmetic (midpoint/radius),
//!   used wherever an exact algebraic number needs a rigorous sign.
//! * [`cyclotomic`] — exact arithmetic in Q(ζ_d) with canonical
//!   representatives modulo the d-th cyclotomic polynomial.
//! * [`numtheory`] — norm residue symbols, norm tests for Q(i)/Q, Pell
//!   solutions, and the dual-prime sequence used to tell invariants apart.
//! * [`witt`] — hermitian forms over Q(ζ_d), Witt reduction, and the
//!   complete invariant triple (signature, rank mod 2, discriminant class).
//! * [`seifert`] — Seifert matrices, Alexander polynomials, and the block
//!   hermitian forms attached to a knot and a root of unity.
//! * [`covers`] — voltage graphs, derived covers of finite abelian groups,
//!   loop-lift bookkeeping, and character enumeration.
//! * [`pipeline`] — end-to-end obstruction computations: infection defects,
//!   Bing-double towers, lens-space seeds, and solvability reports.

pub mod covers;
pub mod cyclotomic;
pub mod interval;
pub mod numtheory;
pub mod pipeline;
pub mod seifert;
pub mod witt;
