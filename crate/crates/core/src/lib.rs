//! Combinatorics of decorated plane-curve germs and the sandwiched surface
//! singularities they define.
//!
//! The crate is organised bottom-up:
//!
//! - [`germ`]: proximity clusters, branches, decorations and the numerical
//!   invariants of a germ (multiplicity sequences, δ, total multiplicities,
//!   intersection numbers, standardness).
//! - [`resolution`]: the blow-up process fixed by a decorated germ, the full
//!   exceptional dual graph, the sandwiched graph `E(C,l)` and the marking.
//! - [`plumbing`]: weighted trees, blow-downs, negative definiteness and
//!   certified recognition of sandwiched graphs.
//! - [`incidence`]: incidence matrices, their constraint equations, canonical
//!   forms up to column permutation, orderly enumeration and realizability by
//!   translated lines.
//! - [`fillings`]: sphere Gram matrices, cap handle descriptions, Euler
//!   numbers, kernel lattices and filling-count lower bounds.
//!
//! Everything is exact. Combinatorial data lives in machine integers; the
//! linear algebra in [`linalg`] is generic over the scalar (see [`scalar`])
//! and is instantiated with arbitrary-precision integers and rationals.

pub mod fillings;
pub mod germ;
pub mod incidence;
pub mod linalg;
pub mod plumbing;
pub mod resolution;
pub mod scalar;
pub mod syntax;

/// Arbitrary-precision integer used for determinants and lattice reduction.
pub type Int = num_bigint::BigInt;

/// Arbitrary-precision rational used for line-arrangement computations.
pub type Rational = num_rational::BigRational;

/// Machine-word rational, handy for small hand-written inputs.
pub type Rational64 = num_rational::Ratio<i64>;

pub use fillings::{
    cap_description, distinguish, euler_number, filling_lower_bound, kernel_lattice,
    sphere_gram, CapDescription, CapHandle, Distinction, FillingError, FillingReport,
    KernelLattice,
};
pub use germ::{
    BranchSpec, DecoratedGerm, GermError, GermInvariants, MBigRule, Point, ProximityCluster,
};
pub use incidence::{
    canonicalize, constraints_of, enumerate_matrices, enumerate_realizable,
    realizable_by_translated_lines, ConstraintSet, IncidenceError, IncidenceMatrix,
    Realizability,
};
pub use plumbing::{Certificate, PlumbingError, Recognition, WeightedTree};
pub use resolution::{ExceptionalGraph, ExtendedCluster, Marking, ResolutionError};
pub use syntax::ParseError;
