//! Numerical certification of a complemented-subspace construction inside a
//! weighted space of holomorphic functions on a half-annulus.
//!
//! The library builds, at finite truncation, every object the construction
//! needs: a Köthe-type sequence-space truncation with its associated weight
//! system, the half-annulus geometry with its angular interval families, the
//! plateau/shoulder angular weights, a family of outer functions with
//! prescribed boundary moduli, and the coefficient-extraction operator whose
//! perturbation of the identity is a seminorm contraction. It certifies the
//! quantitative inequalities that make the construction work: outer-modulus
//! ceilings, the off-diagonal decay of the operator matrix, the 1/128
//! contraction, the Neumann-series inversion, and the product-weight
//! estimates on the bidisc-like domain `G₁ × ℂ`.
//!
//! All computations are deterministic given a configuration and a seed; the
//! [`battery`] module aggregates them into a machine-readable report.

// Negated float comparisons below are deliberate NaN guards: `!(x < b)`
// rejects NaN where `x >= b` would accept it.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod battery;
pub mod geometry;
pub mod operators;
pub mod outer;
pub mod seq_space;
pub mod weights;

pub use num_complex::Complex64;

pub use battery::{run_battery, CheckRecord, VerificationReport, VerifyConfig};
pub use geometry::{AngularFamilies, HalfAnnulus, Region, SamplePlan};
pub use operators::{OperatorMatrix, SpanElement};
pub use outer::{BoundaryProfile, OuterExponent, OuterFamily};
pub use seq_space::{FiniteSeq, KoetheMatrix, SeqWeight};
pub use weights::{AngularWeight, ProductWeight};
