//! Proof kernel for grounding calculi: natural deduction with immediate,
//! mediate and tree grounding operators, detour normalization, and the
//! correspondence between grounding derivations and grounding trees.

pub mod analysis;
pub mod batch;
pub mod calculus;
pub mod derivation;
pub mod gen;
pub mod operators;
pub mod rewrite;
pub mod syntax;
