//! A small logical framework with user-declared rewrite rules, together with
//! a proof-transfer tool between theories built on a shared base signature.
//!
//! The framework is a dependently typed λ-calculus whose conversion relation
//! folds in first-order rewrite rules declared alongside the constants of a
//! theory. On top of it sits a fixed base signature of object-level sorts and
//! propositions ([`prelude`]), a file format for theories, proofs, and
//! parameter maps ([`surface`]), and a translation that interprets one theory
//! inside another by doubling every term into a carrier half and a witness
//! half ([`interp`]). Once the finitely many obligations of an interpretation
//! are checked, every theorem of the source theory transports to the target
//! mechanically, and an inconsistency of the source would transport to an
//! inconsistency of the target.
//!
//! Module map:
//!
//! - [`term`]: terms, sorts, contexts, substitution, alpha-equality.
//! - [`rewrite`]: rewrite rules, weak head normalization, conversion.
//! - [`typing`]: bidirectional typechecking and theory elaboration.
//! - [`surface`]: lexer, parser, printer, and the `require` loader.
//! - [`interp`]: the doubling translation, obligation checking, judgment and
//!   theory transfer, and the consistency-witness transform.
//! - [`prelude`]: the embedded base signature and its self-interpretation.
//! - [`corpus`]: embedded example theories (naturals, integers) used by the
//!   test suite and the command-line `selftest`.
//! - [`testgen`]: seeded random generation of well-typed terms and judgments
//!   for property tests.

pub mod corpus;
pub mod interp;
pub mod prelude;
pub mod rewrite;
pub mod surface;
pub mod term;
pub mod testgen;
pub mod typing;
