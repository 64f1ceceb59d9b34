//! Hulls of vector rank-metric codes and equivalence transformations that
//! change them.
//!
//! The crate is organized bottom-up:
//!
//! - [`field`]: the tower `F_p ⊂ F_q ⊂ F_{q^m}`, Frobenius and relative trace.
//! - [`linalg`]: exact dense linear algebra and canonical row spaces.
//! - [`code`]: `[n,k]` codes over `F_{q^m}`, duals, hulls, rank weights and
//!   equivalence witnesses in `GL_n(F_q)`.
//! - [`variation`]: constructive hull reduction and LCD transformations.
//! - [`assoc`]: extension bases, associated matrix codes and their hulls.
//! - [`json`], [`sample`], [`cli`]: interchange formats, seeded instance
//!   generation and the command implementations behind the binary.

pub mod field;
pub mod linalg;
pub mod code;
pub mod variation;
pub mod assoc;
pub mod sample;
pub mod json;
pub mod cli;
