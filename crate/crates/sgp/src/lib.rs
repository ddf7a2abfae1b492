//! Finite semigroups as models of computation.
//!
//! Everything a finite computer does is a sequence of state transitions,
//! and a set of composable state transitions closed under an associative
//! product is a semigroup. This crate builds and checks the structures
//! that picture needs:
//!
//! - [`table`] — abstract semigroups as multiplication tables:
//!   associativity verification, idempotents/resets/identity, the right
//!   regular (Cayley) embedding into transformations, and table
//!   isomorphism;
//! - [`transform`] — concrete transformation semigroups: composition,
//!   closure of generating sets, the full semigroup `T_n` of all `n^n`
//!   self-maps, conjugation and canonical forms;
//! - [`constructions`] — the named examples: the flip-flop (1-bit
//!   memory), lookup-table semigroups of arbitrary functions, direct
//!   products, two-level cascade products, and the bit-mask extraction
//!   that reads XOR and FAN-OUT off one reversible bijection;
//! - [`emulation`] — when does one structure implement another:
//!   isomorphic-relation (division) and modelling (surjective
//!   homomorphism) checkers with witnesses, an exhaustive division
//!   search, and program runs against a function specification;
//! - [`enumeration`] — all subsemigroups of a universe such as `T_n`,
//!   counted raw and up to conjugacy, with size distributions, a
//!   deterministic parallel split, checkpointing, and an independent
//!   second algorithm cross-checking the first.
//!
//! All values are immutable after construction and all operations are
//! pure, so everything here is safe to share across threads.
//!
//! ```
//! use sgp::{MulTable, TransSgp};
//!
//! // The flip-flop: read r, destructive writes 0 and 1.
//! let ff = MulTable::parse("3\n0 1 2\n1 1 2\n2 1 2\n")?;
//! assert!(ff.is_associative());
//! assert_eq!(ff.resets().len(), 2);
//!
//! // Its faithful action on its own states, back to a table, is the
//! // same structure.
//! let action = ff.cayley_embedding()?;
//! assert_eq!(action.order(), 3);
//! assert!(action.mul_table().are_isomorphic(&ff).is_some());
//! # Ok::<(), sgp::Error>(())
//! ```

#![forbid(unsafe_code)]

pub mod constructions;
pub mod emulation;
pub mod enumeration;
pub mod error;
pub mod table;
pub mod transform;

pub use error::{Error, Result};
pub use table::{AssocVerdict, ElementIndex, MulTable};
pub use transform::{Permutation, TransSgp, Transformation};
