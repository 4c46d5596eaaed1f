//! Enumerated p-group quotients of free groups, their automorphisms and
//! extension/splitting checks.

pub mod endos;
pub mod error;
pub mod extensions;
pub mod group;
pub mod matgroups;
pub mod quotients;
pub mod splitting;
pub mod truncalg;
pub mod words;

pub use endos::{Endo, HomMatrix, Layer};
pub use error::{Error, Result};
pub use group::GroupOps;
pub use quotients::{Builder, QuotientGroup, Series, Subgroup};
pub use truncalg::{eval_word, jennings_dims, JenningsDims, Shape, TruncSeries, UnitElement};
pub use words::Word;

/// Trial-division primality test for small moduli.
pub fn is_prime(p: u32) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}
