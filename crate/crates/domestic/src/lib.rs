//! Opposition diagrams, displacement and domesticity for automorphisms of
//! small spherical buildings over GF(2).
//!
//! - [`coxeter`]: Weyl groups, type sets, displacement formulas.
//! - [`gf2`]: bitset linear algebra and formed spaces.
//! - [`geometry`]: the classical buildings as incidence geometries.
//! - [`morphisms`]: automorphisms and the named families.
//! - [`analysis`]: opposition profiles, decorated diagrams, small groups.
//! - [`chevalley`]: unipotent normal forms and searches in exceptional groups.
//!
//! The guide in `book/` walks through each module with examples that run as
//! doctests.

pub mod analysis;
pub mod chevalley;
pub mod coxeter;
pub mod geometry;
pub mod gf2;
pub mod morphisms;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/coxeter.md")]
    mod coxeter {}
    #[doc = include_str!("../../../book/src/geometry.md")]
    mod geometry {}
    #[doc = include_str!("../../../book/src/automorphisms.md")]
    mod automorphisms {}
    #[doc = include_str!("../../../book/src/diagrams.md")]
    mod diagrams {}
    #[doc = include_str!("../../../book/src/chevalley.md")]
    mod chevalley {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
    #[doc = include_str!("../../../book/src/acceptance.md")]
    mod acceptance {}
}
