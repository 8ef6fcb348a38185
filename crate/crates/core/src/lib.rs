//! Fixed-parameter semi-streaming algorithms for vertex deletion and cut problems.

pub mod derand;
pub mod graph;
pub mod stream;
pub mod util;
pub mod sketch;
pub mod interval;
pub mod solvers;
pub mod recognizers;
pub mod gen;
pub mod hitting;
pub mod block;
pub mod hereditary;
pub mod cut;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/streams.md")]
    mod streams {}
    #[doc = include_str!("../../../book/src/sketches.md")]
    mod sketches {}
    #[doc = include_str!("../../../book/src/families.md")]
    mod families {}
    #[doc = include_str!("../../../book/src/obstructions.md")]
    mod obstructions {}
    #[doc = include_str!("../../../book/src/reconstruction.md")]
    mod reconstruction {}
    #[doc = include_str!("../../../book/src/cuts.md")]
    mod cuts {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
