//! Simulation of tessellation-valued cell-division processes.
//!
//! A cell division process starts from a window (or, for the whole-space
//! constructions, from a backward chain of zero cells) and repeatedly
//! divides cells: every cell lives for an exponential time with rate
//! `G(z)` and is then cut by a random hyperplane drawn from the hyperplane
//! measure `Λ` restricted to the hyperplanes hitting it. With `G = Λ` this
//! is the STIT tessellation; with Mondrian directional distributions all
//! cells are axis-aligned cuboids and the intrinsic volumes `V_n` are
//! admissible choices of `G`.
//!
//! The crate is organised as
//!
//! * [`geometry`]: cuboids, convex polygons, `Λ([z])`, intrinsic volumes,
//!   life-time rules and cell splitting;
//! * [`hyperplane_process`]: the birth-time-marked Poisson hyperplane
//!   process, the backward zero-cell chain and the explosion diagnostic;
//! * [`division`]: the event-driven simulator in a window, the whole-space
//!   zero-cell sampler and the cut-out construction;
//! * [`fragmentation`]: the mass-partition chain induced by the
//!   volume-weighted process;
//! * [`stats`]: goodness-of-fit tests and estimators;
//! * [`io`] and [`render`]: text formats and SVG output.

pub mod acceptance;
pub mod error;
pub mod fragmentation;
pub mod geometry;
pub mod division;
pub mod hyperplane_process;
pub mod io;
pub mod render;
pub mod rng;
pub mod stats;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/geometry.md")]
    mod geometry {}
    #[doc = include_str!("../../../book/src/division.md")]
    mod division {}
    #[doc = include_str!("../../../book/src/zero_cell.md")]
    mod zero_cell {}
    #[doc = include_str!("../../../book/src/fragmentation.md")]
    mod fragmentation {}
    #[doc = include_str!("../../../book/src/statistics.md")]
    mod statistics {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
