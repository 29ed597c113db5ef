//! Multilevel concatenated codes and multilevel bipartite-graph (expander) codes.
//!
//! The crate has three layers:
//!
//! * algebra: [`field`] (GF(2^t) tables), [`linalg`] (matrices over GF(q)),
//!   [`code`] (generator-matrix codes), [`tower`] (nested code towers),
//!   [`reed_solomon`] and [`gmd`] (outer-code decoding);
//! * constructions: [`serial`] (serial multilevel concatenation with m-stage
//!   ML+GMD decoding), [`graph`] (biregular expanders), [`expander`]
//!   (single-level bipartite-graph codes) and [`multilevel`] (the m-level
//!   bipartite-graph codes with the m-stage decoder);
//! * evaluation: [`bounds`] (entropy, GV distance, random-coding / Forney /
//!   Blokh-Zyablov exponents and the distance bounds) and [`sim`] (BSC
//!   Monte Carlo harness), with text serialization in [`textio`] and flat
//!   config parsing in [`config`].
//!
//! Everything is sized for desk-scale experiments: component codes are small
//! enough that maximum-likelihood decoding and minimum-distance search run by
//! enumeration, so every construction can be checked against brute force.

// index loops over matrices and parallel arrays read better here than
// iterator chains
#![allow(clippy::needless_range_loop)]

pub mod bounds;
pub mod code;
pub mod config;
pub mod expander;
pub mod field;
pub mod gmd;
pub mod graph;
pub mod linalg;
pub mod multilevel;
pub mod reed_solomon;
pub mod serial;
pub mod sim;
pub mod textio;
pub mod tower;

pub use field::{GFContext, Symbol};
pub use linalg::Mat;
