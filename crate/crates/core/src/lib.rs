//! Minimum-cost mirror content placement under network-coded multicast.
//!
//! Given a directed network with designated mirror (source) nodes, per-unit
//! storage and flow costs, and a set of terminals that must each recover a
//! file of entropy `h`, this crate decides what each mirror should store.
//! It compares two regimes: mirrors holding uncoded subsets of the file's
//! pieces, and mirrors holding arbitrary coded functions of them.
//!
//! * [`imeasure`]: atom measures, entropy conversion, elemental inequalities.
//! * [`network`]: instances, augmented graphs, max-flow, instance text format.
//! * [`lp`]: linear programs and a bounded simplex (float and exact).
//! * [`problems`]: the five optimization programs and their decoding.
//! * [`gap`]: the greedy gap heuristic and the three-source analysis.
//! * [`assign`]: turning atom measures into per-mirror piece lists.
//! * [`harness`]: fixture instances and the random comparison experiment.
//! * [`cli`]: the `mirrorcode` command line.

pub mod assign;
pub mod cli;
pub mod error;
pub mod gap;
pub mod harness;
pub mod imeasure;
pub mod lp;
pub mod network;
pub mod problems;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::{Rational, Scalar};
