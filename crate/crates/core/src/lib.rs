//! Simulation laboratory for long j-tight paths and cycles in binomial
//! random k-uniform hypergraphs.
//!
//! The pipeline builds a long tight path depth-first on a first reveal
//! round, fans its ends out breadth-first into a family of augmenting
//! paths, and spends a second reveal round closing one pair of ends into a
//! certified tight cycle. An exhaustive small-instance searcher provides
//! ground truth, and the harness runs seeded experiment grids with CSV and
//! SVG reporting.
//!
//! See the `examples/` directory for one runnable walkthrough per
//! capability, and the `tightcycle` binary for the file-driven interface.

pub mod brute;
pub mod certificate;
pub mod closer;
pub mod disc;
pub mod fray;
pub mod harness;
pub mod oracle;
pub mod params;
pub mod path;
pub mod pathfinder;
pub mod structure;
pub mod util;

pub use params::{ParamError, Params, RoundProbs, RunConstants};
pub use path::{validate_cycle, validate_path, PathError, TightCycle, TightPath};
pub use structure::{child_jsets, ChildEnd, ExtendablePartition, JSet, StructureError};
