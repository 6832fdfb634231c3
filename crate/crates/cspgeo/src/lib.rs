//! cspgeo: a desk-scale laboratory for the solution-space geometry of
//! random constraint satisfaction problems.
//!
//! The crate generates uniform and planted instances of graph k-coloring,
//! random k-SAT, and k-uniform hypergraph NAE 2-coloring; enumerates
//! their solution sets exactly; decomposes them into Hamming clusters;
//! measures shattering, rigidity, and looseness; runs the recoloring and
//! core-stripping processes and the classic reference heuristics; and
//! evaluates the analytic moment formulas the measurements are plotted
//! against.
//!
//! Modules:
//! - [`instances`]: ensembles, generators, serialization;
//! - [`landscape`]: H, exact enumeration, clusters, barriers;
//! - [`geometry`]: shattering metrics, rigid/loose classification, overlaps;
//! - [`processes`]: recoloring, core stripping, support cores, sparsity;
//! - [`algorithms`]: unit-clause and greedy-coloring heuristics, sweeps;
//! - [`moments`]: analytic formulas and the overlap-exponent maximizer;
//! - [`transfer`]: uniform/planted pair samplers and comparisons;
//! - [`harness`]: experiment configs, runner, records, replay.

pub mod algorithms;
pub mod assignment;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod instances;
pub mod landscape;
pub mod moments;
pub mod parallel;
pub mod processes;
pub mod rng;
pub mod stats;
pub mod transfer;

pub use assignment::Assignment;
pub use error::{Error, Result};
pub use instances::Instance;
pub use landscape::SolutionSet;
