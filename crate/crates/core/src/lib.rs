//! Interpolation between graph snapshots by random edge edits whose direction
//! is driven by a Markov chain on the edit distance to the target graph.
//!
//! The main entry point is [`interpolate`]. [`chain`] holds the analytic side
//! (limiting distributions, hitting times, rate fitting), [`stats`] and
//! [`spectral`] compute statistics along a trajectory, [`generators`] provides
//! random graphs and growth baselines, and [`io`] reads and writes data files.

pub mod chain;
pub mod error;
pub mod generators;
pub mod graph;
pub mod interpolate;
pub mod io;
pub mod ledger;
pub mod spectral;
pub mod stats;

pub use error::{Error, Result};
pub use graph::{edit_distance, max_edit_distance, Edge, Graph};
pub use interpolate::{interpolate, interpolate_sequence, InterpolationConfig, StopMode, Trace};
pub use ledger::{MoveLedger, Sign, SignedEdge};
