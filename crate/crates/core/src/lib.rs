//! Decide, construct and certify proper Z4 x Z2 edge-colorings of
//! bridgeless cubic graphs.
//!
//! A proper Z4 x Z2 coloring assigns a non-zero group element to every
//! edge so that adjacent edges differ and the three colors at each vertex
//! sum to zero. The library decides colorability through a staged
//! strategy built on 2-factors, matchings and path structures of the
//! reduced graph, corrects failing matchings along an incidence structure
//! of loops and cycles, and cross-checks everything against brute-force
//! oracles. Colorings are emitted as self-contained, re-verifiable JSON
//! certificates.

pub mod bits;
pub mod budget;
pub mod certificate;
pub mod coloring;
pub mod correction;
pub mod factor;
pub mod generators;
pub mod graph;
pub mod graph6;
pub mod odd_incidence;
pub mod oracle;
pub mod pipeline;
pub mod structures;

pub use bits::EdgeSet;
pub use certificate::Certificate;
pub use coloring::{verify, EdgeColoring, GroupElement, Verdicts};
pub use factor::TwoFactor;
pub use graph::CubicGraph;
pub use graph6::{parse_graph6, parse_graph6_lines, to_graph6};
pub use pipeline::{run_batch, run_pipeline, ExecMode, PipelineConfig, ReportEntry};
