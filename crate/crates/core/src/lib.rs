//! Monochromatic cycle partitions of edge-coloured random graphs.

pub mod absorption;
pub mod allocation;
pub mod cover;
pub mod embed;
pub mod error;
pub mod graph;
pub mod pipeline;
pub mod prob;
pub mod reduced;
pub mod regularity;
pub mod rng;
pub mod solver;

pub use cover::{verify_cover, verify_partition, Cycle, CycleCover, VerificationReport, Violation};
pub use error::{Error, Result};
pub use graph::{
    color_edges, common_neighborhood, sample_gnp, ColoredGraph, ColoringStrategy, Graph, Layer, Vertex, VertexSet,
};
