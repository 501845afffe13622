//! Mapper graphs of finite point clouds with statistically tuned
//! parameters, extended persistence summaries, and bottleneck confidence
//! regions for their topological features.
//!
//! The pipeline: compute pairwise distances, pick a filter, tune the Rips
//! scale and cover from the data ([`tuning`]), build the Mapper
//! ([`mapper`]), summarize its topology as an extended persistence diagram
//! ([`persistence`]), and attach per-feature confidence squares via the
//! bottleneck bootstrap or subsampling bounds ([`confidence`]).
//!
//! Everything is deterministic given a seed; the `parallel` feature
//! (default) runs the inner loops on rayon without changing any result.

pub mod bottleneck;
pub mod confidence;
pub mod cover;
pub mod denoise;
pub mod error;
mod exec;
pub mod filters;
pub mod geometry;
pub mod mapper;
pub mod persistence;
pub mod seeds;
pub mod tuning;

pub use bottleneck::{bottleneck, bottleneck_oracle, matching_cost, Matching};
pub use confidence::{
    bootstrap_eta, conf_bound_known_model, conf_bound_subsampling, conf_eta_for_alpha,
    significant_features, ConfidenceMethod, ConfidenceRegion,
};
pub use cover::{build_cover, IntervalCover};
pub use denoise::{dtm_filter, DtmKeep};
pub use error::{Error, Result};
pub use filters::{FilterSpec, FilterValues};
pub use geometry::{
    connected_components, hausdorff, pairwise_distances, rips_graph, subsample, DistanceMatrix,
    NeighborhoodGraph, PointCloud,
};
pub use mapper::{build_mapper, intersection_crossing_edges, MapperGraph, Variant};
pub use persistence::{
    diagram_oracle, dictionary, extended_diagram, DiagramPoint, ExtendedDiagram, PointType,
    WeightedGraph,
};
pub use tuning::{check_hypotheses, tune, MapperParams, TuneConfig};
