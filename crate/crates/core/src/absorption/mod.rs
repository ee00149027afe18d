//! Covering a small vertex set `W` by few disjoint monochromatic cycles that
//! draw almost all their other vertices from a reservoir `U`.

mod approx;
mod auxiliary;
mod fine;
mod stages;

pub use approx::{approx_cover, ApproxCover};
pub use auxiliary::{build_auxiliary_graph, AuxEdge, AuxiliaryGraph, Witness};
pub use fine::{
    check_density, cycle_bound, fine_absorb, fine_absorb_with, DensityCheck, FineOptions, FineReport,
    PreconditionPolicy, DENSITY_EXACT_LIMIT,
};
pub use stages::{
    absorb_pipeline, absorb_pipeline_with, AbsorbOptions, AbsorbOutcome, AbsorbReport, AbsorptionParams, SplitReport,
    TPolicy,
};
