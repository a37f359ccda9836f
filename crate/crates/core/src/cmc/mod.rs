//! Constant mean curvature: Delaunay profiles, slice curvature, graph identities.
//!
//! Mean curvature is always the trace of the shape operator, so the unit
//! cylinder has `H = 1` and the unit sphere `H = 2`.

pub mod graph;
pub mod profile_ode;
pub mod slices;

pub use graph::{
    bochner_residual, bochner_terms, dichotomy_check, graph_mean_curvature, BochnerTerms, DichotomyReport, Verdict,
};
pub use profile_ode::{
    catenary_profile, cmc_profile_ode, first_integral, Classification, ProfileSample, ProfileSolution,
};
pub use slices::{random_points, slice_curvature_check, slice_point, SlicePoint};
