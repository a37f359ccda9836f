//! Curves, immersions, derivative engines and curvature extraction.

pub mod curve;
pub mod immersion;
pub mod linalg;
pub mod numdiff;

pub use curve::{arclength_reparam, CurveJet, Frenet, ParamCurve, PlaneCurve, Vec2};
pub use immersion::{fundamental_forms, grid_points, linspace, shape_data, ParametricImmersion, ShapeData, SurfaceJet};
pub use numdiff::FdConfig;
