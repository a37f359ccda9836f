//! Constructions of hypersurfaces with a canonical principal direction.
pub mod field;
pub mod frame;
pub mod graph;
pub mod profile;
pub mod surface;
pub mod warped;

pub use field::{ConformalField, FieldKind};
pub use frame::{gradient_relations, projection_frame, GradientRelations, ProjectionFrame};
pub use graph::GraphFunction;
pub use profile::{ProfileCurve, ProfileJet};
pub use surface::{cpd_hypersurface, cpd_surface_r3, graph_in_warped_product};
pub use warped::WarpedProduct;
