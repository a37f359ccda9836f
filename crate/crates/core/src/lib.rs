pub mod cmc;
pub mod construct;
pub mod diffgeo;
pub mod error;
pub mod expr;
pub mod mesh;
pub mod scene;
pub mod tolerances;
pub mod transnormal;
pub mod verify;

pub use error::{GeomError, Result};
