//! Default numerical tolerances.
//!
//! Closed-form paths are held to `TOL_NUM`; anything differentiated by
//! central differences is held to `TOL_NUM_FD`.

pub const TOL_UNIT_SPEED: f64 = 1e-6;
pub const TOL_SYM: f64 = 1e-6;
pub const TOL_FRENET: f64 = 1e-5;
pub const TOL_NUM: f64 = 1e-8;
pub const TOL_NUM_FD: f64 = 1e-5;

/// Default finite-difference step, scaled by domain extent where known.
pub const H_FD: f64 = 1e-4;

pub const EPS_REGULAR: f64 = 1e-12;
pub const EPS_DET: f64 = 1e-14;
pub const EPS_UMBILIC: f64 = 1e-8;
pub const EPS_FIELD: f64 = 1e-12;
/// Relative to |X|.
pub const EPS_TRANSVERSAL: f64 = 1e-8;
pub const EPS_COSTHETA: f64 = 1e-3;
pub const EPS_B: f64 = 1e-12;

pub const TOL_CPD: f64 = 1e-5;
pub const TOL_ANGLE: f64 = 1e-4;
pub const TOL_GEODESIC: f64 = 1e-4;
pub const TOL_LEVEL: f64 = 1e-4;

/// An entry fails only above this multiple of its tolerance; in between it is marginal.
pub const FAIL_RATIO: f64 = 10.0;

pub const TOL_EIK: f64 = 1e-5;
/// Round trip `h(h⁻¹(s))`.
pub const TOL_INV: f64 = 1e-10;
pub const TOL_QUAD: f64 = 1e-10;
pub const TOL_THETA: f64 = 1e-4;
/// Relative to the tube radius.
pub const EPS_CUT: f64 = 1e-6;
