use thiserror::Error;

/// Errors raised by geometric constructions and evaluators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error("parameter {value} outside usable domain [{lo}, {hi}]")]
    Domain { value: f64, lo: f64, hi: f64 },

    #[error("degenerate curve: derivative norm {norm:e} at parameter {at}")]
    DegenerateCurve { at: f64, norm: f64 },

    #[error("degenerate immersion: metric determinant {det:e} at {at:?}")]
    DegenerateImmersion { at: Vec<f64>, det: f64 },

    #[error("focal set: 1 - f*kappa = {value:e} at (s, t) = ({s}, {t})")]
    Focal { s: f64, t: f64, value: f64 },

    #[error("conformal field vanishes (|X| = {norm:e}) at {at:?}")]
    ZeroField { at: Vec<f64>, norm: f64 },

    #[error("field is normal to the hypersurface (|X^T| = {norm:e}) at {at:?}")]
    Transversality { at: Vec<f64>, norm: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("point {at:?} lies outside the tube of radius {radius}")]
    OutsideTube { at: [f64; 2], radius: f64 },

    #[error("point {at:?} is on the cut locus (competing distances {d1} and {d2})")]
    CutLocus { at: [f64; 2], d1: f64, d2: f64 },

    #[error("integrand 1/b is singular: b({at}) = {value:e}")]
    SingularIntegrand { at: f64, value: f64 },

    #[error("inconsistent derivative data: |grad h|^2 = {0} >= 1")]
    Inconsistent(f64),

    #[error("parse error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("{0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, GeomError>;

impl From<std::io::Error> for GeomError {
    fn from(e: std::io::Error) -> Self {
        GeomError::Io(e.to_string())
    }
}
