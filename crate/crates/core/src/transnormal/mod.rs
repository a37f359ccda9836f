//! Transnormal functions `|∇F| = b∘F` built as `F = h∘d` from a distance function.

pub mod distance;
pub mod level;
pub mod quadrature;
pub mod spline;

use nalgebra::DVector;

pub use distance::{polylines_from_csv, polylines_to_csv, signed_distance, BaseCurve, CurveBase, Polyline, PolylineBase};
pub use level::level_set_extract;
pub use quadrature::{adaptive_simpson, composite_simpson, h_from_b, MonotoneMap};
pub use spline::spline_through;

use crate::construct::graph::GraphFunction;
use crate::diffgeo::curve::Vec2;
use crate::diffgeo::immersion::grid_points;
use crate::error::{GeomError, Result};
use crate::tolerances::TOL_EIK;

/// Which values of the signed distance enter `F = h∘d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Side {
    #[default]
    Positive,
    Negative,
    Unsigned,
}

#[derive(Debug, Clone)]
pub struct TransnormalSpec {
    pub map: MonotoneMap,
    pub base: BaseCurve,
    pub side: Side,
}

impl TransnormalSpec {
    pub fn new(map: MonotoneMap, base: BaseCurve) -> Self {
        Self { map, base, side: Side::Positive }
    }

    pub fn with_side(mut self, side: Side) -> Self {
        self.side = side;
        self
    }

    /// Distance in the sense selected by `side`.
    pub fn distance(&self, x: &[f64]) -> Result<f64> {
        self.distance_and_gradient(x).map(|p| p.0)
    }

    /// Distance and its gradient `(x - p) / d`, `p` the nearest point of `L`.
    pub fn distance_and_gradient(&self, x: &[f64]) -> Result<(f64, Vec2)> {
        let q = Vec2::new(x[0], x[1]);
        let (d, p) = signed_distance(&self.base, q)?;
        let d = match self.side {
            Side::Positive if d > 0.0 => d,
            Side::Negative if d < 0.0 => -d,
            Side::Unsigned if d != 0.0 => d.abs(),
            _ => return Err(GeomError::Precondition(format!("{x:?} is on L or on the excluded side"))),
        };
        Ok((d, (q - p) / d))
    }
}

/// `F = h∘d` on `region`, a rectangle inside the tube minus `L`, with
/// `∇F = h'(d) ∇d`.
///
/// The region is checked on a 101×101 grid; values outside it are NaN.
pub fn transnormal_from_distance(spec: &TransnormalSpec, region: &[(f64, f64)]) -> Result<GraphFunction> {
    if region.len() != 2 {
        return Err(GeomError::Precondition("transnormal region must be 2D".into()));
    }
    for x in grid_points(region, &[101, 101]) {
        let d = spec.distance(&x)?;
        spec.map.forward(d)?;
    }
    let s = spec.clone();
    let value = move |x: &[f64]| s.distance(x).and_then(|d| s.map.forward(d)).unwrap_or(f64::NAN);
    let s = spec.clone();
    // differencing d itself fails near the vertex wedges of a polyline, where
    // the Hessian of d jumps on a scale far below any usable step
    let gradient = move |x: &[f64]| match s.distance_and_gradient(x) {
        Ok((d, g)) => {
            let scale = s.map.forward_prime(d).unwrap_or(f64::NAN);
            DVector::from_vec(vec![scale * g.x, scale * g.y])
        }
        Err(_) => DVector::from_element(2, f64::NAN),
    };
    Ok(GraphFunction::new(region.to_vec(), value)
        .with_gradient(gradient)
        .with_label("h∘d"))
}

/// `d = h⁻¹∘F`.
pub fn reconstructed_distance(f: &GraphFunction, map: &MonotoneMap) -> GraphFunction {
    let label = format!("h⁻¹∘{}", f.label());
    let (f, m) = (f.clone(), map.clone());
    GraphFunction::new(f.domain().to_vec(), move |x| m.inverse(f.value(x)).unwrap_or(f64::NAN)).with_label(label)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EikonalReport {
    pub max: f64,
    pub mean: f64,
    pub worst: Vec<f64>,
    pub per_point: Vec<(Vec<f64>, f64)>,
    pub tol: f64,
    pub pass: bool,
}

/// `| |∇F| - b(F) |` over `points`.
pub fn eikonal_residual(f: &GraphFunction, b: &dyn Fn(f64) -> f64, points: &[Vec<f64>]) -> EikonalReport {
    eikonal_residual_with_tol(f, b, points, TOL_EIK)
}

pub fn eikonal_residual_with_tol(f: &GraphFunction, b: &dyn Fn(f64) -> f64, points: &[Vec<f64>], tol: f64) -> EikonalReport {
    let per_point: Vec<(Vec<f64>, f64)> = points
        .iter()
        .map(|x| {
            let r = (f.gradient(x).norm() - b(f.value(x))).abs();
            (x.clone(), if r.is_nan() { f64::INFINITY } else { r })
        })
        .collect();
    let (mut max, mut worst, mut sum) = (0.0, Vec::new(), 0.0);
    for (x, r) in &per_point {
        sum += r;
        if *r > max || worst.is_empty() {
            max = *r;
            worst = x.clone();
        }
    }
    let mean = if per_point.is_empty() { 0.0 } else { sum / per_point.len() as f64 };
    EikonalReport { max, mean, worst, per_point, tol, pass: max <= tol }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffgeo::curve::PlaneCurve;
    use nalgebra::DMatrix;
    use std::f64::consts::PI;

    fn circle_base(tube: f64) -> BaseCurve {
        let c = PlaneCurve::circle(Vec2::zeros(), 1.0, (0.0, 2.0 * PI));
        BaseCurve::Curve(CurveBase::new(c, true, tube, false).unwrap())
    }

    const RING: [(f64, f64); 2] = [(0.9, 1.4), (-0.3, 0.3)];

    #[test]
    fn distance_itself_is_eikonal() {
        let map = h_from_b(|_| 1.0, 0.0, (0.0, 1.0), 65).unwrap();
        let spec = TransnormalSpec::new(map, circle_base(0.8));
        let region = [(1.1, 1.5), (-0.3, 0.3)];
        let f = transnormal_from_distance(&spec, &region).unwrap();
        let pts = grid_points(&region, &[11, 11]);
        assert!(eikonal_residual(&f, &|_| 1.0, &pts).max < 1e-6);
    }

    #[test]
    fn exponential_of_distance() {
        let map = h_from_b(|s| s, 1.0, (0.1, 3.0), 257).unwrap();
        let spec = TransnormalSpec::new(map.clone(), circle_base(0.8));
        let region = [(1.1, 1.5), (-0.3, 0.3)];
        let f = transnormal_from_distance(&spec, &region).unwrap();
        let pts = grid_points(&region, &[9, 9]);
        let rep = eikonal_residual(&f, &|s| s, &pts);
        assert!(rep.max < 1e-5, "{}", rep.max);
        for x in &pts {
            let d = (x[0] * x[0] + x[1] * x[1]).sqrt() - 1.0;
            assert!((f.value(x) - d.exp()).abs() < 1e-8);
        }
        let back = reconstructed_distance(&f, &map);
        assert!(eikonal_residual(&back, &|_| 1.0, &pts).max < 1e-5);
    }

    #[test]
    fn inner_side_needs_negative_selection() {
        let map = h_from_b(|_| 1.0, 0.0, (0.0, 1.0), 65).unwrap();
        let spec = TransnormalSpec::new(map.clone(), circle_base(0.8));
        assert!(transnormal_from_distance(&spec, &RING).is_err());
        let inner = TransnormalSpec::new(map, circle_base(0.8)).with_side(Side::Negative);
        assert!(transnormal_from_distance(&inner, &[(0.4, 0.8), (-0.2, 0.2)]).is_ok());
    }

    #[test]
    fn closed_form_square_root_speed() {
        // F = x², b = 2√σ on x > 0
        let f = GraphFunction::new(vec![(0.1, 1.0), (-1.0, 1.0)], |x| x[0] * x[0])
            .with_gradient(|x| DVector::from_vec(vec![2.0 * x[0], 0.0]))
            .with_hessian(|_| DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 0.0])));
        let pts = grid_points(f.domain(), &[21, 21]);
        assert!(eikonal_residual(&f, &|s| 2.0 * s.sqrt(), &pts).max < 1e-8);
    }

    #[test]
    fn perturbed_plane_violates_eikonal() {
        let f = GraphFunction::new(vec![(-1.0, 1.0), (-1.0, 1.0)], |x| x[0] + 0.1 * x[1] * x[1])
            .with_gradient(|x| DVector::from_vec(vec![1.0, 0.2 * x[1]]));
        let pts = grid_points(f.domain(), &[21, 21]);
        let rep = eikonal_residual(&f, &|_| 1.0, &pts);
        assert!(!rep.pass);
        assert!(rep.max >= 0.01);
    }
}
