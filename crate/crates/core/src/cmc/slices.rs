//! Curvature of the slices `s ↦ φ(s, t)` of a 2D CPD surface in Euclidean space.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::construct::field::ConformalField;
use crate::construct::frame::projection_frame;
use crate::diffgeo::immersion::{linspace, shape_data, ParametricImmersion};
use crate::error::{GeomError, Result};
use crate::tolerances::TOL_NUM_FD;
use crate::verify::ReportEntry;

pub const SLICE_AMBIENT: &str = "slice_ambient_curvature_variation";
pub const SLICE_GEODESIC: &str = "slice_geodesic_curvature_variation";
pub const SPLIT_SECOND_FORM: &str = "splitting_second_form";
pub const SPLIT_MEAN_CURVATURE: &str = "splitting_mean_curvature";

/// Curvature data of the slice through `u`.
#[derive(Debug, Clone, PartialEq)]
pub struct SlicePoint {
    /// Curvature vector of the slice in the ambient space.
    pub ambient: DVector<f64>,
    /// Its component tangent to `M`.
    pub geodesic: DVector<f64>,
    /// `α(Y,Y)` from the shape operator, as a vector along `ξ`.
    pub second_form: DVector<f64>,
    /// `H ξ - α(T,T)`, the mean-curvature vector of `M` minus its `T` part.
    pub mean_minus_tt: DVector<f64>,
}

/// Slice data at `u = (s, t)`; the slice direction is `∂_s`.
pub fn slice_point(m: &ParametricImmersion, x: &ConformalField, u: &[f64]) -> Result<SlicePoint> {
    if m.param_dim() != 2 || !m.ambient().is_flat() {
        return Err(GeomError::Precondition("slices need a 2D surface in Euclidean space".into()));
    }
    let jet = m.jet(u)?;
    let (c1, c2) = (&jet.first[0], &jet.second[0][0]);
    let speed2 = c1.norm_squared();
    let y = c1 / speed2.sqrt();
    let ambient = (c2 - &y * c2.dot(&y)) / speed2;
    let sd = shape_data(m, u, 1.0)?;
    let xi = &sd.normal;
    let geodesic = &ambient - xi * ambient.dot(xi);
    let ycoords = DVector::from_vec(vec![1.0 / speed2.sqrt(), 0.0]);
    let second_form = xi * sd.shape_form(&ycoords, &ycoords);
    let frame = projection_frame(m, x, u)?;
    let tt = sd.shape_form(&frame.tangent_coords, &frame.tangent_coords);
    let mean_minus_tt = xi * (sd.mean_curvature - tt);
    Ok(SlicePoint { ambient, geodesic, second_form, mean_minus_tt })
}

fn spread(values: &[(Vec<f64>, f64)]) -> Option<(Vec<f64>, f64)> {
    let lo = values.iter().map(|v| v.1).fold(f64::INFINITY, f64::min);
    let (u, hi) = values.iter().cloned().fold((Vec::new(), f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
    (!values.is_empty()).then_some((u, hi - lo))
}

/// Seeded uniform points in a rectangle.
pub fn random_points(domain: &[(f64, f64)], n: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| domain.iter().map(|&(a, b)| rng.gen_range(a..b)).collect()).collect()
}

/// Variation of slice curvatures along each `t` in `t_values`, and the two
/// splitting residuals at `points`.
pub fn slice_curvature_check(
    m: &ParametricImmersion,
    x: &ConformalField,
    t_values: &[f64],
    n_s: usize,
    points: &[Vec<f64>],
    tol_variation: f64,
) -> Vec<ReportEntry> {
    let (s0, s1) = m.domain()[0];
    let pad = 0.01 * (s1 - s0);
    let (mut amb, mut geo) = (Vec::new(), Vec::new());
    let mut excluded = 0;
    for &t in t_values {
        let mut ka = Vec::new();
        let mut kg = Vec::new();
        for s in linspace(s0 + pad, s1 - pad, n_s) {
            match slice_point(m, x, &[s, t]) {
                Ok(p) => {
                    ka.push((vec![s, t], p.ambient.norm()));
                    kg.push((vec![s, t], p.geodesic.norm()));
                }
                Err(_) => excluded += 1,
            }
        }
        amb.extend(spread(&ka));
        geo.extend(spread(&kg));
    }
    let (mut split2, mut splith) = (Vec::new(), Vec::new());
    let mut split_excluded = 0;
    for u in points {
        match slice_point(m, x, u) {
            Ok(p) => {
                split2.push((u.clone(), (&p.ambient - &p.geodesic - &p.second_form).norm()));
                splith.push((u.clone(), (&p.ambient - &p.geodesic - &p.mean_minus_tt).norm()));
            }
            Err(_) => split_excluded += 1,
        }
    }
    let reason = "no admissible sample";
    vec![
        ReportEntry::from_samples(SLICE_AMBIENT, &amb, tol_variation, excluded, reason),
        ReportEntry::from_samples(SLICE_GEODESIC, &geo, tol_variation, excluded, reason),
        ReportEntry::from_samples(SPLIT_SECOND_FORM, &split2, TOL_NUM_FD, split_excluded, reason),
        ReportEntry::from_samples(SPLIT_MEAN_CURVATURE, &splith, TOL_NUM_FD, split_excluded, reason),
    ]
}
