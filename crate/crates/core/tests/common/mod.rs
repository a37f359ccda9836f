#![allow(dead_code)]

use std::f64::consts::PI;
use std::sync::Arc;

use cpd_core::cmc::ProfileSolution;
use cpd_core::construct::field::ConformalField;
use cpd_core::construct::profile::ProfileCurve;
use cpd_core::construct::surface::cpd_surface_r3;
use cpd_core::construct::warped::WarpedProduct;
use cpd_core::diffgeo::curve::{PlaneCurve, Vec2};
use cpd_core::diffgeo::immersion::ParametricImmersion;
use nalgebra::{DVector, Vector3};

pub fn euclid() -> Arc<WarpedProduct> {
    Arc::new(WarpedProduct::euclidean(3))
}

pub fn vertical() -> ConformalField {
    ConformalField::constant(DVector::from_vec(vec![0.0, 0.0, 1.0])).unwrap()
}

pub fn circle(r: f64) -> PlaneCurve {
    PlaneCurve::circle(Vec2::zeros(), r, (0.0, 2.0 * PI * r))
}

pub fn catenoid() -> ParametricImmersion {
    cpd_surface_r3(&circle(1.0), &ProfileCurve::catenary((-1.0, 1.0)), Vector3::z()).unwrap()
}

pub fn max_abs(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().map(f64::abs).fold(0.0, |a: f64, b| if b.is_nan() { f64::INFINITY } else { a.max(b) })
}

/// `|λ + μ - H0|` along an orbit, with `f''` from central differences of the
/// sampled `f'`; samples where `|g'| < 0.1` are skipped.
pub fn orbit_mean_curvature_defect(sol: &ProfileSolution) -> f64 {
    let s = &sol.samples;
    let mut worst: f64 = 0.0;
    for w in s.windows(3) {
        let (a, m, b) = (w[0], w[1], w[2]);
        if m.gp.abs() < 0.1 || (b.t - m.t - (m.t - a.t)).abs() > 1e-12 {
            continue;
        }
        let fpp = (b.fp - a.fp) / (b.t - a.t);
        let lambda = fpp / m.gp;
        let mu = m.gp * sol.kappa / (1.0 - m.f * sol.kappa);
        worst = worst.max((lambda + mu - sol.target_h).abs());
    }
    worst
}
