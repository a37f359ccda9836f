//! Graphs over a flat base: mean curvature, the Bochner identity, and the
//! constant-angle CMC dichotomy.

use std::sync::Arc;

use nalgebra::DVector;

use crate::construct::field::ConformalField;
use crate::construct::frame::projection_frame;
use crate::construct::graph::GraphFunction;
use crate::construct::surface::graph_in_warped_product;
use crate::construct::warped::WarpedProduct;
use crate::diffgeo::immersion::shape_data;
use crate::diffgeo::numdiff::{self, FdConfig};
use crate::error::Result;
use crate::verify::ReportEntry;

/// `H = -div(∇F / √(1 + |∇F|²))` in the trace convention.
///
/// Positive on a sphere cap `F = √(R² - |x|²)` (value `2/R`).
pub fn graph_mean_curvature(f: &GraphFunction, x: &[f64]) -> f64 {
    let g = f.gradient(x);
    let h = f.hessian(x);
    let w2 = 1.0 + g.norm_squared();
    let w = w2.sqrt();
    let div = h.trace() / w - g.dot(&(&h * &g)) / (w2 * w);
    -div
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BochnerTerms {
    pub half_lap_grad_sq: f64,
    pub hess_sq: f64,
    pub grad_dot_grad_lap: f64,
}

impl BochnerTerms {
    /// `½Δ|∇F|² - |Hess F|² - ⟨∇F, ∇ΔF⟩`; the Ricci term vanishes on a flat base.
    pub fn residual(&self) -> f64 {
        self.half_lap_grad_sq - self.hess_sq - self.grad_dot_grad_lap
    }
}

pub fn bochner_terms(f: &GraphFunction, x: &[f64]) -> BochnerTerms {
    let h = f.hessian(x);
    BochnerTerms {
        half_lap_grad_sq: f.half_laplacian_grad_sq(x),
        hess_sq: h.norm_squared(),
        grad_dot_grad_lap: f.gradient(x).dot(&f.grad_laplacian(x)),
    }
}

pub fn bochner_residual(f: &GraphFunction, points: &[Vec<f64>], tol: f64) -> ReportEntry {
    let samples: Vec<(Vec<f64>, f64)> = points.iter().map(|x| (x.clone(), bochner_terms(f, x).residual().abs())).collect();
    ReportEntry::from_samples("bochner", &samples, tol, 0, "empty grid")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// Hessian and second fundamental form vanish; on a flat base this is
    /// also a cylinder over a line.
    TotallyGeodesic,
    /// Hypotheses hold but the Hessian does not vanish.
    Inconclusive,
    HypothesisNotMet,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DichotomyReport {
    pub grad_norm_variance: f64,
    pub laplacian_variance: f64,
    pub max_hessian: f64,
    pub max_principal_curvature: f64,
    /// Tangential part of `∇̄_Y T`, maximized over coordinate directions.
    pub parallel_t_residual: f64,
    pub verdict: Verdict,
}

impl DichotomyReport {
    pub fn summary(&self) -> String {
        match self.verdict {
            Verdict::HypothesisNotMet => format!(
                "hypothesis not met: var |grad F| = {:.3e}, var lap F = {:.3e}",
                self.grad_norm_variance, self.laplacian_variance
            ),
            Verdict::TotallyGeodesic => format!(
                "totally geodesic (a plane; also a cylinder over a line): max |Hess F| = {:.3e}",
                self.max_hessian
            ),
            Verdict::Inconclusive => format!("inconclusive: max |Hess F| = {:.3e}", self.max_hessian),
        }
    }
}

fn variance(v: &[f64]) -> f64 {
    let n = v.len().max(1) as f64;
    let mean = v.iter().sum::<f64>() / n;
    v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n
}

/// Constant `|∇F|` and `ΔF` on a flat base force `Hess F = 0`.
pub fn dichotomy_check(f: &GraphFunction, points: &[Vec<f64>], tol_hyp: f64, tol_hess: f64) -> Result<DichotomyReport> {
    let grads: Vec<f64> = points.iter().map(|x| f.gradient(x).norm()).collect();
    let laps: Vec<f64> = points.iter().map(|x| f.laplacian(x)).collect();
    let (gv, lv) = (variance(&grads), variance(&laps));
    let max_hessian = points.iter().map(|x| f.hessian(x).norm()).fold(0.0, f64::max);

    let w = Arc::new(WarpedProduct::euclidean(f.dim() + 1));
    let m = graph_in_warped_product(f, w.clone())?;
    let field = ConformalField::warped(w);
    let mut kmax: f64 = 0.0;
    let mut tmax: f64 = 0.0;
    let fd = FdConfig::new(1e-4, true);
    for x in points {
        let sd = shape_data(&m, x, 1.0)?;
        kmax = sd.principal_curvatures.iter().fold(kmax, |a, k| a.max(k.abs()));
        let Ok(fr) = projection_frame(&m, &field, x) else {
            continue;
        };
        let jet = m.jet(x)?;
        let g = m.metric(&jet);
        for i in 0..f.dim() {
            let tangent = |e: f64| {
                let mut y = x.clone();
                y[i] += e;
                projection_frame(&m, &field, &y).map(|p| p.tangent).unwrap_or_else(|_| DVector::from_element(fr.tangent.len(), f64::NAN))
            };
            let dt = numdiff::derivative(tangent, 0.0, 1, fd, None)?;
            let tang = &dt - &fr.xi * dt.dot(&fr.xi);
            tmax = tmax.max(tang.norm() / g[(i, i)].sqrt());
        }
    }
    let verdict = if gv > tol_hyp || lv > tol_hyp {
        Verdict::HypothesisNotMet
    } else if max_hessian < tol_hess && kmax < tol_hess {
        Verdict::TotallyGeodesic
    } else {
        Verdict::Inconclusive
    };
    Ok(DichotomyReport {
        grad_norm_variance: gv,
        laplacian_variance: lv,
        max_hessian,
        max_principal_curvature: kmax,
        parallel_t_residual: tmax,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffgeo::immersion::grid_points;
    use nalgebra::DMatrix;

    fn square(r: f64) -> Vec<(f64, f64)> {
        vec![(-r, r), (-r, r)]
    }

    #[test]
    fn sphere_cap_and_half_cylinder() {
        let cap = GraphFunction::new(square(0.5), |x| (4.0 - x[0] * x[0] - x[1] * x[1]).sqrt());
        let cyl = GraphFunction::new(square(0.5), |x| (1.0 - x[0] * x[0]).sqrt());
        let plane = GraphFunction::new(square(1.0), |x| 0.3 * x[0] - 2.0 * x[1]);
        for x in grid_points(&square(0.4), &[5, 5]) {
            assert!((graph_mean_curvature(&cap, &x) - 1.0).abs() < 1e-5);
            assert!((graph_mean_curvature(&cyl, &x) - 1.0).abs() < 1e-5);
            assert!(graph_mean_curvature(&plane, &x).abs() < 1e-6);
        }
    }

    #[test]
    fn quadratic_fixes_the_sign_convention() {
        let f = GraphFunction::new(square(1.0), |x| x[0] * x[0] + x[1] * x[1])
            .with_gradient(|x| DVector::from_vec(vec![2.0 * x[0], 2.0 * x[1]]))
            .with_hessian(|_| DMatrix::from_diagonal_element(2, 2, 2.0))
            .with_grad_laplacian(|_| DVector::zeros(2))
            .with_half_laplacian_grad_sq(|_| 8.0);
        let t = bochner_terms(&f, &[0.3, -0.2]);
        assert_eq!((t.half_lap_grad_sq, t.hess_sq, t.grad_dot_grad_lap), (8.0, 8.0, 0.0));
        let pts = grid_points(&square(1.0), &[11, 11]);
        assert!(bochner_residual(&f.finite_difference_only(), &pts, 1e-4).pass());
    }

    #[test]
    fn linear_eikonal_is_totally_geodesic() {
        let f = GraphFunction::new(square(1.0), |x| x[0] / 3f64.sqrt());
        let r = dichotomy_check(&f, &grid_points(&square(0.9), &[7, 7]), 1e-8, 1e-6).unwrap();
        assert_eq!(r.verdict, Verdict::TotallyGeodesic);
        assert!(r.parallel_t_residual < 1e-6);
    }

    #[test]
    fn non_eikonal_input_is_reported() {
        let f = GraphFunction::new(square(1.0), |x| x[0] + 0.01 * x[0] * x[0]);
        let r = dichotomy_check(&f, &grid_points(&square(0.9), &[7, 7]), 1e-8, 1e-6).unwrap();
        assert_eq!(r.verdict, Verdict::HypothesisNotMet);
        assert!(r.grad_norm_variance > 1e-5);
        assert!(r.summary().contains("hypothesis not met"));
    }
}
