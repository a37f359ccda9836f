//! Decomposition of a conformal field along a hypersurface:
//! `X = |X| (sin θ T + cos θ ξ)`.

use nalgebra::{DMatrix, DVector};

use super::field::ConformalField;
use super::graph::GraphFunction;
use super::warped::WarpedProduct;
use crate::diffgeo::immersion::ParametricImmersion;
use crate::error::{GeomError, Result};
use crate::tolerances::{EPS_COSTHETA, EPS_FIELD, EPS_TRANSVERSAL, TOL_NUM};

#[derive(Debug, Clone)]
pub struct ProjectionFrame {
    pub point: DVector<f64>,
    pub field: DVector<f64>,
    pub field_norm: f64,
    /// `X^T = X - ⟨X,ξ⟩ξ`.
    pub x_tangent: DVector<f64>,
    /// `X^T / |X^T|`.
    pub tangent: DVector<f64>,
    /// `T` in the coordinate basis of the parameter domain.
    pub tangent_coords: DVector<f64>,
    pub xi: DVector<f64>,
    pub theta: f64,
    pub cos_theta: f64,
    /// `|cos θ| < EPS_COSTHETA`; the items that divide by `cos θ` are skipped here.
    pub near_half_pi: bool,
}

impl ProjectionFrame {
    /// `|X - |X|(sin θ T + cos θ ξ)|`.
    pub fn reconstruction_error(&self, ambient: &WarpedProduct) -> f64 {
        let r = &self.field
            - (&self.tangent * self.theta.sin() + &self.xi * self.cos_theta) * self.field_norm;
        ambient.norm(&self.point, &r)
    }
}

pub fn projection_frame(m: &ParametricImmersion, x: &ConformalField, u: &[f64]) -> Result<ProjectionFrame> {
    let jet = m.jet(u)?;
    let xi = m.normal(u)?;
    frame_at(m, x, u, &jet, xi)
}

pub(crate) fn frame_at(
    m: &ParametricImmersion,
    x: &ConformalField,
    u: &[f64],
    jet: &crate::diffgeo::immersion::SurfaceJet,
    xi: DVector<f64>,
) -> Result<ProjectionFrame> {
    let amb = m.ambient();
    let p = jet.point.clone();
    let xv = x.eval(&p);
    let xn = amb.norm(&p, &xv);
    if xn < EPS_FIELD {
        return Err(GeomError::ZeroField { at: u.to_vec(), norm: xn });
    }
    let c = amb.inner(&p, &xv, &xi);
    let x_tangent = &xv - &xi * c;
    let tn = amb.norm(&p, &x_tangent);
    if tn <= EPS_TRANSVERSAL * xn {
        return Err(GeomError::Transversality { at: u.to_vec(), norm: tn });
    }
    let tangent = &x_tangent / tn;
    let metric = m.metric(jet);
    let tangent_coords = m.tangent_coords(jet, &metric, &tangent);
    let cos_theta = (c / xn).clamp(-1.0, 1.0);
    Ok(ProjectionFrame {
        point: p,
        field: xv,
        field_norm: xn,
        x_tangent,
        tangent,
        tangent_coords,
        xi,
        theta: cos_theta.acos(),
        cos_theta,
        near_half_pi: cos_theta.abs() < EPS_COSTHETA,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradientRelations {
    pub norm_grad_h: f64,
    pub norm_grad_f: f64,
    pub cos_theta: f64,
    /// `∇F = 0`: `θ = 0` lies outside `(0, π)`.
    pub critical: bool,
}

/// `|∇h|`, `|∇F|` and `cos θ` for the graph of `F` in `W` at base point `x`.
///
/// `|∇h|` is computed from the induced metric; `|∇F|` is then recovered from
/// it by the inverse relation and compared with the direct gradient.
pub fn gradient_relations(f: &GraphFunction, w: &WarpedProduct, x: &[f64]) -> Result<GradientRelations> {
    let n = f.dim();
    let grad = f.gradient(x);
    let r = w.rho(f.value(x));
    let g = DMatrix::identity(n, n) * (r * r) + &grad * grad.transpose();
    let ginv_grad = g
        .cholesky()
        .ok_or_else(|| GeomError::DegenerateImmersion { at: x.to_vec(), det: 0.0 })?
        .solve(&grad);
    let gh2 = grad.dot(&ginv_grad).max(0.0);
    if gh2 >= 1.0 {
        return Err(GeomError::Inconsistent(gh2.sqrt()));
    }
    let gf2 = grad.norm_squared();
    let inverse = r * r * gh2 / (1.0 - gh2);
    if (inverse - gf2).abs() > TOL_NUM * (1.0 + gf2) {
        return Err(GeomError::Inconsistent((inverse - gf2).abs()));
    }
    let norm_grad_f = gf2.sqrt();
    Ok(GradientRelations {
        norm_grad_h: gh2.sqrt(),
        norm_grad_f,
        cos_theta: r / (r * r + gf2).sqrt(),
        critical: norm_grad_f == 0.0,
    })
}
