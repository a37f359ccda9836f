//! The three constructions: profile surfaces in R³, their n-dimensional
//! generalization along a conformal field, and graphs in warped products.

use std::sync::Arc;

use nalgebra::{DVector, Vector3};

use super::field::{ConformalField, FieldKind};
use super::graph::GraphFunction;
use super::profile::ProfileCurve;
use super::warped::WarpedProduct;
use crate::diffgeo::curve::{frenet_from_jet, PlaneCurve, Vec2};
use crate::diffgeo::immersion::{grid_points, ParametricImmersion, SurfaceJet};
use crate::error::{GeomError, Result};
use crate::tolerances::EPS_FIELD;

const FOCAL_EPS: f64 = 1e-10;
const TOL_ORTH: f64 = 1e-6;

/// Orthonormal `(e1, e2)` spanning `x0^⊥` with `e1 × e2 = x0`.
pub fn plane_basis(x0: &Vector3<f64>) -> (Vector3<f64>, Vector3<f64>) {
    let n = x0.normalize();
    let k = (0..3).min_by(|&i, &j| n[i].abs().total_cmp(&n[j].abs())).unwrap_or(0);
    let a = Vector3::ith(k, 1.0);
    let e1 = (a - n * a.dot(&n)).normalize();
    let e2 = n.cross(&e1);
    (e1, e2)
}

fn to_dvec(v: Vector3<f64>) -> DVector<f64> {
    DVector::from_column_slice(v.as_slice())
}

/// `φ(s,t) = γ(s) + f(t) η(s) + g(t) X₀` with `γ` in the plane orthogonal to `X₀`.
///
/// Closed-form partials use the Frenet relations; the attached normal is
/// `ξ = -g' η + f' X₀`.
pub fn cpd_surface_r3(gamma: &PlaneCurve, beta: &ProfileCurve, x0: Vector3<f64>) -> Result<ParametricImmersion> {
    if x0.norm() == 0.0 {
        return Err(GeomError::ZeroField { at: vec![], norm: 0.0 });
    }
    let x0 = x0.normalize();
    beta.validate(256)?;
    let (s_dom, t_dom) = (gamma.domain(), beta.domain());

    let mut sign = 0.0;
    for u in grid_points(&[s_dom, t_dom], &[129, 129]) {
        let fr = frenet_from_jet(&gamma.jet(u[0]), gamma.eta_sign());
        let w = 1.0 - beta.jet(u[1]).f * fr.kappa;
        if sign == 0.0 {
            sign = w.signum();
        }
        if w.abs() < FOCAL_EPS || w.signum() != sign {
            return Err(GeomError::Focal { s: u[0], t: u[1], value: w });
        }
    }

    let (e1, e2) = plane_basis(&x0);
    let lift = move |v: Vec2| e1 * v.x + e2 * v.y;
    let ambient = Arc::new(WarpedProduct::euclidean(3));

    let (g_eval, b_eval) = (gamma.clone(), beta.clone());
    let eval = move |u: &[f64]| {
        let fr = frenet_from_jet(&g_eval.jet(u[0]), g_eval.eta_sign());
        let p = g_eval.point(u[0]);
        let j = b_eval.jet(u[1]);
        to_dvec(lift(p) + lift(fr.normal) * j.f + x0 * j.g)
    };
    let (g_jet, b_jet) = (gamma.clone(), beta.clone());
    let jet = move |u: &[f64]| {
        let cj = g_jet.jet(u[0]);
        let fr = frenet_from_jet(&cj, g_jet.eta_sign());
        let (t3, n3) = (lift(fr.tangent), lift(fr.normal));
        let j = b_jet.jet(u[1]);
        let w = 1.0 - j.f * fr.kappa;
        let point = lift(cj.point) + n3 * j.f + x0 * j.g;
        let phi_s = t3 * w;
        let phi_t = n3 * j.fp + x0 * j.gp;
        let phi_ss = t3 * (-j.f * fr.kappa_prime) + n3 * (w * fr.kappa);
        let phi_st = t3 * (-j.fp * fr.kappa);
        let phi_tt = n3 * j.fpp + x0 * j.gpp;
        SurfaceJet {
            point: to_dvec(point),
            first: vec![to_dvec(phi_s), to_dvec(phi_t)],
            second: vec![
                vec![to_dvec(phi_ss), to_dvec(phi_st)],
                vec![to_dvec(phi_st), to_dvec(phi_tt)],
            ],
        }
    };
    let (g_n, b_n) = (gamma.clone(), beta.clone());
    let normal = move |u: &[f64]| {
        let fr = frenet_from_jet(&g_n.jet(u[0]), g_n.eta_sign());
        let j = b_n.jet(u[1]);
        to_dvec(lift(fr.normal) * (-j.gp) + x0 * j.fp)
    };

    let mut m = ParametricImmersion::new(ambient, vec![s_dom, t_dom], eval)
        .with_normal(normal)
        .with_label("profile-surface");
    if gamma.has_closed_form() && beta.is_closed_form() {
        m = m.with_jet(jet);
    }
    Ok(m)
}

/// `Φ(x,t) = φ(x) + f(t) η(x) + g(t) X̂(φ(x))` for a hypersurface `L` of a leaf
/// orthogonal to the conformal field `X`.
///
/// `eta` is only evaluated on `L`. Derivatives are taken by finite
/// differences; the attached normal is `ξ = -g' η + f' X̂`.
pub fn cpd_hypersurface(
    base: &ParametricImmersion,
    eta: impl Fn(&[f64]) -> DVector<f64> + Send + Sync + 'static,
    beta: &ProfileCurve,
    field: &ConformalField,
) -> Result<ParametricImmersion> {
    if matches!(field.kind(), FieldKind::Warped) || !base.ambient().is_flat() {
        return Err(GeomError::Precondition("hypersurface construction requires a Euclidean ambient".into()));
    }
    beta.validate(256)?;
    let counts = vec![9; base.param_dim()];
    for x in grid_points(base.domain(), &counts) {
        let jet = base.jet(&x)?;
        let xv = field.eval(&jet.point);
        let xn = xv.norm();
        if xn < EPS_FIELD {
            return Err(GeomError::ZeroField { at: x.clone(), norm: xn });
        }
        let e = eta(&x);
        if (e.norm() - 1.0).abs() > TOL_ORTH || e.dot(&xv).abs() > TOL_ORTH * xn {
            return Err(GeomError::Precondition(format!("eta is not a unit vector orthogonal to X at {x:?}")));
        }
        for d in &jet.first {
            if xv.dot(d).abs() > TOL_ORTH * xn * d.norm() || e.dot(d).abs() > TOL_ORTH * d.norm() {
                return Err(GeomError::Precondition(format!("base is not orthogonal to X and eta at {x:?}")));
            }
        }
    }

    let k = base.param_dim();
    let mut domain = base.domain().to_vec();
    domain.push(beta.domain());
    let eta = Arc::new(eta);
    let (b_eval, p_eval, f_eval, e_eval) = (base.clone(), beta.clone(), field.clone(), eta.clone());
    let eval = move |u: &[f64]| {
        let p = b_eval.point(&u[..k]);
        let xhat = f_eval.eval(&p).normalize();
        let j = p_eval.jet(u[k]);
        &p + e_eval(&u[..k]) * j.f + xhat * j.g
    };
    let (b_n, p_n, f_n) = (base.clone(), beta.clone(), field.clone());
    let normal = move |u: &[f64]| {
        let p = b_n.point(&u[..k]);
        let xhat = f_n.eval(&p).normalize();
        let j = p_n.jet(u[k]);
        eta(&u[..k]) * (-j.gp) + xhat * j.fp
    };
    Ok(ParametricImmersion::new(base.ambient_arc(), domain, eval)
        .with_normal(normal)
        .with_label("conformal-hypersurface"))
}

/// The graph `x ↦ (F(x), x)` in `I ×_ρ R^n`.
///
/// The normal is `ξ = (ρ∘F)² ∂_t - ∇F`, normalized in the warped metric.
pub fn graph_in_warped_product(f: &GraphFunction, w: Arc<WarpedProduct>) -> Result<ParametricImmersion> {
    let n = f.dim();
    if w.base_dim() != n {
        return Err(GeomError::Precondition(format!(
            "graph base dimension {n} differs from ambient base dimension {}",
            w.base_dim()
        )));
    }
    let lift = move |x: &[f64], top: f64| {
        let mut p = DVector::zeros(n + 1);
        p[0] = top;
        p.rows_mut(1, n).copy_from_slice(x);
        p
    };
    let f_eval = f.clone();
    let eval = move |x: &[f64]| lift(x, f_eval.value(x));
    let f_jet = f.clone();
    let jet = move |x: &[f64]| {
        let grad = f_jet.gradient(x);
        let hess = f_jet.hessian(x);
        let first = (0..n)
            .map(|i| {
                let mut e = DVector::zeros(n + 1);
                e[0] = grad[i];
                e[i + 1] = 1.0;
                e
            })
            .collect();
        let second = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let mut e = DVector::zeros(n + 1);
                        e[0] = hess[(i, j)];
                        e
                    })
                    .collect()
            })
            .collect();
        SurfaceJet { point: lift(x, f_jet.value(x)), first, second }
    };
    let (f_n, w_n) = (f.clone(), w.clone());
    let normal = move |x: &[f64]| {
        let top = f_n.value(x);
        let grad = f_n.gradient(x);
        let r = w_n.rho(top);
        let mut xi = DVector::zeros(n + 1);
        xi[0] = r * r;
        for i in 0..n {
            xi[i + 1] = -grad[i];
        }
        let p = lift(x, top);
        let len = w_n.norm(&p, &xi);
        xi / len
    };
    Ok(ParametricImmersion::new(w, f.domain().to_vec(), eval)
        .with_jet(jet)
        .with_normal(normal)
        .with_label(format!("graph({})", f.label())))
}
