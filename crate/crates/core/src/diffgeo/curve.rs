//! Plane curves: arc-length reparametrization and Frenet data.
//!
//! Frenet convention: `T' = κη`, `η' = -κT`, with `η` the rotation of `T`
//! by +90° (times an orientation sign). For a counter-clockwise circle
//! this makes `η` point inward and `κ` positive.

use std::fmt;
use std::sync::Arc;

use nalgebra::Vector2;

use super::numdiff::{self, FdConfig};
use crate::error::{GeomError, Result};
use crate::tolerances::EPS_REGULAR;

pub type Vec2 = Vector2<f64>;

/// Position and first three derivatives at one parameter value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveJet {
    pub point: Vec2,
    pub d1: Vec2,
    pub d2: Vec2,
    pub d3: Vec2,
}

pub type PointFn = Arc<dyn Fn(f64) -> Vec2 + Send + Sync>;
pub type JetFn = Arc<dyn Fn(f64) -> CurveJet + Send + Sync>;

/// Rotation by +90°.
pub fn rot90(v: Vec2) -> Vec2 {
    Vec2::new(-v.y, v.x)
}

/// A parametrized plane curve with closed-form or finite-difference jets.
///
/// Used both for arbitrary parametrizations (input to
/// [`arclength_reparam`]) and for arc-length curves ([`PlaneCurve`]).
#[derive(Clone)]
pub struct ParamCurve {
    eval: PointFn,
    jet: Option<JetFn>,
    domain: (f64, f64),
    fd: FdConfig,
}

impl fmt::Debug for ParamCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ParamCurve")
            .field("domain", &self.domain)
            .field("closed_form", &self.jet.is_some())
            .finish()
    }
}

fn third_stencil(f: &dyn Fn(f64) -> Vec2, x: f64, h: f64) -> Vec2 {
    (f(x + 2.0 * h) - f(x + h) * 2.0 + f(x - h) * 2.0 - f(x - 2.0 * h)) / (2.0 * h * h * h)
}

impl ParamCurve {
    pub fn new(eval: impl Fn(f64) -> Vec2 + Send + Sync + 'static, domain: (f64, f64)) -> Self {
        Self {
            eval: Arc::new(eval),
            jet: None,
            domain,
            fd: FdConfig::scaled(crate::tolerances::H_FD, domain.1 - domain.0, true),
        }
    }

    /// Attach closed-form derivatives.
    pub fn with_jet(mut self, jet: impl Fn(f64) -> CurveJet + Send + Sync + 'static) -> Self {
        self.jet = Some(Arc::new(jet));
        self
    }

    pub fn with_fd(mut self, fd: FdConfig) -> Self {
        self.fd = fd;
        self
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    pub fn has_closed_form(&self) -> bool {
        self.jet.is_some()
    }

    pub fn point(&self, t: f64) -> Vec2 {
        (self.eval)(t)
    }

    pub fn jet(&self, t: f64) -> CurveJet {
        if let Some(jet) = &self.jet {
            return jet(t);
        }
        let f = |x: f64| (self.eval)(x);
        let d1 = numdiff::derivative(f, t, 1, self.fd, None).expect("order 1");
        let d2 = numdiff::derivative(f, t, 2, self.fd, None).expect("order 2");
        // third derivatives need a wider stencil to stay above round-off
        let h3 = self.fd.step.max(5e-3 * (self.domain.1 - self.domain.0).abs().max(1.0));
        let coarse = third_stencil(&f, t, h3);
        let fine = third_stencil(&f, t, 0.5 * h3);
        let d3 = (fine * 4.0 - coarse) / 3.0;
        CurveJet { point: f(t), d1, d2, d3 }
    }
}

/// Frenet data of a plane curve at one arc-length value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frenet {
    pub tangent: Vec2,
    pub normal: Vec2,
    pub kappa: f64,
    pub kappa_prime: f64,
}

/// A unit-speed plane curve `s ↦ γ(s)`.
#[derive(Clone, Debug)]
pub struct PlaneCurve {
    inner: ParamCurve,
    eta_sign: f64,
}

impl PlaneCurve {
    /// Wrap a curve that is already parametrized by arc length.
    pub fn from_unit_speed(curve: ParamCurve) -> Self {
        Self { inner: curve, eta_sign: 1.0 }
    }

    /// Flip the orientation of `η` (and therefore the sign of `κ`).
    pub fn with_eta_sign(mut self, sign: f64) -> Self {
        self.eta_sign = sign.signum();
        self
    }

    pub fn eta_sign(&self) -> f64 {
        self.eta_sign
    }

    /// Circle of the given radius, counter-clockwise, starting at `center + (r, 0)`.
    pub fn circle(center: Vec2, radius: f64, domain: (f64, f64)) -> Self {
        let r = radius;
        let c = ParamCurve::new(move |s| center + Vec2::new((s / r).cos(), (s / r).sin()) * r, domain)
            .with_jet(move |s| {
                let (sn, cs) = (s / r).sin_cos();
                CurveJet {
                    point: center + Vec2::new(cs, sn) * r,
                    d1: Vec2::new(-sn, cs),
                    d2: Vec2::new(-cs, -sn) / r,
                    d3: Vec2::new(sn, -cs) / (r * r),
                }
            });
        Self::from_unit_speed(c)
    }

    /// Straight line through `origin` along the unit vector `dir`.
    pub fn line(origin: Vec2, dir: Vec2, domain: (f64, f64)) -> Self {
        let d = dir.normalize();
        let c = ParamCurve::new(move |s| origin + d * s, domain).with_jet(move |s| CurveJet {
            point: origin + d * s,
            d1: d,
            d2: Vec2::zeros(),
            d3: Vec2::zeros(),
        });
        Self::from_unit_speed(c)
    }

    pub fn domain(&self) -> (f64, f64) {
        self.inner.domain
    }

    pub fn length(&self) -> f64 {
        self.inner.domain.1 - self.inner.domain.0
    }

    pub fn point(&self, s: f64) -> Vec2 {
        self.inner.point(s)
    }

    pub fn jet(&self, s: f64) -> CurveJet {
        self.inner.jet(s)
    }

    pub fn has_closed_form(&self) -> bool {
        self.inner.has_closed_form()
    }

    /// Frenet frame at `s`.
    ///
    /// With finite differences `s` must stay `2·h` away from the ends.
    pub fn frenet(&self, s: f64) -> Result<Frenet> {
        let (lo, hi) = self.inner.domain;
        let margin = if self.inner.has_closed_form() { 0.0 } else { 2.0 * self.inner.fd.step };
        if s < lo + margin || s > hi - margin {
            return Err(GeomError::Domain { value: s, lo: lo + margin, hi: hi - margin });
        }
        let jet = self.inner.jet(s);
        Ok(frenet_from_jet(&jet, self.eta_sign))
    }
}

/// Frenet data from derivatives of a (not necessarily unit-speed) parametrization.
pub fn frenet_from_jet(jet: &CurveJet, eta_sign: f64) -> Frenet {
    let speed = jet.d1.norm();
    let tangent = jet.d1 / speed;
    let normal = rot90(tangent) * eta_sign;
    let kappa = jet.d2.dot(&normal) / (speed * speed);
    // unit speed: γ''' = κ'η - κ²T
    let kappa_prime = jet.d3.dot(&normal) / (speed * speed * speed);
    Frenet { tangent, normal, kappa, kappa_prime }
}

const GL_NODES: [f64; 8] = [
    -0.960_289_856_497_536_3,
    -0.796_666_477_413_626_7,
    -0.525_532_409_916_329,
    -0.183_434_642_495_649_8,
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL_WEIGHTS: [f64; 8] = [
    0.101_228_536_290_376_26,
    0.222_381_034_453_374_47,
    0.313_706_645_877_887_3,
    0.362_683_783_378_362,
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_47,
    0.101_228_536_290_376_26,
];

fn gauss_legendre(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    GL_NODES.iter().zip(GL_WEIGHTS.iter()).map(|(x, w)| w * f(mid + half * x)).sum::<f64>() * half
}

struct LengthTable {
    curve: ParamCurve,
    params: Vec<f64>,
    lengths: Vec<f64>,
    speeds: Vec<f64>,
}

impl LengthTable {
    fn speed(&self, t: f64) -> f64 {
        self.curve.jet(t).d1.norm()
    }

    fn length_to(&self, k: usize, t: f64) -> f64 {
        self.lengths[k] + gauss_legendre(&|x| self.speed(x), self.params[k], t)
    }

    /// Parameter `t` with arc length `s` from the start.
    fn invert(&self, s: f64) -> f64 {
        let last = self.params.len() - 1;
        let s = s.clamp(0.0, self.lengths[last]);
        let k = match self.lengths.binary_search_by(|l| l.total_cmp(&s)) {
            Ok(i) => return self.params[i],
            Err(i) => (i - 1).min(last - 1),
        };
        let (s0, s1) = (self.lengths[k], self.lengths[k + 1]);
        let (t0, t1) = (self.params[k], self.params[k + 1]);
        // cubic Hermite on t(s), slopes dt/ds = 1/|c'|
        let ds = s1 - s0;
        let x = (s - s0) / ds;
        let (m0, m1) = (ds / self.speeds[k], ds / self.speeds[k + 1]);
        let h00 = 2.0 * x * x * x - 3.0 * x * x + 1.0;
        let h10 = x * x * x - 2.0 * x * x + x;
        let h01 = -2.0 * x * x * x + 3.0 * x * x;
        let h11 = x * x * x - x * x;
        let mut t = (h00 * t0 + h10 * m0 + h01 * t1 + h11 * m1).clamp(t0, t1);
        for _ in 0..8 {
            let err = self.length_to(k, t) - s;
            let step = err / self.speed(t);
            t = (t - step).clamp(t0, t1);
            if step.abs() <= 1e-15 * (1.0 + t.abs()) {
                break;
            }
        }
        t
    }
}

/// Reparametrize a regular plane curve by arc length.
///
/// Cumulative length is tabulated on `n_samples` intervals with 8-point
/// Gauss–Legendre; the inverse map uses a cubic Hermite guess refined by
/// Newton on the exact length integral. Derivatives of the result follow by
/// the chain rule from the input curve's jets.
pub fn arclength_reparam(curve: &ParamCurve, n_samples: usize) -> Result<PlaneCurve> {
    let (a, b) = curve.domain();
    let n = n_samples.max(2);
    let params: Vec<f64> = (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect();
    let mut speeds = Vec::with_capacity(params.len());
    for &t in &params {
        let w = curve.jet(t).d1.norm();
        if !(w > EPS_REGULAR) {
            return Err(GeomError::DegenerateCurve { at: t, norm: w });
        }
        speeds.push(w);
    }
    let mut lengths = vec![0.0];
    for k in 0..n {
        let seg = gauss_legendre(&|x| curve.jet(x).d1.norm(), params[k], params[k + 1]);
        lengths.push(lengths[k] + seg);
    }
    let total = lengths[n];
    let table = Arc::new(LengthTable { curve: curve.clone(), params, lengths, speeds });

    let t_eval = table.clone();
    let t_jet = table;
    let eval = move |s: f64| t_eval.curve.point(t_eval.invert(s));
    let jet = move |s: f64| {
        let t = t_jet.invert(s);
        let c = t_jet.curve.jet(t);
        let w = c.d1.norm();
        let w1 = c.d1.dot(&c.d2) / w;
        let w2 = (c.d2.norm_squared() + c.d1.dot(&c.d3)) / w - w1 * w1 / w;
        let t1 = 1.0 / w;
        let t2 = -w1 / (w * w * w);
        let t3 = -w2 / w.powi(4) + 3.0 * w1 * w1 / w.powi(5);
        CurveJet {
            point: c.point,
            d1: c.d1 * t1,
            d2: c.d2 * (t1 * t1) + c.d1 * t2,
            d3: c.d3 * (t1 * t1 * t1) + c.d2 * (3.0 * t1 * t2) + c.d1 * t3,
        }
    };
    let out = ParamCurve::new(eval, (0.0, total)).with_jet(jet);
    Ok(PlaneCurve::from_unit_speed(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
        fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64) -> f64 {
            let m = 0.5 * (a + b);
            let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
            let (flm, frm) = (f(lm), f(rm));
            let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            if (left + right - whole).abs() <= 15.0 * tol {
                left + right + (left + right - whole) / 15.0
            } else {
                rec(f, a, m, fa, flm, fm, left, 0.5 * tol) + rec(f, m, b, fm, frm, fb, right, 0.5 * tol)
            }
        }
        let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
        rec(f, a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), tol)
    }

    #[test]
    fn circle_by_angle_becomes_unit_speed() {
        let c = ParamCurve::new(|t| Vec2::new(2.0 * t.cos(), 2.0 * t.sin()), (0.0, PI));
        let g = arclength_reparam(&c, 200).unwrap();
        assert!((g.length() - 2.0 * PI).abs() < 1e-10);
        for i in 1..20 {
            let s = g.length() * i as f64 / 20.0;
            let jet = g.jet(s);
            assert!((jet.d1.norm() - 1.0).abs() < 1e-6);
            let p = g.point(s);
            assert!((p - Vec2::new(2.0 * (s / 2.0).cos(), 2.0 * (s / 2.0).sin())).norm() < 1e-9);
            assert!((g.frenet(s).unwrap().kappa - 0.5).abs() < 1e-6);
        }
    }

    #[test]
    fn unit_speed_segment_is_unchanged() {
        let c = ParamCurve::new(|t| Vec2::new(t, 0.0), (0.0, 1.0));
        let g = arclength_reparam(&c, 10).unwrap();
        for i in 0..=10 {
            let s = i as f64 / 10.0;
            assert!((g.point(s) - Vec2::new(s, 0.0)).norm() < 1e-6);
        }
    }

    #[test]
    fn parabola_length_matches_quadrature_oracle() {
        let oracle = adaptive_simpson(&|t| (1.0 + 4.0 * t * t).sqrt(), 0.0, 1.0, 1e-13);
        assert!((oracle - 1.478_943).abs() < 1e-6);
        let c = ParamCurve::new(|t| Vec2::new(t, t * t), (0.0, 1.0));
        let g = arclength_reparam(&c, 64).unwrap();
        assert!((g.length() - oracle).abs() < 1e-8);
    }

    #[test]
    fn reparam_is_idempotent() {
        let c = ParamCurve::new(|t| Vec2::new(t, t * t), (0.0, 1.0));
        let g = arclength_reparam(&c, 64).unwrap();
        let unit = ParamCurve::new({
            let g = g.clone();
            move |s| g.point(s)
        }, g.domain());
        let g2 = arclength_reparam(&unit, 64).unwrap();
        for i in 0..=16 {
            let s = g.length() * i as f64 / 16.0;
            assert!((g.point(s) - g2.point(s)).norm() < crate::tolerances::TOL_UNIT_SPEED);
        }
    }

    #[test]
    fn degenerate_curve_rejected() {
        let c = ParamCurve::new(|t| Vec2::new(t * t, 0.0), (0.0, 1.0));
        assert!(matches!(arclength_reparam(&c, 8), Err(GeomError::DegenerateCurve { .. })));
    }

    #[test]
    fn unit_circle_frenet_at_origin() {
        let g = PlaneCurve::circle(Vec2::zeros(), 1.0, (0.0, 2.0 * PI));
        let fr = g.frenet(0.0).unwrap();
        assert!((fr.tangent - Vec2::new(0.0, 1.0)).norm() < 1e-15);
        assert!((fr.normal - Vec2::new(-1.0, 0.0)).norm() < 1e-15);
        assert_eq!(fr.kappa, 1.0);
    }

    #[test]
    fn line_has_zero_curvature() {
        let g = PlaneCurve::line(Vec2::new(1.0, 2.0), Vec2::new(3.0, 4.0), (-1.0, 1.0));
        assert_eq!(g.frenet(0.3).unwrap().kappa, 0.0);
    }

    #[test]
    fn ellipse_vertex_curvature() {
        let c = ParamCurve::new(|t| Vec2::new(2.0 * t.cos(), t.sin()), (-PI, PI));
        let g = arclength_reparam(&c, 400).unwrap();
        let s0 = 0.5 * g.length();
        assert!((g.point(s0) - Vec2::new(2.0, 0.0)).norm() < 1e-9);
        // a / b^2 for semi-axes (a, b) = (2, 1)
        assert!((g.frenet(s0).unwrap().kappa - 2.0).abs() < 1e-5);
    }

    #[test]
    fn frenet_equations_hold_numerically() {
        let c = ParamCurve::new(|t| Vec2::new(2.0 * t.cos(), t.sin()), (-PI, PI));
        let g = arclength_reparam(&c, 400).unwrap();
        let h = 1e-4;
        for i in 1..10 {
            let s = g.length() * i as f64 / 10.0;
            let f = g.frenet(s).unwrap();
            let (fp, fm) = (g.frenet(s + h).unwrap(), g.frenet(s - h).unwrap());
            let dt = (fp.tangent - fm.tangent) / (2.0 * h);
            let dn = (fp.normal - fm.normal) / (2.0 * h);
            assert!((dt - f.normal * f.kappa).norm() < crate::tolerances::TOL_FRENET);
            assert!((dn + f.tangent * f.kappa).norm() < crate::tolerances::TOL_FRENET);
            assert!(f.tangent.dot(&f.normal).abs() < 1e-14);
        }
    }

    #[test]
    fn outside_domain_is_an_error() {
        let c = ParamCurve::new(|t| Vec2::new(t, 0.0), (0.0, 1.0));
        let g = PlaneCurve::from_unit_speed(c);
        assert!(g.frenet(0.0).is_err());
        assert!(g.frenet(0.5).is_ok());
    }
}
