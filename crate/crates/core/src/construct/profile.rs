//! Planar profile curves `β(t) = (f(t), g(t))` parametrized by arc length.

use std::fmt;
use std::sync::Arc;

use crate::diffgeo::numdiff::{self, FdConfig};
use crate::error::{GeomError, Result};
use crate::tolerances::TOL_UNIT_SPEED;

/// Values and derivatives of a profile at one `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileJet {
    pub f: f64,
    pub fp: f64,
    pub fpp: f64,
    pub g: f64,
    pub gp: f64,
    pub gpp: f64,
}

pub type ProfileJetFn = Arc<dyn Fn(f64) -> ProfileJet + Send + Sync>;

#[derive(Clone)]
pub struct ProfileCurve {
    jet: ProfileJetFn,
    domain: (f64, f64),
    closed_form: bool,
}

impl fmt::Debug for ProfileCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProfileCurve")
            .field("domain", &self.domain)
            .field("closed_form", &self.closed_form)
            .finish()
    }
}

impl ProfileCurve {
    /// Profile with closed-form derivatives.
    pub fn from_jet(jet: impl Fn(f64) -> ProfileJet + Send + Sync + 'static, domain: (f64, f64)) -> Self {
        Self { jet: Arc::new(jet), domain, closed_form: true }
    }

    /// Profile differentiated by central differences.
    pub fn from_fns(
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        g: impl Fn(f64) -> f64 + Send + Sync + 'static,
        domain: (f64, f64),
    ) -> Self {
        let fd = FdConfig::scaled(crate::tolerances::H_FD, domain.1 - domain.0, true);
        let jet = move |t: f64| {
            let d = |h: &dyn Fn(f64) -> f64, k| {
                let cfg = if k == 2 { FdConfig::new(fd.step.max(1e-3), true) } else { fd };
                numdiff::derivative(h, t, k, cfg, None).expect("order")
            };
            ProfileJet {
                f: f(t),
                fp: d(&f, 1),
                fpp: d(&f, 2),
                g: g(t),
                gp: d(&g, 1),
                gpp: d(&g, 2),
            }
        };
        Self { jet: Arc::new(jet), domain, closed_form: false }
    }

    /// Arc-length catenary `f = cosh(asinh t) + 1`, `g = asinh t`.
    pub fn catenary(domain: (f64, f64)) -> Self {
        Self::from_jet(catenary_jet, domain)
    }

    /// Straight profile `(f0, g0) + t (cos α, sin α)`.
    pub fn line(f0: f64, g0: f64, angle: f64, domain: (f64, f64)) -> Self {
        let (s, c) = angle.sin_cos();
        Self::from_jet(
            move |t| ProfileJet { f: f0 + c * t, fp: c, fpp: 0.0, g: g0 + s * t, gp: s, gpp: 0.0 },
            domain,
        )
    }

    /// Circular arc of radius `r` about `(fc, gc)`, counter-clockwise from angle `phase`.
    pub fn circle_arc(fc: f64, gc: f64, r: f64, phase: f64, domain: (f64, f64)) -> Self {
        Self::from_jet(
            move |t| {
                let (s, c) = (t / r + phase).sin_cos();
                ProfileJet { f: fc + r * c, fp: -s, fpp: -c / r, g: gc + r * s, gp: c, gpp: -s / r }
            },
            domain,
        )
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    pub fn is_closed_form(&self) -> bool {
        self.closed_form
    }

    pub fn jet(&self, t: f64) -> ProfileJet {
        (self.jet)(t)
    }

    /// Unit speed and `g' ≠ 0` on `n` samples of the domain.
    pub fn validate(&self, n: usize) -> Result<()> {
        let (a, b) = self.domain;
        let sign0 = self.jet(a).gp.signum();
        for i in 0..=n {
            let t = a + (b - a) * i as f64 / n as f64;
            let j = self.jet(t);
            let speed = (j.fp * j.fp + j.gp * j.gp).sqrt();
            if (speed - 1.0).abs() > TOL_UNIT_SPEED {
                return Err(GeomError::Precondition(format!("profile speed {speed} at t = {t} is not 1")));
            }
            if j.gp.abs() < 1e-12 || j.gp.signum() != sign0 {
                return Err(GeomError::Precondition(format!("g'({t}) vanishes")));
            }
        }
        Ok(())
    }
}

pub fn catenary_jet(t: f64) -> ProfileJet {
    let w = (1.0 + t * t).sqrt();
    ProfileJet {
        f: t.asinh().cosh() + 1.0,
        fp: t / w,
        fpp: 1.0 / (w * w * w),
        g: t.asinh(),
        gp: 1.0 / w,
        gpp: -t / (w * w * w),
    }
}
