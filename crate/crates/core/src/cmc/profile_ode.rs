//! Profiles `β = (f, g)` whose CPD surface has constant mean curvature `H0`.
//!
//! With `λ = H0 - g'κ/(1 - fκ)` the profile curvature, the unit-speed system
//! is `f'' = λ g'`, `g'' = -λ f'`. This stays regular where `g'` vanishes, so
//! nodoid loops integrate through their vertical tangents.

use std::fmt;
use std::fmt::Write as _;

use crate::construct::profile::{catenary_jet, ProfileCurve, ProfileJet};
use crate::error::{GeomError, Result};

const FOCAL_EPS: f64 = 1e-9;
const CYLINDER_EPS: f64 = 1e-8;
const SPHERE_EPS: f64 = 1e-8;

/// `f = cosh(asinh t) + 1`, `g = asinh t` and their derivatives.
pub fn catenary_profile(t: f64) -> ProfileJet {
    catenary_jet(t)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    Plane,
    Cylinder,
    Sphere,
    CatenoidType,
    Unduloid,
    Nodoid,
    Unknown,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Classification::Plane => "plane",
            Classification::Cylinder => "cylinder",
            Classification::Sphere => "sphere",
            Classification::CatenoidType => "catenoid-type",
            Classification::Unduloid => "unduloid",
            Classification::Nodoid => "nodoid",
            Classification::Unknown => "unknown",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileSample {
    pub t: f64,
    pub f: f64,
    pub fp: f64,
    pub g: f64,
    pub gp: f64,
}

type State = [f64; 4];

#[derive(Debug, Clone, PartialEq)]
pub struct ProfileSolution {
    /// Ascending in `t`.
    pub samples: Vec<ProfileSample>,
    pub target_h: f64,
    pub kappa: f64,
    pub classification: Classification,
    /// Integration stopped where `1 - fκ` reached zero.
    pub focal: bool,
    /// `g'` changed sign along the orbit.
    pub turning: bool,
    /// `C = r g' - (H0/2) r²` with `r = (1 - fκ)/κ`, at the initial point.
    pub first_integral: Option<f64>,
}

fn lambda(h0: f64, kappa: f64, s: &State) -> f64 {
    h0 - s[3] * kappa / (1.0 - s[0] * kappa)
}

fn rhs(h0: f64, kappa: f64, s: &State) -> State {
    let l = lambda(h0, kappa, s);
    [s[1], l * s[3], s[3], -l * s[1]]
}

fn rk4(h0: f64, kappa: f64, s: &State, h: f64) -> State {
    let add = |a: &State, k: &State, c: f64| [a[0] + c * k[0], a[1] + c * k[1], a[2] + c * k[2], a[3] + c * k[3]];
    let k1 = rhs(h0, kappa, s);
    let k2 = rhs(h0, kappa, &add(s, &k1, 0.5 * h));
    let k3 = rhs(h0, kappa, &add(s, &k2, 0.5 * h));
    let k4 = rhs(h0, kappa, &add(s, &k3, h));
    let mut out = [0.0; 4];
    for i in 0..4 {
        out[i] = s[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    let n = (out[1] * out[1] + out[3] * out[3]).sqrt();
    out[1] /= n;
    out[3] /= n;
    out
}

fn sample(t: f64, s: &State) -> ProfileSample {
    ProfileSample { t, f: s[0], fp: s[1], g: s[2], gp: s[3] }
}

/// First integral of the rotational CMC equation.
pub fn first_integral(h0: f64, kappa: f64, f: f64, gp: f64) -> Option<f64> {
    if kappa == 0.0 {
        return None;
    }
    let r = (1.0 - f * kappa) / kappa;
    Some(r * gp - 0.5 * h0 * r * r)
}

/// Integrates from `t0 = clamp(0, t_range)` in both directions with `g(t0) = 0`, `g'(t0) > 0`.
pub fn cmc_profile_ode(h0: f64, kappa: f64, f0: f64, fp0: f64, t_range: (f64, f64), step: f64) -> Result<ProfileSolution> {
    let (a, b) = t_range;
    if !(fp0.abs() < 1.0) {
        return Err(GeomError::Precondition(format!("|f'(0)| = {} must be below 1", fp0.abs())));
    }
    if !(a < b) || !(step > 0.0) {
        return Err(GeomError::Precondition("empty range or non-positive step".into()));
    }
    let w0 = 1.0 - f0 * kappa;
    if w0.abs() < FOCAL_EPS {
        return Err(GeomError::Focal { s: f64::NAN, t: 0.0, value: w0 });
    }
    let t0 = 0f64.clamp(a, b);
    let s0: State = [f0, fp0, 0.0, (1.0 - fp0 * fp0).sqrt()];

    let mut focal = false;
    let mut sweep = |end: f64| -> Vec<ProfileSample> {
        let mut out = Vec::new();
        let dir = (end - t0).signum();
        let (mut t, mut s) = (t0, s0);
        while (end - t) * dir > 1e-14 {
            let h = dir * step.min((end - t).abs());
            let next = rk4(h0, kappa, &s, h);
            let w = 1.0 - next[0] * kappa;
            if w.abs() < FOCAL_EPS || w.signum() != w0.signum() || !next.iter().all(|v| v.is_finite()) {
                focal = true;
                break;
            }
            t += h;
            s = next;
            out.push(sample(t, &s));
        }
        out
    };
    let mut samples: Vec<ProfileSample> = sweep(a).into_iter().rev().collect();
    samples.push(sample(t0, &s0));
    samples.extend(sweep(b));

    let turning = samples.windows(2).any(|w| w[0].gp.signum() != w[1].gp.signum());
    let c = first_integral(h0, kappa, f0, s0[3]);
    let classification = classify(h0, kappa, &samples, turning, c);
    Ok(ProfileSolution { samples, target_h: h0, kappa, classification, focal, turning, first_integral: c })
}

fn classify(h0: f64, kappa: f64, samples: &[ProfileSample], turning: bool, c: Option<f64>) -> Classification {
    if samples.len() < 2 {
        return Classification::Unknown;
    }
    let f0 = samples[0].f;
    if samples.iter().all(|s| (s.f - f0).abs() < CYLINDER_EPS) {
        return if kappa == 0.0 && h0 == 0.0 { Classification::Plane } else { Classification::Cylinder };
    }
    if kappa == 0.0 {
        // γ is a line: the surface is a cylinder over β
        return if h0 == 0.0 { Classification::Plane } else { Classification::Cylinder };
    }
    if h0 == 0.0 {
        return Classification::CatenoidType;
    }
    match c {
        Some(c) if c.abs() < SPHERE_EPS => Classification::Sphere,
        Some(_) if turning => Classification::Nodoid,
        Some(c) if c * h0 < 0.0 => Classification::Nodoid,
        Some(_) => Classification::Unduloid,
        None => Classification::Unknown,
    }
}

impl ProfileSolution {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,f,fp,g,gp\n");
        for s in &self.samples {
            let _ = writeln!(out, "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}", s.t, s.f, s.fp, s.g, s.gp);
        }
        out
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.samples[0].t, self.samples[self.samples.len() - 1].t)
    }

    /// `max |f'² + g'² - 1|`.
    pub fn unit_speed_defect(&self) -> f64 {
        self.samples.iter().map(|s| (s.fp * s.fp + s.gp * s.gp - 1.0).abs()).fold(0.0, f64::max)
    }

    /// Profile whose jet at `t` comes from one RK4 step off the nearest sample.
    pub fn to_profile_curve(&self) -> ProfileCurve {
        let samples = self.samples.clone();
        let (h0, kappa) = (self.target_h, self.kappa);
        let jet = move |t: f64| {
            let k = samples.partition_point(|s| s.t < t);
            let k = match k {
                0 => 0,
                k if k >= samples.len() => samples.len() - 1,
                k if (samples[k].t - t).abs() < (t - samples[k - 1].t).abs() => k,
                k => k - 1,
            };
            let p = samples[k];
            let mut s = [p.f, p.fp, p.g, p.gp];
            if t != p.t {
                s = rk4(h0, kappa, &s, t - p.t);
            }
            let l = lambda(h0, kappa, &s);
            ProfileJet { f: s[0], fp: s[1], fpp: l * s[3], g: s[2], gp: s[3], gpp: -l * s[1] }
        };
        ProfileCurve::from_jet(jet, self.domain())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn catenary_closed_form() {
        let j = catenary_profile(0.0);
        assert_eq!((j.f, j.g, j.fp, j.gp), (2.0, 0.0, 0.0, 1.0));
        for t in [-2.0, -0.3, 0.7, 3.0] {
            let j = catenary_profile(t);
            assert!((j.fp * j.fp + j.gp * j.gp - 1.0).abs() < 1e-15);
        }
        // λ + μ at 0 with κ = 1: 1 + 1/(1 - 2)
        let j = catenary_profile(0.0);
        assert_eq!(j.fpp / j.gp + j.gp / (1.0 - j.f), 0.0);
    }

    #[test]
    fn cylinder_is_a_fixed_point() {
        let sol = cmc_profile_ode(1.0, 1.0, 0.0, 0.0, (-1.0, 1.0), 1e-2).unwrap();
        assert_eq!(sol.classification, Classification::Cylinder);
        for s in &sol.samples {
            assert!(s.f.abs() < 1e-10 && (s.g - s.t).abs() < 1e-10);
        }
    }

    #[test]
    fn catenoid_data_reproduces_catenary() {
        let sol = cmc_profile_ode(0.0, 1.0, 2.0, 0.0, (-1.0, 1.0), 1e-3).unwrap();
        assert_eq!(sol.classification, Classification::CatenoidType);
        assert_eq!(sol.samples.len(), 2001);
        for s in &sol.samples {
            let j = catenary_profile(s.t);
            assert!((s.f - j.f).abs() < 1e-7 && (s.g - j.g).abs() < 1e-7);
        }
    }

    #[test]
    fn rk4_is_fourth_order() {
        let err = |h: f64| {
            let sol = cmc_profile_ode(0.0, 1.0, 2.0, 0.0, (0.0, 1.0), h).unwrap();
            let last = sol.samples.last().unwrap();
            (last.f - catenary_profile(1.0).f).abs()
        };
        let samples: Vec<(f64, f64)> = [0.1, 0.05, 0.025].iter().map(|&h| (h, err(h))).collect();
        let slope = crate::diffgeo::numdiff::loglog_slope(&samples);
        assert!((slope - 4.0).abs() < 0.3, "{slope}");
    }

    #[test]
    fn unduloid_and_nodoid() {
        let u = cmc_profile_ode(1.0, 1.0, -0.5, 0.0, (-3.0, 3.0), 1e-3).unwrap();
        assert_eq!(u.classification, Classification::Unduloid);
        assert!(u.unit_speed_defect() < 1e-12);
        let n = cmc_profile_ode(1.0, 1.0, -2.0, 0.0, (-6.0, 6.0), 1e-3).unwrap();
        assert_eq!(n.classification, Classification::Nodoid);
        assert!(n.turning);
    }

    #[test]
    fn sphere_from_zero_first_integral() {
        // r = 2 at the equator with H = 1 gives C = 2 - 2 = 0
        let s = cmc_profile_ode(1.0, 1.0, -1.0, 0.0, (-1.0, 1.0), 1e-3).unwrap();
        assert_eq!(s.classification, Classification::Sphere);
    }

    #[test]
    fn focal_collision_stops() {
        // sphere of radius 2 about the axis point; the pole is reached at t = pi
        let s = cmc_profile_ode(1.0, 1.0, -1.0, 0.0, (0.0, 5.0), 1e-2).unwrap();
        assert!(s.focal);
        assert!(s.domain().1 < PI + 0.05, "{:?}", s.domain());
    }

    #[test]
    fn csv_header() {
        let s = cmc_profile_ode(1.0, 1.0, 0.0, 0.0, (0.0, 0.1), 0.05).unwrap();
        let csv = s.to_csv();
        assert!(csv.starts_with("t,f,fp,g,gp\n"));
        assert_eq!(csv.lines().count(), 4);
    }
}
