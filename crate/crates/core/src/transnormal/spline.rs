//! Interpolating cubic splines through polyline vertices, chord-length
//! parametrized; periodic when the polyline is closed, natural otherwise.

use std::sync::Arc;

use crate::diffgeo::curve::{CurveJet, ParamCurve, Vec2};
use crate::error::{GeomError, Result};

/// Solves `a_i x_{i-1} + b_i x_i + c_i x_{i+1} = r_i` (Thomas algorithm;
/// `a_0` and `c_{n-1}` are ignored).
fn solve_tridiagonal(a: &[f64], b: &[f64], c: &[f64], r: &[f64]) -> Vec<f64> {
    let n = b.len();
    let mut cp = vec![0.0; n];
    let mut x = vec![0.0; n];
    let mut beta = b[0];
    x[0] = r[0] / beta;
    for i in 1..n {
        cp[i] = c[i - 1] / beta;
        beta = b[i] - a[i] * cp[i];
        x[i] = (r[i] - a[i] * x[i - 1]) / beta;
    }
    for i in (0..n - 1).rev() {
        let next = x[i + 1];
        x[i] -= cp[i + 1] * next;
    }
    x
}

/// Cyclic variant: `a_0` couples to `x_{n-1}` and `c_{n-1}` to `x_0`
/// (Sherman–Morrison on the tridiagonal part).
fn solve_cyclic(a: &[f64], b: &[f64], c: &[f64], r: &[f64]) -> Vec<f64> {
    let n = b.len();
    let (alpha, beta) = (c[n - 1], a[0]);
    let gamma = -b[0];
    let mut bb = b.to_vec();
    bb[0] = b[0] - gamma;
    bb[n - 1] = b[n - 1] - alpha * beta / gamma;
    let x = solve_tridiagonal(a, &bb, c, r);
    let mut u = vec![0.0; n];
    u[0] = gamma;
    u[n - 1] = alpha;
    let z = solve_tridiagonal(a, &bb, c, &u);
    let fact = (x[0] + beta * x[n - 1] / gamma) / (1.0 + z[0] + beta * z[n - 1] / gamma);
    x.iter().zip(&z).map(|(x, z)| x - fact * z).collect()
}

#[derive(Debug)]
struct Spline {
    knots: Vec<f64>,
    y: Vec<Vec2>,
    m: Vec<Vec2>,
    closed: bool,
}

impl Spline {
    fn period(&self) -> f64 {
        self.knots[self.knots.len() - 1] - self.knots[0]
    }

    fn jet(&self, t: f64) -> CurveJet {
        let t0 = self.knots[0];
        let t = if self.closed { t0 + (t - t0).rem_euclid(self.period()) } else { t };
        let last = self.knots.len() - 2;
        let i = self.knots.partition_point(|&k| k <= t).saturating_sub(1).min(last);
        let (ta, tb) = (self.knots[i], self.knots[i + 1]);
        let h = tb - ta;
        let (p, q) = (tb - t, t - ta);
        let (mi, mj) = (self.m[i], self.m[i + 1]);
        let (ci, cj) = (self.y[i] / h - mi * (h / 6.0), self.y[i + 1] / h - mj * (h / 6.0));
        CurveJet {
            point: mi * (p * p * p / (6.0 * h)) + mj * (q * q * q / (6.0 * h)) + ci * p + cj * q,
            d1: -mi * (p * p / (2.0 * h)) + mj * (q * q / (2.0 * h)) - ci + cj,
            d2: mi * (p / h) + mj * (q / h),
            d3: (mj - mi) / h,
        }
    }
}

/// C² cubic through `points`; a closed input may or may not repeat its first point.
pub fn spline_through(points: &[Vec2], closed: bool) -> Result<ParamCurve> {
    let mut pts = points.to_vec();
    if closed && pts.len() > 1 && pts[0] == pts[pts.len() - 1] {
        pts.pop();
    }
    if pts.len() < 3 {
        return Err(GeomError::Precondition("a spline needs at least three distinct vertices".into()));
    }
    if closed {
        pts.push(pts[0]);
    }
    let n = pts.len();
    let mut knots = vec![0.0];
    for k in 1..n {
        let h = (pts[k] - pts[k - 1]).norm();
        if !(h > 0.0) {
            return Err(GeomError::DegenerateCurve { at: knots[k - 1], norm: 0.0 });
        }
        knots.push(knots[k - 1] + h);
    }
    let h: Vec<f64> = knots.windows(2).map(|w| w[1] - w[0]).collect();
    let m = if closed {
        // unknowns M_0..M_{n-2}; M_{n-1} = M_0
        let k = n - 1;
        let hm = |i: usize| h[(i + k - 1) % k];
        let a: Vec<f64> = (0..k).map(hm).collect();
        let b: Vec<f64> = (0..k).map(|i| 2.0 * (hm(i) + h[i])).collect();
        let c: Vec<f64> = h[..k].to_vec();
        let mut out = vec![Vec2::zeros(); n];
        for dim in 0..2 {
            let y = |i: usize| pts[i % k][dim];
            let r: Vec<f64> =
                (0..k).map(|i| 6.0 * ((y(i + 1) - y(i)) / h[i] - (y(i) - y(i + k - 1)) / hm(i))).collect();
            let sol = solve_cyclic(&a, &b, &c, &r);
            for i in 0..n {
                out[i][dim] = sol[i % k];
            }
        }
        out
    } else {
        // natural ends: M_0 = M_{n-1} = 0
        let k = n - 2;
        let mut out = vec![Vec2::zeros(); n];
        if k > 0 {
            let a: Vec<f64> = (0..k).map(|i| h[i]).collect();
            let b: Vec<f64> = (0..k).map(|i| 2.0 * (h[i] + h[i + 1])).collect();
            let c: Vec<f64> = (0..k).map(|i| h[i + 1]).collect();
            for dim in 0..2 {
                let y = |i: usize| pts[i][dim];
                let r: Vec<f64> = (1..=k)
                    .map(|i| 6.0 * ((y(i + 1) - y(i)) / h[i] - (y(i) - y(i - 1)) / h[i - 1]))
                    .collect();
                let sol = solve_tridiagonal(&a, &b, &c, &r);
                for i in 0..k {
                    out[i + 1][dim] = sol[i];
                }
            }
        }
        out
    };
    let total = knots[n - 1];
    let spline = Arc::new(Spline { knots, y: pts, m, closed });
    let (s1, s2) = (spline.clone(), spline);
    Ok(ParamCurve::new(move |t| s1.jet(t).point, (0.0, total)).with_jet(move |t| s2.jet(t)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffgeo::curve::arclength_reparam;
    use std::f64::consts::PI;

    #[test]
    fn cyclic_solver_matches_dense() {
        let n = 6;
        let a = vec![1.0, 0.5, 0.3, 0.2, 0.7, 0.4];
        let b = vec![4.0, 3.0, 5.0, 4.5, 3.5, 4.2];
        let c = vec![0.6, 0.8, 0.1, 0.9, 0.3, 0.5];
        let r = vec![1.0, -2.0, 0.5, 3.0, -1.0, 2.0];
        let x = solve_cyclic(&a, &b, &c, &r);
        for i in 0..n {
            let lhs = a[i] * x[(i + n - 1) % n] + b[i] * x[i] + c[i] * x[(i + 1) % n];
            assert!((lhs - r[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn closed_circle_has_unit_curvature() {
        let n = 720;
        let pts: Vec<Vec2> = (0..n).map(|i| {
            let a = 2.0 * PI * i as f64 / n as f64;
            Vec2::new(a.cos(), a.sin())
        }).collect();
        let c = arclength_reparam(&spline_through(&pts, true).unwrap(), n).unwrap();
        assert!((c.length() - 2.0 * PI).abs() < 1e-8);
        for k in 0..97 {
            let s = c.length() * k as f64 / 97.0;
            let fr = c.frenet(s).unwrap();
            assert!((c.point(s).norm() - 1.0).abs() < 1e-9);
            assert!((fr.kappa - 1.0).abs() < 1e-5, "{}", fr.kappa);
        }
    }

    #[test]
    fn open_spline_interpolates_and_is_straight_on_a_line() {
        let pts: Vec<Vec2> = (0..5).map(|i| Vec2::new(i as f64, 2.0 * i as f64)).collect();
        let c = spline_through(&pts, false).unwrap();
        let (_, total) = c.domain();
        assert!((c.point(total) - pts[4]).norm() < 1e-12);
        assert!(c.jet(0.37 * total).d2.norm() < 1e-12);
    }
}
