//! The monotone reparametrization `h` with `h⁻¹(s) = ∫_{s0}^s dσ / b(σ)`.

use std::cell::Cell;
use std::fmt;
use std::sync::Arc;

use crate::error::{GeomError, Result};
use crate::tolerances::{EPS_B, TOL_QUAD};

pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

const MAX_DEPTH: u32 = 48;

/// Adaptive Simpson quadrature with the usual `|S2 - S1| < 15 tol` acceptance.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, MAX_DEPTH)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Composite Simpson rule on `n` (rounded up to even) panels.
pub fn composite_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = (n.max(2) + 1) & !1;
    let h = (b - a) / n as f64;
    let inner: f64 = (1..n).map(|i| f(a + h * i as f64) * if i % 2 == 1 { 4.0 } else { 2.0 }).sum();
    h / 3.0 * (f(a) + inner + f(b))
}

/// Tabulated pair `(h, h⁻¹)` for a positive `b` on `range`.
#[derive(Clone)]
pub struct MonotoneMap {
    b: RealFn,
    s0: f64,
    sigma: Vec<f64>,
    u: Vec<f64>,
}

impl fmt::Debug for MonotoneMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MonotoneMap")
            .field("s0", &self.s0)
            .field("range", &self.range())
            .field("nodes", &self.sigma.len())
            .finish()
    }
}

pub fn h_from_b(
    b: impl Fn(f64) -> f64 + Send + Sync + 'static,
    s0: f64,
    range: (f64, f64),
    n_nodes: usize,
) -> Result<MonotoneMap> {
    let b: RealFn = Arc::new(b);
    let (lo, hi) = range;
    if !(lo < hi) || s0 < lo || s0 > hi || n_nodes < 2 {
        return Err(GeomError::Precondition(format!("bad quadrature range {range:?} with anchor {s0}")));
    }
    let sigma: Vec<f64> = (0..n_nodes).map(|i| lo + (hi - lo) * i as f64 / (n_nodes - 1) as f64).collect();
    if let Some(&s) = sigma.iter().find(|&&s| !(b(s) >= EPS_B)) {
        return Err(GeomError::SingularIntegrand { at: s, value: b(s) });
    }
    let bad = Cell::new(None);
    let integrand = |s: f64| {
        let v = b(s);
        if !(v >= EPS_B) && bad.get().is_none() {
            bad.set(Some((s, v)));
        }
        1.0 / v
    };
    // anchor at the node nearest s0, then accumulate panel by panel
    let k0 = sigma.iter().enumerate().min_by(|a, b| (a.1 - s0).abs().total_cmp(&(b.1 - s0).abs())).map(|p| p.0).unwrap_or(0);
    let mut u = vec![0.0; n_nodes];
    u[k0] = adaptive_simpson(&integrand, s0, sigma[k0], TOL_QUAD);
    for k in k0 + 1..n_nodes {
        u[k] = u[k - 1] + adaptive_simpson(&integrand, sigma[k - 1], sigma[k], TOL_QUAD / n_nodes as f64);
    }
    for k in (0..k0).rev() {
        u[k] = u[k + 1] - adaptive_simpson(&integrand, sigma[k], sigma[k + 1], TOL_QUAD / n_nodes as f64);
    }
    if let Some((at, value)) = bad.get() {
        return Err(GeomError::SingularIntegrand { at, value });
    }
    Ok(MonotoneMap { b, s0, sigma, u })
}

impl MonotoneMap {
    pub fn anchor(&self) -> f64 {
        self.s0
    }

    /// Tabulated `σ` range.
    pub fn range(&self) -> (f64, f64) {
        (self.sigma[0], self.sigma[self.sigma.len() - 1])
    }

    /// Image of `range` under `h⁻¹`.
    pub fn image(&self) -> (f64, f64) {
        (self.u[0], self.u[self.u.len() - 1])
    }

    pub fn b(&self, s: f64) -> f64 {
        (self.b)(s)
    }

    pub fn b_fn(&self) -> RealFn {
        self.b.clone()
    }

    fn integrand(&self, s: f64) -> f64 {
        1.0 / (self.b)(s)
    }

    /// `h⁻¹(s)`.
    pub fn inverse(&self, s: f64) -> Result<f64> {
        let (lo, hi) = self.range();
        if !(lo..=hi).contains(&s) {
            return Err(GeomError::Domain { value: s, lo, hi });
        }
        let step = (hi - lo) / (self.sigma.len() - 1) as f64;
        let k = (((s - lo) / step).round() as usize).min(self.sigma.len() - 1);
        let f = |x: f64| self.integrand(x);
        Ok(self.u[k] + adaptive_simpson(&f, self.sigma[k], s, TOL_QUAD / self.sigma.len() as f64))
    }

    /// `h(u)` by bisection on the cubic Hermite interpolant of the table,
    /// then two Newton steps against the exact quadrature.
    pub fn forward(&self, u: f64) -> Result<f64> {
        let (ulo, uhi) = self.image();
        if !(ulo..=uhi).contains(&u) {
            return Err(GeomError::Domain { value: u, lo: ulo, hi: uhi });
        }
        let k = self.u.partition_point(|&v| v <= u).clamp(1, self.u.len() - 1);
        let (s0, s1) = (self.sigma[k - 1], self.sigma[k]);
        let (u0, u1) = (self.u[k - 1], self.u[k]);
        let w = s1 - s0;
        let (m0, m1) = (w * self.integrand(s0), w * self.integrand(s1));
        let hermite = |s: f64| {
            let t = (s - s0) / w;
            let (t2, t3) = (t * t, t * t * t);
            (2.0 * t3 - 3.0 * t2 + 1.0) * u0 + (t3 - 2.0 * t2 + t) * m0 + (-2.0 * t3 + 3.0 * t2) * u1 + (t3 - t2) * m1
        };
        let (mut a, mut c) = (s0, s1);
        while c - a > 1e-12 {
            let m = 0.5 * (a + c);
            if hermite(m) < u {
                a = m;
            } else {
                c = m;
            }
        }
        let f = |x: f64| self.integrand(x);
        let mut s = 0.5 * (a + c);
        for _ in 0..2 {
            let at = u0 + adaptive_simpson(&f, s0, s, TOL_QUAD * 1e-2);
            s -= (at - u) * (self.b)(s);
        }
        Ok(s)
    }

    /// `h'(u) = b(h(u))`.
    pub fn forward_prime(&self, u: f64) -> Result<f64> {
        Ok((self.b)(self.forward(u)?))
    }
}
