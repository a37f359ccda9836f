//! Ambient spaces `I ×_ρ R^n` with metric `dt² + ρ(t)² |dx|²`.
//!
//! Points are coordinate vectors `(t, x_1, …, x_n)`. Euclidean space is the
//! flat case `ρ ≡ 1`, where `t` is simply the first Cartesian coordinate.
//! Every inner product and covariant derivative in the crate goes through
//! this type.

use std::fmt;
use std::sync::Arc;

use nalgebra::DVector;

use crate::error::{GeomError, Result};

pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub struct WarpedProduct {
    interval: (f64, f64),
    base_dim: usize,
    rho: RealFn,
    rho_prime: RealFn,
    flat: bool,
}

impl fmt::Debug for WarpedProduct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WarpedProduct")
            .field("interval", &self.interval)
            .field("base_dim", &self.base_dim)
            .field("flat", &self.flat)
            .finish()
    }
}

impl WarpedProduct {
    /// Euclidean `R^{dim}` viewed as `R ×_1 R^{dim-1}`.
    pub fn euclidean(dim: usize) -> Self {
        assert!(dim >= 2, "ambient dimension must be at least 2");
        Self {
            interval: (f64::NEG_INFINITY, f64::INFINITY),
            base_dim: dim - 1,
            rho: Arc::new(|_| 1.0),
            rho_prime: Arc::new(|_| 0.0),
            flat: true,
        }
    }

    /// Warped product with user-supplied `ρ` and `ρ'`.
    ///
    /// `ρ` is sampled on the interval and must stay positive there.
    pub fn new(
        interval: (f64, f64),
        base_dim: usize,
        rho: impl Fn(f64) -> f64 + Send + Sync + 'static,
        rho_prime: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        if !(1..=3).contains(&base_dim) {
            return Err(GeomError::Precondition(format!("base dimension {base_dim} not in 1..=3")));
        }
        let (a, b) = interval;
        if a.is_finite() && b.is_finite() {
            for i in 0..=256 {
                let t = a + (b - a) * i as f64 / 256.0;
                let r = rho(t);
                if !(r > 0.0) {
                    return Err(GeomError::Precondition(format!("warping function rho({t}) = {r} is not positive")));
                }
            }
        }
        Ok(Self {
            interval,
            base_dim,
            rho: Arc::new(rho),
            rho_prime: Arc::new(rho_prime),
            flat: false,
        })
    }

    pub fn interval(&self) -> (f64, f64) {
        self.interval
    }

    pub fn base_dim(&self) -> usize {
        self.base_dim
    }

    pub fn dim(&self) -> usize {
        self.base_dim + 1
    }

    /// True when `ρ ≡ 1`, i.e. the ambient is Euclidean.
    pub fn is_flat(&self) -> bool {
        self.flat
    }

    pub fn rho(&self, t: f64) -> f64 {
        (self.rho)(t)
    }

    pub fn rho_prime(&self, t: f64) -> f64 {
        (self.rho_prime)(t)
    }

    pub fn inner(&self, p: &DVector<f64>, v: &DVector<f64>, w: &DVector<f64>) -> f64 {
        if self.flat {
            return v.dot(w);
        }
        let r = self.rho(p[0]);
        v[0] * w[0] + r * r * v.rows(1, self.base_dim).dot(&w.rows(1, self.base_dim))
    }

    pub fn norm(&self, p: &DVector<f64>, v: &DVector<f64>) -> f64 {
        self.inner(p, v, v).sqrt()
    }

    /// Diagonal of the metric tensor at `p`.
    pub fn metric_diag(&self, p: &DVector<f64>) -> DVector<f64> {
        let r2 = if self.flat { 1.0 } else { self.rho(p[0]).powi(2) };
        DVector::from_fn(self.dim(), |i, _| if i == 0 { 1.0 } else { r2 })
    }

    /// Raise an index: the vector `G^{-1} c`.
    pub fn raise(&self, p: &DVector<f64>, c: &DVector<f64>) -> DVector<f64> {
        c.component_div(&self.metric_diag(p))
    }

    /// `Γ(v, w)` so that `∇̄_v W = D_v W + Γ(v, w)` in coordinates.
    pub fn christoffel(&self, p: &DVector<f64>, v: &DVector<f64>, w: &DVector<f64>) -> DVector<f64> {
        let n = self.dim();
        if self.flat {
            return DVector::zeros(n);
        }
        let t = p[0];
        let (r, rp) = (self.rho(t), self.rho_prime(t));
        let mut out = DVector::zeros(n);
        out[0] = -r * rp * v.rows(1, self.base_dim).dot(&w.rows(1, self.base_dim));
        let k = rp / r;
        for i in 1..n {
            out[i] = k * (v[0] * w[i] + v[i] * w[0]);
        }
        out
    }

    /// Unit vector field `∂_t` at any point.
    pub fn dt(&self) -> DVector<f64> {
        let mut e = DVector::zeros(self.dim());
        e[0] = 1.0;
        e
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn leaves_are_scaled_flat() {
        let w = WarpedProduct::new((-1.0, 1.0), 2, |t| t.exp(), |t| t.exp()).unwrap();
        let p = DVector::from_vec(vec![0.5, 0.0, 0.0]);
        let e1 = DVector::from_vec(vec![0.0, 1.0, 0.0]);
        assert!((w.inner(&p, &e1, &e1) - 1f64.exp()).abs() < 1e-14);
        assert_eq!(w.inner(&p, &w.dt(), &w.dt()), 1.0);
    }

    #[test]
    fn nonpositive_rho_rejected() {
        assert!(WarpedProduct::new((-2.0, 2.0), 1, |t| t, |_| 1.0).is_err());
    }

    #[test]
    fn christoffel_is_metric_compatible() {
        // d/dε <V, W> along direction Y equals <∇_Y V, W> + <V, ∇_Y W> for constant coordinate fields
        let w = WarpedProduct::new((-1.0, 1.0), 2, |t| 1.0 + t * t / 10.0, |t| t / 5.0).unwrap();
        let p = DVector::from_vec(vec![0.3, 0.1, -0.2]);
        let y = DVector::from_vec(vec![0.7, -0.4, 0.2]);
        let a = DVector::from_vec(vec![0.2, 1.0, 0.5]);
        let b = DVector::from_vec(vec![-1.0, 0.3, 0.8]);
        let h = 1e-6;
        let lhs = (w.inner(&(&p + &y * h), &a, &b) - w.inner(&(&p - &y * h), &a, &b)) / (2.0 * h);
        let rhs = w.inner(&p, &w.christoffel(&p, &y, &a), &b) + w.inner(&p, &a, &w.christoffel(&p, &y, &b));
        assert!((lhs - rhs).abs() < 1e-8);
    }
}
