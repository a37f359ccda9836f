//! Closed conformal vector fields: `∇̄_Y X = φ Y`.

use std::sync::Arc;

use nalgebra::DVector;

use super::warped::WarpedProduct;
use crate::diffgeo::numdiff::{self, FdConfig};
use crate::error::{GeomError, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum FieldKind {
    /// Parallel field in Euclidean space, `φ ≡ 0`.
    Constant(DVector<f64>),
    /// Position vector from `center` in Euclidean space, `φ ≡ 1`.
    Radial { center: DVector<f64> },
    /// `ρ(t) ∂_t` in a warped product, `φ = ρ'(t)`.
    Warped,
}

#[derive(Debug, Clone)]
pub struct ConformalField {
    kind: FieldKind,
    ambient: Arc<WarpedProduct>,
}

impl ConformalField {
    pub fn constant(v: DVector<f64>) -> Result<Self> {
        if v.norm() == 0.0 {
            return Err(GeomError::ZeroField { at: vec![], norm: 0.0 });
        }
        let ambient = Arc::new(WarpedProduct::euclidean(v.len()));
        Ok(Self { kind: FieldKind::Constant(v), ambient })
    }

    pub fn radial(center: DVector<f64>) -> Self {
        let ambient = Arc::new(WarpedProduct::euclidean(center.len()));
        Self { kind: FieldKind::Radial { center }, ambient }
    }

    pub fn warped(ambient: Arc<WarpedProduct>) -> Self {
        Self { kind: FieldKind::Warped, ambient }
    }

    pub fn kind(&self) -> &FieldKind {
        &self.kind
    }

    pub fn ambient(&self) -> &WarpedProduct {
        &self.ambient
    }

    pub fn ambient_arc(&self) -> Arc<WarpedProduct> {
        self.ambient.clone()
    }

    pub fn eval(&self, p: &DVector<f64>) -> DVector<f64> {
        match &self.kind {
            FieldKind::Constant(v) => v.clone(),
            FieldKind::Radial { center } => p - center,
            FieldKind::Warped => self.ambient.dt() * self.ambient.rho(p[0]),
        }
    }

    /// Conformal factor `φ`.
    pub fn phi(&self, p: &DVector<f64>) -> f64 {
        match &self.kind {
            FieldKind::Constant(_) => 0.0,
            FieldKind::Radial { .. } => 1.0,
            FieldKind::Warped => self.ambient.rho_prime(p[0]),
        }
    }

    pub fn norm(&self, p: &DVector<f64>) -> f64 {
        self.ambient.norm(p, &self.eval(p))
    }

    /// Coordinate on the interval factor in which `X = |X| ∂_t`.
    ///
    /// Constant: `⟨p, X⟩/|X|`; radial: `|p - c|`; warped: `t`.
    pub fn height(&self, p: &DVector<f64>) -> f64 {
        match &self.kind {
            FieldKind::Constant(v) => p.dot(v) / v.norm(),
            FieldKind::Radial { center } => (p - center).norm(),
            FieldKind::Warped => p[0],
        }
    }

    /// `|∇̄_Y X - φ Y|` with the covariant derivative taken by central differences.
    pub fn conformal_residual(&self, p: &DVector<f64>, y: &DVector<f64>) -> f64 {
        let f = |e: f64| self.eval(&(p + y * e));
        let dx = numdiff::derivative(f, 0.0, 1, FdConfig::new(1e-4, true), None).expect("order 1");
        let cov = dx + self.ambient.christoffel(p, y, &self.eval(p));
        let r = cov - y * self.phi(p);
        self.ambient.norm(p, &r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_vec(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> DVector<f64> {
        DVector::from_fn(n, |_, _| rng.gen_range(lo..hi))
    }

    #[test]
    fn all_field_classes_are_closed_conformal() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let warped = Arc::new(WarpedProduct::new((-1.0, 2.0), 2, |t| 1.0 + t * t / 10.0, |t| t / 5.0).unwrap());
        let exp = Arc::new(WarpedProduct::new((-1.0, 1.0), 2, f64::exp, f64::exp).unwrap());
        let fields = [
            ConformalField::constant(DVector::from_vec(vec![0.0, 0.0, 1.0])).unwrap(),
            ConformalField::radial(DVector::from_vec(vec![0.1, -0.2, 0.3])),
            ConformalField::warped(warped),
            ConformalField::warped(exp),
        ];
        for field in &fields {
            for _ in 0..20 {
                let mut p = random_vec(&mut rng, 3, -0.9, 0.9);
                p[0] = p[0].clamp(-0.9, 0.9);
                let y = random_vec(&mut rng, 3, -1.0, 1.0);
                assert!(field.conformal_residual(&p, &y) < 1e-8);
            }
        }
    }

    #[test]
    fn norm_and_phi_constant_along_leaves() {
        let w = Arc::new(WarpedProduct::new((-1.0, 1.0), 2, f64::exp, f64::exp).unwrap());
        let x = ConformalField::warped(w);
        let p = DVector::from_vec(vec![0.4, 0.0, 0.0]);
        let q = DVector::from_vec(vec![0.4, 3.0, -2.0]);
        assert_eq!(x.norm(&p), x.norm(&q));
        assert_eq!(x.phi(&p), x.phi(&q));
    }

    #[test]
    fn zero_constant_field_rejected() {
        assert!(ConformalField::constant(DVector::zeros(3)).is_err());
    }
}
