//! Scalar functions on a flat base rectangle, with derivative evaluators.
//!
//! Each evaluator is closed-form when supplied and falls back to central
//! differences otherwise. Compositions of differences (Hessian from values,
//! third derivatives) use a wider outer stencil to stay above round-off.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::diffgeo::numdiff::{self, FdConfig};

pub type ScalarFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
pub type VectorFn = Arc<dyn Fn(&[f64]) -> DVector<f64> + Send + Sync>;
pub type MatrixFn = Arc<dyn Fn(&[f64]) -> DMatrix<f64> + Send + Sync>;

#[derive(Clone)]
pub struct GraphFunction {
    domain: Vec<(f64, f64)>,
    value: ScalarFn,
    gradient: Option<VectorFn>,
    hessian: Option<MatrixFn>,
    grad_laplacian: Option<VectorFn>,
    half_lap_grad_sq: Option<ScalarFn>,
    fd: FdConfig,
    label: String,
}

impl fmt::Debug for GraphFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GraphFunction")
            .field("label", &self.label)
            .field("domain", &self.domain)
            .field("closed_gradient", &self.gradient.is_some())
            .field("closed_hessian", &self.hessian.is_some())
            .finish()
    }
}

impl GraphFunction {
    pub fn new(domain: Vec<(f64, f64)>, value: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        assert!((1..=3).contains(&domain.len()), "base dimension must be 1..=3");
        Self {
            domain,
            value: Arc::new(value),
            gradient: None,
            hessian: None,
            grad_laplacian: None,
            half_lap_grad_sq: None,
            fd: FdConfig::default(),
            label: String::from("F"),
        }
    }

    pub fn with_gradient(mut self, g: impl Fn(&[f64]) -> DVector<f64> + Send + Sync + 'static) -> Self {
        self.gradient = Some(Arc::new(g));
        self
    }

    pub fn with_hessian(mut self, h: impl Fn(&[f64]) -> DMatrix<f64> + Send + Sync + 'static) -> Self {
        self.hessian = Some(Arc::new(h));
        self
    }

    pub fn with_grad_laplacian(mut self, g: impl Fn(&[f64]) -> DVector<f64> + Send + Sync + 'static) -> Self {
        self.grad_laplacian = Some(Arc::new(g));
        self
    }

    /// Closed form of `½ Δ|∇F|²`, computed independently of the Hessian.
    pub fn with_half_laplacian_grad_sq(mut self, f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        self.half_lap_grad_sq = Some(Arc::new(f));
        self
    }

    pub fn with_fd(mut self, fd: FdConfig) -> Self {
        self.fd = fd;
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Same function with every derivative taken by finite differences.
    pub fn finite_difference_only(&self) -> Self {
        Self {
            domain: self.domain.clone(),
            value: self.value.clone(),
            gradient: None,
            hessian: None,
            grad_laplacian: None,
            half_lap_grad_sq: None,
            fd: self.fd,
            label: self.label.clone(),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn domain(&self) -> &[(f64, f64)] {
        &self.domain
    }

    pub fn dim(&self) -> usize {
        self.domain.len()
    }

    pub fn fd(&self) -> FdConfig {
        self.fd
    }

    pub fn has_closed_gradient(&self) -> bool {
        self.gradient.is_some()
    }

    fn outer_fd(&self) -> FdConfig {
        FdConfig::new(self.fd.step.max(1e-3), true)
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        (self.value)(x)
    }

    pub fn gradient(&self, x: &[f64]) -> DVector<f64> {
        match &self.gradient {
            Some(g) => g(x),
            None => {
                let f = |y: &[f64]| (self.value)(y);
                DVector::from_fn(self.dim(), |i, _| numdiff::partial(&f, x, i, self.fd))
            }
        }
    }

    pub fn hessian(&self, x: &[f64]) -> DMatrix<f64> {
        if let Some(h) = &self.hessian {
            return h(x);
        }
        let n = self.dim();
        let h = match &self.gradient {
            Some(g) => {
                let cols: Vec<DVector<f64>> = (0..n).map(|i| numdiff::partial(&|y: &[f64]| g(y), x, i, self.fd)).collect();
                DMatrix::from_columns(&cols)
            }
            None => {
                let f = |y: &[f64]| (self.value)(y);
                let cfg = self.outer_fd();
                DMatrix::from_fn(n, n, |i, j| numdiff::second_partial(&f, x, i, j, cfg))
            }
        };
        0.5 * (&h + h.transpose())
    }

    pub fn laplacian(&self, x: &[f64]) -> f64 {
        self.hessian(x).trace()
    }

    /// `∇ΔF`.
    pub fn grad_laplacian(&self, x: &[f64]) -> DVector<f64> {
        match &self.grad_laplacian {
            Some(g) => g(x),
            None => {
                let lap = |y: &[f64]| self.laplacian(y);
                let cfg = self.outer_fd();
                DVector::from_fn(self.dim(), |i, _| numdiff::partial(&lap, x, i, cfg))
            }
        }
    }

    /// `½ Δ|∇F|²`, differentiated as a function in its own right.
    pub fn half_laplacian_grad_sq(&self, x: &[f64]) -> f64 {
        if let Some(f) = &self.half_lap_grad_sq {
            return f(x);
        }
        let cfg = self.outer_fd();
        // nested differences: the inner step must be coarse too or rounding dominates
        let grad = |y: &[f64]| match &self.gradient {
            Some(g) => g(y),
            None => DVector::from_fn(self.dim(), |i, _| numdiff::partial(&|z: &[f64]| (self.value)(z), y, i, cfg)),
        };
        let q = |y: &[f64]| 0.5 * grad(y).norm_squared();
        (0..self.dim()).map(|i| numdiff::second_partial(&q, x, i, i, cfg)).sum()
    }
}
