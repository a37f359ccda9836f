//! Parametric immersions, fundamental forms and shape operators.
//!
//! Sign conventions: the second fundamental form is
//! `b_ij = ⟨∇̄_{∂i} ∂_j φ, ξ⟩`, the shape operator is `A_ξ = g⁻¹ b`
//! (so `A_ξ = -dξ`), and the mean curvature is the trace of `A_ξ`.
//! A round sphere of radius `R` with inward normal has curvatures `1/R`.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::linalg::{generalized_cross, symmetric_eigen};
use super::numdiff::{self, FdConfig};
use crate::construct::warped::WarpedProduct;
use crate::error::{GeomError, Result};
use crate::tolerances::{EPS_DET, EPS_UMBILIC, H_FD};

/// Point, first partials and second partials of an immersion.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceJet {
    pub point: DVector<f64>,
    pub first: Vec<DVector<f64>>,
    pub second: Vec<Vec<DVector<f64>>>,
}

pub type MapFn = Arc<dyn Fn(&[f64]) -> DVector<f64> + Send + Sync>;
pub type SurfaceJetFn = Arc<dyn Fn(&[f64]) -> SurfaceJet + Send + Sync>;

/// An immersion of a product of intervals into a (possibly warped) ambient.
#[derive(Clone)]
pub struct ParametricImmersion {
    ambient: Arc<WarpedProduct>,
    domain: Vec<(f64, f64)>,
    eval: MapFn,
    jet: Option<SurfaceJetFn>,
    normal: Option<MapFn>,
    /// The attached normal only picks the orientation of the jet normal.
    normal_orients_only: bool,
    fd: FdConfig,
    label: String,
}

impl fmt::Debug for ParametricImmersion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ParametricImmersion")
            .field("label", &self.label)
            .field("domain", &self.domain)
            .field("ambient", &self.ambient)
            .field("closed_form", &self.jet.is_some())
            .finish()
    }
}

impl ParametricImmersion {
    pub fn new(
        ambient: Arc<WarpedProduct>,
        domain: Vec<(f64, f64)>,
        eval: impl Fn(&[f64]) -> DVector<f64> + Send + Sync + 'static,
    ) -> Self {
        let extent = domain.iter().map(|(a, b)| (b - a).abs()).fold(1.0, f64::max);
        Self {
            ambient,
            domain,
            eval: Arc::new(eval),
            jet: None,
            normal: None,
            normal_orients_only: false,
            fd: FdConfig::new(H_FD * extent, true),
            label: String::from("immersion"),
        }
    }

    pub fn with_jet(mut self, jet: impl Fn(&[f64]) -> SurfaceJet + Send + Sync + 'static) -> Self {
        self.jet = Some(Arc::new(jet));
        self
    }

    /// Closed-form unit normal; fixes the default orientation.
    pub fn with_normal(mut self, normal: impl Fn(&[f64]) -> DVector<f64> + Send + Sync + 'static) -> Self {
        self.normal = Some(Arc::new(normal));
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

    /// Drop closed-form derivatives so every quantity goes through finite
    /// differences. An attached normal still fixes the orientation.
    pub fn finite_difference_only(&self) -> Self {
        let mut m = self.clone();
        m.jet = None;
        m.normal_orients_only = true;
        m
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn ambient(&self) -> &WarpedProduct {
        &self.ambient
    }

    pub fn ambient_arc(&self) -> Arc<WarpedProduct> {
        self.ambient.clone()
    }

    pub fn domain(&self) -> &[(f64, f64)] {
        &self.domain
    }

    pub fn param_dim(&self) -> usize {
        self.domain.len()
    }

    pub fn fd(&self) -> FdConfig {
        self.fd
    }

    pub fn has_closed_form(&self) -> bool {
        self.jet.is_some()
    }

    pub fn point(&self, u: &[f64]) -> DVector<f64> {
        (self.eval)(u)
    }

    fn check_domain(&self, u: &[f64]) -> Result<()> {
        for (x, (a, b)) in u.iter().zip(&self.domain) {
            let slack = 1e-12 * (b - a).abs().max(1.0);
            if *x < a - slack || *x > b + slack {
                return Err(GeomError::Domain { value: *x, lo: *a, hi: *b });
            }
        }
        Ok(())
    }

    pub fn jet(&self, u: &[f64]) -> Result<SurfaceJet> {
        self.check_domain(u)?;
        if let Some(jet) = &self.jet {
            return Ok(jet(u));
        }
        let f = |x: &[f64]| (self.eval)(x);
        let n = self.param_dim();
        let first = (0..n).map(|i| numdiff::partial(&f, u, i, self.fd)).collect();
        let second = (0..n)
            .map(|i| (0..n).map(|j| numdiff::second_partial(&f, u, i, j, self.fd)).collect())
            .collect();
        Ok(SurfaceJet { point: f(u), first, second })
    }

    /// Unit normal with the immersion's default orientation.
    pub fn normal(&self, u: &[f64]) -> Result<DVector<f64>> {
        match &self.normal {
            Some(nf) if !self.normal_orients_only => {
                self.check_domain(u)?;
                Ok(nf(u))
            }
            _ => {
                let jet = self.jet(u)?;
                Ok(self.resolve_normal(u, &jet))
            }
        }
    }

    /// Normal consistent with `jet`: the attached one, or the jet normal oriented by it.
    pub(crate) fn resolve_normal(&self, u: &[f64], jet: &SurfaceJet) -> DVector<f64> {
        match &self.normal {
            Some(nf) if !self.normal_orients_only => nf(u),
            Some(nf) => {
                let n = self.normal_from_jet(jet);
                if n.dot(&nf(u)) < 0.0 {
                    -n
                } else {
                    n
                }
            }
            None => self.normal_from_jet(jet),
        }
    }

    /// Metric-unit vector orthogonal to every first partial.
    pub fn normal_from_jet(&self, jet: &SurfaceJet) -> DVector<f64> {
        let c = generalized_cross(&jet.first);
        let nu = self.ambient.raise(&jet.point, &c);
        let len = self.ambient.norm(&jet.point, &nu);
        nu / len
    }

    /// First fundamental form from a jet.
    pub fn metric(&self, jet: &SurfaceJet) -> DMatrix<f64> {
        let n = jet.first.len();
        DMatrix::from_fn(n, n, |i, j| self.ambient.inner(&jet.point, &jet.first[i], &jet.first[j]))
    }

    /// Ambient vector `Σ c_i ∂_i φ`.
    pub fn push_forward(&self, jet: &SurfaceJet, coords: &DVector<f64>) -> DVector<f64> {
        jet.first
            .iter()
            .zip(coords.iter())
            .fold(DVector::zeros(jet.point.len()), |acc, (v, c)| acc + v * *c)
    }

    /// Parameter coordinates of the tangential part of an ambient vector.
    pub fn tangent_coords(&self, jet: &SurfaceJet, metric: &DMatrix<f64>, v: &DVector<f64>) -> DVector<f64> {
        let rhs = DVector::from_iterator(
            jet.first.len(),
            jet.first.iter().map(|e| self.ambient.inner(&jet.point, v, e)),
        );
        metric.clone().lu().solve(&rhs).unwrap_or_else(|| DVector::zeros(jet.first.len()))
    }
}

/// First and second fundamental forms at `u` with respect to the unit normal `xi`.
pub fn fundamental_forms(
    m: &ParametricImmersion,
    u: &[f64],
    xi: &DVector<f64>,
) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let jet = m.jet(u)?;
    forms_from_jet(m, u, &jet, xi)
}

pub(crate) fn forms_from_jet(
    m: &ParametricImmersion,
    u: &[f64],
    jet: &SurfaceJet,
    xi: &DVector<f64>,
) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let amb = m.ambient();
    let p = &jet.point;
    let g = m.metric(jet);
    let scale = g.diagonal().iter().map(|d| d.abs()).fold(0.0, f64::max).max(1e-300);
    let det = g.determinant();
    if !(det.abs() > EPS_DET * scale.powi(g.nrows() as i32)) {
        return Err(GeomError::DegenerateImmersion { at: u.to_vec(), det });
    }
    let xi_norm = amb.norm(p, xi);
    if (xi_norm - 1.0).abs() > 1e-6 {
        return Err(GeomError::Precondition(format!("normal has length {xi_norm}")));
    }
    for e in &jet.first {
        let c = amb.inner(p, e, xi) / amb.norm(p, e);
        if c.abs() > 1e-6 {
            return Err(GeomError::Precondition(format!("normal not orthogonal to tangent (cos = {c:e})")));
        }
    }
    let n = jet.first.len();
    let mut b = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let acc = &jet.second[i][j] + amb.christoffel(p, &jet.first[i], &jet.first[j]);
            b[(i, j)] = amb.inner(p, &acc, xi);
        }
    }
    let b = 0.5 * (&b + b.transpose());
    Ok((g, b))
}

/// Curvature data at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapeData {
    pub metric: DMatrix<f64>,
    pub second_form: DMatrix<f64>,
    pub shape_operator: DMatrix<f64>,
    /// Ascending.
    pub principal_curvatures: Vec<f64>,
    /// Columns in parameter coordinates, each of unit metric length.
    pub principal_directions: DMatrix<f64>,
    /// The same directions as ambient vectors.
    pub principal_vectors: Vec<DVector<f64>>,
    /// Trace of the shape operator.
    pub mean_curvature: f64,
    pub normal: DVector<f64>,
    /// Eigenvalue gap below `EPS_UMBILIC`: directions are not stable.
    pub near_umbilic: bool,
}

impl ShapeData {
    /// `⟨A_ξ y, z⟩` for parameter-coordinate vectors.
    pub fn shape_form(&self, y: &DVector<f64>, z: &DVector<f64>) -> f64 {
        (&self.metric * (&self.shape_operator * y)).dot(z)
    }
}

/// Shape operator and principal data; `orientation = -1` flips `ξ`.
pub fn shape_data(m: &ParametricImmersion, u: &[f64], orientation: f64) -> Result<ShapeData> {
    let jet = m.jet(u)?;
    let xi = m.resolve_normal(u, &jet) * orientation.signum();
    shape_from_jet(m, u, &jet, xi)
}

pub(crate) fn shape_from_jet(
    m: &ParametricImmersion,
    u: &[f64],
    jet: &SurfaceJet,
    xi: DVector<f64>,
) -> Result<ShapeData> {
    let (g, b) = forms_from_jet(m, u, jet, &xi)?;
    let chol = g
        .clone()
        .cholesky()
        .ok_or_else(|| GeomError::DegenerateImmersion { at: u.to_vec(), det: g.determinant() })?;
    let l = chol.l();
    let l_inv = l
        .clone()
        .try_inverse()
        .ok_or_else(|| GeomError::DegenerateImmersion { at: u.to_vec(), det: g.determinant() })?;
    let c = &l_inv * &b * l_inv.transpose();
    let c = 0.5 * (&c + c.transpose());
    let (vals, q) = symmetric_eigen(&c);
    let mut dirs = l_inv.transpose() * q;
    for mut col in dirs.column_iter_mut() {
        let scale = col.amax();
        if let Some(first) = col.iter().find(|x| x.abs() > 1e-12 * scale) {
            if *first < 0.0 {
                col.neg_mut();
            }
        }
    }
    let shape = chol.solve(&b);
    let near_umbilic = vals.windows(2).any(|w| (w[1] - w[0]).abs() < EPS_UMBILIC);
    let vectors = dirs.column_iter().map(|c| m.push_forward(jet, &c.into_owned())).collect();
    Ok(ShapeData {
        mean_curvature: vals.iter().sum(),
        metric: g,
        second_form: b,
        shape_operator: shape,
        principal_curvatures: vals,
        principal_directions: dirs,
        principal_vectors: vectors,
        normal: xi,
        near_umbilic,
    })
}

/// `n` evenly spaced values including both ends.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![0.5 * (a + b)];
    }
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

/// Row-major tensor grid over a product domain (last index fastest).
pub fn grid_points(domain: &[(f64, f64)], counts: &[usize]) -> Vec<Vec<f64>> {
    let axes: Vec<Vec<f64>> = domain.iter().zip(counts).map(|(&(a, b), &n)| linspace(a, b, n)).collect();
    let mut out: Vec<Vec<f64>> = vec![vec![]];
    for axis in &axes {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                axis.iter().map(move |x| {
                    let mut p = prefix.clone();
                    p.push(*x);
                    p
                })
            })
            .collect();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn euclid3() -> Arc<WarpedProduct> {
        Arc::new(WarpedProduct::euclidean(3))
    }

    fn plane() -> ParametricImmersion {
        ParametricImmersion::new(euclid3(), vec![(-1.0, 1.0), (-1.0, 1.0)], |u| {
            DVector::from_vec(vec![u[0], u[1], 0.0])
        })
    }

    pub(crate) fn sphere(r: f64) -> ParametricImmersion {
        // inward normal; (polar angle, azimuth)
        ParametricImmersion::new(euclid3(), vec![(0.3, 2.8), (0.0, 6.0)], move |u| {
            let (st, ct) = u[0].sin_cos();
            let (sp, cp) = u[1].sin_cos();
            DVector::from_vec(vec![r * st * cp, r * st * sp, r * ct])
        })
        .with_normal(|u| {
            let (st, ct) = u[0].sin_cos();
            let (sp, cp) = u[1].sin_cos();
            -DVector::from_vec(vec![st * cp, st * sp, ct])
        })
    }

    #[test]
    fn plane_is_totally_geodesic() {
        let m = plane();
        let xi = DVector::from_vec(vec![0.0, 0.0, 1.0]);
        let (g, b) = fundamental_forms(&m, &[0.2, 0.3], &xi).unwrap();
        assert!((g - DMatrix::identity(2, 2)).norm() < 1e-10);
        assert!(b.norm() < 1e-10);
    }

    #[test]
    fn sphere_is_umbilic() {
        let m = sphere(2.0);
        let xi = m.normal(&[1.0, 2.0]).unwrap();
        let (g, b) = fundamental_forms(&m, &[1.0, 2.0], &xi).unwrap();
        assert!((b - g * 0.5).norm() < 1e-6);
        let sd = shape_data(&m, &[1.0, 2.0], 1.0).unwrap();
        for k in &sd.principal_curvatures {
            assert!((k - 0.5).abs() < 1e-6);
        }
        assert!(sd.near_umbilic || (sd.principal_curvatures[1] - sd.principal_curvatures[0]).abs() < 1e-6);
    }

    #[test]
    fn cylinder_curvatures() {
        let m = ParametricImmersion::new(euclid3(), vec![(0.0, 6.0), (-1.0, 1.0)], |u| {
            DVector::from_vec(vec![u[0].cos(), u[0].sin(), u[1]])
        })
        .with_normal(|u| DVector::from_vec(vec![-u[0].cos(), -u[0].sin(), 0.0]));
        let sd = shape_data(&m, &[1.0, 0.2], 1.0).unwrap();
        assert!(sd.principal_curvatures[0].abs() < 1e-6);
        assert!((sd.principal_curvatures[1] - 1.0).abs() < 1e-6);
        assert!((sd.mean_curvature - 1.0).abs() < 1e-6);
    }

    #[test]
    fn default_normal_is_unit_and_orthogonal() {
        let m = sphere(1.5).finite_difference_only();
        let mut mm = m.clone();
        mm.normal = None;
        let jet = mm.jet(&[1.0, 1.0]).unwrap();
        let n = mm.normal_from_jet(&jet);
        assert!((n.norm() - 1.0).abs() < 1e-12);
        for e in &jet.first {
            assert!(n.dot(e).abs() < 1e-9);
        }
    }

    #[test]
    fn degenerate_metric_rejected() {
        let m = ParametricImmersion::new(euclid3(), vec![(-1.0, 1.0), (-1.0, 1.0)], |u| {
            DVector::from_vec(vec![u[0] + u[1], 0.0, 0.0])
        });
        let xi = DVector::from_vec(vec![0.0, 0.0, 1.0]);
        assert!(matches!(
            fundamental_forms(&m, &[0.0, 0.0], &xi),
            Err(GeomError::DegenerateImmersion { .. })
        ));
    }

    #[test]
    fn grid_is_row_major() {
        let g = grid_points(&[(0.0, 1.0), (0.0, 2.0)], &[2, 3]);
        assert_eq!(g.len(), 6);
        assert_eq!(g[1], vec![0.0, 1.0]);
        assert_eq!(g[3], vec![1.0, 0.0]);
    }
}
