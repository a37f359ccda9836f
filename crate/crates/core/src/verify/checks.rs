//! The five equivalent conditions, each reduced to a per-point residual.

use nalgebra::{DMatrix, DVector};

use super::report::ReportEntry;
use super::VerifyConfig;
use crate::construct::field::ConformalField;
use crate::construct::frame::{frame_at, gradient_relations, ProjectionFrame};
use crate::construct::graph::GraphFunction;
use crate::construct::warped::WarpedProduct;
use crate::diffgeo::curve::Vec2;
use crate::diffgeo::immersion::{grid_points, shape_from_jet, ParametricImmersion, SurfaceJet};
use crate::diffgeo::numdiff::{self, FdConfig};
use crate::error::Result;
use crate::tolerances::EPS_COSTHETA;
use crate::transnormal::level_set_extract;

pub const ITEM_1: &str = "1_principal_direction";
pub const ITEM_2: &str = "2_angle_constancy";
pub const ITEM_3: &str = "3_T_geodesic";
pub const ITEM_4: &str = "4_grad_h_on_levels";
pub const ITEM_5: &str = "5_grad_F_on_levels";

const HALF_PI_REASON: &str = "theta = pi/2 at every sample";

struct PointData {
    jet: SurfaceJet,
    frame: ProjectionFrame,
}

fn point_data(m: &ParametricImmersion, x: &ConformalField, u: &[f64]) -> Result<PointData> {
    let jet = m.jet(u)?;
    let xi = m.normal(u)?;
    let frame = frame_at(m, x, u, &jet, xi)?;
    Ok(PointData { jet, frame })
}

pub(crate) fn inset_domain(m: &ParametricImmersion, inset: f64) -> Vec<(f64, f64)> {
    m.domain()
        .iter()
        .map(|&(a, b)| {
            let pad = inset * (b - a);
            (a + pad, b - pad)
        })
        .collect()
}

fn sample_points(m: &ParametricImmersion, cfg: &VerifyConfig) -> Vec<Vec<f64>> {
    let counts: Vec<usize> = (0..m.param_dim())
        .map(|i| *cfg.grid.get(i).or(cfg.grid.last()).unwrap_or(&21))
        .collect();
    grid_points(&inset_domain(m, cfg.inset), &counts)
}

fn diff_cfg(m: &ParametricImmersion, cfg: &VerifyConfig) -> FdConfig {
    let extent = m.domain().iter().map(|(a, b)| b - a).fold(0.0, f64::max);
    FdConfig::scaled(cfg.fd_step, extent, true)
}

fn metric_norm(g: &DMatrix<f64>, v: &DVector<f64>) -> f64 {
    v.dot(&(g * v)).max(0.0).sqrt()
}

/// `|A T - ⟨A T, T⟩ T|` in the induced metric.
pub fn check_principal_direction(m: &ParametricImmersion, x: &ConformalField, cfg: &VerifyConfig) -> ReportEntry {
    let mut samples = Vec::new();
    let mut excluded = 0;
    for u in sample_points(m, cfg) {
        let r = point_data(m, x, &u).and_then(|pd| {
            let sd = shape_from_jet(m, &u, &pd.jet, pd.frame.xi.clone())?;
            let v = &pd.frame.tangent_coords;
            let av = &sd.shape_operator * v;
            let lam = av.dot(&(&sd.metric * v));
            Ok(metric_norm(&sd.metric, &(av - v * lam)))
        });
        match r {
            Ok(r) => samples.push((u, r)),
            Err(_) => excluded += 1,
        }
    }
    ReportEntry::from_samples(ITEM_1, &samples, cfg.tol_cpd, excluded, "frame undefined at every sample")
}

/// Metric-orthonormal basis of the complement of `v` in parameter coordinates.
fn complement_basis(g: &DMatrix<f64>, v: &DVector<f64>) -> Vec<DVector<f64>> {
    let n = v.len();
    let mut basis = vec![v / metric_norm(g, v)];
    for i in 0..n {
        let mut w = DVector::zeros(n);
        w[i] = 1.0;
        for q in &basis {
            let c = w.dot(&(g * q));
            w -= q * c;
        }
        let len = metric_norm(g, &w);
        if len > 1e-8 && basis.len() < n {
            basis.push(w / len);
        }
    }
    basis.remove(0);
    basis
}

fn shifted(u: &[f64], dir: &DVector<f64>, e: f64) -> Vec<f64> {
    u.iter().zip(dir.iter()).map(|(a, d)| a + e * d).collect()
}

/// `max |Z(θ)|` over unit `Z ⟂ T`, by central differences along parameter lines.
pub fn check_angle_constancy(m: &ParametricImmersion, x: &ConformalField, cfg: &VerifyConfig) -> ReportEntry {
    let fd = diff_cfg(m, cfg);
    let theta = |u: &[f64]| point_data(m, x, u).map(|pd| pd.frame.theta).unwrap_or(f64::NAN);
    let mut samples = Vec::new();
    let mut excluded = 0;
    for u in sample_points(m, cfg) {
        let Ok(pd) = point_data(m, x, &u) else {
            excluded += 1;
            continue;
        };
        let g = m.metric(&pd.jet);
        let r = complement_basis(&g, &pd.frame.tangent_coords)
            .iter()
            .map(|z| {
                numdiff::derivative(|e: f64| theta(&shifted(&u, z, e)), 0.0, 1, fd, None)
                    .map_or(f64::NAN, f64::abs)
            })
            .fold(0.0, f64::max);
        if r.is_finite() {
            samples.push((u, r));
        } else {
            excluded += 1;
        }
    }
    ReportEntry::from_samples(ITEM_2, &samples, cfg.tol_angle, excluded, "frame undefined at every sample")
}

/// Tangential part of `∇̄_T T`, differentiating `T` along its own parameter direction.
pub fn check_t_geodesic(m: &ParametricImmersion, x: &ConformalField, cfg: &VerifyConfig) -> ReportEntry {
    let fd = diff_cfg(m, cfg);
    let amb = m.ambient();
    let dim = amb.dim();
    let tangent = |u: &[f64]| {
        point_data(m, x, u)
            .map(|pd| pd.frame.tangent)
            .unwrap_or_else(|_| DVector::from_element(dim, f64::NAN))
    };
    let mut samples = Vec::new();
    let mut excluded = 0;
    for u in sample_points(m, cfg) {
        let Ok(pd) = point_data(m, x, &u) else {
            excluded += 1;
            continue;
        };
        if pd.frame.cos_theta.abs() < EPS_COSTHETA {
            excluded += 1;
            continue;
        }
        let v = &pd.frame.tangent_coords;
        let Ok(dt) = numdiff::derivative(|e: f64| tangent(&shifted(&u, v, e)), 0.0, 1, fd, None) else {
            excluded += 1;
            continue;
        };
        let (p, t, xi) = (&pd.frame.point, &pd.frame.tangent, &pd.frame.xi);
        let acc = dt + amb.christoffel(p, t, t);
        let tang = &acc - xi * amb.inner(p, &acc, xi);
        let r = amb.norm(p, &tang);
        if r.is_finite() {
            samples.push((u, r));
        } else {
            excluded += 1;
        }
    }
    ReportEntry::from_samples(ITEM_3, &samples, cfg.tol_geodesic, excluded, HALF_PI_REASON)
}

/// Spread of a quantity along each level, reduced to per-level samples.
struct LevelSpread {
    h: Vec<(Vec<f64>, f64)>,
    f: Vec<(Vec<f64>, f64)>,
    excluded: usize,
    admitted: usize,
}

impl LevelSpread {
    fn new() -> Self {
        Self { h: Vec::new(), f: Vec::new(), excluded: 0, admitted: 0 }
    }

    fn push_level(&mut self, vals: &[(Vec2, f64, f64)]) {
        if vals.len() < 2 {
            self.excluded += vals.len();
            return;
        }
        self.admitted += vals.len();
        let spread = |k: usize| {
            let pick = |v: &(Vec2, f64, f64)| if k == 0 { v.1 } else { v.2 };
            let lo = vals.iter().map(pick).fold(f64::INFINITY, f64::min);
            let (arg, hi) = vals.iter().map(|v| (v.0, pick(v))).fold((vals[0].0, f64::NEG_INFINITY), |a, b| {
                if b.1 > a.1 {
                    b
                } else {
                    a
                }
            });
            (vec![arg.x, arg.y], hi - lo)
        };
        self.h.push(spread(0));
        self.f.push(spread(1));
    }

    fn entries(self, cfg: &VerifyConfig) -> (ReportEntry, ReportEntry) {
        let reason = "no level set with two admissible samples";
        // statistics run over levels; the sample count is in points
        let mut e4 = ReportEntry::from_samples(ITEM_4, &self.h, cfg.tol_level, self.excluded, reason);
        let mut e5 = ReportEntry::from_samples(ITEM_5, &self.f, cfg.tol_level, self.excluded, reason);
        e4.samples = self.admitted;
        e5.samples = self.admitted;
        (e4, e5)
    }
}

fn level_values(f: &GraphFunction, cfg: &VerifyConfig) -> Vec<f64> {
    let n = cfg.level_grid;
    let vals: Vec<f64> = grid_points(f.domain(), &[n, n]).iter().map(|x| f.value(x)).filter(|v| v.is_finite()).collect();
    let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(hi > lo) {
        return Vec::new();
    }
    (1..=cfg.levels).map(|k| lo + (hi - lo) * k as f64 / (cfg.levels + 1) as f64).collect()
}

fn inside(domain: &[(f64, f64)], p: Vec2) -> bool {
    (domain[0].0..=domain[0].1).contains(&p.x) && (domain[1].0..=domain[1].1).contains(&p.y)
}

/// Items 4 and 5 for the graph of `F` in `W`: spread of `|∇h|` and `|∇F|` on level sets of `F`.
pub fn check_gradient_norm_on_levels(f: &GraphFunction, w: &WarpedProduct, cfg: &VerifyConfig) -> (ReportEntry, ReportEntry) {
    let mut out = LevelSpread::new();
    if f.dim() != 2 {
        let reason = "level sets need a 2D base";
        return (
            ReportEntry::skipped(ITEM_4, cfg.tol_level, 0, reason),
            ReportEntry::skipped(ITEM_5, cfg.tol_level, 0, reason),
        );
    }
    for c in level_values(f, cfg) {
        let Ok(lines) = level_set_extract(f, c, [cfg.level_grid, cfg.level_grid]) else {
            continue;
        };
        for line in lines {
            let mut vals = Vec::new();
            for p in line.iter().filter(|p| inside(f.domain(), **p)) {
                match gradient_relations(f, w, &[p.x, p.y]) {
                    Ok(r) if r.cos_theta.abs() >= EPS_COSTHETA && !r.critical => vals.push((*p, r.norm_grad_h, r.norm_grad_f)),
                    _ => out.excluded += 1,
                }
            }
            out.push_level(&vals);
        }
    }
    out.entries(cfg)
}

/// Items 4 and 5 on a 2D parametrized hypersurface: `h` is the leaf coordinate of `X`.
///
/// `|∇h|` comes from differences of `h∘φ` and the induced metric; `|∇F|` from
/// `|∇F|² = |X|² |∇h|² / (1 - |∇h|²)`.
pub fn check_levels_on_immersion(m: &ParametricImmersion, x: &ConformalField, cfg: &VerifyConfig) -> (ReportEntry, ReportEntry) {
    if m.param_dim() != 2 {
        let reason = "level sets need a 2D parameter domain";
        return (
            ReportEntry::skipped(ITEM_4, cfg.tol_level, 0, reason),
            ReportEntry::skipped(ITEM_5, cfg.tol_level, 0, reason),
        );
    }
    let domain = inset_domain(m, cfg.inset);
    let (mh, xh) = (m.clone(), x.clone());
    let height = GraphFunction::new(domain.clone(), move |u| xh.height(&mh.point(u))).with_fd(diff_cfg(m, cfg));
    let fd = diff_cfg(m, cfg);
    let mut out = LevelSpread::new();
    for c in level_values(&height, cfg) {
        let Ok(lines) = level_set_extract(&height, c, [cfg.level_grid, cfg.level_grid]) else {
            continue;
        };
        for line in lines {
            let mut vals = Vec::new();
            for p in line.iter().filter(|p| inside(&domain, **p)) {
                let u = [p.x, p.y];
                let Ok(pd) = point_data(m, x, &u) else {
                    out.excluded += 1;
                    continue;
                };
                if pd.frame.cos_theta.abs() < EPS_COSTHETA {
                    out.excluded += 1;
                    continue;
                }
                let h = |v: &[f64]| x.height(&m.point(v));
                let dh = DVector::from_fn(2, |i, _| numdiff::partial(&h, &u, i, fd));
                let g = m.metric(&pd.jet);
                let Some(gh) = g.cholesky().map(|ch| ch.solve(&dh)) else {
                    out.excluded += 1;
                    continue;
                };
                let gh2 = dh.dot(&gh);
                if !(gh2 < 1.0) {
                    out.excluded += 1;
                    continue;
                }
                let rho = pd.frame.field_norm;
                vals.push((*p, gh2.sqrt(), rho * (gh2 / (1.0 - gh2)).sqrt()));
            }
            out.push_level(&vals);
        }
    }
    out.entries(cfg)
}
