//! Declarative scene files: one surface, a list of checks, and output paths.
//!
//! The format is TOML. Paths inside a scene resolve against the scene
//! file's directory.
//!
//! ```toml
//! [ambient]
//! kind = "euclidean"        # or "warped", with rho = "<expr in t>" and interval = [a, b]
//! dim = 3
//!
//! [field]
//! kind = "constant"         # constant | radial | warped
//! components = [0, 0, 1]    # the vector, or the center of a radial field
//!
//! [construction.profile]
//! named = "catenoid"        # catenoid | cylinder | plane, or gamma + beta tables
//!
//! [[checks]]
//! name = "theorem"          # theorem | mean_curvature | bochner | dichotomy | eikonal | slices
//! tol = 1e-5
//!
//! [output]
//! mesh_path = "catenoid.obj"
//! report_path = "catenoid.tsv"
//! grid = [51, 51]
//! ```

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use nalgebra::{DVector, Vector3};
use serde::Deserialize;
use thiserror::Error;

use crate::cmc::{bochner_residual, dichotomy_check, random_points, slice_curvature_check, Verdict};
use crate::construct::field::ConformalField;
use crate::construct::graph::GraphFunction;
use crate::construct::profile::{ProfileCurve, ProfileJet};
use crate::construct::surface::{cpd_surface_r3, graph_in_warped_product};
use crate::construct::warped::WarpedProduct;
use crate::diffgeo::curve::{arclength_reparam, ParamCurve, PlaneCurve, Vec2};
use crate::diffgeo::immersion::{grid_points, shape_data, ParametricImmersion};
use crate::error::GeomError;
use crate::expr::{parse, Expr};
use crate::mesh::{sample_grid, write_obj};
use crate::tolerances::{H_FD, TOL_EIK, TOL_NUM, TOL_NUM_FD};
use crate::transnormal::{
    eikonal_residual_with_tol, h_from_b, transnormal_from_distance, BaseCurve, CurveBase, Polyline, PolylineBase, Side,
    TransnormalSpec,
};
use crate::verify::{theorem_report, ReportEntry, ResidualReport, Subject, VerifyConfig};

#[derive(Debug, Error)]
pub enum SceneError {
    #[error("{path}: {msg}")]
    Syntax { path: String, msg: String },
    #[error("{field}: {msg}")]
    Field { field: String, msg: String },
    #[error("construction failed: {0}")]
    Construction(#[from] GeomError),
    #[error("{0}")]
    Io(String),
}

fn field_err(field: impl Into<String>, msg: impl ToString) -> SceneError {
    SceneError::Field { field: field.into(), msg: msg.to_string() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AmbientKind {
    #[default]
    Euclidean,
    Warped,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AmbientConfig {
    #[serde(default)]
    pub kind: AmbientKind,
    #[serde(default = "default_dim")]
    pub dim: usize,
    /// Expression in `t`; a bare function name such as `cosh` means `cosh(t)`.
    pub rho: Option<String>,
    pub interval: Option<[f64; 2]>,
}

fn default_dim() -> usize {
    3
}

impl Default for AmbientConfig {
    fn default() -> Self {
        Self { kind: AmbientKind::Euclidean, dim: 3, rho: None, interval: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldKindConfig {
    #[default]
    Constant,
    Radial,
    Warped,
}

#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldConfig {
    #[serde(default)]
    pub kind: FieldKindConfig,
    pub components: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, tag = "kind", rename_all = "lowercase")]
pub enum GammaConfig {
    Circle {
        #[serde(default = "one")]
        radius: f64,
    },
    Ellipse {
        a: f64,
        b: f64,
    },
    Line {
        #[serde(default = "one")]
        half_length: f64,
    },
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BetaConfig {
    pub f: String,
    pub g: String,
    pub t_range: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileConfig {
    pub named: Option<String>,
    pub gamma: Option<GammaConfig>,
    pub beta: Option<BetaConfig>,
    /// Profile parameter range for named surfaces.
    pub t_range: Option<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransnormalConfig {
    pub base_polyline_path: String,
    /// Expression in `s` (or `sigma`).
    pub b: String,
    pub s0: f64,
    pub tube: f64,
    /// `[[x0, x1], [y0, y1]]`, inside the tube and off `L`.
    pub region: [[f64; 2]; 2],
    #[serde(default)]
    pub side: Option<String>,
    #[serde(default)]
    pub flip: bool,
    /// Replace the polyline by the C² spline through its vertices.
    #[serde(default)]
    pub smooth: bool,
    pub s_range: Option<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphConfig {
    #[serde(rename = "F")]
    pub f: String,
    pub domain: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstructionConfig {
    pub profile: Option<ProfileConfig>,
    pub transnormal: Option<TransnormalConfig>,
    pub graph: Option<GraphConfig>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckConfig {
    pub name: String,
    pub tol: Option<f64>,
    /// Target value for `mean_curvature`.
    pub target: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub mesh_path: Option<String>,
    pub report_path: Option<String>,
    #[serde(default = "default_grid")]
    pub grid: [usize; 2],
    #[serde(default)]
    pub normals: bool,
    #[serde(default)]
    pub allow_holes: bool,
}

fn default_grid() -> [usize; 2] {
    [51, 51]
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { mesh_path: None, report_path: None, grid: default_grid(), normals: false, allow_holes: false }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneConfig {
    #[serde(default)]
    pub ambient: AmbientConfig,
    #[serde(default)]
    pub field: FieldConfig,
    pub construction: ConstructionConfig,
    #[serde(default)]
    pub checks: Vec<CheckConfig>,
    #[serde(default)]
    pub output: OutputConfig,
}

impl SceneConfig {
    pub fn from_toml(text: &str, path: &str) -> Result<Self, SceneError> {
        let cfg: SceneConfig =
            toml::from_str(text).map_err(|e| SceneError::Syntax { path: path.to_string(), msg: e.to_string() })?;
        let c = &cfg.construction;
        let present = [c.profile.is_some(), c.transnormal.is_some(), c.graph.is_some()].iter().filter(|b| **b).count();
        if present != 1 {
            return Err(field_err("construction", format!("expected exactly one of profile, transnormal, graph; found {present}")));
        }
        Ok(cfg)
    }
}

/// Command-line overrides; paths here are taken as given.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub grid: Option<[usize; 2]>,
    pub tol: Option<f64>,
    pub out: Option<PathBuf>,
    pub report: Option<PathBuf>,
}

enum Kind {
    Profile,
    Transnormal { b: ScalarMap },
    Graph,
}

/// A built surface with the data its checks need.
pub struct Scene {
    pub label: String,
    pub surface: ParametricImmersion,
    pub subject: Subject,
    pub graph: Option<GraphFunction>,
    kind: Kind,
    closed_form: bool,
}

fn expr_field(src: &str, vars: &[&str], field: &str) -> Result<Expr, SceneError> {
    parse(src, vars).map_err(|e| field_err(field, e))
}

fn build_ambient(cfg: &AmbientConfig) -> Result<Arc<WarpedProduct>, SceneError> {
    if !(2..=4).contains(&cfg.dim) {
        return Err(field_err("ambient.dim", format!("{} not in 2..=4", cfg.dim)));
    }
    match cfg.kind {
        AmbientKind::Euclidean => {
            if cfg.rho.is_some() {
                return Err(field_err("ambient.rho", "only allowed with kind = \"warped\""));
            }
            Ok(Arc::new(WarpedProduct::euclidean(cfg.dim)))
        }
        AmbientKind::Warped => {
            let src = cfg.rho.as_deref().ok_or_else(|| field_err("ambient.rho", "missing"))?;
            let src = if src.chars().all(|c| c.is_ascii_alphabetic()) && src != "t" && src != "pi" && src != "e" {
                format!("{src}(t)")
            } else {
                src.to_string()
            };
            let rho = expr_field(&src, &["t"], "ambient.rho")?;
            let rho_p = rho.derivative(0);
            let interval = cfg.interval.map(|[a, b]| (a, b)).unwrap_or((f64::NEG_INFINITY, f64::INFINITY));
            let w = WarpedProduct::new(interval, cfg.dim - 1, move |t| rho.eval(&[t]), move |t| rho_p.eval(&[t]))
                .map_err(|e| field_err("ambient.rho", e))?;
            Ok(Arc::new(w))
        }
    }
}

fn build_field(cfg: &FieldConfig, w: &Arc<WarpedProduct>) -> Result<ConformalField, SceneError> {
    let dim = w.dim();
    let comps = |default: DVector<f64>| -> Result<DVector<f64>, SceneError> {
        match &cfg.components {
            None => Ok(default),
            Some(c) if c.len() == dim => Ok(DVector::from_vec(c.clone())),
            Some(c) => Err(field_err("field.components", format!("expected {dim} entries, found {}", c.len()))),
        }
    };
    match cfg.kind {
        FieldKindConfig::Warped => Ok(ConformalField::warped(w.clone())),
        _ if !w.is_flat() => Err(field_err("field.kind", "constant and radial fields need a euclidean ambient")),
        FieldKindConfig::Constant => {
            let mut e = DVector::zeros(dim);
            e[dim - 1] = 1.0;
            ConformalField::constant(comps(e)?).map_err(|e| field_err("field.components", e))
        }
        FieldKindConfig::Radial => Ok(ConformalField::radial(comps(DVector::zeros(dim))?)),
    }
}

fn beta_from_exprs(cfg: &BetaConfig) -> Result<ProfileCurve, SceneError> {
    let f = expr_field(&cfg.f, &["t"], "construction.profile.beta.f")?;
    let g = expr_field(&cfg.g, &["t"], "construction.profile.beta.g")?;
    let (fp, gp) = (f.derivative(0), g.derivative(0));
    let (fpp, gpp) = (fp.derivative(0), gp.derivative(0));
    let [a, b] = cfg.t_range;
    if !(a < b) {
        return Err(field_err("construction.profile.beta.t_range", "must be increasing"));
    }
    let beta = ProfileCurve::from_jet(
        move |t| {
            let x = [t];
            ProfileJet { f: f.eval(&x), fp: fp.eval(&x), fpp: fpp.eval(&x), g: g.eval(&x), gp: gp.eval(&x), gpp: gpp.eval(&x) }
        },
        (a, b),
    );
    beta.validate(256).map_err(|e| field_err("construction.profile.beta", e))?;
    Ok(beta)
}

fn gamma_from_config(cfg: &GammaConfig) -> Result<PlaneCurve, SceneError> {
    match *cfg {
        GammaConfig::Circle { radius } if radius > 0.0 => {
            Ok(PlaneCurve::circle(Vec2::zeros(), radius, (0.0, 2.0 * PI * radius)))
        }
        GammaConfig::Ellipse { a, b } if a > 0.0 && b > 0.0 => {
            let c = ParamCurve::new(move |s| Vec2::new(a * s.cos(), b * s.sin()), (0.0, 2.0 * PI));
            arclength_reparam(&c, 2048).map_err(|e| field_err("construction.profile.gamma", e))
        }
        GammaConfig::Line { half_length } if half_length > 0.0 => {
            Ok(PlaneCurve::line(Vec2::zeros(), Vec2::new(1.0, 0.0), (-half_length, half_length)))
        }
        _ => Err(field_err("construction.profile.gamma", "sizes must be positive")),
    }
}

fn build_profile(cfg: &ProfileConfig, field: &ConformalField) -> Result<(ParametricImmersion, String, bool), SceneError> {
    let x0 = match field.kind() {
        crate::construct::field::FieldKind::Constant(v) if v.len() == 3 => Vector3::new(v[0], v[1], v[2]),
        _ => return Err(field_err("field.kind", "profile surfaces need a constant field in 3D")),
    };
    let t_range = cfg.t_range.map(|[a, b]| (a, b)).unwrap_or((-1.0, 1.0));
    let (gamma, beta, label) = match (&cfg.named, &cfg.gamma, &cfg.beta) {
        (Some(name), None, None) => {
            let circle = PlaneCurve::circle(Vec2::zeros(), 1.0, (0.0, 2.0 * PI));
            let vertical = ProfileCurve::line(0.0, 0.0, PI / 2.0, t_range);
            match name.as_str() {
                "catenoid" => (circle, ProfileCurve::catenary(t_range), "catenoid"),
                "cylinder" => (circle, vertical, "cylinder"),
                "plane" => (PlaneCurve::line(Vec2::zeros(), Vec2::new(1.0, 0.0), (-1.0, 1.0)), vertical, "plane"),
                other => {
                    return Err(field_err(
                        "construction.profile.named",
                        format!("unknown surface '{other}' (catenoid, cylinder, plane)"),
                    ))
                }
            }
        }
        (None, Some(g), Some(b)) => (gamma_from_config(g)?, beta_from_exprs(b)?, "profile"),
        _ => {
            return Err(field_err("construction.profile", "give either `named` or both `gamma` and `beta`"));
        }
    };
    let closed = gamma.has_closed_form() && beta.is_closed_form();
    let m = cpd_surface_r3(&gamma, &beta, x0)?;
    Ok((m, label.to_string(), closed))
}

/// `σ(u)` with `σ' = b(σ)`, `σ(0) = s0`, at `u = tube`.
fn sigma_at(b: &dyn Fn(f64) -> f64, s0: f64, tube: f64) -> f64 {
    let n = 400;
    let h = tube / n as f64;
    let mut s = s0;
    for _ in 0..n {
        let k1 = b(s);
        let k2 = b(s + 0.5 * h * k1);
        let k3 = b(s + 0.5 * h * k2);
        let k4 = b(s + h * k3);
        s += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    s
}

pub type ScalarMap = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// `F = h∘d` and `b` from a transnormal table; errors name the offending key.
pub fn transnormal_graph(cfg: &TransnormalConfig, dir: &Path) -> Result<(GraphFunction, ScalarMap), SceneError> {
    let b_expr = expr_field(&cfg.b, &["s", "sigma"], "construction.transnormal.b")?;
    let b: ScalarMap = Arc::new(move |s| b_expr.eval(&[s, s]));
    if !(cfg.tube > 0.0) {
        return Err(field_err("construction.transnormal.tube", "must be positive"));
    }
    let side = match cfg.side.as_deref() {
        None | Some("positive") => Side::Positive,
        Some("negative") => Side::Negative,
        Some("unsigned") => Side::Unsigned,
        Some(other) => return Err(field_err("construction.transnormal.side", format!("unknown side '{other}'"))),
    };
    let path = dir.join(&cfg.base_polyline_path);
    if !path.exists() {
        return Err(field_err("construction.transnormal.base_polyline_path", format!("{} does not exist", path.display())));
    }
    let line = Polyline::read(&path).map_err(|e| field_err("construction.transnormal.base_polyline_path", e))?;
    let range = match cfg.s_range {
        Some([a, c]) => (a, c),
        None => {
            let end = sigma_at(b.as_ref(), cfg.s0, cfg.tube);
            if !end.is_finite() || end <= cfg.s0 {
                return Err(field_err("construction.transnormal.b", "b must be positive on the tube"));
            }
            (cfg.s0, end + 0.05 * (end - cfg.s0))
        }
    };
    let bq = b.clone();
    let map = h_from_b(move |s| bq(s), cfg.s0, range, 257).map_err(|e| field_err("construction.transnormal.b", e))?;
    let base = if cfg.smooth {
        BaseCurve::Curve(CurveBase::from_polyline(&line, cfg.tube, cfg.flip)?)
    } else {
        BaseCurve::Polyline(PolylineBase::new(line, cfg.tube, cfg.flip)?)
    };
    let spec = TransnormalSpec::new(map, base).with_side(side);
    let region: Vec<(f64, f64)> = cfg.region.iter().map(|r| (r[0], r[1])).collect();
    let f = transnormal_from_distance(&spec, &region)
        .map_err(|e| field_err("construction.transnormal.region", e))?
        .with_label(format!("h∘d, b = {}", cfg.b.trim()));
    Ok((f, b))
}

impl Scene {
    pub fn build(cfg: &SceneConfig, dir: &Path) -> Result<Scene, SceneError> {
        let w = build_ambient(&cfg.ambient)?;
        let field = build_field(&cfg.field, &w)?;
        let c = &cfg.construction;
        if let Some(p) = &c.profile {
            if !w.is_flat() || w.dim() != 3 {
                return Err(field_err("ambient", "profile surfaces live in euclidean 3-space"));
            }
            let (m, label, closed) = build_profile(p, &field)?;
            let subject = Subject::Immersion { m: m.clone(), field };
            return Ok(Scene { label, surface: m, subject, graph: None, kind: Kind::Profile, closed_form: closed });
        }
        let (f, kind) = if let Some(g) = &c.graph {
            let n = w.base_dim();
            if g.domain.len() != n {
                return Err(field_err("construction.graph.domain", format!("expected {n} intervals, found {}", g.domain.len())));
            }
            let domain = g.domain.iter().map(|r| (r[0], r[1])).collect();
            let f = GraphFunction::from_expr(&g.f, domain).map_err(|e| field_err("construction.graph.F", e))?;
            (f, Kind::Graph)
        } else if let Some(t) = &c.transnormal {
            if w.base_dim() != 2 {
                return Err(field_err("ambient.dim", "transnormal graphs need a 2D base (dim = 3)"));
            }
            let (f, b) = transnormal_graph(t, dir)?;
            (f, Kind::Transnormal { b })
        } else {
            unreachable!("validated in from_toml")
        };
        let closed = matches!(kind, Kind::Graph);
        let m = graph_in_warped_product(&f, w.clone())?;
        let label = format!("graph({})", f.label());
        let subject = Subject::Graph { f: f.clone(), w };
        Ok(Scene { label, surface: m, subject, graph: Some(f), kind, closed_form: closed })
    }

    fn graph_or(&self, field: &str, what: &str) -> Result<&GraphFunction, SceneError> {
        self.graph.as_ref().ok_or_else(|| field_err(field, format!("{what} needs a graph or transnormal construction")))
    }

    /// Report entries of one named check.
    pub fn run_check(&self, idx: usize, check: &CheckConfig, grid: [usize; 2], tol_override: Option<f64>) -> Result<Vec<ReportEntry>, SceneError> {
        let field = format!("checks[{idx}].name");
        let tol = tol_override.or(check.tol);
        let domain = self.surface.domain().to_vec();
        match check.name.as_str() {
            "theorem" => {
                let mut cfg = VerifyConfig { grid: grid.to_vec(), ..VerifyConfig::default() };
                if let Some(t) = tol {
                    cfg = cfg.with_tol(t);
                }
                Ok(theorem_report(&self.subject, &cfg)?.entries)
            }
            "mean_curvature" => {
                let target = check.target.unwrap_or(0.0);
                let tol = tol.unwrap_or(if self.closed_form { TOL_NUM } else { TOL_NUM_FD });
                let inset: Vec<(f64, f64)> =
                    domain.iter().map(|&(a, b)| (a + 0.01 * (b - a), b - 0.01 * (b - a))).collect();
                let (mut samples, mut excluded) = (Vec::new(), 0);
                for u in grid_points(&inset, &grid) {
                    // H with respect to -ξ: positive on the round sphere and on upward caps
                    match shape_data(&self.surface, &u, -1.0) {
                        Ok(sd) if sd.mean_curvature.is_finite() => samples.push((u, (sd.mean_curvature - target).abs())),
                        _ => excluded += 1,
                    }
                }
                Ok(vec![ReportEntry::from_samples("mean_curvature", &samples, tol, excluded, "no regular point")])
            }
            "bochner" => {
                let f = self.graph_or(&field, "bochner")?;
                let tol = tol.unwrap_or(if self.closed_form { 1e-10 } else { 1e-4 });
                Ok(vec![bochner_residual(f, &grid_points(f.domain(), &grid), tol)])
            }
            "dichotomy" => {
                let f = self.graph_or(&field, "dichotomy")?;
                let tol = tol.unwrap_or(1e-8);
                let pts = grid_points(f.domain(), &[grid[0].min(21), grid[1].min(21)]);
                let r = dichotomy_check(f, &pts, tol, tol.sqrt())?;
                let one = |name: &str, v: f64, t: f64| ReportEntry::from_samples(name, &[(vec![], v)], t, 0, "");
                let mut out = vec![
                    one("dichotomy_grad_norm_variance", r.grad_norm_variance, tol),
                    one("dichotomy_laplacian_variance", r.laplacian_variance, tol),
                ];
                let names = ["dichotomy_hessian", "dichotomy_second_form", "dichotomy_parallel_t"];
                if r.verdict == Verdict::HypothesisNotMet {
                    out.extend(names.iter().map(|n| ReportEntry::skipped(n, tol.sqrt(), 0, &r.summary())));
                } else {
                    let vals = [r.max_hessian, r.max_principal_curvature, r.parallel_t_residual];
                    out.extend(names.iter().zip(vals).map(|(n, v)| one(n, v, tol.sqrt())));
                }
                Ok(out)
            }
            "eikonal" => {
                let Kind::Transnormal { b } = &self.kind else {
                    return Err(field_err(&field, "eikonal needs a transnormal construction"));
                };
                let f = self.graph_or(&field, "eikonal")?;
                let inset: Vec<(f64, f64)> =
                    f.domain().iter().map(|&(a, b)| (a + 0.01 * (b - a), b - 0.01 * (b - a))).collect();
                let rep = eikonal_residual_with_tol(f, b.as_ref(), &grid_points(&inset, &grid), tol.unwrap_or(TOL_EIK));
                Ok(vec![ReportEntry::from_samples("eikonal", &rep.per_point, rep.tol, 0, "empty grid")])
            }
            "slices" => {
                let Subject::Immersion { m, field: x } = &self.subject else {
                    return Err(field_err(&field, "slices needs a profile construction"));
                };
                if !matches!(self.kind, Kind::Profile) {
                    return Err(field_err(&field, "slices needs a profile construction"));
                }
                let (a, b) = domain[1];
                let ts: Vec<f64> = [0.25, 0.5, 0.75].iter().map(|q| a + q * (b - a)).collect();
                let inset = [(domain[0].0, domain[0].1), (a + 0.02 * (b - a), b - 0.02 * (b - a))];
                let pts = random_points(&inset, 100, 7);
                Ok(slice_curvature_check(m, x, &ts, 64, &pts, tol.unwrap_or(1e-6)))
            }
            other => Err(field_err(
                field,
                format!("unknown check '{other}' (theorem, mean_curvature, bochner, dichotomy, eikonal, slices)"),
            )),
        }
    }

    pub fn report(&self, checks: &[CheckConfig], grid: [usize; 2], tol: Option<f64>) -> Result<ResidualReport, SceneError> {
        let default = [CheckConfig { name: "theorem".into(), tol: None, target: None }];
        let checks = if checks.is_empty() { &default[..] } else { checks };
        let mut entries = Vec::new();
        for (i, c) in checks.iter().enumerate() {
            entries.extend(self.run_check(i, c, grid, tol)?);
        }
        Ok(ResidualReport::new(self.label.clone(), grid.to_vec(), H_FD, entries))
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub report: ResidualReport,
    pub mesh_path: Option<PathBuf>,
    pub report_path: Option<PathBuf>,
}

impl RunOutcome {
    /// 0 when every non-skipped entry passes, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.report.all_pass() {
            0
        } else {
            1
        }
    }
}

pub fn load_scene(path: &Path) -> Result<(SceneConfig, PathBuf), SceneError> {
    let text = std::fs::read_to_string(path).map_err(|e| SceneError::Io(format!("{}: {e}", path.display())))?;
    let cfg = SceneConfig::from_toml(&text, &path.display().to_string())?;
    let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    Ok((cfg, dir))
}

fn write_text(path: &Path, text: &str) -> Result<(), SceneError> {
    std::fs::write(path, text).map_err(|e| SceneError::Io(format!("{}: {e}", path.display())))
}

fn run(path: &Path, ov: &Overrides, with_mesh: bool) -> Result<RunOutcome, SceneError> {
    let (cfg, dir) = load_scene(path)?;
    let grid = ov.grid.unwrap_or(cfg.output.grid);
    if grid.iter().any(|&n| n < 2) {
        return Err(field_err("output.grid", format!("{grid:?} has an entry below 2")));
    }
    let scene = Scene::build(&cfg, &dir)?;
    let mut mesh_path = None;
    if with_mesh {
        mesh_path = ov.out.clone().or_else(|| cfg.output.mesh_path.as_ref().map(|p| dir.join(p)));
        if let Some(p) = &mesh_path {
            let mesh = sample_grid(&scene.surface, grid[0], grid[1])?;
            write_obj(&mesh, p, cfg.output.normals, cfg.output.allow_holes)?;
        }
    }
    let report = scene.report(&cfg.checks, grid, ov.tol)?;
    let report_path = ov.report.clone().or_else(|| cfg.output.report_path.as_ref().map(|p| dir.join(p)));
    if let Some(p) = &report_path {
        write_text(p, &report.to_tsv())?;
    }
    Ok(RunOutcome { report, mesh_path, report_path })
}

/// Builds the surface, writes mesh and report.
pub fn run_generate(path: &Path, ov: &Overrides) -> Result<RunOutcome, SceneError> {
    run(path, ov, true)
}

/// Runs the checks only.
pub fn run_verify(path: &Path, ov: &Overrides) -> Result<RunOutcome, SceneError> {
    run(path, ov, false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::Status;

    fn build(text: &str) -> Result<Scene, SceneError> {
        let cfg = SceneConfig::from_toml(text, "test.scene")?;
        Scene::build(&cfg, Path::new("."))
    }

    #[test]
    fn exactly_one_construction() {
        let two = "[construction.graph]\nF = \"x\"\ndomain = [[0,1],[0,1]]\n[construction.profile]\nnamed = \"catenoid\"\n";
        let e = SceneConfig::from_toml(two, "s").unwrap_err();
        assert!(e.to_string().starts_with("construction:"), "{e}");
        let none = "[construction]\n";
        assert!(SceneConfig::from_toml(none, "s").is_err());
    }

    #[test]
    fn syntax_errors_name_line_and_key() {
        let e = SceneConfig::from_toml("[construction.graph]\nF = \"x\"\ndomian = 3\n", "bad.scene").unwrap_err();
        let msg = e.to_string();
        assert!(msg.contains("bad.scene") && msg.contains("domian") && msg.contains("line 3"), "{msg}");
    }

    #[test]
    fn bad_expression_names_the_field() {
        let e = build("[construction.graph]\nF = \"x + (\"\ndomain = [[0,1],[0,1]]\n").err().unwrap();
        assert!(e.to_string().starts_with("construction.graph.F:"), "{e}");
    }

    #[test]
    fn plane_graph_has_zero_mean_curvature() {
        let s = build("[construction.graph]\nF = \"0\"\ndomain = [[-1,1],[-1,1]]\n").unwrap();
        let c = CheckConfig { name: "mean_curvature".into(), tol: None, target: None };
        let r = s.report(&[c], [11, 11], None).unwrap();
        assert_eq!(r.entries[0].status, Status::Pass);
        assert_eq!(r.entries[0].max, 0.0);
    }

    #[test]
    fn warped_rho_accepts_bare_names() {
        let cfg = AmbientConfig { kind: AmbientKind::Warped, dim: 3, rho: Some("cosh".into()), interval: None };
        let w = build_ambient(&cfg).unwrap();
        assert!((w.rho(1.0) - 1f64.cosh()).abs() < 1e-15);
        assert!((w.rho_prime(1.0) - 1f64.sinh()).abs() < 1e-15);
    }

    #[test]
    fn unknown_check_is_an_input_error() {
        let s = build("[construction.profile]\nnamed = \"cylinder\"\n").unwrap();
        let c = CheckConfig { name: "nope".into(), tol: None, target: None };
        let e = s.report(&[c], [5, 5], None).unwrap_err();
        assert!(e.to_string().starts_with("checks[0].name:"), "{e}");
    }
}
