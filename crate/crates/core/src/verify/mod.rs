//! Numerical tests of the five equivalent characterizations of a canonical
//! principal direction.

pub mod checks;
pub mod report;

use std::sync::Arc;

pub use checks::{
    check_angle_constancy, check_gradient_norm_on_levels, check_levels_on_immersion, check_principal_direction,
    check_t_geodesic, ITEM_1, ITEM_2, ITEM_3, ITEM_4, ITEM_5,
};
pub use report::{ReportEntry, ResidualReport, Status};

use crate::construct::field::ConformalField;
use crate::construct::graph::GraphFunction;
use crate::construct::surface::graph_in_warped_product;
use crate::construct::warped::WarpedProduct;
use crate::diffgeo::immersion::ParametricImmersion;
use crate::error::Result;
use crate::tolerances::{H_FD, TOL_ANGLE, TOL_CPD, TOL_GEODESIC, TOL_LEVEL};

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyConfig {
    /// Samples per parameter direction; the last entry repeats.
    pub grid: Vec<usize>,
    /// Fraction of each parameter interval kept clear of difference stencils.
    pub inset: f64,
    /// Step for differencing `θ` and `T`, scaled by the largest parameter extent.
    pub fd_step: f64,
    pub tol_cpd: f64,
    pub tol_angle: f64,
    pub tol_geodesic: f64,
    pub tol_level: f64,
    pub levels: usize,
    pub level_grid: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            grid: vec![21],
            inset: 0.02,
            fd_step: H_FD,
            tol_cpd: TOL_CPD,
            tol_angle: TOL_ANGLE,
            tol_geodesic: TOL_GEODESIC,
            tol_level: TOL_LEVEL,
            levels: 5,
            level_grid: 101,
        }
    }
}

impl VerifyConfig {
    pub fn with_grid(mut self, n: usize) -> Self {
        self.grid = vec![n];
        self
    }

    /// Overrides every check tolerance.
    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol_cpd = tol;
        self.tol_angle = tol;
        self.tol_geodesic = tol;
        self.tol_level = tol;
        self
    }
}

/// What a report is about.
#[derive(Debug, Clone)]
pub enum Subject {
    Immersion { m: ParametricImmersion, field: ConformalField },
    Graph { f: GraphFunction, w: Arc<WarpedProduct> },
}

impl Subject {
    pub fn label(&self) -> String {
        match self {
            Subject::Immersion { m, .. } => m.label().to_string(),
            Subject::Graph { f, .. } => format!("graph({})", f.label()),
        }
    }
}

/// Runs every applicable check; entries are sorted by name.
pub fn theorem_report(subject: &Subject, cfg: &VerifyConfig) -> Result<ResidualReport> {
    let (m, field) = match subject {
        Subject::Immersion { m, field } => (m.clone(), field.clone()),
        Subject::Graph { f, w } => (graph_in_warped_product(f, w.clone())?, ConformalField::warped(w.clone())),
    };
    let mut entries = vec![
        check_principal_direction(&m, &field, cfg),
        check_angle_constancy(&m, &field, cfg),
        check_t_geodesic(&m, &field, cfg),
    ];
    let (e4, e5) = match subject {
        Subject::Immersion { .. } => check_levels_on_immersion(&m, &field, cfg),
        Subject::Graph { f, w } => check_gradient_norm_on_levels(f, w, cfg),
    };
    entries.push(e4);
    entries.push(e5);
    let grid = (0..m.param_dim()).map(|i| *cfg.grid.get(i).or(cfg.grid.last()).unwrap_or(&21)).collect();
    Ok(ResidualReport::new(subject.label(), grid, cfg.fd_step, entries))
}
