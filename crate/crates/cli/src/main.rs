use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cpd_core::cmc::cmc_profile_ode;
use cpd_core::diffgeo::immersion::{grid_points, linspace};
use cpd_core::scene::{run_generate, run_verify, transnormal_graph, Overrides, RunOutcome, TransnormalConfig};
use cpd_core::tolerances::TOL_EIK;
use cpd_core::transnormal::{eikonal_residual_with_tol, level_set_extract, polylines_to_csv};
use cpd_core::verify::{ReportEntry, ResidualReport};

#[derive(Parser)]
#[command(name = "cpd", version, about = "Canonical principal direction surfaces: build, mesh, verify")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Grid size, `N` or `NxM`.
    #[arg(long, value_parser = parse_grid)]
    grid: Option<[usize; 2]>,
    /// Tolerance applied to every check.
    #[arg(long)]
    tol: Option<f64>,
    /// Report path (TSV); printed to stdout when absent.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Build a scene, write its OBJ mesh and residual report.
    Generate {
        scene: PathBuf,
        #[command(flatten)]
        common: Common,
        /// Mesh path, overriding the scene's output.mesh_path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a scene's checks without writing a mesh.
    Verify {
        scene: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Integrate the constant mean curvature profile ODE.
    Profile {
        #[arg(long = "H", allow_hyphen_values = true)]
        h: f64,
        #[arg(long, allow_hyphen_values = true)]
        kappa: f64,
        #[arg(long, allow_hyphen_values = true)]
        f0: f64,
        #[arg(long, allow_hyphen_values = true)]
        fp0: f64,
        #[arg(long, default_value_t = 5.0)]
        t_max: f64,
        /// Defaults to `-t_max`.
        #[arg(long, allow_hyphen_values = true)]
        t_min: Option<f64>,
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
        /// CSV path `t,f,fp,g,gp`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build `F = h∘d` over a polyline and check `|∇F| = b(F)`.
    Transnormal {
        /// Polyline CSV with header `x,y`.
        #[arg(long)]
        base: PathBuf,
        /// `b` as an expression in `s`.
        #[arg(long)]
        b: String,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        s0: f64,
        #[arg(long)]
        tube: f64,
        /// `x0,x1,y0,y1`.
        #[arg(long, value_parser = parse_region, allow_hyphen_values = true)]
        region: [(f64, f64); 2],
        /// positive, negative or unsigned.
        #[arg(long, default_value = "positive")]
        side: String,
        #[arg(long)]
        flip: bool,
        /// Fit a C² spline through the polyline before measuring distances.
        #[arg(long)]
        smooth: bool,
        /// Number of level sets written to `--out`.
        #[arg(long, default_value_t = 5)]
        levels: usize,
        #[command(flatten)]
        common: Common,
        /// Level-set CSV path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_grid(s: &str) -> Result<[usize; 2], String> {
    let parts: Vec<&str> = s.split(['x', 'X', ',']).collect();
    let nums: Result<Vec<usize>, _> = parts.iter().map(|p| p.trim().parse::<usize>()).collect();
    match nums.map_err(|e| e.to_string())?.as_slice() {
        [n] => Ok([*n, *n]),
        [a, b] => Ok([*a, *b]),
        _ => Err(format!("expected N or NxM, got '{s}'")),
    }
}

fn parse_region(s: &str) -> Result<[(f64, f64); 2], String> {
    let v: Result<Vec<f64>, _> = s.split(',').map(|p| p.trim().parse::<f64>()).collect();
    match v.map_err(|e| e.to_string())?.as_slice() {
        [a, b, c, d] => Ok([(*a, *b), (*c, *d)]),
        _ => Err(format!("expected x0,x1,y0,y1, got '{s}'")),
    }
}

fn finish(outcome: RunOutcome) -> u8 {
    if outcome.report_path.is_none() {
        print!("{}", outcome.report.to_tsv());
    }
    if let Some(p) = &outcome.mesh_path {
        eprintln!("mesh: {}", p.display());
    }
    outcome.exit_code() as u8
}

fn overrides(common: &Common, out: Option<PathBuf>) -> Overrides {
    Overrides { grid: common.grid, tol: common.tol, out, report: common.report.clone() }
}

fn run(cli: Cli) -> Result<u8, String> {
    match cli.command {
        Command::Generate { scene, common, out } => {
            run_generate(&scene, &overrides(&common, out)).map(finish).map_err(|e| e.to_string())
        }
        Command::Verify { scene, common } => {
            run_verify(&scene, &overrides(&common, None)).map(finish).map_err(|e| e.to_string())
        }
        Command::Profile { h, kappa, f0, fp0, t_max, t_min, step, out } => {
            let range = (t_min.unwrap_or(-t_max), t_max);
            let sol = cmc_profile_ode(h, kappa, f0, fp0, range, step).map_err(|e| e.to_string())?;
            if let Some(p) = out {
                std::fs::write(&p, sol.to_csv()).map_err(|e| format!("{}: {e}", p.display()))?;
            }
            println!("{}", sol.classification);
            if sol.focal {
                println!("warning: focal collision, orbit stops at t = {}", sol.domain().1);
            }
            if sol.turning {
                println!("warning: profile turns vertical along the orbit");
            }
            Ok(0)
        }
        Command::Transnormal { base, b, s0, tube, region, side, flip, smooth, levels, common, out } => {
            transnormal(&base, &b, s0, tube, &region, &side, flip, smooth, levels, &common, out)
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn transnormal(
    base: &Path,
    b: &str,
    s0: f64,
    tube: f64,
    region: &[(f64, f64); 2],
    side: &str,
    flip: bool,
    smooth: bool,
    levels: usize,
    common: &Common,
    out: Option<PathBuf>,
) -> Result<u8, String> {
    let cfg = TransnormalConfig {
        base_polyline_path: base.display().to_string(),
        b: b.to_string(),
        s0,
        tube,
        region: [[region[0].0, region[0].1], [region[1].0, region[1].1]],
        side: Some(side.to_string()),
        flip,
        smooth,
        s_range: None,
    };
    let (f, bf) = transnormal_graph(&cfg, Path::new("")).map_err(|e| e.to_string())?;
    let grid = common.grid.unwrap_or([101, 101]);
    let inset: Vec<(f64, f64)> = region.iter().map(|&(a, c)| (a + 0.01 * (c - a), c - 0.01 * (c - a))).collect();
    let pts = grid_points(&inset, &grid);
    let rep = eikonal_residual_with_tol(&f, bf.as_ref(), &pts, common.tol.unwrap_or(TOL_EIK));
    let entry = ReportEntry::from_samples("eikonal", &rep.per_point, rep.tol, 0, "empty grid");
    let report = ResidualReport::new(format!("graph(h∘d, b = {b})"), grid.to_vec(), 1e-4, vec![entry]);
    match &common.report {
        Some(p) => std::fs::write(p, report.to_tsv()).map_err(|e| format!("{}: {e}", p.display()))?,
        None => print!("{}", report.to_tsv()),
    }
    if let Some(p) = out {
        let values: Vec<f64> = pts.iter().map(|x| f.value(x)).filter(|v| v.is_finite()).collect();
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut lines = Vec::new();
        for c in linspace(lo, hi, levels + 2).into_iter().skip(1).take(levels) {
            let sets = level_set_extract(&f, c, grid).map_err(|e| e.to_string())?;
            lines.extend(sets);
        }
        std::fs::write(&p, polylines_to_csv(&lines)).map_err(|e| format!("{}: {e}", p.display()))?;
    }
    Ok(if report.all_pass() { 0 } else { 1 })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_forms() {
        assert_eq!(parse_grid("51"), Ok([51, 51]));
        assert_eq!(parse_grid("21x31"), Ok([21, 31]));
        assert!(parse_grid("1x2x3").is_err());
        assert!(parse_grid("ax3").is_err());
    }

    #[test]
    fn region_needs_four_numbers() {
        assert_eq!(parse_region("-1,1,0,2"), Ok([(-1.0, 1.0), (0.0, 2.0)]));
        assert!(parse_region("0,1,2").is_err());
    }
}
