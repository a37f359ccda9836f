//! Residual statistics and their deterministic text form.

use std::fmt::Write as _;

use crate::tolerances::FAIL_RATIO;

#[derive(Debug, Clone, PartialEq)]
pub enum Status {
    Pass,
    /// Above tolerance but within `FAIL_RATIO` of it.
    Marginal,
    Fail,
    Skipped(String),
}

impl Status {
    pub fn label(&self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Marginal => "marginal",
            Status::Fail => "fail",
            Status::Skipped(_) => "skipped",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportEntry {
    pub name: String,
    pub max: f64,
    pub mean: f64,
    pub worst: Vec<f64>,
    pub tol: f64,
    pub status: Status,
    /// Points dropped from the statistics (frame undefined, gated angle).
    pub excluded: usize,
    pub samples: usize,
}

impl ReportEntry {
    /// Entry from per-point residuals; an empty sample is skipped with `reason`.
    pub fn from_samples(name: &str, samples: &[(Vec<f64>, f64)], tol: f64, excluded: usize, reason: &str) -> Self {
        if samples.is_empty() {
            return Self::skipped(name, tol, excluded, reason);
        }
        let mut max = f64::NEG_INFINITY;
        let mut worst = Vec::new();
        let mut sum = 0.0;
        for (u, r) in samples {
            let r = if r.is_nan() { f64::INFINITY } else { *r };
            sum += r;
            if r > max {
                max = r;
                worst = u.clone();
            }
        }
        let status = if max <= tol {
            Status::Pass
        } else if max <= FAIL_RATIO * tol {
            Status::Marginal
        } else {
            Status::Fail
        };
        Self {
            name: name.to_string(),
            max,
            mean: sum / samples.len() as f64,
            worst,
            tol,
            status,
            excluded,
            samples: samples.len(),
        }
    }

    pub fn skipped(name: &str, tol: f64, excluded: usize, reason: &str) -> Self {
        Self {
            name: name.to_string(),
            max: f64::NAN,
            mean: f64::NAN,
            worst: Vec::new(),
            tol,
            status: Status::Skipped(reason.to_string()),
            excluded,
            samples: 0,
        }
    }

    pub fn pass(&self) -> bool {
        self.status == Status::Pass
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport {
    pub surface: String,
    pub grid: Vec<usize>,
    pub fd_step: f64,
    pub entries: Vec<ReportEntry>,
}

impl ResidualReport {
    pub fn new(surface: impl Into<String>, grid: Vec<usize>, fd_step: f64, mut entries: Vec<ReportEntry>) -> Self {
        entries.sort_by(|a, b| a.name.cmp(&b.name));
        Self { surface: surface.into(), grid, fd_step, entries }
    }

    pub fn entry(&self, name: &str) -> Option<&ReportEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    /// Every non-skipped entry passes.
    pub fn all_pass(&self) -> bool {
        self.entries.iter().all(|e| matches!(e.status, Status::Pass | Status::Skipped(_)))
    }

    /// Some entry passes while another fails outright.
    pub fn inconsistent(&self) -> bool {
        let any = |s: Status| self.entries.iter().any(|e| e.status == s);
        any(Status::Pass) && any(Status::Fail)
    }

    /// Tab-separated report with `#` metadata lines.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        let grid: Vec<String> = self.grid.iter().map(|n| n.to_string()).collect();
        let _ = writeln!(out, "# surface\t{}", self.surface);
        let _ = writeln!(out, "# grid\t{}", grid.join("x"));
        let _ = writeln!(out, "# fd_step\t{:e}", self.fd_step);
        let _ = writeln!(out, "# inconsistent\t{}", self.inconsistent());
        out.push_str("name\tmax\tmean\tworst_u\tworst_v\ttol\tpass\n");
        for e in &self.entries {
            let num = |x: f64| if x.is_nan() { "-".to_string() } else { format!("{x:.9e}") };
            let coord = |i: usize| e.worst.get(i).map_or("-".to_string(), |v| format!("{v:.9e}"));
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{:e}\t{}",
                e.name,
                num(e.max),
                num(e.mean),
                coord(0),
                coord(1),
                e.tol,
                e.status.label()
            );
            if let Status::Skipped(reason) = &e.status {
                let _ = writeln!(out, "# {}\t{}", e.name, reason);
            } else if e.excluded > 0 {
                let _ = writeln!(out, "# {}\texcluded {} of {} points", e.name, e.excluded, e.excluded + e.samples);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry(name: &str, r: f64) -> ReportEntry {
        ReportEntry::from_samples(name, &[(vec![0.0, 1.0], r)], 1e-5, 0, "")
    }

    #[test]
    fn ratio_guard_bands() {
        assert_eq!(entry("a", 1e-6).status, Status::Pass);
        assert_eq!(entry("a", 5e-5).status, Status::Marginal);
        assert_eq!(entry("a", 2e-4).status, Status::Fail);
    }

    #[test]
    fn mixed_verdict_is_flagged() {
        let r = ResidualReport::new("s", vec![3, 3], 1e-4, vec![entry("b", 1e-6), entry("a", 1.0)]);
        assert!(r.inconsistent());
        assert_eq!(r.entries[0].name, "a");
        let ok = ResidualReport::new("s", vec![3, 3], 1e-4, vec![entry("b", 1e-6), entry("a", 5e-5)]);
        assert!(!ok.inconsistent());
        assert!(!ok.all_pass());
    }

    #[test]
    fn tsv_layout() {
        let r = ResidualReport::new(
            "cat",
            vec![2, 2],
            1e-4,
            vec![entry("x", 1e-6), ReportEntry::skipped("y", 1e-4, 4, "theta = pi/2")],
        );
        let text = r.to_tsv();
        let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(rows[0], "name\tmax\tmean\tworst_u\tworst_v\ttol\tpass");
        assert_eq!(rows[1].split('\t').count(), 7);
        assert!(rows[2].ends_with("skipped"));
        assert_eq!(text, r.clone().to_tsv());
    }
}
