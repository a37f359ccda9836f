//! Signed distance to a plane curve inside its tubular neighborhood.
//!
//! The sign is taken from the right normal of the curve's orientation,
//! so a counter-clockwise circle is positive outside.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::diffgeo::curve::{arclength_reparam, PlaneCurve, Vec2};
use crate::error::{GeomError, Result};
use crate::tolerances::EPS_CUT;

fn right_normal(t: Vec2) -> Vec2 {
    Vec2::new(t.y, -t.x)
}

/// Ordered vertices of a polygonal curve.
#[derive(Debug, Clone, PartialEq)]
pub struct Polyline {
    pub points: Vec<Vec2>,
    pub closed: bool,
}

impl Polyline {
    pub fn new(points: Vec<Vec2>, closed: bool) -> Self {
        Self { points, closed }
    }

    /// `n` samples of `curve` (the end point is dropped when `closed`).
    pub fn sample(curve: &PlaneCurve, n: usize, closed: bool) -> Self {
        let (a, b) = curve.domain();
        let m = if closed { n } else { n - 1 };
        let points = (0..n).map(|i| curve.point(a + (b - a) * i as f64 / m as f64)).collect();
        Self { points, closed }
    }

    pub fn segment_count(&self) -> usize {
        match (self.points.len(), self.closed) {
            (0 | 1, _) => 0,
            (n, true) => n,
            (n, false) => n - 1,
        }
    }

    pub fn segment(&self, i: usize) -> (Vec2, Vec2) {
        (self.points[i], self.points[(i + 1) % self.points.len()])
    }

    pub fn to_csv(&self) -> String {
        polylines_to_csv(std::slice::from_ref(&self.points))
    }

    /// Reads `x,y` rows; the curve is closed when first and last rows coincide.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = polylines_from_csv(text)?;
        if lines.len() != 1 {
            return Err(GeomError::Parse { pos: 0, msg: format!("expected one polyline, found {}", lines.len()) });
        }
        let mut points = lines.remove(0);
        let closed = points.len() > 2 && points.first() == points.last();
        if closed {
            points.pop();
        }
        Ok(Self { points, closed })
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_csv(&std::fs::read_to_string(path)?)
    }
}

/// `x,y` header followed by one row per point; polylines separated by blank lines.
pub fn polylines_to_csv(lines: &[Vec<Vec2>]) -> String {
    let mut out = String::from("x,y\n");
    for (k, line) in lines.iter().enumerate() {
        if k > 0 {
            out.push('\n');
        }
        for p in line {
            let _ = writeln!(out, "{:.16e},{:.16e}", p.x, p.y);
        }
    }
    out
}

pub fn polylines_from_csv(text: &str) -> Result<Vec<Vec<Vec2>>> {
    let mut lines = Vec::new();
    let mut cur = Vec::new();
    let mut rows = text.lines().enumerate();
    match rows.next() {
        Some((_, h)) if h.trim().replace(' ', "") == "x,y" => {}
        _ => return Err(GeomError::Parse { pos: 1, msg: "missing `x,y` header".into() }),
    }
    for (i, row) in rows {
        let row = row.trim();
        if row.is_empty() {
            if !cur.is_empty() {
                lines.push(std::mem::take(&mut cur));
            }
            continue;
        }
        let parse = |s: Option<&str>| -> Result<f64> {
            s.and_then(|v| v.trim().parse().ok())
                .ok_or_else(|| GeomError::Parse { pos: i + 1, msg: format!("bad row `{row}`") })
        };
        let mut it = row.split(',');
        let p = Vec2::new(parse(it.next())?, parse(it.next())?);
        if it.next().is_some() {
            return Err(GeomError::Parse { pos: i + 1, msg: format!("too many columns in `{row}`") });
        }
        cur.push(p);
    }
    if !cur.is_empty() {
        lines.push(cur);
    }
    Ok(lines)
}

fn closest_on_segment(a: Vec2, b: Vec2, x: Vec2) -> (f64, Vec2, f64) {
    let d = b - a;
    let len2 = d.norm_squared();
    let t = if len2 == 0.0 { 0.0 } else { ((x - a).dot(&d) / len2).clamp(0.0, 1.0) };
    let p = a + d * t;
    ((x - p).norm(), p, t)
}

/// Polyline with a uniform bin index over segments inflated by the tube radius.
#[derive(Debug, Clone)]
pub struct PolylineBase {
    line: Polyline,
    flip: bool,
    tube: f64,
    cell: f64,
    bins: HashMap<(i64, i64), Vec<usize>>,
}

impl PolylineBase {
    pub fn new(line: Polyline, tube: f64, flip: bool) -> Result<Self> {
        if line.segment_count() == 0 || !(tube > 0.0) {
            return Err(GeomError::Precondition("polyline needs a segment and a positive tube radius".into()));
        }
        let cell = tube;
        let mut bins: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
        let pad = tube * 1.01;
        for i in 0..line.segment_count() {
            let (a, b) = line.segment(i);
            let lo = ((a.x.min(b.x) - pad) / cell).floor() as i64;
            let hi = ((a.x.max(b.x) + pad) / cell).floor() as i64;
            let ylo = ((a.y.min(b.y) - pad) / cell).floor() as i64;
            let yhi = ((a.y.max(b.y) + pad) / cell).floor() as i64;
            for ix in lo..=hi {
                for iy in ylo..=yhi {
                    bins.entry((ix, iy)).or_default().push(i);
                }
            }
        }
        Ok(Self { line, flip, tube, cell, bins })
    }

    pub fn polyline(&self) -> &Polyline {
        &self.line
    }

    fn adjacent(&self, i: usize, j: usize) -> bool {
        let n = self.line.segment_count();
        let d = i.abs_diff(j);
        d <= 1 || (self.line.closed && d == n - 1)
    }

    fn query(&self, x: Vec2) -> Result<(f64, Vec2)> {
        let key = ((x.x / self.cell).floor() as i64, (x.y / self.cell).floor() as i64);
        let cands = self.bins.get(&key).ok_or(GeomError::OutsideTube { at: [x.x, x.y], radius: self.tube })?;
        let mut hits: Vec<(f64, usize, Vec2, f64)> = cands
            .iter()
            .map(|&i| {
                let (a, b) = self.line.segment(i);
                let (d, p, t) = closest_on_segment(a, b, x);
                (d, i, p, t)
            })
            .collect();
        hits.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let (d1, i1, p, t) = hits[0];
        if d1 > self.tube {
            return Err(GeomError::OutsideTube { at: [x.x, x.y], radius: self.tube });
        }
        if let Some(&(d2, ..)) = hits.iter().find(|h| !self.adjacent(i1, h.1)) {
            if d2 - d1 < EPS_CUT * self.tube {
                return Err(GeomError::CutLocus { at: [x.x, x.y], d1, d2 });
            }
        }
        let n = self.line.segment_count();
        let seg_normal = |i: usize| {
            let (a, b) = self.line.segment(i);
            right_normal((b - a).normalize())
        };
        // pseudo-normal at a shared vertex
        let mut normal = seg_normal(i1);
        if t == 0.0 && (i1 > 0 || self.line.closed) {
            normal += seg_normal((i1 + n - 1) % n);
        } else if t == 1.0 && (i1 + 1 < n || self.line.closed) {
            normal += seg_normal((i1 + 1) % n);
        }
        let side = if (x - p).dot(&normal) < 0.0 { -1.0 } else { 1.0 };
        Ok((side * self.sign() * d1, p))
    }

    fn sign(&self) -> f64 {
        if self.flip {
            -1.0
        } else {
            1.0
        }
    }
}

/// Arc-length curve with Newton closest-point refinement from coarse samples.
#[derive(Debug, Clone)]
pub struct CurveBase {
    curve: PlaneCurve,
    closed: bool,
    flip: bool,
    tube: f64,
    samples: Vec<(f64, Vec2)>,
}

impl CurveBase {
    pub fn new(curve: PlaneCurve, closed: bool, tube: f64, flip: bool) -> Result<Self> {
        if !(tube > 0.0) {
            return Err(GeomError::Precondition("tube radius must be positive".into()));
        }
        let (a, b) = curve.domain();
        let n = 1024;
        let m = if closed { n } else { n - 1 };
        let samples = (0..n)
            .map(|i| {
                let s = a + (b - a) * i as f64 / m as f64;
                (s, curve.point(s))
            })
            .collect();
        Ok(Self { curve, closed, flip, tube, samples })
    }

    /// Base from the C² spline through a polyline's vertices.
    pub fn from_polyline(line: &Polyline, tube: f64, flip: bool) -> Result<Self> {
        let spline = super::spline::spline_through(&line.points, line.closed)?;
        let curve = arclength_reparam(&spline, line.points.len().max(64))?;
        Self::new(curve, line.closed, tube, flip)
    }

    fn wrap(&self, s: f64) -> f64 {
        let (a, b) = self.curve.domain();
        if self.closed {
            a + (s - a).rem_euclid(b - a)
        } else {
            s.clamp(a, b)
        }
    }

    fn refine(&self, mut s: f64, x: Vec2) -> f64 {
        for _ in 0..30 {
            let j = self.curve.jet(s);
            let r = j.point - x;
            let g = r.dot(&j.d1);
            let gp = j.d1.norm_squared() + r.dot(&j.d2);
            if gp <= 0.0 {
                break;
            }
            let next = self.wrap(s - g / gp);
            let done = (next - s).abs() < 1e-15;
            s = next;
            if done {
                break;
            }
        }
        s
    }

    fn query(&self, x: Vec2) -> Result<(f64, Vec2)> {
        let n = self.samples.len();
        let dist: Vec<f64> = self.samples.iter().map(|(_, p)| (p - x).norm()).collect();
        let is_min = |i: usize| {
            let prev = if i > 0 { Some(i - 1) } else if self.closed { Some(n - 1) } else { None };
            let next = if i + 1 < n { Some(i + 1) } else if self.closed { Some(0) } else { None };
            prev.is_none_or(|k| dist[i] <= dist[k]) && next.is_none_or(|k| dist[i] < dist[k])
        };
        let mut minima: Vec<(f64, f64, Vec2)> = (0..n)
            .filter(|&i| is_min(i))
            .map(|i| {
                let s = self.refine(self.samples[i].0, x);
                let p = self.curve.point(s);
                ((p - x).norm(), s, p)
            })
            .collect();
        minima.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (d1, s1, p1) = minima[0];
        if d1 > self.tube {
            return Err(GeomError::OutsideTube { at: [x.x, x.y], radius: self.tube });
        }
        if let Some(&(d2, ..)) = minima.iter().skip(1).find(|m| (m.2 - p1).norm() > 1e-6) {
            if d2 - d1 < EPS_CUT * self.tube {
                return Err(GeomError::CutLocus { at: [x.x, x.y], d1, d2 });
            }
        }
        let t = self.curve.jet(s1).d1;
        let side = if (x - p1).dot(&right_normal(t)) < 0.0 { -1.0 } else { 1.0 };
        let flip = if self.flip { -1.0 } else { 1.0 };
        Ok((side * flip * d1, p1))
    }
}

/// The hypersurface `L` of the flat base, with its tube radius.
#[derive(Debug, Clone)]
pub enum BaseCurve {
    Polyline(PolylineBase),
    Curve(CurveBase),
}

impl BaseCurve {
    pub fn tube_radius(&self) -> f64 {
        match self {
            BaseCurve::Polyline(p) => p.tube,
            BaseCurve::Curve(c) => c.tube,
        }
    }
}

/// Signed distance to `L` and the nearest point on it.
pub fn signed_distance(base: &BaseCurve, x: Vec2) -> Result<(f64, Vec2)> {
    match base {
        BaseCurve::Polyline(p) => p.query(x),
        BaseCurve::Curve(c) => c.query(x),
    }
}
