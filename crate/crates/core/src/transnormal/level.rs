//! Marching-squares level curves of a function on a 2D base rectangle.

use std::collections::BTreeMap;

use crate::construct::graph::GraphFunction;
use crate::diffgeo::curve::Vec2;
use crate::error::{GeomError, Result};

/// Grid edge: `(horizontal, i, j)` joins node `(i,j)` to `(i+1,j)` or `(i,j+1)`.
type EdgeId = (bool, usize, usize);

pub fn level_set_extract(f: &GraphFunction, c: f64, counts: [usize; 2]) -> Result<Vec<Vec<Vec2>>> {
    if f.dim() != 2 {
        return Err(GeomError::Precondition("level sets need a 2D base".into()));
    }
    let [nx, ny] = counts;
    if nx < 2 || ny < 2 {
        return Err(GeomError::Precondition("level-set grid needs at least 2×2 nodes".into()));
    }
    let dom = f.domain();
    let xs: Vec<f64> = (0..nx).map(|i| dom[0].0 + (dom[0].1 - dom[0].0) * i as f64 / (nx - 1) as f64).collect();
    let ys: Vec<f64> = (0..ny).map(|j| dom[1].0 + (dom[1].1 - dom[1].0) * j as f64 / (ny - 1) as f64).collect();
    let vals: Vec<Vec<f64>> = xs.iter().map(|&x| ys.iter().map(|&y| f.value(&[x, y]) - c).collect()).collect();
    let node = |i: usize, j: usize| Vec2::new(xs[i], ys[j]);

    let mut crossing: BTreeMap<EdgeId, Vec2> = BTreeMap::new();
    let mut edge_point = |e: EdgeId| -> Option<Vec2> {
        let (h, i, j) = e;
        let (i2, j2) = if h { (i + 1, j) } else { (i, j + 1) };
        let (a, b) = (vals[i][j], vals[i2][j2]);
        if (a >= 0.0) == (b >= 0.0) || !a.is_finite() || !b.is_finite() {
            return None;
        }
        let t = a / (a - b);
        let p = node(i, j) + (node(i2, j2) - node(i, j)) * t;
        crossing.insert(e, p);
        Some(p)
    };

    let mut links: BTreeMap<EdgeId, Vec<EdgeId>> = BTreeMap::new();
    let mut link = |a: EdgeId, b: EdgeId| {
        links.entry(a).or_default().push(b);
        links.entry(b).or_default().push(a);
    };
    for i in 0..nx - 1 {
        for j in 0..ny - 1 {
            // bottom, right, top, left
            let edges = [(true, i, j), (false, i + 1, j), (true, i, j + 1), (false, i, j)];
            let hit: Vec<EdgeId> = edges.iter().copied().filter(|&e| edge_point(e).is_some()).collect();
            match hit.len() {
                2 => link(hit[0], hit[1]),
                4 => {
                    // saddle: the cell-center average decides the pairing
                    let center = 0.25 * (vals[i][j] + vals[i + 1][j] + vals[i][j + 1] + vals[i + 1][j + 1]);
                    if (center >= 0.0) == (vals[i][j] >= 0.0) {
                        link(hit[0], hit[1]);
                        link(hit[2], hit[3]);
                    } else {
                        link(hit[0], hit[3]);
                        link(hit[1], hit[2]);
                    }
                }
                _ => {}
            }
        }
    }

    let mut used: BTreeMap<EdgeId, bool> = links.keys().map(|&k| (k, false)).collect();
    let mut chains = Vec::new();
    let starts: Vec<EdgeId> = links
        .iter()
        .filter(|(_, v)| v.len() == 1)
        .map(|(k, _)| *k)
        .chain(links.keys().copied())
        .collect();
    for start in starts {
        if used[&start] {
            continue;
        }
        let mut chain = vec![start];
        used.insert(start, true);
        let mut cur = start;
        while let Some(&next) = links[&cur].iter().find(|e| !used[e]) {
            used.insert(next, true);
            chain.push(next);
            cur = next;
        }
        let closed = chain.len() > 2 && links[&cur].contains(&start);
        let mut pts: Vec<Vec2> = chain.iter().map(|e| newton_correct(f, c, crossing[e])).collect();
        if closed {
            pts.push(pts[0]);
        }
        chains.push(pts);
    }
    Ok(chains)
}

/// One Newton step along `∇F` toward `F = c`.
fn newton_correct(f: &GraphFunction, c: f64, p: Vec2) -> Vec2 {
    let x = [p.x, p.y];
    let g = f.gradient(&x);
    let g2 = g.norm_squared();
    if !(g2 > 1e-24) {
        return p;
    }
    let r = f.value(&x) - c;
    p - Vec2::new(g[0], g[1]) * (r / g2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> Vec<(f64, f64)> {
        vec![(-2.0, 2.0), (-2.0, 2.0)]
    }

    #[test]
    fn vertical_line() {
        let f = GraphFunction::new(square(), |x| x[0]);
        let lines = level_set_extract(&f, 0.5, [41, 41]).unwrap();
        assert_eq!(lines.len(), 1);
        assert!(lines[0].iter().all(|p| (p.x - 0.5).abs() < 1e-12));
        assert_eq!(lines[0].len(), 41);
    }

    #[test]
    fn distance_level_is_a_circle() {
        let f = GraphFunction::new(square(), |x| (x[0] * x[0] + x[1] * x[1]).sqrt() - 1.0);
        let lines = level_set_extract(&f, 0.3, [101, 101]).unwrap();
        assert_eq!(lines.len(), 1);
        let line = &lines[0];
        assert_eq!(line.first(), line.last());
        assert!(line.iter().all(|p| (p.norm() - 1.3).abs() < 1e-4));
    }

    #[test]
    fn paraboloid_level_after_correction() {
        let f = GraphFunction::new(square(), |x| x[0] * x[0] + x[1] * x[1]);
        let lines = level_set_extract(&f, 1.0, [101, 101]).unwrap();
        let worst = lines.iter().flatten().map(|p| (f.value(&[p.x, p.y]) - 1.0).abs()).fold(0.0, f64::max);
        assert!(worst < 1e-6, "{worst}");
    }

    #[test]
    fn no_crossing_is_empty() {
        let f = GraphFunction::new(square(), |x| x[0] * x[0]);
        assert!(level_set_extract(&f, -1.0, [11, 11]).unwrap().is_empty());
    }

    #[test]
    fn saddle_splits_into_two_branches() {
        let f = GraphFunction::new(square(), |x| x[0] * x[1]);
        let lines = level_set_extract(&f, 0.5, [40, 40]).unwrap();
        assert_eq!(lines.len(), 2);
    }
}
