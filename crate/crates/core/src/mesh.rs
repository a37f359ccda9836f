//! Grid sampling of 2D immersions and deterministic OBJ text.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::Vector3;

use crate::diffgeo::immersion::{linspace, ParametricImmersion};
use crate::error::{GeomError, Result};

/// Row-major `n_u × n_v` samples; `None` marks a rejected point.
#[derive(Debug, Clone, PartialEq)]
pub struct GridMesh {
    pub n_u: usize,
    pub n_v: usize,
    pub vertices: Vec<Option<Vector3<f64>>>,
    /// Unit normal `ξ` per vertex, used for winding and `vn` lines.
    pub normals: Vec<Option<Vector3<f64>>>,
}

impl GridMesh {
    fn index(&self, i: usize, j: usize) -> usize {
        i * self.n_v + j
    }

    pub fn missing(&self) -> Vec<(usize, usize)> {
        (0..self.n_u)
            .flat_map(|i| (0..self.n_v).map(move |j| (i, j)))
            .filter(|&(i, j)| self.vertices[self.index(i, j)].is_none())
            .collect()
    }
}

fn to3(v: &nalgebra::DVector<f64>) -> Option<Vector3<f64>> {
    (v.len() == 3 && v.iter().all(|x| x.is_finite())).then(|| Vector3::new(v[0], v[1], v[2]))
}

/// Samples `m` on its parameter rectangle, endpoints included.
pub fn sample_grid(m: &ParametricImmersion, n_u: usize, n_v: usize) -> Result<GridMesh> {
    if m.param_dim() != 2 || m.ambient().dim() != 3 {
        return Err(GeomError::Precondition("meshes need a 2D surface in a 3D ambient".into()));
    }
    if n_u < 2 || n_v < 2 {
        return Err(GeomError::Precondition(format!("grid {n_u}x{n_v} is smaller than 2x2")));
    }
    let d = m.domain();
    let us = linspace(d[0].0, d[0].1, n_u);
    let vs = linspace(d[1].0, d[1].1, n_v);
    let mut vertices = Vec::with_capacity(n_u * n_v);
    let mut normals = Vec::with_capacity(n_u * n_v);
    for &u in &us {
        for &v in &vs {
            let p = to3(&m.point(&[u, v]));
            let n = p.and_then(|_| m.normal(&[u, v]).ok()).and_then(|n| to3(&n));
            vertices.push(p.filter(|_| n.is_some()));
            normals.push(n);
        }
    }
    Ok(GridMesh { n_u, n_v, vertices, normals })
}

/// OBJ text with 17 significant digits. Triangles are wound so their
/// geometric normal agrees with `ξ`. Rejected points are an error unless
/// `allow_holes`, in which case their triangles are dropped.
pub fn export_obj(mesh: &GridMesh, with_normals: bool, allow_holes: bool) -> Result<String> {
    let missing = mesh.missing();
    if !missing.is_empty() && !allow_holes {
        let list: Vec<String> = missing.iter().take(20).map(|(i, j)| format!("({i},{j})")).collect();
        let more = if missing.len() > 20 { format!(" and {} more", missing.len() - 20) } else { String::new() };
        return Err(GeomError::Precondition(format!(
            "mesh has {} missing cells: {}{more}",
            missing.len(),
            list.join(" ")
        )));
    }
    let mut out = String::new();
    let mut obj_index = vec![0usize; mesh.vertices.len()];
    let mut next = 1;
    for (k, v) in mesh.vertices.iter().enumerate() {
        if let Some(p) = v {
            let _ = writeln!(out, "v {:.16e} {:.16e} {:.16e}", p.x, p.y, p.z);
            obj_index[k] = next;
            next += 1;
        }
    }
    if with_normals {
        for (v, n) in mesh.vertices.iter().zip(&mesh.normals) {
            if let (Some(_), Some(n)) = (v, n) {
                let _ = writeln!(out, "vn {:.16e} {:.16e} {:.16e}", n.x, n.y, n.z);
            }
        }
    }
    let face = |out: &mut String, tri: [usize; 3]| {
        let [a, b, c] = tri.map(|k| obj_index[k]);
        let _ = if with_normals {
            writeln!(out, "f {a}//{a} {b}//{b} {c}//{c}")
        } else {
            writeln!(out, "f {a} {b} {c}")
        };
    };
    for i in 0..mesh.n_u - 1 {
        for j in 0..mesh.n_v - 1 {
            let q = [mesh.index(i, j), mesh.index(i + 1, j), mesh.index(i + 1, j + 1), mesh.index(i, j + 1)];
            let Some(p) = q.iter().map(|&k| mesh.vertices[k]).collect::<Option<Vec<_>>>() else {
                continue;
            };
            let avg: Vector3<f64> = q.iter().filter_map(|&k| mesh.normals[k]).sum();
            let flip = (p[1] - p[0]).cross(&(p[3] - p[0])).dot(&avg) < 0.0;
            let [a, b, c, d] = q;
            if flip {
                face(&mut out, [a, d, c]);
                face(&mut out, [a, c, b]);
            } else {
                face(&mut out, [a, b, c]);
                face(&mut out, [a, c, d]);
            }
        }
    }
    Ok(out)
}

pub fn write_obj(mesh: &GridMesh, path: &Path, with_normals: bool, allow_holes: bool) -> Result<()> {
    let text = export_obj(mesh, with_normals, allow_holes)?;
    std::fs::write(path, text).map_err(|e| GeomError::Io(format!("{}: {e}", path.display())))
}
