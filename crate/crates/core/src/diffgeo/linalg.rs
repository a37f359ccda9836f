//! Small dense helpers: symmetric eigen-solvers for n ≤ 3 and the
//! generalized cross product used to build normals.

use nalgebra::{DMatrix, DVector};

/// Eigen-decomposition of a real symmetric matrix of size 1, 2 or 3.
///
/// Eigenvalues are returned ascending; eigenvectors are the matching
/// columns, normalized, with the first non-negligible component positive.
pub fn symmetric_eigen(a: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = a.nrows();
    assert!(n == a.ncols() && (1..=3).contains(&n), "symmetric_eigen supports n <= 3");
    let (vals, vecs) = match n {
        1 => (vec![a[(0, 0)]], DMatrix::identity(1, 1)),
        2 => eigen2(a),
        _ => jacobi(a),
    };
    sort_pairs(vals, vecs)
}

fn eigen2(a: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let (p, q, r) = (a[(0, 0)], 0.5 * (a[(0, 1)] + a[(1, 0)]), a[(1, 1)]);
    let half_tr = 0.5 * (p + r);
    let half_diff = 0.5 * (p - r);
    let rad = half_diff.hypot(q);
    let (l0, l1) = (half_tr - rad, half_tr + rad);
    if q == 0.0 {
        // already diagonal; keep coordinate axes
        let mut v = DMatrix::identity(2, 2);
        if p > r {
            v.swap_columns(0, 1);
        }
        return (vec![l0, l1], v);
    }
    // angle of the eigenvector for l1
    let phi = 0.5 * (2.0 * q).atan2(p - r);
    let (s, c) = phi.sin_cos();
    let v = DMatrix::from_row_slice(2, 2, &[-s, c, c, s]);
    (vec![l0, l1], v)
}

fn jacobi(a: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = a.nrows();
    let mut m = 0.5 * (a + a.transpose());
    let mut v = DMatrix::<f64>::identity(n, n);
    for _sweep in 0..64 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)] * m[(i, j)])
            .sum();
        if off == 0.0 || off.sqrt() <= 1e-300 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    ((0..n).map(|i| m[(i, i)]).collect(), v)
}

fn canonical_sign(mut col: DVector<f64>) -> DVector<f64> {
    let scale = col.amax();
    if let Some(first) = col.iter().find(|c| c.abs() > 1e-12 * scale) {
        if *first < 0.0 {
            col = -col;
        }
    }
    col
}

fn sort_pairs(vals: Vec<f64>, vecs: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = vals.len();
    let cols: Vec<DVector<f64>> = (0..n)
        .map(|i| {
            let c = vecs.column(i).into_owned();
            let norm = c.norm();
            canonical_sign(c / norm)
        })
        .collect();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| {
        vals[i].total_cmp(&vals[j]).then_with(|| {
            cols[i]
                .iter()
                .zip(cols[j].iter())
                .map(|(a, b)| a.total_cmp(b))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        })
    });
    let sorted_vals = idx.iter().map(|&i| vals[i]).collect();
    let sorted_vecs = DMatrix::from_columns(&idx.iter().map(|&i| cols[i].clone()).collect::<Vec<_>>());
    (sorted_vals, sorted_vecs)
}

/// Vector `c` with `c · v_i = 0` for the `n` given vectors of `R^{n+1}`,
/// oriented so that `det[v_1, …, v_n, c] = |c|^2 > 0`.
pub fn generalized_cross(vectors: &[DVector<f64>]) -> DVector<f64> {
    let dim = vectors.len() + 1;
    assert!(vectors.iter().all(|v| v.len() == dim));
    let mut c = DVector::zeros(dim);
    for k in 0..dim {
        // cofactor of the last column, row k
        let minor = DMatrix::from_fn(dim - 1, dim - 1, |r, col| {
            let row = if r < k { r } else { r + 1 };
            vectors[col][row]
        });
        let sign = if (k + dim - 1) % 2 == 0 { 1.0 } else { -1.0 };
        c[k] = sign * minor.determinant();
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn check_decomposition(a: &DMatrix<f64>, tol: f64) {
        let (vals, vecs) = symmetric_eigen(a);
        for (i, l) in vals.iter().enumerate() {
            let v = vecs.column(i);
            let r = a * v - v * *l;
            assert!(r.norm() < tol, "residual {}", r.norm());
        }
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn diagonal_2x2_keeps_axes() {
        let a = DMatrix::from_row_slice(2, 2, &[3.0, 0.0, 0.0, 1.0]);
        let (vals, vecs) = symmetric_eigen(&a);
        assert_eq!(vals, vec![1.0, 3.0]);
        assert_eq!(vecs[(1, 0)], 1.0);
    }

    #[test]
    fn negation_negates_eigenvalues_exactly() {
        let a = DMatrix::from_row_slice(3, 3, &[2.0, 0.3, -0.1, 0.3, 1.0, 0.7, -0.1, 0.7, -0.5]);
        let (v1, _) = symmetric_eigen(&a);
        let (v2, _) = symmetric_eigen(&(-&a));
        for (x, y) in v1.iter().zip(v2.iter().rev()) {
            assert_eq!(*x, -*y);
        }
    }

    #[test]
    fn cross_product_matches_r3() {
        let a = DVector::from_vec(vec![1.0, 0.0, 0.0]);
        let b = DVector::from_vec(vec![0.0, 1.0, 0.0]);
        let c = generalized_cross(&[a, b]);
        assert_eq!(c, DVector::from_vec(vec![0.0, 0.0, 1.0]));
    }

    proptest! {
        #[test]
        fn eigen_residual_small(entries in proptest::collection::vec(-5.0f64..5.0, 6), three in any::<bool>()) {
            let a = if three {
                DMatrix::from_row_slice(3, 3, &[entries[0], entries[1], entries[2], entries[1], entries[3], entries[4], entries[2], entries[4], entries[5]])
            } else {
                DMatrix::from_row_slice(2, 2, &[entries[0], entries[1], entries[1], entries[3]])
            };
            check_decomposition(&a, 1e-10);
        }

        #[test]
        fn cross_is_orthogonal(entries in proptest::collection::vec(-3.0f64..3.0, 12)) {
            let vs: Vec<DVector<f64>> = entries.chunks(4).map(|c| DVector::from_column_slice(c)).collect();
            let c = generalized_cross(&vs);
            for v in &vs {
                prop_assert!(c.dot(v).abs() < 1e-9);
            }
            let mut cols = vs.clone();
            cols.push(c.clone());
            let det = DMatrix::from_columns(&cols).determinant();
            prop_assert!((det - c.norm_squared()).abs() < 1e-8 * (1.0 + det.abs()));
        }
    }
}
