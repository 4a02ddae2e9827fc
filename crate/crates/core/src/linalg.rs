//! Small numerical kernels for LSI: a compressed-sparse-column matrix,
//! Householder thin QR, one-sided Jacobi SVD and a seeded randomized range
//! finder.

use ndarray::{s, Array1, Array2, ArrayView1, Axis};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Column-compressed sparse matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CscMatrix {
    pub nrows: usize,
    pub ncols: usize,
    pub col_ptr: Vec<usize>,
    pub row_idx: Vec<usize>,
    pub values: Vec<f64>,
}

impl CscMatrix {
    /// Builds from per-column `(row, value)` lists.
    pub fn from_columns(nrows: usize, columns: &[Vec<(usize, f64)>]) -> Self {
        let mut col_ptr = Vec::with_capacity(columns.len() + 1);
        let mut row_idx = Vec::new();
        let mut values = Vec::new();
        col_ptr.push(0);
        for col in columns {
            for &(r, v) in col {
                debug_assert!(r < nrows);
                row_idx.push(r);
                values.push(v);
            }
            col_ptr.push(row_idx.len());
        }
        CscMatrix {
            nrows,
            ncols: columns.len(),
            col_ptr,
            row_idx,
            values,
        }
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    fn column(&self, c: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let (lo, hi) = (self.col_ptr[c], self.col_ptr[c + 1]);
        self.row_idx[lo..hi]
            .iter()
            .copied()
            .zip(self.values[lo..hi].iter().copied())
    }

    pub fn to_dense(&self) -> Array2<f64> {
        let mut d = Array2::zeros((self.nrows, self.ncols));
        for c in 0..self.ncols {
            for (r, v) in self.column(c) {
                d[[r, c]] += v;
            }
        }
        d
    }

    /// `A X` for dense `X` with `ncols` rows.
    pub fn mul_dense(&self, x: &Array2<f64>) -> Array2<f64> {
        assert_eq!(x.nrows(), self.ncols);
        let mut y = Array2::zeros((self.nrows, x.ncols()));
        for c in 0..self.ncols {
            let xc = x.row(c);
            for (r, v) in self.column(c) {
                y.row_mut(r).scaled_add(v, &xc);
            }
        }
        y
    }

    /// `Aᵀ X` for dense `X` with `nrows` rows.
    pub fn tr_mul_dense(&self, x: &Array2<f64>) -> Array2<f64> {
        assert_eq!(x.nrows(), self.nrows);
        let mut z = Array2::zeros((self.ncols, x.ncols()));
        for c in 0..self.ncols {
            let mut zc = z.row_mut(c);
            for (r, v) in self.column(c) {
                zc.scaled_add(v, &x.row(r));
            }
        }
        z
    }
}

fn norm(v: ArrayView1<f64>) -> f64 {
    v.dot(&v).sqrt()
}

/// Orthonormal basis `Q` (`m × n`, `m ≥ n`) of the column space of `a` via
/// Householder reflections. Rank-deficient inputs still give orthonormal
/// columns.
pub fn thin_qr(a: &Array2<f64>) -> Array2<f64> {
    let (m, n) = a.dim();
    assert!(m >= n, "thin QR needs at least as many rows as columns");
    let mut r = a.clone();
    let mut reflectors: Vec<Option<Array1<f64>>> = Vec::with_capacity(n);
    for j in 0..n {
        let x = r.slice(s![j.., j]).to_owned();
        let xn = norm(x.view());
        let alpha = if x[0] >= 0.0 { -xn } else { xn };
        let mut v = x;
        v[0] -= alpha;
        let vn = norm(v.view());
        if vn < 1e-300 {
            reflectors.push(None);
            continue;
        }
        v /= vn;
        for c in j..n {
            let mut col = r.slice_mut(s![j.., c]);
            let d = v.dot(&col);
            col.scaled_add(-2.0 * d, &v);
        }
        reflectors.push(Some(v));
    }
    let mut q = Array2::zeros((m, n));
    for i in 0..n {
        q[[i, i]] = 1.0;
    }
    for j in (0..n).rev() {
        if let Some(v) = &reflectors[j] {
            for c in 0..n {
                let mut col = q.slice_mut(s![j.., c]);
                let d = v.dot(&col);
                col.scaled_add(-2.0 * d, v);
            }
        }
    }
    q
}

/// One-sided Jacobi: finds orthogonal `R` with `M R = W` having mutually
/// orthogonal columns. Returns `(column norms of W, R)`, unsorted.
pub fn jacobi_right(m: &Array2<f64>) -> (Vec<f64>, Array2<f64>) {
    let mut w = m.t().to_owned(); // rows of `w` are columns of M
    let c = w.nrows();
    let mut r = Array2::<f64>::eye(c);
    for _sweep in 0..80 {
        let mut rotated = false;
        for i in 0..c {
            for j in i + 1..c {
                let (alpha, beta, gamma) = {
                    let wi = w.row(i);
                    let wj = w.row(j);
                    (wi.dot(&wi), wj.dot(&wj), wi.dot(&wj))
                };
                if gamma == 0.0 || gamma.abs() <= 1e-15 * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                rotate_rows(&mut w, i, j, cs, sn);
                rotate_cols(&mut r, i, j, cs, sn);
            }
        }
        if !rotated {
            break;
        }
    }
    let norms = w.axis_iter(Axis(0)).map(norm).collect();
    (norms, r)
}

fn rotate_rows(a: &mut Array2<f64>, i: usize, j: usize, c: f64, s: f64) {
    let (mut ri, mut rj) = a.multi_slice_mut((s![i, ..], s![j, ..]));
    ndarray::Zip::from(&mut ri).and(&mut rj).for_each(|x, y| {
        let (a, b) = (*x, *y);
        *x = c * a - s * b;
        *y = s * a + c * b;
    });
}

fn rotate_cols(a: &mut Array2<f64>, i: usize, j: usize, c: f64, s: f64) {
    let (mut ci, mut cj) = a.multi_slice_mut((s![.., i], s![.., j]));
    ndarray::Zip::from(&mut ci).and(&mut cj).for_each(|x, y| {
        let (a, b) = (*x, *y);
        *x = c * a - s * b;
        *y = s * a + c * b;
    });
}

/// Left singular vectors and singular values of `a`, sorted by descending
/// singular value, from Jacobi on `aᵀ`. Returns all `min(m, n)` pairs.
pub fn left_svd_dense(a: &Array2<f64>) -> (Array2<f64>, Vec<f64>) {
    let (m, n) = a.dim();
    if m <= n {
        let (sig, r) = jacobi_right(&a.t().to_owned());
        sort_pairs(r, sig, m)
    } else {
        // Tall: reduce to the column space first.
        let q = thin_qr(a);
        let b_t = a.t().dot(&q);
        let (sig, r) = jacobi_right(&b_t);
        let (r, sig) = sort_pairs(r, sig, n);
        (q.dot(&r), sig)
    }
}

fn sort_pairs(vecs: Array2<f64>, sig: Vec<f64>, keep: usize) -> (Array2<f64>, Vec<f64>) {
    let mut order: Vec<usize> = (0..sig.len()).collect();
    order.sort_by(|&a, &b| sig[b].total_cmp(&sig[a]).then(a.cmp(&b)));
    order.truncate(keep);
    let vecs = vecs.select(Axis(1), &order);
    let sig = order.iter().map(|&i| sig[i]).collect();
    (vecs, sig)
}

/// Rank-`k` left singular pairs of sparse `a` by a seeded randomized range
/// finder with `power_iters` subspace iterations and `oversample` extra
/// directions (capped at `min(m, n)`).
pub fn randomized_left_svd(
    a: &CscMatrix,
    k: usize,
    oversample: usize,
    power_iters: usize,
    seed: u64,
) -> (Array2<f64>, Vec<f64>) {
    let (m, n) = (a.nrows, a.ncols);
    let l = (k + oversample).min(m.min(n));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let omega = Array2::from_shape_simple_fn((n, l), || StandardNormal.sample(&mut rng));
    let mut q = thin_qr(&a.mul_dense(&omega));
    for _ in 0..power_iters {
        let z = thin_qr(&a.tr_mul_dense(&q));
        q = thin_qr(&a.mul_dense(&z));
    }
    let b_t = a.tr_mul_dense(&q);
    let (sig, r) = jacobi_right(&b_t);
    let (r, sig) = sort_pairs(r, sig, k.min(l));
    (q.dot(&r), sig)
}

/// Flips each column so its largest-magnitude entry (first on ties) is
/// positive.
pub fn fix_signs(u: &mut Array2<f64>) {
    for mut col in u.columns_mut() {
        let mut best = 0;
        for (i, v) in col.iter().enumerate() {
            if v.abs() > col[best].abs() {
                best = i;
            }
        }
        if !col.is_empty() && col[best] < 0.0 {
            col.mapv_inplace(|v| -v);
        }
    }
}
