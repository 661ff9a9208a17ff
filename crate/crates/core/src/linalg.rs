//! Dense linear algebra: Gram factors, numerical rank, alignment, Schur complements.

use crate::error::{invalid, Error, Result};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

pub type Mat = DMatrix<f64>;
pub type Vector = DVector<f64>;

/// Vectors p_1..p_n of a common dimension, stored as the rows of `points`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct Configuration {
    pub points: Mat,
}

impl TryFrom<Vec<Vec<f64>>> for Configuration {
    type Error = Error;
    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        Configuration::from_rows(&rows)
    }
}

impl From<Configuration> for Vec<Vec<f64>> {
    fn from(c: Configuration) -> Self {
        c.rows()
    }
}

impl Configuration {
    pub fn new(points: Mat) -> Self {
        Configuration { points }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let d = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != d) {
            return invalid("configuration rows must share one dimension");
        }
        Ok(Configuration { points: Mat::from_fn(rows.len(), d, |i, j| rows[i][j]) })
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.n()).map(|i| self.points.row(i).iter().copied().collect()).collect()
    }

    pub fn n(&self) -> usize {
        self.points.nrows()
    }

    pub fn dim(&self) -> usize {
        self.points.ncols()
    }

    pub fn gram(&self) -> Mat {
        &self.points * self.points.transpose()
    }

    pub fn vector(&self, i: usize) -> Vector {
        self.points.row(i).transpose()
    }

    pub fn inner(&self, i: usize, j: usize) -> f64 {
        self.points.row(i).dot(&self.points.row(j))
    }

    /// Numerical rank of the point set.
    pub fn rank(&self, tol: f64) -> usize {
        rank_of_rows(&self.points, tol)
    }

    pub fn subset(&self, rows: &[usize]) -> Configuration {
        Configuration { points: self.points.select_rows(rows) }
    }

    /// Same vectors padded with zeros (or truncated when the extra columns vanish).
    pub fn with_dim(&self, d: usize) -> Configuration {
        let mut p = Mat::zeros(self.n(), d);
        let k = d.min(self.dim());
        p.columns_mut(0, k).copy_from(&self.points.columns(0, k));
        Configuration { points: p }
    }

    /// Orthogonal change of basis onto the span of the vectors, in lower
    /// echelon form (p_1 along e_1, p_2 in span(e_1,e_2), ...).
    pub fn compress(&self, tol: f64) -> Configuration {
        Configuration { points: echelon(&self.points, tol) }
    }
}

pub fn sym(m: &Mat) -> Mat {
    (m + m.transpose()) * 0.5
}

pub fn max_abs(m: &Mat) -> f64 {
    m.iter().fold(0.0, |a, &b| a.max(b.abs()))
}

/// Eigenpairs of a symmetric matrix with eigenvalues in decreasing order and
/// each eigenvector's first non-negligible component positive.
pub fn sym_eigen(x: &Mat) -> (Vec<f64>, Mat) {
    let n = x.nrows();
    if n == 0 {
        return (vec![], Mat::zeros(0, 0));
    }
    let e = sym(x).symmetric_eigen();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| e.eigenvalues[b].total_cmp(&e.eigenvalues[a]).then(a.cmp(&b)));
    let mut vecs = Mat::zeros(n, n);
    let mut vals = Vec::with_capacity(n);
    for (k, &i) in idx.iter().enumerate() {
        let mut v = e.eigenvectors.column(i).clone_owned();
        if let Some(first) = v.iter().find(|c| c.abs() > 1e-12) {
            if *first < 0.0 {
                v = -v;
            }
        }
        vecs.set_column(k, &v);
        vals.push(e.eigenvalues[i]);
    }
    (vals, vecs)
}

pub fn min_eigenvalue(x: &Mat) -> f64 {
    if x.nrows() == 0 {
        return 0.0;
    }
    sym(x).symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
}

fn singular_values(x: &Mat) -> Vec<f64> {
    if x.nrows() == 0 || x.ncols() == 0 {
        return vec![];
    }
    x.clone().svd(false, false).singular_values.iter().copied().collect()
}

/// Count of singular values above tol·max(1, σ_max).
pub fn numerical_rank(x: &Mat, tol: f64) -> usize {
    let s = singular_values(x);
    let smax = s.iter().copied().fold(0.0, f64::max);
    let cut = tol * smax.max(1.0);
    s.iter().filter(|&&v| v > cut).count()
}

/// Rank of a set of row vectors, measured on their Gram matrix scale.
pub fn rank_of_rows(p: &Mat, tol: f64) -> usize {
    numerical_rank(&(p * p.transpose()), tol)
}

/// Lower echelon orthogonal normal form of the rows of `p`, truncated to rank.
fn echelon(p: &Mat, tol: f64) -> Mat {
    let n = p.nrows();
    if n == 0 || p.ncols() == 0 {
        return Mat::zeros(n, 0);
    }
    let g = p * p.transpose();
    let (vals, vecs) = sym_eigen(&g);
    let cut = tol * vals[0].max(1.0);
    let r = vals.iter().filter(|&&v| v > cut).count();
    let mut f = Mat::zeros(n, r);
    for k in 0..r {
        f.set_column(k, &(vecs.column(k) * vals[k].sqrt()));
    }
    lq_normalize(&f)
}

/// F·Q with Q orthogonal such that the result is lower trapezoidal with a
/// non-negative diagonal.
fn lq_normalize(f: &Mat) -> Mat {
    let (n, r) = f.shape();
    if r == 0 {
        return f.clone();
    }
    // Gram–Schmidt on rows, choosing basis directions as they appear
    let mut basis: Vec<Vector> = Vec::new();
    for i in 0..n {
        if basis.len() == r {
            break;
        }
        let mut v = f.row(i).transpose();
        for b in &basis {
            let c = b.dot(&v);
            v -= b * c;
        }
        for b in &basis {
            let c = b.dot(&v);
            v -= b * c;
        }
        let nv = v.norm();
        if nv > 1e-9 * f.row(i).norm().max(1e-300) && nv > 1e-14 {
            basis.push(v / nv);
        }
    }
    // complete the basis if some directions were never hit
    let mut e = 0;
    while basis.len() < r {
        let mut v = Vector::zeros(r);
        v[e] = 1.0;
        for b in &basis {
            let c = b.dot(&v);
            v -= b * c;
        }
        if v.norm() > 1e-6 {
            let nv = v.norm();
            basis.push(v / nv);
        }
        e += 1;
    }
    let q = Mat::from_columns(&basis);
    f * q
}

/// Vectors whose Gram matrix is X, in dimension numerical_rank(X, tol).
pub fn gram_factor(x: &Mat, tol: f64) -> Result<Configuration> {
    if x.nrows() != x.ncols() {
        return invalid("gram_factor needs a square matrix");
    }
    let n = x.nrows();
    if n == 0 {
        return Ok(Configuration::new(Mat::zeros(0, 0)));
    }
    let (vals, vecs) = sym_eigen(x);
    let lmin = *vals.last().unwrap();
    if lmin < -tol * vals[0].abs().max(1.0) {
        return Err(Error::InvalidInput(format!("matrix is indefinite: min eigenvalue {lmin:.3e}")));
    }
    let cut = tol * vals[0].max(1.0);
    let r = vals.iter().filter(|&&v| v > cut).count();
    let mut f = Mat::zeros(n, r);
    for k in 0..r {
        f.set_column(k, &(vecs.column(k) * vals[k].sqrt()));
    }
    Ok(Configuration::new(lq_normalize(&f)))
}

/// Orthonormal basis (columns) of the null space of `a`, singular values
/// below `tol`·max(1, σ_max) counted as zero.
pub fn null_space(a: &Mat, tol: f64) -> Mat {
    let (m, n) = a.shape();
    if n == 0 {
        return Mat::zeros(0, 0);
    }
    // pad to a square matrix so that the SVD returns a full V
    let rows = m.max(n);
    let mut sq = Mat::zeros(rows, n);
    if m > 0 {
        sq.rows_mut(0, m).copy_from(a);
    }
    let svd = sq.svd(false, true);
    let vt = svd.v_t.expect("requested V");
    let smax = svd.singular_values.max();
    let cut = tol * smax.max(1.0);
    let mut cols: Vec<Vector> = (0..n)
        .filter(|&k| svd.singular_values[k] <= cut)
        .map(|k| vt.row(k).transpose())
        .collect();
    // deterministic order and signs
    for c in cols.iter_mut() {
        if let Some(first) = c.iter().find(|x| x.abs() > 1e-12) {
            if *first < 0.0 {
                *c = -&*c;
            }
        }
    }
    if cols.is_empty() {
        Mat::zeros(n, 0)
    } else {
        Mat::from_columns(&cols)
    }
}

/// Orthonormal basis (columns) of the range of a symmetric psd matrix.
pub fn range_basis(x: &Mat, tol: f64) -> Mat {
    let (vals, vecs) = sym_eigen(x);
    let cut = tol * vals.first().copied().unwrap_or(0.0).max(1.0);
    let r = vals.iter().filter(|&&v| v > cut).count();
    vecs.columns(0, r).clone_owned()
}

fn polar(k: &Mat) -> Mat {
    let svd = k.clone().svd(true, true);
    svd.u.unwrap() * svd.v_t.unwrap()
}

/// Orthogonally transform `moving` so that moving[i] lands on fixed[j] for
/// every shared pair (i, j). Both sets are padded to the larger dimension.
///
/// Convention: the shared vectors are matched one at a time by reflections
/// acting on the complement of the vectors already matched (so a single
/// shared unit vector a ↦ b swaps a and b), then a Procrustes correction
/// removes rounding drift.
pub fn align(
    moving: &Configuration,
    fixed: &Configuration,
    shared: &[(usize, usize)],
    tol: f64,
) -> Result<Configuration> {
    let d = moving.dim().max(fixed.dim());
    let mv = moving.with_dim(d);
    if shared.is_empty() {
        return Ok(mv);
    }
    let fx = fixed.with_dim(d);
    let a: Vec<Vector> = shared.iter().map(|&(i, _)| mv.vector(i)).collect();
    let b: Vec<Vector> = shared.iter().map(|&(_, j)| fx.vector(j)).collect();
    let scale = b.iter().map(|v| v.norm_squared()).fold(1.0, f64::max);
    for s in 0..a.len() {
        for t in 0..a.len() {
            let gap = (a[s].dot(&a[t]) - b[s].dot(&b[t])).abs();
            if gap > tol.max(1e-12) * scale * 10.0 {
                return Err(Error::InvalidInput(format!(
                    "shared Gram mismatch {gap:.3e} between positions {s} and {t}"
                )));
            }
        }
    }
    let mut u = Mat::identity(d, d);
    let mut matched: Vec<Vector> = Vec::new();
    for t in 0..a.len() {
        let at = &u * &a[t];
        let mut w = &at - &b[t];
        for q in &matched {
            let c = q.dot(&w);
            w -= q * c;
        }
        let nw = w.norm();
        if nw > 1e-7 * scale.sqrt() {
            let h = Mat::identity(d, d) - (&w * w.transpose()) * (2.0 / (nw * nw));
            u = h * u;
        }
        let mut q = b[t].clone();
        for m in &matched {
            let c = m.dot(&q);
            q -= m * c;
        }
        if q.norm() > 1e-9 * scale.sqrt() {
            let nq = q.norm();
            matched.push(q / nq);
        }
    }
    // Procrustes correction, identity on the complement of span(b)
    let mut k = Mat::zeros(d, d);
    for t in 0..a.len() {
        k += &b[t] * (&u * &a[t]).transpose();
    }
    let mut proj = Mat::identity(d, d);
    for q in &matched {
        proj -= q * q.transpose();
    }
    k += &proj;
    let c = polar(&k);
    let u = c * u;
    Ok(Configuration::new(&mv.points * u.transpose()))
}

/// Schur complement of M with respect to its (i,i) entry.
pub fn schur_complement(m: &Mat, i: usize) -> Result<Mat> {
    let n = m.nrows();
    if i >= n {
        return invalid(format!("index {i} out of range"));
    }
    let mii = m[(i, i)];
    if mii == 0.0 || mii.abs() <= 1e-15 * max_abs(m) {
        return invalid(format!("pivot M[{i},{i}] is zero"));
    }
    let keep: Vec<usize> = (0..n).filter(|&k| k != i).collect();
    Ok(Mat::from_fn(n - 1, n - 1, |a, b| {
        let (ja, jb) = (keep[a], keep[b]);
        m[(ja, jb)] - m[(ja, i)] * m[(i, jb)] / mii
    }))
}

/// Orthonormal basis of the complement of span(columns of `q`) in R^d, built
/// from the standard basis in order.
pub fn complement_directions(span: &[Vector], d: usize, tol: f64) -> Vec<Vector> {
    let mut basis: Vec<Vector> = Vec::new();
    for v in span {
        let mut w = v.clone();
        for b in &basis {
            let c = b.dot(&w);
            w -= b * c;
        }
        if w.norm() > tol {
            let nw = w.norm();
            basis.push(w / nw);
        }
    }
    let start = basis.len();
    for e in 0..d {
        let mut w = Vector::zeros(d);
        w[e] = 1.0;
        for b in &basis {
            let c = b.dot(&w);
            w -= b * c;
        }
        for b in &basis {
            let c = b.dot(&w);
            w -= b * c;
        }
        if w.norm() > 1e-6 {
            let nw = w.norm();
            basis.push(w / nw);
        }
    }
    basis.split_off(start)
}
