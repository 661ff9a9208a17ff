//! Semidefinite programs in block-diagonal form and a primal-dual interior
//! point solver.
//!
//! Primal: max ⟨C,X⟩ s.t. ⟨A_j,X⟩ = b_j, X ⪰ 0.
//! Dual:   min bᵀy  s.t. S = Σ y_j A_j − C ⪰ 0.
//!
//! Blocks of size 1 act as nonnegative scalar variables.

pub mod facial;
pub mod rank;
pub mod stress;
pub mod text;

pub use facial::{farkas_certificate, slater_probe, solve_facial, FacialSolution, FarkasCertificate, ProbeResult};
pub use rank::{barvinok_bound, rank_reduce};
pub use stress::{flatten, pinned_flatten, Flattened, PinnedFlattened, StressMatrix};
pub use text::{dump, load};

use crate::error::{Error, Result};
use crate::linalg::{min_eigenvalue, sym, Mat};
use nalgebra::DVector;
use serde::{Deserialize, Serialize};

/// One entry of a symmetric block matrix: entries (i,j) and (j,i) both equal v.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Entry {
    pub block: usize,
    pub i: usize,
    pub j: usize,
    pub v: f64,
}

impl Entry {
    pub fn new(block: usize, i: usize, j: usize, v: f64) -> Self {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        Entry { block, i, j, v }
    }
}

/// Entries of E_ij = (e_i e_jᵀ + e_j e_iᵀ)/2, so that ⟨E_ij, X⟩ = X_ij.
pub fn unit(block: usize, i: usize, j: usize) -> Vec<Entry> {
    if i == j {
        vec![Entry::new(block, i, i, 1.0)]
    } else {
        vec![Entry::new(block, i, j, 0.5)]
    }
}

/// Upper-triangle entries of a dense symmetric matrix.
pub fn entries_of(block: usize, m: &Mat) -> Vec<Entry> {
    let mut out = Vec::new();
    for i in 0..m.nrows() {
        for j in i..m.ncols() {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            if v != 0.0 {
                out.push(Entry::new(block, i, j, v));
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub entries: Vec<Entry>,
    pub rhs: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SdpProblem {
    pub blocks: Vec<usize>,
    pub objective: Vec<Entry>,
    pub constraints: Vec<Constraint>,
}

pub type BlockMat = Vec<Mat>;

impl SdpProblem {
    pub fn new(blocks: Vec<usize>) -> Self {
        SdpProblem { blocks, objective: Vec::new(), constraints: Vec::new() }
    }

    pub fn single(n: usize) -> Self {
        Self::new(vec![n])
    }

    pub fn add_constraint(&mut self, entries: Vec<Entry>, rhs: f64) {
        self.constraints.push(Constraint { entries, rhs });
    }

    pub fn m(&self) -> usize {
        self.constraints.len()
    }

    pub fn rhs(&self) -> DVector<f64> {
        DVector::from_iterator(self.m(), self.constraints.iter().map(|c| c.rhs))
    }

    pub fn zeros(&self) -> BlockMat {
        self.blocks.iter().map(|&n| Mat::zeros(n, n)).collect()
    }

    pub fn identity(&self) -> BlockMat {
        self.blocks.iter().map(|&n| Mat::identity(n, n)).collect()
    }

    pub fn validate(&self) -> Result<()> {
        let check = |e: &Entry| e.block < self.blocks.len() && e.j < self.blocks[e.block];
        if !self.objective.iter().all(check)
            || !self.constraints.iter().all(|c| c.entries.iter().all(check))
        {
            return Err(Error::InvalidInput("SDP entry outside its block".into()));
        }
        Ok(())
    }

    pub fn dense(&self, entries: &[Entry]) -> BlockMat {
        dense(&self.blocks, entries)
    }

    /// Σ y_j A_j
    pub fn adjoint(&self, y: &[f64]) -> BlockMat {
        let mut out = self.zeros();
        for (c, &yj) in self.constraints.iter().zip(y) {
            if yj != 0.0 {
                add_entries(&mut out, &c.entries, yj);
            }
        }
        out
    }

    /// Vector of ⟨A_j, X⟩.
    pub fn apply(&self, x: &BlockMat) -> DVector<f64> {
        DVector::from_iterator(self.m(), self.constraints.iter().map(|c| pair(&c.entries, x)))
    }

    pub fn objective_value(&self, x: &BlockMat) -> f64 {
        pair(&self.objective, x)
    }

    /// Max-norm violation of the equality constraints at X.
    pub fn residual(&self, x: &BlockMat) -> f64 {
        (self.apply(x) - self.rhs()).amax()
    }
}

pub fn dense(blocks: &[usize], entries: &[Entry]) -> BlockMat {
    let mut out: BlockMat = blocks.iter().map(|&n| Mat::zeros(n, n)).collect();
    add_entries(&mut out, entries, 1.0);
    out
}

fn add_entries(out: &mut BlockMat, entries: &[Entry], scale: f64) {
    for e in entries {
        let m = &mut out[e.block];
        m[(e.i, e.j)] += scale * e.v;
        if e.i != e.j {
            m[(e.j, e.i)] += scale * e.v;
        }
    }
}

/// ⟨A, G⟩ for the symmetric A given by entries and any (possibly non-symmetric) G.
pub fn pair(entries: &[Entry], g: &BlockMat) -> f64 {
    entries
        .iter()
        .map(|e| {
            let m = &g[e.block];
            if e.i == e.j {
                e.v * m[(e.i, e.i)]
            } else {
                e.v * (m[(e.i, e.j)] + m[(e.j, e.i)])
            }
        })
        .sum()
}

pub fn inner(a: &BlockMat, b: &BlockMat) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.component_mul(y).sum()).sum()
}

pub fn frob(a: &BlockMat) -> f64 {
    inner(a, a).sqrt()
}

pub fn block_min_eig(a: &BlockMat) -> f64 {
    a.iter().map(min_eigenvalue).fold(f64::INFINITY, f64::min)
}

fn axpy(a: &BlockMat, s: f64, b: &BlockMat) -> BlockMat {
    a.iter().zip(b).map(|(x, y)| x + y * s).collect()
}

fn mul(a: &BlockMat, b: &BlockMat) -> BlockMat {
    a.iter().zip(b).map(|(x, y)| x * y).collect()
}

fn sym_all(a: &BlockMat) -> BlockMat {
    a.iter().map(sym).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SdpStatus {
    Optimal,
    InfeasibleCertificate,
    Unbounded,
    NumericalFailure,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SdpSolution {
    pub status: SdpStatus,
    /// Primal point (a primal ray when unbounded).
    pub x: BlockMat,
    /// Dual multipliers (a Farkas ray when infeasible).
    pub y: Vec<f64>,
    /// Σ y_j A_j − C, assembled from y (for a ray: Σ y_j A_j).
    pub s: BlockMat,
    pub primal_value: f64,
    pub dual_value: f64,
    pub gap: f64,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub iterations: usize,
}

#[derive(Clone, Copy, Debug)]
pub struct SolveOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { tol: 1e-9, max_iter: 200 }
    }
}

/// Solve with the default iteration cap.
pub fn solve(p: &SdpProblem, tol: f64) -> Result<SdpSolution> {
    solve_with(p, SolveOptions { tol, ..Default::default() })
}

/// Indices of a maximal linearly independent subset of the constraints, and
/// for each dropped constraint its expansion in the kept ones.
pub(crate) fn independent_constraints(p: &SdpProblem) -> (Vec<usize>, Vec<(usize, Vec<f64>)>) {
    let rows: Vec<DVector<f64>> =
        p.constraints.iter().map(|c| svec(&p.blocks, &c.entries)).collect();
    let mut basis: Vec<DVector<f64>> = Vec::new();
    let mut kept = Vec::new();
    let mut dropped = Vec::new();
    for (j, r) in rows.iter().enumerate() {
        let mut w = r.clone();
        for _ in 0..2 {
            for b in &basis {
                let c = b.dot(&w);
                w -= b * c;
            }
        }
        let nr = r.norm();
        if w.norm() > 1e-10 * nr.max(1e-300) && nr > 0.0 {
            let nw = w.norm();
            basis.push(w / nw);
            kept.push(j);
        } else {
            dropped.push(j);
        }
    }
    let mut expansions = Vec::new();
    if !dropped.is_empty() && !kept.is_empty() {
        let k = Mat::from_columns(&kept.iter().map(|&j| rows[j].clone()).collect::<Vec<_>>());
        let svd = k.clone().svd(true, true);
        for &j in &dropped {
            let c = svd.solve(&rows[j], 1e-12).unwrap_or_else(|_| DVector::zeros(kept.len()));
            expansions.push((j, c.iter().copied().collect()));
        }
    } else {
        for &j in &dropped {
            expansions.push((j, vec![0.0; kept.len()]));
        }
    }
    (kept, expansions)
}

/// Stacked upper triangles with off-diagonals scaled by √2, so that the
/// Euclidean inner product of two svecs equals ⟨A, B⟩.
pub(crate) fn svec(blocks: &[usize], entries: &[Entry]) -> DVector<f64> {
    let mut offs = Vec::with_capacity(blocks.len());
    let mut total = 0;
    for &n in blocks {
        offs.push(total);
        total += n * (n + 1) / 2;
    }
    let mut v = DVector::zeros(total);
    let r2 = std::f64::consts::SQRT_2;
    for e in entries {
        let n = blocks[e.block];
        let row_start: usize = (0..e.i).map(|r| n - r).sum();
        let k = offs[e.block] + row_start + (e.j - e.i);
        v[k] += if e.i == e.j { e.v } else { r2 * e.v };
    }
    v
}

/// Inverse of `svec`, as entries.
pub(crate) fn smat(blocks: &[usize], v: &DVector<f64>) -> Vec<Entry> {
    let r2 = std::f64::consts::SQRT_2;
    let mut out = Vec::new();
    let mut k = 0;
    for (b, &n) in blocks.iter().enumerate() {
        for i in 0..n {
            for j in i..n {
                let x = v[k];
                k += 1;
                if x != 0.0 {
                    out.push(Entry::new(b, i, j, if i == j { x } else { x / r2 }));
                }
            }
        }
    }
    out
}

pub fn solve_with(p: &SdpProblem, opts: SolveOptions) -> Result<SdpSolution> {
    p.validate()?;
    let (kept, dropped) = independent_constraints(p);
    let b = p.rhs();
    let bscale = 1.0 + b.amax();
    for (j, coeff) in &dropped {
        let implied: f64 = kept.iter().zip(coeff).map(|(&k, c)| c * b[k]).sum();
        if (implied - b[*j]).abs() > 1e-7 * bscale {
            // A_j − Σ c_k A_k = 0 while the right-hand sides disagree
            let mut y = vec![0.0; p.m()];
            let sign = if b[*j] - implied > 0.0 { -1.0 } else { 1.0 };
            y[*j] = sign;
            for (&k, c) in kept.iter().zip(coeff) {
                y[k] = -sign * c;
            }
            let s = p.adjoint(&y);
            return Ok(SdpSolution {
                status: SdpStatus::InfeasibleCertificate,
                x: p.zeros(),
                dual_value: y.iter().zip(b.iter()).map(|(a, c)| a * c).sum(),
                y,
                s,
                primal_value: f64::NAN,
                gap: f64::NAN,
                primal_residual: f64::NAN,
                dual_residual: f64::NAN,
                iterations: 0,
            });
        }
    }
    let reduced = SdpProblem {
        blocks: p.blocks.clone(),
        objective: p.objective.clone(),
        constraints: kept.iter().map(|&j| p.constraints[j].clone()).collect(),
    };
    let mut sol = interior_point(&reduced, opts);
    let mut y = vec![0.0; p.m()];
    for (k, &j) in kept.iter().enumerate() {
        y[j] = sol.y[k];
    }
    sol.y = y;
    sol.primal_residual = if sol.status == SdpStatus::Unbounded { sol.primal_residual } else { p.residual(&sol.x) };
    Ok(sol)
}

fn chol_inverse(m: &Mat) -> Mat {
    if m.nrows() == 1 {
        return Mat::from_element(1, 1, 1.0 / m[(0, 0)]);
    }
    match m.clone().cholesky() {
        Some(c) => c.inverse(),
        None => {
            let e = sym(m).symmetric_eigen();
            let n = m.nrows();
            let mut out = Mat::zeros(n, n);
            for k in 0..n {
                let l = e.eigenvalues[k].max(1e-300);
                let v = e.eigenvectors.column(k);
                out += (v * v.transpose()) / l;
            }
            out
        }
    }
}

/// Largest α with X + α·dX ⪰ 0 (∞ when unbounded).
fn max_step(x: &Mat, dx: &Mat) -> f64 {
    let n = x.nrows();
    if n == 0 {
        return f64::INFINITY;
    }
    if n == 1 {
        return if dx[(0, 0)] < 0.0 { -x[(0, 0)] / dx[(0, 0)] } else { f64::INFINITY };
    }
    let lmin = match x.clone().cholesky() {
        Some(c) => {
            let l = c.l();
            let t = l.solve_lower_triangular(dx).unwrap();
            let m = l.solve_lower_triangular(&t.transpose()).unwrap();
            min_eigenvalue(&m)
        }
        None => {
            let e = sym(x).symmetric_eigen();
            let mut ih = Mat::zeros(n, n);
            for k in 0..n {
                let v = e.eigenvectors.column(k);
                ih += (v * v.transpose()) / e.eigenvalues[k].max(1e-300).sqrt();
            }
            min_eigenvalue(&(&ih * dx * &ih))
        }
    };
    if lmin >= 0.0 {
        f64::INFINITY
    } else {
        -1.0 / lmin
    }
}

fn block_step(x: &BlockMat, dx: &BlockMat) -> f64 {
    x.iter().zip(dx).map(|(a, b)| max_step(a, b)).fold(f64::INFINITY, f64::min)
}

fn solve_spd(m: &Mat, r: &DVector<f64>) -> DVector<f64> {
    if let Some(c) = m.clone().cholesky() {
        let s = c.solve(r);
        if s.iter().all(|v| v.is_finite()) {
            return s;
        }
    }
    let scale = (0..m.nrows()).map(|i| m[(i, i)].abs()).fold(0.0, f64::max).max(1e-300);
    let mut reg = m.clone();
    for i in 0..m.nrows() {
        reg[(i, i)] += 1e-13 * scale;
    }
    if let Some(c) = reg.clone().cholesky() {
        return c.solve(r);
    }
    m.clone().lu().solve(r).unwrap_or_else(|| DVector::zeros(r.len()))
}

fn interior_point(p: &SdpProblem, opts: SolveOptions) -> SdpSolution {
    let m = p.m();
    let nn: usize = p.blocks.iter().sum::<usize>().max(1);
    let c = p.dense(&p.objective);
    let b = p.rhs();
    let a_dense: Vec<BlockMat> = p.constraints.iter().map(|k| p.dense(&k.entries)).collect();
    let norm_c = frob(&c);
    let norm_b = b.norm();
    let a_norms: Vec<f64> = a_dense.iter().map(frob).collect();
    let sqrt_n = (nn as f64).sqrt();
    let mut xi = 10f64.max(sqrt_n);
    for j in 0..m {
        xi = xi.max(sqrt_n * (1.0 + b[j].abs()) / (1.0 + a_norms[j]));
    }
    let mut eta = 10f64.max(sqrt_n).max(norm_c);
    for &an in &a_norms {
        eta = eta.max(an);
    }
    let mut x: BlockMat = p.identity().iter().map(|i| i * xi).collect();
    let mut z: BlockMat = p.identity().iter().map(|i| i * eta).collect();
    let mut y = DVector::<f64>::zeros(m);
    let blocks_of: Vec<Vec<usize>> = p
        .constraints
        .iter()
        .map(|k| {
            let mut bl: Vec<usize> = k.entries.iter().map(|e| e.block).collect();
            bl.sort_unstable();
            bl.dedup();
            bl
        })
        .collect();

    let mut status = SdpStatus::NumericalFailure;
    let mut iters = 0;
    let mut stalls = 0;
    let (mut pinf, mut dinf) = (f64::INFINITY, f64::INFINITY);
    let mut best: Option<(f64, BlockMat, DVector<f64>, f64, f64)> = None;
    for it in 0..opts.max_iter {
        iters = it;
        let ax = p.apply(&x);
        let rp = &b - &ax;
        let aty = p.adjoint(y.as_slice());
        let rd: BlockMat = c.iter().zip(&aty).zip(&z).map(|((ci, ai), zi)| ci - ai + zi).collect();
        let pobj = inner(&c, &x);
        let dobj = b.dot(&y);
        let xz = inner(&x, &z);
        pinf = rp.norm() / (1.0 + norm_b);
        dinf = frob(&rd) / (1.0 + norm_c);
        let denom = 1.0 + pobj.abs() + dobj.abs();
        let relgap = (pobj - dobj).abs() / denom;
        if pinf <= opts.tol && dinf <= opts.tol && relgap <= opts.tol && xz / denom <= opts.tol {
            status = SdpStatus::Optimal;
            break;
        }
        let score = pinf.max(dinf).max(relgap);
        if score.is_finite() && best.as_ref().is_none_or(|b| score < b.0) {
            best = Some((score, x.clone(), y.clone(), pinf, dinf));
        }
        // primal infeasibility: bᵀy → −∞ along a direction with Σ y A ⪰ 0
        if dobj < -1e8 * (1.0 + norm_c + norm_b) {
            let yh = &y / (-dobj);
            let sh = p.adjoint(yh.as_slice());
            if block_min_eig(&sh) >= -1e-7 * (1.0 + frob(&sh)) {
                status = SdpStatus::InfeasibleCertificate;
                let yv: Vec<f64> = yh.iter().copied().collect();
                return SdpSolution {
                    status,
                    x,
                    s: sh,
                    primal_value: pobj,
                    dual_value: -1.0,
                    y: yv,
                    gap: xz,
                    primal_residual: pinf,
                    dual_residual: dinf,
                    iterations: it,
                };
            }
        }
        if pobj > 1e8 * (1.0 + norm_c + norm_b) {
            let xh: BlockMat = x.iter().map(|v| v / pobj).collect();
            let res = p.apply(&xh).norm();
            if res <= 1e-6 {
                status = SdpStatus::Unbounded;
                x = xh;
                break;
            }
        }
        let mu = xz / nn as f64;
        let zinv: BlockMat = z.iter().map(chol_inverse).collect();
        // Schur matrix M_ij = ⟨A_i, X A_j Z⁻¹⟩
        let mut mm = Mat::zeros(m, m);
        for j in 0..m {
            let mut t: BlockMat = p.zeros();
            for &bk in &blocks_of[j] {
                t[bk] = &x[bk] * &a_dense[j][bk] * &zinv[bk];
            }
            for i in 0..m {
                if blocks_of[i].iter().any(|bk| blocks_of[j].contains(bk)) {
                    mm[(i, j)] = pair(&p.constraints[i].entries, &t);
                }
            }
        }
        let mm = sym(&mm);
        let g = mul(&mul(&x, &rd), &zinv);
        let ag = DVector::from_iterator(m, p.constraints.iter().map(|k| pair(&k.entries, &g)));
        let direction = |kz: &BlockMat| -> (DVector<f64>, BlockMat, BlockMat) {
            let akz = DVector::from_iterator(m, p.constraints.iter().map(|k| pair(&k.entries, kz)));
            let rhs = &akz + &ag - &rp;
            let dy = solve_spd(&mm, &rhs);
            let atdy = p.adjoint(dy.as_slice());
            let dz = axpy(&atdy, -1.0, &rd);
            let xdz = mul(&mul(&x, &dz), &zinv);
            let dx = sym_all(&axpy(kz, -1.0, &xdz));
            (dy, dx, dz)
        };
        // predictor
        let kz_aff: BlockMat = x.iter().map(|v| -v).collect();
        let (_, dxa, dza) = direction(&kz_aff);
        let ap = block_step(&x, &dxa).min(1.0);
        let ad = block_step(&z, &dza).min(1.0);
        let mu_aff = inner(&axpy(&x, ap, &dxa), &axpy(&z, ad, &dza)) / nn as f64;
        let sigma = if mu > 0.0 { (mu_aff / mu).clamp(0.0, 1.0).powi(3) } else { 0.0 };
        // corrector
        let corr = mul(&mul(&dxa, &dza), &zinv);
        let kz: BlockMat = zinv
            .iter()
            .zip(&x)
            .zip(&corr)
            .map(|((zi, xi), ci)| zi * (sigma * mu) - xi - ci)
            .collect();
        let (dy, dx, dz) = direction(&kz);
        let ap = (0.98 * block_step(&x, &dx)).min(1.0);
        let ad = (0.98 * block_step(&z, &dz)).min(1.0);
        if ap < 1e-10 && ad < 1e-10 {
            stalls += 1;
            if stalls > 5 {
                break;
            }
        } else {
            stalls = 0;
        }
        let xn = axpy(&x, ap, &dx);
        let zn = axpy(&z, ad, &dz);
        let yn = &y + dy * ad;
        let finite = |m: &BlockMat| m.iter().all(|b| b.iter().all(|v| v.is_finite()));
        if !(finite(&xn) && finite(&zn) && yn.iter().all(|v| v.is_finite())) {
            break;
        }
        (x, z, y) = (xn, zn, yn);
    }
    // endgame breakdown: fall back to the most accurate iterate seen
    if status == SdpStatus::NumericalFailure {
        if let Some((_, bx, by, bp, bd)) = best {
            (x, y, pinf, dinf) = (bx, by, bp, bd);
        }
    }
    let yv: Vec<f64> = y.iter().copied().collect();
    let aty = p.adjoint(&yv);
    let s: BlockMat = aty.iter().zip(&c).map(|(a, ci)| a - ci).collect();
    let pobj = inner(&c, &x);
    let dobj = b.dot(&y);
    SdpSolution {
        status,
        gap: inner(&x, &s),
        x,
        y: yv,
        s,
        primal_value: pobj,
        dual_value: dobj,
        primal_residual: pinf,
        dual_residual: dinf,
        iterations: iters,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn max_offdiag_two_by_two() {
        let mut p = SdpProblem::single(2);
        p.objective = unit(0, 0, 1);
        p.add_constraint(unit(0, 0, 0), 1.0);
        p.add_constraint(unit(0, 1, 1), 1.0);
        let s = solve(&p, 1e-9).unwrap();
        assert_eq!(s.status, SdpStatus::Optimal);
        assert!((s.primal_value - 1.0).abs() < 1e-7);
        assert!((s.x[0][(0, 1)] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn maxcut_triangle() {
        let n = 3;
        let mut p = SdpProblem::single(n);
        // ¼⟨L, X⟩ with L the Laplacian of K3
        let mut l = Mat::from_element(n, n, -1.0);
        for i in 0..n {
            l[(i, i)] = 2.0;
        }
        p.objective = entries_of(0, &(l * 0.25));
        for i in 0..n {
            p.add_constraint(unit(0, i, i), 1.0);
        }
        let s = solve(&p, 1e-9).unwrap();
        assert_eq!(s.status, SdpStatus::Optimal);
        assert!((s.primal_value - 2.25).abs() < 1e-7);
    }

    #[test]
    fn negative_diagonal_infeasible() {
        let mut p = SdpProblem::single(2);
        p.add_constraint(unit(0, 0, 0), -1.0);
        let s = solve(&p, 1e-9).unwrap();
        assert_eq!(s.status, SdpStatus::InfeasibleCertificate);
        assert!(block_min_eig(&s.s) >= -1e-7);
        let by: f64 = s.y.iter().zip(p.rhs().iter()).map(|(a, b)| a * b).sum();
        assert!(by < 0.0);
    }

    #[test]
    fn dependent_constraints_consistent_and_not() {
        let mut p = SdpProblem::single(2);
        p.objective = unit(0, 0, 1);
        p.add_constraint(unit(0, 0, 0), 1.0);
        p.add_constraint(unit(0, 1, 1), 1.0);
        p.add_constraint(unit(0, 0, 0), 1.0);
        assert_eq!(solve(&p, 1e-9).unwrap().status, SdpStatus::Optimal);
        p.constraints[2].rhs = 2.0;
        assert_eq!(solve(&p, 1e-9).unwrap().status, SdpStatus::InfeasibleCertificate);
    }

    #[test]
    fn unbounded_detected() {
        let mut p = SdpProblem::single(2);
        p.objective = unit(0, 0, 1);
        p.add_constraint(unit(0, 0, 0), 1.0);
        let s = solve(&p, 1e-9).unwrap();
        assert_eq!(s.status, SdpStatus::Unbounded);
    }

    #[test]
    fn scalar_blocks_behave_as_lp() {
        // max x1 + x2, x1 + 2 x2 = 4, x ≥ 0
        let mut p = SdpProblem::new(vec![1, 1]);
        p.objective = vec![Entry::new(0, 0, 0, 1.0), Entry::new(1, 0, 0, 1.0)];
        p.add_constraint(vec![Entry::new(0, 0, 0, 1.0), Entry::new(1, 0, 0, 2.0)], 4.0);
        let s = solve(&p, 1e-9).unwrap();
        assert_eq!(s.status, SdpStatus::Optimal);
        assert!((s.primal_value - 4.0).abs() < 1e-6);
    }
}
