//! Rank reduction of a feasible point along directions in its face.

use super::{entries_of, smat, svec, BlockMat, SdpProblem};
use crate::linalg::{null_space, sym_eigen, Mat};
use nalgebra::DVector;

/// Largest k with k(k+1)/2 ≤ m.
pub fn barvinok_bound(m: usize) -> usize {
    let k = (((1.0 + 8.0 * m as f64).sqrt() - 1.0) / 2.0).floor() as usize;
    // guard the float floor on exact triangular numbers
    if (k + 1) * (k + 2) / 2 <= m {
        k + 1
    } else if k * (k + 1) / 2 > m {
        k - 1
    } else {
        k
    }
}

/// Factor X = V Vᵀ keeping eigenvalues above tol·max(1, λ_max).
fn face_factor(x: &Mat, tol: f64) -> Mat {
    let (vals, vecs) = sym_eigen(x);
    let top = vals.first().copied().unwrap_or(0.0).max(1.0);
    let keep: Vec<usize> = (0..vals.len()).filter(|&i| vals[i] > tol * top).collect();
    let mut v = Mat::zeros(x.nrows(), keep.len());
    for (c, &i) in keep.iter().enumerate() {
        v.set_column(c, &(vecs.column(i) * vals[i].sqrt()));
    }
    v
}

/// Move a feasible X to a feasible point of low rank.
///
/// Each step writes X = V Vᵀ per block, finds a symmetric R ≠ 0 with
/// ⟨Vᵀ A_j V, R⟩ = 0 for all j and walks X(t) = V (I + tR) Vᵀ to the boundary
/// of the face, which drops at least one rank. Stops once no such R exists,
/// where Σ r_b(r_b+1)/2 ≤ m holds.
pub fn rank_reduce(p: &SdpProblem, x: &BlockMat, tol: f64) -> BlockMat {
    let tol = tol.max(1e-14);
    let mut x: BlockMat = x.clone();
    let mats: Vec<BlockMat> = p.constraints.iter().map(|c| p.dense(&c.entries)).collect();
    loop {
        let factors: Vec<Mat> = x.iter().map(|xb| face_factor(xb, tol)).collect();
        let ranks: Vec<usize> = factors.iter().map(|v| v.ncols()).collect();
        let width: usize = ranks.iter().map(|r| r * (r + 1) / 2).sum();
        if width == 0 {
            break;
        }
        let mut rows = Mat::zeros(mats.len().max(1), width);
        for (j, a) in mats.iter().enumerate() {
            let mut entries = Vec::new();
            for (b, v) in factors.iter().enumerate() {
                entries.extend(entries_of(b, &(v.transpose() * &a[b] * v)));
            }
            rows.set_row(j, &svec(&ranks, &entries).transpose());
        }
        let ns = null_space(&rows, 1e-10);
        if ns.ncols() == 0 {
            break;
        }
        let dir = p_dense(&ranks, &ns.column(0).clone_owned());
        let lmax = dir.iter().flat_map(|r| sym_eigen(r).0.first().copied()).fold(f64::NEG_INFINITY, f64::max);
        let lmin = dir.iter().flat_map(|r| sym_eigen(r).0.last().copied()).fold(f64::INFINITY, f64::min);
        // step to where the extreme eigenvalue of I + tR reaches zero
        let t = if lmax >= -lmin { -1.0 / lmax } else { -1.0 / lmin };
        for (b, v) in factors.iter().enumerate() {
            let inner = Mat::identity(ranks[b], ranks[b]) + &dir[b] * t;
            x[b] = v * inner * v.transpose();
            x[b] = (&x[b] + x[b].transpose()) * 0.5;
        }
    }
    x
}

fn p_dense(blocks: &[usize], v: &DVector<f64>) -> BlockMat {
    super::dense(blocks, &smat(blocks, v))
}
