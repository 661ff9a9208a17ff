//! Slater probe, facial reduction, and Farkas certificates for systems that
//! are feasible but not strictly feasible.

use super::{
    frob, smat, solve, svec, BlockMat, Entry, SdpProblem, SdpSolution, SdpStatus,
};
use crate::error::{Error, Result};
use crate::linalg::{null_space, sym_eigen, Mat};
use nalgebra::DVector;

/// Margins at or below this (relative to the data scale) count as zero.
pub const STRICT_MARGIN: f64 = 1e-6;

#[derive(Clone, Debug)]
pub struct ProbeResult {
    /// Largest t ≤ 1 with a feasible X ⪰ tI (clamped at 0); None when the
    /// system is infeasible.
    pub margin: Option<f64>,
    /// The feasible X = Y + t*I found by the probe.
    pub x: BlockMat,
    pub solution: SdpSolution,
}

fn trace_of(entries: &[Entry]) -> f64 {
    entries.iter().filter(|e| e.i == e.j).map(|e| e.v).sum()
}

fn data_scale(p: &SdpProblem) -> f64 {
    p.constraints.iter().fold(1.0f64, |a, c| a.max(c.rhs.abs()))
}

/// max t s.t. ⟨A_j, Y⟩ + t·tr(A_j) = b_j, Y ⪰ 0, −1 ≤ t ≤ 1, written with
/// u = t + 1 ∈ [0, 2]. Allowing t < 0 keeps the program strictly feasible
/// whenever the system is feasible at all, so boundary instances (t* = 0) do
/// not stall the interior point method.
pub fn slater_probe(p: &SdpProblem, tol: f64) -> Result<ProbeResult> {
    p.validate()?;
    let nb = p.blocks.len();
    let mut q = SdpProblem::new(p.blocks.iter().copied().chain([1, 1]).collect());
    q.objective = vec![Entry::new(nb, 0, 0, 1.0)];
    for c in &p.constraints {
        let mut e = c.entries.clone();
        let tr = trace_of(&c.entries);
        if tr != 0.0 {
            e.push(Entry::new(nb, 0, 0, tr));
        }
        q.add_constraint(e, c.rhs + tr);
    }
    q.add_constraint(vec![Entry::new(nb, 0, 0, 1.0), Entry::new(nb + 1, 0, 0, 1.0)], 2.0);
    let sol = solve(&q, tol)?;
    let t = sol.x[nb][(0, 0)] - 1.0;
    let x: BlockMat = (0..nb).map(|b| &sol.x[b] + Mat::identity(p.blocks[b], p.blocks[b]) * t).collect();
    let scale = data_scale(p);
    let t = match sol.status {
        SdpStatus::Optimal => Some(t),
        SdpStatus::InfeasibleCertificate => None,
        _ if sol.primal_residual <= 1e-6 * scale => Some(t),
        s => return Err(Error::Numerical(format!("Slater probe ended with {s:?}"))),
    };
    // slightly negative optima are boundary points up to rounding
    let margin = t.filter(|&t| t >= -STRICT_MARGIN * scale).map(|t| t.max(0.0));
    Ok(ProbeResult { margin, x, solution: sol })
}

#[derive(Clone, Debug)]
pub struct FacialSolution {
    /// Optimal X in the original space, X = V W Vᵀ blockwise.
    pub x: BlockMat,
    /// Multipliers for the original constraints (from the reduced problem).
    pub y: Vec<f64>,
    pub value: f64,
    /// Face bases V_b (orthonormal columns).
    pub faces: Vec<Mat>,
    pub reductions: usize,
    pub strictly_feasible: bool,
    pub inner: SdpSolution,
}

/// Eigenvalue cut shared by all blocks: keep eigenvalues above the returned
/// threshold. None when no clear gap exists.
fn face_threshold(x: &BlockMat) -> Option<f64> {
    let mut all: Vec<f64> = x.iter().flat_map(|b| sym_eigen(b).0).collect();
    all.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let top = all.first().copied()?.max(0.0);
    if top <= 0.0 {
        return None;
    }
    let mut best: Option<(f64, f64)> = None;
    for k in 1..all.len() {
        let lo = all[k].max(1e-300 * top);
        if all[k] > 1e-3 * top {
            continue;
        }
        let ratio = all[k - 1] / lo;
        if ratio >= 1e2 && best.is_none_or(|b| ratio > b.0) {
            best = Some((ratio, (all[k - 1] * lo).sqrt()));
        }
    }
    best.map(|b| b.1)
}

/// Problem restricted to X = V W Vᵀ, with the constraint rows orthogonalised
/// and near-dependent combinations removed. Returns the problem, the live block
/// indices, and the map from reduced multipliers to original ones.
fn restrict(p: &SdpProblem, faces: &[Mat]) -> (SdpProblem, Vec<usize>, Mat) {
    let live: Vec<usize> = (0..faces.len()).filter(|&b| faces[b].ncols() > 0).collect();
    let blocks: Vec<usize> = live.iter().map(|&b| faces[b].ncols()).collect();
    let project = |entries: &[Entry]| -> Vec<Entry> {
        let dense = p.dense(entries);
        let mut out = Vec::new();
        for (k, &b) in live.iter().enumerate() {
            let v = &faces[b];
            out.extend(super::entries_of(k, &(v.transpose() * &dense[b] * v)));
        }
        out
    };
    let m = p.m();
    let dim: usize = blocks.iter().map(|&n| n * (n + 1) / 2).sum();
    let mut rows = Mat::zeros(m, dim);
    for (j, c) in p.constraints.iter().enumerate() {
        rows.set_row(j, &svec(&blocks, &project(&c.entries)).transpose());
    }
    let mut q = SdpProblem::new(blocks.clone());
    q.objective = project(&p.objective);
    if m == 0 || dim == 0 {
        return (q, live, Mat::zeros(m, 0));
    }
    let svd = rows.clone().svd(true, true);
    let u = svd.u.unwrap();
    let smax = svd.singular_values.max();
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&k| svd.singular_values[k] > 1e-6 * smax)
        .collect();
    let b = p.rhs();
    let mut map = Mat::zeros(m, keep.len());
    for (c, &k) in keep.iter().enumerate() {
        let uk = u.column(k);
        map.set_column(c, &uk);
        let row: DVector<f64> = rows.transpose() * uk;
        q.add_constraint(smat(&blocks, &row), uk.dot(&b));
    }
    (q, live, map)
}

/// Solve max ⟨C,X⟩ over the minimal face of the feasible set, found by
/// repeated Slater probes.
pub fn solve_facial(p: &SdpProblem, tol: f64) -> Result<FacialSolution> {
    let scale = data_scale(p);
    let mut faces: Vec<Mat> = p.blocks.iter().map(|&n| Mat::identity(n, n)).collect();
    let mut reductions = 0;
    let mut strictly_feasible = false;
    let mut current: Option<(SdpProblem, Vec<usize>, Mat)> = None;
    for _ in 0..=p.blocks.iter().sum::<usize>() {
        let (q, live) = match &current {
            None => (p.clone(), (0..p.blocks.len()).collect::<Vec<_>>()),
            Some((q, live, _)) => (q.clone(), live.clone()),
        };
        let probe = slater_probe(&q, tol)?;
        let t = probe.margin.ok_or_else(|| Error::Infeasible("the constraint system has no psd solution".into()))?;
        if t > STRICT_MARGIN * scale {
            strictly_feasible = reductions == 0;
            break;
        }
        let Some(cut) = face_threshold(&probe.x) else { break };
        for (k, &b) in live.iter().enumerate() {
            let (vals, vecs) = sym_eigen(&probe.x[k]);
            let r = vals.iter().filter(|&&v| v > cut).count();
            faces[b] = &faces[b] * vecs.columns(0, r);
        }
        reductions += 1;
        current = Some(restrict(p, &faces));
    }
    let (q, live, map) = match current {
        None => (p.clone(), (0..p.blocks.len()).collect(), Mat::identity(p.m(), p.m())),
        Some(c) => c,
    };
    let inner = solve(&q, tol)?;
    let mut x: BlockMat = p.zeros();
    for (k, &b) in live.iter().enumerate() {
        let v = &faces[b];
        x[b] = v * &inner.x[k] * v.transpose();
    }
    let yq = DVector::from_column_slice(&inner.y);
    let y: Vec<f64> = if map.ncols() == yq.len() { (&map * yq).iter().copied().collect() } else { vec![0.0; p.m()] };
    Ok(FacialSolution {
        value: p.objective_value(&x),
        x,
        y,
        faces,
        reductions,
        strictly_feasible,
        inner,
    })
}

#[derive(Clone, Debug)]
pub struct FarkasCertificate {
    pub y: Vec<f64>,
    /// Ω = Σ y_j A_j, psd with trace 1 and bᵀy = 0.
    pub omega: BlockMat,
    pub min_eig: f64,
    /// ‖ΩX‖_F for the supplied feasible X.
    pub complementarity: Option<f64>,
}

/// Nonzero psd Ω = Σ y_j A_j with bᵀy = 0, or None when the system is
/// strictly feasible (no such Ω exists).
pub fn farkas_certificate(p: &SdpProblem, x: Option<&BlockMat>, tol: f64) -> Result<Option<FarkasCertificate>> {
    p.validate()?;
    let m = p.m();
    let b = p.rhs();
    let tau = DVector::from_iterator(m, p.constraints.iter().map(|c| trace_of(&c.entries)));
    let mut g = Mat::zeros(2, m);
    g.set_row(0, &b.transpose());
    g.set_row(1, &tau.transpose());
    let target = DVector::from_column_slice(&[0.0, 1.0]);
    let yp = match g.clone().svd(true, true).solve(&target, 1e-12) {
        Ok(v) => v,
        Err(_) => return Ok(None),
    };
    if (&g * &yp - &target).amax() > 1e-9 {
        return Ok(None);
    }
    let k = null_space(&g, 1e-12);
    let r = k.ncols();
    let mut q = SdpProblem::new(p.blocks.clone());
    q.objective = p.adjoint(yp.as_slice()).iter().enumerate().flat_map(|(bk, m)| super::entries_of(bk, &(-m))).collect();
    for l in 0..r {
        let dir: Vec<f64> = k.column(l).iter().copied().collect();
        let a = p.adjoint(&dir);
        q.add_constraint(a.iter().enumerate().flat_map(|(bk, m)| super::entries_of(bk, m)).collect(), 0.0);
    }
    q.add_constraint(
        p.blocks.iter().enumerate().flat_map(|(bk, &n)| (0..n).map(move |i| Entry::new(bk, i, i, 1.0))).collect(),
        1.0,
    );
    let sol = solve(&q, tol)?;
    if sol.status == SdpStatus::InfeasibleCertificate {
        return Err(Error::Numerical("certificate search reported infeasible".into()));
    }
    // d* = −max λ_min(Σ y_j A_j) over the normalised affine set
    let dstar = sol.y[r];
    if dstar > 1e-7 {
        return Ok(None);
    }
    let u = DVector::from_column_slice(&sol.y[..r]);
    let y = &yp + &k * u;
    let y: Vec<f64> = y.iter().copied().collect();
    let omega = p.adjoint(&y);
    let min_eig = super::block_min_eig(&omega);
    let complementarity = x.map(|x| {
        let prod: BlockMat = omega.iter().zip(x).map(|(o, xi)| o * xi).collect();
        frob(&prod)
    });
    Ok(Some(FarkasCertificate { y, omega, min_eig, complementarity }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sdp::unit;

    fn fixed_ones() -> SdpProblem {
        let mut p = SdpProblem::single(2);
        p.add_constraint(unit(0, 0, 0), 1.0);
        p.add_constraint(unit(0, 1, 1), 1.0);
        p.add_constraint(unit(0, 0, 1), 1.0);
        p
    }

    #[test]
    fn probe_margins() {
        let mut p = SdpProblem::single(2);
        p.add_constraint(unit(0, 0, 0), 1.0);
        p.add_constraint(unit(0, 1, 1), 1.0);
        let t = slater_probe(&p, 1e-9).unwrap().margin.unwrap();
        assert!((t - 1.0).abs() < 1e-6);
        let t = slater_probe(&fixed_ones(), 1e-9).unwrap().margin.unwrap();
        assert!(t < 1e-6, "{t}");
        let mut bad = SdpProblem::single(1);
        bad.add_constraint(unit(0, 0, 0), -1.0);
        assert!(slater_probe(&bad, 1e-9).unwrap().margin.is_none());
    }

    #[test]
    fn farkas_on_fixed_ones() {
        let x = vec![Mat::from_element(2, 2, 1.0)];
        let c = farkas_certificate(&fixed_ones(), Some(&x), 1e-9).unwrap().unwrap();
        let o = &c.omega[0];
        assert!((o[(0, 0)] - 0.5).abs() < 1e-6);
        assert!((o[(0, 1)] + 0.5).abs() < 1e-6);
        assert!(c.complementarity.unwrap() < 1e-6);
    }

    #[test]
    fn farkas_absent_when_strict() {
        let mut p = SdpProblem::single(3);
        for i in 0..3 {
            p.add_constraint(unit(0, i, i), 1.0);
        }
        assert!(farkas_certificate(&p, None, 1e-9).unwrap().is_none());
    }

    #[test]
    fn facial_solve_fixed_ones() {
        let mut p = fixed_ones();
        p.objective = unit(0, 0, 0);
        let s = solve_facial(&p, 1e-9).unwrap();
        assert_eq!(s.reductions, 1);
        assert_eq!(s.faces[0].ncols(), 1);
        assert!((s.x[0][(0, 1)] - 1.0).abs() < 1e-8);
    }
}
