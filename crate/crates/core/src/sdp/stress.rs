//! Stressed frameworks from the stretched-pair program and its pinned variant.

use super::{entries_of, farkas_certificate, slater_probe, solve, solve_facial, unit, Entry, SdpProblem, SdpStatus};
use crate::error::{invalid, Error, Result};
use crate::graph::{norm_edge, Edge, Graph};
use crate::linalg::{gram_factor, max_abs, min_eigenvalue, numerical_rank, Configuration, Mat};
use crate::partial::PartialMatrix;
use nalgebra::DVector;

/// Entries with |w| at or below this fraction of ‖Ω‖∞ count as zero when
/// reading off the stressed graph.
pub const STRESS_ZERO: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub struct StressMatrix {
    pub matrix: Mat,
    pub host: Graph,
    pub stretched_pair: Option<Edge>,
    pub psd: bool,
}

impl StressMatrix {
    /// Checks the support condition and that Ω ≠ 0.
    pub fn new(matrix: Mat, host: Graph, stretched_pair: Option<Edge>) -> Result<Self> {
        let n = host.n();
        if matrix.shape() != (n, n) {
            return invalid("stress matrix size does not match the host graph");
        }
        let s = StressMatrix { psd: false, matrix, host, stretched_pair };
        if s.support_violation() > 0.0 {
            return invalid("stress matrix has weight on a non-edge");
        }
        if max_abs(&s.matrix) == 0.0 {
            return invalid("stress matrix is zero");
        }
        let psd = s.min_eigenvalue() >= -1e-8 * max_abs(&s.matrix).max(1.0);
        Ok(StressMatrix { psd, ..s })
    }

    pub fn n(&self) -> usize {
        self.host.n()
    }

    fn allowed(&self, i: usize, j: usize) -> bool {
        i == j || self.host.has_edge(i, j) || self.stretched_pair == Some(norm_edge(i, j))
    }

    /// Largest |w_ij| over pairs outside V ∪ E ∪ {e0}.
    pub fn support_violation(&self) -> f64 {
        let n = self.n();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                if !self.allowed(i, j) {
                    worst = worst.max(self.matrix[(i, j)].abs());
                }
            }
        }
        worst
    }

    pub fn min_eigenvalue(&self) -> f64 {
        min_eigenvalue(&self.matrix)
    }

    /// ‖w_ii p_i + Σ_j w_ij p_j‖ per vertex.
    pub fn equilibrium_residuals(&self, c: &Configuration) -> Vec<f64> {
        let r = &self.matrix * &c.points;
        (0..self.n()).map(|i| r.row(i).norm()).collect()
    }

    pub fn zero_threshold(&self) -> f64 {
        STRESS_ZERO * max_abs(&self.matrix)
    }

    /// Support graph S(Ω) of the off-diagonal entries.
    pub fn stressed_graph(&self) -> Graph {
        let t = self.zero_threshold();
        let n = self.n();
        let mut g = Graph::new(n).with_labels(self.host.labels().to_vec()).expect("host labels");
        for i in 0..n {
            for j in i + 1..n {
                if self.matrix[(i, j)].abs() > t {
                    g.add_edge(i, j).expect("in range");
                }
            }
        }
        g
    }

    /// Vertices carrying stress (V_Ω): nonzero row.
    pub fn stressed_vertices(&self) -> Vec<usize> {
        let t = self.zero_threshold();
        (0..self.n()).filter(|&i| (0..self.n()).any(|j| self.matrix[(i, j)].abs() > t)).collect()
    }

    pub fn rank(&self, tol: f64) -> usize {
        numerical_rank(&self.matrix, tol)
    }
}

/// Levenberg–Marquardt on the low-rank optimality system
///   ⟨A_j, PPᵀ⟩ = b_j,   S(y) P = 0,   S(y) = Σ y_j A_j − C,
/// with tr S(y) held at its initial value when there is no objective.
/// Rows of P marked frozen stay fixed.
fn refine_kkt(
    mats: &[Mat],
    b: &[f64],
    c: Option<&Mat>,
    frozen: &[bool],
    p0: &Mat,
    y0: &[f64],
) -> (Mat, Vec<f64>) {
    let (n, r) = p0.shape();
    let m = mats.len();
    let free: Vec<usize> = (0..n).filter(|&v| !frozen.get(v).copied().unwrap_or(false)).collect();
    let col_of = |fi: usize, k: usize| fi * r + k;
    let nv = free.len() * r + m;
    let traces: Vec<f64> = mats.iter().map(|a| a.trace()).collect();
    let tr0: f64 = traces.iter().zip(y0).map(|(t, y)| t * y).sum();
    let extra = usize::from(c.is_none());
    let rows = m + n * r + extra;
    let stress_of = |y: &[f64]| -> Mat {
        let mut s = c.map_or_else(|| Mat::zeros(n, n), |c| -c);
        for (a, &yj) in mats.iter().zip(y) {
            s += a * yj;
        }
        s
    };
    let residual = |p: &Mat, y: &[f64]| -> DVector<f64> {
        let mut f = DVector::zeros(rows);
        let x = p * p.transpose();
        for j in 0..m {
            f[j] = mats[j].component_mul(&x).sum() - b[j];
        }
        let sp = stress_of(y) * p;
        for u in 0..n {
            for k in 0..r {
                f[m + u * r + k] = sp[(u, k)];
            }
        }
        if extra == 1 {
            f[rows - 1] = traces.iter().zip(y).map(|(t, y)| t * y).sum::<f64>() - tr0;
        }
        f
    };
    let mut p = p0.clone();
    let mut y = y0.to_vec();
    let mut f = residual(&p, &y);
    let mut fn2 = f.norm_squared();
    let mut lambda = 1e-6;
    for _ in 0..60 {
        if f.amax() <= 1e-14 {
            break;
        }
        let mut jac = Mat::zeros(rows, nv);
        let s = stress_of(&y);
        for j in 0..m {
            let ap = &mats[j] * &p;
            for (fi, &v) in free.iter().enumerate() {
                for k in 0..r {
                    jac[(j, col_of(fi, k))] = 2.0 * ap[(v, k)];
                }
            }
            for u in 0..n {
                for k in 0..r {
                    jac[(m + u * r + k, free.len() * r + j)] = ap[(u, k)];
                }
            }
            if extra == 1 {
                jac[(rows - 1, free.len() * r + j)] = traces[j];
            }
        }
        for u in 0..n {
            for (fi, &v) in free.iter().enumerate() {
                let suv = s[(u, v)];
                if suv != 0.0 {
                    for k in 0..r {
                        jac[(m + u * r + k, col_of(fi, k))] = suv;
                    }
                }
            }
        }
        let jtj = jac.transpose() * &jac;
        let g = jac.transpose() * &f;
        let mean = (jtj.trace() / nv.max(1) as f64).max(1e-300);
        let mut improved = false;
        for _ in 0..20 {
            let mut mm = jtj.clone();
            for t in 0..nv {
                mm[(t, t)] += lambda * mean;
            }
            let Some(ch) = mm.cholesky() else {
                lambda *= 10.0;
                continue;
            };
            let step = ch.solve(&(-&g));
            let mut pn = p.clone();
            for (fi, &v) in free.iter().enumerate() {
                for k in 0..r {
                    pn[(v, k)] += step[col_of(fi, k)];
                }
            }
            let yn: Vec<f64> = y.iter().enumerate().map(|(j, v)| v + step[free.len() * r + j]).collect();
            let fnew = residual(&pn, &yn);
            if fnew.norm_squared() < fn2 {
                p = pn;
                y = yn;
                f = fnew;
                fn2 = f.norm_squared();
                lambda = (lambda / 10.0).max(1e-16);
                improved = true;
                break;
            }
            lambda *= 10.0;
        }
        if !improved {
            break;
        }
    }
    (p, y)
}

/// PSD factor of a nearly psd matrix, negative eigenvalues clipped.
fn clipped_factor(x: &Mat) -> Result<Configuration> {
    let (vals, vecs) = crate::linalg::sym_eigen(x);
    let d = DVector::from_iterator(vals.len(), vals.iter().map(|v| v.max(0.0)));
    gram_factor(&(&vecs * Mat::from_diagonal(&d) * vecs.transpose()), 1e-7)
}

#[derive(Clone, Debug)]
pub struct Flattened {
    pub configuration: Configuration,
    /// Gram matrix of the configuration.
    pub x: Mat,
    pub stress: StressMatrix,
    /// ⟨p_i0, p_j0⟩ at the optimum.
    pub value: f64,
    /// Slater probe margin of the instance.
    pub margin: f64,
    /// True when Ω came from the dual program, false for the Farkas route.
    pub dual_route: bool,
}

impl Flattened {
    pub fn rank(&self, tol: f64) -> usize {
        numerical_rank(&self.x, tol)
    }
}

fn dense_single(p: &SdpProblem, entries: &[Entry]) -> Mat {
    p.dense(entries).remove(0)
}

/// Gram representation maximizing ⟨p_i0, p_j0⟩, together with a psd stress
/// supported on V ∪ E ∪ {e0} in equilibrium with it.
pub fn flatten(a: &PartialMatrix, e0: Edge, tol: f64) -> Result<Flattened> {
    let g = a.graph();
    let e0 = norm_edge(e0.0, e0.1);
    if e0.0 == e0.1 || e0.1 >= g.n() || g.has_edge(e0.0, e0.1) {
        return invalid(format!("stretched pair ({},{}) must be a non-edge", e0.0, e0.1));
    }
    let mut p = a.constraints();
    p.objective = unit(0, e0.0, e0.1);
    let probe = slater_probe(&p, tol)?;
    let margin = probe.margin.ok_or_else(|| Error::Infeasible("instance has no psd completion".into()))?;
    let scale = a.scale();
    let mats: Vec<Mat> = p.constraints.iter().map(|c| dense_single(&p, &c.entries)).collect();
    let cmat = dense_single(&p, &p.objective);
    // tiny positive margins can leave no Farkas certificate: use the dual then
    let farkas = if margin > super::facial::STRICT_MARGIN * scale {
        None
    } else {
        let fs = solve_facial(&p, tol)?;
        farkas_certificate(&p, Some(&fs.x), tol)?.map(|cert| (fs.x[0].clone(), cert.y))
    };
    let strict = farkas.is_none();
    let (x, y0) = match farkas {
        Some(v) => v,
        None => {
            let sol = solve(&p, tol)?;
            if sol.status != SdpStatus::Optimal && sol.primal_residual > 1e-6 * scale {
                return Err(Error::Numerical(format!("stretched-pair program ended with {:?}", sol.status)));
            }
            (sol.x[0].clone(), sol.y)
        }
    };
    let c0 = clipped_factor(&x)?;
    let b: Vec<f64> = p.constraints.iter().map(|c| c.rhs).collect();
    let (pts, y) = refine_kkt(&mats, &b, strict.then_some(&cmat), &[], &c0.points, &y0);
    let mut omega = if strict { -cmat.clone() } else { Mat::zeros(a.n(), a.n()) };
    for (m, yj) in mats.iter().zip(&y) {
        omega += m * *yj;
    }
    let nrm = max_abs(&omega);
    if nrm == 0.0 {
        return Err(Error::Numerical("zero stress from the stretched-pair program".into()));
    }
    let c = Configuration::new(pts);
    let stress = StressMatrix::new(omega / nrm, g.clone(), Some(e0))?;
    let xg = c.gram();
    Ok(Flattened { value: xg[(e0.0, e0.1)], x: xg, configuration: c, stress, margin, dual_route: strict })
}

#[derive(Clone, Debug)]
pub struct PinnedFlattened {
    /// p'_i = (p_i, 0) on V1 and (y_i, q_i) on V2.
    pub configuration: Configuration,
    /// Z = [[I_d, Y], [Yᵀ, X]].
    pub z: Mat,
    /// Dual slack on the Z index set (d basis rows, then V2).
    pub z_stress: Mat,
    /// Vertex-level stress, nonzero only in rows and columns of V2.
    pub stress: StressMatrix,
    pub free: Vec<usize>,
    pub d: usize,
}

impl PinnedFlattened {
    /// Residual of Σ_j w'_ij p'_j at each free vertex.
    pub fn equilibrium_residuals(&self) -> Vec<f64> {
        let r = &self.stress.matrix * &self.configuration.points;
        self.free.iter().map(|&i| r.row(i).norm()).collect()
    }
}

/// Second-stage program: vectors on V1 are pinned, vectors on V2 are free,
/// and ⟨p_s, p'_t⟩ is maximized for the stretch pair (s ∈ V1, t ∈ V2).
///
/// `pinned` has one row per vertex of V1 = V ∖ V2 in increasing order.
pub fn pinned_flatten(
    pinned: &Configuration,
    a: &PartialMatrix,
    free: &[usize],
    stretch: Edge,
    tol: f64,
) -> Result<PinnedFlattened> {
    let n = a.n();
    let g = a.graph();
    let mut v2: Vec<usize> = free.to_vec();
    v2.sort_unstable();
    v2.dedup();
    if v2.is_empty() {
        return invalid("nothing to solve: the free set is empty");
    }
    if v2.iter().any(|&v| v >= n) {
        return invalid("free vertex out of range");
    }
    let v1: Vec<usize> = (0..n).filter(|v| !v2.contains(v)).collect();
    if pinned.n() != v1.len() {
        return invalid(format!("expected {} pinned vectors, got {}", v1.len(), pinned.n()));
    }
    let (s, t) = if v2.contains(&stretch.1) { stretch } else { (stretch.1, stretch.0) };
    if !v1.contains(&s) || !v2.contains(&t) {
        return invalid("stretch pair must join V1 to V2");
    }
    if g.has_edge(s, t) {
        return invalid("stretch pair must be a non-edge");
    }
    let pos1 = |v: usize| v1.iter().position(|&x| x == v).unwrap();
    let pos2 = |v: usize| v2.iter().position(|&x| x == v).unwrap();
    let scale = a.scale();
    for (i, &vi) in v1.iter().enumerate() {
        for (j, &vj) in v1.iter().enumerate() {
            if let Some(val) = a.value(vi, vj) {
                let got = pinned.inner(i, j);
                if (got - val).abs() > tol.sqrt() * scale {
                    return invalid(format!("pinned vectors disagree with a at ({vi},{vj}): {got} vs {val}"));
                }
            }
        }
    }
    let d = pinned.dim();
    let m2 = v2.len();
    let mut p = SdpProblem::single(d + m2);
    for k in 0..d {
        for l in k..d {
            p.add_constraint(unit(0, k, l), if k == l { 1.0 } else { 0.0 });
        }
    }
    // constraint index → (kind, pair)
    let mut v1v2_edges: Vec<(usize, usize, usize)> = Vec::new();
    for (j, &vj) in v2.iter().enumerate() {
        p.add_constraint(unit(0, d + j, d + j), a.diag()[vj]);
        for (l, &vl) in v2.iter().enumerate().skip(j + 1) {
            if let Some(val) = a.value(vj, vl) {
                p.add_constraint(unit(0, d + j, d + l), val);
            }
        }
        for &vi in &v1 {
            if let Some(val) = a.value(vi, vj) {
                let pi = pinned.vector(pos1(vi));
                let e: Vec<Entry> = (0..d).filter(|&k| pi[k] != 0.0).map(|k| Entry::new(0, k, d + j, pi[k] / 2.0)).collect();
                v1v2_edges.push((p.m(), vi, vj));
                p.add_constraint(e, val);
            }
        }
    }
    let ps = pinned.vector(pos1(s));
    p.objective = (0..d).filter(|&k| ps[k] != 0.0).map(|k| Entry::new(0, k, d + pos2(t), ps[k] / 2.0)).collect();
    let probe = slater_probe(&p, tol)?;
    let margin = probe.margin.ok_or_else(|| Error::Infeasible("pinned program is infeasible".into()))?;
    let mats: Vec<Mat> = p.constraints.iter().map(|c| dense_single(&p, &c.entries)).collect();
    let cmat = dense_single(&p, &p.objective);
    let farkas = if margin > super::facial::STRICT_MARGIN * scale {
        None
    } else {
        let fs = solve_facial(&p, tol)?;
        farkas_certificate(&p, Some(&fs.x), tol)?.map(|cert| (fs.x[0].clone(), cert.y))
    };
    let with_obj = farkas.is_none();
    let (zsol, y0) = match farkas {
        Some(v) => v,
        None => {
            let sol = solve(&p, tol)?;
            (sol.x[0].clone(), sol.y)
        }
    };
    // p' from Z: y_j = Z[0..d, d+j], q from the Schur complement X − YᵀY
    let y = zsol.view((0, d), (d, m2)).clone_owned();
    let xb = zsol.view((d, d), (m2, m2)).clone_owned();
    let schur = crate::linalg::sym(&(&xb - y.transpose() * &y));
    let (vals, vecs) = crate::linalg::sym_eigen(&schur);
    let top = vals.first().copied().unwrap_or(0.0).max(1.0);
    let r = vals.iter().filter(|&&v| v > 1e-7 * top).count();
    let dim = d + r;
    let mut pts = Mat::zeros(n, dim);
    for (i, &vi) in v1.iter().enumerate() {
        for k in 0..d {
            pts[(vi, k)] = pinned.points[(i, k)];
        }
    }
    for (j, &vj) in v2.iter().enumerate() {
        for k in 0..d {
            pts[(vj, k)] = y[(k, j)];
        }
        for c in 0..r {
            pts[(vj, d + c)] = vecs[(j, c)] * vals[c].sqrt();
        }
    }
    // factor of Z: basis vectors then V2 vectors
    let mut f = Mat::zeros(d + m2, dim);
    for k in 0..d {
        f[(k, k)] = 1.0;
    }
    for (j, &vj) in v2.iter().enumerate() {
        f.set_row(d + j, &pts.row(vj));
    }
    let frozen: Vec<bool> = (0..d + m2).map(|k| k < d).collect();
    let b: Vec<f64> = p.constraints.iter().map(|c| c.rhs).collect();
    let (f, w) = refine_kkt(&mats, &b, with_obj.then_some(&cmat), &frozen, &f, &y0);
    let mut pts = pts;
    for (j, &vj) in v2.iter().enumerate() {
        pts.set_row(vj, &f.row(d + j));
    }
    let config = Configuration::new(pts);
    let mut zs = if with_obj { -cmat.clone() } else { Mat::zeros(d + m2, d + m2) };
    for (mk, wk) in mats.iter().zip(&w) {
        zs += mk * *wk;
    }
    let nrm = max_abs(&zs);
    // with the objective in the span of the constraints the only slack is 0
    if nrm == 0.0 || (with_obj && nrm <= 1e-7 * max_abs(&cmat)) {
        return Err(Error::Numerical("pinned stress vanished: the objective is constant on the feasible set".into()));
    }
    let zs = zs / nrm;
    let w: Vec<f64> = w.iter().map(|v| v / nrm).collect();
    // vertex-level stress rows on V2
    let mut om = Mat::zeros(n, n);
    for (j, &vj) in v2.iter().enumerate() {
        for (l, &vl) in v2.iter().enumerate() {
            om[(vj, vl)] = zs[(d + j, d + l)];
        }
    }
    for &(k, vi, vj) in &v1v2_edges {
        om[(vi, vj)] += w[k] / 2.0;
        om[(vj, vi)] += w[k] / 2.0;
    }
    if with_obj {
        let c = -0.5 / nrm;
        om[(s, t)] += c;
        om[(t, s)] += c;
    }
    let stress = StressMatrix::new(om, g.clone(), Some(norm_edge(s, t)))?;
    let mut z = Mat::zeros(d + m2, d + m2);
    z.copy_from(&(&f * f.transpose()));
    Ok(PinnedFlattened { configuration: config, z, z_stress: zs, stress, free: v2, d })
}

/// Full-space entries of Ω as an SDP objective (for diagnostics and dumps).
pub fn stress_entries(s: &StressMatrix) -> Vec<Entry> {
    entries_of(0, &s.matrix)
}
