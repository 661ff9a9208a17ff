//! Folding toolkit: stable-set folds, 2-node contraction, dimension bounds
//! and the search for a fold plan on a concrete configuration.

use super::RANK_TOL;
use crate::error::{invalid, Error, Result};
use crate::graph::{norm_edge, Graph};
use crate::linalg::{align, max_abs, numerical_rank, schur_complement, sym_eigen, Configuration, Mat, Vector};
use crate::sdp::StressMatrix;
use serde::{Deserialize, Serialize};

/// Fold plan: the stable set S is rotated vertex by vertex, the kept set
/// T = V∖S is covered by `pieces`, each of dimension ≤ target, which
/// overlap only in a common separator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FoldPlan {
    pub stable: Vec<usize>,
    pub kept: Vec<usize>,
    pub pieces: Vec<Vec<usize>>,
    pub target: usize,
}

impl FoldPlan {
    /// Single-piece plan.
    pub fn new(n: usize, stable: Vec<usize>, target: usize) -> Self {
        let kept: Vec<usize> = (0..n).filter(|v| !stable.contains(v)).collect();
        FoldPlan { stable, pieces: vec![kept.clone()], kept, target }
    }

    /// Graph on V whose edges must be realised inside pieces: the host edges
    /// among kept vertices plus a clique on each N(s), s ∈ S.
    fn piece_graph(&self, h: &Graph) -> Graph {
        let mut out = Graph::new(h.n());
        for (u, v) in h.edges() {
            if !self.stable.contains(&u) && !self.stable.contains(&v) {
                out.add_edge(u, v).expect("in range");
            }
        }
        for &s in &self.stable {
            let nb = h.neighbors(s);
            for (x, &u) in nb.iter().enumerate() {
                for &v in &nb[x + 1..] {
                    if !out.has_edge(u, v) {
                        out.add_edge(u, v).expect("in range");
                    }
                }
            }
        }
        out
    }

    /// Invariants: S stable, degrees ≤ target−1, pieces cover T, every
    /// required pair inside one piece, each piece of dimension ≤ target.
    pub fn check(&self, h: &Graph, c: &Configuration) -> Result<()> {
        if !h.is_stable(&self.stable) {
            return invalid(format!("{:?} is not stable", self.stable));
        }
        if let Some(&s) = self.stable.iter().find(|&&s| h.degree(s) + 1 > self.target) {
            return invalid(format!("vertex {s} has degree {} ≥ {}", h.degree(s), self.target));
        }
        let mut covered: Vec<usize> = self.pieces.concat();
        covered.sort_unstable();
        covered.dedup();
        if covered != self.kept {
            return invalid("pieces do not cover the kept set");
        }
        for (u, v) in self.piece_graph(h).edges() {
            if !self.pieces.iter().any(|p| p.contains(&u) && p.contains(&v)) {
                return invalid(format!("pair ({u},{v}) is split between pieces"));
            }
        }
        for p in &self.pieces {
            let r = subset_rank(c, p);
            if r > self.target {
                return invalid(format!("piece {p:?} has dimension {r} > {}", self.target));
            }
        }
        Ok(())
    }
}

pub fn subset_rank(c: &Configuration, vs: &[usize]) -> usize {
    if vs.is_empty() {
        return 0;
    }
    numerical_rank(&c.subset(vs).gram(), RANK_TOL)
}

/// Coordinates of the rows `vs` in an orthonormal basis of their span.
fn local_coords(c: &Configuration, vs: &[usize], k: usize) -> Configuration {
    let p = c.subset(vs).points;
    let m = p.transpose() * &p;
    let (vals, vecs) = sym_eigen(&m);
    let top = vals.first().copied().unwrap_or(0.0).max(1.0);
    let r = vals.iter().filter(|&&v| v > RANK_TOL * top).count().min(k);
    Configuration::new(p * vecs.columns(0, r)).with_dim(k)
}

/// A vector in R^k with prescribed inner products against `q_nb` (whose Gram
/// matrix matches `p_nb`) and prescribed norm.
fn place_vertex(p_s: &Vector, p_nb: &Mat, q_nb: &Mat, k: usize) -> Vector {
    let g = p_nb * p_nb.transpose();
    let b = p_nb * p_s;
    let pinv = g.clone().pseudo_inverse(1e-12 * max_abs(&g).max(1e-300)).expect("pseudo-inverse");
    let coef = &pinv * &b;
    let h2 = (p_s.norm_squared() - b.dot(&coef)).max(0.0);
    let mut q = q_nb.transpose() * &coef;
    if h2 > 0.0 {
        let span: Vec<Vector> = (0..q_nb.nrows()).map(|r| q_nb.row(r).transpose()).collect();
        let dirs = crate::linalg::complement_directions(&span, k, 1e-9);
        if let Some(u) = dirs.first() {
            q += u * h2.sqrt();
        }
    }
    q
}

/// Equivalent configuration in R^target following `plan`.
pub fn fold_stable_set(h: &Graph, c: &Configuration, plan: &FoldPlan) -> Result<Configuration> {
    plan.check(h, c)?;
    let k = plan.target;
    let n = c.n();
    let mut out = Mat::zeros(n, k);
    let mut placed = vec![false; n];
    for piece in &plan.pieces {
        let local = local_coords(c, piece, k);
        let shared: Vec<(usize, usize)> =
            piece.iter().enumerate().filter(|(_, &v)| placed[v]).map(|(x, &v)| (x, v)).collect();
        let moved = align(&local, &Configuration::new(out.clone()), &shared, 1e-6)?.with_dim(k);
        for (x, &v) in piece.iter().enumerate() {
            if !placed[v] {
                out.set_row(v, &moved.points.row(x));
                placed[v] = true;
            }
        }
    }
    for &s in &plan.stable {
        let nb = h.neighbors(s);
        let p_nb = c.subset(&nb).points;
        let q_nb = out.select_rows(&nb);
        let q = place_vertex(&c.vector(s), &p_nb, &q_nb, k);
        out.set_row(s, &q.transpose());
    }
    Ok(Configuration::new(out))
}

/// Contract a 2-node of the stressed graph: drop vertex i, join its two
/// stressed neighbours in the host and take the Schur complement of Ω.
pub fn contract_2node(
    h: &Graph,
    c: &Configuration,
    om: &StressMatrix,
    i: usize,
) -> Result<(Graph, Configuration, StressMatrix)> {
    let sg = om.stressed_graph();
    let nb = sg.neighbors(i);
    if nb.len() != 2 {
        return invalid(format!("vertex {i} has stressed degree {}", nb.len()));
    }
    let (i1, i2) = (nb[0], nb[1]);
    let tri = [norm_edge(i, i1), norm_edge(i, i2), norm_edge(i1, i2)];
    if sg.edge_count() == 3 && sg.edges().all(|e| tri.contains(&e)) {
        return invalid(format!("stressed graph is the triangle on N[{i}]"));
    }
    let shift = |x: usize| if x > i { x - 1 } else { x };
    let mut host = Graph::new(h.n() - 1);
    let add = |g: &mut Graph, u: usize, v: usize| {
        if u != i && v != i && !g.has_edge(shift(u), shift(v)) {
            g.add_edge(shift(u), shift(v)).expect("in range");
        }
    };
    for (u, v) in h.edges().chain(om.host.edges()).chain(om.stretched_pair) {
        add(&mut host, u, v);
    }
    add(&mut host, i1, i2);
    let omega = schur_complement(&om.matrix, i)?;
    if max_abs(&omega) <= 1e-12 * max_abs(&om.matrix) {
        return Err(Error::Numerical("contracted stress vanished".into()));
    }
    let keep: Vec<usize> = (0..c.n()).filter(|&v| v != i).collect();
    let stress = StressMatrix::new(omega, host.clone(), None)?;
    Ok((host, c.subset(&keep), stress))
}

/// n−1 when the stressed graph is a clique on its stressed vertices, else
/// n−2; checked against the configuration.
pub fn bound_dimension(om: &StressMatrix, c: &Configuration) -> Result<usize> {
    let n = om.n();
    let scale = c.gram().amax().max(1e-300).sqrt() * max_abs(&om.matrix);
    let eq = om.equilibrium_residuals(c).into_iter().fold(0.0, f64::max);
    if eq > 1e-6 * scale.max(1e-300) {
        return Err(Error::Numerical(format!("equilibrium violated by {eq:.3e}")));
    }
    let sv = om.stressed_vertices();
    let clique = om.stressed_graph().is_clique(&sv);
    let bound = if clique { n.saturating_sub(1) } else { n.saturating_sub(2) };
    let r = c.rank(RANK_TOL);
    if r > bound {
        return Err(Error::Numerical(format!("dimension {r} exceeds the stress bound {bound}")));
    }
    Ok(bound)
}

fn subsets_up_to(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for size in 1..=k.min(items.len()) {
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            out.push(idx.iter().map(|&x| items[x]).collect());
            let mut t = size;
            while t > 0 && idx[t - 1] == items.len() - size + t - 1 {
                t -= 1;
            }
            if t == 0 {
                break;
            }
            idx[t - 1] += 1;
            for u in t..size {
                idx[u] = idx[u - 1] + 1;
            }
        }
    }
    out
}

/// Search for a fold plan valid on `c`: stable sets among vertices of degree
/// ≤ k−1, largest first; for each, separators of the piece graph by
/// increasing size (the empty separator gives a single piece).
pub fn find_fold_plan(h: &Graph, c: &Configuration, k: usize) -> Option<FoldPlan> {
    let n = h.n();
    let mut candidates: Vec<Vec<usize>> = h
        .maximal_stable_sets()
        .into_iter()
        .map(|s| s.into_iter().filter(|&v| h.degree(v) < k).collect())
        .collect();
    candidates.push(vec![]);
    candidates.sort_by(|a: &Vec<usize>, b| b.len().cmp(&a.len()).then(a.cmp(b)));
    candidates.dedup();
    for stable in candidates {
        let base = FoldPlan::new(n, stable, k);
        let pg = base.piece_graph(h);
        let kept = base.kept.clone();
        if subset_rank(c, &kept) <= k {
            return Some(base);
        }
        for sep in subsets_up_to(&kept, k).into_iter().skip(1) {
            let mut allowed = vec![false; n];
            for &v in &kept {
                allowed[v] = !sep.contains(&v);
            }
            let comps = pg.components_within(&allowed);
            if comps.len() < 2 {
                continue;
            }
            let pieces: Vec<Vec<usize>> = comps
                .into_iter()
                .map(|mut p| {
                    p.extend(&sep);
                    p.sort_unstable();
                    p
                })
                .collect();
            if pieces.iter().all(|p| subset_rank(c, p) <= k) {
                return Some(FoldPlan { pieces, ..base });
            }
        }
    }
    None
}

/// Non-adjacent pairs whose vectors are parallel (dim⟨p_i,p_j⟩ = 1).
pub fn parallel_pairs(h: &Graph, c: &Configuration) -> Vec<(usize, usize)> {
    h.non_edges()
        .into_iter()
        .filter(|&(i, j)| {
            let nonzero = c.vector(i).norm() > 1e-9 && c.vector(j).norm() > 1e-9;
            nonzero && subset_rank(c, &[i, j]) == 1
        })
        .collect()
}

/// Graph with non-adjacent i, j identified (the merged vertex keeps the
/// smaller index, the larger one is removed).
pub fn identify(h: &Graph, i: usize, j: usize) -> Result<Graph> {
    let mut g = h.clone();
    g.add_edge(i, j)?;
    g.contract_edge((i, j))
}
