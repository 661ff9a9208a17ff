//! Chordal completion, clique-sum gluing and the tree-decomposition route.

use super::{CompletionResult, TrailStep, RANK_TOL};
use crate::error::{Error, Result};
use crate::graph::{chordal_structure, Graph, TreeDecomposition};
use crate::linalg::{align, gram_factor, numerical_rank, sym_eigen, Configuration, Mat};
use crate::partial::{PartialMatrix, ValidationReport};
use crate::sdp::{solve, SdpStatus};
use std::collections::VecDeque;

/// Factor of a clique block; tiny negative eigenvalues are clipped.
fn block_factor(x: &Mat, tol: f64) -> Result<Configuration> {
    match gram_factor(x, RANK_TOL) {
        Ok(c) => Ok(c),
        Err(_) => {
            let (vals, vecs) = sym_eigen(x);
            let lmin = vals.last().copied().unwrap_or(0.0);
            if lmin < -tol.max(1e-12) * vals[0].abs().max(1.0) * 10.0 {
                return Err(Error::Infeasible(format!("clique block has eigenvalue {lmin:.3e}")));
            }
            let d = nalgebra::DVector::from_iterator(vals.len(), vals.iter().map(|v| v.max(0.0)));
            gram_factor(&(&vecs * Mat::from_diagonal(&d) * vecs.transpose()), RANK_TOL)
        }
    }
}

/// Place clique factors one at a time in breadth-first order over `tree`,
/// aligning each on the vertices already placed.
fn glue_cliques(
    n: usize,
    cliques: &[Vec<usize>],
    tree: &[(usize, usize)],
    block: impl Fn(&[usize]) -> Result<Mat>,
    tol: f64,
) -> Result<(Configuration, usize)> {
    let mut adj = vec![Vec::new(); cliques.len()];
    for &(a, b) in tree {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut placed = vec![false; n];
    let mut cur = Mat::zeros(n, 0);
    let mut seen = vec![false; cliques.len()];
    let mut rank = 0;
    for root in 0..cliques.len() {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(c) = queue.pop_front() {
            let verts = &cliques[c];
            let f = block_factor(&block(verts)?, tol)?;
            rank = rank.max(f.dim());
            let shared: Vec<(usize, usize)> =
                verts.iter().enumerate().filter(|(_, &v)| placed[v]).map(|(k, &v)| (k, v)).collect();
            let moved = align(&f, &Configuration::new(cur.clone()), &shared, tol.max(1e-9))?;
            let d = moved.dim().max(cur.ncols());
            cur = cur.resize_horizontally(d, 0.0);
            let moved = moved.with_dim(d);
            for (k, &v) in verts.iter().enumerate() {
                if !placed[v] {
                    cur.set_row(v, &moved.points.row(k));
                    placed[v] = true;
                }
            }
            for &nb in &adj[c] {
                if !seen[nb] {
                    seen[nb] = true;
                    queue.push_back(nb);
                }
            }
        }
    }
    Ok((Configuration::new(cur), rank))
}

/// Minimum-rank completion of a chordal instance: the largest rank of a
/// clique block, reached by gluing clique factors along the clique tree.
pub fn complete_chordal(a: &PartialMatrix, tol: f64) -> Result<CompletionResult> {
    let cs = chordal_structure(a.graph())
        .ok_or_else(|| Error::InvalidInput("graph is not chordal".into()))?;
    if let ValidationReport::ViolatedClique { clique, min_eigenvalue } = a.validate(tol) {
        return Err(Error::Infeasible(format!(
            "clique {clique:?} has min eigenvalue {min_eigenvalue:.3e}"
        )));
    }
    let (c, rank) = glue_cliques(
        a.n(),
        &cs.cliques,
        &cs.tree_edges,
        |vs| a.submatrix(vs).ok_or_else(|| Error::InvalidInput("clique not fully specified".into())),
        tol,
    )?;
    let trail = vec![TrailStep::new(
        "chordal",
        format!("{} cliques glued along the clique tree, max clique rank {rank}", cs.cliques.len()),
    )];
    Ok(CompletionResult::from_configuration(a, c, trail))
}

/// Union of two configurations agreeing on a shared clique.
///
/// `v1`, `v2` list the host vertices of the rows of `c1`, `c2`. Returns the
/// sorted union of vertices and its configuration; `c2` is moved onto `c1`.
pub fn glue_clique_sum(
    v1: &[usize],
    c1: &Configuration,
    v2: &[usize],
    c2: &Configuration,
    tol: f64,
) -> Result<(Vec<usize>, Configuration)> {
    let c1 = c1.compress(RANK_TOL);
    let c2 = c2.compress(RANK_TOL);
    let shared: Vec<(usize, usize)> = v2
        .iter()
        .enumerate()
        .filter_map(|(k2, u)| v1.iter().position(|w| w == u).map(|k1| (k2, k1)))
        .collect();
    let moved = align(&c2, &c1, &shared, tol)?;
    let d = moved.dim().max(c1.dim());
    let (c1, moved) = (c1.with_dim(d), moved.with_dim(d));
    let mut verts: Vec<usize> = v1.iter().chain(v2).copied().collect();
    verts.sort_unstable();
    verts.dedup();
    let mut pts = Mat::zeros(verts.len(), d);
    for (k, v) in verts.iter().enumerate() {
        if let Some(k1) = v1.iter().position(|w| w == v) {
            pts.set_row(k, &c1.points.row(k1));
        } else {
            let k2 = v2.iter().position(|w| w == v).unwrap();
            pts.set_row(k, &moved.points.row(k2));
        }
    }
    Ok((verts, Configuration::new(pts)))
}

/// Some psd completion of `a`, near the analytic center of the feasible set.
pub(crate) fn central_completion(a: &PartialMatrix, tol: f64) -> Result<Mat> {
    let p = a.constraints();
    let sol = solve(&p, tol)?;
    match sol.status {
        SdpStatus::Optimal => Ok(sol.x[0].clone()),
        SdpStatus::InfeasibleCertificate => Err(Error::Infeasible("no psd completion".into())),
        _ if sol.primal_residual <= 1e-6 * a.scale() => Ok(sol.x[0].clone()),
        s => Err(Error::Numerical(format!("completion program ended with {s:?}"))),
    }
}

/// Completion of rank ≤ width+1: fill each bag from a central completion,
/// then glue the bag factors along the decomposition tree.
pub fn complete_treewidth(a: &PartialMatrix, td: &TreeDecomposition, tol: f64) -> Result<CompletionResult> {
    complete_treewidth_from(a, td, tol, None)
}

/// As `complete_treewidth`, taking in-bag values from `known` when given.
pub(crate) fn complete_treewidth_from(
    a: &PartialMatrix,
    td: &TreeDecomposition,
    tol: f64,
    known: Option<&Mat>,
) -> Result<CompletionResult> {
    if !td.verify(a.graph()) {
        return Err(Error::InvalidInput("tree decomposition does not cover the graph".into()));
    }
    if let ValidationReport::ViolatedClique { clique, min_eigenvalue } = a.validate(tol) {
        return Err(Error::Infeasible(format!(
            "clique {clique:?} has min eigenvalue {min_eigenvalue:.3e}"
        )));
    }
    let needs_fill = td.bags.iter().any(|b| !a.graph().is_clique(b));
    let x = match known {
        Some(x) => x.clone(),
        None if needs_fill => central_completion(a, 1e-10)?,
        None => Mat::zeros(a.n(), a.n()),
    };
    let value = |i: usize, j: usize| a.value(i, j).unwrap_or(x[(i, j)]);
    let (c, rank) = glue_cliques(
        a.n(),
        &td.bags,
        &td.tree_edges,
        |vs| Ok(Mat::from_fn(vs.len(), vs.len(), |r, s| value(vs[r], vs[s]))),
        tol.max(1e-8),
    )?;
    let trail = vec![TrailStep::new(
        "treewidth",
        format!("{} bags of width {} glued, max bag rank {rank}", td.bags.len(), td.width),
    )];
    let out = CompletionResult::from_configuration(a, c, trail);
    debug_assert!(out.rank <= td.width + 1);
    Ok(out)
}

/// Fill-in graph of a decomposition: every bag made a clique.
pub fn fill_graph(g: &Graph, td: &TreeDecomposition) -> Graph {
    let mut h = g.clone();
    for b in &td.bags {
        for (x, &u) in b.iter().enumerate() {
            for &v in &b[x + 1..] {
                if !h.has_edge(u, v) {
                    h.add_edge(u, v).expect("bag vertices in range");
                }
            }
        }
    }
    h
}

/// Exact rank of the largest clique block (what `complete_chordal` reaches).
pub fn max_clique_rank(a: &PartialMatrix, tol: f64) -> usize {
    a.graph()
        .maximal_cliques()
        .iter()
        .filter_map(|c| a.submatrix(c))
        .map(|m| numerical_rank(&m, tol))
        .max()
        .unwrap_or(0)
}
