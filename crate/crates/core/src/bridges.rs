//! Distance bridge (covariance map on the suspension), the strong Arnold
//! check with its lower-bound instances, and the max-cut rank demo.

use crate::completion::pipeline::flatten_and_fold;
use crate::completion::factor::low_rank_factor_search;
use crate::error::{invalid, Error, Result};
use crate::graph::{classify_gram_dimension, norm_edge, Edge, GdBand, Graph};
use crate::linalg::{max_abs, numerical_rank, sym_eigen, Configuration, Mat};
use crate::partial::{project, ElliptopeVector, PartialMatrix};
use crate::sdp::{rank_reduce, solve, unit, Entry, SdpProblem};
use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Squared distances on the edges of a graph; `apex` marks the suspension
/// vertex when the instance lives on ∇G.
#[derive(Clone, Debug, PartialEq)]
pub struct EdmInstance {
    graph: Graph,
    distances: BTreeMap<Edge, f64>,
    apex: Option<usize>,
}

impl EdmInstance {
    pub fn new(graph: Graph, distances: BTreeMap<Edge, f64>, apex: Option<usize>) -> Result<Self> {
        let mut norm = BTreeMap::new();
        for (&(i, j), &d) in &distances {
            if !graph.has_edge(i, j) {
                return invalid(format!("distance given for non-edge ({i},{j})"));
            }
            if !(d >= 0.0) || !d.is_finite() {
                return invalid(format!("distance on ({i},{j}) must be a nonnegative number"));
            }
            norm.insert(norm_edge(i, j), d);
        }
        if let Some((i, j)) = graph.edges().find(|e| !norm.contains_key(e)) {
            return invalid(format!("missing distance for edge ({i},{j})"));
        }
        if let Some(a) = apex {
            if a >= graph.n() || graph.degree(a) + 1 != graph.n() {
                return invalid(format!("vertex {a} is not adjacent to all other vertices"));
            }
        }
        Ok(EdmInstance { graph, distances: norm, apex })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn distances(&self) -> &BTreeMap<Edge, f64> {
        &self.distances
    }

    pub fn distance(&self, i: usize, j: usize) -> Option<f64> {
        self.distances.get(&norm_edge(i, j)).copied()
    }

    pub fn apex(&self) -> Option<usize> {
        self.apex
    }

    pub fn scale(&self) -> f64 {
        self.distances.values().fold(1.0f64, |m, d| m.max(d.abs()))
    }

    /// Largest |‖u_i − u_j‖² − d_ij| over the edges.
    pub fn residual(&self, u: &Configuration) -> f64 {
        self.distances
            .iter()
            .map(|(&(i, j), &d)| ((u.vector(i) - u.vector(j)).norm_squared() - d).abs())
            .fold(0.0, f64::max)
    }
}

/// d_{0i} = a_ii, d_ij = a_ii + a_jj − 2a_ij on ∇G (apex last).
pub fn phi(a: &PartialMatrix) -> EdmInstance {
    let n = a.n();
    let graph = a.graph().suspension();
    let mut d = BTreeMap::new();
    for i in 0..n {
        d.insert((i, n), a.diag()[i]);
    }
    for (&(i, j), &v) in a.entries() {
        d.insert((i, j), a.diag()[i] + a.diag()[j] - 2.0 * v);
    }
    EdmInstance { graph, distances: d, apex: Some(n) }
}

/// Inverse of [`phi`]: a_ii = d_{0i}, a_ij = (d_{0i} + d_{0j} − d_ij)/2.
pub fn phi_inverse(d: &EdmInstance) -> Result<PartialMatrix> {
    let Some(apex) = d.apex else {
        return invalid("instance has no apex vertex");
    };
    let rest: Vec<usize> = (0..d.graph.n()).filter(|&v| v != apex).collect();
    let g = d.graph.induced(&rest);
    let diag: Vec<f64> = rest.iter().map(|&v| d.distance(v, apex).unwrap()).collect();
    let entries = g
        .edges()
        .map(|(i, j)| {
            let dij = d.distance(rest[i], rest[j]).unwrap();
            ((i, j), (diag[i] + diag[j] - dij) / 2.0)
        })
        .collect();
    PartialMatrix::new(g, diag, entries)
}

/// Gram vectors p_i become points u_i = p_i with the apex at the origin.
pub fn gram_to_euclidean(c: &Configuration) -> Configuration {
    Configuration::new(c.points.clone().insert_row(c.n(), 0.0))
}

/// Translate the apex to the origin and drop it.
pub fn euclidean_to_gram(u: &Configuration, apex: usize) -> Configuration {
    let o = u.points.row(apex).clone_owned();
    let mut p = u.points.clone();
    for r in 0..p.nrows() {
        let row = p.row(r) - &o;
        p.set_row(r, &row);
    }
    Configuration::new(p.remove_row(apex))
}

/// Append an apex with value 1 on its diagonal and 0 towards every vertex.
pub fn zero_extension(x: &ElliptopeVector) -> PartialMatrix {
    let a = x.to_partial();
    let n = a.n();
    PartialMatrix::from_fn(a.graph().suspension(), |i, j| {
        if i == n && j == n {
            1.0
        } else if i == n || j == n {
            0.0
        } else {
            a.value(i, j).unwrap()
        }
    })
}

fn distance_objective(d: &EdmInstance, u: &Mat) -> f64 {
    d.distances
        .iter()
        .map(|(&(i, j), &v)| {
            let r = (u.row(i) - u.row(j)).norm_squared() - v;
            r * r
        })
        .sum()
}

/// Levenberg–Marquardt on point coordinates for the squared distances.
pub fn distance_lm(d: &EdmInstance, u0: &Mat, max_iter: usize) -> (Mat, f64) {
    let (n, k) = u0.shape();
    let dim = n * k;
    let mut u = u0.clone();
    let mut f = distance_objective(d, &u);
    if dim == 0 {
        return (u, f);
    }
    let target = 1e-30 * d.scale() * d.scale();
    let mut lambda = 1e-3;
    let mut history = vec![f];
    for _ in 0..max_iter {
        if f <= target {
            break;
        }
        let mut jtj = Mat::zeros(dim, dim);
        let mut g = DVector::zeros(dim);
        for (&(i, j), &v) in &d.distances {
            let diff = u.row(i) - u.row(j);
            let r = diff.norm_squared() - v;
            let parts = [(i, 2.0), (j, -2.0)];
            for &(x, sx) in &parts {
                for c in 0..k {
                    g[x * k + c] += r * sx * diff[c];
                }
                for &(y, sy) in &parts {
                    for c in 0..k {
                        for e in 0..k {
                            jtj[(x * k + c, y * k + e)] += sx * sy * diff[c] * diff[e];
                        }
                    }
                }
            }
        }
        let mean = ((0..dim).map(|t| jtj[(t, t)]).sum::<f64>() / dim as f64).max(1e-12);
        let mut improved = false;
        for _ in 0..30 {
            let mut m = jtj.clone();
            for t in 0..dim {
                m[(t, t)] += lambda * mean;
            }
            let Some(ch) = m.cholesky() else {
                lambda *= 10.0;
                continue;
            };
            let step = ch.solve(&(-&g));
            let q = &u + Mat::from_row_slice(n, k, step.as_slice());
            let fq = distance_objective(d, &q);
            if fq < f {
                u = q;
                f = fq;
                lambda = (lambda / 3.0).max(1e-15);
                improved = true;
                break;
            }
            lambda *= 4.0;
        }
        if !improved {
            break;
        }
        history.push(f);
        let h = history.len();
        if h > 25 && f > 1e-18 && f > 0.999 * history[h - 25] {
            break;
        }
    }
    (u, f)
}

/// Points in R^dim realizing `d`, by restarted local search. With an apex
/// the Gram route on the covariance instance is used and transported back.
pub fn realize_edm(d: &EdmInstance, dim: usize, restarts: usize, seed: u64) -> Option<Configuration> {
    let n = d.graph.n();
    if n == 0 {
        return Some(Configuration::new(Mat::zeros(0, dim)));
    }
    let accept = |u: &Configuration| d.residual(u) <= 1e-9 * d.scale();
    if dim == 0 {
        let u = Configuration::new(Mat::zeros(n, 0));
        return accept(&u).then_some(u);
    }
    if let Some(apex) = d.apex {
        let a = phi_inverse(d).ok()?;
        if let Some(r) = low_rank_factor_search(&a, dim, restarts, seed, None) {
            let u = Configuration::new(r.configuration.with_dim(dim).points.insert_row(apex, 0.0));
            if accept(&u) {
                return Some(u);
            }
        }
        return None;
    }
    let s = (d.distances.values().sum::<f64>() / d.distances.len().max(1) as f64).max(1e-12).sqrt();
    for r in 0..restarts.max(1) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (r as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let u0 = Mat::from_fn(n, dim, |_, _| rng.gen_range(-s..s));
        let (u, _) = distance_lm(d, &u0, 400);
        let u = Configuration::new(u);
        if accept(&u) {
            return Some(u);
        }
    }
    None
}

/// Smallest dimension ≤ max_dim with a realization found by [`realize_edm`].
pub fn ed_oracle(d: &EdmInstance, max_dim: usize, restarts: usize, seed: u64) -> Option<usize> {
    (0..=max_dim).find(|&k| realize_edm(d, k, restarts, seed).is_some())
}

#[derive(Clone, Debug, PartialEq)]
pub enum SapResult {
    Holds,
    /// Nonzero symmetric X, zero on V ∪ E, with MX ≈ 0.
    Fails { witness: Mat },
}

impl SapResult {
    pub fn holds(&self) -> bool {
        matches!(self, SapResult::Holds)
    }
}

/// Matrix of X ↦ vec(MX) on symmetric X supported on the non-edges.
pub fn sap_operator(m: &Mat, g: &Graph) -> (Mat, Vec<Edge>) {
    let n = g.n();
    let free = g.non_edges();
    let mut op = Mat::zeros(n * n, free.len());
    for (c, &(i, j)) in free.iter().enumerate() {
        // M (E_ij + E_ji): column j gets M[:,i], column i gets M[:,j]
        for r in 0..n {
            op[(r * n + j, c)] += m[(r, i)];
            op[(r * n + i, c)] += m[(r, j)];
        }
    }
    (op, free)
}

/// Strong Arnold property of M with respect to g, via the singular values of
/// the assembled operator (below tol·σ_max counts as zero).
pub fn check_strong_arnold(m: &Mat, g: &Graph, tol: f64) -> Result<SapResult> {
    let n = g.n();
    if m.shape() != (n, n) {
        return invalid(format!("matrix is {:?}, graph has {n} vertices", m.shape()));
    }
    let scale = max_abs(m).max(1.0);
    for i in 0..n {
        for j in i + 1..n {
            if (m[(i, j)] - m[(j, i)]).abs() > 1e-12 * scale {
                return invalid("matrix is not symmetric");
            }
            if !g.has_edge(i, j) && m[(i, j)].abs() > 1e-12 * scale {
                return invalid(format!("entry ({i},{j}) is nonzero on a non-edge"));
            }
        }
    }
    let (op, free) = sap_operator(m, g);
    if free.is_empty() {
        return Ok(SapResult::Holds);
    }
    // n² rows ≥ |free| columns, so the thin SVD sees every right singular vector
    let svd = op.svd(false, true);
    let vt = svd.v_t.unwrap();
    let smax = svd.singular_values.max();
    let r = svd.singular_values.imin();
    let best = (svd.singular_values[r] <= tol * smax || smax == 0.0).then(|| vt.row(r).transpose());
    Ok(match best {
        None => SapResult::Holds,
        Some(x) => {
            let mut w = Mat::zeros(n, n);
            for (c, &(i, j)) in free.iter().enumerate() {
                w[(i, j)] = x[c];
                w[(j, i)] = x[c];
            }
            SapResult::Fails { witness: w }
        }
    })
}

/// Instance certifying gd(g) ≥ corank(M): the projection of the projector
/// onto ker M. Returns it with the corank.
pub fn nu_lower_bound_instance(m: &Mat, g: &Graph, tol: f64) -> Result<(PartialMatrix, usize)> {
    if let SapResult::Fails { .. } = check_strong_arnold(m, g, tol)? {
        return invalid("matrix fails the strong Arnold property");
    }
    let (vals, vecs) = sym_eigen(m);
    if vals.last().is_some_and(|&v| v < -1e-9 * max_abs(m).max(1.0)) {
        return invalid("matrix is not positive semidefinite");
    }
    let top = vals.first().copied().unwrap_or(0.0).abs().max(1.0);
    let kernel: Vec<usize> = (0..vals.len()).filter(|&i| vals[i].abs() <= 1e-9 * top).collect();
    let n = g.n();
    let mut x = Mat::zeros(n, n);
    for &i in &kernel {
        x += vecs.column(i) * vecs.column(i).transpose();
    }
    Ok((project(&x, g)?, kernel.len()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaxcutReport {
    pub sdp_value: f64,
    /// Rank of the interior-point optimum.
    pub solver_rank: usize,
    pub reduced_rank: usize,
    pub gd_band: GdBand,
    /// Optimal X of rank `reduced_rank`.
    pub solution: Vec<Vec<f64>>,
    /// "face" when rank reduction alone reached the band, "completion"
    /// when the projection had to be re-completed at the band rank.
    pub route: String,
}

/// Laplacian of g.
pub fn laplacian(g: &Graph) -> Mat {
    let n = g.n();
    let mut l = Mat::zeros(n, n);
    for (i, j) in g.edges() {
        l[(i, i)] += 1.0;
        l[(j, j)] += 1.0;
        l[(i, j)] -= 1.0;
        l[(j, i)] -= 1.0;
    }
    l
}

/// max ¼⟨L, X⟩ over correlation matrices; the optimum is moved to low rank
/// along the optimal face and, if that stops above the Gram band, the
/// projection onto the edges is completed again at the band rank (same
/// objective, since L lives on V ∪ E).
pub fn maxcut_demo(g: &Graph, tol: f64) -> Result<MaxcutReport> {
    let n = g.n();
    if n == 0 {
        return invalid("empty graph");
    }
    let l = laplacian(g);
    let mut p = SdpProblem::single(n);
    for (i, j) in g.edges() {
        p.objective.extend(unit(0, i, j).into_iter().map(|e| Entry { v: -0.5 * e.v, ..e }));
    }
    for i in 0..n {
        if g.degree(i) > 0 {
            p.objective.push(Entry::new(0, i, i, 0.25 * g.degree(i) as f64));
        }
        p.add_constraint(unit(0, i, i), 1.0);
    }
    let sol = solve(&p, 1e-10)?;
    let value = 0.25 * (&l * &sol.x[0]).trace();
    // optimal face: objective pinned to its value
    let mut face = p.clone();
    face.add_constraint(p.objective.clone(), value);
    let reduced = rank_reduce(&face, &sol.x, 1e-9);
    let x = &reduced[0];
    let band = classify_gram_dimension(g);
    let solver_rank = numerical_rank(&sol.x[0], tol);
    let mut rank = numerical_rank(x, tol);
    let mut out = x.clone();
    let mut route = "face".to_string();
    if let GdBand::AtMost(k) = band {
        if rank > k {
            let a = project(x, g)?;
            let r = flatten_and_fold(&a, k, 0)?;
            out = r.configuration.gram();
            rank = r.rank;
            route = "completion".to_string();
        }
        if rank > k {
            return Err(Error::Numerical(format!("optimal rank {rank} above the band {k}")));
        }
    }
    Ok(MaxcutReport {
        sdp_value: 0.25 * (&l * &out).trace(),
        solver_rank,
        reduced_rank: rank,
        gd_band: band,
        solution: out.row_iter().map(|r| r.iter().copied().collect()).collect(),
        route,
    })
}
