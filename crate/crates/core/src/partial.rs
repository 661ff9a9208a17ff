//! Completion instances: values on the diagonal and on the edges of a graph.

use crate::completion::cycle::cycle_gd2_decide;
use crate::error::{invalid, Error, Result};
use crate::graph::{norm_edge, Edge, Graph};
use crate::linalg::{min_eigenvalue, Configuration, Mat};
use crate::sdp::{slater_probe, unit, SdpProblem};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

/// Values a_ii (i ∈ V) and a_ij (ij ∈ E).
#[derive(Clone, Debug, PartialEq)]
pub struct PartialMatrix {
    graph: Graph,
    diag: Vec<f64>,
    entries: BTreeMap<Edge, f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ValidationReport {
    FeasibleNecessary,
    ViolatedClique { clique: Vec<usize>, min_eigenvalue: f64 },
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        matches!(self, ValidationReport::FeasibleNecessary)
    }
}

impl PartialMatrix {
    pub fn new(graph: Graph, diag: Vec<f64>, entries: BTreeMap<Edge, f64>) -> Result<Self> {
        if diag.len() != graph.n() {
            return invalid(format!("expected {} diagonal values, got {}", graph.n(), diag.len()));
        }
        if let Some(d) = diag.iter().find(|d| !(**d >= 0.0) || !d.is_finite()) {
            return invalid(format!("diagonal value {d} is not a nonnegative number"));
        }
        let mut norm = BTreeMap::new();
        for (&(i, j), &v) in &entries {
            if !graph.has_edge(i, j) {
                return invalid(format!("value given for non-edge ({i},{j})"));
            }
            if !v.is_finite() {
                return invalid(format!("value for ({i},{j}) is not finite"));
            }
            norm.insert(norm_edge(i, j), v);
        }
        if let Some((i, j)) = graph.edges().find(|e| !norm.contains_key(e)) {
            return invalid(format!("missing value for edge ({i},{j})"));
        }
        Ok(PartialMatrix { graph, diag, entries: norm })
    }

    pub fn from_fn(graph: Graph, f: impl Fn(usize, usize) -> f64) -> Self {
        let diag = (0..graph.n()).map(|i| f(i, i)).collect();
        let entries = graph.edges().map(|(i, j)| ((i, j), f(i, j))).collect();
        PartialMatrix { graph, diag, entries }
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn entries(&self) -> &BTreeMap<Edge, f64> {
        &self.entries
    }

    pub fn value(&self, i: usize, j: usize) -> Option<f64> {
        if i == j {
            self.diag.get(i).copied()
        } else {
            self.entries.get(&norm_edge(i, j)).copied()
        }
    }

    /// All specified (i, j, value), diagonal first.
    pub fn specified(&self) -> Vec<(usize, usize, f64)> {
        let mut out: Vec<_> = self.diag.iter().enumerate().map(|(i, &v)| (i, i, v)).collect();
        out.extend(self.entries.iter().map(|(&(i, j), &v)| (i, j, v)));
        out
    }

    pub fn scale(&self) -> f64 {
        self.specified().iter().fold(1.0f64, |a, t| a.max(t.2.abs()))
    }

    /// Max-norm error of a full matrix on the specified entries.
    pub fn residual(&self, x: &Mat) -> f64 {
        self.specified().iter().fold(0.0, |a, &(i, j, v)| a.max((x[(i, j)] - v).abs()))
    }

    pub fn residual_config(&self, c: &Configuration) -> f64 {
        self.specified().iter().fold(0.0, |a, &(i, j, v)| a.max((c.inner(i, j) - v).abs()))
    }

    pub fn submatrix(&self, vs: &[usize]) -> Option<Mat> {
        let k = vs.len();
        let mut m = Mat::zeros(k, k);
        for a in 0..k {
            for b in 0..k {
                m[(a, b)] = self.value(vs[a], vs[b])?;
            }
        }
        Some(m)
    }

    /// Instance on the induced subgraph; local index k is `vs[k]`.
    pub fn restrict(&self, vs: &[usize]) -> PartialMatrix {
        let g = self.graph.induced(vs);
        PartialMatrix::from_fn(g, |a, b| self.value(vs[a], vs[b]).unwrap())
    }

    /// Instance on a supergraph `h` (same vertices), new pairs read from `x`.
    pub fn extend(&self, h: &Graph, x: &Mat) -> PartialMatrix {
        PartialMatrix::from_fn(h.clone(), |i, j| self.value(i, j).unwrap_or(x[(i, j)]))
    }

    /// Checks every maximal clique's specified submatrix for psd-ness.
    pub fn validate(&self, tol: f64) -> ValidationReport {
        let mut worst: Option<(Vec<usize>, f64)> = None;
        for c in self.graph.maximal_cliques() {
            let m = self.submatrix(&c).expect("cliques are fully specified");
            let l = min_eigenvalue(&m);
            if l < -tol && worst.as_ref().is_none_or(|w| l < w.1) {
                worst = Some((c, l));
            }
        }
        match worst {
            None => ValidationReport::FeasibleNecessary,
            Some((clique, min_eigenvalue)) => ValidationReport::ViolatedClique { clique, min_eigenvalue },
        }
    }

    /// The SDP feasibility system ⟨E_ij, X⟩ = a_ij over V ∪ E.
    pub fn constraints(&self) -> SdpProblem {
        let mut p = SdpProblem::single(self.n());
        for (i, j, v) in self.specified() {
            p.add_constraint(unit(0, i, j), v);
        }
        p
    }

    /// D^{-1/2} a D^{-1/2}; vertices with zero diagonal get zero rows.
    pub fn normalized(&self) -> (ElliptopeVector, Vec<f64>) {
        let s: Vec<f64> = self.diag.iter().map(|d| d.sqrt()).collect();
        let values = self
            .entries
            .iter()
            .map(|(&(i, j), &v)| {
                let d = s[i] * s[j];
                let w = if d > 0.0 { (v / d).clamp(-1.0, 1.0) } else { 0.0 };
                ((i, j), w)
            })
            .collect();
        (ElliptopeVector { graph: self.graph.clone(), values }, s)
    }
}

/// Extract the diagonal and edge entries of X.
pub fn project(x: &Mat, g: &Graph) -> Result<PartialMatrix> {
    if x.nrows() != g.n() || x.ncols() != g.n() {
        return invalid(format!("matrix is {}x{}, graph has {} vertices", x.nrows(), x.ncols(), g.n()));
    }
    Ok(PartialMatrix::from_fn(g.clone(), |i, j| 0.5 * (x[(i, j)] + x[(j, i)])))
}

/// The K222 instance with Gram vectors e1..e5 and (e1+e2)/√2: its only psd
/// completion has rank 5.
pub fn canonical_k222() -> PartialMatrix {
    let s = 0.5f64.sqrt();
    let mut p = Mat::zeros(6, 5);
    for i in 0..5 {
        p[(i, i)] = 1.0;
    }
    p[(5, 0)] = s;
    p[(5, 1)] = s;
    project(&(&p * p.transpose()), &crate::graph::named::k222()).expect("sizes match")
}

/// Edge values of a correlation-type instance (unit diagonal).
#[derive(Clone, Debug, PartialEq)]
pub struct ElliptopeVector {
    graph: Graph,
    values: BTreeMap<Edge, f64>,
}

impl ElliptopeVector {
    pub fn new(graph: Graph, values: BTreeMap<Edge, f64>) -> Result<Self> {
        if let Some((e, v)) = values.iter().find(|(_, v)| !(v.abs() <= 1.0)) {
            return invalid(format!("value {v} on {e:?} outside [-1,1]"));
        }
        let a = PartialMatrix::new(graph.clone(), vec![1.0; graph.n()], values)?;
        Ok(ElliptopeVector { graph, values: a.entries })
    }

    pub fn from_partial(a: &PartialMatrix) -> Result<Self> {
        if a.diag.iter().any(|&d| (d - 1.0).abs() > 1e-12) {
            return invalid("elliptope instances need a unit diagonal");
        }
        ElliptopeVector::new(a.graph.clone(), a.entries.clone())
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn values(&self) -> &BTreeMap<Edge, f64> {
        &self.values
    }

    pub fn value(&self, i: usize, j: usize) -> Option<f64> {
        self.values.get(&norm_edge(i, j)).copied()
    }

    pub fn to_partial(&self) -> PartialMatrix {
        PartialMatrix {
            graph: self.graph.clone(),
            diag: vec![1.0; self.graph.n()],
            entries: self.values.clone(),
        }
    }

    /// Angles arccos a_e along a circuit given as a vertex cycle.
    pub fn circuit_angles(&self, circuit: &[usize]) -> Vec<f64> {
        (0..circuit.len())
            .map(|k| {
                let (u, v) = (circuit[k], circuit[(k + 1) % circuit.len()]);
                self.value(u, v).unwrap().clamp(-1.0, 1.0).acos()
            })
            .collect()
    }

    /// First circuit (up to `max_len`) whose angles admit a planar
    /// representation within `delta`, if any.
    pub fn planar_circuit(&self, max_len: usize, delta: f64) -> Option<Vec<usize>> {
        self.graph
            .circuits(max_len)
            .into_iter()
            .find(|c| cycle_gd2_decide(&self.circuit_angles(c), delta).is_some())
    }
}

/// Circuits are checked up to this length.
pub const GENERIC_CIRCUIT_LEN: usize = 10;
/// Margin by which circuit angle sums must miss 2πℤ.
pub const GENERIC_MARGIN: f64 = 1e-9;

/// Margin t* of the Slater probe: the largest λ with a completion X ⪰ λI.
pub fn interior_margin(a: &PartialMatrix, tol: f64) -> Result<f64> {
    let probe = slater_probe(&a.constraints(), tol)?;
    probe.margin.ok_or_else(|| Error::Infeasible("no psd completion".into()))
}

/// Move `a` by at most `epsilon` (max norm) to a point whose circuits admit no
/// planar representation and which has a positive definite completion.
pub fn perturb_to_generic(a: &ElliptopeVector, epsilon: f64, seed: u64) -> Result<ElliptopeVector> {
    if !(epsilon > 0.0) {
        return invalid("epsilon must be positive");
    }
    let pm = a.to_partial();
    let circuits = a.graph.circuits(GENERIC_CIRCUIT_LEN);
    let is_generic = |v: &ElliptopeVector| {
        circuits
            .iter()
            .find(|c| cycle_gd2_decide(&v.circuit_angles(c), GENERIC_MARGIN).is_some())
            .cloned()
    };
    if is_generic(a).is_none() && interior_margin(&pm, 1e-9).is_ok_and(|t| t > 1e-7) {
        return Ok(a.clone());
    }
    let max_deg = (0..a.graph.n()).map(|v| a.graph.degree(v)).max().unwrap_or(0) as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut last_bad = Vec::new();
    for attempt in 0..50 {
        let s = epsilon / 2.0 / (1 + attempt / 10) as f64;
        let eta = s / (2.0 * (max_deg + 1.0));
        let values: BTreeMap<Edge, f64> = a
            .values
            .iter()
            .map(|(&e, &v)| (e, (1.0 - s) * v + eta * rng.gen_range(-1.0..1.0)))
            .collect();
        let cand = ElliptopeVector { graph: a.graph.clone(), values };
        if let Some(c) = is_generic(&cand) {
            last_bad = c;
            continue;
        }
        match interior_margin(&cand.to_partial(), 1e-9) {
            Ok(t) if t > 0.0 => return Ok(cand),
            _ => continue,
        }
    }
    Err(Error::Numerical(format!("no generic perturbation found; circuit {last_bad:?} stays planar")))
}
