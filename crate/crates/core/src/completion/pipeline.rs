//! Flatten-and-fold: split along clique sums, complete each component by the
//! cheapest certified route, fall back to factor search, glue.

use super::chordal::{central_completion, complete_chordal, complete_treewidth_from, glue_clique_sum};
use super::factor::{levenberg_marquardt, low_rank_factor_search, truncate};
use super::fold::{
    bound_dimension, contract_2node, find_fold_plan, fold_stable_set, identify, parallel_pairs, subset_rank,
};
use super::{CompletionResult, TrailStep, RANK_TOL};
use crate::error::{invalid, Error, Result};
use crate::graph::named::{C5XC2_STRETCH, V8_STRETCH};
use crate::graph::{
    chordal_structure, classify_gram_dimension, clique_sum_split, norm_edge, treewidth_at_most, ComponentKind, Edge,
    Graph,
};
use crate::linalg::{gram_factor, sym_eigen, Configuration, Mat};
use crate::partial::{perturb_to_generic, project, PartialMatrix, ValidationReport};
use crate::sdp::{flatten, pinned_flatten, StressMatrix};
use std::collections::VecDeque;

#[derive(Clone, Copy, Debug)]
pub struct PipelineOptions {
    /// Restarts of the fallback factor search.
    pub restarts: usize,
    /// Toolkit steps per component before falling back.
    pub step_budget: usize,
    pub sdp_tol: f64,
    /// Nesting depth for the parallel-vector merge.
    pub max_depth: usize,
    /// Accepted residual (relative to the instance scale).
    pub residual_tol: f64,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions { restarts: 100, step_budget: 50, sdp_tol: 1e-9, max_depth: 2, residual_tol: 1e-7 }
    }
}

pub fn flatten_and_fold(a: &PartialMatrix, target_k: usize, seed: u64) -> Result<CompletionResult> {
    flatten_and_fold_with(a, target_k, seed, &PipelineOptions::default())
}

pub fn flatten_and_fold_with(
    a: &PartialMatrix,
    target_k: usize,
    seed: u64,
    opts: &PipelineOptions,
) -> Result<CompletionResult> {
    if target_k == 0 {
        return invalid("target rank must be positive");
    }
    if let ValidationReport::ViolatedClique { clique, min_eigenvalue } = a.validate(1e-9) {
        return Err(Error::Infeasible(format!("clique {clique:?} has min eigenvalue {min_eigenvalue:.3e}")));
    }
    let band = classify_gram_dimension(a.graph());
    let mut trail = vec![TrailStep::new("classify", format!("gd {} , target {target_k}", band.describe()))];
    let mut run = Run { opts, seed };
    let c = run.complete_graph(a, target_k, None, 0, &mut trail)?;
    let mut res = CompletionResult::from_configuration(a, c, trail);
    if res.rank > target_k || res.residual > opts.residual_tol * a.scale() {
        let start = truncate(&res.configuration, target_k);
        let (p, _) = levenberg_marquardt(a, &start, &[], 200);
        let polished = Configuration::new(p);
        if a.residual_config(&polished) < res.residual || res.rank > target_k {
            let mut trail = res.trail;
            trail.push(TrailStep::new(
                "polish",
                format!("rank-{target_k} refinement, residual {:.3e}", a.residual_config(&polished)),
            ));
            res = CompletionResult::from_configuration(a, polished, trail);
        }
    }
    if res.rank > target_k {
        return Err(Error::NotFound { k: target_k });
    }
    Ok(res)
}

struct Run<'a> {
    opts: &'a PipelineOptions,
    seed: u64,
}

fn max_eq(s: &StressMatrix, c: &Configuration) -> f64 {
    s.equilibrium_residuals(c).into_iter().fold(0.0, f64::max)
}

impl Run<'_> {
    fn next_seed(&mut self) -> u64 {
        self.seed = self.seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        self.seed
    }

    fn accept(&self, a: &PartialMatrix, c: &Configuration) -> bool {
        a.residual_config(c) <= self.opts.residual_tol * a.scale()
    }

    fn complete_graph(
        &mut self,
        a: &PartialMatrix,
        k: usize,
        known: Option<&Mat>,
        depth: usize,
        trail: &mut Vec<TrailStep>,
    ) -> Result<Configuration> {
        let g = a.graph();
        let split = clique_sum_split(g);
        if split.components.len() <= 1 {
            let kind = split.components.first().map_or(ComponentKind::TreewidthAtMost3, |c| c.kind);
            let map = split.components.first().and_then(|c| c.template_map.clone());
            return self.complete_component(a, kind, map.as_deref(), k, known, depth, trail);
        }
        trail.push(TrailStep::new(
            "split",
            format!(
                "{} components, separators {:?}",
                split.components.len(),
                split.separators.iter().map(|s| s.2.clone()).collect::<Vec<_>>()
            ),
        ));
        let x = match known {
            Some(x) => x.clone(),
            None if !split.virtual_pairs(g).is_empty() => central_completion(a, 1e-10)?,
            None => Mat::zeros(a.n(), a.n()),
        };
        let mut parts: Vec<Configuration> = Vec::new();
        for (idx, comp) in split.components.iter().enumerate() {
            let vs = &comp.vertices;
            let local = PartialMatrix::from_fn(comp.graph.clone(), |i, j| {
                a.value(vs[i], vs[j]).unwrap_or(x[(vs[i], vs[j])])
            });
            let local_known = known.map(|x| x.select_rows(vs).select_columns(vs));
            trail.push(TrailStep::new("component", format!("#{idx} on {:?}, {:?}", vs, comp.kind)));
            let c = self.complete_component(
                &local,
                comp.kind,
                comp.template_map.as_deref(),
                k,
                local_known.as_ref(),
                depth,
                trail,
            )?;
            parts.push(c);
        }
        // glue in breadth-first order over the component tree
        let m = split.components.len();
        let mut adj = vec![Vec::new(); m];
        for (x, y, _) in &split.separators {
            adj[*x].push(*y);
            adj[*y].push(*x);
        }
        let mut seen = vec![false; m];
        let mut verts: Vec<usize> = Vec::new();
        let mut conf = Configuration::new(Mat::zeros(0, 0));
        for root in 0..m {
            if seen[root] {
                continue;
            }
            seen[root] = true;
            let mut queue = VecDeque::from([root]);
            while let Some(ci) = queue.pop_front() {
                let (v2, c2) = (&split.components[ci].vertices, &parts[ci]);
                let (vn, cn) = glue_clique_sum(&verts, &conf, v2, c2, 1e-6)?;
                verts = vn;
                conf = cn;
                for &nb in &adj[ci] {
                    if !seen[nb] {
                        seen[nb] = true;
                        queue.push_back(nb);
                    }
                }
            }
        }
        trail.push(TrailStep::new("align", format!("{m} components glued along shared cliques")));
        debug_assert_eq!(verts, (0..a.n()).collect::<Vec<_>>());
        Ok(conf)
    }

    #[allow(clippy::too_many_arguments)]
    fn complete_component(
        &mut self,
        a: &PartialMatrix,
        kind: ComponentKind,
        template_map: Option<&[usize]>,
        k: usize,
        known: Option<&Mat>,
        depth: usize,
        trail: &mut Vec<TrailStep>,
    ) -> Result<Configuration> {
        let g = a.graph();
        if g.n() == 0 {
            return Ok(Configuration::new(Mat::zeros(0, 0)));
        }
        if chordal_structure(g).is_some() {
            let r = complete_chordal(a, 1e-9)?;
            if r.rank <= k {
                trail.extend(r.trail);
                return Ok(r.configuration);
            }
            return Err(Error::NotFound { k });
        }
        if let Some(td) = treewidth_at_most(g, k - 1) {
            if let Ok(r) = complete_treewidth_from(a, &td, 1e-9, known) {
                if r.rank <= k && self.accept(a, &r.configuration) {
                    trail.extend(r.trail);
                    return Ok(r.configuration);
                }
            }
        }
        let mut warm = None;
        let pair = match (kind, template_map) {
            (ComponentKind::V8Type, Some(m)) => transport(m, V8_STRETCH),
            (ComponentKind::C5xC2Type, Some(m)) => transport(m, C5XC2_STRETCH),
            _ => None,
        };
        if let Some(e0) = pair {
            let mut budget = self.opts.step_budget;
            match self.toolkit(a, k, e0, depth, &mut budget, trail) {
                Ok((Some(c), _)) => return Ok(c),
                Ok((None, w)) => warm = Some(w),
                Err(e) => trail.push(TrailStep::new("flatten", format!("toolkit stopped: {e}"))),
            }
            // the same toolkit on a nearby generic instance gives a warm start
            if let Some(c) = self.perturbed_attempt(a, k, e0, depth, trail) {
                warm = Some(c);
            }
        }
        self.fallback(a, k, warm, trail)
    }

    fn perturbed_attempt(
        &mut self,
        a: &PartialMatrix,
        k: usize,
        e0: Edge,
        depth: usize,
        trail: &mut Vec<TrailStep>,
    ) -> Option<Configuration> {
        if a.diag().iter().any(|&d| d <= 0.0) {
            return None;
        }
        let (ev, s) = a.normalized();
        let pert = perturb_to_generic(&ev, 1e-4, self.next_seed()).ok()?;
        let pa = pert.to_partial();
        let b = PartialMatrix::from_fn(a.graph().clone(), |i, j| pa.value(i, j).unwrap() * s[i] * s[j]);
        let mut sub = Vec::new();
        let mut budget = self.opts.step_budget;
        let (c, _) = self.toolkit(&b, k, e0, depth, &mut budget, &mut sub).ok()?;
        let c = c?;
        trail.push(TrailStep::new(
            "perturb",
            format!(
                "toolkit certified rank {k} on a generic instance within 1e-4; residual on the input {:.3e}",
                a.residual_config(&c)
            ),
        ));
        Some(c)
    }

    fn fallback(
        &mut self,
        a: &PartialMatrix,
        k: usize,
        warm: Option<Configuration>,
        trail: &mut Vec<TrailStep>,
    ) -> Result<Configuration> {
        let warm = match warm {
            Some(w) => w,
            None => match central_completion(a, 1e-10) {
                Ok(x) => clipped_factor(&x)?,
                Err(Error::Infeasible(m)) => return Err(Error::Infeasible(m)),
                Err(_) => Configuration::new(Mat::zeros(a.n(), k)),
            },
        };
        let seed = self.next_seed();
        match low_rank_factor_search(a, k, self.opts.restarts, seed, Some(&warm)) {
            Some(r) => {
                trail.push(TrailStep::new("fallback", r.trail[0].detail.clone()));
                Ok(r.configuration)
            }
            None => {
                trail.push(TrailStep::new(
                    "fallback",
                    format!("no rank-{k} factor after {} restarts", self.opts.restarts),
                ));
                Err(Error::NotFound { k })
            }
        }
    }

    /// Flatten along e0 and try the fold routes; returns the flattened
    /// configuration as a warm start when none applies.
    fn toolkit(
        &mut self,
        a: &PartialMatrix,
        k: usize,
        e0: Edge,
        depth: usize,
        budget: &mut usize,
        trail: &mut Vec<TrailStep>,
    ) -> Result<(Option<Configuration>, Configuration)> {
        let g = a.graph();
        let n = g.n();
        let fl = flatten(a, e0, self.opts.sdp_tol)?;
        let p = fl.configuration.clone();
        trail.push(
            TrailStep::new(
                "flatten",
                format!(
                    "stretched pair {e0:?}: value {:.6}, rank {}, stress rank {}, {} route, equilibrium {:.1e}",
                    fl.value,
                    p.rank(RANK_TOL),
                    fl.stress.rank(RANK_TOL),
                    if fl.dual_route { "dual" } else { "Farkas" },
                    max_eq(&fl.stress, &p),
                ),
            )
            .with_stress(&fl.stress.matrix),
        );
        let mut ghat = g.clone();
        ghat.add_edge(e0.0, e0.1)?;
        stress_certificates(&ghat, &p, &fl.stress, budget, trail);
        if let Some(c) = self.fold_or_merge(a, &p, k, depth, budget, trail)? {
            return Ok((Some(c), p));
        }
        let stressed = fl.stress.stressed_vertices();
        let zero: Vec<usize> = (0..n).filter(|v| !stressed.contains(v)).collect();
        if !zero.is_empty() && zero.len() < n {
            let v1: Vec<usize> = (0..n).filter(|v| !zero.contains(v)).collect();
            let pinned = p.subset(&v1).compress(RANK_TOL);
            for &s in &v1 {
                for &t in &zero {
                    if g.has_edge(s, t) || norm_edge(s, t) == e0 || *budget == 0 {
                        continue;
                    }
                    *budget -= 1;
                    let Ok(pf) = pinned_flatten(&pinned, a, &zero, (s, t), self.opts.sdp_tol) else {
                        continue;
                    };
                    let eq = pf.equilibrium_residuals().into_iter().fold(0.0, f64::max);
                    trail.push(
                        TrailStep::new(
                            "pinned_flatten",
                            format!("V2 = {zero:?}, stretch ({s},{t}), equilibrium on V2 {eq:.1e}"),
                        )
                        .with_stress(&pf.stress.matrix),
                    );
                    if let Some(c) = self.fold_or_merge(a, &pf.configuration, k, depth, budget, trail)? {
                        return Ok((Some(c), p));
                    }
                }
            }
        }
        Ok((None, p))
    }

    /// Fold plan search, then the parallel-vector merge.
    fn fold_or_merge(
        &mut self,
        a: &PartialMatrix,
        p: &Configuration,
        k: usize,
        depth: usize,
        budget: &mut usize,
        trail: &mut Vec<TrailStep>,
    ) -> Result<Option<Configuration>> {
        let g = a.graph();
        if let Some(plan) = find_fold_plan(g, p, k) {
            let q = fold_stable_set(g, p, &plan)?;
            if self.accept(a, &q) {
                trail.push(TrailStep::new(
                    "fold",
                    format!(
                        "S = {:?}, pieces {:?} of dimension ≤ {k}, residual {:.2e}",
                        plan.stable,
                        plan.pieces,
                        a.residual_config(&q)
                    ),
                ));
                return Ok(Some(q));
            }
        }
        if depth >= self.opts.max_depth {
            return Ok(None);
        }
        for (i, j) in parallel_pairs(g, p) {
            if *budget == 0 {
                break;
            }
            *budget -= 1;
            let (u, v) = (i.min(j), i.max(j));
            let merged = identify(g, u, v)?;
            let keep: Vec<usize> = (0..g.n()).filter(|&x| x != v).collect();
            let pk = p.subset(&keep);
            let gram = pk.gram();
            let a2 = project(&gram, &merged)?;
            let mut sub = vec![TrailStep::new("parallel", format!("p_{v} ∥ p_{u}: vertices identified"))];
            let Ok(q2) = self.complete_graph(&a2, k, Some(&gram), depth + 1, &mut sub) else {
                continue;
            };
            if subset_rank(&q2, &(0..q2.n()).collect::<Vec<_>>()) > k {
                continue;
            }
            let eps = p.vector(u).dot(&p.vector(v)) / p.vector(u).norm_squared();
            let q2 = q2.with_dim(k.max(q2.dim()));
            let mut q = Mat::zeros(g.n(), q2.dim());
            for (x, &w) in keep.iter().enumerate() {
                q.set_row(w, &q2.points.row(x));
            }
            let row_u = q2.points.row(u) * eps;
            q.set_row(v, &row_u);
            let q = Configuration::new(q);
            if self.accept(a, &q) {
                trail.extend(sub);
                return Ok(Some(q));
            }
        }
        Ok(None)
    }
}

/// Local endpoints of a template pair.
fn transport(map: &[usize], pair: Edge) -> Option<Edge> {
    let a = map.iter().position(|&t| t == pair.0)?;
    let b = map.iter().position(|&t| t == pair.1)?;
    Some(norm_edge(a, b))
}

fn clipped_factor(x: &Mat) -> Result<Configuration> {
    let (vals, vecs) = sym_eigen(x);
    let d = nalgebra::DVector::from_iterator(vals.len(), vals.iter().map(|v| v.max(0.0)));
    gram_factor(&(&vecs * Mat::from_diagonal(&d) * vecs.transpose()), RANK_TOL)
}

/// Record the stress bookkeeping: node classes, 2-node contractions (each
/// checked to keep the dimension) and the resulting dimension bound.
fn stress_certificates(
    ghat: &Graph,
    p: &Configuration,
    om: &StressMatrix,
    budget: &mut usize,
    trail: &mut Vec<TrailStep>,
) {
    let sg = om.stressed_graph();
    let stressed = om.stressed_vertices();
    let class = |d: usize| -> Vec<usize> {
        (0..sg.n()).filter(|&v| if d == 0 { !stressed.contains(&v) } else { stressed.contains(&v) && sg.degree(v) == d }).collect()
    };
    trail.push(TrailStep::new(
        "stress",
        format!("0-nodes {:?}, 1-nodes {:?}, 2-nodes {:?}", class(0), class(1), class(2)),
    ));
    let (mut h, mut c, mut s) = (ghat.clone(), p.clone(), om.clone());
    let mut labels: Vec<usize> = (0..ghat.n()).collect();
    while *budget > 0 {
        let sgc = s.stressed_graph();
        let next = (0..s.n()).find_map(|i| {
            if sgc.degree(i) != 2 {
                return None;
            }
            contract_2node(&h, &c, &s, i).ok().map(|r| (i, r))
        });
        let Some((i, (h2, c2, s2))) = next else { break };
        *budget -= 1;
        let (before, after) = (c.rank(RANK_TOL), c2.rank(RANK_TOL));
        if before != after {
            trail.push(TrailStep::new(
                "contract",
                format!("vertex {}: dimension changed {before} -> {after}, contraction chain stopped", labels[i]),
            ));
            break;
        }
        trail.push(
            TrailStep::new("contract", format!("vertex {} removed, dimension {after} kept", labels[i]))
                .with_stress(&s2.matrix),
        );
        labels.remove(i);
        h = h2;
        c = c2;
        s = s2;
    }
    match bound_dimension(&s, &c) {
        Ok(b) => trail.push(TrailStep::new(
            "bound",
            format!("stressed framework on {labels:?}: dimension {} ≤ {b}", c.rank(RANK_TOL)),
        )),
        Err(e) => trail.push(TrailStep::new("bound", format!("not applicable: {e}"))),
    }
}
