//! Simple undirected graphs with stable vertex labels.

mod chordal;
mod classify;
mod minor;
pub mod named;
mod split;
mod treewidth;

pub use chordal::{chordal_structure, ChordalStructure};
pub use classify::{barvinok_bound, barvinok_for_constraints, classify_gram_dimension, GdBand};
pub use minor::{has_minor, MinorPattern, MinorWitness};
pub use split::{clique_sum_split, subgraph_embedding, CliqueSumSplit, Component, ComponentKind};
pub use treewidth::{treewidth_at_most, TreeDecomposition};

use crate::error::{invalid, Result};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, VecDeque};

/// Undirected edge, stored with the smaller endpoint first.
pub type Edge = (usize, usize);

pub fn norm_edge(i: usize, j: usize) -> Edge {
    if i < j {
        (i, j)
    } else {
        (j, i)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Graph {
    n: usize,
    edges: BTreeSet<Edge>,
    labels: Vec<String>,
}

impl Graph {
    /// Graph on `n` vertices labelled "1".."n".
    pub fn new(n: usize) -> Self {
        Graph {
            n,
            edges: BTreeSet::new(),
            labels: (1..=n).map(|i| i.to_string()).collect(),
        }
    }

    pub fn from_edges(n: usize, edges: &[Edge]) -> Result<Self> {
        let mut g = Graph::new(n);
        for &(i, j) in edges {
            g.add_edge(i, j)?;
        }
        Ok(g)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.n {
            return invalid(format!("expected {} labels, got {}", self.n, labels.len()));
        }
        let uniq: BTreeSet<&String> = labels.iter().collect();
        if uniq.len() != labels.len() {
            return invalid("vertex labels must be unique");
        }
        self.labels = labels;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_list(&self) -> Vec<Edge> {
        self.edges.iter().copied().collect()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, v: usize) -> &str {
        &self.labels[v]
    }

    pub fn add_edge(&mut self, i: usize, j: usize) -> Result<()> {
        if i == j {
            return invalid(format!("self-loop at vertex {i}"));
        }
        if i >= self.n || j >= self.n {
            return invalid(format!("edge ({i},{j}) out of range for {} vertices", self.n));
        }
        self.edges.insert(norm_edge(i, j));
        Ok(())
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        i != j && self.edges.contains(&norm_edge(i, j))
    }

    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        (0..self.n).filter(|&u| self.has_edge(u, v)).collect()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == v || b == v).count()
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }

    /// Non-adjacent pairs (i < j).
    pub fn non_edges(&self) -> Vec<Edge> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in i + 1..self.n {
                if !self.has_edge(i, j) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn is_clique(&self, vs: &[usize]) -> bool {
        vs.iter()
            .enumerate()
            .all(|(a, &u)| vs[a + 1..].iter().all(|&w| self.has_edge(u, w)))
    }

    pub fn is_stable(&self, vs: &[usize]) -> bool {
        vs.iter()
            .enumerate()
            .all(|(a, &u)| vs[a + 1..].iter().all(|&w| !self.has_edge(u, w)))
    }

    pub fn delete_edge(&self, e: Edge) -> Result<Graph> {
        let e = norm_edge(e.0, e.1);
        if !self.edges.contains(&e) {
            return invalid(format!("({},{}) is not an edge", e.0, e.1));
        }
        let mut g = self.clone();
        g.edges.remove(&e);
        Ok(g)
    }

    /// Contract `e`; the merged vertex keeps the smaller index and gets label "a+b".
    pub fn contract_edge(&self, e: Edge) -> Result<Graph> {
        let (u, v) = norm_edge(e.0, e.1);
        if !self.edges.contains(&(u, v)) {
            return invalid(format!("({u},{v}) is not an edge"));
        }
        let shift = |x: usize| if x > v { x - 1 } else { x };
        let mut edges = BTreeSet::new();
        for &(a, b) in &self.edges {
            let a2 = if a == v { u } else { a };
            let b2 = if b == v { u } else { b };
            if a2 != b2 {
                edges.insert(norm_edge(shift(a2), shift(b2)));
            }
        }
        let mut labels = self.labels.clone();
        labels[u] = format!("{}+{}", self.labels[u], self.labels[v]);
        labels.remove(v);
        Ok(Graph { n: self.n - 1, edges, labels })
    }

    /// Subgraph induced on `vs` (in the given order), labels carried over.
    pub fn induced(&self, vs: &[usize]) -> Graph {
        let mut pos = vec![usize::MAX; self.n];
        for (k, &v) in vs.iter().enumerate() {
            pos[v] = k;
        }
        let mut edges = BTreeSet::new();
        for &(a, b) in &self.edges {
            if pos[a] != usize::MAX && pos[b] != usize::MAX {
                edges.insert(norm_edge(pos[a], pos[b]));
            }
        }
        Graph {
            n: vs.len(),
            edges,
            labels: vs.iter().map(|&v| self.labels[v].clone()).collect(),
        }
    }

    /// Suspension: a new apex (last index, label "0") adjacent to every vertex.
    pub fn suspension(&self) -> Graph {
        let mut g = self.clone();
        let apex = self.n;
        g.n += 1;
        let mut label = "0".to_string();
        while g.labels.contains(&label) {
            label.push('\'');
        }
        g.labels.push(label);
        for v in 0..self.n {
            g.edges.insert((v, apex));
        }
        g
    }

    /// Connected components as sorted vertex lists, restricted to `allowed`.
    pub fn components_within(&self, allowed: &[bool]) -> Vec<Vec<usize>> {
        let adj = self.adjacency();
        let mut seen = vec![false; self.n];
        let mut comps = Vec::new();
        for s in 0..self.n {
            if !allowed[s] || seen[s] {
                continue;
            }
            let mut comp = vec![s];
            seen[s] = true;
            let mut queue = VecDeque::from([s]);
            while let Some(x) = queue.pop_front() {
                for &y in &adj[x] {
                    if allowed[y] && !seen[y] {
                        seen[y] = true;
                        comp.push(y);
                        queue.push_back(y);
                    }
                }
            }
            comp.sort_unstable();
            comps.push(comp);
        }
        comps
    }

    pub fn components(&self) -> Vec<Vec<usize>> {
        self.components_within(&vec![true; self.n])
    }

    pub fn is_connected_set(&self, vs: &[usize]) -> bool {
        if vs.is_empty() {
            return false;
        }
        let mut allowed = vec![false; self.n];
        for &v in vs {
            allowed[v] = true;
        }
        self.components_within(&allowed).len() == 1
    }

    /// Breadth-first distances from `s` (usize::MAX when unreachable).
    pub fn distances_from(&self, s: usize) -> Vec<usize> {
        let adj = self.adjacency();
        let mut dist = vec![usize::MAX; self.n];
        dist[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(x) = queue.pop_front() {
            for &y in &adj[x] {
                if dist[y] == usize::MAX {
                    dist[y] = dist[x] + 1;
                    queue.push_back(y);
                }
            }
        }
        dist
    }

    pub fn has_cycle(&self) -> bool {
        self.edge_count() + self.components().len() > self.n
    }

    /// All maximal stable sets, largest first (ties in lexicographic order).
    pub fn maximal_stable_sets(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut cur = Vec::new();
        self.stable_rec(0, &mut cur, &mut out);
        out.retain(|s| {
            (0..self.n).all(|v| s.contains(&v) || s.iter().any(|&u| self.has_edge(u, v)))
        });
        out.sort_by(|a, b| b.len().cmp(&a.len()).then(a.cmp(b)));
        out
    }

    /// Maximal cliques (Bron–Kerbosch with pivoting), each sorted, in
    /// lexicographic order. Isolated vertices give singleton cliques.
    pub fn maximal_cliques(&self) -> Vec<Vec<usize>> {
        let adj: Vec<BTreeSet<usize>> =
            self.adjacency().into_iter().map(|a| a.into_iter().collect()).collect();
        let mut out = Vec::new();
        let p: BTreeSet<usize> = (0..self.n).collect();
        bron_kerbosch(&adj, &mut Vec::new(), p, BTreeSet::new(), &mut out);
        for c in out.iter_mut() {
            c.sort_unstable();
        }
        out.sort();
        out
    }

    fn stable_rec(&self, v: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if v == self.n {
            out.push(cur.clone());
            return;
        }
        if cur.iter().all(|&u| !self.has_edge(u, v)) {
            cur.push(v);
            self.stable_rec(v + 1, cur, out);
            cur.pop();
        }
        // skipping v only makes sense if some chosen or later vertex blocks it
        self.stable_rec(v + 1, cur, out);
    }

    /// Simple cycles (as vertex sequences), each reported once, up to `max_len`.
    pub fn circuits(&self, max_len: usize) -> Vec<Vec<usize>> {
        let adj = self.adjacency();
        let mut out = Vec::new();
        for s in 0..self.n {
            let mut path = vec![s];
            let mut on = vec![false; self.n];
            on[s] = true;
            circuit_rec(&adj, s, &mut path, &mut on, max_len, &mut out);
        }
        out
    }
}

fn circuit_rec(
    adj: &[Vec<usize>],
    s: usize,
    path: &mut Vec<usize>,
    on: &mut [bool],
    max_len: usize,
    out: &mut Vec<Vec<usize>>,
) {
    let last = *path.last().unwrap();
    for &y in &adj[last] {
        if y == s && path.len() >= 3 && path[1] < last {
            out.push(path.clone());
        } else if y > s && !on[y] && path.len() < max_len {
            on[y] = true;
            path.push(y);
            circuit_rec(adj, s, path, on, max_len, out);
            path.pop();
            on[y] = false;
        }
    }
}

fn bron_kerbosch(
    adj: &[BTreeSet<usize>],
    r: &mut Vec<usize>,
    p: BTreeSet<usize>,
    x: BTreeSet<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if p.is_empty() && x.is_empty() {
        out.push(r.clone());
        return;
    }
    let pivot = p.iter().chain(x.iter()).max_by_key(|&&u| adj[u].intersection(&p).count()).copied();
    let cand: Vec<usize> = match pivot {
        Some(u) => p.difference(&adj[u]).copied().collect(),
        None => p.iter().copied().collect(),
    };
    let (mut p, mut x) = (p, x);
    for v in cand {
        r.push(v);
        let np = p.intersection(&adj[v]).copied().collect();
        let nx = x.intersection(&adj[v]).copied().collect();
        bron_kerbosch(adj, r, np, nx, out);
        r.pop();
        p.remove(&v);
        x.insert(v);
    }
}
