//! Splitting along small separators into clique-sum components.

use super::named::{c5xc2, v8};
use super::{norm_edge, treewidth_at_most, Edge, Graph};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ComponentKind {
    TreewidthAtMost3,
    V8Type,
    C5xC2Type,
    Irreducible,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Component {
    /// Host vertices, sorted; local index k stands for `vertices[k]`.
    pub vertices: Vec<usize>,
    /// Local graph: host edges plus every separator pair made adjacent.
    pub graph: Graph,
    pub kind: ComponentKind,
    /// For template components: local index -> template vertex.
    pub template_map: Option<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CliqueSumSplit {
    pub components: Vec<Component>,
    /// Tree edges (component a, component b, shared host vertices).
    pub separators: Vec<(usize, usize, Vec<usize>)>,
}

impl CliqueSumSplit {
    /// Host pairs that are not edges of the input but became adjacent in some
    /// component (values for them must come from elsewhere).
    pub fn virtual_pairs(&self, g: &Graph) -> Vec<Edge> {
        let mut out = BTreeSet::new();
        for c in &self.components {
            for (a, b) in c.graph.edges() {
                let (u, v) = (c.vertices[a], c.vertices[b]);
                if !g.has_edge(u, v) {
                    out.insert(norm_edge(u, v));
                }
            }
        }
        out.into_iter().collect()
    }
}

struct WorkPiece {
    vertices: Vec<usize>,
    extra: BTreeSet<Edge>,
}

impl WorkPiece {
    fn local_graph(&self, g: &Graph) -> Graph {
        let mut h = g.induced(&self.vertices);
        for &(u, v) in &self.extra {
            let a = self.vertices.binary_search(&u).unwrap();
            let b = self.vertices.binary_search(&v).unwrap();
            h.add_edge(a, b).unwrap();
        }
        h
    }
}

/// Local separator of the piece graph: cut vertex, minimal 2-separator, or a
/// separating clique of size 3 or 4.
fn find_separator(h: &Graph) -> Option<(Vec<usize>, Vec<Vec<usize>>)> {
    let n = h.n();
    let split = |sep: &[usize]| -> Vec<Vec<usize>> {
        let mut allowed = vec![true; n];
        for &s in sep {
            allowed[s] = false;
        }
        h.components_within(&allowed)
    };
    for u in 0..n {
        let comps = split(&[u]);
        if comps.len() > 1 {
            return Some((vec![u], comps));
        }
    }
    for u in 0..n {
        for v in u + 1..n {
            let comps = split(&[u, v]);
            let minimal = comps.iter().all(|c| {
                c.iter().any(|&x| h.has_edge(x, u)) && c.iter().any(|&x| h.has_edge(x, v))
            });
            if comps.len() > 1 && minimal {
                return Some((vec![u, v], comps));
            }
        }
    }
    for size in [3usize, 4] {
        let mut cur = Vec::new();
        if let Some(r) = clique_separator(h, size, 0, &mut cur, &split) {
            return Some(r);
        }
    }
    None
}

fn clique_separator(
    h: &Graph,
    size: usize,
    start: usize,
    cur: &mut Vec<usize>,
    split: &dyn Fn(&[usize]) -> Vec<Vec<usize>>,
) -> Option<(Vec<usize>, Vec<Vec<usize>>)> {
    if cur.len() == size {
        let comps = split(cur);
        return (comps.len() > 1).then(|| (cur.clone(), comps));
    }
    for v in start..h.n() {
        if cur.iter().all(|&u| h.has_edge(u, v)) {
            cur.push(v);
            if let Some(r) = clique_separator(h, size, v + 1, cur, split) {
                return Some(r);
            }
            cur.pop();
        }
    }
    None
}

/// Decompose `g` into components glued along separators of size ≤ 4 (any
/// minimal separator of size ≤ 2, or a separating clique of size 3–4).
pub fn clique_sum_split(g: &Graph) -> CliqueSumSplit {
    let mut pieces: Vec<Option<WorkPiece>> = Vec::new();
    let mut tree: Vec<(usize, usize, Vec<usize>)> = Vec::new();
    let mut queue = Vec::new();
    let comps = g.components();
    for (k, c) in comps.iter().enumerate() {
        pieces.push(Some(WorkPiece { vertices: c.clone(), extra: BTreeSet::new() }));
        queue.push(k);
        if k > 0 {
            tree.push((0, k, Vec::new()));
        }
    }
    let mut finals = Vec::new();
    while let Some(id) = queue.pop() {
        let piece = pieces[id].take().unwrap();
        let h = piece.local_graph(g);
        let Some((sep_local, parts)) = find_separator(&h) else {
            pieces[id] = Some(piece);
            finals.push(id);
            continue;
        };
        let sep: Vec<usize> = sep_local.iter().map(|&x| piece.vertices[x]).collect();
        let mut child_ids = Vec::new();
        for part in parts {
            let mut verts: Vec<usize> = part.iter().map(|&x| piece.vertices[x]).collect();
            verts.extend(&sep);
            verts.sort_unstable();
            let mut extra: BTreeSet<Edge> = piece
                .extra
                .iter()
                .copied()
                .filter(|&(u, v)| verts.binary_search(&u).is_ok() && verts.binary_search(&v).is_ok())
                .collect();
            for (a, &u) in sep.iter().enumerate() {
                for &v in &sep[a + 1..] {
                    if !g.has_edge(u, v) {
                        extra.insert(norm_edge(u, v));
                    }
                }
            }
            child_ids.push(pieces.len());
            pieces.push(Some(WorkPiece { vertices: verts, extra }));
        }
        for e in tree.iter_mut() {
            for end in [0, 1] {
                let at = if end == 0 { &mut e.0 } else { &mut e.1 };
                if *at == id {
                    let shared = e.2.clone();
                    *at = *child_ids
                        .iter()
                        .find(|&&c| {
                            let vs = &pieces[c].as_ref().unwrap().vertices;
                            shared.iter().all(|x| vs.binary_search(x).is_ok())
                        })
                        .unwrap_or(&child_ids[0]);
                }
            }
        }
        for &c in &child_ids[1..] {
            tree.push((child_ids[0], c, sep.clone()));
        }
        queue.extend(child_ids);
    }
    finals.sort_unstable();
    let mut index = vec![usize::MAX; pieces.len()];
    let mut components = Vec::new();
    for &id in &finals {
        let piece = pieces[id].as_ref().unwrap();
        let h = piece.local_graph(g);
        let (kind, template_map) = label_component(&h);
        index[id] = components.len();
        components.push(Component { vertices: piece.vertices.clone(), graph: h, kind, template_map });
    }
    let separators = tree
        .into_iter()
        .map(|(a, b, mut s)| {
            s.sort_unstable();
            (index[a], index[b], s)
        })
        .collect();
    CliqueSumSplit { components, separators }
}

fn label_component(h: &Graph) -> (ComponentKind, Option<Vec<usize>>) {
    if treewidth_at_most(h, 3).is_some() {
        return (ComponentKind::TreewidthAtMost3, None);
    }
    if h.n() == 8 {
        if let Some(m) = subgraph_embedding(h, &v8()) {
            return (ComponentKind::V8Type, Some(m));
        }
    }
    if h.n() == 10 {
        if let Some(m) = subgraph_embedding(h, &c5xc2()) {
            return (ComponentKind::C5xC2Type, Some(m));
        }
    }
    (ComponentKind::Irreducible, None)
}

/// Injective map of `h` into `template` carrying edges to edges.
pub fn subgraph_embedding(h: &Graph, template: &Graph) -> Option<Vec<usize>> {
    if h.n() > template.n() || h.edge_count() > template.edge_count() {
        return None;
    }
    // high degree first, then neighbours of placed vertices
    let mut order: Vec<usize> = Vec::new();
    let mut placed = vec![false; h.n()];
    while order.len() < h.n() {
        let next = (0..h.n())
            .filter(|&v| !placed[v])
            .max_by_key(|&v| {
                let links = order.iter().filter(|&&u| h.has_edge(u, v)).count();
                (links, h.degree(v), usize::MAX - v)
            })
            .unwrap();
        placed[next] = true;
        order.push(next);
    }
    let mut map = vec![usize::MAX; h.n()];
    let mut used = vec![false; template.n()];
    if embed_rec(h, template, &order, 0, &mut map, &mut used) {
        Some(map)
    } else {
        None
    }
}

fn embed_rec(
    h: &Graph,
    t: &Graph,
    order: &[usize],
    k: usize,
    map: &mut [usize],
    used: &mut [bool],
) -> bool {
    if k == order.len() {
        return true;
    }
    let v = order[k];
    for x in 0..t.n() {
        if used[x] || t.degree(x) < h.degree(v) {
            continue;
        }
        let ok = order[..k].iter().all(|&u| !h.has_edge(u, v) || t.has_edge(map[u], x));
        if ok {
            map[v] = x;
            used[x] = true;
            if embed_rec(h, t, order, k + 1, map, used) {
                return true;
            }
            used[x] = false;
            map[v] = usize::MAX;
        }
    }
    false
}
