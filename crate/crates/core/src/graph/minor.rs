//! Fixed-pattern minor detection (K3, K4, K5, K222).
//!
//! For the 3-connected patterns the host is first reduced while keeping an
//! explicit minor model: leaves are deleted, degree-2 vertices suppressed and
//! the graph is split at cut vertices and 2-separators (a virtual edge is
//! realised by contracting another side into one separator vertex). Each
//! remaining piece is searched exhaustively by growing connected branch sets.

use super::{treewidth_at_most, Edge, Graph};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MinorPattern {
    K3,
    K4,
    K5,
    K222,
}

impl MinorPattern {
    pub fn graph(self) -> Graph {
        match self {
            MinorPattern::K3 => super::named::complete(3),
            MinorPattern::K4 => super::named::complete(4),
            MinorPattern::K5 => super::named::complete(5),
            MinorPattern::K222 => super::named::k222(),
        }
    }

    fn order(self) -> usize {
        self.graph().n()
    }

    fn min_degree(self) -> usize {
        match self {
            MinorPattern::K3 => 2,
            MinorPattern::K4 => 3,
            MinorPattern::K5 | MinorPattern::K222 => 4,
        }
    }

    fn treewidth(self) -> usize {
        match self {
            MinorPattern::K3 => 2,
            MinorPattern::K4 => 3,
            MinorPattern::K5 | MinorPattern::K222 => 4,
        }
    }

    /// How many other branch sets a branch set may miss in the quotient.
    fn allowed_misses(self) -> usize {
        match self {
            MinorPattern::K222 => 1,
            _ => 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinorWitness {
    pub pattern: MinorPattern,
    /// Branch set of pattern vertex `t` (host vertex indices, sorted).
    pub branch_sets: Vec<Vec<usize>>,
    /// One host edge per pattern edge, in pattern edge order.
    pub connecting_edges: Vec<(Edge, Edge)>,
}

impl MinorWitness {
    /// Check the witness against `g`: disjoint connected branch sets with a host
    /// edge for every pattern edge.
    pub fn verify(&self, g: &Graph) -> bool {
        let h = self.pattern.graph();
        if self.branch_sets.len() != h.n() {
            return false;
        }
        let mut owner = vec![usize::MAX; g.n()];
        for (t, set) in self.branch_sets.iter().enumerate() {
            if !g.is_connected_set(set) {
                return false;
            }
            for &v in set {
                if v >= g.n() || owner[v] != usize::MAX {
                    return false;
                }
                owner[v] = t;
            }
        }
        let pe = h.edge_list();
        if pe.len() != self.connecting_edges.len() {
            return false;
        }
        pe.iter().zip(&self.connecting_edges).all(|(&(s, t), &(pt, (a, b)))| {
            pt == (s, t)
                && g.has_edge(a, b)
                && ((owner[a] == s && owner[b] == t) || (owner[a] == t && owner[b] == s))
        })
    }
}

/// Returns a witness iff `pattern` is a minor of `g`.
pub fn has_minor(g: &Graph, pattern: MinorPattern) -> Option<MinorWitness> {
    let parts = match pattern {
        MinorPattern::K3 => find_cycle(g).map(|c| vec![vec![c[0]], vec![c[1]], c[2..].to_vec()]),
        _ => reduce(g, pattern)
            .into_iter()
            .find_map(|piece| search_piece(&piece, pattern)),
    }?;
    Some(finish_witness(g, pattern, parts))
}

fn finish_witness(g: &Graph, pattern: MinorPattern, parts: Vec<Vec<usize>>) -> MinorWitness {
    let mut parts: Vec<Vec<usize>> = parts
        .into_iter()
        .map(|mut p| {
            p.sort_unstable();
            p
        })
        .collect();
    // K222 needs the three non-adjacent pairs on the pattern's removed matching
    if pattern == MinorPattern::K222 {
        parts = order_k222(g, parts);
    }
    let mut owner = vec![usize::MAX; g.n()];
    for (t, set) in parts.iter().enumerate() {
        for &v in set {
            owner[v] = t;
        }
    }
    let mut connecting = Vec::new();
    for (s, t) in pattern.graph().edge_list() {
        let e = g
            .edges()
            .find(|&(a, b)| (owner[a] == s && owner[b] == t) || (owner[a] == t && owner[b] == s))
            .expect("quotient contains the pattern");
        connecting.push(((s, t), e));
    }
    MinorWitness { pattern, branch_sets: parts, connecting_edges: connecting }
}

fn adjacent_sets(g: &Graph, a: &[usize], b: &[usize]) -> bool {
    a.iter().any(|&x| b.iter().any(|&y| g.has_edge(x, y)))
}

fn order_k222(g: &Graph, parts: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
    // pair every part with the part it misses (if any), then fill the matching
    let k = parts.len();
    let mut mate = vec![usize::MAX; k];
    for i in 0..k {
        for j in i + 1..k {
            if !adjacent_sets(g, &parts[i], &parts[j]) {
                mate[i] = j;
                mate[j] = i;
            }
        }
    }
    let mut free: Vec<usize> = (0..k).filter(|&i| mate[i] == usize::MAX).collect();
    while free.len() >= 2 {
        let a = free.remove(0);
        let b = free.remove(0);
        mate[a] = b;
        mate[b] = a;
    }
    let mut firsts = Vec::new();
    for i in 0..k {
        if mate[i] > i {
            firsts.push(i);
        }
    }
    // pattern vertices t and t+3 are the non-adjacent pairs
    let mut out = vec![Vec::new(); k];
    for (t, &i) in firsts.iter().enumerate() {
        out[t] = parts[i].clone();
        out[t + 3] = parts[mate[i]].clone();
    }
    out
}

fn find_cycle(g: &Graph) -> Option<Vec<usize>> {
    let adj = g.adjacency();
    let mut parent = vec![usize::MAX; g.n()];
    let mut seen = vec![false; g.n()];
    for s in 0..g.n() {
        if seen[s] {
            continue;
        }
        let mut stack = vec![s];
        seen[s] = true;
        parent[s] = s;
        while let Some(x) = stack.pop() {
            for &y in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    parent[y] = x;
                    stack.push(y);
                } else if y != parent[x] && parent[y] != x {
                    // non-tree edge x-y: walk both up to the common ancestor
                    let anc_x = ancestors(&parent, x);
                    let anc_y = ancestors(&parent, y);
                    let set_y: BTreeSet<usize> = anc_y.iter().copied().collect();
                    let lca_pos = anc_x.iter().position(|v| set_y.contains(v)).unwrap();
                    let lca = anc_x[lca_pos];
                    let mut cyc: Vec<usize> = anc_x[..=lca_pos].to_vec();
                    let pos_y = anc_y.iter().position(|&v| v == lca).unwrap();
                    cyc.extend(anc_y[..pos_y].iter().rev());
                    return Some(cyc);
                }
            }
        }
    }
    None
}

fn ancestors(parent: &[usize], mut v: usize) -> Vec<usize> {
    let mut out = vec![v];
    while parent[v] != v {
        v = parent[v];
        out.push(v);
    }
    out
}

/// A minor of the host: adjacency over local vertices, each standing for a
/// connected set of host vertices.
#[derive(Clone, Debug)]
struct Piece {
    adj: Vec<BTreeSet<usize>>,
    sets: Vec<Vec<usize>>,
}

impl Piece {
    fn n(&self) -> usize {
        self.adj.len()
    }

    fn edge_count(&self) -> usize {
        self.adj.iter().map(|a| a.len()).sum::<usize>() / 2
    }

    fn graph(&self) -> Graph {
        let mut e = Vec::new();
        for (a, nb) in self.adj.iter().enumerate() {
            for &b in nb {
                if a < b {
                    e.push((a, b));
                }
            }
        }
        Graph::from_edges(self.n(), &e).expect("piece edges valid")
    }

    fn remove(&mut self, v: usize) {
        let nb: Vec<usize> = self.adj[v].iter().copied().collect();
        for u in nb {
            self.adj[u].remove(&v);
        }
        self.adj.remove(v);
        self.sets.remove(v);
        for a in self.adj.iter_mut() {
            *a = a.iter().map(|&x| if x > v { x - 1 } else { x }).collect();
        }
    }

    /// Restrict to `keep` (local indices), returning the new piece.
    fn restrict(&self, keep: &[usize]) -> Piece {
        let mut pos = vec![usize::MAX; self.n()];
        for (k, &v) in keep.iter().enumerate() {
            pos[v] = k;
        }
        let adj = keep
            .iter()
            .map(|&v| self.adj[v].iter().filter(|&&u| pos[u] != usize::MAX).map(|&u| pos[u]).collect())
            .collect();
        let sets = keep.iter().map(|&v| self.sets[v].clone()).collect();
        Piece { adj, sets }
    }

    /// Delete leaves and suppress degree-2 vertices until neither exists.
    fn simplify(&mut self) {
        loop {
            if let Some(v) = (0..self.n()).find(|&v| self.adj[v].len() <= 1) {
                self.remove(v);
                continue;
            }
            if let Some(v) = (0..self.n()).find(|&v| self.adj[v].len() == 2) {
                let nb: Vec<usize> = self.adj[v].iter().copied().collect();
                let (a, b) = (nb[0], nb[1]);
                let moved = self.sets[v].clone();
                self.sets[a].extend(moved);
                self.adj[a].insert(b);
                self.adj[b].insert(a);
                self.remove(v);
                continue;
            }
            break;
        }
    }

    fn components_without(&self, removed: &[usize]) -> Vec<Vec<usize>> {
        let mut allowed = vec![true; self.n()];
        for &r in removed {
            allowed[r] = false;
        }
        self.graph().components_within(&allowed)
    }
}

fn reduce(g: &Graph, pattern: MinorPattern) -> Vec<Piece> {
    let h = pattern.order();
    let whole = Piece {
        adj: g.adjacency().into_iter().map(|a| a.into_iter().collect()).collect(),
        sets: (0..g.n()).map(|v| vec![v]).collect(),
    };
    let mut stack: Vec<Piece> =
        whole.components_without(&[]).iter().map(|c| whole.restrict(c)).collect();
    let mut done = Vec::new();
    while let Some(mut p) = stack.pop() {
        p.simplify();
        if p.n() < h || p.edge_count() < pattern.graph().edge_count() {
            continue;
        }
        if let Some(c) = (0..p.n()).find(|&c| p.components_without(&[c]).len() > 1) {
            for comp in p.components_without(&[c]) {
                let mut keep = comp.clone();
                keep.push(c);
                keep.sort_unstable();
                stack.push(p.restrict(&keep));
            }
            continue;
        }
        if let Some((u, v, comps)) = two_separator(&p) {
            for (ci, comp) in comps.iter().enumerate() {
                let mut keep = comp.clone();
                keep.extend([u, v]);
                keep.sort_unstable();
                let mut child = p.restrict(&keep);
                let lu = keep.iter().position(|&x| x == u).unwrap();
                let lv = keep.iter().position(|&x| x == v).unwrap();
                if !p.adj[u].contains(&v) {
                    // realise the virtual edge through another side
                    let other = &comps[if ci == 0 { 1 } else { 0 }];
                    for &x in other {
                        child.sets[lu].extend(p.sets[x].iter().copied());
                    }
                }
                child.adj[lu].insert(lv);
                child.adj[lv].insert(lu);
                stack.push(child);
            }
            continue;
        }
        done.push(p);
    }
    done
}

fn two_separator(p: &Piece) -> Option<(usize, usize, Vec<Vec<usize>>)> {
    if p.n() < 4 {
        return None;
    }
    for u in 0..p.n() {
        for v in u + 1..p.n() {
            let comps = p.components_without(&[u, v]);
            if comps.len() > 1 {
                return Some((u, v, comps));
            }
        }
    }
    None
}

fn search_piece(p: &Piece, pattern: MinorPattern) -> Option<Vec<Vec<usize>>> {
    let n = p.n();
    assert!(n <= 128, "piece too large for exhaustive minor search");
    if treewidth_at_most(&p.graph(), pattern.treewidth() - 1).is_some() {
        return None;
    }
    let adj: Vec<u128> = p
        .adj
        .iter()
        .map(|nb| nb.iter().fold(0u128, |m, &x| m | (1u128 << x)))
        .collect();
    let mut search = PartSearch {
        adj: &adj,
        h: pattern.order(),
        misses: pattern.allowed_misses(),
        min_deg: pattern.min_degree(),
        parts: Vec::new(),
    };
    let full = if n == 128 { u128::MAX } else { (1u128 << n) - 1 };
    if search.rec(full) {
        let parts = search
            .parts
            .iter()
            .map(|&m| {
                (0..n)
                    .filter(|&x| m >> x & 1 == 1)
                    .flat_map(|x| p.sets[x].iter().copied())
                    .collect()
            })
            .collect();
        return Some(parts);
    }
    None
}

struct PartSearch<'a> {
    adj: &'a [u128],
    h: usize,
    misses: usize,
    min_deg: usize,
    parts: Vec<u128>,
}

fn bits(m: u128) -> impl Iterator<Item = usize> {
    (0..128).filter(move |&x| m >> x & 1 == 1)
}

impl<'a> PartSearch<'a> {
    fn nbr(&self, set: u128) -> u128 {
        bits(set).fold(0, |m, x| m | self.adj[x]) & !set
    }

    fn components(&self, set: u128) -> Vec<u128> {
        let mut rest = set;
        let mut out = Vec::new();
        while rest != 0 {
            let s = rest.trailing_zeros() as usize;
            let mut comp = 1u128 << s;
            loop {
                let grown = comp | (self.nbr(comp) & set);
                if grown == comp {
                    break;
                }
                comp = grown;
            }
            rest &= !comp;
            out.push(comp);
        }
        out
    }

    fn touches(&self, a: u128, b: u128) -> bool {
        self.nbr(a) & b != 0
    }

    /// The chosen parts still admit the pattern: each part misses at most
    /// `misses` of the others and can still reach the minimum degree.
    fn consistent(&self, free: u128) -> bool {
        let k = self.parts.len();
        let remaining = self.h - k;
        for i in 0..k {
            let mut miss = 0;
            let mut deg = 0;
            for j in 0..k {
                if i != j {
                    if self.touches(self.parts[i], self.parts[j]) {
                        deg += 1;
                    } else {
                        miss += 1;
                    }
                }
            }
            if miss > self.misses {
                return false;
            }
            let reach = if self.touches(self.parts[i], free) { remaining } else { 0 };
            if deg + reach < self.min_deg {
                return false;
            }
        }
        true
    }

    fn rec(&mut self, free: u128) -> bool {
        let k = self.parts.len();
        if k == self.h - 1 {
            if free == 0 || self.components(free).len() != 1 {
                return false;
            }
            self.parts.push(free);
            let ok = self.consistent(0);
            if !ok {
                self.parts.pop();
            }
            return ok;
        }
        if free == 0 {
            return false;
        }
        let v = free.trailing_zeros() as usize;
        let mut found = false;
        let need = self.h - k - 1;
        self.grow(1u128 << v, 0, free, need, &mut found);
        found
    }

    fn grow(&mut self, set: u128, excluded: u128, free: u128, need: usize, found: &mut bool) {
        if *found {
            return;
        }
        let rest = free & !set;
        if (rest.count_ones() as usize) < need {
            return;
        }
        if self.components(rest).len() <= need {
            self.parts.push(set);
            if self.consistent(rest) && self.rec(rest) {
                *found = true;
                return;
            }
            self.parts.pop();
        }
        let cand = self.nbr(set) & free & !excluded;
        let mut ex = excluded;
        for w in bits(cand).collect::<Vec<_>>() {
            self.grow(set | 1u128 << w, ex, free, need, found);
            if *found {
                return;
            }
            ex |= 1u128 << w;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::named::*;
    use super::*;

    #[test]
    fn k4_in_k4_singletons() {
        let w = has_minor(&complete(4), MinorPattern::K4).unwrap();
        assert!(w.verify(&complete(4)));
        assert!(w.branch_sets.iter().all(|s| s.len() == 1));
    }

    #[test]
    fn templates_have_no_k5_or_k222() {
        for g in [v8(), c5xc2()] {
            assert!(has_minor(&g, MinorPattern::K5).is_none());
            assert!(has_minor(&g, MinorPattern::K222).is_none());
            assert!(has_minor(&g, MinorPattern::K4).is_some());
        }
    }

    #[test]
    fn petersen_has_k5() {
        let p = petersen();
        let w = has_minor(&p, MinorPattern::K5).unwrap();
        assert!(w.verify(&p));
    }

    #[test]
    fn k222_self_minor() {
        let g = k222();
        let w = has_minor(&g, MinorPattern::K222).unwrap();
        assert!(w.verify(&g));
        assert!(has_minor(&g, MinorPattern::K5).is_none());
    }

    #[test]
    fn cycles_and_trees() {
        assert!(has_minor(&path(6), MinorPattern::K3).is_none());
        let w = has_minor(&cycle(7), MinorPattern::K3).unwrap();
        assert!(w.verify(&cycle(7)));
        assert!(has_minor(&cycle(7), MinorPattern::K4).is_none());
    }
}
