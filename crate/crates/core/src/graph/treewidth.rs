//! Tree decompositions from elimination orderings.

use super::Graph;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeDecomposition {
    pub bags: Vec<Vec<usize>>,
    pub tree_edges: Vec<(usize, usize)>,
    pub width: usize,
}

impl TreeDecomposition {
    /// Cover, edge and running-intersection conditions, plus tree shape.
    pub fn verify(&self, g: &Graph) -> bool {
        let b = self.bags.len();
        if b == 0 {
            return g.n() == 0;
        }
        if self.tree_edges.len() + 1 != b {
            return false;
        }
        let tree = match Graph::from_edges(b, &self.tree_edges) {
            Ok(t) => t,
            Err(_) => return false,
        };
        if tree.components().len() != 1 {
            return false;
        }
        let width = self.bags.iter().map(|x| x.len()).max().unwrap_or(1).saturating_sub(1);
        if width != self.width {
            return false;
        }
        for v in 0..g.n() {
            let holding: Vec<usize> = (0..b).filter(|&k| self.bags[k].contains(&v)).collect();
            if holding.is_empty() || !tree.is_connected_set(&holding) {
                return false;
            }
        }
        g.edges()
            .all(|(u, v)| self.bags.iter().any(|bag| bag.contains(&u) && bag.contains(&v)))
    }

    /// Build from an elimination order; bags contained in a neighbour bag are merged away.
    pub fn from_elimination(g: &Graph, order: &[usize]) -> TreeDecomposition {
        let n = g.n();
        if n == 0 {
            return TreeDecomposition { bags: vec![], tree_edges: vec![], width: 0 };
        }
        let mut pos = vec![0; n];
        for (k, &v) in order.iter().enumerate() {
            pos[v] = k;
        }
        let mut adj: Vec<Vec<bool>> = vec![vec![false; n]; n];
        for (a, b) in g.edges() {
            adj[a][b] = true;
            adj[b][a] = true;
        }
        let mut bags = vec![Vec::new(); n];
        let mut parent = vec![usize::MAX; n];
        for &v in order {
            let later: Vec<usize> = (0..n).filter(|&u| adj[v][u] && pos[u] > pos[v]).collect();
            for (x, &a) in later.iter().enumerate() {
                for &c in &later[x + 1..] {
                    adj[a][c] = true;
                    adj[c][a] = true;
                }
            }
            if let Some(&p) = later.iter().min_by_key(|&&u| pos[u]) {
                parent[v] = p;
            }
            let mut bag = later.clone();
            bag.push(v);
            bag.sort_unstable();
            bags[v] = bag;
        }
        // tree over vertices (bag per vertex), forest roots chained together
        let mut edges: Vec<(usize, usize)> = Vec::new();
        let mut roots = Vec::new();
        for v in 0..n {
            if parent[v] == usize::MAX {
                roots.push(v);
            } else {
                edges.push((v, parent[v]));
            }
        }
        for w in roots.windows(2) {
            edges.push((w[0], w[1]));
        }
        compress(bags, edges)
    }
}

fn compress(mut bags: Vec<Vec<usize>>, mut edges: Vec<(usize, usize)>) -> TreeDecomposition {
    let mut alive = vec![true; bags.len()];
    loop {
        let pick = edges.iter().enumerate().find_map(|(k, &(a, b))| {
            if bags[a].iter().all(|x| bags[b].contains(x)) {
                Some((k, a, b))
            } else if bags[b].iter().all(|x| bags[a].contains(x)) {
                Some((k, b, a))
            } else {
                None
            }
        });
        let Some((k, gone, keep)) = pick else { break };
        edges.remove(k);
        for e in edges.iter_mut() {
            if e.0 == gone {
                e.0 = keep;
            }
            if e.1 == gone {
                e.1 = keep;
            }
        }
        alive[gone] = false;
    }
    let mut index = vec![usize::MAX; bags.len()];
    let mut out = Vec::new();
    for (k, bag) in bags.iter_mut().enumerate() {
        if alive[k] {
            index[k] = out.len();
            out.push(std::mem::take(bag));
        }
    }
    let tree_edges: Vec<(usize, usize)> =
        edges.iter().map(|&(a, b)| (index[a], index[b])).collect();
    let width = out.iter().map(|b| b.len()).max().unwrap_or(1) - 1;
    TreeDecomposition { bags: out, tree_edges, width }
}

/// Width-≤k decomposition if one exists.
///
/// Exhaustive search over elimination orders with memoised failing states.
/// Simplicial and almost simplicial vertices of degree ≤ k are eliminated
/// greedily; both moves keep the remaining graph a minor of the current one.
/// Intended for k ≤ 3 but valid for any k; hosts up to 128 vertices.
pub fn treewidth_at_most(g: &Graph, k: usize) -> Option<TreeDecomposition> {
    let n = g.n();
    assert!(n <= 128, "treewidth search supports at most 128 vertices");
    if n == 0 {
        return Some(TreeDecomposition { bags: vec![], tree_edges: vec![], width: 0 });
    }
    if n <= k + 1 {
        let order: Vec<usize> = (0..n).collect();
        return Some(TreeDecomposition::from_elimination(g, &order));
    }
    let mut adj = vec![0u128; n];
    for (a, b) in g.edges() {
        adj[a] |= 1 << b;
        adj[b] |= 1 << a;
    }
    let mut failed = HashSet::new();
    let mut order = Vec::new();
    let all = if n == 128 { u128::MAX } else { (1u128 << n) - 1 };
    if eliminate(&adj, all, k, &mut failed, &mut order) {
        Some(TreeDecomposition::from_elimination(g, &order))
    } else {
        None
    }
}

fn popcount(x: u128) -> usize {
    x.count_ones() as usize
}

fn elim_vertex(adj: &[u128], v: usize, alive: u128) -> Vec<u128> {
    let nb = adj[v] & alive;
    let mut out = adj.to_vec();
    for u in 0..adj.len() {
        if nb >> u & 1 == 1 {
            out[u] |= nb & !(1 << u);
            out[u] &= !(1 << v);
        }
    }
    out
}

fn is_clique(adj: &[u128], set: u128) -> bool {
    (0..adj.len()).filter(|&u| set >> u & 1 == 1).all(|u| (set & !(1 << u)) & !adj[u] == 0)
}

fn eliminate(
    adj: &[u128],
    alive: u128,
    k: usize,
    failed: &mut HashSet<u128>,
    order: &mut Vec<usize>,
) -> bool {
    if popcount(alive) <= k + 1 {
        order.extend((0..adj.len()).filter(|&u| alive >> u & 1 == 1));
        return true;
    }
    if failed.contains(&alive) {
        return false;
    }
    let verts: Vec<usize> = (0..adj.len()).filter(|&u| alive >> u & 1 == 1).collect();
    // safe reductions
    for &v in &verts {
        let nb = adj[v] & alive;
        if popcount(nb) > k {
            continue;
        }
        let simplicial = is_clique(adj, nb);
        let almost = simplicial
            || (0..adj.len())
                .filter(|&w| nb >> w & 1 == 1)
                .any(|w| is_clique(adj, nb & !(1 << w)));
        if almost {
            let next = elim_vertex(adj, v, alive);
            order.push(v);
            if eliminate(&next, alive & !(1 << v), k, failed, order) {
                return true;
            }
            order.pop();
            failed.insert(alive);
            return false;
        }
    }
    for &v in &verts {
        if popcount(adj[v] & alive) > k {
            continue;
        }
        let next = elim_vertex(adj, v, alive);
        order.push(v);
        if eliminate(&next, alive & !(1 << v), k, failed, order) {
            return true;
        }
        order.pop();
    }
    failed.insert(alive);
    false
}
