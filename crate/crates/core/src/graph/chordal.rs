use super::Graph;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChordalStructure {
    /// Perfect elimination order (each vertex's later neighbours form a clique).
    pub order: Vec<usize>,
    pub cliques: Vec<Vec<usize>>,
    /// Clique tree over `cliques` indices.
    pub tree_edges: Vec<(usize, usize)>,
}

/// Maximum cardinality search; returns the reverse visit order.
fn mcs_order(g: &Graph) -> Vec<usize> {
    let n = g.n();
    let adj = g.adjacency();
    let mut weight = vec![0usize; n];
    let mut done = vec![false; n];
    let mut visit = Vec::with_capacity(n);
    for _ in 0..n {
        let v = (0..n)
            .filter(|&v| !done[v])
            .max_by(|&a, &b| weight[a].cmp(&weight[b]).then(b.cmp(&a)))
            .unwrap();
        done[v] = true;
        visit.push(v);
        for &u in &adj[v] {
            if !done[u] {
                weight[u] += 1;
            }
        }
    }
    visit.reverse();
    visit
}

pub fn chordal_structure(g: &Graph) -> Option<ChordalStructure> {
    let n = g.n();
    let order = mcs_order(g);
    let mut pos = vec![0; n];
    for (k, &v) in order.iter().enumerate() {
        pos[v] = k;
    }
    let mut candidates = Vec::new();
    for &v in &order {
        let later: Vec<usize> =
            g.neighbors(v).into_iter().filter(|&u| pos[u] > pos[v]).collect();
        if !g.is_clique(&later) {
            return None;
        }
        let mut c = later;
        c.push(v);
        c.sort_unstable();
        candidates.push(c);
    }
    let mut cliques: Vec<Vec<usize>> = Vec::new();
    for c in &candidates {
        let dominated = candidates
            .iter()
            .any(|d| d.len() > c.len() && c.iter().all(|x| d.contains(x)));
        if !dominated && !cliques.contains(c) {
            cliques.push(c.clone());
        }
    }
    cliques.sort();
    let tree_edges = max_weight_tree(&cliques);
    Some(ChordalStructure { order, cliques, tree_edges })
}

/// Maximum-weight spanning tree of the clique intersection graph (Kruskal).
pub(crate) fn max_weight_tree(cliques: &[Vec<usize>]) -> Vec<(usize, usize)> {
    let m = cliques.len();
    let mut cand = Vec::new();
    for a in 0..m {
        for b in a + 1..m {
            let w = cliques[a].iter().filter(|x| cliques[b].contains(x)).count();
            cand.push((w, a, b));
        }
    }
    cand.sort_by(|x, y| y.0.cmp(&x.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
    let mut comp: Vec<usize> = (0..m).collect();
    fn find(c: &mut Vec<usize>, x: usize) -> usize {
        let mut r = x;
        while c[r] != r {
            r = c[r];
        }
        c[x] = r;
        r
    }
    let mut edges = Vec::new();
    for (_, a, b) in cand {
        let (ra, rb) = (find(&mut comp, a), find(&mut comp, b));
        if ra != rb {
            comp[ra] = rb;
            edges.push((a, b));
        }
    }
    edges
}
