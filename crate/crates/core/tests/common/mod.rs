#![allow(dead_code)]

use gramdim::graph::named::{c5xc2, v8};
use gramdim::graph::{Edge, Graph};
use gramdim::linalg::Mat;
use gramdim::partial::{project, PartialMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_tree(n: usize, r: &mut ChaCha8Rng) -> Graph {
    let edges: Vec<Edge> = (1..n).map(|v| (r.gen_range(0..v), v)).collect();
    Graph::from_edges(n, &edges).unwrap()
}

/// Random k-tree on n ≥ k+1 vertices: start from K_{k+1}, attach each new
/// vertex to a k-clique that was created earlier.
pub fn random_k_tree(n: usize, k: usize, r: &mut ChaCha8Rng) -> Graph {
    let mut g = Graph::new(n);
    let mut cliques: Vec<Vec<usize>> = Vec::new();
    for i in 0..=k {
        for j in 0..i {
            g.add_edge(j, i).unwrap();
        }
    }
    let base: Vec<usize> = (0..=k).collect();
    for skip in 0..=k {
        cliques.push(base.iter().copied().filter(|&x| x != base[skip]).collect());
    }
    for v in k + 1..n {
        let c = cliques[r.gen_range(0..cliques.len())].clone();
        for &u in &c {
            g.add_edge(u, v).unwrap();
        }
        for skip in 0..k {
            let mut nc: Vec<usize> = c.iter().copied().filter(|&x| x != c[skip]).collect();
            nc.push(v);
            cliques.push(nc);
        }
    }
    g
}

/// Drop each edge with probability p as long as the graph stays connected.
pub fn thin(g: &Graph, p: f64, r: &mut ChaCha8Rng) -> Graph {
    let mut h = g.clone();
    for e in g.edge_list() {
        if r.gen_bool(p) {
            let cand = h.delete_edge(e).unwrap();
            if cand.components().len() == 1 {
                h = cand;
            }
        }
    }
    h
}

/// Series-parallel: a thinned 2-tree.
pub fn random_series_parallel(n: usize, r: &mut ChaCha8Rng) -> Graph {
    let g = random_k_tree(n, 2, r);
    thin(&g, 0.25, r)
}

pub fn random_partial_3_tree(n: usize, r: &mut ChaCha8Rng) -> Graph {
    let g = random_k_tree(n, 3, r);
    thin(&g, 0.2, r)
}

/// Disjoint union of `a` and `b` with b's vertices `bv` identified with
/// a's vertices `av` (both cliques of the same size).
pub fn clique_sum(a: &Graph, av: &[usize], b: &Graph, bv: &[usize]) -> Graph {
    assert_eq!(av.len(), bv.len());
    assert!(a.is_clique(av) && b.is_clique(bv));
    let mut map = vec![usize::MAX; b.n()];
    for (x, &y) in av.iter().zip(bv) {
        map[y] = *x;
    }
    let mut next = a.n();
    for m in map.iter_mut() {
        if *m == usize::MAX {
            *m = next;
            next += 1;
        }
    }
    let mut edges = a.edge_list();
    edges.extend(b.edges().map(|(i, j)| (map[i].min(map[j]), map[i].max(map[j]))));
    edges.sort();
    edges.dedup();
    Graph::from_edges(next, &edges).unwrap()
}

/// A random clique of size `s` in g (None if there is none).
pub fn random_clique(g: &Graph, s: usize, r: &mut ChaCha8Rng) -> Option<Vec<usize>> {
    let mut all: Vec<Vec<usize>> = Vec::new();
    for c in g.maximal_cliques() {
        if c.len() >= s {
            // every s-subset of a maximal clique
            let m = c.len();
            for mask in 0u32..(1 << m) {
                if mask.count_ones() as usize == s {
                    all.push((0..m).filter(|&t| mask >> t & 1 == 1).map(|t| c[t]).collect());
                }
            }
        }
    }
    if all.is_empty() {
        None
    } else {
        Some(all[r.gen_range(0..all.len())].clone())
    }
}

/// V8 or C5×C2 glued to one or two partial 3-trees along edges or vertices.
pub fn random_template_sum(r: &mut ChaCha8Rng) -> Graph {
    let mut g = if r.gen_bool(0.5) { v8() } else { c5xc2() };
    for _ in 0..r.gen_range(1..=2) {
        let t = random_partial_3_tree(r.gen_range(4..=6), r);
        let s = r.gen_range(1..=2);
        let (Some(ga), Some(tb)) = (random_clique(&g, s, r), random_clique(&t, s, r)) else {
            continue;
        };
        g = clique_sum(&g, &ga, &t, &tb);
    }
    g
}

/// Random chordal graph: every new vertex joins a random subset of a
/// maximal clique of the graph so far.
pub fn random_chordal(n: usize, r: &mut ChaCha8Rng) -> Graph {
    let mut g = Graph::new(n);
    for v in 1..n {
        let prefix: Vec<usize> = (0..v).collect();
        let sub = g.induced(&prefix);
        let cl = sub.maximal_cliques();
        let c = &cl[r.gen_range(0..cl.len())];
        let mut any = false;
        for &u in c {
            if r.gen_bool(0.7) {
                g.add_edge(u, v).unwrap();
                any = true;
            }
        }
        if !any {
            g.add_edge(c[0], v).unwrap();
        }
    }
    g
}

pub fn random_graph(n: usize, p: f64, r: &mut ChaCha8Rng) -> Graph {
    let mut g = Graph::new(n);
    for i in 0..n {
        for j in i + 1..n {
            if r.gen_bool(p) {
                g.add_edge(i, j).unwrap();
            }
        }
    }
    g
}

/// n×d matrix with entries uniform in [−1, 1].
pub fn random_points(n: usize, d: usize, r: &mut ChaCha8Rng) -> Mat {
    Mat::from_fn(n, d, |_, _| r.gen_range(-1.0..1.0))
}

/// Projection of the Gram matrix of n random points in R^d.
pub fn random_instance(g: &Graph, d: usize, r: &mut ChaCha8Rng) -> PartialMatrix {
    let p = random_points(g.n(), d, r);
    project(&(&p * p.transpose()), g).unwrap()
}

pub fn max_abs(m: &Mat) -> f64 {
    m.iter().fold(0.0f64, |a, v| a.max(v.abs()))
}

/// Rank via singular values (test-side, independent of the library's
/// eigenvalue route).
pub fn svd_rank(m: &Mat, rel: f64) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let s = m.clone().svd(false, false).singular_values;
    let top = s.max().max(1e-300);
    s.iter().filter(|&&x| x > rel * top.max(1.0)).count()
}

/// Brute-force minor test: try every assignment of host vertices to
/// pattern vertices (or to none).
pub fn naive_has_minor(g: &Graph, h: &Graph) -> bool {
    let (n, k) = (g.n(), h.n());
    if k > n {
        return false;
    }
    let mut assign = vec![0usize; n];
    loop {
        if check_assignment(g, h, &assign) {
            return true;
        }
        // next assignment in base k+1
        let mut pos = 0;
        loop {
            if pos == n {
                return false;
            }
            assign[pos] += 1;
            if assign[pos] <= k {
                break;
            }
            assign[pos] = 0;
            pos += 1;
        }
    }
}

fn check_assignment(g: &Graph, h: &Graph, assign: &[usize]) -> bool {
    let k = h.n();
    let mut sets = vec![Vec::new(); k];
    for (v, &t) in assign.iter().enumerate() {
        if t < k {
            sets[t].push(v);
        }
    }
    if sets.iter().any(|s| s.is_empty()) {
        return false;
    }
    for (s, t) in h.edges() {
        if !sets[s].iter().any(|&a| sets[t].iter().any(|&b| g.has_edge(a, b))) {
            return false;
        }
    }
    sets.iter().all(|s| g.is_connected_set(s))
}
