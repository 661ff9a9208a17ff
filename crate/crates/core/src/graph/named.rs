//! Fixed graphs used throughout: complete graphs, cycles, paths, K222, V8,
//! C5xC2 and the Petersen graph.
//!
//! V8 and C5xC2 use a fixed numbering. Labels are 1-based ("1".."n") while
//! indices are 0-based, so label `k` sits at index `k-1`.

use super::{Edge, Graph};
use crate::error::{Error, Result};

fn build(n: usize, edges: &[Edge]) -> Graph {
    Graph::from_edges(n, edges).expect("static edge list is valid")
}

/// Edges of V8 in 1-based labels: the 8-cycle plus the four long chords.
pub const V8_EDGES_1B: [Edge; 12] = [
    (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (7, 8), (8, 1),
    (1, 5), (2, 6), (3, 7), (4, 8),
];

/// Edges of C5xC2 in 1-based labels: outer cycle 1-3-5-7-9, inner cycle
/// 2-4-6-8-10, rungs (1,2),(3,4),(5,6),(7,8),(9,10).
pub const C5XC2_EDGES_1B: [Edge; 15] = [
    (1, 2), (1, 3), (1, 9), (2, 4), (2, 10),
    (3, 4), (3, 5), (4, 6), (5, 6), (5, 7),
    (6, 8), (7, 8), (7, 9), (8, 10), (9, 10),
];

/// Stretched pair used when flattening V8 (0-based).
pub const V8_STRETCH: Edge = (0, 3);
/// Stretched pair used when flattening C5xC2 (0-based).
pub const C5XC2_STRETCH: Edge = (2, 7);

fn from_one_based(n: usize, edges: &[Edge]) -> Graph {
    let e: Vec<Edge> = edges.iter().map(|&(a, b)| (a - 1, b - 1)).collect();
    build(n, &e)
}

pub fn v8() -> Graph {
    from_one_based(8, &V8_EDGES_1B)
}

pub fn c5xc2() -> Graph {
    from_one_based(10, &C5XC2_EDGES_1B)
}

pub fn complete(n: usize) -> Graph {
    let mut e = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            e.push((i, j));
        }
    }
    build(n, &e)
}

pub fn cycle(n: usize) -> Graph {
    assert!(n >= 3, "cycle needs at least 3 vertices");
    let e: Vec<Edge> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    build(n, &e)
}

pub fn path(n: usize) -> Graph {
    let e: Vec<Edge> = (1..n).map(|i| (i - 1, i)).collect();
    build(n, &e)
}

/// K6 with the matching (1,4),(2,5),(3,6) removed.
pub fn k222() -> Graph {
    let mut e = Vec::new();
    for i in 0..6 {
        for j in i + 1..6 {
            if j != i + 3 {
                e.push((i, j));
            }
        }
    }
    build(6, &e)
}

pub fn petersen() -> Graph {
    let mut e = Vec::new();
    for i in 0..5 {
        e.push((i, (i + 1) % 5));
        e.push((i, i + 5));
        e.push((5 + i, 5 + (i + 2) % 5));
    }
    build(10, &e)
}

/// Resolve a built-in graph name: K5, K222, V8, C5xC2, petersen, K<n>, C<n>, path<n>.
pub fn by_name(name: &str) -> Result<Graph> {
    let lower = name.to_ascii_lowercase();
    let parse_n = |s: &str| -> Option<usize> { s.parse::<usize>().ok() };
    let g = match lower.as_str() {
        "k222" | "k2,2,2" | "octahedron" => Some(k222()),
        "v8" => Some(v8()),
        "c5xc2" | "c5x2" | "prism5" => Some(c5xc2()),
        "petersen" => Some(petersen()),
        _ => {
            if let Some(rest) = lower.strip_prefix("path") {
                parse_n(rest).filter(|&n| n >= 1).map(path)
            } else if let Some(rest) = lower.strip_prefix('k') {
                parse_n(rest).filter(|&n| n >= 1).map(complete)
            } else if let Some(rest) = lower.strip_prefix('c') {
                parse_n(rest).filter(|&n| n >= 3).map(cycle)
            } else {
                None
            }
        }
    };
    g.ok_or_else(|| Error::Parse(format!("unknown graph name '{name}'")))
}
