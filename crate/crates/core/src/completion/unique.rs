//! Uniqueness of the psd completion, probed entry by entry.

use crate::error::Result;
use crate::graph::Edge;
use crate::linalg::Mat;
use crate::partial::PartialMatrix;
use crate::sdp::{solve_facial, unit, Entry};

#[derive(Clone, Debug, PartialEq)]
pub enum Uniqueness {
    /// Every unspecified entry is pinned; `completion` is the common point.
    Unique { completion: Mat, max_width: f64 },
    /// Two completions differing by `width` on `pair`.
    NonUnique { pair: Edge, low: Mat, high: Mat, width: f64 },
}

impl Uniqueness {
    pub fn is_unique(&self) -> bool {
        matches!(self, Uniqueness::Unique { .. })
    }
}

/// For each unspecified pair, maximise and minimise X_ij over the completions.
pub fn uniqueness_probe(a: &PartialMatrix, tol: f64) -> Result<Uniqueness> {
    let base = a.constraints();
    let mut completion = Mat::from_fn(a.n(), a.n(), |i, j| a.value(i, j).unwrap_or(0.0));
    let mut max_width = 0.0f64;
    let non_edges = a.graph().non_edges();
    // feasibility is checked even without free entries
    if non_edges.is_empty() {
        solve_facial(&base, 1e-9)?;
    }
    for (i, j) in non_edges {
        let mut extremes: Vec<(f64, Mat)> = Vec::with_capacity(2);
        for sign in [1.0, -1.0] {
            let mut p = base.clone();
            p.objective = unit(0, i, j).into_iter().map(|e| Entry { v: sign * e.v, ..e }).collect();
            let sol = solve_facial(&p, 1e-9)?;
            extremes.push((sol.x[0][(i, j)], sol.x[0].clone()));
        }
        let (hi, lo) = (&extremes[0], &extremes[1]);
        let width = hi.0 - lo.0;
        if width > tol {
            return Ok(Uniqueness::NonUnique { pair: (i, j), low: lo.1.clone(), high: hi.1.clone(), width });
        }
        max_width = max_width.max(width);
        completion = (&hi.1 + &lo.1) * 0.5;
    }
    Ok(Uniqueness::Unique { completion, max_width })
}
