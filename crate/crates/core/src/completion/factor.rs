//! Levenberg–Marquardt on n×k factors: min Σ_{ij ∈ V∪E} (p_i·p_j − a_ij)².

use super::{CompletionResult, TrailStep};
use crate::linalg::{Configuration, Mat};
use crate::partial::PartialMatrix;
use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Objective value accepted as an exact factorization.
pub const FOUND_OBJECTIVE: f64 = 1e-12;

fn objective(a: &[(usize, usize, f64)], p: &Mat) -> f64 {
    a.iter()
        .map(|&(i, j, v)| {
            let r = p.row(i).dot(&p.row(j)) - v;
            r * r
        })
        .sum()
}

/// Levenberg–Marquardt from `p0`; rows with `frozen[i]` stay fixed.
/// Returns the final factor and objective.
pub fn levenberg_marquardt(
    a: &PartialMatrix,
    p0: &Mat,
    frozen: &[bool],
    max_iter: usize,
) -> (Mat, f64) {
    let spec = a.specified();
    let (n, k) = p0.shape();
    let mut free_index = vec![usize::MAX; n];
    let mut nf = 0;
    for i in 0..n {
        if !frozen.get(i).copied().unwrap_or(false) {
            free_index[i] = nf;
            nf += 1;
        }
    }
    let mut p = p0.clone();
    let mut f = objective(&spec, &p);
    if nf == 0 || k == 0 {
        return (p, f);
    }
    let dim = nf * k;
    let scale = a.scale();
    let target = 1e-30 * scale * scale;
    let mut lambda = 1e-3;
    let mut history = vec![f];
    for _ in 0..max_iter {
        if f <= target {
            break;
        }
        let mut jtj = Mat::zeros(dim, dim);
        let mut g = DVector::zeros(dim);
        for &(i, j, v) in &spec {
            let r = p.row(i).dot(&p.row(j)) - v;
            // derivative blocks: d/dp_i = p_j, d/dp_j = p_i (2 p_i on the diagonal)
            let mut parts: Vec<(usize, nalgebra::RowDVector<f64>)> = Vec::with_capacity(2);
            if i == j {
                if free_index[i] != usize::MAX {
                    parts.push((free_index[i], p.row(i) * 2.0));
                }
            } else {
                if free_index[i] != usize::MAX {
                    parts.push((free_index[i], p.row(j).clone_owned()));
                }
                if free_index[j] != usize::MAX {
                    parts.push((free_index[j], p.row(i).clone_owned()));
                }
            }
            for (x, dx) in &parts {
                for c in 0..k {
                    g[x * k + c] += r * dx[c];
                }
                for (y, dy) in &parts {
                    for c in 0..k {
                        for d in 0..k {
                            jtj[(x * k + c, y * k + d)] += dx[c] * dy[d];
                        }
                    }
                }
            }
        }
        let mut improved = false;
        for _ in 0..30 {
            let mut m = jtj.clone();
            // isotropic damping keeps steps orthogonal to ker J (gauge and fibre directions)
            let mean = ((0..dim).map(|t| jtj[(t, t)]).sum::<f64>() / dim as f64).max(1e-12);
            for t in 0..dim {
                m[(t, t)] += lambda * mean;
            }
            let step = match m.cholesky() {
                Some(c) => c.solve(&(-&g)),
                None => {
                    lambda *= 10.0;
                    continue;
                }
            };
            let mut q = p.clone();
            for i in 0..n {
                let fi = free_index[i];
                if fi != usize::MAX {
                    for c in 0..k {
                        q[(i, c)] += step[fi * k + c];
                    }
                }
            }
            let fq = objective(&spec, &q);
            if fq < f {
                p = q;
                f = fq;
                lambda = (lambda / 3.0).max(1e-15);
                improved = true;
                break;
            }
            lambda *= 4.0;
            if lambda > 1e16 {
                break;
            }
        }
        if !improved {
            break;
        }
        history.push(f);
        let h = history.len();
        if h > 25 && f > FOUND_OBJECTIVE * 1e-6 && f > 0.999 * history[h - 25] {
            break;
        }
    }
    (p, f)
}

/// Principal-component truncation of a configuration to k columns.
pub fn truncate(c: &Configuration, k: usize) -> Mat {
    let g = c.gram();
    let (vals, vecs) = crate::linalg::sym_eigen(&g);
    let n = c.n();
    let mut out = Mat::zeros(n, k);
    for t in 0..k.min(n) {
        let l = vals[t].max(0.0).sqrt();
        out.set_column(t, &(vecs.column(t) * l));
    }
    out
}

/// Entries uniform on [−s√3, s√3] (unit variance for s = 1).
fn noise(rng: &mut ChaCha8Rng, n: usize, k: usize, s: f64) -> Mat {
    let h = s * 3f64.sqrt();
    Mat::from_fn(n, k, |_, _| rng.gen_range(-h..h))
}

/// Local search for a rank-k factor with random restarts; Some iff some
/// restart reaches objective ≤ 1e-12.
pub fn low_rank_factor_search(
    a: &PartialMatrix,
    k: usize,
    restarts: usize,
    seed: u64,
    warm: Option<&Configuration>,
) -> Option<CompletionResult> {
    let n = a.n();
    if k == 0 {
        return None;
    }
    let mean_diag = a.diag().iter().sum::<f64>() / n.max(1) as f64;
    let s = (mean_diag.max(1e-12) / k as f64).sqrt();
    let warm_k = warm.map(|c| truncate(c, k));
    for r in 0..restarts.max(1) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (r as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let p0 = match (&warm_k, r) {
            (Some(w), 0) => w.clone(),
            (Some(w), r) if r % 2 == 1 => w + noise(&mut rng, n, k, s * 0.3),
            _ => noise(&mut rng, n, k, s),
        };
        let (p, f) = levenberg_marquardt(a, &p0, &[], 400);
        if f <= FOUND_OBJECTIVE {
            let c = Configuration::new(p);
            let trail = vec![TrailStep::new(
                "factor_search",
                format!("rank-{k} factor found at restart {r}, objective {f:.3e}"),
            )];
            return Some(CompletionResult::from_configuration(a, c, trail));
        }
    }
    None
}

/// Refine a configuration at its current dimension.
pub fn polish(a: &PartialMatrix, c: &Configuration, frozen: &[bool]) -> Configuration {
    let before = a.residual_config(c);
    let (p, _) = levenberg_marquardt(a, &c.points, frozen, 100);
    let out = Configuration::new(p);
    if a.residual_config(&out) < before {
        out
    } else {
        c.clone()
    }
}
