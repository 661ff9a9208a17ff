//! Acceptance criteria 1-9. Runs without the libtest harness so that every
//! criterion prints its own PASS/FAIL line.

mod common;

use common::*;
use gramdim::bridges::{
    check_strong_arnold, euclidean_to_gram, gram_to_euclidean, maxcut_demo, nu_lower_bound_instance, phi, phi_inverse,
    realize_edm, sap_operator, zero_extension, EdmInstance, SapResult,
};
use gramdim::completion::chordal::complete_chordal;
use gramdim::completion::cycle::{cycle_gd2_decide, cycle_gd2_decide_entries};
use gramdim::completion::factor::low_rank_factor_search;
use gramdim::completion::pipeline::flatten_and_fold;
use gramdim::completion::unique::{uniqueness_probe, Uniqueness};
use gramdim::graph::named::{c5xc2, complete, cycle, k222, path, petersen, v8, C5XC2_STRETCH, V8_STRETCH};
use gramdim::graph::{classify_gram_dimension, Edge, GdBand, Graph};
use gramdim::linalg::{min_eigenvalue, numerical_rank, Configuration, Mat};
use gramdim::partial::{canonical_k222, project, ElliptopeVector, PartialMatrix};
use gramdim::sdp::{barvinok_bound, flatten, pinned_flatten, rank_reduce, Entry, SdpProblem};
use nalgebra::DVector;
use num_rational::BigRational;
use rand::Rng;
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

// ---------------------------------------------------------------- 1

fn criterion_1() -> Outcome {
    let t0 = Instant::now();
    let mut r = rng(101);
    for t in 0..10 {
        let g = random_tree(r.gen_range(5..=14), &mut r);
        let b = classify_gram_dimension(&g);
        ensure(b.rank() <= 2, || format!("tree #{t}: band {}", b.describe()))?;
    }
    for t in 0..10 {
        let g = random_series_parallel(r.gen_range(6..=14), &mut r);
        let b = classify_gram_dimension(&g);
        ensure(b.rank() <= 3, || format!("series-parallel #{t}: band {}", b.describe()))?;
    }
    let mut sums = vec![v8(), c5xc2()];
    for _ in 0..10 {
        sums.push(random_template_sum(&mut r));
    }
    for (t, g) in sums.iter().enumerate() {
        let b = classify_gram_dimension(g);
        ensure(b.rank() <= 4, || format!("gd<=4 graph #{t} (n={}): band {}", g.n(), b.describe()))?;
    }
    for (name, g) in [("K5", complete(5)), ("K222", k222()), ("Petersen", petersen())] {
        match classify_gram_dimension(&g) {
            GdBand::AtLeast5(w) => ensure(w.verify(&g), || format!("{name}: witness does not verify"))?,
            b => return Err(format!("{name}: band {}", b.describe())),
        }
    }
    let el = t0.elapsed();
    ensure(el < Duration::from_secs(10), || format!("took {el:?}"))?;
    Ok(format!("34 graphs classified in {:.2}s", el.as_secs_f64()))
}

// ---------------------------------------------------------------- 2

/// Largest rank of a fully specified principal submatrix (test-side, SVD).
fn clique_rank_oracle(a: &PartialMatrix) -> usize {
    let g = a.graph();
    g.maximal_cliques()
        .iter()
        .map(|c| {
            let m = Mat::from_fn(c.len(), c.len(), |i, j| a.value(c[i], c[j]).unwrap());
            svd_rank(&m, 1e-7)
        })
        .max()
        .unwrap_or(0)
}

fn oracle_min_rank(a: &PartialMatrix, max_k: usize, restarts: usize, seed: u64) -> Option<usize> {
    (1..=max_k).find(|&k| low_rank_factor_search(a, k, restarts, seed, None).is_some())
}

fn criterion_2() -> Outcome {
    let mut r = rng(202);
    let mut worst = 0.0f64;
    for t in 0..100 {
        let n = r.gen_range(3..=10);
        let g = random_chordal(n, &mut r);
        let d = r.gen_range(1..=n);
        let a = random_instance(&g, d, &mut r);
        let res = complete_chordal(&a, 1e-9).map_err(|e| format!("#{t}: {e}"))?;
        let mcr = clique_rank_oracle(&a);
        ensure(res.rank == mcr, || format!("#{t}: rank {} vs clique rank {mcr}", res.rank))?;
        ensure(res.residual <= 1e-8, || format!("#{t}: residual {:.2e}", res.residual))?;
        let o = oracle_min_rank(&a, mcr, 100, t as u64);
        ensure(o == Some(mcr), || format!("#{t}: oracle minimum rank {o:?} vs {mcr}"))?;
        worst = worst.max(res.residual);
    }
    Ok(format!("100 instances, rank = clique rank = oracle, worst residual {worst:.1e}"))
}

// ---------------------------------------------------------------- 3

fn criterion_3() -> Outcome {
    let a = canonical_k222();
    match uniqueness_probe(&a, 1e-6).map_err(|e| e.to_string())? {
        Uniqueness::Unique { completion, max_width } => {
            for (i, j) in [(0, 3), (1, 4), (2, 5)] {
                let v = completion[(i, j)];
                ensure(v.abs() <= 1e-6, || format!("entry ({i},{j}) = {v:.2e}"))?;
            }
            ensure(max_width <= 1e-6, || format!("width {max_width:.2e}"))?;
        }
        other => return Err(format!("probe: {other:?}")),
    }
    let f = flatten(&a, (0, 3), 1e-9).map_err(|e| e.to_string())?;
    let rk = numerical_rank(&f.x, 1e-7);
    ensure(rk == 5, || format!("flatten rank {rk}"))?;
    let found = low_rank_factor_search(&a, 4, 100, 3, None);
    ensure(found.is_none(), || "rank-4 factor found".into())?;
    Ok("unique, pinned to 0; flatten rank 5; no rank-4 factor in 100 restarts".into())
}

// ---------------------------------------------------------------- 4

fn pd_instance(g: &Graph, r: &mut rand_chacha::ChaCha8Rng) -> PartialMatrix {
    let n = g.n();
    let m = random_points(n, n, r);
    project(&(&m * m.transpose() + Mat::identity(n, n) * 0.01), g).unwrap()
}

fn criterion_4() -> Outcome {
    let mut r = rng(404);
    let (mut certified, mut total) = (0, 0);
    let mut slowest = Duration::ZERO;
    for (name, g) in [("V8", v8()), ("C5xC2", c5xc2())] {
        for t in 0..20 {
            let a = pd_instance(&g, &mut r);
            let t0 = Instant::now();
            let res = flatten_and_fold(&a, 4, t).map_err(|e| format!("{name} #{t}: {e}"))?;
            let el = t0.elapsed();
            slowest = slowest.max(el);
            ensure(res.rank <= 4, || format!("{name} #{t}: rank {}", res.rank))?;
            ensure(res.residual <= 1e-6, || format!("{name} #{t}: residual {:.2e}", res.residual))?;
            ensure(!res.trail.is_empty(), || format!("{name} #{t}: empty trail"))?;
            ensure(el < Duration::from_secs(60), || format!("{name} #{t}: {el:?}"))?;
            total += 1;
            if !res.trail.iter().any(|s| s.step == "fallback") {
                certified += 1;
            }
        }
    }
    Ok(format!(
        "40 instances at rank <= 4; fold toolkit alone: {certified}/{total} ({:.0}%); slowest {:.0} ms",
        100.0 * certified as f64 / total as f64,
        slowest.as_secs_f64() * 1e3
    ))
}

// ---------------------------------------------------------------- 5

fn check_stress(tag: &str, om: &gramdim::sdp::StressMatrix, x: &Mat, p: &Configuration, n: usize) -> Result<(), String> {
    ensure(om.support_violation() == 0.0, || format!("{tag}: support violation {:.2e}", om.support_violation()))?;
    let me = om.min_eigenvalue();
    ensure(me >= -1e-8, || format!("{tag}: min eigenvalue {me:.2e}"))?;
    let eq = om.equilibrium_residuals(p).into_iter().fold(0.0, f64::max);
    ensure(eq <= 1e-6, || format!("{tag}: equilibrium {eq:.2e}"))?;
    let (rx, ro) = (numerical_rank(x, 1e-7), om.rank(1e-7));
    ensure(rx + ro <= n, || format!("{tag}: rank X {rx} + rank Omega {ro} > {n}"))
}

fn criterion_5() -> Outcome {
    let mut r = rng(505);
    let (mut flat, mut pinned, mut declined) = (0, 0, 0);
    let mut cases: Vec<(PartialMatrix, Edge)> = Vec::new();
    for _ in 0..10 {
        cases.push((pd_instance(&v8(), &mut r), V8_STRETCH));
        cases.push((pd_instance(&c5xc2(), &mut r), C5XC2_STRETCH));
    }
    for n in 4..=8 {
        cases.push((random_instance(&cycle(n), 3, &mut r), (0, 2)));
    }
    cases.push((canonical_k222(), (0, 3)));
    for (t, (a, e0)) in cases.iter().enumerate() {
        let n = a.n();
        let f = flatten(a, *e0, 1e-9).map_err(|e| format!("#{t}: {e}"))?;
        check_stress(&format!("flatten #{t}"), &f.stress, &f.x, &f.configuration, n)?;
        flat += 1;
        // pin the first half of the flattened configuration, free the rest
        let g = a.graph();
        let v1: Vec<usize> = (0..n / 2 + 1).collect();
        let v2: Vec<usize> = (n / 2 + 1..n).collect();
        let Some(st) = v1.iter().flat_map(|&s| v2.iter().map(move |&t| (s, t))).find(|&(s, t)| !g.has_edge(s, t))
        else {
            continue;
        };
        let pin = f.configuration.subset(&v1).compress(1e-7);
        let pf = match pinned_flatten(&pin, a, &v2, st, 1e-9) {
            Ok(pf) => pf,
            // no stress exists when the pinned vectors already fix the objective
            Err(gramdim::Error::Numerical(m)) if m.contains("constant") => {
                declined += 1;
                continue;
            }
            Err(e) => return Err(format!("pinned #{t}: {e}")),
        };
        let tag = format!("pinned #{t}");
        let om = &pf.stress;
        ensure(om.support_violation() == 0.0, || format!("{tag}: support violation"))?;
        let zs = &pf.z_stress;
        let scale = common::max_abs(zs).max(1.0);
        let me = min_eigenvalue(zs) / scale;
        ensure(me >= -1e-8, || format!("{tag}: min eigenvalue {me:.2e}"))?;
        let eq = pf.equilibrium_residuals().into_iter().fold(0.0, f64::max);
        ensure(eq <= 1e-6, || format!("{tag}: equilibrium {eq:.2e}"))?;
        let (rz, ro) = (numerical_rank(&pf.z, 1e-7), numerical_rank(zs, 1e-7));
        ensure(rz + ro <= pf.z.nrows(), || format!("{tag}: rank Z {rz} + rank Omega {ro} > {}", pf.z.nrows()))?;
        pinned += 1;
    }
    ensure(pinned >= 20, || format!("only {pinned} pinned outputs"))?;
    Ok(format!("{flat} flatten and {pinned} pinned_flatten outputs checked ({declined} pinned programs without stress)"))
}

// ---------------------------------------------------------------- 6

const CYCLE_RESTARTS: usize = 1000;

fn criterion_6() -> Outcome {
    let mut r = rng(606);
    let mut yes = 0;
    for n in 3..=8 {
        for t in 0..100 {
            let mut angles: Vec<f64> = (0..n).map(|_| r.gen_range(0.0..PI)).collect();
            if t % 2 == 0 {
                // close the cycle in the plane
                let s: f64 = angles[..n - 1].iter().map(|&a| if r.gen_bool(0.5) { a } else { -a }).sum();
                let c = (-s).rem_euclid(2.0 * PI);
                angles[n - 1] = if c <= PI { c } else { 2.0 * PI - c };
            }
            let a = cycle_instance(&angles);
            // the oracle accepts objective 1e-12 over 2n terms
            let decided = cycle_gd2_decide_entries(&angles, 1e-6 / (2.0 * n as f64).sqrt()).is_some();
            // planar closings of C_n are isolated sign patterns among many
            // local minima of the factor objective (about 6% basins at n = 7)
            let oracle = low_rank_factor_search(&a, 2, CYCLE_RESTARTS, (n * 1000 + t) as u64, None).is_some();
            ensure(decided == oracle, || format!("C{n} #{t}: angle test {decided}, oracle {oracle}, angles {angles:?}"))?;
            yes += decided as usize;
        }
    }
    for n in 3..=8 {
        let zero = vec![0.0; n];
        let (eps, k) = cycle_gd2_decide(&zero, 1e-9).ok_or("all-zero angles rejected")?;
        ensure(k == 0 && eps.iter().all(|&e| e == 1), || format!("zero angles: {eps:?} {k}"))?;
        let full = vec![2.0 * PI / n as f64; n];
        let (_, k) = cycle_gd2_decide(&full, 1e-9).ok_or("2pi-sum rejected")?;
        ensure(k.abs() == 1, || format!("2pi sum gives k = {k}"))?;
        ensure(low_rank_factor_search(&cycle_instance(&full), 2, 20, 1, None).is_some(), || "oracle on 2pi sum".into())?;
    }
    Ok(format!("600 angle vectors agree ({yes} planar), special witnesses decided"))
}

fn cycle_instance(angles: &[f64]) -> PartialMatrix {
    let n = angles.len();
    let values: BTreeMap<Edge, f64> = (0..n)
        .map(|i| {
            let j = (i + 1) % n;
            ((i.min(j), i.max(j)), angles[i].cos())
        })
        .collect();
    ElliptopeVector::new(cycle(n), values).unwrap().to_partial()
}

// ---------------------------------------------------------------- 7

fn rat(x: f64) -> BigRational {
    BigRational::from_float(x).unwrap()
}

fn criterion_7() -> Outcome {
    let mut r = rng(707);
    // exact round trip on dyadic data, cross-checked in rational arithmetic
    for t in 0..100 {
        let g = random_graph(r.gen_range(2..=8), 0.5, &mut r);
        let diag: Vec<f64> = (0..g.n()).map(|_| r.gen_range(1..=32) as f64 / 8.0).collect();
        let entries: BTreeMap<Edge, f64> = g.edges().map(|e| (e, r.gen_range(-16..=16) as f64 / 16.0)).collect();
        let a = PartialMatrix::new(g.clone(), diag.clone(), entries.clone()).unwrap();
        let d = phi(&a);
        let n = g.n();
        for (&(i, j), &v) in &entries {
            let exact = rat(diag[i]) + rat(diag[j]) - rat(2.0) * rat(v);
            ensure(rat(d.distance(i, j).unwrap()) == exact, || format!("#{t}: d({i},{j})"))?;
        }
        for i in 0..n {
            ensure(rat(d.distance(i, n).unwrap()) == rat(diag[i]), || format!("#{t}: d(0,{i})"))?;
        }
        let back = phi_inverse(&d).map_err(|e| e.to_string())?;
        ensure(back == a, || format!("#{t}: round trip differs"))?;
    }
    // witness transport in both directions
    let mut worst = 0.0f64;
    for t in 0..100 {
        let g = random_graph(r.gen_range(3..=7), 0.6, &mut r);
        let k = r.gen_range(1..=3);
        let pts = random_points(g.n(), k, &mut r);
        let a = project(&(&pts * pts.transpose()), &g).unwrap();
        let d = phi(&a);
        let u = gram_to_euclidean(&Configuration::new(pts));
        let e1 = d.residual(&u);
        ensure(e1 <= 1e-8, || format!("#{t}: Gram to distance residual {e1:.2e}"))?;
        let u2 = realize_edm(&d, k, 20, t).ok_or_else(|| format!("#{t}: no realization in dimension {k}"))?;
        let p2 = euclidean_to_gram(&u2, g.n());
        ensure(p2.dim() == k, || format!("#{t}: dimension {}", p2.dim()))?;
        let e2 = a.residual_config(&p2);
        ensure(e2 <= 1e-8, || format!("#{t}: distance to Gram residual {e2:.2e}"))?;
        worst = worst.max(e1).max(e2);
    }
    // ed(G) <= gd(G) - 1 on a corpus
    let corpus = ed_corpus();
    let mut table = Vec::new();
    for (name, g, gd) in &corpus {
        let mut ed = 0;
        for s in 0..4u64 {
            let pts = random_points(g.n(), g.n(), &mut r);
            let dist: BTreeMap<Edge, f64> =
                g.edges().map(|(i, j)| ((i, j), (pts.row(i) - pts.row(j)).norm_squared())).collect();
            let inst = EdmInstance::new(g.clone(), dist, None).unwrap();
            let k = (0..g.n())
                .find(|&k| realize_edm(&inst, k, 10, s).is_some())
                .ok_or_else(|| format!("{name}: no realization"))?;
            ed = ed.max(k);
        }
        ensure(ed + 1 <= *gd, || format!("{name}: ed {ed} vs gd {gd}"))?;
        table.push(format!("{name}:{ed}/{gd}"));
    }
    // zero extension raises the minimum rank by one
    for (t, x) in zero_extension_corpus(&mut r).iter().enumerate() {
        let a = x.to_partial();
        let y = zero_extension(x);
        let ra = oracle_min_rank(&a, a.n(), 20, t as u64).ok_or("no completion")?;
        let ry = oracle_min_rank(&y, y.n(), 20, t as u64).ok_or("no completion")?;
        ensure(ry == ra + 1, || format!("#{t}: {ra} -> {ry}"))?;
    }
    Ok(format!(
        "round trip exact x100; transport worst {worst:.1e}; ed/gd {}; zero extension +1 x10",
        table.join(" ")
    ))
}

fn named(n: usize, edges: &[Edge]) -> Graph {
    Graph::from_edges(n, edges).unwrap()
}

/// Graphs whose Gram dimension is known: the band is exact up to 4, and
/// gd(K5) = 5.
fn ed_corpus() -> Vec<(&'static str, Graph, usize)> {
    let band = |g: &Graph| classify_gram_dimension(g).rank();
    let mut out = vec![
        ("K2", complete(2)),
        ("P4", path(4)),
        ("K13", named(4, &[(0, 1), (0, 2), (0, 3)])),
        ("K3", complete(3)),
        ("C4", cycle(4)),
        ("C5", cycle(5)),
        ("C6", cycle(6)),
        ("diamond", named(4, &[(0, 1), (0, 2), (1, 2), (1, 3), (2, 3)])),
        ("K4", complete(4)),
        ("W4", named(5, &[(0, 1), (1, 2), (2, 3), (0, 3), (0, 4), (1, 4), (2, 4), (3, 4)])),
        ("prism", named(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (0, 3), (1, 4), (2, 5)])),
        (
            "cube",
            named(
                8,
                &[(0, 1), (1, 2), (2, 3), (0, 3), (4, 5), (5, 6), (6, 7), (4, 7), (0, 4), (1, 5), (2, 6), (3, 7)],
            ),
        ),
        ("V8", v8()),
        ("C5xC2", c5xc2()),
    ]
    .into_iter()
    .map(|(n, g)| {
        let b = band(&g);
        (n, g, b)
    })
    .collect::<Vec<_>>();
    out.push(("K5", complete(5), 5));
    out
}

fn zero_extension_corpus(r: &mut rand_chacha::ChaCha8Rng) -> Vec<ElliptopeVector> {
    let mut out = vec![ElliptopeVector::new(complete(2), [((0, 1), 1.0)].into()).unwrap()];
    let graphs = [path(3), complete(3), cycle(4), cycle(5), complete(4), cycle(4), path(4), complete(3), cycle(6)];
    for (t, g) in graphs.iter().enumerate() {
        let k = 1 + t % 3;
        let mut p = random_points(g.n(), k, r);
        for mut row in p.row_iter_mut() {
            let nrm = row.norm();
            row /= nrm;
        }
        let gram = &p * p.transpose();
        let values = g.edges().map(|(i, j)| ((i, j), gram[(i, j)].clamp(-1.0, 1.0))).collect();
        out.push(ElliptopeVector::new(g.clone(), values).unwrap());
    }
    out
}

// ---------------------------------------------------------------- 8

fn random_sdp(r: &mut rand_chacha::ChaCha8Rng) -> (SdpProblem, Vec<Mat>) {
    let n = r.gen_range(2..=10);
    let m = r.gen_range(1..=20);
    let x0 = {
        let p = random_points(n, n, r);
        &p * p.transpose() + Mat::identity(n, n) * 0.1
    };
    let mut p = SdpProblem::single(n);
    for _ in 0..m {
        let b = random_points(n, n, r);
        let a = (&b + b.transpose()) * 0.5;
        let mut entries = Vec::new();
        for i in 0..n {
            for j in i..n {
                entries.push(Entry::new(0, i, j, a[(i, j)]));
            }
        }
        p.add_constraint(entries, (&a * &x0).trace());
    }
    (p, vec![x0])
}

fn criterion_8() -> Outcome {
    let mut r = rng(808);
    let mut graphs = vec![("V8".to_string(), v8()), ("C5xC2".to_string(), c5xc2())];
    while graphs.len() < 7 {
        let g = random_template_sum(&mut r);
        if classify_gram_dimension(&g).rank() <= 4 {
            graphs.push((format!("sum{}", graphs.len() - 1), g));
        }
    }
    let mut ranks = Vec::new();
    for (name, g) in &graphs {
        let rep = maxcut_demo(g, 1e-7).map_err(|e| format!("{name}: {e}"))?;
        ensure(rep.reduced_rank <= 4, || format!("{name}: rank {}", rep.reduced_rank))?;
        let x = Mat::from_fn(g.n(), g.n(), |i, j| rep.solution[i][j]);
        ensure(numerical_rank(&x, 1e-7) <= 4, || format!("{name}: solution rank"))?;
        ranks.push(format!("{name}(n={}):{}->{}[{}]", g.n(), rep.solver_rank, rep.reduced_rank, rep.route));
    }
    for t in 0..50 {
        let (p, x0) = random_sdp(&mut r);
        let before = p.residual(&x0);
        let x = rank_reduce(&p, &x0, 1e-9);
        let rk = numerical_rank(&x[0], 1e-7);
        let bound = barvinok_bound(p.m());
        ensure(rk <= bound, || format!("sdp #{t}: rank {rk} above bound {bound} (m = {})", p.m()))?;
        let after = p.residual(&x);
        let scale = x0[0].iter().fold(1.0f64, |a, v| a.max(v.abs()));
        ensure(after <= 10.0 * before.max(1e-12 * scale), || format!("sdp #{t}: residual {after:.2e}"))?;
        ensure(min_eigenvalue(&x[0]) >= -1e-8 * scale, || format!("sdp #{t}: left the cone"))?;
    }
    Ok(format!("max-cut ranks {}; 50 SDPs meet the Barvinok bound", ranks.join(" ")))
}

// ---------------------------------------------------------------- 9

/// Nullity of X ↦ MX on symmetric X vanishing on V ∪ E, from the
/// eigenvalues of the Gram matrix of the explicitly assembled operator.
fn dense_nullity(m: &Mat, g: &Graph, rel: f64) -> usize {
    let n = g.n();
    let free = g.non_edges();
    if free.is_empty() {
        return 0;
    }
    let mut cols = Vec::new();
    for &(i, j) in &free {
        let mut x = Mat::zeros(n, n);
        x[(i, j)] = 1.0;
        x[(j, i)] = 1.0;
        let y = m * x;
        cols.push(DVector::from_iterator(n * n, y.iter().copied()));
    }
    let op = Mat::from_columns(&cols);
    let gram = op.transpose() * &op;
    let ev = gram.symmetric_eigenvalues();
    let top = ev.max();
    ev.iter().filter(|&&l| l <= (rel * rel) * top || top == 0.0).count()
}

fn random_supported_psd(g: &Graph, rank_cap: usize, r: &mut rand_chacha::ChaCha8Rng) -> Mat {
    let n = g.n();
    let mut m = Mat::zeros(n, n);
    let cliques = g.maximal_cliques();
    for _ in 0..rank_cap {
        let c = &cliques[r.gen_range(0..cliques.len())];
        let mut v = DVector::zeros(n);
        for &i in c {
            v[i] = r.gen_range(-1.0..1.0);
        }
        m += &v * v.transpose();
    }
    m
}

fn criterion_9() -> Outcome {
    let mut r = rng(909);
    let (mut holds, mut fails) = (0, 0);
    for t in 0..50 {
        let n = r.gen_range(3..=7);
        let g = random_graph(n, 0.5, &mut r);
        if g.edge_count() == 0 {
            continue;
        }
        let m = random_supported_psd(&g, r.gen_range(1..=n + 2), &mut r);
        let res = check_strong_arnold(&m, &g, 1e-8).map_err(|e| format!("#{t}: {e}"))?;
        let nullity = dense_nullity(&m, &g, 1e-8);
        ensure(res.holds() == (nullity == 0), || format!("#{t}: checker {} vs nullity {nullity}", res.holds()))?;
        if let SapResult::Fails { witness } = &res {
            let scale = common::max_abs(witness);
            ensure(scale > 0.0, || format!("#{t}: zero witness"))?;
            for i in 0..n {
                ensure(witness[(i, i)] == 0.0, || format!("#{t}: witness diagonal"))?;
                for j in 0..n {
                    ensure((witness[(i, j)] - witness[(j, i)]).abs() == 0.0, || format!("#{t}: asymmetric witness"))?;
                    ensure(!g.has_edge(i, j) || witness[(i, j)] == 0.0, || format!("#{t}: witness on an edge"))?;
                }
            }
            let mw = common::max_abs(&(&m * witness));
            ensure(mw <= 1e-6 * scale * common::max_abs(&m).max(1.0), || format!("#{t}: |MX| = {mw:.2e}"))?;
            fails += 1;
        } else {
            holds += 1;
        }
        // the library operator and the test-side one describe the same map
        let (op, _) = sap_operator(&m, &g);
        ensure(op.nrows() == n * n, || "operator shape".into())?;
    }
    let s = 2f64.sqrt();
    let v = DVector::from_vec(vec![1.0, 1.0, 0.0, 0.0, 0.0, -s]);
    let m = &v * v.transpose();
    let (a, k) = nu_lower_bound_instance(&m, &k222(), 1e-8).map_err(|e| e.to_string())?;
    ensure(k == 5, || format!("corank {k}"))?;
    match uniqueness_probe(&a, 1e-6).map_err(|e| e.to_string())? {
        Uniqueness::Unique { completion, .. } => {
            let rk = numerical_rank(&completion, 1e-7);
            ensure(rk == 5, || format!("unique completion has rank {rk}"))?;
        }
        other => return Err(format!("probe: {other:?}")),
    }
    Ok(format!("SAP agrees with dense nullity ({holds} hold, {fails} fail); K222 instance unique of rank 5"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("classifier correctness", criterion_1),
        ("chordal rank optimality", criterion_2),
        ("K222 lower-bound instance", criterion_3),
        ("V8 and C5xC2 rank-4 completion", criterion_4),
        ("stress certificate validity", criterion_5),
        ("cycle angle test equivalence", criterion_6),
        ("bridge identities", criterion_7),
        ("max-cut rank application", criterion_8),
        ("SAP and nu machinery", criterion_9),
    ];
    let only: Option<usize> = std::env::var("ACCEPTANCE_ONLY").ok().and_then(|s| s.parse().ok());
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let id = k + 1;
        if only.is_some_and(|o| o != id) {
            continue;
        }
        let t0 = Instant::now();
        let out = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or(p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let secs = t0.elapsed().as_secs_f64();
        match out {
            Ok(msg) => println!("criterion {id} PASS {name} ({secs:.1}s): {msg}"),
            Err(msg) => {
                failed += 1;
                println!("criterion {id} FAIL {name} ({secs:.1}s): {msg}");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
