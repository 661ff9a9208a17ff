mod common;

use common::*;
use gramdim::bridges::{check_strong_arnold, phi, phi_inverse, sap_operator};
use gramdim::completion::chordal::complete_chordal;
use gramdim::completion::cycle::cycle_gd2_decide;
use gramdim::completion::fold::{contract_2node, find_fold_plan, fold_stable_set};
use gramdim::graph::named::{complete, cycle, k222};
use gramdim::graph::{
    classify_gram_dimension, clique_sum_split, has_minor, treewidth_at_most, ComponentKind, GdBand, Graph,
    MinorPattern,
};
use gramdim::linalg::{align, gram_factor, min_eigenvalue, numerical_rank, schur_complement, Configuration, Mat};
use gramdim::partial::{perturb_to_generic, project, ElliptopeVector, GENERIC_CIRCUIT_LEN, GENERIC_MARGIN};
use gramdim::sdp::{barvinok_bound, flatten, rank_reduce, solve, Entry, SdpProblem, SdpStatus};
use proptest::prelude::*;
use proptest::test_runner::RngSeed;
use rand::Rng;

/// Deterministic runs: a fixed seed and no regression files.
fn fixed(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, rng_seed: RngSeed::Fixed(0x6d64), failure_persistence: None, ..ProptestConfig::default() }
}

fn small_graph(seed: u64, max_n: usize) -> Graph {
    let mut r = rng(seed);
    let n = r.gen_range(2..=max_n);
    let p = r.gen_range(0.2..0.9);
    random_graph(n, p, &mut r)
}

fn unit_instance(g: &Graph, d: usize, seed: u64) -> ElliptopeVector {
    let mut r = rng(seed);
    let mut p = random_points(g.n(), d, &mut r);
    for mut row in p.row_iter_mut() {
        let nrm = row.norm();
        row /= nrm;
    }
    ElliptopeVector::from_partial(&project(&(&p * p.transpose()), g).unwrap()).unwrap()
}

fn random_orthogonal(d: usize, seed: u64) -> Mat {
    let mut r = rng(seed);
    random_points(d, d, &mut r).qr().q()
}

proptest! {
    #![proptest_config(fixed(48))]

    #[test]
    fn classifier_is_minor_monotone(seed in any::<u64>(), pick in any::<usize>()) {
        let g = small_graph(seed, 9);
        let edges = g.edge_list();
        prop_assume!(!edges.is_empty());
        let e = edges[pick % edges.len()];
        let top = classify_gram_dimension(&g).rank();
        prop_assert!(classify_gram_dimension(&g.delete_edge(e).unwrap()).rank() <= top);
        prop_assert!(classify_gram_dimension(&g.contract_edge(e).unwrap()).rank() <= top);
        if let GdBand::AtLeast5(w) = classify_gram_dimension(&g) {
            prop_assert!(w.verify(&g));
        }
    }

    #[test]
    fn minor_search_matches_brute_force(seed in any::<u64>()) {
        let g = small_graph(seed, 7);
        for pat in [MinorPattern::K3, MinorPattern::K4, MinorPattern::K5, MinorPattern::K222] {
            let fast = has_minor(&g, pat);
            prop_assert_eq!(fast.is_some(), naive_has_minor(&g, &pat.graph()), "{:?}", pat);
            if let Some(w) = fast {
                prop_assert!(w.verify(&g));
            }
        }
    }

    #[test]
    fn treewidth_decompositions_verify(seed in any::<u64>(), k in 1usize..=4) {
        let g = small_graph(seed, 10);
        if let Some(td) = treewidth_at_most(&g, k) {
            prop_assert!(td.width <= k);
            prop_assert!(td.verify(&g));
        }
    }

    #[test]
    fn treewidth_three_versus_obstructions(seed in any::<u64>()) {
        let mut r = rng(seed);
        let g = match seed % 3 {
            0 => random_partial_3_tree(r.gen_range(5..=10), &mut r),
            1 => random_template_sum(&mut r),
            _ => random_graph(r.gen_range(5..=9), 0.55, &mut r),
        };
        match treewidth_at_most(&g, 3) {
            Some(td) => {
                prop_assert!(td.verify(&g));
                prop_assert!(has_minor(&g, MinorPattern::K5).is_none());
                prop_assert!(has_minor(&g, MinorPattern::K222).is_none());
            }
            None => {
                let obstructed = has_minor(&g, MinorPattern::K5).is_some() || has_minor(&g, MinorPattern::K222).is_some();
                let template = clique_sum_split(&g)
                    .components
                    .iter()
                    .any(|c| matches!(c.kind, ComponentKind::V8Type | ComponentKind::C5xC2Type));
                prop_assert!(obstructed || template);
            }
        }
    }

    #[test]
    fn gram_factor_reconstructs(seed in any::<u64>(), n in 1usize..9, d in 1usize..6) {
        let mut r = rng(seed);
        let p = random_points(n, d, &mut r);
        let x = &p * p.transpose();
        let tol = 1e-9;
        let c = gram_factor(&x, tol).unwrap();
        prop_assert!(c.dim() <= d.min(n));
        prop_assert!(max_abs(&(c.gram() - &x)) <= 10.0 * tol * max_abs(&x).max(1.0));
    }

    #[test]
    fn align_keeps_gram_and_matches_shared(seed in any::<u64>(), n in 2usize..8, d in 1usize..5) {
        let mut r = rng(seed);
        let fixed = Configuration::new(random_points(n, d, &mut r));
        let moving = Configuration::new(&fixed.points * random_orthogonal(d, seed ^ 1));
        let s = r.gen_range(1..=n);
        let shared: Vec<(usize, usize)> = (0..s).map(|i| (i, i)).collect();
        let out = align(&moving, &fixed, &shared, 1e-8).unwrap();
        prop_assert!(max_abs(&(out.gram() - moving.gram())) <= 1e-10 * max_abs(&moving.gram()).max(1.0));
        for &(i, j) in &shared {
            prop_assert!((out.vector(i) - fixed.vector(j)).norm() <= 1e-8);
        }
    }

    #[test]
    fn schur_complement_stays_psd(seed in any::<u64>(), n in 2usize..8, d in 1usize..8) {
        let mut r = rng(seed);
        let p = random_points(n, d, &mut r);
        let m = &p * p.transpose();
        let i = r.gen_range(0..n);
        prop_assume!(m[(i, i)] > 1e-6);
        let s = schur_complement(&m, i).unwrap();
        prop_assert!(min_eigenvalue(&s) >= -1e-10 * max_abs(&m).max(1.0));
    }

    #[test]
    fn phi_round_trip(seed in any::<u64>()) {
        let g = small_graph(seed, 8);
        let mut r = rng(seed ^ 7);
        let a = random_instance(&g, 3, &mut r);
        let back = phi_inverse(&phi(&a)).unwrap();
        prop_assert_eq!(back.graph().edge_list(), g.edge_list());
        for (i, j, v) in a.specified() {
            prop_assert!((back.value(i, j).unwrap() - v).abs() <= 1e-14 * a.scale().max(1.0));
        }
    }

    #[test]
    fn sap_matches_normal_equations(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(3..=6);
        let g = random_graph(n, 0.5, &mut r);
        let mut m = Mat::zeros(n, n);
        for _ in 0..r.gen_range(1..=n) {
            let v = random_points(n, 1, &mut r);
            m += &v * v.transpose();
        }
        for (i, j) in g.non_edges() {
            m[(i, j)] = 0.0;
            m[(j, i)] = 0.0;
        }
        let (op, free) = sap_operator(&m, &g);
        let res = check_strong_arnold(&m, &g, 1e-8).unwrap();
        let nullity = if free.is_empty() {
            0
        } else {
            let ev = (op.transpose() * &op).symmetric_eigenvalues();
            let top = ev.max();
            ev.iter().filter(|&&l| l <= 1e-16 * top || top == 0.0).count()
        };
        prop_assert_eq!(res.holds(), nullity == 0);
    }
}

proptest! {
    #![proptest_config(fixed(16))]

    #[test]
    fn perturbation_is_generic_and_close(seed in any::<u64>()) {
        let mut r = rng(seed);
        let g = random_series_parallel(r.gen_range(4..=7), &mut r);
        let a = unit_instance(&g, 2, seed ^ 3);
        let eps = 1e-3;
        let b = perturb_to_generic(&a, eps, seed).unwrap();
        prop_assert!(b.to_partial().validate(1e-9).is_ok());
        for (e, v) in a.values() {
            prop_assert!((b.values()[e] - v).abs() <= eps);
        }
        for c in g.circuits(GENERIC_CIRCUIT_LEN) {
            prop_assert!(cycle_gd2_decide(&b.circuit_angles(&c), GENERIC_MARGIN).is_none());
        }
    }

    #[test]
    fn solver_on_strictly_feasible_programs(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(2..=6);
        let m = r.gen_range(1..=8).min(n * (n + 1) / 2 - 1);
        let p0 = random_points(n, n, &mut r);
        let x0 = &p0 * p0.transpose() + Mat::identity(n, n);
        let mut p = SdpProblem::single(n);
        for _ in 0..m {
            let b = random_points(n, n, &mut r);
            let a = (&b + b.transpose()) * 0.5;
            p.add_constraint(upper_entries(&a), (&a * &x0).trace());
        }
        // trace bound keeps the primal bounded
        p.add_constraint(upper_entries(&Mat::identity(n, n)), x0.trace());
        let c = random_points(n, n, &mut r);
        p.objective = upper_entries(&((&c + c.transpose()) * 0.5));
        let sol = solve(&p, 1e-9).unwrap();
        prop_assert_eq!(sol.status, SdpStatus::Optimal, "{:?}", sol);
        prop_assert!(sol.primal_residual <= 1e-7 * x0.trace());
        prop_assert!(sol.gap.abs() <= 1e-6 * (1.0 + sol.primal_value.abs()));
        prop_assert!(min_eigenvalue(&sol.x[0]) >= -1e-8);
        prop_assert!(min_eigenvalue(&sol.s[0]) >= -1e-8);

        let low = rank_reduce(&p, &sol.x, 1e-9);
        prop_assert!(p.residual(&low) <= 1e-6 * x0.trace());
        prop_assert!(min_eigenvalue(&low[0]) >= -1e-8);
        prop_assert!(numerical_rank(&low[0], 1e-7) <= barvinok_bound(p.m()));
    }

    #[test]
    fn completion_projects_back(seed in any::<u64>()) {
        let mut r = rng(seed);
        let g = random_chordal(r.gen_range(3..=9), &mut r);
        let a = random_instance(&g, r.gen_range(1..=4), &mut r);
        let res = complete_chordal(&a, 1e-9).unwrap();
        let x = res.configuration.gram();
        let back = project(&x, &g).unwrap();
        for (i, j, v) in a.specified() {
            prop_assert!((back.value(i, j).unwrap() - v).abs() <= 1e-8 * a.scale().max(1.0));
        }
    }

    #[test]
    fn flatten_certificates(seed in any::<u64>()) {
        let mut r = rng(seed);
        let g = match seed % 3 {
            0 => cycle(r.gen_range(4..=8)),
            1 => random_series_parallel(r.gen_range(4..=8), &mut r),
            _ => k222(),
        };
        let non = g.non_edges();
        prop_assume!(!non.is_empty());
        let e0 = non[r.gen_range(0..non.len())];
        let a = random_instance(&g, 3, &mut r);
        let f = flatten(&a, e0, 1e-9).unwrap();
        let om = &f.stress;
        prop_assert_eq!(om.support_violation(), 0.0);
        let scale = max_abs(&om.matrix);
        prop_assert!(om.min_eigenvalue() >= -1e-8 * scale.max(1.0));
        let eq = om.equilibrium_residuals(&f.configuration).into_iter().fold(0.0, f64::max);
        prop_assert!(eq <= 1e-6 * scale.max(1.0) * a.scale().sqrt().max(1.0));
        prop_assert!(numerical_rank(&f.x, 1e-7) + om.rank(1e-7) <= g.n());
        prop_assert!(a.residual(&f.x) <= 1e-6 * a.scale().max(1.0));
    }

    #[test]
    fn contraction_keeps_dimension(seed in any::<u64>()) {
        let mut r = rng(seed);
        let g = cycle(r.gen_range(4..=8));
        let a = random_instance(&g, 3, &mut r);
        let f = flatten(&a, (0, 2), 1e-9).unwrap();
        let before = numerical_rank(&f.x, 1e-7);
        let sg = f.stress.stressed_graph();
        for i in 0..g.n() {
            if sg.degree(i) != 2 {
                continue;
            }
            if let Ok((host, c, _)) = contract_2node(&g, &f.configuration, &f.stress, i) {
                prop_assert_eq!(host.n(), g.n() - 1);
                prop_assert_eq!(numerical_rank(&c.gram(), 1e-7), before);
            }
        }
    }

    #[test]
    fn folding_preserves_specified_products(seed in any::<u64>()) {
        let mut r = rng(seed);
        let g = random_series_parallel(r.gen_range(5..=9), &mut r);
        let k = 3;
        // low-degree stable vertices get full-dimensional vectors, the rest stay in R^k
        let mut stable: Vec<usize> = Vec::new();
        for v in 0..g.n() {
            if g.degree(v) < k && stable.iter().all(|&s| !g.has_edge(s, v)) {
                stable.push(v);
            }
        }
        let d = k + 2;
        let mut p = random_points(g.n(), d, &mut r);
        for v in 0..g.n() {
            if !stable.contains(&v) {
                for c in k..d {
                    p[(v, c)] = 0.0;
                }
            }
        }
        let c = Configuration::new(p);
        let plan = find_fold_plan(&g, &c, k);
        prop_assume!(plan.is_some());
        let plan = plan.unwrap();
        let out = fold_stable_set(&g, &c, &plan).unwrap();
        prop_assert!(out.dim() <= k);
        for v in 0..g.n() {
            prop_assert!((out.inner(v, v) - c.inner(v, v)).abs() <= 1e-8);
        }
        for (u, v) in g.edges() {
            prop_assert!((out.inner(u, v) - c.inner(u, v)).abs() <= 1e-8);
        }
    }
}

fn upper_entries(a: &Mat) -> Vec<Entry> {
    let n = a.nrows();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i..n {
            out.push(Entry::new(0, i, j, a[(i, j)]));
        }
    }
    out
}

#[test]
fn complete_graphs_have_no_missing_minor() {
    for n in 1..=6 {
        let g = complete(n);
        assert_eq!(has_minor(&g, MinorPattern::K5).is_some(), n >= 5);
        assert!(treewidth_at_most(&g, n.saturating_sub(1)).is_some());
    }
}
