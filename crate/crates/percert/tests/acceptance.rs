//! Acceptance suite: every criterion below is an exact combinatorial
//! identity checked at desk scale, one test per criterion, each printing a
//! pass line. Run with `cargo test --test acceptance -- --nocapture` to see
//! the lines.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use percert::certify::{Certifier, Status};
use percert::colouring::{
    greedy_proper_colouring, greedy_proper_colouring_with_order, product_colouring_theta,
    EdgeColouring,
};
use percert::dsl::build_str;
use percert::formulas::{
    bounds_match_predicate, formula_path_corollary, formula_star_general, formula_star_product,
    formula_theta_general, formula_theta_product, formula_tree_lower, Hypothesis,
};
use percert::graph::{
    self, cartesian_product, root_tree, DegreeHistogram, Graph, ThetaSpec, VertexLabel,
};
use percert::percolation::{closure, percolates, EdgeSet};
use percert::witness::{
    dim_w, star_witness_family, stacked_rank, theta_witness_family, tree_witness_family,
    w_membership,
};

fn certifier() -> Certifier {
    Certifier::new(16)
}

fn tree_from_edges(edges: &[(u64, u64)]) -> Graph {
    let n = edges
        .iter()
        .flat_map(|&(a, b)| [a, b])
        .max()
        .map(|m| m + 1)
        .unwrap_or(1);
    let labels: Vec<VertexLabel> = (0..n).map(VertexLabel::int).collect();
    let pairs: Vec<(VertexLabel, VertexLabel)> = edges
        .iter()
        .map(|&(a, b)| (VertexLabel::int(a), VertexLabel::int(b)))
        .collect();
    Graph::from_labelled_edges(labels, &pairs).unwrap()
}

/// All trees on 2..=6 vertices (up to isomorphism).
fn small_trees() -> Vec<Graph> {
    vec![
        tree_from_edges(&[(0, 1)]),
        tree_from_edges(&[(0, 1), (1, 2)]),
        tree_from_edges(&[(0, 1), (1, 2), (2, 3)]),
        tree_from_edges(&[(0, 1), (0, 2), (0, 3)]),
        tree_from_edges(&[(0, 1), (1, 2), (2, 3), (3, 4)]),
        tree_from_edges(&[(0, 1), (0, 2), (0, 3), (0, 4)]),
        tree_from_edges(&[(0, 1), (0, 2), (0, 3), (3, 4)]),
        tree_from_edges(&[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5)]),
        tree_from_edges(&[(0, 1), (0, 2), (0, 3), (0, 4), (0, 5)]),
        tree_from_edges(&[(0, 1), (0, 2), (0, 3), (3, 4), (4, 5)]),
        tree_from_edges(&[(0, 1), (0, 2), (2, 3), (0, 4), (4, 5)]),
        tree_from_edges(&[(0, 1), (0, 2), (0, 3), (1, 4), (1, 5)]),
        tree_from_edges(&[(0, 1), (0, 2), (0, 3), (0, 4), (4, 5)]),
    ]
}

/// Desk-scale graph suite, every member at most 14 edges.
fn graph_suite() -> Vec<Graph> {
    let mut suite = vec![
        graph::path(1).unwrap(),
        graph::path(2).unwrap(),
        graph::path(3).unwrap(),
        graph::path(5).unwrap(),
        graph::path(6).unwrap(),
        graph::star(2).unwrap(),
        graph::star(3).unwrap(),
        graph::star(4).unwrap(),
        graph::cycle(3).unwrap(),
        graph::cycle(4).unwrap(),
        graph::cycle(5).unwrap(),
        graph::cycle(6).unwrap(),
        graph::complete(4).unwrap(),
        graph::theta(4, 4).unwrap(),
        graph::theta(5, 4).unwrap(),
        graph::theta(5, 5).unwrap(),
        build_str("prod(path(2),path(3))").unwrap(),
        build_str("prod(path(2),path(4))").unwrap(),
        build_str("prod(star(2),star(2))").unwrap(),
        build_str("prod(path(2),star(3))").unwrap(),
    ];
    suite.retain(|g| g.edge_count() <= 14);
    suite
}

#[test]
fn criterion_01_star_baseline() {
    let cert = certifier();
    for a in 1..=5u32 {
        let g = graph::star(a).unwrap();
        for r in 1..=5u32 {
            let expected = a.min(r) as u64;
            let brute = cert.brute_force_me(&g, r, 0).unwrap();
            let formula = formula_star_product(&[a], r).unwrap().value;
            assert_eq!(brute, expected, "brute force on S_{a} at r={r}");
            assert_eq!(formula, expected, "star recursion on S_{a} at r={r}");
        }
    }
    println!("criterion 1: PASS — star baseline min(a, r) for a, r in 1..=5");
}

#[test]
fn criterion_02_path_baseline() {
    let cert = certifier();
    let k1_hist = DegreeHistogram::of_unit();
    for n in 2..=7u32 {
        let g = graph::path(n).unwrap();
        let brute_1 = cert.brute_force_me(&g, 1, 0).unwrap();
        assert_eq!(brute_1, 1, "P_{n} at r=1");
        let chain_1 = formula_path_corollary(0, 0, &k1_hist, n, 1, &Hypothesis::Unverified)
            .unwrap()
            .value;
        assert_eq!(chain_1, 1);
        for r in 2..=3u32 {
            let brute = cert.brute_force_me(&g, r, 0).unwrap();
            assert_eq!(brute, n as u64 - 1, "P_{n} at r={r}");
            let chain = formula_path_corollary(0, 0, &k1_hist, n, r, &Hypothesis::Unverified)
                .unwrap()
                .value;
            assert_eq!(chain, n as u64 - 1);
        }
    }
    println!("criterion 2: PASS — path baseline over n in 2..=7, r in 1..=3");
}

#[test]
fn criterion_03_grids() {
    let cert = certifier();
    for n in 2..=4u32 {
        let g = build_str(&format!("prod(path(2),path({n}))")).unwrap();
        let value = cert.certify_me(&g, 2).unwrap();
        assert_eq!(value.status, Status::CertifiedExact);
        assert_eq!(value.lower.colouring, "product", "no enumeration on grids");
        assert_eq!(value.lower.dim, n as u64 + 2);
        assert_eq!(value.upper.size, n as u64 + 2);
        assert_eq!(value.value, Some(n as u64 + 2));
    }
    for n in 2..=3u32 {
        let g = build_str(&format!("prod(path(2),path({n}))")).unwrap();
        assert_eq!(cert.brute_force_me(&g, 2, 0).unwrap(), n as u64 + 2);
    }
    println!("criterion 3: PASS — grid values n+2 certified and brute-forced");
}

#[test]
fn criterion_04_star_product() {
    let cert = certifier();
    assert_eq!(formula_star_product(&[2, 2], 2).unwrap().value, 6);
    let g = build_str("prod(star(2),star(2))").unwrap();
    let value = cert.certify_me(&g, 2).unwrap();
    assert_eq!(value.status, Status::CertifiedExact);
    assert_eq!(value.lower.dim, 6);
    assert_eq!(value.upper.size, 6);
    // Enumeration from floor 5: refute 5, witness 6.
    assert_eq!(cert.brute_force_me(&g, 2, 5).unwrap(), 6);
    println!("criterion 4: PASS — S_2 x S_2 at r=2 equals 6 on all four routes");
}

#[test]
fn criterion_05_theta() {
    let cert = certifier();
    for (k, l) in [(4u32, 4u32), (5, 4), (5, 5)] {
        let g = build_str(&format!("theta({k},{l})")).unwrap();
        let expected = (k + l - 3) as u64;
        assert_eq!(cert.brute_force_me(&g, 2, 0).unwrap(), expected);
        let value = cert.certify_me(&g, 2).unwrap();
        assert_eq!(value.lower.dim, expected, "dimension on theta({k},{l})");
        assert_eq!(value.value, Some(expected));
    }
    // At r=3 no vertex of the theta can ever reach its threshold, so nothing
    // spreads: removing any one edge strands it.
    let g = build_str("theta(4,4)").unwrap();
    let m = g.edge_count();
    for e in 0..m {
        let mut s = EdgeSet::full(m);
        s.remove(e);
        assert!(!percolates(&g, &s, 3).unwrap());
    }
    assert_eq!(cert.brute_force_me(&g, 3, 0).unwrap(), 7);
    println!("criterion 5: PASS — theta values k+l-3 at r=2 and k+l-1 at r=3");
}

#[test]
fn criterion_06_dimension_never_exceeds_brute_force() {
    let cert = certifier();
    for g in graph_suite() {
        let m = g.edge_count();
        let orders: Vec<Vec<usize>> = vec![
            (0..m).collect(),
            (0..m).rev().collect(),
            (0..m).step_by(2).chain((0..m).skip(1).step_by(2)).collect(),
        ];
        for r in 1..=3u32 {
            let brute = cert.brute_force_me(&g, r, 0).unwrap();
            for order in &orders {
                let c = greedy_proper_colouring_with_order(&g, order).unwrap();
                let dim = dim_w(&g, &c, r).unwrap() as u64;
                assert!(
                    dim <= brute,
                    "dim {dim} > brute {brute} on {:?} at r={r}",
                    g.spec()
                );
            }
        }
    }
    println!("criterion 6: PASS — dimension lower-bounds the brute-force value across the suite");
}

#[test]
fn criterion_07_witness_families() {
    let bases: Vec<Graph> = vec![
        graph::path(1).unwrap(),
        graph::path(2).unwrap(),
        graph::path(3).unwrap(),
        graph::star(2).unwrap(),
    ];
    let trees: Vec<Graph> = vec![
        graph::path(2).unwrap(),
        graph::path(3).unwrap(),
        graph::star(2).unwrap(),
        graph::star(3).unwrap(),
    ];
    let mut families = 0usize;
    for g in &bases {
        let c = greedy_proper_colouring(g);
        let hg = g.degree_histogram();
        for r in 1..=3u32 {
            let dim_r = dim_w(g, &c, r).unwrap() as u64;
            let dim_rm1 = dim_w(g, &c, r - 1).unwrap() as u64;
            for t in &trees {
                let rooted = root_tree(t).unwrap();
                let w = tree_witness_family(g, &c, &rooted, r).unwrap();
                let expected = formula_tree_lower(
                    dim_r,
                    dim_rm1,
                    &hg,
                    &t.degree_histogram(),
                    rooted.order() as u32,
                    r,
                )
                .unwrap()
                .value as usize;
                assert_eq!(w.family.claimed_dimension, expected);
                for member in &w.family.members {
                    assert!(w_membership(&w.product, &w.colouring, r, member).unwrap());
                }
                assert_eq!(stacked_rank(&w.product, r, &w.family), expected);
                families += 1;
            }
            for k in 1..=3u32 {
                let w = star_witness_family(g, &c, k, r).unwrap();
                let expected =
                    formula_star_general(dim_r, dim_rm1, &hg, k, r, &Hypothesis::Unverified)
                        .unwrap()
                        .value as usize;
                assert_eq!(w.family.claimed_dimension, expected);
                for member in &w.family.members {
                    assert!(w_membership(&w.product, &w.colouring, r, member).unwrap());
                }
                assert_eq!(stacked_rank(&w.product, r, &w.family), expected);
                families += 1;
            }
            if r >= 2 {
                let dim_rm2 = dim_w(g, &c, r - 2).unwrap() as u64;
                let spec = ThetaSpec::new(4, 4).unwrap();
                let w = theta_witness_family(g, &c, &spec, r).unwrap();
                let expected = formula_theta_general(
                    dim_r,
                    dim_rm1,
                    dim_rm2,
                    &hg,
                    4,
                    4,
                    r,
                    &Hypothesis::Unverified,
                )
                .unwrap()
                .value as usize;
                assert_eq!(w.family.claimed_dimension, expected);
                for member in &w.family.members {
                    assert!(w_membership(&w.product, &w.colouring, r, member).unwrap());
                }
                assert_eq!(stacked_rank(&w.product, r, &w.family), expected);
                families += 1;
            }
        }
    }
    println!("criterion 7: PASS — {families} witness families verified member by member");
}

#[test]
fn criterion_08_bounds_match_exactly_when_expected() {
    let graphs = graph_suite();
    let trees = small_trees();
    let mut checked = 0usize;
    for g in &graphs {
        let hg = g.degree_histogram();
        let delta = hg.min_degree().unwrap_or(0) as i64;
        for t in &trees {
            let ht = t.degree_histogram();
            let t_is_path = ht.counts().iter().all(|(&deg, &c)| deg <= 2 || c == 0);
            for r in 1..=5u32 {
                let expected = delta >= r as i64 - 2 || t_is_path;
                let got = bounds_match_predicate(&hg, &ht, r);
                assert_eq!(
                    got, expected,
                    "predicate mismatch: graph {:?}, tree order {}, r={r}",
                    g.spec(),
                    t.vertex_count()
                );
                checked += 1;
            }
        }
    }
    println!("criterion 8: PASS — bounds-match predicate exhaustive over {checked} cases");
}

#[test]
fn criterion_09_percolation_properties() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for trial in 0..500 {
        let n = rng.random_range(2..=10usize);
        let mut pairs = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                if rng.random_bool(0.4) {
                    pairs.push((a, b));
                }
            }
        }
        let labels: Vec<VertexLabel> = (0..n as u64).map(VertexLabel::int).collect();
        let label_pairs: Vec<(VertexLabel, VertexLabel)> = pairs
            .iter()
            .map(|&(a, b)| (VertexLabel::int(a as u64), VertexLabel::int(b as u64)))
            .collect();
        let g = Graph::from_labelled_edges(labels, &label_pairs).unwrap();
        let m = g.edge_count();
        let r = rng.random_range(0..=4u32);
        let mut small = EdgeSet::empty(m);
        let mut large = EdgeSet::empty(m);
        for e in 0..m {
            if rng.random_bool(0.3) {
                small.insert(e);
                large.insert(e);
            } else if rng.random_bool(0.3) {
                large.insert(e);
            }
        }
        let trace_small = closure(&g, &small, r).unwrap();
        let trace_large = closure(&g, &large, r).unwrap();
        assert!(
            trace_small.final_set.is_subset_of(&trace_large.final_set),
            "monotonicity failed on trial {trial}"
        );
        let again = closure(&g, &trace_small.final_set, r).unwrap();
        assert_eq!(again.final_set, trace_small.final_set, "idempotence");
        assert_eq!(again.round_count(), 0, "closure of a closed set adds rounds");
        assert!(trace_small.round_count() <= m.max(1));
        if r >= 1 && percolates(&g, &small, r).unwrap() {
            assert!(
                percolates(&g, &small, r - 1).unwrap(),
                "threshold monotonicity failed on trial {trial}"
            );
        }
    }
    println!("criterion 9: PASS — monotonicity, idempotence, threshold monotonicity on 500 random triples");
}

#[test]
fn criterion_10_recursion_vs_materialization() {
    let cert = certifier();
    // Star chain against the one-step formula on the materialized S_2.
    let s2 = graph::star(2).unwrap();
    let hist_s2 = s2.degree_histogram();
    for r in 2..=4u32 {
        let chain = formula_star_product(&[2, 2], r).unwrap().value;
        let m_r = cert.brute_force_me(&s2, r, 0).unwrap();
        let m_rm1 = cert.brute_force_me(&s2, r - 1, 0).unwrap();
        let step = formula_star_general(m_r, m_rm1, &hist_s2, 2, r, &Hypothesis::Unverified)
            .unwrap()
            .value;
        assert_eq!(chain, step, "star chain vs general step at r={r}");
    }
    // Theta chain against the one-step formula over the unit base.
    let k1_hist = DegreeHistogram::of_unit();
    for r in 2..=4u32 {
        let chain = formula_theta_product(&[(4, 4)], r).unwrap().value;
        let step = formula_theta_general(0, 0, 0, &k1_hist, 4, 4, r, &Hypothesis::Unverified)
            .unwrap()
            .value;
        assert_eq!(chain, step, "theta chain vs general step at r={r}");
    }
    // The theta square at r=2: chain value, one-step value over brute-forced
    // inputs on H_{4,4}, and the exact dimension on the materialized
    // 36-vertex product all agree.
    let h44 = graph::theta(4, 4).unwrap();
    let hist_h44 = h44.degree_histogram();
    let m2 = cert.brute_force_me(&h44, 2, 0).unwrap();
    let m1 = cert.brute_force_me(&h44, 1, 0).unwrap();
    let m0 = cert.brute_force_me(&h44, 0, 0).unwrap();
    let step = formula_theta_general(m2, m1, m0, &hist_h44, 4, 4, 2, &Hypothesis::Unverified)
        .unwrap()
        .value;
    let chain = formula_theta_product(&[(4, 4), (4, 4)], 2).unwrap().value;
    assert_eq!(step, chain);

    let spec = ThetaSpec::new(4, 4).unwrap();
    let k1 = graph::path(1).unwrap();
    let g1 = cartesian_product(&k1, &h44).unwrap();
    let c1 = product_colouring_theta(&k1, &EdgeColouring::empty(), &spec).unwrap();
    let g2 = cartesian_product(&g1, &h44).unwrap();
    let c2 = product_colouring_theta(&g1, &c1, &spec).unwrap();
    let dim = dim_w(&g2, &c2, 2).unwrap() as u64;
    assert_eq!(dim, chain, "exact rank on the theta square");
    println!("criterion 10: PASS — recursions agree with materialized one-step formulas (theta square dim = {dim})");
}
