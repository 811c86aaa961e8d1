use std::f64::consts::PI;

use formlap_core::cone::{cone_ih, cohomology::dims};
use formlap_core::graph::betti_numbers;
use formlap_core::graph::builders::*;
use formlap_core::mesh::generators::{cone_over, disk, flat_torus, from_graph, sphere, spindle};
use formlap_core::mesh::StratifiedComplex;
use formlap_core::strata::*;
use proptest::prelude::*;

fn points(n: usize) -> StratifiedComplex {
    let coords = (0..n).map(|i| vec![i as f64]).collect();
    let tops: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    StratifiedComplex::from_top(coords, &tops).unwrap()
}

fn polygon(n: usize) -> StratifiedComplex {
    let coords = (0..n).map(|i| {
        let t = 2.0 * PI * i as f64 / n as f64;
        vec![t.cos(), t.sin()]
    });
    let tops: Vec<Vec<usize>> = (0..n).map(|i| {
        let (a, b) = (i, (i + 1) % n);
        vec![a.min(b), a.max(b)]
    })
    .collect();
    StratifiedComplex::from_top(coords.collect(), &tops).unwrap()
}

/// Degrees in which the cone formula for the open cone applies.
fn applicable(k: usize) -> (Vec<usize>, Vec<usize>) {
    if k == 1 {
        return (vec![0, 1], vec![0, 1]);
    }
    let half = k as f64 / 2.0;
    let ih = (0..=k).filter(|&i| (i as f64) < half).map(|i| k - i).collect();
    let ih_c = (0..=k).filter(|&i| (i as f64) >= half + 1.0).map(|i| k - i).collect();
    (ih, ih_c)
}

#[test]
fn triangulated_cones_match_cone_formulas() {
    let cases: Vec<(StratifiedComplex, usize)> = vec![
        (points(1), 1),
        (points(2), 1),
        (points(4), 1),
        (polygon(5), 2),
        (flat_torus(3, 3, 1.0, 1.0).unwrap(), 3),
        (sphere(1).unwrap(), 3),
    ];
    for (base, k) in cases {
        let base_ih = if k == 1 {
            dims(&[base.num_vertices()])
        } else {
            let r = ih_betti(&base, &gm_perversity(k - 1)).unwrap();
            r.betti.clone()
        };
        let expected = cone_ih(&base_ih, k).unwrap();
        let cone = cone_over(&base, 0.5).unwrap();
        let pv = gm_perversity(k);
        // Closed-support IH of the open cone is IH of the closed cone
        // relative to its lid; compact-support IH is IH of the closed cone.
        let rel = ih_betti_relative(&cone, &pv).unwrap();
        let mut closed = cone.clone();
        closed.boundary.clear();
        let abs = ih_betti(&closed, &pv).unwrap();
        let (ih_deg, ihc_deg) = applicable(k);
        for d in ih_deg {
            assert_eq!(rel.get(d), expected.ih[&d], "k={k} ih degree {d}: {:?} vs {:?}", rel.betti, expected.ih);
        }
        for d in ihc_deg {
            assert_eq!(abs.get(d), expected.ih_c[&d], "k={k} ih_c degree {d}: {:?} vs {:?}", abs.betti, expected.ih_c);
        }
    }
}

#[test]
fn subdivision_invariance() {
    let mut d = disk(2).unwrap();
    d.strata = vec![Vec::new(), d.boundary.clone()];
    let spaces = vec![
        d,
        flat_torus(3, 3, 1.0, 1.0).unwrap(),
        spindle(2, 6, 0.5).unwrap(),
        stratify_multiconical(&from_graph(&figure_eight(1.0, 1.0), 3).unwrap()).unwrap(),
        stratify_multiconical(&from_graph(&star(3, 1.0), 3).unwrap()).unwrap(),
    ];
    for k in spaces {
        let pv = gm_perversity(k.dim());
        let a = ih_betti(&k, &pv).unwrap();
        let b = ih_betti(&k.barycentric_subdivision().unwrap(), &pv).unwrap();
        assert_eq!(a.betti, b.betti, "{}", a.fingerprint);
    }
}

#[test]
fn empty_strata_give_simplicial_homology() {
    for (k, expect) in [
        (flat_torus(3, 4, 1.0, 1.0).unwrap(), vec![1, 2, 1]),
        (sphere(1).unwrap(), vec![1, 0, 1]),
        (polygon(7), vec![1, 1]),
    ] {
        let r = ih_betti(&k, &gm_perversity(k.dim())).unwrap();
        assert_eq!(r.as_vec(), expect);
        assert_eq!(simplicial_betti(&k.maximal_simplices()), expect);
    }
}

#[test]
fn graph_corpus_cross_check() {
    let mut corpus = vec![
        segment(1.0),
        circle(2.0 * PI),
        figure_eight(1.0, 2.0),
        star(3, 1.0),
        theta(1.0, 1.5, 2.0),
        two_circles(1.0, 2.0),
        cycle(4, 1.0),
    ];
    for (extra, seed) in [(0, 1), (1, 2), (2, 3), (3, 4)] {
        corpus.push(random_connected(5, extra, seed));
    }
    for g in &corpus {
        let r = hodge_cross_check(CrossCheckSpace::Graph(g), &CrossCheckOptions::default()).unwrap();
        let (b0, b1) = betti_numbers(g);
        assert!(r.pass, "{}", r.table());
        assert_eq!(r.degrees[0].kernel_dim, b1);
        assert_eq!(r.ih.get(0), b0);
    }
}

#[test]
fn mesh_corpus_cross_check() {
    let opts = CrossCheckOptions { gap_tol: 1e-8, ..Default::default() };
    for k in [disk(2).unwrap(), flat_torus(5, 5, 1.0, 1.0).unwrap(), sphere(2).unwrap(), spindle(3, 8, 0.4).unwrap()] {
        let r = hodge_cross_check(CrossCheckSpace::Mesh(&k), &opts).unwrap();
        assert!(r.pass, "{}", r.table());
    }
}

fn perversity_strategy(n: usize) -> impl Strategy<Value = Perversity> {
    proptest::collection::vec(0usize..=1, n).prop_map(|steps| {
        let mut v = vec![0];
        for s in steps {
            v.push(v.last().unwrap() + s);
        }
        Perversity::new(v).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn larger_perversity_allows_more(a in perversity_strategy(3), b in perversity_strategy(3)) {
        let (lo, hi) = if a.le(&b) { (a, b) } else if b.le(&a) { (b, a) } else { return Ok(()) };
        let cone = cone_over(&flat_torus(3, 3, 1.0, 1.0).unwrap(), 0.5).unwrap();
        for level in &cone.simplices {
            for s in level {
                if allowable(std::slice::from_ref(s), &cone, &lo) {
                    prop_assert!(allowable(std::slice::from_ref(s), &cone, &hi));
                }
            }
        }
    }
}
