mod common;

use std::cmp::Ordering;

use proptest::prelude::*;
use relhyp::coding::{binary_string, compare_n, RestrictedLabel};
use relhyp::geodesics::geodesic_dag;
use relhyp::groups::GroupElement;
use relhyp::hyperbolicity::triangle_defect_all;
use relhyp::relgraph::{BallCache, Metric, RelGraph};

fn letters(graph: &RelGraph) -> Vec<String> {
    graph
        .group()
        .generator_names()
        .iter()
        .flat_map(|n| [n.clone(), format!("{n}'")])
        .collect()
}

fn word(graph: &RelGraph, picks: &[usize]) -> GroupElement {
    let ls = letters(graph);
    let text: Vec<&str> = picks.iter().map(|&i| ls[i % ls.len()].as_str()).collect();
    graph.group().reduce(&text.join(" ")).unwrap()
}

fn picks() -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(0usize..64, 0..7)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn group_axioms(x in picks(), y in picks(), z in picks()) {
        for (_, graph) in common::all_families() {
            let g = graph.group();
            let (a, b, c) = (word(&graph, &x), word(&graph, &y), word(&graph, &z));
            prop_assert_eq!(g.multiply(&g.multiply(&a, &b), &c), g.multiply(&a, &g.multiply(&b, &c)));
            prop_assert!(g.multiply(&a, &g.inverse(&a)).is_identity());
            prop_assert_eq!(g.multiply(&a, &GroupElement::identity()), a.clone());
            prop_assert_eq!(g.reduce(&g.format(&a)).unwrap(), a);
        }
    }

    #[test]
    fn metric_axioms(x in picks(), y in picks(), z in picks()) {
        for (_, graph) in common::all_families() {
            let (a, b, c) = (word(&graph, &x), word(&graph, &y), word(&graph, &z));
            for m in [Metric::Relative, Metric::Absolute] {
                let d = |p: &GroupElement, q: &GroupElement| graph.distance(p, q, m).unwrap();
                prop_assert_eq!(d(&a, &b), d(&b, &a));
                prop_assert!(d(&a, &c) <= d(&a, &b) + d(&b, &c));
            }
            prop_assert!(graph.distance(&a, &b, Metric::Relative).unwrap()
                <= graph.distance(&a, &b, Metric::Absolute).unwrap());
        }
    }

    #[test]
    fn geodesic_dags_are_equivariant(x in picks(), y in picks(), t in picks()) {
        for (_, graph) in common::all_families() {
            let g = graph.group();
            let (u, v, s) = (word(&graph, &x), word(&graph, &y), word(&graph, &t));
            let dag = geodesic_dag(&graph, &u, &v, Metric::Relative).unwrap();
            let moved = geodesic_dag(&graph, &g.multiply(&s, &u), &g.multiply(&s, &v), Metric::Relative).unwrap();
            prop_assert_eq!(dag.length, graph.distance(&u, &v, Metric::Relative).unwrap());
            let list = dag.enumerate(32);
            let moved_list = moved.enumerate(32);
            prop_assert_eq!(list.paths.len(), moved_list.paths.len());
            for (p, q) in list.paths.iter().zip(&moved_list.paths) {
                prop_assert_eq!(&p.labels, &q.labels);
                for (a, b) in p.vertices.iter().zip(&q.vertices) {
                    prop_assert_eq!(g.multiply(&s, a), b.clone());
                }
            }
            if !list.truncated {
                prop_assert_eq!(dag.count_paths(), list.paths.len() as u128);
            }
        }
    }

    #[test]
    fn triangle_defect_ignores_corner_order(x in picks(), y in picks()) {
        let graph = common::load("z3_star_z2");
        let e = GroupElement::identity();
        let (a, b) = (word(&graph, &x), word(&graph, &y));
        let d1 = triangle_defect_all(&graph, [&e, &a, &b], Metric::Relative).unwrap().0;
        let d2 = triangle_defect_all(&graph, [&b, &e, &a], Metric::Relative).unwrap().0;
        let d3 = triangle_defect_all(&graph, [&a, &e, &b], Metric::Relative).unwrap().0;
        prop_assert_eq!(d1, d2);
        prop_assert_eq!(d1, d3);
    }

    #[test]
    fn restriction_commutes(bits in prop::collection::vec(any::<bool>(), 25), m in 1usize..4, k in 1usize..4) {
        let w = RestrictedLabel::from_bits(5, bits).unwrap();
        let (small, big) = (m.min(k), m.max(k));
        prop_assert_eq!(w.restrict(big).restrict(small), w.restrict(small));
    }

    #[test]
    fn order_refines(a in prop::collection::vec(any::<bool>(), 16), b in prop::collection::vec(any::<bool>(), 16), n in 1usize..4) {
        let w = RestrictedLabel::from_bits(4, a).unwrap();
        let v = RestrictedLabel::from_bits(4, b).unwrap();
        if compare_n(&w.restrict(n), &v.restrict(n)).unwrap() == Ordering::Less {
            prop_assert_eq!(compare_n(&w.restrict(n + 1), &v.restrict(n + 1)).unwrap(), Ordering::Less);
        }
        let forward = compare_n(&w, &v).unwrap();
        prop_assert_eq!(forward.reverse(), compare_n(&v, &w).unwrap());
        prop_assert_eq!(forward == Ordering::Equal, w == v);
    }

    #[test]
    fn codes_are_length_lex(k in 0usize..5000) {
        let (a, b) = (binary_string(k), binary_string(k + 1));
        prop_assert!(a.len() < b.len() || (a.len() == b.len() && a < b));
    }
}

#[test]
fn cache_round_trip() {
    let graph = common::load("f2");
    let dir = tempfile::tempdir().unwrap();
    let cache = BallCache::new(dir.path());
    let e = GroupElement::identity();
    let ball = cache.get_or_compute(&graph, &e, 3, Metric::Relative).unwrap();
    assert_eq!(cache.load(&graph, &e, 3, Metric::Relative).unwrap().entries(), ball.entries());
}
