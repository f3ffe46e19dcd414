//! Left-turn networks on the square: orientation, path sets and left-of exponents.

use qtrace::network::rooted_out_assignment;
use qtrace::surface::p4;
use qtrace::trace::{ArcTracer, CornerArc};
use qtrace::{Lattice, Network};

fn network(primed: bool, n: usize, arc: char) -> (Lattice, Network) {
    let lat = Lattice::new(&p4(primed), n).unwrap();
    let a = CornerArc::named(lat.surface(), arc, 1, 1).unwrap();
    let net = Network::corner(&lat, a.source_edge, a.sink_edge).unwrap();
    (lat, net)
}

#[test]
fn networks_are_acyclic_with_the_degree_pattern() {
    for n in 2..=5 {
        for primed in [false, true] {
            for arc in ['a', 'b', 'c', 'd'] {
                let (_, net) = network(primed, n, arc);
                assert!(net.is_acyclic());
                assert!(net.degree_pattern_holds());
            }
        }
    }
}

#[test]
fn upper_triangular_path_sets_are_empty() {
    for n in 2..=4 {
        for primed in [false, true] {
            let (_, net) = network(primed, n, 'a');
            for i in 1..=n {
                assert_eq!(net.count_paths(i, i), 1, "diagonal path set is a single path");
                for j in i + 1..=n {
                    assert_eq!(net.count_paths(i, j), 0);
                }
            }
        }
    }
}

#[test]
fn crossing_arc_has_two_paths_from_second_source() {
    // With the diagonal through the corner, 𝒩′(21) has two paths; the paths of 𝒩′(11)
    // and 𝒩′(21) have 3 and {5, 7} dual edges (no vertex on the internal edge).
    for n in 2..=4 {
        let (_, net) = network(true, n, 'a');
        let p11 = net.enumerate_paths(1, 1);
        assert_eq!(p11.len(), 1);
        assert_eq!(p11[0].len(), 3);
        let mut lens: Vec<usize> = net.enumerate_paths(2, 1).iter().map(|p| p.len()).collect();
        lens.sort();
        assert_eq!(lens, vec![5, 7]);
    }
}

#[test]
fn arc_inside_one_triangle_has_a_single_path_from_second_source() {
    for n in 2..=4 {
        let (_, net) = network(false, n, 'a');
        assert_eq!(net.count_paths(2, 1), 1);
        assert_eq!(net.enumerate_paths(1, 1)[0].len(), 2);
    }
}

#[test]
fn path_counts_match_enumeration() {
    let (_, net) = network(true, 4, 'a');
    for i in 1..=4 {
        for j in 1..=4 {
            assert_eq!(net.count_paths(i, j), net.enumerate_paths(i, j).len() as u128);
        }
    }
}

#[test]
fn left_exponents_are_nested_for_diagonal_paths() {
    // The path from α_{i+1} to β_{i+1} encloses the one from α_i to β_i.
    let (lat, net) = network(true, 4, 'a');
    let ks: Vec<_> = (1..=4)
        .map(|i| net.left_exponent(&net.enumerate_paths(i, i)[0], &lat).unwrap())
        .collect();
    for w in ks.windows(2) {
        assert!(w[0].0.iter().zip(&w[1].0).all(|(a, b)| a <= b));
    }
    assert!(ks[0].is_zero());
}

#[test]
fn rooted_assignment_points_along_the_dual_tree() {
    let lat = Lattice::new(&p4(true), 2).unwrap();
    let s = lat.surface();
    let sink = s.edge_by_label("e3").unwrap();
    let out = rooted_out_assignment(s, sink).unwrap();
    let d = s.edge_by_label("d02").unwrap();
    let owners: Vec<usize> = s
        .slots_of(d)
        .into_iter()
        .filter(|(f, sl)| out[*f] == *sl)
        .map(|(f, _)| f)
        .collect();
    assert_eq!(owners.len(), 1);
    assert!(rooted_out_assignment(s, d).is_err());
}

#[test]
fn normalizer_equals_sum_of_diagonal_path_exponents() {
    let lat = Lattice::new(&p4(true), 3).unwrap();
    let arc = CornerArc::named(lat.surface(), 'a', 1, 1).unwrap();
    let tr = ArcTracer::for_arc(&lat, &arc).unwrap();
    let net = tr.network();
    let mut sum = qtrace::ExponentVector::zeros(lat.len());
    for i in 1..=3 {
        sum = &sum + &net.left_exponent(&net.enumerate_paths(i, i)[0], &lat).unwrap();
    }
    assert_eq!(&sum, tr.normalizer());
}

#[test]
fn dot_output_labels_sources_and_sinks() {
    let (_, net) = network(true, 2, 'a');
    let dot = net.to_dot();
    assert!(dot.starts_with("digraph"));
    assert!(dot.contains("α1") && dot.contains("β2"));
}
