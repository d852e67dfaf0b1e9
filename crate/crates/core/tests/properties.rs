use proptest::prelude::*;

use cubical::brute;
use cubical::embedding::{is_induced, labelling_to_embedding, layered_embedding, CubeEmbedding};
use cubical::graph::{bfs_distance, girth, Graph};
use cubical::labelling::{
    layer_distance, signatures, verify_condition_cycles, verify_cubical, verify_layered,
    EdgeLabelling, Label,
};
use cubical::solver::{decide_cubical, decide_layered, Budget, Outcome};

fn arb_graph(max_vertices: usize) -> impl Strategy<Value = Graph> {
    (2..=max_vertices).prop_flat_map(|n| {
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .collect();
        proptest::collection::vec(any::<bool>(), pairs.len()).prop_map(move |keep| {
            Graph::new(
                n,
                pairs
                    .iter()
                    .zip(&keep)
                    .filter(|(_, k)| **k)
                    .map(|(p, _)| *p),
            )
            .unwrap()
        })
    })
}

fn arb_labelled(
    max_vertices: usize,
    max_edges: usize,
    max_label: Label,
) -> impl Strategy<Value = (Graph, EdgeLabelling)> {
    arb_graph(max_vertices)
        .prop_filter("edge bound", move |g| g.edge_count() <= max_edges)
        .prop_flat_map(move |g| {
            let m = g.edge_count();
            (Just(g), proptest::collection::vec(1..=max_label, m))
        })
        .prop_map(|(g, labels)| {
            let chi = EdgeLabelling::new(&g, labels).unwrap();
            (g, chi)
        })
}

/// A random edge subset of Q_n with the labelling read off the cube.
fn arb_cube_subgraph(
    n: u32,
    max_edges: usize,
) -> impl Strategy<Value = (Graph, EdgeLabelling, Vec<Vec<usize>>)> {
    let verts: Vec<u32> = (0..1u32 << n).collect();
    let host: Vec<(u32, u32)> = verts
        .iter()
        .flat_map(|&a| (0..n).map(move |i| (a, a ^ (1 << i))))
        .filter(|(a, b)| a < b)
        .collect();
    proptest::sample::subsequence(host, 1..=max_edges).prop_map(move |edges| {
        let size = 1usize << n;
        let g = Graph::new(size, edges.iter().map(|&(a, b)| (a as usize, b as usize))).unwrap();
        let labels = edges
            .iter()
            .map(|&(a, b)| (a ^ b).trailing_zeros() + 1)
            .collect();
        let chi = EdgeLabelling::new(&g, labels).unwrap();
        let images = (0..size as u32)
            .map(|x| {
                (0..n as usize)
                    .filter(|i| x >> i & 1 == 1)
                    .map(|i| i + 1)
                    .collect()
            })
            .collect();
        (g, chi, images)
    })
}

/// The component containing edge 0, with vertices renumbered densely.
fn first_component(g: &Graph, chi: &EdgeLabelling) -> (Graph, EdgeLabelling) {
    let (comp, _) = g.components();
    let target = comp[g.endpoints(0)[0]];
    let verts: Vec<usize> = (0..g.vertex_count())
        .filter(|&v| comp[v] == target)
        .collect();
    let at = |v: usize| verts.binary_search(&v).unwrap();
    let keep: Vec<usize> = (0..g.edge_count())
        .filter(|&e| comp[g.endpoints(e)[0]] == target)
        .collect();
    let h = Graph::new(
        verts.len(),
        keep.iter().map(|&e| {
            let [u, v] = g.endpoints(e);
            (at(u), at(v))
        }),
    )
    .unwrap();
    let chi_h = EdgeLabelling::new(&h, keep.iter().map(|&e| chi.label(e)).collect()).unwrap();
    (h, chi_h)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn girth_matches_cycle_enumeration(g in arb_graph(8)) {
        prop_assert_eq!(girth(&g), brute::girth(&g));
    }

    #[test]
    fn verifiers_match_definitions((g, chi) in arb_labelled(7, 8, 4)) {
        prop_assert_eq!(verify_condition_cycles(&g, &chi).is_ok(), brute::cycles_condition(&g, &chi));
        prop_assert_eq!(verify_cubical(&g, &chi).is_ok(), brute::is_cubical_labelling(&g, &chi));
        prop_assert_eq!(verify_layered(&g, &chi).is_ok(), brute::is_layered_labelling(&g, &chi));
    }

    #[test]
    fn signatures_are_path_independent((g, chi, _) in arb_cube_subgraph(4, 10)) {
        let sig = signatures(&g, &chi);
        for path in brute::simple_paths(&g) {
            let (a, b) = (path[0], *path.last().unwrap());
            let mut odd = std::collections::BTreeSet::new();
            for e in brute::path_edges(&g, &path) {
                let c = chi.label(e);
                if !odd.remove(&c) {
                    odd.insert(c);
                }
            }
            prop_assert_eq!(sig.difference(a, b), odd.into_iter().collect::<Vec<_>>());
        }
    }

    #[test]
    fn layer_distance_has_graph_distance_parity((g, chi, images) in arb_cube_subgraph(4, 12)) {
        let f = CubeEmbedding::new(&g, 4, &images).unwrap();
        for x in 0..g.vertex_count() {
            for y in 0..g.vertex_count() {
                if let Some(d) = bfs_distance(&g, x, y).unwrap() {
                    let ld = layer_distance(&g, &chi, x, y).unwrap();
                    prop_assert_eq!(ld % 2, d % 2);
                    prop_assert_eq!(ld, f.hamming(x, y));
                }
            }
        }
    }

    #[test]
    fn embedding_distances_match_layer_distance((g, chi, _) in arb_cube_subgraph(4, 12)) {
        let f = labelling_to_embedding(&g, &chi, 0).unwrap();
        for x in 0..g.vertex_count() {
            for y in x + 1..g.vertex_count() {
                if let Ok(ld) = layer_distance(&g, &chi, x, y) {
                    prop_assert_eq!(f.hamming(x, y), ld);
                }
            }
        }
    }

    #[test]
    fn distinct_labels_on_trees_are_layered(n in 1usize..40, seed in any::<u64>()) {
        // random recursive tree
        let mut state = seed;
        let edges: Vec<(usize, usize)> = (1..=n)
            .map(|v| {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                ((state >> 33) as usize % v, v)
            })
            .collect();
        let tree = Graph::new(n + 1, edges).unwrap();
        let chi = EdgeLabelling::distinct(&tree);
        prop_assert!(verify_layered(&tree, &chi).is_ok());
        let lay = layered_embedding(&tree, &chi, 0).unwrap();
        let weights: std::collections::BTreeSet<usize> = (0..=n).map(|v| lay.cube.weight(v)).collect();
        prop_assert_eq!(weights.len(), 2);
        prop_assert_eq!(*weights.iter().next().unwrap(), lay.layer);
        prop_assert_eq!(*weights.iter().last().unwrap(), lay.layer + 1);
    }

    #[test]
    fn layer_subgraphs_embed_in_two_levels((g, chi, _) in arb_cube_subgraph(4, 12)) {
        let (h, chi_h) = first_component(&g, &chi);
        if verify_layered(&h, &chi_h).is_ok() {
            let lay = layered_embedding(&h, &chi_h, 0).unwrap();
            for e in 0..h.edge_count() {
                let [u, v] = h.endpoints(e);
                let (wu, wv) = (lay.cube.weight(u), lay.cube.weight(v));
                prop_assert!(wu.min(wv) == lay.layer && wu.max(wv) == lay.layer + 1);
            }
        }
    }

    #[test]
    fn induced_check_matches_definition((g, _, images) in arb_cube_subgraph(4, 14)) {
        let f = CubeEmbedding::new(&g, 4, &images).unwrap();
        let n = g.vertex_count();
        let mut expected = None;
        'outer: for u in 0..n {
            for v in u + 1..n {
                if f.hamming(u, v) == 1 && g.edge_between(u, v).is_none() {
                    expected = Some((u, v));
                    break 'outer;
                }
            }
        }
        let got = is_induced(&g, &f).err().map(|w| (w.0, w.1));
        prop_assert_eq!(got, expected);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn layered_witnesses_restrict_to_subgraphs((g, chi) in arb_labelled(7, 9, 9), drop in any::<prop::sample::Index>()) {
        let _ = chi;
        let r = decide_layered(&g, Budget::nodes(1_000_000));
        if let Outcome::Witness(w) = r.outcome {
            prop_assert!(verify_layered(&g, &w).is_ok());
            if g.edge_count() > 1 {
                let skip = drop.index(g.edge_count());
                let keep: Vec<usize> = (0..g.edge_count()).filter(|&e| e != skip).collect();
                let h = g.edge_subgraph(&keep);
                prop_assert!(matches!(decide_layered(&h, Budget::nodes(1_000_000)).outcome, Outcome::Witness(_)));
            }
        }
    }
}

/// A random connected edge subset of the `k`-th layer of Q_n.
fn arb_layer_subgraph(n: u32, k: u32, max_edges: usize) -> impl Strategy<Value = Graph> {
    let verts: Vec<u32> = (0..1u32 << n)
        .filter(|x| x.count_ones() == k || x.count_ones() == k + 1)
        .collect();
    let host: Vec<(u32, u32)> = verts
        .iter()
        .flat_map(|&a| (0..n).map(move |i| (a, a ^ (1 << i))))
        .filter(|(a, b)| {
            a < b && (b.count_ones() == k || b.count_ones() == k + 1) && a.count_ones() == k
        })
        .collect();
    proptest::sample::subsequence(host, 1..=max_edges).prop_map(|edges| {
        let mut ids: Vec<u32> = edges.iter().flat_map(|&(a, b)| [a, b]).collect();
        ids.sort_unstable();
        ids.dedup();
        let at = |x: u32| ids.binary_search(&x).unwrap();
        Graph::new(ids.len(), edges.iter().map(|&(a, b)| (at(a), at(b)))).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn layer_subgraphs_are_never_refuted(g in arb_layer_subgraph(5, 2, 22)) {
        match decide_layered(&g, Budget::nodes(5_000_000)).outcome {
            Outcome::Witness(chi) => prop_assert!(verify_layered(&g, &chi).is_ok()),
            Outcome::Refuted => prop_assert!(false, "refuted a layer subgraph {:?}", g),
            Outcome::BudgetExhausted => {}
        }
    }

    #[test]
    fn cube_subgraphs_are_never_refuted((g, _, _) in arb_cube_subgraph(5, 24)) {
        match decide_cubical(&g, Budget::nodes(5_000_000)).outcome {
            Outcome::Witness(chi) => prop_assert!(verify_cubical(&g, &chi).is_ok()),
            Outcome::Refuted => prop_assert!(false, "refuted a cube subgraph {:?}", g),
            Outcome::BudgetExhausted => {}
        }
    }
}
