//! Exponential reference implementations, used as test oracles for the
//! polynomial verifiers and the search. Only meant for tiny graphs.

use std::collections::{BTreeSet, HashMap, HashSet};

use itertools::Itertools;

use crate::graph::{EdgeId, Graph, Vertex};
use crate::labelling::{EdgeLabelling, Label};
use crate::solver::Property;

/// Every simple path with at least one edge, once per unordered pair of
/// traversal directions (first vertex smaller than last).
pub fn simple_paths(g: &Graph) -> Vec<Vec<Vertex>> {
    let mut out = Vec::new();
    let mut on = vec![false; g.vertex_count()];
    for s in 0..g.vertex_count() {
        let mut stack = vec![s];
        on[s] = true;
        extend_paths(g, &mut stack, &mut on, &mut out);
        on[s] = false;
    }
    out
}

fn extend_paths(g: &Graph, stack: &mut Vec<Vertex>, on: &mut [bool], out: &mut Vec<Vec<Vertex>>) {
    let here = *stack.last().expect("non-empty");
    for &(w, _) in g.neighbors(here) {
        if on[w] {
            continue;
        }
        stack.push(w);
        on[w] = true;
        if stack[0] < w {
            out.push(stack.clone());
        }
        extend_paths(g, stack, on, out);
        on[w] = false;
        stack.pop();
    }
}

/// Edge ids along a vertex sequence.
pub fn path_edges(g: &Graph, path: &[Vertex]) -> Vec<EdgeId> {
    path.windows(2)
        .map(|w| {
            g.edge_between(w[0], w[1])
                .expect("consecutive vertices are adjacent")
        })
        .collect()
}

/// Every simple cycle as a sorted edge-id list, each cycle once.
pub fn simple_cycles(g: &Graph) -> Vec<Vec<EdgeId>> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for path in simple_paths(g) {
        if path.len() < 3 {
            continue;
        }
        let (a, b) = (path[0], *path.last().expect("non-empty"));
        if let Some(close) = g.edge_between(a, b) {
            let mut edges = path_edges(g, &path);
            if edges.contains(&close) {
                continue;
            }
            edges.push(close);
            edges.sort_unstable();
            if seen.insert(edges.clone()) {
                out.push(edges);
            }
        }
    }
    out
}

pub fn girth(g: &Graph) -> Option<usize> {
    simple_cycles(g).iter().map(Vec::len).min()
}

fn odd_labels(chi: &EdgeLabelling, edges: &[EdgeId]) -> BTreeSet<Label> {
    let mut odd = BTreeSet::new();
    for &e in edges {
        let c = chi.label(e);
        if !odd.remove(&c) {
            odd.insert(c);
        }
    }
    odd
}

/// Every cycle uses every label an even number of times.
pub fn cycles_condition(g: &Graph, chi: &EdgeLabelling) -> bool {
    simple_cycles(g)
        .iter()
        .all(|c| odd_labels(chi, c).is_empty())
}

/// Every non-empty path uses some label an odd number of times.
pub fn paths_condition(g: &Graph, chi: &EdgeLabelling) -> bool {
    simple_paths(g)
        .iter()
        .all(|p| !odd_labels(chi, &path_edges(g, p)).is_empty())
}

/// Any path joining two distinct edges of colour `c` and avoiding colour
/// `c` has an even number of edges.
pub fn layer_condition(g: &Graph, chi: &EdgeLabelling) -> bool {
    for c in chi.universe() {
        let keep: Vec<EdgeId> = (0..g.edge_count()).filter(|&e| chi.label(e) != c).collect();
        let rest = g.edge_subgraph(&keep);
        let c_edges: Vec<EdgeId> = (0..g.edge_count()).filter(|&e| chi.label(e) == c).collect();
        let mut touching: HashMap<Vertex, Vec<EdgeId>> = HashMap::new();
        for &e in &c_edges {
            for v in g.endpoints(e) {
                touching.entry(v).or_default().push(e);
            }
        }
        // zero-length connections: two c-edges sharing a vertex are fine
        for path in simple_paths(&rest) {
            let (a, b) = (path[0], *path.last().expect("non-empty"));
            let (Some(ea), Some(eb)) = (touching.get(&a), touching.get(&b)) else {
                continue;
            };
            let distinct = ea.iter().any(|x| eb.iter().any(|y| x != y));
            if distinct && (path.len() - 1) % 2 == 1 {
                return false;
            }
        }
    }
    true
}

pub fn is_cubical_labelling(g: &Graph, chi: &EdgeLabelling) -> bool {
    cycles_condition(g, chi) && paths_condition(g, chi)
}

pub fn is_layered_labelling(g: &Graph, chi: &EdgeLabelling) -> bool {
    is_cubical_labelling(g, chi) && layer_condition(g, chi)
}

/// Labellings with `property` counted up to renaming, by trying every map
/// `E -> {1..|E|}`.
pub fn naive_count(g: &Graph, property: Property) -> u64 {
    let m = g.edge_count();
    if m == 0 {
        return 1;
    }
    let mut classes = HashMap::new();
    for labels in (0..m).map(|_| 1..=m as Label).multi_cartesian_product() {
        let chi = EdgeLabelling::new(g, labels).expect("positive labels");
        let canon = chi.canonical();
        if classes.contains_key(&canon) {
            continue;
        }
        let ok = match property {
            Property::Cubical => is_cubical_labelling(g, &chi),
            Property::Layered => is_layered_labelling(g, &chi),
        };
        classes.insert(canon, ok);
    }
    classes.values().filter(|&&ok| ok).count() as u64
}

fn canonical_form(n: usize, edges: &[[Vertex; 2]]) -> Vec<[Vertex; 2]> {
    (0..n)
        .permutations(n)
        .map(|p| {
            let mut es: Vec<[Vertex; 2]> = edges
                .iter()
                .map(|&[u, v]| {
                    let (a, b) = (p[u], p[v]);
                    [a.min(b), a.max(b)]
                })
                .collect();
            es.sort_unstable();
            es
        })
        .min()
        .expect("at least one permutation")
}

/// Connected graphs with 1..=`max_edges` edges and no isolated vertices,
/// one per isomorphism class, ordered by edge count.
pub fn connected_graphs(max_edges: usize) -> Vec<Graph> {
    let mut out = Vec::new();
    let mut level: BTreeSet<(usize, Vec<[Vertex; 2]>)> = BTreeSet::new();
    if max_edges >= 1 {
        level.insert((2, vec![[0, 1]]));
    }
    for m in 1..=max_edges {
        let mut next = BTreeSet::new();
        for (n, edges) in &level {
            out.push(Graph::new(*n, edges.iter().map(|&[u, v]| (u, v))).expect("valid"));
            if m == max_edges {
                continue;
            }
            let present: HashSet<[Vertex; 2]> = edges.iter().copied().collect();
            for u in 0..*n {
                for v in u + 1..=*n {
                    if present.contains(&[u, v]) {
                        continue;
                    }
                    let n2 = if v == *n { n + 1 } else { *n };
                    let mut es = edges.clone();
                    es.push([u, v]);
                    next.insert((n2, canonical_form(n2, &es)));
                }
            }
        }
        level = next;
    }
    out
}

/// Connected subgraphs with 1..=`max_edges` edges of the graph on
/// `vertices` (bit masks) whose edges are pairs at Hamming distance 1, each
/// with the image set of every vertex as coordinate lists (1-based).
pub fn host_subgraphs(vertices: &[u32], max_edges: usize) -> Vec<(Graph, Vec<Vec<usize>>)> {
    let host_edges: Vec<(u32, u32)> = vertices
        .iter()
        .tuple_combinations()
        .filter(|(a, b)| (*a ^ *b).count_ones() == 1)
        .map(|(a, b)| (*a, *b))
        .collect();
    let mut out = Vec::new();
    for k in 1..=max_edges.min(host_edges.len()) {
        for subset in host_edges.iter().combinations(k) {
            let mut ids: Vec<u32> = subset.iter().flat_map(|(a, b)| [*a, *b]).collect();
            ids.sort_unstable();
            ids.dedup();
            let index = |x: u32| ids.binary_search(&x).expect("present");
            let g = Graph::new(
                ids.len(),
                subset.iter().map(|(a, b)| (index(*a), index(*b))),
            )
            .expect("valid");
            if !g.is_connected() {
                continue;
            }
            let images = ids
                .iter()
                .map(|&x| (0..32).filter(|i| x >> i & 1 == 1).map(|i| i + 1).collect())
                .collect();
            out.push((g, images));
        }
    }
    out
}

/// Vertices of `Q_n` as bit masks.
pub fn cube_vertices(n: u32) -> Vec<u32> {
    (0..1u32 << n).collect()
}

/// Vertices of layer `k` of `Q_n`: weight `k` or `k + 1`.
pub fn layer_vertices(n: u32, k: u32) -> Vec<u32> {
    (0..1u32 << n)
        .filter(|x| x.count_ones() == k || x.count_ones() == k + 1)
        .collect()
}
