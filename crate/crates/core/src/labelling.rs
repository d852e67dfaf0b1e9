//! Edge-labellings and their polynomial-time verifiers.
//!
//! A labelling assigns each edge a positive integer "direction". Walking a
//! BFS spanning forest and XOR-ing labels gives every vertex a signature
//! vector over GF(2); the cubical and layered conditions reduce to checks on
//! those signatures:
//!
//! * cycle condition: every fundamental cycle has even label multiplicities,
//!   i.e. a non-forest edge `uv` labelled `c` has `sig(u) ^ sig(v) = {c}`.
//!   Cycle parity vectors are spanned by fundamental cycles, so this covers
//!   every cycle.
//! * path condition: given the cycle condition, a path with all-even label
//!   counts exists iff two distinct vertices of one component share a
//!   signature.
//! * layer condition: for every label `c`, the endpoints of `c`-edges inside
//!   one component of `G - c` all have the same parity class.

use std::collections::HashMap;

use fixedbitset::FixedBitSet;
use petgraph::unionfind::UnionFind;
use thiserror::Error;

use crate::exec::{self, Execution};
use crate::graph::{
    path_between, spanning_forest, EdgeId, Graph, GraphError, PathWitness, SpanningForest, Vertex,
};

pub type Label = u32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LabellingError {
    #[error("labelling has {got} labels but the graph has {expected} edges")]
    LengthMismatch { expected: usize, got: usize },
    #[error("edge {0} has label 0; labels must be positive")]
    NonPositiveLabel(EdgeId),
    #[error("cycle condition fails, so signatures are path-dependent: {0}")]
    ConditionOneViolated(Violation),
    #[error("vertices {0} and {1} lie in different components")]
    Unreachable(Vertex, Vertex),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Why a labelling is not cubical or not layered.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Violation {
    /// A cycle on which `label` occurs an odd number of times.
    #[error("label {label} occurs an odd number of times on cycle {vertices:?}")]
    OddCycle {
        label: Label,
        vertices: Vec<Vertex>,
        edges: Vec<EdgeId>,
    },
    /// A non-empty path on which every label occurs an even number of times.
    #[error("every label occurs an even number of times on path {:?}", path.vertices())]
    EvenPath { path: PathWitness },
    /// Two `label`-edges joined by an odd-length path avoiding `label`.
    #[error("{label}-edges {edges:?} are joined by the odd {label}-free path {:?}", path.vertices())]
    OddLayerPath {
        label: Label,
        edges: [EdgeId; 2],
        path: PathWitness,
    },
}

/// `Ok(())` when the property holds, otherwise the first violation found.
pub type Verdict = Result<(), Violation>;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EdgeLabelling {
    labels: Vec<Label>,
}

impl EdgeLabelling {
    pub fn new(g: &Graph, labels: Vec<Label>) -> Result<Self, LabellingError> {
        if labels.len() != g.edge_count() {
            return Err(LabellingError::LengthMismatch {
                expected: g.edge_count(),
                got: labels.len(),
            });
        }
        if let Some(e) = labels.iter().position(|&l| l == 0) {
            return Err(LabellingError::NonPositiveLabel(e));
        }
        Ok(EdgeLabelling { labels })
    }

    /// Every edge gets its own label `1..=|E|`.
    pub fn distinct(g: &Graph) -> Self {
        EdgeLabelling {
            labels: (1..=g.edge_count() as Label).collect(),
        }
    }

    pub(crate) fn from_raw(labels: Vec<Label>) -> Self {
        EdgeLabelling { labels }
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn label(&self, e: EdgeId) -> Label {
        self.labels[e]
    }

    /// Sorted distinct labels.
    pub fn universe(&self) -> Vec<Label> {
        let mut u = self.labels.clone();
        u.sort_unstable();
        u.dedup();
        u
    }

    /// Renumber labels by first occurrence in edge order (1, 2, 3, ...).
    pub fn canonical(&self) -> EdgeLabelling {
        let mut map = HashMap::new();
        let labels = self
            .labels
            .iter()
            .map(|l| {
                let next = map.len() as Label + 1;
                *map.entry(*l).or_insert(next)
            })
            .collect();
        EdgeLabelling { labels }
    }

    pub fn into_labels(self) -> Vec<Label> {
        self.labels
    }
}

/// Per-vertex GF(2) signatures relative to each component's forest root.
#[derive(Debug, Clone)]
pub struct SignatureTable {
    universe: Vec<Label>,
    sigma: Vec<FixedBitSet>,
    forest: SpanningForest,
}

pub fn signatures(g: &Graph, chi: &EdgeLabelling) -> SignatureTable {
    let universe = chi.universe();
    let index: HashMap<Label, usize> = universe.iter().enumerate().map(|(i, &l)| (l, i)).collect();
    let forest = spanning_forest(g);
    let mut sigma = vec![FixedBitSet::with_capacity(universe.len()); g.vertex_count()];
    for &v in &forest.order {
        if let Some((p, e)) = forest.parent[v] {
            let mut s = sigma[p].clone();
            s.toggle(index[&chi.label(e)]);
            sigma[v] = s;
        }
    }
    SignatureTable {
        universe,
        sigma,
        forest,
    }
}

impl SignatureTable {
    pub fn universe(&self) -> &[Label] {
        &self.universe
    }

    pub fn forest(&self) -> &SpanningForest {
        &self.forest
    }

    /// Signature bits indexed by position in [`universe`](Self::universe).
    pub fn bits(&self, v: Vertex) -> &FixedBitSet {
        &self.sigma[v]
    }

    /// The labels in `sig(v)`, ascending.
    pub fn signature_labels(&self, v: Vertex) -> Vec<Label> {
        self.sigma[v].ones().map(|i| self.universe[i]).collect()
    }

    /// Parity class: weight of `sig(v)` mod 2.
    pub fn parity(&self, v: Vertex) -> bool {
        self.sigma[v].count_ones(..) % 2 == 1
    }

    pub fn component(&self, v: Vertex) -> usize {
        self.forest.component[v]
    }

    /// Weight of `sig(u) ^ sig(v)`; `None` across components.
    pub fn distance(&self, u: Vertex, v: Vertex) -> Option<usize> {
        (self.component(u) == self.component(v)).then(|| xor_weight(&self.sigma[u], &self.sigma[v]))
    }

    /// Labels in `sig(u) ^ sig(v)`, ascending.
    pub fn difference(&self, u: Vertex, v: Vertex) -> Vec<Label> {
        let mut x = self.sigma[u].clone();
        x.symmetric_difference_with(&self.sigma[v]);
        x.ones().map(|i| self.universe[i]).collect()
    }
}

pub(crate) fn xor_weight(a: &FixedBitSet, b: &FixedBitSet) -> usize {
    a.as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(x, y)| (x ^ y).count_ones() as usize)
        .sum()
}

/// Cycle condition, checked on fundamental cycles only.
pub fn verify_condition_cycles(g: &Graph, chi: &EdgeLabelling) -> Verdict {
    check_cycles(g, chi, &signatures(g, chi))
}

fn check_cycles(g: &Graph, chi: &EdgeLabelling, table: &SignatureTable) -> Verdict {
    for cycle in &table.forest.cycles {
        let [u, v] = g.endpoints(cycle.closing_edge);
        let c = chi.label(cycle.closing_edge);
        let diff = table.difference(u, v);
        if diff != [c] {
            // the odd label: one left over from the forest path, or c itself
            let label = diff.iter().copied().find(|&l| l != c).unwrap_or(c);
            return Err(Violation::OddCycle {
                label,
                vertices: cycle.vertices.clone(),
                edges: cycle.edges.clone(),
            });
        }
    }
    Ok(())
}

/// Path condition. Refuses to answer when the cycle condition fails, since
/// signatures are then path-dependent.
pub fn verify_condition_paths(g: &Graph, chi: &EdgeLabelling) -> Result<Verdict, LabellingError> {
    let table = signatures(g, chi);
    check_cycles(g, chi, &table).map_err(LabellingError::ConditionOneViolated)?;
    Ok(check_paths(g, &table))
}

fn check_paths(g: &Graph, table: &SignatureTable) -> Verdict {
    let mut seen: HashMap<(usize, &FixedBitSet), Vertex> = HashMap::new();
    for v in 0..g.vertex_count() {
        if let Some(&u) = seen.get(&(table.component(v), &table.sigma[v])) {
            let path = path_between(g, u, v)
                .expect("vertices are valid")
                .expect("same component");
            return Err(Violation::EvenPath { path });
        }
        seen.insert((table.component(v), &table.sigma[v]), v);
    }
    Ok(())
}

/// Both cubical conditions; the first violation found is returned.
pub fn verify_cubical(g: &Graph, chi: &EdgeLabelling) -> Verdict {
    let table = signatures(g, chi);
    check_cycles(g, chi, &table)?;
    check_paths(g, &table)
}

/// Cubical plus the layer condition.
pub fn verify_layered(g: &Graph, chi: &EdgeLabelling) -> Verdict {
    verify_layered_with(g, chi, Execution::default())
}

/// [`verify_layered`] with an explicit execution mode for the per-label
/// union-find passes. The reported violation is the one for the smallest
/// offending label in either mode.
pub fn verify_layered_with(g: &Graph, chi: &EdgeLabelling, exec: Execution) -> Verdict {
    let table = signatures(g, chi);
    check_cycles(g, chi, &table)?;
    check_paths(g, &table)?;
    let universe = table.universe().to_vec();
    exec::map_slice(exec, &universe, |&c| check_layer_label(g, chi, &table, c))
        .into_iter()
        .find_map(Result::err)
        .map_or(Ok(()), Err)
}

fn check_layer_label(g: &Graph, chi: &EdgeLabelling, table: &SignatureTable, c: Label) -> Verdict {
    let n = g.vertex_count();
    let mut uf = UnionFind::<usize>::new(n);
    let mut c_edges = Vec::new();
    for (e, &[u, v]) in g.edges().iter().enumerate() {
        if chi.label(e) == c {
            c_edges.push(e);
        } else {
            uf.union(u, v);
        }
    }
    // first (endpoint, edge) seen per component of G - c
    let mut first: HashMap<usize, (Vertex, EdgeId)> = HashMap::new();
    for &e in &c_edges {
        for w in g.endpoints(e) {
            let root = uf.find(w);
            match first.get(&root) {
                None => {
                    first.insert(root, (w, e));
                }
                Some(&(a, f)) if table.parity(a) != table.parity(w) => {
                    let keep: Vec<EdgeId> =
                        (0..g.edge_count()).filter(|&x| chi.label(x) != c).collect();
                    let rest = g.edge_subgraph(&keep);
                    let vertices = path_between(&rest, a, w)
                        .expect("vertices are valid")
                        .expect("same component of G - c")
                        .vertices()
                        .to_vec();
                    let path = PathWitness::new(g, vertices).expect("path of a subgraph");
                    return Err(Violation::OddLayerPath {
                        label: c,
                        edges: [f, e],
                        path,
                    });
                }
                Some(_) => {}
            }
        }
    }
    Ok(())
}

/// Cube distance of `x` and `y` in any embedding realising `chi`: the number
/// of labels occurring an odd number of times on an `x`-`y` path.
pub fn layer_distance(
    g: &Graph,
    chi: &EdgeLabelling,
    x: Vertex,
    y: Vertex,
) -> Result<usize, LabellingError> {
    g.check_vertex(x)?;
    g.check_vertex(y)?;
    let table = signatures(g, chi);
    check_cycles(g, chi, &table).map_err(LabellingError::ConditionOneViolated)?;
    table
        .distance(x, y)
        .ok_or(LabellingError::Unreachable(x, y))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lab(g: &Graph, labels: &[Label]) -> EdgeLabelling {
        EdgeLabelling::new(g, labels.to_vec()).unwrap()
    }

    #[test]
    fn rejects_bad_labellings() {
        let g = Graph::path(2);
        assert!(matches!(
            EdgeLabelling::new(&g, vec![1]),
            Err(LabellingError::LengthMismatch { .. })
        ));
        assert_eq!(
            EdgeLabelling::new(&g, vec![1, 0]),
            Err(LabellingError::NonPositiveLabel(1))
        );
    }

    #[test]
    fn p6_signatures_match_known_images() {
        let g = Graph::path(6);
        let t = signatures(&g, &lab(&g, &[1, 2, 1, 3, 1, 2]));
        assert_eq!(t.signature_labels(2), vec![1, 2]);
        assert_eq!(t.signature_labels(4), vec![2, 3]);
        assert_eq!(t.signature_labels(6), vec![1, 3]);
        assert_eq!(t.signature_labels(0), Vec::<Label>::new());
    }

    #[test]
    fn single_edge_and_distinct_path_signatures() {
        let g = Graph::path(1);
        let t = signatures(&g, &lab(&g, &[7]));
        assert_eq!(t.signature_labels(1), vec![7]);
        let g = Graph::path(3);
        let t = signatures(&g, &lab(&g, &[1, 2, 3]));
        assert_eq!(t.signature_labels(3), vec![1, 2, 3]);
    }

    #[test]
    fn cycle_condition_examples() {
        let c4 = Graph::cycle(4);
        assert_eq!(
            verify_condition_cycles(&c4, &lab(&c4, &[1, 2, 1, 2])),
            Ok(())
        );
        let err = verify_condition_cycles(&c4, &lab(&c4, &[1, 2, 3, 2])).unwrap_err();
        match err {
            Violation::OddCycle { edges, .. } => assert_eq!(edges.len(), 4),
            other => panic!("unexpected {other:?}"),
        }
        let k3 = Graph::cycle(3);
        for labels in [[1, 1, 1], [1, 2, 1], [1, 2, 3]] {
            assert!(verify_condition_cycles(&k3, &lab(&k3, &labels)).is_err());
        }
    }

    #[test]
    fn path_condition_examples() {
        let g = Graph::path(6);
        assert_eq!(
            verify_condition_paths(&g, &lab(&g, &[1, 2, 1, 3, 1, 2])),
            Ok(Ok(()))
        );
        let g2 = Graph::path(2);
        let v = verify_condition_paths(&g2, &lab(&g2, &[1, 1]))
            .unwrap()
            .unwrap_err();
        match v {
            Violation::EvenPath { path } => assert_eq!(path.vertices(), &[0, 1, 2]),
            other => panic!("unexpected {other:?}"),
        }
        let c4 = Graph::cycle(4);
        assert!(matches!(
            verify_condition_paths(&c4, &lab(&c4, &[1, 2, 3, 2])),
            Err(LabellingError::ConditionOneViolated(_))
        ));
    }

    #[test]
    fn four_cycle_is_cubical_not_layered() {
        let c4 = Graph::cycle(4);
        let chi = lab(&c4, &[1, 2, 1, 2]);
        assert_eq!(verify_cubical(&c4, &chi), Ok(()));
        match verify_layered(&c4, &chi).unwrap_err() {
            Violation::OddLayerPath { path, label, .. } => {
                assert_eq!(path.len() % 2, 1);
                for &e in path.edges() {
                    assert_ne!(chi.label(e), label);
                }
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn p6_layer_checks() {
        let g = Graph::path(6);
        assert_eq!(verify_layered(&g, &EdgeLabelling::distinct(&g)), Ok(()));
        let chi = lab(&g, &[1, 2, 1, 3, 1, 2]);
        assert_eq!(verify_cubical(&g, &chi), Ok(()));
        match verify_layered(&g, &chi).unwrap_err() {
            Violation::OddLayerPath { label, edges, path } => {
                assert_eq!(label, 1);
                assert_eq!(edges, [0, 2]);
                assert_eq!(path.vertices(), &[1, 2]);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(verify_cubical(&Graph::cycle(3), &lab(&Graph::cycle(3), &[1, 2, 3])).is_err());
    }

    #[test]
    fn layer_distances() {
        let g = Graph::path(6);
        let chi = lab(&g, &[1, 2, 3, 1, 2, 4]);
        assert_eq!(layer_distance(&g, &chi, 0, 4), Ok(2));
        assert_eq!(layer_distance(&g, &chi, 3, 3), Ok(0));
        assert_eq!(
            layer_distance(&g, &EdgeLabelling::distinct(&g), 0, 6),
            Ok(6)
        );
        let two = Graph::new(4, [(0, 1), (2, 3)]).unwrap();
        assert_eq!(
            layer_distance(&two, &lab(&two, &[1, 1]), 0, 3),
            Err(LabellingError::Unreachable(0, 3))
        );
    }

    #[test]
    fn canonical_renumbers_by_first_occurrence() {
        let g = Graph::path(4);
        let chi = lab(&g, &[9, 4, 9, 2]);
        assert_eq!(chi.canonical().labels(), &[1, 2, 1, 3]);
    }

    #[test]
    fn layered_modes_agree() {
        let c6 = Graph::cycle(6);
        let chi = lab(&c6, &[1, 2, 3, 1, 2, 3]);
        assert_eq!(
            verify_layered_with(&c6, &chi, Execution::Sequential),
            verify_layered_with(&c6, &chi, Execution::Parallel)
        );
    }
}
