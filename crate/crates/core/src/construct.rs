//! Explicit graph families: the two base trees, leaf expansion, spindle
//! attachment, and the end-to-end pipelines producing large-girth cubical
//! graphs that are not layered.
//!
//! Vertex id layout is fixed so fixtures can address vertices directly:
//! base-tree vertices come first, each expansion appends its new leaves in
//! `(old vertex, leaf index)` order, and spindle interiors are appended pair
//! by pair, path by path, from `x` towards `y`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::embedding::{embedding_to_labelling, pair_distances, CubeEmbedding, EmbeddingError};
use crate::graph::{path_between, Graph, GraphError, Vertex, VertexPairSet};
use crate::io::EmbeddingDocument;
use crate::labelling::{verify_cubical, EdgeLabelling, Label, Violation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructionError {
    #[error("k = {k} is not allowed: {reason}")]
    InvalidK { k: usize, reason: &'static str },
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("separation instance is malformed: {0}")]
    MalformedInstance(String),
    #[error("constructed labelling failed verification: {0}")]
    NotCubical(Violation),
    #[error(transparent)]
    Embedding(#[from] EmbeddingError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BaseCase {
    #[serde(rename = "path6")]
    Path6,
    #[serde(rename = "induced-tree")]
    InducedTree,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub base: BaseCase,
    pub rounds: usize,
}

/// A tree, a pair set, a target distance `t`, and a cube embedding of the
/// tree witnessing that every pair can sit at distance `t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeparationInstance {
    tree: Graph,
    pairs: VertexPairSet,
    t: usize,
    witness: CubeEmbedding,
    provenance: Provenance,
}

impl SeparationInstance {
    /// Checks the structural invariants (a tree, and a witness that embeds
    /// it). Pair distances are left to [`verify_separating_condition_i`].
    pub fn new(
        tree: Graph,
        pairs: VertexPairSet,
        t: usize,
        witness: CubeEmbedding,
        provenance: Provenance,
    ) -> Result<Self, ConstructionError> {
        if !tree.is_tree() {
            return Err(ConstructionError::MalformedInstance(
                "graph is not a tree".into(),
            ));
        }
        CubeEmbedding::new(&tree, witness.dimension(), &witness.images())?;
        for &[x, y] in pairs.pairs() {
            tree.check_vertex(x)?;
            tree.check_vertex(y)?;
        }
        Ok(SeparationInstance {
            tree,
            pairs,
            t,
            witness,
            provenance,
        })
    }

    pub fn tree(&self) -> &Graph {
        &self.tree
    }

    pub fn pairs(&self) -> &VertexPairSet {
        &self.pairs
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn witness(&self) -> &CubeEmbedding {
        &self.witness
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }
}

/// The path on six edges with pairs at offset four, embedded in Q_3.
pub fn base_p6() -> SeparationInstance {
    let tree = Graph::path(6);
    let pairs = VertexPairSet::new(&tree, [(0, 4), (1, 5), (2, 6)]).expect("valid pairs");
    let images = [
        vec![],
        vec![1],
        vec![1, 2],
        vec![2],
        vec![2, 3],
        vec![1, 2, 3],
        vec![1, 3],
    ];
    let witness = CubeEmbedding::new(&tree, 3, &images).expect("valid embedding");
    SeparationInstance::new(
        tree,
        pairs,
        2,
        witness,
        Provenance {
            base: BaseCase::Path6,
            rounds: 0,
        },
    )
    .expect("valid instance")
}

/// The nine-vertex tree (path v0..v7 plus v8 on v2), embedded as an
/// induced subgraph of Q_4.
pub fn base_induced() -> SeparationInstance {
    let edges = [
        (0, 1),
        (1, 2),
        (2, 3),
        (3, 4),
        (4, 5),
        (5, 6),
        (6, 7),
        (2, 8),
    ];
    let tree = Graph::new(9, edges).expect("valid tree");
    let pairs = VertexPairSet::new(&tree, [(0, 4), (0, 6), (3, 7), (5, 8)]).expect("valid pairs");
    let images = [
        vec![],
        vec![1],
        vec![1, 2],
        vec![1, 2, 3],
        vec![2, 3],
        vec![2, 3, 4],
        vec![3, 4],
        vec![1, 3, 4],
        vec![1, 2, 4],
    ];
    let witness = CubeEmbedding::new(&tree, 4, &images).expect("valid embedding");
    SeparationInstance::new(
        tree,
        pairs,
        2,
        witness,
        Provenance {
            base: BaseCase::InducedTree,
            rounds: 0,
        },
    )
    .expect("valid instance")
}

/// Number of leaves hung on every vertex by one expansion at distance `t`.
pub fn leaf_count(t: usize) -> usize {
    t + 4
}

/// Hang `t + 4` fresh leaves on every vertex, each on its own new coordinate,
/// and re-pair every leaf of `x` with every leaf of `y` for each old pair.
pub fn leaf_expand(inst: &SeparationInstance) -> SeparationInstance {
    let s = leaf_count(inst.t);
    let n = inst.tree.vertex_count();
    let dim = inst.witness.dimension();
    let leaf = |x: Vertex, i: usize| n + x * s + i;
    let mut edges: Vec<(Vertex, Vertex)> = inst.tree.edges().iter().map(|&[u, v]| (u, v)).collect();
    let mut images = inst.witness.images();
    images.resize((s + 1) * n, Vec::new());
    for x in 0..n {
        for i in 0..s {
            edges.push((x, leaf(x, i)));
            let mut img = images[x].clone();
            img.push(dim + x * s + i + 1);
            images[leaf(x, i)] = img;
        }
    }
    let tree = Graph::new((s + 1) * n, edges).expect("leaf expansion keeps the graph simple");
    let pairs = inst.pairs.pairs().iter().flat_map(|&[x, y]| {
        (0..s).flat_map(move |i| (0..s).map(move |j| (leaf(x, i), leaf(y, j))))
    });
    let pairs = VertexPairSet::new(&tree, pairs).expect("leaf pairs are distinct");
    let witness =
        CubeEmbedding::new(&tree, dim + s * n, &images).expect("fresh coordinates per leaf");
    SeparationInstance {
        tree,
        pairs,
        t: inst.t + 2,
        witness,
        provenance: Provenance {
            base: inst.provenance.base,
            rounds: inst.provenance.rounds + 1,
        },
    }
}

/// Every pair sits at exactly distance `t` under the witness.
pub fn verify_separating_condition_i(inst: &SeparationInstance) -> bool {
    pair_distances(&inst.witness, &inst.pairs)
        .iter()
        .all(|&d| d == inst.t)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpindleVariant {
    /// Central labels in ascending order.
    #[serde(rename = "plain")]
    Plain,
    /// Central labels ordered so that the resulting graph stays induced.
    #[serde(rename = "induced")]
    InducedOrder,
}

/// `path_count` internally disjoint paths of length `length` joining `x`
/// and `y`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Spindle {
    pub x: Vertex,
    pub y: Vertex,
    pub path_count: usize,
    pub length: usize,
    /// One fresh label per path, used on its first and last edge.
    pub fresh_labels: Vec<Label>,
    /// The labels on the `length - 2` central edges, walking from `x`.
    pub central: Vec<Label>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpindleGraph {
    pub graph: Graph,
    pub labelling: EdgeLabelling,
    pub spindles: Vec<Spindle>,
    pub tree_vertex_count: usize,
    pub tree_edge_count: usize,
}

/// Attach a spindle to every pair of `inst`. Tree edges keep the witness
/// directions as labels; fresh labels start above the witness dimension.
pub fn spindle_graph(
    inst: &SeparationInstance,
    k: usize,
    path_count: usize,
    variant: SpindleVariant,
) -> Result<SpindleGraph, ConstructionError> {
    if k < 4 || k % 2 == 1 {
        return Err(ConstructionError::InvalidK {
            k,
            reason: "spindle length must be even and at least 4",
        });
    }
    if inst.t + 2 != k {
        return Err(ConstructionError::PreconditionViolated(format!(
            "instance has t = {}, spindles of length {k} need t = {}",
            inst.t,
            k - 2
        )));
    }
    if path_count == 0 {
        return Err(ConstructionError::PreconditionViolated(
            "path_count must be positive".into(),
        ));
    }
    let tree = &inst.tree;
    let tree_labels = embedding_to_labelling(tree, &inst.witness)?;
    let mut next_fresh = inst.witness.dimension() as Label + 1;
    let mut vertex_count = tree.vertex_count();
    let mut edges: Vec<(Vertex, Vertex)> = tree.edges().iter().map(|&[u, v]| (u, v)).collect();
    let mut labels = tree_labels.labels().to_vec();
    let mut spindles = Vec::with_capacity(inst.pairs.len());

    for &[x, y] in inst.pairs.pairs() {
        let differing: Vec<Label> = {
            let (fx, fy) = (inst.witness.image(x), inst.witness.image(y));
            let mut d: Vec<Label> = fx
                .iter()
                .filter(|c| !fy.contains(c))
                .chain(fy.iter().filter(|c| !fx.contains(c)))
                .map(|&c| c as Label)
                .collect();
            d.sort_unstable();
            d
        };
        if differing.len() != k - 2 {
            return Err(ConstructionError::PreconditionViolated(format!(
                "pair {{{x}, {y}}} is at distance {} in the witness, expected {}",
                differing.len(),
                k - 2
            )));
        }
        let central = match variant {
            SpindleVariant::Plain => differing.clone(),
            SpindleVariant::InducedOrder => {
                induced_central_order(tree, &tree_labels, x, y, &differing)?
            }
        };
        let mut fresh_labels = Vec::with_capacity(path_count);
        for _ in 0..path_count {
            let q = next_fresh;
            next_fresh += 1;
            fresh_labels.push(q);
            let path_labels = std::iter::once(q)
                .chain(central.iter().copied())
                .chain(std::iter::once(q));
            let interior: Vec<Vertex> = (vertex_count..vertex_count + k - 1).collect();
            vertex_count += k - 1;
            let walk: Vec<Vertex> = std::iter::once(x)
                .chain(interior)
                .chain(std::iter::once(y))
                .collect();
            for (w, l) in walk.windows(2).zip(path_labels) {
                edges.push((w[0], w[1]));
                labels.push(l);
            }
        }
        spindles.push(Spindle {
            x,
            y,
            path_count,
            length: k,
            fresh_labels,
            central,
        });
    }

    let graph = Graph::new(vertex_count, edges)?;
    let labelling = EdgeLabelling::new(&graph, labels).expect("every edge labelled");
    Ok(SpindleGraph {
        graph,
        labelling,
        spindles,
        tree_vertex_count: tree.vertex_count(),
        tree_edge_count: tree.edge_count(),
    })
}

/// With `l_1, ..., l_m` the differing labels in the order they appear on the
/// tree path from `x` to `y`, the central order is `l_2, ..., l_m, l_1`.
fn induced_central_order(
    tree: &Graph,
    chi: &EdgeLabelling,
    x: Vertex,
    y: Vertex,
    differing: &[Label],
) -> Result<Vec<Label>, ConstructionError> {
    let path = path_between(tree, x, y)?.ok_or_else(|| {
        ConstructionError::PreconditionViolated(format!("{x} and {y} are disconnected"))
    })?;
    let along: Vec<Label> = path.edges().iter().map(|&e| chi.label(e)).collect();
    let mut order = Vec::with_capacity(differing.len());
    for &l in &along {
        if differing.contains(&l) {
            if order.contains(&l) {
                return Err(ConstructionError::PreconditionViolated(format!(
                    "direction {l} occurs more than once on the path from {x} to {y}"
                )));
            }
            order.push(l);
        }
    }
    if order.len() != differing.len() {
        return Err(ConstructionError::PreconditionViolated(format!(
            "path from {x} to {y} does not realise its differing directions"
        )));
    }
    order.rotate_left(1);
    Ok(order)
}

/// Output of a pipeline: the final graph and labelling plus every staged
/// separation instance.
#[derive(Debug, Clone)]
pub struct Construction {
    pub k: usize,
    pub variant: SpindleVariant,
    pub path_count: usize,
    pub stages: Vec<SeparationInstance>,
    pub spindle: SpindleGraph,
}

impl Construction {
    pub fn graph(&self) -> &Graph {
        &self.spindle.graph
    }

    pub fn labelling(&self) -> &EdgeLabelling {
        &self.spindle.labelling
    }

    /// The last stage, on which the spindles were built.
    pub fn final_stage(&self) -> &SeparationInstance {
        self.stages
            .last()
            .expect("pipelines have at least one stage")
    }

    pub fn trace(&self, emit_witness: bool) -> ConstructionTrace {
        let last = self.final_stage();
        let universe = self.labelling().universe();
        let fresh: Vec<Label> = self
            .spindle
            .spindles
            .iter()
            .flat_map(|s| s.fresh_labels.iter().copied())
            .collect();
        ConstructionTrace {
            k: self.k,
            variant: self.variant,
            path_count: self.path_count,
            base: last.provenance.base,
            expansion_rounds: last.provenance.rounds,
            t: last.t,
            tree_vertex_count: self.spindle.tree_vertex_count,
            tree_edge_count: self.spindle.tree_edge_count,
            pairs: last.pairs.pairs().to_vec(),
            vertices: self.graph().vertex_count(),
            edges: self.graph().edge_count(),
            label_range: [
                universe.first().copied().unwrap_or(0),
                universe.last().copied().unwrap_or(0),
            ],
            fresh_label_range: [
                fresh.first().copied().unwrap_or(0),
                fresh.last().copied().unwrap_or(0),
            ],
            stages: self
                .stages
                .iter()
                .map(|s| StageSummary {
                    round: s.provenance.rounds,
                    t: s.t,
                    vertices: s.tree.vertex_count(),
                    edges: s.tree.edge_count(),
                    pairs: s.pairs.len(),
                    dimension: s.witness.dimension(),
                })
                .collect(),
            witnesses: emit_witness.then(|| {
                self.stages
                    .iter()
                    .map(|s| EmbeddingDocument::from(s.witness()))
                    .collect()
            }),
        }
    }
}

/// Serializable record of a pipeline run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstructionTrace {
    pub k: usize,
    pub variant: SpindleVariant,
    pub path_count: usize,
    pub base: BaseCase,
    pub expansion_rounds: usize,
    pub t: usize,
    /// The tree occupies vertex ids `0..tree_vertex_count` of the graph.
    pub tree_vertex_count: usize,
    pub tree_edge_count: usize,
    pub pairs: Vec<[Vertex; 2]>,
    pub vertices: usize,
    pub edges: usize,
    pub label_range: [Label; 2],
    pub fresh_label_range: [Label; 2],
    pub stages: Vec<StageSummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witnesses: Option<Vec<EmbeddingDocument>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StageSummary {
    pub round: usize,
    pub t: usize,
    pub vertices: usize,
    pub edges: usize,
    pub pairs: usize,
    pub dimension: usize,
}

fn finish(
    k: usize,
    variant: SpindleVariant,
    stages: Vec<SeparationInstance>,
) -> Result<Construction, ConstructionError> {
    let path_count = k + 1;
    let spindle = spindle_graph(stages.last().expect("non-empty"), k, path_count, variant)?;
    verify_cubical(&spindle.graph, &spindle.labelling).map_err(ConstructionError::NotCubical)?;
    Ok(Construction {
        k,
        variant,
        path_count,
        stages,
        spindle,
    })
}

/// Girth at least `k`, cubical, not layered: expand the P6 instance until
/// `t = k - 2`, then attach `k + 1` spindle paths of length `k` per pair.
pub fn build_nonlayered(k: usize) -> Result<Construction, ConstructionError> {
    if k < 4 || k % 2 == 1 {
        return Err(ConstructionError::InvalidK {
            k,
            reason: "the plain construction needs an even k >= 4",
        });
    }
    let mut stages = vec![base_p6()];
    for _ in 0..(k - 4) / 2 {
        let next = leaf_expand(stages.last().expect("non-empty"));
        stages.push(next);
    }
    finish(k, SpindleVariant::Plain, stages)
}

/// The induced variant: start from the nine-vertex tree, expand
/// `k/2 - 2` times, and attach spindles with the induced label order.
pub fn build_induced_nonlayered(k: usize) -> Result<Construction, ConstructionError> {
    if k <= 4 || k % 2 == 1 {
        return Err(ConstructionError::InvalidK {
            k,
            reason: "the induced construction needs an even k > 4",
        });
    }
    let rounds = k / 2 - 1;
    let mut stages = vec![base_induced()];
    for _ in 1..rounds {
        let next = leaf_expand(stages.last().expect("non-empty"));
        stages.push(next);
    }
    finish(k, SpindleVariant::InducedOrder, stages)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::{direction_multiplicity_on_pair_paths, is_induced};

    #[test]
    fn p6_base_case() {
        let inst = base_p6();
        assert_eq!(inst.tree().edge_count(), 6);
        assert_eq!(inst.witness().image(5), vec![1, 2, 3]);
        assert_eq!(pair_distances(inst.witness(), inst.pairs()), vec![2, 2, 2]);
        assert!(verify_separating_condition_i(&inst));
    }

    #[test]
    fn induced_base_case() {
        let inst = base_induced();
        assert_eq!(inst.witness().image(7), vec![1, 3, 4]);
        assert_eq!(is_induced(inst.tree(), inst.witness()), Ok(()));
        let mult = direction_multiplicity_on_pair_paths(inst.tree(), inst.witness(), inst.pairs())
            .unwrap();
        assert!(mult.iter().all(|&m| m <= 2), "{mult:?}");
        assert!(verify_separating_condition_i(&inst));
    }

    #[test]
    fn misdeclared_t_fails_condition_i() {
        let b = base_p6();
        let wrong = SeparationInstance::new(
            b.tree().clone(),
            b.pairs().clone(),
            4,
            b.witness().clone(),
            b.provenance(),
        )
        .unwrap();
        assert!(!verify_separating_condition_i(&wrong));
    }

    #[test]
    fn malformed_instances_rejected() {
        let b = base_p6();
        let c4 = Graph::cycle(4);
        let err = SeparationInstance::new(
            c4,
            VertexPairSet::default(),
            2,
            b.witness().clone(),
            b.provenance(),
        );
        assert!(matches!(err, Err(ConstructionError::MalformedInstance(_))));
    }

    #[test]
    fn expansion_counts() {
        let e = leaf_expand(&base_p6());
        assert_eq!(e.tree().vertex_count(), 49);
        assert_eq!(e.pairs().len(), 108);
        assert_eq!(e.witness().dimension(), 3 + 42);
        assert_eq!(e.t(), 4);
        assert!(verify_separating_condition_i(&e));
        assert!(e.tree().is_tree());
        // leaves of v0 occupy ids 7..13
        assert_eq!(e.tree().neighbors(7), &[(0, 6)]);
    }

    #[test]
    fn spindle_counts_for_k4() {
        let s = spindle_graph(&base_p6(), 4, 5, SpindleVariant::Plain).unwrap();
        assert_eq!(s.graph.vertex_count(), 52);
        assert_eq!(s.graph.edge_count(), 66);
        assert_eq!(verify_cubical(&s.graph, &s.labelling), Ok(()));
        assert_eq!(s.spindles[0].central, vec![2, 3]);
        assert_eq!(s.spindles[0].fresh_labels, vec![4, 5, 6, 7, 8]);
        // first spindle path: v0 - 7 - 8 - 9 - v4 labelled 4, 2, 3, 4
        let first: Vec<Label> = (6..10).map(|e| s.labelling.label(e)).collect();
        assert_eq!(first, vec![4, 2, 3, 4]);
        assert_eq!(s.graph.endpoints(9), [9, 4]);
    }

    #[test]
    fn spindle_preconditions() {
        assert!(matches!(
            spindle_graph(&base_p6(), 6, 7, SpindleVariant::Plain),
            Err(ConstructionError::PreconditionViolated(_))
        ));
        assert!(matches!(
            spindle_graph(&base_p6(), 5, 7, SpindleVariant::Plain),
            Err(ConstructionError::InvalidK { .. })
        ));
        // on P6 the pair {v0, v4} uses direction 1 twice, but 1 is not a
        // differing direction, so the induced order is still defined
        let s = spindle_graph(&base_p6(), 4, 2, SpindleVariant::InducedOrder).unwrap();
        assert_eq!(s.spindles[0].central, vec![3, 2]);
    }

    #[test]
    fn pipeline_argument_checks() {
        assert!(build_nonlayered(3).is_err());
        assert!(build_nonlayered(2).is_err());
        assert!(build_induced_nonlayered(4).is_err());
        assert!(build_induced_nonlayered(7).is_err());
    }

    #[test]
    fn k4_pipeline_has_no_expansion() {
        let c = build_nonlayered(4).unwrap();
        assert_eq!(c.stages.len(), 1);
        assert_eq!(c.graph().vertex_count(), 52);
        let trace = c.trace(false);
        assert_eq!(trace.tree_vertex_count, 7);
        assert_eq!(trace.stages[0].dimension, 3);
        assert_eq!(trace.fresh_label_range, [4, 18]);
    }

    #[test]
    fn pipelines_are_deterministic() {
        let a = build_induced_nonlayered(6).unwrap();
        let b = build_induced_nonlayered(6).unwrap();
        assert_eq!(a.graph(), b.graph());
        assert_eq!(a.labelling(), b.labelling());
        assert_eq!(a.trace(true), b.trace(true));
    }
}
