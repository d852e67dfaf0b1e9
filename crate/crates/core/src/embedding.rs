//! Explicit coordinate embeddings into a hypercube or one of its layers.
//!
//! Images are subsets of `{1..dimension}`; internally bit `i` stands for
//! coordinate `i + 1`.

use std::collections::{BTreeMap, HashMap};

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::exec::{self, Execution};
use crate::graph::{path_between, EdgeId, Graph, GraphError, Vertex, VertexPairSet};
use crate::labelling::{
    signatures, verify_cubical, verify_layered, xor_weight, EdgeLabelling, Label, Violation,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EmbeddingError {
    #[error("labelling is not cubical: {0}")]
    NotCubical(Violation),
    #[error("labelling is not layered: {0}")]
    NotLayered(Violation),
    #[error("layer embeddings are only built for connected graphs")]
    Disconnected,
    #[error("embedding has {got} images for {expected} vertices")]
    WrongVertexCount { expected: usize, got: usize },
    #[error("coordinate {coordinate} of vertex {vertex} is outside 1..={dimension}")]
    CoordinateOutOfRange {
        vertex: Vertex,
        coordinate: usize,
        dimension: usize,
    },
    #[error("vertices {0} and {1} share an image")]
    NotInjective(Vertex, Vertex),
    #[error("edge {0} is not mapped to a hypercube edge")]
    EdgeNotUnitDistance(EdgeId),
    #[error("graph is not a forest")]
    NotATree,
    #[error("vertices {0} and {1} lie in different components")]
    Unreachable(Vertex, Vertex),
    #[error("label {0}: orientation flips conflict on a verified labelling")]
    InternalInconsistency(Label),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CubeEmbedding {
    dimension: usize,
    images: Vec<FixedBitSet>,
    label_to_coordinate: BTreeMap<Label, usize>,
}

impl CubeEmbedding {
    /// Validate explicit images (1-based coordinate lists) against `g`.
    pub fn new(g: &Graph, dimension: usize, images: &[Vec<usize>]) -> Result<Self, EmbeddingError> {
        if images.len() != g.vertex_count() {
            return Err(EmbeddingError::WrongVertexCount {
                expected: g.vertex_count(),
                got: images.len(),
            });
        }
        let mut sets = Vec::with_capacity(images.len());
        for (vertex, coords) in images.iter().enumerate() {
            let mut s = FixedBitSet::with_capacity(dimension);
            for &coordinate in coords {
                if coordinate == 0 || coordinate > dimension {
                    return Err(EmbeddingError::CoordinateOutOfRange {
                        vertex,
                        coordinate,
                        dimension,
                    });
                }
                s.insert(coordinate - 1);
            }
            sets.push(s);
        }
        Self::from_bits(g, dimension, sets, BTreeMap::new())
    }

    pub(crate) fn from_bits(
        g: &Graph,
        dimension: usize,
        images: Vec<FixedBitSet>,
        label_to_coordinate: BTreeMap<Label, usize>,
    ) -> Result<Self, EmbeddingError> {
        let f = CubeEmbedding {
            dimension,
            images,
            label_to_coordinate,
        };
        f.validate(g)?;
        Ok(f)
    }

    fn validate(&self, g: &Graph) -> Result<(), EmbeddingError> {
        let mut seen: HashMap<&FixedBitSet, Vertex> = HashMap::with_capacity(self.images.len());
        for (v, img) in self.images.iter().enumerate() {
            if let Some(u) = seen.insert(img, v) {
                return Err(EmbeddingError::NotInjective(u, v));
            }
        }
        for (e, &[u, v]) in g.edges().iter().enumerate() {
            if self.hamming(u, v) != 1 {
                return Err(EmbeddingError::EdgeNotUnitDistance(e));
            }
        }
        Ok(())
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn vertex_count(&self) -> usize {
        self.images.len()
    }

    /// Coordinates of `v`'s image, ascending and 1-based.
    pub fn image(&self, v: Vertex) -> Vec<usize> {
        self.images[v].ones().map(|i| i + 1).collect()
    }

    pub fn images(&self) -> Vec<Vec<usize>> {
        (0..self.images.len()).map(|v| self.image(v)).collect()
    }

    pub fn weight(&self, v: Vertex) -> usize {
        self.images[v].count_ones(..)
    }

    pub fn hamming(&self, u: Vertex, v: Vertex) -> usize {
        xor_weight(&self.images[u], &self.images[v])
    }

    /// For embeddings built from a labelling: which coordinate each label
    /// became. Empty for embeddings given explicitly.
    pub fn label_to_coordinate(&self) -> &BTreeMap<Label, usize> {
        &self.label_to_coordinate
    }

    pub(crate) fn bits(&self, v: Vertex) -> &FixedBitSet {
        &self.images[v]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayerEmbedding {
    pub cube: CubeEmbedding,
    /// Every image has weight `layer` or `layer + 1`.
    pub layer: usize,
}

/// Realise a cubical labelling as a cube embedding with `anchor` at the
/// empty set. Labels are mapped in ascending order onto coordinates
/// `1..=L`. Components other than the anchor's are pinned apart by one extra
/// marker coordinate each (`L + 1`, `L + 2`, ...), so shared labels across
/// components keep their meaning as directions.
pub fn labelling_to_embedding(
    g: &Graph,
    chi: &EdgeLabelling,
    anchor: Vertex,
) -> Result<CubeEmbedding, EmbeddingError> {
    g.check_vertex(anchor)?;
    verify_cubical(g, chi).map_err(EmbeddingError::NotCubical)?;
    let table = signatures(g, chi);
    let universe = table.universe();
    let anchor_comp = table.component(anchor);
    let comps = table.forest().component_count();
    let dimension = universe.len() + comps - 1;
    // markers go to the other components in component order
    let marker = |c: usize| -> usize { universe.len() + if c < anchor_comp { c } else { c - 1 } };
    let mut images = Vec::with_capacity(g.vertex_count());
    for v in 0..g.vertex_count() {
        let mut s = FixedBitSet::with_capacity(dimension);
        s.union_with(table.bits(v));
        let c = table.component(v);
        if c == anchor_comp {
            s.symmetric_difference_with(table.bits(anchor));
        } else {
            s.insert(marker(c));
        }
        images.push(s);
    }
    let map = universe
        .iter()
        .enumerate()
        .map(|(i, &l)| (l, i + 1))
        .collect();
    CubeEmbedding::from_bits(g, dimension, images, map)
}

/// Read directions off an embedding: each edge gets the coordinate it flips.
pub fn embedding_to_labelling(
    g: &Graph,
    f: &CubeEmbedding,
) -> Result<EdgeLabelling, EmbeddingError> {
    if f.vertex_count() != g.vertex_count() {
        return Err(EmbeddingError::WrongVertexCount {
            expected: g.vertex_count(),
            got: f.vertex_count(),
        });
    }
    let labels = g
        .edges()
        .iter()
        .enumerate()
        .map(|(e, &[u, v])| {
            let mut d = f.bits(u).symmetric_difference(f.bits(v));
            match (d.next(), d.next()) {
                (Some(i), None) => Ok(i as Label + 1),
                _ => Err(EmbeddingError::EdgeNotUnitDistance(e)),
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(EdgeLabelling::new(g, labels).expect("one positive label per edge"))
}

/// Realise a layered labelling inside a single layer.
///
/// Starts from [`labelling_to_embedding`], then for every label `c` flips
/// coordinate `c` globally if needed so that each `c`-edge ascends from the
/// anchor's parity class to the other one. Afterwards every edge adds one
/// coordinate when walked from parity class 0, so the weights take two
/// consecutive values.
pub fn layered_embedding(
    g: &Graph,
    chi: &EdgeLabelling,
    anchor: Vertex,
) -> Result<LayerEmbedding, EmbeddingError> {
    g.check_vertex(anchor)?;
    verify_layered(g, chi).map_err(EmbeddingError::NotLayered)?;
    if !g.is_connected() {
        return Err(EmbeddingError::Disconnected);
    }
    let base = labelling_to_embedding(g, chi, anchor)?;
    let coord = base.label_to_coordinate().clone();
    let parity = |v: Vertex| base.weight(v) % 2 == 1;
    let mut flip: BTreeMap<usize, bool> = BTreeMap::new();
    for (e, &[u, v]) in g.edges().iter().enumerate() {
        let low = if parity(u) { v } else { u };
        let bit = coord[&chi.label(e)] - 1;
        let want = base.bits(low).contains(bit);
        match flip.insert(bit, want) {
            Some(prev) if prev != want => {
                return Err(EmbeddingError::InternalInconsistency(chi.label(e)))
            }
            _ => {}
        }
    }
    let mut mask = FixedBitSet::with_capacity(base.dimension());
    for (&bit, &on) in &flip {
        mask.set(bit, on);
    }
    let images: Vec<FixedBitSet> = (0..g.vertex_count())
        .map(|v| {
            let mut s = base.bits(v).clone();
            s.symmetric_difference_with(&mask);
            s
        })
        .collect();
    let cube = CubeEmbedding::from_bits(g, base.dimension(), images, coord)?;
    let layer = (0..g.vertex_count())
        .map(|v| cube.weight(v))
        .min()
        .unwrap_or(0);
    for v in 0..g.vertex_count() {
        let w = cube.weight(v);
        if w != layer && w != layer + 1 {
            return Err(EmbeddingError::InternalInconsistency(0));
        }
    }
    debug_assert_eq!(
        embedding_to_labelling(g, &cube).map(|l| l.into_labels()),
        Ok(chi
            .labels()
            .iter()
            .map(|l| cube.label_to_coordinate()[l] as Label)
            .collect())
    );
    Ok(LayerEmbedding { cube, layer })
}

/// Two non-adjacent vertices whose images are cube neighbours.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("vertices {0} and {1} are at cube distance 1 but not adjacent")]
pub struct InducedViolation(pub Vertex, pub Vertex);

/// Whether the image of `g` is an induced subgraph of the cube.
pub fn is_induced(g: &Graph, f: &CubeEmbedding) -> Result<(), InducedViolation> {
    is_induced_with(g, f, Execution::default())
}

/// [`is_induced`] scanning the cube neighbours of each image, vertex-parallel
/// when requested. The violation reported is the lexicographically smallest.
pub fn is_induced_with(
    g: &Graph,
    f: &CubeEmbedding,
    exec: Execution,
) -> Result<(), InducedViolation> {
    let index: HashMap<&FixedBitSet, Vertex> =
        f.images.iter().enumerate().map(|(v, s)| (s, v)).collect();
    exec::map_indices(exec, g.vertex_count(), |u| {
        let mut probe = f.images[u].clone();
        let mut worst: Option<Vertex> = None;
        for bit in 0..f.dimension {
            probe.toggle(bit);
            if let Some(&v) = index.get(&probe) {
                if v > u && g.edge_between(u, v).is_none() {
                    worst = Some(worst.map_or(v, |w| w.min(v)));
                }
            }
            probe.toggle(bit);
        }
        worst.map(|v| InducedViolation(u, v))
    })
    .into_iter()
    .flatten()
    .next()
    .map_or(Ok(()), Err)
}

/// Cube distances of the pair images, in input order.
pub fn pair_distances(f: &CubeEmbedding, pairs: &VertexPairSet) -> Vec<usize> {
    pairs
        .pairs()
        .iter()
        .map(|&[x, y]| f.hamming(x, y))
        .collect()
}

/// For each pair, the largest number of times one direction is used on the
/// forest path joining it.
pub fn direction_multiplicity_on_pair_paths(
    tree: &Graph,
    f: &CubeEmbedding,
    pairs: &VertexPairSet,
) -> Result<Vec<usize>, EmbeddingError> {
    if !tree.is_forest() {
        return Err(EmbeddingError::NotATree);
    }
    let chi = embedding_to_labelling(tree, f)?;
    pairs
        .pairs()
        .iter()
        .map(|&[x, y]| {
            let path = path_between(tree, x, y)?.ok_or(EmbeddingError::Unreachable(x, y))?;
            let mut counts: HashMap<Label, usize> = HashMap::new();
            for &e in path.edges() {
                *counts.entry(chi.label(e)).or_default() += 1;
            }
            Ok(counts.into_values().max().unwrap_or(0))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p6_images() -> Vec<Vec<usize>> {
        vec![
            vec![],
            vec![1],
            vec![1, 2],
            vec![2],
            vec![2, 3],
            vec![1, 2, 3],
            vec![1, 3],
        ]
    }

    fn brute_induced(g: &Graph, f: &CubeEmbedding) -> Option<(Vertex, Vertex)> {
        for u in 0..g.vertex_count() {
            for v in u + 1..g.vertex_count() {
                if f.hamming(u, v) == 1 && g.edge_between(u, v).is_none() {
                    return Some((u, v));
                }
            }
        }
        None
    }

    #[test]
    fn p6_labelling_gives_known_embedding() {
        let g = Graph::path(6);
        let chi = EdgeLabelling::new(&g, vec![1, 2, 1, 3, 1, 2]).unwrap();
        let f = labelling_to_embedding(&g, &chi, 0).unwrap();
        assert_eq!(f.dimension(), 3);
        assert_eq!(f.images(), p6_images());
    }

    #[test]
    fn single_edge_remaps_label() {
        let g = Graph::path(1);
        let chi = EdgeLabelling::new(&g, vec![5]).unwrap();
        let f = labelling_to_embedding(&g, &chi, 0).unwrap();
        assert_eq!(f.dimension(), 1);
        assert_eq!(f.images(), vec![vec![], vec![1]]);
        assert_eq!(f.label_to_coordinate().get(&5), Some(&1));
    }

    #[test]
    fn reading_directions_back() {
        let g = Graph::path(6);
        let f = CubeEmbedding::new(&g, 3, &p6_images()).unwrap();
        assert_eq!(
            embedding_to_labelling(&g, &f).unwrap().labels(),
            &[1, 2, 1, 3, 1, 2]
        );
        let e = Graph::path(1);
        let f = CubeEmbedding::new(&e, 3, &[vec![], vec![3]]).unwrap();
        assert_eq!(embedding_to_labelling(&e, &f).unwrap().labels(), &[3]);
    }

    #[test]
    fn invalid_embeddings_rejected() {
        let g = Graph::path(2);
        assert_eq!(
            CubeEmbedding::new(&g, 2, &[vec![], vec![1], vec![1]]),
            Err(EmbeddingError::NotInjective(1, 2))
        );
        assert_eq!(
            CubeEmbedding::new(&g, 2, &[vec![], vec![1], vec![2]]),
            Err(EmbeddingError::EdgeNotUnitDistance(1))
        );
        assert!(matches!(
            CubeEmbedding::new(&g, 2, &[vec![], vec![1], vec![1, 3]]),
            Err(EmbeddingError::CoordinateOutOfRange { coordinate: 3, .. })
        ));
    }

    #[test]
    fn layered_embedding_of_distinct_p6() {
        let g = Graph::path(6);
        let le = layered_embedding(&g, &EdgeLabelling::distinct(&g), 0).unwrap();
        assert_eq!(le.layer, 3);
        assert_eq!(le.cube.dimension(), 6);
        let weights: Vec<usize> = (0..7).map(|v| le.cube.weight(v)).collect();
        assert_eq!(weights, vec![3, 4, 3, 4, 3, 4, 3]);
        assert_eq!(le.cube.image(0), vec![2, 4, 6]);
    }

    #[test]
    fn layered_embedding_edge_cases() {
        let g = Graph::path(1);
        let le = layered_embedding(&g, &EdgeLabelling::new(&g, vec![1]).unwrap(), 0).unwrap();
        assert_eq!(le.layer, 0);
        assert_eq!(le.cube.images(), vec![vec![], vec![1]]);
        let c4 = Graph::cycle(4);
        let chi = EdgeLabelling::new(&c4, vec![1, 2, 1, 2]).unwrap();
        assert!(matches!(
            layered_embedding(&c4, &chi, 0),
            Err(EmbeddingError::NotLayered(_))
        ));
    }

    #[test]
    fn induced_checks() {
        let g = Graph::path(6);
        let f = CubeEmbedding::new(&g, 3, &p6_images()).unwrap();
        let found = is_induced(&g, &f).unwrap_err();
        // v0 = {} and v3 = {2} are cube neighbours but not path neighbours
        assert_eq!(found, InducedViolation(0, 3));
        assert_eq!(brute_induced(&g, &f), Some((0, 3)));
        let iso = Graph::empty(2);
        let f = CubeEmbedding::new(&iso, 1, &[vec![], vec![1]]).unwrap();
        assert_eq!(is_induced(&iso, &f), Err(InducedViolation(0, 1)));
        assert_eq!(
            is_induced_with(&iso, &f, Execution::Sequential),
            Err(InducedViolation(0, 1))
        );
    }

    #[test]
    fn pair_distances_and_multiplicities() {
        let g = Graph::path(6);
        let f = CubeEmbedding::new(&g, 3, &p6_images()).unwrap();
        let pairs = VertexPairSet::new(&g, [(0, 4), (1, 5), (2, 6)]).unwrap();
        assert_eq!(pair_distances(&f, &pairs), vec![2, 2, 2]);
        let adjacent = VertexPairSet::new(&g, [(3, 4)]).unwrap();
        assert_eq!(pair_distances(&f, &adjacent), vec![1]);
        let whole = VertexPairSet::new(&g, [(0, 6)]).unwrap();
        assert_eq!(
            direction_multiplicity_on_pair_paths(&g, &f, &whole),
            Ok(vec![3])
        );
        let chi = EdgeLabelling::distinct(&g);
        let f = labelling_to_embedding(&g, &chi, 0).unwrap();
        assert_eq!(
            direction_multiplicity_on_pair_paths(&g, &f, &pairs),
            Ok(vec![1, 1, 1])
        );
        let c4 = Graph::cycle(4);
        let f = CubeEmbedding::new(&c4, 2, &[vec![], vec![1], vec![1, 2], vec![2]]).unwrap();
        let p = VertexPairSet::new(&c4, [(0, 2)]).unwrap();
        assert_eq!(
            direction_multiplicity_on_pair_paths(&c4, &f, &p),
            Err(EmbeddingError::NotATree)
        );
    }

    #[test]
    fn disconnected_components_get_markers() {
        let g = Graph::new(4, [(0, 1), (2, 3)]).unwrap();
        let chi = EdgeLabelling::new(&g, vec![4, 4]).unwrap();
        let f = labelling_to_embedding(&g, &chi, 0).unwrap();
        assert_eq!(f.dimension(), 2);
        assert_eq!(f.images(), vec![vec![], vec![1], vec![2], vec![1, 2]]);
        assert_eq!(embedding_to_labelling(&g, &f).unwrap().labels(), &[1, 1]);
        assert_eq!(
            layered_embedding(&g, &chi, 0),
            Err(EmbeddingError::Disconnected)
        );
    }
}
