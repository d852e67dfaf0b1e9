//! Hypercube and hypercube-layer embeddings of graphs through edge
//! labellings: verifiers, explicit embeddings, large-girth constructions of
//! cubical graphs that fit in no layer, and exact decision procedures.

pub mod brute;
pub mod construct;
pub mod embedding;
pub mod exec;
pub mod graph;
pub mod io;
pub mod labelling;
pub mod reproduce;
pub mod solver;

pub use construct::{
    base_induced, base_p6, build_induced_nonlayered, build_nonlayered, leaf_expand, spindle_graph,
    Construction, ConstructionError, ConstructionTrace, SeparationInstance, SpindleVariant,
};
pub use embedding::{
    embedding_to_labelling, is_induced, labelling_to_embedding, layered_embedding, CubeEmbedding,
    EmbeddingError, LayerEmbedding,
};
pub use exec::Execution;
pub use graph::{
    bfs_distance, girth, path_between, spanning_forest, Graph, GraphError, PathWitness, Vertex,
    VertexPairSet,
};
pub use labelling::{
    layer_distance, signatures, verify_cubical, verify_layered, EdgeLabelling, Label,
    LabellingError, Violation,
};
pub use solver::{
    certify_not_layered, decide_cubical, decide_layered, enumerate_labellings,
    enumerate_layered_labellings, sample_layered_labellings, verify_separating_condition_ii,
    Budget, Certification, DecisionResult, Outcome, Property, SolverError,
};
