//! JSON documents and DOT export.
//!
//! Graph file:
//!
//! ```json
//! { "vertex_count": 3, "edges": [[0, 1], [1, 2]], "pairs": [[0, 2]], "labels": [1, 2] }
//! ```
//!
//! `pairs` and `labels` are optional; `labels` is aligned with `edges`.
//! Unknown fields are rejected.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::embedding::{CubeEmbedding, EmbeddingError};
use crate::graph::{Graph, GraphError, Vertex, VertexPairSet};
use crate::labelling::{EdgeLabelling, Label, LabellingError};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Write {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed document: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Labelling(#[from] LabellingError),
    #[error(transparent)]
    Embedding(#[from] EmbeddingError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphFile {
    pub vertex_count: usize,
    pub edges: Vec<[Vertex; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pairs: Option<Vec<[Vertex; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<Label>>,
}

/// A validated graph file.
#[derive(Debug, Clone)]
pub struct LoadedGraph {
    pub graph: Graph,
    pub pairs: Option<VertexPairSet>,
    pub labelling: Option<EdgeLabelling>,
}

impl GraphFile {
    pub fn new(
        g: &Graph,
        pairs: Option<&VertexPairSet>,
        labelling: Option<&EdgeLabelling>,
    ) -> Self {
        GraphFile {
            vertex_count: g.vertex_count(),
            edges: g.edges().to_vec(),
            pairs: pairs.map(|p| p.pairs().to_vec()),
            labels: labelling.map(|l| l.labels().to_vec()),
        }
    }

    pub fn load(&self) -> Result<LoadedGraph, IoError> {
        let graph = Graph::new(self.vertex_count, self.edges.iter().map(|&[u, v]| (u, v)))?;
        let pairs = self
            .pairs
            .as_ref()
            .map(|p| VertexPairSet::new(&graph, p.iter().map(|&[u, v]| (u, v))))
            .transpose()?;
        let labelling = self
            .labels
            .as_ref()
            .map(|l| EdgeLabelling::new(&graph, l.clone()))
            .transpose()?;
        Ok(LoadedGraph {
            graph,
            pairs,
            labelling,
        })
    }

    pub fn from_json(text: &str) -> Result<LoadedGraph, IoError> {
        serde_json::from_str::<GraphFile>(text)?.load()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmbeddingDocument {
    pub dimension: usize,
    pub vertices: Vec<Vec<usize>>,
    #[serde(default)]
    pub label_to_coordinate: BTreeMap<Label, usize>,
}

impl From<&CubeEmbedding> for EmbeddingDocument {
    fn from(f: &CubeEmbedding) -> Self {
        EmbeddingDocument {
            dimension: f.dimension(),
            vertices: f.images(),
            label_to_coordinate: f.label_to_coordinate().clone(),
        }
    }
}

impl EmbeddingDocument {
    /// Validate against `g`. The label map is informational and not
    /// re-attached.
    pub fn to_embedding(&self, g: &Graph) -> Result<CubeEmbedding, IoError> {
        Ok(CubeEmbedding::new(g, self.dimension, &self.vertices)?)
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, IoError> {
    let text = fs::read_to_string(path).map_err(|source| IoError::Read {
        path: path.display().to_string(),
        source,
    })?;
    Ok(serde_json::from_str(&text)?)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), IoError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).map_err(|source| IoError::Write {
        path: path.display().to_string(),
        source,
    })
}

pub fn read_graph(path: &Path) -> Result<LoadedGraph, IoError> {
    read_json::<GraphFile>(path)?.load()
}

/// DOT text with edge labels and, when given, coordinate sets on vertices.
pub fn to_dot(
    g: &Graph,
    labelling: Option<&EdgeLabelling>,
    coords: Option<&CubeEmbedding>,
) -> String {
    let mut out = String::from("graph G {\n");
    for v in 0..g.vertex_count() {
        match coords {
            Some(f) => {
                let img: Vec<String> = f.image(v).iter().map(ToString::to_string).collect();
                let _ = writeln!(out, "  {v} [label=\"{v}\\n{{{}}}\"];", img.join(","));
            }
            None => {
                let _ = writeln!(out, "  {v};");
            }
        }
    }
    for (e, &[u, v]) in g.edges().iter().enumerate() {
        match labelling {
            Some(chi) => {
                let _ = writeln!(out, "  {u} -- {v} [label=\"{}\"];", chi.label(e));
            }
            None => {
                let _ = writeln!(out, "  {u} -- {v};");
            }
        }
    }
    out.push_str("}\n");
    out
}
