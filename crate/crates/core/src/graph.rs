//! Finite simple undirected graphs and the traversal primitives the rest of
//! the crate is built on.
//!
//! Vertices are dense `0..vertex_count` ids and edges are indexed by their
//! position in the edge list. Neighbour lists are kept sorted by neighbour id,
//! so every traversal expands neighbours in ascending order and all witnesses
//! are deterministic.

use std::collections::{HashSet, VecDeque};

use thiserror::Error;

use crate::exec::{self, Execution};

pub type Vertex = usize;
pub type EdgeId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("vertex {vertex} out of range (graph has {vertex_count} vertices)")]
    InvalidVertex { vertex: Vertex, vertex_count: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(Vertex),
    #[error("duplicate edge {{{0}, {1}}}")]
    DuplicateEdge(Vertex, Vertex),
    #[error("pair {{{0}, {1}}} does not consist of two distinct vertices")]
    DegeneratePair(Vertex, Vertex),
    #[error("duplicate pair {{{0}, {1}}}")]
    DuplicatePair(Vertex, Vertex),
    #[error("vertices {0} and {1} are not adjacent")]
    NotAdjacent(Vertex, Vertex),
    #[error("vertex {0} repeats in path")]
    RepeatedVertex(Vertex),
}

fn ordered(u: Vertex, v: Vertex) -> (Vertex, Vertex) {
    if u <= v {
        (u, v)
    } else {
        (v, u)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    vertex_count: usize,
    edges: Vec<[Vertex; 2]>,
    adjacency: Vec<Vec<(Vertex, EdgeId)>>,
}

impl Graph {
    /// Build a graph, rejecting self-loops, duplicate edges and out-of-range
    /// endpoints. Edge ids follow the order of `edges`.
    pub fn new<I>(vertex_count: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (Vertex, Vertex)>,
    {
        let mut seen = HashSet::new();
        let mut list = Vec::new();
        let mut adjacency = vec![Vec::new(); vertex_count];
        for (u, v) in edges {
            for w in [u, v] {
                if w >= vertex_count {
                    return Err(GraphError::InvalidVertex {
                        vertex: w,
                        vertex_count,
                    });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            if !seen.insert(ordered(u, v)) {
                return Err(GraphError::DuplicateEdge(u, v));
            }
            let id = list.len();
            list.push([u, v]);
            adjacency[u].push((v, id));
            adjacency[v].push((u, id));
        }
        for nbrs in &mut adjacency {
            nbrs.sort_unstable();
        }
        Ok(Graph {
            vertex_count,
            edges: list,
            adjacency,
        })
    }

    pub fn empty(vertex_count: usize) -> Self {
        Graph::new(vertex_count, []).expect("edgeless graph is valid")
    }

    /// The path v0 - v1 - ... - v_len.
    pub fn path(len: usize) -> Self {
        Graph::new(len + 1, (0..len).map(|i| (i, i + 1))).expect("path is simple")
    }

    pub fn cycle(len: usize) -> Self {
        assert!(len >= 3, "cycles need at least three vertices");
        Graph::new(len, (0..len).map(|i| (i, (i + 1) % len))).expect("cycle is simple")
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
        Graph::new(n, edges).expect("complete graph is simple")
    }

    /// K_{a,b} with the `a` side on ids `0..a`.
    pub fn complete_bipartite(a: usize, b: usize) -> Self {
        let edges = (0..a).flat_map(|u| (0..b).map(move |v| (u, a + v)));
        Graph::new(a + b, edges).expect("complete bipartite graph is simple")
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[[Vertex; 2]] {
        &self.edges
    }

    pub fn endpoints(&self, e: EdgeId) -> [Vertex; 2] {
        self.edges[e]
    }

    /// `(neighbour, edge id)` pairs sorted by neighbour.
    pub fn neighbors(&self, v: Vertex) -> &[(Vertex, EdgeId)] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adjacency[v].len()
    }

    pub fn edge_between(&self, u: Vertex, v: Vertex) -> Option<EdgeId> {
        let nbrs = self.adjacency.get(u)?;
        nbrs.binary_search_by_key(&v, |&(w, _)| w)
            .ok()
            .map(|i| nbrs[i].1)
    }

    pub fn check_vertex(&self, v: Vertex) -> Result<(), GraphError> {
        if v < self.vertex_count {
            Ok(())
        } else {
            Err(GraphError::InvalidVertex {
                vertex: v,
                vertex_count: self.vertex_count,
            })
        }
    }

    /// The subgraph on vertices `0..prefix` keeping every edge with both
    /// endpoints in range, in original edge order.
    pub fn vertex_prefix(&self, prefix: usize) -> Graph {
        let prefix = prefix.min(self.vertex_count);
        let edges = self
            .edges
            .iter()
            .filter(|[u, v]| *u < prefix && *v < prefix)
            .map(|&[u, v]| (u, v));
        Graph::new(prefix, edges).expect("subgraph of a simple graph is simple")
    }

    /// Keep only the listed edges (vertex set unchanged).
    pub fn edge_subgraph(&self, keep: &[EdgeId]) -> Graph {
        Graph::new(
            self.vertex_count,
            keep.iter().map(|&e| (self.edges[e][0], self.edges[e][1])),
        )
        .expect("subgraph of a simple graph is simple")
    }

    /// Component id per vertex (numbered by smallest member) and the count.
    pub fn components(&self) -> (Vec<usize>, usize) {
        let mut comp = vec![usize::MAX; self.vertex_count];
        let mut count = 0;
        let mut queue = VecDeque::new();
        for s in 0..self.vertex_count {
            if comp[s] != usize::MAX {
                continue;
            }
            comp[s] = count;
            queue.push_back(s);
            while let Some(u) = queue.pop_front() {
                for &(w, _) in self.neighbors(u) {
                    if comp[w] == usize::MAX {
                        comp[w] = count;
                        queue.push_back(w);
                    }
                }
            }
            count += 1;
        }
        (comp, count)
    }

    pub fn is_connected(&self) -> bool {
        self.vertex_count == 0 || self.components().1 == 1
    }

    /// Connected and acyclic. The empty graph is not a tree.
    pub fn is_tree(&self) -> bool {
        self.vertex_count > 0 && self.edges.len() + 1 == self.vertex_count && self.is_connected()
    }

    pub fn is_forest(&self) -> bool {
        self.edges.len() + self.components().1 == self.vertex_count
    }
}

/// Unordered vertex pairs attached to a graph, stored as `[min, max]`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct VertexPairSet {
    pairs: Vec<[Vertex; 2]>,
}

impl VertexPairSet {
    pub fn new<I>(g: &Graph, pairs: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (Vertex, Vertex)>,
    {
        let mut seen = HashSet::new();
        let mut list = Vec::new();
        for (u, v) in pairs {
            g.check_vertex(u)?;
            g.check_vertex(v)?;
            if u == v {
                return Err(GraphError::DegeneratePair(u, v));
            }
            let (a, b) = ordered(u, v);
            if !seen.insert((a, b)) {
                return Err(GraphError::DuplicatePair(u, v));
            }
            list.push([a, b]);
        }
        Ok(VertexPairSet { pairs: list })
    }

    pub fn pairs(&self) -> &[[Vertex; 2]] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// A simple path, as a vertex sequence plus the edge ids between them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathWitness {
    vertices: Vec<Vertex>,
    edges: Vec<EdgeId>,
}

impl PathWitness {
    pub fn new(g: &Graph, vertices: Vec<Vertex>) -> Result<Self, GraphError> {
        let mut seen = HashSet::new();
        for &v in &vertices {
            g.check_vertex(v)?;
            if !seen.insert(v) {
                return Err(GraphError::RepeatedVertex(v));
            }
        }
        let edges = vertices
            .windows(2)
            .map(|w| {
                g.edge_between(w[0], w[1])
                    .ok_or(GraphError::NotAdjacent(w[0], w[1]))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(PathWitness { vertices, edges })
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[EdgeId] {
        &self.edges
    }

    /// Number of edges.
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

/// BFS distances from `source`; `None` marks unreachable vertices.
pub fn bfs_distances(g: &Graph, source: Vertex) -> Result<Vec<Option<usize>>, GraphError> {
    g.check_vertex(source)?;
    let mut dist = vec![None; g.vertex_count()];
    dist[source] = Some(0);
    let mut queue = VecDeque::from([source]);
    while let Some(u) = queue.pop_front() {
        let du = dist[u].expect("queued vertices have a distance");
        for &(w, _) in g.neighbors(u) {
            if dist[w].is_none() {
                dist[w] = Some(du + 1);
                queue.push_back(w);
            }
        }
    }
    Ok(dist)
}

/// Shortest-path length, or `None` when `u` and `v` lie in different components.
pub fn bfs_distance(g: &Graph, u: Vertex, v: Vertex) -> Result<Option<usize>, GraphError> {
    g.check_vertex(v)?;
    Ok(bfs_distances(g, u)?[v])
}

/// A shortest `u`-`v` path; neighbours are expanded in ascending id order.
pub fn path_between(g: &Graph, u: Vertex, v: Vertex) -> Result<Option<PathWitness>, GraphError> {
    g.check_vertex(u)?;
    g.check_vertex(v)?;
    let mut parent: Vec<Option<Vertex>> = vec![None; g.vertex_count()];
    let mut seen = vec![false; g.vertex_count()];
    seen[u] = true;
    let mut queue = VecDeque::from([u]);
    while let Some(x) = queue.pop_front() {
        if x == v {
            break;
        }
        for &(w, _) in g.neighbors(x) {
            if !seen[w] {
                seen[w] = true;
                parent[w] = Some(x);
                queue.push_back(w);
            }
        }
    }
    if !seen[v] {
        return Ok(None);
    }
    let mut vertices = vec![v];
    let mut cur = v;
    while let Some(p) = parent[cur] {
        vertices.push(p);
        cur = p;
    }
    vertices.reverse();
    PathWitness::new(g, vertices).map(Some)
}

/// Length of a shortest cycle, or `None` for forests.
pub fn girth(g: &Graph) -> Option<usize> {
    girth_with(g, Execution::default())
}

/// Girth via a BFS from every root; the minimum over roots is exact.
pub fn girth_with(g: &Graph, exec: Execution) -> Option<usize> {
    exec::map_indices(exec, g.vertex_count(), |root| {
        shortest_cycle_through_bfs(g, root)
    })
    .into_iter()
    .flatten()
    .min()
}

fn shortest_cycle_through_bfs(g: &Graph, root: Vertex) -> Option<usize> {
    let n = g.vertex_count();
    let mut dist = vec![usize::MAX; n];
    let mut via = vec![usize::MAX; n];
    dist[root] = 0;
    let mut queue = VecDeque::from([root]);
    let mut best: Option<usize> = None;
    while let Some(u) = queue.pop_front() {
        if let Some(b) = best {
            // every closing edge seen from here on gives at least 2*dist[u]
            if 2 * dist[u] >= b {
                break;
            }
        }
        for &(w, e) in g.neighbors(u) {
            if e == via[u] {
                continue;
            }
            if dist[w] == usize::MAX {
                dist[w] = dist[u] + 1;
                via[w] = e;
                queue.push_back(w);
            } else {
                let len = dist[u] + dist[w] + 1;
                best = Some(best.map_or(len, |b| b.min(len)));
            }
        }
    }
    best
}

/// A cycle closed by one non-forest edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FundamentalCycle {
    /// The non-forest edge closing the cycle.
    pub closing_edge: EdgeId,
    /// Cycle vertices in traversal order, starting at one endpoint of
    /// `closing_edge` and ending at the other.
    pub vertices: Vec<Vertex>,
    /// Cycle edges in traversal order; the closing edge is last.
    pub edges: Vec<EdgeId>,
}

/// BFS spanning forest, one tree per component rooted at its smallest vertex.
#[derive(Debug, Clone)]
pub struct SpanningForest {
    /// `(parent, edge to parent)`; `None` for roots.
    pub parent: Vec<Option<(Vertex, EdgeId)>>,
    pub depth: Vec<usize>,
    pub component: Vec<usize>,
    pub roots: Vec<Vertex>,
    /// Vertices in BFS discovery order, component by component.
    pub order: Vec<Vertex>,
    pub in_forest: Vec<bool>,
    pub cycles: Vec<FundamentalCycle>,
}

pub fn spanning_forest(g: &Graph) -> SpanningForest {
    let n = g.vertex_count();
    let mut parent = vec![None; n];
    let mut depth = vec![0; n];
    let mut component = vec![usize::MAX; n];
    let mut roots = Vec::new();
    let mut order = Vec::with_capacity(n);
    let mut in_forest = vec![false; g.edge_count()];
    let mut queue = VecDeque::new();
    for s in 0..n {
        if component[s] != usize::MAX {
            continue;
        }
        let c = roots.len();
        roots.push(s);
        component[s] = c;
        queue.push_back(s);
        while let Some(u) = queue.pop_front() {
            order.push(u);
            for &(w, e) in g.neighbors(u) {
                if component[w] == usize::MAX {
                    component[w] = c;
                    parent[w] = Some((u, e));
                    depth[w] = depth[u] + 1;
                    in_forest[e] = true;
                    queue.push_back(w);
                }
            }
        }
    }
    let mut forest = SpanningForest {
        parent,
        depth,
        component,
        roots,
        order,
        in_forest,
        cycles: Vec::new(),
    };
    forest.cycles = (0..g.edge_count())
        .filter(|&e| !forest.in_forest[e])
        .map(|e| {
            let [u, v] = g.endpoints(e);
            let path = forest
                .tree_path(u, v)
                .expect("non-forest edge joins one component");
            let mut edges = path.1;
            edges.push(e);
            FundamentalCycle {
                closing_edge: e,
                vertices: path.0,
                edges,
            }
        })
        .collect();
    forest
}

impl SpanningForest {
    /// Vertex and edge sequence of the forest path from `u` to `v`.
    pub fn tree_path(&self, u: Vertex, v: Vertex) -> Option<(Vec<Vertex>, Vec<EdgeId>)> {
        if self.component[u] != self.component[v] {
            return None;
        }
        let (mut a, mut b) = (u, v);
        let mut front = vec![u];
        let mut front_edges = Vec::new();
        let mut back = vec![v];
        let mut back_edges = Vec::new();
        while a != b {
            if self.depth[a] >= self.depth[b] {
                let (p, e) = self.parent[a].expect("non-root has parent");
                front_edges.push(e);
                front.push(p);
                a = p;
            } else {
                let (p, e) = self.parent[b].expect("non-root has parent");
                back_edges.push(e);
                back.push(p);
                b = p;
            }
        }
        back.pop();
        front.extend(back.into_iter().rev());
        front_edges.extend(back_edges.into_iter().rev());
        Some((front, front_edges))
    }

    pub fn component_count(&self) -> usize {
        self.roots.len()
    }
}
