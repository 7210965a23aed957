//! Complete graphs and the replacement product.
//!
//! Vertices are 0-based internally. Edges are kept as a sorted list of
//! `(min, max)` pairs so iteration order (and anything exported from it) is
//! deterministic.

use alloc::collections::VecDeque;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{domain, Error, Result};

/// Simple undirected graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    vertex_count: usize,
    edges: Vec<(usize, usize)>,
    labels: Option<Vec<String>>,
}

impl Graph {
    /// Builds a simple graph, normalizing every edge to `(min, max)` and
    /// sorting. Rejects self-loops, duplicates and out-of-range endpoints.
    pub fn new(vertex_count: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut edges: Vec<(usize, usize)> =
            edges.into_iter().map(|(u, v)| if u <= v { (u, v) } else { (v, u) }).collect();
        for &(u, v) in &edges {
            if v >= vertex_count {
                return Err(Error::IndexOutOfRange { row: u, col: v, dim: vertex_count });
            }
            if u == v {
                return Err(Error::NotSimple("self-loop"));
            }
        }
        edges.sort_unstable();
        if edges.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::NotSimple("duplicate edge"));
        }
        Ok(Self { vertex_count, edges, labels: None })
    }

    /// Attaches one label per vertex.
    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.vertex_count {
            return Err(Error::DimensionMismatch { expected: self.vertex_count, found: labels.len() });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Sorted `(min, max)` edge list.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        let key = if u <= v { (u, v) } else { (v, u) };
        self.edges.binary_search(&key).is_ok()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.vertex_count];
        for &(u, v) in &self.edges {
            deg[u] += 1;
            deg[v] += 1;
        }
        deg
    }

    /// Common degree if the graph is regular.
    pub fn regular_degree(&self) -> Option<usize> {
        let deg = self.degrees();
        match deg.first() {
            None => Some(0),
            Some(&d) => deg.iter().all(|&x| x == d).then_some(d),
        }
    }

    /// Neighbour lists, each sorted ascending.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertex_count];
        for &(u, v) in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    pub fn is_connected(&self) -> bool {
        if self.vertex_count == 0 {
            return true;
        }
        let adj = self.adjacency();
        let mut seen = vec![false; self.vertex_count];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        let mut reached = 1;
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    reached += 1;
                    queue.push_back(v);
                }
            }
        }
        reached == self.vertex_count
    }
}

/// Complete graph on `n >= 2` vertices.
pub fn complete_graph(n: usize) -> Result<Graph> {
    if n < 2 {
        return Err(domain("n", "complete graph needs at least 2 vertices"));
    }
    let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
    Graph::new(n, edges)
}

/// Port matching for a replacement product: `(vertex, port) -> (neighbour, port)`.
///
/// Ports of a `d`-regular base graph are numbered `0..d`; port `p` of vertex
/// `v` is attached to vertex `p` of `v`'s cloud.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rotation {
    degree: usize,
    targets: Vec<(usize, usize)>,
}

impl Rotation {
    /// `targets[v * degree + p]` is the image of `(v, p)`. Must be an
    /// involution without fixed points that never maps a vertex to itself.
    pub fn new(degree: usize, targets: Vec<(usize, usize)>) -> Result<Self> {
        if degree == 0 || !targets.len().is_multiple_of(degree) {
            return Err(Error::InvalidRotation("port table size is not a multiple of the degree"));
        }
        let rot = Self { degree, targets };
        let vertices = rot.vertex_count();
        for v in 0..vertices {
            for p in 0..degree {
                let (w, q) = rot.targets[v * degree + p];
                if w >= vertices || q >= degree {
                    return Err(Error::InvalidRotation("port target out of range"));
                }
                if w == v {
                    return Err(Error::InvalidRotation("port maps into its own cloud"));
                }
                if rot.targets[w * degree + q] != (v, p) {
                    return Err(Error::InvalidRotation("port map is not an involution"));
                }
            }
        }
        Ok(rot)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn vertex_count(&self) -> usize {
        self.targets.len() / self.degree
    }

    /// Image of `(vertex, port)`, both 0-based.
    pub fn apply(&self, vertex: usize, port: usize) -> (usize, usize) {
        self.targets[vertex * self.degree + port]
    }

    /// True when the rotation realizes exactly the edge set of `g`.
    pub fn is_consistent_with(&self, g: &Graph) -> bool {
        if g.vertex_count() != self.vertex_count() {
            return false;
        }
        let mut realized: Vec<(usize, usize)> = Vec::with_capacity(self.targets.len() / 2);
        for v in 0..self.vertex_count() {
            for p in 0..self.degree {
                let (w, _) = self.apply(v, p);
                if v < w {
                    realized.push((v, w));
                }
            }
        }
        realized.sort_unstable();
        realized == g.edges()
    }
}

/// Rank of neighbour `j` among the ports of vertex `i` of the complete graph
/// (ports are the other vertices in increasing order). 0-based.
pub fn complete_port_rank(i: usize, j: usize) -> usize {
    debug_assert_ne!(i, j);
    if j < i {
        j
    } else {
        j - 1
    }
}

/// Inverse of [`complete_port_rank`].
pub fn complete_port_label(i: usize, rank: usize) -> usize {
    if rank < i {
        rank
    } else {
        rank + 1
    }
}

/// Canonical rotation of the complete graph: port `j` of cloud `i` is joined
/// to port `i` of cloud `j` (ports addressed by rank, see
/// [`complete_port_rank`]).
pub fn canonical_rotation_complete(n: usize) -> Result<Rotation> {
    if n < 2 {
        return Err(domain("n", "complete graph needs at least 2 vertices"));
    }
    let degree = n - 1;
    let mut targets = Vec::with_capacity(n * degree);
    for i in 0..n {
        for p in 0..degree {
            let j = complete_port_label(i, p);
            targets.push((j, complete_port_rank(j, i)));
        }
    }
    Rotation::new(degree, targets)
}

/// Replacement product `g1 (r) g2`.
///
/// Vertex `(v, p)` of the product (cloud `v`, position `p`) gets index
/// `v * d1 + p`. Intra-cloud edges copy `g2`; each port contributes one
/// inter-cloud edge following `rot`.
pub fn replacement_product(g1: &Graph, g2: &Graph, rot: &Rotation) -> Result<Graph> {
    let d1 = g1.regular_degree().ok_or(Error::NotRegular)?;
    g2.regular_degree().ok_or(Error::NotRegular)?;
    if g2.vertex_count() != d1 {
        return Err(Error::CloudSizeMismatch { expected: d1, found: g2.vertex_count() });
    }
    if rot.degree() != d1 || !rot.is_consistent_with(g1) {
        return Err(Error::InvalidRotation("rotation does not match the base graph"));
    }
    let clouds = g1.vertex_count();
    let mut edges = Vec::with_capacity(clouds * g2.edge_count() + clouds * d1 / 2);
    for v in 0..clouds {
        let base = v * d1;
        edges.extend(g2.edges().iter().map(|&(a, b)| (base + a, base + b)));
        for p in 0..d1 {
            let (w, q) = rot.apply(v, p);
            if v < w {
                edges.push((base + p, w * d1 + q));
            }
        }
    }
    Graph::new(clouds * d1, edges)
}

/// Covariance selection graph of the model on `n` clouds, built directly from
/// the ordered-pair labelling: vertex `(i, j)` (`i != j`) is adjacent to every
/// `(i, k)` in its own cloud and to its partner `(j, i)`.
///
/// Vertex indices follow the model's flat variable order; labels are the
/// 1-based pairs `"i,j"`.
pub fn covariance_selection_graph(n: usize) -> Result<Graph> {
    if n < 2 {
        return Err(domain("n", "need at least 2 clouds"));
    }
    let m = n - 1;
    let flat = |i: usize, j: usize| i * m + complete_port_rank(i, j);
    let mut edges = Vec::with_capacity(n * m * m / 2 + n * m / 2);
    let mut labels = Vec::with_capacity(n * m);
    for i in 0..n {
        for j in (0..n).filter(|&j| j != i) {
            labels.push(format!("{},{}", i + 1, j + 1));
            for k in (j + 1..n).filter(|&k| k != i) {
                edges.push((flat(i, j), flat(i, k)));
            }
            if i < j {
                edges.push((flat(i, j), flat(j, i)));
            }
        }
    }
    Graph::new(n * m, edges)?.with_labels(labels)
}
