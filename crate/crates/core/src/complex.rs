//! Abstract simplicial complexes of dimension at most two.
//!
//! A [`Complex2`] is immutable once built. Vertices carry string labels and
//! dense ids assigned in first-seen order; edges and triangles are stored as
//! strictly increasing vertex-id tuples and numbered in lexicographic order of
//! those tuples, so the tables depend only on the vertex numbering.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::graph::Graph;

macro_rules! simplex_id {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        pub struct $name(pub usize);

        impl $name {
            #[inline]
            pub fn index(self) -> usize {
                self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}", self.0)
            }
        }
    };
}

simplex_id!(
    /// Index into the vertex table of a [`Complex2`].
    VertexId
);
simplex_id!(
    /// Index into the edge table of a [`Complex2`].
    EdgeId
);
simplex_id!(
    /// Index into the triangle table of a [`Complex2`].
    TriangleId
);

/// A simplex of a [`Complex2`], identified by dimension and id.
///
/// The derived order sorts by dimension first and id second, which is the
/// order the collapse engine uses to pick steps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Simplex {
    Vertex(VertexId),
    Edge(EdgeId),
    Triangle(TriangleId),
}

impl Simplex {
    pub fn dim(self) -> usize {
        match self {
            Simplex::Vertex(_) => 0,
            Simplex::Edge(_) => 1,
            Simplex::Triangle(_) => 2,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Simplex::Vertex(v) => v.0,
            Simplex::Edge(e) => e.0,
            Simplex::Triangle(t) => t.0,
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ComplexError {
    #[error("face {face:?} repeats the label {label:?}")]
    DuplicateLabelInFace { face: Vec<String>, label: String },
    #[error("face {0:?} has an unsupported number of vertices (expected 1 to 3)")]
    BadFaceSize(Vec<String>),
    #[error("the complex is empty")]
    EmptyComplex,
    #[error("no simplex with labels {0:?}")]
    UnknownFace(Vec<String>),
}

/// A finite abstract simplicial complex of dimension at most two.
#[derive(Clone, Debug)]
pub struct Complex2 {
    labels: Vec<String>,
    index: HashMap<String, VertexId>,
    edges: Vec<[VertexId; 2]>,
    triangles: Vec<[VertexId; 3]>,
    edge_index: HashMap<[VertexId; 2], EdgeId>,
    triangle_index: HashMap<[VertexId; 3], TriangleId>,
    triangle_edges: Vec<[EdgeId; 3]>,
    edge_triangles: Vec<Vec<TriangleId>>,
    vertex_edges: Vec<Vec<EdgeId>>,
    vertex_triangles: Vec<Vec<TriangleId>>,
}

impl Complex2 {
    /// Builds the downward closure of the given faces.
    ///
    /// Each face is a list of one to three distinct vertex labels. Faces that
    /// are implied by others may be listed or omitted; the result is the same.
    pub fn from_maximal_faces<I, F, S>(faces: I) -> Result<Self, ComplexError>
    where
        I: IntoIterator<Item = F>,
        F: AsRef<[S]>,
        S: AsRef<str>,
    {
        let mut labels: Vec<String> = Vec::new();
        let mut index: HashMap<String, VertexId> = HashMap::new();
        let mut edge_set: BTreeSet<[VertexId; 2]> = BTreeSet::new();
        let mut tri_set: BTreeSet<[VertexId; 3]> = BTreeSet::new();

        for face in faces {
            let face = face.as_ref();
            let names: Vec<String> = face.iter().map(|s| s.as_ref().to_string()).collect();
            if names.is_empty() || names.len() > 3 {
                return Err(ComplexError::BadFaceSize(names));
            }
            for (i, a) in names.iter().enumerate() {
                if names[..i].contains(a) {
                    return Err(ComplexError::DuplicateLabelInFace {
                        face: names.clone(),
                        label: a.clone(),
                    });
                }
            }
            let mut ids: Vec<VertexId> = names
                .iter()
                .map(|name| {
                    *index.entry(name.clone()).or_insert_with(|| {
                        labels.push(name.clone());
                        VertexId(labels.len() - 1)
                    })
                })
                .collect();
            ids.sort_unstable();
            match ids.len() {
                2 => {
                    edge_set.insert([ids[0], ids[1]]);
                }
                3 => {
                    edge_set.insert([ids[0], ids[1]]);
                    edge_set.insert([ids[0], ids[2]]);
                    edge_set.insert([ids[1], ids[2]]);
                    tri_set.insert([ids[0], ids[1], ids[2]]);
                }
                _ => {}
            }
        }
        Ok(Self::assemble(labels, index, edge_set, tri_set))
    }

    fn assemble(
        labels: Vec<String>,
        index: HashMap<String, VertexId>,
        edge_set: BTreeSet<[VertexId; 2]>,
        tri_set: BTreeSet<[VertexId; 3]>,
    ) -> Self {
        let edges: Vec<[VertexId; 2]> = edge_set.into_iter().collect();
        let triangles: Vec<[VertexId; 3]> = tri_set.into_iter().collect();
        let edge_index: HashMap<[VertexId; 2], EdgeId> =
            edges.iter().enumerate().map(|(i, e)| (*e, EdgeId(i))).collect();
        let triangle_index: HashMap<[VertexId; 3], TriangleId> =
            triangles.iter().enumerate().map(|(i, t)| (*t, TriangleId(i))).collect();

        let mut vertex_edges = vec![Vec::new(); labels.len()];
        for (i, [a, b]) in edges.iter().enumerate() {
            vertex_edges[a.0].push(EdgeId(i));
            vertex_edges[b.0].push(EdgeId(i));
        }
        let mut edge_triangles = vec![Vec::new(); edges.len()];
        let mut vertex_triangles = vec![Vec::new(); labels.len()];
        let mut triangle_edges = Vec::with_capacity(triangles.len());
        for (i, &[a, b, c]) in triangles.iter().enumerate() {
            let t = TriangleId(i);
            let es = [edge_index[&[a, b]], edge_index[&[a, c]], edge_index[&[b, c]]];
            for e in es {
                edge_triangles[e.0].push(t);
            }
            for v in [a, b, c] {
                vertex_triangles[v.0].push(t);
            }
            triangle_edges.push(es);
        }

        Complex2 {
            labels,
            index,
            edges,
            triangles,
            edge_index,
            triangle_index,
            triangle_edges,
            edge_triangles,
            vertex_edges,
            vertex_triangles,
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.labels.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn num_simplices(&self) -> usize {
        self.num_vertices() + self.num_edges() + self.num_triangles()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Largest simplex dimension, or `None` for the empty complex.
    pub fn dimension(&self) -> Option<usize> {
        if !self.triangles.is_empty() {
            Some(2)
        } else if !self.edges.is_empty() {
            Some(1)
        } else if !self.labels.is_empty() {
            Some(0)
        } else {
            None
        }
    }

    pub fn vertex_ids(&self) -> impl Iterator<Item = VertexId> {
        (0..self.num_vertices()).map(VertexId)
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> {
        (0..self.num_edges()).map(EdgeId)
    }

    pub fn triangle_ids(&self) -> impl Iterator<Item = TriangleId> {
        (0..self.num_triangles()).map(TriangleId)
    }

    pub fn label(&self, v: VertexId) -> &str {
        &self.labels[v.0]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn vertex_id(&self, label: &str) -> Option<VertexId> {
        self.index.get(label).copied()
    }

    pub fn edge(&self, e: EdgeId) -> [VertexId; 2] {
        self.edges[e.0]
    }

    pub fn triangle(&self, t: TriangleId) -> [VertexId; 3] {
        self.triangles[t.0]
    }

    pub fn edge_id(&self, a: VertexId, b: VertexId) -> Option<EdgeId> {
        let key = if a < b { [a, b] } else { [b, a] };
        self.edge_index.get(&key).copied()
    }

    pub fn triangle_id(&self, a: VertexId, b: VertexId, c: VertexId) -> Option<TriangleId> {
        let mut key = [a, b, c];
        key.sort_unstable();
        self.triangle_index.get(&key).copied()
    }

    /// Edges of `t` in the order `[v0v1, v0v2, v1v2]`.
    pub fn triangle_edges(&self, t: TriangleId) -> [EdgeId; 3] {
        self.triangle_edges[t.0]
    }

    pub fn edge_triangles(&self, e: EdgeId) -> &[TriangleId] {
        &self.edge_triangles[e.0]
    }

    pub fn vertex_edges(&self, v: VertexId) -> &[EdgeId] {
        &self.vertex_edges[v.0]
    }

    pub fn vertex_triangles(&self, v: VertexId) -> &[TriangleId] {
        &self.vertex_triangles[v.0]
    }

    /// The endpoint of `e` different from `v`.
    pub fn other_endpoint(&self, e: EdgeId, v: VertexId) -> VertexId {
        let [a, b] = self.edges[e.0];
        if a == v {
            b
        } else {
            a
        }
    }

    /// Vertex ids of a simplex, ascending.
    pub fn simplex_vertices(&self, s: Simplex) -> Vec<VertexId> {
        match s {
            Simplex::Vertex(v) => vec![v],
            Simplex::Edge(e) => self.edges[e.0].to_vec(),
            Simplex::Triangle(t) => self.triangles[t.0].to_vec(),
        }
    }

    /// Labels of a simplex in vertex-id order.
    pub fn simplex_labels(&self, s: Simplex) -> Vec<String> {
        self.simplex_vertices(s)
            .into_iter()
            .map(|v| self.labels[v.0].clone())
            .collect()
    }

    /// Looks a simplex up by its vertex labels (any order).
    pub fn find_simplex<S: AsRef<str>>(&self, labels: &[S]) -> Option<Simplex> {
        let ids: Option<Vec<VertexId>> = labels.iter().map(|l| self.vertex_id(l.as_ref())).collect();
        let ids = ids?;
        match ids.as_slice() {
            [v] => Some(Simplex::Vertex(*v)),
            [a, b] => self.edge_id(*a, *b).map(Simplex::Edge),
            [a, b, c] => self.triangle_id(*a, *b, *c).map(Simplex::Triangle),
            _ => None,
        }
    }

    /// Every simplex of the complex, in (dimension, id) order.
    pub fn simplices(&self) -> impl Iterator<Item = Simplex> + '_ {
        self.vertex_ids()
            .map(Simplex::Vertex)
            .chain(self.edge_ids().map(Simplex::Edge))
            .chain(self.triangle_ids().map(Simplex::Triangle))
    }

    /// Faces of codimension one.
    pub fn facets_of(&self, s: Simplex) -> Vec<Simplex> {
        match s {
            Simplex::Vertex(_) => Vec::new(),
            Simplex::Edge(e) => self.edges[e.0].iter().map(|&v| Simplex::Vertex(v)).collect(),
            Simplex::Triangle(t) => self.triangle_edges[t.0].iter().map(|&e| Simplex::Edge(e)).collect(),
        }
    }

    /// Inclusion-maximal simplices: triangles, then edges in no triangle, then
    /// vertices in no edge.
    pub fn maximal_faces(&self) -> Vec<Simplex> {
        let mut out: Vec<Simplex> = self.triangle_ids().map(Simplex::Triangle).collect();
        out.extend(
            self.edge_ids()
                .filter(|e| self.edge_triangles[e.0].is_empty())
                .map(Simplex::Edge),
        );
        out.extend(
            self.vertex_ids()
                .filter(|v| self.vertex_edges[v.0].is_empty())
                .map(Simplex::Vertex),
        );
        out
    }

    /// Maximal faces as label lists, each sorted and the whole list sorted.
    ///
    /// This listing depends only on the labelled simplex set, so it is the
    /// canonical serialised form.
    pub fn canonical_faces(&self) -> Vec<Vec<String>> {
        let mut faces: Vec<Vec<String>> = self
            .maximal_faces()
            .into_iter()
            .map(|s| {
                let mut l = self.simplex_labels(s);
                l.sort();
                l
            })
            .collect();
        faces.sort();
        faces
    }

    /// SHA-256 of the canonical face listing, hex encoded.
    pub fn content_hash(&self) -> String {
        let mut hasher = Sha256::new();
        for face in self.canonical_faces() {
            hasher.update(face.join("\u{1f}").as_bytes());
            hasher.update(b"\n");
        }
        hex::encode(hasher.finalize())
    }

    /// True iff every maximal face has the same dimension.
    pub fn is_pure(&self) -> Result<bool, ComplexError> {
        let dim = self.dimension().ok_or(ComplexError::EmptyComplex)?;
        Ok(self.maximal_faces().iter().all(|s| s.dim() == dim))
    }

    /// Reduced Euler characteristic `-1 + V - E + F`.
    pub fn reduced_euler(&self) -> Result<i64, ComplexError> {
        if self.is_empty() {
            return Err(ComplexError::EmptyComplex);
        }
        Ok(-1 + self.num_vertices() as i64 - self.num_edges() as i64 + self.num_triangles() as i64)
    }

    /// Link of `v` as a graph on its neighbours.
    pub fn link_graph(&self, v: VertexId) -> Graph<VertexId> {
        let mut nodes: Vec<VertexId> = self.vertex_edges[v.0]
            .iter()
            .map(|&e| self.other_endpoint(e, v))
            .collect();
        nodes.sort_unstable();
        let pos: HashMap<VertexId, usize> = nodes.iter().enumerate().map(|(i, &n)| (n, i)).collect();
        let arcs = self.vertex_triangles[v.0]
            .iter()
            .map(|&t| {
                let others: Vec<VertexId> = self.triangles[t.0].iter().copied().filter(|&x| x != v).collect();
                (pos[&others[0]], pos[&others[1]])
            })
            .collect();
        Graph::new(nodes, arcs)
    }

    /// Graph on triangles; two triangles are adjacent when they share an edge.
    pub fn dual_graph(&self) -> Graph<TriangleId> {
        let mut arcs = BTreeSet::new();
        for ts in &self.edge_triangles {
            for (i, a) in ts.iter().enumerate() {
                for b in &ts[i + 1..] {
                    arcs.insert((a.0.min(b.0), a.0.max(b.0)));
                }
            }
        }
        Graph::new(self.triangle_ids().collect(), arcs.into_iter().collect())
    }

    /// Component index of every vertex, and the number of components.
    pub fn components(&self) -> (Vec<usize>, usize) {
        let mut uf = crate::graph::UnionFind::new(self.num_vertices());
        for [a, b] in &self.edges {
            uf.union(a.0, b.0);
        }
        uf.labels()
    }

    /// Nonempty and connected.
    pub fn is_connected(&self) -> bool {
        !self.is_empty() && self.components().1 == 1
    }
}

impl PartialEq for Complex2 {
    /// Equality of labelled simplex sets; vertex numbering is ignored.
    fn eq(&self, other: &Self) -> bool {
        self.num_vertices() == other.num_vertices()
            && self.num_edges() == other.num_edges()
            && self.num_triangles() == other.num_triangles()
            && self.canonical_faces() == other.canonical_faces()
    }
}

impl Eq for Complex2 {}

impl fmt::Display for Complex2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Complex2(V={}, E={}, F={})",
            self.num_vertices(),
            self.num_edges(),
            self.num_triangles()
        )
    }
}
