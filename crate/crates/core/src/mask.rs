//! Subcomplexes of a [`Complex2`] as triples of bit-vectors.

use fixedbitset::FixedBitSet;

use crate::complex::{Complex2, ComplexError, EdgeId, Simplex, TriangleId, VertexId};
use crate::graph::UnionFind;

/// A set of simplices of a parent complex, indexed by the parent's ids.
///
/// Most constructors produce downward-closed sets; [`SubcomplexMask::is_valid`]
/// checks the property explicitly for masks assembled by hand.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SubcomplexMask {
    vertices: FixedBitSet,
    edges: FixedBitSet,
    triangles: FixedBitSet,
}

impl SubcomplexMask {
    pub fn empty(k: &Complex2) -> Self {
        SubcomplexMask {
            vertices: FixedBitSet::with_capacity(k.num_vertices()),
            edges: FixedBitSet::with_capacity(k.num_edges()),
            triangles: FixedBitSet::with_capacity(k.num_triangles()),
        }
    }

    pub fn full(k: &Complex2) -> Self {
        let mut m = Self::empty(k);
        m.vertices.insert_range(..);
        m.edges.insert_range(..);
        m.triangles.insert_range(..);
        m
    }

    /// All vertices and edges of `k`.
    pub fn one_skeleton(k: &Complex2) -> Self {
        let mut m = Self::full(k);
        m.triangles.clear();
        m
    }

    /// Downward closure of the given simplices.
    pub fn closure<I: IntoIterator<Item = Simplex>>(k: &Complex2, simplices: I) -> Self {
        let mut m = Self::empty(k);
        for s in simplices {
            m.insert_closed(k, s);
        }
        m
    }

    pub fn closure_of_triangles<I: IntoIterator<Item = TriangleId>>(k: &Complex2, ts: I) -> Self {
        Self::closure(k, ts.into_iter().map(Simplex::Triangle))
    }

    /// Downward closure of faces given by vertex labels.
    pub fn from_label_faces<F, S>(k: &Complex2, faces: &[F]) -> Result<Self, ComplexError>
    where
        F: AsRef<[S]>,
        S: AsRef<str>,
    {
        let mut m = Self::empty(k);
        for face in faces {
            let face = face.as_ref();
            let s = k
                .find_simplex(face)
                .ok_or_else(|| ComplexError::UnknownFace(face.iter().map(|x| x.as_ref().to_string()).collect()))?;
            m.insert_closed(k, s);
        }
        Ok(m)
    }

    /// Inserts `s` together with all of its faces.
    pub fn insert_closed(&mut self, k: &Complex2, s: Simplex) {
        match s {
            Simplex::Vertex(v) => self.vertices.insert(v.0),
            Simplex::Edge(e) => {
                self.edges.insert(e.0);
                for v in k.edge(e) {
                    self.vertices.insert(v.0);
                }
            }
            Simplex::Triangle(t) => {
                self.triangles.insert(t.0);
                for e in k.triangle_edges(t) {
                    self.edges.insert(e.0);
                }
                for v in k.triangle(t) {
                    self.vertices.insert(v.0);
                }
            }
        }
    }

    /// Removes a single simplex without touching its cofaces.
    pub(crate) fn remove_raw(&mut self, s: Simplex) {
        match s {
            Simplex::Vertex(v) => self.vertices.set(v.0, false),
            Simplex::Edge(e) => self.edges.set(e.0, false),
            Simplex::Triangle(t) => self.triangles.set(t.0, false),
        }
    }

    /// Inserts a single simplex without its faces.
    pub(crate) fn insert_raw(&mut self, s: Simplex) {
        match s {
            Simplex::Vertex(v) => self.vertices.insert(v.0),
            Simplex::Edge(e) => self.edges.insert(e.0),
            Simplex::Triangle(t) => self.triangles.insert(t.0),
        }
    }

    /// Same subcomplex with the given triangles dropped (edges are kept).
    pub fn without_triangles<I: IntoIterator<Item = TriangleId>>(&self, ts: I) -> Self {
        let mut m = self.clone();
        for t in ts {
            m.triangles.set(t.0, false);
        }
        m
    }

    pub fn contains(&self, s: Simplex) -> bool {
        match s {
            Simplex::Vertex(v) => self.vertices.contains(v.0),
            Simplex::Edge(e) => self.edges.contains(e.0),
            Simplex::Triangle(t) => self.triangles.contains(t.0),
        }
    }

    pub fn has_vertex(&self, v: VertexId) -> bool {
        self.vertices.contains(v.0)
    }

    pub fn has_edge(&self, e: EdgeId) -> bool {
        self.edges.contains(e.0)
    }

    pub fn has_triangle(&self, t: TriangleId) -> bool {
        self.triangles.contains(t.0)
    }

    pub fn vertex_bits(&self) -> &FixedBitSet {
        &self.vertices
    }

    pub fn edge_bits(&self) -> &FixedBitSet {
        &self.edges
    }

    pub fn triangle_bits(&self) -> &FixedBitSet {
        &self.triangles
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.vertices.ones().map(VertexId)
    }

    pub fn edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.edges.ones().map(EdgeId)
    }

    pub fn triangles(&self) -> impl Iterator<Item = TriangleId> + '_ {
        self.triangles.ones().map(TriangleId)
    }

    /// Member simplices in (dimension, id) order.
    pub fn simplices(&self) -> impl Iterator<Item = Simplex> + '_ {
        self.vertices()
            .map(Simplex::Vertex)
            .chain(self.edges().map(Simplex::Edge))
            .chain(self.triangles().map(Simplex::Triangle))
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.count_ones(..)
    }

    pub fn num_edges(&self) -> usize {
        self.edges.count_ones(..)
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.count_ones(..)
    }

    pub fn num_simplices(&self) -> usize {
        self.num_vertices() + self.num_edges() + self.num_triangles()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_clear() && self.edges.is_clear() && self.triangles.is_clear()
    }

    /// `-1 + V - E + F` of the masked subcomplex.
    pub fn reduced_euler(&self) -> i64 {
        -1 + self.num_vertices() as i64 - self.num_edges() as i64 + self.num_triangles() as i64
    }

    /// True iff the bit-vectors have the parent's sizes and the set is
    /// downward closed.
    pub fn is_valid(&self, k: &Complex2) -> bool {
        if self.vertices.len() != k.num_vertices()
            || self.edges.len() != k.num_edges()
            || self.triangles.len() != k.num_triangles()
        {
            return false;
        }
        self.triangles()
            .all(|t| k.triangle_edges(t).iter().all(|e| self.edges.contains(e.0)))
            && self
                .edges()
                .all(|e| k.edge(e).iter().all(|v| self.vertices.contains(v.0)))
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut m = self.clone();
        m.vertices.union_with(&other.vertices);
        m.edges.union_with(&other.edges);
        m.triangles.union_with(&other.triangles);
        m
    }

    pub fn intersection(&self, other: &Self) -> Self {
        let mut m = self.clone();
        m.vertices.intersect_with(&other.vertices);
        m.edges.intersect_with(&other.edges);
        m.triangles.intersect_with(&other.triangles);
        m
    }

    /// Simplices of `self` not in `other`. Generally not downward closed.
    pub fn difference(&self, other: &Self) -> Self {
        let mut m = self.clone();
        m.vertices.difference_with(&other.vertices);
        m.edges.difference_with(&other.edges);
        m.triangles.difference_with(&other.triangles);
        m
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.vertices.is_subset(&other.vertices)
            && self.edges.is_subset(&other.edges)
            && self.triangles.is_subset(&other.triangles)
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.vertices.is_disjoint(&other.vertices)
            && self.edges.is_disjoint(&other.edges)
            && self.triangles.is_disjoint(&other.triangles)
    }

    /// Maximal simplices of the masked subcomplex.
    pub fn maximal_faces(&self, k: &Complex2) -> Vec<Simplex> {
        let mut out: Vec<Simplex> = self.triangles().map(Simplex::Triangle).collect();
        out.extend(
            self.edges()
                .filter(|&e| !k.edge_triangles(e).iter().any(|t| self.has_triangle(*t)))
                .map(Simplex::Edge),
        );
        out.extend(
            self.vertices()
                .filter(|&v| !k.vertex_edges(v).iter().any(|e| self.has_edge(*e)))
                .map(Simplex::Vertex),
        );
        out
    }

    /// Maximal faces as sorted label lists, sorted.
    pub fn canonical_faces(&self, k: &Complex2) -> Vec<Vec<String>> {
        let mut faces: Vec<Vec<String>> = self
            .maximal_faces(k)
            .into_iter()
            .map(|s| {
                let mut l = k.simplex_labels(s);
                l.sort();
                l
            })
            .collect();
        faces.sort();
        faces
    }

    /// The masked subcomplex as a standalone complex with the same labels.
    pub fn to_complex(&self, k: &Complex2) -> Complex2 {
        let faces: Vec<Vec<String>> = self.maximal_faces(k).into_iter().map(|s| k.simplex_labels(s)).collect();
        Complex2::from_maximal_faces(faces).expect("faces of a valid complex")
    }

    /// The same labelled simplices as a mask of another complex.
    pub fn transfer(&self, from: &Complex2, to: &Complex2) -> Result<Self, ComplexError> {
        let mut m = Self::empty(to);
        for s in self.simplices() {
            let labels = from.simplex_labels(s);
            let t = to.find_simplex(&labels).ok_or(ComplexError::UnknownFace(labels))?;
            m.insert_raw(t);
        }
        Ok(m)
    }

    /// Number of connected components (0 for the empty mask).
    pub fn component_count(&self, k: &Complex2) -> usize {
        let mut uf = UnionFind::new(k.num_vertices());
        for e in self.edges() {
            let [a, b] = k.edge(e);
            uf.union(a.0, b.0);
        }
        let mut roots: Vec<usize> = self.vertices().map(|v| uf.find(v.0)).collect();
        roots.sort_unstable();
        roots.dedup();
        roots.len()
    }

    pub fn is_connected(&self, k: &Complex2) -> bool {
        self.component_count(k) == 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tetra() -> Complex2 {
        Complex2::from_maximal_faces([["1", "2", "3"], ["1", "2", "4"], ["1", "3", "4"], ["2", "3", "4"]]).unwrap()
    }

    #[test]
    fn closure_is_valid() {
        let k = tetra();
        let m = SubcomplexMask::closure_of_triangles(&k, [TriangleId(0)]);
        assert!(m.is_valid(&k));
        assert_eq!((m.num_vertices(), m.num_edges(), m.num_triangles()), (3, 3, 1));
        assert_eq!(m.reduced_euler(), 0);
    }

    #[test]
    fn removing_a_vertex_only_breaks_closure() {
        let k = tetra();
        let mut m = SubcomplexMask::full(&k);
        m.remove_raw(Simplex::Vertex(VertexId(0)));
        assert!(!m.is_valid(&k));
    }

    #[test]
    fn label_faces_and_round_trip() {
        let k = tetra();
        let m = SubcomplexMask::from_label_faces(&k, &[vec!["1", "2"], vec!["4"]]).unwrap();
        assert_eq!(m.canonical_faces(&k), vec![vec!["1", "2"], vec!["4"]]);
        assert_eq!(m.component_count(&k), 2);
        let sub = m.to_complex(&k);
        assert_eq!(sub.num_vertices(), 3);
        assert!(SubcomplexMask::from_label_faces(&k, &[vec!["1", "9"]]).is_err());
    }

    #[test]
    fn set_algebra() {
        let k = tetra();
        let a = SubcomplexMask::closure_of_triangles(&k, [TriangleId(0), TriangleId(1)]);
        let b = SubcomplexMask::closure_of_triangles(&k, [TriangleId(2), TriangleId(3)]);
        assert_eq!(a.union(&b), SubcomplexMask::full(&k));
        let i = a.intersection(&b);
        assert!(i.is_valid(&k));
        assert_eq!(i.num_triangles(), 0);
        assert!(i.is_subset(&a));
        assert_eq!(
            SubcomplexMask::full(&k).without_triangles([TriangleId(0)]).num_edges(),
            6
        );
    }
}
