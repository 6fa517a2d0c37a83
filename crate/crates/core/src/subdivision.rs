//! Barycentric and seven-part subdivisions with carrier tracking.
//!
//! A [`SubdivisionMap`] records, for every simplex of the child complex, the
//! smallest simplex of the parent containing it. That carrier is what turns a
//! subcomplex `L` of the parent into the corresponding subcomplex of the
//! child.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::{Complex2, ComplexError, Simplex, TriangleId};
use crate::mask::SubcomplexMask;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum SubdivisionError {
    #[error("triangle id {0} does not exist")]
    InvalidTriangle(usize),
    #[error("the second map's parent is not the first map's child")]
    MapMismatch,
    #[error("carrier table does not match the child complex")]
    CarrierLength,
    #[error("carrier of {child:?} is not a simplex of the parent")]
    UnknownCarrier { child: Vec<String> },
    #[error("carrier of a face of {child:?} is not a face of its carrier")]
    NotFaceMonotone { child: Vec<String> },
    #[error("parent simplex {0:?} carries no child simplex")]
    NotSurjective(Vec<String>),
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

/// A subdivision `child` of `parent` together with its carrier function.
#[derive(Clone, Debug)]
pub struct SubdivisionMap {
    parent: Complex2,
    child: Complex2,
    vertex_carrier: Vec<Simplex>,
    edge_carrier: Vec<Simplex>,
    triangle_carrier: Vec<Simplex>,
}

/// True iff `a` is a face of `b` (including `a == b`).
pub fn is_face(k: &Complex2, a: Simplex, b: Simplex) -> bool {
    let vb = k.simplex_vertices(b);
    k.simplex_vertices(a).iter().all(|v| vb.contains(v))
}

impl SubdivisionMap {
    /// Validates and wraps a carrier function given as a closure over child
    /// simplices.
    pub fn new<F>(parent: Complex2, child: Complex2, carrier: F) -> Result<Self, SubdivisionError>
    where
        F: Fn(Simplex) -> Simplex,
    {
        let m = SubdivisionMap {
            vertex_carrier: child.vertex_ids().map(|v| carrier(Simplex::Vertex(v))).collect(),
            edge_carrier: child.edge_ids().map(|e| carrier(Simplex::Edge(e))).collect(),
            triangle_carrier: child.triangle_ids().map(|t| carrier(Simplex::Triangle(t))).collect(),
            parent,
            child,
        };
        m.validate()?;
        Ok(m)
    }

    fn validate(&self) -> Result<(), SubdivisionError> {
        let p = &self.parent;
        let in_range = |s: Simplex| match s {
            Simplex::Vertex(v) => v.0 < p.num_vertices(),
            Simplex::Edge(e) => e.0 < p.num_edges(),
            Simplex::Triangle(t) => t.0 < p.num_triangles(),
        };
        let mut hit: HashSet<Simplex> = HashSet::new();
        for s in self.child.simplices() {
            let c = self.carrier(s);
            if !in_range(c) || c.dim() < s.dim() {
                return Err(SubdivisionError::UnknownCarrier {
                    child: self.child.simplex_labels(s),
                });
            }
            for f in self.child.facets_of(s) {
                let cf = self.carrier(f);
                if !in_range(cf) || !is_face(p, cf, c) {
                    return Err(SubdivisionError::NotFaceMonotone {
                        child: self.child.simplex_labels(s),
                    });
                }
            }
            hit.insert(c);
        }
        if let Some(s) = p.simplices().find(|s| !hit.contains(s)) {
            return Err(SubdivisionError::NotSurjective(p.simplex_labels(s)));
        }
        Ok(())
    }

    pub fn parent(&self) -> &Complex2 {
        &self.parent
    }

    pub fn child(&self) -> &Complex2 {
        &self.child
    }

    /// Smallest parent simplex containing the child simplex `s`.
    pub fn carrier(&self, s: Simplex) -> Simplex {
        match s {
            Simplex::Vertex(v) => self.vertex_carrier[v.0],
            Simplex::Edge(e) => self.edge_carrier[e.0],
            Simplex::Triangle(t) => self.triangle_carrier[t.0],
        }
    }

    pub fn to_doc(&self) -> SubdivisionMapDoc {
        SubdivisionMapDoc {
            parent: self.parent.canonical_faces(),
            child: self.child.canonical_faces(),
            carrier: self
                .child
                .simplices()
                .map(|s| {
                    (
                        self.child.simplex_labels(s),
                        self.parent.simplex_labels(self.carrier(s)),
                    )
                })
                .collect(),
        }
    }
}

/// JSON form: both complexes as face lists and the carrier as label-tuple pairs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubdivisionMapDoc {
    pub parent: Vec<Vec<String>>,
    pub child: Vec<Vec<String>>,
    pub carrier: Vec<(Vec<String>, Vec<String>)>,
}

impl SubdivisionMapDoc {
    pub fn to_map(&self) -> Result<SubdivisionMap, SubdivisionError> {
        let parent = Complex2::from_maximal_faces(&self.parent)?;
        let child = Complex2::from_maximal_faces(&self.child)?;
        let mut table: HashMap<Simplex, Simplex> = HashMap::new();
        for (c, p) in &self.carrier {
            let cs = child
                .find_simplex(c)
                .ok_or_else(|| ComplexError::UnknownFace(c.clone()))?;
            let ps = parent
                .find_simplex(p)
                .ok_or_else(|| ComplexError::UnknownFace(p.clone()))?;
            table.insert(cs, ps);
        }
        if table.len() != child.num_simplices() {
            return Err(SubdivisionError::CarrierLength);
        }
        SubdivisionMap::new(parent, child, |s| table[&s])
    }
}

/// Hands out child vertex labels, priming on collision.
struct LabelAllocator {
    used: HashSet<String>,
}

impl LabelAllocator {
    fn new<I: IntoIterator<Item = String>>(reserved: I) -> Self {
        LabelAllocator {
            used: reserved.into_iter().collect(),
        }
    }

    fn fresh(&mut self, base: String) -> String {
        let mut name = base;
        while self.used.contains(&name) {
            name.push('\'');
        }
        self.used.insert(name.clone());
        name
    }
}

/// The map `K -> K` with every simplex carried by itself.
pub fn identity(k: &Complex2) -> SubdivisionMap {
    SubdivisionMap::new(k.clone(), k.clone(), |s| s).expect("identity is a subdivision")
}

/// Barycentric subdivision: one child vertex per parent simplex, child
/// simplices are chains under inclusion.
pub fn barycentric(k: &Complex2) -> SubdivisionMap {
    let mut alloc = LabelAllocator::new(std::iter::empty());
    let names: HashMap<Simplex, String> = k
        .simplices()
        .map(|s| (s, alloc.fresh(k.simplex_labels(s).join("+"))))
        .collect();
    let owner: HashMap<&str, Simplex> = names.iter().map(|(s, n)| (n.as_str(), *s)).collect();

    let mut faces: Vec<Vec<&str>> = Vec::new();
    for s in k.simplices() {
        let top = names[&s].as_str();
        match s {
            Simplex::Vertex(_) => faces.push(vec![top]),
            Simplex::Edge(e) => {
                for v in k.edge(e) {
                    faces.push(vec![names[&Simplex::Vertex(v)].as_str(), top]);
                }
            }
            Simplex::Triangle(t) => {
                for e in k.triangle_edges(t) {
                    for v in k.edge(e) {
                        faces.push(vec![
                            names[&Simplex::Vertex(v)].as_str(),
                            names[&Simplex::Edge(e)].as_str(),
                            top,
                        ]);
                    }
                }
            }
        }
    }
    let child = Complex2::from_maximal_faces(&faces).expect("chains have distinct labels");
    // a chain is carried by its largest element
    let carrier = |s: Simplex| {
        child
            .simplex_vertices(s)
            .into_iter()
            .map(|v| owner[child.label(v)])
            .max_by_key(|p| p.dim())
            .expect("simplices are nonempty")
    };
    SubdivisionMap::new(k.clone(), child.clone(), carrier).expect("barycentric subdivision is valid")
}

/// Seven-part subdivision of the triangle `tau`; returns the map and the id
/// of the middle triangle in the child.
pub fn seven_part(k: &Complex2, tau: TriangleId) -> Result<(SubdivisionMap, TriangleId), SubdivisionError> {
    let (m, middles) = seven_part_many(k, &[tau])?;
    Ok((m, middles[0]))
}

/// Seven-part subdivision of several triangles at once. Middle triangle ids
/// are returned in the order of `taus`.
///
/// A triangle `abc` becomes a middle triangle `a'b'c'` and the ring
/// `aba', ba'b', bcb', cb'c', cac', ac'a'`. The edges of `abc` stay whole.
pub fn seven_part_many(
    k: &Complex2,
    taus: &[TriangleId],
) -> Result<(SubdivisionMap, Vec<TriangleId>), SubdivisionError> {
    for t in taus {
        if t.0 >= k.num_triangles() {
            return Err(SubdivisionError::InvalidTriangle(t.0));
        }
    }
    let chosen: HashSet<TriangleId> = taus.iter().copied().collect();
    let mut alloc = LabelAllocator::new(k.labels().iter().cloned());
    let mut faces: Vec<Vec<String>> = Vec::new();
    let mut primed: HashMap<String, TriangleId> = HashMap::new();
    let mut middle_labels: HashMap<TriangleId, [String; 3]> = HashMap::new();

    for s in k.maximal_faces() {
        match s {
            Simplex::Triangle(t) if chosen.contains(&t) => {
                let [a, b, c] = k.triangle(t).map(|v| k.label(v).to_string());
                let tag = format!("{a}+{b}+{c}");
                let [pa, pb, pc] = [&a, &b, &c].map(|x| alloc.fresh(format!("{x}^{tag}")));
                for p in [&pa, &pb, &pc] {
                    primed.insert(p.clone(), t);
                }
                faces.push(vec![pa.clone(), pb.clone(), pc.clone()]);
                faces.push(vec![a.clone(), b.clone(), pa.clone()]);
                faces.push(vec![b.clone(), pa.clone(), pb.clone()]);
                faces.push(vec![b.clone(), c.clone(), pb.clone()]);
                faces.push(vec![c.clone(), pb.clone(), pc.clone()]);
                faces.push(vec![c.clone(), a.clone(), pc.clone()]);
                faces.push(vec![a.clone(), pc.clone(), pa.clone()]);
                middle_labels.insert(t, [pa, pb, pc]);
            }
            _ => faces.push(k.simplex_labels(s)),
        }
    }
    let child = Complex2::from_maximal_faces(&faces)?;
    let carrier = |s: Simplex| {
        let labels = child.simplex_labels(s);
        match labels.iter().find_map(|l| primed.get(l)) {
            Some(&t) => Simplex::Triangle(t),
            None => k
                .find_simplex(&labels)
                .expect("unprimed child simplices are parent simplices"),
        }
    };
    let map = SubdivisionMap::new(k.clone(), child.clone(), carrier)?;
    let middles = taus
        .iter()
        .map(|t| match child.find_simplex(&middle_labels[t]) {
            Some(Simplex::Triangle(m)) => m,
            _ => unreachable!("middle triangle is in the child"),
        })
        .collect();
    Ok((map, middles))
}

/// The subdivision `m1` followed by `m2`, where `m2` subdivides `m1`'s child.
pub fn compose(m1: &SubdivisionMap, m2: &SubdivisionMap) -> Result<SubdivisionMap, SubdivisionError> {
    if m1.child != m2.parent {
        return Err(SubdivisionError::MapMismatch);
    }
    let mid = |s: Simplex| {
        m1.child
            .find_simplex(&m2.parent.simplex_labels(s))
            .expect("equal complexes share labelled simplices")
    };
    SubdivisionMap::new(m1.parent.clone(), m2.child.clone(), |s| m1.carrier(mid(m2.carrier(s))))
}

/// All child simplices whose carrier lies in `l`.
pub fn corresponding_subcomplex(m: &SubdivisionMap, l: &SubcomplexMask) -> SubcomplexMask {
    let mut out = SubcomplexMask::empty(&m.child);
    for s in m.child.simplices() {
        if l.contains(m.carrier(s)) {
            out.insert_raw(s);
        }
    }
    out
}
