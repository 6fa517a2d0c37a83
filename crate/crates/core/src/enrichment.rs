//! The enriched complex `K⁺`: a torus glued along its longitude to the
//! boundary of every triangle of `K`.
//!
//! Each torus is the 3×3 grid torus on `v(i,j)`, indices mod 3, with
//! triangles `v(i,j) v(i,j+1) v(i+1,j+1)` and `v(i,j) v(i+1,j) v(i+1,j+1)`.
//! Row 0 is the longitude. The band between rows 0 and 1 is the first
//! annulus, the band from row 1 through row 2 back to row 0 the second.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::collapse::{is_collapsible_sub, CollapseCertificate, CollapseError};
use crate::complex::{Complex2, ComplexError, Simplex, TriangleId};
use crate::homology::{is_nullhomologous_in, Chain, HomologyError};
use crate::io::ComplexDoc;
use crate::mask::SubcomplexMask;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum EnrichmentError {
    #[error("label {0:?} is used twice")]
    LabelCollision(String),
    #[error("precondition violated: {0}")]
    PreconditionViolation(Clause),
    #[error("the two pieces do not cover the enriched complex")]
    NotACover,
    #[error("triangle id {0} is not a triangle of the base complex")]
    InvalidTriangle(usize),
    #[error("enriched piece {0} failed to collapse")]
    PieceNotCollapsible(usize),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Homology(#[from] HomologyError),
    #[error(transparent)]
    Collapse(#[from] CollapseError),
}

/// The clause of the `cover_from_pair` precondition that failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Clause {
    /// The pieces are not subcomplexes or their union is not the base.
    Cover,
    /// Piece `0` or `1` is not collapsible.
    Collapsible(usize),
    /// Piece `0` or `1` misses a vertex or edge of the base.
    OneSkeleton(usize),
}

impl std::fmt::Display for Clause {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Clause::Cover => write!(f, "cover"),
            Clause::Collapsible(i) => write!(f, "collapsible (piece {})", i + 1),
            Clause::OneSkeleton(i) => write!(f, "1-skeleton (piece {})", i + 1),
        }
    }
}

/// A triangulated torus with its longitude and annulus split.
#[derive(Clone, Debug)]
pub struct TorusBlock {
    pub complex: Complex2,
    pub longitude: SubcomplexMask,
    pub annuli: [SubcomplexMask; 2],
}

fn grid_faces(grid: &[[String; 3]; 3]) -> Vec<(usize, [String; 3])> {
    let mut faces = Vec::with_capacity(18);
    for i in 0..3 {
        for j in 0..3 {
            let (i1, j1) = ((i + 1) % 3, (j + 1) % 3);
            faces.push((i, [grid[i][j].clone(), grid[i][j1].clone(), grid[i1][j1].clone()]));
            faces.push((i, [grid[i][j].clone(), grid[i1][j].clone(), grid[i1][j1].clone()]));
        }
    }
    faces
}

/// Grid torus whose row 0 is `longitude` (so the longitude edges are
/// `l0 l1`, `l1 l2`, `l2 l0`) and whose rows 1 and 2 are `interior`.
pub fn torus_block(longitude: [&str; 3], interior: [&str; 6]) -> Result<TorusBlock, EnrichmentError> {
    let mut seen = HashSet::new();
    for l in longitude.iter().chain(interior.iter()) {
        if !seen.insert(*l) {
            return Err(EnrichmentError::LabelCollision(l.to_string()));
        }
    }
    let grid = [
        longitude.map(String::from),
        [interior[0], interior[1], interior[2]].map(String::from),
        [interior[3], interior[4], interior[5]].map(String::from),
    ];
    let faces = grid_faces(&grid);
    let complex = Complex2::from_maximal_faces(faces.iter().map(|(_, f)| f.clone()))?;
    let lon = SubcomplexMask::from_label_faces(
        &complex,
        &[
            [&grid[0][0], &grid[0][1]],
            [&grid[0][1], &grid[0][2]],
            [&grid[0][2], &grid[0][0]],
        ],
    )?;
    let band = |rows: &[usize]| {
        let fs: Vec<[String; 3]> = faces
            .iter()
            .filter(|(i, _)| rows.contains(i))
            .map(|(_, f)| f.clone())
            .collect();
        SubcomplexMask::from_label_faces(&complex, &fs)
    };
    let annuli = [band(&[0])?, band(&[1, 2])?];
    Ok(TorusBlock {
        complex,
        longitude: lon,
        annuli,
    })
}

/// Masks in `K⁺` attached to one base triangle.
#[derive(Clone, Debug)]
pub struct TorusHandles {
    /// The base triangle, as an id of the base complex.
    pub tau: TriangleId,
    pub torus: SubcomplexMask,
    pub longitude: SubcomplexMask,
    pub annuli: [SubcomplexMask; 2],
}

/// An enriched complex with handles on its base copy and every torus.
#[derive(Clone, Debug)]
pub struct ComplexPlus {
    pub complex: Complex2,
    pub base: Complex2,
    pub base_mask: SubcomplexMask,
    pub tori: Vec<TorusHandles>,
}

/// Label of an interior torus vertex: row `i` in {1, 2}, column `j`.
pub fn torus_vertex_label(tau: TriangleId, i: usize, j: usize) -> String {
    format!("τ{}_r{i}c{j}", tau.0)
}

/// Glues a torus to every triangle of `k`.
pub fn enrich(k: &Complex2) -> ComplexPlus {
    let taken: HashSet<&str> = k.labels().iter().map(String::as_str).collect();
    let fresh = |tau: TriangleId, i: usize, j: usize| {
        let mut l = torus_vertex_label(tau, i, j);
        while taken.contains(l.as_str()) {
            l.push('\'');
        }
        l
    };

    let mut faces: Vec<Vec<String>> = k.vertex_ids().map(|v| vec![k.label(v).to_string()]).collect();
    faces.extend(k.maximal_faces().into_iter().map(|s| k.simplex_labels(s)));
    let mut grids = Vec::with_capacity(k.num_triangles());
    for tau in k.triangle_ids() {
        let [a, b, c] = k.triangle(tau).map(|v| k.label(v).to_string());
        let grid = [
            [a, b, c],
            [fresh(tau, 1, 0), fresh(tau, 1, 1), fresh(tau, 1, 2)],
            [fresh(tau, 2, 0), fresh(tau, 2, 1), fresh(tau, 2, 2)],
        ];
        faces.extend(grid_faces(&grid).into_iter().map(|(_, f)| f.to_vec()));
        grids.push(grid);
    }
    let complex = Complex2::from_maximal_faces(&faces).expect("fresh labels keep faces well formed");
    let base_mask = SubcomplexMask::full(k)
        .transfer(k, &complex)
        .expect("base simplices are in K⁺");

    let tori = k
        .triangle_ids()
        .zip(grids)
        .map(|(tau, grid)| {
            let block_faces = grid_faces(&grid);
            let rows = |rows: &[usize]| {
                let fs: Vec<&[String; 3]> = block_faces
                    .iter()
                    .filter(|(i, _)| rows.contains(i))
                    .map(|(_, f)| f)
                    .collect();
                SubcomplexMask::from_label_faces(&complex, &fs).expect("block faces are in K⁺")
            };
            let g = &grid[0];
            TorusHandles {
                tau,
                torus: rows(&[0, 1, 2]),
                longitude: SubcomplexMask::from_label_faces(
                    &complex,
                    &[[&g[0], &g[1]], [&g[1], &g[2]], [&g[2], &g[0]]],
                )
                .expect("longitude edges are in K⁺"),
                annuli: [rows(&[0]), rows(&[1, 2])],
            }
        })
        .collect();

    ComplexPlus {
        complex,
        base: k.clone(),
        base_mask,
        tori,
    }
}

impl ComplexPlus {
    pub fn torus(&self, tau: TriangleId) -> Result<&TorusHandles, EnrichmentError> {
        self.tori.get(tau.0).ok_or(EnrichmentError::InvalidTriangle(tau.0))
    }

    /// A base mask as a mask of `K⁺`.
    pub fn lift(&self, m: &SubcomplexMask) -> SubcomplexMask {
        m.transfer(&self.base, &self.complex).expect("base simplices are in K⁺")
    }

    /// The part of a `K⁺` mask lying in the base, as a base mask.
    pub fn restrict_to_base(&self, m: &SubcomplexMask) -> SubcomplexMask {
        m.intersection(&self.base_mask)
            .transfer(&self.complex, &self.base)
            .expect("base part lies in the base")
    }

    /// Name fragment `<a,b,c>` for a base triangle.
    pub fn triangle_tag(&self, tau: TriangleId) -> String {
        self.base.simplex_labels(Simplex::Triangle(tau)).join(",")
    }

    /// JSON form with `base`, `torus:…`, `longitude:…`, `annulus1:…` and
    /// `annulus2:…` named subcomplexes.
    pub fn to_doc(&self) -> ComplexDoc {
        let mut doc = ComplexDoc::from_complex(&self.complex).with_named("base", &self.complex, &self.base_mask);
        for h in &self.tori {
            let tag = self.triangle_tag(h.tau);
            doc = doc
                .with_named(format!("torus:{tag}"), &self.complex, &h.torus)
                .with_named(format!("longitude:{tag}"), &self.complex, &h.longitude)
                .with_named(format!("annulus1:{tag}"), &self.complex, &h.annuli[0])
                .with_named(format!("annulus2:{tag}"), &self.complex, &h.annuli[1]);
        }
        doc
    }

    /// Reads back the output of [`ComplexPlus::to_doc`].
    pub fn from_doc(doc: &ComplexDoc) -> Option<Self> {
        let loaded = doc.build().ok()?;
        let base_mask = loaded.named.get("base")?.clone();
        let base = base_mask.to_complex(&loaded.complex);
        let mut tori = Vec::new();
        for tau in base.triangle_ids() {
            let tag = base.simplex_labels(Simplex::Triangle(tau)).join(",");
            let get = |kind: &str| loaded.named.get(&format!("{kind}:{tag}")).cloned();
            tori.push(TorusHandles {
                tau,
                torus: get("torus")?,
                longitude: get("longitude")?,
                annuli: [get("annulus1")?, get("annulus2")?],
            });
        }
        let base_mask = SubcomplexMask::full(&base).transfer(&base, &loaded.complex).ok()?;
        Some(ComplexPlus {
            complex: loaded.complex,
            base,
            base_mask,
            tori,
        })
    }
}

/// Two collapsible pieces covering `K⁺`, with collapse certificates.
#[derive(Clone, Debug)]
pub struct EnrichedCover {
    pub pieces: [SubcomplexMask; 2],
    pub certificates: [CollapseCertificate; 2],
}

/// Extends a cover of the base by two collapsible subcomplexes, each holding
/// the whole 1-skeleton, to a cover of `K⁺`: piece `i` gains annulus `i` of
/// every torus.
pub fn cover_from_pair(
    kp: &ComplexPlus,
    k1: &SubcomplexMask,
    k2: &SubcomplexMask,
) -> Result<EnrichedCover, EnrichmentError> {
    let base = &kp.base;
    let full = SubcomplexMask::full(base);
    if !k1.is_valid(base) || !k2.is_valid(base) || k1.union(k2) != full {
        return Err(EnrichmentError::PreconditionViolation(Clause::Cover));
    }
    let skel = SubcomplexMask::one_skeleton(base);
    for (i, m) in [k1, k2].into_iter().enumerate() {
        if !skel.is_subset(m) {
            return Err(EnrichmentError::PreconditionViolation(Clause::OneSkeleton(i)));
        }
    }
    for (i, m) in [k1, k2].into_iter().enumerate() {
        if !is_collapsible_sub(base, m).map(|v| v.success).unwrap_or(false) {
            return Err(EnrichmentError::PreconditionViolation(Clause::Collapsible(i)));
        }
    }
    let pieces = [k1, k2].map(|m| kp.lift(m));
    let pieces: [SubcomplexMask; 2] =
        [0, 1].map(|i| kp.tori.iter().fold(pieces[i].clone(), |acc, h| acc.union(&h.annuli[i])));
    let mut certs = Vec::with_capacity(2);
    for (i, p) in pieces.iter().enumerate() {
        let v = is_collapsible_sub(&kp.complex, p)?;
        if !v.success {
            return Err(EnrichmentError::PieceNotCollapsible(i));
        }
        certs.push(v.certificate);
    }
    let [c1, c2]: [CollapseCertificate; 2] = certs.try_into().expect("two certificates");
    Ok(EnrichedCover {
        pieces,
        certificates: [c1, c2],
    })
}

/// Necessary condition for `(q1, q2)` to be a cover of `K⁺` by two
/// contractible subcomplexes, checked at the torus of `tau`: the longitude
/// lies in both pieces and bounds in each piece outside the open torus.
pub fn torus_obstruction(
    kp: &ComplexPlus,
    q1: &SubcomplexMask,
    q2: &SubcomplexMask,
    tau: TriangleId,
) -> Result<bool, EnrichmentError> {
    let k = &kp.complex;
    if !q1.is_valid(k) || !q2.is_valid(k) || q1.union(q2) != SubcomplexMask::full(k) {
        return Err(EnrichmentError::NotACover);
    }
    let h = kp.torus(tau)?;
    if !h.longitude.is_subset(&q1.intersection(q2)) {
        return Ok(false);
    }
    let r = SubcomplexMask::full(k).difference(&h.torus).union(&h.longitude);
    let z = Chain::of_mask(k, 1, &h.longitude);
    for q in [q1, q2] {
        if is_nullhomologous_in(k, &r.intersection(q), &z)?.is_none() {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::collapse::{collapses_to_from, is_collapsible};
    use crate::homology::{betti, betti_of, is_nullhomologous, Betti};
    use crate::standard;

    fn block() -> TorusBlock {
        torus_block(["a", "b", "c"], ["x0", "x1", "x2", "y0", "y1", "y2"]).unwrap()
    }

    #[test]
    fn torus_block_shape() {
        let t = block();
        let k = &t.complex;
        assert_eq!((k.num_vertices(), k.num_edges(), k.num_triangles()), (9, 27, 18));
        assert_eq!(k.reduced_euler().unwrap(), -1);
        assert_eq!(betti(k), Betti::new(1, 2, 1));
        assert_eq!(t.annuli[0].num_triangles(), 6);
        assert_eq!(t.annuli[1].num_triangles(), 12);
        assert_eq!(t.annuli[0].union(&t.annuli[1]), SubcomplexMask::full(k));
        for a in &t.annuli {
            assert!(collapses_to_from(k, a, &t.longitude).unwrap().success);
            assert!(t.longitude.is_subset(a));
        }
        let z = Chain::of_mask(k, 1, &t.longitude);
        assert_eq!(is_nullhomologous(k, &z).unwrap(), None);
        assert_eq!(
            torus_block(["a", "b", "a"], ["1", "2", "3", "4", "5", "6"]).unwrap_err(),
            EnrichmentError::LabelCollision("a".into())
        );
    }

    #[test]
    fn enrich_counts() {
        let kp = enrich(&standard::triangle());
        assert_eq!((kp.complex.num_vertices(), kp.complex.num_triangles()), (9, 19));
        let kp = enrich(&standard::tetrahedron_boundary());
        assert_eq!((kp.complex.num_vertices(), kp.complex.num_triangles()), (28, 76));
        assert_eq!(kp.complex.num_edges(), 6 + 24 * 4);
        let graph = Complex2::from_maximal_faces([["a", "b"], ["b", "c"]]).unwrap();
        assert_eq!(enrich(&graph).complex, graph);
    }

    #[test]
    fn tori_meet_the_base_in_their_longitudes() {
        let kp = enrich(&standard::tetrahedron_boundary());
        for h in &kp.tori {
            assert_eq!(h.torus.intersection(&kp.base_mask), h.longitude);
            let rim = SubcomplexMask::closure_of_triangles(&kp.base, [h.tau]).without_triangles([h.tau]);
            assert_eq!(kp.lift(&rim), h.longitude);
            assert_eq!(betti_of(&kp.complex, &h.torus), Betti::new(1, 2, 1));
        }
        for (i, a) in kp.tori.iter().enumerate() {
            for b in &kp.tori[i + 1..] {
                assert!(a.torus.intersection(&b.torus).is_subset(&kp.base_mask));
            }
        }
    }

    #[test]
    fn cover_of_an_enriched_triangle() {
        let k = standard::triangle();
        let kp = enrich(&k);
        let full = SubcomplexMask::full(&k);
        let cover = cover_from_pair(&kp, &full, &full).unwrap();
        assert_eq!(
            cover.pieces[0].union(&cover.pieces[1]),
            SubcomplexMask::full(&kp.complex)
        );
        for p in &cover.pieces {
            assert!(is_collapsible_sub(&kp.complex, p).unwrap().success);
        }
        assert!(torus_obstruction(&kp, &cover.pieces[0], &cover.pieces[1], TriangleId(0)).unwrap());
    }

    #[test]
    fn cover_of_an_enriched_sphere() {
        let k = standard::tetrahedron_boundary();
        let kp = enrich(&k);
        let full = SubcomplexMask::full(&k);
        let cover = cover_from_pair(
            &kp,
            &full.without_triangles([TriangleId(0)]),
            &full.without_triangles([TriangleId(1)]),
        )
        .unwrap();
        for c in &cover.certificates {
            assert!(c.reaches_point());
            c.replay(&kp.complex).unwrap();
        }
        for h in &kp.tori {
            assert!(torus_obstruction(&kp, &cover.pieces[0], &cover.pieces[1], h.tau).unwrap());
        }
    }

    #[test]
    fn cover_preconditions() {
        let k = standard::triangle();
        let kp = enrich(&k);
        let full = SubcomplexMask::full(&k);
        let mut missing = full.clone();
        missing.remove_raw(Simplex::Triangle(TriangleId(0)));
        missing.remove_raw(Simplex::Edge(crate::complex::EdgeId(0)));
        assert_eq!(
            cover_from_pair(&kp, &missing, &full).unwrap_err(),
            EnrichmentError::PreconditionViolation(Clause::OneSkeleton(0))
        );
        let skel = SubcomplexMask::one_skeleton(&k);
        assert_eq!(
            cover_from_pair(&kp, &full, &skel).unwrap_err(),
            EnrichmentError::PreconditionViolation(Clause::Collapsible(1))
        );
        assert_eq!(
            cover_from_pair(&kp, &skel, &skel).unwrap_err(),
            EnrichmentError::PreconditionViolation(Clause::Cover)
        );
        let s = standard::tetrahedron_boundary();
        let sp = enrich(&s);
        assert!(is_collapsible(&s).map(|v| !v.success).unwrap());
        let sfull = SubcomplexMask::full(&s);
        assert_eq!(
            cover_from_pair(&sp, &sfull, &sfull).unwrap_err(),
            EnrichmentError::PreconditionViolation(Clause::Collapsible(0))
        );
    }

    #[test]
    fn obstruction_failures() {
        let k = standard::triangle();
        let kp = enrich(&k);
        let full = SubcomplexMask::full(&kp.complex);
        let h = &kp.tori[0];
        // q1 misses a longitude edge
        let e = h.longitude.edges().next().unwrap();
        let mut q1 = full.clone();
        q1.remove_raw(Simplex::Edge(e));
        for &t in kp.complex.edge_triangles(e) {
            q1.remove_raw(Simplex::Triangle(t));
        }
        assert!(q1.is_valid(&kp.complex));
        assert!(!torus_obstruction(&kp, &q1, &full, TriangleId(0)).unwrap());
        // q1 contains the longitude but nothing to fill it outside the torus
        let q1 = h.torus.clone();
        assert!(!torus_obstruction(&kp, &q1, &full, TriangleId(0)).unwrap());
        assert_eq!(
            torus_obstruction(&kp, &h.torus, &h.torus, TriangleId(0)).unwrap_err(),
            EnrichmentError::NotACover
        );
    }

    #[test]
    fn doc_round_trip() {
        let kp = enrich(&standard::edge_pair());
        let doc = kp.to_doc();
        let json = serde_json::to_string(&doc).unwrap();
        let back = ComplexPlus::from_doc(&serde_json::from_str(&json).unwrap()).unwrap();
        assert_eq!(back.complex, kp.complex);
        assert_eq!(back.base, kp.base);
        assert_eq!(back.tori.len(), 2);
        for (a, b) in back.tori.iter().zip(&kp.tori) {
            assert_eq!(
                a.annuli[1].canonical_faces(&back.complex),
                b.annuli[1].canonical_faces(&kp.complex)
            );
        }
    }
}
