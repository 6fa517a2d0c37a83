//! PL geometric category of 2-complexes.
//!
//! `plgcat = 1` iff the complex is collapsible. An upper bound of 2 comes from
//! an explicit cover by two collapsible subcomplexes, found by a ladder of
//! searches:
//!
//! 1. the complex itself (taken twice) when it is collapsible;
//! 2. two disjoint removal sets `W1`, `W2` such that `K ∖ Wi` collapses;
//! 3. a cover of a seven-part subdivision built from a Hachimori witness;
//! 4. exhaustive search over all pairs of subcomplexes (small complexes only).
//!
//! The exhaustive rung rests on a reduction: a subcomplex with triangle set
//! `S` can be completed to a collapsible one iff every component of the
//! closure of `S` is collapsible, and the completion is the closure plus a
//! spanning forest joining the components. A pair of triangle sets then
//! extends to a cover iff the edges lying in no triangle split into two sets,
//! each a forest once the corresponding closure components are contracted.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::collapse::{is_collapsible, is_collapsible_sub, CollapseCertificate, CollapseCertificateDoc, CollapseError};
use crate::complex::{Complex2, ComplexError, EdgeId, Simplex, TriangleId};
use crate::enrichment::{torus_obstruction, ComplexPlus, EnrichmentError};
use crate::graph::UnionFind;
use crate::homology::{betti, betti_of, Betti};
use crate::mask::SubcomplexMask;
use crate::shelling::{for_each_removal_set, hachimori_criterion, Enumeration, HachimoriVerdict};
use crate::subdivision::{identity, seven_part_many, SubdivisionError, SubdivisionMap, SubdivisionMapDoc};

/// Default number of candidate pairs a search may test.
pub const DEFAULT_BUDGET: u64 = 1_000_000;

/// Largest triangle count for which the exhaustive rung runs.
pub const EXHAUSTIVE_MAX_TRIANGLES: usize = 22;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum PlgcatError {
    #[error("complex is not connected")]
    NotConnected,
    #[error("not an enriched complex: {0}")]
    NotEnriched(String),
    #[error(transparent)]
    Enrichment(#[from] EnrichmentError),
    #[error(transparent)]
    Collapse(#[from] CollapseError),
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum CoverError {
    #[error("pieces are not subcomplexes or do not cover the complex")]
    NotACover,
    #[error("collapse certificate {0} does not start at its piece")]
    StartMismatch(usize),
    #[error("piece {0} does not collapse to a point")]
    NotAPoint(usize),
    #[error("subdivision child is not the covered complex")]
    SubdivisionMismatch,
    #[error(transparent)]
    Collapse(#[from] CollapseError),
    #[error(transparent)]
    Subdivision(#[from] SubdivisionError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

/// Two collapsible subcomplexes covering `complex`, which may be a
/// subdivision of the complex originally asked about.
#[derive(Clone, Debug)]
pub struct CoverCertificate {
    pub complex: Complex2,
    pub subdivision: Option<SubdivisionMap>,
    pub pieces: [SubcomplexMask; 2],
    pub collapses: [CollapseCertificate; 2],
}

impl CoverCertificate {
    /// Collapses both pieces greedily and checks the result.
    pub fn build(
        complex: Complex2,
        subdivision: Option<SubdivisionMap>,
        pieces: [SubcomplexMask; 2],
    ) -> Result<Self, CoverError> {
        let mut certs = Vec::with_capacity(2);
        for (i, p) in pieces.iter().enumerate() {
            let v = is_collapsible_sub(&complex, p).map_err(|e| match e {
                CollapseError::InvalidMask => CoverError::NotACover,
                other => other.into(),
            })?;
            if !v.success {
                return Err(CoverError::NotAPoint(i));
            }
            certs.push(v.certificate);
        }
        let [c0, c1]: [CollapseCertificate; 2] = certs.try_into().expect("two pieces");
        let cert = CoverCertificate {
            complex,
            subdivision,
            pieces,
            collapses: [c0, c1],
        };
        cert.verify()?;
        Ok(cert)
    }

    /// Replays both collapses and checks coverage.
    pub fn verify(&self) -> Result<(), CoverError> {
        let k = &self.complex;
        if let Some(m) = &self.subdivision {
            if m.child() != k {
                return Err(CoverError::SubdivisionMismatch);
            }
        }
        if !self.pieces.iter().all(|p| p.is_valid(k))
            || self.pieces[0].union(&self.pieces[1]) != SubcomplexMask::full(k)
        {
            return Err(CoverError::NotACover);
        }
        for (i, c) in self.collapses.iter().enumerate() {
            if c.start != self.pieces[i] {
                return Err(CoverError::StartMismatch(i));
            }
            c.replay(k)?;
            if !c.reaches_point() {
                return Err(CoverError::NotAPoint(i));
            }
        }
        Ok(())
    }

    pub fn to_doc(&self) -> CoverCertificateDoc {
        let k = &self.complex;
        CoverCertificateDoc {
            complex: k.canonical_faces(),
            subdivision: self.subdivision.as_ref().map(SubdivisionMap::to_doc),
            pieces: [self.pieces[0].canonical_faces(k), self.pieces[1].canonical_faces(k)],
            collapses: [self.collapses[0].to_doc(k), self.collapses[1].to_doc(k)],
        }
    }
}

/// Label-level form of a [`CoverCertificate`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverCertificateDoc {
    pub complex: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subdivision: Option<SubdivisionMapDoc>,
    pub pieces: [Vec<Vec<String>>; 2],
    pub collapses: [CollapseCertificateDoc; 2],
}

impl CoverCertificateDoc {
    /// Checks the certificate by replay alone: the pieces cover the complex
    /// and each collapse certificate starts at its piece and ends at a point.
    pub fn verify(&self) -> Result<(), CoverError> {
        let k = Complex2::from_maximal_faces(&self.complex)?;
        if let Some(doc) = &self.subdivision {
            let m = doc.to_map()?;
            if *m.child() != k {
                return Err(CoverError::SubdivisionMismatch);
            }
        }
        let pieces = [
            SubcomplexMask::from_label_faces(&k, &self.pieces[0])?,
            SubcomplexMask::from_label_faces(&k, &self.pieces[1])?,
        ];
        if pieces[0].union(&pieces[1]) != SubcomplexMask::full(&k) {
            return Err(CoverError::NotACover);
        }
        for (i, doc) in self.collapses.iter().enumerate() {
            let (start, cert) = doc.verify()?;
            if start.canonical_faces() != pieces[i].canonical_faces(&k) {
                return Err(CoverError::StartMismatch(i));
            }
            if !cert.reaches_point() {
                return Err(CoverError::NotAPoint(i));
            }
        }
        Ok(())
    }
}

/// Which rung of the ladder produced a cover.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoverMethod {
    Collapsible,
    RemovalPair,
    Shelling,
    Exhaustive,
    AnnulusSplit,
}

#[derive(Clone, Debug)]
pub enum CoverOutcome {
    Found(Box<CoverCertificate>),
    /// Every pair of subcomplexes of this triangulation was ruled out. This
    /// is not a lower bound on plgcat, since covers may need a subdivision.
    NotOnThisTriangulation,
    Unknown,
}

/// Result of a cover search with its bookkeeping.
#[derive(Clone, Debug)]
pub struct CoverSearch {
    pub outcome: CoverOutcome,
    pub method: Option<CoverMethod>,
    pub summary: SearchSummary,
}

/// Serialisable part of a [`CoverSearch`].
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchSummary {
    pub outcome: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<CoverMethod>,
    pub budget: u64,
    pub pairs_tested: u64,
    pub log: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub enriched: Option<EnrichedStats>,
}

impl CoverSearch {
    fn new(
        outcome: CoverOutcome,
        method: Option<CoverMethod>,
        budget: u64,
        pairs_tested: u64,
        log: Vec<String>,
    ) -> Self {
        let name = match outcome {
            CoverOutcome::Found(_) => "found",
            CoverOutcome::NotOnThisTriangulation => "not_on_this_triangulation",
            CoverOutcome::Unknown => "unknown",
        };
        CoverSearch {
            outcome,
            method,
            summary: SearchSummary {
                outcome: name.into(),
                method,
                budget,
                pairs_tested,
                log,
                enriched: None,
            },
        }
    }

    pub fn certificate(&self) -> Option<&CoverCertificate> {
        match &self.outcome {
            CoverOutcome::Found(c) => Some(c),
            _ => None,
        }
    }
}

/// `plgcat(|K|) = 1`, decided by greedy collapse of `K` itself.
pub fn plgcat_is_one(k: &Complex2) -> Result<bool, PlgcatError> {
    if !k.is_connected() {
        return Err(PlgcatError::NotConnected);
    }
    Ok(is_collapsible(k)?.success)
}

/// Spanning tree of the 1-skeleton of `k` containing `forest`, grown by
/// breadth-first search from the smallest vertex label. `None` if `forest`
/// has a cycle.
fn spanning_tree_through(k: &Complex2, forest: &[EdgeId]) -> Option<Vec<EdgeId>> {
    let mut uf = UnionFind::new(k.num_vertices());
    for &e in forest {
        let [a, b] = k.edge(e);
        if !uf.union(a.0, b.0) {
            return None;
        }
    }
    let root = k.vertex_ids().min_by(|a, b| k.label(*a).cmp(k.label(*b)))?;
    let mut tree = forest.to_vec();
    let mut seen = vec![false; k.num_vertices()];
    let mut queue = std::collections::VecDeque::from([root]);
    seen[root.0] = true;
    while let Some(u) = queue.pop_front() {
        for &e in k.vertex_edges(u) {
            let w = k.other_endpoint(e, u);
            if uf.union(u.0, w.0) {
                tree.push(e);
            }
            if !seen[w.0] {
                seen[w.0] = true;
                queue.push_back(w);
            }
        }
    }
    Some(tree)
}

/// Cover of a seven-part subdivision of `k` from a Hachimori witness.
///
/// Each witness triangle is split into seven; the first piece drops the
/// middle triangles, the second is the middle triangles joined by a spanning
/// tree through two edges of each.
pub fn cover_via_shelling(k: &Complex2, budget: u64) -> Option<CoverCertificate> {
    if !k.is_connected() {
        return None;
    }
    let witness = match hachimori_criterion(k, budget) {
        HachimoriVerdict::Yes { witness } => witness,
        _ => return None,
    };
    let (map, middles) = if witness.is_empty() {
        (identity(k), Vec::new())
    } else {
        seven_part_many(k, &witness).ok()?
    };
    let l = map.child().clone();
    let piece1 = SubcomplexMask::full(&l).without_triangles(middles.iter().copied());

    let pairs: [[usize; 2]; 3] = [[0, 1], [0, 2], [1, 2]];
    let tree = pairs.iter().find_map(|pair| {
        let forest: Vec<EdgeId> = middles
            .iter()
            .flat_map(|&m| {
                let mut es = l.triangle_edges(m);
                es.sort_unstable();
                pair.map(|i| es[i])
            })
            .collect();
        spanning_tree_through(&l, &forest)
    })?;
    let mut piece2 = SubcomplexMask::closure_of_triangles(&l, middles.iter().copied());
    for e in tree {
        piece2.insert_closed(&l, Simplex::Edge(e));
    }
    for v in l.vertex_ids() {
        piece2.insert_closed(&l, Simplex::Vertex(v));
    }
    let subdivision = (!witness.is_empty()).then_some(map);
    CoverCertificate::build(l, subdivision, [piece1, piece2]).ok()
}

/// Triangle sets of a small complex as bitmasks, with the goodness table
/// used by the exhaustive rung.
struct TriangleSets<'a> {
    k: &'a Complex2,
    f: usize,
    tri_edges: Vec<[usize; 3]>,
    tri_verts: Vec<[usize; 3]>,
    edge_tris: Vec<u64>,
    loose_edges: Vec<EdgeId>,
    good: Vec<bool>,
    sup: Vec<bool>,
}

impl<'a> TriangleSets<'a> {
    fn new(k: &'a Complex2) -> Self {
        let f = k.num_triangles();
        assert!(
            f <= EXHAUSTIVE_MAX_TRIANGLES,
            "exhaustive search is limited to small complexes"
        );
        let mut edge_local = vec![usize::MAX; k.num_edges()];
        let mut vert_local = vec![usize::MAX; k.num_vertices()];
        let mut edge_tris = Vec::new();
        let mut n_verts = 0;
        let mut tri_edges = Vec::with_capacity(f);
        let mut tri_verts = Vec::with_capacity(f);
        for t in k.triangle_ids() {
            let es = k.triangle_edges(t).map(|e| {
                if edge_local[e.0] == usize::MAX {
                    edge_local[e.0] = edge_tris.len();
                    edge_tris.push(0u64);
                }
                edge_tris[edge_local[e.0]] |= 1 << t.0;
                edge_local[e.0]
            });
            let vs = k.triangle(t).map(|v| {
                if vert_local[v.0] == usize::MAX {
                    vert_local[v.0] = n_verts;
                    n_verts += 1;
                }
                vert_local[v.0]
            });
            tri_edges.push(es);
            tri_verts.push(vs);
        }
        let loose_edges = k.edge_ids().filter(|&e| k.edge_triangles(e).is_empty()).collect();
        let mut sets = TriangleSets {
            k,
            f,
            tri_edges,
            tri_verts,
            edge_tris,
            loose_edges,
            good: Vec::new(),
            sup: Vec::new(),
        };
        let good: Vec<bool> = (0..1u64 << f).into_par_iter().map(|s| sets.is_good(s)).collect();
        let mut sup = good.clone();
        for i in 0..f {
            let bit = 1usize << i;
            for s in 0..sup.len() {
                if s & bit == 0 && sup[s | bit] {
                    sup[s] = true;
                }
            }
        }
        sets.good = good;
        sets.sup = sup;
        sets
    }

    /// Every component of the closure of `s` is collapsible: all triangles
    /// go by free edges and what is left is a forest.
    fn is_good(&self, s: u64) -> bool {
        let mut alive = s;
        'outer: while alive != 0 {
            let mut rest = alive;
            while rest != 0 {
                let t = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                for &e in &self.tri_edges[t] {
                    if self.edge_tris[e] & alive == 1 << t {
                        alive &= !(1 << t);
                        continue 'outer;
                    }
                }
            }
            return false;
        }
        let (mut edges, mut verts) = (0u128, 0u128);
        let mut parent = [0u8; 128];
        let mut rest = s;
        while rest != 0 {
            let t = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            for &e in &self.tri_edges[t] {
                edges |= 1 << e;
            }
            for &v in &self.tri_verts[t] {
                if verts & (1 << v) == 0 {
                    verts |= 1 << v;
                    parent[v] = v as u8;
                }
            }
        }
        fn find(p: &mut [u8; 128], mut x: usize) -> usize {
            while p[x] as usize != x {
                p[x] = p[p[x] as usize];
                x = p[x] as usize;
            }
            x
        }
        let mut components = verts.count_ones() as i64;
        let mut rest = s;
        while rest != 0 {
            let t = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let [a, b, c] = self.tri_verts[t];
            for (x, y) in [(a, b), (b, c)] {
                let (rx, ry) = (find(&mut parent, x), find(&mut parent, y));
                if rx != ry {
                    parent[rx] = ry as u8;
                    components -= 1;
                }
            }
        }
        verts.count_ones() as i64 - edges.count_ones() as i64 + s.count_ones() as i64 == components
    }

    fn full(&self) -> u64 {
        (1u64 << self.f) - 1
    }

    fn closure(&self, s: u64) -> SubcomplexMask {
        SubcomplexMask::closure_of_triangles(self.k, (0..self.f).filter(|i| s >> i & 1 == 1).map(TriangleId))
    }

    fn closure_components(&self, s: u64) -> UnionFind {
        let mut uf = UnionFind::new(self.k.num_vertices());
        for t in (0..self.f).filter(|i| s >> i & 1 == 1) {
            let [a, b, c] = self.k.triangle(TriangleId(t));
            uf.union(a.0, b.0);
            uf.union(b.0, c.0);
        }
        uf
    }

    /// Splits the loose edges into forests of the two contracted graphs.
    fn split_loose_edges(&self, a: u64, b: u64) -> Option<[Vec<EdgeId>; 2]> {
        fn assign(
            k: &Complex2,
            loose: &[EdgeId],
            i: usize,
            ufs: &mut [UnionFind; 2],
            out: &mut [Vec<EdgeId>; 2],
        ) -> bool {
            let Some(&e) = loose.get(i) else {
                return true;
            };
            let [x, y] = k.edge(e);
            for side in 0..2 {
                if ufs[side].find(x.0) == ufs[side].find(y.0) {
                    continue;
                }
                let saved = ufs[side].clone();
                ufs[side].union(x.0, y.0);
                out[side].push(e);
                if assign(k, loose, i + 1, ufs, out) {
                    return true;
                }
                out[side].pop();
                ufs[side] = saved;
            }
            false
        }
        let mut ufs = [self.closure_components(a), self.closure_components(b)];
        let mut out = [Vec::new(), Vec::new()];
        assign(self.k, &self.loose_edges, 0, &mut ufs, &mut out).then_some(out)
    }

    /// Closure of `s` plus `forest`, completed by Kruskal in edge-id order.
    fn piece(&self, s: u64, forest: &[EdgeId]) -> SubcomplexMask {
        let k = self.k;
        let mut mask = self.closure(s);
        let mut uf = self.closure_components(s);
        for &e in forest {
            let [x, y] = k.edge(e);
            uf.union(x.0, y.0);
            mask.insert_closed(k, Simplex::Edge(e));
        }
        for e in k.edge_ids() {
            if mask.has_edge(e) {
                continue;
            }
            let [x, y] = k.edge(e);
            if uf.union(x.0, y.0) {
                mask.insert_closed(k, Simplex::Edge(e));
            }
        }
        for v in k.vertex_ids() {
            mask.insert_closed(k, Simplex::Vertex(v));
        }
        mask
    }

    /// Good supersets of `c`, each once.
    fn good_supersets(&self, c: u64, visit: &mut dyn FnMut(u64) -> bool) -> bool {
        fn go(sets: &TriangleSets, x: u64, next: usize, visit: &mut dyn FnMut(u64) -> bool) -> bool {
            if sets.good[x as usize] && visit(x) {
                return true;
            }
            for j in next..sets.f {
                let y = x | 1 << j;
                if y != x && sets.sup[y as usize] && go(sets, y, j + 1, visit) {
                    return true;
                }
            }
            false
        }
        self.sup[c as usize] && go(self, c, 0, visit)
    }
}

/// Enumerates covers of `k` by two collapsible subcomplexes, one per pair
/// of triangle sets (unordered). `visit` returns true to stop. `budget`
/// bounds the number of pairs tested.
pub fn for_each_exhaustive_pair<F>(k: &Complex2, budget: u64, mut visit: F) -> (Enumeration, u64)
where
    F: FnMut(&[SubcomplexMask; 2]) -> bool,
{
    let sets = TriangleSets::new(k);
    let full = sets.full();
    let mut tested = 0u64;
    let mut exhausted = false;
    for a in 0..=full {
        if !sets.good[a as usize] {
            continue;
        }
        let stopped = sets.good_supersets(full & !a, &mut |b| {
            if b < a {
                return false;
            }
            tested += 1;
            if tested > budget {
                exhausted = true;
                return true;
            }
            match sets.split_loose_edges(a, b) {
                Some([fa, fb]) => visit(&[sets.piece(a, &fa), sets.piece(b, &fb)]),
                None => false,
            }
        });
        if exhausted {
            return (Enumeration::BudgetExhausted, tested - 1);
        }
        if stopped {
            return (Enumeration::Stopped, tested);
        }
    }
    (Enumeration::Completed, tested)
}

/// Two disjoint removal sets whose complements both collapse.
fn removal_pair(k: &Complex2, budget: u64, tested: &mut u64) -> (Option<[Vec<TriangleId>; 2]>, bool) {
    let mut good: Vec<Vec<TriangleId>> = Vec::new();
    let mut found = None;
    let mut exhausted = false;
    for_each_removal_set(k, budget, |w| {
        *tested += 1;
        if *tested > budget {
            exhausted = true;
            return true;
        }
        let rest = SubcomplexMask::full(k).without_triangles(w.iter().copied());
        if !is_collapsible_sub(k, &rest).map(|v| v.success).unwrap_or(false) {
            return false;
        }
        if let Some(other) = good.iter().find(|g| g.iter().all(|t| !w.contains(t))) {
            found = Some([other.clone(), w.to_vec()]);
            return true;
        }
        good.push(w.to_vec());
        false
    });
    (found, exhausted)
}

/// Looks for a cover of `k` by two collapsible subcomplexes, on `k` itself
/// or on a seven-part subdivision of it.
pub fn search_cover_two(k: &Complex2, budget: u64) -> Result<CoverSearch, PlgcatError> {
    if !k.is_connected() {
        return Err(PlgcatError::NotConnected);
    }
    let mut log = Vec::new();
    let mut tested = 1u64;
    let full = SubcomplexMask::full(k);
    if let Ok(c) = CoverCertificate::build(k.clone(), None, [full.clone(), full.clone()]) {
        return Ok(CoverSearch::new(
            CoverOutcome::Found(Box::new(c)),
            Some(CoverMethod::Collapsible),
            budget,
            tested,
            log,
        ));
    }
    log.push("complex is not collapsible".into());

    let mut incomplete = false;
    let b = betti(k);
    if b.b1 == 0 && b.b2 > 0 {
        let (pair, exhausted) = removal_pair(k, budget, &mut tested);
        incomplete |= exhausted;
        if let Some([w1, w2]) = pair {
            let pieces = [full.without_triangles(w1), full.without_triangles(w2)];
            if let Ok(c) = CoverCertificate::build(k.clone(), None, pieces) {
                return Ok(CoverSearch::new(
                    CoverOutcome::Found(Box::new(c)),
                    Some(CoverMethod::RemovalPair),
                    budget,
                    tested,
                    log,
                ));
            }
        }
        log.push("no disjoint pair of removal sets".into());
    }

    if k.is_pure().unwrap_or(false) {
        if let Some(c) = cover_via_shelling(k, budget) {
            return Ok(CoverSearch::new(
                CoverOutcome::Found(Box::new(c)),
                Some(CoverMethod::Shelling),
                budget,
                tested,
                log,
            ));
        }
        log.push("no cover from a shellable subdivision".into());
    }

    if k.num_triangles() > EXHAUSTIVE_MAX_TRIANGLES {
        log.push(format!(
            "exhaustive search skipped: {} triangles exceeds {}",
            k.num_triangles(),
            EXHAUSTIVE_MAX_TRIANGLES
        ));
        return Ok(CoverSearch::new(CoverOutcome::Unknown, None, budget, tested, log));
    }
    let mut found = None;
    let remaining = budget.saturating_sub(tested);
    let (status, n) = for_each_exhaustive_pair(k, remaining, |pieces| {
        match CoverCertificate::build(k.clone(), None, pieces.clone()) {
            Ok(c) => {
                found = Some(c);
                true
            }
            Err(_) => false,
        }
    });
    tested += n;
    Ok(match (found, status) {
        (Some(c), _) => CoverSearch::new(
            CoverOutcome::Found(Box::new(c)),
            Some(CoverMethod::Exhaustive),
            budget,
            tested,
            log,
        ),
        (None, Enumeration::BudgetExhausted) => {
            log.push("budget exhausted".into());
            CoverSearch::new(CoverOutcome::Unknown, None, budget, tested, log)
        }
        (None, _) => {
            if incomplete {
                log.push("removal-set enumeration hit the budget".into());
            }
            log.push("no pair of subcomplexes of this triangulation works".into());
            CoverSearch::new(CoverOutcome::NotOnThisTriangulation, None, budget, tested, log)
        }
    })
}

/// Counters kept by the enriched search.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnrichedStats {
    pub candidates: u64,
    pub pruned_by_obstruction: u64,
    pub collapse_tests: u64,
    pub valid: u64,
}

/// Outcome of testing one candidate cover of `K⁺`.
#[derive(Clone, Debug)]
pub enum PairEvaluation {
    /// The longitude of this base triangle rules the pair out.
    PrunedByObstruction(TriangleId),
    NotCollapsible,
    Valid(Box<[CollapseCertificate; 2]>),
}

/// Tests the torus obstruction at every base triangle, and only then
/// collapsibility of both pieces.
pub fn evaluate_enriched_pair(
    kp: &ComplexPlus,
    q1: &SubcomplexMask,
    q2: &SubcomplexMask,
    stats: &mut EnrichedStats,
) -> Result<PairEvaluation, PlgcatError> {
    stats.candidates += 1;
    for h in &kp.tori {
        if !torus_obstruction(kp, q1, q2, h.tau)? {
            stats.pruned_by_obstruction += 1;
            return Ok(PairEvaluation::PrunedByObstruction(h.tau));
        }
    }
    let mut certs = Vec::with_capacity(2);
    for q in [q1, q2] {
        stats.collapse_tests += 1;
        let v = is_collapsible_sub(&kp.complex, q)?;
        if !v.success {
            return Ok(PairEvaluation::NotCollapsible);
        }
        certs.push(v.certificate);
    }
    stats.valid += 1;
    let [c0, c1]: [CollapseCertificate; 2] = certs.try_into().expect("two pieces");
    Ok(PairEvaluation::Valid(Box::new([c0, c1])))
}

/// Checks the structure `enrich` produces.
pub fn check_enriched(kp: &ComplexPlus) -> Result<(), PlgcatError> {
    let k = &kp.complex;
    let bad = |m: &str| Err(PlgcatError::NotEnriched(m.to_string()));
    if kp.tori.len() != kp.base.num_triangles() {
        return bad("one torus per base triangle is required");
    }
    if !kp.base_mask.is_valid(k) || kp.base_mask.to_complex(k) != kp.base {
        return bad("base handle does not match the base complex");
    }
    let mut union = kp.base_mask.clone();
    for h in &kp.tori {
        let rim = SubcomplexMask::closure_of_triangles(&kp.base, [h.tau]).without_triangles([h.tau]);
        if h.torus.intersection(&kp.base_mask) != h.longitude || kp.lift(&rim) != h.longitude {
            return bad("a torus does not meet the base exactly in its longitude");
        }
        if betti_of(k, &h.torus) != Betti::new(1, 2, 1) || h.annuli[0].union(&h.annuli[1]) != h.torus {
            return bad("a torus handle is not a split torus");
        }
        union = union.union(&h.torus);
    }
    if union != SubcomplexMask::full(k) {
        return bad("base and tori do not make up the complex");
    }
    Ok(())
}

/// Cover search on `K⁺`. Candidate pairs take annulus `i` of every torus
/// into piece `i`; on the base side they are `(K, K)` and pairs of
/// complements of disjoint removal sets. Every candidate passes the torus
/// obstruction before any collapse is attempted. Small complexes fall back to
/// the exhaustive rung, also pruned by the obstruction.
pub fn search_cover_two_enriched(kp: &ComplexPlus, budget: u64) -> Result<(CoverSearch, EnrichedStats), PlgcatError> {
    check_enriched(kp)?;
    if !kp.complex.is_connected() {
        return Err(PlgcatError::NotConnected);
    }
    let base = &kp.base;
    let mut stats = EnrichedStats::default();
    let mut log = Vec::new();
    let annuli = |i: usize| {
        kp.tori
            .iter()
            .fold(SubcomplexMask::empty(&kp.complex), |acc, h| acc.union(&h.annuli[i]))
    };
    let extras = [annuli(0), annuli(1)];
    let base_full = SubcomplexMask::full(base);

    let mut removal_sets: Vec<Vec<TriangleId>> = Vec::new();
    if betti(base).b1 == 0 {
        let status = for_each_removal_set(base, budget, |w| {
            removal_sets.push(w.to_vec());
            removal_sets.len() as u64 >= budget
        });
        if status != Enumeration::Completed {
            log.push("removal-set enumeration hit the budget".into());
        }
    }
    let mut base_pairs: Vec<[Vec<TriangleId>; 2]> = vec![[Vec::new(), Vec::new()]];
    for (i, w1) in removal_sets.iter().enumerate() {
        for w2 in &removal_sets[i + 1..] {
            if !w1.is_empty() && w1.iter().all(|t| !w2.contains(t)) {
                base_pairs.push([w1.clone(), w2.clone()]);
            }
        }
    }

    let finish = |outcome, method, stats: EnrichedStats, log: Vec<String>| {
        let mut s = CoverSearch::new(outcome, method, budget, stats.candidates, log);
        s.summary.enriched = Some(stats);
        Ok((s, stats))
    };

    for [w1, w2] in base_pairs {
        if stats.candidates >= budget {
            log.push("budget exhausted".into());
            return finish(CoverOutcome::Unknown, None, stats, log);
        }
        let q = [
            kp.lift(&base_full.without_triangles(w1)).union(&extras[0]),
            kp.lift(&base_full.without_triangles(w2)).union(&extras[1]),
        ];
        if let PairEvaluation::Valid(certs) = evaluate_enriched_pair(kp, &q[0], &q[1], &mut stats)? {
            let c = CoverCertificate {
                complex: kp.complex.clone(),
                subdivision: None,
                pieces: q,
                collapses: *certs,
            };
            c.verify().map_err(|e| PlgcatError::NotEnriched(e.to_string()))?;
            return finish(
                CoverOutcome::Found(Box::new(c)),
                Some(CoverMethod::AnnulusSplit),
                stats,
                log,
            );
        }
    }
    log.push("no annulus-split cover".into());

    if kp.complex.num_triangles() > EXHAUSTIVE_MAX_TRIANGLES {
        log.push(format!(
            "exhaustive search skipped: {} triangles exceeds {}",
            kp.complex.num_triangles(),
            EXHAUSTIVE_MAX_TRIANGLES
        ));
        return finish(CoverOutcome::Unknown, None, stats, log);
    }
    let mut found = None;
    let mut error = None;
    let remaining = budget.saturating_sub(stats.candidates);
    let (status, _) = for_each_exhaustive_pair(&kp.complex, remaining, |pieces| {
        match evaluate_enriched_pair(kp, &pieces[0], &pieces[1], &mut stats) {
            Ok(PairEvaluation::Valid(certs)) => {
                found = Some(CoverCertificate {
                    complex: kp.complex.clone(),
                    subdivision: None,
                    pieces: pieces.clone(),
                    collapses: *certs,
                });
                true
            }
            Ok(_) => false,
            Err(e) => {
                error = Some(e);
                true
            }
        }
    });
    if let Some(e) = error {
        return Err(e);
    }
    match (found, status) {
        (Some(c), _) => finish(
            CoverOutcome::Found(Box::new(c)),
            Some(CoverMethod::Exhaustive),
            stats,
            log,
        ),
        (None, Enumeration::BudgetExhausted) => {
            log.push("budget exhausted".into());
            finish(CoverOutcome::Unknown, None, stats, log)
        }
        (None, _) => finish(CoverOutcome::NotOnThisTriangulation, None, stats, log),
    }
}

/// Bounds on plgcat of a connected 2-complex. Covers by three collapsible
/// pieces always exist, so the upper bound never exceeds 3.
#[derive(Clone, Debug)]
pub enum PlgcatVerdict {
    Exactly1 {
        certificate: CollapseCertificate,
    },
    /// Not collapsible, and a cover by two collapsible pieces was found.
    AtMost2 {
        certificate: Box<CoverCertificate>,
        search: SearchSummary,
    },
    /// Not collapsible; no cover by two was found.
    AtLeast2 {
        reason: String,
        search: SearchSummary,
    },
}

impl PlgcatVerdict {
    /// `(lower, upper)` bounds.
    pub fn interval(&self) -> (u8, u8) {
        match self {
            PlgcatVerdict::Exactly1 { .. } => (1, 1),
            PlgcatVerdict::AtMost2 { .. } => (2, 2),
            PlgcatVerdict::AtLeast2 { .. } => (2, 3),
        }
    }

    pub fn to_doc(&self, k: &Complex2) -> PlgcatVerdictDoc {
        let (lower, upper) = self.interval();
        let mut doc = PlgcatVerdictDoc {
            verdict: String::new(),
            interval: [lower, upper],
            complex_hash: k.content_hash(),
            evidence: Vec::new(),
            collapse_certificate: None,
            cover_certificate: None,
            search: None,
        };
        match self {
            PlgcatVerdict::Exactly1 { certificate } => {
                doc.verdict = "exactly_1".into();
                doc.evidence.push("complex is collapsible".into());
                doc.collapse_certificate = Some(certificate.to_doc(k));
            }
            PlgcatVerdict::AtMost2 { certificate, search } => {
                doc.verdict = "at_most_2".into();
                doc.evidence.push("complex is not collapsible".into());
                doc.evidence.push("cover by two collapsible subcomplexes found".into());
                doc.cover_certificate = Some(certificate.to_doc());
                doc.search = Some(search.clone());
            }
            PlgcatVerdict::AtLeast2 { reason, search } => {
                doc.verdict = "at_least_2".into();
                doc.evidence.push(reason.clone());
                doc.search = Some(search.clone());
            }
        }
        doc
    }
}

/// JSON form of a [`PlgcatVerdict`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlgcatVerdictDoc {
    pub verdict: String,
    pub interval: [u8; 2],
    pub complex_hash: String,
    pub evidence: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub collapse_certificate: Option<CollapseCertificateDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cover_certificate: Option<CoverCertificateDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub search: Option<SearchSummary>,
}

fn not_collapsible_reason(k: &Complex2) -> String {
    let b = betti(k);
    if b.is_acyclic() {
        "not collapsible (acyclic, so no homological obstruction)".into()
    } else {
        format!("not collapsible (Betti numbers {} {} {})", b.b0, b.b1, b.b2)
    }
}

pub fn plgcat_bounds(k: &Complex2, budget: u64) -> Result<PlgcatVerdict, PlgcatError> {
    if !k.is_connected() {
        return Err(PlgcatError::NotConnected);
    }
    let v = is_collapsible(k)?;
    if v.success {
        return Ok(PlgcatVerdict::Exactly1 {
            certificate: v.certificate,
        });
    }
    let search = search_cover_two(k, budget)?;
    Ok(match search.outcome {
        CoverOutcome::Found(c) => PlgcatVerdict::AtMost2 {
            certificate: c,
            search: search.summary,
        },
        _ => PlgcatVerdict::AtLeast2 {
            reason: not_collapsible_reason(k),
            search: search.summary,
        },
    })
}

/// As [`plgcat_bounds`], using the enriched search.
pub fn plgcat_bounds_enriched(kp: &ComplexPlus, budget: u64) -> Result<PlgcatVerdict, PlgcatError> {
    let k = &kp.complex;
    if !k.is_connected() {
        return Err(PlgcatError::NotConnected);
    }
    let v = is_collapsible(k)?;
    if v.success {
        return Ok(PlgcatVerdict::Exactly1 {
            certificate: v.certificate,
        });
    }
    let (search, _) = search_cover_two_enriched(kp, budget)?;
    Ok(match search.outcome {
        CoverOutcome::Found(c) => PlgcatVerdict::AtMost2 {
            certificate: c,
            search: search.summary,
        },
        _ => PlgcatVerdict::AtLeast2 {
            reason: not_collapsible_reason(k),
            search: search.summary,
        },
    })
}
