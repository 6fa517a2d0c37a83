//! Elementary collapses, greedy collapsing and an exhaustive oracle.
//!
//! Only the two-face elementary collapse is implemented: a vertex of degree
//! one together with its edge (when that edge lies in no triangle), or an
//! edge lying in exactly one triangle together with that triangle.

use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::{Complex2, ComplexError, Simplex};
use crate::mask::SubcomplexMask;

/// Default guard for [`brute_force_collapsible`].
pub const BRUTE_FORCE_MAX_TRIANGLES: usize = 12;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum CollapseError {
    #[error("complex is not connected")]
    NotConnected,
    #[error("complex is empty")]
    EmptyComplex,
    #[error("mask is not a subcomplex of the given complex")]
    InvalidMask,
    #[error("exhaustive search refused: {triangles} triangles exceeds the limit of {limit}")]
    TooLarge { triangles: usize, limit: usize },
    #[error("start complex hash mismatch: certificate has {expected}, complex has {actual}")]
    HashMismatch { expected: String, actual: String },
    #[error("step {index} is not a legal elementary collapse: {reason}")]
    IllegalStep { index: usize, reason: String },
    #[error("replay ended at a different subcomplex than the recorded residual")]
    ResidualMismatch,
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

/// One elementary collapse: `free` is removed together with `coface`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CollapseStep {
    pub free: Simplex,
    pub coface: Simplex,
}

/// A replayable record of a collapse from `start` to `residual`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CollapseCertificate {
    /// Content hash of `start` viewed as a standalone complex.
    pub start_hash: String,
    pub start: SubcomplexMask,
    pub steps: Vec<CollapseStep>,
    pub residual: SubcomplexMask,
}

/// Outcome of a collapse query. The certificate always replays; on failure it
/// records where the greedy run got stuck.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CollapseVerdict {
    pub success: bool,
    pub certificate: CollapseCertificate,
}

/// Target of an exhaustive collapse search.
#[derive(Clone, Debug)]
pub enum CollapseTarget {
    /// Any single vertex.
    Point,
    /// Exactly this subcomplex.
    Subcomplex(SubcomplexMask),
}

/// Mutable view of a subcomplex with the incidence counts needed to detect
/// free faces in constant time.
#[derive(Clone, Debug)]
pub(crate) struct CollapseState<'a> {
    k: &'a Complex2,
    alive: SubcomplexMask,
    edge_cofaces: Vec<u32>,
    vertex_degree: Vec<u32>,
}

impl<'a> CollapseState<'a> {
    pub(crate) fn new(k: &'a Complex2, start: &SubcomplexMask) -> Self {
        let mut edge_cofaces = vec![0u32; k.num_edges()];
        let mut vertex_degree = vec![0u32; k.num_vertices()];
        for t in start.triangles() {
            for e in k.triangle_edges(t) {
                edge_cofaces[e.0] += 1;
            }
        }
        for e in start.edges() {
            for v in k.edge(e) {
                vertex_degree[v.0] += 1;
            }
        }
        CollapseState {
            k,
            alive: start.clone(),
            edge_cofaces,
            vertex_degree,
        }
    }

    /// The elementary collapse through `s`, if `s` is currently free.
    pub(crate) fn step_for(&self, s: Simplex) -> Option<CollapseStep> {
        if !self.alive.contains(s) {
            return None;
        }
        match s {
            Simplex::Vertex(v) => {
                if self.vertex_degree[v.0] != 1 {
                    return None;
                }
                let e = *self.k.vertex_edges(v).iter().find(|e| self.alive.has_edge(**e))?;
                (self.edge_cofaces[e.0] == 0).then_some(CollapseStep {
                    free: s,
                    coface: Simplex::Edge(e),
                })
            }
            Simplex::Edge(e) => {
                if self.edge_cofaces[e.0] != 1 {
                    return None;
                }
                let t = *self.k.edge_triangles(e).iter().find(|t| self.alive.has_triangle(**t))?;
                Some(CollapseStep {
                    free: s,
                    coface: Simplex::Triangle(t),
                })
            }
            Simplex::Triangle(_) => None,
        }
    }

    pub(crate) fn apply(&mut self, step: CollapseStep) {
        debug_assert_eq!(self.step_for(step.free), Some(step));
        for s in [step.free, step.coface] {
            self.alive.remove_raw(s);
            match s {
                Simplex::Edge(e) => {
                    for v in self.k.edge(e) {
                        self.vertex_degree[v.0] -= 1;
                    }
                }
                Simplex::Triangle(t) => {
                    for e in self.k.triangle_edges(t) {
                        self.edge_cofaces[e.0] -= 1;
                    }
                }
                Simplex::Vertex(_) => {}
            }
        }
    }

    /// Simplices whose freeness may change when `step` is applied.
    fn neighbourhood(&self, step: CollapseStep) -> Vec<Simplex> {
        let mut out: Vec<Simplex> = self
            .k
            .simplex_vertices(step.coface)
            .into_iter()
            .map(Simplex::Vertex)
            .collect();
        if let Simplex::Triangle(t) = step.coface {
            out.extend(self.k.triangle_edges(t).into_iter().map(Simplex::Edge));
        }
        out
    }

    pub(crate) fn legal_steps(&self, protected: &SubcomplexMask) -> Vec<CollapseStep> {
        self.alive
            .vertices()
            .map(Simplex::Vertex)
            .chain(self.alive.edges().map(Simplex::Edge))
            .filter(|s| !protected.contains(*s))
            .filter_map(|s| self.step_for(s))
            .collect()
    }
}

impl CollapseCertificate {
    /// Replays the steps on `k`, checking legality of every step, and returns
    /// the residual reached.
    pub fn replay(&self, k: &Complex2) -> Result<SubcomplexMask, CollapseError> {
        if !self.start.is_valid(k) || !self.residual.is_valid(k) {
            return Err(CollapseError::InvalidMask);
        }
        let actual = self.start.to_complex(k).content_hash();
        if actual != self.start_hash {
            return Err(CollapseError::HashMismatch {
                expected: self.start_hash.clone(),
                actual,
            });
        }
        let mut state = CollapseState::new(k, &self.start);
        for (index, step) in self.steps.iter().enumerate() {
            match state.step_for(step.free) {
                Some(s) if s == *step => state.apply(s),
                Some(s) => {
                    return Err(CollapseError::IllegalStep {
                        index,
                        reason: format!("free face has coface {:?}, not {:?}", s.coface, step.coface),
                    })
                }
                None => {
                    return Err(CollapseError::IllegalStep {
                        index,
                        reason: format!("{:?} is not free", step.free),
                    })
                }
            }
        }
        if state.alive != self.residual {
            return Err(CollapseError::ResidualMismatch);
        }
        Ok(state.alive)
    }

    /// True iff the residual is a single vertex.
    pub fn reaches_point(&self) -> bool {
        self.residual.num_simplices() == 1 && self.residual.num_vertices() == 1
    }

    pub fn to_doc(&self, k: &Complex2) -> CollapseCertificateDoc {
        let sorted = |s: Simplex| {
            let mut l = k.simplex_labels(s);
            l.sort();
            l
        };
        CollapseCertificateDoc {
            start_hash: self.start_hash.clone(),
            start: self.start.canonical_faces(k),
            steps: self
                .steps
                .iter()
                .map(|s| StepDoc {
                    free: sorted(s.free),
                    coface: sorted(s.coface),
                })
                .collect(),
            residual: self.residual.canonical_faces(k),
        }
    }
}

/// Label-level serialisation of a [`CollapseCertificate`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollapseCertificateDoc {
    pub start_hash: String,
    pub start: Vec<Vec<String>>,
    pub steps: Vec<StepDoc>,
    pub residual: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepDoc {
    pub free: Vec<String>,
    pub coface: Vec<String>,
}

impl CollapseCertificateDoc {
    /// Rebuilds the start complex from its faces and replays the steps on it.
    /// Returns the start complex and the certificate over it.
    pub fn verify(&self) -> Result<(Complex2, CollapseCertificate), CollapseError> {
        let k = Complex2::from_maximal_faces(&self.start)?;
        let lookup = |index: usize, labels: &[String]| {
            k.find_simplex(labels).ok_or_else(|| CollapseError::IllegalStep {
                index,
                reason: format!("unknown simplex {labels:?}"),
            })
        };
        let steps = self
            .steps
            .iter()
            .enumerate()
            .map(|(i, s)| {
                Ok(CollapseStep {
                    free: lookup(i, &s.free)?,
                    coface: lookup(i, &s.coface)?,
                })
            })
            .collect::<Result<Vec<_>, CollapseError>>()?;
        let residual = SubcomplexMask::from_label_faces(&k, &self.residual)?;
        let cert = CollapseCertificate {
            start_hash: self.start_hash.clone(),
            start: SubcomplexMask::full(&k),
            steps,
            residual,
        };
        let reached = cert.replay(&k)?;
        if reached.canonical_faces(&k) != self.residual {
            return Err(CollapseError::ResidualMismatch);
        }
        Ok((k, cert))
    }
}

/// Currently legal steps on the full complex whose free face is not protected,
/// in ascending (dimension, id) order.
pub fn free_faces(k: &Complex2, protected: &SubcomplexMask) -> Vec<CollapseStep> {
    free_faces_from(k, &SubcomplexMask::full(k), protected)
}

/// As [`free_faces`], on the subcomplex `start`.
pub fn free_faces_from(k: &Complex2, start: &SubcomplexMask, protected: &SubcomplexMask) -> Vec<CollapseStep> {
    debug_assert!(start.is_valid(k) && protected.is_valid(k));
    CollapseState::new(k, start).legal_steps(protected)
}

/// Greedy collapse of the whole complex, never removing protected simplices.
pub fn greedy_collapse(k: &Complex2, protected: &SubcomplexMask) -> (SubcomplexMask, CollapseCertificate) {
    greedy_collapse_from(k, &SubcomplexMask::full(k), protected)
}

/// Greedy collapse of `start`: repeatedly applies the lowest (dimension, id)
/// legal step until none remains.
pub fn greedy_collapse_from(
    k: &Complex2,
    start: &SubcomplexMask,
    protected: &SubcomplexMask,
) -> (SubcomplexMask, CollapseCertificate) {
    let mut state = CollapseState::new(k, start);
    let mut candidates: BTreeSet<Simplex> = state.legal_steps(protected).into_iter().map(|s| s.free).collect();
    let mut steps = Vec::new();
    while let Some(free) = candidates.pop_first() {
        let step = state.step_for(free).expect("candidate set tracks legal steps");
        let touched = state.neighbourhood(step);
        state.apply(step);
        steps.push(step);
        for s in touched {
            if protected.contains(s) {
                continue;
            }
            if state.step_for(s).is_some() {
                candidates.insert(s);
            } else {
                candidates.remove(&s);
            }
        }
    }
    let residual = state.alive.clone();
    let certificate = CollapseCertificate {
        start_hash: start.to_complex(k).content_hash(),
        start: start.clone(),
        steps,
        residual: residual.clone(),
    };
    (residual, certificate)
}

/// Decides collapsibility of a connected complex by greedy collapsing.
pub fn is_collapsible(k: &Complex2) -> Result<CollapseVerdict, CollapseError> {
    is_collapsible_sub(k, &SubcomplexMask::full(k))
}

/// Decides collapsibility of the subcomplex `sub`.
pub fn is_collapsible_sub(k: &Complex2, sub: &SubcomplexMask) -> Result<CollapseVerdict, CollapseError> {
    if !sub.is_valid(k) {
        return Err(CollapseError::InvalidMask);
    }
    if sub.is_empty() {
        return Err(CollapseError::EmptyComplex);
    }
    if !sub.is_connected(k) {
        return Err(CollapseError::NotConnected);
    }
    let (_, certificate) = greedy_collapse_from(k, sub, &SubcomplexMask::empty(k));
    Ok(CollapseVerdict {
        success: certificate.reaches_point(),
        certificate,
    })
}

/// Greedy collapse protecting `target`; succeeds iff exactly `target` remains.
pub fn collapses_to(k: &Complex2, target: &SubcomplexMask) -> Result<CollapseVerdict, CollapseError> {
    collapses_to_from(k, &SubcomplexMask::full(k), target)
}

pub fn collapses_to_from(
    k: &Complex2,
    start: &SubcomplexMask,
    target: &SubcomplexMask,
) -> Result<CollapseVerdict, CollapseError> {
    if !start.is_valid(k) || !target.is_valid(k) {
        return Err(CollapseError::InvalidMask);
    }
    if !target.is_subset(start) {
        let (_, certificate) = greedy_collapse_from(k, start, &start.intersection(target));
        return Ok(CollapseVerdict {
            success: false,
            certificate,
        });
    }
    let (residual, certificate) = greedy_collapse_from(k, start, target);
    Ok(CollapseVerdict {
        success: residual == *target,
        certificate,
    })
}

/// Exhaustive search over all collapse orders of the full complex.
pub fn brute_force_collapsible(k: &Complex2, target: &CollapseTarget) -> Result<bool, CollapseError> {
    brute_force_collapsible_with_limit(k, &SubcomplexMask::full(k), target, BRUTE_FORCE_MAX_TRIANGLES)
}

/// Exhaustive search from `start`. Explores every reachable subcomplex once;
/// independent of the greedy engine's ordering.
pub fn brute_force_collapsible_with_limit(
    k: &Complex2,
    start: &SubcomplexMask,
    target: &CollapseTarget,
    max_triangles: usize,
) -> Result<bool, CollapseError> {
    if start.num_triangles() > max_triangles {
        return Err(CollapseError::TooLarge {
            triangles: start.num_triangles(),
            limit: max_triangles,
        });
    }
    if !start.is_valid(k) {
        return Err(CollapseError::InvalidMask);
    }
    let protected = match target {
        CollapseTarget::Point => SubcomplexMask::empty(k),
        CollapseTarget::Subcomplex(l) => {
            if !l.is_valid(k) {
                return Err(CollapseError::InvalidMask);
            }
            if !l.is_subset(start) {
                return Ok(false);
            }
            l.clone()
        }
    };
    let reached = |m: &SubcomplexMask| match target {
        CollapseTarget::Point => m.num_vertices() == 1 && m.num_simplices() == 1,
        CollapseTarget::Subcomplex(l) => m == l,
    };

    let mut visited: HashSet<SubcomplexMask> = HashSet::new();
    let mut stack = vec![CollapseState::new(k, start)];
    visited.insert(start.clone());
    while let Some(state) = stack.pop() {
        if reached(&state.alive) {
            return Ok(true);
        }
        for step in state.legal_steps(&protected) {
            let mut next = state.clone();
            next.apply(step);
            if visited.insert(next.alive.clone()) {
                stack.push(next);
            }
        }
    }
    Ok(false)
}
