//! Shellings of pure 2-complexes and Hachimori's criterion for the existence
//! of a shellable subdivision.

use std::collections::HashSet;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::collapse::is_collapsible_sub;
use crate::complex::{Complex2, TriangleId, VertexId};
use crate::homology::{betti, two_cycle_basis};
use crate::mask::SubcomplexMask;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ShellingError {
    #[error("complex is not pure")]
    NotPure,
    #[error("complex is not two-dimensional")]
    NotTwoDimensional,
    #[error("order is not a permutation of the triangles")]
    NotAPermutation,
}

/// An ordering of all triangles.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShellingOrder(pub Vec<TriangleId>);

impl ShellingOrder {
    pub fn to_labels(&self, k: &Complex2) -> Vec<Vec<String>> {
        self.0
            .iter()
            .map(|&t| k.simplex_labels(crate::complex::Simplex::Triangle(t)))
            .collect()
    }
}

/// Outcome of [`verify_shelling`]. `first_violation` is the position in the
/// order of the first triangle whose intersection with its predecessors is
/// not a nonempty union of edges.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShellingCheck {
    pub valid: bool,
    pub first_violation: Option<usize>,
}

fn check_pure_2d(k: &Complex2) -> Result<(), ShellingError> {
    if k.dimension() != Some(2) {
        return Err(ShellingError::NotTwoDimensional);
    }
    if !k.is_pure().map_err(|_| ShellingError::NotTwoDimensional)? {
        return Err(ShellingError::NotPure);
    }
    Ok(())
}

/// Whether `t` may be added after the triangles whose closure is `placed`.
fn attaches_along_edges(k: &Complex2, placed: &SubcomplexMask, t: TriangleId) -> bool {
    let edges = k.triangle_edges(t);
    let present: Vec<_> = edges.iter().copied().filter(|&e| placed.has_edge(e)).collect();
    if present.is_empty() {
        return false;
    }
    k.triangle(t)
        .iter()
        .filter(|&&v| placed.has_vertex(v))
        .all(|&v| present.iter().any(|&e| k.edge(e).contains(&v)))
}

pub fn verify_shelling(k: &Complex2, order: &ShellingOrder) -> Result<ShellingCheck, ShellingError> {
    check_pure_2d(k)?;
    let mut seen = FixedBitSet::with_capacity(k.num_triangles());
    for &t in &order.0 {
        if t.0 >= k.num_triangles() || seen.put(t.0) {
            return Err(ShellingError::NotAPermutation);
        }
    }
    if order.0.len() != k.num_triangles() {
        return Err(ShellingError::NotAPermutation);
    }
    let mut placed = SubcomplexMask::empty(k);
    for (i, &t) in order.0.iter().enumerate() {
        if i > 0 && !attaches_along_edges(k, &placed, t) {
            return Ok(ShellingCheck {
                valid: false,
                first_violation: Some(i),
            });
        }
        placed.insert_closed(k, crate::complex::Simplex::Triangle(t));
    }
    Ok(ShellingCheck {
        valid: true,
        first_violation: None,
    })
}

/// Result of a bounded search.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ShellingSearch {
    Found(ShellingOrder),
    NotShellable,
    Unknown { explored: u64 },
}

/// Exhaustive shelling search.
pub fn find_shelling(k: &Complex2) -> Result<Option<ShellingOrder>, ShellingError> {
    match find_shelling_bounded(k, u64::MAX)? {
        ShellingSearch::Found(o) => Ok(Some(o)),
        _ => Ok(None),
    }
}

/// Backtracking search visiting at most `budget` partial shellings. Whether a
/// set of placed triangles can be completed does not depend on their order,
/// so dead sets are memoised.
pub fn find_shelling_bounded(k: &Complex2, budget: u64) -> Result<ShellingSearch, ShellingError> {
    check_pure_2d(k)?;
    if !k.dual_graph().is_connected() {
        return Ok(ShellingSearch::NotShellable);
    }
    let mut search = ShellSearch {
        k,
        budget,
        explored: 0,
        dead: HashSet::new(),
        order: Vec::new(),
    };
    for first in k.triangle_ids() {
        let mut placed = SubcomplexMask::empty(k);
        placed.insert_closed(k, crate::complex::Simplex::Triangle(first));
        let mut used = FixedBitSet::with_capacity(k.num_triangles());
        used.insert(first.0);
        search.order = vec![first];
        match search.extend(&placed, &mut used) {
            Some(true) => return Ok(ShellingSearch::Found(ShellingOrder(search.order))),
            Some(false) => {}
            None => {
                return Ok(ShellingSearch::Unknown {
                    explored: search.explored,
                })
            }
        }
    }
    Ok(ShellingSearch::NotShellable)
}

struct ShellSearch<'a> {
    k: &'a Complex2,
    budget: u64,
    explored: u64,
    dead: HashSet<FixedBitSet>,
    order: Vec<TriangleId>,
}

impl ShellSearch<'_> {
    /// `Some(true)` on success, `Some(false)` on a dead end, `None` when the
    /// budget runs out.
    fn extend(&mut self, placed: &SubcomplexMask, used: &mut FixedBitSet) -> Option<bool> {
        if self.order.len() == self.k.num_triangles() {
            return Some(true);
        }
        if self.dead.contains(used) {
            return Some(false);
        }
        self.explored += 1;
        if self.explored > self.budget {
            return None;
        }
        for t in self.k.triangle_ids() {
            if used.contains(t.0) || !attaches_along_edges(self.k, placed, t) {
                continue;
            }
            let mut next = placed.clone();
            next.insert_closed(self.k, crate::complex::Simplex::Triangle(t));
            used.insert(t.0);
            self.order.push(t);
            match self.extend(&next, used)? {
                true => return Some(true),
                false => {
                    self.order.pop();
                    used.set(t.0, false);
                }
            }
        }
        self.dead.insert(used.clone());
        Some(false)
    }
}

/// Why the criterion fails.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum NoReason {
    NotConnected,
    LinkDisconnected(VertexId),
    NegativeEuler(i64),
    /// Removing triangles never lowers `b1`, so the remainder cannot be acyclic.
    NonzeroFirstHomology(usize),
    NoWitnessExhaustive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum HachimoriVerdict {
    Yes { witness: Vec<TriangleId> },
    No(NoReason),
    Unknown { budget: u64 },
}

/// Decides whether every vertex link is connected and some `χ̃(K)` triangles
/// can be removed leaving a collapsible complex.
///
/// Only removal sets that kill all of `H2` are tried: the restriction of a
/// basis of 2-cycles to the chosen triangles must be invertible. `budget`
/// bounds the number of search nodes.
pub fn hachimori_criterion(k: &Complex2, budget: u64) -> HachimoriVerdict {
    if !k.is_connected() {
        return HachimoriVerdict::No(NoReason::NotConnected);
    }
    if let Some(v) = k.vertex_ids().find(|&v| !k.link_graph(v).is_connected()) {
        return HachimoriVerdict::No(NoReason::LinkDisconnected(v));
    }
    let chi = k.reduced_euler().expect("connected complexes are nonempty");
    if chi < 0 {
        return HachimoriVerdict::No(NoReason::NegativeEuler(chi));
    }
    let b = betti(k);
    if b.b1 != 0 {
        return HachimoriVerdict::No(NoReason::NonzeroFirstHomology(b.b1));
    }
    // now χ̃ = b2
    let mut witness = None;
    let outcome = for_each_removal_set(k, budget, |w| {
        let rest = SubcomplexMask::full(k).without_triangles(w.iter().copied());
        let ok = is_collapsible_sub(k, &rest).map(|v| v.success).unwrap_or(false);
        if ok {
            witness = Some(w.to_vec());
        }
        ok
    });
    match outcome {
        Enumeration::Stopped => HachimoriVerdict::Yes {
            witness: witness.expect("stopped on a witness"),
        },
        Enumeration::Completed => HachimoriVerdict::No(NoReason::NoWitnessExhaustive),
        Enumeration::BudgetExhausted => HachimoriVerdict::Unknown { budget },
    }
}

/// How a bounded enumeration ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Enumeration {
    Completed,
    Stopped,
    BudgetExhausted,
}

/// Enumerates, in lexicographic order of triangle ids, the sets of `b2(K)`
/// triangles whose removal leaves no 2-cycle. Stops when `visit` returns
/// true. `budget` bounds the number of search nodes.
pub fn for_each_removal_set<F>(k: &Complex2, budget: u64, visit: F) -> Enumeration
where
    F: FnMut(&[TriangleId]) -> bool,
{
    let basis = two_cycle_basis(k, &SubcomplexMask::full(k));
    let columns: Vec<(TriangleId, FixedBitSet)> = k
        .triangle_ids()
        .filter_map(|t| {
            let mut col = FixedBitSet::with_capacity(basis.len());
            for (i, z) in basis.iter().enumerate() {
                if z.bits().contains(t.0) {
                    col.insert(i);
                }
            }
            (!col.is_clear()).then_some((t, col))
        })
        .collect();
    let mut search = RemovalSearch {
        columns: &columns,
        need: basis.len(),
        budget,
        explored: 0,
        chosen: Vec::new(),
        visit,
    };
    match search.run(0, &mut Vec::new()) {
        Some(true) => Enumeration::Stopped,
        Some(false) => Enumeration::Completed,
        None => Enumeration::BudgetExhausted,
    }
}

struct RemovalSearch<'a, F> {
    columns: &'a [(TriangleId, FixedBitSet)],
    need: usize,
    budget: u64,
    explored: u64,
    chosen: Vec<TriangleId>,
    visit: F,
}

impl<F: FnMut(&[TriangleId]) -> bool> RemovalSearch<'_, F> {
    fn run(&mut self, from: usize, reduced: &mut Vec<FixedBitSet>) -> Option<bool> {
        self.explored += 1;
        if self.explored > self.budget {
            return None;
        }
        if self.chosen.len() == self.need {
            return Some((self.visit)(&self.chosen));
        }
        let remaining = self.need - self.chosen.len();
        for i in from..self.columns.len() {
            if self.columns.len() - i < remaining {
                break;
            }
            let (t, col) = &self.columns[i];
            let mut r = col.clone();
            for b in reduced.iter() {
                let p = b.minimum().expect("basis vectors are nonzero");
                if r.contains(p) {
                    r.symmetric_difference_with(b);
                }
            }
            if r.is_clear() {
                continue;
            }
            reduced.push(r);
            self.chosen.push(*t);
            if self.run(i + 1, reduced)? {
                return Some(true);
            }
            self.chosen.pop();
            reduced.pop();
        }
        Some(false)
    }
}
