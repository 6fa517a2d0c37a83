//! Simplicial homology with GF(2) coefficients.
//!
//! Chains are bit-vectors over the parent complex's simplex tables. All
//! matrices are reduced with plain column elimination; every reduced column
//! remembers which original columns were added into it, which yields kernel
//! bases and filling witnesses for free.

use std::collections::HashMap;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::{Complex2, Simplex};
use crate::mask::SubcomplexMask;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum HomologyError {
    #[error("chain does not match the complex or the requested dimension")]
    DimensionMismatch,
    #[error("chain is not a cycle")]
    NotACycle,
    #[error("chain is not supported in the given subcomplex")]
    NotInSubcomplex,
    #[error("sphere masks {0} and {1} share a simplex")]
    SpheresNotDisjoint(usize, usize),
    #[error("mask is not a subcomplex of the given complex")]
    InvalidMask,
}

/// A GF(2) chain of fixed dimension.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Chain {
    dim: usize,
    bits: FixedBitSet,
}

fn table_len(k: &Complex2, dim: usize) -> usize {
    match dim {
        0 => k.num_vertices(),
        1 => k.num_edges(),
        2 => k.num_triangles(),
        _ => 0,
    }
}

impl Chain {
    pub fn zero(k: &Complex2, dim: usize) -> Self {
        Chain {
            dim,
            bits: FixedBitSet::with_capacity(table_len(k, dim)),
        }
    }

    /// Sum of the given simplices, all of which must have dimension `dim`.
    pub fn from_simplices<I: IntoIterator<Item = Simplex>>(
        k: &Complex2,
        dim: usize,
        simplices: I,
    ) -> Result<Self, HomologyError> {
        let mut c = Chain::zero(k, dim);
        for s in simplices {
            if s.dim() != dim || s.index() >= c.bits.len() {
                return Err(HomologyError::DimensionMismatch);
            }
            c.bits.toggle(s.index());
        }
        Ok(c)
    }

    /// The 1-chain of the edges in a mask, or the 2-chain of its triangles.
    pub fn of_mask(k: &Complex2, dim: usize, mask: &SubcomplexMask) -> Self {
        let mut c = Chain::zero(k, dim);
        let src = match dim {
            0 => mask.vertex_bits(),
            1 => mask.edge_bits(),
            _ => mask.triangle_bits(),
        };
        c.bits.union_with(src);
        c
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bits(&self) -> &FixedBitSet {
        &self.bits
    }

    pub fn is_zero(&self) -> bool {
        self.bits.is_clear()
    }

    pub fn weight(&self) -> usize {
        self.bits.count_ones(..)
    }

    pub fn support(&self) -> Vec<Simplex> {
        self.bits.ones().map(|i| simplex_of(self.dim, i)).collect()
    }

    pub fn add(&self, other: &Chain) -> Result<Chain, HomologyError> {
        if self.dim != other.dim || self.bits.len() != other.bits.len() {
            return Err(HomologyError::DimensionMismatch);
        }
        let mut out = self.clone();
        out.bits.symmetric_difference_with(&other.bits);
        Ok(out)
    }

    fn matches(&self, k: &Complex2) -> bool {
        self.dim <= 2 && self.bits.len() == table_len(k, self.dim)
    }

    pub fn is_supported_in(&self, mask: &SubcomplexMask) -> bool {
        let m = match self.dim {
            0 => mask.vertex_bits(),
            1 => mask.edge_bits(),
            _ => mask.triangle_bits(),
        };
        self.bits.is_subset(m)
    }
}

fn simplex_of(dim: usize, i: usize) -> Simplex {
    use crate::complex::{EdgeId, TriangleId, VertexId};
    match dim {
        0 => Simplex::Vertex(VertexId(i)),
        1 => Simplex::Edge(EdgeId(i)),
        _ => Simplex::Triangle(TriangleId(i)),
    }
}

fn column(k: &Complex2, s: Simplex) -> FixedBitSet {
    match s {
        Simplex::Edge(e) => {
            let mut b = FixedBitSet::with_capacity(k.num_vertices());
            for v in k.edge(e) {
                b.insert(v.0);
            }
            b
        }
        Simplex::Triangle(t) => {
            let mut b = FixedBitSet::with_capacity(k.num_edges());
            for e in k.triangle_edges(t) {
                b.insert(e.0);
            }
            b
        }
        Simplex::Vertex(_) => FixedBitSet::new(),
    }
}

/// Mod-2 boundary of a 1- or 2-chain.
pub fn boundary(k: &Complex2, c: &Chain) -> Result<Chain, HomologyError> {
    if !c.matches(k) || c.dim == 0 {
        return Err(HomologyError::DimensionMismatch);
    }
    let mut out = Chain::zero(k, c.dim - 1);
    for i in c.bits.ones() {
        out.bits.symmetric_difference_with(&column(k, simplex_of(c.dim, i)));
    }
    Ok(out)
}

/// Boundary matrix in dimension 1 or 2, restricted to the simplices of a mask.
#[derive(Clone, Debug)]
pub struct BoundaryMatrix {
    pub dim: usize,
    pub rows: usize,
    /// `(simplex index, boundary column)` for each masked `dim`-simplex.
    pub columns: Vec<(usize, FixedBitSet)>,
}

impl BoundaryMatrix {
    pub fn new(k: &Complex2, dim: usize, mask: &SubcomplexMask) -> Self {
        assert!(dim == 1 || dim == 2, "boundary matrices exist in dimensions 1 and 2");
        let ids: Vec<usize> = match dim {
            1 => mask.edges().map(|e| e.0).collect(),
            _ => mask.triangles().map(|t| t.0).collect(),
        };
        BoundaryMatrix {
            dim,
            rows: table_len(k, dim - 1),
            columns: ids.into_iter().map(|i| (i, column(k, simplex_of(dim, i)))).collect(),
        }
    }

    pub fn reduce(&self, total_columns: usize) -> ColumnReduction {
        ColumnReduction::new(self.columns.iter().cloned(), total_columns)
    }
}

/// Column-reduced GF(2) matrix with source tracking.
#[derive(Clone, Debug)]
pub struct ColumnReduction {
    pivots: HashMap<usize, (FixedBitSet, FixedBitSet)>,
    kernel: Vec<FixedBitSet>,
    total_columns: usize,
}

impl ColumnReduction {
    pub fn new<I: IntoIterator<Item = (usize, FixedBitSet)>>(columns: I, total_columns: usize) -> Self {
        let mut pivots: HashMap<usize, (FixedBitSet, FixedBitSet)> = HashMap::new();
        let mut kernel = Vec::new();
        for (j, mut col) in columns {
            let mut src = FixedBitSet::with_capacity(total_columns);
            src.insert(j);
            loop {
                match col.minimum() {
                    None => {
                        kernel.push(src);
                        break;
                    }
                    Some(p) => match pivots.get(&p) {
                        Some((pc, ps)) => {
                            col.symmetric_difference_with(pc);
                            src.symmetric_difference_with(ps);
                        }
                        None => {
                            pivots.insert(p, (col, src));
                            break;
                        }
                    },
                }
            }
        }
        ColumnReduction {
            pivots,
            kernel,
            total_columns,
        }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Basis of the null space, as sets of original column indices.
    pub fn kernel(&self) -> &[FixedBitSet] {
        &self.kernel
    }

    /// Some set of columns summing to `target`, if one exists.
    pub fn solve(&self, target: &FixedBitSet) -> Option<FixedBitSet> {
        let mut col = target.clone();
        let mut src = FixedBitSet::with_capacity(self.total_columns);
        while let Some(p) = col.minimum() {
            let (pc, ps) = self.pivots.get(&p)?;
            col.symmetric_difference_with(pc);
            src.symmetric_difference_with(ps);
        }
        Some(src)
    }
}

/// GF(2) Betti numbers of a 2-complex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Betti {
    pub b0: usize,
    pub b1: usize,
    pub b2: usize,
}

impl Betti {
    pub fn new(b0: usize, b1: usize, b2: usize) -> Self {
        Betti { b0, b1, b2 }
    }

    /// `(1, 0, 0)`: the homology of a point.
    pub fn is_acyclic(&self) -> bool {
        *self == Betti::new(1, 0, 0)
    }

    /// `b0 - b1 + b2 - 1`.
    pub fn reduced_euler(&self) -> i64 {
        self.b0 as i64 - self.b1 as i64 + self.b2 as i64 - 1
    }
}

pub fn betti(k: &Complex2) -> Betti {
    betti_of(k, &SubcomplexMask::full(k))
}

/// Betti numbers of the masked subcomplex. The empty mask has `(0, 0, 0)`.
pub fn betti_of(k: &Complex2, mask: &SubcomplexMask) -> Betti {
    let r1 = BoundaryMatrix::new(k, 1, mask).reduce(k.num_edges()).rank();
    let r2 = BoundaryMatrix::new(k, 2, mask).reduce(k.num_triangles()).rank();
    Betti {
        b0: mask.num_vertices() - r1,
        b1: mask.num_edges() - r1 - r2,
        b2: mask.num_triangles() - r2,
    }
}

/// Basis of the 2-cycles (`ker ∂₂`) of the masked subcomplex.
pub fn two_cycle_basis(k: &Complex2, mask: &SubcomplexMask) -> Vec<Chain> {
    BoundaryMatrix::new(k, 2, mask)
        .reduce(k.num_triangles())
        .kernel()
        .iter()
        .map(|bits| Chain {
            dim: 2,
            bits: bits.clone(),
        })
        .collect()
}

/// Checks whether the 1-cycle `z` bounds in the full complex; returns a
/// filling 2-chain when it does.
pub fn is_nullhomologous(k: &Complex2, z: &Chain) -> Result<Option<Chain>, HomologyError> {
    is_nullhomologous_in(k, &SubcomplexMask::full(k), z)
}

/// As [`is_nullhomologous`], inside the subcomplex `mask`.
pub fn is_nullhomologous_in(k: &Complex2, mask: &SubcomplexMask, z: &Chain) -> Result<Option<Chain>, HomologyError> {
    if z.dim != 1 || !z.matches(k) {
        return Err(HomologyError::DimensionMismatch);
    }
    if !mask.is_valid(k) {
        return Err(HomologyError::InvalidMask);
    }
    if !boundary(k, z)?.is_zero() {
        return Err(HomologyError::NotACycle);
    }
    if !z.is_supported_in(mask) {
        return Err(HomologyError::NotInSubcomplex);
    }
    let red = BoundaryMatrix::new(k, 2, mask).reduce(k.num_triangles());
    Ok(red.solve(&z.bits).map(|bits| Chain { dim: 2, bits }))
}

/// True iff every 2-cycle is supported in the union of `spheres` and the
/// number of independent 2-cycles equals the number of spheres.
pub fn h2_supported_only_on(k: &Complex2, spheres: &[SubcomplexMask]) -> Result<bool, HomologyError> {
    for (i, a) in spheres.iter().enumerate() {
        if !a.is_valid(k) {
            return Err(HomologyError::InvalidMask);
        }
        for (j, b) in spheres.iter().enumerate().skip(i + 1) {
            if !a.is_disjoint(b) {
                return Err(HomologyError::SpheresNotDisjoint(i, j));
            }
        }
    }
    let union = spheres.iter().fold(SubcomplexMask::empty(k), |acc, s| acc.union(s));
    let basis = two_cycle_basis(k, &SubcomplexMask::full(k));
    Ok(basis.len() == spheres.len() && basis.iter().all(|c| c.is_supported_in(&union)))
}
