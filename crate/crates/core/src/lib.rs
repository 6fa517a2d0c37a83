//! Collapsibility, covers by collapsible subcomplexes, and PL category of
//! two-dimensional simplicial complexes.

pub mod collapse;
pub mod complex;
pub mod enrichment;
pub mod graph;
pub mod homology;
pub mod io;
pub mod mask;
pub mod plgcat;
pub mod random;
pub mod reduction;
pub mod shelling;
pub mod standard;
pub mod subdivision;
