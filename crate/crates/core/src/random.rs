//! Seeded generators for complexes and formulas.

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::complex::Complex2;
use crate::reduction::Formula;

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Shape of a random complex.
#[derive(Clone, Copy, Debug)]
pub struct RandomComplexParams {
    pub max_vertices: usize,
    pub max_triangles: usize,
    pub max_loose_edges: usize,
}

impl Default for RandomComplexParams {
    fn default() -> Self {
        RandomComplexParams {
            max_vertices: 7,
            max_triangles: 8,
            max_loose_edges: 2,
        }
    }
}

/// A random nonempty 2-complex: up to `max_triangles` distinct triangles
/// on up to `max_vertices` vertices, plus a few edges and vertices that
/// may lie in no triangle.
pub fn random_complex<R: Rng>(rng: &mut R, p: RandomComplexParams) -> Complex2 {
    let n = rng.random_range(3..=p.max_vertices.max(3));
    let mut triples: Vec<[usize; 3]> = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                triples.push([a, b, c]);
            }
        }
    }
    triples.shuffle(rng);
    let t = rng.random_range(0..=p.max_triangles.min(triples.len()));
    let mut faces: Vec<Vec<String>> = triples[..t]
        .iter()
        .map(|f| f.iter().map(|v| format!("v{v}")).collect())
        .collect();
    for _ in 0..rng.random_range(0..=p.max_loose_edges) {
        let a = rng.random_range(0..n);
        let b = (a + rng.random_range(1..n)) % n;
        faces.push(vec![format!("v{a}"), format!("v{b}")]);
    }
    if faces.is_empty() || rng.random_bool(0.1) {
        faces.push(vec![format!("v{}", rng.random_range(0..n))]);
    }
    Complex2::from_maximal_faces(&faces).expect("generated faces are valid")
}

/// A random connected complex, by retrying [`random_complex`].
pub fn random_connected_complex<R: Rng>(rng: &mut R, p: RandomComplexParams) -> Complex2 {
    loop {
        let k = random_complex(rng, p);
        if k.is_connected() {
            return k;
        }
    }
}

/// A random 3-CNF formula; each clause uses three distinct variables.
pub fn random_formula<R: Rng>(rng: &mut R, num_vars: usize, num_clauses: usize) -> Formula {
    assert!(num_vars >= 3, "clauses need three distinct variables");
    let vars: Vec<i32> = (1..=num_vars as i32).collect();
    let clauses = (0..num_clauses)
        .map(|_| {
            let picked: Vec<i32> = vars.choose_multiple(rng, 3).copied().collect();
            [0, 1, 2].map(|i| if rng.random_bool(0.5) { picked[i] } else { -picked[i] })
        })
        .collect();
    Formula::new(num_vars, clauses)
}
