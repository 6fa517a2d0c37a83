//! Oracles written from definitions, sharing no code with the library
//! beyond reading vertex labels out of a complex.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};

use plcat::complex::Complex2;
use plcat::reduction::Formula;

/// All faces of `k` as sorted label lists, grouped by dimension.
pub fn faces_by_dim(k: &Complex2) -> [Vec<Vec<String>>; 3] {
    let mut sets: [BTreeSet<Vec<String>>; 3] = Default::default();
    for face in k.canonical_faces() {
        let n = face.len();
        for mask in 1u32..(1 << n) {
            let sub: Vec<String> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| face[i].clone()).collect();
            sets[sub.len() - 1].insert(sub);
        }
    }
    sets.map(|s| s.into_iter().collect())
}

/// Rank over GF(2) by plain Gaussian elimination on dense rows.
pub fn gf2_rank(mut rows: Vec<Vec<bool>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&r| rows[r][c]) else {
            continue;
        };
        rows.swap(rank, p);
        for r in 0..rows.len() {
            if r != rank && rows[r][c] {
                let pivot = rows[rank].clone();
                for (x, y) in rows[r].iter_mut().zip(pivot) {
                    *x ^= y;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn boundary_rank(low: &[Vec<String>], high: &[Vec<String>]) -> usize {
    if low.is_empty() || high.is_empty() {
        return 0;
    }
    let index: HashMap<&Vec<String>, usize> = low.iter().enumerate().map(|(i, f)| (f, i)).collect();
    let rows = high
        .iter()
        .map(|f| {
            let mut row = vec![false; low.len()];
            for skip in 0..f.len() {
                let facet: Vec<String> = f
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| *i != skip)
                    .map(|(_, l)| l.clone())
                    .collect();
                row[index[&facet]] = true;
            }
            row
        })
        .collect();
    gf2_rank(rows)
}

/// Betti numbers over GF(2) from dense boundary ranks.
pub fn betti_oracle(k: &Complex2) -> (usize, usize, usize) {
    let [v, e, t] = faces_by_dim(k);
    let r1 = boundary_rank(&v, &e);
    let r2 = boundary_rank(&e, &t);
    (v.len() - r1, e.len() - r1 - r2, t.len() - r2)
}

/// Collapsibility from the definition, using two facts about 2-complexes:
/// removing a triangle through a free edge never disconnects, and a
/// connected graph collapses to a point iff it is a tree. So `k` is
/// collapsible iff it is connected, has Euler characteristic 1, and its
/// triangles can all be removed one at a time through an edge that no
/// other remaining triangle contains. The last condition is searched
/// exhaustively over subsets of triangles.
pub fn collapsible_oracle(k: &Complex2) -> bool {
    let [v, e, t] = faces_by_dim(k);
    if v.is_empty() {
        return false;
    }
    if v.len() as i64 - e.len() as i64 + t.len() as i64 != 1 || !connected(&v, &e) {
        return false;
    }
    assert!(t.len() <= 20, "oracle is exponential in the triangle count");
    let edges_of: Vec<[Vec<String>; 3]> = t
        .iter()
        .map(|f| {
            [
                vec![f[0].clone(), f[1].clone()],
                vec![f[0].clone(), f[2].clone()],
                vec![f[1].clone(), f[2].clone()],
            ]
        })
        .collect();
    fn go(alive: u32, edges_of: &[[Vec<String>; 3]], memo: &mut HashMap<u32, bool>) -> bool {
        if alive == 0 {
            return true;
        }
        if let Some(&r) = memo.get(&alive) {
            return r;
        }
        let mut result = false;
        'search: for i in 0..edges_of.len() {
            if alive >> i & 1 == 0 {
                continue;
            }
            for e in &edges_of[i] {
                let shared = (0..edges_of.len()).any(|j| j != i && alive >> j & 1 == 1 && edges_of[j].contains(e));
                if !shared && go(alive & !(1 << i), edges_of, memo) {
                    result = true;
                    break 'search;
                }
            }
        }
        memo.insert(alive, result);
        result
    }
    go((1u32 << t.len()) - 1, &edges_of, &mut HashMap::new())
}

fn connected(v: &[Vec<String>], e: &[Vec<String>]) -> bool {
    let mut reached: BTreeSet<&String> = BTreeSet::from([&v[0][0]]);
    loop {
        let before = reached.len();
        for edge in e {
            if reached.contains(&edge[0]) || reached.contains(&edge[1]) {
                reached.insert(&edge[0]);
                reached.insert(&edge[1]);
            }
        }
        if reached.len() == before {
            return reached.len() == v.len();
        }
    }
}

/// Satisfiability by walking the full truth table, literal by literal.
pub fn truth_table_sat(f: &Formula) -> bool {
    (0..1u64 << f.num_vars).any(|row| {
        f.clauses.iter().all(|clause| {
            clause.iter().any(|&lit| {
                let value = row >> (lit.abs() - 1) & 1 == 1;
                if lit > 0 {
                    value
                } else {
                    !value
                }
            })
        })
    })
}

/// Whether `assignment` satisfies `f`, evaluated independently.
pub fn satisfies(f: &Formula, assignment: &[bool]) -> bool {
    f.clauses.iter().all(|c| {
        c.iter().any(|&l| {
            if l > 0 {
                assignment[(l - 1) as usize]
            } else {
                !assignment[(-l - 1) as usize]
            }
        })
    })
}
