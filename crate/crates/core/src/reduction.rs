//! From 3-CNF formulas to enriched complexes.
//!
//! The gadget complex of a formula is consumed as an annotated input file
//! (spheres named `sphere:1` .. `sphere:n`). A toy gadget with the same
//! homological shape is built in-process so every stage can run without one.

use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::collapse::is_collapsible_sub;
use crate::complex::{Complex2, ComplexError, TriangleId};
use crate::enrichment::{enrich, ComplexPlus};
use crate::homology::{betti_of, h2_supported_only_on, Betti};
use crate::io::{ComplexDoc, IoError, LoadedComplex};
use crate::mask::SubcomplexMask;
use crate::plgcat::check_enriched;

/// Largest variable count `sat_bruteforce` accepts.
pub const MAX_BRUTEFORCE_VARS: usize = 25;

#[derive(Debug, Error)]
pub enum ReductionError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("clause {clause} does not have exactly three literals")]
    NotThreeCnf { clause: usize },
    #[error("{0} variables is too many for brute force (limit {MAX_BRUTEFORCE_VARS})")]
    TooManyVariables(usize),
    #[error("gadget contract violated: {}", .0.failures().join("; "))]
    ContractViolation(GadgetReport),
    #[error("expected {expected} removed triangles, got {found}")]
    WrongCount { expected: usize, found: usize },
    #[error("triangle {0:?} lies in no sphere")]
    TriangleNotInSphere(TriangleId),
    #[error("two removed triangles lie in sphere {0}")]
    DuplicateSphere(usize),
    #[error("gadget file: {0}")]
    Gadget(String),
    #[error(transparent)]
    Io(#[from] IoError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

/// A 3-CNF formula. Literals are nonzero integers, negative for negation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Formula {
    pub num_vars: usize,
    pub clauses: Vec<[i32; 3]>,
    /// Clauses dropped at parse time because they contain `x` and `¬x`.
    #[serde(default)]
    pub normalized_away: usize,
}

impl Formula {
    /// Builds a formula, dropping tautological clauses.
    pub fn new(num_vars: usize, clauses: Vec<[i32; 3]>) -> Self {
        let before = clauses.len();
        let clauses: Vec<_> = clauses.into_iter().filter(|c| !is_tautology(c)).collect();
        Formula {
            num_vars,
            normalized_away: before - clauses.len(),
            clauses,
        }
    }

    /// Whether `assignment[i]` (the value of variable `i + 1`) satisfies
    /// every clause.
    pub fn evaluate(&self, assignment: &[bool]) -> bool {
        self.clauses
            .iter()
            .all(|c| c.iter().any(|&l| assignment[l.unsigned_abs() as usize - 1] == (l > 0)))
    }
}

fn is_tautology(c: &[i32; 3]) -> bool {
    c.iter().any(|&l| c.contains(&-l))
}

/// Parses DIMACS CNF. With `pad`, clauses of one or two literals are
/// padded by repeating their last literal; otherwise they are rejected.
pub fn parse_dimacs(text: &str, pad: bool) -> Result<Formula, ReductionError> {
    let syntax = |line: usize, message: String| ReductionError::Syntax { line, message };
    let mut header: Option<(usize, usize)> = None;
    let mut clauses = Vec::new();
    let mut current: Vec<i32> = Vec::new();
    let mut last_line = 0;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        last_line = line_no;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line.starts_with('p') {
            let words: Vec<&str> = line.split_whitespace().collect();
            if header.is_some() {
                return Err(syntax(line_no, "second problem line".into()));
            }
            match words.as_slice() {
                ["p", "cnf", v, c] => {
                    let v = v
                        .parse()
                        .map_err(|_| syntax(line_no, format!("bad variable count {v:?}")))?;
                    let c = c
                        .parse()
                        .map_err(|_| syntax(line_no, format!("bad clause count {c:?}")))?;
                    header = Some((v, c));
                }
                _ => return Err(syntax(line_no, "expected `p cnf <vars> <clauses>`".into())),
            }
            continue;
        }
        let Some((num_vars, _)) = header else {
            return Err(syntax(line_no, "clause before the problem line".into()));
        };
        for word in line.split_whitespace() {
            let lit: i32 = word
                .parse()
                .map_err(|_| syntax(line_no, format!("unexpected token {word:?}")))?;
            if lit == 0 {
                let idx = clauses.len();
                let clause = match current.len() {
                    3 => [current[0], current[1], current[2]],
                    1 | 2 if pad => {
                        let last = *current.last().expect("nonempty");
                        [current[0], *current.get(1).unwrap_or(&last), last]
                    }
                    _ => return Err(ReductionError::NotThreeCnf { clause: idx }),
                };
                clauses.push(clause);
                current.clear();
            } else {
                if lit.unsigned_abs() as usize > num_vars {
                    return Err(syntax(line_no, format!("literal {lit} exceeds {num_vars} variables")));
                }
                current.push(lit);
            }
        }
    }
    let Some((num_vars, num_clauses)) = header else {
        return Err(syntax(last_line.max(1), "missing problem line".into()));
    };
    if !current.is_empty() {
        return Err(syntax(last_line, "last clause is not terminated by 0".into()));
    }
    if clauses.len() != num_clauses {
        return Err(syntax(
            last_line.max(1),
            format!("header announces {num_clauses} clauses, found {}", clauses.len()),
        ));
    }
    Ok(Formula::new(num_vars, clauses))
}

pub fn to_dimacs(f: &Formula) -> String {
    let mut out = format!("p cnf {} {}\n", f.num_vars, f.clauses.len());
    for [a, b, c] in &f.clauses {
        out.push_str(&format!("{a} {b} {c} 0\n"));
    }
    out
}

/// A satisfying assignment, the least one in binary order (variable 1 is
/// the lowest bit), or `None`.
pub fn sat_bruteforce(f: &Formula) -> Result<Option<Vec<bool>>, ReductionError> {
    let n = f.num_vars;
    if n > MAX_BRUTEFORCE_VARS {
        return Err(ReductionError::TooManyVariables(n));
    }
    let masks: Vec<(u32, u32)> = f
        .clauses
        .iter()
        .map(|c| {
            c.iter().fold((0, 0), |(pos, neg), &l| {
                let bit = 1u32 << (l.unsigned_abs() - 1);
                if l > 0 {
                    (pos | bit, neg)
                } else {
                    (pos, neg | bit)
                }
            })
        })
        .collect();
    let found = (0..1u32 << n)
        .into_par_iter()
        .find_first(|&a| masks.iter().all(|&(pos, neg)| a & pos != 0 || !a & neg != 0));
    Ok(found.map(|a| (0..n).map(|i| a >> i & 1 == 1).collect()))
}

/// A complex with one annotated sphere per variable.
#[derive(Clone, Debug)]
pub struct GadgetComplex {
    pub complex: Complex2,
    pub spheres: Vec<SubcomplexMask>,
    pub provenance: String,
}

impl GadgetComplex {
    pub fn to_doc(&self) -> ComplexDoc {
        self.spheres
            .iter()
            .enumerate()
            .fold(ComplexDoc::from_complex(&self.complex), |doc, (i, s)| {
                doc.with_named(format!("sphere:{}", i + 1), &self.complex, s)
            })
    }

    /// Reads spheres from `sphere:1` .. `sphere:n`, which must be the only
    /// names present.
    pub fn from_loaded(loaded: LoadedComplex, provenance: impl Into<String>) -> Result<Self, ReductionError> {
        let n = loaded.named.len();
        let mut spheres = Vec::with_capacity(n);
        for i in 1..=n {
            let mask = loaded
                .named
                .get(&format!("sphere:{i}"))
                .ok_or_else(|| ReductionError::Gadget(format!("spheres must be named sphere:1 .. sphere:{n}")))?;
            spheres.push(mask.clone());
        }
        Ok(GadgetComplex {
            complex: loaded.complex,
            spheres,
            provenance: provenance.into(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContractCheck {
    pub name: String,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GadgetReport {
    pub checks: Vec<ContractCheck>,
}

impl GadgetReport {
    fn push(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(ContractCheck {
            name: name.into(),
            passed,
            detail: detail.into(),
        });
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<String> {
        self.checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| {
                if c.detail.is_empty() {
                    c.name.clone()
                } else {
                    format!("{}: {}", c.name, c.detail)
                }
            })
            .collect()
    }
}

fn sphere_problem(k: &Complex2, s: &SubcomplexMask) -> Option<String> {
    if !s.is_valid(k) {
        return Some("not a subcomplex".into());
    }
    if s.num_triangles() == 0 {
        return Some("no triangles".into());
    }
    if !s.is_connected(k) {
        return Some("not connected".into());
    }
    if s.vertices()
        .any(|v| !k.vertex_triangles(v).iter().any(|&t| s.has_triangle(t)))
    {
        return Some("a vertex lies in no triangle of the sphere".into());
    }
    for e in s.edges() {
        let n = k.edge_triangles(e).iter().filter(|&&t| s.has_triangle(t)).count();
        if n != 2 {
            return Some(format!("an edge lies in {n} triangles of the sphere"));
        }
    }
    let b = betti_of(k, s);
    (b != Betti::new(1, 0, 1)).then(|| format!("Betti numbers {} {} {}", b.b0, b.b1, b.b2))
}

/// Checks the gadget contract: a pure 2-complex, each annotation a
/// triangulated 2-sphere, spheres pairwise disjoint, and second homology
/// generated by the spheres.
pub fn verify_gadget_contract(g: &GadgetComplex) -> GadgetReport {
    let k = &g.complex;
    let mut report = GadgetReport::default();
    let pure = k.dimension() == Some(2) && k.is_pure().unwrap_or(false);
    report.push("pure 2-dimensional", pure, "");
    for (i, s) in g.spheres.iter().enumerate() {
        let problem = sphere_problem(k, s);
        report.push(
            format!("sphere:{} is a 2-sphere", i + 1),
            problem.is_none(),
            problem.unwrap_or_default(),
        );
    }
    let mut overlaps = Vec::new();
    for i in 0..g.spheres.len() {
        for j in i + 1..g.spheres.len() {
            if g.spheres[i].vertices().any(|v| g.spheres[j].has_vertex(v)) {
                overlaps.push(format!("sphere:{} meets sphere:{}", i + 1, j + 1));
            }
        }
    }
    report.push("spheres pairwise disjoint", overlaps.is_empty(), overlaps.join(", "));
    let valid = g.spheres.iter().all(|s| s.is_valid(k));
    match valid.then(|| h2_supported_only_on(k, &g.spheres)) {
        Some(Ok(true)) => report.push("second homology generated by the spheres", true, ""),
        Some(Ok(false)) => report.push(
            "second homology generated by the spheres",
            false,
            "a 2-cycle is not a sum of spheres",
        ),
        Some(Err(e)) => report.push("second homology generated by the spheres", false, e.to_string()),
        None => report.push("second homology generated by the spheres", false, "invalid sphere mask"),
    }
    report
}

/// `n` boundaries of tetrahedra in a chain; consecutive spheres are joined
/// by two triangles sharing an edge, each meeting one sphere in a vertex.
pub fn toy_gadget(n: usize) -> GadgetComplex {
    assert!(n >= 1, "a toy gadget needs at least one sphere");
    let v = |i: usize, c: char| format!("s{i}{c}");
    let mut faces: Vec<Vec<String>> = Vec::new();
    for i in 1..=n {
        for [a, b, c] in [['a', 'b', 'c'], ['a', 'b', 'd'], ['a', 'c', 'd'], ['b', 'c', 'd']] {
            faces.push(vec![v(i, a), v(i, b), v(i, c)]);
        }
        if i < n {
            let (x, y) = (format!("b{i}x"), format!("b{i}y"));
            faces.push(vec![v(i, 'd'), x.clone(), y.clone()]);
            faces.push(vec![x, y, v(i + 1, 'a')]);
        }
    }
    let complex = Complex2::from_maximal_faces(&faces).expect("toy gadget faces are valid");
    let spheres = (1..=n)
        .map(|i| {
            let labels =
                [['a', 'b', 'c'], ['a', 'b', 'd'], ['a', 'c', 'd'], ['b', 'c', 'd']].map(|t| t.map(|c| v(i, c)));
            SubcomplexMask::from_label_faces(&complex, &labels).expect("sphere faces exist")
        })
        .collect();
    GadgetComplex {
        complex,
        spheres,
        provenance: format!("toy gadget with {n} spheres"),
    }
}

/// Where the pipeline takes its gadget from.
#[derive(Clone, Debug)]
pub enum GadgetSource {
    Toy,
    Loaded(Box<GadgetComplex>),
}

/// Sizes recorded by the pipeline; deterministic.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PipelineMetadata {
    pub num_vars: usize,
    pub num_clauses: usize,
    pub normalized_away: usize,
    pub provenance: String,
    pub spheres: usize,
    /// Reduced Euler characteristic of the gadget.
    pub n: i64,
    pub gadget_vertices: usize,
    pub gadget_edges: usize,
    pub gadget_triangles: usize,
    pub enriched_vertices: usize,
    pub enriched_edges: usize,
    pub enriched_triangles: usize,
    pub gadget_hash: String,
    pub enriched_hash: String,
}

/// Wall-clock timings, kept apart from the deterministic artifacts.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct PipelineTimings {
    pub contract_ms: f64,
    pub enrich_ms: f64,
}

#[derive(Clone, Debug)]
pub struct PipelineOutput {
    pub gadget: GadgetComplex,
    pub report: GadgetReport,
    pub enriched: ComplexPlus,
    pub metadata: PipelineMetadata,
    pub timings: PipelineTimings,
}

fn millis(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

/// Builds or takes the gadget, checks its contract, and enriches it.
/// The sphere count must equal the number of variables.
pub fn pipeline(f: &Formula, source: GadgetSource) -> Result<PipelineOutput, ReductionError> {
    let gadget = match source {
        GadgetSource::Toy => toy_gadget(f.num_vars.max(1)),
        GadgetSource::Loaded(g) => *g,
    };
    let start = Instant::now();
    let mut report = verify_gadget_contract(&gadget);
    let expected = f.num_vars.max(1);
    report.push(
        "one sphere per variable",
        gadget.spheres.len() == expected,
        format!("{} spheres, {} variables", gadget.spheres.len(), f.num_vars),
    );
    let contract_ms = millis(start.elapsed());
    if !report.passed() {
        return Err(ReductionError::ContractViolation(report));
    }
    let start = Instant::now();
    let enriched = enrich(&gadget.complex);
    let enrich_ms = millis(start.elapsed());
    if let Err(e) = check_enriched(&enriched) {
        report.push("enriched complex is well formed", false, e.to_string());
        return Err(ReductionError::ContractViolation(report));
    }
    let k = &gadget.complex;
    let kp = &enriched.complex;
    let metadata = PipelineMetadata {
        num_vars: f.num_vars,
        num_clauses: f.clauses.len(),
        normalized_away: f.normalized_away,
        provenance: gadget.provenance.clone(),
        spheres: gadget.spheres.len(),
        n: k.reduced_euler()?,
        gadget_vertices: k.num_vertices(),
        gadget_edges: k.num_edges(),
        gadget_triangles: k.num_triangles(),
        enriched_vertices: kp.num_vertices(),
        enriched_edges: kp.num_edges(),
        enriched_triangles: kp.num_triangles(),
        gadget_hash: k.content_hash(),
        enriched_hash: kp.content_hash(),
    };
    Ok(PipelineOutput {
        gadget,
        report,
        enriched,
        metadata,
        timings: PipelineTimings { contract_ms, enrich_ms },
    })
}

/// Whether removing one triangle from each sphere leaves a collapsible
/// complex.
pub fn removal_witness_check(g: &GadgetComplex, removed: &[TriangleId]) -> Result<bool, ReductionError> {
    if removed.len() != g.spheres.len() {
        return Err(ReductionError::WrongCount {
            expected: g.spheres.len(),
            found: removed.len(),
        });
    }
    let mut used = vec![false; g.spheres.len()];
    for &t in removed {
        let i = g
            .spheres
            .iter()
            .position(|s| s.has_triangle(t))
            .ok_or(ReductionError::TriangleNotInSphere(t))?;
        if std::mem::replace(&mut used[i], true) {
            return Err(ReductionError::DuplicateSphere(i + 1));
        }
    }
    let rest = SubcomplexMask::full(&g.complex).without_triangles(removed.iter().copied());
    Ok(is_collapsible_sub(&g.complex, &rest)
        .map(|v| v.success)
        .unwrap_or(false))
}
