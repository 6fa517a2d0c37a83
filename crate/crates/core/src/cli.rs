//! Command-line front end.
//!
//! Exit codes: 0 success or positive verdict, 1 negative verdict, 2 input
//! error, 3 gadget contract violation. JSON goes to `--out` or standard
//! output; the human summary goes to standard error.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use plcat::collapse::{is_collapsible, is_collapsible_sub, CollapseCertificateDoc};
use plcat::complex::{Complex2, Simplex};
use plcat::enrichment::ComplexPlus;
use plcat::homology::betti;
use plcat::io::{self, ComplexDoc, LoadedComplex};
use plcat::mask::SubcomplexMask;
use plcat::plgcat::{plgcat_bounds, plgcat_bounds_enriched, PlgcatVerdictDoc, DEFAULT_BUDGET};
use plcat::random::{random_complex, random_connected_complex, random_formula, seeded, RandomComplexParams};
use plcat::reduction::{parse_dimacs, pipeline, to_dimacs, GadgetComplex, GadgetSource, ReductionError};
use plcat::shelling::{
    find_shelling_bounded, hachimori_criterion, verify_shelling, HachimoriVerdict, NoReason, ShellingOrder,
    ShellingSearch,
};

#[derive(Parser, Debug)]
#[command(
    name = "plcat",
    version,
    about = "Collapsibility, shellability and PL category of 2-complexes"
)]
struct Cli {
    /// Search budget (candidate pairs or search nodes).
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET, value_parser = clap::value_parser!(u64).range(1..))]
    budget: u64,
    /// Seed for randomized commands.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Also print JSON on standard output when `--out` is given.
    #[arg(long, global = true)]
    json: bool,
    /// Output file, or output directory for `reduce`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide collapsibility and emit a collapse certificate.
    Collapse { input: PathBuf },
    /// Search for a shelling or apply Hachimori's criterion.
    Shell {
        input: PathBuf,
        #[command(flatten)]
        mode: ShellMode,
    },
    /// Bounds on the PL geometric category, with certificates.
    Plgcat { input: PathBuf },
    /// Build the enriched complex of a 3-CNF formula.
    Reduce {
        cnf: PathBuf,
        /// Gadget file with spheres `sphere:1..n`, or `toy`.
        #[arg(long)]
        gadget: String,
        /// Pad short clauses instead of rejecting them.
        #[arg(long)]
        pad: bool,
    },
    /// Re-check an emitted certificate by replay.
    Verify { certificate: PathBuf },
    /// Generate a random complex or formula.
    Random {
        #[command(subcommand)]
        what: RandomWhat,
    },
    /// Sizes and homology of a complex.
    Info { input: PathBuf },
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct ShellMode {
    #[arg(long)]
    find_shelling: bool,
    #[arg(long)]
    hachimori: bool,
}

#[derive(Subcommand, Debug)]
enum RandomWhat {
    Complex {
        #[arg(long, default_value_t = 7)]
        vertices: usize,
        #[arg(long, default_value_t = 8)]
        triangles: usize,
        #[arg(long, default_value_t = 2)]
        loose_edges: usize,
        #[arg(long)]
        connected: bool,
    },
    Cnf {
        #[arg(long, default_value_t = 5)]
        vars: usize,
        #[arg(long, default_value_t = 10)]
        clauses: usize,
    },
}

/// Every JSON artifact carries a `kind` so `verify` can dispatch on it.
#[derive(Serialize, Deserialize, Debug)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum Artifact {
    Collapse(CollapseReport),
    Shelling(ShellReport),
    Hachimori(HachimoriReport),
    Plgcat(Box<PlgcatVerdictDoc>),
    Info(InfoReport),
}

#[derive(Serialize, Deserialize, Debug)]
struct CollapseReport {
    collapsible: bool,
    certificate: CollapseCertificateDoc,
}

#[derive(Serialize, Deserialize, Debug)]
struct ShellReport {
    complex: Vec<Vec<String>>,
    outcome: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    order: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    explored: Option<u64>,
}

#[derive(Serialize, Deserialize, Debug)]
struct HachimoriReport {
    complex: Vec<Vec<String>>,
    verdict: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    witness: Option<Vec<Vec<String>>>,
    /// Collapse of the complex with the witness removed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    collapse: Option<CollapseCertificateDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    reason: Option<String>,
}

#[derive(Serialize, Deserialize, Debug)]
struct InfoReport {
    vertices: usize,
    edges: usize,
    triangles: usize,
    dimension: Option<usize>,
    pure: bool,
    connected: bool,
    betti: [usize; 3],
    reduced_euler: i64,
    hash: String,
}

/// An error with the exit code it maps to.
struct Failure {
    code: i32,
    error: anyhow::Error,
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure {
            code: 2,
            error: e.into(),
        }
    }
}

type Outcome = std::result::Result<i32, Failure>;

pub fn main() -> i32 {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            f.code
        }
    }
}

fn run(cli: &Cli) -> Outcome {
    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
            .context("configuring worker threads")?;
    }
    match &cli.command {
        Command::Collapse { input } => cmd_collapse(cli, input),
        Command::Shell { input, mode } => cmd_shell(cli, input, mode),
        Command::Plgcat { input } => cmd_plgcat(cli, input),
        Command::Reduce { cnf, gadget, pad } => cmd_reduce(cli, cnf, gadget, *pad),
        Command::Verify { certificate } => cmd_verify(certificate),
        Command::Random { what } => cmd_random(cli, what),
        Command::Info { input } => cmd_info(cli, input),
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn emit_text(cli: &Cli, text: &str) -> Result<()> {
    if let Some(path) = &cli.out {
        fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    }
    if cli.out.is_none() || cli.json {
        print!("{text}");
    }
    Ok(())
}

fn emit(cli: &Cli, artifact: &Artifact) -> Result<()> {
    emit_text(cli, &to_json(artifact)?)
}

fn load(path: &Path) -> Result<LoadedComplex> {
    Ok(io::load(path)?)
}

fn cmd_collapse(cli: &Cli, input: &Path) -> Outcome {
    let k = load(input)?.complex;
    let v = is_collapsible(&k)?;
    emit(
        cli,
        &Artifact::Collapse(CollapseReport {
            collapsible: v.success,
            certificate: v.certificate.to_doc(&k),
        }),
    )?;
    eprintln!(
        "{}: {} ({} steps)",
        input.display(),
        if v.success {
            "collapsible"
        } else {
            "greedy collapse gets stuck"
        },
        v.certificate.steps.len()
    );
    Ok(if v.success { 0 } else { 1 })
}

fn describe_reason(k: &Complex2, r: &NoReason) -> String {
    match r {
        NoReason::NotConnected => "not connected".into(),
        NoReason::LinkDisconnected(v) => format!("link of {} is disconnected", k.label(*v)),
        NoReason::NegativeEuler(x) => format!("reduced Euler characteristic {x} is negative"),
        NoReason::NonzeroFirstHomology(b1) => format!("first Betti number {b1} is nonzero"),
        NoReason::NoWitnessExhaustive => "no removal set leaves a collapsible complex".into(),
    }
}

fn labels_of(k: &Complex2, ts: &[plcat::complex::TriangleId]) -> Vec<Vec<String>> {
    ts.iter().map(|&t| k.simplex_labels(Simplex::Triangle(t))).collect()
}

fn cmd_shell(cli: &Cli, input: &Path, mode: &ShellMode) -> Outcome {
    let k = load(input)?.complex;
    if mode.find_shelling {
        let search = find_shelling_bounded(&k, cli.budget)?;
        let (outcome, order, explored, code) = match &search {
            ShellingSearch::Found(o) => ("found", Some(o.to_labels(&k)), None, 0),
            ShellingSearch::NotShellable => ("not_shellable", None, None, 1),
            ShellingSearch::Unknown { explored } => ("unknown", None, Some(*explored), 1),
        };
        emit(
            cli,
            &Artifact::Shelling(ShellReport {
                complex: k.canonical_faces(),
                outcome: outcome.into(),
                order,
                explored,
            }),
        )?;
        eprintln!("{}: shelling {outcome}", input.display());
        return Ok(code);
    }
    let verdict = hachimori_criterion(&k, cli.budget);
    let mut report = HachimoriReport {
        complex: k.canonical_faces(),
        verdict: String::new(),
        witness: None,
        collapse: None,
        reason: None,
    };
    let code = match &verdict {
        HachimoriVerdict::Yes { witness } => {
            let rest = SubcomplexMask::full(&k).without_triangles(witness.iter().copied());
            let v = is_collapsible_sub(&k, &rest)?;
            report.verdict = "yes".into();
            report.witness = Some(labels_of(&k, witness));
            report.collapse = Some(v.certificate.to_doc(&k));
            0
        }
        HachimoriVerdict::No(r) => {
            report.verdict = "no".into();
            report.reason = Some(describe_reason(&k, r));
            1
        }
        HachimoriVerdict::Unknown { budget } => {
            report.verdict = "unknown".into();
            report.reason = Some(format!("search budget {budget} exhausted"));
            1
        }
    };
    eprintln!(
        "{}: Hachimori criterion {}{}",
        input.display(),
        report.verdict,
        report.reason.as_ref().map(|r| format!(" ({r})")).unwrap_or_default()
    );
    emit(cli, &Artifact::Hachimori(report))?;
    Ok(code)
}

fn cmd_plgcat(cli: &Cli, input: &Path) -> Outcome {
    let text = io::read_file(input)?;
    let enriched = if text.trim_start().starts_with('{') {
        let doc: ComplexDoc = serde_json::from_str(&text).context("parsing complex JSON")?;
        ComplexPlus::from_doc(&doc)
    } else {
        None
    };
    let (k, verdict) = match &enriched {
        Some(kp) => (kp.complex.clone(), plgcat_bounds_enriched(kp, cli.budget)?),
        None => {
            let k = io::parse_any(&text)?.complex;
            let v = plgcat_bounds(&k, cli.budget)?;
            (k, v)
        }
    };
    let doc = verdict.to_doc(&k);
    eprintln!(
        "{}: plgcat in [{}, {}]{}",
        input.display(),
        doc.interval[0],
        doc.interval[1],
        if enriched.is_some() { " (enriched input)" } else { "" }
    );
    emit(cli, &Artifact::Plgcat(Box::new(doc)))?;
    Ok(0)
}

fn cmd_reduce(cli: &Cli, cnf: &Path, gadget: &str, pad: bool) -> Outcome {
    let dir = cli.out.as_ref().ok_or_else(|| anyhow!("reduce needs --out DIR"))?;
    let formula = parse_dimacs(&io::read_file(cnf)?, pad)?;
    let source = if gadget == "toy" {
        GadgetSource::Toy
    } else {
        GadgetSource::Loaded(Box::new(GadgetComplex::from_loaded(load(Path::new(gadget))?, gadget)?))
    };
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let write = |name: &str, text: String| -> Result<()> {
        let path = dir.join(name);
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
    };
    match pipeline(&formula, source) {
        Ok(out) => {
            let report = serde_json::json!({
                "kind": "gadget_report",
                "passed": true,
                "checks": out.report.checks,
                "metadata": out.metadata,
            });
            let report = to_json(&report)?;
            write("gadget.json", to_json(&out.gadget.to_doc())?)?;
            write("enriched.json", to_json(&out.enriched.to_doc())?)?;
            write("report.json", report.clone())?;
            write("timings.json", to_json(&out.timings)?)?;
            if cli.json {
                print!("{report}");
            }
            let m = &out.metadata;
            eprintln!(
                "{} variables, {} clauses; gadget {} triangles, enriched {} vertices {} triangles; written to {}",
                m.num_vars,
                m.num_clauses,
                m.gadget_triangles,
                m.enriched_vertices,
                m.enriched_triangles,
                dir.display()
            );
            Ok(0)
        }
        Err(ReductionError::ContractViolation(report)) => {
            let doc = serde_json::json!({
                "kind": "gadget_report",
                "passed": false,
                "checks": report.checks,
            });
            write("report.json", to_json(&doc)?)?;
            Err(Failure {
                code: 3,
                error: anyhow!("gadget contract violated: {}", report.failures().join("; ")),
            })
        }
        Err(e) => Err(e.into()),
    }
}

fn check_collapse_doc(doc: &CollapseCertificateDoc, expected_start: &Complex2) -> Result<bool> {
    let (start, cert) = doc.verify()?;
    if start.canonical_faces() != expected_start.canonical_faces() {
        bail!("collapse certificate starts at the wrong complex");
    }
    Ok(cert.reaches_point())
}

fn verify_artifact(artifact: &Artifact) -> Result<String> {
    match artifact {
        Artifact::Collapse(r) => {
            let (_, cert) = r.certificate.verify()?;
            if cert.reaches_point() != r.collapsible {
                bail!("residual does not match the claimed verdict");
            }
            Ok(format!("collapse certificate replays ({} steps)", cert.steps.len()))
        }
        Artifact::Shelling(r) => {
            let Some(order) = &r.order else {
                return Ok(format!("verdict {:?} carries no certificate", r.outcome));
            };
            let k = Complex2::from_maximal_faces(&r.complex)?;
            let ids = order
                .iter()
                .map(|t| match k.find_simplex(t) {
                    Some(Simplex::Triangle(id)) => Ok(id),
                    _ => Err(anyhow!("unknown triangle {t:?}")),
                })
                .collect::<Result<Vec<_>>>()?;
            let check = verify_shelling(&k, &ShellingOrder(ids))?;
            if !check.valid {
                bail!("shelling fails at position {:?}", check.first_violation);
            }
            Ok(format!("shelling of {} triangles is valid", order.len()))
        }
        Artifact::Hachimori(r) => {
            let (Some(witness), Some(collapse)) = (&r.witness, &r.collapse) else {
                return Ok(format!("verdict {:?} carries no certificate", r.verdict));
            };
            let k = Complex2::from_maximal_faces(&r.complex)?;
            if k.vertex_ids().any(|v| !k.link_graph(v).is_connected()) {
                bail!("a vertex link is disconnected");
            }
            if witness.len() as i64 != k.reduced_euler()? {
                bail!("witness size differs from the reduced Euler characteristic");
            }
            let rest = SubcomplexMask::full(&k).without_triangles(witness.iter().map(|t| match k.find_simplex(t) {
                Some(Simplex::Triangle(id)) => id,
                _ => plcat::complex::TriangleId(usize::MAX),
            }));
            if rest.num_triangles() + witness.len() != k.num_triangles() {
                bail!("witness names unknown or repeated triangles");
            }
            if !check_collapse_doc(collapse, &rest.to_complex(&k))? {
                bail!("complement of the witness does not collapse to a point");
            }
            Ok(format!("Hachimori witness of {} triangles verified", witness.len()))
        }
        Artifact::Plgcat(doc) => {
            if let Some(c) = &doc.collapse_certificate {
                let (start, cert) = c.verify()?;
                if start.content_hash() != doc.complex_hash || !cert.reaches_point() {
                    bail!("collapse certificate does not collapse the complex to a point");
                }
            }
            if let Some(c) = &doc.cover_certificate {
                c.verify()?;
                let covered = match &c.subdivision {
                    Some(m) => Complex2::from_maximal_faces(&m.parent)?,
                    None => Complex2::from_maximal_faces(&c.complex)?,
                };
                if covered.content_hash() != doc.complex_hash {
                    bail!("cover certificate is for a different complex");
                }
            }
            Ok(format!("plgcat certificate for interval {:?} verified", doc.interval))
        }
        Artifact::Info(_) => Ok("info reports carry no certificate".into()),
    }
}

fn cmd_verify(path: &Path) -> Outcome {
    let text = io::read_file(path)?;
    let artifact: Artifact = serde_json::from_str(&text).context("parsing certificate")?;
    match verify_artifact(&artifact) {
        Ok(msg) => {
            eprintln!("{}: {msg}", path.display());
            Ok(0)
        }
        Err(e) => Err(Failure { code: 1, error: e }),
    }
}

fn cmd_random(cli: &Cli, what: &RandomWhat) -> Outcome {
    let mut rng = seeded(cli.seed);
    match *what {
        RandomWhat::Complex {
            vertices,
            triangles,
            loose_edges,
            connected,
        } => {
            let p = RandomComplexParams {
                max_vertices: vertices,
                max_triangles: triangles,
                max_loose_edges: loose_edges,
            };
            let k = if connected {
                random_connected_complex(&mut rng, p)
            } else {
                random_complex(&mut rng, p)
            };
            emit_text(cli, &to_json(&ComplexDoc::from_complex(&k))?)?;
        }
        RandomWhat::Cnf { vars, clauses } => {
            if vars < 3 {
                return Err(anyhow!("random formulas need at least 3 variables").into());
            }
            emit_text(cli, &to_dimacs(&random_formula(&mut rng, vars, clauses)))?;
        }
    }
    Ok(0)
}

fn cmd_info(cli: &Cli, input: &Path) -> Outcome {
    let k = load(input)?.complex;
    let b = betti(&k);
    let report = InfoReport {
        vertices: k.num_vertices(),
        edges: k.num_edges(),
        triangles: k.num_triangles(),
        dimension: k.dimension(),
        pure: k.is_pure().unwrap_or(false),
        connected: k.is_connected(),
        betti: [b.b0, b.b1, b.b2],
        reduced_euler: k.reduced_euler()?,
        hash: k.content_hash(),
    };
    eprintln!(
        "{}: {} vertices, {} edges, {} triangles, Betti {:?}",
        input.display(),
        report.vertices,
        report.edges,
        report.triangles,
        report.betti
    );
    emit(cli, &Artifact::Info(report))?;
    Ok(0)
}
