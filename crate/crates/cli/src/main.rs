//! Command-line driver: parse a triangulation, solve the gluing and
//! completeness equations, develop the solution into boundary coordinates,
//! extract the face-pairing matrices, and print everything as a
//! deterministic `section.key = value` report.

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cusped::developing::{develop, DevelopingMap};
use cusped::ext::ExtC;
use cusped::holonomy::{canonical_sign, face_pairings, holonomy_report, FacePairing};
use cusped::report::{
    parse_complex, parse_ext, render, total_volume, CompareSummary, DevelopSummary, MeridianLine,
    PairingSummary, PipelineReport, PresentationSummary, RelationLine, SolveSummary, TriSummary,
};
use cusped::solver::{solve, SolveError, SolveReport, SolverConfig};
use cusped::triangulation::{
    cusp_classes, edge_classes, parse_cusp_curves, parse_triangulation, Triangulation,
};
use cusped::wirtinger::{
    abelianization, commutator, eliminate_generator, parse_crossing_list, wirtinger_presentation,
    GroupWord, Presentation,
};
use cusped::C;

#[derive(Parser)]
#[command(name = "cusped", version, about = "Ideal triangulation solver for cusped hyperbolic 3-manifolds")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct SolveArgs {
    /// Cusp curve file (two curves per cusp).
    #[arg(long)]
    curves: PathBuf,
    /// Residual 2-norm below which the iteration stops.
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    /// Cap on accepted Newton steps.
    #[arg(long, default_value_t = 100)]
    max_iters: usize,
    /// Uniform initial shape for every tetrahedron, e.g. `0.5+0.8i`.
    #[arg(long)]
    seed: Option<String>,
    /// Decimal digits in the printed report.
    #[arg(long, default_value_t = 9)]
    precision: usize,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse a triangulation file and print tetrahedron/edge/cusp counts.
    Validate {
        /// Triangulation file.
        tri: PathBuf,
    },
    /// Solve for the tetrahedron shapes and print them.
    Solve {
        tri: PathBuf,
        #[command(flatten)]
        args: SolveArgs,
    },
    /// Solve, then print the total hyperbolic volume.
    Volume {
        tri: PathBuf,
        #[command(flatten)]
        args: SolveArgs,
    },
    /// Solve, then print the developed boundary coordinates.
    Develop {
        tri: PathBuf,
        #[command(flatten)]
        args: SolveArgs,
        /// Tetrahedron placed at (0, inf, z, 1).
        #[arg(long, default_value_t = 0)]
        anchor: usize,
    },
    /// Solve and develop, then print the face-pairing matrices.
    Holonomy {
        tri: PathBuf,
        #[command(flatten)]
        args: SolveArgs,
        #[arg(long, default_value_t = 0)]
        anchor: usize,
    },
    /// Print the link-group presentation of a crossing list.
    Wirtinger {
        /// Link crossing-list file.
        link: PathBuf,
        /// Remove a generator, e.g. `d=b a b^-1`; repeatable, applied in order.
        #[arg(long, value_name = "G=WORD")]
        eliminate: Vec<String>,
    },
    /// Run the whole pipeline and print every section.
    Report {
        tri: PathBuf,
        #[command(flatten)]
        args: SolveArgs,
        #[arg(long, default_value_t = 0)]
        anchor: usize,
        /// Link crossing-list file; adds the presentation section.
        #[arg(long)]
        link: Option<PathBuf>,
        #[arg(long, value_name = "G=WORD")]
        eliminate: Vec<String>,
        /// Reference coordinate table; adds the compare section.
        #[arg(long)]
        compare_table: Option<PathBuf>,
    },
}

/// Stderr message plus process exit code (1 = bad input, 2 = solver failure).
type Failure = (u8, String);

struct Outcome {
    stdout: String,
    code: u8,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(out) => {
            print!("{}", out.stdout);
            ExitCode::from(out.code)
        }
        Err((code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| (1, format!("{}: {e}", path.display())))
}

fn cite<E: std::fmt::Display>(path: &Path) -> impl Fn(E) -> Failure + '_ {
    move |e| (1, format!("{}: {e}", path.display()))
}

fn run(cmd: Cmd) -> Result<Outcome, Failure> {
    match cmd {
        Cmd::Validate { tri } => {
            let (t, summary) = load_triangulation(&tri)?;
            let _ = t;
            let stdout = format!(
                "tets = {}\nedges = {}\ncusps = {}\n",
                summary.tets, summary.edges, summary.cusps
            );
            Ok(Outcome { stdout, code: 0 })
        }
        Cmd::Solve { tri, args } => {
            let (stage, report) = solved_report(&tri, &args)?;
            let _ = stage;
            Ok(Outcome { stdout: render(&report, args.precision), code: 0 })
        }
        Cmd::Volume { tri, args } => {
            let (stage, mut report) = solved_report(&tri, &args)?;
            report.volume = Some(total_volume(&stage.solved.shapes).map_err(|e| (1, e.to_string()))?);
            Ok(Outcome { stdout: render(&report, args.precision), code: 0 })
        }
        Cmd::Develop { tri, args, anchor } => {
            let (stage, mut report) = solved_report(&tri, &args)?;
            let dev = develop(&stage.t, &stage.solved.shapes, anchor).map_err(|e| (1, e.to_string()))?;
            report.develop = Some(develop_summary(&dev));
            Ok(Outcome { stdout: render(&report, args.precision), code: 0 })
        }
        Cmd::Holonomy { tri, args, anchor } => {
            let (stage, mut report) = solved_report(&tri, &args)?;
            let dev = develop(&stage.t, &stage.solved.shapes, anchor).map_err(|e| (1, e.to_string()))?;
            report.develop = Some(develop_summary(&dev));
            fill_holonomy(&stage.t, &dev, &mut report)?;
            Ok(Outcome { stdout: render(&report, args.precision), code: 0 })
        }
        Cmd::Wirtinger { link, eliminate } => {
            let presentation = link_presentation(&link, &eliminate)?;
            let report =
                PipelineReport { presentation: Some(presentation), ..Default::default() };
            Ok(Outcome { stdout: render(&report, 9), code: 0 })
        }
        Cmd::Report { tri, args, anchor, link, eliminate, compare_table } => {
            let (stage, mut report) = solved_report(&tri, &args)?;
            let dev = develop(&stage.t, &stage.solved.shapes, anchor).map_err(|e| (1, e.to_string()))?;
            report.develop = Some(develop_summary(&dev));
            fill_holonomy(&stage.t, &dev, &mut report)?;
            report.volume = Some(total_volume(&stage.solved.shapes).map_err(|e| (1, e.to_string()))?);
            if let Some(link) = link {
                report.presentation = Some(link_presentation(&link, &eliminate)?);
            }
            let mut code = 0;
            if let Some(table) = compare_table {
                let summary = compare_with_table(&table, &dev)?;
                let mismatches = summary.rows.iter().filter(|(_, ok)| !ok).count();
                if mismatches > 0 {
                    eprintln!("error: {}: {mismatches} row(s) differ", table.display());
                    code = 1;
                }
                report.compare = Some(summary);
            }
            Ok(Outcome { stdout: render(&report, args.precision), code })
        }
    }
}

fn load_triangulation(path: &Path) -> Result<(Triangulation, TriSummary), Failure> {
    let t = parse_triangulation(&read(path)?).map_err(cite(path))?;
    let edges = edge_classes(&t).map_err(cite(path))?;
    let cusps = cusp_classes(&t);
    let summary = TriSummary { tets: t.n_tets, edges: edges.len(), cusps: cusps.len() };
    Ok((t, summary))
}

struct SolvedStage {
    t: Triangulation,
    solved: SolveReport,
}

fn solved_report(tri: &Path, args: &SolveArgs) -> Result<(SolvedStage, PipelineReport), Failure> {
    let (t, summary) = load_triangulation(tri)?;
    let curves = parse_cusp_curves(&read(&args.curves)?, &t).map_err(cite(&args.curves))?;
    let sys = cusped::equations::build_system(&t, &curves).map_err(|e| (1, e.to_string()))?;
    let mut cfg = SolverConfig { tol: args.tol, max_iters: args.max_iters, ..Default::default() };
    if let Some(text) = &args.seed {
        let z = parse_complex(text)
            .ok_or_else(|| (1, format!("--seed `{text}` is not a complex number")))?;
        cfg.initial = Some(vec![z; t.n_tets]);
    }
    let solved = solve(&sys, &cfg).map_err(|e| {
        let code = match e {
            SolveError::NoConvergence { .. } | SolveError::StepCollapse { .. } => 2,
            _ => 1,
        };
        (code, e.to_string())
    })?;
    let report = PipelineReport {
        triangulation: Some(summary),
        solve: Some(SolveSummary {
            iterations: solved.iterations,
            residual: solved.final_residual,
            geometric: solved.geometric,
        }),
        shapes: Some(solved.shapes.z_values()),
        ..Default::default()
    };
    Ok((SolvedStage { t, solved }, report))
}

fn develop_summary(dev: &DevelopingMap) -> DevelopSummary {
    DevelopSummary { anchor: dev.anchor, coords: dev.tets.iter().map(|t| t.coords).collect() }
}

/// Meridian and relation words for the bundled three-cusp fixture, spelled
/// over face-pairing keys. Only used when all three keys are present.
const BUILTIN_KEYS: [&str; 3] = ["3-4", "1f3-6f0", "0f2-5f1"];

fn builtin_words(pairings: &[FacePairing]) -> (Vec<(usize, GroupWord)>, Vec<GroupWord>, Vec<String>) {
    let keys: HashSet<&str> =
        pairings.iter().filter(|p| !p.trivial).map(|p| p.key.as_str()).collect();
    if !BUILTIN_KEYS.iter().all(|k| keys.contains(k)) {
        return (Vec::new(), Vec::new(), Vec::new());
    }
    let g34 = GroupWord::generator("3-4");
    let g16 = GroupWord::generator("1f3-6f0");
    let g05 = GroupWord::generator("0f2-5f1");
    let meridians = vec![(0, g34.clone()), (1, g16.inverse()), (2, g05.inverse())];
    let relations = vec![
        commutator(&g16, &commutator(&g34.inverse(), &g05)),
        commutator(&g05.inverse(), &commutator(&g34, &g16.inverse())),
    ];
    let displays = vec![
        "comm(1f3-6f0, comm(3-4^-1, 0f2-5f1))".to_string(),
        "comm(0f2-5f1^-1, comm(3-4, 1f3-6f0^-1))".to_string(),
    ];
    (meridians, relations, displays)
}

fn fill_holonomy(
    t: &Triangulation,
    dev: &DevelopingMap,
    report: &mut PipelineReport,
) -> Result<(), Failure> {
    let pairings = face_pairings(t, dev).map_err(|e| (1, e.to_string()))?;
    let (meridians, relations, displays) = builtin_words(&pairings);
    let hol = holonomy_report(t, dev, &meridians, &relations).map_err(|e| (1, e.to_string()))?;
    let nontrivial: Vec<(String, [C; 4])> = hol
        .pairings
        .iter()
        .filter(|p| !p.trivial)
        .map(|p| (p.key.clone(), canonical_sign(&p.map)))
        .collect();
    let identity_count = hol.pairings.iter().filter(|p| p.trivial).count();
    report.pairings = Some(PairingSummary { nontrivial, identity_count });
    if !hol.generators.is_empty() {
        report.meridians = Some(
            hol.generators
                .iter()
                .map(|g| MeridianLine {
                    cusp: g.cusp,
                    word: g.word.to_string(),
                    entries: canonical_sign(&g.map),
                })
                .collect(),
        );
    }
    if !hol.relation_residuals.is_empty() {
        report.relations = Some(
            hol.relation_residuals
                .iter()
                .zip(displays)
                .map(|(r, word)| RelationLine { word, residual: r.residual })
                .collect(),
        );
    }
    Ok(())
}

fn link_presentation(path: &Path, eliminations: &[String]) -> Result<PresentationSummary, Failure> {
    let crossings = parse_crossing_list(&read(path)?).map_err(cite(path))?;
    let mut p: Presentation = wirtinger_presentation(&crossings).map_err(cite(path))?;
    for step in eliminations {
        let (g, word) = step
            .split_once('=')
            .ok_or_else(|| (1, format!("--eliminate expects G=WORD, got `{step}`")))?;
        let defn = GroupWord::parse(word).map_err(|e| (1, e.to_string()))?;
        p = eliminate_generator(&p, g.trim(), &defn).map_err(|e| (1, e.to_string()))?;
    }
    let (rank, torsion) = abelianization(&p);
    Ok(PresentationSummary {
        generators: p.generators.clone(),
        relators: p.relators.iter().map(|r| r.to_string()).collect(),
        rank,
        torsion,
    })
}

/// Reference table grammar: `row <tet> <v0> <v1> <v2> <v3>` per line, with
/// blank lines and `#` comments skipped; entries use the report's complex
/// grammar with `inf` for the point at infinity.
fn compare_with_table(path: &Path, dev: &DevelopingMap) -> Result<CompareSummary, Failure> {
    let text = read(path)?;
    let mut rows = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fail = |msg: String| (1u8, format!("{}:{}: {msg}", path.display(), idx + 1));
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 6 || fields[0] != "row" {
            return Err(fail("expected `row <tet> <v0> <v1> <v2> <v3>`".to_string()));
        }
        let tet: usize =
            fields[1].parse().map_err(|_| fail(format!("bad tetrahedron index `{}`", fields[1])))?;
        if tet >= dev.tets.len() {
            return Err(fail(format!("tetrahedron {tet} out of range (have {})", dev.tets.len())));
        }
        let mut ok = true;
        for (v, field) in fields[2..].iter().enumerate() {
            let expected =
                parse_ext(field).ok_or_else(|| fail(format!("bad coordinate `{field}`")))?;
            ok &= dev.tets[tet].coords[v].chordal(expected) < 1e-9;
        }
        rows.push((tet, ok));
    }
    let note = (dev.tets.len() > 1
        && dev.tets[1].coords[0].chordal(ExtC::finite(-1.0, 0.0)) < 1e-9)
        .then(|| {
            "coordinate (1,0): -1 agrees with the tetrahedron's cross-ratio; the variant -1+1i does not"
                .to_string()
        });
    Ok(CompareSummary { rows, note })
}
