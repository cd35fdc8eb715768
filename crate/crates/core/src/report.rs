//! Rendering pipeline results as a deterministic line-oriented text document.
//!
//! Every line has the form `section.key = value`. Complex numbers print in
//! fixed-point `<re><+|-><im>i` form (no scientific notation) so that reports
//! diff cleanly and golden files stay byte-stable; the point at infinity
//! prints as `inf`.

use std::fmt::Write as _;

use crate::ext::ExtC;
use crate::shapes::{tet_volume, ShapeAssignment, ShapeError};
use crate::C;

/// Default number of decimal digits in rendered reports.
pub const DEFAULT_PRECISION: usize = 9;

/// Sum of the volumes of all tetrahedra in the assignment.
///
/// An empty assignment has volume 0; a non-geometric shape is an error.
pub fn total_volume(shapes: &ShapeAssignment) -> Result<f64, ShapeError> {
    let mut sum = 0.0;
    for t in shapes.triples() {
        sum += tet_volume(t)?;
    }
    Ok(sum)
}

/// Fixed-point decimal with `digits` fractional digits. A value that rounds
/// to zero loses its sign, so `-1e-12` at 9 digits prints `0.000000000`.
pub fn fmt_f64(x: f64, digits: usize) -> String {
    let s = format!("{x:.digits$}");
    if let Some(rest) = s.strip_prefix('-') {
        if rest.bytes().all(|b| b == b'0' || b == b'.') {
            return rest.to_string();
        }
    }
    s
}

/// `<re><+|-><im>i`, e.g. `0.500+0.500i` at 3 digits.
pub fn fmt_complex(z: C, digits: usize) -> String {
    let re = fmt_f64(z.re, digits);
    let im = fmt_f64(z.im, digits);
    if im.starts_with('-') {
        format!("{re}{im}i")
    } else {
        format!("{re}+{im}i")
    }
}

/// Like [`fmt_complex`], with the point at infinity rendered as `inf`.
pub fn fmt_ext(value: ExtC, digits: usize) -> String {
    match value.as_finite() {
        Some(z) => fmt_complex(z, digits),
        None => "inf".to_string(),
    }
}

/// Parse the compact complex grammar used by the report format and by CLI
/// flags: `1`, `-2.5`, `i`, `-i`, `2i`, `1+2i`, `0.500-0.500i`.
pub fn parse_complex(text: &str) -> Option<C> {
    let s = text.trim();
    if s.is_empty() {
        return None;
    }
    let Some(body) = s.strip_suffix('i') else {
        return s.parse().ok().map(|re| C::new(re, 0.0));
    };
    let bytes = body.as_bytes();
    let mut split = None;
    for k in (1..bytes.len()).rev() {
        if matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E') {
            split = Some(k);
            break;
        }
    }
    let unit = |part: &str| match part {
        "" | "+" => Some(1.0),
        "-" => Some(-1.0),
        _ => part.parse().ok(),
    };
    match split {
        Some(k) => {
            let re: f64 = body[..k].parse().ok()?;
            let im = unit(&body[k..])?;
            Some(C::new(re, im))
        }
        None => unit(body).map(|im| C::new(0.0, im)),
    }
}

/// [`parse_complex`] extended with `inf` for the point at infinity.
pub fn parse_ext(text: &str) -> Option<ExtC> {
    if text.trim() == "inf" {
        Some(ExtC::Infinity)
    } else {
        parse_complex(text).map(ExtC::Finite)
    }
}

/// Counts from the parsed triangulation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TriSummary {
    pub tets: usize,
    pub edges: usize,
    pub cusps: usize,
}

/// Newton outcome, without the shape vector (that gets its own section).
#[derive(Clone, Debug, PartialEq)]
pub struct SolveSummary {
    pub iterations: usize,
    pub residual: f64,
    pub geometric: bool,
}

/// Boundary coordinates per tetrahedron, plus the anchor they are based at.
#[derive(Clone, Debug, PartialEq)]
pub struct DevelopSummary {
    pub anchor: usize,
    pub coords: Vec<[ExtC; 4]>,
}

/// Non-identity face-pairing matrices, keyed as rendered, plus the count of
/// pairings that came out as the identity.
#[derive(Clone, Debug, PartialEq)]
pub struct PairingSummary {
    pub nontrivial: Vec<(String, [C; 4])>,
    pub identity_count: usize,
}

/// A cusp meridian: the word in pairing keys and its evaluated matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct MeridianLine {
    pub cusp: usize,
    pub word: String,
    pub entries: [C; 4],
}

/// A group relation and how far its evaluation is from plus or minus the
/// identity.
#[derive(Clone, Debug, PartialEq)]
pub struct RelationLine {
    pub word: String,
    pub residual: f64,
}

/// A finitely presented group together with its abelianization.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PresentationSummary {
    pub generators: Vec<String>,
    pub relators: Vec<String>,
    pub rank: usize,
    pub torsion: Vec<u64>,
}

/// Row-by-row verdicts from comparing developed coordinates against a
/// reference table, with an optional explanatory note.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompareSummary {
    pub rows: Vec<(usize, bool)>,
    pub note: Option<String>,
}

/// Everything a pipeline run may want to print. Each section is present
/// exactly when the corresponding stage ran.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PipelineReport {
    pub triangulation: Option<TriSummary>,
    pub solve: Option<SolveSummary>,
    pub shapes: Option<Vec<C>>,
    pub develop: Option<DevelopSummary>,
    pub pairings: Option<PairingSummary>,
    pub meridians: Option<Vec<MeridianLine>>,
    pub relations: Option<Vec<RelationLine>>,
    pub volume: Option<f64>,
    pub presentation: Option<PresentationSummary>,
    pub compare: Option<CompareSummary>,
}

fn push_matrix(out: &mut String, prefix: &str, entries: &[C; 4], digits: usize) {
    for (name, entry) in ["a", "b", "c", "d"].iter().zip(entries) {
        let _ = writeln!(out, "{prefix}.{name} = {}", fmt_complex(*entry, digits));
    }
}

/// Render the report with `digits` decimal digits. Identical reports render
/// to byte-identical text.
pub fn render(r: &PipelineReport, digits: usize) -> String {
    let mut out = String::new();
    if let Some(t) = &r.triangulation {
        let _ = writeln!(out, "triangulation.tets = {}", t.tets);
        let _ = writeln!(out, "triangulation.edges = {}", t.edges);
        let _ = writeln!(out, "triangulation.cusps = {}", t.cusps);
    }
    if let Some(s) = &r.solve {
        let _ = writeln!(out, "solve.iterations = {}", s.iterations);
        let _ = writeln!(out, "solve.residual = {}", fmt_f64(s.residual, digits));
        let _ = writeln!(out, "solve.geometric = {}", s.geometric);
    }
    if let Some(zs) = &r.shapes {
        for (t, z) in zs.iter().enumerate() {
            let _ = writeln!(out, "shape.{t} = {}", fmt_complex(*z, digits));
        }
    }
    if let Some(d) = &r.develop {
        let _ = writeln!(out, "develop.anchor = {}", d.anchor);
        for (t, row) in d.coords.iter().enumerate() {
            for (v, zeta) in row.iter().enumerate() {
                let _ = writeln!(out, "develop.{t}.{v} = {}", fmt_ext(*zeta, digits));
            }
        }
    }
    if let Some(p) = &r.pairings {
        for (key, entries) in &p.nontrivial {
            push_matrix(&mut out, &format!("pairing.{key}"), entries, digits);
        }
        let _ = writeln!(out, "holonomy.identity_pairings = {}", p.identity_count);
    }
    if let Some(ms) = &r.meridians {
        for m in ms {
            let _ = writeln!(out, "meridian.{}.word = {}", m.cusp, m.word);
            push_matrix(&mut out, &format!("meridian.{}", m.cusp), &m.entries, digits);
        }
    }
    if let Some(rels) = &r.relations {
        for (i, rel) in rels.iter().enumerate() {
            let _ = writeln!(out, "relation.{i}.word = {}", rel.word);
            let _ = writeln!(out, "relation.{i}.residual = {}", fmt_f64(rel.residual, digits));
        }
    }
    if let Some(vol) = r.volume {
        let _ = writeln!(out, "volume.total = {}", fmt_f64(vol, digits));
    }
    if let Some(p) = &r.presentation {
        let _ = writeln!(out, "presentation.generators = {}", p.generators.join(" "));
        for (i, rel) in p.relators.iter().enumerate() {
            let _ = writeln!(out, "presentation.relator.{i} = {rel}");
        }
        let mut ab = format!("rank {}", p.rank);
        if !p.torsion.is_empty() {
            let ds: Vec<String> = p.torsion.iter().map(|d| d.to_string()).collect();
            let _ = write!(ab, " torsion {}", ds.join(" "));
        }
        let _ = writeln!(out, "presentation.abelianization = {ab}");
    }
    if let Some(c) = &r.compare {
        for (row, ok) in &c.rows {
            let verdict = if *ok { "ok" } else { "MISMATCH" };
            let _ = writeln!(out, "compare.{row} = {verdict}");
        }
        if let Some(note) = &c.note {
            let _ = writeln!(out, "compare.note = {note}");
        }
    }
    out
}
