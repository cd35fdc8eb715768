//! Data model, parser, validator, and orbit computations for ideal
//! triangulations and cusp curves.
//!
//! File format (line oriented, `#` comments): a header `tetrahedra N`
//! followed by lines `glue A f B g p0p1p2p3`, meaning face `f` of tetrahedron
//! `A` attaches to face `g` of tetrahedron `B` by the vertex bijection
//! i ↦ pᵢ. Faces are indexed by their opposite vertex. Each geometric pairing
//! appears once; the reverse direction (with the inverse permutation) is
//! implied. Optional `label T name` lines attach display names.

use crate::shapes::Corner;
use std::collections::HashMap;
use thiserror::Error;

/// The six edges of a tetrahedron as sorted vertex pairs, in scan order.
pub const EDGES: [[usize; 2]; 6] = [[0, 1], [0, 2], [0, 3], [1, 2], [1, 3], [2, 3]];

#[derive(Debug, Error)]
pub enum TriError {
    #[error("line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("line {line}: permutation sends vertex {face_a} to {got}, not to glued face {face_b}")]
    FaceToFace { line: usize, face_a: usize, face_b: usize, got: usize },
    #[error("line {line}: {detail}")]
    NonInvolutive { line: usize, detail: String },
    #[error("face {face} of tetrahedron {tet} is unglued")]
    Unglued { tet: usize, face: usize },
    #[error("edge cycle at tetrahedron {tet}, edge ({},{}) does not close", edge[0], edge[1])]
    NonClosingEdgeCycle { tet: usize, edge: [usize; 2] },
    #[error("line {line}: {msg}")]
    Curve { line: usize, msg: String },
}

/// One face identification as written in the input.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Gluing {
    pub tet_a: usize,
    pub face_a: usize,
    pub tet_b: usize,
    pub face_b: usize,
    /// Vertex image list: vertex i of `tet_a` maps to `perm[i]` of `tet_b`.
    pub perm: [usize; 4],
}

/// Directed attachment record for one (tet, face) slot.
#[derive(Clone, Copy, Debug)]
pub struct Attach {
    pub tet: usize,
    pub face: usize,
    /// Vertex map from the slot's tetrahedron into `tet`.
    pub perm: [usize; 4],
    /// Index into [`Triangulation::gluings`] this direction came from.
    pub gluing: usize,
}

#[derive(Clone, Debug)]
pub struct Triangulation {
    pub n_tets: usize,
    pub gluings: Vec<Gluing>,
    pub labels: Vec<Option<String>>,
    attach: Vec<[Attach; 4]>,
}

fn invert(p: [usize; 4]) -> [usize; 4] {
    let mut q = [0; 4];
    for i in 0..4 {
        q[p[i]] = i;
    }
    q
}

/// The two vertices of a tetrahedron not on the given edge (equivalently,
/// the two faces containing it), ascending.
fn off_edge(e: [usize; 2]) -> [usize; 2] {
    let mut out = [usize::MAX; 2];
    let mut k = 0;
    for v in 0..4 {
        if v != e[0] && v != e[1] {
            out[k] = v;
            k += 1;
        }
    }
    out
}

impl Triangulation {
    /// Where (and how) face `face` of tetrahedron `tet` is attached.
    pub fn attachment(&self, tet: usize, face: usize) -> &Attach {
        &self.attach[tet][face]
    }

    /// Canonical text form; `parse_triangulation` of the output reproduces
    /// the same data model.
    pub fn serialize(&self) -> String {
        let mut out = format!("tetrahedra {}\n", self.n_tets);
        for (i, lab) in self.labels.iter().enumerate() {
            if let Some(lab) = lab {
                out.push_str(&format!("label {i} {lab}\n"));
            }
        }
        for g in &self.gluings {
            out.push_str(&format!(
                "glue {} {} {} {} {}{}{}{}\n",
                g.tet_a, g.face_a, g.tet_b, g.face_b, g.perm[0], g.perm[1], g.perm[2], g.perm[3]
            ));
        }
        out
    }
}

/// One tetrahedron edge inside an edge class, with its corner invariant.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EdgeUse {
    pub tet: usize,
    pub edge: [usize; 2],
    pub corner: Corner,
}

/// A cycle of tetrahedron edges identified to a single edge of the manifold.
#[derive(Clone, Debug)]
pub struct EdgeClass {
    pub members: Vec<EdgeUse>,
}

/// An orbit of ideal vertices; one per cusp.
#[derive(Clone, Debug)]
pub struct CuspClass {
    pub index: usize,
    pub members: Vec<(usize, usize)>,
}

/// One step of a boundary curve: corner invariant `corner` of tetrahedron
/// `tet` at ideal vertex `vertex`, with exponent `eps` ∈ {+1, −1}.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CurveStep {
    pub tet: usize,
    pub vertex: usize,
    pub corner: Corner,
    pub eps: i8,
}

/// A closed loop on a cusp torus, encoded by the corner invariants its
/// holonomy picks up.
#[derive(Clone, Debug)]
pub struct CuspCurve {
    pub cusp: usize,
    pub name: String,
    pub steps: Vec<CurveStep>,
}

struct Tok<'a> {
    s: &'a str,
    col: usize,
}

fn tokenize(line: &str) -> Vec<Tok<'_>> {
    let body = match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    };
    let mut toks = Vec::new();
    let mut start = None;
    for (i, ch) in body.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                toks.push(Tok { s: &body[s..i], col: s + 1 });
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        toks.push(Tok { s: &body[s..], col: s + 1 });
    }
    toks
}

fn syntax(line: usize, col: usize, msg: impl Into<String>) -> TriError {
    TriError::Syntax { line, col, msg: msg.into() }
}

fn parse_index(tok: &Tok, line: usize, what: &str, bound: usize) -> Result<usize, TriError> {
    let v: usize = tok
        .s
        .parse()
        .map_err(|_| syntax(line, tok.col, format!("expected {what}, found `{}`", tok.s)))?;
    if v >= bound {
        return Err(syntax(line, tok.col, format!("{what} {v} out of range (< {bound})")));
    }
    Ok(v)
}

/// Parse and validate a triangulation document.
pub fn parse_triangulation(text: &str) -> Result<Triangulation, TriError> {
    let mut n_tets: Option<usize> = None;
    let mut gluings: Vec<Gluing> = Vec::new();
    let mut labels: Vec<Option<String>> = Vec::new();
    let mut attach: Vec<[Option<(Attach, usize)>; 4]> = Vec::new(); // slot -> (record, line)

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let toks = tokenize(raw);
        if toks.is_empty() {
            continue;
        }
        match toks[0].s {
            "tetrahedra" => {
                if n_tets.is_some() {
                    return Err(syntax(line, toks[0].col, "duplicate `tetrahedra` header"));
                }
                if toks.len() != 2 {
                    return Err(syntax(line, toks[0].col, "usage: tetrahedra <N>"));
                }
                let n = toks[1].s.parse().map_err(|_| {
                    syntax(line, toks[1].col, format!("expected a count, found `{}`", toks[1].s))
                })?;
                n_tets = Some(n);
                labels = vec![None; n];
                attach = vec![[None; 4]; n];
            }
            "glue" => {
                let n = n_tets
                    .ok_or_else(|| syntax(line, toks[0].col, "`glue` before `tetrahedra` header"))?;
                if toks.len() != 6 {
                    return Err(syntax(line, toks[0].col, "usage: glue <A> <f> <B> <g> <p0p1p2p3>"));
                }
                let tet_a = parse_index(&toks[1], line, "tetrahedron index", n)?;
                let face_a = parse_index(&toks[2], line, "face index", 4)?;
                let tet_b = parse_index(&toks[3], line, "tetrahedron index", n)?;
                let face_b = parse_index(&toks[4], line, "face index", 4)?;
                let ps = toks[5].s;
                if ps.len() != 4 || !ps.bytes().all(|b| (b'0'..=b'3').contains(&b)) {
                    return Err(syntax(line, toks[5].col, "permutation must be four digits 0-3"));
                }
                let mut perm = [0usize; 4];
                for (i, b) in ps.bytes().enumerate() {
                    perm[i] = (b - b'0') as usize;
                }
                let mut seen = [false; 4];
                for &p in &perm {
                    if seen[p] {
                        return Err(syntax(line, toks[5].col, "vertex images must be distinct"));
                    }
                    seen[p] = true;
                }
                if perm[face_a] != face_b {
                    return Err(TriError::FaceToFace {
                        line,
                        face_a,
                        face_b,
                        got: perm[face_a],
                    });
                }
                if tet_a == tet_b && face_a == face_b {
                    return Err(TriError::NonInvolutive {
                        line,
                        detail: format!("face {face_a} of tetrahedron {tet_a} glued to itself"),
                    });
                }
                let g_idx = gluings.len();
                for (t, f, to, p) in [
                    (tet_a, face_a, (tet_b, face_b), perm),
                    (tet_b, face_b, (tet_a, face_a), invert(perm)),
                ] {
                    if let Some((_, first)) = attach[t][f] {
                        return Err(TriError::NonInvolutive {
                            line,
                            detail: format!(
                                "face {f} of tetrahedron {t} already glued at line {first}; \
                                 each pairing appears once, the reverse is implied"
                            ),
                        });
                    }
                    attach[t][f] =
                        Some((Attach { tet: to.0, face: to.1, perm: p, gluing: g_idx }, line));
                }
                gluings.push(Gluing { tet_a, face_a, tet_b, face_b, perm });
            }
            "label" => {
                let n = n_tets
                    .ok_or_else(|| syntax(line, toks[0].col, "`label` before `tetrahedra` header"))?;
                if toks.len() != 3 {
                    return Err(syntax(line, toks[0].col, "usage: label <T> <name>"));
                }
                let t = parse_index(&toks[1], line, "tetrahedron index", n)?;
                labels[t] = Some(toks[2].s.to_string());
            }
            other => {
                return Err(syntax(line, toks[0].col, format!("unknown directive `{other}`")));
            }
        }
    }

    let n = n_tets.ok_or_else(|| syntax(1, 1, "missing `tetrahedra` header"))?;
    let mut table = Vec::with_capacity(n);
    for (t, slots) in attach.into_iter().enumerate() {
        let mut row = [Attach { tet: 0, face: 0, perm: [0; 4], gluing: 0 }; 4];
        for (f, slot) in slots.into_iter().enumerate() {
            match slot {
                Some((a, _)) => row[f] = a,
                None => return Err(TriError::Unglued { tet: t, face: f }),
            }
        }
        table.push(row);
    }
    Ok(Triangulation { n_tets: n, gluings, labels, attach: table })
}

/// Partition the 6·n tetrahedron edges into gluing orbits.
///
/// Each cycle is traced by pivoting around the edge: leave through one of the
/// two faces containing it (initially the face indexed by the smaller
/// off-edge vertex), land on the image edge, and continue through the other
/// adjacent face until the walk returns to its start.
pub fn edge_classes(t: &Triangulation) -> Result<Vec<EdgeClass>, TriError> {
    let edge_slot = |e: [usize; 2]| EDGES.iter().position(|x| *x == e).unwrap();
    let mut seen = vec![[false; 6]; t.n_tets];
    let mut classes = Vec::new();
    for t0 in 0..t.n_tets {
        for e0 in EDGES {
            if seen[t0][edge_slot(e0)] {
                continue;
            }
            let mut members = Vec::new();
            let (mut cur_t, mut cur_e) = (t0, e0);
            let mut exit = off_edge(e0)[0];
            loop {
                if members.len() > 6 * t.n_tets {
                    return Err(TriError::NonClosingEdgeCycle { tet: t0, edge: e0 });
                }
                if seen[cur_t][edge_slot(cur_e)] {
                    return Err(TriError::NonClosingEdgeCycle { tet: t0, edge: e0 });
                }
                seen[cur_t][edge_slot(cur_e)] = true;
                members.push(EdgeUse {
                    tet: cur_t,
                    edge: cur_e,
                    corner: Corner::of_edge(cur_e[0], cur_e[1]),
                });
                let at = t.attachment(cur_t, exit);
                let mut ne = [at.perm[cur_e[0]], at.perm[cur_e[1]]];
                ne.sort_unstable();
                if at.tet == t0 && ne == e0 {
                    break;
                }
                let [k, l] = off_edge(ne);
                exit = if k == at.face {
                    l
                } else if l == at.face {
                    k
                } else {
                    return Err(TriError::NonClosingEdgeCycle { tet: t0, edge: e0 });
                };
                cur_t = at.tet;
                cur_e = ne;
            }
            classes.push(EdgeClass { members });
        }
    }
    Ok(classes)
}

/// Partition the 4·n ideal vertices into gluing orbits (one per cusp),
/// ordered by smallest member.
pub fn cusp_classes(t: &Triangulation) -> Vec<CuspClass> {
    let mut seen = vec![[false; 4]; t.n_tets];
    let mut classes: Vec<Vec<(usize, usize)>> = Vec::new();
    for t0 in 0..t.n_tets {
        for v0 in 0..4 {
            if seen[t0][v0] {
                continue;
            }
            let mut members = Vec::new();
            let mut queue = vec![(t0, v0)];
            seen[t0][v0] = true;
            while let Some((ct, cv)) = queue.pop() {
                members.push((ct, cv));
                for f in 0..4 {
                    if f == cv {
                        continue;
                    }
                    let at = t.attachment(ct, f);
                    let nxt = (at.tet, at.perm[cv]);
                    if !seen[nxt.0][nxt.1] {
                        seen[nxt.0][nxt.1] = true;
                        queue.push(nxt);
                    }
                }
            }
            members.sort_unstable();
            classes.push(members);
        }
    }
    classes.sort_by_key(|m| m[0]);
    classes
        .into_iter()
        .enumerate()
        .map(|(index, members)| CuspClass { index, members })
        .collect()
}

/// Parse a cusp-curve document against its triangulation, checking that
/// every step lies on the cusp its curve declares.
pub fn parse_cusp_curves(text: &str, t: &Triangulation) -> Result<Vec<CuspCurve>, TriError> {
    let cusps = cusp_classes(t);
    let mut membership: HashMap<(usize, usize), usize> = HashMap::new();
    for c in &cusps {
        for &m in &c.members {
            membership.insert(m, c.index);
        }
    }

    let mut curves: Vec<(CuspCurve, usize)> = Vec::new(); // (curve, header line)
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let toks = tokenize(raw);
        if toks.is_empty() {
            continue;
        }
        match toks[0].s {
            "curve" => {
                if toks.len() != 3 {
                    return Err(TriError::Curve { line, msg: "usage: curve <cusp> <name>".into() });
                }
                let cusp: usize = toks[1].s.parse().map_err(|_| TriError::Curve {
                    line,
                    msg: format!("expected a cusp index, found `{}`", toks[1].s),
                })?;
                if cusp >= cusps.len() {
                    return Err(TriError::Curve {
                        line,
                        msg: format!("cusp {cusp} out of range ({} cusps)", cusps.len()),
                    });
                }
                curves.push((
                    CuspCurve { cusp, name: toks[2].s.to_string(), steps: Vec::new() },
                    line,
                ));
            }
            "step" => {
                let (curve, _) = curves
                    .last_mut()
                    .ok_or_else(|| TriError::Curve { line, msg: "`step` before any `curve`".into() })?;
                if toks.len() != 5 {
                    return Err(TriError::Curve {
                        line,
                        msg: "usage: step <tet> <vertex> <z|v|w> <+|->".into(),
                    });
                }
                let tet = parse_index(&toks[1], line, "tetrahedron index", t.n_tets)
                    .map_err(|e| TriError::Curve { line, msg: e.to_string() })?;
                let vertex = parse_index(&toks[2], line, "vertex index", 4)
                    .map_err(|e| TriError::Curve { line, msg: e.to_string() })?;
                let corner = toks[3]
                    .s
                    .chars()
                    .next()
                    .filter(|_| toks[3].s.len() == 1)
                    .and_then(Corner::from_letter)
                    .ok_or_else(|| TriError::Curve {
                        line,
                        msg: format!("unknown corner tag `{}` (want z, v, or w)", toks[3].s),
                    })?;
                let eps = match toks[4].s {
                    "+" => 1,
                    "-" => -1,
                    other => {
                        return Err(TriError::Curve {
                            line,
                            msg: format!("unknown exponent `{other}` (want + or -)"),
                        })
                    }
                };
                if membership[&(tet, vertex)] != curve.cusp {
                    return Err(TriError::Curve {
                        line,
                        msg: format!(
                            "step at tetrahedron {tet}, vertex {vertex} lies on cusp {}, \
                             not on declared cusp {}",
                            membership[&(tet, vertex)], curve.cusp
                        ),
                    });
                }
                curve.steps.push(CurveStep { tet, vertex, corner, eps });
            }
            other => {
                return Err(TriError::Curve {
                    line,
                    msg: format!("unknown directive `{other}`"),
                });
            }
        }
    }
    for (c, header_line) in &curves {
        if c.steps.is_empty() {
            return Err(TriError::Curve {
                line: *header_line,
                msg: format!("curve `{}` has no steps", c.name),
            });
        }
    }
    Ok(curves.into_iter().map(|(c, _)| c).collect())
}
