//! Link-group presentations from crossing diagrams: free-group words,
//! Wirtinger relators, generator elimination, and abelianization.
//!
//! Crossing file format (line oriented, `#` comments): one `arcs <name>...`
//! line declaring the diagram arcs, then lines
//! `crossing <+|-> <over> <under-in> <under-out>`. Each crossing contributes
//! the relator saying the outgoing under-arc is the incoming one conjugated
//! by the over-arc, with the conjugation side set by the crossing sign.

use std::collections::HashMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum WirtError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("bad word `{text}`: {msg}")]
    BadWord { text: String, msg: String },
    #[error("crossing {index} references undeclared arc `{arc}`")]
    DanglingArc { index: usize, arc: String },
    #[error("generator `{0}` is not declared")]
    UnknownGenerator(String),
    #[error("definition of `{0}` must not contain `{0}`")]
    SelfReferential(String),
    #[error("no relator matches `{0}` = definition (up to rotation and inversion)")]
    NotExpressible(String),
}

/// A freely reduced word in a free group; letters are (generator, ±1).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupWord {
    letters: Vec<(String, i8)>,
}

fn reduce(raw: impl IntoIterator<Item = (String, i8)>) -> Vec<(String, i8)> {
    let mut out: Vec<(String, i8)> = Vec::new();
    for (name, e) in raw {
        debug_assert!(e == 1 || e == -1);
        match out.last() {
            Some((prev, pe)) if *prev == name && *pe == -e => {
                out.pop();
            }
            _ => out.push((name, e)),
        }
    }
    out
}

impl GroupWord {
    pub fn identity() -> Self {
        GroupWord { letters: Vec::new() }
    }

    pub fn generator(name: &str) -> Self {
        GroupWord { letters: vec![(name.to_string(), 1)] }
    }

    /// Build from letters, freely reducing.
    pub fn from_letters(raw: impl IntoIterator<Item = (String, i8)>) -> Self {
        GroupWord { letters: reduce(raw) }
    }

    /// Parse whitespace-separated tokens `name` or `name^-1`.
    pub fn parse(text: &str) -> Result<Self, WirtError> {
        let mut letters = Vec::new();
        for tok in text.split_whitespace() {
            let (name, e) = match tok.strip_suffix("^-1") {
                Some(name) => (name, -1),
                None => (tok, 1),
            };
            if name.is_empty() || name.contains('^') {
                return Err(WirtError::BadWord {
                    text: text.to_string(),
                    msg: format!("token `{tok}` is not `name` or `name^-1`"),
                });
            }
            letters.push((name.to_string(), e));
        }
        Ok(GroupWord::from_letters(letters))
    }

    pub fn letters(&self) -> &[(String, i8)] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> Self {
        GroupWord {
            letters: self.letters.iter().rev().map(|(n, e)| (n.clone(), -e)).collect(),
        }
    }

    /// Reduced product self·other.
    pub fn concat(&self, other: &Self) -> Self {
        GroupWord::from_letters(self.letters.iter().chain(&other.letters).cloned())
    }

    /// Replace every g^±1 by defn^±1 and reduce.
    pub fn substitute(&self, g: &str, defn: &GroupWord) -> Self {
        let inv = defn.inverse();
        let mut raw = Vec::new();
        for (name, e) in &self.letters {
            if name == g {
                let rep = if *e == 1 { defn } else { &inv };
                raw.extend(rep.letters.iter().cloned());
            } else {
                raw.push((name.clone(), *e));
            }
        }
        GroupWord::from_letters(raw)
    }

    /// Strip conjugating pairs: the shortest word in the cyclic class.
    fn cyclically_reduced(&self) -> Self {
        let mut l = self.letters.clone();
        while l.len() >= 2 {
            let (first, last) = (&l[0], &l[l.len() - 1]);
            if first.0 == last.0 && first.1 == -last.1 {
                l.remove(0);
                l.pop();
            } else {
                break;
            }
        }
        GroupWord { letters: l }
    }
}

impl fmt::Display for GroupWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        let mut first = true;
        for (name, e) in &self.letters {
            if !first {
                write!(f, " ")?;
            }
            first = false;
            match e {
                1 => write!(f, "{name}")?,
                _ => write!(f, "{name}^-1")?,
            }
        }
        Ok(())
    }
}

/// Letterwise equality of free reductions.
pub fn words_equal(u: &GroupWord, v: &GroupWord) -> bool {
    u.letters == v.letters
}

/// Equality as relators: up to cyclic rotation and inversion.
pub fn cyclically_equal(u: &GroupWord, v: &GroupWord) -> bool {
    let u = u.cyclically_reduced();
    let v = v.cyclically_reduced();
    if u.len() != v.len() {
        return false;
    }
    if u.is_empty() {
        return true;
    }
    let vinv = v.inverse();
    for target in [&v, &vinv] {
        for k in 0..u.len() {
            if (0..u.len()).all(|i| u.letters[(k + i) % u.len()] == target.letters[i]) {
                return true;
            }
        }
    }
    false
}

/// The commutator x⁻¹·y⁻¹·x·y.
pub fn commutator(x: &GroupWord, y: &GroupWord) -> GroupWord {
    x.inverse().concat(&y.inverse()).concat(x).concat(y)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Pos,
    Neg,
}

#[derive(Clone, Debug)]
pub struct Crossing {
    pub sign: Sign,
    pub over: String,
    pub under_in: String,
    pub under_out: String,
}

#[derive(Clone, Debug)]
pub struct CrossingList {
    pub arcs: Vec<String>,
    pub crossings: Vec<Crossing>,
}

/// Parse a crossing-diagram document.
pub fn parse_crossing_list(text: &str) -> Result<CrossingList, WirtError> {
    let mut arcs: Option<Vec<String>> = None;
    let mut crossings = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("");
        let toks: Vec<&str> = body.split_whitespace().collect();
        if toks.is_empty() {
            continue;
        }
        match toks[0] {
            "arcs" => {
                if arcs.is_some() {
                    return Err(WirtError::Parse { line, msg: "duplicate `arcs` line".into() });
                }
                if toks.len() < 2 {
                    return Err(WirtError::Parse { line, msg: "usage: arcs <name>...".into() });
                }
                let names: Vec<String> = toks[1..].iter().map(|s| s.to_string()).collect();
                let mut sorted = names.clone();
                sorted.sort();
                sorted.dedup();
                if sorted.len() != names.len() {
                    return Err(WirtError::Parse { line, msg: "duplicate arc name".into() });
                }
                arcs = Some(names);
            }
            "crossing" => {
                if arcs.is_none() {
                    return Err(WirtError::Parse {
                        line,
                        msg: "`crossing` before `arcs` line".into(),
                    });
                }
                if toks.len() != 5 {
                    return Err(WirtError::Parse {
                        line,
                        msg: "usage: crossing <+|-> <over> <under-in> <under-out>".into(),
                    });
                }
                let sign = match toks[1] {
                    "+" => Sign::Pos,
                    "-" => Sign::Neg,
                    other => {
                        return Err(WirtError::Parse {
                            line,
                            msg: format!("unknown sign `{other}` (want + or -)"),
                        })
                    }
                };
                crossings.push(Crossing {
                    sign,
                    over: toks[2].to_string(),
                    under_in: toks[3].to_string(),
                    under_out: toks[4].to_string(),
                });
            }
            other => {
                return Err(WirtError::Parse {
                    line,
                    msg: format!("unknown directive `{other}`"),
                });
            }
        }
    }
    let arcs = arcs.ok_or(WirtError::Parse { line: 1, msg: "missing `arcs` line".into() })?;
    let cl = CrossingList { arcs, crossings };
    check_arcs(&cl)?;
    Ok(cl)
}

fn check_arcs(cl: &CrossingList) -> Result<(), WirtError> {
    for (index, c) in cl.crossings.iter().enumerate() {
        for arc in [&c.over, &c.under_in, &c.under_out] {
            if !cl.arcs.contains(arc) {
                return Err(WirtError::DanglingArc { index, arc: arc.clone() });
            }
        }
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub struct Presentation {
    pub generators: Vec<String>,
    pub relators: Vec<GroupWord>,
}

/// One generator per arc; per crossing, the relator stating
/// out = over^∓1 · in · over^±1 (sign-dependent conjugation), written as
/// out·over^∓1·in⁻1·over^±1.
pub fn wirtinger_presentation(cl: &CrossingList) -> Result<Presentation, WirtError> {
    check_arcs(cl)?;
    let relators = cl
        .crossings
        .iter()
        .map(|c| {
            let (s, a, b) = (c.under_out.clone(), c.over.clone(), c.under_in.clone());
            let letters = match c.sign {
                Sign::Pos => vec![(s, 1), (a.clone(), -1), (b, -1), (a, 1)],
                Sign::Neg => vec![(s, 1), (a.clone(), 1), (b, -1), (a, -1)],
            };
            GroupWord::from_letters(letters)
        })
        .collect();
    Ok(Presentation { generators: cl.arcs.clone(), relators })
}

/// Remove generator `g`, given a word `defn` over the remaining generators
/// with g = defn. Requires some relator to be the relation g·defn⁻¹ up to
/// rotation and inversion; that relator is dropped and every other
/// occurrence of g substituted.
pub fn eliminate_generator(
    p: &Presentation,
    g: &str,
    defn: &GroupWord,
) -> Result<Presentation, WirtError> {
    if !p.generators.iter().any(|x| x == g) {
        return Err(WirtError::UnknownGenerator(g.to_string()));
    }
    for (name, _) in defn.letters() {
        if name == g {
            return Err(WirtError::SelfReferential(g.to_string()));
        }
        if !p.generators.iter().any(|x| x == name) {
            return Err(WirtError::UnknownGenerator(name.clone()));
        }
    }
    let target = GroupWord::generator(g).concat(&defn.inverse());
    let defining = p
        .relators
        .iter()
        .position(|r| cyclically_equal(r, &target))
        .ok_or_else(|| WirtError::NotExpressible(g.to_string()))?;
    let relators = p
        .relators
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != defining)
        .map(|(_, r)| r.substitute(g, defn))
        .collect();
    let generators = p.generators.iter().filter(|x| *x != g).cloned().collect();
    Ok(Presentation { generators, relators })
}

/// Free rank and torsion coefficients (> 1) of the abelianized group,
/// from the Smith normal form of the relator exponent-sum matrix.
pub fn abelianization(p: &Presentation) -> (usize, Vec<u64>) {
    let index: HashMap<&str, usize> =
        p.generators.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
    let mut m: Vec<Vec<i64>> = p
        .relators
        .iter()
        .map(|r| {
            let mut row = vec![0i64; p.generators.len()];
            for (name, e) in r.letters() {
                row[index[name.as_str()]] += *e as i64;
            }
            row
        })
        .collect();
    let diag = smith_diagonal(&mut m, p.generators.len());
    let nonzero: Vec<u64> = diag.iter().filter(|&&d| d != 0).map(|&d| d.unsigned_abs()).collect();
    let torsion = nonzero.iter().copied().filter(|&d| d > 1).collect();
    (p.generators.len() - nonzero.len(), torsion)
}

fn smith_diagonal(m: &mut [Vec<i64>], cols: usize) -> Vec<i64> {
    let rows = m.len();
    let mut diag = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        // pivot: smallest nonzero magnitude in the remaining block
        let mut pivot: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if m[i][j] != 0
                    && pivot.is_none_or(|(pi, pj)| m[i][j].abs() < m[pi][pj].abs())
                {
                    pivot = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        m.swap(t, pi);
        for row in m.iter_mut() {
            row.swap(t, pj);
        }
        // clear the pivot row and column by Euclidean steps
        let mut again = true;
        while again {
            again = false;
            for i in t + 1..rows {
                if m[i][t] != 0 {
                    let (head, tail) = m.split_at_mut(i);
                    let (pivot_row, row) = (&head[t], &mut tail[0]);
                    let q = row[t] / pivot_row[t];
                    for (x, p) in row[t..cols].iter_mut().zip(&pivot_row[t..cols]) {
                        *x -= q * p;
                    }
                    if m[i][t] != 0 {
                        m.swap(t, i);
                        again = true;
                    }
                }
            }
            for j in t + 1..cols {
                if m[t][j] != 0 {
                    let q = m[t][j] / m[t][t];
                    for row in m.iter_mut() {
                        row[j] -= q * row[t];
                    }
                    if m[t][j] != 0 {
                        for row in m.iter_mut() {
                            row.swap(t, j);
                        }
                        again = true;
                    }
                }
            }
        }
        diag.push(m[t][t]);
        t += 1;
    }
    // enforce the divisibility chain d₁ | d₂ | …
    for i in 0..diag.len() {
        for j in i + 1..diag.len() {
            let (a, b) = (diag[i], diag[j]);
            if a != 0 && b % a != 0 {
                let g = gcd(a, b);
                diag[j] = a / g * b;
                diag[i] = g;
            }
        }
    }
    for d in diag.iter_mut() {
        *d = d.abs();
    }
    diag.sort_unstable();
    diag
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}
