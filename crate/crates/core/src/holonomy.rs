//! Möbius arithmetic on the extended complex plane, face-pairing matrix
//! extraction from developed coordinates, and numerical verification of
//! group relations in PSL(2,C).
//!
//! Matrices are held with determinant 1, so equality is only defined modulo
//! a global sign; [`psl_distance`] takes the minimum over ±.

use crate::developing::DevelopingMap;
use crate::ext::ExtC;
use crate::triangulation::Triangulation;
use crate::wirtinger::GroupWord;
use crate::C;
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HolError {
    #[error("triple contains repeated points")]
    RepeatedPoints,
    #[error("matrix is singular")]
    DegenerateMap,
    #[error("word letter `{0}` has no assigned matrix")]
    Unassigned(String),
}

/// A 2×2 determinant-1 matrix acting on the extended plane by
/// z ↦ (az+b)/(cz+d); defined up to global sign.
#[derive(Clone, Debug)]
pub struct MoebiusMap {
    pub a: C,
    pub b: C,
    pub c: C,
    pub d: C,
}

const ZERO: C = C::new(0.0, 0.0);
const ONE: C = C::new(1.0, 0.0);

/// Entries of a matrix that has not been scaled to determinant 1; a scalar
/// multiple induces the same Möbius map, and skipping the scaling keeps
/// integer-valued cancellations exact (so ∞ stays exactly ∞).
pub(crate) type RawMap = [C; 4];

pub(crate) fn raw_compose(m: RawMap, n: RawMap) -> RawMap {
    let [a1, b1, c1, d1] = m;
    let [a2, b2, c2, d2] = n;
    [a1 * a2 + b1 * c2, a1 * b2 + b1 * d2, c1 * a2 + d1 * c2, c1 * b2 + d1 * d2]
}

/// Inverse up to the (nonzero) determinant scalar.
pub(crate) fn raw_adjugate(m: RawMap) -> RawMap {
    let [a, b, c, d] = m;
    [d, -b, -c, a]
}

pub(crate) fn raw_apply(m: RawMap, z: ExtC) -> ExtC {
    let [a, b, c, d] = m;
    match z {
        ExtC::Infinity => {
            if c == ZERO {
                ExtC::Infinity
            } else {
                ExtC::Finite(a / c)
            }
        }
        ExtC::Finite(z) => {
            let den = c * z + d;
            if den == ZERO {
                ExtC::Infinity
            } else {
                ExtC::Finite((a * z + b) / den)
            }
        }
    }
}

/// The matrix sending p ↦ ∞, q ↦ 0, r ↦ 1, up to scale.
pub(crate) fn raw_triple_to_normal(p: ExtC, q: ExtC, r: ExtC) -> Result<RawMap, HolError> {
    if p == q || q == r || p == r {
        return Err(HolError::RepeatedPoints);
    }
    Ok(match (p, q, r) {
        (ExtC::Infinity, ExtC::Finite(q), ExtC::Finite(r)) => [ONE, -q, ZERO, r - q],
        (ExtC::Finite(p), ExtC::Infinity, ExtC::Finite(r)) => [ZERO, r - p, ONE, -p],
        (ExtC::Finite(p), ExtC::Finite(q), ExtC::Infinity) => [ONE, -q, ONE, -p],
        (ExtC::Finite(p), ExtC::Finite(q), ExtC::Finite(r)) => {
            [r - p, -q * (r - p), r - q, -p * (r - q)]
        }
        _ => return Err(HolError::RepeatedPoints), // two infinities
    })
}

impl MoebiusMap {
    /// Scale the entries to determinant 1.
    pub fn new(a: C, b: C, c: C, d: C) -> Result<Self, HolError> {
        let det = a * d - b * c;
        if det.norm() == 0.0 || !det.is_finite() {
            return Err(HolError::DegenerateMap);
        }
        let s = det.sqrt();
        Ok(MoebiusMap { a: a / s, b: b / s, c: c / s, d: d / s })
    }

    pub fn identity() -> Self {
        MoebiusMap { a: ONE, b: ZERO, c: ZERO, d: ONE }
    }

    pub(crate) fn raw(&self) -> RawMap {
        [self.a, self.b, self.c, self.d]
    }

    /// Matrix product self·other, acting as self ∘ other.
    pub fn compose(&self, other: &Self) -> Self {
        let [a, b, c, d] = raw_compose(self.raw(), other.raw());
        MoebiusMap { a, b, c, d }
    }

    /// Exact inverse of a determinant-1 matrix.
    pub fn inverse(&self) -> Self {
        MoebiusMap { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    pub fn apply(&self, z: ExtC) -> ExtC {
        raw_apply(self.raw(), z)
    }
}

/// Evaluate m at a point of the extended plane (z = ∞ ↦ a/c; poles ↦ ∞).
pub fn mobius_apply(m: &MoebiusMap, z: ExtC) -> ExtC {
    m.apply(z)
}

/// The determinant-1 matrix sending p ↦ ∞, q ↦ 0, r ↦ 1.
pub fn triple_to_normal(p: ExtC, q: ExtC, r: ExtC) -> Result<MoebiusMap, HolError> {
    let [a, b, c, d] = raw_triple_to_normal(p, q, r)?;
    MoebiusMap::new(a, b, c, d)
}

/// The map carrying the source triple pointwise onto the destination
/// triple: g₂⁻¹·g₁ where g₁, g₂ normalize source and destination.
pub fn face_pairing(src: &[ExtC; 3], dst: &[ExtC; 3]) -> Result<MoebiusMap, HolError> {
    let g1 = raw_triple_to_normal(src[0], src[1], src[2])?;
    let g2 = raw_triple_to_normal(dst[0], dst[1], dst[2])?;
    let [a, b, c, d] = raw_compose(raw_adjugate(g2), g1);
    MoebiusMap::new(a, b, c, d)
}

/// Entrywise max-abs distance between two determinant-1 matrices, minimized
/// over the global sign.
pub fn psl_distance(m: &MoebiusMap, n: &MoebiusMap) -> f64 {
    let dist = |sign: f64| {
        [(m.a, n.a), (m.b, n.b), (m.c, n.c), (m.d, n.d)]
            .iter()
            .map(|(x, y)| (x - sign * y).norm())
            .fold(0.0, f64::max)
    };
    dist(1.0).min(dist(-1.0))
}

/// Pick the sign that makes the first significant entry's real part
/// positive (or its imaginary part, when the real part vanishes) — a stable
/// choice for display and golden files.
pub fn canonical_sign(m: &MoebiusMap) -> [C; 4] {
    let entries = m.raw();
    for e in entries {
        if e.norm() > 1e-9 {
            let flip = e.re < -1e-12 || (e.re.abs() <= 1e-12 && e.im < 0.0);
            return if flip { entries.map(|x| -x) } else { entries };
        }
    }
    entries
}

/// One face identification with its extracted matrix.
#[derive(Clone, Debug)]
pub struct FacePairing {
    /// Index into the triangulation's gluing list.
    pub gluing: usize,
    /// Stable name: `A-B` when this is the only nontrivial pairing between
    /// tetrahedra A and B, otherwise `AfF-BfG` naming both faces.
    pub key: String,
    pub map: MoebiusMap,
    /// Within 1e-9 of ±identity.
    pub trivial: bool,
}

/// Extract the Möbius map of every gluing from developed coordinates.
pub fn face_pairings(t: &Triangulation, dev: &DevelopingMap) -> Result<Vec<FacePairing>, HolError> {
    let ident = MoebiusMap::identity();
    let mut maps = Vec::with_capacity(t.gluings.len());
    for g in &t.gluings {
        let verts: Vec<usize> = (0..4).filter(|&v| v != g.face_a).collect();
        let src = [0, 1, 2].map(|k| dev.tets[g.tet_a].coords[verts[k]]);
        let dst = [0, 1, 2].map(|k| dev.tets[g.tet_b].coords[g.perm[verts[k]]]);
        let map = face_pairing(&src, &dst)?;
        let trivial = psl_distance(&map, &ident) < 1e-9;
        maps.push((map, trivial));
    }
    let mut nontrivial_per_pair: HashMap<(usize, usize), usize> = HashMap::new();
    for (g, (_, trivial)) in t.gluings.iter().zip(&maps) {
        if !trivial {
            let pair = (g.tet_a.min(g.tet_b), g.tet_a.max(g.tet_b));
            *nontrivial_per_pair.entry(pair).or_insert(0) += 1;
        }
    }
    Ok(maps
        .into_iter()
        .enumerate()
        .map(|(i, (map, trivial))| {
            let g = &t.gluings[i];
            let pair = (g.tet_a.min(g.tet_b), g.tet_a.max(g.tet_b));
            let key = if !trivial && nontrivial_per_pair[&pair] == 1 {
                format!("{}-{}", g.tet_a, g.tet_b)
            } else {
                format!("{}f{}-{}f{}", g.tet_a, g.face_a, g.tet_b, g.face_b)
            };
            FacePairing { gluing: i, key, map, trivial }
        })
        .collect())
}

/// Multiply out a word over named matrices.
pub fn evaluate_word(
    word: &GroupWord,
    assignment: &HashMap<String, MoebiusMap>,
) -> Result<MoebiusMap, HolError> {
    let mut acc = MoebiusMap::identity();
    for (name, e) in word.letters() {
        let m = assignment.get(name).ok_or_else(|| HolError::Unassigned(name.clone()))?;
        let factor = if *e == 1 { m.clone() } else { m.inverse() };
        acc = acc.compose(&factor);
    }
    Ok(acc)
}

/// Distance of each evaluated word from ±identity.
pub fn verify_relations(
    words: &[GroupWord],
    assignment: &HashMap<String, MoebiusMap>,
) -> Result<Vec<f64>, HolError> {
    let ident = MoebiusMap::identity();
    words
        .iter()
        .map(|w| Ok(psl_distance(&evaluate_word(w, assignment)?, &ident)))
        .collect()
}

/// A cusp's chosen boundary generator.
#[derive(Clone, Debug)]
pub struct MeridianGenerator {
    pub cusp: usize,
    pub word: GroupWord,
    pub map: MoebiusMap,
}

#[derive(Clone, Debug)]
pub struct RelationCheck {
    pub word: GroupWord,
    pub residual: f64,
}

/// Face pairings plus evaluated meridians and relation residuals.
#[derive(Clone, Debug)]
pub struct HolonomyReport {
    pub pairings: Vec<FacePairing>,
    pub generators: Vec<MeridianGenerator>,
    pub relation_residuals: Vec<RelationCheck>,
}

/// Assemble the holonomy data for a developed triangulation; meridian and
/// relation words are written over the pairing keys.
pub fn holonomy_report(
    t: &Triangulation,
    dev: &DevelopingMap,
    meridians: &[(usize, GroupWord)],
    relations: &[GroupWord],
) -> Result<HolonomyReport, HolError> {
    let pairings = face_pairings(t, dev)?;
    let assignment: HashMap<String, MoebiusMap> =
        pairings.iter().map(|p| (p.key.clone(), p.map.clone())).collect();
    let generators = meridians
        .iter()
        .map(|(cusp, word)| {
            Ok(MeridianGenerator {
                cusp: *cusp,
                word: word.clone(),
                map: evaluate_word(word, &assignment)?,
            })
        })
        .collect::<Result<_, HolError>>()?;
    let ident = MoebiusMap::identity();
    let relation_residuals = relations
        .iter()
        .map(|w| {
            Ok(RelationCheck {
                word: w.clone(),
                residual: psl_distance(&evaluate_word(w, &assignment)?, &ident),
            })
        })
        .collect::<Result<_, HolError>>()?;
    Ok(HolonomyReport { pairings, generators, relation_residuals })
}
