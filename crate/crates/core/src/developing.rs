//! Placement of solved tetrahedra in the boundary plane of upper
//! half-space: one anchor tetrahedron is normalized to (0, ∞, z, 1) and
//! coordinates propagate breadth-first across the face gluings.
//!
//! Propagation uses unnormalized Möbius matrices so that integer-valued
//! cancellations stay exact and ∞ coordinates come out exactly ∞.

use crate::ext::ExtC;
use crate::holonomy::{raw_adjugate, raw_apply, raw_compose, raw_triple_to_normal};
use crate::shapes::{ShapeAssignment, ShapeError};
use crate::triangulation::Triangulation;
use crate::C;
use std::collections::VecDeque;
use thiserror::Error;

/// Pairwise-distinctness tolerance (chordal metric) for placed vertices.
const DISTINCT_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum DevError {
    #[error("anchor {anchor} out of range ({n_tets} tetrahedra)")]
    AnchorOutOfRange { anchor: usize, n_tets: usize },
    #[error("{got} shapes supplied for {expected} tetrahedra")]
    ShapeCount { expected: usize, got: usize },
    #[error(
        "tetrahedron {tet} develops to coincident vertices; \
         the shapes are degenerate or far from a solution"
    )]
    DegeneratePlacement { tet: usize },
    #[error("tetrahedron {tet} is not reachable from the anchor")]
    Disconnected { tet: usize },
    #[error(transparent)]
    Shape(#[from] ShapeError),
}

/// Boundary coordinates of one tetrahedron's four ideal vertices.
#[derive(Clone, Debug, PartialEq)]
pub struct DevelopedTetrahedron {
    pub coords: [ExtC; 4],
}

/// Coordinates for every tetrahedron plus the traversal that produced them.
#[derive(Clone, Debug)]
pub struct DevelopingMap {
    pub tets: Vec<DevelopedTetrahedron>,
    pub anchor: usize,
    /// Placement order (starts with the anchor).
    pub order: Vec<usize>,
    /// Gluing indices of the spanning tree, in the order they were crossed.
    pub tree: Vec<usize>,
}

fn reference_tet(z: C) -> [ExtC; 4] {
    [ExtC::finite(0.0, 0.0), ExtC::Infinity, ExtC::Finite(z), ExtC::finite(1.0, 0.0)]
}

fn check_distinct(tet: usize, coords: &[ExtC; 4]) -> Result<(), DevError> {
    for i in 0..4 {
        for j in i + 1..4 {
            if coords[i].chordal(coords[j]) < DISTINCT_TOL {
                return Err(DevError::DegeneratePlacement { tet });
            }
        }
    }
    Ok(())
}

/// The anchor normalization: vertices at (0, ∞, z, 1), so edge (0,1) runs
/// from 0 to ∞ and the extracted cross-ratio is z.
pub fn normalize_anchor(tet: usize, s: &ShapeAssignment) -> Result<DevelopedTetrahedron, DevError> {
    if tet >= s.len() {
        return Err(ShapeError::IndexOutOfRange(tet, s.len()).into());
    }
    let tr = s.triple(tet);
    if !tr.is_geometric() {
        return Err(ShapeError::NonGeometric(tr.z).into());
    }
    Ok(DevelopedTetrahedron { coords: reference_tet(tr.z) })
}

/// Develop all tetrahedra breadth-first from the anchor. Each new
/// tetrahedron copies the three coordinates shared across the entry face
/// and solves its fourth vertex from its own shape.
pub fn develop(
    t: &Triangulation,
    s: &ShapeAssignment,
    anchor: usize,
) -> Result<DevelopingMap, DevError> {
    if s.len() != t.n_tets {
        return Err(DevError::ShapeCount { expected: t.n_tets, got: s.len() });
    }
    if anchor >= t.n_tets {
        return Err(DevError::AnchorOutOfRange { anchor, n_tets: t.n_tets });
    }
    for tr in s.triples() {
        if !tr.is_geometric() {
            return Err(ShapeError::NonGeometric(tr.z).into());
        }
    }

    let mut placed: Vec<Option<DevelopedTetrahedron>> = vec![None; t.n_tets];
    let root = normalize_anchor(anchor, s)?;
    check_distinct(anchor, &root.coords)?;
    placed[anchor] = Some(root);
    let mut order = vec![anchor];
    let mut tree = Vec::new();
    let mut queue = VecDeque::from([anchor]);

    while let Some(cur) = queue.pop_front() {
        for face in 0..4 {
            let at = *t.attachment(cur, face);
            if placed[at.tet].is_some() {
                continue;
            }
            let cur_coords = placed[cur].as_ref().unwrap().coords;
            let missing = at.face;
            let mut coords = [ExtC::Infinity; 4];
            let mut verts = [0usize; 3];
            let mut k = 0;
            for v in 0..4 {
                if v != face {
                    coords[at.perm[v]] = cur_coords[v];
                }
            }
            for v in 0..4 {
                if v != missing {
                    verts[k] = v;
                    k += 1;
                }
            }
            let reference = reference_tet(s.triple(at.tet).z);
            let known = verts.map(|v| coords[v]);
            let refs = verts.map(|v| reference[v]);
            let to_normal = |p: [ExtC; 3]| {
                raw_triple_to_normal(p[0], p[1], p[2])
                    .map_err(|_| DevError::DegeneratePlacement { tet: at.tet })
            };
            let g_known = to_normal(known)?;
            let g_ref = to_normal(refs)?;
            let m = raw_compose(raw_adjugate(g_known), g_ref);
            coords[missing] = raw_apply(m, reference[missing]);
            check_distinct(at.tet, &coords)?;
            placed[at.tet] = Some(DevelopedTetrahedron { coords });
            order.push(at.tet);
            tree.push(at.gluing);
            queue.push_back(at.tet);
        }
    }

    let mut tets = Vec::with_capacity(t.n_tets);
    for (i, slot) in placed.into_iter().enumerate() {
        match slot {
            Some(d) => tets.push(d),
            None => return Err(DevError::Disconnected { tet: i }),
        }
    }
    Ok(DevelopingMap { tets, anchor, order, tree })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes::tetra_shape_from_vertices;
    use crate::triangulation::parse_triangulation;

    const BORROMEAN: &str = include_str!("../../../fixtures/borromean.tri");
    const FIGURE8: &str = include_str!("../../../fixtures/figure8.tri");

    fn fin(re: f64, im: f64) -> ExtC {
        ExtC::finite(re, im)
    }

    fn borromean_shapes() -> ShapeAssignment {
        let h = C::new(0.5, 0.5);
        let o = C::new(1.0, 1.0);
        let i = C::new(0.0, 1.0);
        ShapeAssignment::from_shapes(&[h, o, o, i, o, h, i, h]).unwrap()
    }

    fn expected_rows() -> Vec<[ExtC; 4]> {
        let inf = ExtC::Infinity;
        vec![
            [fin(0.0, -1.0), inf, fin(0.0, 0.0), fin(1.0, 0.0)],
            [fin(-1.0, 0.0), inf, fin(0.0, 1.0), fin(0.0, 0.0)],
            [fin(0.0, -1.0), inf, fin(-1.0, 0.0), fin(0.0, 0.0)],
            [fin(0.0, 0.0), inf, fin(0.0, 1.0), fin(1.0, 0.0)],
            [fin(0.0, 1.0), fin(1.0, 0.0), inf, fin(1.0, 2.0)],
            [fin(1.0, 1.0), fin(1.0, 2.0), fin(1.0, 0.0), fin(0.0, 1.0)],
            [fin(1.0, 2.0), fin(1.0, 0.0), inf, fin(2.0, 1.0)],
            [fin(1.0, 1.0), fin(1.0, 0.0), fin(1.0, 2.0), fin(2.0, 1.0)],
        ]
    }

    #[test]
    fn anchor_normalization() {
        let s = borromean_shapes();
        let d = normalize_anchor(3, &s).unwrap();
        assert_eq!(
            d.coords,
            [fin(0.0, 0.0), ExtC::Infinity, fin(0.0, 1.0), fin(1.0, 0.0)]
        );
        let z = tetra_shape_from_vertices(d.coords).unwrap();
        assert!((z - C::new(0.0, 1.0)).norm() < 1e-14);

        assert!(normalize_anchor(8, &s).is_err());
        let bad = ShapeAssignment::from_shapes(&[C::new(0.5, -0.5)]).unwrap();
        assert!(normalize_anchor(0, &bad).is_err());
    }

    #[test]
    fn borromean_development_matches_reference() {
        let t = parse_triangulation(BORROMEAN).unwrap();
        let s = borromean_shapes();
        let dev = develop(&t, &s, 3).unwrap();

        assert_eq!(dev.anchor, 3);
        assert_eq!(dev.order, vec![3, 4, 0, 1, 6, 5, 2, 7]);
        assert_eq!(dev.tree.len(), 7);
        assert_eq!(dev.tets[3], normalize_anchor(3, &s).unwrap());

        for (tet, want) in expected_rows().iter().enumerate() {
            for (v, w) in dev.tets[tet].coords.iter().zip(want) {
                // ∞ must be exact; approx_eq never matches ∞ to a finite value
                assert!(v.approx_eq(*w, 1e-9), "tet {tet}: got {v:?}, want {w:?}");
            }
        }
    }

    #[test]
    fn shapes_recovered_from_coordinates() {
        let t = parse_triangulation(BORROMEAN).unwrap();
        let s = borromean_shapes();
        let dev = develop(&t, &s, 3).unwrap();
        for (tet, d) in dev.tets.iter().enumerate() {
            let z = tetra_shape_from_vertices(d.coords).unwrap();
            assert!((z - s.triple(tet).z).norm() < 1e-9, "tet {tet}: {z}");
            assert!(z.im > 0.0);
        }
    }

    #[test]
    fn figure8_development() {
        let t = parse_triangulation(FIGURE8).unwrap();
        let z = C::from_polar(1.0, std::f64::consts::FRAC_PI_3);
        let s = ShapeAssignment::from_shapes(&[z, z]).unwrap();
        let dev = develop(&t, &s, 0).unwrap();
        assert_eq!(dev.order, vec![0, 1]);
        assert_eq!(dev.tree, vec![0]);
        let want1 = [
            ExtC::Finite(C::new(1.5, 0.0) + C::new(0.0, 1.0) * z.im),
            ExtC::Infinity,
            fin(1.0, 0.0),
            ExtC::Finite(z),
        ];
        for (got, want) in dev.tets[1].coords.iter().zip(&want1) {
            assert!(got.approx_eq(*want, 1e-9), "got {got:?}, want {want:?}");
        }
    }

    #[test]
    fn degenerate_shapes_detected() {
        let t = parse_triangulation(FIGURE8).unwrap();
        let near_zero = C::new(0.0, 1e-13);
        let i = C::new(0.0, 1.0);

        let s = ShapeAssignment::from_shapes(&[near_zero, i]).unwrap();
        assert!(matches!(
            develop(&t, &s, 0).unwrap_err(),
            DevError::DegeneratePlacement { tet: 0 }
        ));

        let s = ShapeAssignment::from_shapes(&[i, near_zero]).unwrap();
        assert!(matches!(
            develop(&t, &s, 0).unwrap_err(),
            DevError::DegeneratePlacement { tet: 1 }
        ));
    }

    #[test]
    fn input_validation() {
        let t = parse_triangulation(FIGURE8).unwrap();
        let i = C::new(0.0, 1.0);
        let s = ShapeAssignment::from_shapes(&[i, i]).unwrap();
        assert!(matches!(
            develop(&t, &s, 2).unwrap_err(),
            DevError::AnchorOutOfRange { anchor: 2, n_tets: 2 }
        ));
        let s1 = ShapeAssignment::from_shapes(&[i]).unwrap();
        assert!(matches!(
            develop(&t, &s1, 0).unwrap_err(),
            DevError::ShapeCount { expected: 2, got: 1 }
        ));
        let bad = ShapeAssignment::from_shapes(&[i, C::new(0.5, -0.5)]).unwrap();
        assert!(matches!(develop(&t, &bad, 0).unwrap_err(), DevError::Shape(_)));
    }

    #[test]
    fn disconnected_component_detected() {
        // two disjoint copies of the 2-tetrahedron complex
        let mut text = String::from("tetrahedra 4\n");
        for base in [0, 2] {
            for (fa, fb, perm) in
                [(0, 0, "0132"), (1, 2, "1230"), (2, 1, "2310"), (3, 3, "2103")]
            {
                text.push_str(&format!("glue {} {fa} {} {fb} {perm}\n", base, base + 1));
            }
        }
        let t = parse_triangulation(&text).unwrap();
        let z = C::from_polar(1.0, std::f64::consts::FRAC_PI_3);
        let s = ShapeAssignment::from_shapes(&[z; 4]).unwrap();
        assert!(matches!(
            develop(&t, &s, 0).unwrap_err(),
            DevError::Disconnected { tet: 2 }
        ));
    }
}
