//! Edge-consistency and cusp-completeness equations as integer exponent
//! vectors over the tetrahedron shapes, with residual and Jacobian
//! evaluation in additive log form.
//!
//! Every equation states that a product of corner invariants
//! ∏ zₜᵃ·vₜᵇ·wₜᶜ equals 1, with a prescribed total argument: 2π for the
//! corners around an edge, 0 for the holonomy of a curve on a cusp torus.
//! Residuals are Σ(a·log z + b·log v + c·log w) − i·target on the principal
//! branch; at a geometric solution every corner argument lies in (0, π), so
//! no extra winding terms are needed.

use crate::shapes::{ShapeAssignment, ShapeError};
use crate::triangulation::{cusp_classes, edge_classes, CuspCurve, TriError, Triangulation};
use crate::C;
use nalgebra::DMatrix;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EqError {
    #[error("cusp {cusp} needs exactly 2 curves, found {count}")]
    MissingCurves { cusp: usize, count: usize },
    #[error(transparent)]
    Triangulation(#[from] TriError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EquationKind {
    Edge,
    Cusp,
}

/// What an equation was built from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EquationSource {
    /// Index into the edge-class list of the triangulation.
    EdgeClass(usize),
    /// A named curve on a cusp torus.
    Curve { cusp: usize, name: String },
}

/// One multiplicative relation among corner invariants.
#[derive(Clone, Debug)]
pub struct GluingEquation {
    pub kind: EquationKind,
    /// Per tetrahedron, the exponents (a, b, c) of its corners (z, v, w).
    pub exponents: Vec<[i32; 3]>,
    /// Required total argument of the product (2π for edges, 0 for cusps).
    pub target_arg: f64,
    pub source: EquationSource,
}

/// The full system: one equation per edge class, two per cusp.
#[derive(Clone, Debug)]
pub struct EquationSystem {
    pub equations: Vec<GluingEquation>,
    pub n_tets: usize,
}

/// Assemble the system for a triangulation and a set of cusp curves.
/// Edge equations come first, in edge-class order, then the curve equations
/// in input order. Every cusp must carry exactly two curves.
pub fn build_system(t: &Triangulation, curves: &[CuspCurve]) -> Result<EquationSystem, EqError> {
    let mut equations = Vec::new();
    for (i, class) in edge_classes(t)?.iter().enumerate() {
        let mut exponents = vec![[0i32; 3]; t.n_tets];
        for m in &class.members {
            exponents[m.tet][m.corner.index()] += 1;
        }
        equations.push(GluingEquation {
            kind: EquationKind::Edge,
            exponents,
            target_arg: std::f64::consts::TAU,
            source: EquationSource::EdgeClass(i),
        });
    }
    for cusp in cusp_classes(t) {
        let count = curves.iter().filter(|c| c.cusp == cusp.index).count();
        if count != 2 {
            return Err(EqError::MissingCurves { cusp: cusp.index, count });
        }
    }
    for curve in curves {
        let mut exponents = vec![[0i32; 3]; t.n_tets];
        for s in &curve.steps {
            exponents[s.tet][s.corner.index()] += s.eps as i32;
        }
        equations.push(GluingEquation {
            kind: EquationKind::Cusp,
            exponents,
            target_arg: 0.0,
            source: EquationSource::Curve { cusp: curve.cusp, name: curve.name.clone() },
        });
    }
    Ok(EquationSystem { equations, n_tets: t.n_tets })
}

/// The literal product ∏ zₜᵃ·vₜᵇ·wₜᶜ of an equation (1 for a solved system).
pub fn holonomy_invariant(eq: &GluingEquation, s: &ShapeAssignment) -> C {
    let mut acc = C::new(1.0, 0.0);
    for (t, &[a, b, c]) in eq.exponents.iter().enumerate() {
        if (a, b, c) == (0, 0, 0) {
            continue;
        }
        let tr = s.triple(t);
        acc *= tr.z.powi(a) * tr.v.powi(b) * tr.w.powi(c);
    }
    acc
}

fn ensure_geometric(s: &ShapeAssignment) -> Result<(), ShapeError> {
    for tr in s.triples() {
        if !tr.is_geometric() {
            return Err(ShapeError::NonGeometric(tr.z));
        }
    }
    Ok(())
}

/// Log-form residuals, one per equation; all zero exactly at a geometric
/// solution with the correct angle sums.
pub fn residuals(sys: &EquationSystem, s: &ShapeAssignment) -> Result<Vec<C>, ShapeError> {
    ensure_geometric(s)?;
    Ok(sys
        .equations
        .iter()
        .map(|eq| {
            let mut acc = C::new(0.0, -eq.target_arg);
            for (t, &[a, b, c]) in eq.exponents.iter().enumerate() {
                if (a, b, c) == (0, 0, 0) {
                    continue;
                }
                let tr = s.triple(t);
                acc += tr.z.ln() * a as f64 + tr.v.ln() * b as f64 + tr.w.ln() * c as f64;
            }
            acc
        })
        .collect())
}

/// Analytic Jacobian of [`residuals`] with respect to the z of each
/// tetrahedron (rows = equations, columns = tetrahedra).
pub fn jacobian(sys: &EquationSystem, s: &ShapeAssignment) -> Result<DMatrix<C>, ShapeError> {
    ensure_geometric(s)?;
    let one = C::new(1.0, 0.0);
    Ok(DMatrix::from_fn(sys.equations.len(), sys.n_tets, |row, t| {
        let [a, b, c] = sys.equations[row].exponents[t];
        if (a, b, c) == (0, 0, 0) {
            return C::new(0.0, 0.0);
        }
        let z = s.triple(t).z;
        // d/dz of log z, log v = −log(1−z), log w = log(1−1/z)
        a as f64 * z.inv() + b as f64 / (one - z) + c as f64 / (z * (z - one))
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::triangulation::{parse_cusp_curves, parse_triangulation};
    use std::f64::consts::{PI, TAU};

    const BORROMEAN: &str = include_str!("../../../fixtures/borromean.tri");
    const BORROMEAN_CURVES: &str = include_str!("../../../fixtures/borromean.curves");
    const FIGURE8: &str = include_str!("../../../fixtures/figure8.tri");
    const FIGURE8_CURVES: &str = include_str!("../../../fixtures/figure8.curves");

    fn borromean_system() -> EquationSystem {
        let t = parse_triangulation(BORROMEAN).unwrap();
        let curves = parse_cusp_curves(BORROMEAN_CURVES, &t).unwrap();
        build_system(&t, &curves).unwrap()
    }

    fn borromean_solution() -> ShapeAssignment {
        let h = C::new(0.5, 0.5);
        let o = C::new(1.0, 1.0);
        let i = C::new(0.0, 1.0);
        ShapeAssignment::from_shapes(&[h, o, o, i, o, h, i, h]).unwrap()
    }

    fn exponent_map(eq: &GluingEquation) -> Vec<(usize, [i32; 3])> {
        eq.exponents
            .iter()
            .enumerate()
            .filter(|(_, e)| **e != [0; 3])
            .map(|(t, e)| (t, *e))
            .collect()
    }

    #[test]
    fn borromean_system_shape() {
        let sys = borromean_system();
        assert_eq!(sys.equations.len(), 14);
        assert_eq!(sys.equations.iter().filter(|e| e.kind == EquationKind::Edge).count(), 8);
        for eq in &sys.equations {
            match eq.kind {
                EquationKind::Edge => {
                    assert_eq!(eq.target_arg, TAU);
                    assert!(eq.exponents.iter().flatten().all(|&e| e >= 0));
                }
                EquationKind::Cusp => assert_eq!(eq.target_arg, 0.0),
            }
        }
        // an edge equation with corner multiset z0 w1 z2 w3 z4 z5 v6 v7
        let want = vec![
            (0, [1, 0, 0]),
            (1, [0, 0, 1]),
            (2, [1, 0, 0]),
            (3, [0, 0, 1]),
            (4, [1, 0, 0]),
            (5, [1, 0, 0]),
            (6, [0, 1, 0]),
            (7, [0, 1, 0]),
        ];
        assert!(sys
            .equations
            .iter()
            .filter(|e| e.kind == EquationKind::Edge)
            .any(|e| exponent_map(e) == want));
        // cusp-0 meridian is z4 / v5
        let meri = sys
            .equations
            .iter()
            .find(|e| e.source == EquationSource::Curve { cusp: 0, name: "meridian".into() })
            .unwrap();
        assert_eq!(exponent_map(meri), vec![(4, [1, 0, 0]), (5, [0, -1, 0])]);
    }

    #[test]
    fn edge_degrees_match_class_sizes() {
        let t = parse_triangulation(BORROMEAN).unwrap();
        let classes = edge_classes(&t).unwrap();
        let sys = borromean_system();
        for eq in sys.equations.iter().filter(|e| e.kind == EquationKind::Edge) {
            let EquationSource::EdgeClass(i) = eq.source else { panic!() };
            let degree: i32 = eq.exponents.iter().flatten().sum();
            assert_eq!(degree as usize, classes[i].members.len());
        }
    }

    #[test]
    fn figure8_edge_equations_have_degree_six() {
        let t = parse_triangulation(FIGURE8).unwrap();
        let curves = parse_cusp_curves(FIGURE8_CURVES, &t).unwrap();
        let sys = build_system(&t, &curves).unwrap();
        let edge: Vec<_> =
            sys.equations.iter().filter(|e| e.kind == EquationKind::Edge).collect();
        assert_eq!(edge.len(), 2);
        for eq in edge {
            assert_eq!(eq.exponents.iter().flatten().sum::<i32>(), 6);
        }
    }

    #[test]
    fn missing_curves_detected() {
        let t = parse_triangulation(BORROMEAN).unwrap();
        let curves = parse_cusp_curves(BORROMEAN_CURVES, &t).unwrap();
        let err = build_system(&t, &curves[..5]).unwrap_err();
        assert!(matches!(err, EqError::MissingCurves { cusp: 2, count: 1 }));
    }

    #[test]
    fn holonomy_invariant_examples() {
        let sys = borromean_system();
        let s = borromean_solution();
        for eq in &sys.equations {
            let h = holonomy_invariant(eq, &s);
            assert!((h - C::new(1.0, 0.0)).norm() < 1e-12, "{:?}: {h}", eq.source);
        }
        let empty = GluingEquation {
            kind: EquationKind::Cusp,
            exponents: vec![[0; 3]; 8],
            target_arg: 0.0,
            source: EquationSource::Curve { cusp: 0, name: "null".into() },
        };
        assert_eq!(holonomy_invariant(&empty, &s), C::new(1.0, 0.0));
    }

    #[test]
    fn residuals_vanish_at_solution() {
        let sys = borromean_system();
        let r = residuals(&sys, &borromean_solution()).unwrap();
        for (eq, ri) in sys.equations.iter().zip(&r) {
            assert!(ri.norm() < 1e-12, "{:?}: {ri}", eq.source);
        }
    }

    #[test]
    fn residuals_at_uniform_seed() {
        let t = parse_triangulation(FIGURE8).unwrap();
        let curves = parse_cusp_curves(FIGURE8_CURVES, &t).unwrap();
        let sys = build_system(&t, &curves).unwrap();
        let s = ShapeAssignment::from_shapes(&[C::new(0.0, 1.0); 2]).unwrap();
        let r = residuals(&sys, &s).unwrap();
        let half_ln2 = 0.5 * 2.0_f64.ln();
        let mut edge_expect = vec![C::new(half_ln2, PI / 4.0), C::new(-half_ln2, -PI / 4.0)];
        let mut edge_got: Vec<_> = r[..2].to_vec();
        edge_expect.sort_by(|a, b| a.re.total_cmp(&b.re));
        edge_got.sort_by(|a, b| a.re.total_cmp(&b.re));
        for (g, e) in edge_got.iter().zip(&edge_expect) {
            assert!((g - e).norm() < 1e-12, "got {g}, want {e}");
        }
    }

    #[test]
    fn residuals_require_upper_half_plane() {
        let sys = borromean_system();
        let mut zs = [C::new(0.0, 1.0); 8];
        zs[3] = C::new(0.5, -0.5);
        let s = ShapeAssignment::from_shapes(&zs).unwrap();
        assert!(residuals(&sys, &s).is_err());
        assert!(jacobian(&sys, &s).is_err());
    }

    #[test]
    fn exp_of_residual_matches_product() {
        let sys = borromean_system();
        for s in [
            borromean_solution(),
            ShapeAssignment::from_shapes(&[C::new(0.0, 1.0); 8]).unwrap(),
            ShapeAssignment::from_shapes(&[
                C::new(0.3, 0.8),
                C::new(-0.2, 1.4),
                C::new(0.9, 0.4),
                C::new(0.5, 2.0),
                C::new(-1.1, 0.6),
                C::new(0.1, 0.3),
                C::new(0.7, 1.2),
                C::new(1.8, 0.9),
            ])
            .unwrap(),
        ] {
            let r = residuals(&sys, &s).unwrap();
            for (eq, ri) in sys.equations.iter().zip(&r) {
                let log_side = (ri + C::new(0.0, eq.target_arg)).exp();
                let product = holonomy_invariant(eq, &s);
                assert!((log_side - product).norm() < 1e-10, "{:?}", eq.source);
            }
        }
    }

    #[test]
    fn jacobian_entries() {
        let single = |exps: [i32; 3]| EquationSystem {
            equations: vec![GluingEquation {
                kind: EquationKind::Edge,
                exponents: vec![exps],
                target_arg: TAU,
                source: EquationSource::EdgeClass(0),
            }],
            n_tets: 1,
        };
        let at = |z: C| ShapeAssignment::from_shapes(&[z]).unwrap();
        let j = jacobian(&single([1, 0, 0]), &at(C::new(0.0, 1.0))).unwrap();
        assert!((j[(0, 0)] - C::new(0.0, -1.0)).norm() < 1e-15);
        let j = jacobian(&single([0, 1, 0]), &at(C::new(1.0, 1.0))).unwrap();
        assert!((j[(0, 0)] - C::new(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let sys = borromean_system();
        for s in [
            borromean_solution(),
            ShapeAssignment::from_shapes(&[
                C::new(0.4, 0.9),
                C::new(1.1, 1.2),
                C::new(0.8, 0.7),
                C::new(-0.1, 1.1),
                C::new(0.9, 1.3),
                C::new(0.6, 0.4),
                C::new(0.2, 1.0),
                C::new(0.5, 0.6),
            ])
            .unwrap(),
        ] {
            let j = jacobian(&sys, &s).unwrap();
            let h = 1e-6;
            for t in 0..8 {
                let mut plus = s.z_values();
                let mut minus = s.z_values();
                plus[t] += C::new(h, 0.0);
                minus[t] -= C::new(h, 0.0);
                let rp = residuals(&sys, &ShapeAssignment::from_shapes(&plus).unwrap()).unwrap();
                let rm = residuals(&sys, &ShapeAssignment::from_shapes(&minus).unwrap()).unwrap();
                for (row, (p, m)) in rp.iter().zip(&rm).enumerate() {
                    let fd = (p - m) / (2.0 * h);
                    assert!((j[(row, t)] - fd).norm() < 1e-5, "row {row}, tet {t}");
                }
            }
        }
    }
}
