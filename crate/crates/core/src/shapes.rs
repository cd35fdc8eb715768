//! Complex dihedral-angle algebra for ideal tetrahedra.
//!
//! An ideal tetrahedron is determined by one complex number z in the upper
//! half-plane. Opposite edges carry equal invariants, and the three pairs
//! carry z, v = 1/(1−z), w = 1 − 1/z, which satisfy z·v·w = −1 and, for
//! geometric shapes, arg z + arg v + arg w = π.

use crate::ext::ExtC;
use crate::C;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ShapeError {
    #[error("degenerate shape {0}: must be finite and different from 0 and 1")]
    Degenerate(C),
    #[error("non-geometric shape {0}: requires Im z > 0")]
    NonGeometric(C),
    #[error("repeated vertices in an ideal tetrahedron")]
    RepeatedVertices,
    #[error("shape index {0} out of range (have {1} tetrahedra)")]
    IndexOutOfRange(usize, usize),
}

/// Which of the three edge invariants a tetrahedron edge carries.
///
/// z lives on edges {0,1} and {2,3}, v on {0,2} and {1,3}, w on {0,3} and
/// {1,2}; every vertex meets each letter exactly once.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Corner {
    Z,
    V,
    W,
}

impl Corner {
    pub const ALL: [Corner; 3] = [Corner::Z, Corner::V, Corner::W];

    /// The invariant carried by the edge between vertices `i` and `j`.
    pub fn of_edge(i: usize, j: usize) -> Corner {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        match (i, j) {
            (0, 1) | (2, 3) => Corner::Z,
            (0, 2) | (1, 3) => Corner::V,
            (0, 3) | (1, 2) => Corner::W,
            _ => panic!("not a tetrahedron edge: ({i},{j})"),
        }
    }

    pub fn value(self, t: &ShapeTriple) -> C {
        match self {
            Corner::Z => t.z,
            Corner::V => t.v,
            Corner::W => t.w,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Corner::Z => 'z',
            Corner::V => 'v',
            Corner::W => 'w',
        }
    }

    pub fn from_letter(c: char) -> Option<Corner> {
        match c {
            'z' => Some(Corner::Z),
            'v' => Some(Corner::V),
            'w' => Some(Corner::W),
            _ => None,
        }
    }

    /// Index 0, 1, 2 for z, v, w: the slot used by equation exponent triples.
    pub fn index(self) -> usize {
        match self {
            Corner::Z => 0,
            Corner::V => 1,
            Corner::W => 2,
        }
    }
}

/// The three edge invariants of one ideal tetrahedron.
#[derive(Clone, Copy, Debug)]
pub struct ShapeTriple {
    pub z: C,
    pub v: C,
    pub w: C,
}

impl ShapeTriple {
    pub fn is_geometric(&self) -> bool {
        self.z.im > 0.0
    }
}

/// Build the full triple from the z invariant. Fails on z ∈ {0, 1} or
/// non-finite z, where the tetrahedron is degenerate.
pub fn shape_triple(z: C) -> Result<ShapeTriple, ShapeError> {
    let one = C::new(1.0, 0.0);
    if !z.re.is_finite() || !z.im.is_finite() || z == C::new(0.0, 0.0) || z == one {
        return Err(ShapeError::Degenerate(z));
    }
    Ok(ShapeTriple {
        z,
        v: (one - z).inv(),
        w: one - z.inv(),
    })
}

/// Shapes for every tetrahedron of a triangulation.
#[derive(Clone, Debug)]
pub struct ShapeAssignment {
    triples: Vec<ShapeTriple>,
}

impl ShapeAssignment {
    pub fn from_shapes(zs: &[C]) -> Result<Self, ShapeError> {
        let triples = zs.iter().map(|&z| shape_triple(z)).collect::<Result<_, _>>()?;
        Ok(ShapeAssignment { triples })
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn triple(&self, tet: usize) -> &ShapeTriple {
        &self.triples[tet]
    }

    pub fn triples(&self) -> &[ShapeTriple] {
        &self.triples
    }

    pub fn z_values(&self) -> Vec<C> {
        self.triples.iter().map(|t| t.z).collect()
    }

    /// All shapes strictly in the upper half-plane.
    pub fn is_geometric(&self) -> bool {
        self.triples.iter().all(|t| t.is_geometric())
    }
}

/// Lobachevsky function Л(θ) = ½ Σ_{n≥1} sin(2nθ)/n², summed until the term
/// bound 1/(2n²) drops below 1e−14.
///
/// sin(2nθ) advances by a three-term recurrence, re-seeded from libm every
/// 2^20 steps so drift stays orders of magnitude under the truncation level;
/// the sum is Kahan-compensated.
pub fn lobachevsky(theta: f64) -> f64 {
    let n_max = (0.5e14_f64).sqrt().ceil() as u64; // first n with 1/(2n²) < 1e-14
    let phi = 2.0 * theta;
    let two_cos = 2.0 * phi.cos();
    let mut s_prev = 0.0_f64; // sin(0·φ)
    let mut s = phi.sin(); // sin(1·φ)
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    for n in 1..n_max {
        let term = s / ((n * n) as f64);
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        if n % (1 << 20) == 0 {
            let x = (n as f64) * phi;
            s_prev = x.sin();
            s = (x + phi).sin();
        } else {
            let next = two_cos * s - s_prev;
            s_prev = s;
            s = next;
        }
    }
    0.5 * sum
}

/// Hyperbolic volume of the ideal tetrahedron with the given shape:
/// Л(arg z) + Л(arg v) + Л(arg w).
pub fn tet_volume(s: &ShapeTriple) -> Result<f64, ShapeError> {
    if !s.is_geometric() {
        return Err(ShapeError::NonGeometric(s.z));
    }
    Ok(lobachevsky(s.z.arg()) + lobachevsky(s.v.arg()) + lobachevsky(s.w.arg()))
}

/// Edge-(0,1) invariant of the ideal tetrahedron with the given boundary
/// vertices: the cross-ratio ((ζ2−ζ0)(ζ3−ζ1)) / ((ζ3−ζ0)(ζ2−ζ1)), with the
/// usual limits when one vertex is ∞. Möbius-invariant.
pub fn tetra_shape_from_vertices(zeta: [ExtC; 4]) -> Result<C, ShapeError> {
    for i in 0..4 {
        for j in (i + 1)..4 {
            if zeta[i].approx_eq(zeta[j], 1e-12) {
                return Err(ShapeError::RepeatedVertices);
            }
        }
    }
    let inf_at = (0..4).find(|&i| zeta[i].is_infinity());
    let f = |i: usize| zeta[i].as_finite().unwrap();
    Ok(match inf_at {
        None => {
            let (z0, z1, z2, z3) = (f(0), f(1), f(2), f(3));
            ((z2 - z0) * (z3 - z1)) / ((z3 - z0) * (z2 - z1))
        }
        Some(0) => (f(3) - f(1)) / (f(2) - f(1)),
        Some(1) => (f(2) - f(0)) / (f(3) - f(0)),
        Some(2) => (f(3) - f(1)) / (f(3) - f(0)),
        Some(3) => (f(2) - f(0)) / (f(2) - f(1)),
        Some(_) => unreachable!(),
    })
}
