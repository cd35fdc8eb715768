//! The extended complex plane C ∪ {∞}, with ∞ as a first-class exact value.

use crate::C;

/// A point of the Riemann sphere.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExtC {
    Finite(C),
    Infinity,
}

impl ExtC {
    pub fn finite(re: f64, im: f64) -> Self {
        ExtC::Finite(C::new(re, im))
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, ExtC::Infinity)
    }

    pub fn as_finite(&self) -> Option<C> {
        match self {
            ExtC::Finite(z) => Some(*z),
            ExtC::Infinity => None,
        }
    }

    /// Chordal distance on the Riemann sphere: bounded, and continuous at ∞.
    pub fn chordal(self, other: ExtC) -> f64 {
        let lift = |p: ExtC| match p {
            ExtC::Finite(z) => (z, 1.0 / (1.0 + z.norm_sqr()).sqrt()),
            ExtC::Infinity => (C::new(0.0, 0.0), 0.0),
        };
        let (u, su) = lift(self);
        let (v, sv) = lift(other);
        match (self, other) {
            (ExtC::Infinity, ExtC::Infinity) => 0.0,
            (ExtC::Infinity, _) => sv,
            (_, ExtC::Infinity) => su,
            _ => (u - v).norm() * su * sv,
        }
    }

    /// Coincidence within `tol`; ∞ only ever equals ∞.
    pub fn approx_eq(self, other: ExtC, tol: f64) -> bool {
        match (self, other) {
            (ExtC::Infinity, ExtC::Infinity) => true,
            (ExtC::Finite(a), ExtC::Finite(b)) => (a - b).norm() <= tol,
            _ => false,
        }
    }
}

impl From<C> for ExtC {
    fn from(z: C) -> Self {
        ExtC::Finite(z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chordal_basics() {
        let a = ExtC::finite(0.0, 0.0);
        let b = ExtC::finite(3.0, 4.0);
        assert_eq!(a.chordal(a), 0.0);
        assert_eq!(ExtC::Infinity.chordal(ExtC::Infinity), 0.0);
        assert!((a.chordal(b) - b.chordal(a)).abs() < 1e-15);
        // far points approach ∞ in the chordal metric
        let big = ExtC::finite(1e12, 0.0);
        assert!(big.chordal(ExtC::Infinity) < 1e-11);
    }

    #[test]
    fn approx_eq_infinity_is_exact() {
        assert!(ExtC::Infinity.approx_eq(ExtC::Infinity, 0.0));
        assert!(!ExtC::Infinity.approx_eq(ExtC::finite(1e300, 0.0), 1e9));
        assert!(ExtC::finite(1.0, 1.0).approx_eq(ExtC::finite(1.0, 1.0 + 1e-12), 1e-9));
    }
}
