//! Toolkit for ideal triangulations of cusped hyperbolic 3-manifolds.
//!
//! The pipeline: parse a triangulation ([`triangulation`]), assemble edge
//! consistency and cusp completeness equations ([`equations`]), solve them
//! over upper-half-plane shapes with a damped Newton iteration ([`solver`]),
//! place the solved tetrahedra in the boundary of upper half-space
//! ([`developing`]), extract PSL(2,C) face pairings and check group relations
//! ([`holonomy`]), and total up hyperbolic volume ([`report`]). Link-group
//! presentations live in [`wirtinger`].

pub mod developing;
pub mod equations;
pub mod ext;
pub mod holonomy;
pub mod report;
pub mod shapes;
pub mod solver;
pub mod triangulation;
pub mod wirtinger;

/// Complex scalar used throughout.
pub type C = num_complex::Complex64;
