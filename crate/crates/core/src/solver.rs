//! Damped Newton least-squares solver for the gluing system over
//! upper-half-plane shapes.
//!
//! The system is rectangular and mildly redundant, so each Newton step is
//! the minimum-norm least-squares solution of J·δ = −r via SVD. A
//! backtracking line search keeps every iterate strictly inside the upper
//! half-plane and strictly decreases the residual norm; the shapes are
//! treated as holomorphic variables, so no real/imaginary splitting is
//! needed.

use crate::equations::{jacobian, residuals, EquationSystem};
use crate::shapes::{ShapeAssignment, ShapeError};
use crate::C;
use nalgebra::DVector;
use thiserror::Error;

const MAX_HALVINGS: usize = 30;

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("invalid solver configuration: {0}")]
    BadConfig(String),
    #[error("did not converge within {iterations} iterations (residual {final_residual:.3e})")]
    NoConvergence { iterations: usize, final_residual: f64 },
    #[error("line search stalled at iteration {iteration} (residual {residual:.3e})")]
    StepCollapse { iteration: usize, residual: f64 },
    #[error(transparent)]
    Shape(#[from] ShapeError),
}

#[derive(Clone, Debug)]
pub struct SolverConfig {
    pub max_iters: usize,
    /// Convergence threshold on the residual 2-norm.
    pub tol: f64,
    /// Step-length factor applied on each backtrack (at most 30 times).
    pub damping: f64,
    /// Per-tetrahedron seed; `None` places every shape at i.
    pub initial: Option<Vec<C>>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { max_iters: 100, tol: 1e-12, damping: 0.5, initial: None }
    }
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    pub shapes: ShapeAssignment,
    /// Number of accepted Newton steps.
    pub iterations: usize,
    pub final_residual: f64,
    /// All shapes strictly in the upper half-plane.
    pub geometric: bool,
    /// Residual 2-norm before each step and after the last: entry 0 is the
    /// seed's residual, entry k the norm after the k-th accepted step.
    pub residual_history: Vec<f64>,
}

fn norm2(r: &[C]) -> f64 {
    r.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

fn in_upper_half_plane(zs: &[C]) -> bool {
    zs.iter().all(|z| z.im > 0.0 && z.is_finite())
}

/// Run the damped Newton iteration to a geometric solution of `sys`.
pub fn solve(sys: &EquationSystem, cfg: &SolverConfig) -> Result<SolveReport, SolveError> {
    if cfg.tol.is_nan() || cfg.tol <= 0.0 {
        return Err(SolveError::BadConfig(format!("tol must be positive, got {}", cfg.tol)));
    }
    if !(cfg.damping > 0.0 && cfg.damping < 1.0) {
        return Err(SolveError::BadConfig(format!(
            "damping must lie in (0, 1), got {}",
            cfg.damping
        )));
    }
    let n = sys.n_tets;
    let mut z = match &cfg.initial {
        Some(seed) => {
            if seed.len() != n {
                return Err(SolveError::BadConfig(format!(
                    "seed has {} entries for {n} tetrahedra",
                    seed.len()
                )));
            }
            seed.clone()
        }
        None => vec![C::new(0.0, 1.0); n],
    };
    if !in_upper_half_plane(&z) {
        return Err(SolveError::BadConfig(
            "seed shapes must lie in the open upper half-plane".into(),
        ));
    }

    let mut shapes = ShapeAssignment::from_shapes(&z)?;
    let mut r = residuals(sys, &shapes)?;
    let mut rnorm = norm2(&r);
    let mut residual_history = vec![rnorm];
    let mut iterations = 0;

    loop {
        if rnorm <= cfg.tol {
            return Ok(SolveReport {
                shapes,
                iterations,
                final_residual: rnorm,
                geometric: true,
                residual_history,
            });
        }
        if iterations >= cfg.max_iters {
            return Err(SolveError::NoConvergence { iterations, final_residual: rnorm });
        }

        let j = jacobian(sys, &shapes)?;
        let neg_r = DVector::from_iterator(r.len(), r.iter().map(|c| -c));
        let delta = j
            .svd(true, true)
            .solve(&neg_r, 1e-14)
            .map_err(|e| SolveError::BadConfig(e.to_string()))?;

        let mut scale = 1.0;
        let mut accepted = false;
        for _ in 0..=MAX_HALVINGS {
            let cand: Vec<C> = z.iter().zip(delta.iter()).map(|(zi, d)| zi + scale * d).collect();
            if in_upper_half_plane(&cand) {
                let cand_shapes = ShapeAssignment::from_shapes(&cand)?;
                let cand_r = residuals(sys, &cand_shapes)?;
                let cand_norm = norm2(&cand_r);
                if cand_norm < rnorm {
                    z = cand;
                    shapes = cand_shapes;
                    r = cand_r;
                    rnorm = cand_norm;
                    accepted = true;
                    break;
                }
            }
            scale *= cfg.damping;
        }
        if !accepted {
            return Err(SolveError::StepCollapse { iteration: iterations, residual: rnorm });
        }
        iterations += 1;
        residual_history.push(rnorm);
    }
}
