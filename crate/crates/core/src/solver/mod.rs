//! Newton solvers for the rescaled Hitchin equation on a surface mesh: the
//! scalar equation for `N = 2` and the matrix equation for `SL(N)`.

pub mod chi;
pub mod scalar;

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hitchin::HitchinPoint;
use crate::linalg::C64;
use crate::parallel::par_map;
use crate::surface::SurfaceMesh;

pub use chi::{residual_matrix_chi, solve_chi, ChiField, ChiProblem, ChiSolution};
pub use scalar::{f4_oracle, linearization_scalar, phi2_norm_sq, residual_scalar, solve_scalar, ScalarSolution};

/// Newton and Krylov parameters.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    /// Target sup-norm of the nonlinear residual.
    pub newton_tol: f64,
    pub max_newton: usize,
    /// Relative residual target of each linear solve.
    pub linear_tol: f64,
    pub max_linear: usize,
    /// Smallest Newton step length tried by the backtracking line search.
    pub min_step: f64,
    pub threads: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            newton_tol: 1e-11,
            max_newton: 30,
            linear_tol: 1e-10,
            max_linear: 5000,
            min_step: 1.0 / 64.0,
            threads: 1,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.newton_tol > 0.0 && self.linear_tol > 0.0 && self.min_step > 0.0) {
            return Err(Error::InvalidArgument("solver tolerances must be positive".into()));
        }
        if self.max_newton == 0 || self.max_linear == 0 {
            return Err(Error::InvalidArgument("iteration limits must be positive".into()));
        }
        Ok(())
    }
}

/// `(P₂, …, P_N)` evaluated once at every mesh vertex.
#[derive(Clone, Debug)]
pub struct HiggsSamples {
    pub n: usize,
    pub coeffs: Vec<Vec<C64>>,
}

impl HiggsSamples {
    pub fn new(mesh: &SurfaceMesh, u: &HitchinPoint, threads: usize) -> Self {
        let coeffs = par_map(mesh.num_vertices(), threads, |v| u.coefficients(mesh.points[v]));
        HiggsSamples { n: u.n, coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.iter().all(|p| p.norm() == 0.0))
    }
}

/// Summary written next to a solution dump.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SolutionSummary {
    #[serde(rename = "R")]
    pub r: f64,
    pub sup_norm: f64,
    pub l2_norm: f64,
    pub iterations: usize,
    pub residual: f64,
}

/// Text dump with one line `vertex_index value...` per vertex.
pub fn format_solution(values: &[Vec<f64>]) -> String {
    let mut out = String::new();
    for (i, row) in values.iter().enumerate() {
        let _ = write!(out, "{i}");
        for v in row {
            let _ = write!(out, " {v:.17e}");
        }
        out.push('\n');
    }
    out
}

/// Slope of `log y` against `log x` by least squares.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = x
        .iter()
        .zip(y)
        .filter(|(a, b)| **a > 0.0 && **b > 0.0 && b.is_finite())
        .map(|(a, b)| (a.ln(), b.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    Some(sxy / sxx)
}
