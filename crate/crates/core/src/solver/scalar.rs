//! The scalar equation for `N = 2`: with `g = (g_♮/R²) e^{2f}`,
//! `N(f, R) = Δ_{g_♮} f + 4(1 − e^{2f} + R⁴‖φ₂‖² e^{−2f})`, where
//! `‖φ₂‖² = |P₂|² λ⁻⁴` is the pointwise norm in the natural metric.

use super::{HiggsSamples, SolverConfig};
use crate::error::{Error, Result};
use crate::sparse::{conjugate_gradient, CsrMatrix};
use crate::surface::SurfaceMesh;

/// Outcome of a scalar Newton solve; `f` is stored per vertex class.
#[derive(Clone, Debug)]
pub struct ScalarSolution {
    pub r: f64,
    pub f: Vec<f64>,
    pub iterations: usize,
    /// Final residual sup-norm.
    pub residual: f64,
    /// Residual sup-norm before each Newton step and after the last.
    pub history: Vec<f64>,
}

impl ScalarSolution {
    pub fn sup_norm(&self) -> f64 {
        sup(&self.f)
    }
}

pub(crate) fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// `‖φ₂‖²_{g_♮}` per class, from the samples at the class representatives.
pub fn phi2_norm_sq(mesh: &SurfaceMesh, samples: &HiggsSamples) -> Vec<f64> {
    mesh.class_rep
        .iter()
        .map(|&v| {
            let p2 = samples.coeffs[v].first().copied().unwrap_or_default();
            p2.norm_sqr() / mesh.lambda[v].powi(4)
        })
        .collect()
}

fn check_len(mesh: &SurfaceMesh, f: &[f64], norm2: &[f64]) -> Result<()> {
    let nc = mesh.num_classes();
    if f.len() != nc || norm2.len() != nc {
        return Err(Error::InvalidArgument(format!(
            "field sizes {} / {} do not match the mesh ({nc} classes)",
            f.len(),
            norm2.len()
        )));
    }
    Ok(())
}

/// `N(f, R)` per class.
pub fn residual_scalar(mesh: &SurfaceMesh, f: &[f64], r: f64, norm2: &[f64]) -> Result<Vec<f64>> {
    check_len(mesh, f, norm2)?;
    let r4 = r.powi(4);
    let mut out = mesh.laplacian(f);
    for ((o, &fi), &s) in out.iter_mut().zip(f).zip(norm2) {
        *o += 4.0 * (-(2.0 * fi).exp_m1() + r4 * s * (-2.0 * fi).exp());
    }
    Ok(out)
}

/// `Δ − 8e^{2f} − 8R⁴‖φ₂‖²e^{−2f}` as a sparse matrix on classes.
pub fn linearization_scalar(mesh: &SurfaceMesh, f: &[f64], r: f64, norm2: &[f64]) -> Result<CsrMatrix> {
    check_len(mesh, f, norm2)?;
    let inv_area: Vec<f64> = mesh.class_area.iter().map(|a| 1.0 / a).collect();
    Ok(mesh
        .stiffness()
        .scale_rows(&inv_area)
        .add_diagonal(&potential(f, r, norm2)))
}

fn potential(f: &[f64], r: f64, norm2: &[f64]) -> Vec<f64> {
    let r4 = r.powi(4);
    f.iter()
        .zip(norm2)
        .map(|(&fi, &s)| -8.0 * (2.0 * fi).exp() - 8.0 * r4 * s * (-2.0 * fi).exp())
        .collect()
}

/// Solve `(−K + diag(A·m)) x = A·b` by Jacobi-preconditioned CG, which is
/// `(Δ − m) x = −b` multiplied by `−A`.
fn solve_shifted(mesh: &SurfaceMesh, m: &[f64], b: &[f64], config: &SolverConfig) -> Result<Vec<f64>> {
    let k = mesh.stiffness();
    let area = &mesh.class_area;
    let shift: Vec<f64> = m.iter().zip(area).map(|(mi, a)| mi * a).collect();
    let kd = k.diagonal();
    let inv_diag: Vec<f64> = kd.iter().zip(&shift).map(|(d, s)| 1.0 / (s - d)).collect();
    let rhs: Vec<f64> = b.iter().zip(area).map(|(bi, a)| bi * a).collect();
    let mut x = vec![0.0; b.len()];
    conjugate_gradient(
        |v, out| {
            k.matvec_into(v, out);
            for i in 0..v.len() {
                out[i] = shift[i] * v[i] - out[i];
            }
        },
        &rhs,
        &mut x,
        &inv_diag,
        config.linear_tol,
        config.max_linear,
    )?;
    Ok(x)
}

/// Damped Newton from `f = 0` with step halving until the residual
/// sup-norm decreases.
pub fn solve_scalar(
    mesh: &SurfaceMesh,
    r: f64,
    samples: &HiggsSamples,
    config: &SolverConfig,
) -> Result<ScalarSolution> {
    config.validate()?;
    if r < 0.0 || !r.is_finite() {
        return Err(Error::InvalidArgument(format!("R must be non-negative, got {r}")));
    }
    let norm2 = phi2_norm_sq(mesh, samples);
    let mut f = vec![0.0; mesh.num_classes()];
    let mut res = residual_scalar(mesh, &f, r, &norm2)?;
    let mut history = vec![sup(&res)];
    for it in 0..config.max_newton {
        let current = *history.last().unwrap();
        if current <= config.newton_tol {
            return Ok(ScalarSolution {
                r,
                f,
                iterations: it,
                residual: current,
                history,
            });
        }
        let m: Vec<f64> = potential(&f, r, &norm2).iter().map(|p| -p).collect();
        // J δ = −N  ⇔  (Δ − m) δ = −N.
        let delta = solve_shifted(mesh, &m, &res, config)?;
        let mut step = 1.0;
        loop {
            let trial: Vec<f64> = f.iter().zip(&delta).map(|(a, d)| a + step * d).collect();
            let trial_res = residual_scalar(mesh, &trial, r, &norm2)?;
            let s = sup(&trial_res);
            if s < current {
                f = trial;
                res = trial_res;
                history.push(s);
                break;
            }
            step *= 0.5;
            if step < config.min_step {
                return Err(Error::NoConvergence {
                    iterations: it + 1,
                    residual: current,
                });
            }
        }
    }
    let last = *history.last().unwrap();
    if last <= config.newton_tol {
        return Ok(ScalarSolution {
            r,
            f,
            iterations: config.max_newton,
            residual: last,
            history,
        });
    }
    Err(Error::NoConvergence {
        iterations: config.max_newton,
        residual: last,
    })
}

/// The order-`R⁴` coefficient: `(Δ − 8) f₄ = −4‖φ₂‖²`.
pub fn f4_oracle(mesh: &SurfaceMesh, samples: &HiggsSamples, config: &SolverConfig) -> Result<Vec<f64>> {
    let norm2 = phi2_norm_sq(mesh, samples);
    let b: Vec<f64> = norm2.iter().map(|s| 4.0 * s).collect();
    solve_shifted(mesh, &vec![8.0; norm2.len()], &b, config)
}
