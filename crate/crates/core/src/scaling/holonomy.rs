//! Parallel transport of flat families around loops of the surface.
//!
//! A loop is a word `γ` in the side-pairing generators. Transport runs
//! along the straight segment from the base point `p` to `γ(p)` in the disk
//! (any path works on the simply connected cover), and the gluing of the
//! family at `γ` identifies the end fibre with the start fibre:
//! `Hol_γ = G_γ(p)⁻¹ Ψ(γ(p))`, `dΨ = −AΨ`, `Ψ(p) = 1`.

use serde::{Deserialize, Serialize};

use super::family::{FlatFamily, LimitFamily, OperFamily};
use crate::error::{Error, Result};
use crate::hitchin::{higgs_matrix, HitchinPoint};
use crate::lie::PrincipalTriple;
use crate::linalg::{c, identity, ComplexMatrix, C64};
use crate::oper::gauge_residual;
use crate::parallel::par_map;
use crate::surface::metric::uhp_lambda_derivatives;
use crate::surface::FuchsianSurface;

/// Step control for the transport integrator.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HolonomyConfig {
    /// Local error target per step (relative to `max(1, ‖Ψ‖)`).
    pub tol: f64,
    pub base_point: [f64; 2],
    pub max_steps: usize,
    pub min_step: f64,
}

impl Default for HolonomyConfig {
    fn default() -> Self {
        HolonomyConfig {
            tol: 1e-10,
            base_point: [0.0, 0.0],
            max_steps: 200_000,
            min_step: 1e-12,
        }
    }
}

impl HolonomyConfig {
    pub fn base(&self) -> C64 {
        C64::new(self.base_point[0], self.base_point[1])
    }
}

#[derive(Clone, Debug)]
pub struct HolonomyRecord {
    pub word: Vec<usize>,
    pub transport: ComplexMatrix,
    pub trace: C64,
    pub steps: usize,
    pub det_err: f64,
}

fn rhs(family: &dyn FlatFamily, z: C64, dz: C64, psi: &ComplexMatrix) -> Result<ComplexMatrix> {
    Ok(-(family.form(z)?.along(dz)) * psi)
}

fn rk4(
    family: &dyn FlatFamily,
    p: C64,
    d: C64,
    t: f64,
    h: f64,
    psi: &ComplexMatrix,
    k1: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    let at = |s: f64| p + d * s;
    let k2 = rhs(family, at(t + h / 2.0), d, &(psi + k1 * c(h / 2.0)))?;
    let k3 = rhs(family, at(t + h / 2.0), d, &(psi + &k2 * c(h / 2.0)))?;
    let k4 = rhs(family, at(t + h), d, &(psi + &k3 * c(h)))?;
    Ok(psi + (k1 + k2 * c(2.0) + k3 * c(2.0) + k4) * c(h / 6.0))
}

fn max_norm(m: &ComplexMatrix) -> f64 {
    m.iter().fold(0.0, |a, x| a.max(x.norm()))
}

/// Transport along `t ↦ p + t(q − p)`, `t ∈ [0, 1]`, by classical RK4 with
/// step doubling. Returns the transport matrix and the number of accepted
/// steps.
pub fn transport(family: &dyn FlatFamily, p: C64, q: C64, config: &HolonomyConfig) -> Result<(ComplexMatrix, usize)> {
    let n = family.rank();
    let d = q - p;
    let mut psi = identity(n);
    if d.norm() == 0.0 {
        return Ok((psi, 0));
    }
    let mut t: f64 = 0.0;
    let mut h: f64 = 0.02;
    let mut steps = 0;
    while t < 1.0 {
        if steps >= config.max_steps {
            return Err(Error::Integration(format!("more than {} steps", config.max_steps)));
        }
        h = h.min(1.0 - t);
        let k1 = rhs(family, p + d * t, d, &psi)?;
        let full = rk4(family, p, d, t, h, &psi, &k1)?;
        let half = rk4(family, p, d, t, h / 2.0, &psi, &(&k1 * c(1.0)))?;
        let k1h = rhs(family, p + d * (t + h / 2.0), d, &half)?;
        let two = rk4(family, p, d, t + h / 2.0, h / 2.0, &half, &k1h)?;
        let err = max_norm(&(&two - &full)) / 15.0;
        let scale = max_norm(&two).max(1.0);
        if err <= config.tol * scale {
            // Richardson extrapolation of the two estimates.
            psi = &two + (&two - &full) * c(1.0 / 15.0);
            t += h;
            steps += 1;
        }
        let factor = if err == 0.0 {
            2.0
        } else {
            (0.9 * (config.tol * scale / err).powf(0.2)).clamp(0.2, 2.0)
        };
        h *= factor;
        if h < config.min_step && t < 1.0 {
            return Err(Error::Integration(format!("step size underflow at t = {t:.6}")));
        }
    }
    Ok((psi, steps))
}

/// Holonomy of `family` around the loop `word`.
pub fn holonomy(
    family: &dyn FlatFamily,
    surface: &FuchsianSurface,
    word: &[usize],
    config: &HolonomyConfig,
) -> Result<HolonomyRecord> {
    if let Some(&k) = word.iter().find(|&&k| k >= surface.generators.len()) {
        return Err(Error::InvalidArgument(format!("no generator with index {k}")));
    }
    let gamma = surface.word(word);
    let p = config.base();
    let (psi, steps) = transport(family, p, gamma.apply(p), config)?;
    let glue = family.gluing(&gamma, p)?;
    let inv = glue
        .try_inverse()
        .ok_or_else(|| Error::Integration("singular gluing matrix".into()))?;
    let transport = inv * psi;
    let det_err = (transport.determinant() - 1.0).norm();
    Ok(HolonomyRecord {
        word: word.to_vec(),
        trace: transport.trace(),
        transport,
        steps,
        det_err,
    })
}

/// Trace comparison between the limit family and the oper for one loop.
#[derive(Clone, Debug, Serialize)]
pub struct TraceComparison {
    pub word: Vec<usize>,
    pub limit_trace: [f64; 2],
    pub oper_trace: [f64; 2],
    pub diff: f64,
    /// `diff / (1 + |tr|)`.
    pub scaled_diff: f64,
    pub det_err: f64,
    pub steps: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct OperComparison {
    pub loops: Vec<TraceComparison>,
    pub max_scaled_diff: f64,
    /// Largest residual of the explicit gauge identity in the UHP chart.
    pub uhp_gauge_residual: f64,
}

fn pair(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

/// Holonomy traces of `∇_{0,ħ,u}` and `∇_{ħ,u}` around each loop, and the
/// UHP gauge identity `M∇_{0,ħ,u}M⁻¹ = d + ħ⁻¹φ_u` at sample points.
pub fn compare_oper(
    triple: &PrincipalTriple,
    hbar: C64,
    u: &HitchinPoint,
    surface: &FuchsianSurface,
    loops: &[Vec<usize>],
    config: &HolonomyConfig,
    threads: usize,
) -> Result<OperComparison> {
    let limit: LimitFamily = super::family::limit_connection(triple, hbar, u)?;
    let oper = OperFamily { triple, hbar, u };
    let results = par_map(loops.len(), threads, |i| -> Result<TraceComparison> {
        let a = holonomy(&limit, surface, &loops[i], config)?;
        let b = holonomy(&oper, surface, &loops[i], config)?;
        let diff = (a.trace - b.trace).norm();
        Ok(TraceComparison {
            word: loops[i].clone(),
            limit_trace: pair(a.trace),
            oper_trace: pair(b.trace),
            diff,
            scaled_diff: diff / (1.0 + b.trace.norm()),
            det_err: a.det_err.max(b.det_err),
            steps: a.steps + b.steps,
        })
    });
    let loops: Vec<TraceComparison> = results.into_iter().collect::<Result<_>>()?;
    let max_scaled_diff = loops.iter().map(|l| l.scaled_diff).fold(0.0, f64::max);
    // The gauge identity is pointwise algebra; constant sample coefficients suffice.
    let mut uhp_gauge_residual = 0.0f64;
    for k in 0..8 {
        let z = C64::new(-1.0 + 0.3 * k as f64, 0.2 + 0.25 * k as f64);
        let coeffs: Vec<C64> = (0..triple.n_dim - 1)
            .map(|j| C64::new(0.3 + 0.1 * j as f64, -0.2 * k as f64))
            .collect();
        let phi = higgs_matrix(triple, &coeffs)?;
        let lambda = crate::surface::metric::uhp_lambda(z)?;
        let (d1, d2) = uhp_lambda_derivatives(z);
        uhp_gauge_residual = uhp_gauge_residual.max(gauge_residual(triple, hbar, &phi, lambda, d1, d2));
    }
    Ok(OperComparison {
        loops,
        max_scaled_diff,
        uhp_gauge_residual,
    })
}

/// The four generator loops `g₀, …, g₃`.
pub fn generator_loops() -> Vec<Vec<usize>> {
    (0..4).map(|k| vec![k]).collect()
}
