//! Holomorphic differentials `φ_n = P_n(z) dz^n` in the disk chart.

use std::sync::Arc;

use super::bolza::FuchsianSurface;
use crate::error::{Error, Result};
use crate::linalg::{c, C64, I};

/// How `P_n` is produced.
#[derive(Clone, Debug)]
pub enum DifferentialSource {
    /// Truncated Poincaré series `Σ_{|γ| ≤ L} γ'(z)^n` over reduced words;
    /// `terms` holds the `(c, d)` entries of each `γ`.
    Poincare {
        truncation: usize,
        terms: Arc<Vec<(C64, C64)>>,
    },
    /// Constant in the disk chart (not automorphic; local tests only).
    ConstantChart,
    /// Polynomial `Σ coeffs[k] z^k` in the disk chart (local tests only).
    Polynomial(Vec<C64>),
}

/// `P_n` for one order `n`, scaled by `amplitude`.
#[derive(Clone, Debug)]
pub struct DifferentialData {
    pub order: usize,
    pub amplitude: C64,
    pub source: DifferentialSource,
}

impl DifferentialData {
    pub fn constant(order: usize, value: C64) -> Self {
        DifferentialData {
            order,
            amplitude: value,
            source: DifferentialSource::ConstantChart,
        }
    }

    pub fn polynomial(order: usize, coeffs: Vec<C64>) -> Self {
        DifferentialData {
            order,
            amplitude: c(1.0),
            source: DifferentialSource::Polynomial(coeffs),
        }
    }

    pub fn truncation(&self) -> Option<usize> {
        match &self.source {
            DifferentialSource::Poincare { truncation, .. } => Some(*truncation),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.amplitude == c(0.0)
    }

    pub fn scaled(&self, factor: C64) -> Self {
        DifferentialData {
            amplitude: self.amplitude * factor,
            ..self.clone()
        }
    }

    pub fn value(&self, z: C64) -> C64 {
        if self.is_zero() {
            return c(0.0);
        }
        let raw = match &self.source {
            DifferentialSource::ConstantChart => c(1.0),
            DifferentialSource::Polynomial(p) => p.iter().rev().fold(c(0.0), |acc, &a| acc * z + a),
            DifferentialSource::Poincare { terms, .. } => {
                let n = self.order as i32;
                terms
                    .iter()
                    .map(|&(cc, d)| {
                        let w = 1.0 / (cc * z + d);
                        (w * w).powi(n)
                    })
                    .sum()
            }
        };
        self.amplitude * raw
    }

    /// Exact `∂_z P_n`.
    pub fn derivative(&self, z: C64) -> C64 {
        if self.is_zero() {
            return c(0.0);
        }
        let raw = match &self.source {
            DifferentialSource::ConstantChart => c(0.0),
            DifferentialSource::Polynomial(p) => p
                .iter()
                .enumerate()
                .skip(1)
                .rev()
                .fold(c(0.0), |acc, (k, &a)| acc * z + a * k as f64),
            DifferentialSource::Poincare { terms, .. } => {
                let n = self.order as i32;
                terms
                    .iter()
                    .map(|&(cc, d)| {
                        let w = 1.0 / (cc * z + d);
                        -2.0 * n as f64 * cc * w * (w * w).powi(n)
                    })
                    .sum()
            }
        };
        self.amplitude * raw
    }

    /// `max_γ |P(γz) γ'(z)^n - P(z)|` over the eight generators.
    pub fn automorphy_residual(&self, surface: &FuchsianSurface, z: C64) -> f64 {
        let p = self.value(z);
        surface
            .generators
            .iter()
            .map(|g| (self.value(g.apply(z)) * g.derivative(z).powi(self.order as i32) - p).norm())
            .fold(0.0, f64::max)
    }

    /// `|∂_z̄ P|` by centred differences with step `h`.
    pub fn cauchy_riemann_residual(&self, z: C64, h: f64) -> f64 {
        let dx = (self.value(z + h) - self.value(z - h)) / (2.0 * h);
        let dy = (self.value(z + I * h) - self.value(z - I * h)) / (2.0 * h);
        ((dx + I * dy) * 0.5).norm()
    }
}

/// `P_n(z) = Σ_{|γ| ≤ L} γ'(z)^n` over freely reduced words in the
/// generators.
pub fn poincare_series_differential(
    surface: &FuchsianSurface,
    n: usize,
    truncation: usize,
) -> Result<DifferentialData> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "Poincaré series needs order n >= 2, got {n}"
        )));
    }
    let terms: Vec<(C64, C64)> = surface
        .words_up_to(truncation)
        .into_iter()
        .flatten()
        .map(|m| (m.c, m.d))
        .collect();
    Ok(DifferentialData {
        order: n,
        amplitude: c(1.0),
        source: DifferentialSource::Poincare {
            truncation,
            terms: Arc::new(terms),
        },
    })
}

/// Derivative of a holomorphic function by the trapezoidal rule on the
/// Cauchy integral over a circle of radius `r`; spectrally accurate.
pub fn contour_derivative<F: Fn(C64) -> C64>(f: F, z: C64, r: f64) -> C64 {
    const M: usize = 32;
    let mut acc = c(0.0);
    for k in 0..M {
        let e = C64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / M as f64);
        acc += f(z + r * e) / e;
    }
    acc / (M as f64 * r)
}
