//! The curvature −4 metric `λ²|dz|²` in the disk and upper half-plane charts.
//!
//! The metric factor satisfies `∂_z ∂_z̄ log λ = λ²`.

use crate::error::{Error, Result};
use crate::linalg::{C64, I};

/// `λ(p) = 1/(1 - |p|²)` in the disk.
pub fn natural_metric_lambda(p: C64) -> Result<f64> {
    let r2 = p.norm_sqr();
    if r2 >= 1.0 || !r2.is_finite() {
        return Err(Error::OutsideDisk(p));
    }
    Ok(1.0 / (1.0 - r2))
}

/// Unchecked disk metric factor for hot loops on mesh points.
#[inline]
pub fn disk_lambda(p: C64) -> f64 {
    1.0 / (1.0 - p.norm_sqr())
}

/// `∂_z log λ = z̄ / (1 - |z|²)` in the disk.
#[inline]
pub fn disk_dlog_lambda(z: C64) -> C64 {
    z.conj() / (1.0 - z.norm_sqr())
}

/// `λ = i/(z - z̄)` in the upper half-plane (real and positive there).
pub fn uhp_lambda(z: C64) -> Result<C64> {
    if z.im <= 0.0 {
        return Err(Error::InvalidArgument(format!("{z} is not in the upper half-plane")));
    }
    Ok(I / (z - z.conj()))
}

/// `∂_z λ` and `∂_z² λ` of the half-plane metric, treating `z̄` as
/// independent.
pub fn uhp_lambda_derivatives(z: C64) -> (C64, C64) {
    let d = z - z.conj();
    (-I / (d * d), 2.0 * I / (d * d * d))
}

/// Cayley map from the disk to the upper half-plane, `w ↦ i(1 + w)/(1 - w)`.
pub fn disk_to_uhp(w: C64) -> C64 {
    I * (1.0 + w) / (1.0 - w)
}

pub fn uhp_to_disk(z: C64) -> C64 {
    (z - I) / (z + I)
}
