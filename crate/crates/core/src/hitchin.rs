//! Hitchin-section Higgs fields `φ_u = X₋ + Σ P_{n+1} X_n`, the natural
//! metric `h_♮(R) = (R/λ)^H` and the rescaling action on the Hitchin base.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lie::sln::h_diagonal;
use crate::lie::PrincipalTriple;
use crate::linalg::{c, commutator, frobenius, real_diag, ComplexMatrix, C64, I};
use crate::surface::metric::disk_lambda;
use crate::surface::{DifferentialData, SurfaceMesh};

pub use crate::linalg::char_poly;

/// Coordinate chart a local expression refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Chart {
    Disk,
    UpperHalfPlane,
}

/// A point `u = (φ₂, …, φ_N)` of the Hitchin base. Absent orders are zero.
#[derive(Clone, Debug)]
pub struct HitchinPoint {
    pub n: usize,
    pub differentials: Vec<DifferentialData>,
}

impl HitchinPoint {
    pub fn new(n: usize, differentials: Vec<DifferentialData>) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!("rank N must be at least 2, got {n}")));
        }
        let mut last = 1;
        for d in &differentials {
            if d.order <= last {
                return Err(Error::InvalidArgument(
                    "differential orders must be strictly increasing".into(),
                ));
            }
            if d.order > n {
                return Err(Error::InvalidArgument(format!(
                    "differential of order {} exceeds N = {n}",
                    d.order
                )));
            }
            last = d.order;
        }
        Ok(HitchinPoint { n, differentials })
    }

    /// The uniformizing point `u = 0`.
    pub fn zero(n: usize) -> Self {
        HitchinPoint {
            n,
            differentials: Vec::new(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.differentials.iter().all(DifferentialData::is_zero)
    }

    /// `(P₂(z), …, P_N(z))`, zeros for absent orders.
    pub fn coefficients(&self, z: C64) -> Vec<C64> {
        let mut out = vec![c(0.0); self.n - 1];
        for d in &self.differentials {
            out[d.order - 2] = d.value(z);
        }
        out
    }

    /// `(P₂'(z), …, P_N'(z))`.
    pub fn derivatives(&self, z: C64) -> Vec<C64> {
        let mut out = vec![c(0.0); self.n - 1];
        for d in &self.differentials {
            out[d.order - 2] = d.derivative(z);
        }
        out
    }

    pub fn differential(&self, order: usize) -> Option<&DifferentialData> {
        self.differentials.iter().find(|d| d.order == order)
    }
}

/// `a·u = (a²φ₂, …, a^Nφ_N)`.
pub fn scale_u(u: &HitchinPoint, a: f64) -> Result<HitchinPoint> {
    if a <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "scale factor must be positive, got {a}"
        )));
    }
    Ok(HitchinPoint {
        n: u.n,
        differentials: u
            .differentials
            .iter()
            .map(|d| d.scaled(c(a.powi(d.order as i32))))
            .collect(),
    })
}

/// The `dz` coefficient of `φ_u` at one point.
#[derive(Clone, Debug)]
pub struct HiggsFieldEval {
    pub chart: Chart,
    pub point: C64,
    pub matrix: ComplexMatrix,
}

/// `X₋ + Σ_n P_{n+1}(z) X_n` from already evaluated coefficients.
pub fn higgs_matrix(triple: &PrincipalTriple, coefficients: &[C64]) -> Result<ComplexMatrix> {
    if coefficients.len() > triple.xn.len() {
        return Err(Error::InvalidArgument(format!(
            "{} coefficients but only {} highest-weight vectors",
            coefficients.len(),
            triple.xn.len()
        )));
    }
    let mut m = triple.xminus.clone();
    for (p, x) in coefficients.iter().zip(&triple.xn) {
        if *p != c(0.0) {
            m += x * *p;
        }
    }
    Ok(m)
}

pub fn higgs_field(u: &HitchinPoint, triple: &PrincipalTriple, chart: Chart, point: C64) -> Result<HiggsFieldEval> {
    if u.n != triple.n_dim {
        return Err(Error::InvalidArgument(format!(
            "Hitchin point has N = {} but the triple acts on dimension {}",
            u.n, triple.n_dim
        )));
    }
    Ok(HiggsFieldEval {
        chart,
        point,
        matrix: higgs_matrix(triple, &u.coefficients(point))?,
    })
}

/// `h_♮(R)` at a point with metric factor `lambda`: `diag(R^{N+1-2i} λ^{2i-N-1})`.
pub fn natural_metric_h_lambda(n: usize, r: f64, lambda: f64) -> Result<ComplexMatrix> {
    if r <= 0.0 {
        return Err(Error::InvalidArgument(format!("R must be positive, got {r}")));
    }
    if n < 2 {
        return Err(Error::InvalidArgument(format!("N must be at least 2, got {n}")));
    }
    let q = r / lambda;
    Ok(real_diag(&h_diagonal(n).iter().map(|&h| q.powf(h)).collect::<Vec<_>>()))
}

/// `h_♮(R)` at a disk point.
pub fn natural_metric_h(n: usize, r: f64, point: C64) -> Result<ComplexMatrix> {
    let lambda = crate::surface::natural_metric_lambda(point)?;
    natural_metric_h_lambda(n, r, lambda)
}

/// `A^{†_h} = h⁻¹ A† h` for the Hermitian metric `h(s, t) = s† h t`.
pub fn h_adjoint(a: &ComplexMatrix, h: &ComplexMatrix) -> Result<ComplexMatrix> {
    let hinv = h
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::InvalidArgument("metric is singular".into()))?;
    Ok(hinv * a.adjoint() * h)
}

/// Residual of `S⁻¹ hᵀ S = h⁻¹` (entrywise, `S` real).
pub fn metric_s_compatibility(h: &ComplexMatrix) -> f64 {
    let n = h.nrows();
    let s = crate::linalg::antidiagonal_ones(n);
    let lhs = &s * h.transpose() * &s;
    let rhs = h
        .clone()
        .try_inverse()
        .unwrap_or_else(|| ComplexMatrix::zeros(n, n))
        .map(|z| z.conj());
    crate::linalg::max_diff(&lhs, &rhs)
}

/// Residual of `S⁻¹ φᵀ S = φ`.
pub fn s_self_adjoint_residual(m: &ComplexMatrix) -> f64 {
    crate::linalg::max_diff(&crate::lie::sln::s_transpose(m), m)
}

/// Report of the finite-difference Hitchin residual for `(h_♮(R), φ₀)`.
#[derive(Clone, Debug, Serialize)]
pub struct HarmonicityReport {
    pub n: usize,
    pub r: f64,
    pub vertices: usize,
    pub max_edge: f64,
    /// `max_v |F + R²[φ₀, φ₀^†]|_F / λ²`.
    pub max_residual: f64,
    /// Area-weighted L² norm of the same quantity.
    pub l2_residual: f64,
}

/// `F_{zz̄} + R² [Φ, Φ^{†_h}]` at `z` (coefficient of `dz∧dz̄`), with the
/// curvature `-∂_z̄(h⁻¹∂_z h)` taken by nested centred differences of step
/// `delta`.
pub fn hitchin_residual_fd<H>(h_of: H, phi: &ComplexMatrix, r: f64, z: C64, delta: f64) -> Result<ComplexMatrix>
where
    H: Fn(C64) -> Result<ComplexMatrix>,
{
    let connection = |w: C64| -> Result<ComplexMatrix> {
        let hw = h_of(w)?;
        let dx = (h_of(w + delta)? - h_of(w - delta)?) / c(2.0 * delta);
        let dy = (h_of(w + I * delta)? - h_of(w - I * delta)?) / c(2.0 * delta);
        let dz = (dx - dy * I) * c(0.5);
        let inv = hw
            .try_inverse()
            .ok_or_else(|| Error::InvalidArgument("metric is singular".into()))?;
        Ok(inv * dz)
    };
    let ax = (connection(z + delta)? - connection(z - delta)?) / c(2.0 * delta);
    let ay = (connection(z + I * delta)? - connection(z - I * delta)?) / c(2.0 * delta);
    let dzbar = (ax + ay * I) * c(0.5);
    let h = h_of(z)?;
    let dag = h_adjoint(phi, &h)?;
    Ok(-dzbar + commutator(phi, &dag) * c(r * r))
}

/// Evaluate the uniformizing Hitchin residual at every mesh vertex with a
/// step of half the local mesh size.
pub fn verify_uniformizing_harmonicity(
    r: f64,
    n: usize,
    triple: &PrincipalTriple,
    mesh: &SurfaceMesh,
) -> Result<HarmonicityReport> {
    let phi = triple.xminus.clone();
    let mut max_res: f64 = 0.0;
    let mut l2 = 0.0;
    for v in 0..mesh.num_vertices() {
        let z = mesh.points[v];
        // The nested stencil reaches 2δ; keep it well inside the disk.
        let delta = (0.5 * mesh.local_size[v]).min(0.25 * (1.0 - z.norm()));
        let res = hitchin_residual_fd(|w| natural_metric_h_lambda(n, r, disk_lambda(w)), &phi, r, z, delta)?;
        let lam = mesh.lambda[v];
        let val = frobenius(&res) / (lam * lam);
        max_res = max_res.max(val);
        l2 += val * val * lam * lam * mesh.euclid_area[v];
    }
    Ok(HarmonicityReport {
        n,
        r,
        vertices: mesh.num_vertices(),
        max_edge: mesh.max_edge(),
        max_residual: max_res,
        l2_residual: l2.sqrt(),
    })
}
