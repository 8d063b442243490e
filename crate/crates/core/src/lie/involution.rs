//! The Cartan involution `ρ`, the complex-linear involution `σ`, and the
//! Hermitian form `⟨Y1, Y2⟩ = -B(Y1, ρ Y2)` on the adjoint representation.

use nalgebra::{DMatrix, DVector};

use super::chevalley::{BasisLabel, ChevalleyData};
use super::kostant::kostant_elements;
use super::PrincipalTriple;
use crate::error::{Error, Result};
use crate::linalg::{c, max_diff, ComplexMatrix, C64};

/// `ρ(v) = theta · conj(v)`; `σ(v) = sigma · v`.
#[derive(Clone, Debug)]
pub struct InvolutionPair {
    /// Linear part of `ρ` (it is applied after complex conjugation).
    pub rho: ComplexMatrix,
    pub sigma: ComplexMatrix,
    /// `⟨Y1, Y2⟩ = Y1^T M conj(Y2)`.
    pub hermitian_form: ComplexMatrix,
}

impl InvolutionPair {
    pub fn apply_rho(&self, v: &DVector<C64>) -> DVector<C64> {
        &self.rho * v.map(|z| z.conj())
    }

    pub fn apply_sigma(&self, v: &DVector<C64>) -> DVector<C64> {
        &self.sigma * v
    }

    pub fn inner(&self, a: &DVector<C64>, b: &DVector<C64>) -> C64 {
        (a.transpose() * &self.hermitian_form * b.map(|z| z.conj()))[(0, 0)]
    }

    /// `max |ρ² - 1|`.
    pub fn rho_square_residual(&self) -> f64 {
        let sq = &self.rho * self.rho.map(|z| z.conj());
        max_diff(&sq, &ComplexMatrix::identity(sq.nrows(), sq.nrows()))
    }

    pub fn sigma_square_residual(&self) -> f64 {
        let sq = &self.sigma * &self.sigma;
        max_diff(&sq, &ComplexMatrix::identity(sq.nrows(), sq.nrows()))
    }

    /// `max |σρ - ρσ|` as conjugate-linear maps.
    pub fn commute_residual(&self) -> f64 {
        let sr = &self.sigma * &self.rho;
        let rs = &self.rho * self.sigma.map(|z| z.conj());
        max_diff(&sr, &rs)
    }

    /// Smallest eigenvalue of the Hermitian form (positive-definiteness).
    pub fn form_min_eigenvalue(&self) -> f64 {
        let herm = (&self.hermitian_form + self.hermitian_form.adjoint()) * c(0.5);
        herm.symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }
}

fn theta_matrix(data: &ChevalleyData) -> ComplexMatrix {
    let dim = data.dim();
    let mut theta = ComplexMatrix::zeros(dim, dim);
    for (j, label) in data.basis.iter().enumerate() {
        let (target, sign) = match label {
            BasisLabel::Cartan(_) => (j, -1.0),
            BasisLabel::Root(r) => {
                let neg = BasisLabel::Root(r.iter().map(|x| -x).collect());
                (data.index_of(&neg).expect("negative root"), -1.0)
            }
        };
        theta[(target, j)] = c(sign);
    }
    theta
}

/// `σ` from the sl(2) decomposition: on `v_{n,k} = ad(X_-)^k X_n` it acts by
/// `(-1)^{k+1}`, which is the automorphism with `σ = -1` on `ker ad X_+`
/// and `σ(X_-) = -X_-`.
fn sigma_matrix(data: &ChevalleyData) -> Result<ComplexMatrix> {
    let k = kostant_elements(data)?;
    let dim = data.dim();
    let ad_xm = data.ad_of(&k.xminus);
    let mut cols: Vec<DVector<C64>> = Vec::with_capacity(dim);
    let mut signs: Vec<f64> = Vec::with_capacity(dim);
    for (x, &m) in k.xn.iter().zip(&k.exponents) {
        let mut v = x.clone();
        for step in 0..=2 * m {
            cols.push(v.clone());
            signs.push(if step % 2 == 0 { -1.0 } else { 1.0 });
            v = &ad_xm * v;
        }
    }
    if cols.len() != dim {
        return Err(Error::Relation {
            what: "sl(2) decomposition does not span the algebra".into(),
            residual: (cols.len() as f64 - dim as f64).abs(),
            tol: 0.0,
        });
    }
    let v = ComplexMatrix::from_columns(&cols);
    let vinv = v
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::InvalidArgument("sl(2) decomposition basis is singular".into()))?;
    let d = ComplexMatrix::from_diagonal(&DVector::from_iterator(dim, signs.iter().map(|&s| c(s))));
    Ok(v * d * vinv)
}

pub fn build_involutions(data: &ChevalleyData, triple: &PrincipalTriple) -> Result<InvolutionPair> {
    let rho = theta_matrix(data);
    let sigma = sigma_matrix(data)?;
    let killing = data.killing.map(|x| c(x as f64));
    let hermitian_form = -(&killing * &rho);
    let pair = InvolutionPair {
        rho,
        sigma,
        hermitian_form,
    };
    let res = pair.commute_residual();
    if res > 1e-10 {
        return Err(Error::Relation {
            what: "σρ = ρσ (inconsistent basis)".into(),
            residual: res,
            tol: 1e-10,
        });
    }
    // σ must fix the triple up to the prescribed signs.
    let k = kostant_elements(data)?;
    let ad_sigma_xm = data.ad_of(&pair.apply_sigma(&k.xminus));
    let miss = max_diff(&ad_sigma_xm, &(-&triple.xminus));
    if miss > 1e-10 {
        return Err(Error::Relation {
            what: "σ(X-) = -X-".into(),
            residual: miss,
            tol: 1e-10,
        });
    }
    Ok(pair)
}

/// Largest violation of `σ[a,b] = [σa,σb]` over basis pairs.
pub fn sigma_automorphism_residual(data: &ChevalleyData, pair: &InvolutionPair) -> f64 {
    let dim = data.dim();
    let mut worst: f64 = 0.0;
    let basis = |i: usize| {
        let mut v = DVector::<C64>::zeros(dim);
        v[i] = c(1.0);
        v
    };
    for i in 0..dim {
        for j in i + 1..dim {
            let (a, b) = (basis(i), basis(j));
            let lhs = pair.apply_sigma(&data.bracket(&a, &b));
            let rhs = data.bracket(&pair.apply_sigma(&a), &pair.apply_sigma(&b));
            worst = worst.max((lhs - rhs).camax());
        }
    }
    worst
}

/// For type `A_{N-1}`: compare `σ`, `ρ` with `X ↦ -S X^T S^{-1}` and
/// `X ↦ -X^†` acting on the defining-representation matrices. Returns the
/// two residuals.
pub fn sln_defining_consistency(data: &ChevalleyData, pair: &InvolutionPair) -> (f64, f64) {
    let dim = data.dim();
    let m = data.matrices[0].nrows();
    let mut s = DMatrix::<f64>::zeros(m, m);
    for i in 0..m {
        s[(i, m - 1 - i)] = 1.0;
    }
    let to_matrix = |v: &DVector<C64>| -> (DMatrix<f64>, DMatrix<f64>) {
        let mut re = DMatrix::<f64>::zeros(m, m);
        let mut im = DMatrix::<f64>::zeros(m, m);
        for k in 0..dim {
            re += &data.matrices[k] * v[k].re;
            im += &data.matrices[k] * v[k].im;
        }
        (re, im)
    };
    let mut sigma_res: f64 = 0.0;
    let mut rho_res: f64 = 0.0;
    for j in 0..dim {
        let mut e = DVector::<C64>::zeros(dim);
        e[j] = c(1.0);
        let x = &data.matrices[j];
        let (sr, si) = to_matrix(&pair.apply_sigma(&e));
        let target = -(&s * x.transpose() * &s);
        sigma_res = sigma_res.max((sr - target).amax()).max(si.amax());
        let (rr, ri) = to_matrix(&pair.apply_rho(&e));
        let target = -x.transpose();
        rho_res = rho_res.max((rr - target).amax()).max(ri.amax());
    }
    (sigma_res, rho_res)
}
