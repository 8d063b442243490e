//! The principal triple of `sl(N)` in its defining representation.

use nalgebra::DMatrix;

use super::{ExactTriple, PrincipalTriple};
use crate::error::{Error, Result};
use crate::exact::{ExactMatrix, SqrtNum};
use crate::linalg::{antidiagonal_ones, c, ComplexMatrix};

/// How the free scalar in each highest-weight vector `X_n` is fixed.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub enum Normalization {
    /// Topmost nonzero entry `(X_n)_{1,n+1}` equals one.
    #[default]
    UnitLeading,
    /// Prescribed topmost entries, one per `n = 1..N-1`.
    Leading(Vec<SqrtNum>),
}

impl Normalization {
    /// The normalization used in the worked examples for `N = 4` and `N = 5`
    /// (`X_1 = X_+`, the remaining leading entries as displayed there).
    /// Other `N` fall back to `X_1 = X_+` and unit leading entries.
    pub fn displayed(n: usize) -> Self {
        let mut lead = vec![SqrtNum::sqrt(r_coeff(n, 1) as u64)];
        for k in 2..n {
            let v = if n == 5 && k == 2 { 2 } else { 1 };
            lead.push(SqrtNum::int(v));
        }
        Normalization::Leading(lead)
    }
}

/// `r_i = i (N - i)`.
pub fn r_coeff(n: usize, i: usize) -> usize {
    i * (n - i)
}

fn check_n(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("N must be at least 2, got {n}")));
    }
    Ok(())
}

fn exact_h(n: usize) -> ExactMatrix {
    let mut h = ExactMatrix::zeros(n);
    for i in 0..n {
        h.set(i, i, SqrtNum::int(n as i128 - 1 - 2 * i as i128));
    }
    h
}

fn exact_xplus(n: usize) -> ExactMatrix {
    let mut x = ExactMatrix::zeros(n);
    for i in 0..n - 1 {
        x.set(i, i + 1, SqrtNum::sqrt(r_coeff(n, i + 1) as u64));
    }
    x
}

/// Highest-weight vectors `X_1, ..., X_{N-1}` with exact entries.
///
/// The kernel of `ad X_+` in grade `n` is spanned by `X_+^n`, whose entries
/// are products of square roots; the requested normalization rescales it.
pub fn build_highest_weight_vectors_sln(n: usize, normalization: &Normalization) -> Result<Vec<ExactMatrix>> {
    check_n(n)?;
    if let Normalization::Leading(v) = normalization {
        if v.len() != n - 1 {
            return Err(Error::InvalidArgument(format!(
                "normalization needs {} leading entries, got {}",
                n - 1,
                v.len()
            )));
        }
        if v.iter().any(SqrtNum::is_zero) {
            return Err(Error::InvalidArgument("leading entries must be nonzero".into()));
        }
    }
    let xp = exact_xplus(n);
    let mut power = ExactMatrix::identity(n);
    let mut out = Vec::with_capacity(n - 1);
    for k in 1..n {
        power = power.mul(&xp);
        let lead = power.get(0, k).clone();
        let inv = lead
            .monomial_inverse()
            .expect("leading entry of X+^n is a product of square roots");
        let unit = power.scale(&inv);
        let xk = match normalization {
            Normalization::UnitLeading => unit,
            Normalization::Leading(v) => unit.scale(&v[k - 1]),
        };
        out.push(xk);
    }
    Ok(out)
}

/// Principal triple with unit-leading highest-weight vectors.
pub fn build_principal_triple_sln(n: usize) -> Result<PrincipalTriple> {
    principal_triple_sln_with(n, &Normalization::UnitLeading)
}

pub fn principal_triple_sln_with(n: usize, normalization: &Normalization) -> Result<PrincipalTriple> {
    check_n(n)?;
    let h = exact_h(n);
    let xplus = exact_xplus(n);
    let xminus = xplus.transpose();
    let xn = build_highest_weight_vectors_sln(n, normalization)?;
    Ok(PrincipalTriple {
        n_dim: n,
        h: h.to_complex(),
        xplus: xplus.to_complex(),
        xminus: xminus.to_complex(),
        xn: xn.iter().map(ExactMatrix::to_complex).collect(),
        exponents: (1..n).collect(),
        exact: Some(ExactTriple { h, xplus, xminus, xn }),
    })
}

/// Diagonal of `H`, i.e. `N-1, N-3, ..., 1-N`.
pub fn h_diagonal(n: usize) -> Vec<f64> {
    (0..n).map(|i| (n as f64) - 1.0 - 2.0 * i as f64).collect()
}

/// Antidiagonal pairing matrix `S` (exact); `S^2 = 1`.
pub fn build_pairing_s(n: usize) -> Result<ExactMatrix> {
    check_n(n)?;
    let mut s = ExactMatrix::zeros(n);
    for i in 0..n {
        s.set(i, n - 1 - i, SqrtNum::int(1));
    }
    Ok(s)
}

fn ad_real(m: &DMatrix<f64>) -> DMatrix<f64> {
    // ad(m) acting on row-major vec(chi): (m chi - chi m)
    let n = m.nrows();
    let mut out = DMatrix::<f64>::zeros(n * n, n * n);
    for i in 0..n {
        for j in 0..n {
            let row = i * n + j;
            for k in 0..n {
                // (m chi)_{ij} = sum_k m_ik chi_kj
                out[(row, k * n + j)] += m[(i, k)];
                // (chi m)_{ij} = sum_k chi_ik m_kj
                out[(row, i * n + k)] -= m[(k, j)];
            }
        }
    }
    out
}

/// Basis of `{chi : [H, chi] = 2 grade chi, [X+, chi] = 0}` computed by a
/// dense nullspace of the stacked constraint matrix.
pub fn solve_ad_constraints(n: usize, grade: i64) -> Result<Vec<ComplexMatrix>> {
    check_n(n)?;
    let h = exact_h(n).to_complex().map(|z| z.re);
    let xp = exact_xplus(n).to_complex().map(|z| z.re);
    let mut ad_h = ad_real(&h);
    for d in 0..n * n {
        ad_h[(d, d)] -= 2.0 * grade as f64;
    }
    let ad_x = ad_real(&xp);
    let mut stacked = DMatrix::<f64>::zeros(2 * n * n, n * n);
    stacked.view_mut((0, 0), (n * n, n * n)).copy_from(&ad_h);
    stacked.view_mut((n * n, 0), (n * n, n * n)).copy_from(&ad_x);
    let ns = crate::linalg::real_nullspace(&stacked, 1e-10);
    Ok((0..ns.ncols())
        .map(|k| ComplexMatrix::from_fn(n, n, |i, j| c(ns[(i * n + j, k)])))
        .collect())
}

/// Dimension of `{chi : S chi^T S = -chi, [X+, chi] = 0}`; the vanishing
/// lemma asserts it is zero.
pub fn s_skew_commutant_dimension(n: usize) -> Result<usize> {
    check_n(n)?;
    let xp = exact_xplus(n).to_complex().map(|z| z.re);
    let ad_x = ad_real(&xp);
    // S chi^T S + chi = 0 : (S chi^T S)_{ij} = chi_{n-1-j, n-1-i}
    let mut skew = DMatrix::<f64>::zeros(n * n, n * n);
    for i in 0..n {
        for j in 0..n {
            let row = i * n + j;
            skew[(row, row)] += 1.0;
            skew[(row, (n - 1 - j) * n + (n - 1 - i))] += 1.0;
        }
    }
    let mut stacked = DMatrix::<f64>::zeros(2 * n * n, n * n);
    stacked.view_mut((0, 0), (n * n, n * n)).copy_from(&ad_x);
    stacked.view_mut((n * n, 0), (n * n, n * n)).copy_from(&skew);
    Ok(crate::linalg::real_nullspace(&stacked, 1e-10).ncols())
}

/// `S^{-1} M^T S` for the antidiagonal `S`.
pub fn s_transpose(m: &ComplexMatrix) -> ComplexMatrix {
    let s = antidiagonal_ones(m.nrows());
    &s * m.transpose() * &s
}

/// Projection onto `S`-skew matrices: `(chi - S chi^T S) / 2`.
pub fn project_s_skew(m: &ComplexMatrix) -> ComplexMatrix {
    (m - s_transpose(m)) * c(0.5)
}
