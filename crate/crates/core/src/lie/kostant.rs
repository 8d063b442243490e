//! Kostant's principal triple in the adjoint representation.

use nalgebra::{DMatrix, DVector};

use super::chevalley::ChevalleyData;
use super::PrincipalTriple;
use crate::error::{Error, Result};
use crate::linalg::{c, real_nullspace, C64};

/// Coordinates (in the Chevalley basis) of the principal triple and of the
/// highest-weight vectors.
#[derive(Clone, Debug)]
pub struct KostantElements {
    pub h: DVector<C64>,
    pub xplus: DVector<C64>,
    pub xminus: DVector<C64>,
    pub xn: Vec<DVector<C64>>,
    pub exponents: Vec<usize>,
}

/// Row-reduce the columns of `basis` (as row vectors) so every vector has a
/// leading one in a distinct pivot position.
fn canonical_basis(basis: &DMatrix<f64>) -> Vec<Vec<f64>> {
    let k = basis.ncols();
    let n = basis.nrows();
    let mut rows: Vec<Vec<f64>> = (0..k).map(|j| (0..n).map(|i| basis[(i, j)]).collect()).collect();
    let mut pivot_row = 0;
    for col in 0..n {
        if pivot_row == k {
            break;
        }
        let best = (pivot_row..k).max_by(|&a, &b| rows[a][col].abs().total_cmp(&rows[b][col].abs()));
        let Some(best) = best else { break };
        if rows[best][col].abs() < 1e-9 {
            continue;
        }
        rows.swap(pivot_row, best);
        let p = rows[pivot_row][col];
        for x in rows[pivot_row].iter_mut() {
            *x /= p;
        }
        for r in 0..k {
            if r != pivot_row {
                let f = rows[r][col];
                if f != 0.0 {
                    for i in 0..n {
                        rows[r][i] -= f * rows[pivot_row][i];
                    }
                }
            }
        }
        pivot_row += 1;
    }
    for row in rows.iter_mut() {
        for x in row.iter_mut() {
            if x.abs() < 1e-13 {
                *x = 0.0;
            }
        }
    }
    rows
}

pub fn kostant_elements(data: &ChevalleyData) -> Result<KostantElements> {
    let dim = data.dim();
    let mut h = DVector::<C64>::zeros(dim);
    let mut xplus = DVector::<C64>::zeros(dim);
    let mut xminus = DVector::<C64>::zeros(dim);
    for i in 0..data.rank {
        let r = data.r_coeffs[i] as f64;
        h[data.cartan_index(i)] = c(r);
        xplus[data.simple_index(i, true)] = c(r.sqrt());
        xminus[data.simple_index(i, false)] = c(r.sqrt());
    }

    let heights = data.heights();
    let ad_xp = data.ad_of(&xplus).map(|z| z.re);
    let max_h = heights.iter().copied().max().unwrap_or(0);
    let mut xn = Vec::new();
    let mut exponents = Vec::new();
    for m in 1..=max_h {
        let cols: Vec<usize> = (0..dim).filter(|&i| heights[i] == m).collect();
        let mut restricted = DMatrix::<f64>::zeros(dim, cols.len());
        for (j, &col) in cols.iter().enumerate() {
            restricted.set_column(j, &ad_xp.column(col));
        }
        let ns = real_nullspace(&restricted, 1e-10);
        for v in canonical_basis(&ns) {
            let mut full = DVector::<C64>::zeros(dim);
            for (j, &col) in cols.iter().enumerate() {
                full[col] = c(v[j]);
            }
            xn.push(full);
            exponents.push(m as usize);
        }
    }
    if exponents.len() != data.rank {
        return Err(Error::Relation {
            what: format!(
                "{}: found {} highest-weight vectors, expected rank {}",
                data.cartan_type,
                exponents.len(),
                data.rank
            ),
            residual: (exponents.len() as f64 - data.rank as f64).abs(),
            tol: 0.0,
        });
    }
    Ok(KostantElements {
        h,
        xplus,
        xminus,
        xn,
        exponents,
    })
}

/// Principal triple of `data` in the adjoint representation, with exponents
/// from the grade-wise kernel of `ad X_+`.
pub fn principal_triple_g(data: &ChevalleyData) -> Result<PrincipalTriple> {
    let k = kostant_elements(data)?;
    let triple = PrincipalTriple {
        n_dim: data.dim(),
        h: data.ad_of(&k.h),
        xplus: data.ad_of(&k.xplus),
        xminus: data.ad_of(&k.xminus),
        xn: k.xn.iter().map(|x| data.ad_of(x)).collect(),
        exponents: k.exponents,
        exact: None,
    };
    let res = triple.residuals().max();
    if res > 1e-10 {
        return Err(Error::Relation {
            what: format!(
                "{}: principal triple relations (sign error in structure constants?)",
                data.cartan_type
            ),
            residual: res,
            tol: 1e-10,
        });
    }
    Ok(triple)
}

/// Dimensions of the `ad H` eigenspaces on `ker(ad X_+)`, indexed by the
/// eigenvalue `2m`; entry `m` counts highest-weight vectors of weight `2m`.
pub fn kernel_grade_dimensions(data: &ChevalleyData) -> Result<Vec<usize>> {
    let k = kostant_elements(data)?;
    let max = k.exponents.iter().copied().max().unwrap_or(0);
    let mut dims = vec![0; max + 1];
    for m in k.exponents {
        dims[m] += 1;
    }
    Ok(dims)
}
