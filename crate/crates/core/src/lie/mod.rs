//! Principal sl(2) triples, highest-weight vectors, the pairing `S`, and
//! Chevalley data for simple Lie algebras of rank at most four.

pub mod chevalley;
pub mod involution;
pub mod kostant;
pub mod sln;

pub use chevalley::{chevalley_basis, CartanType, ChevalleyData};
pub use involution::{build_involutions, InvolutionPair};
pub use kostant::principal_triple_g;
pub use sln::{
    build_highest_weight_vectors_sln, build_pairing_s, build_principal_triple_sln, principal_triple_sln_with,
    solve_ad_constraints, Normalization,
};

use crate::exact::ExactMatrix;
use crate::linalg::{commutator, max_diff, ComplexMatrix};

/// Exact counterpart of a [`PrincipalTriple`] in the defining representation.
#[derive(Clone, Debug)]
pub struct ExactTriple {
    pub h: ExactMatrix,
    pub xplus: ExactMatrix,
    pub xminus: ExactMatrix,
    pub xn: Vec<ExactMatrix>,
}

/// `(H, X+, X-)` together with highest-weight vectors `X_n` of the
/// decomposition of the algebra under the triple.
#[derive(Clone, Debug)]
pub struct PrincipalTriple {
    /// Dimension of the representation space the matrices act on.
    pub n_dim: usize,
    pub h: ComplexMatrix,
    pub xplus: ComplexMatrix,
    pub xminus: ComplexMatrix,
    /// One highest-weight vector per exponent, in the order of `exponents`.
    pub xn: Vec<ComplexMatrix>,
    /// Exponents `m_1 <= ... <= m_r`.
    pub exponents: Vec<usize>,
    /// Present for the defining representation of `SL(N)`.
    pub exact: Option<ExactTriple>,
}

/// Residuals of the relations a principal triple must satisfy.
#[derive(Clone, Debug, Default, serde::Serialize)]
pub struct TripleResiduals {
    pub h_xplus: f64,
    pub h_xminus: f64,
    pub xplus_xminus: f64,
    pub h_xn: f64,
    pub xplus_xn: f64,
}

impl TripleResiduals {
    pub fn max(&self) -> f64 {
        [self.h_xplus, self.h_xminus, self.xplus_xminus, self.h_xn, self.xplus_xn]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

impl PrincipalTriple {
    /// Floating-point residuals of `[H,X±] = ±2X±`, `[X+,X-] = H`,
    /// `[H,X_n] = 2 m_n X_n`, `[X+,X_n] = 0`.
    pub fn residuals(&self) -> TripleResiduals {
        let two = crate::linalg::c(2.0);
        let mut r = TripleResiduals {
            h_xplus: max_diff(&commutator(&self.h, &self.xplus), &(&self.xplus * two)),
            h_xminus: max_diff(&commutator(&self.h, &self.xminus), &(&self.xminus * -two)),
            xplus_xminus: max_diff(&commutator(&self.xplus, &self.xminus), &self.h),
            ..Default::default()
        };
        for (x, &m) in self.xn.iter().zip(&self.exponents) {
            let target = x * crate::linalg::c(2.0 * m as f64);
            r.h_xn = r.h_xn.max(max_diff(&commutator(&self.h, x), &target));
            r.xplus_xn = r.xplus_xn.max(crate::linalg::max_abs(&commutator(&self.xplus, x)));
        }
        r
    }

    /// Whether all relations hold exactly (only meaningful when exact data
    /// is present).
    pub fn exact_relations_hold(&self) -> Option<bool> {
        let e = self.exact.as_ref()?;
        let two = crate::exact::SqrtNum::int(2);
        let mut ok = e.h.commutator(&e.xplus) == e.xplus.scale(&two)
            && e.h.commutator(&e.xminus) == e.xminus.scale(&crate::exact::SqrtNum::int(-2))
            && e.xplus.commutator(&e.xminus) == e.h;
        for (x, &m) in e.xn.iter().zip(&self.exponents) {
            ok &= e.h.commutator(x) == x.scale(&crate::exact::SqrtNum::int(2 * m as i128));
            ok &= e.xplus.commutator(x).is_zero();
        }
        Some(ok)
    }
}
