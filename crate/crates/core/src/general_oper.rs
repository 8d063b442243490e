//! Opers for a general simple group, realized through the adjoint
//! representation on a Chevalley basis ordered by weight.
//!
//! Group elements act by `Ad`, so centre elements are invisible. In the
//! weight order, `ad` of every Borel element is upper triangular.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::lie::chevalley::{BasisLabel, CartanType, ChevalleyData};
use crate::lie::kostant::{kostant_elements, KostantElements};
use crate::lie::{chevalley_basis, PrincipalTriple};
use crate::linalg::{c, max_abs, max_diff, ComplexMatrix, C64};
use crate::oper::{alpha_power_h, transition_t};
use crate::surface::mobius::ChartMap;

/// Oper data for one Cartan type at a fixed `ħ`.
#[derive(Clone, Debug)]
pub struct GOperData {
    pub data: ChevalleyData,
    /// Principal triple and highest-weight vectors as `ad` matrices.
    pub triple: PrincipalTriple,
    /// The same elements as coordinate vectors.
    pub elements: KostantElements,
    pub hbar: C64,
}

impl GOperData {
    pub fn new(cartan_type: CartanType, hbar: C64) -> Result<Self> {
        let data = chevalley_basis(cartan_type)?;
        let elements = kostant_elements(&data)?;
        let triple = crate::lie::principal_triple_g(&data)?;
        Ok(Self {
            data,
            triple,
            elements,
            hbar,
        })
    }

    pub fn rank(&self) -> usize {
        self.data.rank
    }

    /// Coordinates of `X₋ + Σ Pₙ Xₙ`, one coefficient per exponent.
    pub fn higgs_element(&self, coeffs: &[C64]) -> Result<DVector<C64>> {
        if coeffs.len() != self.rank() {
            return Err(Error::InvalidArgument(format!(
                "{} expects {} coefficients (one per exponent), got {}",
                self.data.cartan_type,
                self.rank(),
                coeffs.len()
            )));
        }
        let mut v = self.elements.xminus.clone();
        for (p, x) in coeffs.iter().zip(&self.elements.xn) {
            v += x * *p;
        }
        Ok(v)
    }

    /// `A_z = ad(ħ⁻¹(X₋ + Σ Pₙ Xₙ))`.
    pub fn connection(&self, coeffs: &[C64]) -> Result<ComplexMatrix> {
        if self.hbar == c(0.0) {
            return Err(Error::InvalidArgument("ħ must be nonzero".into()));
        }
        let v = self.higgs_element(coeffs)?;
        Ok(self.data.ad_of(&v) / self.hbar)
    }

    /// `Ad(α^H) exp(ħ α⁻¹∂α ad X₊)` for the chart map at `z`.
    pub fn transition(&self, map: &dyn ChartMap, z: C64) -> Result<ComplexMatrix> {
        transition_t(&self.triple, self.hbar, map, z)
    }

    /// Whether `m` lies in the Borel subalgebra (upper triangular) up to `tol`.
    pub fn is_borel(m: &ComplexMatrix, tol: f64) -> bool {
        (0..m.nrows()).all(|i| (0..i).all(|j| m[(i, j)].norm() <= tol))
    }

    /// The projection of an element to `g/b` (its negative-root
    /// coordinates) compared with that of `X₋`: returns the multiple `k`
    /// and `max |proj(v) − k proj(X₋)|`. Good position means `k ≠ 0` and a
    /// vanishing residual.
    pub fn good_position(&self, v: &DVector<C64>) -> (C64, f64) {
        let negative: Vec<usize> = self
            .data
            .basis
            .iter()
            .enumerate()
            .filter(|(_, l)| matches!(l, BasisLabel::Root(r) if r.iter().any(|&x| x < 0)))
            .map(|(i, _)| i)
            .collect();
        let xm = &self.elements.xminus;
        let denom: f64 = negative.iter().map(|&i| xm[i].norm_sqr()).sum();
        let k: C64 = negative.iter().map(|&i| xm[i].conj() * v[i]).sum::<C64>() / denom;
        let res = negative.iter().map(|&i| (v[i] - xm[i] * k).norm()).fold(0.0, f64::max);
        (k, res)
    }

    /// `max |Ad(a^H) ad X₊ Ad(a^{−H}) − a² ad X₊|`.
    pub fn ad_conjugation_residual(&self, a: C64) -> f64 {
        let ah = alpha_power_h(&self.triple, a);
        let ainv = alpha_power_h(&self.triple, 1.0 / a);
        let lhs = &ah * &self.triple.xplus * ainv;
        max_diff(&lhs, &(&self.triple.xplus * (a * a))) / max_abs(&lhs).max(1.0)
    }
}
