//! Discrete curvature `F = ∂A_z̄ − ∂̄A_z + [A_z, A_z̄]` of a family sampled
//! on the mesh, measured in the unitary frame of the natural metric and per
//! unit hyperbolic area.

use serde::Serialize;

use super::family::MeshFamily;
use crate::error::{Error, Result};
use crate::lie::PrincipalTriple;
use crate::linalg::{commutator, frobenius, ComplexMatrix, C64};
use crate::parallel::par_map;
use crate::surface::SurfaceMesh;

#[derive(Clone, Debug, Serialize)]
pub struct CurvatureReport {
    /// Normalized curvature of each class (area-weighted over its copies).
    pub per_class: Vec<f64>,
    pub sup: f64,
    /// `(Σ A_c F_c²)^{1/2}`.
    pub l2: f64,
}

/// Curvature from second-order stencils at every vertex, normalized as
/// `λ^{−H/2} F λ^{H/2} / λ²` and measured in Frobenius norm.
pub fn discrete_curvature(
    mesh: &SurfaceMesh,
    triple: &PrincipalTriple,
    family: &MeshFamily,
    stencils: &[Vec<(usize, C64)>],
    threads: usize,
) -> Result<CurvatureReport> {
    let nv = mesh.num_vertices();
    if family.forms.len() != nv || stencils.len() != nv {
        return Err(Error::InvalidArgument(
            "family or stencils do not match the mesh".into(),
        ));
    }
    let n = triple.n_dim;
    let h: Vec<f64> = (0..n).map(|i| triple.h[(i, i)].re).collect();
    let per_vertex = par_map(nv, threads, |v| {
        let mut d_zbar = ComplexMatrix::zeros(n, n);
        let mut dbar_z = ComplexMatrix::zeros(n, n);
        for &(k, a) in &stencils[v] {
            d_zbar += &family.forms[k].a_zbar * a;
            dbar_z += &family.forms[k].a_z * a.conj();
        }
        let f = &family.forms[v];
        let curv = d_zbar - dbar_z + commutator(&f.a_z, &f.a_zbar);
        let lambda = mesh.lambda[v];
        let unitary = ComplexMatrix::from_fn(n, n, |i, j| {
            curv[(i, j)] * lambda.powf((h[j] - h[i]) / 2.0) / (lambda * lambda)
        });
        // Back to the frame of the class representative: F̂_v = U F̂_rep U†.
        let rep = mesh.class_rep[mesh.class_of[v]];
        if rep == v {
            return unitary;
        }
        let a = mesh.deck[v].alpha(mesh.points[rep]);
        let phase = a / a.norm();
        let u: Vec<C64> = h.iter().map(|&hi| phase.powi(hi.round() as i32)).collect();
        ComplexMatrix::from_fn(n, n, |i, j| u[i].conj() * unitary[(i, j)] * u[j])
    });
    // Copies of a seam vertex see one-sided neighbourhoods; their
    // area-weighted mean cancels the leading one-sided error.
    let mut sums = vec![ComplexMatrix::zeros(n, n); mesh.num_classes()];
    let mut weights = vec![0.0; mesh.num_classes()];
    for (v, f) in per_vertex.into_iter().enumerate() {
        let c = mesh.class_of[v];
        let w = mesh.euclid_area[v] * mesh.lambda[v].powi(2);
        sums[c] += f * C64::new(w, 0.0);
        weights[c] += w;
    }
    let per_class: Vec<f64> = sums.iter().zip(&weights).map(|(s, w)| frobenius(s) / w).collect();
    let sup = per_class.iter().copied().fold(0.0, f64::max);
    let l2 = per_class
        .iter()
        .zip(&mesh.class_area)
        .map(|(x, a)| a * x * x)
        .sum::<f64>()
        .sqrt();
    Ok(CurvatureReport { per_class, sup, l2 })
}
