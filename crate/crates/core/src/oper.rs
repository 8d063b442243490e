//! The oper side: transition functions `T_ħ = α^H exp(ħ α⁻¹∂α X₊)`, the local
//! oper connection `d + ħ⁻¹φ_u`, the gauge `M = exp(ħ ∂log λ X₊)`, the chart
//! error term `ε`, and the scalar differential operators for `N = 2, 3`.

use crate::error::{Error, Result};
use crate::hitchin::{higgs_matrix, Chart, HitchinPoint};
use crate::lie::PrincipalTriple;
use crate::linalg::{c, commutator, expm, expm_nilpotent, max_abs, max_diff, ComplexMatrix, C64};
use crate::surface::differential::contour_derivative;
use crate::surface::mobius::{ChartMap, MobiusMap};

/// `a^H`, using that `H` is diagonal with integral eigenvalues in every
/// representation built here.
pub fn alpha_power_h(triple: &PrincipalTriple, a: C64) -> ComplexMatrix {
    let h = &triple.h;
    let n = h.nrows();
    let off = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|&(i, j)| i != j)
        .any(|(i, j)| h[(i, j)] != c(0.0));
    if off {
        return expm(&(h * a.ln()));
    }
    let mut m = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = crate::linalg::int_power(a, h[(i, i)].re);
    }
    m
}

/// `T_{ħ,z,z'}` at `z` for the chart map `z' = f(z)`.
pub fn transition_t(triple: &PrincipalTriple, hbar: C64, map: &dyn ChartMap, z: C64) -> Result<ComplexMatrix> {
    let a = map.alpha(z)?;
    let shift = hbar * map.alpha_prime(z) / a;
    Ok(alpha_power_h(triple, a) * expm_nilpotent(&(&triple.xplus * shift)))
}

/// `‖T_{z,z''} - T_{z',z''} T_{z,z'}‖` for `z' = f(z)`, `z'' = g(z')`.
pub fn check_cocycle(triple: &PrincipalTriple, hbar: C64, f: &MobiusMap, g: &MobiusMap, z: C64) -> Result<f64> {
    let gf = g.compose(f);
    let direct = transition_t(triple, hbar, &gf, z)?;
    let composed = transition_t(triple, hbar, g, f.apply(z))? * transition_t(triple, hbar, f, z)?;
    let scale = max_abs(&direct).max(1.0);
    Ok(max_diff(&direct, &composed) / scale)
}

/// Residual of `λ^H T_ħ = T_{λ²ħ} λ^H` for a constant `λ`.
pub fn intertwiner_residual(
    triple: &PrincipalTriple,
    hbar: C64,
    lambda: C64,
    map: &dyn ChartMap,
    z: C64,
) -> Result<f64> {
    let lh = alpha_power_h(triple, lambda);
    let lhs = &lh * transition_t(triple, hbar, map, z)?;
    let rhs = transition_t(triple, hbar * lambda * lambda, map, z)? * &lh;
    Ok(max_diff(&lhs, &rhs) / max_abs(&lhs).max(1.0))
}

/// `M_{ħ} = exp(ħ ∂_z log μ · X₊)` for a metric `μ²|dz|²`.
pub fn gauge_m(triple: &PrincipalTriple, hbar: C64, dlog_metric: C64) -> ComplexMatrix {
    expm_nilpotent(&(&triple.xplus * (hbar * dlog_metric)))
}

/// `M_{ħ,z'} α^H M_{ħ,z}^{-1}`, the transition written through a reference
/// metric; `dlog_z` and `dlog_zp` are `∂ log μ` in the two charts.
pub fn transition_via_metric(
    triple: &PrincipalTriple,
    hbar: C64,
    map: &dyn ChartMap,
    z: C64,
    dlog_z: C64,
    dlog_zp: C64,
) -> Result<ComplexMatrix> {
    let a = map.alpha(z)?;
    Ok(gauge_m(triple, hbar, dlog_zp) * alpha_power_h(triple, a) * gauge_m(triple, -hbar, dlog_z))
}

/// `ε = -ħ((∂α)² + α² ∂² log α)`.
pub fn epsilon_error(map: &dyn ChartMap, hbar: C64, z: C64) -> Result<C64> {
    let a = map.alpha(z)?;
    let a1 = map.alpha_prime(z);
    let a2 = map.alpha_second(z);
    let d2log = (a2 * a - a1 * a1) / (a * a);
    Ok(-hbar * (a1 * a1 + a * a * d2log))
}

/// Connection `d + A_z dz + A_z̄ dz̄` in one chart.
#[derive(Clone, Debug)]
pub struct LocalConnectionForm {
    pub chart: Chart,
    pub point: C64,
    pub a_z: ComplexMatrix,
    pub a_zbar: ComplexMatrix,
}

/// `∇_{ħ,u} = d + ħ⁻¹ φ_u`.
pub fn oper_connection(
    triple: &PrincipalTriple,
    hbar: C64,
    u: &HitchinPoint,
    chart: Chart,
    point: C64,
) -> Result<LocalConnectionForm> {
    if hbar == c(0.0) {
        return Err(Error::InvalidArgument("ħ must be nonzero".into()));
    }
    let phi = crate::hitchin::higgs_field(u, triple, chart, point)?.matrix;
    let n = triple.n_dim;
    Ok(LocalConnectionForm {
        chart,
        point,
        a_z: phi / hbar,
        a_zbar: ComplexMatrix::zeros(n, n),
    })
}

/// Defect of the transformation law, as a `dz` coefficient: `T(d + ħ⁻¹Φ_z dz)T⁻¹`
/// minus `ħ⁻¹Φ_{z'} dz'`, where the coefficient of `X_n` (exponent `m`) is an
/// `(m+1)`-differential, so `P_{z'} = P_z α^{2(m+1)}`, and `dz' = α⁻² dz`.
/// The expected value is `ε X₊`. `∂_z T` is taken by the contour rule.
pub fn transformation_defect(
    triple: &PrincipalTriple,
    hbar: C64,
    map: &dyn ChartMap,
    p_at: &dyn Fn(C64) -> Vec<C64>,
    z: C64,
) -> Result<ComplexMatrix> {
    let a = map.alpha(z)?;
    let t = transition_t(triple, hbar, map, z)?;
    let tinv = t
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::InvalidArgument("singular transition".into()))?;
    let radius = 1e-2 * (1.0 + z.norm());
    let n = triple.n_dim;
    let mut dt = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            dt[(i, j)] = contour_derivative(
                |w| {
                    transition_t(triple, hbar, map, w)
                        .map(|m| m[(i, j)])
                        .unwrap_or(c(f64::NAN))
                },
                z,
                radius,
            );
        }
    }
    let p = p_at(z);
    let phi_z = higgs_matrix(triple, &p)?;
    let p_new: Vec<C64> = p
        .iter()
        .zip(&triple.exponents)
        .map(|(v, &m)| v * (a * a).powi(m as i32 + 1))
        .collect();
    let phi_zp = higgs_matrix(triple, &p_new)?;
    let transformed = &t * phi_z * &tinv / hbar - dt * &tinv;
    Ok(transformed - phi_zp / (hbar * a * a))
}

/// Residual of `A_z` being in good position: the strictly lower part must
/// be a nonzero multiple of that of `X₋`. Returns `(multiple, residual)`.
pub fn good_position(triple: &PrincipalTriple, a_z: &ComplexMatrix) -> (C64, f64) {
    let n = triple.n_dim;
    let lower = |m: &ComplexMatrix| ComplexMatrix::from_fn(n, n, |i, j| if i > j { m[(i, j)] } else { c(0.0) });
    let xl = lower(&triple.xminus);
    let al = lower(a_z);
    let denom: f64 = xl.iter().map(|v| v.norm_sqr()).sum();
    let k: C64 = xl.iter().zip(al.iter()).map(|(x, y)| x.conj() * y).sum::<C64>() / denom;
    (k, max_abs(&(al - xl * k)))
}

/// Gauge-transformed limit connection in a chart where the metric factor
/// `λ` has derivatives `(∂λ, ∂²λ)`: returns the largest entry of
/// `M(∇₀)M⁻¹ − (d + ħ⁻¹Φ)`.
pub fn gauge_residual(
    triple: &PrincipalTriple,
    hbar: C64,
    phi: &ComplexMatrix,
    lambda: C64,
    d_lambda: C64,
    d2_lambda: C64,
) -> f64 {
    let ell = d_lambda / lambda;
    let d_ell = d2_lambda / lambda - ell * ell;
    // ∂_z̄ ∂_z log λ = λ² for the curvature −4 metric.
    let dbar_ell = lambda * lambda;
    let m = gauge_m(triple, hbar, ell);
    let minv = gauge_m(triple, -hbar, ell);
    let a_z = phi / hbar - &triple.h * ell;
    let a_zbar = &triple.xplus * (hbar * lambda * lambda);
    let new_z = &m * a_z * &minv - &triple.xplus * (hbar * d_ell);
    let new_zbar = &m * a_zbar * &minv - &triple.xplus * (hbar * dbar_ell);
    max_abs(&(new_z - phi / hbar)).max(max_abs(&new_zbar))
}

/// A scalar differential operator `Σ_k a_k(z) ∂_z^k` attached to an oper.
#[derive(Clone, Debug)]
pub struct ScalarOperator {
    pub order: usize,
    pub hbar: C64,
    pub u: HitchinPoint,
}

impl ScalarOperator {
    /// Coefficients at `z`; `∂P₂` is taken by the contour rule so that
    /// any holomorphic evaluator can be used.
    pub fn coefficients(&self, z: C64) -> Vec<C64> {
        let h = self.hbar;
        let p = self.u.coefficients(z);
        match self.order {
            2 => vec![p[0], c(0.0), -h * h],
            _ => {
                let dp2 = match self.u.differential(2) {
                    Some(d) => contour_derivative(|w| d.value(w), z, 1e-2),
                    None => c(0.0),
                };
                vec![p[1] - h * dp2, -2.0 * h * p[0], c(0.0), h * h * h / 2.0]
            }
        }
    }

    /// `Dψ` from the jet `(ψ, ψ', …, ψ^{(N)})`.
    pub fn apply(&self, jet: &[C64], z: C64) -> C64 {
        self.coefficients(z).iter().zip(jet).map(|(a, d)| a * d).sum()
    }

    /// The embedding of `(N−1)`-jets `Φ_u(ψ)` as sections of the oper bundle.
    pub fn jet_section(&self, jet: &[C64], z: C64) -> Vec<C64> {
        let h = self.hbar;
        match self.order {
            2 => vec![-h * h * jet[1], h * jet[0]],
            _ => {
                let p2 = self.u.coefficients(z)[0];
                vec![
                    h * h * h / 2.0 * jet[2] - h * p2 * jet[0],
                    -h * h / 2f64.sqrt() * jet[1],
                    h * jet[0],
                ]
            }
        }
    }
}

/// The scalar operator of the `SL(N)` oper for `N ∈ {2, 3}`: `−ħ²∂² + P₂`
/// and `(ħ³/2)∂³ − 2ħP₂∂ − ħP₂' + P₃`.
pub fn extract_diff_operator(hbar: C64, u: &HitchinPoint) -> Result<ScalarOperator> {
    if !(2..=3).contains(&u.n) {
        return Err(Error::InvalidArgument(format!(
            "scalar operators are implemented for N = 2, 3 only (got {})",
            u.n
        )));
    }
    if hbar == c(0.0) {
        return Err(Error::InvalidArgument("ħ must be nonzero".into()));
    }
    Ok(ScalarOperator {
        order: u.n,
        hbar,
        u: u.clone(),
    })
}

/// `max |lower components of ∇(Φ_u ψ)|` and `|top component − Dψ|` at `z`
/// for a polynomial `ψ` (coefficients, ascending). The derivative of the
/// section is taken by the contour rule.
pub fn operator_dictionary_residual(
    op: &ScalarOperator,
    triple: &PrincipalTriple,
    psi: &[C64],
    z: C64,
) -> Result<(f64, f64)> {
    let jet = |w: C64| -> Vec<C64> {
        (0..=op.order)
            .map(|k| {
                psi.iter()
                    .enumerate()
                    .skip(k)
                    .map(|(p, &a)| {
                        let falling: f64 = ((p - k + 1)..=p).map(|x| x as f64).product();
                        a * falling * w.powi((p - k) as i32)
                    })
                    .sum()
            })
            .collect()
    };
    let n = op.order;
    let section = op.jet_section(&jet(z), z);
    let conn = oper_connection(triple, op.hbar, &op.u, Chart::Disk, z)?;
    let mut out = vec![c(0.0); n];
    for i in 0..n {
        let d = contour_derivative(|w| op.jet_section(&jet(w), w)[i], z, 1e-2);
        let a: C64 = (0..n).map(|j| conn.a_z[(i, j)] * section[j]).sum();
        out[i] = d + a;
    }
    let lower = out[1..].iter().map(|v| v.norm()).fold(0.0, f64::max);
    let top = (out[0] - op.apply(&jet(z), z)).norm();
    Ok((lower, top))
}

/// `[X₋, T]`-style sanity helper: `max |[X₊, X_n]|` for the triple in use.
pub fn highest_weight_defect(triple: &PrincipalTriple) -> f64 {
    triple
        .xn
        .iter()
        .map(|x| max_abs(&commutator(&triple.xplus, x)))
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::{build_principal_triple_sln, principal_triple_sln_with, Normalization};
    use crate::linalg::{identity, I};
    use crate::surface::mobius::PolynomialChart;
    use crate::surface::DifferentialData;

    fn mobius(seed: f64) -> MobiusMap {
        MobiusMap::normalized(
            C64::new(1.0 + 0.3 * seed.sin(), 0.2 * seed),
            C64::new(0.4 * seed.cos(), -0.1),
            C64::new(-0.2, 0.5 * seed.sin()),
            C64::new(0.9, 0.2 * seed.cos()),
        )
        .unwrap()
    }

    #[test]
    fn transition_reductions() {
        let t = build_principal_triple_sln(3).unwrap();
        let z = C64::new(0.1, 0.2);
        let m = mobius(1.0);
        let at0 = transition_t(&t, c(0.0), &m, z).unwrap();
        assert!(max_diff(&at0, &alpha_power_h(&t, m.alpha(z))) < 1e-15);
        let id = transition_t(&t, c(1.3), &MobiusMap::identity(), z).unwrap();
        assert!(max_diff(&id, &identity(3)) < 1e-15);
    }

    #[test]
    fn transitions_are_upper_triangular_unimodular() {
        for n in 2..=5 {
            let t = build_principal_triple_sln(n).unwrap();
            let m = transition_t(&t, C64::new(0.7, -1.2), &mobius(2.0), C64::new(0.3, 0.1)).unwrap();
            assert!((m.determinant() - 1.0).norm() < 1e-12);
            for i in 0..n {
                for j in 0..i {
                    assert_eq!(m[(i, j)], c(0.0));
                }
            }
        }
    }

    #[test]
    fn cocycle_holds() {
        for n in 2..=6 {
            let t = build_principal_triple_sln(n).unwrap();
            for k in 0..5 {
                let hbar = C64::from_polar(0.1 + 2.0 * k as f64, 0.7 * k as f64);
                let r = check_cocycle(
                    &t,
                    hbar,
                    &mobius(k as f64),
                    &mobius(3.0 + k as f64),
                    C64::new(0.2, -0.1),
                )
                .unwrap();
                assert!(r < 1e-10, "N={n}: {r}");
                let r0 = check_cocycle(&t, c(0.0), &mobius(k as f64), &mobius(1.5), C64::new(0.2, -0.1)).unwrap();
                assert!(r0 < 1e-12);
            }
        }
    }

    #[test]
    fn intertwiner() {
        let t = build_principal_triple_sln(4).unwrap();
        let r = intertwiner_residual(&t, C64::new(0.5, 0.5), C64::new(1.3, -0.4), &mobius(0.3), c(0.1)).unwrap();
        assert!(r < 1e-12);
    }

    #[test]
    fn alternative_representation_reference_metric() {
        use crate::surface::bolza_group;
        use crate::surface::metric::disk_dlog_lambda;
        let t = build_principal_triple_sln(3).unwrap();
        let g = bolza_group().generators[1];
        let z = C64::new(0.2, 0.15);
        let hbar = C64::new(0.8, 0.3);
        let direct = transition_t(&t, hbar, &g, z).unwrap();
        let via = transition_via_metric(&t, hbar, &g, z, disk_dlog_lambda(z), disk_dlog_lambda(g.apply(z))).unwrap();
        assert!(max_diff(&direct, &via) < 1e-12);
    }

    #[test]
    fn alternative_representation_arbitrary_metric() {
        // μ_z = exp(Re z² + |z|²/3); in the other chart μ_{z'} = μ_z |α|².
        let t = build_principal_triple_sln(3).unwrap();
        let m = mobius(0.8);
        let z = C64::new(0.1, -0.2);
        let log_mu = |w: C64| (w * w).re + w.norm_sqr() / 3.0;
        let dlog = |w: C64| w + w.conj() / 3.0;
        let minv = m.inverse();
        let log_mu_p = |wp: C64| {
            let w = minv.apply(wp);
            log_mu(w) + 2.0 * m.alpha(w).norm().ln()
        };
        let zp = m.apply(z);
        // ∂_{z'} by fourth-order centred differences.
        let h = 1e-3;
        let d = |dir: C64| {
            (-log_mu_p(zp + 2.0 * h * dir) + 8.0 * log_mu_p(zp + h * dir) - 8.0 * log_mu_p(zp - h * dir)
                + log_mu_p(zp - 2.0 * h * dir))
                / (12.0 * h)
        };
        let dzp = (d(c(1.0)) - I * d(I)) * 0.5;
        let hbar = C64::new(1.1, -0.4);
        let via = transition_via_metric(&t, hbar, &m, z, dlog(z), dzp).unwrap();
        let direct = transition_t(&t, hbar, &m, z).unwrap();
        assert!(max_diff(&direct, &via) < 1e-9);
    }

    #[test]
    fn epsilon_values() {
        let m = mobius(1.7);
        assert!(
            epsilon_error(&m, C64::new(2.0, 1.0), C64::new(0.3, 0.2))
                .unwrap()
                .norm()
                < 1e-15
        );
        let cubic = PolynomialChart::cubic_shear();
        let e1 = epsilon_error(&cubic, c(1.0), c(0.3)).unwrap();
        assert!(e1.norm() > 0.1);
        let e2 = epsilon_error(&cubic, c(2.0), c(0.3)).unwrap();
        assert!((e2 - 2.0 * e1).norm() < 1e-14);
    }

    #[test]
    fn transformation_law_defect_is_epsilon_xplus() {
        for n in [2, 3, 4] {
            let t = build_principal_triple_sln(n).unwrap();
            let hbar = C64::new(0.7, 0.2);
            let p_at = |w: C64| -> Vec<C64> {
                (0..n - 1)
                    .map(|k| C64::new(0.3, 0.1 * k as f64) + w * (k as f64 + 1.0))
                    .collect()
            };
            let z = C64::new(0.3, 0.0);
            let cubic = PolynomialChart::cubic_shear();
            let defect = transformation_defect(&t, hbar, &cubic, &p_at, z).unwrap();
            let eps = epsilon_error(&cubic, hbar, z).unwrap();
            assert!(max_diff(&defect, &(&t.xplus * eps)) < 1e-8, "N={n}");
            let mob = transformation_defect(&t, hbar, &mobius(0.4), &p_at, z).unwrap();
            assert!(max_abs(&mob) < 1e-8);
        }
    }

    #[test]
    fn oper_connection_shape() {
        let t = build_principal_triple_sln(2).unwrap();
        let p = C64::new(0.4, -0.3);
        let u = HitchinPoint::new(2, vec![DifferentialData::constant(2, p)]).unwrap();
        let hbar = C64::new(0.5, 0.5);
        let conn = oper_connection(&t, hbar, &u, Chart::Disk, c(0.1)).unwrap();
        assert!((conn.a_z[(0, 1)] - p / hbar).norm() < 1e-15);
        assert!((conn.a_z[(1, 0)] - 1.0 / hbar).norm() < 1e-15);
        assert!(max_abs(&conn.a_zbar) == 0.0);
        let (k, res) = good_position(&t, &conn.a_z);
        assert!(res < 1e-15 && (k - 1.0 / hbar).norm() < 1e-15);
        assert!(oper_connection(&t, c(0.0), &u, Chart::Disk, c(0.1)).is_err());
    }

    #[test]
    fn gauge_identity_uhp_and_disk() {
        use crate::surface::metric::{uhp_lambda, uhp_lambda_derivatives};
        for n in [2, 3, 4] {
            let t = build_principal_triple_sln(n).unwrap();
            let phi = higgs_matrix(&t, &vec![C64::new(0.2, 0.1); n - 1]).unwrap();
            let z = C64::new(0.4, 1.3);
            let (d1, d2) = uhp_lambda_derivatives(z);
            let r = gauge_residual(&t, C64::new(0.9, 0.1), &phi, uhp_lambda(z).unwrap(), d1, d2);
            assert!(r < 1e-10, "N={n}: {r}");
        }
        let t = build_principal_triple_sln(2).unwrap();
        let m = gauge_m(&t, c(2.0), c(0.5));
        assert_eq!(m[(0, 1)], c(1.0));
        assert!((m.determinant() - 1.0).norm() < 1e-15);
    }

    #[test]
    fn operator_dictionary() {
        let psi = vec![
            C64::new(0.3, 0.1),
            c(-1.0),
            C64::new(0.5, 0.2),
            c(0.7),
            C64::new(0.0, 0.4),
        ];
        let hbar = C64::new(0.8, -0.3);
        let u2 = HitchinPoint::new(
            2,
            vec![DifferentialData::polynomial(
                2,
                vec![c(0.2), C64::new(0.0, 1.0), c(0.5)],
            )],
        )
        .unwrap();
        let t2 = build_principal_triple_sln(2).unwrap();
        let op2 = extract_diff_operator(hbar, &u2).unwrap();
        let coeffs = op2.coefficients(c(0.0));
        assert!((coeffs[2] + hbar * hbar).norm() < 1e-15 && coeffs[1] == c(0.0));
        let u3 = HitchinPoint::new(
            3,
            vec![
                DifferentialData::polynomial(2, vec![c(0.2), C64::new(0.0, 1.0), c(0.5)]),
                DifferentialData::polynomial(3, vec![c(-0.4), c(0.3), c(0.0), c(0.1)]),
            ],
        )
        .unwrap();
        let t3 = principal_triple_sln_with(3, &Normalization::displayed(3)).unwrap();
        let op3 = extract_diff_operator(hbar, &u3).unwrap();
        for k in 0..20 {
            let z = C64::from_polar(0.1 + 0.02 * k as f64, 0.9 * k as f64);
            let (lo, top) = operator_dictionary_residual(&op2, &t2, &psi, z).unwrap();
            assert!(lo < 1e-9 && top < 1e-9, "N=2: {lo} {top}");
            let (lo, top) = operator_dictionary_residual(&op3, &t3, &psi, z).unwrap();
            assert!(lo < 1e-9 && top < 1e-9, "N=3: {lo} {top}");
        }
        assert!(extract_diff_operator(hbar, &HitchinPoint::zero(4)).is_err());
    }
}
