//! Property tests for the structural invariants: cocycle and intertwiner
//! identities, Higgs-field symmetries, the discrete Laplacian, derivative
//! stencils, gauge invariance of holonomy traces and the log-log fit.

use std::sync::OnceLock;

use proptest::prelude::*;

use operlab::hitchin::{higgs_matrix, s_self_adjoint_residual, HitchinPoint};
use operlab::lie::sln::s_transpose;
use operlab::lie::{build_principal_triple_sln, PrincipalTriple};
use operlab::linalg::{c, char_poly, max_abs, max_diff, trace};
use operlab::oper::{check_cocycle, intertwiner_residual, transition_t};
use operlab::scaling::{holonomy, limit_connection, loglog_fit, GaugedFamily, HolonomyConfig};
use operlab::solver::chi::hermitian_s_skew_basis;
use operlab::surface::{
    bolza_group, build_mesh_subdivided, read_mesh, write_mesh, DifferentialData, MobiusMap, SurfaceMesh,
};
use operlab::C64;

fn mesh() -> &'static SurfaceMesh {
    static MESH: OnceLock<SurfaceMesh> = OnceLock::new();
    MESH.get_or_init(|| build_mesh_subdivided(&bolza_group(), 6).unwrap())
}

fn triple(n: usize) -> PrincipalTriple {
    build_principal_triple_sln(n).unwrap()
}

fn complex(r: f64) -> impl Strategy<Value = C64> {
    (-r..r, -r..r).prop_map(|(a, b)| C64::new(a, b))
}

/// Unimodular Möbius maps close enough to the identity that `α` stays away
/// from zero on the sampling disk.
fn mobius() -> impl Strategy<Value = MobiusMap> {
    (complex(0.5), complex(0.3), complex(0.3)).prop_map(|(a, b, cc)| {
        let a = a + 1.5;
        MobiusMap::new(a, b, cc, (1.0 + b * cc) / a).unwrap()
    })
}

fn hbar() -> impl Strategy<Value = C64> {
    (-1.0f64..1.0, 0.0..std::f64::consts::TAU).prop_map(|(l, t)| C64::from_polar(10f64.powf(l), t))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cocycle_and_intertwiner(n in 2usize..=6, f in mobius(), g in mobius(), h in hbar(), z in complex(0.3), lam in complex(1.0)) {
        let t = triple(n);
        prop_assert!(check_cocycle(&t, h, &f, &g, z).unwrap() < 1e-10);
        let lam = lam + 1.5;
        prop_assert!(intertwiner_residual(&t, h, lam, &f, z).unwrap() < 1e-12);
    }

    #[test]
    fn transitions_are_unipotent_times_torus(n in 2usize..=6, f in mobius(), h in hbar(), z in complex(0.3)) {
        let t = triple(n);
        let m = transition_t(&t, h, &f, z).unwrap();
        prop_assert!((m.determinant() - 1.0).norm() < 1e-9 * max_abs(&m).powi(n as i32).max(1.0));
        for i in 0..n {
            for j in 0..i {
                prop_assert_eq!(m[(i, j)], c(0.0));
            }
        }
    }

    #[test]
    fn higgs_field_is_traceless_and_s_self_adjoint(n in 2usize..=6, p in proptest::collection::vec(complex(2.0), 5)) {
        let t = triple(n);
        let m = higgs_matrix(&t, &p[..n - 1]).unwrap();
        prop_assert!(trace(&m).norm() < 1e-12);
        prop_assert!(s_self_adjoint_residual(&m) < 1e-12);
        prop_assert!(char_poly(&m)[1].norm() < 1e-10);
    }

    #[test]
    fn s_skew_basis_is_orthonormal_and_hermitian(n in 2usize..=6) {
        let basis = hermitian_s_skew_basis(n);
        prop_assert_eq!(basis.len(), n * (n - 1) / 2);
        for (i, a) in basis.iter().enumerate() {
            prop_assert!(max_diff(a, &a.adjoint()) < 1e-14);
            prop_assert!(max_diff(&s_transpose(a), &(-a)) < 1e-14);
            for (j, b) in basis.iter().enumerate() {
                let ip = (a.adjoint() * b).trace();
                let expect = if i == j { 1.0 } else { 0.0 };
                prop_assert!((ip - expect).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn laplacian_is_symmetric_nonpositive_and_conservative(
        f in proptest::collection::vec(-1.0f64..1.0, mesh().num_classes()),
        g in proptest::collection::vec(-1.0f64..1.0, mesh().num_classes()),
        shift in -5.0f64..5.0,
    ) {
        let k = mesh().stiffness();
        let kf = k.matvec(&f);
        let kg = k.matvec(&g);
        let fkg: f64 = f.iter().zip(&kg).map(|(a, b)| a * b).sum();
        let gkf: f64 = g.iter().zip(&kf).map(|(a, b)| a * b).sum();
        prop_assert!((fkg - gkf).abs() < 1e-10 * (1.0 + fkg.abs()));
        let fkf: f64 = f.iter().zip(&kf).map(|(a, b)| a * b).sum();
        prop_assert!(fkf <= 1e-12);
        prop_assert!(kf.iter().sum::<f64>().abs() < 1e-10);
        let shifted: Vec<f64> = f.iter().map(|x| x + shift).collect();
        let ks = k.matvec(&shifted);
        prop_assert!(ks.iter().zip(&kf).all(|(a, b)| (a - b).abs() < 1e-10));
    }

    #[test]
    fn dz_stencils_differentiate_quadratics(a in complex(1.0), b in complex(1.0), q in proptest::collection::vec(complex(1.0), 3)) {
        // u = a z + b z̄ + q0 z² + q1 z z̄ + q2 z̄², so ∂u = a + 2 q0 z + q1 z̄.
        static STENCILS: OnceLock<Vec<Vec<(usize, C64)>>> = OnceLock::new();
        let m = mesh();
        let st = STENCILS.get_or_init(|| m.dz_stencils());
        let u = |z: C64| a * z + b * z.conj() + q[0] * z * z + q[1] * z * z.conj() + q[2] * z.conj() * z.conj();
        for v in (0..m.num_vertices()).step_by(17) {
            let z = m.points[v];
            let d: C64 = st[v].iter().map(|&(k, w)| w * u(m.points[k])).sum();
            prop_assert!((d - (a + 2.0 * q[0] * z + q[1] * z.conj())).norm() < 1e-8);
        }
    }

    #[test]
    fn loglog_fit_recovers_power_laws(k in -6.0f64..6.0, amp in 0.01f64..100.0) {
        let x = [0.4, 0.28, 0.2, 0.14, 0.1];
        let y: Vec<f64> = x.iter().map(|r: &f64| amp * r.powf(k)).collect();
        let (slope, err) = loglog_fit(&x, &y).unwrap();
        prop_assert!((slope - k).abs() < 1e-10);
        prop_assert!(err < 1e-8);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn holonomy_traces_are_gauge_invariant(a in complex(0.4), b in complex(0.4), k in complex(0.4), word in 0usize..8) {
        let s = bolza_group();
        let t = triple(2);
        let u = HitchinPoint::new(2, vec![DifferentialData::constant(2, C64::new(0.3, -0.2))]).unwrap();
        let fam = limit_connection(&t, C64::new(0.8, 0.1), &u).unwrap();
        let cfg = HolonomyConfig::default();
        let plain = holonomy(&fam, &s, &[word], &cfg).unwrap();
        let gauged = GaugedFamily {
            inner: limit_connection(&t, C64::new(0.8, 0.1), &u).unwrap(),
            generator: &t.xplus + &t.xminus * c(0.5) + &t.h * c(0.2),
            coeffs: [a, b, k],
        };
        let g = holonomy(&gauged, &s, &[word], &cfg).unwrap();
        prop_assert!((plain.trace - g.trace).norm() < 1e-8 * (1.0 + plain.trace.norm()), "{} vs {}", plain.trace, g.trace);
    }

    #[test]
    fn mesh_text_round_trip(n in 1usize..5) {
        let s = bolza_group();
        let m = build_mesh_subdivided(&s, n).unwrap();
        let back = read_mesh(&write_mesh(&m), &s).unwrap();
        prop_assert_eq!(&back.points, &m.points);
        prop_assert_eq!(&back.class_of, &m.class_of);
        prop_assert!((back.total_area() - std::f64::consts::PI).abs() < 1e-9);
    }
}
