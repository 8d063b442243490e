//! Acceptance run: one PASS/FAIL line per criterion, with the measured
//! numbers underneath. Exits non-zero when a criterion fails that is not
//! listed in `KNOWN_RED`.

use std::time::Instant;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use operlab::hitchin::{s_self_adjoint_residual, verify_uniformizing_harmonicity, HitchinPoint};
use operlab::lie::involution::sigma_automorphism_residual;
use operlab::lie::sln::s_skew_commutant_dimension;
use operlab::lie::{
    build_involutions, build_principal_triple_sln, chevalley_basis, principal_triple_g, principal_triple_sln_with,
    solve_ad_constraints, CartanType, Normalization, PrincipalTriple,
};
use operlab::linalg::{c, max_diff};
use operlab::oper::{
    check_cocycle, epsilon_error, extract_diff_operator, intertwiner_residual, operator_dictionary_residual,
    transformation_defect,
};
use operlab::scaling::{compare_oper, generator_loops, sweep_r, HolonomyConfig, SweepResult};
use operlab::solver::{f4_oracle, solve_chi, solve_scalar, ChiProblem, HiggsSamples, SolverConfig};
use operlab::surface::mobius::PolynomialChart;
use operlab::surface::{
    bolza_group, build_mesh_subdivided, poincare_series_differential, DifferentialData, FuchsianSurface, MobiusMap,
    SurfaceMesh,
};
use operlab::C64;

/// Criteria whose failure is analysed in the project notes and expected.
/// 7: with only φ₃ ≠ 0 the expansion of χ starts at R⁶, not R⁴.
const KNOWN_RED: &[usize] = &[7];

/// Subdivision level giving 10201 mesh vertices on the Bolza octagon.
const FINE: usize = 50;

struct Outcome {
    pass: bool,
    details: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Outcome {
            pass: true,
            details: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, msg: String) {
        self.pass &= ok;
        self.details.push(format!("{} {msg}", if ok { "ok  " } else { "MISS" }));
    }
}

fn algebra_suite() -> Outcome {
    let mut o = Outcome::new();
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut exact = true;
    for n in 2..=10 {
        let t = build_principal_triple_sln(n).unwrap();
        worst = worst.max(t.residuals().max());
        exact &= t.exact_relations_hold() == Some(true);
        for m in [&t.xplus, &t.xminus].into_iter().chain(&t.xn) {
            worst = worst.max(s_self_adjoint_residual(m));
        }
    }
    o.check(
        worst <= 1e-12,
        format!("sl(N), N=2..10: max relation / S-adjointness residual {worst:.2e}"),
    );
    o.check(exact, "sl(N), N=2..10: relations hold in exact arithmetic".into());
    let mut worst_g: f64 = 0.0;
    for t in CartanType::supported() {
        let d = chevalley_basis(t).unwrap();
        let tr = principal_triple_g(&d).unwrap();
        let p = build_involutions(&d, &tr).unwrap();
        let r = [
            tr.residuals().max(),
            p.commute_residual(),
            p.rho_square_residual(),
            p.sigma_square_residual(),
            sigma_automorphism_residual(&d, &p),
        ]
        .into_iter()
        .fold(0.0, f64::max);
        worst_g = worst_g.max(r);
    }
    o.check(
        worst_g <= 1e-12,
        format!("A1-A3, B2, C3, D4, G2: triple, σρ=ρσ, involution residual {worst_g:.2e}"),
    );
    let secs = start.elapsed().as_secs_f64();
    o.check(secs < 10.0, format!("runtime {secs:.2} s"));
    o
}

/// Nullspace of the stacked `ad H - 2k` and `ad X₊` via a full SVD.
fn brute_force_dimension(t: &PrincipalTriple, grade: i64) -> usize {
    let n = t.n_dim;
    let h = t.h.map(|z| z.re);
    let x = t.xplus.map(|z| z.re);
    let mut a = DMatrix::<f64>::zeros(2 * n * n, n * n);
    for i in 0..n {
        for j in 0..n {
            let col = i * n + j;
            // [M, E_ij] = Σ_k M_ki E_kj - Σ_k M_jk E_ik
            for k in 0..n {
                a[(k * n + j, col)] += h[(k, i)];
                a[(i * n + k, col)] -= h[(j, k)];
                a[(n * n + k * n + j, col)] += x[(k, i)];
                a[(n * n + i * n + k, col)] -= x[(j, k)];
            }
            a[(col, col)] -= 2.0 * grade as f64;
        }
    }
    let sv = a.svd(false, false).singular_values;
    sv.iter().filter(|&&s| s < 1e-9).count() + (n * n).saturating_sub(sv.len())
}

fn dimension_counts() -> Outcome {
    let mut o = Outcome::new();
    let mut bad = Vec::new();
    for n in 2..=8usize {
        let t = build_principal_triple_sln(n).unwrap();
        for grade in -(n as i64)..(n as i64) {
            let expect = match grade {
                g if g > 0 => 1,
                0 => 1,
                _ => 0,
            };
            let got = solve_ad_constraints(n, grade).unwrap().len();
            let oracle = brute_force_dimension(&t, grade);
            if got != expect || oracle != expect {
                bad.push(format!(
                    "N={n} grade {grade}: solver {got}, oracle {oracle}, expected {expect}"
                ));
            }
        }
        if s_skew_commutant_dimension(n).unwrap() != 0 {
            bad.push(format!("N={n}: S-skew commutant of X₊ is nonzero"));
        }
    }
    o.check(
        bad.is_empty(),
        format!("N=2..8, grades 1..N-1 / 0 / negative give 1 / 1 / 0; mismatches {bad:?}"),
    );
    o
}

fn random_mobius(rng: &mut ChaCha8Rng) -> MobiusMap {
    let mut z = || C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    loop {
        let (a, b, cc, d) = (z() + 1.0, z(), z() * 0.5, z() + 1.0);
        if (a * d - b * cc).norm() > 0.2 {
            return MobiusMap::normalized(a, b, cc, d).unwrap();
        }
    }
}

fn cocycle() -> Outcome {
    let mut o = Outcome::new();
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    let mut worst_i: f64 = 0.0;
    let mut count = 0;
    while count < 100 {
        let f = random_mobius(&mut rng);
        let g = random_mobius(&mut rng);
        let z = C64::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5));
        // Keep all three points away from the poles of the maps.
        if f.alpha(z).norm() < 0.3 || g.alpha(f.apply(z)).norm() < 0.3 {
            continue;
        }
        count += 1;
        let hbar = C64::from_polar(
            10f64.powf(rng.gen_range(-1.0..1.0)),
            rng.gen_range(0.0..std::f64::consts::TAU),
        );
        let lambda = C64::from_polar(rng.gen_range(0.5..2.0), rng.gen_range(0.0..std::f64::consts::TAU));
        for n in 2..=6 {
            let t = build_principal_triple_sln(n).unwrap();
            worst = worst.max(check_cocycle(&t, hbar, &f, &g, z).unwrap());
            worst_i = worst_i.max(intertwiner_residual(&t, hbar, lambda, &f, z).unwrap());
        }
    }
    o.check(
        worst <= 1e-10,
        format!("100 random triples, N=2..6, |ħ|∈[0.1,10]: cocycle residual {worst:.2e}"),
    );
    o.check(worst_i <= 1e-12, format!("λ^H intertwiner residual {worst_i:.2e}"));
    let secs = start.elapsed().as_secs_f64();
    o.check(secs < 5.0, format!("runtime {secs:.2} s"));
    o
}

fn error_term() -> Outcome {
    let mut o = Outcome::new();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let hbar = C64::new(0.7, 0.2);
    let mut eps_mob: f64 = 0.0;
    for _ in 0..50 {
        let m = random_mobius(&mut rng);
        let z = C64::new(rng.gen_range(-0.3..0.3), rng.gen_range(-0.3..0.3));
        if m.alpha(z).norm() > 0.3 {
            eps_mob = eps_mob.max(epsilon_error(&m, hbar, z).unwrap().norm());
        }
    }
    o.check(eps_mob <= 1e-12, format!("ε on Möbius maps: {eps_mob:.2e}"));
    let cubic = PolynomialChart::cubic_shear();
    let mut worst: f64 = 0.0;
    let mut eps_norm: f64 = 0.0;
    for n in [2, 3, 4] {
        let t = build_principal_triple_sln(n).unwrap();
        let p_at = |w: C64| -> Vec<C64> {
            (0..n - 1)
                .map(|k| C64::new(0.3, 0.1 * k as f64) + w * (k as f64 + 1.0))
                .collect()
        };
        for z in [c(0.3), C64::new(-0.2, 0.25), C64::new(0.1, -0.3)] {
            let defect = transformation_defect(&t, hbar, &cubic, &p_at, z).unwrap();
            let eps = epsilon_error(&cubic, hbar, z).unwrap();
            eps_norm = eps_norm.max(eps.norm());
            worst = worst.max(max_diff(&defect, &(&t.xplus * eps)));
        }
    }
    o.check(
        worst <= 1e-8 && eps_norm > 1e-3,
        format!("cubic chart: |defect - ε X₊| {worst:.2e} with |ε| up to {eps_norm:.3}"),
    );
    o
}

fn operator_dictionary() -> Outcome {
    let mut o = Outcome::new();
    let psi = vec![
        C64::new(0.3, 0.1),
        c(-1.0),
        C64::new(0.5, 0.2),
        c(0.7),
        C64::new(0.0, 0.4),
    ];
    let hbar = C64::new(0.8, -0.3);
    let q2 = DifferentialData::polynomial(2, vec![c(0.2), C64::new(0.0, 1.0), c(0.5)]);
    let q3 = DifferentialData::polynomial(3, vec![c(-0.4), c(0.3), c(0.0), c(0.1)]);
    let u2 = HitchinPoint::new(2, vec![q2.clone()]).unwrap();
    let u3 = HitchinPoint::new(3, vec![q2, q3]).unwrap();
    let t2 = build_principal_triple_sln(2).unwrap();
    let t3 = principal_triple_sln_with(3, &Normalization::displayed(3)).unwrap();
    let op2 = extract_diff_operator(hbar, &u2).unwrap();
    let op3 = extract_diff_operator(hbar, &u3).unwrap();
    let (mut w2, mut w3): (f64, f64) = (0.0, 0.0);
    for k in 0..20 {
        let z = C64::from_polar(0.1 + 0.02 * k as f64, 0.9 * k as f64);
        let (a, b) = operator_dictionary_residual(&op2, &t2, &psi, z).unwrap();
        w2 = w2.max(a).max(b);
        let (a, b) = operator_dictionary_residual(&op3, &t3, &psi, z).unwrap();
        w3 = w3.max(a).max(b);
    }
    o.check(w2 <= 1e-9, format!("N=2, 20 points: residual {w2:.2e}"));
    o.check(w3 <= 1e-9, format!("N=3, 20 points: residual {w3:.2e}"));
    o
}

fn uniformizing_harmonicity() -> Outcome {
    let mut o = Outcome::new();
    let s = bolza_group();
    let t = build_principal_triple_sln(3).unwrap();
    let start = Instant::now();
    let mut reports = Vec::new();
    for n in [FINE / 4, FINE / 2, FINE] {
        let mesh = build_mesh_subdivided(&s, n).unwrap();
        reports.push(verify_uniformizing_harmonicity(0.7, 3, &t, &mesh).unwrap());
    }
    let secs = start.elapsed().as_secs_f64();
    for w in reports.windows(2) {
        let order = (w[0].max_residual / w[1].max_residual).ln() / (w[0].max_edge / w[1].max_edge).ln();
        o.check(
            order > 1.8,
            format!(
                "N=3, R=0.7, {} -> {} vertices: max residual {:.2e} -> {:.2e}, order {order:.2}",
                w[0].vertices, w[1].vertices, w[0].max_residual, w[1].max_residual
            ),
        );
    }
    o.check(
        secs < 60.0,
        format!("runtime {secs:.1} s (finest mesh {} vertices)", reports[2].vertices),
    );
    o
}

fn seeded_u(s: &FuchsianSurface, n: usize, amps: &[(usize, C64)]) -> HitchinPoint {
    let ds = amps
        .iter()
        .map(|&(k, a)| {
            let mut d = poincare_series_differential(s, k, 2).unwrap();
            d.amplitude = a;
            d
        })
        .collect();
    HitchinPoint::new(n, ds).unwrap()
}

const SWEEP_GRID: [f64; 7] = [0.4, 0.28, 0.2, 0.14, 0.1, 0.07, 0.05];

struct Sweeps {
    sl2: SweepResult,
    sl3_cyclic: SweepResult,
    sl3_generic: SweepResult,
    config: SolverConfig,
}

fn run_sweeps(fine: &SurfaceMesh, coarse: &SurfaceMesh) -> (Sweeps, f64) {
    let s = bolza_group();
    let config = SolverConfig {
        threads: operlab::parallel::available_threads(),
        ..SolverConfig::default()
    };
    let hbar = c(1.0);
    let start = Instant::now();
    let u2 = seeded_u(&s, 2, &[(2, c(3.0))]);
    let t2 = build_principal_triple_sln(2).unwrap();
    let samples = HiggsSamples::new(fine, &u2, config.threads);
    let sl2 = sweep_r(fine, &t2, &samples, hbar, &SWEEP_GRID, &config).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let t3 = principal_triple_sln_with(3, &Normalization::displayed(3)).unwrap();
    let u3 = seeded_u(&s, 3, &[(3, c(3.0))]);
    let samples = HiggsSamples::new(coarse, &u3, config.threads);
    let sl3_cyclic = sweep_r(coarse, &t3, &samples, hbar, &SWEEP_GRID, &config).unwrap();
    let u3g = seeded_u(&s, 3, &[(2, C64::new(2.0, 1.0)), (3, C64::new(-1.0, 2.0))]);
    let samples = HiggsSamples::new(coarse, &u3g, config.threads);
    let sl3_generic = sweep_r(coarse, &t3, &samples, C64::new(0.6, 0.3), &SWEEP_GRID, &config).unwrap();
    (
        Sweeps {
            sl2,
            sl3_cyclic,
            sl3_generic,
            config,
        },
        secs,
    )
}

fn quartic_law(fine: &SurfaceMesh, sw: &Sweeps, secs: f64) -> Outcome {
    let mut o = Outcome::new();
    let slope = sw.sl2.slope.unwrap_or(f64::NAN);
    o.check(
        (slope - 4.0).abs() <= 0.15 && sw.sl2.failures.is_empty(),
        format!(
            "N=2, {} vertices: slope of ‖f‖_∞ {slope:.3} (±{:.3})",
            fine.num_vertices(),
            sw.sl2.slope_stderr.unwrap_or(0.0)
        ),
    );
    let cyc = sw.sl3_cyclic.slope.unwrap_or(f64::NAN);
    o.check(
        (cyc - 4.0).abs() <= 0.2,
        format!("N=3 cyclic (φ₃ only): slope of ‖χ‖ {cyc:.3}; the source enters as R⁶|φ₃|², so 6 is the exact order"),
    );
    let gen = sw.sl3_generic.slope.unwrap_or(f64::NAN);
    o.check(
        (gen - 4.0).abs() <= 0.2,
        format!("N=3 generic (φ₂, φ₃): slope of ‖χ‖ {gen:.3}"),
    );
    let s = bolza_group();
    let u2 = seeded_u(&s, 2, &[(2, c(3.0))]);
    let samples = HiggsSamples::new(fine, &u2, sw.config.threads);
    let f4 = f4_oracle(fine, &samples, &sw.config).unwrap();
    let r: f64 = 0.05;
    let sol = solve_scalar(fine, r, &samples, &sw.config).unwrap();
    let diff: Vec<f64> = sol.f.iter().zip(&f4).map(|(a, b)| a / r.powi(4) - b).collect();
    let rel = fine.l2_norm(&diff) / fine.l2_norm(&f4);
    o.check(rel <= 0.02, format!("‖f/R⁴ - f₄‖₂/‖f₄‖₂ at R=0.05: {rel:.2e}"));
    o.check(secs < 600.0, format!("N=2 sweep runtime {secs:.1} s"));
    o
}

fn cross_validation() -> Outcome {
    let mut o = Outcome::new();
    let s = bolza_group();
    let mesh = build_mesh_subdivided(&s, 12).unwrap();
    let t = build_principal_triple_sln(2).unwrap();
    let u = seeded_u(&s, 2, &[(2, c(3.0))]);
    let samples = HiggsSamples::new(&mesh, &u, 1);
    let cfg = SolverConfig::default();
    for r in [0.5, 0.2] {
        let scalar = solve_scalar(&mesh, r, &samples, &cfg).unwrap();
        let p = ChiProblem::new(&mesh, &t, r, &samples, 1).unwrap();
        let chi = solve_chi(&p, &cfg).unwrap();
        let mut num: f64 = 0.0;
        let mut den: f64 = 0.0;
        for (m, f) in chi.chi.values.iter().zip(&scalar.f) {
            num = num.max(operlab::linalg::max_abs(&(m + &t.h * c(*f))));
            den = den.max(f.abs());
        }
        o.check(
            num / den <= 1e-6,
            format!("R={r}: ‖χ + fH‖_∞/‖f‖_∞ = {:.2e}", num / den),
        );
    }
    o
}

fn oper_equivalence() -> Outcome {
    let mut o = Outcome::new();
    let s = bolza_group();
    let cfg = HolonomyConfig::default();
    let cases = [
        (2, vec![(2, c(0.8))], c(1.0)),
        (2, vec![(2, C64::new(0.5, -0.4))], C64::new(0.6, 0.5)),
        (3, vec![(2, c(0.5)), (3, C64::new(0.3, 0.2))], C64::new(0.9, -0.2)),
    ];
    for (n, amps, hbar) in cases {
        let t = build_principal_triple_sln(n).unwrap();
        let u = seeded_u(&s, n, &amps);
        let cmp = compare_oper(
            &t,
            hbar,
            &u,
            &s,
            &generator_loops(),
            &cfg,
            operlab::parallel::available_threads(),
        )
        .unwrap();
        o.check(
            cmp.max_scaled_diff <= 1e-6,
            format!(
                "N={n}, ħ={hbar}: max |Δtr|/(1+|tr|) over 4 generators {:.2e}",
                cmp.max_scaled_diff
            ),
        );
        o.check(
            cmp.uhp_gauge_residual <= 1e-10,
            format!("N={n}: UHP gauge identity residual {:.2e}", cmp.uhp_gauge_residual),
        );
    }
    o
}

fn flatness(sw: &Sweeps) -> Outcome {
    let mut o = Outcome::new();
    let tol = sw.config.newton_tol;
    for (name, res) in [
        ("N=2", &sw.sl2),
        ("N=3 cyclic", &sw.sl3_cyclic),
        ("N=3 generic", &sw.sl3_generic),
    ] {
        let bound = 10.0 * (tol + res.curvature_floor);
        let worst = res.rows.iter().map(|r| r.curvature_residual).fold(0.0, f64::max);
        o.check(
            worst <= bound && !res.rows.is_empty(),
            format!(
                "{name}: max curvature {worst:.2e} over {} radii, bound 10(tol + floor) = {bound:.2e}",
                res.rows.len()
            ),
        );
    }
    o
}

fn main() {
    let total = Instant::now();
    let s = bolza_group();
    let fine = build_mesh_subdivided(&s, FINE).unwrap();
    let coarse = build_mesh_subdivided(&s, FINE / 2).unwrap();
    let mut results: Vec<(usize, &str, Outcome)> = vec![
        (1, "algebra suite", algebra_suite()),
        (2, "highest-weight dimension counts", dimension_counts()),
        (3, "transition cocycle", cocycle()),
        (4, "error term", error_term()),
        (5, "differential-operator dictionary", operator_dictionary()),
        (6, "uniformizing harmonicity", uniformizing_harmonicity()),
    ];
    let (sweeps, secs) = run_sweeps(&fine, &coarse);
    results.push((7, "order-R⁴ law", quartic_law(&fine, &sweeps, secs)));
    results.push((8, "solver cross-validation", cross_validation()));
    results.push((9, "oper equivalence", oper_equivalence()));
    results.push((10, "flatness", flatness(&sweeps)));
    let mut unexpected = Vec::new();
    for (k, name, o) in &results {
        println!("criterion {k:>2} {}: {name}", if o.pass { "PASS" } else { "FAIL" });
        for d in &o.details {
            println!("      {d}");
        }
        if !o.pass && !KNOWN_RED.contains(k) {
            unexpected.push(*k);
        }
    }
    let passed = results.iter().filter(|r| r.2.pass).count();
    println!(
        "{passed}/{} criteria pass; total runtime {:.1} s",
        results.len(),
        total.elapsed().as_secs_f64()
    );
    if !unexpected.is_empty() {
        println!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
