//! One function per subcommand. Each returns a JSON report whose `pass`
//! field decides the exit code.

use anyhow::{bail, Context, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Map, Value};

use operlab::general_oper::GOperData;
use operlab::hitchin::{higgs_matrix, s_self_adjoint_residual, HitchinPoint};
use operlab::lie::involution::sigma_automorphism_residual;
use operlab::lie::kostant::kernel_grade_dimensions;
use operlab::lie::sln::s_skew_commutant_dimension;
use operlab::lie::{build_involutions, chevalley_basis, principal_triple_g, solve_ad_constraints, CartanType};
use operlab::linalg::{c, max_abs, max_diff, ComplexMatrix};
use operlab::oper::{
    alpha_power_h, check_cocycle, epsilon_error, extract_diff_operator, gauge_residual, intertwiner_residual,
    operator_dictionary_residual, transformation_defect,
};
use operlab::scaling::{compare_oper, holonomy, limit_connection, r_grid, sweep_r, GaugedFamily};
use operlab::solver::{format_solution, solve_chi, solve_scalar, ChiProblem, HiggsSamples, SolutionSummary};
use operlab::surface::metric::{uhp_lambda, uhp_lambda_derivatives};
use operlab::surface::mobius::PolynomialChart;
use operlab::surface::{bolza_group, write_mesh, DifferentialData, MobiusMap};
use operlab::C64;

use crate::config::{Group, RunConfig};
use crate::output::{verdict, Artifacts};

pub struct Report {
    pub pass: bool,
    pub body: Map<String, Value>,
}

/// Collects named numeric checks against thresholds.
struct Checks {
    pass: bool,
    entries: Map<String, Value>,
}

impl Checks {
    fn new() -> Self {
        Checks {
            pass: true,
            entries: Map::new(),
        }
    }

    fn at_most(&mut self, name: &str, value: f64, limit: f64) {
        let ok = value <= limit;
        self.pass &= ok;
        self.entries
            .insert(name.into(), json!({ "value": value, "limit": limit, "pass": ok }));
    }

    fn holds(&mut self, name: &str, ok: bool, info: Value) {
        self.pass &= ok;
        self.entries.insert(name.into(), json!({ "value": info, "pass": ok }));
    }

    fn finish(self, command: &str, mut extra: Map<String, Value>) -> Report {
        extra.insert("checks".into(), Value::Object(self.entries));
        Report {
            pass: self.pass,
            body: verdict(command, self.pass, extra),
        }
    }
}

/// A random `SL(2, C)` Möbius map with `|a|` bounded away from zero.
fn random_mobius(rng: &mut ChaCha8Rng) -> MobiusMap {
    let mut z = || C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let (a, b, cc) = (z() + 1.5, z() * 0.5, z() * 0.5);
    MobiusMap::new(a, b, cc, (1.0 + b * cc) / a).expect("unimodular by construction")
}

/// A point where both maps are regular and `|α|` is not tiny.
fn random_point(rng: &mut ChaCha8Rng, f: &MobiusMap, g: &MobiusMap) -> Option<C64> {
    let z = C64::new(rng.gen_range(-0.3..0.3), rng.gen_range(-0.3..0.3));
    (f.alpha(z).norm() > 0.2 && g.alpha(f.apply(z)).norm() > 0.2).then_some(z)
}

pub fn lie_check(cfg: &RunConfig) -> Result<Report> {
    let tol = cfg.thresholds.algebra;
    let mut ch = Checks::new();
    let mut extra = Map::new();
    match &cfg.group {
        Group::Sln(n) => {
            let n = *n;
            let t = cfg.triple()?;
            ch.at_most("triple_relations", t.residuals().max(), tol);
            ch.holds(
                "exact_relations",
                t.exact_relations_hold() == Some(true),
                json!(t.exact_relations_hold()),
            );
            let s_adj = [&t.xplus, &t.xminus]
                .into_iter()
                .chain(&t.xn)
                .map(s_self_adjoint_residual)
                .fold(0.0, f64::max);
            ch.at_most("s_self_adjoint", s_adj, tol);
            let dims: Vec<(i64, usize)> = (-(n as i64)..n as i64)
                .map(|g| Ok((g, solve_ad_constraints(n, g)?.len())))
                .collect::<Result<_>>()?;
            let ok = dims.iter().all(|&(g, d)| d == usize::from(g >= 0));
            ch.holds("grade_dimensions", ok, json!(dims));
            let skew = s_skew_commutant_dimension(n)?;
            ch.holds("s_skew_commutant_dimension", skew == 0, json!(skew));
            extra.insert("n".into(), json!(n));
            extra.insert("exponents".into(), json!(t.exponents));
            extra.insert("residuals".into(), serde_json::to_value(t.residuals())?);
        }
        Group::Cartan(label) => {
            let ty: CartanType = label.parse()?;
            let d = chevalley_basis(ty)?;
            ch.holds("jacobi_exact", d.jacobi_residual() == 0, json!(d.jacobi_residual()));
            let t = principal_triple_g(&d)?;
            ch.at_most("triple_relations", t.residuals().max(), tol);
            let p = build_involutions(&d, &t)?;
            ch.at_most("sigma_rho_commute", p.commute_residual(), tol);
            ch.at_most("rho_square", p.rho_square_residual(), tol);
            ch.at_most("sigma_square", p.sigma_square_residual(), tol);
            ch.at_most("sigma_automorphism", sigma_automorphism_residual(&d, &p), tol);
            let min_eig = p.form_min_eigenvalue();
            ch.holds("hermitian_form_positive", min_eig > 0.0, json!(min_eig));
            let total: usize = t.exponents.iter().map(|m| 2 * m + 1).sum();
            ch.holds("decomposition_fills_algebra", total == d.dim(), json!([total, d.dim()]));
            extra.insert("type".into(), json!(ty.to_string()));
            extra.insert("dimension".into(), json!(d.dim()));
            extra.insert("exponents".into(), json!(t.exponents));
            extra.insert("highest_weight_counts".into(), json!(kernel_grade_dimensions(&d)?));
        }
    }
    Ok(ch.finish("lie-check", extra))
}

pub fn oper_check(cfg: &RunConfig) -> Result<Report> {
    let n = cfg.sln_rank()?;
    let t = cfg.triple()?;
    let th = &cfg.thresholds;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (mut cocycle, mut intertwiner, mut eps_mobius): (f64, f64, f64) = (0.0, 0.0, 0.0);
    let mut done = 0;
    while done < cfg.samples {
        let f = random_mobius(&mut rng);
        let g = random_mobius(&mut rng);
        let Some(z) = random_point(&mut rng, &f, &g) else {
            continue;
        };
        done += 1;
        let hbar = C64::from_polar(
            10f64.powf(rng.gen_range(-1.0..1.0)),
            rng.gen_range(0.0..std::f64::consts::TAU),
        );
        let lambda = C64::from_polar(rng.gen_range(0.5..2.0), rng.gen_range(0.0..std::f64::consts::TAU));
        cocycle = cocycle.max(check_cocycle(&t, hbar, &f, &g, z)?);
        intertwiner = intertwiner.max(intertwiner_residual(&t, hbar, lambda, &f, z)?);
        eps_mobius = eps_mobius.max(epsilon_error(&f, hbar, z)?.norm());
    }
    let mut ch = Checks::new();
    ch.at_most("cocycle", cocycle, th.cocycle);
    ch.at_most("intertwiner", intertwiner, th.algebra);
    ch.at_most("epsilon_mobius", eps_mobius, th.algebra);

    let hbar = cfg.hbar();
    let cubic = PolynomialChart::cubic_shear();
    let p_at = |w: C64| -> Vec<C64> {
        (0..n - 1)
            .map(|k| C64::new(0.3, 0.1 * k as f64) + w * (k as f64 + 1.0))
            .collect()
    };
    let mut defect: f64 = 0.0;
    for z in [c(0.3), C64::new(-0.2, 0.25), C64::new(0.1, -0.3)] {
        let d = transformation_defect(&t, hbar, &cubic, &p_at, z)?;
        let eps = epsilon_error(&cubic, hbar, z)?;
        defect = defect.max(max_diff(&d, &(&t.xplus * eps)));
    }
    ch.at_most("defect_minus_epsilon_xplus", defect, th.defect);

    let phi = higgs_matrix(&t, &vec![C64::new(0.2, 0.1); n - 1])?;
    let mut gauge: f64 = 0.0;
    for z in [C64::new(0.4, 1.3), C64::new(-1.1, 0.6), C64::new(2.0, 3.0)] {
        let (d1, d2) = uhp_lambda_derivatives(z);
        gauge = gauge.max(gauge_residual(&t, hbar, &phi, uhp_lambda(z)?, d1, d2));
    }
    ch.at_most("uhp_gauge_identity", gauge, th.gauge_identity);

    if n <= 3 {
        let psi = [
            C64::new(0.3, 0.1),
            c(-1.0),
            C64::new(0.5, 0.2),
            c(0.7),
            C64::new(0.0, 0.4),
        ];
        let mut ds = vec![DifferentialData::polynomial(
            2,
            vec![c(0.2), C64::new(0.0, 1.0), c(0.5)],
        )];
        if n == 3 {
            ds.push(DifferentialData::polynomial(3, vec![c(-0.4), c(0.3), c(0.0), c(0.1)]));
        }
        let op = extract_diff_operator(hbar, &HitchinPoint::new(n, ds)?)?;
        let mut worst: f64 = 0.0;
        for k in 0..20 {
            let z = C64::from_polar(0.1 + 0.02 * k as f64, 0.9 * k as f64);
            let (lo, top) = operator_dictionary_residual(&op, &t, &psi, z)?;
            worst = worst.max(lo).max(top);
        }
        ch.at_most("operator_dictionary", worst, th.dictionary);
    }
    let mut extra = Map::new();
    extra.insert("n".into(), json!(n));
    extra.insert("samples".into(), json!(cfg.samples));
    Ok(ch.finish("oper-check", extra))
}

/// Rows of a Hermitian matrix field as `re im` pairs, row-major.
fn matrix_row(m: &ComplexMatrix) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * m.len());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            out.push(m[(i, j)].re);
            out.push(m[(i, j)].im);
        }
    }
    out
}

pub fn solve(cfg: &RunConfig, art: &mut Artifacts) -> Result<Report> {
    let surface = bolza_group();
    let mesh = cfg.mesh(&surface)?;
    let u = cfg.hitchin_point(&surface)?;
    let t = cfg.triple()?;
    let samples = HiggsSamples::new(&mesh, &u, cfg.solver.threads);
    let (summary, rows) = if t.n_dim == 2 {
        let sol = solve_scalar(&mesh, cfg.r, &samples, &cfg.solver).context("scalar solve failed")?;
        let summary = SolutionSummary {
            r: cfg.r,
            sup_norm: sol.sup_norm(),
            l2_norm: mesh.l2_norm(&sol.f),
            iterations: sol.iterations,
            residual: sol.residual,
        };
        (summary, sol.f.iter().map(|&f| vec![f]).collect::<Vec<_>>())
    } else {
        let problem = ChiProblem::new(&mesh, &t, cfg.r, &samples, cfg.solver.threads)?;
        let sol = solve_chi(&problem, &cfg.solver).context("matrix solve failed")?;
        let summary = SolutionSummary {
            r: cfg.r,
            sup_norm: sol.chi.sup_norm(),
            l2_norm: sol.chi.l2_norm(&mesh),
            iterations: sol.iterations,
            residual: sol.residual,
        };
        (summary, sol.chi.values.iter().map(matrix_row).collect())
    };
    // One row per `v` line of mesh.txt; seam copies repeat their class value.
    let per_vertex: Vec<Vec<f64>> = mesh.class_of.iter().map(|&k| rows[k].clone()).collect();
    art.text("solution.txt", &format_solution(&per_vertex))?;
    art.text("mesh.txt", &write_mesh(&mesh))?;
    let summary_json = art.json("summary.json", &summary)?;
    let mut extra = Map::new();
    extra.insert("summary".into(), summary_json);
    extra.insert("mesh_vertices".into(), json!(mesh.num_vertices()));
    extra.insert("surface_vertices".into(), json!(mesh.num_classes()));
    Ok(Report {
        pass: true,
        body: verdict("solve", true, extra),
    })
}

pub fn sweep(cfg: &RunConfig, art: &mut Artifacts) -> Result<Report> {
    let surface = bolza_group();
    let mesh = cfg.mesh(&surface)?;
    let u = cfg.hitchin_point(&surface)?;
    let t = cfg.triple()?;
    let s = &cfg.sweep;
    let grid = r_grid(s.r_min, s.r_max, s.count, s.log_spaced)?;
    let samples = HiggsSamples::new(&mesh, &u, cfg.solver.threads);
    let res = sweep_r(&mesh, &t, &samples, cfg.hbar(), &grid, &cfg.solver)?;
    art.csv("sweep.csv", &res.rows)?;
    let th = &cfg.thresholds;
    let mut extra = Map::new();
    let pass = if samples.is_zero() {
        let floor = res.rows.iter().all(|r| r.sup_f <= 1e-10 && r.conn_diff <= 1e-10);
        extra.insert("verdict".into(), json!("norms at solver floor, slope not defined"));
        floor && res.failures.is_empty()
    } else {
        let in_band = res.slope.is_some_and(|k| (k - th.slope_target).abs() <= th.slope_tol);
        extra.insert(
            "verdict".into(),
            json!(format!(
                "slope {} against {} ± {}",
                res.slope.map_or("undefined".into(), |k| format!("{k:.4}")),
                th.slope_target,
                th.slope_tol
            )),
        );
        in_band && res.failures.is_empty()
    };
    let summary = art.json("sweep_summary.json", &res)?;
    extra.insert("result".into(), summary);
    Ok(Report {
        pass,
        body: verdict("sweep", pass, extra),
    })
}

#[derive(Serialize)]
struct TraceEntry<'a> {
    word: &'a [usize],
    family: &'static str,
    trace_re: f64,
    trace_im: f64,
    det_err: f64,
}

pub fn holonomy_cmd(cfg: &RunConfig, art: &mut Artifacts) -> Result<Report> {
    let surface = bolza_group();
    let u = cfg.hitchin_point(&surface)?;
    let t = cfg.triple()?;
    let hbar = cfg.hbar();
    let th = &cfg.thresholds;
    let cmp = compare_oper(&t, hbar, &u, &surface, &cfg.loops, &cfg.holonomy, cfg.solver.threads)?;
    let mut entries = Vec::new();
    for l in &cmp.loops {
        for (family, tr) in [("limit", l.limit_trace), ("oper", l.oper_trace)] {
            entries.push(TraceEntry {
                word: &l.word,
                family,
                trace_re: tr[0],
                trace_im: tr[1],
                det_err: l.det_err,
            });
        }
    }
    art.json_list("holonomy.json", &entries)?;
    let mut ch = Checks::new();
    ch.at_most("max_scaled_trace_diff", cmp.max_scaled_diff, th.trace);
    ch.at_most("uhp_gauge_identity", cmp.uhp_gauge_residual, th.gauge_identity);
    let n = t.n_dim as f64;
    for l in cmp.loops.iter().filter(|l| l.word.is_empty()) {
        let d = (C64::new(l.limit_trace[0], l.limit_trace[1]) - n).norm();
        ch.at_most("trivial_loop_trace_minus_n", d, 1e-8);
    }
    if cfg.gauge_perturbation {
        let limit = limit_connection(&t, hbar, &u)?;
        let generator = &t.xplus * c(0.4) + &t.xminus * C64::new(0.0, 0.3) + &t.h * c(0.2);
        let gauged = GaugedFamily {
            inner: limit,
            generator,
            coeffs: [C64::new(0.3, 0.1), C64::new(-0.2, 0.4), c(0.5)],
        };
        let mut worst: f64 = 0.0;
        for l in &cmp.loops {
            let rec = holonomy(&gauged, &surface, &l.word, &cfg.holonomy)?;
            let base = C64::new(l.limit_trace[0], l.limit_trace[1]);
            worst = worst.max((rec.trace - base).norm() / (1.0 + base.norm()));
        }
        ch.at_most("gauge_perturbation_trace_change", worst, th.gauge_invariance);
    }
    let mut extra = Map::new();
    extra.insert("comparison".into(), serde_json::to_value(&cmp)?);
    Ok(ch.finish("holonomy", extra))
}

pub fn gcheck(cfg: &RunConfig) -> Result<Report> {
    let ty: CartanType = match &cfg.group {
        Group::Cartan(label) => label.parse()?,
        Group::Sln(n) if (2..=5).contains(n) => CartanType::A(n - 1),
        Group::Sln(n) => bail!("gcheck supports sl(N) for N <= 5 only (got {n}); use group.cartan"),
    };
    let g = GOperData::new(ty, cfg.hbar())?;
    let th = &cfg.thresholds;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (mut cocycle, mut borel): (f64, bool) = (0.0, true);
    let mut reduction: f64 = 0.0;
    let mut done = 0;
    while done < cfg.samples.min(50) {
        let f = random_mobius(&mut rng);
        let h = random_mobius(&mut rng);
        let Some(z) = random_point(&mut rng, &f, &h) else {
            continue;
        };
        done += 1;
        let hbar = C64::from_polar(
            10f64.powf(rng.gen_range(-1.0..1.0)),
            rng.gen_range(0.0..std::f64::consts::TAU),
        );
        cocycle = cocycle.max(check_cocycle(&g.triple, hbar, &f, &h, z)?);
        let tr = g.transition(&f, z)?;
        borel &= GOperData::is_borel(&tr, 1e-12 * max_abs(&tr).max(1.0));
        let g0 = GOperData {
            hbar: c(0.0),
            ..g.clone()
        };
        let ad = alpha_power_h(&g.triple, f.alpha(z));
        reduction = reduction.max(max_diff(&g0.transition(&f, z)?, &ad) / max_abs(&ad).max(1.0));
    }
    let coeffs: Vec<C64> = (0..g.rank())
        .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let v = g.higgs_element(&coeffs)? / g.hbar;
    let (k, good) = g.good_position(&v);
    let mut ch = Checks::new();
    ch.at_most("cocycle", cocycle, th.g_cocycle);
    ch.holds("transitions_borel", borel, json!(borel));
    ch.at_most("zero_hbar_reduction", reduction, th.algebra);
    ch.at_most(
        "ad_conjugation_xplus",
        g.ad_conjugation_residual(C64::new(0.7, 0.4)),
        th.algebra,
    );
    ch.at_most("good_position", good, th.algebra);
    ch.at_most("good_position_multiple", (k - 1.0 / g.hbar).norm(), th.algebra);
    let mut extra = Map::new();
    extra.insert("type".into(), json!(ty.to_string()));
    extra.insert("exponents".into(), json!(g.triple.exponents));
    Ok(ch.finish("gcheck", extra))
}

/// Gather the verdicts of earlier runs in the output directory.
pub fn report(art: &mut Artifacts) -> Result<Report> {
    let mut found = Vec::new();
    let mut paths: Vec<_> = std::fs::read_dir(&art.dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json") && p.file_name().is_some_and(|n| n != "report.json"))
        .collect();
    paths.sort();
    for p in paths {
        let Ok(text) = std::fs::read_to_string(&p) else {
            continue;
        };
        let Ok(Value::Object(v)) = serde_json::from_str::<Value>(&text) else {
            continue;
        };
        if let (Some(cmd), Some(pass)) = (v.get("command"), v.get("pass").and_then(Value::as_bool)) {
            found.push(json!({
                "file": p.file_name().map(|n| n.to_string_lossy().into_owned()),
                "command": cmd,
                "pass": pass,
                "config_sha256": v.get("config_sha256"),
            }));
        }
    }
    if found.is_empty() {
        bail!("no subcommand verdicts found in {}", art.dir.display());
    }
    let pass = found.iter().all(|f| f["pass"] == json!(true));
    let mut extra = Map::new();
    extra.insert("runs".into(), Value::Array(found));
    Ok(Report {
        pass,
        body: verdict("report", pass, extra),
    })
}
