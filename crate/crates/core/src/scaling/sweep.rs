//! R-sweeps of the harmonic-metric family towards the conformal limit.

use serde::Serialize;

use super::curvature::discrete_curvature;
use super::family::{assemble_family, connection_difference, limit_family_on_mesh};
use crate::error::{Error, Result};
use crate::lie::PrincipalTriple;
use crate::linalg::C64;
use crate::solver::chi::ChiProblem;
use crate::solver::{solve_chi, solve_scalar, ChiSolution, HiggsSamples, SolverConfig};
use crate::surface::SurfaceMesh;

/// One grid point of a sweep; field names are the CSV header.
#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    #[serde(rename = "R")]
    pub r: f64,
    /// `‖f‖_∞` for `N = 2`, `max ‖χ̃‖_F` otherwise.
    pub sup_f: f64,
    pub l2_f: f64,
    pub newton_iters: usize,
    /// Sup of the normalized discrete curvature of `∇_{R,ħ,u}`.
    pub curvature_residual: f64,
    /// `max ‖A_R − A_0‖` over vertices.
    pub conn_diff: f64,
    /// Log–log slope of `sup_f` against the previous grid point.
    pub slope_partial: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    /// `(R, message)` for grid points whose solve failed.
    pub failures: Vec<(f64, String)>,
    /// Slope of `log sup_f` against `log R` on the smallest-R half.
    pub slope: Option<f64>,
    pub slope_stderr: Option<f64>,
    /// Slope of `log conn_diff` on the same points.
    pub conn_slope: Option<f64>,
    /// Discrete curvature of the exactly flat limit family on this mesh.
    pub curvature_floor: f64,
}

/// Least-squares slope and its standard error for `log y` against `log x`.
pub fn loglog_fit(x: &[f64], y: &[f64]) -> Option<(f64, f64)> {
    let pts: Vec<(f64, f64)> = x
        .iter()
        .zip(y)
        .filter(|(a, b)| **a > 0.0 && **b > 0.0 && b.is_finite())
        .map(|(a, b)| (a.ln(), b.ln()))
        .collect();
    let slope = crate::solver::loglog_slope(x, y)?;
    let n = pts.len() as f64;
    if pts.len() < 3 {
        return Some((slope, f64::NAN));
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let rss: f64 = pts.iter().map(|p| (p.1 - my - slope * (p.0 - mx)).powi(2)).sum();
    Some((slope, (rss / (n - 2.0) / sxx).sqrt()))
}

/// Norms below this are treated as the exact zero solution.
const ZERO_FLOOR: f64 = 1e-13;

/// Solve at every `R` of a strictly decreasing grid, assemble
/// `∇_{R,ħ,u}`, and measure its curvature and distance to `∇_{0,ħ,u}`.
/// Failed grid points are recorded and skipped.
pub fn sweep_r(
    mesh: &SurfaceMesh,
    triple: &PrincipalTriple,
    samples: &HiggsSamples,
    hbar: C64,
    grid: &[f64],
    config: &SolverConfig,
) -> Result<SweepResult> {
    if grid.is_empty() || grid.iter().any(|&r| !r.is_finite() || r <= 0.0) {
        return Err(Error::InvalidArgument(
            "sweep grid must be non-empty and positive".into(),
        ));
    }
    if grid.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidArgument("sweep grid must be strictly decreasing".into()));
    }
    config.validate()?;
    let threads = config.threads;
    let stencils = mesh.dz_stencils();
    let limit = limit_family_on_mesh(mesh, triple, samples, hbar, threads)?;
    let curvature_floor = discrete_curvature(mesh, triple, &limit, &stencils, threads)?.sup;
    let mut rows: Vec<SweepRow> = Vec::new();
    let mut failures = Vec::new();
    for &r in grid {
        let problem = ChiProblem::new(mesh, triple, r, samples, threads)?;
        let solved = if triple.n_dim == 2 {
            solve_scalar(mesh, r, samples, config).map(|s| {
                let sup = s.sup_norm();
                let l2 = mesh.l2_norm(&s.f);
                (ChiSolution::from_scalar(&s, triple), sup, l2)
            })
        } else {
            solve_chi(&problem, config).map(|s| {
                let sup = s.chi.sup_norm();
                let l2 = s.chi.l2_norm(mesh);
                (s, sup, l2)
            })
        };
        let (sol, sup_f, l2_f) = match solved {
            Ok(x) => x,
            Err(e) => {
                failures.push((r, e.to_string()));
                continue;
            }
        };
        let family = assemble_family(&problem, &sol, hbar, threads)?;
        let curvature_residual = discrete_curvature(mesh, triple, &family, &stencils, threads)?.sup;
        let conn_diff = connection_difference(&family, &limit)?;
        let slope_partial = rows.last().and_then(|prev: &SweepRow| {
            if prev.sup_f > ZERO_FLOOR && sup_f > ZERO_FLOOR {
                Some((prev.sup_f / sup_f).ln() / (prev.r / r).ln())
            } else {
                None
            }
        });
        rows.push(SweepRow {
            r,
            sup_f,
            l2_f,
            newton_iters: sol.iterations,
            curvature_residual,
            conn_diff,
            slope_partial,
        });
    }
    let half = &rows[rows.len() / 2..];
    let rs: Vec<f64> = half.iter().map(|r| r.r).collect();
    let sups: Vec<f64> = half
        .iter()
        .map(|r| if r.sup_f > ZERO_FLOOR { r.sup_f } else { 0.0 })
        .collect();
    let diffs: Vec<f64> = half
        .iter()
        .map(|r| if r.conn_diff > ZERO_FLOOR { r.conn_diff } else { 0.0 })
        .collect();
    let fit = loglog_fit(&rs, &sups);
    Ok(SweepResult {
        slope: fit.map(|f| f.0),
        slope_stderr: fit.map(|f| f.1).filter(|s| s.is_finite()),
        conn_slope: crate::solver::loglog_slope(&rs, &diffs),
        rows,
        failures,
        curvature_floor,
    })
}

/// `count` values from `r_max` down to `r_min`, log- or linearly spaced.
pub fn r_grid(r_min: f64, r_max: f64, count: usize, log_spaced: bool) -> Result<Vec<f64>> {
    if !(r_min > 0.0 && r_max > r_min) || count < 2 {
        return Err(Error::InvalidArgument(format!(
            "grid needs 0 < R_min < R_max and at least two points (got {r_min}, {r_max}, {count})"
        )));
    }
    Ok((0..count)
        .map(|k| {
            let s = k as f64 / (count - 1) as f64;
            if log_spaced {
                (r_max.ln() + s * (r_min.ln() - r_max.ln())).exp()
            } else {
                r_max + s * (r_min - r_max)
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hitchin::HitchinPoint;
    use crate::lie::build_principal_triple_sln;
    use crate::surface::{bolza_group, build_mesh_subdivided, poincare_series_differential};

    fn setup(n: usize, amp: f64) -> (SurfaceMesh, HiggsSamples) {
        let s = bolza_group();
        let mesh = build_mesh_subdivided(&s, n).unwrap();
        let mut d = poincare_series_differential(&s, 2, 2).unwrap();
        d.amplitude = C64::new(amp, 0.0);
        let u = HitchinPoint::new(2, vec![d]).unwrap();
        let samples = HiggsSamples::new(&mesh, &u, 1);
        (mesh, samples)
    }

    #[test]
    fn grid_shapes() {
        let g = r_grid(0.05, 0.4, 7, true).unwrap();
        assert_eq!(g.len(), 7);
        assert!((g[0] - 0.4).abs() < 1e-15 && (g[6] - 0.05).abs() < 1e-15);
        assert!(g.windows(2).all(|w| w[1] < w[0]));
        assert!(r_grid(0.4, 0.05, 7, true).is_err());
    }

    #[test]
    fn rejects_bad_grids() {
        let (mesh, samples) = setup(3, 1.0);
        let t = build_principal_triple_sln(2).unwrap();
        let cfg = SolverConfig::default();
        assert!(sweep_r(&mesh, &t, &samples, C64::new(1.0, 0.0), &[0.1, 0.2], &cfg).is_err());
        assert!(sweep_r(&mesh, &t, &samples, C64::new(1.0, 0.0), &[0.0], &cfg).is_err());
    }

    #[test]
    fn sl2_sweep_has_quartic_slope() {
        let (mesh, samples) = setup(8, 3.0);
        let t = build_principal_triple_sln(2).unwrap();
        let grid = [0.4, 0.28, 0.2, 0.14, 0.1, 0.07, 0.05];
        let res = sweep_r(&mesh, &t, &samples, C64::new(1.0, 0.0), &grid, &SolverConfig::default()).unwrap();
        assert!(res.failures.is_empty());
        let slope = res.slope.unwrap();
        assert!((slope - 4.0).abs() < 0.15, "{slope}");
        assert!((res.conn_slope.unwrap() - 4.0).abs() < 0.2, "{:?}", res.conn_slope);
        for row in &res.rows {
            assert!(
                row.curvature_residual <= 10.0 * (1e-11 + res.curvature_floor),
                "{row:?} floor {}",
                res.curvature_floor
            );
        }
    }

    #[test]
    fn uniformizing_sweep_is_at_floor() {
        let s = bolza_group();
        let mesh = build_mesh_subdivided(&s, 4).unwrap();
        let samples = HiggsSamples::new(&mesh, &HitchinPoint::zero(2), 1);
        let t = build_principal_triple_sln(2).unwrap();
        let res = sweep_r(
            &mesh,
            &t,
            &samples,
            C64::new(1.0, 0.0),
            &[0.3, 0.1],
            &SolverConfig::default(),
        )
        .unwrap();
        assert!(res.rows.iter().all(|r| r.sup_f <= 1e-10 && r.conn_diff <= 1e-10));
        assert!(res.slope.is_none());
    }

    #[test]
    fn doubling_amplitude_quadruples_leading_order() {
        let t = build_principal_triple_sln(2).unwrap();
        let (mesh, s1) = setup(6, 1.5);
        let (_, s2) = setup(6, 3.0);
        let cfg = SolverConfig::default();
        let a = sweep_r(&mesh, &t, &s1, C64::new(1.0, 0.0), &[0.05], &cfg).unwrap();
        let b = sweep_r(&mesh, &t, &s2, C64::new(1.0, 0.0), &[0.05], &cfg).unwrap();
        let ratio = b.rows[0].sup_f / a.rows[0].sup_f;
        assert!((ratio - 4.0).abs() < 0.4, "{ratio}");
    }

    #[test]
    fn cyclic_sl3_sweep() {
        let s = bolza_group();
        let mesh = build_mesh_subdivided(&s, 6).unwrap();
        let mut d = poincare_series_differential(&s, 3, 2).unwrap();
        d.amplitude = C64::new(3.0, 0.0);
        let u = HitchinPoint::new(3, vec![d]).unwrap();
        let samples = HiggsSamples::new(&mesh, &u, 1);
        let t = crate::lie::principal_triple_sln_with(3, &crate::lie::Normalization::displayed(3)).unwrap();
        let grid = [0.4, 0.2, 0.1, 0.05];
        let res = sweep_r(&mesh, &t, &samples, C64::new(1.0, 0.0), &grid, &SolverConfig::default()).unwrap();
        // R enters only through R⁶φ₃, so the leading order is R⁶.
        assert!((res.slope.unwrap() - 6.0).abs() < 0.2, "{:?}", res.slope);
    }

    #[test]
    fn generic_sl3_sweep_is_quartic() {
        let s = bolza_group();
        let mesh = build_mesh_subdivided(&s, 6).unwrap();
        let mut d2 = poincare_series_differential(&s, 2, 2).unwrap();
        d2.amplitude = C64::new(3.0, 0.0);
        let mut d3 = poincare_series_differential(&s, 3, 2).unwrap();
        d3.amplitude = C64::new(1.0, 1.0);
        let u = HitchinPoint::new(3, vec![d2, d3]).unwrap();
        let samples = HiggsSamples::new(&mesh, &u, 1);
        let t = build_principal_triple_sln(3).unwrap();
        let res = sweep_r(
            &mesh,
            &t,
            &samples,
            C64::new(1.0, 0.0),
            &[0.4, 0.2, 0.1, 0.05],
            &SolverConfig::default(),
        )
        .unwrap();
        assert!((res.slope.unwrap() - 4.0).abs() < 0.2, "{:?}", res.slope);
        assert!((res.conn_slope.unwrap() - 4.0).abs() < 0.3, "{:?}", res.conn_slope);
    }

    #[test]
    fn generic_sl3_family_is_flat() {
        // Off-diagonal χ̃ exercises the frame change between seam copies.
        let s = bolza_group();
        let mesh = build_mesh_subdivided(&s, 8).unwrap();
        let mut d2 = poincare_series_differential(&s, 2, 2).unwrap();
        d2.amplitude = C64::new(2.0, 1.0);
        let mut d3 = poincare_series_differential(&s, 3, 2).unwrap();
        d3.amplitude = C64::new(-1.0, 2.0);
        let u = HitchinPoint::new(3, vec![d2, d3]).unwrap();
        let samples = HiggsSamples::new(&mesh, &u, 1);
        let t = build_principal_triple_sln(3).unwrap();
        let res = sweep_r(
            &mesh,
            &t,
            &samples,
            C64::new(0.6, 0.3),
            &[0.6, 0.3],
            &SolverConfig::default(),
        )
        .unwrap();
        for row in &res.rows {
            assert!(
                row.curvature_residual <= 10.0 * (1e-11 + res.curvature_floor),
                "{row:?} floor {}",
                res.curvature_floor
            );
        }
    }
}
