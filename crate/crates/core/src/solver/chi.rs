//! The matrix equation for `SL(N)`: `h(R, u) = h_♮(R) e^{χ}`.
//!
//! The unknown is stored as `χ̃ = Λ χ Λ⁻¹` with `Λ = (R/λ)^{H/2}`, so that
//! `h = Λ e^{χ̃} Λ`, and `χ̃` is Hermitian and S-skew. Conjugating the
//! Hitchin equation by `Λ` gives, with `ℓ = ∂ log λ`, `W = e^{−χ̃} H e^{χ̃}`,
//! `Q = e^{−χ̃}∂e^{χ̃}`, `Q̄ = e^{−χ̃}∂̄e^{χ̃}` and
//! `Φ̂ = X₋ + Σ P_{n+1} (R/λ)^{n+1} X_n`,
//!
//! `Ẽ = −∂̄Q + (λ²/2)(W + H) + (ℓ/2)[W, Q̄] + (ℓ̄/2)[Q, H] − (|ℓ|²/4)[W, H]
//!      + λ²[Φ̂, e^{−χ̃} Φ̂† e^{χ̃}]`,
//!
//! which vanishes identically at `χ̃ = 0`, `u = 0`. The residual reported is
//! `(4/λ²) e^{χ̃/2} Ẽ e^{−χ̃/2}`, Hermitian for the exact equation; for
//! `N = 2` and `χ̃ = −fH` it equals `H · N(f, R)`.
//!
//! On the mesh, `∂̄∂χ̃` comes from the finite-element flux, first
//! derivatives from least-squares quadratic stencils. Copies of a boundary vertex carry
//! `U χ̃ U†` with `U = (α/|α|)^H` for the deck map taking the class
//! representative to the copy.

use nalgebra::SymmetricEigen;

use super::{HiggsSamples, SolverConfig};
use crate::error::{Error, Result};
use crate::lie::sln::{build_pairing_s, project_s_skew};
use crate::lie::PrincipalTriple;
use crate::linalg::{c, commutator, dagger, frobenius, max_abs, ComplexMatrix, C64, I};
use crate::parallel::par_map;
use crate::sparse::bicgstab;
use crate::surface::metric::disk_dlog_lambda;
use crate::surface::SurfaceMesh;

/// Per-class `χ̃`, Hermitian and S-skew.
#[derive(Clone, Debug)]
pub struct ChiField {
    pub values: Vec<ComplexMatrix>,
}

impl ChiField {
    pub fn zero(n: usize, classes: usize) -> Self {
        ChiField {
            values: vec![ComplexMatrix::zeros(n, n); classes],
        }
    }

    /// `max_c ‖χ̃_c‖_F`.
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(frobenius).fold(0.0, f64::max)
    }

    /// `(Σ_c A_c ‖χ̃_c‖²_F)^{1/2}`.
    pub fn l2_norm(&self, mesh: &SurfaceMesh) -> f64 {
        self.values
            .iter()
            .zip(&mesh.class_area)
            .map(|(m, a)| a * frobenius(m).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// Largest off-diagonal entry over all classes.
    pub fn off_diagonal_norm(&self) -> f64 {
        self.values
            .iter()
            .map(|m| {
                let mut o = m.clone();
                o.fill_diagonal(c(0.0));
                max_abs(&o)
            })
            .fold(0.0, f64::max)
    }

    /// Largest violation of `χ̃ = χ̃†` and `S⁻¹χ̃ᵀS = −χ̃`.
    pub fn invariant_residual(&self) -> f64 {
        self.values
            .iter()
            .map(|m| {
                let herm = max_abs(&(m - dagger(m)));
                let skew = max_abs(&(m - project_s_skew(m)));
                herm.max(skew)
            })
            .fold(0.0, f64::max)
    }

    /// `χ = Λ⁻¹ χ̃ Λ` at a point with metric factor `lambda`, for `R > 0`.
    pub fn untilde(&self, class: usize, r: f64, lambda: f64, triple: &PrincipalTriple) -> Result<ComplexMatrix> {
        if r <= 0.0 {
            return Err(Error::InvalidArgument("χ is defined from χ̃ only for R > 0".into()));
        }
        let n = triple.n_dim;
        let q = r / lambda;
        let m = &self.values[class];
        Ok(ComplexMatrix::from_fn(n, n, |i, j| {
            let hi = triple.h[(i, i)].re;
            let hj = triple.h[(j, j)].re;
            m[(i, j)] * q.powf((hj - hi) / 2.0)
        }))
    }
}

/// Result of [`solve_chi`].
#[derive(Clone, Debug)]
pub struct ChiSolution {
    pub r: f64,
    pub chi: ChiField,
    pub iterations: usize,
    pub residual: f64,
    pub history: Vec<f64>,
}

impl ChiSolution {
    /// The `N = 2` scalar solution as `χ̃ = −f H`.
    pub fn from_scalar(sol: &super::ScalarSolution, triple: &PrincipalTriple) -> Self {
        ChiSolution {
            r: sol.r,
            chi: ChiField {
                values: sol.f.iter().map(|&f| &triple.h * c(-f)).collect(),
            },
            iterations: sol.iterations,
            residual: sol.residual,
            history: sol.history.clone(),
        }
    }
}

/// Orthonormal basis (for `Re tr(A†B)`) of the Hermitian S-skew matrices.
pub fn hermitian_s_skew_basis(n: usize) -> Vec<ComplexMatrix> {
    let mut candidates = Vec::new();
    for i in 0..n {
        for j in i..n {
            let mut a = ComplexMatrix::zeros(n, n);
            a[(i, j)] = c(1.0);
            a[(j, i)] = c(1.0);
            candidates.push(a);
            if i != j {
                let mut b = ComplexMatrix::zeros(n, n);
                b[(i, j)] = I;
                b[(j, i)] = -I;
                candidates.push(b);
            }
        }
    }
    let mut basis: Vec<ComplexMatrix> = Vec::new();
    for cand in candidates {
        let mut v = project_s_skew(&cand);
        for b in &basis {
            let p = real_inner(b, &v);
            v -= b * c(p);
        }
        let norm = frobenius(&v);
        if norm > 1e-10 {
            basis.push(v / c(norm));
        }
    }
    basis
}

fn real_inner(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x.conj() * y).re).sum()
}

/// `ψ(x) = (1 − e^{−x})/x`, the symbol of `χ ↦ e^{−χ} dχ e^{χ}` type maps.
fn psi(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - 0.5 * x
    } else {
        -(-x).exp_m1() / x
    }
}

fn psi_prime(x: f64) -> f64 {
    if x.abs() < 1e-2 {
        -0.5 + x / 3.0 - x * x / 8.0 + x.powi(3) / 30.0 - x.powi(4) / 144.0
    } else {
        ((-x).exp() * (1.0 + x) - 1.0) / (x * x)
    }
}

fn psi_divided(x: f64, y: f64) -> f64 {
    if (x - y).abs() < 1e-6 * x.abs().max(1.0) {
        psi_prime(0.5 * (x + y))
    } else {
        (psi(x) - psi(y)) / (x - y)
    }
}

/// Spectral data of a Hermitian matrix, used to apply functions of `ad χ̃`.
pub struct HermitianSpectrum {
    pub vectors: ComplexMatrix,
    pub values: Vec<f64>,
}

impl HermitianSpectrum {
    pub fn new(m: &ComplexMatrix) -> Self {
        let sym = (m + dagger(m)) * c(0.5);
        let eig = SymmetricEigen::new(sym);
        HermitianSpectrum {
            vectors: eig.eigenvectors,
            values: eig.eigenvalues.iter().copied().collect(),
        }
    }

    fn eigen_frame(&self, y: &ComplexMatrix) -> ComplexMatrix {
        dagger(&self.vectors) * y * &self.vectors
    }

    fn standard_frame(&self, y: &ComplexMatrix) -> ComplexMatrix {
        &self.vectors * y * dagger(&self.vectors)
    }

    /// `e^{tχ̃}`.
    pub fn exp(&self, t: f64) -> ComplexMatrix {
        let n = self.values.len();
        let d = ComplexMatrix::from_fn(n, n, |i, j| if i == j { c((t * self.values[i]).exp()) } else { c(0.0) });
        self.standard_frame(&d)
    }

    /// `ψ(ad χ̃)(Y) = e^{−χ̃} (d/ds) e^{χ̃ + sY}|_{s=0}`.
    pub fn dexp(&self, y: &ComplexMatrix) -> ComplexMatrix {
        let mut yp = self.eigen_frame(y);
        let d = &self.values;
        for a in 0..d.len() {
            for b in 0..d.len() {
                yp[(a, b)] *= psi(d[a] - d[b]);
            }
        }
        self.standard_frame(&yp)
    }

    /// Derivative of `ψ(ad χ̃)(Y)` as `χ̃` moves along `Z`.
    pub fn dexp_variation(&self, z: &ComplexMatrix, y: &ComplexMatrix) -> ComplexMatrix {
        let zp = self.eigen_frame(z);
        let yp = self.eigen_frame(y);
        let d = &self.values;
        let n = d.len();
        let out = ComplexMatrix::from_fn(n, n, |a, b| {
            let mut s = c(0.0);
            for k in 0..n {
                s += zp[(a, k)] * yp[(k, b)] * psi_divided(d[a] - d[b], d[k] - d[b]);
                s -= yp[(a, k)] * zp[(k, b)] * psi_divided(d[a] - d[b], d[a] - d[k]);
            }
            s
        });
        self.standard_frame(&out)
    }
}

/// Local geometry and Higgs data at one point.
pub struct PointData<'a> {
    pub lambda: f64,
    /// `∂_z log λ`.
    pub ell: C64,
    pub phi_hat: &'a ComplexMatrix,
    pub h: &'a ComplexMatrix,
}

/// `Ẽ` at one point from the jet `(χ̃, ∂χ̃, ∂∂̄χ̃)`.
pub fn chi_density(
    spec: &HermitianSpectrum,
    dchi: &ComplexMatrix,
    ddbar_chi: Option<&ComplexMatrix>,
    p: &PointData,
) -> ComplexMatrix {
    let dbar = dagger(dchi);
    let q = spec.dexp(dchi);
    let qbar = spec.dexp(&dbar);
    let e_plus = spec.exp(1.0);
    let e_minus = spec.exp(-1.0);
    let w = &e_minus * p.h * &e_plus;
    let l2 = p.lambda * p.lambda;
    let mut out = -spec.dexp_variation(&dbar, dchi);
    if let Some(lap) = ddbar_chi {
        out -= spec.dexp(lap);
    }
    out += (&w + p.h) * c(0.5 * l2);
    out += commutator(&w, &qbar) * (p.ell * 0.5);
    out += commutator(&q, p.h) * (p.ell.conj() * 0.5);
    out -= commutator(&w, p.h) * c(0.25 * p.ell.norm_sqr());
    let adj = &e_minus * dagger(p.phi_hat) * &e_plus;
    out += commutator(p.phi_hat, &adj) * c(l2);
    out
}

/// `Φ̂ = X₋ + Σ P_{n+1} (R/λ)^{n+1} X_n`.
pub fn phi_hat(triple: &PrincipalTriple, coeffs: &[C64], r: f64, lambda: f64) -> ComplexMatrix {
    let q = r / lambda;
    let mut m = triple.xminus.clone();
    for (k, (p, x)) in coeffs.iter().zip(&triple.xn).enumerate() {
        if p.norm() != 0.0 {
            m += x * (p * q.powi(k as i32 + 2));
        }
    }
    m
}

/// Precomputed mesh data for the matrix residual.
pub struct ChiProblem<'a> {
    pub mesh: &'a SurfaceMesh,
    pub triple: &'a PrincipalTriple,
    pub r: f64,
    pub basis: Vec<ComplexMatrix>,
    /// `U` per vertex (diagonal phases), `None` for the class representative.
    frames: Vec<Option<Vec<C64>>>,
    /// Neighbours `(j, w_ij)` per vertex.
    neighbours: Vec<Vec<(usize, f64)>>,
    /// `∂f(v) = Σ a_k f(k)` per vertex.
    gradient: Vec<Vec<(usize, C64)>>,
    members: Vec<Vec<usize>>,
    phi_hat: Vec<ComplexMatrix>,
    coeffs: Vec<Vec<C64>>,
    threads: usize,
}

impl<'a> ChiProblem<'a> {
    pub fn new(
        mesh: &'a SurfaceMesh,
        triple: &'a PrincipalTriple,
        r: f64,
        samples: &HiggsSamples,
        threads: usize,
    ) -> Result<Self> {
        let n = triple.n_dim;
        if samples.n != n || samples.coeffs.len() != mesh.num_vertices() {
            return Err(Error::InvalidArgument(
                "Higgs samples do not match the mesh or rank".into(),
            ));
        }
        if r < 0.0 || !r.is_finite() {
            return Err(Error::InvalidArgument(format!("R must be non-negative, got {r}")));
        }
        build_pairing_s(n)?;
        let nv = mesh.num_vertices();
        let h: Vec<f64> = (0..n).map(|i| triple.h[(i, i)].re).collect();
        let frames = (0..nv)
            .map(|v| {
                let rep = mesh.class_rep[mesh.class_of[v]];
                if rep == v {
                    return None;
                }
                let a = mesh.deck[v].alpha(mesh.points[rep]);
                let phase = a / a.norm();
                Some(h.iter().map(|&hi| phase.powi(hi.round() as i32)).collect())
            })
            .collect();
        let mut neighbours = vec![Vec::new(); nv];
        for &(i, j, w) in &mesh.edges {
            neighbours[i].push((j, w));
            neighbours[j].push((i, w));
        }
        let gradient = mesh.dz_stencils();
        let mut members = vec![Vec::new(); mesh.num_classes()];
        for v in 0..nv {
            members[mesh.class_of[v]].push(v);
        }
        let phi_hat = (0..nv)
            .map(|v| phi_hat(triple, &samples.coeffs[v], r, mesh.lambda[v]))
            .collect();
        Ok(ChiProblem {
            mesh,
            triple,
            r,
            basis: hermitian_s_skew_basis(n),
            frames,
            neighbours,
            gradient,
            members,
            phi_hat,
            coeffs: samples.coeffs.clone(),
            threads: threads.max(1),
        })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    fn copy_frame(&self, v: usize, m: &ComplexMatrix) -> ComplexMatrix {
        match &self.frames[v] {
            None => m.clone(),
            Some(u) => ComplexMatrix::from_fn(m.nrows(), m.ncols(), |i, j| u[i] * m[(i, j)] * u[j].conj()),
        }
    }

    fn rep_frame(&self, v: usize, m: &ComplexMatrix) -> ComplexMatrix {
        match &self.frames[v] {
            None => m.clone(),
            Some(u) => ComplexMatrix::from_fn(m.nrows(), m.ncols(), |i, j| u[i].conj() * m[(i, j)] * u[j]),
        }
    }

    pub fn field_from_coords(&self, x: &[f64]) -> ChiField {
        let d = self.dim();
        let n = self.triple.n_dim;
        ChiField {
            values: x
                .chunks(d)
                .map(|coords| {
                    let mut m = ComplexMatrix::zeros(n, n);
                    for (b, &t) in self.basis.iter().zip(coords) {
                        m += b * c(t);
                    }
                    m
                })
                .collect(),
        }
    }

    pub fn coords_from_field(&self, field: &ChiField) -> Vec<f64> {
        field
            .values
            .iter()
            .flat_map(|m| self.basis.iter().map(move |b| real_inner(b, m)))
            .collect()
    }

    /// `(χ̃, ∂χ̃)` at every vertex, with copies carried into their own frame.
    pub fn vertex_jets(&self, field: &ChiField) -> Vec<(ComplexMatrix, ComplexMatrix)> {
        let mesh = self.mesh;
        let n = self.triple.n_dim;
        let vertex: Vec<ComplexMatrix> = par_map(mesh.num_vertices(), self.threads, |v| {
            self.copy_frame(v, &field.values[mesh.class_of[v]])
        });
        par_map(mesh.num_vertices(), self.threads, |v| {
            let mut d = ComplexMatrix::zeros(n, n);
            for &(k, a) in &self.gradient[v] {
                d += &vertex[k] * a;
            }
            (vertex[v].clone(), d)
        })
    }

    /// `(P₂, …, P_N)` at a vertex.
    pub fn coefficients(&self, v: usize) -> &[C64] {
        &self.coeffs[v]
    }

    /// The normalized residual per class (before projection).
    pub fn residual(&self, field: &ChiField) -> Result<Vec<ComplexMatrix>> {
        let mesh = self.mesh;
        if field.values.len() != mesh.num_classes() {
            return Err(Error::InvalidArgument("χ̃ field does not match the mesh".into()));
        }
        let nv = mesh.num_vertices();
        let vertex: Vec<ComplexMatrix> = par_map(nv, self.threads, |v| {
            self.copy_frame(v, &field.values[mesh.class_of[v]])
        });
        let n = self.triple.n_dim;
        // Per vertex: (flux in the class frame, density·area in the class frame).
        let local: Vec<(ComplexMatrix, ComplexMatrix)> = par_map(nv, self.threads, |v| {
            let mut flux = ComplexMatrix::zeros(n, n);
            for &(j, w) in &self.neighbours[v] {
                flux += (&vertex[j] - &vertex[v]) * c(w);
            }
            let mut dchi = ComplexMatrix::zeros(n, n);
            for &(k, a) in &self.gradient[v] {
                dchi += &vertex[k] * a;
            }
            let spec = HermitianSpectrum::new(&vertex[v]);
            let p = PointData {
                lambda: mesh.lambda[v],
                ell: disk_dlog_lambda(mesh.points[v]),
                phi_hat: &self.phi_hat[v],
                h: &self.triple.h,
            };
            let dens = chi_density(&spec, &dchi, None, &p) * c(mesh.euclid_area[v]);
            (self.rep_frame(v, &flux), self.rep_frame(v, &dens))
        });
        let out = par_map(mesh.num_classes(), self.threads, |cls| {
            let mut flux = ComplexMatrix::zeros(n, n);
            let mut dens = ComplexMatrix::zeros(n, n);
            for &v in &self.members[cls] {
                flux += &local[v].0;
                dens += &local[v].1;
            }
            let spec = HermitianSpectrum::new(&field.values[cls]);
            let e = dens - spec.dexp(&flux) * c(0.25);
            spec.exp(0.5) * e * spec.exp(-0.5) * c(4.0 / mesh.class_area[cls])
        });
        Ok(out)
    }

    /// Residual coordinates in the Hermitian S-skew basis.
    pub fn residual_coords(&self, x: &[f64]) -> Result<Vec<f64>> {
        let res = self.residual(&self.field_from_coords(x))?;
        Ok(res
            .iter()
            .flat_map(|m| self.basis.iter().map(move |b| real_inner(b, m)))
            .collect())
    }

    /// Inverse diagonal blocks of an approximate Jacobian: the Laplacian
    /// diagonal plus the finite-difference Jacobian of the pointwise terms.
    fn block_preconditioner(&self, x: &[f64]) -> Vec<nalgebra::DMatrix<f64>> {
        let d = self.dim();
        let mesh = self.mesh;
        let kd = mesh.stiffness().diagonal();
        let field = self.field_from_coords(x);
        par_map(mesh.num_classes(), self.threads, |cls| {
            let v = mesh.class_rep[cls];
            let p = PointData {
                lambda: mesh.lambda[v],
                ell: disk_dlog_lambda(mesh.points[v]),
                phi_hat: &self.phi_hat[v],
                h: &self.triple.h,
            };
            let zero = ComplexMatrix::zeros(self.triple.n_dim, self.triple.n_dim);
            let eval = |m: &ComplexMatrix| -> Vec<f64> {
                let spec = HermitianSpectrum::new(m);
                let e = chi_density(&spec, &zero, None, &p);
                let r = spec.exp(0.5) * e * spec.exp(-0.5) * c(4.0 / (p.lambda * p.lambda));
                self.basis.iter().map(|b| real_inner(b, &r)).collect()
            };
            let base = &field.values[cls];
            let f0 = eval(base);
            let mut block = nalgebra::DMatrix::<f64>::zeros(d, d);
            let eps = 1e-6;
            for (j, b) in self.basis.iter().enumerate() {
                let fj = eval(&(base + b * c(eps)));
                for i in 0..d {
                    block[(i, j)] = (fj[i] - f0[i]) / eps;
                }
            }
            let lap = -kd[cls] / mesh.class_area[cls];
            for i in 0..d {
                block[(i, i)] += lap;
            }
            block
                .try_inverse()
                .unwrap_or_else(|| nalgebra::DMatrix::identity(d, d) / lap.max(1.0))
        })
    }
}

/// The normalized matrix residual for a given `χ̃`.
pub fn residual_matrix_chi(problem: &ChiProblem, field: &ChiField) -> Result<Vec<ComplexMatrix>> {
    let drift = field.invariant_residual();
    if drift > 1e-10 * (1.0 + field.sup_norm()) {
        return Err(Error::InvalidArgument(format!(
            "χ̃ is not Hermitian and S-skew (violation {drift:.2e})"
        )));
    }
    problem.residual(field)
}

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Damped Newton–Krylov from `χ̃ = 0`; Jacobian-vector products by
/// directional differences, BiCGSTAB with block-Jacobi preconditioning.
pub fn solve_chi(problem: &ChiProblem, config: &SolverConfig) -> Result<ChiSolution> {
    config.validate()?;
    let d = problem.dim();
    let nc = problem.mesh.num_classes();
    let mut x = vec![0.0; nc * d];
    let mut res = problem.residual_coords(&x)?;
    let mut history = vec![sup(&res)];
    let mut iterations = 0;
    while *history.last().unwrap() > config.newton_tol {
        if iterations == config.max_newton {
            return Err(Error::NoConvergence {
                iterations,
                residual: *history.last().unwrap(),
            });
        }
        let current = *history.last().unwrap();
        let blocks = problem.block_preconditioner(&x);
        let xnorm = sup(&x);
        let apply = |v: &[f64], out: &mut [f64]| {
            let vn = sup(v);
            if vn == 0.0 {
                out.iter_mut().for_each(|o| *o = 0.0);
                return;
            }
            let eps = 1e-7 * (1.0 + xnorm) / vn;
            let xp: Vec<f64> = x.iter().zip(v).map(|(a, b)| a + eps * b).collect();
            let rp = problem.residual_coords(&xp).expect("residual evaluation");
            for i in 0..out.len() {
                out[i] = (rp[i] - res[i]) / eps;
            }
        };
        let precond = |v: &[f64], out: &mut [f64]| {
            for (cls, block) in blocks.iter().enumerate() {
                let seg = nalgebra::DVector::from_column_slice(&v[cls * d..(cls + 1) * d]);
                let y = block * seg;
                out[cls * d..(cls + 1) * d].copy_from_slice(y.as_slice());
            }
        };
        let rhs: Vec<f64> = res.iter().map(|r| -r).collect();
        let mut delta = vec![0.0; nc * d];
        let tol = config.linear_tol.clamp(1e-8, 1e-3);
        match bicgstab(apply, precond, &rhs, &mut delta, tol, config.max_linear) {
            Ok(_) => {}
            // A stalled inner solve still yields a usable direction.
            Err(Error::NoConvergence { residual, .. }) if residual < 1e-2 => {}
            Err(e) => return Err(e),
        }
        let mut step = 1.0;
        loop {
            let trial: Vec<f64> = x.iter().zip(&delta).map(|(a, b)| a + step * b).collect();
            let trial_res = problem.residual_coords(&trial)?;
            let s = sup(&trial_res);
            if s < current {
                x = trial;
                res = trial_res;
                history.push(s);
                break;
            }
            step *= 0.5;
            if step < config.min_step {
                return Err(Error::NoConvergence {
                    iterations: iterations + 1,
                    residual: current,
                });
            }
        }
        iterations += 1;
    }
    Ok(ChiSolution {
        r: problem.r,
        chi: problem.field_from_coords(&x),
        iterations,
        residual: *history.last().unwrap(),
        history,
    })
}

/// `h = Λ e^{χ̃} Λ` at a point, `Λ = (R/λ)^{H/2}`.
pub fn metric_from_tilde(triple: &PrincipalTriple, chi_tilde: &ComplexMatrix, r: f64, lambda: f64) -> ComplexMatrix {
    let n = triple.n_dim;
    let q = r / lambda;
    let lam = ComplexMatrix::from_fn(n, n, |i, j| {
        if i == j {
            c(q.powf(triple.h[(i, i)].re / 2.0))
        } else {
            c(0.0)
        }
    });
    &lam * HermitianSpectrum::new(chi_tilde).exp(1.0) * &lam
}
