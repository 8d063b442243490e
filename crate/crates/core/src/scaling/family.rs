//! Connection forms of the families `∇_{R,ħ,u}`, `∇_{0,ħ,u}` and the oper
//! `∇_{ħ,u}` in the distinguished trivialization of the disk chart.

use crate::error::{Error, Result};
use crate::hitchin::{higgs_matrix, HitchinPoint};
use crate::lie::PrincipalTriple;
use crate::linalg::{c, dagger, max_abs, trace, ComplexMatrix, C64};
use crate::oper::{alpha_power_h, transition_t};
use crate::parallel::par_map;
use crate::solver::chi::{phi_hat, ChiProblem, HermitianSpectrum};
use crate::solver::{ChiSolution, HiggsSamples};
use crate::surface::metric::{disk_dlog_lambda, disk_lambda};
use crate::surface::{MobiusMap, SurfaceMesh};

/// `A = A_z dz + A_z̄ dz̄`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConnectionForm {
    pub a_z: ComplexMatrix,
    pub a_zbar: ComplexMatrix,
}

impl ConnectionForm {
    /// `A(v)` for a tangent vector `v = dz`.
    pub fn along(&self, dz: C64) -> ComplexMatrix {
        &self.a_z * dz + &self.a_zbar * dz.conj()
    }

    /// `max(|tr A_z|, |tr A_z̄|)`.
    pub fn trace_residual(&self) -> f64 {
        trace(&self.a_z).norm().max(trace(&self.a_zbar).norm())
    }

    pub fn max_diff(&self, other: &ConnectionForm) -> f64 {
        max_abs(&(&self.a_z - &other.a_z)).max(max_abs(&(&self.a_zbar - &other.a_zbar)))
    }
}

fn nonzero(x: C64, what: &str) -> Result<()> {
    if x == c(0.0) {
        return Err(Error::InvalidArgument(format!("{what} must be nonzero")));
    }
    Ok(())
}

/// `∇_{0,ħ,u}`: `A_z = ħ⁻¹Φ − ∂log λ · H`, `A_z̄ = ħλ²X₊`.
pub fn limit_form(triple: &PrincipalTriple, hbar: C64, coeffs: &[C64], z: C64) -> Result<ConnectionForm> {
    nonzero(hbar, "ħ")?;
    let lambda = disk_lambda(z);
    let phi = higgs_matrix(triple, coeffs)?;
    Ok(ConnectionForm {
        a_z: phi / hbar - &triple.h * disk_dlog_lambda(z),
        a_zbar: &triple.xplus * (hbar * lambda * lambda),
    })
}

/// The oper `d + ħ⁻¹Φ dz`.
pub fn oper_form(triple: &PrincipalTriple, hbar: C64, coeffs: &[C64]) -> Result<ConnectionForm> {
    nonzero(hbar, "ħ")?;
    let n = triple.n_dim;
    Ok(ConnectionForm {
        a_z: higgs_matrix(triple, coeffs)? / hbar,
        a_zbar: ComplexMatrix::zeros(n, n),
    })
}

/// `Rζ⁻¹φ + D_h + ζRφ^{†h}` for `h = Λe^{χ̃}Λ`, `Λ = (R/λ)^{H/2}`, from the
/// jet `(χ̃, ∂χ̃)` at `z`. With `ζ = Rħ` this is `∇_{R,ħ,u}`.
pub fn twistor_form(
    triple: &PrincipalTriple,
    r: f64,
    zeta: C64,
    coeffs: &[C64],
    z: C64,
    chi_tilde: &ComplexMatrix,
    dchi_tilde: &ComplexMatrix,
) -> Result<ConnectionForm> {
    nonzero(zeta, "ζ")?;
    if r.is_nan() || r <= 0.0 {
        return Err(Error::InvalidArgument(format!("R must be positive, got {r}")));
    }
    let n = triple.n_dim;
    let lambda = disk_lambda(z);
    let ell = disk_dlog_lambda(z);
    let q = r / lambda;
    // Λ⁻¹ M Λ scales entry (i, j) by q^{(h_j − h_i)/2}.
    let untilde = |m: &ComplexMatrix| {
        ComplexMatrix::from_fn(n, n, |i, j| {
            m[(i, j)] * q.powf((triple.h[(j, j)].re - triple.h[(i, i)].re) / 2.0)
        })
    };
    let spec = HermitianSpectrum::new(chi_tilde);
    let e_plus = spec.exp(1.0);
    let e_minus = spec.exp(-1.0);
    let w = &e_minus * &triple.h * &e_plus;
    let chern = (&w + &triple.h) * (-ell * 0.5) + spec.dexp(dchi_tilde);
    let ph = phi_hat(triple, coeffs, r, lambda);
    let adj = &e_minus * dagger(&ph) * &e_plus;
    Ok(ConnectionForm {
        a_z: higgs_matrix(triple, coeffs)? * (r / zeta) + untilde(&chern),
        a_zbar: untilde(&adj) * (zeta * r / q),
    })
}

/// Connection forms at every mesh vertex.
#[derive(Clone, Debug)]
pub struct MeshFamily {
    /// `Some(R)` for `∇_{R,ħ,u}`, `None` for the limit family.
    pub r: Option<f64>,
    pub hbar: C64,
    pub forms: Vec<ConnectionForm>,
}

/// `∇_{R,ħ,u}` from a harmonic-metric solution at the problem's `R`.
pub fn assemble_family(problem: &ChiProblem, solution: &ChiSolution, hbar: C64, threads: usize) -> Result<MeshFamily> {
    nonzero(hbar, "ħ")?;
    if (solution.r - problem.r).abs() > 1e-14 * problem.r.max(1.0) {
        return Err(Error::InvalidArgument(format!(
            "solution was computed at R = {} but the family is requested at R = {}",
            solution.r, problem.r
        )));
    }
    let jets = problem.vertex_jets(&solution.chi);
    let mesh = problem.mesh;
    let zeta = hbar * problem.r;
    let forms = par_map(mesh.num_vertices(), threads, |v| {
        twistor_form(
            problem.triple,
            problem.r,
            zeta,
            problem.coefficients(v),
            mesh.points[v],
            &jets[v].0,
            &jets[v].1,
        )
    });
    Ok(MeshFamily {
        r: Some(problem.r),
        hbar,
        forms: forms.into_iter().collect::<Result<_>>()?,
    })
}

/// `∇_{0,ħ,u}` sampled at every mesh vertex.
pub fn limit_family_on_mesh(
    mesh: &SurfaceMesh,
    triple: &PrincipalTriple,
    samples: &HiggsSamples,
    hbar: C64,
    threads: usize,
) -> Result<MeshFamily> {
    let forms = par_map(mesh.num_vertices(), threads, |v| {
        limit_form(triple, hbar, &samples.coeffs[v], mesh.points[v])
    });
    Ok(MeshFamily {
        r: None,
        hbar,
        forms: forms.into_iter().collect::<Result<_>>()?,
    })
}

/// `max_v ‖A_R(v) − A_0(v)‖_max`.
pub fn connection_difference(a: &MeshFamily, b: &MeshFamily) -> Result<f64> {
    if a.forms.len() != b.forms.len() {
        return Err(Error::InvalidArgument("families live on different meshes".into()));
    }
    Ok(a.forms
        .iter()
        .zip(&b.forms)
        .map(|(x, y)| x.max_diff(y))
        .fold(0.0, f64::max))
}

/// A flat connection on the disk together with its gluing under deck
/// transformations, for parallel transport.
pub trait FlatFamily: Sync {
    fn rank(&self) -> usize;
    fn form(&self, z: C64) -> Result<ConnectionForm>;
    /// Matrix identifying the fibre at `z` with the fibre at `g(z)`.
    fn gluing(&self, g: &MobiusMap, z: C64) -> Result<ComplexMatrix>;
}

/// `∇_{0,ħ,u}` with gluing `α^H`.
pub struct LimitFamily<'a> {
    pub triple: &'a PrincipalTriple,
    pub hbar: C64,
    pub u: &'a HitchinPoint,
}

/// The oper `∇_{ħ,u}` with gluing `T_ħ = α^H exp(ħα⁻¹∂α X₊)`.
pub struct OperFamily<'a> {
    pub triple: &'a PrincipalTriple,
    pub hbar: C64,
    pub u: &'a HitchinPoint,
}

/// The limit family `∇_{0,ħ,u}`.
pub fn limit_connection<'a>(triple: &'a PrincipalTriple, hbar: C64, u: &'a HitchinPoint) -> Result<LimitFamily<'a>> {
    nonzero(hbar, "ħ")?;
    if u.n != triple.n_dim {
        return Err(Error::InvalidArgument(
            "Hitchin point and triple have different rank".into(),
        ));
    }
    Ok(LimitFamily { triple, hbar, u })
}

impl FlatFamily for LimitFamily<'_> {
    fn rank(&self) -> usize {
        self.triple.n_dim
    }

    fn form(&self, z: C64) -> Result<ConnectionForm> {
        limit_form(self.triple, self.hbar, &self.u.coefficients(z), z)
    }

    fn gluing(&self, g: &MobiusMap, z: C64) -> Result<ComplexMatrix> {
        Ok(alpha_power_h(self.triple, g.alpha(z)))
    }
}

impl FlatFamily for OperFamily<'_> {
    fn rank(&self) -> usize {
        self.triple.n_dim
    }

    fn form(&self, z: C64) -> Result<ConnectionForm> {
        oper_form(self.triple, self.hbar, &self.u.coefficients(z))
    }

    fn gluing(&self, g: &MobiusMap, z: C64) -> Result<ComplexMatrix> {
        transition_t(self.triple, self.hbar, g, z)
    }
}

/// `F` transformed by the smooth gauge `g(z) = exp(s(z) M)`,
/// `s = a z + b z̄ + k z z̄`: `A ↦ gAg⁻¹ − dg g⁻¹`, gluing `g(γz) T g(z)⁻¹`.
pub struct GaugedFamily<F> {
    pub inner: F,
    pub generator: ComplexMatrix,
    pub coeffs: [C64; 3],
}

impl<F: FlatFamily> GaugedFamily<F> {
    fn s(&self, z: C64) -> (C64, C64, C64) {
        let [a, b, k] = self.coeffs;
        (a * z + b * z.conj() + k * z * z.conj(), a + k * z.conj(), b + k * z)
    }

    fn g(&self, s: C64) -> ComplexMatrix {
        crate::linalg::expm(&(&self.generator * s))
    }
}

impl<F: FlatFamily> FlatFamily for GaugedFamily<F> {
    fn rank(&self) -> usize {
        self.inner.rank()
    }

    fn form(&self, z: C64) -> Result<ConnectionForm> {
        let f = self.inner.form(z)?;
        let (s, ds, dbs) = self.s(z);
        let g = self.g(s);
        let gi = self.g(-s);
        // dg g⁻¹ = ds M because g is a function of one matrix.
        Ok(ConnectionForm {
            a_z: &g * f.a_z * &gi - &self.generator * ds,
            a_zbar: &g * f.a_zbar * &gi - &self.generator * dbs,
        })
    }

    fn gluing(&self, m: &MobiusMap, z: C64) -> Result<ComplexMatrix> {
        let t = self.inner.gluing(m, z)?;
        Ok(self.g(self.s(m.apply(z)).0) * t * self.g(-self.s(z).0))
    }
}
