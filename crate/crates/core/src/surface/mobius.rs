//! Möbius maps and general holomorphic chart maps.

use crate::error::{Error, Result};
use crate::linalg::{c, C64};

/// `z ↦ (a z + b) / (c z + d)` with `ad - bc = 1`. The matrix itself (not
/// just its projective class) is stored, since it fixes the branch of
/// `α = c z + d`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MobiusMap {
    pub a: C64,
    pub b: C64,
    pub c: C64,
    pub d: C64,
}

/// A holomorphic change of coordinates `z' = f(z)` together with the square
/// root `α` of `dz/dz' = 1/f'(z)` and its first two `z`-derivatives.
pub trait ChartMap {
    fn apply(&self, z: C64) -> C64;
    /// `α(z)` with `α² = dz/dz'`.
    fn alpha(&self, z: C64) -> Result<C64>;
    fn alpha_prime(&self, z: C64) -> C64;
    fn alpha_second(&self, z: C64) -> C64;
}

impl MobiusMap {
    pub fn new(a: C64, b: C64, c: C64, d: C64) -> Result<Self> {
        let m = MobiusMap { a, b, c, d };
        let det = m.det();
        if (det - 1.0).norm() > 1e-12 * (1.0 + a.norm() * d.norm() + b.norm() * c.norm()) {
            return Err(Error::InvalidArgument(format!("Möbius determinant is {det}, not 1")));
        }
        Ok(m)
    }

    /// Rescales an arbitrary invertible matrix to determinant one (principal
    /// square root of the determinant).
    pub fn normalized(a: C64, b: C64, c: C64, d: C64) -> Result<Self> {
        let det = a * d - b * c;
        if det.norm() == 0.0 {
            return Err(Error::InvalidArgument("singular Möbius matrix".into()));
        }
        let s = det.sqrt();
        Ok(MobiusMap {
            a: a / s,
            b: b / s,
            c: c / s,
            d: d / s,
        })
    }

    pub fn identity() -> Self {
        MobiusMap {
            a: c(1.0),
            b: c(0.0),
            c: c(0.0),
            d: c(1.0),
        }
    }

    pub fn det(&self) -> C64 {
        self.a * self.d - self.b * self.c
    }

    pub fn apply(&self, z: C64) -> C64 {
        (self.a * z + self.b) / (self.c * z + self.d)
    }

    /// `d/dz` of the map, `(cz+d)^{-2}`.
    pub fn derivative(&self, z: C64) -> C64 {
        let q = self.c * z + self.d;
        1.0 / (q * q)
    }

    /// `c z + d`, the chart-transition factor `α` with `α² = dz/dz'`.
    pub fn alpha(&self, z: C64) -> C64 {
        self.c * z + self.d
    }

    /// `self ∘ other` (matrix product `self · other`).
    pub fn compose(&self, other: &MobiusMap) -> MobiusMap {
        MobiusMap {
            a: self.a * other.a + self.b * other.c,
            b: self.a * other.b + self.b * other.d,
            c: self.c * other.a + self.d * other.c,
            d: self.c * other.b + self.d * other.d,
        }
    }

    pub fn inverse(&self) -> MobiusMap {
        MobiusMap {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    pub fn neg(&self) -> MobiusMap {
        MobiusMap {
            a: -self.a,
            b: -self.b,
            c: -self.c,
            d: -self.d,
        }
    }

    /// Largest entrywise difference of the matrices.
    pub fn matrix_distance(&self, other: &MobiusMap) -> f64 {
        [
            (self.a - other.a).norm(),
            (self.b - other.b).norm(),
            (self.c - other.c).norm(),
            (self.d - other.d).norm(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    pub fn trace(&self) -> C64 {
        self.a + self.d
    }

    /// Whether the matrix lies in SU(1,1), i.e. the map preserves the disk.
    pub fn is_disk_automorphism(&self, tol: f64) -> bool {
        (self.d - self.a.conj()).norm() < tol && (self.c - self.b.conj()).norm() < tol
    }
}

impl ChartMap for MobiusMap {
    fn apply(&self, z: C64) -> C64 {
        MobiusMap::apply(self, z)
    }

    fn alpha(&self, z: C64) -> Result<C64> {
        let a = MobiusMap::alpha(self, z);
        if a.norm() < 1e-300 {
            return Err(Error::SingularChart(z));
        }
        Ok(a)
    }

    fn alpha_prime(&self, _z: C64) -> C64 {
        self.c
    }

    fn alpha_second(&self, _z: C64) -> C64 {
        c(0.0)
    }
}

/// `α = c z + d` for `map`, failing at the pole.
pub fn transition_alpha(map: &MobiusMap, z: C64) -> Result<C64> {
    ChartMap::alpha(map, z)
}

/// Polynomial chart map `z' = Σ_k coeffs[k] z^k`, used as a non-Möbius test
/// map. `α = f'(z)^{-1/2}` on the principal branch.
#[derive(Clone, Debug)]
pub struct PolynomialChart {
    pub coeffs: Vec<C64>,
}

impl PolynomialChart {
    /// `z' = z + z³`.
    pub fn cubic_shear() -> Self {
        PolynomialChart {
            coeffs: vec![c(0.0), c(1.0), c(0.0), c(1.0)],
        }
    }

    /// `k`-th derivative of the polynomial at `z`.
    pub fn derivative(&self, k: usize, z: C64) -> C64 {
        self.coeffs
            .iter()
            .enumerate()
            .skip(k)
            .map(|(p, &a)| {
                let falling: f64 = ((p - k + 1)..=p).map(|x| x as f64).product();
                a * falling * z.powi((p - k) as i32)
            })
            .sum()
    }
}

impl ChartMap for PolynomialChart {
    fn apply(&self, z: C64) -> C64 {
        self.derivative(0, z)
    }

    fn alpha(&self, z: C64) -> Result<C64> {
        let f1 = self.derivative(1, z);
        if f1.norm() < 1e-300 {
            return Err(Error::SingularChart(z));
        }
        Ok(f1.sqrt().inv())
    }

    fn alpha_prime(&self, z: C64) -> C64 {
        let f1 = self.derivative(1, z);
        let f2 = self.derivative(2, z);
        -0.5 * f2 * f1.powf(-1.5)
    }

    fn alpha_second(&self, z: C64) -> C64 {
        let f1 = self.derivative(1, z);
        let f2 = self.derivative(2, z);
        let f3 = self.derivative(3, z);
        0.75 * f2 * f2 * f1.powf(-2.5) - 0.5 * f3 * f1.powf(-1.5)
    }
}

/// Disk automorphism `w ↦ (w - p)/(1 - p̄ w)` moving `p` to the origin.
pub fn disk_translation_to_origin(p: C64) -> MobiusMap {
    let s = (1.0 - p.norm_sqr()).sqrt();
    MobiusMap {
        a: c(1.0 / s),
        b: -p / s,
        c: -p.conj() / s,
        d: c(1.0 / s),
    }
}

/// Point at hyperbolic-arclength fraction `s` along the geodesic from `a` to
/// `b` in the disk.
pub fn geodesic_point(a: C64, b: C64, s: f64) -> C64 {
    let to0 = disk_translation_to_origin(a);
    let bb = to0.apply(b);
    let r = bb.norm();
    if r == 0.0 {
        return a;
    }
    let w = bb / r * (s * r.atanh()).tanh();
    to0.inverse().apply(w)
}

/// Hyperbolic distance in the disk for the curvature −1 metric
/// `4|dz|²/(1-|z|²)²`; the curvature −4 metric halves it.
pub fn disk_distance(a: C64, b: C64) -> f64 {
    let q = ((a - b) / (1.0 - a.conj() * b)).norm();
    2.0 * q.atanh()
}
