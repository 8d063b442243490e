//! The Bolza surface: the regular hyperbolic octagon with opposite sides
//! identified, realized in the unit disk.

use std::f64::consts::{FRAC_PI_4, FRAC_PI_8, PI, SQRT_2};

use super::mobius::{geodesic_point, MobiusMap};
use crate::linalg::C64;

/// Word whose product is the identity: `g0 g3 g6 g1 g4 g7 g2 g5`.
pub const RELATION_WORD: [usize; 8] = [0, 3, 6, 1, 4, 7, 2, 5];

/// A genus-two Fuchsian group with its fundamental octagon.
///
/// Side `k` joins `vertices[k-1]` to `vertices[k]` (indices mod 8) and has
/// its midpoint on the ray at angle `kπ/4`. Generator `g_k` maps side
/// `k+4` onto side `k`, reversing the side parameter, and `g_{k+4} = g_k^{-1}`.
#[derive(Clone, Debug)]
pub struct FuchsianSurface {
    pub generators: [MobiusMap; 8],
    pub vertices: [C64; 8],
    centers: [C64; 8],
    radius: f64,
}

pub fn bolza_group() -> FuchsianSurface {
    let ch = 1.0 + SQRT_2;
    let sh = (2.0 + 2.0 * SQRT_2).sqrt();
    let generators = std::array::from_fn(|k| {
        let phase = C64::from_polar(1.0, k as f64 * FRAC_PI_4);
        MobiusMap {
            a: C64::new(ch, 0.0),
            b: phase * sh,
            c: phase.conj() * sh,
            d: C64::new(ch, 0.0),
        }
    });
    let rv = ((3.0 + 2.0 * SQRT_2).acosh() / 2.0).tanh();
    let vertices: [C64; 8] = std::array::from_fn(|k| C64::from_polar(rv, (2 * k + 1) as f64 * FRAC_PI_8));
    // Geodesic through V_{k-1}, V_k is a circle orthogonal to the unit circle
    // centred on the ray at angle kπ/4.
    let v0 = vertices[0];
    let dist = (v0.norm_sqr() + 1.0) / (2.0 * v0.re);
    let radius = (dist * dist - 1.0).sqrt();
    let centers = std::array::from_fn(|k| C64::from_polar(dist, k as f64 * FRAC_PI_4));
    FuchsianSurface {
        generators,
        vertices,
        centers,
        radius,
    }
}

impl FuchsianSurface {
    pub fn genus(&self) -> usize {
        2
    }

    /// Hyperbolic area for the curvature −4 metric, `π(2g − 2)/2`.
    pub fn area(&self) -> f64 {
        PI * (2.0 * self.genus() as f64 - 2.0) / 2.0
    }

    pub fn generator(&self, k: usize) -> &MobiusMap {
        &self.generators[k % 8]
    }

    /// Index `j` with `g_j = g_k^{-1}`.
    pub fn inverse_index(k: usize) -> usize {
        (k + 4) % 8
    }

    /// Product of the generators along `word`, left to right.
    pub fn word(&self, word: &[usize]) -> MobiusMap {
        word.iter()
            .fold(MobiusMap::identity(), |acc, &k| acc.compose(self.generator(k)))
    }

    /// Distance of the relation product from `+1`.
    pub fn relation_residual(&self) -> f64 {
        self.word(&RELATION_WORD).matrix_distance(&MobiusMap::identity())
    }

    /// Centre and radius of the geodesic circle carrying side `k`.
    pub fn side_circle(&self, k: usize) -> (C64, f64) {
        (self.centers[k % 8], self.radius)
    }

    /// Endpoints `(V_{k-1}, V_k)` of side `k`.
    pub fn side_endpoints(&self, k: usize) -> (C64, C64) {
        (self.vertices[(k + 7) % 8], self.vertices[k % 8])
    }

    /// Point at hyperbolic-length fraction `s` along side `k`.
    pub fn side_point(&self, k: usize, s: f64) -> C64 {
        let (a, b) = self.side_endpoints(k);
        geodesic_point(a, b, s)
    }

    /// Signed distance-like function: positive inside the half-plane of side `k`.
    pub fn side_function(&self, k: usize, w: C64) -> f64 {
        let (c, r) = self.side_circle(k);
        (w - c).norm() - r
    }

    /// Whether `w` lies in the closed octagon (up to `tol`).
    pub fn contains(&self, w: C64, tol: f64) -> bool {
        (0..8).all(|k| self.side_function(k, w) >= -tol)
    }

    /// The side with the most negative side function, if `w` is outside.
    pub fn exit_side(&self, w: C64) -> Option<usize> {
        (0..8)
            .map(|k| (k, self.side_function(k, w)))
            .filter(|&(_, v)| v < 0.0)
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(k, _)| k)
    }

    /// Interior angle at each vertex, from the tangents of the two sides.
    pub fn interior_angles(&self) -> [f64; 8] {
        std::array::from_fn(|k| {
            let v = self.vertices[k];
            let tangent = |side: usize, towards: C64| {
                let (c, _) = self.side_circle(side);
                let t = C64::new(0.0, 1.0) * (v - c);
                if (t.conj() * (towards - v)).re >= 0.0 {
                    t / t.norm()
                } else {
                    -t / t.norm()
                }
            };
            let t1 = tangent(k, self.vertices[(k + 7) % 8]);
            let t2 = tangent(k + 1, self.vertices[(k + 1) % 8]);
            (t1.conj() * t2).arg().abs()
        })
    }

    /// All freely reduced words of length at most `max_len`, as matrices,
    /// grouped by length (the identity first).
    pub fn words_up_to(&self, max_len: usize) -> Vec<Vec<MobiusMap>> {
        let mut out = vec![vec![MobiusMap::identity()]];
        let mut frontier: Vec<(MobiusMap, Option<usize>)> = vec![(MobiusMap::identity(), None)];
        for _ in 0..max_len {
            let mut next = Vec::with_capacity(frontier.len() * 7);
            for (m, last) in &frontier {
                for k in 0..8 {
                    if *last == Some(Self::inverse_index(k)) {
                        continue;
                    }
                    next.push((m.compose(&self.generators[k]), Some(k)));
                }
            }
            out.push(next.iter().map(|(m, _)| *m).collect());
            frontier = next;
        }
        out
    }
}
