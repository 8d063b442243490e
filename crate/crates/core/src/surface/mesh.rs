//! Triangulation of the fundamental octagon with its side identifications
//! and the finite-element Laplacian of the curvature −4 metric.

use std::collections::{HashMap, VecDeque};

use super::bolza::FuchsianSurface;
use super::metric::disk_lambda;
use super::mobius::{geodesic_point, MobiusMap};
use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::sparse::CsrMatrix;

/// A mesh of the fundamental domain. Vertices identified by the side
/// pairings form one *class* (a point of the closed surface); scalar fields
/// are stored per class.
#[derive(Clone, Debug)]
pub struct SurfaceMesh {
    pub points: Vec<C64>,
    pub triangles: Vec<[usize; 3]>,
    /// `(i, j, g)`: vertex `j` is the image of vertex `i` under generator `g`.
    pub pairings: Vec<(usize, usize, usize)>,
    pub class_of: Vec<usize>,
    pub class_rep: Vec<usize>,
    /// `points[v] = deck[v](points[class_rep[class_of[v]]])`.
    pub deck: Vec<MobiusMap>,
    pub on_boundary: Vec<bool>,
    /// Vertex-level stiffness weights `(i, j, w)` with `i < j`.
    pub edges: Vec<(usize, usize, f64)>,
    /// Lumped hyperbolic area per vertex divided by `λ²`.
    pub euclid_area: Vec<f64>,
    pub lambda: Vec<f64>,
    /// Hyperbolic area `Σ λ² A_euc` of each class.
    pub class_area: Vec<f64>,
    /// Longest incident edge per vertex.
    pub local_size: Vec<f64>,
    stiffness: CsrMatrix,
}

/// Sector blending exponent: the map from the reference triangle is affine
/// near the centre and bends onto the geodesic sides near the boundary.
const BLEND_POWER: i32 = 2;

pub fn build_mesh(surface: &FuchsianSurface, target_edge: f64) -> Result<SurfaceMesh> {
    let radius = surface.vertices[0].norm();
    if !(target_edge > 0.0 && target_edge < 2.0 * radius) {
        return Err(Error::InvalidArgument(format!(
            "target edge {target_edge} must lie in (0, {:.3})",
            2.0 * radius
        )));
    }
    let n = (radius / target_edge).ceil().max(1.0) as usize;
    build_mesh_subdivided(surface, n)
}

/// Mesh with `n` subdivisions along each spoke; `(2n + 1)²` vertices.
pub fn build_mesh_subdivided(surface: &FuchsianSurface, n: usize) -> Result<SurfaceMesh> {
    if n == 0 {
        return Err(Error::InvalidArgument("mesh needs at least one subdivision".into()));
    }
    let mut points: Vec<C64> = Vec::new();
    let mut lookup: HashMap<(i64, i64), usize> = HashMap::new();
    let mut triangles = Vec::new();
    let mut side_vertices: Vec<Vec<usize>> = vec![Vec::new(); 8];
    let mut add = |p: C64, points: &mut Vec<C64>| -> usize {
        let key = ((p.re * 1e10).round() as i64, (p.im * 1e10).round() as i64);
        *lookup.entry(key).or_insert_with(|| {
            points.push(p);
            points.len() - 1
        })
    };
    for k in 0..8 {
        let (a, b) = surface.side_endpoints(k);
        let mut idx = vec![vec![0usize; n + 1]; n + 1];
        for i in 0..=n {
            for j in 0..=(n - i) {
                let l = i + j;
                let p = if l == 0 {
                    C64::new(0.0, 0.0)
                } else {
                    let s = j as f64 / l as f64;
                    let t = l as f64 / n as f64;
                    let chord = a * (1.0 - s) + b * s;
                    let q = if l == n {
                        surface.side_point(k, s)
                    } else {
                        geodesic_point(a, b, s)
                    };
                    chord * t + (q - chord) * t.powi(BLEND_POWER)
                };
                idx[i][j] = add(p, &mut points);
            }
        }
        for j in 0..=n {
            side_vertices[k].push(idx[n - j][j]);
        }
        for i in 0..n {
            for j in 0..(n - i) {
                triangles.push([idx[i][j], idx[i + 1][j], idx[i][j + 1]]);
                if i + j + 1 < n {
                    triangles.push([idx[i + 1][j], idx[i + 1][j + 1], idx[i][j + 1]]);
                }
            }
        }
    }

    // Side k+4 is carried onto side k by g_k with the parameter reversed.
    let mut pairings = Vec::new();
    for k in 0..4 {
        let g = surface.generator(k);
        for (i, &v) in side_vertices[k + 4].iter().enumerate() {
            let w = side_vertices[k][n - i];
            let miss = (g.apply(points[v]) - points[w]).norm();
            if miss > 1e-9 {
                return Err(Error::Mesh(format!(
                    "side pairing g{k} misses the partner vertex by {miss:.2e}"
                )));
            }
            pairings.push((v, w, k));
        }
    }
    SurfaceMesh::from_parts(surface, points, triangles, pairings)
}

/// Klein-model coordinates of a disk point; geodesics become straight lines.
fn klein(p: C64) -> C64 {
    p * (2.0 / (1.0 + p.norm_sqr()))
}

/// `√det g · g⁻¹` of the hyperbolic metric in Klein coordinates, as
/// `(m11, m12, m22)`. The Dirichlet energy is `∫ ∇f·M∇f dx`.
fn klein_energy_tensor(x: C64) -> (f64, f64, f64) {
    let s = 1.0 / (1.0 - x.norm_sqr()).sqrt();
    (s * (1.0 - x.re * x.re), -s * x.re * x.im, s * (1.0 - x.im * x.im))
}

/// Angle at `x` between Klein directions `u` and `v`, measured in the
/// hyperbolic metric.
fn klein_angle(x: C64, u: C64, v: C64) -> f64 {
    let q = 1.0 - x.norm_sqr();
    let g = |a: C64, b: C64| {
        (a.re * b.re + a.im * b.im) / q + (x.re * a.re + x.im * a.im) * (x.re * b.re + x.im * b.im) / (q * q)
    };
    (g(u, v) / (g(u, u) * g(v, v)).sqrt()).clamp(-1.0, 1.0).acos()
}

/// Stiffness weights of the edges opposite each corner and the area (in
/// the metric `λ²|dz|²`, curvature −4) of a geodesic triangle given by its
/// Klein vertices. The energy tensor is integrated with the edge-midpoint
/// rule; the area is exact, `(π − angle sum)/4`.
fn geodesic_triangle(k: &[C64; 3]) -> ([f64; 3], f64) {
    let e1 = k[1] - k[0];
    let e2 = k[2] - k[0];
    let det = e1.re * e2.im - e1.im * e2.re;
    let area_k = 0.5 * det.abs();
    // Gradients of the hat functions in Klein coordinates.
    let g1 = (e2.im / det, -e2.re / det);
    let g2 = (-e1.im / det, e1.re / det);
    let grads = [(-g1.0 - g2.0, -g1.1 - g2.1), g1, g2];
    let mut m = (0.0, 0.0, 0.0);
    for a in 0..3 {
        let mid = (k[(a + 1) % 3] + k[(a + 2) % 3]) * 0.5;
        let t = klein_energy_tensor(mid);
        m = (m.0 + t.0 / 3.0, m.1 + t.1 / 3.0, m.2 + t.2 / 3.0);
    }
    let form = |p: (f64, f64), q: (f64, f64)| p.0 * m.0 * q.0 + p.0 * m.1 * q.1 + p.1 * m.1 * q.0 + p.1 * m.2 * q.1;
    let weights = std::array::from_fn(|a| -area_k * form(grads[(a + 1) % 3], grads[(a + 2) % 3]));
    let angles: f64 = (0..3)
        .map(|a| klein_angle(k[a], k[(a + 1) % 3] - k[a], k[(a + 2) % 3] - k[a]))
        .sum();
    (weights, (std::f64::consts::PI - angles) / 4.0)
}

impl SurfaceMesh {
    /// Assemble classes, weights and areas from raw geometry.
    pub fn from_parts(
        surface: &FuchsianSurface,
        points: Vec<C64>,
        triangles: Vec<[usize; 3]>,
        pairings: Vec<(usize, usize, usize)>,
    ) -> Result<Self> {
        let nv = points.len();
        for p in &points {
            if p.norm_sqr() >= 1.0 {
                return Err(Error::OutsideDisk(*p));
            }
        }
        for t in &triangles {
            if t.iter().any(|&v| v >= nv) {
                return Err(Error::Mesh(format!("triangle {t:?} references a missing vertex")));
            }
        }

        let mut adjacency: Vec<Vec<(usize, MobiusMap)>> = vec![Vec::new(); nv];
        let mut on_boundary = vec![false; nv];
        for &(i, j, g) in &pairings {
            if i >= nv || j >= nv || g >= 8 {
                return Err(Error::Mesh(format!("bad identification ({i}, {j}, {g})")));
            }
            let m = *surface.generator(g);
            adjacency[i].push((j, m));
            adjacency[j].push((i, m.inverse()));
            on_boundary[i] = true;
            on_boundary[j] = true;
        }
        let mut class_of = vec![usize::MAX; nv];
        let mut class_rep = Vec::new();
        let mut deck = vec![MobiusMap::identity(); nv];
        for start in 0..nv {
            if class_of[start] != usize::MAX {
                continue;
            }
            let cls = class_rep.len();
            class_rep.push(start);
            class_of[start] = cls;
            let mut queue = VecDeque::from([start]);
            while let Some(v) = queue.pop_front() {
                for &(w, m) in &adjacency[v] {
                    if class_of[w] == usize::MAX {
                        class_of[w] = cls;
                        deck[w] = m.compose(&deck[v]);
                        queue.push_back(w);
                    }
                }
            }
        }
        for &(i, j, g) in &pairings {
            let expect = surface.generator(g).compose(&deck[i]);
            let miss = expect.matrix_distance(&deck[j]);
            if miss > 1e-7 * (1.0 + expect.a.norm()) {
                return Err(Error::Mesh(format!(
                    "deck transformations are inconsistent at vertex {j} (miss {miss:.2e})"
                )));
            }
            let img = surface.generator(g).apply(points[i]);
            if (img - points[j]).norm() > 1e-8 {
                return Err(Error::Mesh(format!("identification ({i}, {j}, g{g}) is not geometric")));
            }
        }

        let mut edge_w: HashMap<(usize, usize), f64> = HashMap::new();
        let mut hyp_area = vec![0.0; nv];
        let mut local_size = vec![0.0f64; nv];
        for t in &triangles {
            let z = [points[t[0]], points[t[1]], points[t[2]]];
            let cross = ((z[1] - z[0]).conj() * (z[2] - z[0])).im;
            if 0.5 * cross <= 1e-14 {
                return Err(Error::Mesh(format!("degenerate or inverted triangle {t:?}")));
            }
            let k = z.map(klein);
            let (weights, area) = geodesic_triangle(&k);
            for a in 0..3 {
                let (i, j) = (t[(a + 1) % 3], t[(a + 2) % 3]);
                let key = (i.min(j), i.max(j));
                *edge_w.entry(key).or_insert(0.0) += weights[a];
                let len = (z[(a + 1) % 3] - z[(a + 2) % 3]).norm();
                local_size[i] = local_size[i].max(len);
                local_size[j] = local_size[j].max(len);
                hyp_area[t[a]] += area / 3.0;
            }
        }
        let euclid_area: Vec<f64> = hyp_area
            .iter()
            .zip(&points)
            .map(|(a, &p)| a / disk_lambda(p).powi(2))
            .collect();
        let mut edges: Vec<(usize, usize, f64)> = edge_w.into_iter().map(|((i, j), w)| (i, j, w)).collect();
        edges.sort_by_key(|e| (e.0, e.1));

        let lambda: Vec<f64> = points.iter().map(|&p| disk_lambda(p)).collect();
        let nc = class_rep.len();
        let mut class_area = vec![0.0; nc];
        for v in 0..nv {
            class_area[class_of[v]] += lambda[v] * lambda[v] * euclid_area[v];
        }
        let mut trip = Vec::with_capacity(4 * edges.len());
        for &(i, j, w) in &edges {
            let (ci, cj) = (class_of[i], class_of[j]);
            if ci == cj {
                continue;
            }
            trip.push((ci, cj, w));
            trip.push((cj, ci, w));
            trip.push((ci, ci, -w));
            trip.push((cj, cj, -w));
        }
        let stiffness = CsrMatrix::from_triplets(nc, &trip);
        Ok(SurfaceMesh {
            points,
            triangles,
            pairings,
            class_of,
            class_rep,
            deck,
            on_boundary,
            edges,
            euclid_area,
            lambda,
            class_area,
            local_size,
            stiffness,
        })
    }

    pub fn num_vertices(&self) -> usize {
        self.points.len()
    }

    pub fn num_classes(&self) -> usize {
        self.class_rep.len()
    }

    /// Representative point of each class.
    pub fn class_points(&self) -> Vec<C64> {
        self.class_rep.iter().map(|&v| self.points[v]).collect()
    }

    pub fn total_area(&self) -> f64 {
        self.class_area.iter().sum()
    }

    /// Symmetric negative semidefinite stiffness matrix on classes:
    /// `(K f)_c = Σ w_ij (f_j - f_i)`.
    pub fn stiffness(&self) -> &CsrMatrix {
        &self.stiffness
    }

    /// `Δ_g f = K f / A` for a class field.
    pub fn laplacian(&self, f: &[f64]) -> Vec<f64> {
        let mut out = self.stiffness.matvec(f);
        for (o, a) in out.iter_mut().zip(&self.class_area) {
            *o /= a;
        }
        out
    }

    /// Expand a class field to all vertices.
    pub fn to_vertices(&self, f: &[f64]) -> Vec<f64> {
        self.class_of.iter().map(|&c| f[c]).collect()
    }

    pub fn integrate(&self, f: &[f64]) -> f64 {
        f.iter().zip(&self.class_area).map(|(x, a)| x * a).sum()
    }

    pub fn l2_norm(&self, f: &[f64]) -> f64 {
        f.iter()
            .zip(&self.class_area)
            .map(|(x, a)| x * x * a)
            .sum::<f64>()
            .sqrt()
    }

    /// Euler characteristic `V - E + F` of the identified triangulation.
    pub fn euler_characteristic(&self) -> i64 {
        let image: HashMap<(usize, usize), usize> = self.pairings.iter().map(|&(i, j, g)| ((g, i), j)).collect();
        let is_edge = |i: usize, j: usize| {
            let key = (i.min(j), i.max(j));
            self.edges.binary_search_by(|e| (e.0, e.1).cmp(&key)).is_ok()
        };
        // An edge on side k+4 whose image under g_k is an edge on side k is
        // the same edge of the quotient.
        let duplicates = self
            .edges
            .iter()
            .filter(|&&(i, j, _)| {
                (0..8).any(|g| match (image.get(&(g, i)), image.get(&(g, j))) {
                    (Some(&a), Some(&b)) => is_edge(a, b),
                    _ => false,
                })
            })
            .count();
        let quotient_edges = self.edges.len() - duplicates;
        self.num_classes() as i64 - quotient_edges as i64 + self.triangles.len() as i64
    }

    pub fn max_edge(&self) -> f64 {
        self.local_size.iter().copied().fold(0.0, f64::max)
    }

    /// Weights `a_k` with `∂_z f(v) ≈ Σ a_k f(k)` for every vertex, from a
    /// least-squares quadratic fit over the graph neighbourhood inside the
    /// fundamental domain (no gluing). Second order also at seams and
    /// corners, where the neighbourhood is one-sided; `∂_z̄` uses `ā_k`.
    pub fn dz_stencils(&self) -> Vec<Vec<(usize, C64)>> {
        let nv = self.num_vertices();
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); nv];
        for t in &self.triangles {
            for a in 0..3 {
                let (i, j) = (t[a], t[(a + 1) % 3]);
                if !adj[i].contains(&j) {
                    adj[i].push(j);
                    adj[j].push(i);
                }
            }
        }
        (0..nv)
            .map(|v| {
                let mut near = vec![v];
                let mut frontier = vec![v];
                let mut depth = 0;
                while depth < 2 || (near.len() < 13 && depth < 5) {
                    let mut next = Vec::new();
                    for &u in &frontier {
                        for &w in &adj[u] {
                            if !near.contains(&w) {
                                near.push(w);
                                next.push(w);
                            }
                        }
                    }
                    frontier = next;
                    depth += 1;
                }
                quadratic_fit_dz(&self.points, v, &near[1..])
            })
            .collect()
    }
}

fn quadratic_fit_dz(points: &[C64], v: usize, near: &[usize]) -> Vec<(usize, C64)> {
    let p0 = points[v];
    let scale = near.iter().map(|&w| (points[w] - p0).norm()).fold(0.0, f64::max);
    let rows = nalgebra::DMatrix::<f64>::from_fn(near.len(), 5, |r, k| {
        let d = (points[near[r]] - p0) / scale;
        [d.re, d.im, d.re * d.re, d.re * d.im, d.im * d.im][k]
    });
    let pinv = rows
        .clone()
        .pseudo_inverse(1e-12)
        .expect("pseudo-inverse of a real matrix");
    let mut out = Vec::with_capacity(near.len() + 1);
    let mut own = C64::new(0.0, 0.0);
    for (r, &w) in near.iter().enumerate() {
        let a = C64::new(pinv[(0, r)], -pinv[(1, r)]) * (0.5 / scale);
        own -= a;
        out.push((w, a));
    }
    out.push((v, own));
    out
}
