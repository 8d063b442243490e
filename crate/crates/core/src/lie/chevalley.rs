//! Chevalley bases for the simple Lie algebras of rank at most four.
//!
//! Each algebra is realized inside a matrix algebra by Chevalley generators
//! `e_i` (with `f_i = e_i^T`). Positive root vectors are generated by
//! `x_{β+α_i} = [e_i, x_β] / (p + 1)`, `p` being the length of the
//! `α_i`-string through `β` below `β`; this makes every structure constant
//! an integer. Negative root vectors are transposes. Structure constants are
//! then read off in the chosen basis and verified to be integral.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{c, ComplexMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CartanType {
    A(usize),
    B(usize),
    C(usize),
    D(usize),
    G2,
}

impl CartanType {
    pub fn rank(&self) -> usize {
        match *self {
            CartanType::A(n) | CartanType::B(n) | CartanType::C(n) | CartanType::D(n) => n,
            CartanType::G2 => 2,
        }
    }

    /// All labels accepted by [`chevalley_basis`].
    pub fn supported() -> Vec<CartanType> {
        use CartanType::*;
        vec![A(1), A(2), A(3), A(4), B(2), B(3), B(4), C(2), C(3), C(4), D(4), G2]
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            CartanType::A(n) => (1..=4).contains(&n),
            CartanType::B(n) | CartanType::C(n) => (2..=4).contains(&n),
            CartanType::D(n) => n == 4,
            CartanType::G2 => true,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::UnsupportedType(self.to_string()))
        }
    }
}

impl fmt::Display for CartanType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            CartanType::A(n) => write!(f, "A{n}"),
            CartanType::B(n) => write!(f, "B{n}"),
            CartanType::C(n) => write!(f, "C{n}"),
            CartanType::D(n) => write!(f, "D{n}"),
            CartanType::G2 => write!(f, "G2"),
        }
    }
}

impl FromStr for CartanType {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::UnsupportedType(s.to_string());
        let mut chars = s.chars();
        let letter = chars.next().ok_or_else(bad)?.to_ascii_uppercase();
        let rank: usize = chars.as_str().parse().map_err(|_| bad())?;
        let t = match letter {
            'A' => CartanType::A(rank),
            'B' => CartanType::B(rank),
            'C' => CartanType::C(rank),
            'D' => CartanType::D(rank),
            'G' if rank == 2 => CartanType::G2,
            _ => return Err(bad()),
        };
        t.validate()?;
        Ok(t)
    }
}

/// Label of a basis element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BasisLabel {
    /// `h_{α_i}`.
    Cartan(usize),
    /// `x_α` with `α` given by its simple-root coordinates (negative for
    /// negative roots).
    Root(Vec<i32>),
}

#[derive(Clone, Debug)]
pub struct ChevalleyData {
    pub cartan_type: CartanType,
    pub rank: usize,
    /// Cartan matrix `A_ij = α_j(h_i)`.
    pub cartan_matrix: DMatrix<i64>,
    /// Simple-root coordinates of the positive roots, ordered by height.
    pub positive_roots: Vec<Vec<i32>>,
    /// Basis in weight order: positive roots by decreasing height, the
    /// Cartan elements, then negative roots by increasing depth. In this
    /// order `ad` of every Borel element is upper triangular.
    pub basis: Vec<BasisLabel>,
    /// `[b_i, b_j] = Σ_k structure[(i*dim + j)*dim + k] b_k`.
    pub structure: Vec<i64>,
    /// `ad(b_i)` in the basis above.
    pub ad: Vec<ComplexMatrix>,
    /// Killing form `B_ij = tr(ad b_i ad b_j)`.
    pub killing: DMatrix<i64>,
    /// `r_{α_i}` from `Σ_{α>0} h_α = Σ r_i h_{α_i}`.
    pub r_coeffs: Vec<i64>,
    /// Basis matrices in the defining (matrix) realization.
    pub matrices: Vec<DMatrix<f64>>,
}

fn unit(m: usize, i: usize, j: usize) -> DMatrix<f64> {
    let mut e = DMatrix::zeros(m, m);
    e[(i, j)] = 1.0;
    e
}

/// Chevalley generators `e_i` in a faithful matrix realization.
fn generators(t: CartanType) -> Vec<DMatrix<f64>> {
    let chain = |m: usize, count: usize| -> Vec<DMatrix<f64>> {
        (0..count)
            .map(|i| unit(m, i, i + 1) + unit(m, m - 2 - i, m - 1 - i))
            .collect()
    };
    match t {
        CartanType::A(n) => (0..n).map(|i| unit(n + 1, i, i + 1)).collect(),
        CartanType::C(n) => {
            let m = 2 * n;
            let mut g = chain(m, n - 1);
            g.push(unit(m, n - 1, n));
            g
        }
        CartanType::B(n) => {
            let m = 2 * n + 1;
            let mut g = chain(m, n - 1);
            g.push((unit(m, n - 1, n) + unit(m, n, n + 1)) * 2f64.sqrt());
            g
        }
        CartanType::D(n) => {
            let m = 2 * n;
            let mut g = chain(m, n - 1);
            g.push(unit(m, n - 2, n) + unit(m, n - 1, n + 1));
            g
        }
        CartanType::G2 => {
            // Fold D4 along its triality: the three outer nodes become the
            // short simple root, the central node the long one.
            let d = generators(CartanType::D(4));
            vec![&d[0] + &d[2] + &d[3], d[1].clone()]
        }
    }
}

fn bracket(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    a * b - b * a
}

fn is_zero(m: &DMatrix<f64>) -> bool {
    m.iter().all(|x| x.abs() < 1e-12)
}

/// Build the Chevalley data for a supported type.
pub fn chevalley_basis(t: CartanType) -> Result<ChevalleyData> {
    t.validate()?;
    let rank = t.rank();
    let e = generators(t);
    let f: Vec<DMatrix<f64>> = e.iter().map(|x| x.transpose()).collect();
    let h: Vec<DMatrix<f64>> = e.iter().zip(&f).map(|(a, b)| bracket(a, b)).collect();

    // Positive roots by height, with their matrices.
    let mut roots: Vec<Vec<i32>> = Vec::new();
    let mut vecs: Vec<DMatrix<f64>> = Vec::new();
    let mut index: HashMap<Vec<i32>, usize> = HashMap::new();
    for i in 0..rank {
        let mut r = vec![0; rank];
        r[i] = 1;
        index.insert(r.clone(), roots.len());
        roots.push(r);
        vecs.push(e[i].clone());
    }
    let mut start = 0;
    while start < roots.len() {
        let end = roots.len();
        for k in start..end {
            for i in 0..rank {
                let mut nr = roots[k].clone();
                nr[i] += 1;
                if index.contains_key(&nr) {
                    continue;
                }
                let br = bracket(&e[i], &vecs[k]);
                if is_zero(&br) {
                    continue;
                }
                // Length of the α_i-string below roots[k].
                let mut p = 0;
                let mut down = roots[k].clone();
                loop {
                    down[i] -= 1;
                    if index.contains_key(&down) {
                        p += 1;
                    } else {
                        break;
                    }
                }
                index.insert(nr.clone(), roots.len());
                roots.push(nr);
                vecs.push(br / (p as f64 + 1.0));
            }
        }
        start = end;
    }

    let height = |r: &Vec<i32>| r.iter().sum::<i32>();
    let mut order: Vec<usize> = (0..roots.len()).collect();
    order.sort_by_key(|&k| (-height(&roots[k]), roots[k].clone()));

    let mut basis = Vec::new();
    let mut matrices = Vec::new();
    for &k in &order {
        basis.push(BasisLabel::Root(roots[k].clone()));
        matrices.push(vecs[k].clone());
    }
    for (i, hi) in h.iter().enumerate() {
        basis.push(BasisLabel::Cartan(i));
        matrices.push(hi.clone());
    }
    for &k in order.iter().rev() {
        basis.push(BasisLabel::Root(roots[k].iter().map(|x| -x).collect()));
        matrices.push(vecs[k].transpose());
    }
    let dim = basis.len();

    // Coordinates in the basis via the Frobenius Gram matrix.
    let mut gram = DMatrix::<f64>::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            gram[(i, j)] = matrices[i].dot(&matrices[j]);
        }
    }
    let gram_inv = gram
        .try_inverse()
        .ok_or_else(|| Error::InvalidArgument(format!("{t}: basis matrices are dependent")))?;
    let coords = |m: &DMatrix<f64>| -> DVector<f64> {
        let rhs = DVector::from_fn(dim, |i, _| matrices[i].dot(m));
        &gram_inv * rhs
    };

    let mut structure = vec![0i64; dim * dim * dim];
    for i in 0..dim {
        for j in 0..dim {
            let br = bracket(&matrices[i], &matrices[j]);
            let x = coords(&br);
            let mut rebuilt = DMatrix::<f64>::zeros(br.nrows(), br.ncols());
            for k in 0..dim {
                let r = x[k].round();
                if (x[k] - r).abs() > 1e-9 {
                    return Err(Error::Relation {
                        what: format!("{t}: non-integral structure constant"),
                        residual: (x[k] - r).abs(),
                        tol: 1e-9,
                    });
                }
                structure[(i * dim + j) * dim + k] = r as i64;
                rebuilt += &matrices[k] * r;
            }
            let miss = (&rebuilt - &br).amax();
            if miss > 1e-9 {
                return Err(Error::Relation {
                    what: format!("{t}: bracket outside the span of the basis"),
                    residual: miss,
                    tol: 1e-9,
                });
            }
        }
    }

    let ad: Vec<ComplexMatrix> = (0..dim)
        .map(|i| {
            // ad(b_i)_{k j} = coefficient of b_k in [b_i, b_j]
            ComplexMatrix::from_fn(dim, dim, |k, j| c(structure[(i * dim + j) * dim + k] as f64))
        })
        .collect();

    let mut killing = DMatrix::<i64>::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            let mut tr = 0i64;
            for a in 0..dim {
                for b in 0..dim {
                    tr += structure[(i * dim + b) * dim + a] * structure[(j * dim + a) * dim + b];
                }
            }
            killing[(i, j)] = tr;
        }
    }

    let cartan_start = roots.len();
    let mut cartan_matrix = DMatrix::<i64>::zeros(rank, rank);
    for i in 0..rank {
        for j in 0..rank {
            // [h_i, e_j] = A_ij e_j; e_j is the basis element for the simple root j.
            let ej = basis
                .iter()
                .position(|b| *b == BasisLabel::Root(unit_root(rank, j)))
                .expect("simple root in basis");
            cartan_matrix[(i, j)] = structure[((cartan_start + i) * dim + ej) * dim + ej];
        }
    }

    // Σ_{α>0} h_α with h_α = [x_α, x_{-α}] expressed in the h_i.
    let mut r_coeffs = vec![0i64; rank];
    for (pos, label) in basis.iter().enumerate().take(cartan_start) {
        let neg = match label {
            BasisLabel::Root(r) => BasisLabel::Root(r.iter().map(|x| -x).collect()),
            BasisLabel::Cartan(_) => unreachable!(),
        };
        let npos = basis.iter().position(|b| *b == neg).expect("negative root present");
        for (i, slot) in r_coeffs.iter_mut().enumerate() {
            *slot += structure[(pos * dim + npos) * dim + cartan_start + i];
        }
    }

    let mut positive_roots: Vec<Vec<i32>> = order.iter().map(|&k| roots[k].clone()).collect();
    positive_roots.reverse();

    Ok(ChevalleyData {
        cartan_type: t,
        rank,
        cartan_matrix,
        positive_roots,
        basis,
        structure,
        ad,
        killing,
        r_coeffs,
        matrices,
    })
}

fn unit_root(rank: usize, j: usize) -> Vec<i32> {
    let mut r = vec![0; rank];
    r[j] = 1;
    r
}

impl ChevalleyData {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn index_of(&self, label: &BasisLabel) -> Option<usize> {
        self.basis.iter().position(|b| b == label)
    }

    /// Index of `h_{α_i}`.
    pub fn cartan_index(&self, i: usize) -> usize {
        self.positive_roots.len() + i
    }

    /// Index of `x_{±α_i}`.
    pub fn simple_index(&self, i: usize, positive: bool) -> usize {
        let r: Vec<i32> = unit_root(self.rank, i)
            .into_iter()
            .map(|x| if positive { x } else { -x })
            .collect();
        self.index_of(&BasisLabel::Root(r)).expect("simple root")
    }

    /// Height of each basis element (zero on the Cartan subalgebra).
    pub fn heights(&self) -> Vec<i32> {
        self.basis
            .iter()
            .map(|b| match b {
                BasisLabel::Cartan(_) => 0,
                BasisLabel::Root(r) => r.iter().sum(),
            })
            .collect()
    }

    /// `ad` of a general element given by its coordinates.
    pub fn ad_of(&self, coords: &DVector<crate::linalg::C64>) -> ComplexMatrix {
        let dim = self.dim();
        let mut m = ComplexMatrix::zeros(dim, dim);
        for (i, a) in coords.iter().enumerate() {
            if a.norm() != 0.0 {
                m += &self.ad[i] * *a;
            }
        }
        m
    }

    /// Bracket of two elements in coordinates.
    pub fn bracket(
        &self,
        a: &DVector<crate::linalg::C64>,
        b: &DVector<crate::linalg::C64>,
    ) -> DVector<crate::linalg::C64> {
        self.ad_of(a) * b
    }

    /// Largest Jacobi-identity violation over all basis triples (exact
    /// integer arithmetic, so the result is an integer).
    pub fn jacobi_residual(&self) -> i64 {
        let dim = self.dim();
        let sc = |i: usize, j: usize, k: usize| self.structure[(i * dim + j) * dim + k];
        let mut worst = 0i64;
        for a in 0..dim {
            for b in a + 1..dim {
                for cc in b + 1..dim {
                    for out in 0..dim {
                        let mut s = 0i64;
                        for m in 0..dim {
                            s += sc(a, m, out) * sc(b, cc, m)
                                + sc(b, m, out) * sc(cc, a, m)
                                + sc(cc, m, out) * sc(a, b, m);
                        }
                        worst = worst.max(s.abs());
                    }
                }
            }
        }
        worst
    }
}
