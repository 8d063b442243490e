//! Dense complex matrix helpers shared by every module.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type C64 = Complex64;
pub type ComplexMatrix = DMatrix<C64>;

pub const I: C64 = C64::new(0.0, 1.0);

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn zeros(n: usize) -> ComplexMatrix {
    ComplexMatrix::zeros(n, n)
}

pub fn identity(n: usize) -> ComplexMatrix {
    ComplexMatrix::identity(n, n)
}

pub fn diag(entries: &[C64]) -> ComplexMatrix {
    let n = entries.len();
    let mut m = zeros(n);
    for (i, e) in entries.iter().enumerate() {
        m[(i, i)] = *e;
    }
    m
}

pub fn real_diag(entries: &[f64]) -> ComplexMatrix {
    diag(&entries.iter().map(|&x| c(x)).collect::<Vec<_>>())
}

/// `[a, b] = ab - ba`.
pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a * b - b * a
}

pub fn frobenius(a: &ComplexMatrix) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn max_abs(a: &ComplexMatrix) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Largest entrywise deviation between two matrices of equal shape.
pub fn max_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "shape mismatch");
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn approx_eq(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) -> bool {
    a.shape() == b.shape() && max_diff(a, b) <= tol
}

pub fn trace(a: &ComplexMatrix) -> C64 {
    a.diagonal().iter().sum()
}

pub fn dagger(a: &ComplexMatrix) -> ComplexMatrix {
    a.adjoint()
}

/// Antidiagonal matrix of ones.
pub fn antidiagonal_ones(n: usize) -> ComplexMatrix {
    let mut s = zeros(n);
    for i in 0..n {
        s[(i, n - 1 - i)] = c(1.0);
    }
    s
}

/// Matrix exponential by scaling and squaring with a Taylor kernel.
pub fn expm(a: &ComplexMatrix) -> ComplexMatrix {
    let n = a.nrows();
    let norm = a.iter().map(|z| z.norm()).sum::<f64>().max(frobenius(a));
    let mut squarings = 0u32;
    let mut scale = 1.0;
    while norm * scale > 0.5 {
        scale *= 0.5;
        squarings += 1;
    }
    let x = a * c(scale);
    let mut term = identity(n);
    let mut sum = identity(n);
    for k in 1..=20 {
        term = &term * &x * c(1.0 / k as f64);
        sum += &term;
        if max_abs(&term) < 1e-18 * max_abs(&sum) {
            break;
        }
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// Exponential of a nilpotent matrix, exact up to rounding (finite series).
pub fn expm_nilpotent(a: &ComplexMatrix) -> ComplexMatrix {
    let n = a.nrows();
    let mut term = identity(n);
    let mut sum = identity(n);
    for k in 1..n {
        term = &term * a * c(1.0 / k as f64);
        sum += &term;
    }
    sum
}

/// Principal matrix logarithm for matrices with spectrum away from the
/// negative real axis, via inverse scaling and squaring plus a Gregory series.
pub fn logm(a: &ComplexMatrix) -> ComplexMatrix {
    let n = a.nrows();
    let id = identity(n);
    let mut x = a.clone();
    let mut roots = 0u32;
    while max_abs(&(&x - &id)) > 0.25 && roots < 40 {
        x = sqrtm(&x);
        roots += 1;
    }
    // log(x) = 2 atanh((x - 1)(x + 1)^{-1})
    let y = (&x - &id)
        * (&x + &id)
            .try_inverse()
            .expect("matrix logarithm: singular shifted matrix");
    let y2 = &y * &y;
    let mut term = y.clone();
    let mut sum = y.clone();
    for k in 1..60 {
        term = &term * &y2;
        let add = &term * c(1.0 / (2 * k + 1) as f64);
        sum += &add;
        if max_abs(&add) < 1e-18 {
            break;
        }
    }
    sum * c(2.0 * f64::powi(2.0, roots as i32))
}

/// Principal square root by the Denman–Beavers iteration.
pub fn sqrtm(a: &ComplexMatrix) -> ComplexMatrix {
    let n = a.nrows();
    let mut y = a.clone();
    let mut z = identity(n);
    for _ in 0..100 {
        let yi = y.clone().try_inverse().expect("sqrtm: singular iterate");
        let zi = z.clone().try_inverse().expect("sqrtm: singular iterate");
        let yn = (&y + &zi) * c(0.5);
        let zn = (&z + &yi) * c(0.5);
        let delta = max_diff(&yn, &y);
        y = yn;
        z = zn;
        if delta < 1e-15 * max_abs(&y).max(1.0) {
            break;
        }
    }
    y
}

/// `a^H` for a diagonal generator `H` with integer eigenvalues. The power
/// `a^{h}` uses the principal branch only through `a^{1/2}` when `h` is odd,
/// so callers choose the sign of `a` to fix the lift.
pub fn diag_power(a: C64, h_diag: &[f64]) -> ComplexMatrix {
    diag(&h_diag.iter().map(|&h| int_power(a, h)).collect::<Vec<_>>())
}

/// `a^h` for integral `h`.
pub fn int_power(a: C64, h: f64) -> C64 {
    let k = h.round() as i32;
    debug_assert!((h - k as f64).abs() < 1e-12, "non-integral exponent {h}");
    a.powi(k)
}

/// Characteristic polynomial coefficients `[1, c_1, ..., c_n]` of
/// `det(t - m) = t^n + c_1 t^{n-1} + ... + c_n`, by the division-free
/// Berkowitz algorithm.
pub fn char_poly(m: &ComplexMatrix) -> Vec<C64> {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "char_poly needs a square matrix");
    if n == 0 {
        return vec![c(1.0)];
    }
    // Coefficients of det(t - A_k) for the leading k x k block, highest first.
    let mut poly = vec![c(1.0), -m[(0, 0)]];
    for k in 1..n {
        // Partition the leading (k+1) block as [[A, col], [row, a]].
        let a = m[(k, k)];
        let row: Vec<C64> = (0..k).map(|j| m[(k, j)]).collect();
        let col: Vec<C64> = (0..k).map(|i| m[(i, k)]).collect();
        let block = m.view((0, 0), (k, k)).into_owned();
        // Toeplitz column: 1, -a, -R C, -R A C, ..., -R A^{k-1} C
        let mut t = vec![c(1.0), -a];
        let mut v: Vec<C64> = col.clone();
        for _ in 0..k {
            let rv: C64 = row.iter().zip(v.iter()).map(|(x, y)| x * y).sum();
            t.push(-rv);
            let mut nv = vec![c(0.0); k];
            for i in 0..k {
                for j in 0..k {
                    nv[i] += block[(i, j)] * v[j];
                }
            }
            v = nv;
        }
        // New polynomial = Toeplitz(t) * poly
        let mut next = vec![c(0.0); k + 2];
        for (i, slot) in next.iter_mut().enumerate() {
            for (j, p) in poly.iter().enumerate() {
                if i >= j && i - j < t.len() {
                    *slot += t[i - j] * p;
                }
            }
        }
        poly = next;
    }
    poly
}

/// Real orthonormal basis (as columns) of the nullspace of a real matrix,
/// singular values below `tol * max(1, s_max)` treated as zero.
pub fn real_nullspace(a: &DMatrix<f64>, tol: f64) -> DMatrix<f64> {
    let cols = a.ncols();
    if a.nrows() == 0 {
        return DMatrix::identity(cols, cols);
    }
    // Pad to at least square so the SVD exposes the full right singular basis.
    let rows = a.nrows().max(cols);
    let mut padded = DMatrix::<f64>::zeros(rows, cols);
    padded.view_mut((0, 0), (a.nrows(), cols)).copy_from(a);
    let svd = padded.svd(false, true);
    let vt = svd.v_t.expect("svd right vectors");
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let cut = tol * smax.max(1.0);
    let null: Vec<usize> = (0..cols).filter(|&i| svd.singular_values[i] <= cut).collect();
    let mut out = DMatrix::<f64>::zeros(cols, null.len());
    for (j, &i) in null.iter().enumerate() {
        for k in 0..cols {
            out[(k, j)] = vt[(i, k)];
        }
    }
    out
}

/// Complex nullspace via the real embedding `z = x + iy`.
pub fn complex_nullspace(a: &ComplexMatrix, tol: f64) -> Vec<nalgebra::DVector<C64>> {
    let (r, cn) = a.shape();
    let mut re = DMatrix::<f64>::zeros(2 * r, 2 * cn);
    for i in 0..r {
        for j in 0..cn {
            let z = a[(i, j)];
            re[(i, j)] = z.re;
            re[(i, j + cn)] = -z.im;
            re[(i + r, j)] = z.im;
            re[(i + r, j + cn)] = z.re;
        }
    }
    let ns = real_nullspace(&re, tol);
    // The real kernel is closed under (x, y) -> (-y, x); keep a complex basis
    // by Gram-Schmidt over C.
    let mut basis: Vec<nalgebra::DVector<C64>> = Vec::new();
    for k in 0..ns.ncols() {
        let mut v = nalgebra::DVector::<C64>::from_fn(cn, |i, _| C64::new(ns[(i, k)], ns[(i + cn, k)]));
        for b in &basis {
            let p = b.dotc(&v);
            v -= b * p;
        }
        let nv = v.norm();
        if nv > 1e-8 {
            basis.push(v / c(nv));
        }
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m2(a: [[f64; 2]; 2]) -> ComplexMatrix {
        ComplexMatrix::from_fn(2, 2, |i, j| c(a[i][j]))
    }

    #[test]
    fn expm_of_nilpotent_and_diagonal() {
        let n = m2([[0.0, 3.0], [0.0, 0.0]]);
        assert!(approx_eq(&expm(&n), &m2([[1.0, 3.0], [0.0, 1.0]]), 1e-14));
        let d = real_diag(&[1.0, -2.0]);
        let e = expm(&d);
        assert!((e[(0, 0)].re - 1f64.exp()).abs() < 1e-13);
        assert!((e[(1, 1)].re - (-2f64).exp()).abs() < 1e-14);
    }

    #[test]
    fn log_inverts_exp() {
        let a = ComplexMatrix::from_fn(3, 3, |i, j| {
            C64::new(0.1 * (i as f64 - j as f64), 0.05 * (i * j) as f64)
        });
        let back = logm(&expm(&a));
        assert!(max_diff(&back, &a) < 1e-12);
        let big = &a * c(6.0);
        assert!(max_diff(&logm(&expm(&big)), &big) < 1e-10);
    }

    #[test]
    fn berkowitz_matches_two_by_two() {
        let m = m2([[1.0, 2.0], [3.0, 4.0]]);
        let p = char_poly(&m);
        assert!((p[1] - c(-5.0)).norm() < 1e-14);
        assert!((p[2] - c(-2.0)).norm() < 1e-14);
    }

    #[test]
    fn berkowitz_nilpotent() {
        let mut x = zeros(5);
        for i in 0..4 {
            x[(i + 1, i)] = c((i + 1) as f64);
        }
        let p = char_poly(&x);
        assert!(p[1..].iter().all(|z| z.norm() < 1e-14));
    }

    #[test]
    fn nullspace_dimension() {
        let a = DMatrix::<f64>::from_row_slice(2, 3, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
        let ns = real_nullspace(&a, 1e-12);
        assert_eq!(ns.ncols(), 1);
        assert!((ns[(2, 0)].abs() - 1.0).abs() < 1e-14);
        let z = ComplexMatrix::from_fn(1, 2, |_, j| if j == 0 { I } else { c(1.0) });
        assert_eq!(complex_nullspace(&z, 1e-12).len(), 1);
    }
}
