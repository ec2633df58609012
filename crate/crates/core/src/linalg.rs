//! Dense complex linear algebra support: a fixed-size 2x2 complex matrix,
//! helpers on `ndarray` matrices, and an LU determinant/solver used by the
//! determinant-based characteristic polynomial and the identity suite.

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub const I: Complex64 = Complex64::new(0.0, 1.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn cr(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// A 2x2 complex matrix stored row-major. Used for quaternion embeddings,
/// matrix Verblunsky coefficients and 2x2 spectral weights.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2(pub [[Complex64; 2]; 2]);

impl Mat2 {
    pub fn new(m00: Complex64, m01: Complex64, m10: Complex64, m11: Complex64) -> Self {
        Mat2([[m00, m01], [m10, m11]])
    }

    pub fn zero() -> Self {
        Mat2([[ZERO; 2]; 2])
    }

    pub fn identity() -> Self {
        Mat2::new(ONE, ZERO, ZERO, ONE)
    }

    pub fn scalar(s: Complex64) -> Self {
        Mat2::new(s, ZERO, ZERO, s)
    }

    pub fn dagger(&self) -> Self {
        Mat2::new(
            self.0[0][0].conj(),
            self.0[1][0].conj(),
            self.0[0][1].conj(),
            self.0[1][1].conj(),
        )
    }

    pub fn transpose(&self) -> Self {
        Mat2::new(self.0[0][0], self.0[1][0], self.0[0][1], self.0[1][1])
    }

    pub fn mul(&self, rhs: &Mat2) -> Self {
        let a = &self.0;
        let b = &rhs.0;
        Mat2::new(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }

    pub fn add(&self, rhs: &Mat2) -> Self {
        let mut out = *self;
        for i in 0..2 {
            for j in 0..2 {
                out.0[i][j] += rhs.0[i][j];
            }
        }
        out
    }

    pub fn sub(&self, rhs: &Mat2) -> Self {
        let mut out = *self;
        for i in 0..2 {
            for j in 0..2 {
                out.0[i][j] -= rhs.0[i][j];
            }
        }
        out
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = *self;
        for i in 0..2 {
            for j in 0..2 {
                out.0[i][j] *= s;
            }
        }
        out
    }

    pub fn neg(&self) -> Self {
        self.scale(cr(-1.0))
    }

    pub fn trace(&self) -> Complex64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn det(&self) -> Complex64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn max_abs(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, rhs: &Mat2) -> f64 {
        self.sub(rhs).max_abs()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_abs_diff(&self.dagger()) < tol
    }

    /// Time-reversal dual of a single 2x2 block: J^T M^T J with J = [[0,-1],[1,0]].
    pub fn dual(&self) -> Self {
        Mat2::new(self.0[1][1], -self.0[0][1], -self.0[1][0], self.0[0][0])
    }
}

/// Convert a 2x2 block into a freshly allocated `Array2`.
pub fn mat2_to_array(m: &Mat2) -> Array2<Complex64> {
    Array2::from_shape_fn((2, 2), |(i, j)| m.0[i][j])
}

pub fn identity(n: usize) -> Array2<Complex64> {
    Array2::from_shape_fn((n, n), |(i, j)| if i == j { ONE } else { ZERO })
}

pub fn dagger(a: &Array2<Complex64>) -> Array2<Complex64> {
    a.t().mapv(|z| z.conj())
}

pub fn max_abs(a: &Array2<Complex64>) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_abs_diff(a: &Array2<Complex64>, b: &Array2<Complex64>) -> f64 {
    assert_eq!(a.dim(), b.dim());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn frobenius_norm(a: &Array2<Complex64>) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Residual of the unitarity relation, max-norm of A^dagger A - I.
pub fn unitarity_residual(a: &Array2<Complex64>) -> f64 {
    let n = a.nrows();
    let prod = dagger(a).dot(a);
    max_abs_diff(&prod, &identity(n))
}

pub fn require_square(a: &Array2<Complex64>) -> Result<usize> {
    if a.nrows() != a.ncols() {
        return Err(Error::Dimension(format!(
            "expected square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    Ok(a.nrows())
}

/// Principal minor obtained by removing the first `k` rows and columns.
pub fn drop_leading(a: &Array2<Complex64>, k: usize) -> Result<Array2<Complex64>> {
    let n = require_square(a)?;
    if n < k + 1 {
        return Err(Error::Dimension(format!(
            "cannot remove {k} leading rows/columns from a {n}x{n} matrix"
        )));
    }
    Ok(Array2::from_shape_fn((n - k, n - k), |(i, j)| {
        a[[i + k, j + k]]
    }))
}

/// Determinant via LU with partial pivoting.
pub fn det(a: &Array2<Complex64>) -> Result<Complex64> {
    let n = require_square(a)?;
    let mut lu = a.clone();
    let mut sign = ONE;
    for k in 0..n {
        let mut p = k;
        let mut best = lu[[k, k]].norm();
        for i in k + 1..n {
            let v = lu[[i, k]].norm();
            if v > best {
                best = v;
                p = i;
            }
        }
        if best == 0.0 {
            return Ok(ZERO);
        }
        if p != k {
            for j in 0..n {
                let tmp = lu[[k, j]];
                lu[[k, j]] = lu[[p, j]];
                lu[[p, j]] = tmp;
            }
            sign = -sign;
        }
        let pivot = lu[[k, k]];
        for i in k + 1..n {
            let factor = lu[[i, k]] / pivot;
            lu[[i, k]] = factor;
            for j in k + 1..n {
                let sub = factor * lu[[k, j]];
                lu[[i, j]] -= sub;
            }
        }
    }
    let mut d = sign;
    for k in 0..n {
        d *= lu[[k, k]];
    }
    Ok(d)
}

/// Determinant of a real matrix, through the complex LU.
pub fn det_real(a: &Array2<f64>) -> Result<f64> {
    let ac = a.mapv(|x| Complex64::new(x, 0.0));
    Ok(det(&ac)?.re)
}

/// Solve A x = b by LU with partial pivoting.
pub fn solve(a: &Array2<Complex64>, b: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = require_square(a)?;
    if b.len() != n {
        return Err(Error::Dimension(format!(
            "system of size {n} with right-hand side of length {}",
            b.len()
        )));
    }
    let mut lu = a.clone();
    let mut x = b.to_vec();
    for k in 0..n {
        let mut p = k;
        let mut best = lu[[k, k]].norm();
        for i in k + 1..n {
            let v = lu[[i, k]].norm();
            if v > best {
                best = v;
                p = i;
            }
        }
        if best == 0.0 {
            return Err(Error::Numerical("singular system".to_string()));
        }
        if p != k {
            for j in 0..n {
                let tmp = lu[[k, j]];
                lu[[k, j]] = lu[[p, j]];
                lu[[p, j]] = tmp;
            }
            x.swap(k, p);
        }
        let pivot = lu[[k, k]];
        for i in k + 1..n {
            let factor = lu[[i, k]] / pivot;
            lu[[i, k]] = factor;
            for j in k + 1..n {
                let sub = factor * lu[[k, j]];
                lu[[i, j]] -= sub;
            }
            let sub = factor * x[k];
            x[i] -= sub;
        }
    }
    for i in (0..n).rev() {
        let mut acc = x[i];
        for j in i + 1..n {
            acc -= lu[[i, j]] * x[j];
        }
        x[i] = acc / lu[[i, i]];
    }
    Ok(x)
}

/// Coefficients (ascending) of det(zI - A), computed from determinant
/// evaluations at the (n+1)-st roots of unity followed by an inverse DFT.
/// Interpolation on the unit circle is an isometry, so the coefficients
/// inherit the determinant's accuracy directly.
pub fn char_poly_det(a: &Array2<Complex64>) -> Result<Vec<Complex64>> {
    let n = require_square(a)?;
    let m = n + 1;
    let tau = std::f64::consts::TAU;
    let mut values = Vec::with_capacity(m);
    for j in 0..m {
        let z = Complex64::from_polar(1.0, tau * j as f64 / m as f64);
        let mut shifted = a.mapv(|x| -x);
        for i in 0..n {
            shifted[[i, i]] += z;
        }
        values.push(det(&shifted)?);
    }
    let mut coeffs = Vec::with_capacity(m);
    for k in 0..m {
        let mut acc = ZERO;
        for (j, &v) in values.iter().enumerate() {
            let w = Complex64::from_polar(1.0, -tau * (j * k) as f64 / m as f64);
            acc += v * w;
        }
        coeffs.push(acc / cr(m as f64));
    }
    Ok(coeffs)
}

/// Pair two complex multisets by greedy minimum-distance matching and return
/// the largest matched distance. A local exchange pass repairs the occasional
/// greedy mis-pairing near degenerate values.
pub fn matching_distance(a: &[Complex64], b: &[Complex64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::Dimension(format!(
            "cannot match multisets of sizes {} and {}",
            a.len(),
            b.len()
        )));
    }
    let n = a.len();
    if n == 0 {
        return Ok(0.0);
    }
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            pairs.push(((a[i] - b[j]).norm(), i, j));
        }
    }
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut used_a = vec![false; n];
    let mut used_b = vec![false; n];
    let mut assign = vec![usize::MAX; n];
    let mut remaining = n;
    for &(_, i, j) in &pairs {
        if !used_a[i] && !used_b[j] {
            used_a[i] = true;
            used_b[j] = true;
            assign[i] = j;
            remaining -= 1;
            if remaining == 0 {
                break;
            }
        }
    }
    // 2-exchange improvement on the bottleneck distance.
    let mut improved = true;
    while improved {
        improved = false;
        for i in 0..n {
            for k in i + 1..n {
                let cur = f64::max((a[i] - b[assign[i]]).norm(), (a[k] - b[assign[k]]).norm());
                let swapped = f64::max((a[i] - b[assign[k]]).norm(), (a[k] - b[assign[i]]).norm());
                if swapped < cur {
                    assign.swap(i, k);
                    improved = true;
                }
            }
        }
    }
    Ok((0..n)
        .map(|i| (a[i] - b[assign[i]]).norm())
        .fold(0.0, f64::max))
}
