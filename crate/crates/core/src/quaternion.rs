//! Quaternion algebra over the reals or the complexes, the 2x2 complex
//! embedding, and the time-reversal dual of even-dimensional complex
//! matrices.
//!
//! The basis is ordered (1, i, k, j): a quaternion is a + b*i + c*k + d*j
//! with i^2 = j^2 = k^2 = ijk = -1. With this ordering the embedding into
//! 2x2 complex matrices is
//!
//! ```text
//!   a + b i + c k + d j  ->  [ a+ib   -c+id ]
//!                            [ c+id    a-ib ]
//! ```
//!
//! Real-flavor quaternions (a,b,c,d real) land exactly on the matrices with
//! m11 = conj(m00), m10 = -conj(m01); unimodular ones form SU(2).

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, Mat2, ZERO};

/// Default tolerance for the structural predicates below (max norm).
pub const STRUCT_TOL: f64 = 1e-10;

/// A quaternion with complex components. Real-flavor quaternions are the
/// ones whose four components all have zero imaginary part.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quaternion {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl Quaternion {
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Self {
        Quaternion { a, b, c, d }
    }

    /// Real-flavor quaternion from four real components.
    pub fn real(a: f64, b: f64, c: f64, d: f64) -> Self {
        Quaternion {
            a: Complex64::new(a, 0.0),
            b: Complex64::new(b, 0.0),
            c: Complex64::new(c, 0.0),
            d: Complex64::new(d, 0.0),
        }
    }

    pub fn zero() -> Self {
        Quaternion::new(ZERO, ZERO, ZERO, ZERO)
    }

    pub fn one() -> Self {
        Quaternion::real(1.0, 0.0, 0.0, 0.0)
    }

    pub fn is_real_flavor(&self, tol: f64) -> bool {
        self.a.im.abs() < tol
            && self.b.im.abs() < tol
            && self.c.im.abs() < tol
            && self.d.im.abs() < tol
    }

    /// Quaternion conjugate: negates the i, k, j components.
    pub fn conj(&self) -> Self {
        Quaternion::new(self.a, -self.b, -self.c, -self.d)
    }

    /// Hermitian conjugate: conjugates each component and negates i, k, j.
    pub fn dagger(&self) -> Self {
        Quaternion::new(
            self.a.conj(),
            -self.b.conj(),
            -self.c.conj(),
            -self.d.conj(),
        )
    }

    pub fn add(&self, rhs: &Quaternion) -> Self {
        Quaternion::new(
            self.a + rhs.a,
            self.b + rhs.b,
            self.c + rhs.c,
            self.d + rhs.d,
        )
    }

    /// Quaternion product in the (1, i, k, j) basis.
    ///
    /// Multiplication table used: ij = k, jk = i, ki = j (and squares -1).
    pub fn mul(&self, rhs: &Quaternion) -> Self {
        let (a, b, c, d) = (self.a, self.b, self.c, self.d);
        let (e, f, g, h) = (rhs.a, rhs.b, rhs.c, rhs.d);
        Quaternion::new(
            a * e - b * f - c * g - d * h,
            a * f + b * e - c * h + d * g,
            a * g + c * e + b * h - d * f,
            a * h + d * e - b * g + c * f,
        )
    }
}

/// The 2x2 complex embedding of a quaternion.
pub fn complex_embed(q: &Quaternion) -> Mat2 {
    let i = Complex64::new(0.0, 1.0);
    Mat2::new(q.a + i * q.b, -q.c + i * q.d, q.c + i * q.d, q.a - i * q.b)
}

/// Inverse of `complex_embed`. Fails if the matrix cannot be written in the
/// embedded form (it always can: the embedding of complex quaternions is all
/// of C^{2x2}), so this never errors; it solves the 4x4 linear system in
/// closed form.
pub fn complex_unembed(m: &Mat2) -> Quaternion {
    let half = Complex64::new(0.5, 0.0);
    let mi = Complex64::new(0.0, -0.5);
    let (m00, m01, m10, m11) = (m.0[0][0], m.0[0][1], m.0[1][0], m.0[1][1]);
    Quaternion::new(
        half * (m00 + m11),
        mi * (m00 - m11),
        half * (m10 - m01),
        mi * (m10 + m01),
    )
}

/// Blockwise embedding of a quaternion matrix into a 2n x 2n complex matrix.
pub fn embed_matrix(q: &Array2<Quaternion>) -> Array2<Complex64> {
    let (r, c) = q.dim();
    let mut out = Array2::from_elem((2 * r, 2 * c), ZERO);
    for i in 0..r {
        for j in 0..c {
            let block = complex_embed(&q[[i, j]]);
            for bi in 0..2 {
                for bj in 0..2 {
                    out[[2 * i + bi, 2 * j + bj]] = block.0[bi][bj];
                }
            }
        }
    }
    out
}

/// Blockwise inverse of `embed_matrix`.
pub fn unembed_matrix(m: &Array2<Complex64>) -> Result<Array2<Quaternion>> {
    let n = linalg::require_square(m)?;
    if n % 2 != 0 {
        return Err(Error::Dimension(format!(
            "quaternionic unembedding needs even dimension, got {n}"
        )));
    }
    let h = n / 2;
    Ok(Array2::from_shape_fn((h, h), |(i, j)| {
        let block = Mat2::new(
            m[[2 * i, 2 * j]],
            m[[2 * i, 2 * j + 1]],
            m[[2 * i + 1, 2 * j]],
            m[[2 * i + 1, 2 * j + 1]],
        );
        complex_unembed(&block)
    }))
}

/// The symplectic form Z of size 2n x 2n: n diagonal copies of [[0,-1],[1,0]].
/// Z^2 = -I and Z^T = -Z.
#[derive(Clone, Copy, Debug)]
pub struct SymplecticForm {
    pub n: usize,
}

impl SymplecticForm {
    pub fn new(n: usize) -> Self {
        SymplecticForm { n }
    }

    pub fn matrix(&self) -> Array2<Complex64> {
        let dim = 2 * self.n;
        let mut z = Array2::from_elem((dim, dim), ZERO);
        for k in 0..self.n {
            z[[2 * k, 2 * k + 1]] = Complex64::new(-1.0, 0.0);
            z[[2 * k + 1, 2 * k]] = Complex64::new(1.0, 0.0);
        }
        z
    }

    /// Z * conj(v), the companion column used by the symplectic Haar sampler.
    pub fn apply_to_conj(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), 2 * self.n);
        let mut out = vec![ZERO; v.len()];
        for k in 0..self.n {
            out[2 * k] = -v[2 * k + 1].conj();
            out[2 * k + 1] = v[2 * k].conj();
        }
        out
    }
}

/// Time-reversal dual M^R = Z^T M^T Z of an even-dimensional complex matrix.
pub fn dual(m: &Array2<Complex64>) -> Result<Array2<Complex64>> {
    let n = linalg::require_square(m)?;
    if n % 2 != 0 {
        return Err(Error::Dimension(format!(
            "time-reversal dual needs even dimension, got {n}"
        )));
    }
    // Blockwise: (Z^T M^T Z)_{ij} = J^T (M_{ji})^T J with J = [[0,-1],[1,0]],
    // which swaps the block's diagonal and negates its off-diagonal.
    let h = n / 2;
    let mut out = Array2::from_elem((n, n), ZERO);
    for i in 0..h {
        for j in 0..h {
            let (r, c) = (2 * j, 2 * i);
            out[[2 * i, 2 * j]] = m[[r + 1, c + 1]];
            out[[2 * i, 2 * j + 1]] = -m[[r, c + 1]];
            out[[2 * i + 1, 2 * j]] = -m[[r + 1, c]];
            out[[2 * i + 1, 2 * j + 1]] = m[[r, c]];
        }
    }
    Ok(out)
}

/// Whether M^R = M within `tol` in max norm.
pub fn is_self_dual(m: &Array2<Complex64>, tol: f64) -> Result<bool> {
    Ok(linalg::max_abs_diff(&dual(m)?, m) < tol)
}

/// Whether the embedding of a quaternion matrix is unitary within `tol`.
pub fn is_quaternion_unitary(q: &Array2<Quaternion>, tol: f64) -> bool {
    linalg::unitarity_residual(&embed_matrix(q)) < tol
}

/// Whether a complex matrix has the real-quaternionic 2x2 block pattern
/// (m11 = conj(m00), m10 = -conj(m01) within each block) within `tol`.
pub fn is_real_quaternionic_pattern(m: &Array2<Complex64>, tol: f64) -> bool {
    let n = m.nrows();
    if m.ncols() != n || n % 2 != 0 {
        return false;
    }
    for i in (0..n).step_by(2) {
        for j in (0..n).step_by(2) {
            if (m[[i + 1, j + 1]] - m[[i, j]].conj()).norm() > tol
                || (m[[i + 1, j]] + m[[i, j + 1]].conj()).norm() > tol
            {
                return false;
            }
        }
    }
    true
}
