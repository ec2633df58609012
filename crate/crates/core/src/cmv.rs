//! CMV operators: the five-diagonal product C = L M from a scalar
//! coefficient string, the 2x2 block variant, the first-minor truncation and
//! its reversed-coefficient equivalent, the seven-diagonal symmetric form
//! S = N L N^T, and CMV-fication of unitary matrices through their spectral
//! measure.

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, cr, Mat2, ONE, ZERO};
use crate::opuc::VerblunskyString;
use crate::spectra;

/// Structural flavor of a CMV-form operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CmvForm {
    Cmv,
    SymmetricCmv,
    BlockCmv,
}

/// Which symmetric form to build: `S` orthonormalizes
/// {e1, Im(U)e1, Re(U)e1, ...}, `STilde` swaps the roles of Re and Im.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SymmetricVariant {
    S,
    STilde,
}

/// A dense operator in CMV, symmetric-CMV or block-CMV form, together with
/// its band structure metadata.
#[derive(Clone, Debug)]
pub struct CmvOperator {
    matrix: Array2<Complex64>,
    form: CmvForm,
    band_hint: usize,
}

impl CmvOperator {
    pub fn matrix(&self) -> &Array2<Complex64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> Array2<Complex64> {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn form(&self) -> CmvForm {
        self.form
    }

    /// Allowed number of nonzero off-diagonals on each side.
    pub fn band_hint(&self) -> usize {
        self.band_hint
    }

    /// Largest entry outside the declared band.
    pub fn band_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                if i.abs_diff(j) > self.band_hint {
                    worst = worst.max(self.matrix[[i, j]].norm());
                }
            }
        }
        worst
    }

    pub fn unitarity_residual(&self) -> f64 {
        linalg::unitarity_residual(&self.matrix)
    }

    /// Remove the first row and column (first quaternionic row and column,
    /// i.e. two, for the block form).
    pub fn truncated(&self) -> Result<Array2<Complex64>> {
        match self.form {
            CmvForm::BlockCmv => linalg::drop_leading(&self.matrix, 2),
            _ => linalg::drop_leading(&self.matrix, 1),
        }
    }
}

/// First-minor truncation of a scalar-form matrix: removes row and column 1.
pub fn truncate_first(m: &Array2<Complex64>) -> Result<Array2<Complex64>> {
    linalg::drop_leading(m, 1)
}

/// Quaternionic truncation: removes the first two rows and columns.
pub fn truncate_first_block(m: &Array2<Complex64>) -> Result<Array2<Complex64>> {
    linalg::drop_leading(m, 2)
}

fn place_block(target: &mut Array2<Complex64>, row: usize, col: usize, block: &[Vec<Complex64>]) {
    for (i, r) in block.iter().enumerate() {
        for (j, &v) in r.iter().enumerate() {
            target[[row + i, col + j]] = v;
        }
    }
}

fn xi_block(alpha: Complex64) -> [Vec<Complex64>; 2] {
    let rho = cr((1.0 - alpha.norm_sqr()).max(0.0).sqrt());
    [vec![alpha.conj(), rho], vec![rho, -alpha]]
}

/// The two block-diagonal factors L (even-index blocks) and M (odd-index
/// blocks, starting with the 1x1 block [1]).
pub fn cmv_factors(alphas: &VerblunskyString) -> Result<(Array2<Complex64>, Array2<Complex64>)> {
    let a = alphas.scalar_or_err()?;
    alphas.validate()?;
    let n = a.len();
    let mut l = Array2::from_elem((n, n), ZERO);
    let mut m = Array2::from_elem((n, n), ZERO);
    m[[0, 0]] = ONE;
    for (k, &alpha) in a.iter().enumerate() {
        let target = if k % 2 == 0 { &mut l } else { &mut m };
        if k == n - 1 {
            target[[k, k]] = alpha.conj();
        } else {
            let xi = xi_block(alpha);
            place_block(target, k, k, &xi);
        }
    }
    Ok((l, m))
}

/// Build the CMV operator C = L M of a scalar string.
pub fn build_cmv(alphas: &VerblunskyString) -> Result<CmvOperator> {
    let (l, m) = cmv_factors(alphas)?;
    Ok(CmvOperator {
        matrix: l.dot(&m),
        form: CmvForm::Cmv,
        band_hint: 2,
    })
}

/// Principal square root of a 2x2 positive semi-definite Hermitian matrix,
/// in closed form via trace and determinant. Eigenvalues below -1e-12 are
/// rejected; small negative round-off is clamped to zero.
pub fn psd_sqrt2(m: &Mat2) -> Result<Mat2> {
    let herm_defect = m.max_abs_diff(&m.dagger());
    if herm_defect > 1e-9 * m.max_abs().max(1.0) {
        return Err(Error::NotHermitian {
            residual: herm_defect,
        });
    }
    let h = m.add(&m.dagger()).scale(cr(0.5));
    let tr = h.trace().re;
    let det = h.det().re;
    let disc = (tr * tr / 4.0 - det).max(0.0).sqrt();
    let mut lam_plus = tr / 2.0 + disc;
    let mut lam_minus = tr / 2.0 - disc;
    if lam_minus < -1e-12 || lam_plus < -1e-12 {
        return Err(Error::InvalidParameter(format!(
            "matrix is not positive semi-definite (eigenvalues {lam_plus:.3e}, {lam_minus:.3e})"
        )));
    }
    lam_plus = lam_plus.max(0.0);
    lam_minus = lam_minus.max(0.0);
    let s = lam_plus.sqrt() + lam_minus.sqrt();
    if s == 0.0 {
        return Ok(Mat2::zero());
    }
    let t = (lam_plus * lam_minus).sqrt();
    // (H + sqrt(det) I) / (sqrt(l+) + sqrt(l-)) squares to H.
    Ok(h.add(&Mat2::scalar(cr(t))).scale(cr(1.0 / s)))
}

fn xi_block2(alpha: &Mat2) -> Result<[[Mat2; 2]; 2]> {
    let gram = Mat2::identity().sub(&alpha.dagger().mul(alpha));
    let rho = psd_sqrt2(&gram)?;
    Ok([[alpha.dagger(), rho], [rho, alpha.neg()]])
}

fn place_mat2(target: &mut Array2<Complex64>, row: usize, col: usize, m: &Mat2) {
    for i in 0..2 {
        for j in 0..2 {
            target[[row + i, col + j]] = m.0[i][j];
        }
    }
}

/// Build the 2n x 2n block CMV operator of a matrix2 string. The defect
/// operators use rho = (I - alpha^dagger alpha)^{1/2} in both factor
/// positions; every coefficient model here has normal blocks, for which the
/// left/right distinction vanishes.
pub fn build_block_cmv(alphas: &VerblunskyString) -> Result<CmvOperator> {
    let blocks = match alphas {
        VerblunskyString::Matrix2(v) => v.clone(),
        _ => {
            return Err(Error::InvalidParameter(format!(
                "block CMV requires the matrix2 flavor, got {}",
                alphas.flavor()
            )))
        }
    };
    alphas.validate()?;
    let n = blocks.len();
    let dim = 2 * n;
    let mut l = Array2::from_elem((dim, dim), ZERO);
    let mut m = Array2::from_elem((dim, dim), ZERO);
    place_mat2(&mut m, 0, 0, &Mat2::identity());
    for (k, alpha) in blocks.iter().enumerate() {
        let target = if k % 2 == 0 { &mut l } else { &mut m };
        if k == n - 1 {
            place_mat2(target, 2 * k, 2 * k, &alpha.dagger());
        } else {
            let xi = xi_block2(alpha)?;
            for bi in 0..2 {
                for bj in 0..2 {
                    place_mat2(target, 2 * k + 2 * bi, 2 * k + 2 * bj, &xi[bi][bj]);
                }
            }
        }
    }
    Ok(CmvOperator {
        matrix: l.dot(&m),
        form: CmvForm::BlockCmv,
        band_hint: 5,
    })
}

/// Coefficients of the CMV operator equivalent to the first-minor truncation
/// of C(alpha_0..alpha_n) with unimodular alpha_n: the string
/// (-conj(alpha_{n-1}) alpha_n, ..., -conj(alpha_0) alpha_n), together with a
/// flag telling whether the equivalent operator is the transpose (n even).
pub fn reversed_truncation_coeffs(alphas: &VerblunskyString) -> Result<(VerblunskyString, bool)> {
    let a = alphas.scalar_or_err()?;
    alphas.validate()?;
    if a.len() < 2 {
        return Err(Error::Dimension(
            "truncation needs at least two coefficients".to_string(),
        ));
    }
    let last_index = a.len() - 1;
    let last = a[last_index];
    if (last.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidCoefficient {
            index: last_index,
            reason: format!(
                "last coefficient must be unimodular, |alpha| = {}",
                last.norm()
            ),
        });
    }
    let last = last / last.norm();
    let reversed: Vec<Complex64> = (0..last_index).rev().map(|k| -a[k].conj() * last).collect();
    let transposed = last_index % 2 == 0;
    Ok((VerblunskyString::Scalar(reversed), transposed))
}

fn interior_psi(alpha: Complex64, rho: f64, variant: SymmetricVariant) -> Result<Mat2> {
    let i = Complex64::new(0.0, 1.0);
    match variant {
        SymmetricVariant::S => {
            let denom = 2.0 * (1.0 - alpha.re);
            if denom < 1e-14 {
                return Err(Error::Numerical(format!(
                    "symmetric CMV normalizer degenerate at alpha = {alpha}"
                )));
            }
            let f = cr(1.0 / denom.sqrt());
            Ok(Mat2::new(
                f * i * (ONE - alpha.conj()),
                f * (-i) * cr(rho),
                f * cr(rho),
                f * (ONE - alpha),
            ))
        }
        SymmetricVariant::STilde => {
            let denom = 2.0 * (1.0 + alpha.re);
            if denom < 1e-14 {
                return Err(Error::Numerical(format!(
                    "alternative symmetric CMV normalizer degenerate at alpha = {alpha}"
                )));
            }
            let f = cr(1.0 / denom.sqrt());
            Ok(Mat2::new(
                f * (ONE + alpha.conj()),
                f * cr(rho),
                f * i * cr(rho),
                f * (-i) * (ONE + alpha),
            ))
        }
    }
}

/// Square root of conj(alpha) on the branch matching the 1x1 tail of the
/// basis-change factor: argument taken in [0, 2pi) (cut along the positive
/// reals) for the `S` variant, principal branch for `STilde`.
fn tail_psi(alpha: Complex64, variant: SymmetricVariant) -> Complex64 {
    let ac = alpha.conj();
    match variant {
        SymmetricVariant::S => {
            let mut theta = ac.arg();
            if theta < 0.0 {
                theta += std::f64::consts::TAU;
            }
            Complex64::from_polar(ac.norm().sqrt(), theta / 2.0)
        }
        SymmetricVariant::STilde => ac.sqrt(),
    }
}

/// Build the symmetric seven-diagonal form S = N L N^T. The result has the
/// same characteristic polynomial as the plain CMV operator of the string
/// and is unitary exactly when the last coefficient is unimodular.
///
/// Excluded cases (the basis change degenerates): even n with
/// alpha_{n-1} = 1 for `S`, alpha_{n-1} = -1 for `STilde`, and even n with
/// alpha_{n-1} = 0 (the 1x1 tail of N vanishes).
pub fn build_symmetric_cmv(
    alphas: &VerblunskyString,
    variant: SymmetricVariant,
) -> Result<CmvOperator> {
    let a = alphas.scalar_or_err()?;
    alphas.validate()?;
    let n = a.len();
    let last = a[n - 1];
    if n % 2 == 0 {
        match variant {
            SymmetricVariant::S => {
                if (last - ONE).norm() < 1e-12 {
                    return Err(Error::ExcludedCase(
                        "even dimension with alpha_{n-1} = 1 admits no symmetric CMV form"
                            .to_string(),
                    ));
                }
            }
            SymmetricVariant::STilde => {
                if (last + ONE).norm() < 1e-12 {
                    return Err(Error::ExcludedCase(
                        "even dimension with alpha_{n-1} = -1 admits no alternative symmetric CMV form"
                            .to_string(),
                    ));
                }
            }
        }
        if last.norm() < 1e-12 {
            return Err(Error::ExcludedCase(
                "even dimension with alpha_{n-1} = 0: the tail of the basis change vanishes"
                    .to_string(),
            ));
        }
    }

    let rhos = alphas.rhos()?;
    let mut nmat = Array2::from_elem((n, n), ZERO);
    nmat[[0, 0]] = ONE;
    let mut k = 1;
    while k < n {
        if k == n - 1 {
            // only reached when n is even
            nmat[[k, k]] = tail_psi(last, variant);
        } else {
            let psi = interior_psi(a[k], rhos[k], variant)?;
            place_mat2(&mut nmat, k, k, &psi);
        }
        k += 2;
    }

    let (l, _m) = cmv_factors(alphas)?;
    let nt = nmat.t().to_owned();
    let s = nmat.dot(&l).dot(&nt);
    // Enforce exact symmetry; the construction is symmetric up to round-off.
    let sym = Array2::from_shape_fn((n, n), |(i, j)| (s[[i, j]] + s[[j, i]]) * cr(0.5));
    Ok(CmvOperator {
        matrix: sym,
        form: CmvForm::SymmetricCmv,
        band_hint: 3,
    })
}

/// CMV-fication: recover the coefficient string of a unitary matrix with
/// cyclic first basis vector, through its spectral measure. The string's CMV
/// operator has the same spectral measure as the input. Cyclicity is
/// detected by the support size of the spectral measure.
pub fn cmvfy(u: &Array2<Complex64>, tol: f64) -> Result<VerblunskyString> {
    let residual = linalg::unitarity_residual(u);
    if residual > tol {
        return Err(Error::NotUnitary { residual, tol });
    }
    let mu = spectra::spectral_measure(u)?;
    if mu.len() < u.nrows() {
        return Err(Error::NonCyclic(format!(
            "spectral measure has {} support points for dimension {}",
            mu.len(),
            u.nrows()
        )));
    }
    crate::opuc::verblunsky_from_measure(&mu)
}
