//! Dense complex non-symmetric eigensolver: Householder reduction to upper
//! Hessenberg form followed by an implicitly deflating, single Wilkinson
//! shift QR iteration, with accumulated Schur vectors. Eigenvectors are
//! recovered by back-substitution on the triangular factor.
//!
//! Deflation threshold is 1e-13 times the Frobenius norm of the input;
//! each eigenvalue is allowed 50 iterations, with an exceptional shift every
//! tenth iteration to break symmetry-induced cycles.

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, cr, ONE, ZERO};

const DEFLATION_REL: f64 = 1e-13;
const MAX_ITERS_PER_EIG: usize = 50;

/// Unitary similarity A = Q T Q^dagger with T upper triangular.
pub struct Schur {
    pub t: Array2<Complex64>,
    pub q: Array2<Complex64>,
}

impl Schur {
    pub fn eigenvalues(&self) -> Vec<Complex64> {
        (0..self.t.nrows()).map(|i| self.t[[i, i]]).collect()
    }
}

/// Apply a 2x2 matrix G from the left to rows (r0, r1), columns `cols`.
fn apply_left(
    a: &mut Array2<Complex64>,
    g: &[[Complex64; 2]; 2],
    r0: usize,
    r1: usize,
    cols: std::ops::Range<usize>,
) {
    for j in cols {
        let x = a[[r0, j]];
        let y = a[[r1, j]];
        a[[r0, j]] = g[0][0] * x + g[0][1] * y;
        a[[r1, j]] = g[1][0] * x + g[1][1] * y;
    }
}

/// Apply a 2x2 matrix G from the right to columns (c0, c1), rows `rows`.
fn apply_right(
    a: &mut Array2<Complex64>,
    g: &[[Complex64; 2]; 2],
    c0: usize,
    c1: usize,
    rows: std::ops::Range<usize>,
) {
    for i in rows {
        let x = a[[i, c0]];
        let y = a[[i, c1]];
        a[[i, c0]] = x * g[0][0] + y * g[1][0];
        a[[i, c1]] = x * g[0][1] + y * g[1][1];
    }
}

/// Complex Givens rotation G = [[c, s], [-conj(s), c]] (c real) with
/// G (f, g)^T = (r, 0)^T.
fn givens(f: Complex64, g: Complex64) -> [[Complex64; 2]; 2] {
    if g == ZERO {
        return [[ONE, ZERO], [ZERO, ONE]];
    }
    if f == ZERO {
        let phase = g.conj() / g.norm();
        return [[ZERO, phase], [-phase.conj(), ZERO]];
    }
    let fa = f.norm();
    let d = (fa * fa + g.norm_sqr()).sqrt();
    let c = cr(fa / d);
    let s = (f / fa) * g.conj() / d;
    [[c, s], [-s.conj(), c]]
}

fn dagger2(g: &[[Complex64; 2]; 2]) -> [[Complex64; 2]; 2] {
    [
        [g[0][0].conj(), g[1][0].conj()],
        [g[0][1].conj(), g[1][1].conj()],
    ]
}

/// In-place reduction to upper Hessenberg form, accumulating the unitary
/// transformation into `q`.
fn hessenberg(h: &mut Array2<Complex64>, q: &mut Array2<Complex64>) {
    let n = h.nrows();
    for k in 0..n.saturating_sub(2) {
        // Householder vector for the column below the subdiagonal.
        let m = n - k - 1;
        let mut v: Vec<Complex64> = (0..m).map(|i| h[[k + 1 + i, k]]).collect();
        let xnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if xnorm == 0.0 {
            continue;
        }
        let phase = if v[0] == ZERO {
            ONE
        } else {
            v[0] / v[0].norm()
        };
        v[0] += phase * xnorm;
        let vnorm_sqr: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vnorm_sqr == 0.0 {
            continue;
        }
        let tau = 2.0 / vnorm_sqr;

        // H <- P H with P = I - tau v v^dagger acting on rows k+1..n
        for j in k..n {
            let dot: Complex64 = (0..m).map(|i| v[i].conj() * h[[k + 1 + i, j]]).sum();
            let f = cr(tau) * dot;
            for i in 0..m {
                let sub = f * v[i];
                h[[k + 1 + i, j]] -= sub;
            }
        }
        // H <- H P on columns k+1..n
        for i in 0..n {
            let dot: Complex64 = (0..m).map(|l| h[[i, k + 1 + l]] * v[l]).sum();
            let f = cr(tau) * dot;
            for l in 0..m {
                let sub = f * v[l].conj();
                h[[i, k + 1 + l]] -= sub;
            }
        }
        // Q <- Q P
        for i in 0..n {
            let dot: Complex64 = (0..m).map(|l| q[[i, k + 1 + l]] * v[l]).sum();
            let f = cr(tau) * dot;
            for l in 0..m {
                let sub = f * v[l].conj();
                q[[i, k + 1 + l]] -= sub;
            }
        }
        // Enforce exact zeros below the subdiagonal.
        for i in k + 2..n {
            h[[i, k]] = ZERO;
        }
    }
}

/// Eigenvalues of a 2x2 complex matrix.
fn eig2(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> (Complex64, Complex64) {
    let tr = a + d;
    let det = a * d - b * c;
    let disc = (tr * tr * cr(0.25) - det).sqrt();
    (tr * cr(0.5) + disc, tr * cr(0.5) - disc)
}

/// Wilkinson shift from the trailing 2x2 block: the eigenvalue closer to the
/// bottom-right entry.
fn wilkinson_shift(h: &Array2<Complex64>, hi: usize) -> Complex64 {
    let (a, b, c, d) = (
        h[[hi - 1, hi - 1]],
        h[[hi - 1, hi]],
        h[[hi, hi - 1]],
        h[[hi, hi]],
    );
    let (l1, l2) = eig2(a, b, c, d);
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// One explicit shifted QR sweep on the active block [lo, hi].
fn qr_step(
    h: &mut Array2<Complex64>,
    q: &mut Array2<Complex64>,
    lo: usize,
    hi: usize,
    mu: Complex64,
) {
    let n = h.nrows();
    for i in lo..=hi {
        h[[i, i]] -= mu;
    }
    let mut rots = Vec::with_capacity(hi - lo);
    for i in lo..hi {
        let g = givens(h[[i, i]], h[[i + 1, i]]);
        apply_left(h, &g, i, i + 1, i..n);
        h[[i + 1, i]] = ZERO;
        rots.push(g);
    }
    for (idx, g) in rots.iter().enumerate() {
        let i = lo + idx;
        let gd = dagger2(g);
        apply_right(h, &gd, i, i + 1, 0..(i + 2).min(hi + 1));
        apply_right(q, &gd, i, i + 1, 0..n);
    }
    for i in lo..=hi {
        h[[i, i]] += mu;
    }
}

/// Directly triangularize a converged trailing 2x2 block by rotating one of
/// its eigenvectors onto the first coordinate.
fn settle_2x2(h: &mut Array2<Complex64>, q: &mut Array2<Complex64>, lo: usize) {
    let n = h.nrows();
    let hi = lo + 1;
    let (a, b, c, d) = (h[[lo, lo]], h[[lo, hi]], h[[hi, lo]], h[[hi, hi]]);
    let (l1, l2) = eig2(a, b, c, d);
    // Eigenvector for l1: rows of (A - l1 I) are parallel; choose the larger.
    let (va, vb) = if (a - l1).norm() + b.norm() >= c.norm() + (d - l1).norm() {
        (b, l1 - a)
    } else {
        (d - l1, -c)
    };
    let vn = (va.norm_sqr() + vb.norm_sqr()).sqrt();
    let g = if vn == 0.0 {
        [[ONE, ZERO], [ZERO, ONE]]
    } else {
        // Unitary with first column proportional to the eigenvector.
        let u = va / vn;
        let w = vb / vn;
        [[u, -w.conj()], [w, u.conj()]]
    };
    let gd = dagger2(&g);
    apply_left(h, &gd, lo, hi, lo..n);
    apply_right(h, &g, lo, hi, 0..hi + 1);
    apply_right(q, &g, lo, hi, 0..n);
    h[[hi, lo]] = ZERO;
    // Replace the diagonal by the analytically computed eigenvalues to kill
    // rotation round-off.
    h[[lo, lo]] = l1;
    h[[hi, hi]] = l2;
}

/// Schur decomposition of a general complex square matrix.
pub fn schur(a: &Array2<Complex64>) -> Result<Schur> {
    let n = linalg::require_square(a)?;
    if n == 0 {
        return Err(Error::Dimension("empty matrix".to_string()));
    }
    if a.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::InvalidParameter(
            "matrix contains non-finite entries".to_string(),
        ));
    }
    let mut h = a.clone();
    let mut q = linalg::identity(n);
    if n == 1 {
        return Ok(Schur { t: h, q });
    }
    hessenberg(&mut h, &mut q);

    let hnorm = linalg::frobenius_norm(&h);
    if hnorm == 0.0 {
        return Ok(Schur { t: h, q });
    }
    let thresh = DEFLATION_REL * hnorm;

    let mut hi = n - 1;
    let mut iters_at_hi = 0usize;
    loop {
        for i in 0..hi {
            if h[[i + 1, i]].norm() <= thresh {
                h[[i + 1, i]] = ZERO;
            }
        }
        if hi == 0 {
            break;
        }
        if h[[hi, hi - 1]] == ZERO {
            hi -= 1;
            iters_at_hi = 0;
            continue;
        }
        let mut lo = hi;
        while lo > 0 && h[[lo, lo - 1]] != ZERO {
            lo -= 1;
        }
        if hi - lo == 1 {
            settle_2x2(&mut h, &mut q, lo);
            continue;
        }
        iters_at_hi += 1;
        if iters_at_hi > MAX_ITERS_PER_EIG {
            return Err(Error::NonConvergence {
                iterations: iters_at_hi,
                block: hi - lo + 1,
            });
        }
        let mu = if iters_at_hi % 10 == 0 {
            // Exceptional shift: perturb the corner entry by the stalled
            // subdiagonal magnitude.
            h[[hi, hi]] + cr(0.75 * h[[hi, hi - 1]].norm())
        } else {
            wilkinson_shift(&h, hi)
        };
        qr_step(&mut h, &mut q, lo, hi, mu);
    }

    // Clean the strictly lower triangle.
    for i in 0..n {
        for j in 0..i {
            h[[i, j]] = ZERO;
        }
    }
    Ok(Schur { t: h, q })
}

/// Eigenvalues only.
pub fn eigenvalues(a: &Array2<Complex64>) -> Result<Vec<Complex64>> {
    Ok(schur(a)?.eigenvalues())
}

/// Eigenvalues together with unit right eigenvectors (columns). Intended for
/// matrices with well-separated spectra; near-degenerate directions are
/// regularized by a tiny diagonal floor in the back-substitution.
pub fn eigenpairs(a: &Array2<Complex64>) -> Result<(Vec<Complex64>, Array2<Complex64>)> {
    let s = schur(a)?;
    let n = s.t.nrows();
    let smin = f64::EPSILON * linalg::frobenius_norm(&s.t).max(f64::MIN_POSITIVE);
    let mut vecs = Array2::from_elem((n, n), ZERO);
    for k in 0..n {
        let lambda = s.t[[k, k]];
        let mut y = vec![ZERO; n];
        y[k] = ONE;
        for i in (0..k).rev() {
            let mut acc = ZERO;
            for j in i + 1..=k {
                acc += s.t[[i, j]] * y[j];
            }
            let mut denom = s.t[[i, i]] - lambda;
            if denom.norm() < smin {
                denom = cr(smin);
            }
            y[i] = -acc / denom;
        }
        // v = Q y, normalized.
        let mut norm_sqr = 0.0;
        for i in 0..n {
            let mut acc = ZERO;
            for j in 0..=k {
                acc += s.q[[i, j]] * y[j];
            }
            vecs[[i, k]] = acc;
            norm_sqr += acc.norm_sqr();
        }
        let inv = cr(1.0 / norm_sqr.sqrt());
        for i in 0..n {
            vecs[[i, k]] *= inv;
        }
    }
    Ok((s.eigenvalues(), vecs))
}

/// Largest relative residual ||A v - lambda v|| / ||A||_F over the pairs.
pub fn backward_error(
    a: &Array2<Complex64>,
    values: &[Complex64],
    vectors: &Array2<Complex64>,
) -> f64 {
    let n = a.nrows();
    let anorm = linalg::frobenius_norm(a).max(f64::MIN_POSITIVE);
    let mut worst = 0.0f64;
    for (k, &lambda) in values.iter().enumerate() {
        let mut res = 0.0;
        for i in 0..n {
            let mut acc = ZERO;
            for j in 0..n {
                acc += a[[i, j]] * vectors[[j, k]];
            }
            acc -= lambda * vectors[[i, k]];
            res += acc.norm_sqr();
        }
        worst = worst.max(res.sqrt() / anorm);
    }
    worst
}
