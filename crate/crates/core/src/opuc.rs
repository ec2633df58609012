//! Orthogonal polynomials on the unit circle: Szego recurrence, reversed
//! polynomials, the bijection between finitely supported measures and
//! Verblunsky coefficient strings, and a numerical identity suite.

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{cr, Mat2, ONE, ZERO};
use crate::spectra::PointMeasure;

/// Norms below this are treated as underflow: the coefficient extraction is
/// reported as a failure instead of returning garbage.
const NORM_UNDERFLOW: f64 = 1e-250;

/// An ordered string of Verblunsky coefficients.
///
/// Scalar flavors require |alpha_k| < 1 for k <= n-2 and |alpha_{n-1}| <= 1;
/// the matrix flavor requires alpha^dagger alpha <= I (strictly below I for
/// interior coefficients).
#[derive(Clone, Debug, PartialEq)]
pub enum VerblunskyString {
    Scalar(Vec<Complex64>),
    RealScalar(Vec<f64>),
    Matrix2(Vec<Mat2>),
}

impl VerblunskyString {
    pub fn len(&self) -> usize {
        match self {
            VerblunskyString::Scalar(v) => v.len(),
            VerblunskyString::RealScalar(v) => v.len(),
            VerblunskyString::Matrix2(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn flavor(&self) -> &'static str {
        match self {
            VerblunskyString::Scalar(_) => "complex-scalar",
            VerblunskyString::RealScalar(_) => "real-scalar",
            VerblunskyString::Matrix2(_) => "matrix2",
        }
    }

    /// View the string as complex scalars; real strings are promoted, the
    /// matrix flavor yields `None`.
    pub fn as_scalar(&self) -> Option<Vec<Complex64>> {
        match self {
            VerblunskyString::Scalar(v) => Some(v.clone()),
            VerblunskyString::RealScalar(v) => Some(v.iter().map(|&x| cr(x)).collect()),
            VerblunskyString::Matrix2(_) => None,
        }
    }

    pub fn scalar_or_err(&self) -> Result<Vec<Complex64>> {
        self.as_scalar().ok_or_else(|| {
            Error::InvalidParameter(format!(
                "operation requires a scalar coefficient string, got {}",
                self.flavor()
            ))
        })
    }

    /// Check the modulus (resp. contraction) constraints. `slack` loosens the
    /// strict bounds by a rounding allowance.
    pub fn validate(&self) -> Result<()> {
        let n = self.len();
        if n == 0 {
            return Err(Error::InvalidParameter(
                "empty coefficient string".to_string(),
            ));
        }
        match self {
            VerblunskyString::Scalar(_) | VerblunskyString::RealScalar(_) => {
                let v = self.as_scalar().unwrap();
                for (k, alpha) in v.iter().enumerate() {
                    let m = alpha.norm();
                    let bound_ok = if k + 1 < n { m < 1.0 } else { m <= 1.0 + 1e-12 };
                    if !bound_ok || !m.is_finite() {
                        return Err(Error::InvalidCoefficient {
                            index: k,
                            reason: format!("modulus {m} out of range"),
                        });
                    }
                }
            }
            VerblunskyString::Matrix2(v) => {
                for (k, alpha) in v.iter().enumerate() {
                    // largest eigenvalue of alpha^dagger alpha
                    let g = alpha.dagger().mul(alpha);
                    let tr = g.trace().re;
                    let dt = g.det().re;
                    let disc = (tr * tr / 4.0 - dt).max(0.0).sqrt();
                    let lam_max = tr / 2.0 + disc;
                    let bound_ok = if k + 1 < n {
                        lam_max < 1.0
                    } else {
                        lam_max <= 1.0 + 1e-10
                    };
                    if !bound_ok || !lam_max.is_finite() {
                        return Err(Error::InvalidCoefficient {
                            index: k,
                            reason: format!(
                                "largest singular value squared {lam_max} out of range"
                            ),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// rho_k = sqrt(1 - |alpha_k|^2) for scalar strings.
    pub fn rhos(&self) -> Result<Vec<f64>> {
        let v = self.scalar_or_err()?;
        Ok(v.iter()
            .map(|a| (1.0 - a.norm_sqr()).max(0.0).sqrt())
            .collect())
    }
}

/// Dense polynomial with complex coefficients in ascending power order.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    /// coeffs[j] multiplies z^j.
    pub coeffs: Vec<Complex64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        assert!(!coeffs.is_empty());
        Polynomial { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut acc = ZERO;
        for &c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    pub fn derivative_eval(&self, z: Complex64) -> Complex64 {
        let mut acc = ZERO;
        for j in (1..self.coeffs.len()).rev() {
            acc = acc * z + self.coeffs[j] * cr(j as f64);
        }
        acc
    }

    /// Reversed polynomial P*(z) = z^k conj(P(1/conj(z))) at the stated
    /// degree k = len - 1: coefficient j of P* is conj(coefficient k-j of P).
    pub fn reversed(&self) -> Polynomial {
        let k = self.degree();
        Polynomial::new((0..=k).map(|j| self.coeffs[k - j].conj()).collect())
    }
}

/// Monic polynomial z^k + kappa_1 z^{k-1} + ... + kappa_k.
#[derive(Clone, Debug, PartialEq)]
pub struct MonicPolynomial {
    /// Ascending coefficients; the last entry is always 1.
    coeffs: Vec<Complex64>,
}

impl MonicPolynomial {
    pub fn one() -> Self {
        MonicPolynomial { coeffs: vec![ONE] }
    }

    /// Build from kappa_1..kappa_k (the coefficients below the leading term,
    /// highest power first).
    pub fn from_kappas(kappas: &[Complex64]) -> Self {
        let mut coeffs: Vec<Complex64> = kappas.iter().rev().copied().collect();
        coeffs.push(ONE);
        MonicPolynomial { coeffs }
    }

    fn from_ascending(coeffs: Vec<Complex64>) -> Self {
        debug_assert!((coeffs.last().unwrap() - ONE).norm() < 1e-12);
        let mut coeffs = coeffs;
        *coeffs.last_mut().unwrap() = ONE;
        MonicPolynomial { coeffs }
    }

    /// Expand prod_j (z - z_j).
    pub fn from_roots(roots: &[Complex64]) -> Self {
        let mut coeffs = vec![ONE];
        for &r in roots {
            let mut next = vec![ZERO; coeffs.len() + 1];
            for (j, &c) in coeffs.iter().enumerate() {
                next[j + 1] += c;
                next[j] -= r * c;
            }
            coeffs = next;
        }
        MonicPolynomial { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// kappa_1..kappa_k, highest power first.
    pub fn kappas(&self) -> Vec<Complex64> {
        self.coeffs[..self.degree()].iter().rev().copied().collect()
    }

    pub fn ascending_coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut acc = ZERO;
        for &c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    pub fn at_zero(&self) -> Complex64 {
        self.coeffs[0]
    }

    pub fn to_polynomial(&self) -> Polynomial {
        Polynomial::new(self.coeffs.clone())
    }
}

/// Run the Szego recurrence Phi_{k+1}(z) = z Phi_k(z) - conj(alpha_k) Phi_k*(z)
/// and return Phi_0..Phi_n.
pub fn szego_forward(alphas: &VerblunskyString) -> Result<Vec<MonicPolynomial>> {
    let a = alphas.scalar_or_err()?;
    let mut out = Vec::with_capacity(a.len() + 1);
    out.push(MonicPolynomial::one());
    for &alpha in &a {
        let phi = out.last().unwrap();
        let k = phi.degree();
        let mut next = vec![ZERO; k + 2];
        for (j, &c) in phi.coeffs.iter().enumerate() {
            next[j + 1] += c;
        }
        let ac = alpha.conj();
        for j in 0..=k {
            next[j] -= ac * phi.coeffs[k - j].conj();
        }
        out.push(MonicPolynomial::from_ascending(next));
    }
    Ok(out)
}

/// Recover the coefficient string from the final orthogonal polynomials:
/// alpha_k = -conj(Phi_{k+1}(0)).
pub fn alphas_from_polynomials(phis: &[MonicPolynomial]) -> Vec<Complex64> {
    phis.iter()
        .skip(1)
        .map(|phi| -phi.at_zero().conj())
        .collect()
}

/// Squared norms ||Phi_k||^2 = prod_{j<k} (1 - |alpha_j|^2) for k = 0..n.
pub fn opuc_norm_products(alphas: &VerblunskyString) -> Result<Vec<f64>> {
    let a = alphas.scalar_or_err()?;
    let mut out = Vec::with_capacity(a.len() + 1);
    let mut acc = 1.0;
    out.push(acc);
    for alpha in &a {
        acc *= 1.0 - alpha.norm_sqr();
        out.push(acc);
    }
    Ok(out)
}

fn measure_inner(mu: &PointMeasure, f: &Polynomial, g: &Polynomial) -> Complex64 {
    mu.nodes
        .iter()
        .zip(mu.weights.iter())
        .map(|(&z, &w)| cr(w) * f.eval(z).conj() * g.eval(z))
        .sum()
}

/// Orthogonalize the monomials against a finitely supported measure and
/// extract the Verblunsky string. The measure must have distinct unimodular
/// nodes and strictly positive weights summing to one.
///
/// Projections are applied twice (re-orthogonalization) so that small
/// weights do not destroy orthogonality through cancellation.
pub fn verblunsky_from_measure(mu: &PointMeasure) -> Result<VerblunskyString> {
    mu.validate()?;
    let n = mu.nodes.len();
    let mut phis: Vec<Polynomial> = vec![Polynomial::new(vec![ONE])];
    let mut norms: Vec<f64> = vec![1.0];
    let mut alphas = Vec::with_capacity(n);

    for k in 0..n {
        let phi_k = &phis[k];
        // z * Phi_k
        let mut coeffs = vec![ZERO; phi_k.coeffs.len() + 1];
        for (j, &c) in phi_k.coeffs.iter().enumerate() {
            coeffs[j + 1] = c;
        }
        let mut next = Polynomial::new(coeffs);
        for _pass in 0..2 {
            for j in 0..=k {
                let proj = measure_inner(mu, &phis[j], &next) / cr(norms[j]);
                for (c, p) in next.coeffs.iter_mut().zip(phis[j].coeffs.iter()) {
                    *c -= proj * p;
                }
            }
        }
        alphas.push(-next.coeffs[0].conj());
        if k + 1 < n {
            let norm = measure_inner(mu, &next, &next).re;
            if !(norm > NORM_UNDERFLOW) {
                return Err(Error::Numerical(format!(
                    "orthogonal polynomial norm underflow at degree {} (norm^2 = {norm:.3e})",
                    k + 1
                )));
            }
            norms.push(norm);
        }
        phis.push(next);
    }

    // The bijection forces |alpha_{n-1}| = 1; snap away the rounding noise.
    let last = alphas[n - 1];
    let m = last.norm();
    if (m - 1.0).abs() > 1e-6 {
        return Err(Error::Numerical(format!(
            "final coefficient modulus {m} is not 1; measure is numerically degenerate"
        )));
    }
    alphas[n - 1] = last / cr(m);
    let out = VerblunskyString::Scalar(alphas);
    out.validate()?;
    Ok(out)
}

/// One named identity evaluation.
#[derive(Clone, Debug)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub max_rel_err: f64,
}

/// Report of the identity suite; `max_err` aggregates over all checks.
#[derive(Clone, Debug)]
pub struct IdentityReport {
    pub checks: Vec<IdentityCheck>,
}

impl IdentityReport {
    pub fn max_err(&self) -> f64 {
        self.checks
            .iter()
            .map(|c| c.max_rel_err)
            .fold(0.0, f64::max)
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.max_err() < tol
    }
}

fn rel_err(lhs: Complex64, rhs: Complex64) -> f64 {
    (lhs - rhs).norm() / rhs.norm().max(1.0)
}

fn rel_err_f(lhs: f64, rhs: f64) -> f64 {
    (lhs - rhs).abs() / rhs.abs().max(1.0)
}

/// Cauchy determinant identity on arbitrary points of the open disk:
/// det [1/(1 - z_j conj(z_s))] = prod_{j<s} |z_s - z_j|^2 / prod_{j,s} (1 - z_j conj(z_s)).
pub fn cauchy_determinant_error(points: &[Complex64]) -> Result<f64> {
    let k = points.len();
    let m =
        ndarray::Array2::from_shape_fn((k, k), |(j, s)| ONE / (ONE - points[j] * points[s].conj()));
    let lhs = crate::linalg::det(&m)?;
    let mut num = 1.0;
    for j in 0..k {
        for s in j + 1..k {
            num *= (points[s] - points[j]).norm_sqr();
        }
    }
    let mut den = ONE;
    for j in 0..k {
        for s in 0..k {
            den *= ONE - points[j] * points[s].conj();
        }
    }
    Ok(rel_err(lhs, cr(num) / den))
}

/// Evaluate the identity suite on a scalar coefficient string. Random test
/// points for the Christoffel-Darboux and Cauchy identities are drawn from
/// `rng`. Measure-based identities use the spectral measure of the string's
/// CMV operator, extending the string by a unimodular coefficient when the
/// input is subunitary.
pub fn identity_suite(alphas: &VerblunskyString, rng: &mut impl Rng) -> Result<IdentityReport> {
    let a = alphas.scalar_or_err()?;
    alphas.validate()?;
    let n = a.len();
    let phis = szego_forward(alphas)?;
    let mut checks = Vec::new();

    // (i) Phi_k(0) = (-1)^k prod z_j = -conj(alpha_{k-1}), roots computed
    // independently.
    {
        let mut worst = 0.0f64;
        for k in 1..=n {
            let roots = crate::spectra::poly_roots(phis[k].ascending_coeffs())?;
            let prod: Complex64 = roots.iter().product();
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            worst = worst.max(rel_err(cr(sign) * prod, phis[k].at_zero()));
            worst = worst.max(rel_err(-a[k - 1].conj(), phis[k].at_zero()));
        }
        checks.push(IdentityCheck {
            name: "phi_at_zero_product",
            max_rel_err: worst,
        });
    }

    // (i, real case) Phi_k(1) = prod (1 - alpha_j) and
    // Phi_k(-1) = (-1)^k prod (1 + (-1)^j alpha_j); the sign prefactor is
    // forced by Phi_k(-1) = prod(-1 - z_j).
    if a.iter().all(|z| z.im == 0.0) {
        let mut worst = 0.0f64;
        for k in 1..=n {
            let plus: Complex64 = a[..k].iter().map(|al| ONE - al).product();
            let minus: Complex64 = a[..k]
                .iter()
                .enumerate()
                .map(|(j, al)| ONE + cr(if j % 2 == 0 { 1.0 } else { -1.0 }) * al)
                .product();
            let sign = cr(if k % 2 == 0 { 1.0 } else { -1.0 });
            worst = worst.max(rel_err(phis[k].eval(ONE), plus));
            worst = worst.max(rel_err(phis[k].eval(cr(-1.0)), sign * minus));
        }
        checks.push(IdentityCheck {
            name: "phi_at_plus_minus_one",
            max_rel_err: worst,
        });
    }

    // Build a measure: extend by a unimodular coefficient if needed.
    let last_mod = a[n - 1].norm();
    let extended: Vec<Complex64> = if (last_mod - 1.0).abs() < 1e-12 {
        a.clone()
    } else {
        let mut e = a.clone();
        e.push(ONE);
        e
    };
    let ext_string = VerblunskyString::Scalar(extended.clone());
    let cmv = crate::cmv::build_cmv(&ext_string)?;
    let mu = crate::spectra::spectral_measure(cmv.matrix())?;

    // (ii) ||Phi_k||^2 against the discrete Gram norm.
    {
        let mut worst = 0.0f64;
        let prods = opuc_norm_products(alphas)?;
        for (k, phi) in phis.iter().enumerate() {
            if k == n && (last_mod - 1.0).abs() < 1e-12 {
                continue; // norm is zero; both sides vanish
            }
            let p = phi.to_polynomial();
            let gram = measure_inner(&mu, &p, &p).re;
            worst = worst.max(rel_err_f(gram, prods[k]));
        }
        checks.push(IdentityCheck {
            name: "norm_product",
            max_rel_err: worst,
        });
    }

    // (iii) Christoffel-Darboux at random points of the disk, at the largest
    // index whose norm is nonzero.
    {
        let k = if (last_mod - 1.0).abs() < 1e-12 {
            n - 1
        } else {
            n
        };
        let prods = opuc_norm_products(alphas)?;
        let mut worst = 0.0f64;
        if k >= 1 {
            for _ in 0..4 {
                let z = random_disk_point(rng, 0.9);
                let zeta = random_disk_point(rng, 0.9);
                let mut lhs = ZERO;
                for j in 0..k {
                    let nj = cr(prods[j].sqrt());
                    lhs += (phis[j].eval(z) / nj) * (phis[j].eval(zeta) / nj).conj();
                }
                let nk = cr(prods[k].sqrt());
                let starred = phis[k].to_polynomial().reversed();
                let rhs = ((starred.eval(z) / nk) * (starred.eval(zeta) / nk).conj()
                    - (phis[k].eval(z) / nk) * (phis[k].eval(zeta) / nk).conj())
                    / (ONE - z * zeta.conj());
                worst = worst.max(rel_err(lhs, rhs));
            }
        }
        checks.push(IdentityCheck {
            name: "christoffel_darboux",
            max_rel_err: worst,
        });
    }

    // (iv) Cauchy determinant identity at random disk points.
    {
        let k = 3.max(n.min(5));
        let points: Vec<Complex64> = (0..k).map(|_| random_disk_point(rng, 0.85)).collect();
        checks.push(IdentityCheck {
            name: "cauchy_determinant",
            max_rel_err: cauchy_determinant_error(&points)?,
        });
    }

    // (v) prod (1-|alpha_j|^2)^{m-j-1} = |Delta|^2 prod mu_j on the extended
    // (unitary) string.
    {
        let m = extended.len();
        let mut lhs = 1.0;
        for (j, alpha) in extended.iter().take(m - 1).enumerate() {
            lhs *= (1.0 - alpha.norm_sqr()).powi((m - j - 1) as i32);
        }
        let mut rhs = 1.0;
        for j in 0..m {
            for s in j + 1..m {
                rhs *= (mu.nodes[s] - mu.nodes[j]).norm_sqr();
            }
        }
        for w in &mu.weights {
            rhs *= w;
        }
        checks.push(IdentityCheck {
            name: "weight_vandermonde_product",
            max_rel_err: rel_err_f(lhs, rhs),
        });
    }

    // (vi) prod (1-|alpha_j|^2)^{j+1} = prod_{j,s} (1 - z_j conj(z_s)) over
    // the roots of Phi_k, at the largest index with interior roots.
    {
        let k = if (last_mod - 1.0).abs() < 1e-12 {
            n - 1
        } else {
            n
        };
        let mut worst = 0.0f64;
        if k >= 1 {
            let roots = crate::spectra::poly_roots(phis[k].ascending_coeffs())?;
            let mut lhs = 1.0;
            for (j, alpha) in a.iter().take(k).enumerate() {
                lhs *= (1.0 - alpha.norm_sqr()).powi((j + 1) as i32);
            }
            let mut rhs = ONE;
            for zj in &roots {
                for zs in &roots {
                    rhs *= ONE - zj * zs.conj();
                }
            }
            worst = rel_err_f(lhs, rhs.re);
        }
        checks.push(IdentityCheck {
            name: "disk_product",
            max_rel_err: worst,
        });
    }

    Ok(IdentityReport { checks })
}

/// Identity suite driven by a measure: recovers the coefficients first.
pub fn identity_suite_from_measure(
    mu: &PointMeasure,
    rng: &mut impl Rng,
) -> Result<IdentityReport> {
    let alphas = verblunsky_from_measure(mu)?;
    identity_suite(&alphas, rng)
}

fn random_disk_point(rng: &mut impl Rng, radius: f64) -> Complex64 {
    loop {
        let x = rng.gen_range(-radius..radius);
        let y = rng.gen_range(-radius..radius);
        if x * x + y * y < radius * radius {
            return Complex64::new(x, y);
        }
    }
}
