//! Closed-form (log-)densities for the supported ensembles: truncated
//! circular and truncated real-orthogonal eigenvalue laws, the spectral
//! (eigenvalue + eigenweight) joint laws, the non-ideal coupling variants,
//! the dielectric log-gas energy, and the gamma-function normalization
//! constants.
//!
//! Everything is computed in log space: the normalization constants and the
//! Vandermonde factors overflow doubles near n = 20.

use num_complex::Complex64;
use statrs::function::gamma::ln_gamma;

use crate::ensembles::OrthoCase;
use crate::error::{Error, Result};
use crate::spectra::EigenCloud;

fn ln_gamma_checked(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "gamma evaluated at non-positive argument {x}"
        )));
    }
    Ok(ln_gamma(x))
}

/// log of the Hermitian-paired double product prod_{j,k} (1 - z_j conj(z_k)).
/// The product is real and positive for any configuration; pairing (j,k)
/// with (k,j) avoids choosing branches of individual complex logarithms.
fn ln_double_product(zs: &[Complex64]) -> f64 {
    let mut acc = 0.0;
    for (j, zj) in zs.iter().enumerate() {
        acc += (1.0 - zj.norm_sqr()).ln();
        for zk in zs.iter().skip(j + 1) {
            acc += 2.0 * (Complex64::new(1.0, 0.0) - zj * zk.conj()).norm().ln();
        }
    }
    acc
}

fn ln_vandermonde_abs(zs: &[Complex64]) -> f64 {
    let mut acc = 0.0;
    for (j, zj) in zs.iter().enumerate() {
        for zk in zs.iter().skip(j + 1) {
            acc += (zk - zj).norm().ln();
        }
    }
    acc
}

fn require_open_disk(zs: &[Complex64]) -> Result<()> {
    for z in zs {
        if !(z.norm() < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "configuration point {z} is not in the open unit disk"
            )));
        }
    }
    Ok(())
}

/// Log of the eigenvalue density of the truncated circular family at Dyson
/// index beta (with respect to 2n-dimensional Lebesgue measure on D^n):
///
///   (beta/(2 pi))^n prod_{j,k} (1 - z_j conj(z_k))^{beta/2 - 1}
///                   prod_{j<k} |z_k - z_j|^2.
///
/// Returns -inf on coincident points; the function is permutation
/// invariant.
pub fn log_density_trunc_circular(zs: &[Complex64], beta: f64) -> Result<f64> {
    if zs.is_empty() {
        return Err(Error::InvalidParameter("empty configuration".into()));
    }
    if !(beta > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "beta must be > 0, got {beta}"
        )));
    }
    require_open_disk(zs)?;
    let n = zs.len() as f64;
    for (j, zj) in zs.iter().enumerate() {
        for zk in zs.iter().skip(j + 1) {
            if zj == zk {
                return Ok(f64::NEG_INFINITY);
            }
        }
    }
    Ok(n * (beta / std::f64::consts::TAU).ln()
        + (beta / 2.0 - 1.0) * ln_double_product(zs)
        + 2.0 * ln_vandermonde_abs(zs))
}

/// ln P_n of the truncated real-orthogonal law:
/// P_n = 2^{n(a+b+1) + beta n(n-1)/4}
///       prod_{j=0}^{floor((n-1)/2)} G(a+1+beta j/2) G(b+1+beta j/2)
///                                   / G(a+b+2+beta(floor(n/2)+j)/2)
///       prod_{j=1}^{floor(n/2)} G(beta j / 2).
pub fn ln_p_trunc_orthogonal(n: usize, beta: f64, a: f64, b: f64) -> Result<f64> {
    let nf = n as f64;
    let mut acc = (nf * (a + b + 1.0) + beta * nf * (nf - 1.0) / 4.0) * 2f64.ln();
    let half_up = (n - 1) / 2;
    let half_down = n / 2;
    for j in 0..=half_up {
        let jf = j as f64;
        acc += ln_gamma_checked(a + 1.0 + beta * jf / 2.0)?;
        acc += ln_gamma_checked(b + 1.0 + beta * jf / 2.0)?;
        acc -= ln_gamma_checked(a + b + 2.0 + beta * (half_down as f64 + jf) / 2.0)?;
    }
    for j in 1..=half_down {
        acc += ln_gamma_checked(beta * j as f64 / 2.0)?;
    }
    Ok(acc)
}

/// Log of the eigenvalue density of the truncated real-orthogonal family,
/// with respect to the stratified wedge measure |dz_1 ^ ... ^ dz_n|:
///
///   (1/P_n) prod_{j,k} (1 - z_j conj(z_k))^{beta/4 - 1/2}
///           prod_j (1-z_j)^{a+1/2-beta/4} (1+z_j)^{b+1/2-beta/4}
///           prod_{j<k} |z_k - z_j|.
///
/// The 2^M stratum factor belongs to the reference measure, not to this
/// density (the wedge measure contributes 2 dx dy per conjugate pair).
/// The cloud must be stratified and conjugation closed; boundary values
/// (real points at +-1) are rejected.
pub fn log_density_trunc_orthogonal(cloud: &EigenCloud, beta: f64, a: f64, b: f64) -> Result<f64> {
    if !(beta > 0.0) || !(a > -1.0) || !(b > -1.0) {
        return Err(Error::InvalidParameter(format!(
            "need beta > 0, a > -1, b > -1; got beta={beta}, a={a}, b={b}"
        )));
    }
    let (reals, reps) = cloud.stratified_parts()?;
    let zs = &cloud.values;
    require_open_disk(zs)?;
    for &x in &reals {
        if 1.0 - x <= 0.0 || 1.0 + x <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "real eigenvalue {x} on the boundary"
            )));
        }
    }
    for (j, zj) in zs.iter().enumerate() {
        for zk in zs.iter().skip(j + 1) {
            if zj == zk {
                return Ok(f64::NEG_INFINITY);
            }
        }
    }
    let n = zs.len();
    // prod (1 - z_j) over a conjugation-closed set is positive: reals give
    // (1 - x), pairs give |1 - z|^2.
    let mut ln_one_minus = 0.0;
    let mut ln_one_plus = 0.0;
    for &x in &reals {
        ln_one_minus += (1.0 - x).ln();
        ln_one_plus += (1.0 + x).ln();
    }
    for z in &reps {
        ln_one_minus += 2.0 * (Complex64::new(1.0, 0.0) - z).norm().ln();
        ln_one_plus += 2.0 * (Complex64::new(1.0, 0.0) + z).norm().ln();
    }
    Ok(-ln_p_trunc_orthogonal(n, beta, a, b)?
        + (beta / 4.0 - 0.5) * ln_double_product(zs)
        + (a + 0.5 - beta / 4.0) * ln_one_minus
        + (b + 0.5 - beta / 4.0) * ln_one_plus
        + ln_vandermonde_abs(zs))
}

/// ln Z_{n,beta} = ln Gamma(beta n/2 + 1) - n ln Gamma(beta/2 + 1).
pub fn ln_z_circular(n: usize, beta: f64) -> Result<f64> {
    Ok(ln_gamma_checked(beta * n as f64 / 2.0 + 1.0)?
        - n as f64 * ln_gamma_checked(beta / 2.0 + 1.0)?)
}

/// ln Z'_{n,beta} = n ln Gamma(beta/2) - ln Gamma(beta n/2).
pub fn ln_z_prime_circular(n: usize, beta: f64) -> Result<f64> {
    Ok(n as f64 * ln_gamma_checked(beta / 2.0)? - ln_gamma_checked(beta * n as f64 / 2.0)?)
}

/// Log of the joint eigenvalue/eigenweight law of the circular family:
/// (1/Z_{n,beta}) |Delta(e^{i theta})|^beta prod d theta/(2 pi)
/// x (1/Z'_{n,beta}) prod mu_j^{beta/2 - 1} (on the weight simplex).
pub fn log_density_spectral_circular(thetas: &[f64], weights: &[f64], beta: f64) -> Result<f64> {
    let n = thetas.len();
    if n == 0 || weights.len() != n {
        return Err(Error::Dimension(format!(
            "{} angles vs {} weights",
            n,
            weights.len()
        )));
    }
    if !(beta > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "beta must be > 0, got {beta}"
        )));
    }
    validate_simplex(weights)?;
    let nodes: Vec<Complex64> = thetas
        .iter()
        .map(|&t| Complex64::from_polar(1.0, t))
        .collect();
    let mut acc = -ln_z_circular(n, beta)?
        - n as f64 * std::f64::consts::TAU.ln()
        - ln_z_prime_circular(n, beta)?;
    acc += beta * ln_vandermonde_abs(&nodes);
    for &w in weights {
        acc += (beta / 2.0 - 1.0) * w.ln();
    }
    Ok(acc)
}

fn validate_simplex(weights: &[f64]) -> Result<()> {
    if weights.iter().any(|&w| w <= 0.0) {
        return Err(Error::InvalidParameter(
            "weights must be strictly positive".into(),
        ));
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidParameter(format!(
            "weights sum to {sum}, expected 1"
        )));
    }
    Ok(())
}

/// ln C_n(a,b,beta) of the even/det=+1 spectral law.
pub fn ln_c_ortho(n: usize, beta: f64, a: f64, b: f64) -> Result<f64> {
    let nf = n as f64;
    let mut acc = ln_gamma_checked(nf + 1.0)?; // n!
    acc += (nf * (a + b + 1.0) + beta * nf * (nf - 1.0)) * 2f64.ln();
    for j in 0..n {
        let jf = j as f64;
        acc += ln_gamma_checked(a + 1.0 + beta * jf / 2.0)?;
        acc += ln_gamma_checked(b + 1.0 + beta * jf / 2.0)?;
        acc += ln_gamma_checked(beta * (jf + 1.0) / 2.0)?;
        acc -= ln_gamma_checked(a + b + 2.0 + beta * (nf - 1.0 + jf) / 2.0)?;
        acc -= ln_gamma_checked(beta / 2.0)?;
    }
    Ok(acc)
}

/// ln K_n(beta) = n ln Gamma(beta/2) - ln Gamma(beta n/2).
pub fn ln_k_ortho(n: usize, beta: f64) -> Result<f64> {
    ln_z_prime_circular(n, beta)
}

/// ln L_n(beta) = (n-1) ln G(beta/2) + 2 ln G(beta/4) - ln G(beta n/2).
pub fn ln_l_ortho(n: usize, beta: f64) -> Result<f64> {
    Ok(
        (n as f64 - 1.0) * ln_gamma_checked(beta / 2.0)? + 2.0 * ln_gamma_checked(beta / 4.0)?
            - ln_gamma_checked(beta * n as f64 / 2.0)?,
    )
}

/// ln D_n(beta) = -ln L_n + ln(n!) + (n - 1/2) ln pi
///   - ((2n-1) beta/2 - n) ln 2 + sum_{j=1}^{2n-1} [ln G(beta j/4) - ln G(1/2 + beta j/4)].
pub fn ln_d_ortho(n: usize, beta: f64) -> Result<f64> {
    let nf = n as f64;
    let mut acc = -ln_l_ortho(n, beta)?;
    acc += ln_gamma_checked(nf + 1.0)?;
    acc += (nf - 0.5) * std::f64::consts::PI.ln();
    acc -= ((2.0 * nf - 1.0) * beta / 2.0 - nf) * 2f64.ln();
    for j in 1..=(2 * n - 1) {
        let jf = j as f64;
        acc += ln_gamma_checked(beta * jf / 4.0)?;
        acc -= ln_gamma_checked(0.5 + beta * jf / 4.0)?;
    }
    Ok(acc)
}

/// ln M_n(beta) = n ln G(beta/2) + ln G(beta/4) - ln G(beta(n + 1/2)/2).
pub fn ln_m_ortho(n: usize, beta: f64) -> Result<f64> {
    Ok(
        n as f64 * ln_gamma_checked(beta / 2.0)? + ln_gamma_checked(beta / 4.0)?
            - ln_gamma_checked(beta * (n as f64 + 0.5) / 2.0)?,
    )
}

/// ln E_n(beta) = -ln M_n + ln(n!) + n ln pi - (beta/2 - 1) n ln 2
///   + sum_{j=1}^{2n} [ln G(beta j/4) - ln G(1/2 + beta j/4)].
pub fn ln_e_ortho(n: usize, beta: f64) -> Result<f64> {
    let nf = n as f64;
    let mut acc = -ln_m_ortho(n, beta)?;
    acc += ln_gamma_checked(nf + 1.0)?;
    acc += nf * std::f64::consts::PI.ln();
    acc -= (beta / 2.0 - 1.0) * nf * 2f64.ln();
    for j in 1..=(2 * n) {
        let jf = j as f64;
        acc += ln_gamma_checked(beta * jf / 4.0)?;
        acc -= ln_gamma_checked(0.5 + beta * jf / 4.0)?;
    }
    Ok(acc)
}

/// Angle/weight data of a real-orthogonal spectral measure: `thetas` are the
/// conjugate-pair angles in (0, pi); `weights` is the full weight vector
/// including the point masses at +-1 demanded by the case.
#[derive(Clone, Debug)]
pub struct OrthoSpectralData {
    pub thetas: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Log of the joint spectral law of the real-orthogonal family in the given
/// case. Expected layout: `EvenPlus` n angles / n weights; `EvenMinus` n-1
/// angles / n+1 weights (masses at 1 and -1 last); `OddPlus`/`OddMinus`
/// n angles / n+1 weights (single mass last).
pub fn log_density_spectral_orthogonal(
    data: &OrthoSpectralData,
    case: OrthoCase,
    beta: f64,
    a: f64,
    b: f64,
) -> Result<f64> {
    if !(beta > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "beta must be > 0, got {beta}"
        )));
    }
    let t = data.thetas.len();
    let w = data.weights.len();
    let n = match case {
        OrthoCase::EvenPlus => {
            if w != t {
                return Err(Error::Dimension(format!(
                    "case even-plus expects equal counts, got {t} angles, {w} weights"
                )));
            }
            t
        }
        OrthoCase::EvenMinus => {
            if w != t + 2 {
                return Err(Error::Dimension(format!(
                    "case even-minus expects two extra weights, got {t} angles, {w} weights"
                )));
            }
            t + 1
        }
        OrthoCase::OddPlus | OrthoCase::OddMinus => {
            if w != t + 1 {
                return Err(Error::Dimension(format!(
                    "odd cases expect one extra weight, got {t} angles, {w} weights"
                )));
            }
            t
        }
    };
    for &theta in &data.thetas {
        if !(theta > 0.0 && theta < std::f64::consts::PI) {
            return Err(Error::InvalidParameter(format!(
                "pair angle {theta} outside (0, pi)"
            )));
        }
    }
    validate_simplex(&data.weights)?;

    let cosines: Vec<f64> = data.thetas.iter().map(|&t| 2.0 * t.cos()).collect();
    let mut ln_vdm = 0.0;
    for (j, cj) in cosines.iter().enumerate() {
        for ck in cosines.iter().skip(j + 1) {
            ln_vdm += (ck - cj).abs().ln();
        }
    }

    let mut acc;
    match case {
        OrthoCase::EvenPlus => {
            acc = -ln_c_ortho(n, beta, a, b)? - ln_k_ortho(n, beta)?;
            acc += beta * ln_vdm;
            for &theta in &data.thetas {
                acc += (a + 0.5) * (1.0 - theta.cos()).ln();
                acc += (b + 0.5) * (1.0 + theta.cos()).ln();
            }
            for &mu in &data.weights {
                acc += (beta / 2.0 - 1.0) * mu.ln();
            }
        }
        OrthoCase::EvenMinus => {
            acc = -ln_d_ortho(n, beta)? - ln_l_ortho(n, beta)?;
            acc += beta * ln_vdm;
            for &theta in &data.thetas {
                acc += (0.75 * beta - 0.5) * ((1.0 - theta.cos()).ln() + (1.0 + theta.cos()).ln());
            }
            for &mu in &data.weights[..t] {
                acc += (beta / 2.0 - 1.0) * mu.ln();
            }
            acc += (beta / 4.0 - 1.0) * (data.weights[t].ln() + data.weights[t + 1].ln());
        }
        OrthoCase::OddPlus | OrthoCase::OddMinus => {
            acc = -ln_e_ortho(n, beta)? - ln_m_ortho(n, beta)?;
            acc += beta * ln_vdm;
            let (em, ep) = if case == OrthoCase::OddPlus {
                (0.75 * beta - 0.5, 0.25 * beta - 0.5)
            } else {
                (0.25 * beta - 0.5, 0.75 * beta - 0.5)
            };
            for &theta in &data.thetas {
                acc += em * (1.0 - theta.cos()).ln();
                acc += ep * (1.0 + theta.cos()).ln();
            }
            for &mu in &data.weights[..t] {
                acc += (beta / 2.0 - 1.0) * mu.ln();
            }
            acc += (beta / 4.0 - 1.0) * data.weights[t].ln();
        }
    }
    Ok(acc)
}

/// Log density of the non-ideally coupled circular family, Dyson index
/// beta: the truncated density times F(|prod z_j|).
pub fn log_density_nonideal_circular(
    zs: &[Complex64],
    beta: f64,
    weight_fn: impl Fn(f64) -> f64,
) -> Result<f64> {
    let base = log_density_trunc_circular(zs, beta)?;
    let modulus: f64 = zs.iter().map(|z| z.norm()).product();
    let f = weight_fn(modulus);
    if !f.is_finite() || f < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "weight function returned {f} at {modulus}"
        )));
    }
    Ok(base + f.ln())
}

/// Log density of the non-ideally coupled real-orthogonal family (the
/// a = b = beta/4 - 1 case): truncated orthogonal density times
/// G(|prod z_j|).
pub fn log_density_nonideal_orthogonal(
    cloud: &EigenCloud,
    beta: f64,
    weight_fn: impl Fn(f64) -> f64,
) -> Result<f64> {
    let base = log_density_trunc_orthogonal(cloud, beta, beta / 4.0 - 1.0, beta / 4.0 - 1.0)?;
    let modulus: f64 = cloud.values.iter().map(|z| z.norm()).product();
    let g = weight_fn(modulus);
    if !g.is_finite() || g < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "weight function returned {g} at {modulus}"
        )));
    }
    Ok(base + g.ln())
}

/// Dielectric configuration: permittivity eps1 inside the unit disk, eps2
/// outside, at temperature scale k_B T.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogGasParams {
    pub eps1: f64,
    pub eps2: f64,
    pub k_b_t: f64,
}

impl LogGasParams {
    pub fn new(eps1: f64, eps2: f64, k_b_t: f64) -> Result<Self> {
        if eps1 == 0.0 || eps1 + eps2 == 0.0 || !(k_b_t > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "need eps1 != 0, eps1 + eps2 != 0, k_B T > 0; got ({eps1}, {eps2}, {k_b_t})"
            )));
        }
        Ok(LogGasParams { eps1, eps2, k_b_t })
    }

    /// Parameters realizing the exponents gamma = 1/(2 pi eps1 k_B T) and
    /// alpha = (eps1 - eps2)/(eps1 + eps2).
    pub fn from_exponents(gamma: f64, alpha: f64, k_b_t: f64) -> Result<Self> {
        if !(gamma > 0.0) || alpha == -1.0 {
            return Err(Error::InvalidParameter(format!(
                "need gamma > 0 and alpha != -1; got ({gamma}, {alpha})"
            )));
        }
        let eps1 = 1.0 / (std::f64::consts::TAU * gamma * k_b_t);
        let eps2 = eps1 * (1.0 - alpha) / (1.0 + alpha);
        Self::new(eps1, eps2, k_b_t)
    }

    pub fn alpha(&self) -> f64 {
        (self.eps1 - self.eps2) / (self.eps1 + self.eps2)
    }

    pub fn gamma(&self) -> f64 {
        1.0 / (std::f64::consts::TAU * self.eps1 * self.k_b_t)
    }

    /// Confinement potential of a single charge at z (from the polarization
    /// of the dielectrics).
    pub fn confinement(&self, z: Complex64) -> Result<f64> {
        let r2 = z.norm_sqr();
        if !(r2 < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "charge {z} is not in the open unit disk"
            )));
        }
        Ok(-self.alpha() / (2.0 * std::f64::consts::TAU * self.eps1) * (1.0 - r2).ln())
    }

    /// Interaction potential of a unit charge at z0 felt at z (both inside
    /// the disk).
    pub fn interaction(&self, z: Complex64, z0: Complex64) -> Result<f64> {
        if !(z.norm() < 1.0) || !(z0.norm() < 1.0) {
            return Err(Error::InvalidParameter(
                "interaction defined for charges inside the disk".into(),
            ));
        }
        let d = (z - z0).norm();
        if d == 0.0 {
            return Ok(f64::INFINITY);
        }
        let img = (Complex64::new(1.0, 0.0) - z * z0.conj()).norm();
        Ok(-1.0 / (std::f64::consts::TAU * self.eps1) * (d.ln() + self.alpha() * img.ln()))
    }
}

/// Total electrostatic energy H = sum_j W(z_j) + (1/2) sum_{j != k}
/// V(z_k | z_j) of unit charges at `zs` inside the dielectric disk.
/// Coincident charges give +inf.
pub fn log_gas_energy(zs: &[Complex64], params: &LogGasParams) -> Result<f64> {
    let mut h = 0.0;
    for z in zs {
        h += params.confinement(*z)?;
    }
    for (j, zj) in zs.iter().enumerate() {
        for zk in zs.iter().skip(j + 1) {
            let v = params.interaction(*zk, *zj)?;
            if v.is_infinite() {
                return Ok(f64::INFINITY);
            }
            h += v;
        }
    }
    Ok(h)
}

/// The named normalization constants, all in log form.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalizationTable {
    /// ln Z_{n,beta} (circular eigenvalue factor)
    pub ln_z: f64,
    /// ln Z'_{n,beta} (circular eigenweight factor)
    pub ln_z_prime: f64,
    /// ln C_n(a,b,beta) (even/det + eigenvalue factor)
    pub ln_c: f64,
    /// ln K_n(beta)
    pub ln_k: f64,
    /// ln D_n(beta)
    pub ln_d: f64,
    /// ln L_n(beta)
    pub ln_l: f64,
    /// ln E_n(beta)
    pub ln_e: f64,
    /// ln M_n(beta)
    pub ln_m: f64,
    /// ln P_n(a,b,beta) (truncated orthogonal constant)
    pub ln_p: f64,
}

/// Evaluate every constant at index n (each in its own convention) and
/// parameters (beta, a, b).
pub fn normalization_table(n: usize, beta: f64, a: f64, b: f64) -> Result<NormalizationTable> {
    Ok(NormalizationTable {
        ln_z: ln_z_circular(n, beta)?,
        ln_z_prime: ln_z_prime_circular(n, beta)?,
        ln_c: ln_c_ortho(n, beta, a, b)?,
        ln_k: ln_k_ortho(n, beta)?,
        ln_d: ln_d_ortho(n, beta)?,
        ln_l: ln_l_ortho(n, beta)?,
        ln_e: ln_e_ortho(n, beta)?,
        ln_m: ln_m_ortho(n, beta)?,
        ln_p: ln_p_trunc_orthogonal(n, beta, a, b)?,
    })
}
