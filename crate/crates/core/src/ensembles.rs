//! Random samplers: the primitive coefficient laws (symmetric beta on
//! [-1,1], the disk law Theta(nu), the 2x2 real-quaternionic law
//! Upsilon(nu)), sphere pushforwards onto weight simplices, direct Haar
//! samplers for the compact groups, and the independent-coefficient CMV
//! models for every supported ensemble.
//!
//! Reproducibility contract: all sampling is driven by `stream_rng(seed,
//! job)`; distinct job indices give statistically independent streams of the
//! same seed.

use ndarray::Array2;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta as BetaDist, Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::cmv;
use crate::error::{Error, Result};
use crate::linalg::{cr, Mat2};
use crate::opuc::VerblunskyString;
use crate::quaternion::SymplecticForm;
use crate::spectra::{self, EigenCloud, Provenance};

/// Independent RNG stream for (seed, job-index). Part of the public API:
/// parallel reps must use distinct job indices.
pub fn stream_rng(seed: u64, job: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(job);
    rng
}

/// Ensemble family tags.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Cue,
    Coe,
    Cse,
    CircularBeta,
    O,
    So,
    OMinusSo,
    OrthogonalBeta,
    #[serde(rename = "usp")]
    USp,
}

impl Family {
    pub fn tag(&self) -> &'static str {
        match self {
            Family::Cue => "cue",
            Family::Coe => "coe",
            Family::Cse => "cse",
            Family::CircularBeta => "circular-beta",
            Family::O => "o",
            Family::So => "so",
            Family::OMinusSo => "o-minus-so",
            Family::OrthogonalBeta => "orthogonal-beta",
            Family::USp => "usp",
        }
    }
}

/// The four spectral-measure variants of the real orthogonal beta family:
/// even/odd matrix size crossed with determinant sign.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrthoCase {
    /// Even size, det = +1; carries the (a, b) weight parameters.
    EvenPlus,
    /// Even size, det = -1.
    EvenMinus,
    /// Odd size, det = +1.
    OddPlus,
    /// Odd size, det = -1.
    OddMinus,
}

/// Law of the reflection coefficient R_a of a non-ideally coupled system.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "law", content = "value")]
pub enum ReflectionLaw {
    /// Deterministic R_a in [0, 1].
    Constant(f64),
    /// Density beta*n*(1-r^2)^{beta n/2 - 1} r dr on (0,1): the law under
    /// which the coupled system of size n is distributed as the ideal
    /// truncation of size n+1 (circular families).
    IdealCircular,
    /// Density prop. to (1-r^2)^{beta n/4 - 1} dr on (0,1): same statement
    /// for the real-coefficient families.
    IdealOrthogonal,
}

/// Coupling description for the last Verblunsky coefficient.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CouplingSpec {
    pub r_law: ReflectionLaw,
}

/// Tagged description of an ensemble, driving both samplers and density
/// evaluators.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub family: Family,
    /// Matrix size of the sampled operator. For truncated specs this is the
    /// size after truncation; for quaternionic families it counts
    /// quaternionic rows (the embedded complex operator is 2n x 2n).
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(default)]
    pub truncated: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coupling: Option<CouplingSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ortho_case: Option<OrthoCase>,
}

impl EnsembleSpec {
    pub fn new(family: Family, n: usize) -> Self {
        EnsembleSpec {
            family,
            n,
            beta: None,
            a: None,
            b: None,
            truncated: false,
            coupling: None,
            ortho_case: None,
        }
    }

    pub fn truncated(mut self) -> Self {
        self.truncated = true;
        self
    }

    pub fn with_beta(mut self, beta: f64) -> Self {
        self.beta = Some(beta);
        self
    }

    pub fn with_ab(mut self, a: f64, b: f64) -> Self {
        self.a = Some(a);
        self.b = Some(b);
        self
    }

    pub fn with_coupling(mut self, r_law: ReflectionLaw) -> Self {
        self.coupling = Some(CouplingSpec { r_law });
        self
    }

    pub fn with_ortho_case(mut self, case: OrthoCase) -> Self {
        self.ortho_case = Some(case);
        self
    }

    /// Dyson index of the family, when one is defined.
    pub fn effective_beta(&self) -> Option<f64> {
        match self.family {
            Family::Cue => Some(2.0),
            Family::Coe => Some(1.0),
            Family::Cse => Some(4.0),
            Family::CircularBeta | Family::OrthogonalBeta => self.beta,
            Family::O | Family::So | Family::OMinusSo => Some(2.0),
            Family::USp => None,
        }
    }

    /// Whether the coefficient string is 2x2 matrix valued.
    pub fn is_block(&self) -> bool {
        matches!(self.family, Family::Cse | Family::USp)
    }

    /// Complex dimension of the sampled operator.
    pub fn operator_dim(&self) -> usize {
        if self.is_block() {
            2 * self.n
        } else {
            self.n
        }
    }

    /// Short tag, e.g. "trunc-cue" or "coupled-usp".
    pub fn tag(&self) -> String {
        if self.truncated {
            format!("trunc-{}", self.family.tag())
        } else if self.coupling.is_some() {
            format!("coupled-{}", self.family.tag())
        } else {
            self.family.tag().to_string()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidParameter("ensemble size must be >= 1".into()));
        }
        if self.truncated && self.coupling.is_some() {
            return Err(Error::UnsupportedSpec(
                "truncated and coupling are mutually exclusive".into(),
            ));
        }
        match self.family {
            Family::Cue | Family::Coe | Family::Cse => {
                let fixed = self.effective_beta().unwrap();
                if let Some(beta) = self.beta {
                    if (beta - fixed).abs() > 1e-12 {
                        return Err(Error::UnsupportedSpec(format!(
                            "{} has beta fixed to {fixed}",
                            self.family.tag()
                        )));
                    }
                }
            }
            Family::CircularBeta | Family::OrthogonalBeta => {
                let beta = self.beta.ok_or_else(|| {
                    Error::InvalidParameter(format!("{} requires beta", self.family.tag()))
                })?;
                if !(beta > 0.0) || !beta.is_finite() {
                    return Err(Error::InvalidParameter(format!(
                        "beta must be > 0, got {beta}"
                    )));
                }
            }
            Family::O | Family::So | Family::OMinusSo | Family::USp => {
                if self.beta.is_some() {
                    return Err(Error::UnsupportedSpec(format!(
                        "{} does not take beta",
                        self.family.tag()
                    )));
                }
            }
        }
        let takes_ab = matches!(self.family, Family::OrthogonalBeta)
            && (self.truncated || self.ortho_case == Some(OrthoCase::EvenPlus));
        if takes_ab {
            let (a, b) = (
                self.a
                    .ok_or_else(|| Error::InvalidParameter("missing a".into()))?,
                self.b
                    .ok_or_else(|| Error::InvalidParameter("missing b".into()))?,
            );
            if !(a > -1.0) || !(b > -1.0) {
                return Err(Error::InvalidParameter(format!(
                    "a and b must exceed -1, got a={a}, b={b}"
                )));
            }
        } else if self.a.is_some() || self.b.is_some() {
            return Err(Error::UnsupportedSpec(
                "a and b apply only to the orthogonal-beta family (truncated, or case even-plus)"
                    .into(),
            ));
        }
        if self.family == Family::OrthogonalBeta && !self.truncated && self.coupling.is_none() {
            let case = self.ortho_case.ok_or_else(|| {
                Error::InvalidParameter("untruncated orthogonal-beta requires an ortho_case".into())
            })?;
            let even = self.n % 2 == 0;
            let needs_even = matches!(case, OrthoCase::EvenPlus | OrthoCase::EvenMinus);
            if even != needs_even {
                return Err(Error::UnsupportedSpec(format!(
                    "ortho case {case:?} needs matrix size of {} parity, got n={}",
                    if needs_even { "even" } else { "odd" },
                    self.n
                )));
            }
        } else if self.ortho_case.is_some() {
            return Err(Error::UnsupportedSpec(
                "ortho_case applies only to the untruncated, uncoupled orthogonal-beta family"
                    .into(),
            ));
        }
        if let Some(cpl) = &self.coupling {
            if let ReflectionLaw::Constant(r) = cpl.r_law {
                if !(0.0..=1.0).contains(&r) {
                    return Err(Error::InvalidParameter(format!(
                        "reflection coefficient must lie in [0,1], got {r}"
                    )));
                }
            }
            if self.n < 2 {
                return Err(Error::UnsupportedSpec("coupled models need n >= 2".into()));
            }
        }
        Ok(())
    }
}

/// Sample from the symmetric beta law on [-1,1] with density
/// (1-x)^{s-1} (1+x)^{t-1} (normalized); B(0,0) is the +-1 coin flip, and a
/// single zero parameter degenerates onto the corresponding endpoint.
pub fn sample_beta_sym(s: f64, t: f64, rng: &mut impl Rng) -> Result<f64> {
    if s < 0.0 || t < 0.0 || !s.is_finite() || !t.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "beta parameters must be nonnegative, got ({s}, {t})"
        )));
    }
    if s == 0.0 && t == 0.0 {
        return Ok(if rng.gen::<bool>() { 1.0 } else { -1.0 });
    }
    if s == 0.0 {
        return Ok(1.0);
    }
    if t == 0.0 {
        return Ok(-1.0);
    }
    let d =
        BetaDist::new(s, t).map_err(|e| Error::InvalidParameter(format!("beta({s},{t}): {e}")))?;
    Ok(1.0 - 2.0 * d.sample(rng))
}

/// Sample from Theta(nu): density (nu-1)/(2 pi) (1-|z|^2)^{(nu-3)/2} on the
/// open disk for nu > 1, uniform on the circle for nu = 1. Radial part:
/// |z|^2 ~ Beta(1, (nu-1)/2), with an independent uniform phase.
pub fn sample_theta(nu: f64, rng: &mut impl Rng) -> Result<Complex64> {
    if !(nu >= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "Theta law needs nu >= 1, got {nu}"
        )));
    }
    let phase: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    if nu == 1.0 {
        return Ok(Complex64::from_polar(1.0, phase));
    }
    let d = BetaDist::new(1.0, (nu - 1.0) / 2.0)
        .map_err(|e| Error::InvalidParameter(format!("theta({nu}): {e}")))?;
    let r2: f64 = d.sample(rng);
    Ok(Complex64::from_polar(r2.sqrt(), phase))
}

/// Sample from Upsilon(nu): a real-quaternionic 2x2 block built from a
/// 4-vector with density prop. to (1-|a|^2)^{(nu-5)/2} on the unit ball for
/// nu > 3; nu = 3 is Haar SU(2) (uniform on the 3-sphere). Radial part:
/// |a|^2 ~ Beta(2, (nu-3)/2), uniform direction.
pub fn sample_upsilon(nu: f64, rng: &mut impl Rng) -> Result<Mat2> {
    if !(nu >= 3.0) {
        return Err(Error::InvalidParameter(format!(
            "Upsilon law needs nu >= 3, got {nu}"
        )));
    }
    let mut dir = [0.0f64; 4];
    loop {
        let mut norm_sqr = 0.0;
        for d in dir.iter_mut() {
            *d = StandardNormal.sample(rng);
            norm_sqr += *d * *d;
        }
        if norm_sqr > 1e-24 {
            let inv = 1.0 / norm_sqr.sqrt();
            for d in dir.iter_mut() {
                *d *= inv;
            }
            break;
        }
    }
    let radius = if nu == 3.0 {
        1.0
    } else {
        let d = BetaDist::new(2.0, (nu - 3.0) / 2.0)
            .map_err(|e| Error::InvalidParameter(format!("upsilon({nu}): {e}")))?;
        d.sample(rng).sqrt()
    };
    let a: Vec<f64> = dir.iter().map(|&x| x * radius).collect();
    Ok(quaternionic_block(a[0], a[1], a[2], a[3]))
}

/// The real-quaternionic block [[a0+a1 i, -a2+a3 i], [a2+a3 i, a0-a1 i]].
pub fn quaternionic_block(a0: f64, a1: f64, a2: f64, a3: f64) -> Mat2 {
    Mat2::new(
        Complex64::new(a0, a1),
        Complex64::new(-a2, a3),
        Complex64::new(a2, a3),
        Complex64::new(a0, -a1),
    )
}

/// The five pushforwards of the uniform sphere measure onto weight
/// simplices: group the squared coordinates of a uniform unit vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SphereLaw {
    /// x in R^n, weights x_j^2 (n weights, Dirichlet(1/2,...,1/2)).
    SquaresReal,
    /// x in R^{2n}, adjacent pairs (n weights, flat Dirichlet).
    PairsComplex,
    /// x in R^{2n}, n-1 pairs then two singles (n+1 weights).
    PairsTwoSingles,
    /// x in R^{2n+1}, n pairs then one single (n+1 weights).
    PairsOneSingle,
    /// x in R^{4n}, groups of four (n weights, density prop. to prod mu_j).
    Quads,
}

/// Sample the weight vector of the given pushforward; `n` is the family
/// parameter (the number of pair groups), not always the output length.
pub fn sample_simplex_pushforward(kind: SphereLaw, n: usize, rng: &mut impl Rng) -> Vec<f64> {
    let (dim, groups): (usize, Vec<usize>) = match kind {
        SphereLaw::SquaresReal => (n, vec![1; n]),
        SphereLaw::PairsComplex => (2 * n, vec![2; n]),
        SphereLaw::PairsTwoSingles => {
            let mut g = vec![2; n - 1];
            g.push(1);
            g.push(1);
            (2 * n, g)
        }
        SphereLaw::PairsOneSingle => {
            let mut g = vec![2; n];
            g.push(1);
            (2 * n + 1, g)
        }
        SphereLaw::Quads => (4 * n, vec![4; n]),
    };
    loop {
        let x: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(rng)).collect();
        let total: f64 = x.iter().map(|v| v * v).sum();
        if total < 1e-24 {
            continue;
        }
        let mut weights = Vec::with_capacity(groups.len());
        let mut idx = 0;
        for &g in &groups {
            let s: f64 = x[idx..idx + g].iter().map(|v| v * v).sum();
            weights.push(s / total);
            idx += g;
        }
        return weights;
    }
}

/// Compact groups with a direct Haar sampler.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HaarGroup {
    Unitary,
    Orthogonal,
    Symplectic,
}

fn gaussian_column(dim: usize, complex: bool, rng: &mut impl Rng) -> Vec<Complex64> {
    (0..dim)
        .map(|_| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = if complex {
                StandardNormal.sample(rng)
            } else {
                0.0
            };
            Complex64::new(re, im)
        })
        .collect()
}

fn project_out(v: &mut [Complex64], basis: &[Vec<Complex64>]) {
    // two passes of modified Gram-Schmidt
    for _ in 0..2 {
        for b in basis {
            let dot: Complex64 = b.iter().zip(v.iter()).map(|(x, y)| x.conj() * y).sum();
            for (vi, bi) in v.iter_mut().zip(b.iter()) {
                *vi -= dot * bi;
            }
        }
    }
}

fn normalize(v: &mut [Complex64]) -> f64 {
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm > 0.0 {
        let inv = cr(1.0 / norm);
        for z in v.iter_mut() {
            *z *= inv;
        }
    }
    norm
}

/// Haar sample from U(n), O(n) or USp(n) (the latter returned as its 2n x 2n
/// complex embedding), by the column-by-column construction: each new column
/// is a Gaussian vector orthogonalized against the previous ones; for the
/// symplectic group the even columns are Z conj(previous column).
pub fn sample_haar(group: HaarGroup, n: usize, rng: &mut impl Rng) -> Array2<Complex64> {
    let (dim, complex) = match group {
        HaarGroup::Unitary => (n, true),
        HaarGroup::Orthogonal => (n, false),
        HaarGroup::Symplectic => (2 * n, true),
    };
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(dim);
    match group {
        HaarGroup::Unitary | HaarGroup::Orthogonal => {
            for _ in 0..dim {
                loop {
                    let mut v = gaussian_column(dim, complex, rng);
                    project_out(&mut v, &cols);
                    if normalize(&mut v) > 1e-8 {
                        cols.push(v);
                        break;
                    }
                }
            }
        }
        HaarGroup::Symplectic => {
            let z = SymplecticForm::new(n);
            for _ in 0..n {
                loop {
                    let mut v = gaussian_column(dim, true, rng);
                    project_out(&mut v, &cols);
                    if normalize(&mut v) > 1e-8 {
                        let partner = z.apply_to_conj(&v);
                        cols.push(v);
                        cols.push(partner);
                        break;
                    }
                }
            }
        }
    }
    Array2::from_shape_fn((dim, dim), |(i, j)| cols[j][i])
}

/// COE sample U^T U from a Haar unitary U.
pub fn sample_coe(n: usize, rng: &mut impl Rng) -> Array2<Complex64> {
    let u = sample_haar(HaarGroup::Unitary, n, rng);
    u.t().to_owned().dot(&u)
}

/// CSE sample U^R U (2n x 2n embedded form) from a Haar unitary U(2n);
/// unitary and self-dual.
pub fn sample_cse(n: usize, rng: &mut impl Rng) -> Array2<Complex64> {
    let u = sample_haar(HaarGroup::Unitary, 2 * n, rng);
    let ur = crate::quaternion::dual(&u).expect("even dimension by construction");
    ur.dot(&u)
}

/// Sample the reflection coefficient under the given law for a coupled
/// system of size n at Dyson index beta.
pub fn sample_reflection(
    law: ReflectionLaw,
    beta: f64,
    n: usize,
    rng: &mut impl Rng,
) -> Result<f64> {
    match law {
        ReflectionLaw::Constant(r) => Ok(r),
        ReflectionLaw::IdealCircular => {
            let d = BetaDist::new(1.0, beta * n as f64 / 2.0)
                .map_err(|e| Error::InvalidParameter(format!("reflection law: {e}")))?;
            Ok(d.sample(rng).sqrt())
        }
        ReflectionLaw::IdealOrthogonal => {
            let d = BetaDist::new(0.5, beta * n as f64 / 4.0)
                .map_err(|e| Error::InvalidParameter(format!("reflection law: {e}")))?;
            Ok(d.sample(rng).sqrt())
        }
    }
}

/// Sign of the forced last coefficient for the special orthogonal strata:
/// -1 for SO(even) and O(odd) \ SO(odd), +1 for SO(odd) and O(even) \ SO(even).
fn forced_orthogonal_sign(family: Family, size: usize) -> Result<f64> {
    let even = size % 2 == 0;
    match family {
        Family::So => Ok(if even { -1.0 } else { 1.0 }),
        Family::OMinusSo => Ok(if even { 1.0 } else { -1.0 }),
        _ => Err(Error::UnsupportedSpec(format!(
            "no forced sign for {}",
            family.tag()
        ))),
    }
}

/// Draw the independent Verblunsky coefficients of the ensemble model
/// matching `spec`.
pub fn verblunsky_model(spec: &EnsembleSpec, rng: &mut impl Rng) -> Result<VerblunskyString> {
    spec.validate()?;
    let n = spec.n;
    match spec.family {
        Family::Cue | Family::Coe | Family::CircularBeta => {
            let beta = spec.effective_beta().unwrap();
            let mut v = Vec::with_capacity(n);
            if spec.truncated {
                for k in 0..n {
                    v.push(sample_theta(beta * (k as f64 + 1.0) + 1.0, rng)?);
                }
            } else if let Some(cpl) = &spec.coupling {
                for k in 0..n - 1 {
                    v.push(sample_theta(beta * (k as f64 + 1.0) + 1.0, rng)?);
                }
                let r = sample_reflection(cpl.r_law, beta, n, rng)?;
                let phase = sample_theta(1.0, rng)?;
                v.push(cr(r) * phase);
            } else {
                for k in 0..n {
                    v.push(sample_theta(beta * (n - 1 - k) as f64 + 1.0, rng)?);
                }
            }
            Ok(VerblunskyString::Scalar(v))
        }
        Family::Cse => {
            let beta = 4.0;
            let mut v = Vec::with_capacity(n);
            if spec.truncated {
                for k in 0..n {
                    v.push(Mat2::scalar(sample_theta(
                        beta * (k as f64 + 1.0) + 1.0,
                        rng,
                    )?));
                }
            } else if let Some(cpl) = &spec.coupling {
                for k in 0..n - 1 {
                    v.push(Mat2::scalar(sample_theta(
                        beta * (k as f64 + 1.0) + 1.0,
                        rng,
                    )?));
                }
                let r = sample_reflection(cpl.r_law, beta, n, rng)?;
                let phase = sample_theta(1.0, rng)?;
                v.push(Mat2::scalar(cr(r) * phase));
            } else {
                for k in 0..n {
                    v.push(Mat2::scalar(sample_theta(
                        beta * (n - 1 - k) as f64 + 1.0,
                        rng,
                    )?));
                }
            }
            Ok(VerblunskyString::Matrix2(v))
        }
        Family::O | Family::So | Family::OMinusSo => {
            let mut v = Vec::with_capacity(n);
            if spec.truncated {
                for k in 0..n {
                    let s = (k as f64 + 1.0) / 2.0;
                    v.push(sample_beta_sym(s, s, rng)?);
                }
            } else if let Some(cpl) = &spec.coupling {
                for k in 0..n - 1 {
                    let s = (k as f64 + 1.0) / 2.0;
                    v.push(sample_beta_sym(s, s, rng)?);
                }
                let r = sample_reflection(cpl.r_law, 2.0, n, rng)?;
                let sigma = match spec.family {
                    Family::O => sample_beta_sym(0.0, 0.0, rng)?,
                    _ => forced_orthogonal_sign(spec.family, n)?,
                };
                v.push(r * sigma);
            } else {
                for k in 0..n - 1 {
                    let s = (n - 1 - k) as f64 / 2.0;
                    v.push(sample_beta_sym(s, s, rng)?);
                }
                let last = match spec.family {
                    Family::O => sample_beta_sym(0.0, 0.0, rng)?,
                    _ => forced_orthogonal_sign(spec.family, n)?,
                };
                v.push(last);
            }
            Ok(VerblunskyString::RealScalar(v))
        }
        Family::OrthogonalBeta => {
            let beta = spec.beta.unwrap();
            let mut v = Vec::with_capacity(n);
            if spec.truncated {
                let (a, b) = (spec.a.unwrap(), spec.b.unwrap());
                for k in 0..n {
                    let kf = k as f64;
                    let x = if k % 2 == 0 {
                        sample_beta_sym(beta * kf / 4.0 + a + 1.0, beta * kf / 4.0 + b + 1.0, rng)?
                    } else {
                        sample_beta_sym(
                            beta * (kf - 1.0) / 4.0 + a + b + 2.0,
                            beta * (kf + 1.0) / 4.0,
                            rng,
                        )?
                    };
                    v.push(x);
                }
            } else if let Some(cpl) = &spec.coupling {
                // a = b = beta/4 - 1 variant of the coupled model
                for k in 0..n - 1 {
                    let s = beta * (k as f64 + 1.0) / 4.0;
                    v.push(sample_beta_sym(s, s, rng)?);
                }
                let r = sample_reflection(cpl.r_law, beta, n, rng)?;
                let sigma = sample_beta_sym(0.0, 0.0, rng)?;
                v.push(r * sigma);
            } else {
                let case = spec.ortho_case.unwrap();
                let nf = n as f64;
                match case {
                    OrthoCase::EvenPlus => {
                        let (a, b) = (spec.a.unwrap(), spec.b.unwrap());
                        for k in 0..n - 1 {
                            let kf = k as f64;
                            let x = if k % 2 == 0 {
                                sample_beta_sym(
                                    (nf - 2.0 - kf) * beta / 4.0 + a + 1.0,
                                    (nf - 2.0 - kf) * beta / 4.0 + b + 1.0,
                                    rng,
                                )?
                            } else {
                                sample_beta_sym(
                                    (nf - 3.0 - kf) * beta / 4.0 + a + b + 2.0,
                                    (nf - 1.0 - kf) * beta / 4.0,
                                    rng,
                                )?
                            };
                            v.push(x);
                        }
                        v.push(-1.0);
                    }
                    OrthoCase::EvenMinus | OrthoCase::OddPlus | OrthoCase::OddMinus => {
                        for k in 0..n - 1 {
                            let s = (nf - 1.0 - k as f64) * beta / 4.0;
                            v.push(sample_beta_sym(s, s, rng)?);
                        }
                        let last = match case {
                            OrthoCase::EvenMinus | OrthoCase::OddPlus => 1.0,
                            _ => -1.0,
                        };
                        v.push(last);
                    }
                }
            }
            Ok(VerblunskyString::RealScalar(v))
        }
        Family::USp => {
            let mut v = Vec::with_capacity(n);
            if spec.truncated {
                for k in 0..n {
                    v.push(sample_upsilon(4.0 * k as f64 + 7.0, rng)?);
                }
            } else if let Some(cpl) = &spec.coupling {
                for k in 0..n - 1 {
                    v.push(sample_upsilon(4.0 * k as f64 + 7.0, rng)?);
                }
                let r = sample_reflection(cpl.r_law, 4.0, n, rng)?;
                let q = sample_upsilon(3.0, rng)?;
                v.push(q.scale(cr(r)));
            } else {
                for k in 0..n {
                    v.push(sample_upsilon(4.0 * (n - 1 - k) as f64 + 3.0, rng)?);
                }
            }
            Ok(VerblunskyString::Matrix2(v))
        }
    }
}

/// Build the model operator of an ensemble from a coefficient string
/// (block CMV for the quaternionic families, scalar CMV otherwise).
pub fn model_operator(spec: &EnsembleSpec, alphas: &VerblunskyString) -> Result<cmv::CmvOperator> {
    if spec.is_block() {
        cmv::build_block_cmv(alphas)
    } else {
        cmv::build_cmv(alphas)
    }
}

/// Sample `reps` independent eigenvalue clouds of the ensemble model.
/// Deterministic in (seed, rep index).
pub fn sample_ensemble_eigs(
    spec: &EnsembleSpec,
    reps: usize,
    seed: u64,
) -> Result<Vec<EigenCloud>> {
    spec.validate()?;
    (0..reps)
        .map(|rep| sample_one_cloud(spec, seed, rep as u64))
        .collect()
}

/// Sample the cloud of a single replica (used for parallel distribution).
pub fn sample_one_cloud(spec: &EnsembleSpec, seed: u64, rep: u64) -> Result<EigenCloud> {
    let mut rng = stream_rng(seed, rep);
    let alphas = verblunsky_model(spec, &mut rng)?;
    let op = model_operator(spec, &alphas)?;
    let cloud = spectra::eig(op.matrix())?;
    Ok(cloud.with_provenance(Provenance {
        ensemble: spec.tag(),
        seed,
        rep,
        n: spec.n,
        beta: spec.effective_beta(),
        a: spec.a,
        b: spec.b,
    }))
}

/// The three ensemble presets behind the `figure` command: truncations of
/// the unitary group (n=301), the orthogonal group (n=301) and the compact
/// symplectic group (n=151, hence 302 complex eigenvalues).
pub fn figure_presets() -> Vec<(&'static str, EnsembleSpec)> {
    vec![
        ("fig1a", EnsembleSpec::new(Family::Cue, 301).truncated()),
        ("fig1b", EnsembleSpec::new(Family::O, 301).truncated()),
        ("fig1c", EnsembleSpec::new(Family::USp, 151).truncated()),
    ]
}
