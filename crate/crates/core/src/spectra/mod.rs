//! Eigenvalue computation and spectral-measure extraction.
//!
//! The dense eigensolver lives in `eigsolve`; this module wraps it in the
//! domain types (eigenvalue clouds, scalar and 2x2 spectral measures) and
//! adds the polynomial-root route through the Szego recurrence.

mod eigsolve;
mod roots;

pub use eigsolve::{backward_error, eigenpairs, eigenvalues, schur, Schur};
pub use roots::{poly_roots, roots_via_szego};

use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Mat2};

/// Default tolerance for the unitarity pre-check of measure extraction.
pub const UNITARY_TOL: f64 = 1e-8;
/// Minimum eigenvalue gap for the measure-based pipeline.
pub const GAP_TOL: f64 = 1e-9;
/// Weights below this are treated as a failure of cyclicity.
pub const CYCLIC_TOL: f64 = 1e-13;

/// Where a cloud came from: ensemble tag, seed/replica and parameters.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub ensemble: String,
    pub seed: u64,
    pub rep: u64,
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
}

/// A multiset of complex eigenvalues, optionally stratified into L real
/// values and M conjugate pairs.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenCloud {
    pub values: Vec<Complex64>,
    /// (L, M) with L + 2M = values.len(), set by `stratify`.
    pub stratum: Option<(usize, usize)>,
    pub provenance: Option<Provenance>,
}

impl EigenCloud {
    pub fn new(values: Vec<Complex64>) -> Self {
        EigenCloud {
            values,
            stratum: None,
            provenance: None,
        }
    }

    pub fn with_provenance(mut self, p: Provenance) -> Self {
        self.provenance = Some(p);
        self
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Real values and conjugate-pair representatives of a stratified cloud.
    pub fn stratified_parts(&self) -> Result<(Vec<f64>, Vec<Complex64>)> {
        let (l, m) = self
            .stratum
            .ok_or_else(|| Error::InvalidParameter("cloud is not stratified".to_string()))?;
        let reals = self.values[..l].iter().map(|z| z.re).collect();
        let mut reps = Vec::with_capacity(m);
        for k in 0..m {
            reps.push(self.values[l + 2 * k]);
        }
        Ok((reals, reps))
    }
}

/// Finitely supported probability measure on the unit circle.
///
/// Construction snaps nodes onto the circle and normalizes the weight sum
/// after validating that both are within tolerance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointMeasure {
    pub nodes: Vec<Complex64>,
    pub weights: Vec<f64>,
}

impl PointMeasure {
    pub fn new(nodes: Vec<Complex64>, weights: Vec<f64>) -> Result<Self> {
        if nodes.len() != weights.len() || nodes.is_empty() {
            return Err(Error::InvalidMeasure(format!(
                "{} nodes vs {} weights",
                nodes.len(),
                weights.len()
            )));
        }
        for z in &nodes {
            if (z.norm() - 1.0).abs() > 1e-10 {
                return Err(Error::InvalidMeasure(format!(
                    "node {z} is off the unit circle"
                )));
            }
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidMeasure(format!(
                "weights sum to {sum}, expected 1"
            )));
        }
        if weights.iter().any(|&w| w <= 0.0) {
            return Err(Error::InvalidMeasure(
                "weights must be strictly positive".to_string(),
            ));
        }
        let nodes: Vec<Complex64> = nodes.into_iter().map(|z| z / z.norm()).collect();
        for i in 0..nodes.len() {
            for j in i + 1..nodes.len() {
                if (nodes[i] - nodes[j]).norm() < 1e-10 {
                    return Err(Error::InvalidMeasure(format!(
                        "duplicate nodes at {}",
                        nodes[i]
                    )));
                }
            }
        }
        // Canonical order: ascending angle in [0, 2 pi). Ordering by a
        // node-only rule keeps the weight list exchangeable (solver output
        // order correlates with weight size and would bias marginals).
        let mut pairs: Vec<(Complex64, f64)> = nodes
            .into_iter()
            .zip(weights.into_iter().map(|w| w / sum))
            .collect();
        pairs.sort_by(|a, b| angle_key(a.0).total_cmp(&angle_key(b.0)));
        let (nodes, weights) = pairs.into_iter().unzip();
        Ok(PointMeasure { nodes, weights })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        // Reconstruct through the constructor's checks.
        Self::new(self.nodes.clone(), self.weights.clone()).map(|_| ())
    }

    /// m-th moment sum_j mu_j node_j^m.
    pub fn moment(&self, m: i32) -> Complex64 {
        self.nodes
            .iter()
            .zip(self.weights.iter())
            .map(|(&z, &w)| z.powi(m) * linalg::cr(w))
            .sum()
    }

    /// Largest distance between corresponding nodes/weights after optimal
    /// node pairing; used as a measure-space metric in tests.
    pub fn distance(&self, other: &PointMeasure) -> Result<f64> {
        if self.len() != other.len() {
            return Err(Error::Dimension(format!(
                "measures of sizes {} and {}",
                self.len(),
                other.len()
            )));
        }
        // Pair nodes greedily, then compare weights along the pairing.
        let n = self.len();
        let mut used = vec![false; n];
        let mut worst = 0.0f64;
        for i in 0..n {
            let mut best = f64::INFINITY;
            let mut bj = 0;
            for j in 0..n {
                if !used[j] {
                    let d = (self.nodes[i] - other.nodes[j]).norm();
                    if d < best {
                        best = d;
                        bj = j;
                    }
                }
            }
            used[bj] = true;
            worst = worst.max(best);
            worst = worst.max((self.weights[i] - other.weights[bj]).abs());
        }
        Ok(worst)
    }
}

/// Finitely supported 2x2 matrix-valued measure on the unit circle with
/// positive semi-definite weights summing to the identity.
#[derive(Clone, Debug)]
pub struct MatrixMeasure2 {
    pub nodes: Vec<Complex64>,
    pub weights: Vec<Mat2>,
}

impl MatrixMeasure2 {
    pub fn weight_sum(&self) -> Mat2 {
        let mut acc = Mat2::zero();
        for w in &self.weights {
            acc = acc.add(w);
        }
        acc
    }
}

/// Eigenvalue cloud of a general square complex matrix, sorted canonically
/// (by real part, then imaginary part).
pub fn eig(m: &Array2<Complex64>) -> Result<EigenCloud> {
    let mut values = eigenvalues(m)?;
    values.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
    Ok(EigenCloud::new(values))
}

/// Scalar spectral measure of a unitary matrix with respect to the first
/// basis vector: nodes are the eigenvalues carrying nonzero weight, weights
/// the squared overlaps |<e1, v_j>|^2. Eigenvalues orthogonal to e1 (weight
/// below `CYCLIC_TOL`) are outside the support and are dropped; the support
/// has fewer than n points exactly when e1 fails to be cyclic.
pub fn spectral_measure(u: &Array2<Complex64>) -> Result<PointMeasure> {
    let n = linalg::require_square(u)?;
    let residual = linalg::unitarity_residual(u);
    if residual > UNITARY_TOL {
        return Err(Error::NotUnitary {
            residual,
            tol: UNITARY_TOL,
        });
    }
    let (values, vectors) = eigenpairs(u)?;
    check_gaps(&values, GAP_TOL)?;
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for k in 0..n {
        let w = vectors[[0, k]].norm_sqr();
        if w >= CYCLIC_TOL {
            nodes.push(values[k]);
            weights.push(w);
        }
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::Numerical(format!(
            "spectral weights sum to {sum}; eigenbasis lost orthogonality"
        )));
    }
    PointMeasure::new(nodes, weights)
}

/// 2x2 matrix spectral measure of an even-dimensional unitary matrix with
/// respect to the first two basis vectors. Requires a simple spectrum; the
/// weight at each eigenvalue is the rank-one block w w^dagger with
/// w = (v[0], v[1]).
pub fn matrix_spectral_measure(u: &Array2<Complex64>) -> Result<MatrixMeasure2> {
    let n = linalg::require_square(u)?;
    if n % 2 != 0 {
        return Err(Error::Dimension(format!(
            "matrix spectral measure needs even dimension, got {n}"
        )));
    }
    let residual = linalg::unitarity_residual(u);
    if residual > UNITARY_TOL {
        return Err(Error::NotUnitary {
            residual,
            tol: UNITARY_TOL,
        });
    }
    let (values, vectors) = eigenpairs(u)?;
    check_gaps(&values, GAP_TOL)?;
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    let mut sum = Mat2::zero();
    for k in 0..n {
        let w0 = vectors[[0, k]];
        let w1 = vectors[[1, k]];
        let w = Mat2::new(
            w0 * w0.conj(),
            w0 * w1.conj(),
            w1 * w0.conj(),
            w1 * w1.conj(),
        );
        sum = sum.add(&w);
        nodes.push(values[k] / values[k].norm());
        weights.push(w);
    }
    let defect = sum.max_abs_diff(&Mat2::identity());
    if defect > 1e-9 {
        return Err(Error::Numerical(format!(
            "matrix weights sum off identity by {defect:.3e}"
        )));
    }
    // Same canonical node ordering as the scalar measure.
    let mut pairs: Vec<(Complex64, Mat2)> = nodes.into_iter().zip(weights).collect();
    pairs.sort_by(|a, b| angle_key(a.0).total_cmp(&angle_key(b.0)));
    let (nodes, weights) = pairs.into_iter().unzip();
    Ok(MatrixMeasure2 { nodes, weights })
}

fn angle_key(z: Complex64) -> f64 {
    let a = z.arg();
    if a < 0.0 {
        a + std::f64::consts::TAU
    } else {
        a
    }
}

fn check_gaps(values: &[Complex64], tol: f64) -> Result<()> {
    for i in 0..values.len() {
        for j in i + 1..values.len() {
            let gap = (values[i] - values[j]).norm();
            if gap < tol {
                return Err(Error::DegenerateSpectrum { gap, tol });
            }
        }
    }
    Ok(())
}

/// Split a conjugation-closed cloud into L real values (ascending) and M
/// conjugate pairs (representatives with positive imaginary part, ordered by
/// real part). The returned cloud stores [reals..., rep, conj(rep), ...].
pub fn stratify(cloud: &EigenCloud, strat_tol: Option<f64>) -> Result<EigenCloud> {
    let scale = cloud.values.iter().map(|z| z.norm()).fold(1.0f64, f64::max);
    let tol = strat_tol.unwrap_or(1e-8 * scale);

    let mut reals: Vec<f64> = Vec::new();
    let mut pos: Vec<Complex64> = Vec::new();
    let mut neg: Vec<Complex64> = Vec::new();
    for &z in &cloud.values {
        if z.im.abs() < tol {
            reals.push(z.re);
        } else if z.im > 0.0 {
            pos.push(z);
        } else {
            neg.push(z);
        }
    }
    if pos.len() != neg.len() {
        return Err(Error::InvalidParameter(format!(
            "cloud is not conjugation-closed within {tol:.3e}: {} upper vs {} lower values",
            pos.len(),
            neg.len()
        )));
    }
    // Match each upper value to the conjugate of a lower value.
    let mut used = vec![false; neg.len()];
    for &z in &pos {
        let mut best = f64::INFINITY;
        let mut bj = usize::MAX;
        for (j, &w) in neg.iter().enumerate() {
            if !used[j] {
                let d = (w.conj() - z).norm();
                if d < best {
                    best = d;
                    bj = j;
                }
            }
        }
        if bj == usize::MAX || best > 2.0 * tol {
            return Err(Error::InvalidParameter(format!(
                "value {z} has no conjugate partner within {:.3e}",
                2.0 * tol
            )));
        }
        used[bj] = true;
    }
    reals.sort_by(f64::total_cmp);
    pos.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));

    let l = reals.len();
    let m = pos.len();
    let mut values = Vec::with_capacity(cloud.values.len());
    values.extend(reals.iter().map(|&x| Complex64::new(x, 0.0)));
    for z in pos {
        values.push(z);
        values.push(z.conj());
    }
    Ok(EigenCloud {
        values,
        stratum: Some((l, m)),
        provenance: cloud.provenance.clone(),
    })
}

/// Moment-identity defect of a measure against its source matrix:
/// max over m <= mmax of |<e1, U^m e1> - sum mu_j node_j^m|.
pub fn moment_defect(u: &Array2<Complex64>, mu: &PointMeasure, mmax: usize) -> f64 {
    let n = u.nrows();
    let mut worst = 0.0f64;
    let mut power = linalg::identity(n);
    for m in 1..=mmax {
        power = power.dot(u);
        let lhs = power[[0, 0]];
        let rhs = mu.moment(m as i32);
        worst = worst.max((lhs - rhs).norm());
        let _ = m;
    }
    worst
}
