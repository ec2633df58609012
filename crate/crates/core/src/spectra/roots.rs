//! Polynomial roots by the Aberth-Ehrlich simultaneous iteration with a
//! Newton polishing pass, and the root route to CMV spectra through the
//! Szego recurrence.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{cr, ONE, ZERO};
use crate::opuc::{szego_forward, Polynomial, VerblunskyString};

use super::EigenCloud;

const MAX_SWEEPS: usize = 200;
const CORRECTION_TOL: f64 = 1e-13;

/// All roots of the polynomial with ascending coefficients `coeffs`
/// (coeffs[j] multiplies z^j). The leading coefficient must be nonzero.
pub fn poly_roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    if coeffs.is_empty() || coeffs.last().unwrap().norm() == 0.0 {
        return Err(Error::InvalidParameter(
            "polynomial must have a nonzero leading coefficient".to_string(),
        ));
    }
    // Normalize to monic.
    let lead = *coeffs.last().unwrap();
    let mut monic: Vec<Complex64> = coeffs.iter().map(|&c| c / lead).collect();

    // Factor out exact (or underflowed) roots at the origin.
    let mut roots = Vec::new();
    while monic.len() > 1 && monic[0].norm() < 1e-300 {
        roots.push(ZERO);
        monic.remove(0);
    }
    let n = monic.len() - 1;
    if n == 0 {
        return Ok(roots);
    }
    if n == 1 {
        roots.push(-monic[0]);
        return Ok(roots);
    }
    if n == 2 {
        roots.extend(quadratic_roots(monic[0], monic[1]));
        return Ok(roots);
    }

    let p = Polynomial::new(monic.clone());
    let mut z = initial_guesses(&monic, n);
    let mut converged = false;
    for _sweep in 0..MAX_SWEEPS {
        let mut max_corr = 0.0f64;
        for j in 0..n {
            let pv = p.eval(z[j]);
            let dv = p.derivative_eval(z[j]);
            if pv == ZERO {
                continue;
            }
            let w = if dv == ZERO { cr(1e-8) } else { pv / dv };
            let mut s = ZERO;
            for (k, &zk) in z.iter().enumerate() {
                if k != j {
                    let diff = z[j] - zk;
                    if diff == ZERO {
                        continue;
                    }
                    s += ONE / diff;
                }
            }
            let denom = ONE - w * s;
            let corr = if denom == ZERO { w } else { w / denom };
            z[j] -= corr;
            max_corr = max_corr.max(corr.norm() / (1.0 + z[j].norm()));
        }
        if max_corr < CORRECTION_TOL {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NonConvergence {
            iterations: MAX_SWEEPS,
            block: n,
        });
    }
    // Newton polish.
    for zj in z.iter_mut() {
        for _ in 0..2 {
            let dv = p.derivative_eval(*zj);
            if dv == ZERO {
                break;
            }
            *zj -= p.eval(*zj) / dv;
        }
    }
    roots.extend(z);
    Ok(roots)
}

fn quadratic_roots(c0: Complex64, c1: Complex64) -> [Complex64; 2] {
    // z^2 + c1 z + c0, stabilized against cancellation.
    let disc = (c1 * c1 - cr(4.0) * c0).sqrt();
    let q = if (c1 + disc).norm() >= (c1 - disc).norm() {
        -(c1 + disc) * cr(0.5)
    } else {
        -(c1 - disc) * cr(0.5)
    };
    if q == ZERO {
        [ZERO, ZERO]
    } else {
        [q, c0 / q]
    }
}

fn initial_guesses(monic: &[Complex64], n: usize) -> Vec<Complex64> {
    // Geometric-mean radius |c0|^(1/n), kept within the Cauchy bound.
    let cauchy = 1.0 + monic[..n].iter().map(|c| c.norm()).fold(0.0, f64::max);
    let gm = monic[0].norm().powf(1.0 / n as f64);
    let r = gm.clamp(0.05, cauchy);
    (0..n)
        .map(|j| {
            let angle = std::f64::consts::TAU * j as f64 / n as f64 + 0.4;
            Complex64::from_polar(r, angle)
        })
        .collect()
}

/// Eigenvalues of the CMV operator of a scalar string, computed as the zeros
/// of the final Szego polynomial. Falls back to the dense eigensolver when
/// the simultaneous iteration stalls.
pub fn roots_via_szego(alphas: &VerblunskyString) -> Result<EigenCloud> {
    let phis = szego_forward(alphas)?;
    let phi_n = phis.last().unwrap();
    match poly_roots(phi_n.ascending_coeffs()) {
        Ok(mut values) => {
            values.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
            Ok(EigenCloud::new(values))
        }
        Err(Error::NonConvergence { .. }) => {
            let c = crate::cmv::build_cmv(alphas)?;
            super::eig(c.matrix())
        }
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn monomial_shift_roots() {
        // z^4 - a: roots are 4th roots of a
        let a = c(0.3, 0.4);
        let coeffs = vec![-a, ZERO, ZERO, ZERO, ONE];
        let roots = poly_roots(&coeffs).unwrap();
        assert_eq!(roots.len(), 4);
        for r in roots {
            assert!((r.powi(4) - a).norm() < 1e-12);
        }
    }

    #[test]
    fn quadratic_oracle() {
        // z^2 - z/3 - 1/3 (the Szego polynomial of (1/2, 1/3))
        let coeffs = vec![cr(-1.0 / 3.0), cr(-1.0 / 3.0), ONE];
        let roots = poly_roots(&coeffs).unwrap();
        let disc = (1.0f64 / 9.0 + 4.0 / 3.0).sqrt();
        let expect = vec![cr((1.0 / 3.0 + disc) / 2.0), cr((1.0 / 3.0 - disc) / 2.0)];
        assert!(crate::linalg::matching_distance(&roots, &expect).unwrap() < 1e-12);
    }

    #[test]
    fn random_roots_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for n in [3usize, 5, 8, 16] {
            let roots: Vec<Complex64> = (0..n)
                .map(|_| {
                    let r: f64 = rng.gen_range(0.05..0.95);
                    let t: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
                    Complex64::from_polar(r, t)
                })
                .collect();
            let poly = crate::opuc::MonicPolynomial::from_roots(&roots);
            let found = poly_roots(poly.ascending_coeffs()).unwrap();
            let d = crate::linalg::matching_distance(&found, &roots).unwrap();
            assert!(d < 1e-9, "n={n} distance {d}");
        }
    }

    #[test]
    fn zero_roots_are_stripped() {
        // z^3 + z^2 = z^2 (z + 1)
        let coeffs = vec![ZERO, ZERO, ONE, ONE];
        let mut roots = poly_roots(&coeffs).unwrap();
        roots.sort_by(|x, y| x.re.total_cmp(&y.re));
        assert!((roots[0] + ONE).norm() < 1e-14);
        assert!(roots[1].norm() < 1e-14);
        assert!(roots[2].norm() < 1e-14);
    }
}
