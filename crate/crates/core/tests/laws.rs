//! Distributional cross-checks of the coefficient models against direct
//! Haar sampling, beyond the acceptance criteria: the four real-orthogonal
//! spectral variants at beta = 2 against the determinant-conditioned
//! orthogonal group, the quaternionic families against their defining
//! constructions, the remaining spectral weight laws, and the coupled
//! orthogonal model against the one-size-larger truncation.
//!
//! All tests run at the 0.1% level with fixed seeds.

#![allow(clippy::needless_range_loop)]

use ndarray::Array2;
use num_complex::Complex64;

use cmvsim::cmv::build_cmv;
use cmvsim::ensembles::{
    sample_coe, sample_cse, sample_haar, stream_rng, verblunsky_model, EnsembleSpec, Family,
    HaarGroup, OrthoCase, ReflectionLaw,
};
use cmvsim::linalg;
use cmvsim::spectra::{eig, matrix_spectral_measure, spectral_measure};
use cmvsim::verify::{beta_cdf, ks_one_sample, ks_two_sample};

/// Upper-half-circle angles of the conjugate-pair eigenvalues.
fn pair_angles(values: &[Complex64], out: &mut Vec<f64>) {
    out.extend(values.iter().filter(|z| z.im > 1e-9).map(|z| z.arg()));
}

/// The four spectral variants of the real orthogonal family at beta = 2
/// reproduce the determinant-conditioned Haar orthogonal group
/// (pair-eigenangle two-sample KS). Sizes 4 (even cases) and 5 (odd cases).
#[test]
fn ortho_beta_cases_match_conditioned_haar() {
    let reps = 1500usize;
    let cases = [
        (OrthoCase::EvenPlus, 4usize, 1.0),
        (OrthoCase::EvenMinus, 4, -1.0),
        (OrthoCase::OddPlus, 5, 1.0),
        (OrthoCase::OddMinus, 5, -1.0),
    ];
    for (case, n, det_sign) in cases {
        let mut spec = EnsembleSpec::new(Family::OrthogonalBeta, n)
            .with_beta(2.0)
            .with_ortho_case(case);
        if case == OrthoCase::EvenPlus {
            spec = spec.with_ab(-0.5, -0.5);
        }
        let mut model = Vec::new();
        for rep in 0..reps {
            let mut rng = stream_rng(3000 + n as u64, rep as u64);
            let alphas = verblunsky_model(&spec, &mut rng).unwrap();
            let cloud = eig(build_cmv(&alphas).unwrap().matrix()).unwrap();
            pair_angles(&cloud.values, &mut model);
        }

        // direct side: Haar orthogonal conditioned on the determinant sign
        let mut direct = Vec::new();
        let mut accepted = 0usize;
        let mut job = 0u64;
        while accepted < reps {
            let mut rng = stream_rng(4000 + n as u64, (1 << 32) + job);
            job += 1;
            let o = sample_haar(HaarGroup::Orthogonal, n, &mut rng);
            let det = linalg::det(&o).unwrap().re;
            if det * det_sign < 0.0 {
                continue;
            }
            accepted += 1;
            let cloud = eig(&o).unwrap();
            pair_angles(&cloud.values, &mut direct);
        }

        let report = ks_two_sample(
            &format!("ortho_case_{case:?}_angles"),
            model,
            direct,
            3000 + n as u64,
        )
        .unwrap();
        assert!(
            report.pass,
            "{}: D = {} vs critical {}",
            report.name, report.statistic, report.threshold
        );
    }
}

/// The block coefficient model of the quaternionic circular family matches
/// direct sampling of U^R U (pooled eigenangles; both sides carry doubled
/// eigenvalues so the pooling is like for like).
#[test]
fn cse_model_matches_direct_cse_spectra() {
    let n = 3usize;
    let reps = 1200usize;
    let spec = EnsembleSpec::new(Family::Cse, n);
    let mut model = Vec::with_capacity(reps * 2 * n);
    let mut direct = Vec::with_capacity(reps * 2 * n);
    for rep in 0..reps {
        let mut rng = stream_rng(5001, rep as u64);
        let alphas = verblunsky_model(&spec, &mut rng).unwrap();
        let op = cmvsim::cmv::build_block_cmv(&alphas).unwrap();
        let cloud = eig(op.matrix()).unwrap();
        model.extend(cloud.values.iter().map(|z| z.arg()));

        let mut rng = stream_rng(5001, (1 << 32) + rep as u64);
        let u = sample_cse(n, &mut rng);
        let cloud = eig(&u).unwrap();
        direct.extend(cloud.values.iter().map(|z| z.arg()));
    }
    let report = ks_two_sample("cse_model_vs_direct_angles", model, direct, 5001).unwrap();
    assert!(
        report.pass,
        "D = {} vs critical {}",
        report.statistic, report.threshold
    );
}

/// Eigenweights of the quaternionic circular family: the scalar weight of
/// the doubled node nearest angle zero follows the marginal of the
/// weight law with density proportional to the product of the weights
/// (Beta(2, 2(n-1)) at n = 3). Weights are recovered from the moments
/// <e1, U^m e1> by a Vandermonde solve on the deduplicated node set.
#[test]
fn cse_weight_law_via_moments() {
    let n = 3usize;
    let reps = 1500usize;
    let mut samples = Vec::with_capacity(reps);
    let mut rep = 0u64;
    while samples.len() < reps {
        let mut rng = stream_rng(5002, rep);
        rep += 1;
        let u = sample_cse(n, &mut rng);
        let cloud = eig(&u).unwrap();
        // deduplicate the doubled spectrum into n representatives
        let mut values = cloud.values.clone();
        values.sort_by(|x, y| x.arg().total_cmp(&y.arg()));
        let nodes: Vec<Complex64> = values
            .chunks(2)
            .map(|pair| {
                let mid = (pair[0] + pair[1]) * Complex64::new(0.5, 0.0);
                mid / mid.norm()
            })
            .collect();
        // reject rare near-degenerate draws where the pairing is ambiguous
        let mut min_gap = f64::INFINITY;
        for i in 0..n {
            for j in i + 1..n {
                min_gap = min_gap.min((nodes[i] - nodes[j]).norm());
            }
        }
        if min_gap < 1e-3 {
            continue;
        }
        // scalar moments of the first basis vector
        let dim = 2 * n;
        let mut moments = vec![Complex64::new(1.0, 0.0); n];
        let mut power = linalg::identity(dim);
        for m in 1..n {
            power = power.dot(&u);
            moments[m] = power[[0, 0]];
        }
        let vdm = Array2::from_shape_fn((n, n), |(m, j)| nodes[j].powi(m as i32));
        let mu = linalg::solve(&vdm, &moments).unwrap();
        let mut weights: Vec<f64> = Vec::with_capacity(n);
        let mut ok = true;
        for w in &mu {
            if w.im.abs() > 1e-7 || w.re < -1e-9 {
                ok = false;
            }
            weights.push(w.re.max(0.0));
        }
        if !ok {
            continue;
        }
        // canonical choice: weight of the smallest-angle node in (0, 2 pi)
        let mut best = (f64::INFINITY, 0usize);
        for (j, z) in nodes.iter().enumerate() {
            let mut a = z.arg();
            if a < 0.0 {
                a += std::f64::consts::TAU;
            }
            if a < best.0 {
                best = (a, j);
            }
        }
        samples.push(weights[best.1]);
    }
    let report = ks_one_sample(
        "cse_weight_marginal",
        samples,
        |x| beta_cdf(2.0, 2.0 * (n as f64 - 1.0), x),
        5002,
    )
    .unwrap();
    assert!(
        report.pass,
        "D = {} vs critical {}",
        report.statistic, report.threshold
    );
}

/// Spectral weights of the symmetric circular family (beta = 1): the
/// weight of the smallest-angle node of a COE sample follows
/// Beta(1/2, (n-1)/2).
#[test]
fn coe_spectral_weight_law() {
    let n = 4usize;
    let reps = 2000usize;
    let mut samples = Vec::with_capacity(reps);
    let mut rep = 0u64;
    while samples.len() < reps {
        let mut rng = stream_rng(5003, rep);
        rep += 1;
        let u = sample_coe(n, &mut rng);
        match spectral_measure(&u) {
            Ok(mu) if mu.len() == n => samples.push(mu.weights[0]),
            Ok(_) => continue,
            Err(cmvsim::error::Error::DegenerateSpectrum { .. }) => continue,
            Err(e) => panic!("{e}"),
        }
    }
    let report = ks_one_sample(
        "coe_weight_marginal",
        samples,
        |x| beta_cdf(0.5, (n as f64 - 1.0) / 2.0, x),
        5003,
    )
    .unwrap();
    assert!(
        report.pass,
        "D = {} vs critical {}",
        report.statistic, report.threshold
    );
}

/// Matrix weights of the symplectic group: the (1,1) entry of the weight
/// at the smallest-angle node is a flat-Dirichlet coordinate over the 2n
/// diagonal weight entries, i.e. Beta(1, 2n-1).
#[test]
fn usp_matrix_weight_law() {
    let n = 3usize;
    let reps = 2000usize;
    let mut samples = Vec::with_capacity(reps);
    let mut rep = 0u64;
    while samples.len() < reps {
        let mut rng = stream_rng(5004, rep);
        rep += 1;
        let u = sample_haar(HaarGroup::Symplectic, n, &mut rng);
        match matrix_spectral_measure(&u) {
            Ok(mm) => {
                // nodes are sorted by angle; take the first
                samples.push(mm.weights[0].0[0][0].re);
            }
            Err(cmvsim::error::Error::DegenerateSpectrum { .. }) => continue,
            Err(e) => panic!("{e}"),
        }
    }
    let report = ks_one_sample(
        "usp_matrix_weight_marginal",
        samples,
        |x| beta_cdf(1.0, 2.0 * n as f64 - 1.0, x),
        5004,
    )
    .unwrap();
    assert!(
        report.pass,
        "D = {} vs critical {}",
        report.statistic, report.threshold
    );
}

/// Non-ideal coupling for the real-coefficient family: with the ideal
/// orthogonal reflection law the coupled system of size n matches the
/// truncated system of size n (pooled moduli and real parts).
#[test]
fn coupled_orthogonal_matches_truncated() {
    let n = 4usize;
    let reps = 1500usize;
    let coupled = EnsembleSpec::new(Family::O, n).with_coupling(ReflectionLaw::IdealOrthogonal);
    let truncated = EnsembleSpec::new(Family::O, n).truncated();
    let mut a_mod = Vec::new();
    let mut b_mod = Vec::new();
    let mut a_re = Vec::new();
    let mut b_re = Vec::new();
    for rep in 0..reps {
        let mut rng = stream_rng(5005, rep as u64);
        let alphas = verblunsky_model(&coupled, &mut rng).unwrap();
        let cloud = eig(build_cmv(&alphas).unwrap().matrix()).unwrap();
        a_mod.extend(cloud.values.iter().map(|z| z.norm()));
        a_re.extend(cloud.values.iter().map(|z| z.re));

        let mut rng = stream_rng(5005, (1 << 32) + rep as u64);
        let alphas = verblunsky_model(&truncated, &mut rng).unwrap();
        let cloud = eig(build_cmv(&alphas).unwrap().matrix()).unwrap();
        b_mod.extend(cloud.values.iter().map(|z| z.norm()));
        b_re.extend(cloud.values.iter().map(|z| z.re));
    }
    let r1 = ks_two_sample("coupled_o_moduli", a_mod, b_mod, 5005).unwrap();
    let r2 = ks_two_sample("coupled_o_real_parts", a_re, b_re, 5005).unwrap();
    for r in [r1, r2] {
        assert!(
            r.pass,
            "{}: D = {} vs critical {}",
            r.name, r.statistic, r.threshold
        );
    }
}
