#![allow(clippy::type_complexity)]

//! Cross-module invariants: the two eigenvalue routes agree, spectral
//! measures satisfy the moment identity, real-coefficient spectra are
//! conjugation closed, the matrix measure of the symplectic group satisfies
//! the dual-weight pairing, and the closed-form densities normalize and
//! reproduce model moments.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use cmvsim::cmv::{build_block_cmv, build_cmv};
use cmvsim::densities::log_density_trunc_circular;
use cmvsim::ensembles::{
    sample_haar, stream_rng, verblunsky_model, EnsembleSpec, Family, HaarGroup,
};
use cmvsim::linalg::{self, Mat2};
use cmvsim::opuc::VerblunskyString;
use cmvsim::quaternion;
use cmvsim::spectra::{
    eig, matrix_spectral_measure, moment_defect, roots_via_szego, spectral_measure,
};
use cmvsim::verify::{ks_two_sample, ks_two_sample_statistic};

fn random_disk_point(rng: &mut ChaCha8Rng, radius: f64) -> Complex64 {
    loop {
        let x = rng.gen_range(-radius..radius);
        let y = rng.gen_range(-radius..radius);
        if x * x + y * y < radius * radius {
            return Complex64::new(x, y);
        }
    }
}

fn random_string(rng: &mut ChaCha8Rng, n: usize, unitary: bool) -> VerblunskyString {
    let mut v: Vec<Complex64> = (0..n).map(|_| random_disk_point(rng, 0.92)).collect();
    if unitary {
        let t: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        *v.last_mut().unwrap() = Complex64::from_polar(1.0, t);
    }
    VerblunskyString::Scalar(v)
}

#[test]
fn eig_and_szego_roots_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(91);
    for n in [4usize, 8, 16, 32] {
        let reps = if n == 32 { 30 } else { 100 };
        for rep in 0..reps {
            let s = random_string(&mut rng, n, rep % 2 == 0);
            let via_matrix = eig(build_cmv(&s).unwrap().matrix()).unwrap().values;
            let via_roots = roots_via_szego(&s).unwrap().values;
            let d = linalg::matching_distance(&via_matrix, &via_roots).unwrap();
            assert!(d < 1e-7, "n={n}: matching distance {d}");
        }
    }
}

#[test]
fn spectral_measure_moment_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(92);
    for n in [3usize, 5, 8] {
        for _ in 0..20 {
            let s = random_string(&mut rng, n, true);
            let c = build_cmv(&s).unwrap();
            let mu = spectral_measure(c.matrix()).unwrap();
            let defect = moment_defect(c.matrix(), &mu, 2 * n);
            assert!(defect < 1e-8, "n={n}: moment defect {defect}");
        }
    }
}

#[test]
fn real_strings_give_conjugation_closed_spectra() {
    let mut rng = ChaCha8Rng::seed_from_u64(93);
    for n in [3usize, 6, 9] {
        for _ in 0..20 {
            let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-0.9..0.9)).collect();
            let cloud = eig(build_cmv(&VerblunskyString::RealScalar(v))
                .unwrap()
                .matrix())
            .unwrap();
            let conj: Vec<Complex64> = cloud.values.iter().map(|z| z.conj()).collect();
            let d = linalg::matching_distance(&cloud.values, &conj).unwrap();
            assert!(d < 1e-10, "n={n}: conjugation defect {d}");
        }
    }
}

#[test]
fn unitary_and_subunitary_spectra_stay_in_range() {
    let mut rng = ChaCha8Rng::seed_from_u64(94);
    for n in [4usize, 7] {
        for unitary in [true, false] {
            let s = random_string(&mut rng, n, unitary);
            let cloud = eig(build_cmv(&s).unwrap().matrix()).unwrap();
            for z in &cloud.values {
                if unitary {
                    assert!((z.norm() - 1.0).abs() < 1e-9);
                } else {
                    assert!(z.norm() <= 1.0 + 1e-9);
                }
            }
        }
    }
}

#[test]
fn usp_matrix_measure_weight_pairing() {
    // Weights of the symplectic matrix measure sum to the identity and the
    // weight at e^{-i theta} is the time-reversal dual of the weight at
    // e^{i theta}.
    for seed in 0..10u64 {
        let mut rng = stream_rng(95, seed);
        let u = sample_haar(HaarGroup::Symplectic, 3, &mut rng);
        let mm = matrix_spectral_measure(&u).unwrap();
        assert!(mm.weight_sum().max_abs_diff(&Mat2::identity()) < 1e-9);
        let n = mm.nodes.len();
        for i in 0..n {
            if mm.nodes[i].im <= 0.0 {
                continue;
            }
            // find the conjugate node
            let mut found = false;
            for j in 0..n {
                if (mm.nodes[j] - mm.nodes[i].conj()).norm() < 1e-9 {
                    let dual = mm.weights[i].dual();
                    assert!(
                        mm.weights[j].max_abs_diff(&dual) < 1e-8,
                        "dual pairing defect {}",
                        mm.weights[j].max_abs_diff(&dual)
                    );
                    found = true;
                }
            }
            assert!(found, "node {} lacks a conjugate partner", mm.nodes[i]);
        }
    }
}

#[test]
fn usp_block_model_matches_haar_eigenangles() {
    // Untruncated symplectic coefficient model vs direct Haar sampling:
    // pooled eigenangles restricted to the upper half circle.
    let n = 3usize;
    let reps = 800usize;
    let mut model = Vec::with_capacity(reps * n);
    let mut direct = Vec::with_capacity(reps * n);
    for rep in 0..reps {
        let mut rng = stream_rng(96, rep as u64);
        let spec = EnsembleSpec::new(Family::USp, n);
        let alphas = verblunsky_model(&spec, &mut rng).unwrap();
        let cloud = eig(build_block_cmv(&alphas).unwrap().matrix()).unwrap();
        model.extend(cloud.values.iter().filter(|z| z.im > 0.0).map(|z| z.arg()));

        let mut rng = stream_rng(96, (1 << 32) + rep as u64);
        let u = sample_haar(HaarGroup::Symplectic, n, &mut rng);
        let cloud = eig(&u).unwrap();
        direct.extend(cloud.values.iter().filter(|z| z.im > 0.0).map(|z| z.arg()));
    }
    let report = ks_two_sample("usp_model_vs_haar_angles", model, direct, 96).unwrap();
    assert!(
        report.pass,
        "D = {} vs critical {}",
        report.statistic, report.threshold
    );
}

#[test]
fn haar_usp_is_quaternion_unitary() {
    let mut rng = stream_rng(90, 0);
    for _ in 0..5 {
        let m = sample_haar(HaarGroup::Symplectic, 3, &mut rng);
        let q = quaternion::unembed_matrix(&m).unwrap();
        assert!(quaternion::is_quaternion_unitary(
            &q,
            quaternion::STRUCT_TOL
        ));
        // every entry is a real-flavor quaternion
        for qij in q.iter() {
            assert!(qij.is_real_flavor(1e-12));
        }
    }
}

#[test]
fn cse_model_is_self_dual_quaternionic_object() {
    // The CSE sample U^R U is unitary self-dual; its 2x2 spectral measure
    // has doubled nodes, so the scalar route is bypassed and the doubling
    // is validated spectrally (acceptance criterion 12 does the matching).
    let mut rng = stream_rng(97, 0);
    let m = cmvsim::ensembles::sample_cse(3, &mut rng);
    assert!(linalg::unitarity_residual(&m) < 1e-11);
    assert!(quaternion::is_self_dual(&m, 1e-10).unwrap());
    // eigenvalues come in doubled pairs on the circle
    let cloud = eig(&m).unwrap();
    let mut values = cloud.values.clone();
    values.sort_by(|x, y| x.arg().total_cmp(&y.arg()));
    for pair in values.chunks(2) {
        assert!((pair[0] - pair[1]).norm() < 1e-8, "doubling defect");
    }
}

/// Model moments against density-weighted quadrature at n = 1: the
/// truncated circular law integrates to one, and three test functions agree
/// between model sampling and deterministic polar quadrature.
#[test]
fn density_quadrature_matches_model_n1() {
    for beta in [2.0f64, 4.0] {
        // deterministic polar-grid quadrature of g * f over the disk
        let quad = |g: &dyn Fn(Complex64) -> f64| -> f64 {
            let (nr, nt) = (800usize, 800usize);
            let mut acc = 0.0;
            for i in 0..nr {
                let r = (i as f64 + 0.5) / nr as f64;
                for j in 0..nt {
                    let t = std::f64::consts::TAU * (j as f64 + 0.5) / nt as f64;
                    let z = Complex64::from_polar(r, t);
                    let f = log_density_trunc_circular(&[z], beta).unwrap().exp();
                    acc += g(z) * f * r;
                }
            }
            acc * std::f64::consts::TAU / (nr * nt) as f64
        };
        let total = quad(&|_| 1.0);
        assert!(
            (total - 1.0).abs() < 1e-3,
            "normalization {total} at beta={beta}"
        );

        let spec = EnsembleSpec::new(Family::CircularBeta, 1)
            .with_beta(beta)
            .truncated();
        let samples: Vec<Complex64> = (0..20_000u64)
            .map(|rep| {
                let mut rng = stream_rng(98, rep);
                let v = verblunsky_model(&spec, &mut rng)
                    .unwrap()
                    .as_scalar()
                    .unwrap();
                v[0].conj()
            })
            .collect();
        let tests: [(&str, Box<dyn Fn(Complex64) -> f64>); 3] = [
            ("abs2", Box::new(|z: Complex64| z.norm_sqr())),
            ("re", Box::new(|z: Complex64| z.re)),
            ("abs4", Box::new(|z: Complex64| z.norm_sqr() * z.norm_sqr())),
        ];
        for (name, g) in &tests {
            let expect = quad(g.as_ref());
            let vals: Vec<f64> = samples.iter().map(|&z| g(z)).collect();
            let n = vals.len() as f64;
            let mean = vals.iter().sum::<f64>() / n;
            let var = vals.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
            let se = (var / n).sqrt();
            let dev = (mean - expect).abs();
            assert!(
                dev < 3.0 * se + 1e-3,
                "{name} at beta={beta}: model {mean} vs quadrature {expect} ({} SE)",
                dev / se
            );
        }
    }
}

/// Same comparison at n = 2 (beta = 2), with Monte-Carlo quadrature under
/// the uniform proposal on the bidisk.
#[test]
fn density_quadrature_matches_model_n2() {
    let beta = 2.0f64;
    let spec = EnsembleSpec::new(Family::CircularBeta, 2)
        .with_beta(beta)
        .truncated();
    let model: Vec<(Complex64, Complex64)> = (0..30_000u64)
        .map(|rep| {
            let mut rng = stream_rng(99, rep);
            let alphas = verblunsky_model(&spec, &mut rng).unwrap();
            let cloud = eig(build_cmv(&alphas).unwrap().matrix()).unwrap();
            (cloud.values[0], cloud.values[1])
        })
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(100);
    let volume = std::f64::consts::PI * std::f64::consts::PI;
    let proposal: Vec<(Complex64, Complex64)> = (0..400_000)
        .map(|_| {
            (
                random_disk_point(&mut rng, 1.0),
                random_disk_point(&mut rng, 1.0),
            )
        })
        .collect();

    let tests: [(&str, Box<dyn Fn(Complex64, Complex64) -> f64>); 3] = [
        (
            "prod_abs2",
            Box::new(|a: Complex64, b: Complex64| (a * b).norm_sqr()),
        ),
        (
            "sum_abs2",
            Box::new(|a: Complex64, b: Complex64| a.norm_sqr() + b.norm_sqr()),
        ),
        ("re_sum", Box::new(|a: Complex64, b: Complex64| (a + b).re)),
    ];
    for (name, g) in &tests {
        // model side
        let vals: Vec<f64> = model.iter().map(|&(a, b)| g(a, b)).collect();
        let nm = vals.len() as f64;
        let mean_model = vals.iter().sum::<f64>() / nm;
        let var_model = vals
            .iter()
            .map(|x| (x - mean_model) * (x - mean_model))
            .sum::<f64>()
            / (nm - 1.0);
        let se_model = (var_model / nm).sqrt();

        // quadrature side: E_f[g] = volume * E_unif[g f]
        let weighted: Vec<f64> = proposal
            .iter()
            .map(|&(a, b)| {
                let f = log_density_trunc_circular(&[a, b], beta).unwrap().exp();
                g(a, b) * f * volume
            })
            .collect();
        let nq = weighted.len() as f64;
        let mean_quad = weighted.iter().sum::<f64>() / nq;
        let var_quad = weighted
            .iter()
            .map(|x| (x - mean_quad) * (x - mean_quad))
            .sum::<f64>()
            / (nq - 1.0);
        let se_quad = (var_quad / nq).sqrt();

        let dev = (mean_model - mean_quad).abs();
        let se = (se_model * se_model + se_quad * se_quad).sqrt();
        assert!(
            dev < 3.0 * se,
            "{name}: model {mean_model} vs quadrature {mean_quad} ({} SE)",
            dev / se
        );
    }

    // sanity: the known moment E|z1 z2|^2 = 1/3
    let prods: Vec<f64> = model.iter().map(|&(a, b)| (a * b).norm_sqr()).collect();
    let mean = prods.iter().sum::<f64>() / prods.len() as f64;
    assert!((mean - 1.0 / 3.0).abs() < 0.01);
}

#[test]
fn coe_model_matches_direct_coe_spectra() {
    // COE(n) eigenangle law via the Theta coefficient model vs direct
    // U^T U sampling (pooled angles, two-sample KS).
    let n = 4usize;
    let reps = 1_500usize;
    let mut model = Vec::with_capacity(reps * n);
    let mut direct = Vec::with_capacity(reps * n);
    for rep in 0..reps {
        let mut rng = stream_rng(101, rep as u64);
        let spec = EnsembleSpec::new(Family::Coe, n);
        let alphas = verblunsky_model(&spec, &mut rng).unwrap();
        let cloud = eig(build_cmv(&alphas).unwrap().matrix()).unwrap();
        model.extend(cloud.values.iter().map(|z| z.arg()));

        let mut rng = stream_rng(101, (1 << 32) + rep as u64);
        let u = cmvsim::ensembles::sample_coe(n, &mut rng);
        let cloud = eig(&u).unwrap();
        direct.extend(cloud.values.iter().map(|z| z.arg()));
    }
    let mut a = model;
    let mut b = direct;
    let d = ks_two_sample_statistic(&mut a, &mut b);
    let crit = cmvsim::verify::ks_critical_two_sample(a.len(), b.len(), 0.001);
    assert!(d < crit, "COE angles D={d} vs {crit}");
}

/// Quadrature check that every closed-form density integrates to one: the
/// four spectral-orthogonal cases and the truncated orthogonal law at
/// n = 1 and n = 2 (both strata), plus the circular spectral law at n = 2.
#[test]
fn densities_normalize_to_one() {
    use cmvsim::densities::{
        log_density_spectral_circular, log_density_spectral_orthogonal,
        log_density_trunc_orthogonal, OrthoSpectralData,
    };
    use cmvsim::ensembles::OrthoCase;
    use cmvsim::spectra::{stratify, EigenCloud};
    use std::f64::consts::{PI, TAU};

    // case (a) at n=1: single pair angle, single unit weight
    {
        let (beta, a, b) = (1.3, 0.2, -0.4);
        let m = 4000;
        let mut acc = 0.0;
        for i in 0..m {
            let theta = PI * (i as f64 + 0.5) / m as f64;
            let data = OrthoSpectralData {
                thetas: vec![theta],
                weights: vec![1.0],
            };
            acc += log_density_spectral_orthogonal(&data, OrthoCase::EvenPlus, beta, a, b)
                .unwrap()
                .exp();
        }
        acc *= PI / m as f64;
        assert!((acc - 1.0).abs() < 1e-3, "case (a) integral {acc}");
    }

    // case (b) at n=1: no pair angles, masses at +-1; beta = 4 keeps the
    // weight density bounded
    {
        let beta = 4.0;
        let m = 4000;
        let mut acc = 0.0;
        for i in 0..m {
            let mu = (i as f64 + 0.5) / m as f64;
            let data = OrthoSpectralData {
                thetas: vec![],
                weights: vec![mu, 1.0 - mu],
            };
            acc += log_density_spectral_orthogonal(&data, OrthoCase::EvenMinus, beta, -0.5, -0.5)
                .unwrap()
                .exp();
        }
        acc /= m as f64;
        assert!((acc - 1.0).abs() < 1e-3, "case (b) integral {acc}");
    }

    // cases (c), (d) at n=1: one pair angle, one extra mass; beta = 4
    for case in [OrthoCase::OddPlus, OrthoCase::OddMinus] {
        let beta = 4.0;
        let m = 1200;
        let mut acc = 0.0;
        for i in 0..m {
            let theta = PI * (i as f64 + 0.5) / m as f64;
            for j in 0..m {
                let mu = (j as f64 + 0.5) / m as f64;
                let data = OrthoSpectralData {
                    thetas: vec![theta],
                    weights: vec![mu, 1.0 - mu],
                };
                acc += log_density_spectral_orthogonal(&data, case, beta, -0.5, -0.5)
                    .unwrap()
                    .exp();
            }
        }
        acc *= PI / (m * m) as f64;
        assert!((acc - 1.0).abs() < 1e-3, "case {case:?} integral {acc}");
    }

    // truncated orthogonal at n=1: one real eigenvalue on (-1,1)
    {
        let (beta, a, b) = (1.7, 0.3, 0.8);
        let m = 4000;
        let mut acc = 0.0;
        for i in 0..m {
            let x = -1.0 + 2.0 * (i as f64 + 0.5) / m as f64;
            let cloud = stratify(&EigenCloud::new(vec![Complex64::new(x, 0.0)]), None).unwrap();
            acc += log_density_trunc_orthogonal(&cloud, beta, a, b)
                .unwrap()
                .exp();
        }
        acc *= 2.0 / m as f64;
        assert!(
            (acc - 1.0).abs() < 1e-3,
            "trunc orthogonal n=1 integral {acc}"
        );
    }

    // truncated orthogonal at n=2: the two-reals stratum (unordered double
    // integral halved) plus the conjugate-pair stratum (reference measure
    // contributes the factor 2, integrated in polar coordinates)
    {
        let (beta, a, b) = (2.0, 0.4, 0.25);
        let m = 900;
        let mut acc = 0.0;
        for i in 0..m {
            let x1 = -1.0 + 2.0 * (i as f64 + 0.5) / m as f64;
            for j in 0..m {
                let x2 = -1.0 + 2.0 * (j as f64 + 0.5) / m as f64;
                if x1 == x2 {
                    continue;
                }
                let cloud = stratify(
                    &EigenCloud::new(vec![Complex64::new(x1, 0.0), Complex64::new(x2, 0.0)]),
                    None,
                )
                .unwrap();
                let f = log_density_trunc_orthogonal(&cloud, beta, a, b)
                    .unwrap()
                    .exp();
                acc += 0.5 * f * (2.0 / m as f64) * (2.0 / m as f64);
            }
        }
        for i in 0..m {
            let r = (i as f64 + 0.5) / m as f64;
            for j in 0..m {
                let phi = PI * (j as f64 + 0.5) / m as f64;
                let z = Complex64::from_polar(r, phi);
                let cloud = stratify(&EigenCloud::new(vec![z, z.conj()]), None).unwrap();
                let f = log_density_trunc_orthogonal(&cloud, beta, a, b)
                    .unwrap()
                    .exp();
                acc += 2.0 * f * r * (1.0 / m as f64) * (PI / m as f64);
            }
        }
        assert!(
            (acc - 1.0).abs() < 2e-3,
            "trunc orthogonal n=2 integral {acc}"
        );
    }

    // circular spectral law at n=2, beta=2 over (theta_1, theta_2, mu_1)
    {
        let beta = 2.0;
        let m = 160;
        let mut acc = 0.0;
        for i in 0..m {
            let t1 = TAU * (i as f64 + 0.5) / m as f64;
            for j in 0..m {
                let t2 = TAU * (j as f64 + 0.5) / m as f64;
                for k in 0..m {
                    let mu = (k as f64 + 0.5) / m as f64;
                    acc += log_density_spectral_circular(&[t1, t2], &[mu, 1.0 - mu], beta)
                        .unwrap()
                        .exp();
                }
            }
        }
        acc *= TAU * TAU / (m * m * m) as f64;
        assert!((acc - 1.0).abs() < 1e-3, "circular spectral integral {acc}");
    }
}

/// End-to-end check of the truncated real-orthogonal law at n = 2: moments
/// of the coefficient model agree with density-weighted quadrature over the
/// two strata (two real eigenvalues / one conjugate pair).
#[test]
fn trunc_orthogonal_density_matches_model_n2() {
    use cmvsim::densities::log_density_trunc_orthogonal;
    use cmvsim::spectra::{stratify, EigenCloud};
    use std::f64::consts::PI;

    let (beta, a, b) = (2.0f64, 0.4, 0.25);
    let tests: [(&str, Box<dyn Fn(Complex64, Complex64) -> f64>); 3] = [
        (
            "sum_abs2",
            Box::new(|z1: Complex64, z2: Complex64| z1.norm_sqr() + z2.norm_sqr()),
        ),
        (
            "prod_abs2",
            Box::new(|z1: Complex64, z2: Complex64| (z1 * z2).norm_sqr()),
        ),
        ("re_sum", Box::new(|z1: Complex64, z2: Complex64| (z1 + z2).re)),
    ];

    // quadrature over both strata, accumulating (1, g1, g2, g3)
    let m = 900usize;
    let mut integrals = [0.0f64; 4];
    let mut add_point = |z1: Complex64, z2: Complex64, weight: f64| {
        let cloud = stratify(&EigenCloud::new(vec![z1, z2]), None).unwrap();
        let f = log_density_trunc_orthogonal(&cloud, beta, a, b)
            .unwrap()
            .exp();
        integrals[0] += f * weight;
        for (k, (_, g)) in tests.iter().enumerate() {
            integrals[k + 1] += g(z1, z2) * f * weight;
        }
    };
    for i in 0..m {
        let x1 = -1.0 + 2.0 * (i as f64 + 0.5) / m as f64;
        for j in 0..m {
            let x2 = -1.0 + 2.0 * (j as f64 + 0.5) / m as f64;
            if x1 == x2 {
                continue;
            }
            let w = 0.5 * (2.0 / m as f64) * (2.0 / m as f64);
            add_point(Complex64::new(x1, 0.0), Complex64::new(x2, 0.0), w);
        }
    }
    for i in 0..m {
        let r = (i as f64 + 0.5) / m as f64;
        for j in 0..m {
            let phi = PI * (j as f64 + 0.5) / m as f64;
            let z = Complex64::from_polar(r, phi);
            let w = 2.0 * r * (1.0 / m as f64) * (PI / m as f64);
            add_point(z, z.conj(), w);
        }
    }
    assert!((integrals[0] - 1.0).abs() < 2e-3, "normalization {}", integrals[0]);

    // model side
    let spec = EnsembleSpec::new(Family::OrthogonalBeta, 2)
        .with_beta(beta)
        .with_ab(a, b)
        .truncated();
    let samples: Vec<(Complex64, Complex64)> = (0..30_000u64)
        .map(|rep| {
            let mut rng = stream_rng(102, rep);
            let alphas = verblunsky_model(&spec, &mut rng).unwrap();
            let cloud = eig(build_cmv(&alphas).unwrap().matrix()).unwrap();
            (cloud.values[0], cloud.values[1])
        })
        .collect();
    for (k, (name, g)) in tests.iter().enumerate() {
        let vals: Vec<f64> = samples.iter().map(|&(z1, z2)| g(z1, z2)).collect();
        let n = vals.len() as f64;
        let mean = vals.iter().sum::<f64>() / n;
        let var = vals.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
        let se = (var / n).sqrt();
        let dev = (mean - integrals[k + 1]).abs();
        assert!(
            dev < 3.0 * se + 2e-3,
            "{name}: model {mean} vs quadrature {} ({} SE)",
            integrals[k + 1],
            dev / se
        );
    }
}
