//! Acceptance suite: one test per criterion, each printing a pass/fail line
//! with the observed statistic. Tolerances are pinned in the constants next
//! to each criterion.

use std::time::Instant;

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use cmvsim::cmv::{
    build_block_cmv, build_cmv, build_symmetric_cmv, reversed_truncation_coeffs, truncate_first,
    SymmetricVariant,
};
use cmvsim::densities::{
    ln_p_trunc_orthogonal, log_density_trunc_circular, log_gas_energy, LogGasParams,
};
use cmvsim::ensembles::{
    figure_presets, sample_haar, sample_one_cloud, stream_rng, verblunsky_model, EnsembleSpec,
    Family, HaarGroup,
};
use cmvsim::linalg::{self, char_poly_det, Mat2};
use cmvsim::opuc::{identity_suite, szego_forward, VerblunskyString};
use cmvsim::spectra::{self, spectral_measure};
use cmvsim::verify::{
    beta_cdf, coupled_vs_truncated, eigenweight_law_check, jacobian_fd_coeffs_to_alphas,
    jacobian_fd_roots_to_coeffs, jacobian_fd_roots_to_coeffs_real, ks_one_sample, model_vs_haar,
};

fn random_disk_point(rng: &mut ChaCha8Rng, radius: f64) -> Complex64 {
    loop {
        let x = rng.gen_range(-radius..radius);
        let y = rng.gen_range(-radius..radius);
        if x * x + y * y < radius * radius {
            return Complex64::new(x, y);
        }
    }
}

fn random_unit(rng: &mut ChaCha8Rng) -> Complex64 {
    let t: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    Complex64::from_polar(1.0, t)
}

fn random_string(rng: &mut ChaCha8Rng, n: usize, unitary: bool) -> VerblunskyString {
    let mut v: Vec<Complex64> = (0..n).map(|_| random_disk_point(rng, 0.95)).collect();
    if unitary {
        *v.last_mut().unwrap() = random_unit(rng);
    }
    VerblunskyString::Scalar(v)
}

fn report(criterion: &str, pass: bool, detail: String, started: Instant) {
    let status = if pass { "PASS" } else { "FAIL" };
    println!(
        "ACCEPTANCE {criterion}: {status} ({detail}, {:.2}s)",
        started.elapsed().as_secs_f64()
    );
    assert!(pass, "{criterion}: {detail}");
}

/// Criterion 1: characteristic polynomial of the CMV operator equals the
/// final Szego polynomial; max coefficient error < 1e-10 over 100 random
/// strings per n in 1..=16.
#[test]
fn criterion_01_characteristic_polynomial_identity() {
    let started = Instant::now();
    const TOL: f64 = 1e-10;
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst = 0.0f64;
    for n in 1..=16 {
        for rep in 0..100 {
            let s = random_string(&mut rng, n, rep % 2 == 0);
            let op = build_cmv(&s).unwrap();
            let coeffs = char_poly_det(op.matrix()).unwrap();
            let phi = szego_forward(&s).unwrap().pop().unwrap();
            for (a, b) in coeffs.iter().zip(phi.ascending_coeffs().iter()) {
                worst = worst.max((a - b).norm());
            }
        }
    }
    report(
        "1 characteristic-polynomial identity",
        worst < TOL,
        format!("max coefficient error {worst:.3e} vs {TOL:.0e}"),
        started,
    );
}

/// Criterion 2: the first-minor truncation has the same spectrum as the
/// reversed-coefficient CMV operator (transposed when the last index is
/// even); matching distance < 1e-8, 100 seeds per string length 3..=13
/// (truncated sizes 2..=12, both parities).
#[test]
fn criterion_02_truncation_lemma() {
    let started = Instant::now();
    const TOL: f64 = 1e-8;
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut worst = 0.0f64;
    for m in 3..=13 {
        for _ in 0..100 {
            let s = random_string(&mut rng, m, true);
            let minor = truncate_first(build_cmv(&s).unwrap().matrix()).unwrap();
            let direct = spectra::eig(&minor).unwrap().values;
            let (rev, transposed) = reversed_truncation_coeffs(&s).unwrap();
            let mut equivalent = build_cmv(&rev).unwrap().into_matrix();
            if transposed {
                equivalent = equivalent.t().to_owned();
            }
            let eigs = spectra::eig(&equivalent).unwrap().values;
            worst = worst.max(linalg::matching_distance(&direct, &eigs).unwrap());
        }
    }
    report(
        "2 truncation lemma",
        worst < TOL,
        format!("max matching distance {worst:.3e} vs {TOL:.0e}"),
        started,
    );
}

/// Criterion 3: the orthogonal-polynomial identity suite holds with
/// relative error < 1e-9 on 100 random strings of sizes up to 10.
#[test]
fn criterion_03_opuc_identities() {
    let started = Instant::now();
    const TOL: f64 = 1e-9;
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let mut worst = 0.0f64;
    for rep in 0..100 {
        let n = 2 + rep % 9; // 2..=10
        let s = if rep % 3 == 0 {
            // real strings exercise the +-1 evaluation identities
            let mut v: Vec<f64> = (0..n).map(|_| rng.gen_range(-0.9..0.9)).collect();
            if rep % 2 == 0 {
                let last = if rng.gen::<bool>() { 1.0 } else { -1.0 };
                *v.last_mut().unwrap() = last;
            }
            VerblunskyString::RealScalar(v)
        } else {
            random_string(&mut rng, n, rep % 2 == 0)
        };
        let rep_out = identity_suite(&s, &mut rng).unwrap();
        worst = worst.max(rep_out.max_err());
    }
    report(
        "3 orthogonal-polynomial identities",
        worst < TOL,
        format!("max relative error {worst:.3e} vs {TOL:.0e}"),
        started,
    );
}

/// Criterion 4: finite-difference Jacobians match the closed forms with
/// relative error < 1e-5, 50 configurations per size n in {2,3,4} for each
/// of the four maps.
#[test]
fn criterion_04_jacobian_lemmas() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let mut worst = 0.0f64;
    let mut pass = true;
    for n in [2usize, 3, 4] {
        for _ in 0..50 {
            let zs: Vec<Complex64> = (0..n)
                .map(|_| Complex64::new(rng.gen_range(-0.6..0.6), rng.gen_range(-0.6..0.6)))
                .collect();
            let r = jacobian_fd_roots_to_coeffs(&zs).unwrap();
            worst = worst.max(r.statistic);
            pass &= r.pass;

            let xs: Vec<f64> = (0..n).map(|_| rng.gen_range(-0.9..0.9)).collect();
            let r = jacobian_fd_roots_to_coeffs_real(&xs).unwrap();
            worst = worst.max(r.statistic);
            pass &= r.pass;

            let alphas: Vec<Complex64> = (0..n)
                .map(|_| Complex64::new(rng.gen_range(-0.55..0.55), rng.gen_range(-0.55..0.55)))
                .collect();
            let r = jacobian_fd_coeffs_to_alphas(&VerblunskyString::Scalar(alphas)).unwrap();
            worst = worst.max(r.statistic);
            pass &= r.pass;

            let reals: Vec<f64> = (0..n).map(|_| rng.gen_range(-0.8..0.8)).collect();
            let r = jacobian_fd_coeffs_to_alphas(&VerblunskyString::RealScalar(reals)).unwrap();
            worst = worst.max(r.statistic);
            pass &= r.pass;
        }
    }
    report(
        "4 Jacobian lemmas (finite differences)",
        pass,
        format!("max relative error {worst:.3e} vs 1e-5"),
        started,
    );
}

/// Criterion 5: coefficient laws of CMV-fication. |alpha_0|^2 of the Haar
/// unitary group at size 5 is Beta(1,4); alpha_0 of the Haar orthogonal
/// group at size 6 is the symmetric beta B(5/2, 5/2). KS at the 0.1% level,
/// 10^4 samples each.
#[test]
fn criterion_05_cmvfication_laws() {
    let started = Instant::now();
    let ru = model_vs_haar(&EnsembleSpec::new(Family::Cue, 5), 10_000, 505).unwrap();
    let ro = model_vs_haar(&EnsembleSpec::new(Family::O, 6), 10_000, 506).unwrap();
    let pass = ru.iter().chain(ro.iter()).all(|r| r.pass);
    let detail = ru
        .iter()
        .chain(ro.iter())
        .map(|r| format!("{} D={:.4} crit={:.4}", r.name, r.statistic, r.threshold))
        .collect::<Vec<_>>()
        .join("; ");
    report("5 CMV-fication coefficient laws", pass, detail, started);
}

/// Criterion 6: spectral eigenweights of the Haar unitary group at size 4:
/// mu_1 ~ Beta(1, 3), KS at the 0.1% level, 10^4 samples.
#[test]
fn criterion_06_eigenweight_law() {
    let started = Instant::now();
    let r = eigenweight_law_check(4, 10_000, 606).unwrap();
    report(
        "6 eigenweight law",
        r.pass,
        format!("D={:.4} crit={:.4}", r.statistic, r.threshold),
        started,
    );
}

/// Criterion 7: truncated circular law. (a) the single eigenvalue of the
/// truncated Haar U(2) is uniform on the disk (|z|^2 uniform, KS at 0.1%,
/// 10^5 samples); (b) at n=2, beta=2, E|z_1 z_2|^2 = 1/3 within 3 standard
/// errors over 10^5 model samples.
#[test]
fn criterion_07_truncated_circular_law() {
    let started = Instant::now();
    let mut samples = Vec::with_capacity(100_000);
    for rep in 0..100_000u64 {
        let mut rng = stream_rng(707, rep);
        let u = sample_haar(HaarGroup::Unitary, 2, &mut rng);
        samples.push(u[[1, 1]].norm_sqr());
    }
    let ks = ks_one_sample("trunc_u2_disk", samples, |x| x.clamp(0.0, 1.0), 707).unwrap();

    let spec = EnsembleSpec::new(Family::Cue, 2).truncated();
    let mut prods = Vec::with_capacity(100_000);
    for rep in 0..100_000u64 {
        let mut rng = stream_rng(708, rep);
        let alphas = verblunsky_model(&spec, &mut rng).unwrap();
        let c = build_cmv(&alphas).unwrap();
        // |z_1 z_2| = |det C|
        prods.push(linalg::det(c.matrix()).unwrap().norm_sqr());
    }
    let n = prods.len() as f64;
    let mean = prods.iter().sum::<f64>() / n;
    let var = prods.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    let se = (var / n).sqrt();
    let dev = (mean - 1.0 / 3.0).abs();
    let pass = ks.pass && dev < 3.0 * se;
    report(
        "7 truncated circular law",
        pass,
        format!(
            "KS D={:.4} crit={:.4}; E|z1 z2|^2 = {mean:.5} vs 1/3 ({:.1} SE)",
            ks.statistic,
            ks.threshold,
            dev / se
        ),
        started,
    );
}

/// Criterion 8: truncated orthogonal law at n=1, a=b=-1/2: the eigenvalue
/// follows the arcsine law on (-1,1) (KS at 0.1%, 10^5 samples), and
/// P_1 = pi exactly from the constant formula.
#[test]
fn criterion_08_truncated_orthogonal_law() {
    let started = Instant::now();
    let spec = EnsembleSpec::new(Family::OrthogonalBeta, 1)
        .with_beta(2.0)
        .with_ab(-0.5, -0.5)
        .truncated();
    let mut samples = Vec::with_capacity(100_000);
    for rep in 0..100_000u64 {
        let mut rng = stream_rng(808, rep);
        let v = verblunsky_model(&spec, &mut rng)
            .unwrap()
            .as_scalar()
            .unwrap();
        // the 1x1 CMV operator is conj(alpha_0) = alpha_0 (real)
        samples.push(v[0].re);
    }
    let arcsine = |x: f64| {
        if x <= -1.0 {
            0.0
        } else if x >= 1.0 {
            1.0
        } else {
            1.0 - beta_cdf(0.5, 0.5, (1.0 - x) / 2.0)
        }
    };
    let ks = ks_one_sample("trunc_orth_arcsine", samples, arcsine, 808).unwrap();
    let lnp1 = ln_p_trunc_orthogonal(1, 2.0, -0.5, -0.5).unwrap();
    let p1_exact = (lnp1 - std::f64::consts::PI.ln()).abs() < 1e-13;
    report(
        "8 truncated orthogonal law",
        ks.pass && p1_exact,
        format!(
            "KS D={:.4} crit={:.4}; |ln P1 - ln pi| = {:.1e}",
            ks.statistic,
            ks.threshold,
            (lnp1 - std::f64::consts::PI.ln()).abs()
        ),
        started,
    );
}

/// Criterion 9: a non-ideally coupled system of size 4 with the ideal
/// reflection law is distributionally indistinguishable from the truncated
/// system of size 4 (truncation of size 5); two-sample KS on pooled moduli,
/// 5*10^3 clouds per side.
#[test]
fn criterion_09_nonideal_coupling() {
    let started = Instant::now();
    let r = coupled_vs_truncated(4, 5_000, 909).unwrap();
    report(
        "9 non-ideal coupling",
        r.pass,
        format!("D={:.4} crit={:.4}", r.statistic, r.threshold),
        started,
    );
}

/// Criterion 10: log-gas correspondence. For gamma=2, alpha=beta/2-1, the
/// quantity [-H/kT - log density] has variance < 1e-16 across 100 random
/// configurations at n=5, for beta in {1,2,4}.
#[test]
fn criterion_10_log_gas_correspondence() {
    let started = Instant::now();
    const TOL: f64 = 1e-16;
    let mut rng = ChaCha8Rng::seed_from_u64(1010);
    let mut worst = 0.0f64;
    for beta in [1.0f64, 2.0, 4.0] {
        let params = LogGasParams::from_exponents(2.0, beta / 2.0 - 1.0, 1.0).unwrap();
        let mut diffs = Vec::with_capacity(100);
        for _ in 0..100 {
            let zs: Vec<Complex64> = (0..5).map(|_| random_disk_point(&mut rng, 0.9)).collect();
            let h = log_gas_energy(&zs, &params).unwrap();
            let ld = log_density_trunc_circular(&zs, beta).unwrap();
            diffs.push(-h / params.k_b_t - ld);
        }
        let mean = diffs.iter().sum::<f64>() / diffs.len() as f64;
        let var = diffs.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / diffs.len() as f64;
        worst = worst.max(var);
    }
    report(
        "10 log-gas correspondence",
        worst < TOL,
        format!("max variance {worst:.3e} vs {TOL:.0e}"),
        started,
    );
}

/// Criterion 11: symmetric CMV form. Exact symmetry, at most 7 diagonals,
/// unitarity residual < 1e-12 for unimodular last coefficient, and spectral
/// measure within 1e-8 of the plain CMV operator; n in 2..=8, 100 seeds.
#[test]
fn criterion_11_symmetric_cmv() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1111);
    let mut worst_sym = 0.0f64;
    let mut worst_band = 0.0f64;
    let mut worst_unit = 0.0f64;
    let mut worst_meas = 0.0f64;
    for n in 2..=8 {
        for rep in 0..100 {
            let s = random_string(&mut rng, n, true);
            let variant = if rep % 2 == 0 {
                SymmetricVariant::S
            } else {
                SymmetricVariant::STilde
            };
            let sym = build_symmetric_cmv(&s, variant).unwrap();
            let m = sym.matrix();
            worst_sym = worst_sym.max(linalg::max_abs_diff(m, &m.t().to_owned()));
            worst_band = worst_band.max(sym.band_defect());
            worst_unit = worst_unit.max(sym.unitarity_residual());
            let mu_s = spectral_measure(m).unwrap();
            let mu_c = spectral_measure(build_cmv(&s).unwrap().matrix()).unwrap();
            worst_meas = worst_meas.max(mu_s.distance(&mu_c).unwrap());
        }
    }
    let pass = worst_sym == 0.0 && worst_band < 1e-14 && worst_unit < 1e-12 && worst_meas < 1e-8;
    report(
        "11 symmetric CMV",
        pass,
        format!(
            "symmetry {worst_sym:.1e}, band {worst_band:.1e}, unitarity {worst_unit:.3e}, measure {worst_meas:.3e}"
        ),
        started,
    );
}

/// Criterion 12: quaternionic structure. CSE block-model eigenvalues are
/// pair-doubled within 1e-9; truncated USp block clouds are conjugation
/// symmetric within 1e-8 and two-sample consistent with direct Haar USp
/// truncation at n=3, 5*10^3 clouds per side.
#[test]
fn criterion_12_quaternionic_structure() {
    let started = Instant::now();
    // (a) doubling of the CSE model
    let mut worst_double = 0.0f64;
    for rep in 0..50u64 {
        let mut rng = stream_rng(1212, rep);
        let spec = EnsembleSpec::new(Family::Cse, 4);
        let alphas = verblunsky_model(&spec, &mut rng).unwrap();
        let blocks = match &alphas {
            VerblunskyString::Matrix2(v) => v.clone(),
            _ => unreachable!(),
        };
        let scalars: Vec<Complex64> = blocks.iter().map(|m: &Mat2| m.0[0][0]).collect();
        let block_eigs = spectra::eig(build_block_cmv(&alphas).unwrap().matrix())
            .unwrap()
            .values;
        let scalar_eigs = spectra::eig(
            build_cmv(&VerblunskyString::Scalar(scalars))
                .unwrap()
                .matrix(),
        )
        .unwrap()
        .values;
        let mut doubled = Vec::with_capacity(8);
        for z in scalar_eigs {
            doubled.push(z);
            doubled.push(z);
        }
        worst_double = worst_double.max(linalg::matching_distance(&block_eigs, &doubled).unwrap());
    }

    // (b) truncated USp: conjugation symmetry of the model clouds
    let mut worst_conj = 0.0f64;
    let spec = EnsembleSpec::new(Family::USp, 3).truncated();
    for rep in 0..200u64 {
        let cloud = sample_one_cloud(&spec, 1213, rep).unwrap();
        let conj: Vec<Complex64> = cloud.values.iter().map(|z| z.conj()).collect();
        worst_conj = worst_conj.max(linalg::matching_distance(&cloud.values, &conj).unwrap());
    }

    // (b) two-sample against the direct Haar truncation
    let reports = model_vs_haar(&spec, 5_000, 1214).unwrap();
    let ks_pass = reports.iter().all(|r| r.pass);
    let pass = worst_double < 1e-9 && worst_conj < 1e-8 && ks_pass;
    let detail = format!(
        "doubling {worst_double:.2e}; conjugation {worst_conj:.2e}; {}",
        reports
            .iter()
            .map(|r| format!("{} D={:.4} crit={:.4}", r.name, r.statistic, r.threshold))
            .collect::<Vec<_>>()
            .join("; ")
    );
    report("12 quaternionic structure", pass, detail, started);
}

/// Criterion 13: figure presets produce clouds of sizes 301, 301, 302,
/// entirely inside the closed unit disk.
#[test]
fn criterion_13_figure_presets() {
    let started = Instant::now();
    let expected = [301usize, 301, 302];
    let mut pass = true;
    let mut detail = Vec::new();
    for ((name, spec), want) in figure_presets().into_iter().zip(expected) {
        let cloud = sample_one_cloud(&spec, 1313, 0).unwrap();
        let max_mod = cloud.values.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let ok = cloud.len() == want && max_mod <= 1.0 + 1e-9;
        pass &= ok;
        detail.push(format!(
            "{name}: {} points, max |z| = {max_mod:.6}",
            cloud.len()
        ));
    }
    report("13 figure presets", pass, detail.join("; "), started);
}
