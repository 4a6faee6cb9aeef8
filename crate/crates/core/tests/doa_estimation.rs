use issac::array::{build_channel, manifold, steering_vector, PathSet};
use issac::covariance::{CovarianceEstimate, Provenance};
use issac::doa::{
    bartlett_estimate, bartlett_spectrum, eig_hermitian, fbss, match_angles, music_estimate, music_spectrum,
    music_spectrum_at, sample_covariance, smooth_covariance, AngleGrid,
};
use issac::linalg::{exchange, frobenius, hermitize};
use issac::random::{complex_normal_matrix, par_trials, rng_from_seed};
use issac::signal::{simulate_uplink, PilotKind, UplinkFrame};
use issac::{CMatrix, CVector, Error, C64};
use rand::Rng;

fn deg(x: f64) -> f64 {
    x.to_radians()
}

fn exact_covariance(angles: &[f64], powers: &[f64], m: usize, sigma2: f64) -> CovarianceEstimate {
    let a = manifold(angles, m).unwrap();
    let p = CMatrix::from_diagonal(&CVector::from_iterator(powers.len(), powers.iter().map(|&x| C64::from(x))));
    let r = &a * p * a.adjoint() + CMatrix::identity(m, m) * C64::from(sigma2);
    CovarianceEstimate::new(hermitize(&r), Provenance::Direct).unwrap()
}

fn coherent_covariance(angles: &[f64], m: usize, sigma2: f64) -> CovarianceEstimate {
    let h = build_channel(&PathSet::new(angles.to_vec(), vec![C64::new(1.0, 0.0); angles.len()]).unwrap(), m).unwrap();
    let h = h.as_vector();
    let r = h * h.adjoint() + CMatrix::identity(m, m) * C64::from(sigma2);
    CovarianceEstimate::new(hermitize(&r), Provenance::Direct).unwrap()
}

fn rank_above(r: &CMatrix, rel: f64) -> usize {
    let trace: f64 = (0..r.nrows()).map(|i| r[(i, i)].re).sum();
    eig_hermitian(r).unwrap().values.iter().filter(|&&v| v > rel * trace).count()
}

#[test]
fn sample_covariance_of_one_snapshot_is_outer_product() {
    let y = complex_normal_matrix(&mut rng_from_seed(1), 6, 1, 1.0);
    let r = sample_covariance(&y).unwrap();
    let want = &y * y.adjoint();
    assert!(frobenius(&(r.matrix() - want)) < 1e-14);
    assert!(matches!(sample_covariance(&CMatrix::zeros(6, 0)), Err(Error::Domain(_))));
}

#[test]
fn sample_covariance_is_psd() {
    for seed in 0..20 {
        let y = complex_normal_matrix(&mut rng_from_seed(seed), 8, 3 + seed as usize, 1.0);
        let r = sample_covariance(&y).unwrap();
        let trace: f64 = (0..8).map(|i| r.matrix()[(i, i)].re).sum();
        let min = *eig_hermitian(r.matrix()).unwrap().values.last().unwrap();
        assert!(min >= -1e-12 * trace);
    }
}

#[test]
fn sample_covariance_converges() {
    let m = 8;
    let h = build_channel(&PathSet::los(deg(15.0), C64::new(0.6, 0.8)).unwrap(), m).unwrap();
    let frame = UplinkFrame::from_db(1, 100_000, PilotKind::AllOnes, 0.0, 0.0, 1.0).unwrap();
    let b = simulate_uplink(&h, &frame, &mut rng_from_seed(2));
    let r = sample_covariance(&b.yd).unwrap();
    let hv = h.as_vector();
    let want = hv * hv.adjoint() * C64::from(frame.pd) + CMatrix::identity(m, m) * C64::from(frame.sigma2);
    assert!(frobenius(&(r.matrix() - &want)) / frobenius(&want) < 0.02);
}

#[test]
fn eigensolver_examples() {
    let e = eig_hermitian(&CMatrix::identity(4, 4)).unwrap();
    assert!(e.values.iter().all(|v| (v - 1.0).abs() < 1e-14));

    let d = CMatrix::from_diagonal(&CVector::from_vec(vec![C64::new(1.0, 0.0), C64::new(3.0, 0.0)]));
    let e = eig_hermitian(&d).unwrap();
    assert!((e.values[0] - 3.0).abs() < 1e-14 && (e.values[1] - 1.0).abs() < 1e-14);
    assert!((e.vectors[(1, 0)].norm() - 1.0).abs() < 1e-14 && e.vectors[(0, 0)].norm() < 1e-14);
    assert!((e.vectors[(0, 1)].norm() - 1.0).abs() < 1e-14 && e.vectors[(1, 1)].norm() < 1e-14);
}

#[test]
fn eigensolver_residuals_and_orthonormality() {
    for (seed, n) in [(3, 16), (4, 64), (5, 2)] {
        let x = complex_normal_matrix(&mut rng_from_seed(seed), n, n, 1.0);
        let a = hermitize(&(&x + x.adjoint()));
        let e = eig_hermitian(&a).unwrap();
        assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
        let scale = a.norm();
        for k in 0..n {
            let v = e.vectors.column(k);
            let res = (&a * v - v * C64::from(e.values[k])).norm();
            assert!(res <= 1e-10 * scale, "residual {res}");
        }
        let gram = e.vectors.adjoint() * &e.vectors;
        assert!(frobenius(&(gram - CMatrix::identity(n, n))) <= 1e-10);
    }
}

#[test]
fn eigensolver_rejects_non_hermitian() {
    let mut a = CMatrix::identity(3, 3);
    a[(0, 1)] = C64::new(0.5, 0.0);
    assert!(matches!(eig_hermitian(&a), Err(Error::Domain(_))));
}

#[test]
fn bartlett_flat_spectrum_has_no_peaks() {
    let grid = AngleGrid::for_array(8).unwrap();
    let r = CovarianceEstimate::new(CMatrix::identity(8, 8), Provenance::Direct).unwrap();
    assert!(bartlett_spectrum(&r, &grid).iter().all(|p| (p - 8.0).abs() < 1e-12));
    assert!(matches!(bartlett_estimate(&r, &grid, 1), Err(Error::InsufficientPeaks { found: 0, requested: 1 })));
}

#[test]
fn bartlett_finds_los_on_exact_covariance() {
    let m = 64;
    let grid = AngleGrid::for_array(m).unwrap();
    let r = exact_covariance(&[deg(20.0)], &[0.1 * m as f64], m, 1.0);
    let est = bartlett_estimate(&r, &grid, 1).unwrap();
    assert_eq!(est.angles_hat.len(), 1);
    assert!(grid.within_step(est.angles_hat[0], deg(20.0)));
    // the peak is the grid point nearest in sine
    let nearest = grid.sines().iter().map(|s| (s - deg(20.0).sin()).abs()).fold(f64::INFINITY, f64::min);
    assert!((est.angles_hat[0].sin() - deg(20.0).sin()).abs() <= nearest + 1e-15);
}

#[test]
fn bartlett_monte_carlo_at_zero_db() {
    let m = 64;
    let grid = AngleGrid::for_array(m).unwrap();
    let theta = deg(20.0);
    let h = build_channel(&PathSet::los(theta, C64::new(1.0, 0.0)).unwrap(), m).unwrap();
    let frame = UplinkFrame::from_db(4, 1000, PilotKind::AllOnes, 0.0, 0.0, 1.0).unwrap();
    let hits: usize = par_trials(500, 7, |_, rng| {
        let b = simulate_uplink(&h, &frame, rng);
        let r = sample_covariance(&b.yd).unwrap();
        match bartlett_estimate(&r, &grid, 1) {
            Ok(est) => Ok(grid.within_step(est.angles_hat[0], theta) as usize),
            Err(_) => Ok(0),
        }
    })
    .unwrap()
    .into_iter()
    .sum();
    assert!(hits >= 475, "{hits}/500");
}

#[test]
fn smoothing_with_one_subarray_is_forward_backward_average() {
    let m = 6;
    let x = complex_normal_matrix(&mut rng_from_seed(8), m, 9, 1.0);
    let r = sample_covariance(&x).unwrap();
    let q = exchange(m);
    let want = (r.matrix() + &q * r.matrix().map(|z| z.conj()) * &q).scale(0.5);
    let got = smooth_covariance(&r, m).unwrap();
    assert!(frobenius(&(got.matrix() - want)) < 1e-13);
    assert_eq!(got.provenance(), Provenance::Smoothed);
}

#[test]
fn exchange_is_an_involution() {
    let q = exchange(7);
    assert!(frobenius(&(&q * &q - CMatrix::identity(7, 7))) == 0.0);
    let r = complex_normal_matrix(&mut rng_from_seed(9), 7, 7, 1.0);
    let twice = &q * (&q * r.map(|z| z.conj()) * &q) * &q;
    assert!(frobenius(&(twice - r.map(|z| z.conj()))) < 1e-14);
}

#[test]
fn smoothing_restores_rank_of_coherent_pair() {
    let m = 16;
    let r = coherent_covariance(&[deg(-20.0), deg(30.0)], m, 0.0);
    assert_eq!(rank_above(r.matrix(), 1e-9), 1);
    let s = smooth_covariance(&r, m - 4).unwrap();
    assert!(rank_above(s.matrix(), 1e-9) >= 2);
}

#[test]
fn smoothing_of_real_persymmetric_covariance_is_forward_only() {
    let (m, m_sub) = (10, 6);
    // a real symmetric Toeplitz matrix is persymmetric
    let r = CMatrix::from_fn(m, m, |i, j| C64::from(0.8f64.powi((i as i32 - j as i32).abs()) + 1.0 * (i == j) as u8 as f64));
    let q = exchange(m);
    assert!(frobenius(&(&q * r.map(|z| z.conj()) * &q - &r)) < 1e-15);
    let mut forward = CMatrix::zeros(m_sub, m_sub);
    for k in 0..=m - m_sub {
        forward += r.view((k, k), (m_sub, m_sub));
    }
    forward /= C64::from((m - m_sub + 1) as f64);
    let got = smooth_covariance(&CovarianceEstimate::new(r, Provenance::Direct).unwrap(), m_sub).unwrap();
    assert!(frobenius(&(got.matrix() - forward)) < 1e-14);
}

#[test]
fn fbss_pools_pilot_and_data_snapshots() {
    let mut rng = rng_from_seed(10);
    let yt = complex_normal_matrix(&mut rng, 12, 4, 1.0);
    let yd = complex_normal_matrix(&mut rng, 12, 30, 1.0);
    let mut pooled = CMatrix::zeros(12, 34);
    pooled.columns_mut(0, 4).copy_from(&yt);
    pooled.columns_mut(4, 30).copy_from(&yd);
    let want = smooth_covariance(&sample_covariance(&pooled).unwrap(), 9).unwrap();
    let got = fbss(&yt, &yd, 9, 2).unwrap();
    assert!(frobenius(&(got.matrix() - want.matrix())) < 1e-13);
}

#[test]
fn fbss_rank_condition_is_config_error() {
    let yt = CMatrix::zeros(8, 2);
    let yd = CMatrix::zeros(8, 10);
    assert!(matches!(fbss(&yt, &yd, 4, 4), Err(Error::Config(_))));
    assert!(matches!(fbss(&yt, &yd, 9, 1), Err(Error::Config(_))));
    assert!(matches!(fbss(&yt, &yd, 0, 1), Err(Error::Config(_))));
    assert!(fbss(&yt, &yd, 5, 4).is_ok());
}

#[test]
fn music_nulls_true_angles_on_exact_covariance() {
    let m = 16;
    let angles = [deg(-10.0), deg(25.0)];
    let r = exact_covariance(&angles, &[1.0, 0.5], m, 0.1);
    let grid = AngleGrid::for_array(m).unwrap();
    let spectrum = music_spectrum(&r, 2, &grid).unwrap();
    let mut sorted = spectrum.clone();
    sorted.sort_by(f64::total_cmp);
    let median = sorted[sorted.len() / 2];
    let at = music_spectrum_at(&r, 2, &angles.map(f64::sin)).unwrap();
    for p in at {
        assert!(10.0 * (p / median).log10() >= 40.0);
    }
    let est = music_estimate(&r, 2, &grid).unwrap();
    for (e, t) in est.angles_hat.iter().zip(angles) {
        assert!(grid.within_step(*e, t));
    }
}

#[test]
fn music_and_bartlett_agree_for_one_path() {
    let m = 32;
    let grid = AngleGrid::for_array(m).unwrap();
    for theta in [-50.0, -7.0, 0.3, 20.0, 44.0] {
        let r = exact_covariance(&[deg(theta)], &[0.2], m, 1.0);
        let b = bartlett_estimate(&r, &grid, 1).unwrap();
        let mu = music_estimate(&r, 1, &grid).unwrap();
        assert!(grid.within_step(b.angles_hat[0], mu.angles_hat[0]));
    }
}

#[test]
fn music_peaks_ignore_positive_scaling() {
    let m = 16;
    let grid = AngleGrid::for_array(m).unwrap();
    let r = exact_covariance(&[deg(-33.0), deg(5.0), deg(40.0)], &[1.0, 2.0, 0.7], m, 0.3);
    let base = music_estimate(&r, 3, &grid).unwrap();
    for c in [1e-3, 7.0, 1e4] {
        let rc = CovarianceEstimate::new(r.matrix() * C64::from(c), Provenance::Direct).unwrap();
        assert_eq!(music_estimate(&rc, 3, &grid).unwrap().angles_hat, base.angles_hat);
    }
}

#[test]
fn music_resolves_coherent_pair_after_smoothing() {
    let (m, m_sub) = (64, 56);
    let grid = AngleGrid::for_array(m).unwrap();
    let angles = [deg(-20.0), deg(30.0)];
    let h = build_channel(&PathSet::new(angles.to_vec(), vec![C64::new(1.0, 0.0); 2]).unwrap(), m).unwrap();
    let frame = UplinkFrame::from_db(4, 1000, PilotKind::AllOnes, -10.0, -10.0, 1.0).unwrap();
    let hits: usize = par_trials(500, 11, |_, rng| {
        let b = simulate_uplink(&h, &frame, rng);
        let r = fbss(&b.yt, &b.yd, m_sub, 2).unwrap();
        match music_estimate(&r, 2, &grid) {
            Ok(est) => Ok(est.angles_hat.iter().zip(angles).all(|(e, t)| grid.within_step(*e, t)) as usize),
            Err(_) => Ok(0),
        }
    })
    .unwrap()
    .into_iter()
    .sum();
    assert!(hits >= 450, "{hits}/500");
}

#[test]
fn match_angles_examples() {
    assert_eq!(match_angles(&[0.1, 0.2], &[0.1, 0.2]).unwrap(), 0.0);
    assert!(match_angles(&[deg(10.0), deg(20.0)], &[deg(20.0), deg(10.0)]).unwrap() < 1e-24);
    let e = match_angles(&[deg(10.0), deg(20.0)], &[deg(11.0), deg(19.0)]).unwrap();
    assert!((e - 1.0).abs() < 1e-12);
    assert!(matches!(match_angles(&[0.1], &[0.1, 0.2]), Err(Error::Domain(_))));
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

#[test]
fn match_angles_is_minimum_over_permutations() {
    let mut rng = rng_from_seed(12);
    for n in 1..=5 {
        let perms = permutations(n);
        for _ in 0..50 {
            let a: Vec<f64> = (0..n).map(|_| rng.random_range(-1.4..1.4)).collect();
            let b: Vec<f64> = (0..n).map(|_| rng.random_range(-1.4..1.4)).collect();
            let brute = perms
                .iter()
                .map(|p| p.iter().enumerate().map(|(i, &j)| (a[i] - b[j]).to_degrees().powi(2)).sum::<f64>() / n as f64)
                .fold(f64::INFINITY, f64::min);
            let got = match_angles(&a, &b).unwrap();
            assert!((got - brute).abs() <= 1e-9 * brute.max(1.0));
        }
    }
}

#[test]
fn refining_the_grid_never_hurts_on_exact_covariances() {
    let m = 16;
    let mut rng = rng_from_seed(13);
    for _ in 0..40 {
        let theta = rng.random_range(-1.0..1.0);
        let r = exact_covariance(&[theta], &[1.0], m, 0.5);
        let mut last = f64::INFINITY;
        let mut n = 4 * m;
        for _ in 0..4 {
            let grid = AngleGrid::uniform_sin(n).unwrap();
            let err = match_angles(&bartlett_estimate(&r, &grid, 1).unwrap().angles_hat, &[theta]).unwrap();
            assert!(err <= last * (1.0 + 1e-12), "grid {n}: {err} > {last}");
            last = err;
            n = 2 * n + 1;
        }
    }
}

#[test]
fn steering_columns_match_grid() {
    let grid = AngleGrid::uniform_sin(9).unwrap();
    let a = steering_vector(grid.values()[3], 5).unwrap();
    let want = CVector::from_fn(5, |k, _| C64::from_polar(1.0, std::f64::consts::PI * k as f64 * grid.sines()[3]));
    assert!((a - want).norm() < 1e-13);
}
