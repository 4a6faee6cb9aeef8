use issac::array::{build_channel, sample_paths, steering_vector, PathSet};
use issac::conventional::{ls_estimate, theory_e_con};
use issac::gains::{estimate_gain_los, estimate_gains_multipath, theory_e_eff};
use issac::random::{par_trials, rng_from_seed};
use issac::signal::{gen_pilot, simulate_uplink, PilotKind, UplinkFrame};
use issac::{Error, C64};
use rand::Rng;

fn frame(rho: usize) -> UplinkFrame {
    UplinkFrame::from_db(rho, 0, PilotKind::AllOnes, -10.0, -10.0, 1.0).unwrap()
}

fn noiseless(rho: usize) -> UplinkFrame {
    UplinkFrame::new(gen_pilot(rho, PilotKind::UnitModulusChirp).unwrap(), 0, 1.0, 1.0, 0.0).unwrap()
}

fn dft_angle(n: i32, m: usize) -> f64 {
    (2.0 * n as f64 / m as f64).asin()
}

#[test]
fn los_mmse_matches_theory() {
    let m = 64;
    let theta = 0.35;
    let h = build_channel(&PathSet::los(theta, C64::new(0.3, -0.9)).unwrap(), m).unwrap();
    let f = frame(4);
    let trials = 10_000;
    let e = par_trials(trials, 1, |_, rng| {
        let b = simulate_uplink(&h, &f, rng);
        Ok((estimate_gain_los(&b.yt, &f, theta)?.h_hat - h.as_vector()).norm_squared())
    })
    .unwrap();
    let mse = e.iter().sum::<f64>() / trials as f64;
    let want = theory_e_eff(1, f.pt, f.sigma2, 4);
    assert!((want - 2.5).abs() < 1e-12);
    assert!((mse / want - 1.0).abs() <= 0.05, "{mse}");
}

#[test]
fn multipath_mmse_matches_theory() {
    let m = 64;
    let paths = sample_paths(4, m, &mut rng_from_seed(2)).unwrap();
    let h = build_channel(&paths, m).unwrap();
    let f = frame(4);
    let trials = 10_000;
    let e = par_trials(trials, 3, |_, rng| {
        let b = simulate_uplink(&h, &f, rng);
        Ok((estimate_gains_multipath(&b.yt, &f, paths.angles())?.h_hat - h.as_vector()).norm_squared())
    })
    .unwrap();
    let mse = e.iter().sum::<f64>() / trials as f64;
    let want = theory_e_eff(4, f.pt, f.sigma2, 4);
    assert!((want - 10.0).abs() < 1e-12);
    assert!((mse / want - 1.0).abs() <= 0.05, "{mse}");
}

#[test]
fn dft_directions_are_recovered_exactly() {
    let m = 64;
    let angles: Vec<f64> = [-3, 1, 5, 10].iter().map(|&n| dft_angle(n, m)).collect();
    let gains = vec![C64::new(1.0, 0.2), C64::new(-0.5, 0.7), C64::new(0.0, -1.3), C64::new(0.8, 0.8)];
    let paths = PathSet::new(angles.clone(), gains.clone()).unwrap();
    let h = build_channel(&paths, m).unwrap();
    let f = noiseless(4);
    let b = simulate_uplink(&h, &f, &mut rng_from_seed(4));
    let est = estimate_gains_multipath(&b.yt, &f, &angles).unwrap();
    for (a, g) in est.alpha_hat.iter().zip(&gains) {
        assert!((a - g).norm() <= 1e-10);
    }
}

#[test]
fn generic_angles_are_recovered_exactly_without_noise() {
    let mut rng = rng_from_seed(5);
    for _ in 0..50 {
        let m = rng.random_range(8..=64);
        let l = rng.random_range(1..=4);
        let paths = sample_paths(l, m, &mut rng).unwrap();
        let h = build_channel(&paths, m).unwrap();
        let f = noiseless(rng.random_range(1..=6));
        let b = simulate_uplink(&h, &f, &mut rng);
        let est = estimate_gains_multipath(&b.yt, &f, paths.angles()).unwrap();
        assert!((&est.h_hat - h.as_vector()).norm() <= 1e-8 * h.as_vector().norm());
        assert_eq!(est.theta_hat, paths.angles());
    }
}

#[test]
fn single_path_reduces_to_los_estimator() {
    let m = 32;
    let mut rng = rng_from_seed(6);
    for _ in 0..20 {
        let theta: f64 = rng.random_range(-1.2..1.2);
        let h = build_channel(&PathSet::los(theta + 0.01, C64::new(1.0, 0.5)).unwrap(), m).unwrap();
        let f = frame(3);
        let b = simulate_uplink(&h, &f, &mut rng);
        let los = estimate_gain_los(&b.yt, &f, theta).unwrap();
        let mp = estimate_gains_multipath(&b.yt, &f, &[theta]).unwrap();
        assert!((los.alpha_hat[0] - mp.alpha_hat[0]).norm() <= 1e-10 * los.alpha_hat[0].norm().max(1.0));
        assert!((&los.h_hat - &mp.h_hat).norm() <= 1e-10 * mp.h_hat.norm().max(1.0));
    }
}

#[test]
fn mmse_scales_inversely_with_pilot_length() {
    let m = 32;
    let paths = sample_paths(4, m, &mut rng_from_seed(7)).unwrap();
    let h = build_channel(&paths, m).unwrap();
    let rhos = [1usize, 2, 4, 8, 16, 32];
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &rho in &rhos {
        let f = frame(rho);
        let e = par_trials(4000, 100 + rho as u64, |_, rng| {
            let b = simulate_uplink(&h, &f, rng);
            Ok((estimate_gains_multipath(&b.yt, &f, paths.angles())?.h_hat - h.as_vector()).norm_squared())
        })
        .unwrap();
        xs.push((rho as f64).ln());
        ys.push((e.iter().sum::<f64>() / e.len() as f64).ln());
    }
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let slope = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
        / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
    assert!((slope + 1.0).abs() <= 0.05, "slope {slope}");
}

#[test]
fn two_stage_estimate_is_m_times_better() {
    for m in [16usize, 64, 128] {
        let ratio = theory_e_con(m, 0.1, 1.0, 4) / theory_e_eff(1, 0.1, 1.0, 4);
        assert!((ratio - m as f64).abs() < 1e-9);
    }
    let m = 64;
    let theta = -0.4;
    let h = build_channel(&PathSet::los(theta, C64::new(1.0, 0.0)).unwrap(), m).unwrap();
    let f = frame(4);
    let e = par_trials(10_000, 8, |_, rng| {
        let b = simulate_uplink(&h, &f, rng);
        let con = (ls_estimate(&b.yt, &f)?.h_hat - h.as_vector()).norm_squared();
        let eff = (estimate_gain_los(&b.yt, &f, theta)?.h_hat - h.as_vector()).norm_squared();
        Ok((con, eff))
    })
    .unwrap();
    let con: f64 = e.iter().map(|p| p.0).sum();
    let eff: f64 = e.iter().map(|p| p.1).sum();
    assert!((con / eff / m as f64 - 1.0).abs() <= 0.05);
}

#[test]
fn theory_ordering_follows_path_count() {
    let m = 16;
    for l in 1..=20 {
        let eff = theory_e_eff(l, 0.1, 1.0, 4);
        let con = theory_e_con(m, 0.1, 1.0, 4);
        assert_eq!(eff < con, l < m);
    }
    assert!((theory_e_eff(1, 0.1, 1.0, 4) - 1.0 / (0.1 * 4.0)).abs() < 1e-12);
}

#[test]
fn los_error_lies_along_the_steering_vector() {
    let m = 64;
    let theta = 0.6;
    let a = steering_vector(theta, m).unwrap();
    let h = build_channel(&PathSet::los(theta, C64::new(0.7, 0.1)).unwrap(), m).unwrap();
    let f = frame(4);
    let mut rng = rng_from_seed(9);
    for _ in 0..20 {
        let b = simulate_uplink(&h, &f, &mut rng);
        let err = estimate_gain_los(&b.yt, &f, theta).unwrap().h_hat - h.as_vector();
        let along = &a * (a.dotc(&err) / C64::from(m as f64));
        assert!((&err - along).norm() <= 1e-10 * err.norm().max(1e-300));
    }
}

#[test]
fn pilot_block_must_match_frame() {
    let f = frame(4);
    let yt = issac::CMatrix::zeros(8, 3);
    assert!(matches!(estimate_gain_los(&yt, &f, 0.0), Err(Error::Config(_))));
    assert!(matches!(estimate_gains_multipath(&yt, &f, &[0.0]), Err(Error::Config(_))));
}
