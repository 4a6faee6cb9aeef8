use issac::array::{build_channel, ArrayConfig, PathSet};
use issac::doa::{bartlett_estimate, fbss, music_estimate, sample_covariance, AngleGrid};
use issac::frontend::DiagonalLoading;
use issac::pipeline::{AngleEstimator, FrontEnd};
use issac::random::rng_from_seed;
use issac::signal::{simulate_uplink, PilotKind, UplinkFrame};
use issac::{Error, C64};

fn show(label: &str, angles: &[f64]) {
    let deg: Vec<String> = angles.iter().map(|t| format!("{:7.2}", t.to_degrees())).collect();
    println!("{label:>28}: [{}]", deg.join(", "));
}

fn main() -> Result<(), Error> {
    let m = 64;
    let grid = AngleGrid::for_array(m)?;
    println!("grid: {} points, sine step {:.5}", grid.len(), grid.sin_step());
    let frame = UplinkFrame::from_db(4, 1000, PilotKind::AllOnes, -10.0, -10.0, 1.0)?;
    let mut rng = rng_from_seed(11);

    // line of sight: Bartlett on the data covariance
    let h = build_channel(&PathSet::los(20f64.to_radians(), C64::new(1.0, 0.0))?, m)?;
    let b = simulate_uplink(&h, &frame, &mut rng);
    show("true", &[20f64.to_radians()]);
    show("Bartlett", &bartlett_estimate(&sample_covariance(&b.yd)?, &grid, 1)?.angles_hat);

    // four coherent paths: smoothing restores the rank MUSIC needs
    let truth: Vec<f64> = [-40.0f64, -12.0, 15.0, 38.0].iter().map(|d| d.to_radians()).collect();
    let gains = vec![C64::new(1.0, 0.0), C64::new(0.0, 1.0), C64::new(-0.6, 0.8), C64::new(0.8, -0.6)];
    let h = build_channel(&PathSet::new(truth.clone(), gains)?, m)?;
    let b = simulate_uplink(&h, &frame, &mut rng);
    show("true", &truth);
    show("FBSS + MUSIC", &music_estimate(&fbss(&b.yt, &b.yd, 56, 4)?, 4, &grid)?.angles_hat);

    // the same through a 4-RF-chain hybrid front end
    let array = ArrayConfig::new(m, 4)?;
    let dsr = AngleEstimator::new(array, FrontEnd::SignalReconstruction)?.with_m_sub(56);
    show("signal reconstruction", &dsr.estimate(&b, 4)?.angles_hat);
    let bsa = AngleEstimator::new(array, FrontEnd::CovarianceReconstruction(DiagonalLoading::default()))?.with_m_sub(56);
    show("covariance reconstruction", &bsa.estimate(&b, 4)?.angles_hat);
    Ok(())
}
