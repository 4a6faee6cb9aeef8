use issac::array::{build_channel, PathSet};
use issac::random::rng_from_seed;
use issac::signal::{gen_pilot, nominal_snrs, simulate_uplink, PilotKind, UplinkFrame};
use issac::{Error, C64};

fn main() -> Result<(), Error> {
    let m = 16;
    let h = build_channel(&PathSet::los(0.3, C64::new(0.8, 0.6))?, m)?;

    // rho = 4 pilots then kappa = 200 data symbols, both at -10 dB per element
    let frame = UplinkFrame::from_db(4, 200, PilotKind::UnitModulusChirp, -10.0, -10.0, 1.0)?;
    let block = simulate_uplink(&h, &frame, &mut rng_from_seed(7));
    println!("pilot block {}x{}, data block {}x{}", block.yt.nrows(), block.yt.ncols(), block.yd.nrows(), block.yd.ncols());

    let (snr_t, snr_d) = nominal_snrs(&h, &frame);
    println!("pilot SNR {snr_t:.3}, data SNR {snr_d:.3} (per element)");

    let mean_power = block.yd.norm_squared() / (m * frame.kappa) as f64;
    println!("received data power per element {mean_power:.3}, expected {:.3}", frame.pd + frame.sigma2);

    // noiseless frames return exactly sqrt(P) h times the transmitted symbol
    let quiet = UplinkFrame::new(gen_pilot(2, PilotKind::AllOnes)?, 3, 1.0, 1.0, 0.0)?;
    let b = simulate_uplink(&h, &quiet, &mut rng_from_seed(8));
    let err = (b.yt.column(0) - h.as_vector()).norm();
    println!("noiseless pilot residual {err:.1e}");
    Ok(())
}
