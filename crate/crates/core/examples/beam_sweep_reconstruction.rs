use issac::array::{build_channel, PathSet};
use issac::doa::sample_covariance;
use issac::frontend::{
    reconstruct_covariance_bsa, reconstruct_digital_signal, sweep_observe, AnalogCodebook, DiagonalLoading,
    SweepSchedule,
};
use issac::linalg::frobenius;
use issac::random::rng_from_seed;
use issac::signal::{simulate_uplink, PilotKind, UplinkFrame};
use issac::{Error, C64};

fn main() -> Result<(), Error> {
    let (m, m_rf) = (16, 4);
    let v = AnalogCodebook::dft(m)?;
    // a DFT beam direction sits inside one sweep block
    let theta = (2.0 / m as f64).asin();
    let h = build_channel(&PathSet::los(theta, C64::new(1.0, 0.0))?, m)?;
    let frame = UplinkFrame::from_db(1, 8000, PilotKind::AllOnes, -10.0, -10.0, 1.0)?;
    let block = simulate_uplink(&h, &frame, &mut rng_from_seed(3));
    let direct = sample_covariance(&block.yd)?;

    // every symbol seen through all M/M_RF blocks, then undone with V^{-H}
    let obs = sweep_observe(&block.yd, &v, m_rf, SweepSchedule::SameSymbol)?;
    let y = reconstruct_digital_signal(&obs, &v)?;
    println!("signal reconstruction error {:.2e}", frobenius(&(&y - &block.yd)) / frobenius(&block.yd));

    // one block per symbol, then the blockwise covariance solve
    let obs = sweep_observe(&block.yd, &v, m_rf, SweepSchedule::PerSymbol)?;
    for delta in [0.0, 1e-3, 1e-1] {
        let r = reconstruct_covariance_bsa(&obs, &v, DiagonalLoading::Relative(delta))?;
        let err = frobenius(&(r.matrix() - direct.matrix())) / frobenius(direct.matrix());
        println!("covariance reconstruction, relative loading {delta:6}: error {err:.4}");
    }
    Ok(())
}
