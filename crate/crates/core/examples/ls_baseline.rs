use issac::array::{build_channel, sample_paths};
use issac::conventional::{empirical_expected_snr, ls_estimate, theory_e_con, theory_gamma_con};
use issac::random::{par_trials, rng_from_seed};
use issac::signal::{linear_to_db, simulate_uplink, PilotKind, UplinkFrame};
use issac::Error;

fn main() -> Result<(), Error> {
    let m = 64;
    let h = build_channel(&sample_paths(4, m, &mut rng_from_seed(1))?, m)?;
    println!("  rho   MMSE    theory   SNR(dB)  theory(dB)");
    for rho in [1, 2, 4, 8, 16] {
        let frame = UplinkFrame::from_db(rho, 0, PilotKind::AllOnes, -10.0, -10.0, 1.0)?;
        let errs = par_trials(4000, rho as u64, |_, rng| {
            let b = simulate_uplink(&h, &frame, rng);
            Ok((ls_estimate(&b.yt, &frame)?.h_hat - h.as_vector()).norm_squared())
        })?;
        let mse = errs.iter().sum::<f64>() / errs.len() as f64;
        let snr = empirical_expected_snr(
            &h,
            |rng| Ok(ls_estimate(&simulate_uplink(&h, &frame, rng).yt, &frame)?.v_con),
            frame.pd,
            frame.sigma2,
            4000,
            100 + rho as u64,
        )?;
        let theory = theory_gamma_con(h.norm_sqr(), m, frame.pt, frame.pd, frame.sigma2, rho as f64);
        println!(
            "{rho:5} {mse:8.2} {:8.2} {:9.3} {:10.3}",
            theory_e_con(m, frame.pt, frame.sigma2, rho),
            linear_to_db(snr.mean),
            linear_to_db(theory)
        );
    }
    Ok(())
}
