use issac::array::{build_channel, sample_paths};
use issac::conventional::{ls_estimate, theory_e_con};
use issac::gains::{estimate_gains_multipath, theory_e_eff};
use issac::random::{par_trials, rng_from_seed};
use issac::signal::{simulate_uplink, PilotKind, UplinkFrame};
use issac::Error;

fn main() -> Result<(), Error> {
    let m = 64;
    let paths = sample_paths(4, m, &mut rng_from_seed(5))?;
    let h = build_channel(&paths, m)?;
    let frame = UplinkFrame::from_db(4, 0, PilotKind::AllOnes, -10.0, -10.0, 1.0)?;

    // angles known, only the four gains are fitted to the pilots
    let errs = par_trials(10_000, 6, |_, rng| {
        let b = simulate_uplink(&h, &frame, rng);
        let con = (ls_estimate(&b.yt, &frame)?.h_hat - h.as_vector()).norm_squared();
        let two = (estimate_gains_multipath(&b.yt, &frame, paths.angles())?.h_hat - h.as_vector()).norm_squared();
        Ok((con, two))
    })?;
    let n = errs.len() as f64;
    let con = errs.iter().map(|e| e.0).sum::<f64>() / n;
    let two = errs.iter().map(|e| e.1).sum::<f64>() / n;
    println!("LS MMSE        {con:8.3}  (theory {:.3})", theory_e_con(m, frame.pt, 1.0, 4));
    println!("two-stage MMSE {two:8.3}  (theory {:.3})", theory_e_eff(4, frame.pt, 1.0, 4));
    println!("improvement    {:8.2}x (M/L = {})", con / two, m / 4);

    let one = simulate_uplink(&h, &frame, &mut rng_from_seed(9));
    let est = estimate_gains_multipath(&one.yt, &frame, paths.angles())?;
    for (a, g) in est.alpha_hat.iter().zip(paths.gains()) {
        println!("alpha {:+.3}{:+.3}j  estimate {:+.3}{:+.3}j", g.re, g.im, a.re, a.im);
    }
    Ok(())
}
