use issac::array::PathSet;
use issac::conventional::theory_gamma_con;
use issac::metrics::{
    empirical_issac_snr, gamma_eff_hybrid_theory, gamma_upper, pilot_overhead_con, snr_gap, snr_loss_delta,
    AngleSource, IssacScenario, Structure,
};
use issac::signal::{linear_to_db, PilotKind, UplinkFrame};
use issac::{Error, C64};

fn main() -> Result<(), Error> {
    let (m, l, rho, pt, pd) = (64, 4, 4.0, 0.1, 0.1);
    let a2 = 4.0;
    let h2 = m as f64 * a2;
    println!("upper bound    {:7.3} dB", gamma_upper(h2, pd, 1.0)?.db);
    println!("two-stage      {:7.3} dB", gamma_eff_hybrid_theory(a2, m, l, pt, pd, 1.0, rho)?.db);
    println!("LS             {:7.3} dB", linear_to_db(theory_gamma_con(h2, m, pt, pd, 1.0, rho)));
    println!("estimation loss {:.3} (linear)", snr_loss_delta(a2, m, l, pt, pd, 1.0, rho)?.linear);

    // pilots the LS receiver needs to catch up, per unit-energy path gain
    for rho_eff in [1.0, 2.0, 4.0, 8.0] {
        println!("rho_eff {rho_eff:3} -> LS needs {:8.3}", pilot_overhead_con(m, l, rho_eff, pt)?);
    }
    for m in [16, 64, 256, 1024] {
        let g = snr_gap(m, l, rho, pt, pd)?;
        println!("M={m:5}: gap {:8.3}, large-M limit {:8.3}", g.exact, g.asymptotic);
    }

    // Monte Carlo check of the hybrid formula
    let angles = [-40.0f64, -12.0, 15.0, 38.0].iter().map(|d| d.to_radians()).collect();
    let gains = vec![C64::new(1.0, 0.0), C64::new(0.0, 1.0), C64::new(-0.6, 0.8), C64::new(0.8, -0.6)];
    let scenario = IssacScenario {
        paths: PathSet::new(angles, gains)?,
        m,
        frame: UplinkFrame::from_db(4, 0, PilotKind::AllOnes, -10.0, -10.0, 1.0)?,
        angles: AngleSource::True,
        noiseless: false,
    };
    let emp = empirical_issac_snr(&scenario, Structure::Hybrid, 5000, 1)?;
    let se = emp.std_error.unwrap_or(0.0);
    let theory = gamma_eff_hybrid_theory(scenario.paths.gain_energy(), m, l, pt, pd, 1.0, rho)?;
    println!("hybrid empirical {:.3} +- {:.3}, theory {:.3}", emp.linear, 1.96 * se, theory.linear);
    Ok(())
}
