//! Closed-form receive-SNR evaluators and their Monte Carlo counterparts.

use crate::array::{build_channel, manifold, steering_vector, PathSet};
use crate::error::{Error, Result};
use crate::gains::{estimate_gain_los, estimate_gains_multipath, IssacEstimate};
use crate::linalg::{C64, CVector};
use crate::pipeline::AngleEstimator;
use crate::random::par_trials;
use crate::signal::{linear_to_db, simulate_uplink, UplinkFrame};
use crate::stats::MeanEstimate;

/// A labelled SNR value.
#[derive(Debug, Clone, PartialEq)]
pub struct SnrReport {
    pub linear: f64,
    pub db: f64,
    pub method: &'static str,
    pub params: Vec<(&'static str, f64)>,
    /// Standard error of `linear` for Monte Carlo values.
    pub std_error: Option<f64>,
}

impl SnrReport {
    pub fn new(method: &'static str, linear: f64, params: Vec<(&'static str, f64)>) -> Self {
        SnrReport { linear, db: linear_to_db(linear), method, params, std_error: None }
    }

    pub fn ci95(&self) -> Option<(f64, f64)> {
        self.std_error.map(|s| (self.linear - 1.96 * s, self.linear + 1.96 * s))
    }
}

fn check_positive(pairs: &[(&str, f64)]) -> Result<()> {
    for &(name, x) in pairs {
        if !(x > 0.0 && x.is_finite()) {
            return Err(Error::domain(format!("{name} must be positive, got {x}")));
        }
    }
    Ok(())
}

/// `gamma_upper = Pd ||h||^2 / sigma^2`.
pub fn gamma_upper(h_norm2: f64, pd: f64, sigma2: f64) -> Result<SnrReport> {
    check_positive(&[("||h||^2", h_norm2), ("Pd", pd), ("sigma2", sigma2)])?;
    Ok(SnrReport::new(
        "upper_bound",
        pd * h_norm2 / sigma2,
        vec![("h_norm2", h_norm2), ("Pd", pd), ("sigma2", sigma2)],
    ))
}

/// Single-path SNR with the beam steered to `theta_hat`,
/// `(Pd ||h||^2 / sigma^2) |a^H(theta_hat) a(theta)|^2 / M^2`.
pub fn gamma_eff_los(theta: f64, theta_hat: f64, h_norm2: f64, m: usize, pd: f64, sigma2: f64) -> Result<SnrReport> {
    let ub = gamma_upper(h_norm2, pd, sigma2)?;
    let a = steering_vector(theta, m)?;
    let b = steering_vector(theta_hat, m)?;
    let ratio = b.dotc(&a).norm_sqr() / (m * m) as f64;
    Ok(SnrReport::new(
        "issac_los",
        ub.linear * ratio,
        vec![("theta", theta), ("theta_hat", theta_hat), ("h_norm2", h_norm2), ("M", m as f64), ("Pd", pd), ("sigma2", sigma2)],
    ))
}

/// Hybrid two-stage SNR with exact angles,
/// `(Pd M ||alpha||^2 / sigma^2) (||alpha||^2 + sigma^2/(M Pt rho)) / (||alpha||^2 + L sigma^2/(M Pt rho))`.
pub fn gamma_eff_hybrid_theory(
    alpha_norm2: f64,
    m: usize,
    l: usize,
    pt: f64,
    pd: f64,
    sigma2: f64,
    rho: f64,
) -> Result<SnrReport> {
    check_positive(&[("||alpha||^2", alpha_norm2), ("Pt", pt), ("Pd", pd), ("sigma2", sigma2), ("rho", rho)])?;
    if m == 0 || l == 0 {
        return Err(Error::domain("M and L must be positive"));
    }
    let mf = m as f64;
    let load = sigma2 / (mf * pt * rho);
    let g = pd * mf * alpha_norm2 / sigma2 * (alpha_norm2 + load) / (alpha_norm2 + l as f64 * load);
    Ok(SnrReport::new(
        "issac_hybrid_theory",
        g,
        vec![("alpha_norm2", alpha_norm2), ("M", mf), ("L", l as f64), ("Pt", pt), ("Pd", pd), ("sigma2", sigma2), ("rho", rho)],
    ))
}

/// SNR lost to gain-estimation noise,
/// `Pd ||alpha||^2 (L-1) / (rho Pt ||alpha||^2 + sigma^2 L / M)`.
pub fn snr_loss_delta(
    alpha_norm2: f64,
    m: usize,
    l: usize,
    pt: f64,
    pd: f64,
    sigma2: f64,
    rho: f64,
) -> Result<SnrReport> {
    check_positive(&[("||alpha||^2", alpha_norm2), ("Pt", pt), ("Pd", pd), ("sigma2", sigma2), ("rho", rho)])?;
    if m == 0 || l == 0 {
        return Err(Error::domain("M and L must be positive"));
    }
    let lf = l as f64;
    let g = pd * alpha_norm2 * (lf - 1.0) / (rho * pt * alpha_norm2 + sigma2 * lf / m as f64);
    Ok(SnrReport::new(
        "snr_loss",
        g,
        vec![("alpha_norm2", alpha_norm2), ("M", m as f64), ("L", lf), ("Pt", pt), ("Pd", pd), ("sigma2", sigma2), ("rho", rho)],
    ))
}

/// Pilot length the LS receiver needs to match the two-stage SNR,
/// `((M-1)/(L-1)) rho_eff + (M-L)/(M SNR_t (L-1))`. Defined for `L >= 2`.
pub fn pilot_overhead_con(m: usize, l: usize, rho_eff: f64, snr_t: f64) -> Result<f64> {
    if l < 2 {
        return Err(Error::domain("pilot overhead is defined for L >= 2"));
    }
    if l > m {
        return Err(Error::domain(format!("L={l} exceeds M={m}")));
    }
    check_positive(&[("rho_eff", rho_eff), ("SNR_t", snr_t)])?;
    let (mf, lf) = (m as f64, l as f64);
    Ok((mf - 1.0) / (lf - 1.0) * rho_eff + (mf - lf) / (mf * snr_t * (lf - 1.0)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrGap {
    pub exact: f64,
    /// Large-`M` limit `M SNR_d / (rho SNR_t + 1)`.
    pub asymptotic: f64,
}

/// Hybrid two-stage SNR minus LS matched-filter SNR for `||h||^2 = M ||alpha||^2`:
/// `M SNR_d (1 - L/M)(rho SNR_t + 1/M) / ((rho SNR_t + L/M)(rho SNR_t + 1))`.
pub fn snr_gap(m: usize, l: usize, rho: f64, snr_t: f64, snr_d: f64) -> Result<SnrGap> {
    check_positive(&[("rho", rho), ("SNR_t", snr_t), ("SNR_d", snr_d)])?;
    if l == 0 || l > m {
        return Err(Error::domain(format!("need 1 <= L <= M, got L={l}, M={m}")));
    }
    let (mf, lf) = (m as f64, l as f64);
    let x = rho * snr_t;
    let exact = mf * snr_d * (1.0 - lf / mf) * (x + 1.0 / mf) / ((x + lf / mf) * (x + 1.0));
    Ok(SnrGap { exact, asymptotic: mf * snr_d / (x + 1.0) })
}

/// Receiver architecture for the beamformer built from the estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Structure {
    /// `v = h_hat / ||h_hat||`.
    Digital,
    /// `V_RF = A(theta_hat) / sqrt(M)`, `v_BB = alpha_hat / ||alpha_hat||`.
    Hybrid,
}

/// Where stage two gets its angles from.
#[derive(Debug, Clone, PartialEq)]
pub enum AngleSource {
    True,
    Estimated(AngleEstimator),
}

/// Fixed channel and frame for the SNR Monte Carlo.
#[derive(Debug, Clone, PartialEq)]
pub struct IssacScenario {
    pub paths: PathSet,
    pub m: usize,
    pub frame: UplinkFrame,
    pub angles: AngleSource,
    /// Simulate noise-free pilots and data (the SNR still uses `frame.sigma2`).
    pub noiseless: bool,
}

/// Two-stage estimate from one frame: angles per the scenario, then gains.
pub fn issac_estimate(
    block: &crate::signal::ReceivedBlock,
    frame: &UplinkFrame,
    angles: &AngleSource,
    true_angles: &[f64],
) -> Result<IssacEstimate> {
    let theta: Vec<f64> = match angles {
        AngleSource::True => true_angles.to_vec(),
        AngleSource::Estimated(est) => est.estimate(block, true_angles.len())?.angles_hat,
    };
    if theta.len() == 1 {
        estimate_gain_los(&block.yt, frame, theta[0])
    } else {
        estimate_gains_multipath(&block.yt, frame, &theta)
    }
}

/// Combiner for `structure` from a two-stage estimate.
pub fn issac_combiner(est: &IssacEstimate, m: usize, structure: Structure) -> Result<CVector> {
    let v = match structure {
        Structure::Digital => est.h_hat.clone(),
        Structure::Hybrid => {
            let norm = est.alpha_hat.norm();
            if !(norm > 0.0) {
                return Err(Error::numerical("estimated gains are all zero"));
            }
            let v_rf = manifold(&est.theta_hat, m)? / C64::from((m as f64).sqrt());
            return Ok(v_rf * est.alpha_hat.unscale(norm));
        }
    };
    let norm = v.norm();
    if !(norm > 0.0 && norm.is_finite()) {
        return Err(Error::numerical("estimated channel has zero norm"));
    }
    Ok(v.unscale(norm))
}

/// Mean of `Pd |w^H h|^2 / sigma^2` over independent frames on a fixed channel.
pub fn empirical_issac_snr(scenario: &IssacScenario, structure: Structure, trials: usize, seed: u64) -> Result<SnrReport> {
    if trials == 0 {
        return Err(Error::domain("need at least one trial"));
    }
    let m = scenario.m;
    let h = build_channel(&scenario.paths, m)?;
    let frame = &scenario.frame;
    let mut sim_frame = frame.clone();
    if scenario.noiseless {
        sim_frame.sigma2 = 0.0;
    }
    if matches!(scenario.angles, AngleSource::True) {
        sim_frame.kappa = 0;
    }
    if let AngleSource::Estimated(est) = &scenario.angles {
        est.validate(scenario.paths.len())?;
    }
    let samples = par_trials(trials, seed, |_, rng| {
        let block = simulate_uplink(&h, &sim_frame, rng);
        let est = issac_estimate(&block, &sim_frame, &scenario.angles, scenario.paths.angles())?;
        let w = issac_combiner(&est, m, structure)?;
        Ok(frame.pd * w.dotc(h.as_vector()).norm_sqr() / frame.sigma2)
    })?;
    let stats = MeanEstimate::from_samples(&samples);
    let label = match structure {
        Structure::Digital => "issac_digital_empirical",
        Structure::Hybrid => "issac_hybrid_empirical",
    };
    let mut report = SnrReport::new(
        label,
        stats.mean,
        vec![("M", m as f64), ("L", scenario.paths.len() as f64), ("rho", frame.rho() as f64), ("trials", trials as f64)],
    );
    report.std_error = Some(stats.std_error);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formula_values() {
        assert!((gamma_upper(64.0, 0.1, 1.0).unwrap().linear - 6.4).abs() < 1e-12);
        let g = gamma_eff_hybrid_theory(4.0, 64, 4, 0.1, 0.1, 1.0, 4.0).unwrap();
        assert!((g.linear - 25.6 * 4.0390625 / 4.15625).abs() < 1e-12);
        assert!((pilot_overhead_con(64, 4, 4.0, 0.1).unwrap() - 87.125).abs() < 1e-12);
        let gap = snr_gap(64, 4, 4.0, 0.1, 0.1).unwrap();
        assert!((gap.exact - 6.4 * (0.9375 * 0.415625) / (0.4625 * 1.4)).abs() < 1e-12);
        assert!((gap.asymptotic - 6.4 / 1.4).abs() < 1e-12);
    }

    #[test]
    fn overhead_needs_two_paths() {
        assert!(matches!(pilot_overhead_con(64, 1, 4.0, 0.1), Err(Error::Domain(_))));
    }

    #[test]
    fn single_path_has_no_loss() {
        assert_eq!(snr_loss_delta(2.0, 16, 1, 0.1, 0.1, 1.0, 4.0).unwrap().linear, 0.0);
    }

    #[test]
    fn db_matches_linear() {
        let r = gamma_upper(10.0, 1.0, 1.0).unwrap();
        assert!((r.db - 10.0).abs() < 1e-12);
    }
}
