//! Pilot-only least-squares channel estimation with a matched-filter receiver,
//! the benchmark the ISSAC scheme is compared against.

use crate::array::ChannelVector;
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector};
use crate::random::{par_trials, SimRng};
use crate::signal::UplinkFrame;
use crate::stats::MeanEstimate;

#[derive(Debug, Clone, PartialEq)]
pub struct ConventionalEstimate {
    pub h_hat: CVector,
    /// Unit-norm combiner `h_hat / ||h_hat||`.
    pub v_con: CVector,
}

/// `h_hat = (1 / sqrt(Pt rho^2)) sum_n y_t(n) phi*(n)`.
pub fn ls_estimate(yt: &CMatrix, frame: &UplinkFrame) -> Result<ConventionalEstimate> {
    let rho = frame.rho();
    if rho == 0 {
        return Err(Error::domain("LS estimation needs at least one pilot"));
    }
    if yt.ncols() != rho {
        return Err(Error::config(format!(
            "pilot block has {} columns, frame has {rho} pilots",
            yt.ncols()
        )));
    }
    let mut acc = CVector::zeros(yt.nrows());
    for (n, phi) in frame.pilot().iter().enumerate() {
        acc.axpy(phi.conj(), &yt.column(n), 1.0.into());
    }
    let h_hat = acc.unscale((frame.pt * (rho * rho) as f64).sqrt());
    let norm = h_hat.norm();
    if norm == 0.0 || !norm.is_finite() {
        return Err(Error::numerical("LS channel estimate has zero norm"));
    }
    let v_con = h_hat.unscale(norm);
    Ok(ConventionalEstimate { h_hat, v_con })
}

/// MMSE of the LS estimate, `M sigma^2 / (Pt rho)`.
pub fn theory_e_con(m: usize, pt: f64, sigma2: f64, rho: usize) -> f64 {
    m as f64 * sigma2 / (pt * rho as f64)
}

/// Penalty loss `chi = (1 - 1/M) / (rho SNR_t + 1)` with
/// `SNR_t = Pt ||h||^2 / (M sigma^2)`.
pub fn penalty_loss(h_norm2: f64, m: usize, pt: f64, sigma2: f64, rho: f64) -> f64 {
    let m = m as f64;
    let snr_t = pt * h_norm2 / (m * sigma2);
    (1.0 - 1.0 / m) / (rho * snr_t + 1.0)
}

/// Approximate expected SNR of the LS matched filter,
/// `(Pd ||h||^2 / sigma^2) (1 - chi)`.
///
/// `rho` is real so that non-integer pilot lengths from the overhead formula
/// can be substituted.
pub fn theory_gamma_con(h_norm2: f64, m: usize, pt: f64, pd: f64, sigma2: f64, rho: f64) -> f64 {
    pd * h_norm2 / sigma2 * (1.0 - penalty_loss(h_norm2, m, pt, sigma2, rho))
}

/// Received SNR `Pd |v^H h|^2 / sigma^2` for a given combiner.
pub fn beamformed_snr(v: &CVector, h: &ChannelVector, pd: f64, sigma2: f64) -> f64 {
    pd * v.dotc(h.as_vector()).norm_sqr() / sigma2
}

/// Monte Carlo estimate of `E[Pd |v^H h|^2 / sigma^2]` where the combiner is
/// redrawn by `beamformer` on every trial (fixed channel, random estimation
/// noise).
pub fn empirical_expected_snr<F>(
    h: &ChannelVector,
    beamformer: F,
    pd: f64,
    sigma2: f64,
    trials: usize,
    seed: u64,
) -> Result<MeanEstimate>
where
    F: Fn(&mut SimRng) -> Result<CVector> + Sync,
{
    if trials == 0 {
        return Err(Error::domain("need at least one trial"));
    }
    let samples = par_trials(trials, seed, |_, rng| {
        let v = beamformer(rng)?;
        Ok(beamformed_snr(&v, h, pd, sigma2))
    })?;
    Ok(MeanEstimate::from_samples(&samples))
}
