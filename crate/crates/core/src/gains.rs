//! Path-gain recovery from a short pilot burst once the angles are known.

use crate::array::manifold;
use crate::error::{Error, Result};
use crate::linalg::{C64, CMatrix, CVector};
use crate::signal::UplinkFrame;

#[derive(Debug, Clone, PartialEq)]
pub struct IssacEstimate {
    pub theta_hat: Vec<f64>,
    pub alpha_hat: CVector,
    /// `A(theta_hat) alpha_hat`.
    pub h_hat: CVector,
}

/// `sum_n y_t(n) phi*(n)`, checking the pilot block against the frame.
fn pilot_correlate(yt: &CMatrix, frame: &UplinkFrame) -> Result<CVector> {
    let rho = frame.rho();
    if rho == 0 {
        return Err(Error::domain("gain estimation needs at least one pilot"));
    }
    if yt.ncols() != rho {
        return Err(Error::config(format!(
            "pilot block has {} columns, frame has {rho} pilots",
            yt.ncols()
        )));
    }
    let mut acc = CVector::zeros(yt.nrows());
    for (n, phi) in frame.pilot().iter().enumerate() {
        acc.axpy(phi.conj(), &yt.column(n), C64::from(1.0));
    }
    Ok(acc)
}

/// Single-path gain: steer the pilots with `a(theta_hat)/sqrt(M)`, project on
/// the pilot, and take `alpha_hat = y' / sqrt(M)`.
pub fn estimate_gain_los(yt: &CMatrix, frame: &UplinkFrame, theta_hat: f64) -> Result<IssacEstimate> {
    let m = yt.nrows();
    let a = manifold(&[theta_hat], m)?;
    let a = a.column(0);
    let acc = pilot_correlate(yt, frame)?;
    let mf = (m as f64).sqrt();
    let y_prime = a.dotc(&acc) / C64::from(frame.rho() as f64 * frame.pt.sqrt() * mf);
    let alpha = y_prime / mf;
    Ok(IssacEstimate {
        theta_hat: vec![theta_hat],
        alpha_hat: CVector::from_element(1, alpha),
        h_hat: a.into_owned() * alpha,
    })
}

/// Multipath gains: beamform the pilots toward every estimated path,
/// `y_l = (1/(rho sqrt(M))) sum_n a^H(theta_l) y_t(n) phi*(n)`, then solve
/// `alpha_hat = (sqrt(M)/sqrt(Pt)) (A^H A)^{-1} y` with the exact Gram matrix.
pub fn estimate_gains_multipath(yt: &CMatrix, frame: &UplinkFrame, theta_hat: &[f64]) -> Result<IssacEstimate> {
    if theta_hat.is_empty() {
        return Err(Error::domain("need at least one estimated angle"));
    }
    let m = yt.nrows();
    let a = manifold(theta_hat, m)?;
    let acc = pilot_correlate(yt, frame)?;
    let mf = (m as f64).sqrt();
    let y_mp = a.adjoint() * acc / C64::from(frame.rho() as f64 * mf);

    let gram = a.adjoint() * &a;
    let scale = (0..gram.nrows()).map(|i| gram[(i, i)].re).fold(0.0, f64::max);
    let chol = gram
        .cholesky()
        .ok_or_else(|| Error::numerical("steering Gram matrix is singular; estimated angles coincide"))?;
    let min_pivot = chol.l_dirty().diagonal().iter().map(|p| p.re).fold(f64::INFINITY, f64::min);
    if min_pivot * min_pivot <= 1e-12 * scale {
        return Err(Error::numerical("steering Gram matrix is singular; estimated angles coincide"));
    }
    let alpha_hat = chol.solve(&y_mp) * C64::from(mf / frame.pt.sqrt());
    let h_hat = &a * &alpha_hat;
    Ok(IssacEstimate { theta_hat: theta_hat.to_vec(), alpha_hat, h_hat })
}

/// Channel MMSE of the two-stage estimate with exact angles,
/// `L sigma^2 / (Pt rho)`.
pub fn theory_e_eff(l: usize, pt: f64, sigma2: f64, rho: usize) -> f64 {
    l as f64 * sigma2 / (pt * rho as f64)
}
