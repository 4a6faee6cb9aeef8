//! Uplink pilot and data phases observed at the base station.

use std::f64::consts::PI;

use rand::Rng;

use crate::array::ChannelVector;
use crate::error::{Error, Result};
use crate::linalg::{C64, CMatrix};
use crate::random::complex_normal;

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Pilot sequence families. Both are unit modulus, so the energy of a length
/// `rho` sequence is `rho`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PilotKind {
    #[default]
    AllOnes,
    /// `phi(n) = exp(j pi n^2 / rho)`.
    UnitModulusChirp,
}

pub fn gen_pilot(rho: usize, kind: PilotKind) -> Result<Vec<C64>> {
    if rho == 0 {
        return Err(Error::domain("pilot length must be at least 1"));
    }
    Ok(match kind {
        PilotKind::AllOnes => vec![C64::new(1.0, 0.0); rho],
        PilotKind::UnitModulusChirp => (0..rho)
            .map(|n| C64::from_polar(1.0, PI * (n * n) as f64 / rho as f64))
            .collect(),
    })
}

/// One coherence block: `rho` pilots at power `pt` followed by `kappa` data
/// symbols at power `pd`, received in CN(0, sigma2) noise.
#[derive(Debug, Clone, PartialEq)]
pub struct UplinkFrame {
    pilot: Vec<C64>,
    pub kappa: usize,
    pub pt: f64,
    pub pd: f64,
    pub sigma2: f64,
}

impl UplinkFrame {
    pub fn new(pilot: Vec<C64>, kappa: usize, pt: f64, pd: f64, sigma2: f64) -> Result<Self> {
        if !(pt > 0.0 && pt.is_finite() && pd > 0.0 && pd.is_finite()) {
            return Err(Error::domain(format!("transmit powers must be positive, got Pt={pt}, Pd={pd}")));
        }
        if !(sigma2 >= 0.0 && sigma2.is_finite()) {
            return Err(Error::domain(format!("noise variance must be non-negative, got {sigma2}")));
        }
        if !pilot.is_empty() {
            let energy: f64 = pilot.iter().map(|p| p.norm_sqr()).sum();
            let rho = pilot.len() as f64;
            if (energy - rho).abs() > 1e-9 * rho {
                return Err(Error::domain(format!(
                    "pilot energy {energy} differs from its length {rho}"
                )));
            }
        }
        Ok(UplinkFrame { pilot, kappa, pt, pd, sigma2 })
    }

    /// Powers given as transmit SNRs `Pt/sigma2`, `Pd/sigma2` in dB.
    pub fn from_db(
        rho: usize,
        kappa: usize,
        kind: PilotKind,
        pt_db: f64,
        pd_db: f64,
        sigma2: f64,
    ) -> Result<Self> {
        let pilot = if rho == 0 { vec![] } else { gen_pilot(rho, kind)? };
        Self::new(pilot, kappa, sigma2 * db_to_linear(pt_db), sigma2 * db_to_linear(pd_db), sigma2)
    }

    pub fn pilot(&self) -> &[C64] {
        &self.pilot
    }

    pub fn rho(&self) -> usize {
        self.pilot.len()
    }

    pub fn with_kappa(&self, kappa: usize) -> Self {
        UplinkFrame { kappa, ..self.clone() }
    }

    pub fn with_sigma2(&self, sigma2: f64) -> Self {
        UplinkFrame { sigma2, ..self.clone() }
    }
}

/// Observations of one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct ReceivedBlock {
    /// `M x rho` pilot-phase snapshots.
    pub yt: CMatrix,
    /// `M x kappa` data-phase snapshots.
    pub yd: CMatrix,
    /// Transmitted data symbols. Only for checking estimators, which never
    /// read them.
    pub symbols: Vec<C64>,
}

/// Draws the pilot- and data-phase observations
/// `y_t(n) = sqrt(Pt) h phi(n) + u_t(n)` and `y_d(n) = sqrt(Pd) h s(n) + u_d(n)`.
pub fn simulate_uplink<R: Rng + ?Sized>(
    h: &ChannelVector,
    frame: &UplinkFrame,
    rng: &mut R,
) -> ReceivedBlock {
    let h = h.as_vector();
    let m = h.len();
    let sqrt_pt = frame.pt.sqrt();
    let sqrt_pd = frame.pd.sqrt();

    let mut yt = CMatrix::zeros(m, frame.rho());
    for (n, &phi) in frame.pilot.iter().enumerate() {
        let x = phi * sqrt_pt;
        for k in 0..m {
            yt[(k, n)] = h[k] * x + complex_normal(rng, frame.sigma2);
        }
    }

    let symbols: Vec<C64> = (0..frame.kappa).map(|_| complex_normal(rng, 1.0)).collect();
    let mut yd = CMatrix::zeros(m, frame.kappa);
    for (n, &s) in symbols.iter().enumerate() {
        let x = s * sqrt_pd;
        for k in 0..m {
            yd[(k, n)] = h[k] * x + complex_normal(rng, frame.sigma2);
        }
    }
    ReceivedBlock { yt, yd, symbols }
}

/// Receive SNRs without beamforming, `(SNR_t, SNR_d)` with
/// `SNR = P ||h||^2 / (M sigma^2)`.
pub fn nominal_snrs(h: &ChannelVector, frame: &UplinkFrame) -> (f64, f64) {
    let scale = h.norm_sqr() / (h.len() as f64 * frame.sigma2);
    (frame.pt * scale, frame.pd * scale)
}
