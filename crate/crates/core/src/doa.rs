//! Spatial-spectrum angle estimation: sample covariance, Bartlett search,
//! forward-backward spatial smoothing and MUSIC.

use crate::array::steering_from_sin;
use crate::covariance::{CovarianceEstimate, Provenance};
use crate::error::{Error, Result};
pub use crate::linalg::{eig_hermitian, HermitianEigen};
use crate::linalg::{adjoint_mul, hermitize, mul, scaled_gram, C64, CMatrix};

/// Candidate directions, uniform in `sin(theta)`:
/// `s_k = -1 + 2k/(n+1)` for `k = 1..=n`, so grids with `n` and `2n+1`
/// points are nested.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleGrid {
    sines: Vec<f64>,
    angles: Vec<f64>,
}

impl AngleGrid {
    pub fn uniform_sin(points: usize) -> Result<Self> {
        if points < 2 {
            return Err(Error::config(format!("angle grid needs at least 2 points, got {points}")));
        }
        let step = 2.0 / (points + 1) as f64;
        let sines: Vec<f64> = (1..=points).map(|k| -1.0 + step * k as f64).collect();
        let angles = sines.iter().map(|s| s.asin()).collect();
        Ok(AngleGrid { sines, angles })
    }

    /// Default grid for an `m`-element array: `4m` points.
    pub fn for_array(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::config("array must have at least one element"));
        }
        Self::uniform_sin((4 * m).max(2))
    }

    /// Grid angles in radians, ascending.
    pub fn values(&self) -> &[f64] {
        &self.angles
    }

    pub fn sines(&self) -> &[f64] {
        &self.sines
    }

    /// Spacing in `sin(theta)`. "Within one grid step" is measured here.
    pub fn sin_step(&self) -> f64 {
        2.0 / (self.sines.len() + 1) as f64
    }

    pub fn len(&self) -> usize {
        self.sines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sines.is_empty()
    }

    /// `|sin(a) - sin(b)| <= step`.
    pub fn within_step(&self, a: f64, b: f64) -> bool {
        (a.sin() - b.sin()).abs() <= self.sin_step() * (1.0 + 1e-12)
    }

    fn check_for(&self, dim: usize) -> Result<()> {
        if self.len() < 2 * dim {
            return Err(Error::config(format!(
                "angle grid has {} points, need at least {} for a {dim}-element covariance",
                self.len(),
                2 * dim
            )));
        }
        Ok(())
    }

    fn steering(&self, dim: usize) -> CMatrix {
        let mut a = CMatrix::zeros(dim, self.len());
        for (j, &s) in self.sines.iter().enumerate() {
            a.set_column(j, &steering_from_sin(s, dim));
        }
        a
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DoaMethod {
    Bartlett,
    Music,
}

/// Estimated angles with the spectrum they were picked from.
#[derive(Debug, Clone, PartialEq)]
pub struct DoaResult {
    /// Radians, ascending.
    pub angles_hat: Vec<f64>,
    /// One value per grid point.
    pub spectrum: Vec<f64>,
    pub method: DoaMethod,
}

impl DoaResult {
    fn from_indices(grid: &AngleGrid, spectrum: Vec<f64>, idx: &[usize], method: DoaMethod) -> Self {
        let mut angles_hat: Vec<f64> = idx.iter().map(|&i| grid.values()[i]).collect();
        angles_hat.sort_by(f64::total_cmp);
        DoaResult { angles_hat, spectrum, method }
    }
}

/// `R = (1/N) sum_n y(n) y(n)^H`.
pub fn sample_covariance(snapshots: &CMatrix) -> Result<CovarianceEstimate> {
    if snapshots.ncols() == 0 {
        return Err(Error::domain("sample covariance needs at least one snapshot"));
    }
    let r = scaled_gram(snapshots, snapshots.ncols() as f64);
    CovarianceEstimate::new(r, Provenance::Direct)
}

/// Indices of the strict interior local maxima, highest first, ties broken
/// toward the smaller angle.
fn strict_peaks(spectrum: &[f64]) -> Vec<usize> {
    let mut peaks: Vec<usize> = (1..spectrum.len().saturating_sub(1))
        .filter(|&i| spectrum[i] > spectrum[i - 1] && spectrum[i] > spectrum[i + 1])
        .collect();
    peaks.sort_by(|&a, &b| spectrum[b].total_cmp(&spectrum[a]).then(a.cmp(&b)));
    peaks
}

/// The `l` highest strict local maxima.
pub fn pick_peaks(spectrum: &[f64], l: usize) -> Result<Vec<usize>> {
    let peaks = strict_peaks(spectrum);
    if peaks.len() < l {
        return Err(Error::InsufficientPeaks { found: peaks.len(), requested: l });
    }
    Ok(peaks[..l].to_vec())
}

/// Like [`pick_peaks`], but tops up with the largest remaining grid values
/// when there are too few local maxima.
pub fn pick_peaks_or_top(spectrum: &[f64], l: usize) -> Vec<usize> {
    let mut chosen = strict_peaks(spectrum);
    chosen.truncate(l);
    if chosen.len() < l {
        let mut rest: Vec<usize> = (0..spectrum.len()).filter(|i| !chosen.contains(i)).collect();
        rest.sort_by(|&a, &b| spectrum[b].total_cmp(&spectrum[a]).then(a.cmp(&b)));
        chosen.extend(rest.into_iter().take(l - chosen.len()));
    }
    chosen
}

/// `P(theta) = a^H(theta) R a(theta)` on the grid.
pub fn bartlett_spectrum(r: &CovarianceEstimate, grid: &AngleGrid) -> Vec<f64> {
    let a = grid.steering(r.dim());
    let ra = mul(r.matrix(), &a);
    (0..grid.len()).map(|j| a.column(j).dotc(&ra.column(j)).re).collect()
}

pub fn bartlett_estimate(r: &CovarianceEstimate, grid: &AngleGrid, l: usize) -> Result<DoaResult> {
    if l == 0 {
        return Err(Error::domain("need at least one peak"));
    }
    grid.check_for(r.dim())?;
    let spectrum = bartlett_spectrum(r, grid);
    let idx = pick_peaks(&spectrum, l)?;
    Ok(DoaResult::from_indices(grid, spectrum, &idx, DoaMethod::Bartlett))
}

/// Checks `1 <= M_sub <= M`, `M_sub >= L+1` and `2G >= L` with
/// `G = M - M_sub + 1`.
pub fn check_smoothing(m: usize, m_sub: usize, l: usize) -> Result<()> {
    if m_sub == 0 || m_sub > m {
        return Err(Error::config(format!("subarray size {m_sub} must lie in 1..={m}")));
    }
    let g = m - m_sub + 1;
    if m_sub < l + 1 || 2 * g < l {
        return Err(Error::config(format!(
            "subarray size {m_sub} cannot resolve {l} coherent paths on {m} elements \
             (need M_sub >= L+1 and 2(M - M_sub + 1) >= L)"
        )));
    }
    Ok(())
}

/// Forward-backward smoothing of a full covariance: the average of the
/// `G = M - M_sub + 1` principal sub-blocks, then `(R_f + Q conj(R_f) Q) / 2`.
pub fn smooth_covariance(r: &CovarianceEstimate, m_sub: usize) -> Result<CovarianceEstimate> {
    let m = r.dim();
    if m_sub == 0 || m_sub > m {
        return Err(Error::config(format!("subarray size {m_sub} must lie in 1..={m}")));
    }
    let g = m - m_sub + 1;
    let full = r.matrix();
    let mut rf = CMatrix::zeros(m_sub, m_sub);
    for k in 0..g {
        rf += full.view((k, k), (m_sub, m_sub));
    }
    rf /= C64::from(g as f64);
    let n = m_sub;
    let rb = CMatrix::from_fn(n, n, |i, j| rf[(n - 1 - i, n - 1 - j)].conj());
    let bi = (rf + rb).scale(0.5);
    CovarianceEstimate::new(hermitize(&bi), Provenance::Smoothed)
}

/// Smoothed covariance from pooled pilot and data snapshots, normalized by
/// `1/(rho + kappa)`.
pub fn fbss(yt: &CMatrix, yd: &CMatrix, m_sub: usize, l: usize) -> Result<CovarianceEstimate> {
    if yt.nrows() != yd.nrows() {
        return Err(Error::config(format!(
            "pilot block has {} rows, data block {}",
            yt.nrows(),
            yd.nrows()
        )));
    }
    let m = yt.nrows();
    check_smoothing(m, m_sub, l)?;
    let n = yt.ncols() + yd.ncols();
    if n == 0 {
        return Err(Error::domain("smoothing needs at least one snapshot"));
    }
    let mut pooled = CMatrix::zeros(m, n);
    pooled.columns_mut(0, yt.ncols()).copy_from(yt);
    pooled.columns_mut(yt.ncols(), yd.ncols()).copy_from(yd);
    let r = scaled_gram(&pooled, n as f64);
    smooth_covariance(&CovarianceEstimate::new(r, Provenance::Direct)?, m_sub)
}

/// `1 / ||E_n^H a(theta)||^2` on the grid, noise subspace of dimension
/// `dim - l`.
pub fn music_spectrum(r: &CovarianceEstimate, l: usize, grid: &AngleGrid) -> Result<Vec<f64>> {
    music_spectrum_at(r, l, grid.sines())
}

/// MUSIC pseudospectrum at arbitrary directions given by their sines.
pub fn music_spectrum_at(r: &CovarianceEstimate, l: usize, sines: &[f64]) -> Result<Vec<f64>> {
    let n = r.dim();
    if l == 0 || l >= n {
        return Err(Error::config(format!("MUSIC needs 1 <= L < {n}, got L={l}")));
    }
    let eig = eig_hermitian(r.matrix())?;
    let en = eig.smallest(n - l);
    let mut a = CMatrix::zeros(n, sines.len());
    for (j, &s) in sines.iter().enumerate() {
        a.set_column(j, &steering_from_sin(s, n));
    }
    let proj = adjoint_mul(&en, &a);
    Ok((0..sines.len())
        .map(|j| {
            let d: f64 = proj.column(j).iter().map(|z| z.norm_sqr()).sum();
            1.0 / d.max(f64::MIN_POSITIVE)
        })
        .collect())
}

pub fn music_estimate(r: &CovarianceEstimate, l: usize, grid: &AngleGrid) -> Result<DoaResult> {
    grid.check_for(r.dim())?;
    let spectrum = music_spectrum(r, l, grid)?;
    let idx = pick_peaks(&spectrum, l)?;
    Ok(DoaResult::from_indices(grid, spectrum, &idx, DoaMethod::Music))
}

/// Recovers a [`DoaResult`] from a spectrum with the top-value fallback.
pub fn result_with_fallback(grid: &AngleGrid, spectrum: Vec<f64>, l: usize, method: DoaMethod) -> DoaResult {
    let idx = pick_peaks_or_top(&spectrum, l);
    DoaResult::from_indices(grid, spectrum, &idx, method)
}

/// Mean squared angular error in degrees^2 under the best assignment of
/// estimates to true angles. For squared error on a line the best assignment
/// pairs the sorted lists.
pub fn match_angles(theta_hat: &[f64], theta_true: &[f64]) -> Result<f64> {
    if theta_hat.len() != theta_true.len() {
        return Err(Error::domain(format!(
            "cannot match {} estimates to {} angles",
            theta_hat.len(),
            theta_true.len()
        )));
    }
    if theta_hat.is_empty() {
        return Ok(0.0);
    }
    let mut a = theta_hat.to_vec();
    let mut b = theta_true.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let sum: f64 = a.iter().zip(&b).map(|(x, y)| (x - y).to_degrees().powi(2)).sum();
    Ok(sum / a.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids_nest() {
        let a = AngleGrid::uniform_sin(7).unwrap();
        let b = AngleGrid::uniform_sin(15).unwrap();
        for (i, s) in a.sines().iter().enumerate() {
            assert!((s - b.sines()[2 * i + 1]).abs() < 1e-15);
        }
    }

    #[test]
    fn identity_has_no_bartlett_peaks() {
        let r = CovarianceEstimate::new(CMatrix::identity(8, 8), Provenance::Direct).unwrap();
        let grid = AngleGrid::for_array(8).unwrap();
        assert!(bartlett_spectrum(&r, &grid).iter().all(|p| (p - 8.0).abs() < 1e-12));
        assert!(matches!(bartlett_estimate(&r, &grid, 1), Err(Error::InsufficientPeaks { .. })));
    }

    #[test]
    fn peaks_tie_toward_smaller_angle() {
        let s = [0.0, 2.0, 0.0, 2.0, 0.0, 1.0, 0.0];
        assert_eq!(pick_peaks(&s, 1).unwrap(), vec![1]);
        assert_eq!(pick_peaks(&s, 3).unwrap(), vec![1, 3, 5]);
    }

    #[test]
    fn endpoints_are_not_peaks() {
        assert!(pick_peaks(&[3.0, 1.0, 0.0], 1).is_err());
        assert_eq!(pick_peaks_or_top(&[3.0, 1.0, 0.0], 1), vec![0]);
    }

    #[test]
    fn match_angles_examples() {
        let d = |x: f64| x.to_radians();
        assert_eq!(match_angles(&[d(10.0), d(20.0)], &[d(10.0), d(20.0)]).unwrap(), 0.0);
        assert!(match_angles(&[d(10.0), d(20.0)], &[d(20.0), d(10.0)]).unwrap() < 1e-20);
        let e = match_angles(&[d(10.0), d(20.0)], &[d(11.0), d(19.0)]).unwrap();
        assert!((e - 1.0).abs() < 1e-12);
        assert!(matches!(match_angles(&[0.0], &[]), Err(Error::Domain(_))));
    }

    #[test]
    fn rank_condition() {
        assert!(check_smoothing(64, 56, 4).is_ok());
        assert!(check_smoothing(8, 4, 4).is_err());
        assert!(check_smoothing(8, 8, 4).is_err());
        assert!(check_smoothing(8, 9, 1).is_err());
    }
}
