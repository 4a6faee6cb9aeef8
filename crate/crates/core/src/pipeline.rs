//! Angle estimation from one received frame, dispatching on the receiver
//! front end and the number of paths.

use std::sync::Arc;

use crate::array::ArrayConfig;
use crate::covariance::CovarianceEstimate;
use crate::doa::{
    bartlett_spectrum, check_smoothing, fbss, music_spectrum, pick_peaks, result_with_fallback,
    sample_covariance, smooth_covariance, AngleGrid, DoaMethod, DoaResult,
};
use crate::error::{Error, Result};
use crate::frontend::{
    reconstruct_covariance_bsa, reconstruct_digital_signal, sweep_observe, AnalogCodebook, DiagonalLoading,
    SweepSchedule,
};
use crate::linalg::CMatrix;
use crate::signal::ReceivedBlock;

/// How element-space information reaches the angle estimator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FrontEnd {
    /// One RF chain per element.
    Digital,
    /// Same-symbol beam sweep, then inversion of the codebook.
    SignalReconstruction,
    /// Per-symbol beam sweep of the data phase, then the blockwise covariance
    /// solve.
    CovarianceReconstruction(DiagonalLoading),
}

/// Default subarray size: `M - 8` when that leaves room, otherwise three
/// quarters of the array.
pub fn default_m_sub(m: usize) -> usize {
    if m >= 16 {
        m - 8
    } else {
        (3 * m / 4).max(1)
    }
}

/// Bartlett for a single path, FBSS + MUSIC otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleEstimator {
    pub array: ArrayConfig,
    pub front_end: FrontEnd,
    pub grid: AngleGrid,
    pub m_sub: usize,
    /// Propagate [`Error::InsufficientPeaks`] instead of topping up with the
    /// largest grid values.
    pub strict_peaks: bool,
    codebook: Option<Arc<AnalogCodebook>>,
}

impl AngleEstimator {
    /// Defaults for `array`: its natural grid and `M_sub`, lenient peaks.
    pub fn new(array: ArrayConfig, front_end: FrontEnd) -> Result<Self> {
        Ok(AngleEstimator {
            array,
            front_end,
            grid: AngleGrid::for_array(array.m)?,
            m_sub: default_m_sub(array.m),
            strict_peaks: false,
            codebook: match front_end {
                FrontEnd::Digital => None,
                _ => Some(Arc::new(AnalogCodebook::dft(array.m)?)),
            },
        })
    }

    pub fn with_grid(mut self, grid: AngleGrid) -> Self {
        self.grid = grid;
        self
    }

    pub fn with_m_sub(mut self, m_sub: usize) -> Self {
        self.m_sub = m_sub;
        self
    }

    pub fn with_strict_peaks(mut self, strict: bool) -> Self {
        self.strict_peaks = strict;
        self
    }

    fn codebook(&self) -> Result<Arc<AnalogCodebook>> {
        match &self.codebook {
            Some(c) if c.m() == self.array.m => Ok(Arc::clone(c)),
            _ => Ok(Arc::new(AnalogCodebook::dft(self.array.m)?)),
        }
    }

    /// Rejects settings that cannot work before any data is touched.
    pub fn validate(&self, l: usize) -> Result<()> {
        if l == 0 {
            return Err(Error::config("need at least one path"));
        }
        let m = self.array.m;
        if !matches!(self.front_end, FrontEnd::Digital) {
            self.array.sweep_blocks()?;
        }
        let dim = if l == 1 {
            m
        } else {
            check_smoothing(m, self.m_sub, l)?;
            self.m_sub
        };
        if self.grid.len() < 2 * dim {
            return Err(Error::config(format!(
                "angle grid has {} points, need at least {}",
                self.grid.len(),
                2 * dim
            )));
        }
        Ok(())
    }

    fn element_space(&self, y: &CMatrix, codebook: &AnalogCodebook) -> Result<CMatrix> {
        let obs = sweep_observe(y, codebook, self.array.m_rf, SweepSchedule::SameSymbol)?;
        reconstruct_digital_signal(&obs, codebook)
    }

    pub fn estimate(&self, block: &ReceivedBlock, l: usize) -> Result<DoaResult> {
        self.validate(l)?;
        if block.yd.nrows() != self.array.m || block.yt.nrows() != self.array.m {
            return Err(Error::config(format!(
                "frame has {} elements, array has {}",
                block.yd.nrows(),
                self.array.m
            )));
        }
        let (r, method) = match self.front_end {
            FrontEnd::Digital => self.covariance(&block.yt, &block.yd, l)?,
            FrontEnd::SignalReconstruction => {
                let codebook = self.codebook()?;
                let yt = self.element_space(&block.yt, &codebook)?;
                let yd = self.element_space(&block.yd, &codebook)?;
                self.covariance(&yt, &yd, l)?
            }
            FrontEnd::CovarianceReconstruction(loading) => {
                let codebook = self.codebook()?;
                let obs = sweep_observe(&block.yd, &codebook, self.array.m_rf, SweepSchedule::PerSymbol)?;
                let r = reconstruct_covariance_bsa(&obs, &codebook, loading)?;
                return self.estimate_covariance(&r, l);
            }
        };
        self.search(&r, l, method)
    }

    /// Estimates from a full-array covariance: Bartlett for one path,
    /// smoothing and MUSIC otherwise.
    pub fn estimate_covariance(&self, r: &CovarianceEstimate, l: usize) -> Result<DoaResult> {
        self.validate(l)?;
        if r.dim() != self.array.m {
            return Err(Error::config(format!("covariance is {0}x{0}, array has {1} elements", r.dim(), self.array.m)));
        }
        if l == 1 {
            self.search(r, l, DoaMethod::Bartlett)
        } else {
            self.search(&smooth_covariance(r, self.m_sub)?, l, DoaMethod::Music)
        }
    }

    /// Estimates from element-space snapshots alone (no pilot phase).
    pub fn estimate_snapshots(&self, snapshots: &CMatrix, l: usize) -> Result<DoaResult> {
        self.validate(l)?;
        let empty = CMatrix::zeros(snapshots.nrows(), 0);
        let (r, method) = self.covariance(&empty, snapshots, l)?;
        self.search(&r, l, method)
    }

    fn covariance(&self, yt: &CMatrix, yd: &CMatrix, l: usize) -> Result<(CovarianceEstimate, DoaMethod)> {
        if l == 1 {
            Ok((sample_covariance(yd)?, DoaMethod::Bartlett))
        } else {
            Ok((fbss(yt, yd, self.m_sub, l)?, DoaMethod::Music))
        }
    }

    fn search(&self, r: &CovarianceEstimate, l: usize, method: DoaMethod) -> Result<DoaResult> {
        let spectrum = match method {
            DoaMethod::Bartlett => bartlett_spectrum(r, &self.grid),
            DoaMethod::Music => music_spectrum(r, l, &self.grid)?,
        };
        if self.strict_peaks {
            pick_peaks(&spectrum, l)?;
        }
        Ok(result_with_fallback(&self.grid, spectrum, l, method))
    }
}
