use crate::error::{Error, Result};
use crate::linalg::{hermitian_deviation, hermitize, CMatrix};

/// Where a covariance estimate came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    /// Sample covariance of element-space snapshots.
    Direct,
    /// Sample covariance of snapshots rebuilt from beamspace sweeps.
    SignalReconstructed,
    /// Solved from blockwise beamspace covariances (beam sweeping).
    BsaReconstructed,
    /// Forward-backward spatially smoothed.
    Smoothed,
}

/// Hermitian spatial covariance with its provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceEstimate {
    matrix: CMatrix,
    provenance: Provenance,
}

impl CovarianceEstimate {
    /// Accepts `matrix` if it is square and Hermitian to `1e-12` relative, and
    /// stores its exactly Hermitian part.
    pub fn new(matrix: CMatrix, provenance: Provenance) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() == 0 {
            return Err(Error::domain(format!(
                "covariance must be square and non-empty, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let dev = hermitian_deviation(&matrix);
        if dev > 1e-12 {
            return Err(Error::domain(format!("covariance is not Hermitian (deviation {dev:.3e})")));
        }
        Ok(CovarianceEstimate { matrix: hermitize(&matrix), provenance })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn with_provenance(self, provenance: Provenance) -> Self {
        CovarianceEstimate { provenance, ..self }
    }
}
