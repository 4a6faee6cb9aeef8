//! One-shot angle estimation on recorded snapshots.

use std::path::Path;

use crate::array::ArrayConfig;
use crate::doa::{AngleGrid, DoaResult};
use crate::error::{Error, Result};
use crate::frontend::{reconstruct_covariance_bsa, AnalogCodebook, BeamspaceObservations, DiagonalLoading};
use crate::linalg::{C64, CMatrix};
use crate::pipeline::{default_m_sub, AngleEstimator, FrontEnd};

/// What the rows of the input file hold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SnapshotDomain {
    /// One element-space snapshot per row, `2M` columns.
    Element,
    /// Per-symbol sweep outputs, `2 M_RF` columns; row `n` was observed
    /// through DFT block `n mod (M / M_RF)`.
    Beamspace,
}

/// Reads complex snapshots stored one per row as interleaved
/// `re_0, im_0, re_1, im_1, ...` columns. `#` lines and a non-numeric header
/// row are skipped. Returns a `width x rows` matrix.
pub fn read_snapshots_csv(path: &Path) -> Result<CMatrix> {
    let csv_err = |source| Error::Csv { path: path.to_path_buf(), source };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(csv_err)?;
    let mut cols: Vec<Vec<C64>> = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        let parsed: std::result::Result<Vec<f64>, _> = rec.iter().map(str::parse::<f64>).collect();
        let values = match parsed {
            Ok(v) => v,
            Err(_) if i == 0 => continue,
            Err(_) => {
                return Err(Error::config(format!("{}: row {} is not numeric", path.display(), i + 1)));
            }
        };
        if values.is_empty() || values.len() % 2 != 0 {
            return Err(Error::config(format!(
                "{}: row {} has {} values; expected interleaved re/im pairs",
                path.display(),
                i + 1,
                values.len()
            )));
        }
        cols.push(values.chunks(2).map(|p| C64::new(p[0], p[1])).collect());
    }
    let width = cols.first().map(Vec::len).ok_or_else(|| Error::config(format!("{}: no snapshots", path.display())))?;
    if cols.iter().any(|c| c.len() != width) {
        return Err(Error::config(format!("{}: rows have different lengths", path.display())));
    }
    Ok(CMatrix::from_fn(width, cols.len(), |r, c| cols[c][r]))
}

/// Options for [`estimate_angles`].
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateOptions {
    pub array: ArrayConfig,
    pub l: usize,
    pub domain: SnapshotDomain,
    pub grid_points: Option<usize>,
    pub m_sub: Option<usize>,
    pub loading: DiagonalLoading,
}

/// Estimates `l` angles from snapshots in the given domain.
pub fn estimate_angles(snapshots: &CMatrix, opts: &EstimateOptions) -> Result<DoaResult> {
    let m = opts.array.m;
    let grid = match opts.grid_points {
        Some(n) => AngleGrid::uniform_sin(n)?,
        None => AngleGrid::for_array(m)?,
    };
    let front_end = match opts.domain {
        SnapshotDomain::Element => FrontEnd::Digital,
        SnapshotDomain::Beamspace => FrontEnd::CovarianceReconstruction(opts.loading),
    };
    let est = AngleEstimator::new(opts.array, front_end)?
        .with_grid(grid)
        .with_m_sub(opts.m_sub.unwrap_or_else(|| default_m_sub(m)))
        .with_strict_peaks(true);
    est.validate(opts.l)?;
    match opts.domain {
        SnapshotDomain::Element => {
            if snapshots.nrows() != m {
                return Err(Error::config(format!("snapshots have {} elements, M={m}", snapshots.nrows())));
            }
            est.estimate_snapshots(snapshots, opts.l)
        }
        SnapshotDomain::Beamspace => {
            let m_rf = opts.array.m_rf;
            if snapshots.nrows() != m_rf {
                return Err(Error::config(format!("beamspace rows have {} outputs, M_RF={m_rf}", snapshots.nrows())));
            }
            let blocks = opts.array.sweep_blocks()?;
            if snapshots.ncols() < blocks {
                return Err(Error::config(format!("need at least {blocks} beamspace snapshots")));
            }
            let per_block = (0..blocks)
                .map(|i| snapshots.select_columns((i..snapshots.ncols()).step_by(blocks).collect::<Vec<_>>().iter()))
                .collect();
            let obs = BeamspaceObservations::PerSymbol { blocks: per_block, m_rf };
            let codebook = AnalogCodebook::dft(m)?;
            let r = reconstruct_covariance_bsa(&obs, &codebook, opts.loading)?;
            est.estimate_covariance(&r, opts.l)
        }
    }
}
