//! Analog DFT codebook, beam sweeping, and recovery of element-space
//! observations or covariance from RF-chain-limited outputs.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, Mutex, OnceLock};

use crate::array::ArrayConfig;
use crate::covariance::{CovarianceEstimate, Provenance};
use crate::error::{Error, Result};
use crate::linalg::{adjoint_mul, hermitize, mul, scaled_gram, unvec, C64, CMatrix, CVector};

/// Phase-shifter codebook `V` (M x M) whose column groups of width `M_RF`
/// are the analog combiners applied in turn.
#[derive(Debug, Clone)]
pub struct AnalogCodebook {
    v: CMatrix,
    /// `(V^H)^{-1}`, computed on first use; `None` if `V` is singular.
    inv_adjoint: OnceLock<Option<CMatrix>>,
}

impl PartialEq for AnalogCodebook {
    fn eq(&self, other: &Self) -> bool {
        self.v == other.v
    }
}

impl AnalogCodebook {
    /// `V[m, n] = e^{j 2 pi m n / M} / sqrt(M)`.
    pub fn dft(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::domain("codebook needs M >= 1"));
        }
        let scale = 1.0 / (m as f64).sqrt();
        let v = CMatrix::from_fn(m, m, |r, c| {
            // reduce the exponent mod M so large M keeps full phase accuracy
            let k = (r * c) % m;
            C64::from_polar(scale, 2.0 * PI * k as f64 / m as f64)
        });
        Ok(AnalogCodebook { v, inv_adjoint: OnceLock::new() })
    }

    /// Any square codebook with constant-modulus entries `1/sqrt(M)`.
    pub fn from_matrix(v: CMatrix) -> Result<Self> {
        let m = v.nrows();
        if m == 0 || !v.is_square() {
            return Err(Error::config(format!("codebook must be square, got {}x{}", v.nrows(), v.ncols())));
        }
        let target = 1.0 / (m as f64).sqrt();
        if v.iter().any(|x| (x.norm() - target).abs() > 1e-12) {
            return Err(Error::domain("codebook entries must all have magnitude 1/sqrt(M)"));
        }
        Ok(AnalogCodebook { v, inv_adjoint: OnceLock::new() })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.v
    }

    pub fn m(&self) -> usize {
        self.v.nrows()
    }

    /// Block `i` (zero based): columns `i*M_RF .. (i+1)*M_RF`.
    pub fn block(&self, i: usize, m_rf: usize) -> Result<CMatrix> {
        let blocks = ArrayConfig::new(self.m(), m_rf)?.sweep_blocks()?;
        if i >= blocks {
            return Err(Error::config(format!("block {i} out of range for {blocks} blocks")));
        }
        Ok(self.v.columns(i * m_rf, m_rf).into_owned())
    }

    /// `(V^H)^{-1}` by fully pivoted LU.
    pub fn inverse_adjoint(&self) -> Result<&CMatrix> {
        self.inv_adjoint
            .get_or_init(|| {
                let lu = self.v.adjoint().full_piv_lu();
                let pivots = lu.u().diagonal();
                let max = pivots.iter().map(|p| p.norm()).fold(0.0, f64::max);
                let min = pivots.iter().map(|p| p.norm()).fold(f64::INFINITY, f64::min);
                if !(max > 0.0) || min <= 1e-12 * max {
                    return None;
                }
                lu.try_inverse()
            })
            .as_ref()
            .ok_or_else(|| Error::numerical("codebook is rank deficient"))
    }

    fn fingerprint(&self) -> u64 {
        let mut h = std::collections::hash_map::DefaultHasher::new();
        self.m().hash(&mut h);
        for x in self.v.iter() {
            x.re.to_bits().hash(&mut h);
            x.im.to_bits().hash(&mut h);
        }
        h.finish()
    }
}

/// How data symbols meet the analog sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepSchedule {
    /// Every block observes the same symbol, so one symbol yields all
    /// `M / M_RF` block outputs.
    SameSymbol,
    /// Symbol `n` is observed through block `n mod (M / M_RF)` only.
    PerSymbol,
}

/// RF-chain outputs of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub enum BeamspaceObservations {
    /// `M x N`: column `n` stacks the outputs of all blocks for symbol `n`,
    /// block `i` in rows `i*M_RF .. (i+1)*M_RF`.
    SameSymbol { stacked: CMatrix, m_rf: usize },
    /// One `M_RF x K_i` matrix per block.
    PerSymbol { blocks: Vec<CMatrix>, m_rf: usize },
}

impl BeamspaceObservations {
    pub fn m_rf(&self) -> usize {
        match self {
            BeamspaceObservations::SameSymbol { m_rf, .. } | BeamspaceObservations::PerSymbol { m_rf, .. } => *m_rf,
        }
    }
}

/// Passes the element-space snapshots `yd` through the sweep.
pub fn sweep_observe(
    yd: &CMatrix,
    codebook: &AnalogCodebook,
    m_rf: usize,
    schedule: SweepSchedule,
) -> Result<BeamspaceObservations> {
    let m = codebook.m();
    if yd.nrows() != m {
        return Err(Error::config(format!("snapshots have {} rows, codebook has M={m}", yd.nrows())));
    }
    let blocks = ArrayConfig::new(m, m_rf)?.sweep_blocks()?;
    let n = yd.ncols();
    match schedule {
        SweepSchedule::SameSymbol => {
            // the blocks are disjoint column groups of V, so stacking them in
            // order is exactly V^H
            Ok(BeamspaceObservations::SameSymbol { stacked: adjoint_mul(&codebook.v, yd), m_rf })
        }
        SweepSchedule::PerSymbol => {
            if n < blocks {
                return Err(Error::config(format!(
                    "per-symbol sweep over {blocks} blocks needs at least {blocks} snapshots, got {n}"
                )));
            }
            let mut out = Vec::with_capacity(blocks);
            for i in 0..blocks {
                let vi = codebook.block(i, m_rf)?;
                let cols: Vec<usize> = (i..n).step_by(blocks).collect();
                let sel = yd.select_columns(cols.iter());
                out.push(adjoint_mul(&vi, &sel));
            }
            Ok(BeamspaceObservations::PerSymbol { blocks: out, m_rf })
        }
    }
}

/// `y_all = (V^H)^{-1} y_all,RF` for a same-symbol sweep.
pub fn reconstruct_digital_signal(obs: &BeamspaceObservations, codebook: &AnalogCodebook) -> Result<CMatrix> {
    let stacked = match obs {
        BeamspaceObservations::SameSymbol { stacked, .. } => stacked,
        BeamspaceObservations::PerSymbol { .. } => {
            return Err(Error::config("signal reconstruction needs a same-symbol sweep"))
        }
    };
    let m = codebook.m();
    if stacked.nrows() != m {
        return Err(Error::config(format!("stacked outputs have {} rows, expected {m}", stacked.nrows())));
    }
    Ok(mul(codebook.inverse_adjoint()?, stacked))
}

/// Diagonal loading for the covariance solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DiagonalLoading {
    /// `delta` used as given.
    Absolute(f64),
    /// `delta = f * trace(V^H V) / M^2`, a multiple of the mean eigenvalue of
    /// the stacked normal matrix.
    Relative(f64),
}

impl Default for DiagonalLoading {
    fn default() -> Self {
        DiagonalLoading::Relative(1e-3)
    }
}

/// Stacked block map `V` with `c = V vec(R)`: block `i` contributes the
/// `M_RF^2` rows `(V_i kron conj(V_i))^T`.
pub fn stacked_block_map(codebook: &AnalogCodebook, m_rf: usize) -> Result<CMatrix> {
    let m = codebook.m();
    let blocks = ArrayConfig::new(m, m_rf)?.sweep_blocks()?;
    let rows_per = m_rf * m_rf;
    let mut out = CMatrix::zeros(blocks * rows_per, m * m);
    for i in 0..blocks {
        let vi = codebook.block(i, m_rf)?;
        let k = vi.kronecker(&vi.conjugate()).transpose();
        out.rows_mut(i * rows_per, rows_per).copy_from(&k);
    }
    Ok(out)
}

/// Which algebraic route computes the regularized pseudo-inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveForm {
    /// `V^H (V V^H + delta I)^{-1}` when `V` is wide, otherwise the normal
    /// equations.
    Auto,
    /// `(V^H V + delta I)^{-1} V^H`.
    NormalEquations,
}

/// Precomputed operator `W` with `vec(R_hat) = W c`.
#[derive(Debug, Clone, PartialEq)]
pub struct BsaOperator {
    m: usize,
    m_rf: usize,
    delta: f64,
    w: CMatrix,
}

fn hpd_inverse_times(g: CMatrix, rhs: &CMatrix) -> Result<CMatrix> {
    let n = g.nrows();
    let scale = (0..n).map(|i| g[(i, i)].re).fold(0.0, f64::max);
    let chol = g
        .cholesky()
        .ok_or_else(|| Error::numerical("stacked sweep system is rank deficient; increase the diagonal loading"))?;
    let min_pivot = chol.l_dirty().diagonal().iter().map(|p| p.re).fold(f64::INFINITY, f64::min);
    if !(scale > 0.0) || min_pivot * min_pivot <= 1e-13 * scale {
        return Err(Error::numerical("stacked sweep system is rank deficient; increase the diagonal loading"));
    }
    Ok(chol.solve(rhs))
}

impl BsaOperator {
    pub fn new(codebook: &AnalogCodebook, m_rf: usize, loading: DiagonalLoading) -> Result<Self> {
        Self::with_form(codebook, m_rf, loading, SolveForm::Auto)
    }

    pub fn with_form(
        codebook: &AnalogCodebook,
        m_rf: usize,
        loading: DiagonalLoading,
        form: SolveForm,
    ) -> Result<Self> {
        let m = codebook.m();
        let v = stacked_block_map(codebook, m_rf)?;
        let delta = match loading {
            DiagonalLoading::Absolute(d) => d,
            DiagonalLoading::Relative(f) => {
                let trace = v.iter().map(|x| x.norm_sqr()).sum::<f64>();
                f * trace / (m * m) as f64
            }
        };
        if !(delta >= 0.0 && delta.is_finite()) {
            return Err(Error::domain(format!("diagonal loading must be non-negative, got {delta}")));
        }
        let vh = v.adjoint();
        let wide = v.nrows() < v.ncols();
        let w = if wide && form == SolveForm::Auto {
            // (V^H V + d I)^{-1} V^H = V^H (V V^H + d I)^{-1}; at d = 0 this is
            // the minimum-norm solution
            let mut g = mul(&v, &vh);
            for i in 0..g.nrows() {
                g[(i, i)] += delta;
            }
            let rows = g.nrows();
            let ginv = hpd_inverse_times(g, &CMatrix::identity(rows, rows))?;
            mul(&vh, &ginv)
        } else {
            let mut g = adjoint_mul(&v, &v);
            for i in 0..g.nrows() {
                g[(i, i)] += delta;
            }
            hpd_inverse_times(g, &vh)?
        };
        Ok(BsaOperator { m, m_rf, delta, w })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.w
    }

    /// Solves for `R_hat` from the stacked vectorized block covariances.
    pub fn apply(&self, c: &CVector) -> Result<CMatrix> {
        if c.len() != self.w.ncols() {
            return Err(Error::config(format!(
                "stacked block covariances have length {}, expected {}",
                c.len(),
                self.w.ncols()
            )));
        }
        let r = &self.w * c;
        Ok(hermitize(&unvec(&r, self.m, self.m)?))
    }

    /// Reconstructs from per-block covariances `R_RF,i` (each `M_RF x M_RF`).
    pub fn reconstruct(&self, block_covs: &[CMatrix]) -> Result<CovarianceEstimate> {
        let per = self.m_rf * self.m_rf;
        if block_covs.len() * per != self.w.ncols() {
            return Err(Error::config(format!(
                "expected {} block covariances, got {}",
                self.w.ncols() / per,
                block_covs.len()
            )));
        }
        let mut c = CVector::zeros(self.w.ncols());
        for (i, r) in block_covs.iter().enumerate() {
            if r.nrows() != self.m_rf || r.ncols() != self.m_rf {
                return Err(Error::config(format!("block covariance {i} is not {0}x{0}", self.m_rf)));
            }
            c.rows_mut(i * per, per).copy_from_slice(r.as_slice());
        }
        CovarianceEstimate::new(self.apply(&c)?, Provenance::BsaReconstructed)
    }
}

type CacheKey = (u64, usize, usize, u64);

/// Memo of solve operators keyed by codebook, `M_RF` and resolved loading.
#[derive(Debug, Default)]
pub struct BsaCache {
    map: Mutex<HashMap<CacheKey, Arc<BsaOperator>>>,
}

impl BsaCache {
    pub fn new() -> Self {
        Self::default()
    }

    /// The process-wide cache used by [`reconstruct_covariance_bsa`].
    pub fn global() -> &'static BsaCache {
        static CACHE: OnceLock<BsaCache> = OnceLock::new();
        CACHE.get_or_init(BsaCache::new)
    }

    pub fn get(&self, codebook: &AnalogCodebook, m_rf: usize, loading: DiagonalLoading) -> Result<Arc<BsaOperator>> {
        let (tag, bits) = match loading {
            DiagonalLoading::Absolute(d) => (0, d.to_bits()),
            DiagonalLoading::Relative(f) => (1, f.to_bits()),
        };
        let key = (codebook.fingerprint() ^ tag, codebook.m(), m_rf, bits);
        if let Some(op) = self.map.lock().expect("bsa cache poisoned").get(&key) {
            return Ok(Arc::clone(op));
        }
        // built outside the lock; a racing duplicate is identical anyway
        let op = Arc::new(BsaOperator::new(codebook, m_rf, loading)?);
        let mut map = self.map.lock().expect("bsa cache poisoned");
        Ok(Arc::clone(map.entry(key).or_insert(op)))
    }

    pub fn len(&self) -> usize {
        self.map.lock().expect("bsa cache poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Sample covariance of each block's outputs, `R_RF,i = Y_i Y_i^H / K_i`.
pub fn block_covariances(obs: &BeamspaceObservations) -> Result<Vec<CMatrix>> {
    match obs {
        BeamspaceObservations::PerSymbol { blocks, .. } => blocks
            .iter()
            .map(|y| {
                if y.ncols() == 0 {
                    return Err(Error::config("a sweep block received no snapshots"));
                }
                Ok(scaled_gram(y, y.ncols() as f64))
            })
            .collect(),
        BeamspaceObservations::SameSymbol { .. } => {
            Err(Error::config("covariance reconstruction needs a per-symbol sweep"))
        }
    }
}

/// Full-array covariance from a per-symbol sweep, via the cached operator.
pub fn reconstruct_covariance_bsa(
    obs: &BeamspaceObservations,
    codebook: &AnalogCodebook,
    loading: DiagonalLoading,
) -> Result<CovarianceEstimate> {
    let (DiagonalLoading::Absolute(d) | DiagonalLoading::Relative(d)) = loading;
    if !(d >= 0.0) {
        return Err(Error::domain(format!("diagonal loading must be non-negative, got {d}")));
    }
    let covs = block_covariances(obs)?;
    let op = BsaCache::global().get(codebook, obs.m_rf(), loading)?;
    op.reconstruct(&covs)
}

/// Same as [`reconstruct_covariance_bsa`] for block covariances already
/// formed by the caller.
pub fn reconstruct_covariance_from_blocks(
    block_covs: &[CMatrix],
    codebook: &AnalogCodebook,
    m_rf: usize,
    loading: DiagonalLoading,
) -> Result<CovarianceEstimate> {
    BsaCache::global().get(codebook, m_rf, loading)?.reconstruct(block_covs)
}
