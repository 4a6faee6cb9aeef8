use crate::array::{build_channel, ArrayConfig, PathSampler};
use crate::conventional::{beamformed_snr, ls_estimate, theory_e_con, theory_gamma_con};
use crate::doa::{match_angles, AngleGrid};
use crate::error::{Error, Result};
use crate::frontend::DiagonalLoading;
use crate::gains::theory_e_eff;
use crate::metrics::{
    gamma_eff_hybrid_theory, issac_combiner, issac_estimate, pilot_overhead_con, snr_gap, AngleSource, Structure,
};
use crate::pipeline::{default_m_sub, AngleEstimator, FrontEnd};
use crate::random::{derive_seed, par_trials};
use crate::signal::{db_to_linear, simulate_uplink, PilotKind, UplinkFrame};
use crate::stats::{quantile, sqrt_ratio, MeanEstimate};

use super::spec::{ExperimentKind, ExperimentSpec, FixedParams};
use super::table::ResultTable;

/// Noise power of every simulated campaign; powers are set through the
/// transmit SNRs `Pt/sigma2` and `Pd/sigma2`.
const SIGMA2: f64 = 1.0;

/// Parameters of one sweep point.
#[derive(Debug, Clone)]
struct Point {
    p: FixedParams,
}

impl Point {
    fn array(&self) -> Result<ArrayConfig> {
        ArrayConfig::new(self.p.m, self.p.m_rf)
    }

    fn grid(&self) -> Result<AngleGrid> {
        match self.p.grid_points {
            Some(n) => AngleGrid::uniform_sin(n),
            None => AngleGrid::for_array(self.p.m),
        }
    }

    fn frame(&self) -> Result<UplinkFrame> {
        UplinkFrame::from_db(self.p.rho, self.p.kappa, PilotKind::AllOnes, self.p.pt_db, self.p.pd_db, SIGMA2)
    }

    fn sampler(&self) -> Result<PathSampler> {
        Ok(PathSampler::for_grid(self.p.l, &self.grid()?))
    }

    fn estimator(&self, front_end: FrontEnd) -> Result<AngleEstimator> {
        let est = AngleEstimator::new(self.array()?, front_end)?
            .with_grid(self.grid()?)
            .with_m_sub(self.p.m_sub.unwrap_or_else(|| default_m_sub(self.p.m)));
        est.validate(self.p.l)?;
        Ok(est)
    }

    fn loading(&self) -> Result<DiagonalLoading> {
        if !(self.p.delta >= 0.0 && self.p.delta.is_finite()) {
            return Err(Error::config(format!("delta must be non-negative, got {}", self.p.delta)));
        }
        Ok(DiagonalLoading::Relative(self.p.delta))
    }

    /// Checks everything the experiment will need, before any trial runs.
    fn validate(&self, kind: ExperimentKind) -> Result<()> {
        let p = &self.p;
        if p.l == 0 || p.l > p.m {
            return Err(Error::config(format!("need 1 <= L <= M, got L={}, M={}", p.l, p.m)));
        }
        if !(p.pt_db.is_finite() && p.pd_db.is_finite()) {
            return Err(Error::config("transmit SNRs must be finite"));
        }
        self.sampler()?.sample(&mut crate::random::rng_from_seed(0))?;
        match kind {
            ExperimentKind::PilotOverhead => {
                if p.l < 2 {
                    return Err(Error::config("pilot_overhead needs L >= 2"));
                }
                return Ok(());
            }
            ExperimentKind::SnrGap => return Ok(()),
            _ => {}
        }
        if p.rho == 0 {
            return Err(Error::config("rho must be at least 1"));
        }
        self.frame()?;
        let array = self.array()?;
        let blocks = array.sweep_blocks()?;
        if p.kappa < blocks.max(1) {
            return Err(Error::config(format!("kappa={} is below the {blocks} sweep blocks", p.kappa)));
        }
        self.estimator(FrontEnd::SignalReconstruction)?;
        if kind == ExperimentKind::AngleMmse {
            self.estimator(FrontEnd::CovarianceReconstruction(self.loading()?))?;
        }
        Ok(())
    }
}

fn integer_axis(v: f64, name: &str) -> Result<usize> {
    if !(v >= 1.0 && v.fract() == 0.0 && v <= 1e6) {
        return Err(Error::config(format!("{name} sweep value {v} is not a positive integer")));
    }
    Ok(v as usize)
}

fn point_for(spec: &ExperimentSpec, value: f64) -> Result<Point> {
    let mut p = spec.fixed.clone();
    match spec.experiment {
        ExperimentKind::AngleMmse | ExperimentKind::SnrVsPd => p.pd_db = value,
        ExperimentKind::NrmseVsPt => p.pt_db = value,
        ExperimentKind::NrmseVsM | ExperimentKind::SnrVsM | ExperimentKind::SnrGap => {
            p.m = integer_axis(value, "M")?
        }
        ExperimentKind::PilotOverhead => {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::config(format!("rho_eff sweep value {value} must be positive")));
            }
        }
        ExperimentKind::SnrCdf => {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::config(format!("CDF level {value} outside [0, 1]")));
            }
        }
    }
    let point = Point { p };
    point.validate(spec.experiment)?;
    Ok(point)
}

fn columns(kind: ExperimentKind) -> Vec<String> {
    let rest: &[&str] = match kind {
        ExperimentKind::AngleMmse => &["mmse_dsr_deg2", "mmse_dsr_deg2_se", "mmse_bsa_deg2", "mmse_bsa_deg2_se"],
        ExperimentKind::NrmseVsPt | ExperimentKind::NrmseVsM => &[
            "nrmse_con",
            "nrmse_con_se",
            "nrmse_con_theory",
            "nrmse_issac",
            "nrmse_issac_se",
            "nrmse_issac_true_angles",
            "nrmse_issac_true_angles_se",
            "nrmse_issac_theory",
        ],
        ExperimentKind::SnrCdf => &[
            "snr_con",
            "snr_con_se",
            "snr_con_theory",
            "snr_hybrid",
            "snr_hybrid_se",
            "snr_hybrid_theory",
        ],
        ExperimentKind::SnrVsM | ExperimentKind::SnrVsPd => &[
            "snr_con",
            "snr_con_se",
            "snr_con_theory",
            "snr_hybrid",
            "snr_hybrid_se",
            "snr_hybrid_theory",
            "snr_upper",
        ],
        ExperimentKind::PilotOverhead => &["rho_con", "rho_con_se", "rho_con_mean_channel"],
        ExperimentKind::SnrGap => &[
            "gap_exact",
            "gap_exact_se",
            "gap_asymptotic",
            "gap_asymptotic_se",
            "gap_exact_unit_gain",
            "gap_asymptotic_unit_gain",
        ],
    };
    std::iter::once(kind.axis()).chain(rest.iter().copied()).map(String::from).collect()
}

/// Runs every sweep point of `spec` and collects one row per point.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ResultTable> {
    if spec.trials == 0 {
        return Err(Error::config("trials must be at least 1"));
    }
    let sweep = spec.sweep_values();
    let points = sweep.iter().map(|&v| point_for(spec, v)).collect::<Result<Vec<_>>>()?;

    let mut table = ResultTable::new(columns(spec.experiment));
    table.metadata = vec![
        ("experiment".into(), spec.experiment.name().into()),
        ("spec".into(), spec.to_json()),
        ("version".into(), env!("CARGO_PKG_VERSION").into()),
        ("seed".into(), spec.seed.to_string()),
    ];

    if spec.experiment == ExperimentKind::SnrCdf {
        // one population of channels, read at several CDF levels
        let seed = derive_seed(&[spec.seed, 0]);
        let samples = snr_samples(&spec_point(spec)?, spec.trials, seed)?;
        for &level in &sweep {
            let q = |xs: &[f64]| quantile(xs, level);
            let (con, hyb) = (q(&samples.con), q(&samples.hybrid));
            table.push_row(vec![
                level,
                con.mean,
                con.std_error,
                q(&samples.con_theory).mean,
                hyb.mean,
                hyb.std_error,
                q(&samples.hybrid_theory).mean,
            ])?;
        }
        return Ok(table);
    }

    for (k, (point, &value)) in points.iter().zip(&sweep).enumerate() {
        let seed = derive_seed(&[spec.seed, k as u64]);
        let mut row = vec![value];
        row.extend(match spec.experiment {
            ExperimentKind::AngleMmse => angle_mmse(point, spec.trials, seed)?,
            ExperimentKind::NrmseVsPt | ExperimentKind::NrmseVsM => nrmse(point, spec.trials, seed)?,
            ExperimentKind::SnrVsM | ExperimentKind::SnrVsPd => {
                let s = snr_samples(point, spec.trials, seed)?;
                let mean = |xs: &[f64]| MeanEstimate::from_samples(xs);
                let (con, hyb) = (mean(&s.con), mean(&s.hybrid));
                vec![
                    con.mean,
                    con.std_error,
                    mean(&s.con_theory).mean,
                    hyb.mean,
                    hyb.std_error,
                    mean(&s.hybrid_theory).mean,
                    mean(&s.upper).mean,
                ]
            }
            ExperimentKind::PilotOverhead => pilot_overhead(point, value, spec.trials, seed)?,
            ExperimentKind::SnrGap => gap(point, spec.trials, seed)?,
            ExperimentKind::SnrCdf => unreachable!("handled above"),
        });
        table.push_row(row)?;
    }
    Ok(table)
}

fn spec_point(spec: &ExperimentSpec) -> Result<Point> {
    let point = Point { p: spec.fixed.clone() };
    point.validate(spec.experiment)?;
    Ok(point)
}

fn angle_mmse(point: &Point, trials: usize, seed: u64) -> Result<Vec<f64>> {
    let sampler = point.sampler()?;
    let frame = point.frame()?;
    let dsr = point.estimator(FrontEnd::SignalReconstruction)?;
    let bsa = point.estimator(FrontEnd::CovarianceReconstruction(point.loading()?))?;
    let l = point.p.l;
    let m = point.p.m;
    let errs = par_trials(trials, seed, |_, rng| {
        let paths = sampler.sample(rng)?;
        let h = build_channel(&paths, m)?;
        let block = simulate_uplink(&h, &frame, rng);
        let a = match_angles(&dsr.estimate(&block, l)?.angles_hat, paths.angles())?;
        let b = match_angles(&bsa.estimate(&block, l)?.angles_hat, paths.angles())?;
        Ok((a, b))
    })?;
    let (a, b): (Vec<f64>, Vec<f64>) = errs.into_iter().unzip();
    let (a, b) = (MeanEstimate::from_samples(&a), MeanEstimate::from_samples(&b));
    Ok(vec![a.mean, a.std_error, b.mean, b.std_error])
}

fn nrmse(point: &Point, trials: usize, seed: u64) -> Result<Vec<f64>> {
    let sampler = point.sampler()?;
    let frame = point.frame()?;
    let dsr = AngleSource::Estimated(point.estimator(FrontEnd::SignalReconstruction)?);
    let m = point.p.m;
    let rows = par_trials(trials, seed, |_, rng| {
        let paths = sampler.sample(rng)?;
        let h = build_channel(&paths, m)?;
        let block = simulate_uplink(&h, &frame, rng);
        let hv = h.as_vector();
        let con = (ls_estimate(&block.yt, &frame)?.h_hat - hv).norm_squared();
        let est = issac_estimate(&block, &frame, &dsr, paths.angles())?;
        let oracle = issac_estimate(&block, &frame, &AngleSource::True, paths.angles())?;
        Ok([con, (est.h_hat - hv).norm_squared(), (oracle.h_hat - hv).norm_squared(), h.norm_sqr()])
    })?;
    let col = |i: usize| rows.iter().map(|r| r[i]).collect::<Vec<f64>>();
    let energy = col(3);
    let total_energy = MeanEstimate::from_samples(&energy).mean;
    let theory = |e: f64| (e / total_energy).sqrt();
    let (con, est, oracle) = (sqrt_ratio(&col(0), &energy), sqrt_ratio(&col(1), &energy), sqrt_ratio(&col(2), &energy));
    Ok(vec![
        con.mean,
        con.std_error,
        theory(theory_e_con(m, frame.pt, SIGMA2, frame.rho())),
        est.mean,
        est.std_error,
        oracle.mean,
        oracle.std_error,
        theory(theory_e_eff(point.p.l, frame.pt, SIGMA2, frame.rho())),
    ])
}

/// Per-channel receive SNRs: fresh channel and fresh frame every trial.
struct SnrSamples {
    con: Vec<f64>,
    con_theory: Vec<f64>,
    hybrid: Vec<f64>,
    hybrid_theory: Vec<f64>,
    upper: Vec<f64>,
}

fn snr_samples(point: &Point, trials: usize, seed: u64) -> Result<SnrSamples> {
    let sampler = point.sampler()?;
    let frame = point.frame()?;
    let dsr = AngleSource::Estimated(point.estimator(FrontEnd::SignalReconstruction)?);
    let (m, l) = (point.p.m, point.p.l);
    let rho = frame.rho() as f64;
    let rows = par_trials(trials, seed, |_, rng| {
        let paths = sampler.sample(rng)?;
        let h = build_channel(&paths, m)?;
        let block = simulate_uplink(&h, &frame, rng);
        let con = beamformed_snr(&ls_estimate(&block.yt, &frame)?.v_con, &h, frame.pd, SIGMA2);
        let est = issac_estimate(&block, &frame, &dsr, paths.angles())?;
        let hybrid = beamformed_snr(&issac_combiner(&est, m, Structure::Hybrid)?, &h, frame.pd, SIGMA2);
        let con_theory = theory_gamma_con(h.norm_sqr(), m, frame.pt, frame.pd, SIGMA2, rho);
        let hybrid_theory =
            gamma_eff_hybrid_theory(paths.gain_energy(), m, l, frame.pt, frame.pd, SIGMA2, rho)?.linear;
        Ok([con, con_theory, hybrid, hybrid_theory, frame.pd * h.norm_sqr() / SIGMA2])
    })?;
    let col = |i: usize| rows.iter().map(|r| r[i]).collect::<Vec<f64>>();
    Ok(SnrSamples { con: col(0), con_theory: col(1), hybrid: col(2), hybrid_theory: col(3), upper: col(4) })
}

fn pilot_overhead(point: &Point, rho_eff: f64, trials: usize, seed: u64) -> Result<Vec<f64>> {
    let sampler = point.sampler()?;
    let (m, l) = (point.p.m, point.p.l);
    let pt = db_to_linear(point.p.pt_db) * SIGMA2;
    let values = par_trials(trials, seed, |_, rng| {
        let paths = sampler.sample(rng)?;
        let h = build_channel(&paths, m)?;
        pilot_overhead_con(m, l, rho_eff, pt * h.norm_sqr() / (m as f64 * SIGMA2))
    })?;
    let est = MeanEstimate::from_samples(&values);
    // CN(0,1) gains: E||h||^2 / M = L
    let mean_channel = pilot_overhead_con(m, l, rho_eff, pt * l as f64 / SIGMA2)?;
    Ok(vec![est.mean, est.std_error, mean_channel])
}

fn gap(point: &Point, trials: usize, seed: u64) -> Result<Vec<f64>> {
    let sampler = point.sampler()?;
    let (m, l, rho) = (point.p.m, point.p.l, point.p.rho as f64);
    if rho <= 0.0 {
        return Err(Error::config("rho must be at least 1"));
    }
    let snr_t = db_to_linear(point.p.pt_db);
    let snr_d = db_to_linear(point.p.pd_db);
    let values = par_trials(trials, seed, |_, rng| {
        let e = sampler.sample(rng)?.gain_energy();
        let g = snr_gap(m, l, rho, snr_t * e, snr_d * e)?;
        Ok((g.exact, g.asymptotic))
    })?;
    let (ex, asy): (Vec<f64>, Vec<f64>) = values.into_iter().unzip();
    let (ex, asy) = (MeanEstimate::from_samples(&ex), MeanEstimate::from_samples(&asy));
    let unit = snr_gap(m, l, rho, snr_t, snr_d)?;
    Ok(vec![ex.mean, ex.std_error, asy.mean, asy.std_error, unit.exact, unit.asymptotic])
}
