use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    AngleMmse,
    NrmseVsPt,
    NrmseVsM,
    SnrCdf,
    SnrVsM,
    SnrVsPd,
    PilotOverhead,
    SnrGap,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 8] = [
        ExperimentKind::AngleMmse,
        ExperimentKind::NrmseVsPt,
        ExperimentKind::NrmseVsM,
        ExperimentKind::SnrCdf,
        ExperimentKind::SnrVsM,
        ExperimentKind::SnrVsPd,
        ExperimentKind::PilotOverhead,
        ExperimentKind::SnrGap,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::AngleMmse => "angle_mmse",
            ExperimentKind::NrmseVsPt => "nrmse_vs_pt",
            ExperimentKind::NrmseVsM => "nrmse_vs_m",
            ExperimentKind::SnrCdf => "snr_cdf",
            ExperimentKind::SnrVsM => "snr_vs_m",
            ExperimentKind::SnrVsPd => "snr_vs_pd",
            ExperimentKind::PilotOverhead => "pilot_overhead",
            ExperimentKind::SnrGap => "snr_gap",
        }
    }

    /// Name of the swept quantity, used as the first CSV column.
    pub fn axis(self) -> &'static str {
        match self {
            ExperimentKind::AngleMmse | ExperimentKind::SnrVsPd => "Pd_dB",
            ExperimentKind::NrmseVsPt => "Pt_dB",
            ExperimentKind::NrmseVsM | ExperimentKind::SnrVsM | ExperimentKind::SnrGap => "M",
            ExperimentKind::SnrCdf => "cdf_level",
            ExperimentKind::PilotOverhead => "rho_eff",
        }
    }

    pub fn default_sweep(self) -> Vec<f64> {
        match self {
            ExperimentKind::AngleMmse => vec![-20.0, -10.0, 0.0, 10.0],
            ExperimentKind::NrmseVsPt => vec![-20.0, -15.0, -10.0, -5.0, 0.0],
            ExperimentKind::NrmseVsM | ExperimentKind::SnrVsM => vec![16.0, 32.0, 64.0, 128.0],
            ExperimentKind::SnrCdf => vec![0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9],
            ExperimentKind::SnrVsPd => vec![-30.0, -25.0, -20.0, -15.0, -10.0, -5.0, 0.0],
            ExperimentKind::PilotOverhead => vec![1.0, 2.0, 4.0, 8.0, 16.0],
            ExperimentKind::SnrGap => vec![16.0, 32.0, 64.0, 128.0, 256.0, 512.0, 1024.0],
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ExperimentKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = ExperimentKind::ALL.iter().map(|k| k.name()).collect();
                Error::config(format!("unknown experiment '{s}' (expected one of {})", names.join(", ")))
            })
    }
}

/// Scenario parameters held fixed across a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FixedParams {
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(rename = "M_RF")]
    pub m_rf: usize,
    #[serde(rename = "L")]
    pub l: usize,
    pub rho: usize,
    pub kappa: usize,
    #[serde(rename = "Pt_dB")]
    pub pt_db: f64,
    #[serde(rename = "Pd_dB")]
    pub pd_db: f64,
    /// Subarray size for smoothing; `null` means `M - 8` (or 3M/4 for small arrays).
    #[serde(rename = "M_sub")]
    pub m_sub: Option<usize>,
    /// Diagonal loading of the covariance solve, relative to the codebook scale.
    pub delta: f64,
    /// Angle grid size; `null` means `4M`.
    pub grid_points: Option<usize>,
}

impl Default for FixedParams {
    fn default() -> Self {
        FixedParams {
            m: 64,
            m_rf: 4,
            l: 4,
            rho: 4,
            kappa: 1000,
            pt_db: -10.0,
            pd_db: -10.0,
            m_sub: None,
            delta: 1e-3,
            grid_points: None,
        }
    }
}

/// A declarative Monte Carlo campaign.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub experiment: ExperimentKind,
    /// Axis values; the axis depends on the experiment. Empty or absent
    /// means the experiment's default sweep.
    #[serde(default)]
    pub sweep: Option<Vec<f64>>,
    #[serde(default)]
    pub fixed: FixedParams,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
}

fn default_trials() -> usize {
    1000
}

impl ExperimentSpec {
    pub fn new(experiment: ExperimentKind) -> Self {
        ExperimentSpec { experiment, sweep: None, fixed: FixedParams::default(), trials: default_trials(), seed: 0 }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::config(format!("invalid experiment spec: {e}")))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
        Self::from_json(&text).map_err(|e| Error::config(format!("{}: {e}", path.display())))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("spec serializes")
    }

    pub fn sweep_values(&self) -> Vec<f64> {
        match &self.sweep {
            Some(v) => v.clone(),
            None => self.experiment.default_sweep(),
        }
    }

    /// Applies a `key=value` override. Keys are top-level fields or fixed
    /// parameters, optionally written `fixed.<name>`; values are JSON, with
    /// bare words taken as strings and comma lists as sweeps.
    pub fn apply_set(&mut self, assignment: &str) -> Result<()> {
        let (key, raw) = assignment
            .split_once('=')
            .ok_or_else(|| Error::config(format!("override '{assignment}' is not key=value")))?;
        let key = key.trim();
        let raw = raw.trim();
        let value: Value = if key == "sweep" && !raw.starts_with('[') && raw != "null" {
            let nums = raw
                .split(',')
                .map(|t| {
                    t.trim().parse::<f64>().map_err(|_| Error::config(format!("bad sweep value '{t}'")))
                })
                .collect::<Result<Vec<f64>>>()?;
            serde_json::json!(nums)
        } else {
            serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()))
        };
        let mut doc = serde_json::to_value(&*self).expect("spec serializes");
        let name = key.strip_prefix("fixed.").unwrap_or(key);
        let top_level = ["experiment", "sweep", "trials", "seed"];
        if top_level.contains(&name) && !key.starts_with("fixed.") {
            doc[name] = value;
        } else {
            let fixed = doc["fixed"].as_object_mut().expect("fixed is an object");
            if !fixed.contains_key(name) {
                return Err(Error::config(format!("unknown parameter '{key}'")));
            }
            fixed.insert(name.to_string(), value);
        }
        *self = serde_json::from_value(doc).map_err(|e| Error::config(format!("override '{assignment}': {e}")))?;
        Ok(())
    }
}
