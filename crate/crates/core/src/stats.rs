//! Order-stable Monte Carlo reductions.

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut acc = CompensatedSum::default();
    for x in values {
        acc.add(x);
    }
    acc.value()
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub count: usize,
}

impl MeanEstimate {
    pub fn from_samples(samples: &[f64]) -> Self {
        let n = samples.len();
        if n == 0 {
            return MeanEstimate { mean: f64::NAN, std_error: f64::NAN, count: 0 };
        }
        let mean = compensated_sum(samples.iter().copied()) / n as f64;
        let std_error = if n > 1 {
            let ss = compensated_sum(samples.iter().map(|x| (x - mean) * (x - mean)));
            (ss / (n - 1) as f64 / n as f64).sqrt()
        } else {
            0.0
        };
        MeanEstimate { mean, std_error, count: n }
    }

    /// Normal-approximation 95% confidence interval.
    pub fn ci95(&self) -> (f64, f64) {
        (self.mean - 1.96 * self.std_error, self.mean + 1.96 * self.std_error)
    }
}

/// `sqrt(sum(num) / sum(den))` with a delta-method standard error; this is the
/// normalised RMS error used for channel-estimation curves.
pub fn sqrt_ratio(num: &[f64], den: &[f64]) -> MeanEstimate {
    assert_eq!(num.len(), den.len());
    let n = num.len();
    let a = MeanEstimate::from_samples(num);
    let b = MeanEstimate::from_samples(den);
    let ratio = a.mean / b.mean;
    let value = ratio.sqrt();
    if n < 2 {
        return MeanEstimate { mean: value, std_error: 0.0, count: n };
    }
    let cov = compensated_sum(num.iter().zip(den).map(|(x, y)| (x - a.mean) * (y - b.mean)))
        / (n - 1) as f64;
    let var_a = a.std_error * a.std_error * n as f64;
    let var_b = b.std_error * b.std_error * n as f64;
    let var_ratio =
        ((var_a - 2.0 * ratio * cov + ratio * ratio * var_b) / (b.mean * b.mean) / n as f64).max(0.0);
    MeanEstimate { mean: value, std_error: var_ratio.sqrt() / (2.0 * value), count: n }
}

/// Empirical quantile (linear interpolation between order statistics) and a
/// distribution-free standard error from the spread of the order statistics
/// one binomial standard deviation either side.
pub fn quantile(samples: &[f64], p: f64) -> MeanEstimate {
    let n = samples.len();
    if n == 0 {
        return MeanEstimate { mean: f64::NAN, std_error: f64::NAN, count: 0 };
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let at = |pos: f64| {
        let pos = pos.clamp(0.0, (n - 1) as f64);
        let lo = pos.floor() as usize;
        let hi = pos.ceil() as usize;
        let frac = pos - lo as f64;
        sorted[lo] * (1.0 - frac) + sorted[hi] * frac
    };
    let pos = p * (n - 1) as f64;
    let k = (n as f64 * p * (1.0 - p)).sqrt();
    let se = (at(pos + k) - at(pos - k)) / 2.0;
    MeanEstimate { mean: at(pos), std_error: se, count: n }
}
