//! Uniform linear array manifold and the parametric multipath channel.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI};

use rand::Rng;

use crate::doa::AngleGrid;
use crate::error::{Error, Result};
use crate::linalg::{C64, CMatrix, CVector};
use crate::random::complex_normal;

/// Receive array geometry: `m` half-wavelength spaced elements behind `m_rf`
/// RF chains.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ArrayConfig {
    pub m: usize,
    pub m_rf: usize,
}

impl ArrayConfig {
    pub fn new(m: usize, m_rf: usize) -> Result<Self> {
        if m == 0 || m_rf == 0 || m_rf > m {
            return Err(Error::config(format!(
                "need 1 <= M_RF <= M, got M={m}, M_RF={m_rf}"
            )));
        }
        Ok(ArrayConfig { m, m_rf })
    }

    /// Fully digital array (one RF chain per element).
    pub fn digital(m: usize) -> Result<Self> {
        Self::new(m, m)
    }

    /// Number of analog sweep positions `M / M_RF`.
    pub fn sweep_blocks(&self) -> Result<usize> {
        if !self.m.is_multiple_of(self.m_rf) {
            return Err(Error::config(format!(
                "M={} is not divisible by M_RF={}",
                self.m, self.m_rf
            )));
        }
        Ok(self.m / self.m_rf)
    }
}

fn check_angle(theta: f64) -> Result<()> {
    if !theta.is_finite() || theta.abs() >= FRAC_PI_2 {
        return Err(Error::domain(format!(
            "angle {theta} rad is outside the open interval (-pi/2, pi/2)"
        )));
    }
    Ok(())
}

/// Steering vector for a direction given by its sine, no validation.
pub(crate) fn steering_from_sin(sin_theta: f64, m: usize) -> CVector {
    CVector::from_fn(m, |k, _| C64::from_polar(1.0, PI * k as f64 * sin_theta))
}

/// `a(theta) = [1, e^{j pi sin theta}, ..., e^{j pi (M-1) sin theta}]^T`.
pub fn steering_vector(theta: f64, m: usize) -> Result<CVector> {
    check_angle(theta)?;
    if m == 0 {
        return Err(Error::domain("array must have at least one element"));
    }
    Ok(steering_from_sin(theta.sin(), m))
}

/// Array manifold `A(Theta)`: one steering vector per column.
pub fn manifold(angles: &[f64], m: usize) -> Result<CMatrix> {
    let cols = angles
        .iter()
        .map(|&t| steering_vector(t, m))
        .collect::<Result<Vec<_>>>()?;
    if cols.is_empty() {
        return Ok(CMatrix::zeros(m, 0));
    }
    Ok(CMatrix::from_columns(&cols))
}

/// Multipath parameters: path angles (radians) and complex path gains.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSet {
    angles: Vec<f64>,
    gains: Vec<C64>,
}

impl PathSet {
    pub fn new(angles: Vec<f64>, gains: Vec<C64>) -> Result<Self> {
        if angles.is_empty() {
            return Err(Error::domain("a path set needs at least one path"));
        }
        if angles.len() != gains.len() {
            return Err(Error::domain(format!(
                "{} angles but {} gains",
                angles.len(),
                gains.len()
            )));
        }
        for &t in &angles {
            check_angle(t)?;
        }
        for (i, a) in angles.iter().enumerate() {
            if angles[..i].contains(a) {
                return Err(Error::domain(format!("duplicate path angle {a}")));
            }
        }
        if gains.iter().any(|g| !g.re.is_finite() || !g.im.is_finite()) {
            return Err(Error::domain("path gains must be finite"));
        }
        Ok(PathSet { angles, gains })
    }

    /// Single line-of-sight path.
    pub fn los(theta: f64, gain: C64) -> Result<Self> {
        Self::new(vec![theta], vec![gain])
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn gains(&self) -> &[C64] {
        &self.gains
    }

    pub fn gain_vector(&self) -> CVector {
        CVector::from_column_slice(&self.gains)
    }

    /// `||alpha||^2`.
    pub fn gain_energy(&self) -> f64 {
        self.gains.iter().map(|g| g.norm_sqr()).sum()
    }
}

/// Channel from the user to the `M` receive antennas.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelVector(CVector);

impl ChannelVector {
    pub fn new(h: CVector) -> Result<Self> {
        if h.is_empty() {
            return Err(Error::domain("channel vector is empty"));
        }
        if h.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::domain("channel vector has non-finite entries"));
        }
        Ok(ChannelVector(h))
    }

    pub fn as_vector(&self) -> &CVector {
        &self.0
    }

    pub fn into_vector(self) -> CVector {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `||h||^2`.
    pub fn norm_sqr(&self) -> f64 {
        self.0.norm_squared()
    }
}

/// `h = sum_l alpha_l a(theta_l)`, accumulated path by path.
pub fn build_channel(paths: &PathSet, m: usize) -> Result<ChannelVector> {
    if paths.is_empty() {
        return Err(Error::domain("empty path set"));
    }
    let mut h = CVector::zeros(m);
    for (&theta, &gain) in paths.angles.iter().zip(&paths.gains) {
        let a = steering_vector(theta, m)?;
        for (hk, ak) in h.iter_mut().zip(a.iter()) {
            *hk += ak * gain;
        }
    }
    ChannelVector::new(h)
}

/// Random scenario generator: CN(0,1) gains and angles drawn uniformly on
/// `(-limit, limit)`, rejected until every pair is at least
/// `min_sin_separation` apart in `sin(theta)`.
#[derive(Debug, Clone, Copy)]
pub struct PathSampler {
    pub paths: usize,
    pub angle_limit: f64,
    pub min_sin_separation: f64,
}

const MAX_REJECTIONS: usize = 100_000;

impl PathSampler {
    /// Separation of two steps of `grid`, angles within +-60 degrees.
    pub fn for_grid(paths: usize, grid: &AngleGrid) -> Self {
        PathSampler { paths, angle_limit: FRAC_PI_3, min_sin_separation: 2.0 * grid.sin_step() }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<PathSet> {
        let l = self.paths;
        if l == 0 {
            return Err(Error::domain("need at least one path"));
        }
        if !(self.angle_limit > 0.0 && self.angle_limit < FRAC_PI_2) {
            return Err(Error::domain("angle limit must lie in (0, pi/2)"));
        }
        let span = 2.0 * self.angle_limit.sin();
        if (l - 1) as f64 * self.min_sin_separation >= span {
            return Err(Error::domain(format!(
                "{l} paths cannot be separated by {} in sine within +-{} rad",
                self.min_sin_separation, self.angle_limit
            )));
        }
        let mut angles = Vec::with_capacity(l);
        let mut attempts = 0;
        while angles.len() < l {
            attempts += 1;
            if attempts > MAX_REJECTIONS {
                return Err(Error::domain(format!(
                    "could not place {l} separated paths after {MAX_REJECTIONS} draws"
                )));
            }
            let t: f64 = rng.random_range(-self.angle_limit..self.angle_limit);
            if t.abs() >= self.angle_limit {
                continue;
            }
            let s = t.sin();
            if angles.iter().all(|&u: &f64| (u.sin() - s).abs() >= self.min_sin_separation) {
                angles.push(t);
            }
        }
        let gains = (0..l).map(|_| complex_normal(rng, 1.0)).collect();
        PathSet::new(angles, gains)
    }
}

/// Draws an `l`-path scenario for an `m`-element array on its default grid.
pub fn sample_paths<R: Rng + ?Sized>(l: usize, m: usize, rng: &mut R) -> Result<PathSet> {
    PathSampler::for_grid(l, &AngleGrid::for_array(m)?).sample(rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::rng_from_seed;

    fn close(a: C64, b: C64) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn broadside_is_all_ones() {
        let a = steering_vector(0.0, 4).unwrap();
        assert!(a.iter().all(|&z| z == C64::new(1.0, 0.0)));
    }

    #[test]
    fn thirty_degrees_quarter_turns() {
        let a = steering_vector(30f64.to_radians(), 4).unwrap();
        let want = [C64::new(1.0, 0.0), C64::new(0.0, 1.0), C64::new(-1.0, 0.0), C64::new(0.0, -1.0)];
        for (z, w) in a.iter().zip(want) {
            assert!(close(*z, w), "{z} vs {w}");
        }
    }

    #[test]
    fn endfire_rejected() {
        assert!(matches!(steering_vector(FRAC_PI_2, 4), Err(Error::Domain(_))));
        assert!(matches!(steering_vector(-2.0, 4), Err(Error::Domain(_))));
    }

    #[test]
    fn small_channels() {
        let h = build_channel(&PathSet::los(0.0, C64::new(2.0, 0.0)).unwrap(), 2).unwrap();
        assert_eq!(h.as_vector().as_slice(), &[C64::new(2.0, 0.0), C64::new(2.0, 0.0)]);

        let p = PathSet::new(vec![0.0, 30f64.to_radians()], vec![C64::new(1.0, 0.0); 2]).unwrap();
        let h = build_channel(&p, 2).unwrap();
        assert!(close(h.as_vector()[0], C64::new(2.0, 0.0)));
        assert!(close(h.as_vector()[1], C64::new(1.0, 1.0)));
    }

    #[test]
    fn pathset_validation() {
        assert!(PathSet::new(vec![], vec![]).is_err());
        assert!(PathSet::new(vec![0.1, 0.1], vec![C64::new(1.0, 0.0); 2]).is_err());
        assert!(PathSet::new(vec![0.1], vec![C64::new(1.0, 0.0); 2]).is_err());
    }

    #[test]
    fn sampling_is_deterministic_and_separated() {
        let a = sample_paths(4, 64, &mut rng_from_seed(11)).unwrap();
        let b = sample_paths(4, 64, &mut rng_from_seed(11)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 4);
        let sep = 2.0 * AngleGrid::for_array(64).unwrap().sin_step();
        for i in 0..4 {
            assert!(a.angles()[i].abs() < FRAC_PI_3);
            for j in 0..i {
                assert!((a.angles()[i].sin() - a.angles()[j].sin()).abs() >= sep);
            }
        }
    }

    #[test]
    fn sampling_capacity_error() {
        assert!(matches!(sample_paths(200, 16, &mut rng_from_seed(1)), Err(Error::Domain(_))));
    }

    #[test]
    fn gain_second_moment() {
        let mut rng = rng_from_seed(5);
        let sampler = PathSampler { paths: 1, angle_limit: FRAC_PI_3, min_sin_separation: 0.0 };
        let n = 100_000;
        let mean = (0..n)
            .map(|_| sampler.sample(&mut rng).unwrap().gain_energy())
            .sum::<f64>()
            / n as f64;
        assert!((mean - 1.0).abs() < 0.02, "mean |alpha|^2 = {mean}");
    }

    #[test]
    fn sweep_blocks_requires_divisibility() {
        assert_eq!(ArrayConfig::new(64, 4).unwrap().sweep_blocks().unwrap(), 16);
        assert!(ArrayConfig::new(6, 4).unwrap().sweep_blocks().is_err());
        assert!(ArrayConfig::new(4, 8).is_err());
    }
}
