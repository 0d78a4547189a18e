//! The two-population exponential model and its sufficient-statistic reduction.
//!
//! Population `i` is `Exp(mu_i, sigma_i)` with density
//! `exp(-(x - mu_i) / sigma_i) / sigma_i` on `x > mu_i`. Everything the
//! estimators need is carried by the sample minima and the total spreads
//! `T_i = sum (X_ij - X_i(1))`, which are independent with
//! `(X_i(1) - mu_i) / sigma_i ~ Exp(rate_i)` and `T_i / sigma_i ~ Gamma(n_i - 1, 1)`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Which location parameter is being estimated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Target {
    Mu1,
    Mu2,
}

impl Target {
    pub fn index(self) -> usize {
        match self {
            Target::Mu1 => 1,
            Target::Mu2 => 2,
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::Mu1 => f.write_str("mu1"),
            Target::Mu2 => f.write_str("mu2"),
        }
    }
}

impl FromStr for Target {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "mu1" | "1" => Ok(Target::Mu1),
            "mu2" | "2" => Ok(Target::Mu2),
            other => Err(Error::InvalidParameter(format!("unknown target `{other}`"))),
        }
    }
}

/// True parameters of both populations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PopulationParams {
    pub mu1: f64,
    pub mu2: f64,
    pub sigma1: f64,
    pub sigma2: f64,
    pub order_restricted: bool,
}

impl PopulationParams {
    pub fn new(mu1: f64, mu2: f64, sigma1: f64, sigma2: f64, order_restricted: bool) -> Result<Self> {
        if !(mu1.is_finite() && mu2.is_finite()) {
            return Err(Error::InvalidParameter("locations must be finite".into()));
        }
        if !(sigma1.is_finite() && sigma1 > 0.0 && sigma2.is_finite() && sigma2 > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "scales must be positive, got sigma1 = {sigma1}, sigma2 = {sigma2}"
            )));
        }
        if order_restricted && sigma1 > sigma2 {
            return Err(Error::InvalidParameter(format!(
                "order restriction violated: sigma1 = {sigma1} > sigma2 = {sigma2}"
            )));
        }
        Ok(Self { mu1, mu2, sigma1, sigma2, order_restricted })
    }

    /// Ordered-scale model, `sigma1 <= sigma2`.
    pub fn restricted(mu1: f64, mu2: f64, sigma1: f64, sigma2: f64) -> Result<Self> {
        Self::new(mu1, mu2, sigma1, sigma2, true)
    }

    /// `eta = sigma1 / sigma2`, in `(0, 1]` under the restriction.
    pub fn eta(&self) -> f64 {
        self.sigma1 / self.sigma2
    }

    pub fn location(&self, target: Target) -> f64 {
        match target {
            Target::Mu1 => self.mu1,
            Target::Mu2 => self.mu2,
        }
    }

    pub fn scale(&self, target: Target) -> f64 {
        match target {
            Target::Mu1 => self.sigma1,
            Target::Mu2 => self.sigma2,
        }
    }
}

/// Distributional shape of the reduced statistics.
///
/// `n_i` is the effective sample size (so `T_i / sigma_i ~ Gamma(n_i - 1, 1)`)
/// and `rate_i` the exponential rate of `(X_i(1) - mu_i) / sigma_i`. Complete
/// and censored samples have `rate_i = n_i`; record samples have `rate_i = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleDesign {
    pub n1: u32,
    pub n2: u32,
    pub rate1: f64,
    pub rate2: f64,
}

impl SampleDesign {
    pub fn complete(n1: u32, n2: u32) -> Self {
        Self { n1, n2, rate1: n1 as f64, rate2: n2 as f64 }
    }

    pub fn validate(&self) -> Result<()> {
        for (i, n) in [(1, self.n1), (2, self.n2)] {
            if n < 2 {
                return Err(Error::SampleTooSmall { population: i, len: n as usize });
            }
        }
        if !(self.rate1 > 0.0 && self.rate1.is_finite() && self.rate2 > 0.0 && self.rate2.is_finite()) {
            return Err(Error::InvalidParameter("exponential rates must be positive".into()));
        }
        Ok(())
    }

    /// `(n, rate)` of the population whose location is the target.
    pub fn own(&self, target: Target) -> (u32, f64) {
        match target {
            Target::Mu1 => (self.n1, self.rate1),
            Target::Mu2 => (self.n2, self.rate2),
        }
    }

    /// `(n, rate)` of the other population.
    pub fn other(&self, target: Target) -> (u32, f64) {
        match target {
            Target::Mu1 => (self.n2, self.rate2),
            Target::Mu2 => (self.n1, self.rate1),
        }
    }

    /// Gamma shape of `V1 + V2` (`n1 + n2 - 2`).
    pub fn pooled_shape(&self) -> u32 {
        self.n1 + self.n2 - 2
    }
}

/// Reduced data `(X1(1), X2(1), T1, T2)` with the design it came from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SufficientStats {
    pub x1_min: f64,
    pub x2_min: f64,
    pub t1: f64,
    pub t2: f64,
    pub n1: u32,
    pub n2: u32,
    pub rate1: f64,
    pub rate2: f64,
}

impl SufficientStats {
    /// Statistics of two complete samples of sizes `n1`, `n2`.
    pub fn new(x1_min: f64, x2_min: f64, t1: f64, t2: f64, n1: u32, n2: u32) -> Result<Self> {
        Self::with_design(x1_min, x2_min, t1, t2, SampleDesign::complete(n1, n2))
    }

    pub fn with_design(x1_min: f64, x2_min: f64, t1: f64, t2: f64, design: SampleDesign) -> Result<Self> {
        design.validate()?;
        if !(x1_min.is_finite() && x2_min.is_finite()) {
            return Err(Error::InvalidParameter("sample minima must be finite".into()));
        }
        if !(t1.is_finite() && t1 >= 0.0 && t2.is_finite() && t2 >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "spreads must be finite and non-negative, got t1 = {t1}, t2 = {t2}"
            )));
        }
        Ok(Self {
            x1_min,
            x2_min,
            t1,
            t2,
            n1: design.n1,
            n2: design.n2,
            rate1: design.rate1,
            rate2: design.rate2,
        })
    }

    pub fn design(&self) -> SampleDesign {
        SampleDesign { n1: self.n1, n2: self.n2, rate1: self.rate1, rate2: self.rate2 }
    }

    /// `(x_min, t)` of the target's own population.
    pub fn own(&self, target: Target) -> (f64, f64) {
        match target {
            Target::Mu1 => (self.x1_min, self.t1),
            Target::Mu2 => (self.x2_min, self.t2),
        }
    }

    /// Fails with `DegenerateSample` unless both spreads are strictly positive.
    pub fn require_positive_spreads(&self) -> Result<()> {
        if self.t1 <= 0.0 {
            return Err(Error::DegenerateSample { population: 1 });
        }
        if self.t2 <= 0.0 {
            return Err(Error::DegenerateSample { population: 2 });
        }
        Ok(())
    }
}

/// Location-free ratios used by the improved estimators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ancillaries {
    /// `W = T2 / T1`
    pub w: f64,
    /// `W* = T1 / T2`
    pub w_star: f64,
    /// `W1 = X2(1) / T1`
    pub w1: f64,
    /// `W2 = X1(1) / T2`
    pub w2: f64,
}

impl Ancillaries {
    /// `(ratio of spreads, auxiliary ratio)` as seen from the target:
    /// `(W, W1)` for `mu1` and `(W*, W2)` for `mu2`.
    pub fn for_target(&self, target: Target) -> (f64, f64) {
        match target {
            Target::Mu1 => (self.w, self.w1),
            Target::Mu2 => (self.w_star, self.w2),
        }
    }
}

pub fn ancillaries(stats: &SufficientStats) -> Result<Ancillaries> {
    stats.require_positive_spreads()?;
    Ok(Ancillaries {
        w: stats.t2 / stats.t1,
        w_star: stats.t1 / stats.t2,
        w1: stats.x2_min / stats.t1,
        w2: stats.x1_min / stats.t2,
    })
}

/// Minimum and total spread of one complete sample.
pub(crate) fn min_and_spread(sample: &[f64], population: usize) -> Result<(f64, f64)> {
    if sample.len() < 2 {
        return Err(Error::SampleTooSmall { population, len: sample.len() });
    }
    if sample.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidParameter(format!("population {population} contains a non-finite value")));
    }
    let min = sample.iter().copied().fold(f64::INFINITY, f64::min);
    let t: f64 = sample.iter().map(|x| x - min).sum();
    Ok((min, t))
}

/// Reduces two complete samples to their sufficient statistics.
pub fn reduce_complete(sample1: &[f64], sample2: &[f64]) -> Result<SufficientStats> {
    let (x1, t1) = min_and_spread(sample1, 1)?;
    let (x2, t2) = min_and_spread(sample2, 2)?;
    let stats = SufficientStats::new(x1, x2, t1, t2, sample1.len() as u32, sample2.len() as u32)?;
    stats.require_positive_spreads()?;
    Ok(stats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn reduces_small_samples() {
        let s = reduce_complete(&[1.0, 2.0, 3.0], &[4.0, 6.0]).unwrap();
        assert_eq!((s.x1_min, s.t1, s.n1), (1.0, 3.0, 3));
        assert_eq!((s.x2_min, s.t2, s.n2), (4.0, 2.0, 2));
        assert_eq!(s.rate1, 3.0);
    }

    #[test]
    fn reduces_hand_summed_samples() {
        let s = reduce_complete(&[0.5, 1.2, 1.8, 2.5], &[0.8, 1.0, 2.0, 3.1, 3.7]).unwrap();
        assert_eq!(s.x1_min, 0.5);
        assert_relative_eq!(s.t1, 4.0, epsilon = 1e-12);
        assert_eq!(s.n1, 4);
        assert_eq!(s.x2_min, 0.8);
        assert_relative_eq!(s.t2, 6.6, epsilon = 1e-12);
        assert_eq!(s.n2, 5);
    }

    #[test]
    fn rejects_constant_and_short_samples() {
        assert_eq!(
            reduce_complete(&[5.0, 5.0], &[1.0, 2.0]),
            Err(Error::DegenerateSample { population: 1 })
        );
        assert_eq!(
            reduce_complete(&[1.0, 2.0], &[3.0]),
            Err(Error::SampleTooSmall { population: 2, len: 1 })
        );
    }

    #[test]
    fn ancillary_ratios() {
        let s = SufficientStats::new(0.5, 0.8, 2.0, 3.0, 4, 5).unwrap();
        let a = ancillaries(&s).unwrap();
        assert_relative_eq!(a.w, 1.5);
        assert_relative_eq!(a.w_star, 2.0 / 3.0);
        assert_relative_eq!(a.w1, 0.4);
        assert_relative_eq!(a.w2, 0.5 / 3.0);

        let s = SufficientStats::new(0.0, 0.0, 1.0, 1.0, 2, 2).unwrap();
        let a = ancillaries(&s).unwrap();
        assert_eq!((a.w, a.w_star, a.w1, a.w2), (1.0, 1.0, 0.0, 0.0));

        let s = SufficientStats::new(-1.0, -2.0, 4.0, 2.0, 3, 3).unwrap();
        let a = ancillaries(&s).unwrap();
        assert_eq!((a.w, a.w_star, a.w1, a.w2), (0.5, 2.0, -0.5, -0.5));
    }

    #[test]
    fn ancillaries_need_positive_spreads() {
        let s = SufficientStats::new(0.0, 0.0, 0.0, 1.0, 2, 2).unwrap();
        assert_eq!(ancillaries(&s), Err(Error::DegenerateSample { population: 1 }));
    }

    #[test]
    fn params_enforce_order() {
        assert!(PopulationParams::restricted(0.0, 0.0, 2.0, 1.0).is_err());
        assert!(PopulationParams::new(0.0, 0.0, 2.0, 1.0, false).is_ok());
        assert!(PopulationParams::restricted(0.0, 0.0, -1.0, 1.0).is_err());
        let p = PopulationParams::restricted(0.1, 0.3, 0.4, 0.6).unwrap();
        assert_relative_eq!(p.eta(), 0.4 / 0.6);
    }
}
