//! Sampling schemes reduced to sufficient statistics.
//!
//! Each scheme yields a minimum `x_min`, a spread `t` with `t/σ ~ Gamma(m - 1)`
//! for an effective shape `m`, and the exponential rate of `x_min`: the total
//! number of units on test for complete and censored samples, 1 for records.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};
use crate::model::{SampleDesign, SufficientStats};

/// How one population was observed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Scheme {
    /// All `n` units observed.
    Complete { n: u32 },
    /// First `observed` failures among `total` units.
    TypeII { total: u32, observed: u32 },
    /// `removals[j]` survivors withdrawn at the `j`-th failure.
    Progressive { removals: Vec<u32> },
    /// `count` upper records of an i.i.d. stream.
    Records { count: u32 },
}

impl Scheme {
    /// Gamma shape of `t/σ` plus one.
    pub fn effective_shape(&self) -> u32 {
        match self {
            Scheme::Complete { n } => *n,
            Scheme::TypeII { observed, .. } => *observed,
            Scheme::Progressive { removals } => removals.len() as u32,
            Scheme::Records { count } => *count,
        }
    }

    /// Rate of `(x_min - μ)/σ`.
    pub fn rate(&self) -> f64 {
        match self {
            Scheme::Complete { n } => *n as f64,
            Scheme::TypeII { total, .. } => *total as f64,
            Scheme::Progressive { removals } => removals.iter().map(|r| (r + 1) as f64).sum(),
            Scheme::Records { .. } => 1.0,
        }
    }

    /// Units placed on test.
    pub fn total_units(&self) -> u32 {
        match self {
            Scheme::Complete { n } => *n,
            Scheme::TypeII { total, .. } => *total,
            Scheme::Progressive { removals } => removals.iter().map(|r| r + 1).sum(),
            Scheme::Records { count } => *count,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Scheme::Complete { n } if *n < 2 => Err(Error::SampleTooSmall { population: 0, len: *n as usize }),
            Scheme::TypeII { total, observed } if *observed < 2 || observed > total => Err(
                Error::InvalidCensoringPlan(format!("type-II plan needs 2 <= r <= n, got r={observed}, n={total}")),
            ),
            Scheme::Progressive { removals } if removals.len() < 2 => Err(Error::InvalidCensoringPlan(format!(
                "progressive plan needs at least 2 failures, got {}",
                removals.len()
            ))),
            Scheme::Records { count } if *count < 2 => {
                Err(Error::InvalidParameter(format!("need at least 2 records, got {count}")))
            }
            _ => Ok(()),
        }
    }

    /// Draws one observed sample from `Exp(mu, sigma)` under this scheme.
    pub fn simulate<R: Rng + ?Sized>(&self, mu: f64, sigma: f64, rng: &mut R) -> Vec<f64> {
        match self {
            Scheme::Complete { n } => (0..*n).map(|_| mu + sigma * std_exponential(rng)).collect(),
            Scheme::TypeII { total, observed } => {
                let mut xs: Vec<f64> = (0..*total).map(|_| mu + sigma * std_exponential(rng)).collect();
                xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
                xs.truncate(*observed as usize);
                xs
            }
            Scheme::Progressive { removals } => {
                let total: usize = removals.iter().map(|&r| r as usize + 1).sum();
                let mut alive: Vec<f64> = (0..total).map(|_| mu + sigma * std_exponential(rng)).collect();
                let mut observed = Vec::with_capacity(removals.len());
                for &r in removals {
                    let (idx, _) = alive
                        .iter()
                        .enumerate()
                        .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
                        .expect("plan keeps units on test");
                    observed.push(alive.swap_remove(idx));
                    for _ in 0..r {
                        let pick = rng.random_range(0..alive.len());
                        alive.swap_remove(pick);
                    }
                }
                observed
            }
            Scheme::Records { count } => {
                let mut level = mu + sigma * std_exponential(rng);
                let mut out = Vec::with_capacity(*count as usize);
                out.push(level);
                for _ in 1..*count {
                    // Exponential record spacings are i.i.d. by memorylessness.
                    level += sigma * std_exponential(rng);
                    out.push(level);
                }
                out
            }
        }
    }

    /// Draws and reduces one sample; the complete case skips the sort.
    pub fn simulate_reduced<R: Rng + ?Sized>(&self, mu: f64, sigma: f64, rng: &mut R) -> Result<ReducedPopulation> {
        if let Scheme::Complete { n } = self {
            let draws: Vec<f64> = (0..*n).map(|_| std_exponential(rng)).collect();
            let min = draws.iter().copied().fold(f64::INFINITY, f64::min);
            let spread: f64 = draws.iter().map(|e| e - min).sum();
            return Ok(ReducedPopulation {
                x_min: mu + sigma * min,
                t: sigma * spread,
                effective_shape: *n,
                rate: *n as f64,
            });
        }
        let observations = self.simulate(mu, sigma, rng);
        reduce(&SchemeSample { scheme: self.clone(), observations })
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scheme::Complete { n } => write!(f, "complete:{n}"),
            Scheme::TypeII { total, observed } => write!(f, "type2:{total}:{observed}"),
            Scheme::Progressive { removals } => {
                let parts: Vec<String> = removals.iter().map(|r| r.to_string()).collect();
                write!(f, "progressive:{}", parts.join("/"))
            }
            Scheme::Records { count } => write!(f, "records:{count}"),
        }
    }
}

impl FromStr for Scheme {
    type Err = Error;

    /// `complete:<n>`, `type2:<n>:<r>`, `progressive:<R1>/<R2>/...`, `records:<count>`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("bad scheme `{s}`"));
        let num = |v: &str| v.trim().parse::<u32>().map_err(|_| bad());
        let mut parts = s.trim().splitn(2, ':');
        let head = parts.next().unwrap_or("").trim().to_ascii_lowercase();
        let rest = parts.next().ok_or_else(bad)?;
        let scheme = match head.as_str() {
            "complete" => Scheme::Complete { n: num(rest)? },
            "type2" | "typeii" => {
                let (n, r) = rest.split_once(':').ok_or_else(bad)?;
                Scheme::TypeII { total: num(n)?, observed: num(r)? }
            }
            "progressive" => Scheme::Progressive { removals: rest.split('/').map(num).collect::<Result<_>>()? },
            "records" => Scheme::Records { count: num(rest)? },
            _ => return Err(bad()),
        };
        scheme.validate()?;
        Ok(scheme)
    }
}

/// Standard exponential by inversion.
pub fn std_exponential<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u: f64 = rng.random();
    -(-u).ln_1p()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchemeSample {
    pub scheme: Scheme,
    pub observations: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedPopulation {
    pub x_min: f64,
    pub t: f64,
    pub effective_shape: u32,
    pub rate: f64,
}

fn require_sorted(xs: &[f64]) -> Result<()> {
    if xs.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidParameter("observations must be finite".into()));
    }
    if xs.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidCensoringPlan("censored observations must be nondecreasing".into()));
    }
    Ok(())
}

/// Total-time-on-test reduction of the first `r` of `n` order statistics.
pub fn reduce_type2(total: u32, observations: &[f64]) -> Result<ReducedPopulation> {
    let r = observations.len();
    if r < 2 || r > total as usize {
        return Err(Error::InvalidCensoringPlan(format!("type-II plan needs 2 <= r <= n, got r={r}, n={total}")));
    }
    require_sorted(observations)?;
    let n = total as f64;
    let first = observations[0];
    let last = observations[r - 1];
    let sum: f64 = observations.iter().sum();
    let t = sum + (n - r as f64) * last - n * first;
    Ok(ReducedPopulation { x_min: first, t: t.max(0.0), effective_shape: r as u32, rate: n })
}

/// `t = Σ (R_j + 1) x_j - n x_1` with `n = Σ (R_j + 1)`.
pub fn reduce_progressive(removals: &[u32], observations: &[f64]) -> Result<ReducedPopulation> {
    let m = observations.len();
    if m < 2 {
        return Err(Error::InvalidCensoringPlan(format!("progressive plan needs at least 2 failures, got {m}")));
    }
    if removals.len() != m {
        return Err(Error::InvalidCensoringPlan(format!(
            "{} removal counts for {m} observed failures",
            removals.len()
        )));
    }
    require_sorted(observations)?;
    let n: f64 = removals.iter().map(|&r| r as f64 + 1.0).sum();
    let weighted: f64 = removals.iter().zip(observations).map(|(&r, &x)| (r as f64 + 1.0) * x).sum();
    let t = weighted - n * observations[0];
    Ok(ReducedPopulation { x_min: observations[0], t: t.max(0.0), effective_shape: m as u32, rate: n })
}

/// Upper records: `t` is the range of the record sequence.
pub fn reduce_records(records: &[f64]) -> Result<ReducedPopulation> {
    if records.len() < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 records, got {}", records.len())));
    }
    if records.iter().any(|x| !x.is_finite()) || records.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::NotRecordSequence);
    }
    let first = records[0];
    let last = records[records.len() - 1];
    Ok(ReducedPopulation { x_min: first, t: last - first, effective_shape: records.len() as u32, rate: 1.0 })
}

pub fn reduce(sample: &SchemeSample) -> Result<ReducedPopulation> {
    let obs = &sample.observations;
    match &sample.scheme {
        Scheme::Complete { n } => {
            if obs.len() != *n as usize {
                return Err(Error::InvalidParameter(format!("complete sample declared {n} values, got {}", obs.len())));
            }
            let (x_min, t) = crate::model::min_and_spread(obs, 0)?;
            Ok(ReducedPopulation { x_min, t, effective_shape: *n, rate: *n as f64 })
        }
        Scheme::TypeII { total, observed } => {
            if obs.len() != *observed as usize {
                return Err(Error::InvalidCensoringPlan(format!(
                    "type-II plan declared r={observed}, got {} values",
                    obs.len()
                )));
            }
            reduce_type2(*total, obs)
        }
        Scheme::Progressive { removals } => reduce_progressive(removals, obs),
        Scheme::Records { .. } => reduce_records(obs),
    }
}

/// Combines two reduced populations into statistics carrying the scheme design.
pub fn combine(first: &ReducedPopulation, second: &ReducedPopulation) -> Result<SufficientStats> {
    let design = SampleDesign {
        n1: first.effective_shape,
        n2: second.effective_shape,
        rate1: first.rate,
        rate2: second.rate,
    };
    SufficientStats::with_design(first.x_min, second.x_min, first.t, second.t, design)
}

/// Sampling plan for both populations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SamplingPlan {
    pub first: Scheme,
    pub second: Scheme,
}

impl SamplingPlan {
    pub fn complete(n1: u32, n2: u32) -> Self {
        Self { first: Scheme::Complete { n: n1 }, second: Scheme::Complete { n: n2 } }
    }

    pub fn validate(&self) -> Result<()> {
        self.first.validate()?;
        self.second.validate()
    }

    pub fn design(&self) -> SampleDesign {
        SampleDesign {
            n1: self.first.effective_shape(),
            n2: self.second.effective_shape(),
            rate1: self.first.rate(),
            rate2: self.second.rate(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::reduce_complete;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn type2_examples() {
        let r = reduce_type2(5, &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!((r.x_min, r.t, r.effective_shape, r.rate), (1.0, 7.0, 3, 5.0));
        let r = reduce_type2(3, &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!((r.x_min, r.t, r.effective_shape), (1.0, 3.0, 3));
        let r = reduce_type2(4, &[2.0, 2.0]).unwrap();
        assert_eq!((r.x_min, r.t, r.effective_shape), (2.0, 0.0, 2));
        assert!(matches!(reduce_type2(4, &[1.0]), Err(Error::InvalidCensoringPlan(_))));
        assert!(matches!(reduce_type2(2, &[1.0, 2.0, 3.0]), Err(Error::InvalidCensoringPlan(_))));
        assert!(matches!(reduce_type2(5, &[2.0, 1.0]), Err(Error::InvalidCensoringPlan(_))));
    }

    #[test]
    fn progressive_examples() {
        let r = reduce_progressive(&[1, 1], &[1.0, 2.0]).unwrap();
        assert_eq!((r.x_min, r.t, r.effective_shape, r.rate), (1.0, 2.0, 2, 4.0));
        let r = reduce_progressive(&[0, 0, 0], &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!((r.x_min, r.t, r.effective_shape), (1.0, 3.0, 3));
        let r = reduce_progressive(&[2, 0], &[1.0, 1.0]).unwrap();
        assert_eq!(r.t, 0.0);
        assert!(matches!(reduce_progressive(&[1], &[1.0, 2.0]), Err(Error::InvalidCensoringPlan(_))));
    }

    #[test]
    fn record_examples() {
        let r = reduce_records(&[1.0, 1.5, 2.5]).unwrap();
        assert_eq!((r.x_min, r.t, r.effective_shape, r.rate), (1.0, 1.5, 3, 1.0));
        let r = reduce_records(&[0.3, 0.9]).unwrap();
        assert_eq!(r.x_min, 0.3);
        assert!((r.t - 0.6).abs() < 1e-15);
        assert_eq!(reduce_records(&[2.0, 1.0, 3.0]), Err(Error::NotRecordSequence));
    }

    #[test]
    fn uncensored_limits_match_complete_reduction() {
        let xs = [0.4, 1.1, 1.7, 2.9];
        let ys = [0.2, 0.5, 3.0];
        let complete = reduce_complete(&xs, &ys).unwrap();
        let a = reduce_type2(4, &xs).unwrap();
        let b = reduce_progressive(&[0, 0, 0], &ys).unwrap();
        let stats = combine(&a, &b).unwrap();
        assert_eq!((stats.x1_min, stats.x2_min, stats.design()), (complete.x1_min, complete.x2_min, complete.design()));
        assert!((stats.t1 - complete.t1).abs() < 1e-14);
        assert!((stats.t2 - complete.t2).abs() < 1e-14);
    }

    #[test]
    fn scheme_strings_round_trip() {
        for s in [
            Scheme::Complete { n: 4 },
            Scheme::TypeII { total: 10, observed: 6 },
            Scheme::Progressive { removals: vec![1, 0, 2, 0, 2] },
            Scheme::Records { count: 5 },
        ] {
            assert_eq!(s.to_string().parse::<Scheme>().unwrap(), s);
        }
        assert!("type2:3:5".parse::<Scheme>().is_err());
        assert!("weibull:3".parse::<Scheme>().is_err());
    }

    #[test]
    fn simulated_samples_satisfy_scheme_invariants() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let progressive = Scheme::Progressive { removals: vec![1, 0, 2, 0, 2] };
        for _ in 0..200 {
            let xs = progressive.simulate(0.5, 2.0, &mut rng);
            assert_eq!(xs.len(), 5);
            assert!(xs.windows(2).all(|w| w[0] <= w[1]) && xs[0] >= 0.5);
            let recs = Scheme::Records { count: 5 }.simulate(0.5, 2.0, &mut rng);
            assert!(reduce_records(&recs).is_ok());
            let t2 = Scheme::TypeII { total: 10, observed: 6 }.simulate(0.0, 1.0, &mut rng);
            assert_eq!(t2.len(), 6);
        }
    }

    #[test]
    fn complete_fast_path_matches_generic_reduction() {
        let scheme = Scheme::Complete { n: 6 };
        let mut a = ChaCha8Rng::seed_from_u64(11);
        let mut b = ChaCha8Rng::seed_from_u64(11);
        let fast = scheme.simulate_reduced(1.0, 2.0, &mut a).unwrap();
        let xs = scheme.simulate(1.0, 2.0, &mut b);
        let slow = reduce(&SchemeSample { scheme, observations: xs }).unwrap();
        assert!((fast.x_min - slow.x_min).abs() < 1e-14);
        assert!((fast.t - slow.t).abs() < 1e-12);
    }
}
