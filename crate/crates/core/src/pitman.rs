//! Generalized Pitman nearness: conditional medians, truncation bounds,
//! Pitman-nearest equivariant constants and a paired Monte Carlo comparator.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::estimators::{Estimate, EstimatorKind, PointEstimator};
use crate::losses::LossSpec;
use crate::model::{ancillaries, PopulationParams, SampleDesign, SufficientStats, Target};
use crate::montecarlo::{draw_replication, replication_rng, with_threads};
use crate::schemes::SamplingPlan;

/// Scaled losses closer than this count as a tie.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// `2^(1/(n1+n2-2)) - 1`.
fn median_factor(design: &SampleDesign) -> f64 {
    2f64.powf(1.0 / design.pooled_shape() as f64) - 1.0
}

/// Median of `U/V` given the ancillary ratio, for scale ratio `eta = σ1/σ2`.
pub fn conditional_median(target: Target, n1: u32, n2: u32, eta: f64, w: f64) -> Result<f64> {
    conditional_median_for(target, &SampleDesign::complete(n1, n2), eta, w)
}

pub fn conditional_median_for(target: Target, design: &SampleDesign, eta: f64, w: f64) -> Result<f64> {
    check_eta_w(eta, w)?;
    design.validate()?;
    let (_, rate) = design.own(target);
    let stretch = match target {
        Target::Mu1 => 1.0 + eta * w,
        Target::Mu2 => 1.0 + w / eta,
    };
    Ok(median_factor(design) * stretch / rate)
}

/// Density of `U/V` at `x` given the ancillary ratio; its median is
/// [`conditional_median`].
pub fn conditional_density(target: Target, n1: u32, n2: u32, eta: f64, w: f64, x: f64) -> Result<f64> {
    check_eta_w(eta, w)?;
    let design = SampleDesign::complete(n1, n2);
    design.validate()?;
    if x <= 0.0 {
        return Ok(0.0);
    }
    let (n_own, _) = design.own(target);
    let n = n_own as f64;
    let k = design.pooled_shape() as f64;
    let c = match target {
        Target::Mu1 => 1.0 + eta * w,
        Target::Mu2 => 1.0 + w / eta,
    };
    Ok(n * k * (n * x + c).powf(-k - 1.0) * c.powf(k))
}

fn check_eta_w(eta: f64, w: f64) -> Result<()> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::InvalidParameter(format!("scale ratio must lie in (0, 1], got {eta}")));
    }
    if !(w > 0.0) || !w.is_finite() {
        return Err(Error::InvalidParameter(format!("ancillary ratio must be positive, got {w}")));
    }
    Ok(())
}

/// Range of the conditional median over all admissible scale ratios.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PitmanBounds {
    pub lower: f64,
    /// `+∞` for μ2.
    pub upper: f64,
    pub target: Target,
}

pub fn pitman_bounds(target: Target, n1: u32, n2: u32, w: f64) -> Result<PitmanBounds> {
    pitman_bounds_for(target, &SampleDesign::complete(n1, n2), w)
}

pub fn pitman_bounds_for(target: Target, design: &SampleDesign, w: f64) -> Result<PitmanBounds> {
    if !(w >= 0.0) {
        return Err(Error::InvalidParameter(format!("ancillary ratio must be positive, got {w}")));
    }
    let (_, rate) = design.own(target);
    let base = median_factor(design) / rate;
    Ok(match target {
        Target::Mu1 => PitmanBounds { lower: base, upper: base * (1.0 + w), target },
        Target::Mu2 => PitmanBounds { lower: base * (1.0 + w), upper: f64::INFINITY, target },
    })
}

/// `max{lower, min{psi, upper}}`.
pub fn clamp_multiplier(bounds: &PitmanBounds, psi: f64) -> f64 {
    bounds.lower.max(psi.min(bounds.upper))
}

/// Median of `U/V` for a complete sample of size `n`.
pub fn pnaee_constant(n: u32) -> Result<f64> {
    pnaee_constant_with_rate(n, n as f64)
}

/// `(2^(1/(n-1)) - 1) / rate`.
pub fn pnaee_constant_with_rate(n: u32, rate: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("sample size must be >= 2, got {n}")));
    }
    Ok((2f64.powf(1.0 / (n - 1) as f64) - 1.0) / rate)
}

/// `x_min - ψ*(w) t` with `ψ* = max{l(w), min{ψ(w), u(w)}}`.
pub fn pitman_improved(target: Target, stats: &SufficientStats, base_phi: impl Fn(f64) -> f64) -> Result<Estimate> {
    let (w, _) = ancillaries(stats)?.for_target(target);
    let bounds = pitman_bounds_for(target, &stats.design(), w)?;
    let phi = clamp_multiplier(&bounds, base_phi(w));
    let (x_min, t) = stats.own(target);
    Ok(Estimate { value: x_min - phi * t, kind: EstimatorKind::PitmanImproved, target, phi_used: phi })
}

/// Monte Carlo generalized Pitman nearness of `a` relative to `b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GpnEstimate {
    /// Replications where `a` has strictly smaller loss.
    pub wins: u64,
    pub ties: u64,
    pub reps: u64,
    pub value: f64,
    pub std_error: f64,
}

impl GpnEstimate {
    fn from_counts(wins: u64, ties: u64, reps: u64) -> Self {
        let r = reps as f64;
        let value = (2 * wins + ties) as f64 / (2 * reps) as f64;
        // Per-replication scores are 0, 1/2 or 1.
        let second_moment = (wins as f64 + 0.25 * ties as f64) / r;
        let var = (second_moment - value * value).max(0.0) * r / (r - 1.0).max(1.0);
        Self { wins, ties, reps, value, std_error: (var / r).sqrt() }
    }
}

/// Paired comparison on common replications; `gpn(a, b)` and `gpn(b, a)`
/// with the same seed have complementary counts.
#[allow(clippy::too_many_arguments)]
pub fn gpn_mc(
    est_a: &dyn PointEstimator,
    est_b: &dyn PointEstimator,
    params: &PopulationParams,
    plan: &SamplingPlan,
    loss: &LossSpec,
    reps: u64,
    seed: u64,
    threads: Option<usize>,
) -> Result<GpnEstimate> {
    if reps < 1 {
        return Err(Error::InvalidParameter("GPN needs at least one replication".into()));
    }
    let target = est_a.target();
    if est_b.target() != target {
        return Err(Error::InvalidParameter("GPN compares estimators of the same parameter".into()));
    }
    plan.validate()?;
    let mu = params.location(target);
    let sigma = params.scale(target);
    let outcomes: Vec<u8> = with_threads(threads, || {
        (0..reps)
            .into_par_iter()
            .map(|rep| {
                let mut rng = replication_rng(seed, rep);
                let stats = draw_replication(params, plan, &mut rng)?;
                let la = loss.value((est_a.value(&stats)? - mu) / sigma);
                let lb = loss.value((est_b.value(&stats)? - mu) / sigma);
                Ok(if (la - lb).abs() <= TIE_TOLERANCE || la == lb {
                    1
                } else if la < lb {
                    2
                } else {
                    0
                })
            })
            .collect::<Result<Vec<u8>>>()
    })??;
    let wins = outcomes.iter().filter(|&&o| o == 2).count() as u64;
    let ties = outcomes.iter().filter(|&&o| o == 1).count() as u64;
    Ok(GpnEstimate::from_counts(wins, ties, reps))
}
