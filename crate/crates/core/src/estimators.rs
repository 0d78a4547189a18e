//! Point estimators of μ1 and μ2.
//!
//! Every estimator has the form `x_min - φ · t` for its own population, where
//! the multiplier `φ` may depend on the ancillary ratios.

use std::fmt;
use std::str::FromStr;

use crate::boundary::BzMultiplier;
use crate::constants::EquivariantConstants;
use crate::error::{Error, Result};
use crate::losses::LossSpec;
use crate::model::{ancillaries, SampleDesign, SufficientStats, Target};
use crate::pitman::{clamp_multiplier, pitman_bounds_for, pnaee_constant_with_rate};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EstimatorKind {
    Mle,
    Umvue,
    Baee,
    Stein,
    SteinStar,
    ImprovedUmvue,
    ImprovedUmvueStar,
    /// μ2 only.
    ImprovedMle,
    /// μ2 only.
    ImprovedMleStar,
    BrewsterZidek,
    PitmanPnaee,
    PitmanImproved,
}

impl EstimatorKind {
    pub const ALL: [EstimatorKind; 12] = [
        EstimatorKind::Mle,
        EstimatorKind::Umvue,
        EstimatorKind::Baee,
        EstimatorKind::Stein,
        EstimatorKind::SteinStar,
        EstimatorKind::ImprovedUmvue,
        EstimatorKind::ImprovedUmvueStar,
        EstimatorKind::ImprovedMle,
        EstimatorKind::ImprovedMleStar,
        EstimatorKind::BrewsterZidek,
        EstimatorKind::PitmanPnaee,
        EstimatorKind::PitmanImproved,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EstimatorKind::Mle => "mle",
            EstimatorKind::Umvue => "umvue",
            EstimatorKind::Baee => "baee",
            EstimatorKind::Stein => "stein",
            EstimatorKind::SteinStar => "stein_star",
            EstimatorKind::ImprovedUmvue => "improved_umvue",
            EstimatorKind::ImprovedUmvueStar => "improved_umvue_star",
            EstimatorKind::ImprovedMle => "improved_mle",
            EstimatorKind::ImprovedMleStar => "improved_mle_star",
            EstimatorKind::BrewsterZidek => "brewster_zidek",
            EstimatorKind::PitmanPnaee => "pnaee",
            EstimatorKind::PitmanImproved => "pitman_improved",
        }
    }

    pub fn supports(self, target: Target) -> bool {
        !(target == Target::Mu1 && matches!(self, EstimatorKind::ImprovedMle | EstimatorKind::ImprovedMleStar))
    }

    /// Kinds whose multiplier depends on the other population.
    pub fn uses_ratios(self) -> bool {
        !matches!(self, EstimatorKind::Mle | EstimatorKind::Umvue | EstimatorKind::Baee | EstimatorKind::PitmanPnaee)
    }
}

impl fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EstimatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('-', "_");
        EstimatorKind::ALL
            .into_iter()
            .find(|k| k.name() == key)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown estimator `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub kind: EstimatorKind,
    pub target: Target,
    /// Multiplier applied to the spread: `value = x_min - phi_used * t`.
    pub phi_used: f64,
}

/// Anything that maps sufficient statistics to a multiplier for one target.
pub trait PointEstimator: Sync {
    fn target(&self) -> Target;

    fn multiplier(&self, stats: &SufficientStats) -> Result<f64>;

    fn label(&self) -> String;

    fn value(&self, stats: &SufficientStats) -> Result<f64> {
        let phi = self.multiplier(stats)?;
        let (x_min, t) = stats.own(self.target());
        Ok(x_min - phi * t)
    }
}

/// `x_min - phi · t` with a constant multiplier.
#[derive(Debug, Clone, PartialEq)]
pub struct FixedMultiplier {
    pub target: Target,
    pub phi: f64,
    pub label: String,
}

impl PointEstimator for FixedMultiplier {
    fn target(&self) -> Target {
        self.target
    }

    fn multiplier(&self, _stats: &SufficientStats) -> Result<f64> {
        Ok(self.phi)
    }

    fn label(&self) -> String {
        self.label.clone()
    }
}

/// An estimator with its constants (and boundary table, if any) resolved for a
/// fixed loss and design.
#[derive(Debug, Clone)]
pub struct EstimatorPlan {
    pub kind: EstimatorKind,
    pub target: Target,
    pub loss: LossSpec,
    pub design: SampleDesign,
    baee: f64,
    tail: f64,
    tail_star: f64,
    umvue: f64,
    pnaee: f64,
    boundary: Option<BzMultiplier>,
}

impl EstimatorPlan {
    pub fn new(kind: EstimatorKind, target: Target, loss: &LossSpec, design: SampleDesign) -> Result<Self> {
        if !kind.supports(target) {
            return Err(Error::UnsupportedKind { kind: kind.to_string(), target: target.to_string() });
        }
        design.validate()?;
        let consts = EquivariantConstants::for_design(loss, design)?;
        let (baee, tail, tail_star, umvue) = consts.for_target(target);
        let (n_own, rate) = design.own(target);
        let boundary =
            if kind == EstimatorKind::BrewsterZidek { Some(BzMultiplier::new(target, loss, &design)?) } else { None };
        Ok(Self {
            kind,
            target,
            loss: loss.clone(),
            design,
            baee,
            tail,
            tail_star,
            umvue,
            pnaee: pnaee_constant_with_rate(n_own, rate)?,
            boundary,
        })
    }

    pub fn estimate(&self, stats: &SufficientStats) -> Result<Estimate> {
        let phi = self.multiplier(stats)?;
        let (x_min, t) = stats.own(self.target);
        Ok(Estimate { value: x_min - phi * t, kind: self.kind, target: self.target, phi_used: phi })
    }

    fn check_design(&self, stats: &SufficientStats) -> Result<()> {
        if stats.design() != self.design {
            return Err(Error::InvalidParameter(format!(
                "statistics design {:?} does not match the prepared design {:?}",
                stats.design(),
                self.design
            )));
        }
        Ok(())
    }

    fn own_spread_positive(&self, stats: &SufficientStats) -> Result<()> {
        let (_, t) = stats.own(self.target);
        if t <= 0.0 {
            return Err(Error::DegenerateSample { population: self.target.index() + 1 });
        }
        Ok(())
    }
}

impl PointEstimator for EstimatorPlan {
    fn target(&self) -> Target {
        self.target
    }

    fn label(&self) -> String {
        self.kind.to_string()
    }

    fn multiplier(&self, stats: &SufficientStats) -> Result<f64> {
        self.check_design(stats)?;
        if !self.kind.uses_ratios() {
            self.own_spread_positive(stats)?;
            return Ok(match self.kind {
                EstimatorKind::Mle => 0.0,
                EstimatorKind::Umvue => self.umvue,
                EstimatorKind::PitmanPnaee => self.pnaee,
                _ => self.baee,
            });
        }
        let (w, w_loc) = ancillaries(stats)?.for_target(self.target);
        let star_ratio = 1.0 + w + w_loc;
        use EstimatorKind as K;
        let phi = match (self.target, self.kind) {
            (Target::Mu1, K::Stein) => self.baee.min(self.tail * (1.0 + w)),
            (Target::Mu1, K::SteinStar) if w_loc > 0.0 => self.baee.min(self.tail_star * star_ratio),
            (Target::Mu1, K::SteinStar) => self.baee,
            (Target::Mu1, K::ImprovedUmvue) => self.umvue.min(self.tail * (1.0 + w)),
            (Target::Mu1, K::ImprovedUmvueStar) if w_loc > 0.0 => self.umvue.min(self.tail_star * star_ratio),
            (Target::Mu1, K::ImprovedUmvueStar) => self.umvue,
            (Target::Mu2, K::Stein) => self.baee.max(self.tail * (1.0 + w)),
            (Target::Mu2, K::SteinStar) if w_loc > 0.0 => self.baee.max(self.tail_star * star_ratio),
            (Target::Mu2, K::SteinStar) => self.baee,
            (Target::Mu2, K::ImprovedUmvue) => self.umvue.max(self.tail * (1.0 + w)),
            (Target::Mu2, K::ImprovedUmvueStar) if w_loc > 0.0 => self.umvue.max(self.tail_star * star_ratio),
            (Target::Mu2, K::ImprovedUmvueStar) => self.umvue,
            (Target::Mu2, K::ImprovedMle) => self.tail * (1.0 + w),
            (Target::Mu2, K::ImprovedMleStar) if w_loc > 0.0 => (self.tail_star * star_ratio).max(0.0),
            (Target::Mu2, K::ImprovedMleStar) => 0.0,
            (_, K::BrewsterZidek) => self.boundary.as_ref().expect("boundary table built for BZ plans").eval(w),
            (_, K::PitmanImproved) => clamp_multiplier(&pitman_bounds_for(self.target, &self.design, w)?, self.pnaee),
            (target, kind) => {
                return Err(Error::UnsupportedKind { kind: kind.to_string(), target: target.to_string() })
            }
        };
        Ok(phi)
    }
}

/// Estimates μ1 with the given kind; constants are solved for the statistics' design.
pub fn estimate_mu1(kind: EstimatorKind, stats: &SufficientStats, loss: &LossSpec) -> Result<Estimate> {
    EstimatorPlan::new(kind, Target::Mu1, loss, stats.design())?.estimate(stats)
}

/// Estimates μ2 with the given kind; constants are solved for the statistics' design.
pub fn estimate_mu2(kind: EstimatorKind, stats: &SufficientStats, loss: &LossSpec) -> Result<Estimate> {
    EstimatorPlan::new(kind, Target::Mu2, loss, stats.design())?.estimate(stats)
}

pub fn estimate(kind: EstimatorKind, target: Target, stats: &SufficientStats, loss: &LossSpec) -> Result<Estimate> {
    EstimatorPlan::new(kind, target, loss, stats.design())?.estimate(stats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn s0() -> SufficientStats {
        SufficientStats::new(0.5, 0.8, 2.0, 3.0, 4, 5).unwrap()
    }

    const SQ: LossSpec = LossSpec::SquaredError;

    #[test]
    fn mu1_examples() {
        let s = s0();
        assert_relative_eq!(estimate_mu1(EstimatorKind::Baee, &s, &SQ).unwrap().value, 0.375, epsilon = 1e-15);
        let e = estimate_mu1(EstimatorKind::Stein, &s, &SQ).unwrap();
        assert_relative_eq!(e.value, 0.375, epsilon = 1e-15);
        assert_eq!(e.phi_used, 0.0625);
        let short = SufficientStats::new(0.5, 0.8, 2.0, 0.5, 4, 5).unwrap();
        assert_relative_eq!(estimate_mu1(EstimatorKind::Stein, &short, &SQ).unwrap().value, 0.421875, epsilon = 1e-15);
        assert_relative_eq!(
            estimate_mu1(EstimatorKind::ImprovedUmvue, &s, &SQ).unwrap().value,
            0.34375,
            epsilon = 1e-15
        );
        assert_eq!(estimate_mu1(EstimatorKind::Mle, &s, &SQ).unwrap().value, 0.5);
        assert_relative_eq!(estimate_mu1(EstimatorKind::Umvue, &s, &SQ).unwrap().value, 0.5 - 2.0 / 12.0);
    }

    #[test]
    fn mu2_examples() {
        let s = s0();
        assert_relative_eq!(estimate_mu2(EstimatorKind::Baee, &s, &SQ).unwrap().value, 0.68, epsilon = 1e-15);
        assert_relative_eq!(estimate_mu2(EstimatorKind::Stein, &s, &SQ).unwrap().value, 0.675, epsilon = 1e-15);
        assert_relative_eq!(
            estimate_mu2(EstimatorKind::SteinStar, &s, &SQ).unwrap().value,
            0.8 - 3.0 * (1.0 + 2.0 / 3.0 + 0.5 / 3.0) / 45.0,
            epsilon = 1e-15
        );
        assert_relative_eq!(
            estimate_mu2(EstimatorKind::ImprovedMle, &s, &SQ).unwrap().value,
            0.8 - 0.025 * (5.0 / 3.0) * 3.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn star_variants_fall_back_when_location_ratio_is_not_positive() {
        let s = SufficientStats::new(-0.5, -0.2, 2.0, 3.0, 4, 5).unwrap();
        let baee = estimate_mu1(EstimatorKind::Baee, &s, &SQ).unwrap();
        assert_eq!(estimate_mu1(EstimatorKind::SteinStar, &s, &SQ).unwrap().value, baee.value);
        let umvue = estimate_mu1(EstimatorKind::Umvue, &s, &SQ).unwrap();
        assert_eq!(estimate_mu1(EstimatorKind::ImprovedUmvueStar, &s, &SQ).unwrap().value, umvue.value);
        let mle = estimate_mu2(EstimatorKind::Mle, &s, &SQ).unwrap();
        assert_eq!(estimate_mu2(EstimatorKind::ImprovedMleStar, &s, &SQ).unwrap().value, mle.value);
        assert_eq!(estimate_mu2(EstimatorKind::SteinStar, &s, &SQ).unwrap().value, -0.2 - 0.04 * 3.0);
    }

    #[test]
    fn improved_mle_is_rejected_for_mu1() {
        let r = estimate_mu1(EstimatorKind::ImprovedMle, &s0(), &SQ);
        assert!(matches!(r, Err(Error::UnsupportedKind { .. })));
        assert!(estimate_mu1(EstimatorKind::ImprovedMleStar, &s0(), &SQ).is_err());
    }

    #[test]
    fn degenerate_spreads_are_rejected() {
        let s = SufficientStats::new(0.5, 0.8, 2.0, 0.0, 4, 5).unwrap();
        assert!(matches!(
            estimate_mu1(EstimatorKind::Stein, &s, &SQ),
            Err(Error::DegenerateSample { population: 2 })
        ));
        assert!(estimate_mu1(EstimatorKind::Baee, &s, &SQ).is_ok());
        assert!(estimate_mu2(EstimatorKind::Baee, &s, &SQ).is_err());
    }

    #[test]
    fn brewster_zidek_uses_the_boundary_multiplier() {
        let s = s0();
        let e = estimate_mu1(EstimatorKind::BrewsterZidek, &s, &SQ).unwrap();
        let phi = crate::boundary::phi1_bz(1.5, 4, 5, &SQ).unwrap();
        assert_relative_eq!(e.phi_used, phi, epsilon = 1e-15);
        assert!(e.phi_used > 0.03125 && e.phi_used < 0.0625);
    }

    #[test]
    fn pitman_kinds() {
        let s = SufficientStats::new(0.5, 0.8, 2.0, 2.0, 4, 5).unwrap();
        let e = estimate_mu1(EstimatorKind::PitmanImproved, &s, &SQ).unwrap();
        // W = 1: u(1) = 0.0520447 < m0 = 0.0649803.
        assert_relative_eq!(e.phi_used, (2f64.powf(1.0 / 7.0) - 1.0) / 2.0, epsilon = 1e-15);
        let e = estimate_mu1(EstimatorKind::PitmanPnaee, &s, &SQ).unwrap();
        assert_relative_eq!(e.phi_used, (2f64.powf(1.0 / 3.0) - 1.0) / 4.0, epsilon = 1e-15);
    }

    #[test]
    fn names_round_trip() {
        for k in EstimatorKind::ALL {
            assert_eq!(k.name().parse::<EstimatorKind>().unwrap(), k);
        }
        assert!("james_stein".parse::<EstimatorKind>().is_err());
    }

    #[test]
    fn plan_rejects_foreign_design() {
        let plan = EstimatorPlan::new(EstimatorKind::Baee, Target::Mu1, &SQ, SampleDesign::complete(4, 6)).unwrap();
        assert!(plan.estimate(&s0()).is_err());
    }
}
