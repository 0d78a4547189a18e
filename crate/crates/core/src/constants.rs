//! Equivariant constants for the BAEE, Stein and star-Stein multipliers.
//!
//! A population contributes an exponential part with rate `r` (the sample size
//! for complete and censored samples, 1 for records) and a spread with gamma
//! shape `k = n - 1`. Every constant is the root of a first-order condition in
//! `U ~ Exp(r)` and a gamma variable; squared error and linex have closed forms.

use std::collections::HashMap;
use std::fmt;
use std::sync::{OnceLock, RwLock};

use crate::error::{Error, Result};
use crate::losses::LossSpec;
use crate::model::{SampleDesign, Target};
use crate::numerics::{expect_exp_gamma, solve_root_widening, QuadSettings};

/// Root tolerance for numeric constant solves.
const ROOT_TOL: f64 = 1e-14;

fn check_linex(loss: &LossSpec, rate: f64) -> Result<()> {
    if let LossSpec::Linex { a } = loss {
        if *a >= rate {
            return Err(Error::LinexShapeViolation { a: *a, rate });
        }
    }
    Ok(())
}

fn check_shape(n: u32, what: &str) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("{what} must be >= 2, got {n}")));
    }
    Ok(())
}

/// BAEE multiplier for a complete sample of size `n`.
pub fn baee_constant(loss: &LossSpec, n: u32) -> Result<f64> {
    baee_constant_with_rate(loss, n, n as f64)
}

/// Root `c` of `E[L'(U - cV) V] = 0` with `U ~ Exp(rate)`, `V ~ Gamma(n - 1)`.
pub fn baee_constant_with_rate(loss: &LossSpec, n: u32, rate: f64) -> Result<f64> {
    check_shape(n, "sample size")?;
    check_linex(loss, rate)?;
    let nf = n as f64;
    match loss {
        LossSpec::SquaredError => Ok(1.0 / (rate * nf)),
        LossSpec::Linex { a } => Ok(((rate / (rate - a)).powf(1.0 / nf) - 1.0) / a),
        LossSpec::Custom(_) => baee_constant_numeric(loss, n, rate, &QuadSettings::default()),
    }
}

/// Quadrature-and-root-finding path for the BAEE constant.
pub fn baee_constant_numeric(loss: &LossSpec, n: u32, rate: f64, settings: &QuadSettings) -> Result<f64> {
    check_shape(n, "sample size")?;
    check_linex(loss, rate)?;
    let shape = (n - 1) as f64;
    let guess = 1.0 / (rate * n as f64);
    let equation = |c: f64| {
        expect_exp_gamma(|u, v| loss.deriv(u - c * v) * v, rate, shape, settings).unwrap_or(f64::NAN)
    };
    solve_constant(equation, guess, loss)
}

/// Tail constant for a complete sample of size `n_own`.
pub fn tail_constant(loss: &LossSpec, n_own: u32, gamma_shape: u32) -> Result<f64> {
    tail_constant_with_rate(loss, n_own as f64, gamma_shape)
}

/// Root `b` of `E[L'(U - bZ)] = 0` with `U ~ Exp(rate)`, `Z ~ Gamma(gamma_shape)`.
pub fn tail_constant_with_rate(loss: &LossSpec, rate: f64, gamma_shape: u32) -> Result<f64> {
    check_shape(gamma_shape, "gamma shape")?;
    check_linex(loss, rate)?;
    let s = gamma_shape as f64;
    match loss {
        LossSpec::SquaredError => Ok(1.0 / (rate * s)),
        LossSpec::Linex { a } => Ok(((rate / (rate - a)).powf(1.0 / s) - 1.0) / a),
        LossSpec::Custom(_) => tail_constant_numeric(loss, rate, gamma_shape, &QuadSettings::default()),
    }
}

/// Quadrature-and-root-finding path for the tail constant.
pub fn tail_constant_numeric(loss: &LossSpec, rate: f64, gamma_shape: u32, settings: &QuadSettings) -> Result<f64> {
    check_shape(gamma_shape, "gamma shape")?;
    check_linex(loss, rate)?;
    let s = gamma_shape as f64;
    let guess = 1.0 / (rate * s);
    let equation = |b: f64| expect_exp_gamma(|u, z| loss.deriv(u - b * z), rate, s, settings).unwrap_or(f64::NAN);
    solve_constant(equation, guess, loss)
}

/// Solves a decreasing first-order condition on `(1e-12, 10 * guess)`, widening
/// the upper end until the sign changes. Negative linex parameters cap the
/// search below `1/|a|`, where `1 + a c` stays positive.
fn solve_constant(equation: impl Fn(f64) -> f64, guess: f64, loss: &LossSpec) -> Result<f64> {
    let cap = match loss {
        LossSpec::Linex { a } if *a < 0.0 => (1.0 - 1e-9) / a.abs(),
        _ => 1e6 * guess,
    };
    let lo = 1e-12;
    let root = solve_root_widening(&equation, lo, 10.0 * guess, cap, ROOT_TOL)?;
    let check = equation(root);
    if check.is_nan() {
        return Err(Error::QuadratureNoConverge(format!("constant equation undefined at {root}")));
    }
    Ok(root)
}

/// UMVUE multiplier `1 / (rate (n - 1))`.
pub fn umvue_constant(n: u32, rate: f64) -> Result<f64> {
    check_shape(n, "sample size")?;
    Ok(1.0 / (rate * (n - 1) as f64))
}

/// All multipliers needed by the estimator catalog for one design and loss.
#[derive(Debug, Clone, PartialEq)]
pub struct EquivariantConstants {
    pub loss: LossSpec,
    pub design: SampleDesign,
    pub c01: f64,
    pub c02: f64,
    pub b01: f64,
    pub b02: f64,
    pub b01_star: f64,
    pub b02_star: f64,
    pub umvue1: f64,
    pub umvue2: f64,
}

impl EquivariantConstants {
    /// Constants for complete samples of sizes `n1`, `n2`.
    pub fn complete(loss: &LossSpec, n1: u32, n2: u32) -> Result<Self> {
        Self::for_design(loss, SampleDesign::complete(n1, n2))
    }

    /// Memoized for built-in losses.
    pub fn for_design(loss: &LossSpec, design: SampleDesign) -> Result<Self> {
        design.validate()?;
        type Cache = RwLock<HashMap<((u8, u64), [u64; 4]), EquivariantConstants>>;
        static CACHE: OnceLock<Cache> = OnceLock::new();
        let key = loss.cache_key().map(|k| {
            (k, [design.n1 as u64, design.n2 as u64, design.rate1.to_bits(), design.rate2.to_bits()])
        });
        let cache = CACHE.get_or_init(|| RwLock::new(HashMap::new()));
        if let Some(key) = &key {
            if let Some(hit) = cache.read().unwrap().get(key) {
                return Ok(hit.clone());
            }
        }
        let solved = Self::solve(loss, design)?;
        if let Some(key) = key {
            cache.write().unwrap().insert(key, solved.clone());
        }
        Ok(solved)
    }

    fn solve(loss: &LossSpec, design: SampleDesign) -> Result<Self> {
        let SampleDesign { n1, n2, rate1, rate2 } = design;
        let pooled = n1 + n2 - 1;
        Ok(Self {
            loss: loss.clone(),
            design,
            c01: baee_constant_with_rate(loss, n1, rate1)?,
            c02: baee_constant_with_rate(loss, n2, rate2)?,
            b01: tail_constant_with_rate(loss, rate1, pooled)?,
            b02: tail_constant_with_rate(loss, rate2, pooled)?,
            b01_star: tail_constant_with_rate(loss, rate1, pooled + 1)?,
            b02_star: tail_constant_with_rate(loss, rate2, pooled + 1)?,
            umvue1: umvue_constant(n1, rate1)?,
            umvue2: umvue_constant(n2, rate2)?,
        })
    }

    /// `(c0i, b0i, b0i*, umvue_i)` for the target's own population.
    pub fn for_target(&self, target: Target) -> (f64, f64, f64, f64) {
        match target {
            Target::Mu1 => (self.c01, self.b01, self.b01_star, self.umvue1),
            Target::Mu2 => (self.c02, self.b02, self.b02_star, self.umvue2),
        }
    }

    /// Field names and values in display order.
    pub fn fields(&self) -> [(&'static str, f64); 8] {
        [
            ("c01", self.c01),
            ("b01", self.b01),
            ("b01_star", self.b01_star),
            ("umvue1", self.umvue1),
            ("c02", self.c02),
            ("b02", self.b02),
            ("b02_star", self.b02_star),
            ("umvue2", self.umvue2),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DominanceCondition {
    Mu1Stein,
    Mu1Star,
    Mu2Stein,
    Mu2Star,
}

impl fmt::Display for DominanceCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DominanceCondition::Mu1Stein => "mu1_stein",
            DominanceCondition::Mu1Star => "mu1_star",
            DominanceCondition::Mu2Stein => "mu2_stein",
            DominanceCondition::Mu2Star => "mu2_star",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DominanceReport {
    pub condition: DominanceCondition,
    pub holds: bool,
    /// `E[L'(U - b V) V]` with `V ~ Gamma(n_own - 1)`.
    pub expectation: f64,
}

/// Evaluates the sign condition behind the Stein-type improvements: the
/// expectation must be `>= 0` for the μ1 variants and `<= 0` for the μ2 ones.
pub fn dominance_check(loss: &LossSpec, design: SampleDesign, which: DominanceCondition) -> Result<DominanceReport> {
    let consts = EquivariantConstants::for_design(loss, design)?;
    let (target, b) = match which {
        DominanceCondition::Mu1Stein => (Target::Mu1, consts.b01),
        DominanceCondition::Mu1Star => (Target::Mu1, consts.b01_star),
        DominanceCondition::Mu2Stein => (Target::Mu2, consts.b02),
        DominanceCondition::Mu2Star => (Target::Mu2, consts.b02_star),
    };
    let (n, rate) = design.own(target);
    let shape = (n - 1) as f64;
    let expectation = expect_exp_gamma(|u, v| loss.deriv(u - b * v) * v, rate, shape, &QuadSettings::default())?;
    let holds = match target {
        Target::Mu1 => expectation >= 0.0,
        Target::Mu2 => expectation <= 0.0,
    };
    Ok(DominanceReport { condition: which, holds, expectation })
}
