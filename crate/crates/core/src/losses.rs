//! Bowl-shaped, location-scale invariant losses `L((delta - mu) / sigma)`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A user-supplied loss with its derivative.
#[derive(Clone)]
pub struct CustomLoss {
    pub name: String,
    value: ScalarFn,
    deriv: ScalarFn,
}

impl CustomLoss {
    /// Builds a custom loss after spot-checking the strict bowl shape of `deriv`
    /// on a symmetric grid around zero.
    pub fn new<V, D>(name: impl Into<String>, value: V, deriv: D) -> Result<Self>
    where
        V: Fn(f64) -> f64 + Send + Sync + 'static,
        D: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let name = name.into();
        for i in 1..=50 {
            let t = 0.1 * i as f64;
            if !(deriv(-t) < 0.0 && deriv(t) > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "custom loss `{name}` is not strictly bowl-shaped near t = ±{t}"
                )));
            }
        }
        Ok(Self { name, value: Arc::new(value), deriv: Arc::new(deriv) })
    }
}

impl fmt::Debug for CustomLoss {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomLoss").field("name", &self.name).finish_non_exhaustive()
    }
}

#[derive(Debug, Clone)]
pub enum LossSpec {
    SquaredError,
    /// `exp(a t) - a t - 1`, `a != 0`.
    Linex { a: f64 },
    Custom(CustomLoss),
}

impl LossSpec {
    pub fn linex(a: f64) -> Result<Self> {
        if !a.is_finite() || a == 0.0 {
            return Err(Error::InvalidParameter(format!("linex parameter must be finite and non-zero, got {a}")));
        }
        Ok(LossSpec::Linex { a })
    }

    pub fn value(&self, t: f64) -> f64 {
        match self {
            LossSpec::SquaredError => t * t,
            LossSpec::Linex { a } => {
                let at = a * t;
                let v = at.exp_m1() - at;
                if v.is_nan() {
                    f64::INFINITY
                } else {
                    v
                }
            }
            LossSpec::Custom(c) => (c.value)(t),
        }
    }

    pub fn deriv(&self, t: f64) -> f64 {
        match self {
            LossSpec::SquaredError => 2.0 * t,
            LossSpec::Linex { a } => a * (a * t).exp_m1(),
            LossSpec::Custom(c) => (c.deriv)(t),
        }
    }

    /// Built-in losses have a config-file name; custom ones do not.
    pub fn is_builtin(&self) -> bool {
        !matches!(self, LossSpec::Custom(_))
    }

    /// Hashable identity for memo caches. `None` for custom losses.
    pub(crate) fn cache_key(&self) -> Option<(u8, u64)> {
        match self {
            LossSpec::SquaredError => Some((0, 0)),
            LossSpec::Linex { a } => Some((1, a.to_bits())),
            LossSpec::Custom(_) => None,
        }
    }
}

impl PartialEq for LossSpec {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (LossSpec::SquaredError, LossSpec::SquaredError) => true,
            (LossSpec::Linex { a }, LossSpec::Linex { a: b }) => a == b,
            (LossSpec::Custom(x), LossSpec::Custom(y)) => {
                x.name == y.name && Arc::ptr_eq(&x.value, &y.value) && Arc::ptr_eq(&x.deriv, &y.deriv)
            }
            _ => false,
        }
    }
}

impl fmt::Display for LossSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LossSpec::SquaredError => f.write_str("squared"),
            LossSpec::Linex { a } => write!(f, "linex:{a}"),
            LossSpec::Custom(c) => write!(f, "custom:{}", c.name),
        }
    }
}

impl FromStr for LossSpec {
    type Err = Error;

    /// Parses `squared` or `linex:<a>`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s.to_ascii_lowercase().as_str() {
            "squared" | "quadratic" | "squared_error" => return Ok(LossSpec::SquaredError),
            _ => {}
        }
        if let Some(rest) = s.strip_prefix("linex:") {
            let a: f64 = rest
                .trim()
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("bad linex parameter `{rest}`")))?;
            return LossSpec::linex(a);
        }
        Err(Error::InvalidParameter(format!("unknown loss `{s}` (expected `squared` or `linex:<a>`)")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn grid() -> impl Iterator<Item = f64> {
        (0..=200).map(|i| -5.0 + 0.05 * i as f64)
    }

    #[test]
    fn builtin_values() {
        assert_eq!(LossSpec::SquaredError.value(2.0), 4.0);
        let lx = LossSpec::linex(0.5).unwrap();
        assert_eq!(lx.value(0.0), 0.0);
        assert_relative_eq!(lx.value(1.0), 0.1487213, epsilon = 1e-7);
        assert_eq!(LossSpec::SquaredError.deriv(-3.0), -6.0);
        assert_eq!(LossSpec::linex(1.0).unwrap().deriv(0.0), 0.0);
        assert_relative_eq!(lx.deriv(1.0), 0.3243606, epsilon = 1e-7);
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let h = 1e-6;
        for loss in [LossSpec::SquaredError, LossSpec::linex(0.5).unwrap(), LossSpec::linex(-1.0).unwrap()] {
            for t in grid() {
                let fd = (loss.value(t + h) - loss.value(t - h)) / (2.0 * h);
                let d = loss.deriv(t);
                let scale = d.abs().max(1.0);
                assert!((fd - d).abs() / scale < 1e-6, "{loss} at {t}: {fd} vs {d}");
            }
        }
    }

    #[test]
    fn derivative_sign_structure() {
        for loss in [LossSpec::SquaredError, LossSpec::linex(2.0).unwrap(), LossSpec::linex(-0.3).unwrap()] {
            for t in grid().filter(|t| t.abs() > 1e-9) {
                assert!(loss.deriv(t) * t > 0.0, "{loss} at {t}");
            }
        }
    }

    #[test]
    fn linex_overflow_saturates() {
        let lx = LossSpec::linex(1.0).unwrap();
        assert_eq!(lx.value(1e6), f64::INFINITY);
    }

    #[test]
    fn parse_and_display() {
        assert_eq!("squared".parse::<LossSpec>().unwrap(), LossSpec::SquaredError);
        assert_eq!("linex:0.5".parse::<LossSpec>().unwrap(), LossSpec::Linex { a: 0.5 });
        assert!("linex:0".parse::<LossSpec>().is_err());
        assert!("absolute".parse::<LossSpec>().is_err());
        let lx = LossSpec::linex(-1.25).unwrap();
        assert_eq!(lx.to_string().parse::<LossSpec>().unwrap(), lx);
    }

    #[test]
    fn custom_loss_checks_bowl_shape() {
        assert!(CustomLoss::new("quartic", |t: f64| t.powi(4), |t: f64| 4.0 * t.powi(3)).is_ok());
        assert!(CustomLoss::new("monotone", |t: f64| t, |_t: f64| 1.0).is_err());
    }
}
