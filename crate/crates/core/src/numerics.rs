//! Quadrature and root-finding kernel.
//!
//! Expectations over independent `U ~ Exp(rate)` and `V ~ Gamma(shape, 1)` use
//! tensor-product Gauss-Laguerre rules with adaptive node doubling. Beta-type
//! integrals `∫₀^z x^p (1+x)^(-q) dx` are evaluated through the incomplete beta
//! function, so no nested quadrature is needed on the hot path.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use nalgebra::{DMatrix, SymmetricEigen};
use statrs::function::gamma::{gamma_lr, ln_gamma};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadSettings {
    /// Gauss-Laguerre nodes per axis on the first pass.
    pub node_count: usize,
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Number of node doublings allowed after the first pass.
    pub max_subdivisions: usize,
}

impl Default for QuadSettings {
    fn default() -> Self {
        Self { node_count: 32, abs_tol: 1e-10, rel_tol: 1e-8, max_subdivisions: 4 }
    }
}

impl QuadSettings {
    pub fn validate(&self) -> Result<()> {
        if self.node_count < 16 {
            return Err(Error::InvalidParameter(format!("node_count must be >= 16, got {}", self.node_count)));
        }
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(Error::InvalidParameter("quadrature tolerances must be positive".into()));
        }
        Ok(())
    }
}

/// Nodes and weights for `∫₀^∞ f(x) x^α e^(-x) dx / Γ(α+1)`, i.e. an
/// expectation under `Gamma(α+1, 1)`. Weights sum to 1.
#[derive(Debug, Clone)]
pub struct LaguerreRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl LaguerreRule {
    pub fn expect(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

/// `(L_n(x), L_{n-1}(x), ln scale)` with the true values equal to the returned
/// pair times `exp(ln scale)`.
fn laguerre_pair(n: usize, alpha: f64, x: f64) -> (f64, f64, f64) {
    let mut prev = 1.0;
    let mut cur = 1.0 + alpha - x;
    let mut ln_scale = 0.0;
    if n == 0 {
        return (1.0, 0.0, 0.0);
    }
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + alpha - x) * cur - (kf + alpha) * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
        let m = cur.abs().max(prev.abs());
        if m > 1e100 {
            cur /= m;
            prev /= m;
            ln_scale += m.ln();
        }
    }
    (cur, prev, ln_scale)
}

fn build_rule(n: usize, alpha: f64) -> LaguerreRule {
    let mut jacobi = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        jacobi[(i, i)] = 2.0 * i as f64 + alpha + 1.0;
        if i + 1 < n {
            let off = (((i + 1) as f64) * ((i + 1) as f64 + alpha)).sqrt();
            jacobi[(i, i + 1)] = off;
            jacobi[(i + 1, i)] = off;
        }
    }
    let mut nodes: Vec<f64> = SymmetricEigen::new(jacobi).eigenvalues.iter().copied().collect();
    nodes.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let nf = n as f64;
    let ln_norm = ln_gamma(nf + alpha + 1.0) - ln_gamma(nf + 1.0) - ln_gamma(alpha + 1.0);
    let mut weights = Vec::with_capacity(n);
    for x in nodes.iter_mut() {
        for _ in 0..8 {
            let (value, _, value_scale) = laguerre_pair(n, alpha, *x);
            // L_n^(α)' = -L_{n-1}^(α+1), which avoids cancellation near small roots.
            let (deriv, _, deriv_scale) = laguerre_pair(n - 1, alpha + 1.0, *x);
            if deriv == 0.0 {
                break;
            }
            let step = -(value / deriv) * (value_scale - deriv_scale).exp();
            *x -= step;
            if step.abs() <= 4.0 * f64::EPSILON * x.abs() {
                break;
            }
        }
        let (deriv, _, deriv_scale) = laguerre_pair(n - 1, alpha + 1.0, *x);
        let ln_abs_deriv = deriv.abs().ln() + deriv_scale;
        weights.push((ln_norm - x.ln() - 2.0 * ln_abs_deriv).exp());
    }
    let keep: Vec<usize> = (0..n).filter(|&i| weights[i] > 0.0 && weights[i].is_finite()).collect();
    // The log-gamma normalization carries ~1e-12 relative error at large n;
    // the zeroth moment is exactly one.
    let total: f64 = keep.iter().map(|&i| weights[i]).sum();
    LaguerreRule {
        nodes: keep.iter().map(|&i| nodes[i]).collect(),
        weights: keep.iter().map(|&i| weights[i] / total).collect(),
    }
}

type RuleCache = RwLock<HashMap<(usize, u64), Arc<LaguerreRule>>>;

/// Cached generalized Gauss-Laguerre rule with `n` nodes and exponent `alpha > -1`.
pub fn laguerre_rule(n: usize, alpha: f64) -> Arc<LaguerreRule> {
    static CACHE: OnceLock<RuleCache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| RwLock::new(HashMap::new()));
    let key = (n, alpha.to_bits());
    if let Some(rule) = cache.read().unwrap().get(&key) {
        return Arc::clone(rule);
    }
    let rule = Arc::new(build_rule(n, alpha));
    cache.write().unwrap().entry(key).or_insert(rule).clone()
}

fn converged(prev: f64, cur: f64, settings: &QuadSettings) -> bool {
    (cur - prev).abs() <= settings.abs_tol.max(settings.rel_tol * cur.abs())
}

/// `E[g(U, V)]` for independent `U ~ Exp(exp_rate)` and `V ~ Gamma(gamma_shape, 1)`.
pub fn expect_exp_gamma(
    integrand: impl Fn(f64, f64) -> f64,
    exp_rate: f64,
    gamma_shape: f64,
    settings: &QuadSettings,
) -> Result<f64> {
    if !(exp_rate > 0.0 && gamma_shape > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "expect_exp_gamma needs positive rate and shape, got {exp_rate}, {gamma_shape}"
        )));
    }
    settings.validate()?;
    let pass = |n: usize| {
        let exp_rule = laguerre_rule(n, 0.0);
        let gamma_rule = laguerre_rule(n, gamma_shape - 1.0);
        let mut total = 0.0;
        for (&x, &wx) in exp_rule.nodes.iter().zip(&exp_rule.weights) {
            let u = x / exp_rate;
            total += wx * gamma_rule.expect(|v| integrand(u, v));
        }
        total
    };
    adaptive(pass, settings, "exp x gamma expectation")
}

/// `E[g(V)]` for `V ~ Gamma(gamma_shape, 1)`.
pub fn expect_gamma(integrand: impl Fn(f64) -> f64, gamma_shape: f64, settings: &QuadSettings) -> Result<f64> {
    if !(gamma_shape > 0.0) {
        return Err(Error::InvalidParameter(format!("gamma shape must be positive, got {gamma_shape}")));
    }
    settings.validate()?;
    adaptive(|n| laguerre_rule(n, gamma_shape - 1.0).expect(&integrand), settings, "gamma expectation")
}

fn adaptive(pass: impl Fn(usize) -> f64, settings: &QuadSettings, what: &str) -> Result<f64> {
    let mut n = settings.node_count;
    let mut prev = pass(n);
    for _ in 0..settings.max_subdivisions {
        n *= 2;
        let cur = pass(n);
        if converged(prev, cur, settings) {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::QuadratureNoConverge(format!(
        "{what} did not settle after {} node doublings (last value {prev})",
        settings.max_subdivisions
    )))
}

/// Root of a function that changes sign on `[lo, hi]`.
///
/// Stops when `|f(c)| <= tol` or the bracket is narrower than `tol`.
pub fn solve_root_monotone(f: impl Fn(f64) -> f64, bracket: (f64, f64), tol: f64) -> Result<f64> {
    let (mut lo, mut hi) = bracket;
    if lo > hi {
        std::mem::swap(&mut lo, &mut hi);
    }
    let mut f_lo = f(lo);
    let mut f_hi = f(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.is_nan() || f_hi.is_nan() || f_lo.signum() == f_hi.signum() {
        return Err(Error::NoSignChange { lo, hi, f_lo, f_hi });
    }
    // A secant step that fails to halve the bracket forces a bisection next.
    let mut force_bisect = false;
    for _ in 0..500 {
        let width = hi - lo;
        let mut c = 0.5 * (lo + hi);
        if !force_bisect {
            let s = hi - f_hi * (hi - lo) / (f_hi - f_lo);
            if s > lo && s < hi {
                c = s;
            }
        }
        let fc = f(c);
        if fc.abs() <= tol || width <= tol || c == lo || c == hi {
            return Ok(c);
        }
        if fc.signum() == f_lo.signum() {
            lo = c;
            f_lo = fc;
        } else {
            hi = c;
            f_hi = fc;
        }
        force_bisect = hi - lo > 0.5 * width;
    }
    Ok(0.5 * (lo + hi))
}

/// Widens `hi` geometrically from `start_hi` until `f(lo)` and `f(hi)` differ
/// in sign, then solves. `cap` bounds the search.
pub(crate) fn solve_root_widening(f: impl Fn(f64) -> f64, lo: f64, start_hi: f64, cap: f64, tol: f64) -> Result<f64> {
    let f_lo = f(lo);
    let mut hi = start_hi.min(cap);
    let mut f_hi = f(hi);
    while f_lo.signum() == f_hi.signum() && hi < cap {
        hi = (hi * 4.0).min(cap);
        f_hi = f(hi);
    }
    solve_root_monotone(f, (lo, hi), tol)
}

/// `ln B(a, b)`.
pub fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

/// Continued fraction for the incomplete beta function (modified Lentz).
fn beta_continued_fraction(a: f64, b: f64, x: f64) -> Result<f64> {
    const TINY: f64 = 1e-300;
    const EPS: f64 = 1e-16;
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=5000 {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() <= EPS {
            return Ok(h);
        }
    }
    Err(Error::QuadratureNoConverge(format!("incomplete beta continued fraction at a={a}, b={b}, x={x}")))
}

/// `ln B_x(a, b) = ln ∫₀^x t^(a-1) (1-t)^(b-1) dt` for `x ∈ [0, 1]`.
pub fn ln_incomplete_beta(a: f64, b: f64, x: f64) -> Result<f64> {
    if x <= 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    if x >= 1.0 {
        return Ok(ln_beta(a, b));
    }
    let ln_front = a * x.ln() + b * (-x).ln_1p();
    if x < (a + 1.0) / (a + b + 2.0) {
        Ok(ln_front - a.ln() + beta_continued_fraction(a, b, x)?.ln())
    } else {
        let tail = (ln_front - b.ln() + beta_continued_fraction(b, a, 1.0 - x)?.ln() - ln_beta(a, b)).exp();
        Ok(ln_beta(a, b) + (-tail).ln_1p())
    }
}

/// `(ln I, ln(1 - I))` for the regularized incomplete beta `I = I_x(a, b)`,
/// with `1 - x` passed separately so that `x` near 1 keeps full precision.
/// Both logs carry relative accuracy on whichever side is small.
pub fn ln_regularized_beta_pair(a: f64, b: f64, x: f64, one_minus_x: f64) -> Result<(f64, f64)> {
    if x <= 0.0 {
        return Ok((f64::NEG_INFINITY, 0.0));
    }
    if one_minus_x <= 0.0 {
        return Ok((0.0, f64::NEG_INFINITY));
    }
    let ln_front = a * x.ln() + b * one_minus_x.ln() - ln_beta(a, b);
    if x < (a + 1.0) / (a + b + 2.0) {
        let ln_lower = ln_front - a.ln() + beta_continued_fraction(a, b, x)?.ln();
        Ok((ln_lower, (-ln_lower.exp()).ln_1p()))
    } else {
        let ln_upper = ln_front - b.ln() + beta_continued_fraction(b, a, one_minus_x)?.ln();
        Ok(((-ln_upper.exp()).ln_1p(), ln_upper))
    }
}

/// `ln ∫₀^z x^power_num (1+x)^(-power_den) dx`; `z = +∞` gives the complete integral.
pub fn ln_bz_beta_integral(power_num: f64, power_den: f64, z: f64) -> Result<f64> {
    if !(power_num >= 0.0 && power_den > power_num + 1.0) {
        return Err(Error::InvalidParameter(format!(
            "beta-type integral needs 0 <= p < q - 1, got p={power_num}, q={power_den}"
        )));
    }
    if z.is_nan() || z < 0.0 {
        return Err(Error::InvalidParameter(format!("beta-type integral upper limit must be >= 0, got {z}")));
    }
    let a = power_num + 1.0;
    let b = power_den - power_num - 1.0;
    if z.is_infinite() {
        return Ok(ln_beta(a, b));
    }
    // x = t / (1 - t) maps [0, z] onto [0, z / (1 + z)].
    ln_incomplete_beta(a, b, z / (1.0 + z))
}

/// `∫₀^z x^power_num (1+x)^(-power_den) dx`; `z = +∞` gives the complete integral.
pub fn bz_beta_integral(power_num: f64, power_den: f64, z: f64) -> Result<f64> {
    ln_bz_beta_integral(power_num, power_den, z).map(f64::exp)
}

/// `ln P(k, y)`, the regularized lower incomplete gamma function, accurate in
/// relative terms for small `y` where `P` underflows.
pub fn ln_lower_gamma_regularized(k: f64, y: f64) -> f64 {
    if y <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if y < k + 1.0 {
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut j = 1.0;
        while term > sum * 1e-17 {
            term *= y / (k + j);
            sum += term;
            j += 1.0;
        }
        -y + k * y.ln() - ln_gamma(k + 1.0) + sum.ln()
    } else {
        gamma_lr(k, y).ln()
    }
}

/// Piecewise cubic Hermite interpolant with Fritsch-Carlson slopes; preserves
/// monotonicity of the data.
#[derive(Debug, Clone)]
pub struct MonotoneCubic {
    xs: Vec<f64>,
    ys: Vec<f64>,
    slopes: Vec<f64>,
}

impl MonotoneCubic {
    /// `xs` must be strictly increasing with at least two points.
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() < 2 || xs.len() != ys.len() || xs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter("interpolation grid must be strictly increasing".into()));
        }
        let n = xs.len();
        let secants: Vec<f64> = (0..n - 1).map(|i| (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i])).collect();
        let mut slopes = vec![0.0; n];
        slopes[0] = secants[0];
        slopes[n - 1] = secants[n - 2];
        for i in 1..n - 1 {
            let (d0, d1) = (secants[i - 1], secants[i]);
            if d0 * d1 <= 0.0 {
                slopes[i] = 0.0;
            } else {
                let h0 = xs[i] - xs[i - 1];
                let h1 = xs[i + 1] - xs[i];
                let w0 = 2.0 * h1 + h0;
                let w1 = h1 + 2.0 * h0;
                slopes[i] = (w0 + w1) / (w0 / d0 + w1 / d1);
            }
        }
        Ok(Self { xs, ys, slopes })
    }

    /// Evaluates inside the grid; arguments outside are clamped to the ends.
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.xs.len();
        if x <= self.xs[0] {
            return self.ys[0];
        }
        if x >= self.xs[n - 1] {
            return self.ys[n - 1];
        }
        let i = self.xs.partition_point(|&v| v <= x) - 1;
        let h = self.xs[i + 1] - self.xs[i];
        let t = (x - self.xs[i]) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.ys[i] + h10 * h * self.slopes[i] + h01 * self.ys[i + 1] + h11 * h * self.slopes[i + 1]
    }

    pub fn knots(&self) -> (&[f64], &[f64]) {
        (&self.xs, &self.ys)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn settings() -> QuadSettings {
        QuadSettings::default()
    }

    #[test]
    fn laguerre_rule_integrates_polynomials_exactly() {
        for &(n, alpha) in &[(16usize, 0.0), (64, 0.0), (64, 2.0), (128, 0.5), (32, -0.5)] {
            let rule = laguerre_rule(n, alpha);
            // E[V^m] = Γ(α+1+m)/Γ(α+1) for V ~ Gamma(α+1).
            for m in 0..(2 * n).min(40) {
                let got = rule.expect(|x| x.powi(m as i32));
                let want = (ln_gamma(alpha + 1.0 + m as f64) - ln_gamma(alpha + 1.0)).exp();
                assert_relative_eq!(got, want, max_relative = 1e-10);
            }
        }
    }

    #[test]
    fn laguerre_rule_handles_exponential_growth() {
        let rule = laguerre_rule(64, 0.0);
        for beta in [0.25, 0.5, 0.9] {
            let got = rule.expect(|x| (beta * x).exp());
            assert_relative_eq!(got, 1.0 / (1.0 - beta), max_relative = 1e-9);
        }
    }

    #[test]
    fn expect_exp_gamma_examples() {
        let s = settings();
        assert_relative_eq!(expect_exp_gamma(|_, _| 1.0, 2.5, 1.7, &s).unwrap(), 1.0, epsilon = 1e-12);
        assert_relative_eq!(expect_exp_gamma(|u, v| u * v, 4.0, 3.0, &s).unwrap(), 0.75, epsilon = 1e-12);
        let c = 1.0 / 16.0;
        let baee = expect_exp_gamma(|u, v| (u - c * v) * v, 4.0, 3.0, &s).unwrap();
        assert!(baee.abs() < 1e-12, "{baee}");
    }

    #[test]
    fn expect_exp_gamma_rejects_bad_inputs() {
        assert!(expect_exp_gamma(|_, _| 1.0, 0.0, 1.0, &settings()).is_err());
        let bad = QuadSettings { node_count: 8, ..settings() };
        assert!(expect_exp_gamma(|_, _| 1.0, 1.0, 1.0, &bad).is_err());
    }

    #[test]
    fn expect_exp_gamma_reports_non_convergence() {
        let tight = QuadSettings { max_subdivisions: 1, ..settings() };
        let r = expect_exp_gamma(|u, v| if u > 0.3 * v { 1.0 } else { 0.0 }, 1.0, 2.0, &tight);
        assert!(matches!(r, Err(Error::QuadratureNoConverge(_))));
    }

    #[test]
    fn root_examples() {
        assert_relative_eq!(solve_root_monotone(|c| c - 0.5, (0.0, 1.0), 1e-14).unwrap(), 0.5, epsilon = 1e-13);
        assert_relative_eq!(
            solve_root_monotone(|c| 0.25 - 8.0 * c, (0.0, 1.0), 1e-14).unwrap(),
            0.03125,
            epsilon = 1e-13
        );
        assert!(solve_root_monotone(|c| (-c).exp() - 1.0, (-1.0, 1.0), 1e-14).unwrap().abs() < 1e-13);
    }

    #[test]
    fn root_requires_sign_change() {
        let r = solve_root_monotone(|c| c * c + 1.0, (-1.0, 1.0), 1e-12);
        assert!(matches!(r, Err(Error::NoSignChange { .. })));
    }

    #[test]
    fn root_of_steep_function() {
        let r = solve_root_monotone(|c| (50.0 * (c - 0.3)).tanh(), (0.0, 10.0), 1e-13).unwrap();
        assert_relative_eq!(r, 0.3, epsilon = 1e-12);
    }

    #[test]
    fn beta_integral_examples() {
        assert_relative_eq!(bz_beta_integral(0.0, 2.0, 1.0).unwrap(), 0.5, epsilon = 1e-14);
        assert_relative_eq!(bz_beta_integral(3.0, 8.0, f64::INFINITY).unwrap(), 36.0 / 5040.0, max_relative = 1e-13);
        let z: f64 = 1e-12;
        assert_relative_eq!(bz_beta_integral(3.0, 8.0, z).unwrap(), z.powi(4) / 4.0, max_relative = 1e-9);
    }

    #[test]
    fn beta_integral_large_argument_approaches_complete() {
        let full = bz_beta_integral(2.0, 9.0, f64::INFINITY).unwrap();
        let near = bz_beta_integral(2.0, 9.0, 1e8).unwrap();
        assert_relative_eq!(near, full, max_relative = 1e-12);
    }

    #[test]
    fn regularized_beta_pair_keeps_both_tails() {
        // I_x(1, b) = 1 - (1 - x)^b.
        let b = 7.0;
        let (_, ln_upper) = ln_regularized_beta_pair(1.0, b, 1.0 - 1e-10, 1e-10).unwrap();
        assert_relative_eq!(ln_upper, b * 1e-10f64.ln(), max_relative = 1e-13);
        let x = 1e-12;
        let (ln_lower, _) = ln_regularized_beta_pair(1.0, b, x, 1.0 - x).unwrap();
        assert_relative_eq!(ln_lower.exp(), -(b * (-x).ln_1p()).exp_m1(), max_relative = 1e-12);
        let (lo, up) = ln_regularized_beta_pair(2.5, 3.5, 0.4, 0.6).unwrap();
        assert_relative_eq!(lo.exp() + up.exp(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn beta_integral_rejects_divergent_powers() {
        assert!(bz_beta_integral(3.0, 4.0, 1.0).is_err());
        assert!(bz_beta_integral(1.0, 4.0, -1.0).is_err());
    }

    #[test]
    fn lower_gamma_matches_statrs_and_small_argument_limit() {
        for k in [1.0, 3.0, 8.0] {
            for y in [0.01, 0.5, 2.0, 9.0, 30.0] {
                assert_relative_eq!(ln_lower_gamma_regularized(k, y).exp(), gamma_lr(k, y), max_relative = 1e-12);
            }
        }
        let y: f64 = 1e-80;
        let want = 20.0 * y.ln() - ln_gamma(21.0);
        assert_relative_eq!(ln_lower_gamma_regularized(20.0, y), want, max_relative = 1e-14);
    }

    #[test]
    fn monotone_cubic_reproduces_knots_and_stays_monotone() {
        let xs: Vec<f64> = (0..20).map(|i| i as f64 * 0.5).collect();
        let ys: Vec<f64> = xs.iter().map(|x| (x / 3.0).tanh()).collect();
        let interp = MonotoneCubic::new(xs.clone(), ys.clone()).unwrap();
        for (x, y) in xs.iter().zip(&ys) {
            assert_relative_eq!(interp.eval(*x), *y, epsilon = 1e-15);
        }
        let mut prev = f64::NEG_INFINITY;
        for i in 0..=1000 {
            let v = interp.eval(i as f64 * 0.0095);
            assert!(v >= prev);
            prev = v;
        }
        assert!(MonotoneCubic::new(vec![1.0, 1.0], vec![0.0, 1.0]).is_err());
    }
}
