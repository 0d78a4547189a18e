//! Test-only oracles, independent of the library's numerics.
#![allow(dead_code)]

use statrs::function::gamma::ln_gamma;

const GK_X: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const GK_WK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const GK_WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// 15-point Kronrod estimate and its difference from the embedded 7-point
/// Gauss estimate on `[a, b]`.
pub fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = fc * GK_WK[7];
    let mut gauss = fc * GK_WG[3];
    for i in 0..7 {
        let dx = h * GK_X[i];
        let s = f(c - dx) + f(c + dx);
        kronrod += GK_WK[i] * s;
        if i % 2 == 1 {
            gauss += GK_WG[i / 2] * s;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

/// Adaptive bisection on G7K15 to absolute tolerance `tol`, or to a relative
/// error of 1e-15 on each panel.
pub fn integrate(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn go(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
        let (v, err) = gk15(f, a, b);
        if err <= tol || err <= 1e-15 * v.abs() || depth > 40 {
            return v;
        }
        let m = 0.5 * (a + b);
        go(f, a, m, 0.5 * tol, depth + 1) + go(f, m, b, 0.5 * tol, depth + 1)
    }
    go(f, a, b, tol, 0)
}

/// Fixed composite G7K15 nodes and weights on `[0, hi]`.
pub fn composite_rule(hi: f64, panels: usize) -> Vec<(f64, f64)> {
    let width = hi / panels as f64;
    let mut out = Vec::with_capacity(panels * 15);
    for p in 0..panels {
        let a = p as f64 * width;
        let c = a + 0.5 * width;
        let h = 0.5 * width;
        out.push((c, GK_WK[7] * h));
        for i in 0..7 {
            out.push((c - h * GK_X[i], GK_WK[i] * h));
            out.push((c + h * GK_X[i], GK_WK[i] * h));
        }
    }
    out
}

/// Gamma(shape, 1) density.
pub fn gamma_pdf(shape: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return if shape == 1.0 && x == 0.0 { 1.0 } else { 0.0 };
    }
    ((shape - 1.0) * x.ln() - x - ln_gamma(shape)).exp()
}

/// Gamma(shape, 1) CDF by direct quadrature of the density.
pub fn gamma_cdf(shape: f64, x: f64) -> f64 {
    let cap = shape + 60.0 + 20.0 * shape.sqrt();
    let hi = x.min(cap);
    if hi <= 0.0 {
        return 0.0;
    }
    let pdf = |s: f64| gamma_pdf(shape, s);
    integrate(&pdf, 0.0, hi, 1e-16)
}

/// Bisection for a decreasing function with a sign change in `[lo, hi]`.
pub fn bisect_decreasing(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    assert!(f(lo) > 0.0 && f(hi) < 0.0, "no sign change in [{lo}, {hi}]");
    for _ in 0..300 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    0.5 * (lo + hi)
}
