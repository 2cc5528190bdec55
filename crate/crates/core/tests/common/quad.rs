//! Adaptive Gauss-Kronrod (7/15) quadrature and a brute-force oracle for the
//! conjugate working-model marginal likelihood.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use statrs::function::gamma::ln_gamma;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15(f: &mut dyn FnMut(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

const MAX_PANELS: usize = 400;

/// Globally adaptive integral of `f` over `[a, b]`: the panel with the
/// largest Kronrod/Gauss gap is split until the summed gap is below `tol`
/// (or a round-off floor, or the panel budget is spent).
pub fn integrate(f: &mut dyn FnMut(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let (v, e) = gk15(f, a, b);
    let mut panels = vec![(a, b, v, e)];
    loop {
        let total: f64 = panels.iter().map(|p| p.2).sum();
        let err: f64 = panels.iter().map(|p| p.3).sum();
        if err <= tol.max(1e-14 * total.abs()) || panels.len() >= MAX_PANELS {
            return total;
        }
        let worst = (0..panels.len())
            .max_by(|&i, &j| panels[i].3.total_cmp(&panels[j].3))
            .unwrap();
        let (lo, hi, _, _) = panels.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        let (lv, le) = gk15(f, lo, mid);
        let (rv, re) = gk15(f, mid, hi);
        panels.push((lo, mid, lv, le));
        panels.push((mid, hi, rv, re));
    }
}

/// Integral over the real line via `x = t / (1 - t^2)`.
pub fn integrate_real_line(f: &mut dyn FnMut(f64) -> f64, tol: f64) -> f64 {
    let mut g = |t: f64| {
        let d = 1.0 - t * t;
        if d <= 0.0 {
            return 0.0;
        }
        let x = t / d;
        let jac = (1.0 + t * t) / (d * d);
        let v = f(x) * jac;
        if v.is_finite() { v } else { 0.0 }
    };
    integrate(&mut g, -1.0, 1.0, tol)
}

/// Nested integral of `f` over `R^k`. Inner levels run at a tighter
/// tolerance than the level enclosing them so the outer rule sees a smooth
/// integrand.
pub fn integrate_rk(f: &mut dyn FnMut(&[f64]) -> f64, k: usize, tol: f64) -> f64 {
    fn level(f: &mut dyn FnMut(&[f64]) -> f64, point: &mut Vec<f64>, k: usize, tol: f64) -> f64 {
        if point.len() == k {
            return f(point);
        }
        let here = tol * 10f64.powi(-2 * point.len() as i32);
        let mut inner = |x: f64| {
            point.push(x);
            let v = level(f, point, k, tol);
            point.pop();
            v
        };
        integrate_real_line(&mut inner, here)
    }
    level(f, &mut Vec::with_capacity(k), k, tol)
}

/// `log p(y)` for `y ~ N(X b, s2 I)`, `b ~ N(0, s2 I_k)`, `s2 ~ IG(c, d)`,
/// integrating `s2` with the gamma integral and `b` numerically. The
/// coordinates are centred and whitened at the conditional mode so that the
/// integrand is close to isotropic.
pub fn log_ml_by_quadrature(y: &DVector<f64>, x: &DMatrix<f64>, c: f64, d: f64, tol: f64) -> f64 {
    let (n, k) = x.shape();
    let nf = n as f64;
    let kf = k as f64;
    let shape = c + 0.5 * (nf + kf);
    let a = x.tr_mul(x) + DMatrix::identity(k, k);
    let mode = a.clone().cholesky().unwrap().solve(&x.tr_mul(y));
    let q = |b: &DVector<f64>| (y - x * b).norm_squared() + b.norm_squared();
    let q_mode = q(&mode);
    // scale of the b-marginal: (d + Q/2) / shape * A^-1
    let cov = a.try_inverse().unwrap() * ((d + 0.5 * q_mode) / shape);
    let l = cov.cholesky().unwrap().l();
    let log_jac: f64 = (0..k).map(|i| l[(i, i)].ln()).sum();
    let log_kernel = |b: &DVector<f64>| -shape * (d + 0.5 * q(b)).ln();
    let ref_val = log_kernel(&mode);
    // Allocation-free evaluation of the same kernel for the inner loop.
    let xs: Vec<f64> = x.iter().copied().collect();
    let ls: Vec<f64> = l.iter().copied().collect();
    let ms: Vec<f64> = mode.iter().copied().collect();
    let ys: Vec<f64> = y.iter().copied().collect();
    let mut f = |z: &[f64]| {
        let mut b = [0.0f64; 8];
        for i in 0..k {
            let mut v = ms[i];
            for j in 0..=i {
                v += ls[i + j * k] * z[j];
            }
            b[i] = v;
        }
        let mut qv: f64 = b[..k].iter().map(|v| v * v).sum();
        for r in 0..n {
            let mut fit = 0.0;
            for j in 0..k {
                fit += xs[r + j * n] * b[j];
            }
            qv += (ys[r] - fit).powi(2);
        }
        (-shape * (d + 0.5 * qv).ln() - ref_val).exp()
    };
    let integral = integrate_rk(&mut f, k, tol);
    let log_const = -0.5 * (nf + kf) * (2.0 * std::f64::consts::PI).ln() + c * d.ln() - ln_gamma(c) + ln_gamma(shape);
    log_const + ref_val + log_jac + integral.ln()
}

/// Intercept-only model integrated over both `(b0, s2)` numerically, with no
/// analytic step.
pub fn log_ml_intercept_only_2d(y: &[f64], c: f64, d: f64, tol: f64) -> f64 {
    let n = y.len() as f64;
    let log_joint = |b0: f64, s2: f64| {
        let rss: f64 = y.iter().map(|v| (v - b0).powi(2)).sum();
        let log_lik = -0.5 * n * (2.0 * std::f64::consts::PI * s2).ln() - rss / (2.0 * s2);
        let log_prior_b = -0.5 * (2.0 * std::f64::consts::PI * s2).ln() - b0 * b0 / (2.0 * s2);
        let log_prior_s2 = c * d.ln() - ln_gamma(c) - (c + 1.0) * s2.ln() - d / s2;
        log_lik + log_prior_b + log_prior_s2
    };
    let ybar = y.iter().sum::<f64>() / n;
    let b_ref = ybar * n / (n + 1.0);
    let s2_ref = (d + 0.5 * y.iter().map(|v| (v - b_ref).powi(2)).sum::<f64>()) / (c + 0.5 * (n + 1.0) + 1.0);
    let ref_val = log_joint(b_ref, s2_ref);
    let mut outer = |u: f64| {
        // s2 = s2_ref * exp(u)
        let s2 = s2_ref * u.exp();
        let w = (s2 / (n + 1.0)).sqrt();
        let mut inner = |z: f64| (log_joint(b_ref + w * z, s2) - ref_val).exp();
        integrate_real_line(&mut inner, tol * 1e-3) * w * s2
    };
    let integral: f64 = (-60..60)
        .map(|i| integrate(&mut outer, i as f64, i as f64 + 1.0, tol / 120.0))
        .sum();
    ref_val + integral.ln()
}
