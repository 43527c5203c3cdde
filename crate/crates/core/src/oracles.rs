//! Special functions used as references: Bessel J, q-Pochhammer, ₀φ₁,
//! log-gamma and digamma.
//!
//! None of these touch the 𝔉 machinery, so comparisons against them are
//! genuinely two-sided.

use crate::error::{Error, Result};
use num_complex::Complex64 as C;
use std::f64::consts::PI;

// B_2, B_4, ..., B_16
const BERNOULLI: [f64; 8] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
];

const SHIFT: f64 = 10.0;

fn is_nonpositive_int(z: C) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re.fract() == 0.0
}

/// ln Γ(z). Shift to Re z > 10, Stirling series; reflection for Re z < 0.
/// The branch is continuous along the shift but not necessarily principal
/// after reflection; `exp` of the result is always Γ(z).
pub fn log_gamma(z: C, _tol: f64) -> Result<C> {
    if is_nonpositive_int(z) {
        return Err(Error::PoleArgument);
    }
    if z.re < 0.0 {
        // Γ(z)Γ(1−z) = π/sin πz
        let s = (z * PI).sin();
        return Ok(C::new(PI.ln(), 0.0) - s.ln() - log_gamma(C::new(1.0, 0.0) - z, _tol)?);
    }
    let mut w = z;
    let mut shift = C::new(0.0, 0.0);
    while w.re < SHIFT {
        shift += w.ln();
        w += 1.0;
    }
    let iw = w.inv();
    let iw2 = iw * iw;
    let mut series = C::new(0.0, 0.0);
    let mut pw = iw;
    for (k, b) in BERNOULLI.iter().enumerate() {
        let n = 2.0 * (k as f64 + 1.0);
        series += pw * (b / (n * (n - 1.0)));
        pw *= iw2;
    }
    let stirling = (w - 0.5) * w.ln() - w + 0.5 * (2.0 * PI).ln() + series;
    Ok(stirling - shift)
}

pub fn gamma(z: C) -> Result<C> {
    Ok(log_gamma(z, 0.0)?.exp())
}

/// 1/Γ(z), entire: zero at the poles of Γ.
pub fn rgamma(z: C) -> C {
    if is_nonpositive_int(z) {
        return C::new(0.0, 0.0);
    }
    (-log_gamma(z, 0.0).expect("poles excluded")).exp()
}

/// ψ(z) = Γ′(z)/Γ(z).
pub fn digamma(z: C, _tol: f64) -> Result<C> {
    if is_nonpositive_int(z) {
        return Err(Error::PoleArgument);
    }
    if z.re < 0.0 {
        // ψ(1−z) − ψ(z) = π cot πz
        let cot = (z * PI).cos() / (z * PI).sin();
        return Ok(digamma(C::new(1.0, 0.0) - z, _tol)? - cot * PI);
    }
    let mut w = z;
    let mut shift = C::new(0.0, 0.0);
    while w.re < SHIFT {
        shift += w.inv();
        w += 1.0;
    }
    let iw = w.inv();
    let iw2 = iw * iw;
    let mut series = C::new(0.0, 0.0);
    let mut pw = iw2;
    for (k, b) in BERNOULLI.iter().enumerate() {
        let n = 2.0 * (k as f64 + 1.0);
        series += pw * (b / n);
        pw *= iw2;
    }
    Ok(w.ln() - iw * 0.5 - series - shift)
}

/// J_ν(x) by its power series. Integer negative orders use J_{−n} = (−1)^n J_n.
pub fn bessel_j(nu: C, x: C, tol: f64) -> Result<C> {
    if x.norm() > 50.0 {
        return Err(Error::NonConvergent(format!("|x| = {} above series cap 50", x.norm())));
    }
    if nu.im == 0.0 && nu.re < 0.0 && nu.re.fract() == 0.0 {
        let n = -nu.re;
        let sign = if (n as i64) % 2 == 0 { 1.0 } else { -1.0 };
        return Ok(bessel_j(C::new(n, 0.0), x, tol)? * sign);
    }
    if x == C::new(0.0, 0.0) {
        if nu == C::new(0.0, 0.0) {
            return Ok(C::new(1.0, 0.0));
        }
        if nu.re > 0.0 {
            return Ok(C::new(0.0, 0.0));
        }
        return Err(Error::PoleArgument);
    }
    let half = x * 0.5;
    let mut t = (nu * half.ln()).exp() * rgamma(nu + 1.0);
    let q = -(half * half);
    let mut sum = t;
    let tol = tol.max(1e-17);
    for k in 0..2000 {
        let kf = k as f64;
        t = t * q / ((kf + 1.0) * (nu + kf + 1.0));
        sum += t;
        if kf > x.norm() && t.norm() <= tol * sum.norm() {
            return Ok(sum);
        }
    }
    Err(Error::NonConvergent("Bessel series".into()))
}

/// (a; q)_∞ = ∏_{k≥0} (1 − a q^k).
pub fn qpochhammer(a: C, q: C, tol: f64) -> Result<C> {
    let aq = q.norm();
    if aq >= 1.0 {
        return Err(Error::QOutOfRange(aq));
    }
    let tol = tol.max(1e-18);
    let mut p = C::new(1.0, 0.0);
    let mut t = a;
    let mut mag = a.norm();
    loop {
        p *= C::new(1.0, 0.0) - t;
        t *= q;
        mag *= aq;
        if mag / (1.0 - aq) < tol || p == C::new(0.0, 0.0) {
            return Ok(p);
        }
    }
}

/// (a; q)_n, finite.
pub fn qpochhammer_n(a: C, q: C, n: usize) -> C {
    let mut p = C::new(1.0, 0.0);
    let mut t = a;
    for _ in 0..n {
        p *= C::new(1.0, 0.0) - t;
        t *= q;
    }
    p
}

/// ₀φ₁(−; b; q, x) = Σ_k q^{k(k−1)} x^k / ((q; q)_k (b; q)_k).
pub fn phi01(b: C, q: C, x: C, tol: f64) -> Result<C> {
    let aq = q.norm();
    if aq >= 1.0 {
        return Err(Error::QOutOfRange(aq));
    }
    let one = C::new(1.0, 0.0);
    let mut t = one;
    let mut sum = one;
    let mut qk = one; // q^k
    for k in 0..10_000 {
        let den = (one - qk * q) * (one - b * qk);
        if den == C::new(0.0, 0.0) {
            return Err(Error::PoleArgument);
        }
        t = t * qk * qk * x / den;
        sum += t;
        qk *= q;
        if k > 2 && t.norm() <= tol.max(1e-18) * sum.norm() {
            return Ok(sum);
        }
    }
    Err(Error::NonConvergent("basic hypergeometric series".into()))
}
