//! Scaled tridiagonal recurrences over finite windows.
//!
//! Fix nonzero scales s_k(z) and put d_k = (z − λ_k)s_k, c_k = s_k s_{k+1} w_k².
//! Then the scaled determinant over [a, b],
//!
//!   D_k = d_k D_{k−1} − c_{k−1} D_{k−2},
//!
//! equals ∏(z − λ_k)s_k · 𝔉({γ_k²/(z − λ_k)}) on that window. With
//! s_k = 1/(z − λ_k) it is 𝔉 itself; with the Hadamard scales it is the
//! regularized product, free of poles at z ∈ Ran(λ).

use crate::error::{Error, Result};
use crate::jet::Scalar;
use crate::sequence::{OperatorSpec, RegClass};
use num_complex::Complex64 as C;

/// Which scale s_k(z) an index gets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScaleRule {
    /// s = 1/(z − λ): plain 𝔉, poles at Ran(λ).
    Resolvent,
    /// s = z^{-1}·exp(Σ_{j<p}(λ/z)^j/j): factor (1 − λ/z)·exp(...)
    Phi(u32),
    /// s = −λ^{-1}·exp(Σ_{j<p}(z/λ)^j/j): factor (1 − z/λ)·exp(...);
    /// λ = 0 gets the bare factor z.
    Psi(u32),
}

/// Whether to use the unregularized 𝔉 or the class's Hadamard scales.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Generic,
    Regularized,
}

pub fn rule_for(class: RegClass, mode: Mode, k: i64) -> ScaleRule {
    if mode == Mode::Generic {
        return ScaleRule::Resolvent;
    }
    match class {
        RegClass::None => ScaleRule::Resolvent,
        RegClass::Compact { p } => ScaleRule::Phi(p),
        RegClass::CompactResolvent { p } => ScaleRule::Psi(p),
        RegClass::Combined { p } => {
            if k >= 1 {
                ScaleRule::Phi(p)
            } else {
                ScaleRule::Psi(p)
            }
        }
    }
}

fn exp_correction<S: Scalar>(u: S, p: u32) -> Option<S> {
    if p <= 1 {
        return None;
    }
    // Σ_{j=1}^{p−1} u^j/j
    let mut pw = u;
    let mut acc = u;
    for j in 2..p {
        pw = pw * u;
        acc = acc + pw.scale_c(C::new(1.0 / j as f64, 0.0));
    }
    Some(acc.exp())
}

/// Per-index data on a window [a, b].
#[derive(Clone, Debug)]
pub struct Window<S> {
    pub a: i64,
    pub b: i64,
    /// d_k, k = a..=b
    pub d: Vec<S>,
    /// s_k, k = a..=b
    pub s: Vec<S>,
    /// c_k = s_k s_{k+1} w_k², k = a..b−1
    pub c: Vec<S>,
    /// Σ |c_k|
    pub pair_sum: f64,
    /// log of M, where M runs the recurrence on |d_k|, |c_k|. It bounds the
    /// determinant and sets the roundoff scale of computing it.
    pub log_mag: f64,
}

/// (d_k, s_k) for one index.
pub fn index_data<S: Scalar>(spec: &OperatorSpec, mode: Mode, z: S, inv_z: Option<S>, k: i64) -> Result<(S, S)> {
    let one = z.one_like();
    let lam = spec.lambda(k);
    Ok(match rule_for(spec.reg_class, mode, k) {
        ScaleRule::Resolvent => {
            if z.value() == lam {
                return Err(Error::PoleHit { index: k });
            }
            (one, (z - z.lift(lam)).recip())
        }
        ScaleRule::Phi(p) => {
            let iz = inv_z.ok_or(Error::ZeroArgument)?;
            let u = iz.scale_c(lam);
            let base = one - u;
            match exp_correction(u, p) {
                Some(e) => (base * e, iz * e),
                None => (base, iz),
            }
        }
        ScaleRule::Psi(p) => {
            if lam == C::new(0.0, 0.0) {
                (z, one)
            } else {
                let il = lam.inv();
                let u = z.scale_c(il);
                let base = one - u;
                let sc = one.scale_c(-il);
                match exp_correction(u, p) {
                    Some(e) => (base * e, sc * e),
                    None => (base, sc),
                }
            }
        }
    })
}

pub fn inv_or_none<S: Scalar>(z: S) -> Option<S> {
    if z.value() != C::new(0.0, 0.0) {
        Some(z.recip())
    } else {
        None
    }
}

/// ln M for M_k = |d_k| M_{k−1} + |c_{k−1}| M_{k−2}, rescaled as it goes.
fn abs_recurrence_log<S: Scalar>(d: &[S], c: &[S]) -> f64 {
    let mut log = 0.0;
    let (mut m2, mut m1) = (0.0f64, 1.0f64);
    for i in 0..d.len() {
        let cur = d[i].value().norm() * m1 + if i > 0 { c[i - 1].value().norm() * m2 } else { 0.0 };
        m2 = m1;
        m1 = cur;
        if m1 > 1e100 {
            m1 *= 1e-100;
            m2 *= 1e-100;
            log += 100.0 * std::f64::consts::LN_10;
        }
    }
    log + m1.max(f64::MIN_POSITIVE).ln()
}

impl<S: Scalar> Window<S> {
    pub fn build(spec: &OperatorSpec, mode: Mode, z: S, a: i64, b: i64) -> Result<Self> {
        assert!(b >= a);
        let inv_z = inv_or_none(z);
        let len = (b - a + 1) as usize;
        let mut d = Vec::with_capacity(len);
        let mut s = Vec::with_capacity(len);
        for k in a..=b {
            let (dk, sk) = index_data(spec, mode, z, inv_z, k)?;
            d.push(dk);
            s.push(sk);
        }
        let mut c = Vec::with_capacity(len.saturating_sub(1));
        for k in a..b {
            let i = (k - a) as usize;
            c.push((s[i] * s[i + 1]).scale_c(spec.w_sq(k)));
        }
        let pair_sum = c.iter().map(|x| x.value().norm()).sum::<f64>();
        let log_mag = abs_recurrence_log(&d, &c);
        Ok(Window { a, b, d, s, c, pair_sum, log_mag })
    }

    fn idx(&self, k: i64) -> usize {
        debug_assert!(k >= self.a && k <= self.b, "index {k} outside [{}, {}]", self.a, self.b);
        (k - self.a) as usize
    }

    pub fn s_at(&self, k: i64) -> S {
        self.s[self.idx(k)]
    }

    /// Scaled determinant over the whole window.
    pub fn det(&self) -> S {
        let one = self.d[0].one_like();
        let mut prev2 = one.zero_like();
        let mut prev = one;
        for i in 0..self.d.len() {
            let cur = if i == 0 { self.d[0] * prev } else { self.d[i] * prev - self.c[i - 1] * prev2 };
            prev2 = prev;
            prev = cur;
        }
        prev
    }

    /// T_m = scaled determinant over [m, b] for m = lo..=hi (T_{b+1} = 1,
    /// T_{b+2} = 0 by convention). Returned in increasing m.
    pub fn tails(&self, lo: i64, hi: i64) -> Vec<S> {
        assert!(lo >= self.a && hi <= self.b + 1 && lo <= hi);
        let one = self.d[0].one_like();
        let mut out = vec![one; (hi - lo + 1) as usize];
        let mut next2 = one.zero_like(); // T_{m+2}
        let mut next = one; // T_{m+1}
        if hi == self.b + 1 {
            out[(hi - lo) as usize] = one;
        }
        for m in (lo..=self.b).rev() {
            let i = self.idx(m);
            let cur = if m == self.b { self.d[i] } else { self.d[i] * next - self.c[i] * next2 };
            next2 = next;
            next = cur;
            if m <= hi {
                out[(m - lo) as usize] = cur;
            }
        }
        out
    }

    /// H_m = scaled determinant over [a, m] for m = lo..=hi (H_{a−1} = 1,
    /// H_{a−2} = 0). Returned in increasing m.
    pub fn heads(&self, lo: i64, hi: i64) -> Vec<S> {
        assert!(lo >= self.a - 1 && hi <= self.b && lo <= hi);
        let one = self.d[0].one_like();
        let mut out = vec![one; (hi - lo + 1) as usize];
        let mut prev2 = one.zero_like();
        let mut prev = one;
        for m in self.a..=hi {
            let i = self.idx(m);
            let cur = if m == self.a { self.d[i] } else { self.d[i] * prev - self.c[i - 1] * prev2 };
            prev2 = prev;
            prev = cur;
            if m >= lo {
                out[(m - lo) as usize] = cur;
            }
        }
        out
    }
}

/// π̃_n for n in lo..=hi: π̃_0 = 1, π̃_n = π̃_{n−1}·w_{n−1}s_n.
///
/// With the resolvent scale this is 𝒫_n(z). The window must contain
/// min(lo, 0)+1 ..= max(hi, 0).
pub fn prefactors<S: Scalar>(spec: &OperatorSpec, win: &Window<S>, lo: i64, hi: i64) -> Vec<S> {
    let one = win.d[0].one_like();
    let top = hi.max(0);
    let bot = lo.min(0);
    let mut vals = vec![one; (top - bot + 1) as usize];
    let at = |n: i64| (n - bot) as usize;
    for n in 1..=top {
        vals[at(n)] = (vals[at(n - 1)] * win.s_at(n)).scale_c(spec.w(n - 1));
    }
    for n in (bot..0).rev() {
        // π̃_n = π̃_{n+1}/(w_n s_{n+1})
        let den = win.s_at(n + 1).scale_c(spec.w(n));
        vals[at(n)] = vals[at(n + 1)] * den.recip();
    }
    vals[at(lo)..=at(hi)].to_vec()
}
