//! The 𝔉 functional on finite sequences.
//!
//! 𝔉(x) = 1 + Σ_m (−1)^m Σ x_{k1}x_{k1+1}···x_{km}x_{km+1}, the inner sum running
//! over index tuples with k_{j+1} ≥ k_j + 2. It is evaluated by the backward
//! recurrence 𝔉_{n..} = 𝔉_{n+1..} − x_n x_{n+1} 𝔉_{n+2..}.

use crate::error::{Error, Result};
use crate::jet::{Jet, Scalar};
use num_complex::Complex64 as C;

/// Longest sequence accepted by [`f_eval_bruteforce`].
pub const BRUTE_MAX: usize = 32;

/// 𝔉 of a finite complex sequence by one backward sweep.
///
/// The empty sequence and singletons give 1.
pub fn f_eval(xs: &[C]) -> C {
    f_eval_with(xs, C::new(1.0, 0.0))
}

/// 𝔉 on any [`Scalar`]; `one` fixes the shape of the result (for jets, the
/// order and base point), which also covers the empty sequence.
pub fn f_eval_with<S: Scalar>(xs: &[S], one: S) -> S {
    let n = xs.len();
    if n < 2 {
        return one;
    }
    // next = 𝔉(x_{i+1..}), next2 = 𝔉(x_{i+2..})
    let mut next2 = one;
    let mut next = one;
    for i in (0..n - 1).rev() {
        let cur = next - xs[i] * xs[i + 1] * next2;
        next2 = next;
        next = cur;
    }
    next
}

/// 𝔉 of the sub-sequence `xs[a..=b]` (indices into the slice), honoring both
/// boundary conventions: 1 when `b = a − 1` and 0 when `b = a − 2`.
pub fn f_range(xs: &[C], a: i64, b: i64) -> C {
    if b == a - 1 {
        return C::new(1.0, 0.0);
    }
    if b == a - 2 {
        return C::new(0.0, 0.0);
    }
    assert!(a >= 0 && b >= a && (b as usize) < xs.len(), "bad range {a}..={b}");
    f_eval(&xs[a as usize..=b as usize])
}

/// Literal evaluation of the defining nested sum. Exponential cost; oracle only.
pub fn f_eval_bruteforce(xs: &[C]) -> Result<C> {
    if xs.len() > BRUTE_MAX {
        return Err(Error::TooLong { len: xs.len(), max: BRUTE_MAX });
    }
    let pairs: Vec<C> = xs.windows(2).map(|w| w[0] * w[1]).collect();
    // walk all admissible tuples k1 < k2 < ... with gaps ≥ 2
    fn rec(pairs: &[C], start: usize, sign: f64, prod: C, acc: &mut C) {
        for k in start..pairs.len() {
            let p = prod * pairs[k];
            *acc += p * (-sign);
            rec(pairs, k + 2, -sign, p, acc);
        }
    }
    let mut acc = C::new(1.0, 0.0);
    rec(&pairs, 0, 1.0, C::new(1.0, 0.0), &mut acc);
    Ok(acc)
}

/// Σ|x_k x_{k+1}| over the sequence.
pub fn pair_sum(xs: &[C]) -> f64 {
    xs.windows(2).map(|w| (w[0] * w[1]).norm()).sum()
}

/// Bound on |𝔉(full) − 𝔉(truncated)|: exp(S_total)·(exp(S_tail) − 1).
pub fn tail_bound(s_total: f64, s_tail: f64) -> Result<f64> {
    if !(s_total >= 0.0) || !(s_tail >= 0.0) {
        return Err(Error::NegativeInput);
    }
    Ok(s_total.exp() * s_tail.exp_m1())
}

/// Expand entries `num/(z − pole)` as jets of the given order at `z0`.
///
/// Each entry is `(index, num, pole)`; the index is only used for error
/// reporting.
pub fn jet_lift(z0: C, order: usize, entries: &[(i64, C, C)]) -> Result<Vec<Jet>> {
    let mut out = Vec::with_capacity(entries.len());
    for &(idx, num, pole) in entries {
        let d = z0 - pole;
        if d == C::new(0.0, 0.0) {
            return Err(Error::PoleAtBase { index: idx });
        }
        // num/(d + h) = (num/d) Σ (−h/d)^j
        let r = -d.inv();
        let mut coeffs = Vec::with_capacity(order + 1);
        let mut t = num / d;
        for _ in 0..=order {
            coeffs.push(t);
            t *= r;
        }
        out.push(Jet::from_coeffs(z0, &coeffs));
    }
    Ok(out)
}
