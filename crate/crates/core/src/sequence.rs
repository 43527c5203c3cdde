//! Diagonal and off-diagonal sequences of a doubly infinite Jacobi matrix.
//!
//! An [`OperatorSpec`] bundles λ_n, w_n (built-in families or user callbacks),
//! an optional finite set of overrides, and the regularization class that
//! decides which Hadamard factors make the characteristic function analytic.

use crate::error::{Error, Result};
use num_complex::Complex64 as C;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, Mutex};

pub type SeqFn = Arc<dyn Fn(i64) -> C + Send + Sync>;
pub type PoleFn = Arc<dyn Fn(C) -> Vec<i64> + Send + Sync>;
pub type TailFn = Arc<dyn Fn(C, usize) -> Option<f64> + Send + Sync>;

/// How fast truncations converge as the window grows.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TailKind {
    /// Errors expand in powers of 1/N; windows are Richardson-extrapolated.
    Algebraic,
    /// Errors shrink like ρ^N; plain doubling.
    Geometric,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RegClass {
    None,
    Compact { p: u32 },
    CompactResolvent { p: u32 },
    Combined { p: u32 },
}

impl RegClass {
    pub fn p(&self) -> Option<u32> {
        match *self {
            RegClass::None => None,
            RegClass::Compact { p } | RegClass::CompactResolvent { p } | RegClass::Combined { p } => {
                Some(p)
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            RegClass::None => "none",
            RegClass::Compact { .. } => "compact",
            RegClass::CompactResolvent { .. } => "compact_resolvent",
            RegClass::Combined { .. } => "combined",
        }
    }
}

/// Tail information a custom spec must declare before it can be searched.
#[derive(Clone)]
pub struct TailMeta {
    pub kind: TailKind,
    /// Smallest window half-width worth evaluating.
    pub start: usize,
    /// Bound on Σ_{|k|≥N} |w_k²/((z−λ_k)(z−λ_{k+1}))|, or `None` when N is
    /// still too small for the bound to apply.
    pub pair_tail: Option<TailFn>,
}

#[derive(Clone)]
pub struct CustomSeq {
    pub name: String,
    pub lambda: SeqFn,
    pub w: SeqFn,
    pub reg_class: RegClass,
    pub tail: Option<TailMeta>,
    /// Exact pole inversion: all n with λ_n = z.
    pub poles: Option<PoleFn>,
    /// Relative tolerance for the fallback window scan.
    pub match_tol: f64,
    /// Declared accumulation points of λ.
    pub accumulation: Vec<C>,
}

impl CustomSeq {
    pub fn new(name: &str, lambda: SeqFn, w: SeqFn, reg_class: RegClass) -> Self {
        CustomSeq {
            name: name.to_string(),
            lambda,
            w,
            reg_class,
            tail: None,
            poles: None,
            match_tol: 1e-12,
            accumulation: Vec::new(),
        }
    }

    pub fn with_tail(mut self, tail: TailMeta) -> Self {
        self.tail = Some(tail);
        self
    }

    pub fn with_poles(mut self, poles: PoleFn) -> Self {
        self.poles = Some(poles);
        self
    }

    pub fn with_accumulation(mut self, pts: Vec<C>) -> Self {
        self.accumulation = pts;
        self
    }
}

#[derive(Clone)]
pub enum Family {
    BesselCompact { alpha: C, beta: C },
    LinearFree { w: C },
    QGeometric { q: C, beta: C },
    Custom(CustomSeq),
}

impl fmt::Debug for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::BesselCompact { alpha, beta } => {
                write!(f, "BesselCompact {{ alpha: {alpha}, beta: {beta} }}")
            }
            Family::LinearFree { w } => write!(f, "LinearFree {{ w: {w} }}"),
            Family::QGeometric { q, beta } => write!(f, "QGeometric {{ q: {q}, beta: {beta} }}"),
            Family::Custom(c) => write!(f, "Custom({})", c.name),
        }
    }
}

/// Replacement of λ_n and/or w_n at one index.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Override {
    pub n: i64,
    pub lambda: Option<C>,
    pub w: Option<C>,
}

#[derive(Default)]
struct GammaMemo {
    // pos[k] = γ_k², neg[k] = γ_{−k}²; both start at γ_0² = 1
    pos: Vec<C>,
    neg: Vec<C>,
}

pub struct OperatorSpec {
    pub family: Family,
    perturbation: BTreeMap<i64, (Option<C>, Option<C>)>,
    pub reg_class: RegClass,
    gamma: Mutex<GammaMemo>,
}

impl Clone for OperatorSpec {
    fn clone(&self) -> Self {
        OperatorSpec {
            family: self.family.clone(),
            perturbation: self.perturbation.clone(),
            reg_class: self.reg_class,
            gamma: Mutex::new(GammaMemo::default()),
        }
    }
}

impl fmt::Debug for OperatorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OperatorSpec")
            .field("family", &self.family)
            .field("perturbation", &self.perturbation)
            .field("reg_class", &self.reg_class)
            .finish()
    }
}

fn is_int(x: C) -> bool {
    x.im == 0.0 && x.re.fract() == 0.0
}

fn close(a: C, b: C) -> bool {
    (a - b).norm() <= 8.0 * f64::EPSILON * a.norm().max(b.norm())
}

/// Build a spec, validating family parameters and overrides.
pub fn make_spec(family: Family, perturbation: &[Override]) -> Result<OperatorSpec> {
    let reg_class = match &family {
        Family::BesselCompact { alpha, beta } => {
            if is_int(*alpha) {
                return Err(Error::InvalidFamilyParams(format!("alpha = {alpha} is an integer")));
            }
            if *beta == C::new(0.0, 0.0) {
                return Err(Error::InvalidFamilyParams("beta = 0".into()));
            }
            RegClass::Compact { p: 2 }
        }
        Family::LinearFree { w } => {
            if *w == C::new(0.0, 0.0) {
                return Err(Error::InvalidFamilyParams("w = 0".into()));
            }
            RegClass::CompactResolvent { p: 2 }
        }
        Family::QGeometric { q, beta } => {
            let a = q.norm();
            if !(a > 0.0 && a < 1.0) {
                return Err(Error::InvalidFamilyParams(format!("|q| = {a} outside (0, 1)")));
            }
            if *beta == C::new(0.0, 0.0) {
                return Err(Error::InvalidFamilyParams("beta = 0".into()));
            }
            RegClass::Combined { p: 1 }
        }
        Family::Custom(c) => c.reg_class,
    };
    let mut map = BTreeMap::new();
    for o in perturbation {
        if let Some(w) = o.w {
            if w == C::new(0.0, 0.0) || !w.is_finite() {
                return Err(Error::InvalidFamilyParams(format!("override w_{} = {w}", o.n)));
            }
        }
        if let Some(l) = o.lambda {
            if !l.is_finite() {
                return Err(Error::InvalidFamilyParams(format!("override lambda_{} = {l}", o.n)));
            }
        }
        let e = map.entry(o.n).or_insert((None, None));
        if o.lambda.is_some() {
            e.0 = o.lambda;
        }
        if o.w.is_some() {
            e.1 = o.w;
        }
    }
    Ok(OperatorSpec { family, perturbation: map, reg_class, gamma: Mutex::new(GammaMemo::default()) })
}

impl OperatorSpec {
    pub fn overrides(&self) -> impl Iterator<Item = (i64, Option<C>, Option<C>)> + '_ {
        self.perturbation.iter().map(|(&n, &(l, w))| (n, l, w))
    }

    pub fn has_perturbation(&self) -> bool {
        !self.perturbation.is_empty()
    }

    fn base_lambda(&self, n: i64) -> C {
        let nf = n as f64;
        match &self.family {
            Family::BesselCompact { alpha, .. } => (alpha + nf).inv(),
            Family::LinearFree { .. } => C::new(nf, 0.0),
            Family::QGeometric { q, .. } => q.powi(n as i32),
            Family::Custom(c) => (c.lambda)(n),
        }
    }

    fn base_w(&self, n: i64) -> C {
        let nf = n as f64;
        match &self.family {
            Family::BesselCompact { alpha, beta } => beta / ((alpha + nf).sqrt() * (alpha + nf + 1.0).sqrt()),
            Family::LinearFree { w } => *w,
            Family::QGeometric { q, beta } => beta * (q.ln() * (nf / 2.0)).exp(),
            Family::Custom(c) => (c.w)(n),
        }
    }

    fn base_w_sq(&self, n: i64) -> C {
        let nf = n as f64;
        match &self.family {
            Family::BesselCompact { alpha, beta } => beta * beta / ((alpha + nf) * (alpha + nf + 1.0)),
            Family::LinearFree { w } => w * w,
            Family::QGeometric { q, beta } => beta * beta * q.powi(n as i32),
            Family::Custom(c) => {
                let w = (c.w)(n);
                w * w
            }
        }
    }

    pub fn lambda(&self, n: i64) -> C {
        match self.perturbation.get(&n) {
            Some((Some(l), _)) => *l,
            _ => self.base_lambda(n),
        }
    }

    pub fn w(&self, n: i64) -> C {
        match self.perturbation.get(&n) {
            Some((_, Some(w))) => *w,
            _ => self.base_w(n),
        }
    }

    pub fn w_sq(&self, n: i64) -> C {
        match self.perturbation.get(&n) {
            Some((_, Some(w))) => w * w,
            _ => self.base_w_sq(n),
        }
    }

    /// Checked off-diagonal entry; custom callbacks may return zero.
    pub fn w_checked(&self, n: i64) -> Result<C> {
        let w = self.w(n);
        if w == C::new(0.0, 0.0) {
            return Err(Error::InvalidFamilyParams(format!("w_{n} = 0")));
        }
        Ok(w)
    }

    pub fn is_builtin(&self) -> bool {
        !matches!(self.family, Family::Custom(_))
    }

    pub fn tail_kind(&self) -> Option<TailKind> {
        match &self.family {
            Family::BesselCompact { .. } | Family::LinearFree { .. } => Some(TailKind::Algebraic),
            Family::QGeometric { .. } => Some(TailKind::Geometric),
            Family::Custom(c) => c.tail.as_ref().map(|t| t.kind),
        }
    }

    /// Half-width of the first window in a doubling ladder at `z`.
    pub fn start_window(&self, z: C) -> usize {
        let pert = self.perturbation.keys().map(|k| k.unsigned_abs() as usize + 2).max().unwrap_or(0);
        let base = match &self.family {
            Family::LinearFree { w } => 16.0 + 4.0 * z.norm() + 4.0 * w.norm(),
            Family::BesselCompact { alpha, beta } => {
                let iz = if z.norm() > 0.0 { z.inv().norm() } else { 0.0 };
                16.0 + 4.0 * (alpha.norm() + iz + beta.norm() * iz)
            }
            Family::QGeometric { q, beta } => {
                let lq = -q.norm().ln();
                let lz = if z.norm() > 0.0 { z.norm().ln().abs() } else { 0.0 };
                16.0 + 2.0 * (lz + (1.0 + beta.norm_sqr()).ln()) / lq
            }
            Family::Custom(c) => c.tail.as_ref().map(|t| t.start as f64).unwrap_or(16.0),
        };
        (base.ceil() as usize).max(pert).max(8)
    }

    /// Points where λ accumulates.
    pub fn der_points(&self) -> Vec<C> {
        match &self.family {
            Family::BesselCompact { .. } | Family::QGeometric { .. } => vec![C::new(0.0, 0.0)],
            Family::LinearFree { .. } => vec![],
            Family::Custom(c) => c.accumulation.clone(),
        }
    }

    /// γ_n² with γ_0² = 1 and γ_{n+1}² = w_n²/γ_n², memoized.
    pub fn gamma_sq(&self, n: i64) -> C {
        let mut m = self.gamma.lock().expect("gamma memo poisoned");
        let one = C::new(1.0, 0.0);
        if m.pos.is_empty() {
            m.pos.push(one);
            m.neg.push(one);
        }
        if n >= 0 {
            let n = n as usize;
            while m.pos.len() <= n {
                let k = m.pos.len() as i64 - 1;
                let g = self.w_sq(k) / m.pos[k as usize];
                m.pos.push(g);
            }
            m.pos[n]
        } else {
            let n = n.unsigned_abs() as usize;
            while m.neg.len() <= n {
                // γ_{−k−1}² = w_{−k−1}²/γ_{−k}²
                let k = m.neg.len() as i64 - 1;
                let g = self.w_sq(-k - 1) / m.neg[k as usize];
                m.neg.push(g);
            }
            m.neg[n]
        }
    }

    /// γ_a², ..., γ_b² in one lock.
    pub fn gamma_window(&self, a: i64, b: i64) -> Vec<C> {
        // warm the memo at both ends first so the per-index calls are lookups
        if b >= 0 {
            self.gamma_sq(b);
        }
        if a < 0 {
            self.gamma_sq(a);
        }
        (a..=b).map(|n| self.gamma_sq(n)).collect()
    }

    /// Bound on Σ_{|k|≥N} |w_k²/((z−λ_k)(z−λ_{k+1}))| (left tail counted from
    /// k ≤ −N−1), when one is known and N is large enough.
    pub fn pair_tail_bound(&self, z: C, n: usize) -> Option<f64> {
        let big_n = n as f64;
        // overrides inside |k| ≤ n don't touch the tail
        if self.perturbation.keys().any(|k| k.unsigned_abs() as usize >= n) {
            return None;
        }
        match &self.family {
            Family::LinearFree { w } => {
                let r = z.norm();
                if big_n > r + 1.0 {
                    Some(2.0 * w.norm_sqr() / (big_n - r))
                } else {
                    None
                }
            }
            Family::BesselCompact { alpha, beta } => {
                let a = alpha.norm();
                let zn = z.norm();
                if zn == 0.0 {
                    return None;
                }
                if big_n - a - 1.0 >= 2.0 / zn {
                    Some(8.0 * beta.norm_sqr() / (zn * zn * (big_n - a)))
                } else {
                    None
                }
            }
            Family::QGeometric { q, beta } => {
                let aq = q.norm();
                let zn = z.norm();
                if zn == 0.0 {
                    return None;
                }
                let qn = aq.powf(big_n);
                if qn <= zn / 2.0 && 1.0 / qn >= 2.0 * zn {
                    let b2 = beta.norm_sqr();
                    Some(4.0 * b2 * qn / (zn * zn * (1.0 - aq)) + 4.0 * b2 * qn / (1.0 - aq))
                } else {
                    None
                }
            }
            Family::Custom(c) => c.tail.as_ref().and_then(|t| t.pair_tail.as_ref()).and_then(|f| f(z, n)),
        }
    }
}

/// Shorthand for the built-in families.
pub fn bessel_compact(alpha: f64, beta: f64) -> Result<OperatorSpec> {
    make_spec(Family::BesselCompact { alpha: C::new(alpha, 0.0), beta: C::new(beta, 0.0) }, &[])
}

pub fn linear_free(w: f64) -> Result<OperatorSpec> {
    make_spec(Family::LinearFree { w: C::new(w, 0.0) }, &[])
}

pub fn q_geometric(q: f64, beta: C) -> Result<OperatorSpec> {
    make_spec(Family::QGeometric { q: C::new(q, 0.0), beta }, &[])
}

/// 𝒫_n(z): 𝒫_0 = 1 and 𝒫_{n+1} = w_n/(z − λ_{n+1})·𝒫_n in both directions.
///
/// With `skip_poles`, factors with λ_k = z are left out instead of failing.
pub fn p_factor(spec: &OperatorSpec, n: i64, z: C, skip_poles: bool) -> Result<C> {
    let mut p = C::new(1.0, 0.0);
    if n > 0 {
        for k in 1..=n {
            let d = z - spec.lambda(k);
            if d == C::new(0.0, 0.0) {
                if skip_poles {
                    continue;
                }
                return Err(Error::PoleHit { index: k });
            }
            p *= spec.w(k - 1) / d;
        }
    } else {
        for k in (n + 1)..=0 {
            let d = z - spec.lambda(k);
            if d == C::new(0.0, 0.0) && skip_poles {
                continue;
            }
            p *= d / spec.w(k - 1);
        }
        // at a pole the product is exactly zero, which the caller must treat
        // as PoleHit when no skipping was asked for
        if !skip_poles {
            if let Some(k) = ((n + 1)..=0).find(|&k| spec.lambda(k) == z) {
                return Err(Error::PoleHit { index: k });
            }
        }
    }
    Ok(p)
}

/// Indices n with λ_n = z, split by sign.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PoleBook {
    pub indices: Vec<i64>,
    pub r_plus: usize,
    pub r_minus: usize,
    pub r: usize,
}

impl PoleBook {
    fn from_indices(mut indices: Vec<i64>) -> Self {
        indices.sort_unstable();
        indices.dedup();
        let r_plus = indices.iter().filter(|&&n| n > 0).count();
        let r_minus = indices.len() - r_plus;
        PoleBook { r: indices.len(), indices, r_plus, r_minus }
    }
}

/// Indices where λ_n = z. Built-ins invert λ in closed form, so the window is
/// ignored for them; custom specs use their pole callback or scan `window`.
pub fn pole_book(spec: &OperatorSpec, z: C, window: (i64, i64)) -> Result<PoleBook> {
    let mut idx: Vec<i64> = match &spec.family {
        Family::BesselCompact { alpha, .. } => {
            if z == C::new(0.0, 0.0) {
                vec![]
            } else {
                let m = (z.inv() - alpha).re.round();
                candidate(spec, m, z)
            }
        }
        Family::LinearFree { .. } => {
            if z.im == 0.0 && z.re.fract() == 0.0 {
                vec![z.re as i64]
            } else {
                vec![]
            }
        }
        Family::QGeometric { q, .. } => {
            if z == C::new(0.0, 0.0) {
                vec![]
            } else {
                let m = (z.norm().ln() / q.norm().ln()).round();
                candidate(spec, m, z)
            }
        }
        Family::Custom(c) => match &c.poles {
            Some(f) => f(z),
            None => scan(spec, c.match_tol, z, window)?,
        },
    };
    // overridden indices: drop base matches, then test the overrides directly
    idx.retain(|n| !spec.perturbation.get(n).is_some_and(|(l, _)| l.is_some()));
    for (&n, &(l, _)) in &spec.perturbation {
        if let Some(l) = l {
            if close(l, z) || l == z {
                idx.push(n);
            }
        }
    }
    Ok(PoleBook::from_indices(idx))
}

fn candidate(spec: &OperatorSpec, m: f64, z: C) -> Vec<i64> {
    if !m.is_finite() || m.abs() > 1e15 {
        return vec![];
    }
    let m = m as i64;
    let l = spec.base_lambda(m);
    if l == z || close(l, z) {
        vec![m]
    } else {
        vec![]
    }
}

fn scan(spec: &OperatorSpec, tol: f64, z: C, window: (i64, i64)) -> Result<Vec<i64>> {
    let mut hits = Vec::new();
    for n in window.0..=window.1 {
        let l = spec.lambda(n);
        if (l - z).norm() <= tol * l.norm().max(z.norm()).max(1.0) {
            hits.push((n, l));
        }
    }
    if hits.len() > 1 && hits.iter().any(|(_, l)| *l != hits[0].1) {
        return Err(Error::AmbiguousMatch(hits.iter().map(|h| h.0).collect()));
    }
    Ok(hits.into_iter().map(|h| h.0).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Convergent,
    Inconclusive,
}

#[derive(Clone, Debug)]
pub struct ConditionReport {
    /// (N, Σ_{−N≤k<N} |w_k²/((λ_k−z0)(λ_{k+1}−z0))|)
    pub partial_sums: Vec<(usize, f64)>,
    pub tail_estimate: Option<f64>,
    pub verdict: Verdict,
}

/// Partial sums of the convergence condition on growing windows, plus the
/// family tail bound at the largest window.
pub fn summability_report(spec: &OperatorSpec, z0: C, schedule: &[usize]) -> ConditionReport {
    let mut partial = Vec::with_capacity(schedule.len());
    for &n in schedule {
        let n = n as i64;
        let mut s = 0.0;
        for k in -n..n {
            let a = spec.w_sq(k) / ((spec.lambda(k) - z0) * (spec.lambda(k + 1) - z0));
            s += a.norm();
        }
        partial.push((n as usize, s));
    }
    let last = schedule.iter().copied().max().unwrap_or(0);
    let tail = spec.pair_tail_bound(z0, last);
    let monotone = partial.windows(2).all(|w| w[1].1 >= w[0].1);
    let verdict = if tail.is_some() && monotone && partial.iter().all(|p| p.1.is_finite()) {
        Verdict::Convergent
    } else {
        Verdict::Inconclusive
    };
    ConditionReport { partial_sums: partial, tail_estimate: tail, verdict }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    #[test]
    fn bessel_entries() {
        let s = bessel_compact(0.3, 0.7).unwrap();
        assert!((s.lambda(5) - c(1.0 / 5.3, 0.0)).norm() < 1e-16);
        assert_eq!(s.reg_class, RegClass::Compact { p: 2 });
    }

    #[test]
    fn linear_entries() {
        let s = linear_free(1.0).unwrap();
        assert_eq!(s.lambda(-2), c(-2.0, 0.0));
        assert_eq!(s.w(7), c(1.0, 0.0));
        assert_eq!(s.reg_class, RegClass::CompactResolvent { p: 2 });
    }

    #[test]
    fn invalid_params() {
        let bad = make_spec(
            Family::QGeometric { q: c(0.5, 0.0), beta: c(0.8, 0.0) },
            &[Override { n: 0, lambda: None, w: Some(c(0.0, 0.0)) }],
        );
        assert!(matches!(bad, Err(Error::InvalidFamilyParams(_))));
        assert!(bessel_compact(2.0, 0.7).is_err());
        assert!(bessel_compact(0.3, 0.0).is_err());
        assert!(q_geometric(1.0, c(1.0, 0.0)).is_err());
        assert!(linear_free(0.0).is_err());
    }

    #[test]
    fn gamma_seed_and_recurrence() {
        let s = linear_free(2.0).unwrap();
        assert_eq!(s.gamma_sq(0), c(1.0, 0.0));
        assert_eq!(s.gamma_sq(1), c(4.0, 0.0));
        assert_eq!(s.gamma_sq(-1), c(4.0, 0.0));
        assert_eq!(s.gamma_sq(-1) * s.gamma_sq(0), s.w_sq(-1));
    }

    #[test]
    fn p_factor_examples() {
        let s = linear_free(1.0).unwrap();
        assert_eq!(p_factor(&s, 0, c(0.5, 0.0), false).unwrap(), c(1.0, 0.0));
        let p = p_factor(&s, 2, c(0.5, 0.0), false).unwrap();
        assert!((p - c(4.0 / 3.0, 0.0)).norm() < 1e-15);
        let b = bessel_compact(0.3, 0.7).unwrap();
        let l1 = b.lambda(1);
        assert_eq!(p_factor(&b, 1, l1, false), Err(Error::PoleHit { index: 1 }));
        assert!(p_factor(&b, 1, l1, true).is_ok());
    }

    #[test]
    fn pole_book_examples() {
        let s = linear_free(1.0).unwrap();
        let pb = pole_book(&s, c(3.0, 0.0), (-10, 10)).unwrap();
        assert_eq!((pb.r_plus, pb.r_minus, pb.indices.clone()), (1, 0, vec![3]));
        assert_eq!(pole_book(&s, c(2.5, 0.0), (-10, 10)).unwrap().r, 0);
        let q = q_geometric(0.5, c(0.8, 0.0)).unwrap();
        let pb = pole_book(&q, c(0.25, 0.0), (-10, 10)).unwrap();
        assert_eq!((pb.r_plus, pb.r_minus, pb.indices), (1, 0, vec![2]));
        let b = bessel_compact(0.3, 0.7).unwrap();
        let pb = pole_book(&b, b.lambda(-4), (-1, 1)).unwrap();
        assert_eq!((pb.r_plus, pb.r_minus, pb.indices), (0, 1, vec![-4]));
    }

    #[test]
    fn custom_ambiguous_match() {
        let lam: SeqFn = Arc::new(|n| c(if n == 3 { 1.0 } else if n == 4 { 1.0 + 1e-14 } else { n as f64 + 10.0 }, 0.0));
        let w: SeqFn = Arc::new(|_| c(1.0, 0.0));
        let s = make_spec(Family::Custom(CustomSeq::new("amb", lam, w, RegClass::None)), &[]).unwrap();
        assert!(matches!(pole_book(&s, c(1.0, 0.0), (-10, 10)), Err(Error::AmbiguousMatch(_))));
    }

    #[test]
    fn summability_examples() {
        let s = linear_free(1.0).unwrap();
        let r = summability_report(&s, c(0.0, 1.0), &[10, 100, 1000, 10000]);
        assert_eq!(r.verdict, Verdict::Convergent);
        // the sums settle: last increment below the comparison tail 2/N
        let p = &r.partial_sums;
        assert!(p[3].1 - p[2].1 < 2.0 / 1000.0);
        let b = bessel_compact(0.3, 0.7).unwrap();
        assert_eq!(summability_report(&b, c(10.0, 0.0), &[10, 100, 1000]).verdict, Verdict::Convergent);
        let lam: SeqFn = Arc::new(|n| c(n as f64, 0.0));
        let w: SeqFn = Arc::new(|_| c(1.0, 0.0));
        let cu = make_spec(Family::Custom(CustomSeq::new("bare", lam, w, RegClass::None)), &[]).unwrap();
        assert_eq!(summability_report(&cu, c(0.0, 1.0), &[10, 100]).verdict, Verdict::Inconclusive);
    }

    #[test]
    fn overrides_apply() {
        let s = make_spec(
            Family::LinearFree { w: c(1.0, 0.0) },
            &[Override { n: 0, lambda: Some(c(0.5, 0.0)), w: None }],
        )
        .unwrap();
        assert_eq!(s.lambda(0), c(0.5, 0.0));
        assert_eq!(pole_book(&s, c(0.0, 0.0), (-5, 5)).unwrap().r, 0);
        assert_eq!(pole_book(&s, c(0.5, 0.0), (-5, 5)).unwrap().indices, vec![0]);
    }
}
