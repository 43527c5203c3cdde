//! Characteristic function, the solutions f and g, Wronskian, A(z), the
//! eigenvector square-sum identity and the Green function.
//!
//! Everything runs on [`chain::Window`]: `Mode::Generic` gives the plain
//! F_J, f, g; `Mode::Regularized` gives F̃, f̃, g̃ of the operator's class. The
//! infinite index range is reached by the window ladder in [`ladder`].

use crate::chain::{index_data, inv_or_none, Mode, Window};
use crate::error::{Error, Result};
use crate::functional::tail_bound;
use crate::jet::{Jet, Scalar};
use crate::ladder::{self, LadderOpts};

/// Roundoff floor of a recurrence of length `len` with magnitude e^{log_mag}.
pub(crate) fn noise_floor(log_mag: f64, len: usize) -> f64 {
    f64::EPSILON * (len as f64).sqrt() * log_mag.exp()
}
use crate::sequence::{p_factor, pole_book, OperatorSpec, TailKind};
use num_complex::Complex64 as C;
use serde::Serialize;

/// A value of F_J (or F̃) with its truncation diagnostics.
#[derive(Clone, Debug)]
pub struct CharValue<S = C> {
    pub value: S,
    /// Index window of the last evaluation.
    pub window: (i64, i64),
    /// Error estimate. Rigorous when `certified` is set.
    pub tail_err: f64,
    /// Σ|x_k x_{k+1}| over the window (scaled couplings when regularized).
    pub condition_sum: f64,
    /// log of the absolute-recurrence bound on the window determinant; the
    /// natural scale for "small" values of this function.
    pub log_magnitude: f64,
    pub certified: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SolutionKind {
    FSolution,
    GSolution,
}

/// u_n for n in `n_range`, stored in increasing n.
#[derive(Clone, Debug)]
pub struct SolutionSlice<S = C> {
    pub n_range: (i64, i64),
    pub values: Vec<S>,
    pub kind: SolutionKind,
    pub z: C,
    pub tail_err: f64,
    /// Largest ladder half-width used.
    pub window_n: usize,
}

impl<S: Copy> SolutionSlice<S> {
    pub fn at(&self, n: i64) -> S {
        assert!(n >= self.n_range.0 && n <= self.n_range.1, "n = {n} outside slice");
        self.values[(n - self.n_range.0) as usize]
    }

    pub fn indices(&self) -> std::ops::RangeInclusive<i64> {
        self.n_range.0..=self.n_range.1
    }
}

impl SolutionSlice<Jet> {
    /// The k-th z-derivative of every entry.
    pub fn derivative(&self, k: usize) -> SolutionSlice<C> {
        SolutionSlice {
            n_range: self.n_range,
            values: self.values.iter().map(|j| j.derivative(k)).collect(),
            kind: self.kind,
            z: self.z,
            tail_err: self.tail_err,
            window_n: self.window_n,
        }
    }
}

/// max_n |w_{n−1}u_{n−1} + (λ_n − z)u_n + w_n u_{n+1}| over interior n.
pub fn recurrence_residual(spec: &OperatorSpec, z: C, u: &SolutionSlice<C>) -> f64 {
    let (a, b) = u.n_range;
    ((a + 1)..b)
        .map(|n| {
            (spec.w(n - 1) * u.at(n - 1) + (spec.lambda(n) - z) * u.at(n) + spec.w(n) * u.at(n + 1)).norm()
        })
        .fold(0.0, f64::max)
}

fn tail_kind(spec: &OperatorSpec) -> Result<TailKind> {
    spec.tail_kind().ok_or(Error::NoTailBound)
}

/// Fail with PoleHit if λ_k = z for some k in [lo, hi].
fn guard_poles(spec: &OperatorSpec, z: C, lo: i64, hi: i64) -> Result<()> {
    let w = 4 * spec.start_window(z) as i64;
    let scan = (lo.max(-w), hi.min(w));
    let scan = if scan.0 <= scan.1 { scan } else { (0, 0) };
    let book = pole_book(spec, z, scan)?;
    match book.indices.iter().find(|&&k| k >= lo && k <= hi) {
        Some(&k) => Err(Error::PoleHit { index: k }),
        None => Ok(()),
    }
}

/// π̃_n from scratch: π̃_0 = 1, π̃_n = π̃_{n−1}·w_{n−1}s_n.
pub fn prefactor_at<S: Scalar>(spec: &OperatorSpec, mode: Mode, z: S, n: i64) -> Result<S> {
    let inv_z = inv_or_none(z);
    let mut p = z.one_like();
    if n > 0 {
        for k in 1..=n {
            let (_, s) = index_data(spec, mode, z, inv_z, k)?;
            p = (p * s).scale_c(spec.w(k - 1));
        }
    } else {
        for k in (n + 1)..=0 {
            let (_, s) = index_data(spec, mode, z, inv_z, k)?;
            p = p * s.scale_c(spec.w(k - 1)).recip();
        }
    }
    Ok(p)
}

/// F_J (generic) or F̃ (regularized) at a complex or jet argument.
pub fn charfn_mode<S: Scalar>(spec: &OperatorSpec, mode: Mode, z: S, tol: f64) -> Result<CharValue<S>> {
    let kind = tail_kind(spec)?;
    let zc = z.value();
    let n0 = spec.start_window(zc);
    let (mut pair_sum, mut log_mag) = (0.0, 0.0);
    let out = ladder::run_with_floor(kind, n0, LadderOpts::new(tol), |n| {
        let n = n as i64;
        let w = Window::build(spec, mode, z, -n, n)?;
        pair_sum = w.pair_sum;
        log_mag = w.log_mag;
        Ok((vec![w.det()], noise_floor(w.log_mag, w.d.len())))
    })?
    .require()?;
    let mut n = out.n;
    let mut value = out.values[0];
    let mut tail_err = out.err;
    let mut certified = false;
    if mode == Mode::Generic && kind == TailKind::Geometric {
        // geometric tails are cheap: widen until the rigorous bound is met
        while n <= 1 << 20 {
            if let Some(st) = spec.pair_tail_bound(zc, n) {
                let rig = tail_bound(pair_sum + st, st)?;
                if rig <= tol {
                    certified = true;
                    tail_err = tail_err.max(rig);
                    break;
                }
            }
            n *= 2;
            let w = Window::build(spec, mode, z, -(n as i64), n as i64)?;
            pair_sum = w.pair_sum;
            log_mag = w.log_mag;
            value = w.det();
        }
    }
    let n = n as i64;
    Ok(CharValue { value, window: (-n, n), tail_err, condition_sum: pair_sum, log_magnitude: log_mag, certified })
}

/// num/den where both vanish to order r at the base point. None if num does
/// not vanish there (a genuine pole) or den vanishes to higher order.
fn removable_quotient(num: &Jet, den: &Jet, r: usize) -> Option<(C, f64)> {
    let scale = num.coeffs().iter().map(|x| x.norm()).fold(0.0, f64::max);
    if num.coeffs()[..r].iter().any(|x| x.norm() > 1e-7 * scale) {
        return None;
    }
    let d = den.shift_down(r);
    if d.value() == C::new(0.0, 0.0) {
        return None;
    }
    Some((num.shift_down(r).value() / d.value(), d.value().norm()))
}

/// Product of the regularizing factors ∏ (z − λ_k)s_k over the whole line.
pub fn regularizer_mode<S: Scalar>(spec: &OperatorSpec, z: S, tol: f64) -> Result<S> {
    let kind = tail_kind(spec)?;
    let n0 = spec.start_window(z.value());
    let out = ladder::run_with_floor(kind, n0, LadderOpts::new(tol), |n| {
        let n = n as i64;
        let w = Window::build(spec, Mode::Regularized, z, -n, n)?;
        let v = w.d.iter().skip(1).fold(w.d[0], |acc, x| acc * *x);
        let fl = f64::EPSILON * w.d.len() as f64 * v.magnitude();
        Ok((vec![v], fl))
    })?
    .require()?;
    Ok(out.values[0])
}

/// F_J at a point of Ran(λ) where the class's regularized F̃ removes the pole:
/// F̃/∏d on each window, as jets of order r.
fn charfn_removable(spec: &OperatorSpec, z: C, r: usize, pole: i64, tol: f64) -> Result<CharValue> {
    let kind = tail_kind(spec)?;
    let n0 = spec.start_window(z);
    let zj = Jet::variable(z, r);
    let (mut pair_sum, mut log_mag) = (0.0, 0.0);
    let out = ladder::run_with_floor(kind, n0, LadderOpts::new(tol), |n| {
        let n = n as i64;
        let w = Window::build(spec, Mode::Regularized, zj, -n, n)?;
        pair_sum = w.pair_sum;
        log_mag = w.log_mag;
        let prod = w.d.iter().skip(1).fold(w.d[0], |acc, x| acc * *x);
        let (v, den) = removable_quotient(&w.det(), &prod, r).ok_or(Error::PoleHit { index: pole })?;
        Ok((vec![v], noise_floor(w.log_mag, w.d.len()) / den))
    })?
    .require()?;
    let n = out.n as i64;
    Ok(CharValue {
        value: out.values[0],
        window: (-n, n),
        tail_err: out.err,
        condition_sum: pair_sum,
        log_magnitude: log_mag,
        certified: false,
    })
}

/// F_J(z) off Ran(λ).
pub fn charfn(spec: &OperatorSpec, z: C, tol: f64) -> Result<CharValue> {
    tail_kind(spec)?;
    guard_poles(spec, z, i64::MIN, i64::MAX)?;
    charfn_mode(spec, Mode::Generic, z, tol)
}

/// F_J(z), continued onto Ran(λ) through the operator's regularization class
/// wherever the pole cancels. Elsewhere the same as [`charfn`].
pub fn charfn_extended(spec: &OperatorSpec, z: C, tol: f64) -> Result<CharValue> {
    tail_kind(spec)?;
    match guard_poles(spec, z, i64::MIN, i64::MAX) {
        Ok(()) => charfn_mode(spec, Mode::Generic, z, tol),
        Err(Error::PoleHit { index }) if spec.reg_class.p().is_some() && z != C::new(0.0, 0.0) => {
            let r = pole_book(spec, z, (-64, 64))?.r.max(1);
            charfn_removable(spec, z, r, index, tol)
        }
        Err(e) => Err(e),
    }
}

/// F_J as a Taylor jet of the given order at z0.
pub fn charfn_jet(spec: &OperatorSpec, z0: C, order: usize, tol: f64) -> Result<CharValue<Jet>> {
    tail_kind(spec)?;
    guard_poles(spec, z0, i64::MIN, i64::MAX)
        .map_err(|e| if let Error::PoleHit { index } = e { Error::PoleAtBase { index } } else { e })?;
    charfn_mode(spec, Mode::Generic, Jet::variable(z0, order), tol)
}

/// f̃_n over [a, b] plus the tail determinants T_{n+1}. `pi_a` overrides π̃_a.
pub(crate) fn f_slice<S: Scalar>(
    spec: &OperatorSpec,
    mode: Mode,
    z: S,
    (a, b): (i64, i64),
    tol: f64,
    pi_a: Option<S>,
) -> Result<(SolutionSlice<S>, Vec<S>)> {
    assert!(a <= b, "empty range");
    let kind = tail_kind(spec)?;
    let pi_a = match pi_a {
        Some(p) => p,
        None => prefactor_at(spec, mode, z, a)?,
    };
    let len = (b - a + 1) as usize;
    let n0 = spec.start_window(z.value());
    let out = ladder::run_with_floor(kind, n0, LadderOpts::new(tol), |n| {
        let top = b.max(0) + n as i64;
        let win = Window::build(spec, mode, z, a + 1, top)?;
        let t = win.tails(a + 1, b + 1);
        let mut vals = Vec::with_capacity(2 * len);
        let mut p = pi_a;
        let mut pmax: f64 = 1.0;
        for (i, m) in (a..=b).enumerate() {
            if m > a {
                p = (p * win.s_at(m)).scale_c(spec.w(m - 1));
            }
            pmax = pmax.max(p.magnitude());
            vals.push(p * t[i]);
        }
        vals.extend_from_slice(&t);
        Ok((vals, noise_floor(win.log_mag, win.d.len()) * pmax))
    })?
    .require()?;
    let tails = out.values[len..].to_vec();
    let slice = SolutionSlice {
        n_range: (a, b),
        values: out.values[..len].to_vec(),
        kind: SolutionKind::FSolution,
        z: z.value(),
        tail_err: out.err,
        window_n: out.n,
    };
    Ok((slice, tails))
}

/// g̃_n over [a, b] plus the head determinants H_{n−1}.
pub(crate) fn g_slice<S: Scalar>(
    spec: &OperatorSpec,
    mode: Mode,
    z: S,
    (a, b): (i64, i64),
    tol: f64,
) -> Result<(SolutionSlice<S>, Vec<S>)> {
    assert!(a <= b, "empty range");
    let kind = tail_kind(spec)?;
    let pi_top = prefactor_at(spec, mode, z, b - 1)?;
    let len = (b - a + 1) as usize;
    let n0 = spec.start_window(z.value());
    let out = ladder::run_with_floor(kind, n0, LadderOpts::new(tol), |n| {
        let bot = a.min(0) - n as i64;
        let win = Window::build(spec, mode, z, bot, b - 1)?;
        let h = win.heads(a - 1, b - 1);
        // π̃_{m−1} for m = b down to a
        let mut pis = vec![pi_top; len];
        for m in (a..b).rev() {
            let i = (m - a) as usize;
            pis[i] = pis[i + 1] * win.s_at(m).scale_c(spec.w(m - 1)).recip();
        }
        let inv: Vec<S> = (a..=b).enumerate().map(|(i, m)| pis[i].scale_c(spec.w(m - 1)).recip()).collect();
        let imax = inv.iter().map(|x| x.magnitude()).fold(1.0, f64::max);
        let mut vals: Vec<S> = h.iter().zip(&inv).map(|(h, i)| *h * *i).collect();
        vals.extend_from_slice(&h);
        Ok((vals, noise_floor(win.log_mag, win.d.len()) * imax))
    })?
    .require()?;
    let heads = out.values[len..].to_vec();
    let slice = SolutionSlice {
        n_range: (a, b),
        values: out.values[..len].to_vec(),
        kind: SolutionKind::GSolution,
        z: z.value(),
        tail_err: out.err,
        window_n: out.n,
    };
    Ok((slice, heads))
}

/// f_n(z) for n in `range`. Built-in families may sit on λ_k = z as long as
/// every such k is at most `range.0` and positive; those factors of 𝒫 are
/// skipped.
pub fn solution_f(spec: &OperatorSpec, z: C, range: (i64, i64), tol: f64) -> Result<SolutionSlice> {
    let (a, _) = range;
    tail_kind(spec)?;
    guard_poles(spec, z, a + 1, i64::MAX)?;
    let pi_a = match prefactor_at(spec, Mode::Generic, z, a) {
        Ok(p) => p,
        Err(Error::PoleHit { .. }) if spec.is_builtin() && a > 0 => p_factor(spec, a, z, true)?,
        Err(e) => return Err(e),
    };
    Ok(f_slice(spec, Mode::Generic, z, range, tol, Some(pi_a))?.0)
}

/// g_n(z) for n in `range`.
pub fn solution_g(spec: &OperatorSpec, z: C, range: (i64, i64), tol: f64) -> Result<SolutionSlice> {
    tail_kind(spec)?;
    guard_poles(spec, z, i64::MIN, (range.1 - 1).max(0))?;
    Ok(g_slice(spec, Mode::Generic, z, range, tol)?.0)
}

pub(crate) fn wronskian_mode<S: Scalar>(spec: &OperatorSpec, mode: Mode, z: S, n: i64, tol: f64) -> Result<S> {
    let f = f_slice(spec, mode, z, (n, n + 1), tol, None)?.0;
    let g = g_slice(spec, mode, z, (n, n + 1), tol)?.0;
    Ok((f.values[0] * g.values[1] - f.values[1] * g.values[0]).scale_c(spec.w(n)))
}

/// w_n(f_n g_{n+1} − f_{n+1} g_n) off Ran(λ).
pub fn wronskian(spec: &OperatorSpec, z: C, n: i64, tol: f64) -> Result<C> {
    tail_kind(spec)?;
    guard_poles(spec, z, i64::MIN, i64::MAX)?;
    wronskian_mode(spec, Mode::Generic, z, n, tol)
}

/// The Wronskian continued onto Ran(λ) like [`charfn_extended`]: the
/// Wronskian of f̃, g̃ divided by the regularizer, both as jets.
pub fn wronskian_extended(spec: &OperatorSpec, z: C, n: i64, tol: f64) -> Result<C> {
    tail_kind(spec)?;
    match guard_poles(spec, z, i64::MIN, i64::MAX) {
        Ok(()) => wronskian_mode(spec, Mode::Generic, z, n, tol),
        Err(Error::PoleHit { index }) if spec.reg_class.p().is_some() && z != C::new(0.0, 0.0) => {
            let r = pole_book(spec, z, (-64, 64))?.r.max(1);
            let zj = Jet::variable(z, r);
            let w = wronskian_mode(spec, Mode::Regularized, zj, n, tol)?;
            let p = regularizer_mode(spec, zj, tol)?;
            removable_quotient(&w, &p, r).map(|q| q.0).ok_or(Error::PoleHit { index })
        }
        Err(e) => Err(e),
    }
}

/// Index k minimizing a scale-free distance between λ_k and z, |k| ≤ 64.
/// Eigenvectors of the built-in examples peak near there.
pub(crate) fn center_index(spec: &OperatorSpec, z: C) -> i64 {
    let score = |k: i64| {
        let l = spec.lambda(k);
        let den = l.norm() + z.norm() + 1e-300;
        ((l - z).norm() + (l.norm() - z.norm()).abs()) / den
    };
    let mut best = (0i64, score(0));
    for k in -64..=64i64 {
        let s = score(k);
        if s < best.1 || (s == best.1 && k.abs() < best.0.abs()) {
            best = (k, s);
        }
    }
    best.0
}

/// Half-width of the probe range around the center index.
const PROBE: i64 = 10;

/// A(z) = f_n/g_n together with the index n it was taken at.
///
/// Among probed n, the denominator H_{n−1} must exceed 0.1 of its max; of
/// those, n maximizes min(|T_{n+1}|/max|T|, |H_{n−1}|/max|H|) so that both
/// determinants are far from the cancellation regime.
pub(crate) fn a_ratio_mode(spec: &OperatorSpec, mode: Mode, z: C, tol: f64) -> Result<(C, i64)> {
    let c = center_index(spec, z);
    let r = (c - PROBE, c + PROBE);
    let (f, t) = f_slice(spec, mode, z, r, tol, None)?;
    let (g, h) = g_slice(spec, mode, z, r, tol)?;
    let tmax = t.iter().map(|x| x.norm()).fold(0.0, f64::max);
    let hmax = h.iter().map(|x| x.norm()).fold(0.0, f64::max);
    if !(hmax > 0.0) || !(tmax > 0.0) {
        return Err(Error::DegenerateDenominator);
    }
    let mut best: Option<(usize, f64)> = None;
    for i in 0..f.values.len() {
        // T_{n+1} is t[i + 1]; H_{n−1} is h[i]
        let hn = h[i].norm() / hmax;
        if hn <= 0.1 || g.values[i] == C::new(0.0, 0.0) {
            continue;
        }
        let q = hn.min(t[i + 1].norm() / tmax);
        if best.map_or(true, |b| q > b.1) {
            best = Some((i, q));
        }
    }
    let (i, _) = best.ok_or(Error::DegenerateDenominator)?;
    Ok((f.values[i] / g.values[i], r.0 + i as i64))
}

/// A(z) with f = A·g at an eigenvalue.
pub fn a_ratio(spec: &OperatorSpec, z: C, tol: f64) -> Result<C> {
    tail_kind(spec)?;
    guard_poles(spec, z, i64::MIN, i64::MAX)?;
    Ok(a_ratio_mode(spec, Mode::Generic, z, tol)?.0)
}

/// Eigenvector at an eigenvalue z: f̃_n for n ≥ n*, A·g̃_n below, where n* is
/// the index A was taken at. Each half is computed in its stable direction.
pub(crate) fn eigvec_mode(
    spec: &OperatorSpec,
    mode: Mode,
    z: C,
    (a, b): (i64, i64),
    tol: f64,
) -> Result<(SolutionSlice, C, i64)> {
    let (amul, join) = a_ratio_mode(spec, mode, z, tol)?;
    let mut values = Vec::with_capacity((b - a + 1) as usize);
    let mut err: f64 = 0.0;
    let mut wn = 0;
    if a < join {
        let hi = b.min(join - 1);
        let g = g_slice(spec, mode, z, (a, hi), tol)?.0;
        values.extend(g.values.iter().map(|v| amul * v));
        err = err.max(g.tail_err * amul.norm());
        wn = wn.max(g.window_n);
    }
    if b >= join {
        let lo = a.max(join);
        let f = f_slice(spec, mode, z, (lo, b), tol, None)?.0;
        values.extend_from_slice(&f.values);
        err = err.max(f.tail_err);
        wn = wn.max(f.window_n);
    }
    let slice =
        SolutionSlice { n_range: (a, b), values, kind: SolutionKind::FSolution, z, tail_err: err, window_n: wn };
    Ok((slice, amul, join))
}

/// Jet version of [`eigvec_mode`] at a zero z0 of order ν > `order`.
///
/// Below n*, f̃ − Ã·g̃ with Ã = f̃_{n*}/g̃_{n*} (as jets) is a solution
/// vanishing at n* whose Wronskian with g̃ is F̃, so it is O((z − z0)^ν) and
/// its first ν derivatives agree with those of f̃.
pub(crate) fn eigvec_jet_mode(
    spec: &OperatorSpec,
    mode: Mode,
    z0: C,
    order: usize,
    (a, b): (i64, i64),
    tol: f64,
) -> Result<SolutionSlice<Jet>> {
    let (_, join) = a_ratio_mode(spec, mode, z0, tol)?;
    let z = Jet::variable(z0, order);
    let lo = a.min(join);
    let hi = b.max(join);
    let (f, _) = f_slice(spec, mode, z, (join, hi), tol, None)?;
    let mut values = Vec::with_capacity((b - a + 1) as usize);
    let mut err = f.tail_err;
    let mut wn = f.window_n;
    if a < join {
        let (g, _) = g_slice(spec, mode, z, (lo, join), tol)?;
        let amul = f.at(join) * g.at(join).recip();
        values.extend((a..join).map(|n| amul * g.at(n)));
        err = err.max(g.tail_err * amul.magnitude());
        wn = wn.max(g.window_n);
    }
    values.extend((a.max(join)..=b).map(|n| f.at(n)));
    Ok(SolutionSlice { n_range: (a, b), values, kind: SolutionKind::FSolution, z: z0, tail_err: err, window_n: wn })
}

/// Both sides of Σ f_n² = A·F′ at an eigenvalue.
#[derive(Clone, Debug, Serialize)]
pub struct SumIdentity {
    #[serde(serialize_with = "crate::cx::ser")]
    pub lhs: C,
    #[serde(serialize_with = "crate::cx::ser")]
    pub rhs: C,
    /// |lhs − rhs|/(1 + |rhs|)
    pub residual: f64,
    /// Σ|f_n|² over the summation window.
    pub norm_sq: f64,
    pub window: (i64, i64),
    /// Σ f_n² vanishes against Σ|f_n|²: a sign of ν_a > ν_g.
    pub possible_degenerate: bool,
}

pub(crate) fn sum_identity_mode(spec: &OperatorSpec, mode: Mode, z: C, tol: f64) -> Result<SumIdentity> {
    let c = center_index(spec, z);
    let mut k = 32i64;
    let (vec, amul) = loop {
        let (v, amul, _) = eigvec_mode(spec, mode, z, (c - k, c + k), tol)?;
        let total: f64 = v.values.iter().map(|x| x.norm_sqr()).sum();
        let edge: f64 = v.values[..4].iter().chain(&v.values[v.values.len() - 4..]).map(|x| x.norm_sqr()).sum();
        if edge <= 1e-20 * total || k >= 4096 {
            break (v, amul);
        }
        k *= 2;
    };
    let lhs: C = vec.values.iter().map(|x| x * x).sum();
    let norm_sq: f64 = vec.values.iter().map(|x| x.norm_sqr()).sum();
    let fp = charfn_mode(spec, mode, Jet::variable(z, 1), tol)?.value.derivative(1);
    let rhs = amul * fp;
    Ok(SumIdentity {
        lhs,
        rhs,
        residual: (lhs - rhs).norm() / (1.0 + rhs.norm()),
        norm_sq,
        window: vec.n_range,
        possible_degenerate: lhs.norm() <= tol * norm_sq,
    })
}

/// Σ f_n²(z) against A(z)F_J′(z) in the unregularized normalization.
pub fn eigvec_sum_identity(spec: &OperatorSpec, z: C, tol: f64) -> Result<SumIdentity> {
    tail_kind(spec)?;
    guard_poles(spec, z, i64::MIN, i64::MAX)?;
    sum_identity_mode(spec, Mode::Generic, z, tol)
}

/// G_{i,j}(z) = −f̃_max g̃_min / F̃ in the given mode.
pub(crate) fn green_mode(spec: &OperatorSpec, mode: Mode, z: C, i: i64, j: i64, tol: f64) -> Result<C> {
    let kind = tail_kind(spec)?;
    let (lo, hi) = (i.min(j), i.max(j));
    let reach = lo.abs().max(hi.abs()) + 1;
    let n0 = spec.start_window(z);
    let mut near = None;
    let out = ladder::run_with_floor(kind, n0, LadderOpts::new(tol), |n| {
        let n = n as i64 + reach;
        let win = Window::build(spec, mode, z, -n, n)?;
        let d = win.det();
        let threshold = 1e-8 * win.log_mag.exp();
        if d.norm() < threshold {
            near = Some(Error::NearSpectrum { value: d.norm(), threshold });
            return Err(near.clone().unwrap());
        }
        let t = win.tails(hi + 1, hi + 1)[0];
        let h = win.heads(lo - 1, lo - 1)[0];
        // π̃_hi/π̃_{lo−1} = ∏_{k=lo}^{hi} w_{k−1}s_k
        let mut ratio = C::new(1.0, 0.0);
        for k in lo..=hi {
            ratio *= spec.w(k - 1) * win.s_at(k);
        }
        let den = spec.w(lo - 1) * d;
        let fl = noise_floor(2.0 * win.log_mag, win.d.len()) * ratio.norm() / den.norm();
        Ok((vec![-ratio * t * h / den], fl))
    })?
    .require()?;
    Ok(out.values[0])
}

/// Resolvent matrix element ⟨e_i, (𝒥 − z)^{-1} e_j⟩.
///
/// Uses the regularized scales when the operator has a class, so points of
/// Ran(λ) inside the resolvent set are fine there.
pub fn green(spec: &OperatorSpec, z: C, i: i64, j: i64, tol: f64) -> Result<C> {
    tail_kind(spec)?;
    let mode = if spec.reg_class.p().is_some() { Mode::Regularized } else { Mode::Generic };
    if mode == Mode::Generic {
        guard_poles(spec, z, i64::MIN, i64::MAX)?;
    }
    green_mode(spec, mode, z, i, j, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functional::f_eval;
    use crate::oracles::{bessel_j, qpochhammer};
    use crate::sequence::{bessel_compact, linear_free, q_geometric};

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    #[test]
    fn linear_free_charfn_is_one() {
        let s = linear_free(1.0).unwrap();
        let v = charfn(&s, c(0.5, 0.5), 1e-10).unwrap();
        assert!((v.value - 1.0).norm() < 1e-10, "{:?}", v);
    }

    #[test]
    fn bessel_charfn_is_one() {
        let s = bessel_compact(0.3, 0.7).unwrap();
        let v = charfn(&s, c(2.0, 1.0), 1e-10).unwrap();
        assert!((v.value - 1.0).norm() < 1e-10, "{:?}", v);
    }

    #[test]
    fn q_charfn_matches_pochhammer() {
        let s = q_geometric(0.5, c(0.8, 0.0)).unwrap();
        let want = qpochhammer(c(-0.32, 0.0), c(0.5, 0.0), 1e-16).unwrap();
        // z = 2 = λ_{−1}: the pole cancels and only the extended form evaluates
        assert_eq!(charfn(&s, c(2.0, 0.0), 1e-12).unwrap_err(), Error::PoleHit { index: -1 });
        let v = charfn_extended(&s, c(2.0, 0.0), 1e-12).unwrap();
        assert!((v.value - want).norm() < 1e-8);
        let z = c(2.0, 0.7);
        let v = charfn(&s, z, 1e-12).unwrap();
        let want = qpochhammer(-0.64 / z, c(0.5, 0.0), 1e-16).unwrap();
        assert!((v.value - want).norm() < 1e-10);
        assert!(v.certified && v.tail_err <= 1e-12);
    }

    #[test]
    fn window_value_is_f_of_entries() {
        let s = bessel_compact(0.3, 0.7).unwrap();
        let z = c(0.7, 0.4);
        let w = Window::build(&s, Mode::Generic, z, -10, 10).unwrap();
        let xs: Vec<C> = (-10..=10).map(|k| s.gamma_sq(k) / (z - s.lambda(k))).collect();
        assert!((w.det() - f_eval(&xs)).norm() < 1e-13);
    }

    #[test]
    fn charfn_pole_hit() {
        let s = linear_free(1.0).unwrap();
        assert_eq!(charfn(&s, c(3.0, 0.0), 1e-10).unwrap_err(), Error::PoleHit { index: 3 });
        // F_J ≡ 1 here, so every integer is removable
        assert!((charfn_extended(&s, c(3.0, 0.0), 1e-10).unwrap().value - 1.0).norm() < 1e-9);
    }

    #[test]
    fn f_recurrence_and_bessel_ratio() {
        let s = linear_free(1.0).unwrap();
        let z = c(0.3, 0.2);
        let tol = 1e-12;
        let f = solution_f(&s, z, (-5, 8), tol).unwrap();
        let m = f.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        assert!(recurrence_residual(&s, z, &f) <= 10.0 * 1e-10 * m);
        for n in -5..8 {
            let want = -bessel_j(c(n as f64 + 1.0, 0.0) - z, c(2.0, 0.0), 1e-16).unwrap()
                / bessel_j(c(n as f64, 0.0) - z, c(2.0, 0.0), 1e-16).unwrap();
            assert!((f.at(n + 1) / f.at(n) - want).norm() < 1e-7 * want.norm().max(1.0), "n = {n}");
        }
    }

    #[test]
    fn f_over_p_tends_to_one() {
        let s = linear_free(1.0).unwrap();
        let z = c(0.0, 0.5);
        let f = solution_f(&s, z, (30, 30), 1e-13).unwrap();
        let p = p_factor(&s, 30, z, false).unwrap();
        let d30 = (f.values[0] / p - 1.0).norm();
        let f = solution_f(&s, z, (60, 60), 1e-13).unwrap();
        let p = p_factor(&s, 60, z, false).unwrap();
        let d60 = (f.values[0] / p - 1.0).norm();
        // deviation ~ 1/n: halves from 30 to 60
        assert!(d30 < 0.05 && d60 < 0.6 * d30 && d60 > 0.4 * d30, "{d30} {d60}");
    }

    #[test]
    fn g_tends_to_one_on_the_left() {
        let s = linear_free(1.0).unwrap();
        let z = c(0.0, 0.5);
        let g = solution_g(&s, z, (-60, -30), 1e-13).unwrap();
        let dev = |n: i64| (g.at(n) * s.w(n - 1) * p_factor(&s, n - 1, z, false).unwrap() - 1.0).norm();
        let (d30, d60) = (dev(-30), dev(-60));
        assert!(d30 < 0.05 && d60 < 0.6 * d30 && d60 > 0.4 * d30, "{d30} {d60}");
        assert!(recurrence_residual(&s, z, &g) < 1e-9 * g.values.iter().map(|v| v.norm()).fold(0.0, f64::max));
    }

    #[test]
    fn skip_poles_for_f() {
        let s = linear_free(1.0).unwrap();
        // λ_2 = 2 = z sits inside 𝒫_5, skipped; tails start at 6
        let f = solution_f(&s, c(2.0, 0.0), (5, 9), 1e-12).unwrap();
        assert!(recurrence_residual(&s, c(2.0, 0.0), &f) < 1e-9 * f.values[0].norm());
        assert!(matches!(solution_f(&s, c(2.0, 0.0), (1, 4), 1e-12), Err(Error::PoleHit { index: 2 })));
    }

    #[test]
    fn wronskian_examples() {
        let s = linear_free(1.0).unwrap();
        let z = c(0.4, 0.1);
        let f = charfn(&s, z, 1e-12).unwrap().value;
        for n in [-3, 0, 5] {
            assert!((wronskian(&s, z, n, 1e-12).unwrap() - f).norm() < 1e-9);
        }
        let b = bessel_compact(0.3, 0.7).unwrap();
        assert!((wronskian(&b, c(3.0, 0.0), 2, 1e-12).unwrap() - 1.0).norm() < 1e-8);
        let q = q_geometric(0.5, c(0.8, 0.0)).unwrap();
        let want = qpochhammer(c(-0.32, 0.0), c(0.5, 0.0), 1e-16).unwrap();
        assert!((wronskian_extended(&q, c(2.0, 0.0), -1, 1e-12).unwrap() - want).norm() < 1e-7);
        assert!((wronskian_extended(&q, c(2.0, 0.0), 3, 1e-12).unwrap() - want).norm() < 1e-7);
    }

    #[test]
    fn green_identity_and_symmetry() {
        let s = linear_free(1.0).unwrap();
        let z = c(0.5, 0.5);
        let g: Vec<C> = (-11..=11).map(|k| green(&s, z, k, 0, 1e-12).unwrap()).collect();
        for i in -10..=10i64 {
            let k = (i + 11) as usize;
            let r = s.w(i - 1) * g[k - 1] + (s.lambda(i) - z) * g[k] + s.w(i) * g[k + 1];
            let want = if i == 0 { 1.0 } else { 0.0 };
            assert!((r - want).norm() < 1e-8, "i = {i}: {r}");
        }
        let a = green(&s, z, 2, 5, 1e-12).unwrap();
        let b = green(&s, z, 5, 2, 1e-12).unwrap();
        assert!((a - b).norm() <= 1e-15 * a.norm());
    }

    #[test]
    fn green_near_spectrum() {
        let s = linear_free(1.0).unwrap();
        assert!(matches!(green(&s, c(2.0, 0.0), 0, 0, 1e-10), Err(Error::NearSpectrum { .. })));
    }

    #[test]
    fn no_tail_metadata() {
        use crate::sequence::{make_spec, CustomSeq, Family, RegClass};
        use std::sync::Arc;
        let cs = CustomSeq::new(
            "bare",
            Arc::new(|n| C::new(n as f64, 0.0)),
            Arc::new(|_| C::new(1.0, 0.0)),
            RegClass::None,
        );
        let s = make_spec(Family::Custom(cs), &[]).unwrap();
        assert_eq!(charfn(&s, c(0.5, 0.5), 1e-8).unwrap_err(), Error::NoTailBound);
    }
}
