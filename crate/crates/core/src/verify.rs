//! End-to-end checks on the three example families and on random specs,
//! reported as one `CHECK` line each.

use crate::charfn::{charfn, green, wronskian};
use crate::error::{Error, Result};
use crate::functional::{f_eval, f_eval_bruteforce};
use crate::oracles::{bessel_j, qpochhammer};
use crate::regularization::{
    charfn_reg, charfn_reg_jet, detp_finite, eigvec_reg, eigvec_sum_identity_reg,
};
use crate::sequence::{
    bessel_compact, linear_free, make_spec, q_geometric, CustomSeq, Family, OperatorSpec, RegClass, TailKind,
    TailMeta,
};
use crate::spectra::{chain_residuals, generalized_eigvecs, spectrum, Rect, SpectrumOpts};
use num_complex::Complex64 as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;
use std::time::Instant;

/// One measured quantity against its bound.
#[derive(Clone, Debug)]
pub struct Check {
    pub id: String,
    pub pass: bool,
    pub measured: f64,
    pub bound: f64,
    pub note: String,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "CHECK {} {} measured={:.3e} bound={:.3e}",
            self.id,
            if self.pass { "PASS" } else { "FAIL" },
            self.measured,
            self.bound
        )?;
        if !self.note.is_empty() {
            write!(f, " note={}", self.note.replace(' ', "_"))?;
        }
        Ok(())
    }
}

/// Bounds are multiplied by this; a harness self-test sets it tiny.
#[derive(Clone, Copy, Debug)]
pub struct Harness {
    pub bound_scale: f64,
}

impl Default for Harness {
    fn default() -> Self {
        Harness { bound_scale: 1.0 }
    }
}

impl Harness {
    fn le(&self, id: &str, measured: f64, bound: f64) -> Check {
        let bound = bound * self.bound_scale;
        Check { id: id.into(), pass: measured <= bound, measured, bound, note: String::new() }
    }

    fn eq(&self, id: &str, got: usize, want: usize) -> Check {
        Check {
            id: id.into(),
            pass: got == want,
            measured: got as f64,
            bound: want as f64,
            note: "count".into(),
        }
    }

    fn from<T>(&self, id: &str, bound: f64, r: Result<T>, f: impl FnOnce(T) -> f64) -> Check {
        match r {
            Ok(v) => self.le(id, f(v), bound),
            Err(e) => failed(id, bound * self.bound_scale, &e),
        }
    }
}

fn failed(id: &str, bound: f64, e: &Error) -> Check {
    Check { id: id.into(), pass: false, measured: f64::NAN, bound, note: format!("error {}: {e}", e.kind()) }
}

fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

fn rel(a: C, b: C) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn rand_in(r: &mut ChaCha8Rng, re: (f64, f64), im: (f64, f64)) -> C {
    c(r.gen_range(re.0..re.1), r.gen_range(im.0..im.1))
}

/// Max over `want` of the distance to the nearest located point.
fn match_points(got: &[C], want: &[C]) -> f64 {
    want.iter()
        .map(|w| got.iter().map(|g| (g - w).norm()).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max)
}

fn located(spec: &OperatorSpec, regions: &[Rect], tol: f64) -> Result<Vec<(C, usize)>> {
    let mut out = Vec::new();
    for r in regions {
        let rep = spectrum(spec, *r, tol, &SpectrumOpts::default())?;
        out.extend(rep.eigenpoints.iter().map(|p| (p.z, p.multiplicity)));
    }
    Ok(out)
}

fn rect(x0: f64, x1: f64, y0: f64, y1: f64) -> Rect {
    Rect { x0, x1, y0, y1 }
}

fn spectrum_checks(h: &Harness, id: &str, spec: Result<OperatorSpec>, regions: &[Rect], want: &[C]) -> Vec<Check> {
    let pts = spec.and_then(|s| located(&s, regions, 1e-10));
    match pts {
        Ok(pts) => {
            let zs: Vec<C> = pts.iter().map(|p| p.0).collect();
            let simple = pts.iter().filter(|p| p.1 == 1).count();
            vec![
                h.eq(&format!("{id}.count"), zs.len(), want.len()),
                h.eq(&format!("{id}.simple"), simple, want.len()),
                h.le(&format!("{id}.location"), match_points(&zs, want), 1e-8),
            ]
        }
        Err(e) => vec![failed(&format!("{id}.location"), 1e-8, &e)],
    }
}

fn lf_closed(z: C) -> C {
    (z * PI).sin() / PI
}

fn bessel_closed(alpha: f64, z: C) -> C {
    let iz = z.inv();
    ((c(alpha, 0.0) - iz) * PI).sin() / (PI * alpha).sin() * (iz * (PI / (PI * alpha).tan())).exp()
}

fn q_closed(q: f64, b2: C, z: C) -> Result<C> {
    let qc = c(q, 0.0);
    Ok(qpochhammer(z, qc, 1e-17)? * qpochhammer(qc / z, qc, 1e-17)? * qpochhammer(-b2 / z, qc, 1e-17)?)
}

fn max_rel_err(pts: &[C], f: impl Fn(C) -> Result<(C, C)>) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &z in pts {
        let (got, want) = f(z)?;
        worst = worst.max(rel(got, want));
    }
    Ok(worst)
}

fn runtime(h: &Harness, id: &str, t: Instant, bound: f64) -> Check {
    h.le(id, t.elapsed().as_secs_f64(), bound)
}

pub fn criterion_1(h: &Harness) -> Vec<Check> {
    let t = Instant::now();
    let want: Vec<C> = (-3..=3).map(|k| c(k as f64, 0.0)).collect();
    let mut out = spectrum_checks(h, "1.spectrum", linear_free(1.0), &[rect(-3.5, 3.5, -1.0, 1.0)], &want);
    let mut r = rng(1);
    let pts: Vec<C> = (0..25).map(|_| rand_in(&mut r, (-3.5, 3.5), (-1.0, 1.0))).collect();
    let err = linear_free(1.0)
        .and_then(|s| max_rel_err(&pts, |z| Ok((charfn_reg(&s, z, 1e-13)?.value, lf_closed(z)))));
    out.push(h.from("1.charfn", 1e-9, err, |e| e));
    out.push(runtime(h, "1.runtime_s", t, 30.0));
    out
}

pub fn criterion_2(h: &Harness) -> Vec<Check> {
    let t = Instant::now();
    let alpha = 0.3;
    let spec = bessel_compact(alpha, 0.7);
    let mut r = rng(2);
    let pts: Vec<C> = (0..25)
        .map(|_| C::from_polar(r.gen_range(0.3..3.0), r.gen_range(-PI..PI)))
        .collect();
    let mut out = Vec::new();
    let one = spec.clone().and_then(|s| {
        pts.iter().map(|&z| Ok((charfn(&s, z, 1e-12)?.value - 1.0).norm())).try_fold(0.0f64, |a, e: Result<f64>| {
            Ok(a.max(e?))
        })
    });
    out.push(h.from("2.fj_identically_one", 1e-10, one, |e| e));
    let err = spec
        .clone()
        .and_then(|s| max_rel_err(&pts, |z| Ok((charfn_reg(&s, z, 1e-13)?.value, bessel_closed(alpha, z)))));
    out.push(h.from("2.charfn_reg", 1e-7, err, |e| e));
    let want: Vec<C> = (-3..=3).map(|n| c(1.0 / (alpha + n as f64), 0.0)).collect();
    out.extend(spectrum_checks(
        h,
        "2.spectrum",
        bessel_compact(alpha, 0.7),
        &[rect(0.28, 3.5, -0.2, 0.2), rect(-1.5, -0.33, -0.2, 0.2)],
        &want,
    ));
    // v_n(z_N) ∝ √(α+n)·J_{n−N}(2β(N+α)) at N = 1
    let ev = spec.and_then(|s| {
        let big_n = 1i64;
        let x = c(2.0 * 0.7 * (big_n as f64 + alpha), 0.0);
        let v = eigvec_reg(&s, c(1.0 / (alpha + big_n as f64), 0.0), (-4, 8), 1e-13)?;
        let mut oracle = Vec::new();
        for n in -4..=8i64 {
            oracle.push(c(alpha + n as f64, 0.0).sqrt() * bessel_j(c((n - big_n) as f64, 0.0), x, 1e-17)?);
        }
        Ok(projective_err(&v.values, &oracle))
    });
    out.push(h.from("2.eigvec_ratio", 1e-6, ev, |e| e));
    out.push(runtime(h, "2.runtime_s", t, 60.0));
    out
}

/// max |u_n/u_m − v_n/v_m| with m the largest entry of v.
pub fn projective_err(u: &[C], v: &[C]) -> f64 {
    let m = (0..v.len()).max_by(|&i, &j| v[i].norm().total_cmp(&v[j].norm())).unwrap_or(0);
    u.iter().zip(v).map(|(a, b)| (a / u[m] - b / v[m]).norm()).fold(0.0, f64::max)
}

/// β with −β² = q: the ladders q^ℤ and −β²q^ℕ₀ meet at q, q², ...
pub fn collision_beta(q: f64) -> C {
    c(0.0, q.sqrt())
}

pub fn criterion_3(h: &Harness) -> Vec<Check> {
    let t = Instant::now();
    let (q, beta) = (0.5, c(0.8, 0.0));
    let b2 = beta * beta;
    let mut r = rng(3);
    let pts: Vec<C> = (0..25).map(|_| rand_in(&mut r, (-2.5, 2.5), (-1.0, 1.0))).collect();
    let err = q_geometric(q, beta).and_then(|s| {
        max_rel_err(&pts, |z| Ok((charfn_reg(&s, z, 1e-13)?.value, q_closed(q, b2, z)?)))
    });
    let mut out = vec![h.from("3.charfn_reg", 1e-7, err, |e| e)];
    let mut want: Vec<C> = (-1..=3).map(|k| c(q.powi(k), 0.0)).collect();
    want.extend((0..=3).map(|k| -b2 * q.powi(k)));
    out.extend(spectrum_checks(
        h,
        "3.spectrum",
        q_geometric(q, beta),
        &[rect(0.1, 2.5, -0.1, 0.1), rect(-0.7, -0.07, -0.1, 0.1)],
        &want,
    ));
    let coll = q_geometric(q, collision_beta(q)).and_then(|s| {
        let pts = located(&s, &[rect(0.3, 0.7, -0.1, 0.1)], 1e-10)?;
        let double = pts.iter().find(|p| p.1 == 2).ok_or_else(|| {
            Error::NonConvergent(format!("no double eigenpoint among {pts:?}"))
        })?;
        let chain = generalized_eigvecs(&s, double.0, 2, (-6, 12), 1e-13)?;
        Ok(chain_residuals(&s, double.0, &chain)[0])
    });
    out.push(h.from("3.double_point_chain", 1e-6, coll, |e| e));
    out.push(runtime(h, "3.runtime_s", t, 120.0));
    out
}

/// A spec with entries drawn uniformly from the unit square for |n| ≤ 8.
pub fn random_bounded_spec(seed: u64, class: RegClass) -> Result<OperatorSpec> {
    let mut r = rng(seed);
    let lam: Vec<C> = (0..17).map(|_| rand_in(&mut r, (-1.0, 1.0), (-1.0, 1.0))).collect();
    let w: Vec<C> = (0..17)
        .map(|_| {
            let v = rand_in(&mut r, (-1.0, 1.0), (-1.0, 1.0));
            if v.norm() < 0.1 {
                v + 0.5
            } else {
                v
            }
        })
        .collect();
    let at = |t: &Vec<C>, n: i64| t[(n.clamp(-8, 8) + 8) as usize];
    let lf: Arc<dyn Fn(i64) -> C + Send + Sync> = Arc::new(move |n| at(&lam, n));
    let wf: Arc<dyn Fn(i64) -> C + Send + Sync> = Arc::new(move |n| at(&w, n));
    make_spec(Family::Custom(CustomSeq::new("random-bounded", lf, wf, class)), &[])
}

pub fn criterion_4(h: &Harness) -> Vec<Check> {
    let mut worst: f64 = 0.0;
    let mut r = rng(4);
    for i in 0..50u64 {
        let p = 1 + (i % 3) as u32;
        let class = if i % 2 == 0 { RegClass::Compact { p } } else { RegClass::CompactResolvent { p } };
        let n = r.gen_range(0..=8usize);
        let z = rand_in(&mut r, (-2.0, 2.0), (-2.0, 2.0));
        match random_bounded_spec(1000 + i, class).and_then(|s| detp_finite(&s, p, z, n)) {
            Ok(d) => worst = worst.max(d.identity_residual),
            Err(e) => return vec![failed("4.detp_identity", 1e-12, &e)],
        }
    }
    vec![h.le("4.detp_identity", worst, 1e-12)]
}

/// Recurrence bound M with M_k = M_{k−1} + |x_{k−1}x_k|M_{k−2}: dominates
/// every term of 𝔉, so differences are measured against it.
fn abs_scale(xs: &[C]) -> f64 {
    let (mut m2, mut m1) = (1.0f64, 1.0f64);
    for k in 1..xs.len() {
        let cur = m1 + (xs[k - 1] * xs[k]).norm() * m2;
        m2 = m1;
        m1 = cur;
    }
    m1
}

pub fn criterion_5(h: &Harness) -> Vec<Check> {
    let mut r = rng(5);
    let (mut brute, mut split, mut three): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for _ in 0..500 {
        let len = r.gen_range(1..=12usize);
        let xs: Vec<C> = (0..len).map(|_| rand_in(&mut r, (-1.5, 1.5), (-1.5, 1.5))).collect();
        let m = abs_scale(&xs);
        let full = f_eval(&xs);
        match f_eval_bruteforce(&xs) {
            Ok(b) => brute = brute.max((full - b).norm() / m),
            Err(e) => return vec![failed("5.bruteforce", 1e-12, &e)],
        }
        let fr = |a: usize, b: usize| if b <= a { c(1.0, 0.0) } else { f_eval(&xs[a..b]) };
        for k in 1..len {
            // cut between positions k−1 and k
            let lhs = fr(0, k) * fr(k, len) - xs[k - 1] * xs[k] * fr(0, k - 1) * fr((k + 1).min(len), len);
            split = split.max((full - lhs).norm() / m);
        }
        if len >= 2 {
            let lhs = fr(0, len - 1) - xs[len - 2] * xs[len - 1] * fr(0, len - 2);
            three = three.max((full - lhs).norm() / m);
        }
    }
    vec![
        h.le("5.bruteforce", brute, 1e-12),
        h.le("5.splitting", split, 1e-12),
        h.le("5.three_term", three, 1e-12),
    ]
}

fn builtins(beta_q: C) -> Vec<(&'static str, Result<OperatorSpec>, C)> {
    vec![
        ("linear_free", linear_free(1.0), c(0.5, 0.5)),
        ("bessel", bessel_compact(0.3, 0.7), c(0.4, 0.3)),
        ("q", q_geometric(0.5, beta_q), c(1.3, 0.4)),
    ]
}

pub fn criterion_6(h: &Harness) -> Vec<Check> {
    let mut out = Vec::new();
    let mut r = rng(6);
    for (name, spec, z) in builtins(c(0.8, 0.0)) {
        let ns: Vec<i64> = (0..20).map(|_| r.gen_range(-10..=10)).collect();
        let res = spec.and_then(|s| {
            let f = charfn(&s, z, 1e-13)?.value;
            ns.iter().map(|&n| Ok(rel(wronskian(&s, z, n, 1e-13)?, f))).try_fold(0.0f64, |a, e: Result<f64>| {
                Ok(a.max(e?))
            })
        });
        out.push(h.from(&format!("6.wronskian_{name}"), 1e-8, res, |e| e));
    }
    out
}

/// Green function of the Bessel example for i ≥ j.
fn bessel_green(alpha: f64, beta: f64, z: C, i: i64, j: i64) -> Result<C> {
    let iz = z.inv();
    let x = iz * (2.0 * beta);
    let sign = if (j + 1) % 2 == 0 { 1.0 } else { -1.0 };
    let pre = c((alpha + i as f64) * (alpha + j as f64), 0.0).sqrt() * (PI * sign)
        / (z * ((c(alpha, 0.0) - iz) * PI).sin());
    Ok(pre * bessel_j(c(i as f64 + alpha, 0.0) - iz, x, 1e-17)? * bessel_j(iz - (j as f64 + alpha), x, 1e-17)?)
}

pub fn criterion_7(h: &Harness) -> Vec<Check> {
    let mut out = Vec::new();
    let tol = 1e-13;
    for (name, spec, z) in builtins(c(0.8, 0.0)) {
        let res = spec.and_then(|s| {
            let g: Vec<C> = (-11..=11).map(|k| green(&s, z, k, 0, tol)).collect::<Result<_>>()?;
            let at = |k: i64| g[(k + 11) as usize];
            let mut worst: f64 = 0.0;
            for i in -10..=10i64 {
                let row = s.w(i - 1) * at(i - 1) + (s.lambda(i) - z) * at(i) + s.w(i) * at(i + 1);
                let delta = if i == 0 { 1.0 } else { 0.0 };
                worst = worst.max((row - delta).norm());
            }
            let sym = rel(green(&s, z, 2, 5, tol)?, green(&s, z, 5, 2, tol)?);
            Ok((worst, sym))
        });
        match res {
            Ok((w, sym)) => {
                out.push(h.le(&format!("7.resolvent_{name}"), w, 1e-8));
                out.push(h.le(&format!("7.symmetry_{name}"), sym, 1e-12));
            }
            Err(e) => out.push(failed(&format!("7.resolvent_{name}"), 1e-8, &e)),
        }
    }
    let z = c(0.4, 0.3);
    let closed = bessel_compact(0.3, 0.7)
        .and_then(|s| Ok(rel(green(&s, z, 2, 1, tol)?, bessel_green(0.3, 0.7, z, 2, 1)?)));
    out.push(h.from("7.bessel_closed_form", 1e-6, closed, |e| e));
    out
}

pub fn criterion_8(h: &Harness) -> Vec<Check> {
    let mut out = Vec::new();
    let eig = [c(2.0, 0.0), c(1.0 / 1.3, 0.0), c(0.5, 0.0)];
    for ((name, spec, _), z) in builtins(c(0.8, 0.0)).into_iter().zip(eig) {
        let res = spec.and_then(|s| eigvec_sum_identity_reg(&s, z, 1e-13)).map(|si| rel(si.lhs, si.rhs));
        out.push(h.from(&format!("8.sum_identity_{name}"), 1e-7, res, |e| e));
    }
    // f̃_n(z_N)² = K²(α+n)J_{n−N}(x)²; K² fixed from the entry n = N, where J_0 enters
    let (alpha, beta, big_n) = (0.3, 0.7, 1i64);
    let x = c(2.0 * beta * (big_n as f64 + alpha), 0.0);
    let res = bessel_compact(alpha, beta).and_then(|s| {
        let v = eigvec_reg(&s, c(1.0 / (alpha + big_n as f64), 0.0), (big_n - 40, big_n + 40), 1e-13)?;
        let j0 = bessel_j(c(0.0, 0.0), x, 1e-17)?;
        let k2 = v.at(big_n) * v.at(big_n) / ((alpha + big_n as f64) * j0 * j0);
        let sum: C = v.indices().map(|n| v.at(n) * v.at(n) / (k2 * (alpha + n as f64))).sum();
        Ok((sum - 1.0).norm())
    });
    out.push(h.from("8.bessel_sum_j_squared", 1e-8, res, |e| e));
    out
}

pub fn criterion_9(h: &Harness) -> Vec<Check> {
    let pts: [(usize, C); 10] = [
        (0, c(0.3, 0.2)),
        (0, c(1.7, -0.4)),
        (0, c(-2.2, 0.5)),
        (1, c(0.9, 0.1)),
        (1, c(0.5, -0.3)),
        (1, c(-0.8, 0.2)),
        (2, c(1.3, 0.2)),
        (2, c(-0.5, 0.3)),
        (2, c(0.3, 0.1)),
        (2, c(2.2, -0.3)),
    ];
    let specs = builtins(c(0.8, 0.0));
    let hstep = 1e-6;
    let mut worst: f64 = 0.0;
    for (k, z) in pts {
        let s = match &specs[k].1 {
            Ok(s) => s,
            Err(e) => return vec![failed("9.jet_vs_fd", 1e-6, e)],
        };
        let r = (|| -> Result<f64> {
            let jet = charfn_reg_jet(s, z, 1, 1e-14)?.value.derivative(1);
            let fp = charfn_reg(s, z + hstep, 1e-14)?.value;
            let fm = charfn_reg(s, z - hstep, 1e-14)?.value;
            Ok(rel((fp - fm) / (2.0 * hstep), jet))
        })();
        match r {
            Ok(e) => worst = worst.max(e),
            Err(e) => return vec![failed("9.jet_vs_fd", 1e-6, &e)],
        }
    }
    let mut out = vec![h.le("9.jet_vs_fd", worst, 1e-6)];
    let q = 0.5;
    let chain = q_geometric(q, collision_beta(q)).and_then(|s| {
        let z0 = c(q, 0.0);
        let ch = generalized_eigvecs(&s, z0, 2, (-6, 12), 1e-13)?;
        Ok(chain_residuals(&s, z0, &ch)[0])
    });
    out.push(h.from("9.chain_relation", 1e-6, chain, |e| e));
    out
}

/// Real λ_n = a_n ρ^{|n|}, w_n = b_n ρ^{|n|} with a_n ∈ [−1, 1],
/// |b_n| ∈ [0.3, 1]: a compact self-adjoint operator, class Compact{1}.
pub fn random_real_compact(seed: u64) -> Result<OperatorSpec> {
    let mut r = rng(seed);
    let rho: f64 = r.gen_range(0.3..0.6);
    let a: Vec<f64> = (0..33).map(|_| r.gen_range(-1.0..1.0)).collect();
    let b: Vec<f64> = (0..33)
        .map(|_| r.gen_range(0.3..1.0) * if r.gen_bool(0.5) { 1.0 } else { -1.0 })
        .collect();
    let idx = |n: i64| (n.rem_euclid(33)) as usize;
    let lam: Arc<dyn Fn(i64) -> C + Send + Sync> =
        Arc::new(move |n| c(a[idx(n)] * rho.powi(n.unsigned_abs().min(2000) as i32), 0.0));
    let w: Arc<dyn Fn(i64) -> C + Send + Sync> =
        Arc::new(move |n| c(b[idx(n)] * rho.powi(n.unsigned_abs().min(2000) as i32), 0.0));
    let tail = TailMeta { kind: TailKind::Geometric, start: 16, pair_tail: None };
    let cs = CustomSeq::new("random-real-compact", lam, w, RegClass::Compact { p: 1 })
        .with_tail(tail)
        .with_accumulation(vec![c(0.0, 0.0)]);
    make_spec(Family::Custom(cs), &[])
}

pub fn criterion_10(h: &Harness) -> Vec<Check> {
    let (mut worst_im, mut non_simple, mut found) = (0.0f64, 0usize, 0usize);
    let opts = SpectrumOpts { origin_radius: Some(0.05), ..SpectrumOpts::default() };
    for seed in 0..10u64 {
        let rep = random_real_compact(100 + seed).and_then(|s| spectrum(&s, rect(-3.2, 3.2, -0.4, 0.4), 1e-10, &opts));
        match rep {
            Ok(rep) => {
                for p in &rep.eigenpoints {
                    worst_im = worst_im.max(p.z.im.abs());
                    non_simple += (p.multiplicity != 1) as usize;
                }
                found += rep.eigenpoints.len();
            }
            Err(e) => return vec![failed("10.real", 1e-8, &e)],
        }
    }
    let mut nonempty = h.eq("10.eigenpoints_found", found.min(1), 1);
    nonempty.measured = found as f64;
    nonempty.note = "at_least_one".into();
    vec![h.le("10.real", worst_im, 1e-8), h.eq("10.non_simple", non_simple, 0), nonempty]
}

pub type Criterion = fn(&Harness) -> Vec<Check>;

pub const CRITERIA: [Criterion; 10] = [
    criterion_1,
    criterion_2,
    criterion_3,
    criterion_4,
    criterion_5,
    criterion_6,
    criterion_7,
    criterion_8,
    criterion_9,
    criterion_10,
];

/// Run the selected criteria (1-based; all when empty).
pub fn run(h: &Harness, only: &[usize]) -> Vec<Check> {
    CRITERIA
        .iter()
        .enumerate()
        .filter(|(i, _)| only.is_empty() || only.contains(&(i + 1)))
        .flat_map(|(_, f)| f(h))
        .collect()
}
