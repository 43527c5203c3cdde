//! Hadamard regularizers and the regularized F̃, f̃, g̃, plus finite-section
//! regularized determinants.

use crate::chain::Mode;
use crate::charfn::{
    a_ratio_mode, charfn_mode, eigvec_mode, f_slice, g_slice, sum_identity_mode, wronskian_mode, CharValue,
    SolutionSlice, SumIdentity,
};
use crate::error::{Error, Result};
use crate::functional::f_eval;
use crate::jet::Jet;
use crate::ladder::{self, LadderOpts};
use crate::sequence::{OperatorSpec, RegClass};
use num_complex::Complex64 as C;
use serde::Serialize;

/// Which half of the index line a one-sided product runs over:
/// `Plus` is n ≥ 1, `Minus` is n ≤ 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Plus,
    Minus,
}

/// exp(Σ_{j=1}^{p−1} u^j/j)
fn conv_factor(u: C, p: u32) -> C {
    let mut acc = C::new(0.0, 0.0);
    let mut pw = C::new(1.0, 0.0);
    for j in 1..p {
        pw *= u;
        acc += pw / j as f64;
    }
    acc.exp()
}

fn one_sided_product(spec: &OperatorSpec, side: Side, z: C, tol: f64, factor: impl Fn(i64) -> C) -> Result<C> {
    let kind = spec.tail_kind().ok_or(Error::NoTailBound)?;
    let n0 = spec.start_window(z);
    let out = ladder::run_with_floor(kind, n0, LadderOpts::new(tol), |n| {
        let (lo, hi) = match side {
            Side::Plus => (1, n as i64),
            Side::Minus => (-(n as i64), 0),
        };
        let v = (lo..=hi).map(&factor).product::<C>();
        Ok((vec![v], f64::EPSILON * n as f64 * v.norm()))
    })?
    .require()?;
    Ok(out.values[0])
}

fn check_p(p: u32) -> Result<()> {
    if p == 0 {
        return Err(Error::InvalidFamilyParams("p must be at least 1".into()));
    }
    Ok(())
}

/// Φ_p^±(z) = ∏ (1 − λ_n/z)·exp(Σ_{j<p} (λ_n/z)^j/j) over the chosen side.
pub fn hadamard_phi(spec: &OperatorSpec, side: Side, p: u32, z: C, tol: f64) -> Result<C> {
    check_p(p)?;
    match (spec.reg_class, side) {
        (RegClass::Compact { .. }, _) | (RegClass::Combined { .. }, Side::Plus) => {}
        (c, _) => return Err(Error::WrongClass(format!("Φ{side:?} needs a compact class, spec is {}", c.name()))),
    }
    if z == C::new(0.0, 0.0) {
        return Err(Error::ZeroArgument);
    }
    let iz = z.inv();
    one_sided_product(spec, side, z, tol, |n| {
        let u = spec.lambda(n) * iz;
        (1.0 - u) * conv_factor(u, p)
    })
}

/// Ψ_p^±(z) = ∏ (1 − z/λ_n)·exp(Σ_{j<p} (z/λ_n)^j/j) over the chosen side;
/// an index with λ_n = 0 contributes the bare factor z.
pub fn hadamard_psi(spec: &OperatorSpec, side: Side, p: u32, z: C, tol: f64) -> Result<C> {
    check_p(p)?;
    match (spec.reg_class, side) {
        (RegClass::CompactResolvent { .. }, _) | (RegClass::Combined { .. }, Side::Minus) => {}
        (c, _) => {
            return Err(Error::WrongClass(format!("Ψ{side:?} needs a compact-resolvent class, spec is {}", c.name())))
        }
    }
    one_sided_product(spec, side, z, tol, |n| {
        let l = spec.lambda(n);
        if l == C::new(0.0, 0.0) {
            z
        } else {
            let u = z / l;
            (1.0 - u) * conv_factor(u, p)
        }
    })
}

fn check_class(spec: &OperatorSpec, z: C) -> Result<()> {
    match spec.reg_class {
        RegClass::None => Err(Error::WrongClass("spec has no regularization class".into())),
        RegClass::Compact { .. } | RegClass::Combined { .. } if z == C::new(0.0, 0.0) => Err(Error::ZeroArgument),
        _ => Ok(()),
    }
}

/// F̃(z): the class's regularizers times F_J, analytic across Ran(λ).
pub fn charfn_reg(spec: &OperatorSpec, z: C, tol: f64) -> Result<CharValue> {
    check_class(spec, z)?;
    charfn_mode(spec, Mode::Regularized, z, tol)
}

/// F̃ as a Taylor jet of the given order at z0.
pub fn charfn_reg_jet(spec: &OperatorSpec, z0: C, order: usize, tol: f64) -> Result<CharValue<Jet>> {
    check_class(spec, z0)?;
    charfn_mode(spec, Mode::Regularized, Jet::variable(z0, order), tol)
}

pub fn solution_f_reg(spec: &OperatorSpec, z: C, range: (i64, i64), tol: f64) -> Result<SolutionSlice> {
    check_class(spec, z)?;
    Ok(f_slice(spec, Mode::Regularized, z, range, tol, None)?.0)
}

pub fn solution_g_reg(spec: &OperatorSpec, z: C, range: (i64, i64), tol: f64) -> Result<SolutionSlice> {
    check_class(spec, z)?;
    Ok(g_slice(spec, Mode::Regularized, z, range, tol)?.0)
}

/// f̃ as jets of the given order at z0; `derivative(j)` gives f̃^{(j)}.
pub fn solution_f_reg_jet(
    spec: &OperatorSpec,
    z0: C,
    order: usize,
    range: (i64, i64),
    tol: f64,
) -> Result<SolutionSlice<Jet>> {
    check_class(spec, z0)?;
    Ok(f_slice(spec, Mode::Regularized, Jet::variable(z0, order), range, tol, None)?.0)
}

pub fn wronskian_reg(spec: &OperatorSpec, z: C, n: i64, tol: f64) -> Result<C> {
    check_class(spec, z)?;
    wronskian_mode(spec, Mode::Regularized, z, n, tol)
}

/// Ã(z) = f̃_n/g̃_n at an eigenvalue.
pub fn a_ratio_reg(spec: &OperatorSpec, z: C, tol: f64) -> Result<C> {
    check_class(spec, z)?;
    Ok(a_ratio_mode(spec, Mode::Regularized, z, tol)?.0)
}

/// Eigenvector f̃(z) at an eigenvalue z, assembled from f̃ on the right and
/// Ã·g̃ on the left.
pub fn eigvec_reg(spec: &OperatorSpec, z: C, range: (i64, i64), tol: f64) -> Result<SolutionSlice> {
    check_class(spec, z)?;
    Ok(eigvec_mode(spec, Mode::Regularized, z, range, tol)?.0)
}

/// Σ f̃_n² against Ã·F̃′.
pub fn eigvec_sum_identity_reg(spec: &OperatorSpec, z: C, tol: f64) -> Result<SumIdentity> {
    check_class(spec, z)?;
    sum_identity_mode(spec, Mode::Regularized, z, tol)
}

/// Finite-section regularized determinant, computed two ways.
#[derive(Clone, Debug, Serialize)]
pub struct DetP {
    /// Product of the convergence factors times 𝔉 of the window.
    #[serde(serialize_with = "crate::cx::ser")]
    pub value: C,
    /// Tridiagonal recurrence times the diagonal exponential corrections.
    #[serde(serialize_with = "crate::cx::ser")]
    pub direct: C,
    /// |value − direct|/(1 + |value|)
    pub identity_residual: f64,
    /// det(1 + K)·exp(Σ_{j<p} (−1)^j tr(K^j)/j) with the full traces of the
    /// window matrix K. Equals `value` for p ≤ 2. None when an index has
    /// λ = 0 in the resolvent form.
    #[serde(serialize_with = "crate::cx::ser_opt")]
    pub trace_form: Option<C>,
    pub form: &'static str,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum DetForm {
    /// det_p(1 − zJ_N)
    Compact,
    /// det_p(1 − zΛ^{-1} + Λ^{-1}W) on the window, Λ the diagonal part
    Resolvent,
}

/// det_p of the window [−N, N]. Compact and unclassified specs use
/// det_p(1 − zP_N J P_N); compact-resolvent specs use the window of
/// Λ^{-1}(Λ − z + W), whose λ = 0 rows get the bare diagonal z.
pub fn detp_finite(spec: &OperatorSpec, p: u32, z: C, n: usize) -> Result<DetP> {
    check_p(p)?;
    let form = match spec.reg_class {
        RegClass::None | RegClass::Compact { .. } => DetForm::Compact,
        RegClass::CompactResolvent { .. } => DetForm::Resolvent,
        RegClass::Combined { .. } => {
            return Err(Error::WrongClass("no finite det_p form for the combined class".into()))
        }
    };
    let n = n as i64;
    let idx: Vec<i64> = (-n..=n).collect();
    let lam: Vec<C> = idx.iter().map(|&k| spec.lambda(k)).collect();
    let one = C::new(1.0, 0.0);
    let zero = C::new(0.0, 0.0);

    // diagonal of 1 + K and the per-index convergence factor
    let diag_u: Vec<Option<C>> = lam
        .iter()
        .map(|&l| match form {
            DetForm::Compact => Some(z * l),
            DetForm::Resolvent => (l != zero).then(|| z / l),
        })
        .collect();
    let conv: Vec<C> = diag_u.iter().map(|u| u.map_or(one, |u| conv_factor(u, p))).collect();
    let diag: Vec<C> = diag_u.iter().map(|u| u.map_or(z, |u| one - u)).collect();
    let conv_all: C = conv.iter().product();

    // (a) ∏ diag·conv × 𝔉 of the γ² entries
    let value = match form {
        DetForm::Compact => {
            let g = spec.gamma_window(-n, n);
            let xs: Vec<C> = g.iter().zip(&diag).map(|(g, d)| z * g / d).collect();
            diag.iter().product::<C>() * conv_all * f_eval(&xs)
        }
        DetForm::Resolvent => {
            let g = spec.gamma_window(-n, n);
            let xs: Vec<C> = g.iter().zip(&lam).map(|(g, l)| g / (z - l)).collect();
            diag.iter().product::<C>() * conv_all * f_eval(&xs)
        }
    };

    // (b) tridiagonal recurrence on the matrix entries
    let offprod = |i: usize| -> C {
        let k = idx[i];
        let w2 = spec.w_sq(k);
        match form {
            DetForm::Compact => z * z * w2,
            DetForm::Resolvent => {
                // row scales: −1/λ, or 1 on a λ = 0 row
                let sc = |l: C| if l == zero { one } else { -l.inv() };
                sc(lam[i]) * sc(lam[i + 1]) * w2
            }
        }
    };
    let mut prev2 = zero;
    let mut prev = one;
    for i in 0..diag.len() {
        let cur = if i == 0 { diag[0] } else { diag[i] * prev - offprod(i - 1) * prev2 };
        prev2 = prev;
        prev = cur;
    }
    let direct = prev * conv_all;

    let trace_form = if diag_u.iter().all(|u| u.is_some()) {
        Some(trace_corrected(spec, form, z, &idx, &lam, p, prev))
    } else {
        None
    };
    let identity_residual = (value - direct).norm() / (1.0 + value.norm());
    let form = match form {
        DetForm::Compact => "compact",
        DetForm::Resolvent => "resolvent",
    };
    Ok(DetP { value, direct, identity_residual, trace_form, form })
}

/// det(1 + K)·exp(Σ_{j<p} (−1)^j tr(K^j)/j) with K formed densely.
fn trace_corrected(spec: &OperatorSpec, form: DetForm, z: C, idx: &[i64], lam: &[C], p: u32, det: C) -> C {
    let m = idx.len();
    let zero = C::new(0.0, 0.0);
    let mut k = vec![vec![zero; m]; m];
    for i in 0..m {
        match form {
            DetForm::Compact => {
                k[i][i] = -z * lam[i];
                if i + 1 < m {
                    let w = spec.w(idx[i]);
                    k[i][i + 1] = -z * w;
                    k[i + 1][i] = -z * w;
                }
            }
            DetForm::Resolvent => {
                k[i][i] = -z / lam[i];
                if i + 1 < m {
                    let w = spec.w(idx[i]);
                    k[i][i + 1] = w / lam[i];
                    k[i + 1][i] = w / lam[i + 1];
                }
            }
        }
    }
    let mut pw = k.clone();
    let mut acc = zero;
    for j in 1..p {
        if j > 1 {
            let mut next = vec![vec![zero; m]; m];
            for (r, row) in next.iter_mut().enumerate() {
                for (c, out) in row.iter_mut().enumerate() {
                    *out = (0..m).map(|t| pw[r][t] * k[t][c]).sum();
                }
            }
            pw = next;
        }
        let tr: C = (0..m).map(|i| pw[i][i]).sum();
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        acc += sign * tr / j as f64;
    }
    det * acc.exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::{bessel_j, digamma, gamma, phi01, qpochhammer};
    use crate::sequence::{bessel_compact, linear_free, q_geometric};
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    fn sinpi(z: C) -> C {
        (z * PI).sin() / PI
    }

    fn bessel_ft(alpha: f64, z: C) -> C {
        let u = z.inv();
        let cot = (PI * alpha).cos() / (PI * alpha).sin();
        ((alpha - u) * PI).sin() / (PI * alpha).sin() * (u * PI * cot).exp()
    }

    #[test]
    fn phi_bessel_closed_form() {
        let s = bessel_compact(0.3, 0.7).unwrap();
        let z = c(2.0, 0.0);
        let got = hadamard_phi(&s, Side::Plus, 2, z, 1e-13).unwrap();
        let a1 = c(1.3, 0.0);
        let want = (-digamma(a1, 1e-15).unwrap() / z).exp() * gamma(a1).unwrap() / gamma(a1 - z.inv()).unwrap();
        assert!((got - want).norm() < 1e-8 * want.norm(), "{got} {want}");
    }

    #[test]
    fn phi_tends_to_one() {
        let s = bessel_compact(0.3, 0.7).unwrap();
        let d3 = (hadamard_phi(&s, Side::Plus, 2, c(1e3, 0.0), 1e-13).unwrap() - 1.0).norm();
        let d6 = (hadamard_phi(&s, Side::Plus, 2, c(1e6, 0.0), 1e-13).unwrap() - 1.0).norm();
        assert!(d6 < d3 && d3 < 1e-3);
    }

    #[test]
    fn p1_is_plain_product() {
        let s = q_geometric(0.5, c(0.8, 0.0)).unwrap();
        let z = c(1.3, 0.2);
        let got = hadamard_phi(&s, Side::Plus, 1, z, 1e-14).unwrap();
        let want = qpochhammer(c(0.5, 0.0) / z, c(0.5, 0.0), 1e-16).unwrap();
        assert!((got - want).norm() < 1e-12);
        let got = hadamard_psi(&s, Side::Minus, 1, z, 1e-14).unwrap();
        let want = qpochhammer(z, c(0.5, 0.0), 1e-16).unwrap();
        assert!((got - want).norm() < 1e-12);
    }

    #[test]
    fn psi_linear_free_is_sine() {
        let s = linear_free(1.0).unwrap();
        for z in [c(0.3, 0.0), c(1.7, 0.4)] {
            let got = hadamard_psi(&s, Side::Plus, 2, z, 1e-13).unwrap()
                * hadamard_psi(&s, Side::Minus, 2, z, 1e-13).unwrap();
            assert!((got - sinpi(z)).norm() < 1e-9, "{z}");
        }
        assert_eq!(hadamard_psi(&s, Side::Minus, 2, c(0.0, 0.0), 1e-12).unwrap(), c(0.0, 0.0));
        assert!(hadamard_psi(&s, Side::Plus, 2, c(5.0, 0.0), 1e-12).unwrap().norm() < 1e-12);
    }

    #[test]
    fn class_errors() {
        let s = linear_free(1.0).unwrap();
        assert!(matches!(hadamard_phi(&s, Side::Plus, 2, c(1.0, 0.0), 1e-10), Err(Error::WrongClass(_))));
        let b = bessel_compact(0.3, 0.7).unwrap();
        assert_eq!(hadamard_phi(&b, Side::Plus, 2, c(0.0, 0.0), 1e-10), Err(Error::ZeroArgument));
        assert_eq!(charfn_reg(&b, c(0.0, 0.0), 1e-10).unwrap_err(), Error::ZeroArgument);
        let q = q_geometric(0.5, c(0.8, 0.0)).unwrap();
        assert!(matches!(hadamard_psi(&q, Side::Plus, 1, c(1.0, 0.0), 1e-10), Err(Error::WrongClass(_))));
        assert!(matches!(detp_finite(&q, 1, c(1.0, 0.0), 4), Err(Error::WrongClass(_))));
    }

    #[test]
    fn charfn_reg_examples() {
        let b = bessel_compact(0.3, 0.7).unwrap();
        let v = charfn_reg(&b, c(0.9, 0.0), 1e-12).unwrap().value;
        assert!((v - bessel_ft(0.3, c(0.9, 0.0))).norm() < 1e-7);
        let l = linear_free(1.0).unwrap();
        let v = charfn_reg(&l, c(2.5, 0.0), 1e-12).unwrap().value;
        assert!((v - sinpi(c(2.5, 0.0))).norm() < 1e-9);
        let q = q_geometric(0.5, c(0.8, 0.0)).unwrap();
        let z = c(1.3, 0.0);
        let v = charfn_reg(&q, z, 1e-12).unwrap().value;
        let qq = c(0.5, 0.0);
        let want = qpochhammer(z, qq, 1e-16).unwrap()
            * qpochhammer(qq / z, qq, 1e-16).unwrap()
            * qpochhammer(-0.64 / z, qq, 1e-16).unwrap();
        assert!((v - want).norm() < 1e-7);
    }

    #[test]
    fn linear_free_eigenvector() {
        let s = linear_free(1.0).unwrap();
        let z = c(2.0, 0.0);
        let f = solution_f_reg(&s, z, (-2, 6), 1e-13).unwrap();
        let v = eigvec_reg(&s, z, (-2, 6), 1e-13).unwrap();
        let j = |n: i64| bessel_j(c((n - 2) as f64, 0.0), c(2.0, 0.0), 1e-16).unwrap() * (-1f64).powi(n as i32);
        let (kf, kv) = (f.at(2) / j(2), v.at(2) / j(2));
        for n in -2..=6 {
            assert!((f.at(n) - kf * j(n)).norm() < 1e-7 * kf.norm(), "f n = {n}");
            assert!((v.at(n) - kv * j(n)).norm() < 1e-7 * kv.norm(), "v n = {n}");
        }
    }

    #[test]
    fn bessel_eigenvector() {
        let (alpha, beta) = (0.3, 0.7);
        let s = bessel_compact(alpha, beta).unwrap();
        let z = c(1.0 / (alpha + 1.0), 0.0);
        let v = eigvec_reg(&s, z, (-4, 8), 1e-13).unwrap();
        let want = |n: i64| {
            let x = c(2.0 * beta * (1.0 + alpha), 0.0);
            c(alpha + n as f64, 0.0).sqrt() * bessel_j(c((n - 1) as f64, 0.0), x, 1e-16).unwrap()
        };
        // principal √(α+n), the same branch w_n is built from
        let k = v.at(1) / want(1);
        for n in -4..=8 {
            assert!((v.at(n) - k * want(n)).norm() < 1e-6 * k.norm(), "n = {n}");
        }
    }

    #[test]
    fn q_f_tilde_series() {
        let s = q_geometric(0.5, c(0.8, 0.0)).unwrap();
        let z = c(2.0, 0.0);
        let qq = c(0.5, 0.0);
        let f = solution_f_reg(&s, z, (0, 0), 1e-14).unwrap().at(0);
        let b = qq / z;
        let want = qpochhammer(b, qq, 1e-16).unwrap() * phi01(b, qq, -qq * 0.64 / (z * z), 1e-16).unwrap();
        assert!((f - want).norm() < 1e-6 * want.norm().max(1.0));
    }

    #[test]
    fn wronskian_reg_is_f_tilde() {
        let q = q_geometric(0.5, c(0.8, 0.0)).unwrap();
        let z = c(0.7, 0.3);
        let f = charfn_reg(&q, z, 1e-13).unwrap().value;
        for n in [-4, 0, 3] {
            assert!((wronskian_reg(&q, z, n, 1e-13).unwrap() - f).norm() < 1e-10 * f.norm().max(1.0));
        }
    }

    #[test]
    fn sum_identity_linear_free() {
        let s = linear_free(1.0).unwrap();
        let r = eigvec_sum_identity_reg(&s, c(1.0, 0.0), 1e-13).unwrap();
        assert!(r.residual < 1e-7, "{r:?}");
        assert!(!r.possible_degenerate);
    }

    #[test]
    fn detp_single_factor() {
        let s = bessel_compact(0.3, 0.7).unwrap();
        let z = c(0.4, 0.1);
        let d = detp_finite(&s, 2, z, 0).unwrap();
        let u = z * s.lambda(0);
        let want = (1.0 - u) * u.exp();
        assert!((d.value - want).norm() < 1e-14 && (d.direct - want).norm() < 1e-14);
    }

    #[test]
    fn detp_identity_and_trace_form() {
        let s = bessel_compact(0.3, 0.7).unwrap();
        for p in 1..=3 {
            let d = detp_finite(&s, p, c(0.8, 0.3), 8).unwrap();
            assert!(d.identity_residual < 1e-12, "p = {p}: {d:?}");
            let t = d.trace_form.unwrap();
            if p <= 2 {
                assert!((t - d.value).norm() < 1e-12 * (1.0 + d.value.norm()));
            }
        }
        let l = linear_free(1.0).unwrap();
        let d = detp_finite(&l, 2, c(0.3, 0.2), 6).unwrap();
        assert!(d.identity_residual < 1e-12);
    }

    #[test]
    fn detp_converges_to_f_tilde() {
        let s = bessel_compact(0.3, 0.7).unwrap();
        let u = c(1.0 / 0.9, 0.0);
        let want = bessel_ft(0.3, c(0.9, 0.0));
        let errs: Vec<f64> =
            [8, 16, 32].iter().map(|&n| (detp_finite(&s, 2, u, n).unwrap().value - want).norm()).collect();
        // the dropped factors are 1 + O(1/n²), so the error is O(1/N)
        assert!(errs[0] > errs[1] && errs[1] > errs[2], "{errs:?}");
        for w in errs.windows(2) {
            let r = w[0] / w[1];
            assert!(r > 1.7 && r < 2.5, "{errs:?}");
        }
        // extrapolated in 1/N the finite sections reach F̃ itself
        let out = ladder::run(crate::sequence::TailKind::Algebraic, 32, LadderOpts::new(1e-12), |n| {
            Ok(vec![detp_finite(&s, 2, u, n).unwrap().value])
        })
        .unwrap();
        assert!((out.values[0] - want).norm() < 1e-6, "{:?} {want}", out.values[0]);
    }
}
