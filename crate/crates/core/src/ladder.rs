//! Window-doubling with optional Richardson extrapolation.
//!
//! A quantity computed on the window of half-width N is evaluated at
//! N0, 2·N0, 4·N0, ... . For algebraic tails the error has an expansion in
//! powers of 1/N, which the Richardson table removes one order per level.

use crate::error::{Error, Result};
use crate::jet::Scalar;
use crate::sequence::TailKind;

#[derive(Clone, Copy, Debug)]
pub struct LadderOpts {
    /// Target error relative to the local magnitude scale.
    pub tol: f64,
    pub max_levels: usize,
    pub min_levels: usize,
}

impl LadderOpts {
    pub fn new(tol: f64) -> Self {
        LadderOpts { tol, max_levels: 12, min_levels: 3 }
    }
}

#[derive(Clone, Debug)]
pub struct LadderOut<S> {
    pub values: Vec<S>,
    /// Estimated absolute error (max over components).
    pub err: f64,
    /// Magnitude scale the error was measured against.
    pub scale: f64,
    /// Largest half-width used.
    pub n: usize,
    pub converged: bool,
}

impl<S> LadderOut<S> {
    pub fn require(self) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::Budget { n: self.n, estimate: self.err })
        }
    }
}

fn max_diff<S: Scalar>(a: &[S], b: &[S]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (*x - *y).magnitude()).fold(0.0, f64::max)
}

fn max_mag<S: Scalar>(a: &[S]) -> f64 {
    a.iter().map(|x| x.magnitude()).fold(0.0, f64::max)
}

/// Run `eval(N)` on the doubling schedule starting at `n0` until the
/// extrapolated values settle.
pub fn run<S: Scalar>(
    kind: TailKind,
    n0: usize,
    opts: LadderOpts,
    mut eval: impl FnMut(usize) -> Result<Vec<S>>,
) -> Result<LadderOut<S>> {
    run_with_floor(kind, n0, opts, |n| Ok((eval(n)?, 0.0)))
}

/// As [`run`], with `eval` also returning an absolute roundoff floor for its
/// level. Differences below 16× the floor count as settled, since the
/// extrapolation cannot resolve anything finer.
pub fn run_with_floor<S: Scalar>(
    kind: TailKind,
    n0: usize,
    opts: LadderOpts,
    mut eval: impl FnMut(usize) -> Result<(Vec<S>, f64)>,
) -> Result<LadderOut<S>> {
    // rows[j][m] is the m-th Richardson column at level j
    let mut rows: Vec<Vec<Vec<S>>> = Vec::new();
    let mut scale = 0.0f64;
    let mut best: Option<(Vec<S>, f64)> = None;
    let mut n = n0;
    let mut floor = 0.0f64;
    for level in 0..opts.max_levels {
        let (raw, fl) = eval(n)?;
        floor = floor.max(fl);
        scale = scale.max(max_mag(&raw));
        let mut row = vec![raw];
        if kind == TailKind::Algebraic {
            for m in 1..=level {
                let f = 1.0 / ((1u64 << m) as f64 - 1.0);
                let prev = &rows[level - 1][m - 1];
                let cur = &row[m - 1];
                let next: Vec<S> = cur
                    .iter()
                    .zip(prev)
                    .map(|(a, b)| *a + (*a - *b).scale_c(num_complex::Complex64::new(f, 0.0)))
                    .collect();
                row.push(next);
            }
        }
        if level > 0 {
            let cur = row.last().unwrap();
            let prev = rows[level - 1].last().unwrap();
            let err = max_diff(cur, prev);
            let better = best.as_ref().map_or(true, |b| err <= b.1);
            if better {
                best = Some((cur.clone(), err));
            }
            let scale_now = scale.max(max_mag(cur)).max(f64::MIN_POSITIVE);
            if level + 1 >= opts.min_levels && err <= (opts.tol * scale_now).max(16.0 * floor) {
                return Ok(LadderOut { values: cur.clone(), err, scale: scale_now, n, converged: true });
            }
        }
        rows.push(row);
        n *= 2;
    }
    let (values, err) = best.expect("ladder needs at least two levels");
    Ok(LadderOut { values, err, scale, n: n / 2, converged: false })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64 as C;

    #[test]
    fn removes_power_series_error() {
        // f(N) = 1 + 3/N − 2/N² + 0.5/N³
        let out = run(TailKind::Algebraic, 8, LadderOpts::new(1e-14), |n| {
            let x = 1.0 / n as f64;
            Ok(vec![C::new(1.0 + 3.0 * x - 2.0 * x * x + 0.5 * x * x * x, 0.0)])
        })
        .unwrap();
        assert!(out.converged);
        assert!((out.values[0] - C::new(1.0, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn geometric_plain_doubling() {
        let out = run(TailKind::Geometric, 8, LadderOpts::new(1e-14), |n| {
            Ok(vec![C::new(2.0 + 0.5f64.powi(n as i32), 0.0)])
        })
        .unwrap();
        assert!(out.converged);
        assert!((out.values[0].re - 2.0).abs() < 1e-14);
    }

    #[test]
    fn floor_stops_noise_chasing() {
        // alternating noise of size 1e-12 never settles below tol alone
        let out = run_with_floor(TailKind::Geometric, 8, LadderOpts::new(1e-15), |n| {
            let noise = if (n / 8).trailing_zeros() % 2 == 0 { 1e-12 } else { -1e-12 };
            Ok((vec![C::new(1.0 + noise, 0.0)], 1e-12))
        })
        .unwrap();
        assert!(out.converged);
    }

    #[test]
    fn budget_reported() {
        let out = run(TailKind::Geometric, 8, LadderOpts { tol: 1e-14, max_levels: 3, min_levels: 2 }, |n| {
            Ok(vec![C::new(1.0 / n as f64, 0.0)])
        })
        .unwrap();
        assert!(!out.converged);
        assert!(matches!(out.require(), Err(Error::Budget { .. })));
    }
}
