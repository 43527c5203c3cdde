//! Truncated Taylor arithmetic and the scalar abstraction shared by the
//! recurrences.
//!
//! A [`Jet`] holds `c_0..c_m` of an analytic function around a base point.
//! Everything that the engines compute is a rational function of `z` plus
//! exponentials, so running them on jets instead of plain complex numbers
//! yields derivatives exact to roundoff.

use num_complex::Complex64 as C;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

/// Highest supported jet order.
pub const MAX_ORDER: usize = 7;
const CAP: usize = MAX_ORDER + 1;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet {
    pub base: C,
    len: usize,
    c: [C; CAP],
}

impl Jet {
    /// Constant jet of the given order.
    pub fn constant(base: C, order: usize, v: C) -> Self {
        assert!(order <= MAX_ORDER, "jet order {order} above {MAX_ORDER}");
        let mut c = [C::new(0.0, 0.0); CAP];
        c[0] = v;
        Jet { base, len: order + 1, c }
    }

    /// The identity function `z` expanded at `base`.
    pub fn variable(base: C, order: usize) -> Self {
        let mut j = Jet::constant(base, order, base);
        if order >= 1 {
            j.c[1] = C::new(1.0, 0.0);
        }
        j
    }

    pub fn from_coeffs(base: C, coeffs: &[C]) -> Self {
        let mut j = Jet::constant(base, coeffs.len() - 1, C::new(0.0, 0.0));
        j.c[..coeffs.len()].copy_from_slice(coeffs);
        j
    }

    pub fn order(&self) -> usize {
        self.len - 1
    }

    pub fn coeffs(&self) -> &[C] {
        &self.c[..self.len]
    }

    pub fn coeff(&self, k: usize) -> C {
        if k < self.len {
            self.c[k]
        } else {
            C::new(0.0, 0.0)
        }
    }

    /// `k!·c_k`
    pub fn derivative(&self, k: usize) -> C {
        let mut f = 1.0;
        for i in 2..=k {
            f *= i as f64;
        }
        self.coeff(k) * f
    }

    /// Reciprocal; the constant term must be nonzero.
    pub fn recip(&self) -> Jet {
        let mut r = Jet::constant(self.base, self.order(), C::new(0.0, 0.0));
        let inv0 = self.c[0].inv();
        r.c[0] = inv0;
        for k in 1..self.len {
            let mut s = C::new(0.0, 0.0);
            for i in 1..=k {
                s += self.c[i] * r.c[k - i];
            }
            r.c[k] = -s * inv0;
        }
        r
    }

    pub fn exp(&self) -> Jet {
        // e' = a' e  =>  k e_k = sum_{i=1}^k i a_i e_{k-i}
        let mut r = Jet::constant(self.base, self.order(), self.c[0].exp());
        for k in 1..self.len {
            let mut s = C::new(0.0, 0.0);
            for i in 1..=k {
                s += self.c[i] * r.c[k - i] * (i as f64);
            }
            r.c[k] = s / (k as f64);
        }
        r
    }

    pub fn scale(&self, s: C) -> Jet {
        let mut r = *self;
        for v in r.c[..r.len].iter_mut() {
            *v *= s;
        }
        r
    }

    /// Divide by (z − base)^r, dropping the first r coefficients.
    pub fn shift_down(&self, r: usize) -> Jet {
        assert!(r < self.len, "shift by {r} empties a jet of order {}", self.len - 1);
        Jet::from_coeffs(self.base, &self.c[r..self.len])
    }

    /// Value of the truncated polynomial at `z`.
    pub fn eval_at(&self, z: C) -> C {
        let h = z - self.base;
        let mut acc = C::new(0.0, 0.0);
        for k in (0..self.len).rev() {
            acc = acc * h + self.c[k];
        }
        acc
    }

    fn zip(&self, o: &Jet, f: impl Fn(C, C) -> C) -> Jet {
        debug_assert_eq!(self.len, o.len, "jet order mismatch");
        let mut r = *self;
        for k in 0..self.len {
            r.c[k] = f(self.c[k], o.c[k]);
        }
        r
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        self.zip(&o, |a, b| a + b)
    }
}

impl AddAssign for Jet {
    fn add_assign(&mut self, o: Jet) {
        *self = *self + o;
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        self.zip(&o, |a, b| a - b)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(C::new(-1.0, 0.0))
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        debug_assert_eq!(self.len, o.len, "jet order mismatch");
        let mut r = Jet::constant(self.base, self.order(), C::new(0.0, 0.0));
        for k in 0..self.len {
            let mut s = C::new(0.0, 0.0);
            for i in 0..=k {
                s += self.c[i] * o.c[k - i];
            }
            r.c[k] = s;
        }
        r
    }
}

/// Arithmetic needed by the recurrences; implemented by `Complex64` and [`Jet`].
pub trait Scalar:
    Copy + Send + Sync + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
    /// A constant carrying the same shape (jet order, base point) as `self`.
    fn lift(&self, v: C) -> Self;
    fn value(&self) -> C;
    fn scale_c(&self, s: C) -> Self;
    fn recip(&self) -> Self;
    fn exp(&self) -> Self;
    /// Max modulus over coefficients.
    fn magnitude(&self) -> f64;

    fn zero_like(&self) -> Self {
        self.lift(C::new(0.0, 0.0))
    }
    fn one_like(&self) -> Self {
        self.lift(C::new(1.0, 0.0))
    }
}

impl Scalar for C {
    fn lift(&self, v: C) -> C {
        v
    }
    fn value(&self) -> C {
        *self
    }
    fn scale_c(&self, s: C) -> C {
        self * s
    }
    fn recip(&self) -> C {
        self.inv()
    }
    fn exp(&self) -> C {
        C::exp(*self)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

impl Scalar for Jet {
    fn lift(&self, v: C) -> Jet {
        Jet::constant(self.base, self.order(), v)
    }
    fn value(&self) -> C {
        self.c[0]
    }
    fn scale_c(&self, s: C) -> Jet {
        self.scale(s)
    }
    fn recip(&self) -> Jet {
        Jet::recip(self)
    }
    fn exp(&self) -> Jet {
        Jet::exp(self)
    }
    fn magnitude(&self) -> f64 {
        self.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}
