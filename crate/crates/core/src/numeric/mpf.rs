//! Thin arbitrary-precision real/complex layer over `astro-float`.
//!
//! All operations go through a [`Ctx`] holding the working precision in
//! bits, the rounding mode and the shared constants cache. `Ctx` is cheap
//! to create, so parallel code gives each worker its own.

use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use std::cell::RefCell;

use crate::rational::Rational;

pub type Real = BigFloat;

pub struct Ctx {
    pub prec: usize,
    pub rm: RoundingMode,
    consts: RefCell<Consts>,
}

impl Ctx {
    /// Working precision of roughly `digits` decimal digits plus guard bits.
    pub fn with_digits(digits: usize) -> Self {
        let bits = (digits as f64 * std::f64::consts::LOG2_10).ceil() as usize + 64;
        Ctx { prec: bits, rm: RoundingMode::ToEven, consts: RefCell::new(Consts::new().expect("constants cache")) }
    }

    pub fn from_f64(&self, v: f64) -> Real {
        BigFloat::from_f64(v, self.prec)
    }

    pub fn from_i64(&self, v: i64) -> Real {
        BigFloat::from_i64(v, self.prec)
    }

    pub fn from_rational(&self, r: &Rational) -> Real {
        let num = self.parse(&r.numer().to_string());
        let den = self.parse(&r.denom().to_string());
        num.div(&den, self.prec, self.rm)
    }

    pub fn parse(&self, s: &str) -> Real {
        let mut cc = self.consts.borrow_mut();
        BigFloat::parse(s, Radix::Dec, self.prec, self.rm, &mut cc)
    }

    pub fn pi(&self) -> Real {
        self.consts.borrow_mut().pi(self.prec, self.rm)
    }

    pub fn add(&self, a: &Real, b: &Real) -> Real {
        a.add(b, self.prec, self.rm)
    }

    pub fn sub(&self, a: &Real, b: &Real) -> Real {
        a.sub(b, self.prec, self.rm)
    }

    pub fn mul(&self, a: &Real, b: &Real) -> Real {
        a.mul(b, self.prec, self.rm)
    }

    pub fn div(&self, a: &Real, b: &Real) -> Real {
        a.div(b, self.prec, self.rm)
    }

    pub fn neg(&self, a: &Real) -> Real {
        a.neg()
    }

    pub fn abs(&self, a: &Real) -> Real {
        a.abs()
    }

    pub fn sqrt(&self, a: &Real) -> Real {
        a.sqrt(self.prec, self.rm)
    }

    pub fn exp(&self, a: &Real) -> Real {
        a.exp(self.prec, self.rm, &mut self.consts.borrow_mut())
    }

    pub fn ln(&self, a: &Real) -> Real {
        a.ln(self.prec, self.rm, &mut self.consts.borrow_mut())
    }

    pub fn sin(&self, a: &Real) -> Real {
        a.sin(self.prec, self.rm, &mut self.consts.borrow_mut())
    }

    pub fn cos(&self, a: &Real) -> Real {
        a.cos(self.prec, self.rm, &mut self.consts.borrow_mut())
    }

    pub fn atan(&self, a: &Real) -> Real {
        a.atan(self.prec, self.rm, &mut self.consts.borrow_mut())
    }

    /// Two-argument arctangent with the usual quadrant conventions.
    pub fn atan2(&self, y: &Real, x: &Real) -> Real {
        let pi = self.pi();
        if x.is_zero() {
            if y.is_zero() {
                return self.from_i64(0);
            }
            let half_pi = self.div(&pi, &self.from_i64(2));
            return if y.is_negative() { half_pi.neg() } else { half_pi };
        }
        let base = self.atan(&self.div(y, x));
        if x.is_negative() {
            if y.is_negative() {
                self.sub(&base, &pi)
            } else {
                self.add(&base, &pi)
            }
        } else {
            base
        }
    }

    pub fn powi(&self, a: &Real, n: usize) -> Real {
        a.powi(n, self.prec, self.rm)
    }

    pub fn to_string(&self, a: &Real) -> String {
        a.format(Radix::Dec, self.rm, &mut self.consts.borrow_mut())
            .unwrap_or_else(|_| "NaN".to_string())
    }

    pub fn to_f64(&self, a: &Real) -> f64 {
        self.to_string(a).parse().unwrap_or(f64::NAN)
    }

    /// `|a| < 10^-digits`, the working notion of "numerically zero".
    pub fn is_negligible(&self, a: &Real, digits: i64) -> bool {
        if a.is_zero() {
            return true;
        }
        let bound = self.powi(&self.from_f64(0.1), digits.unsigned_abs() as usize);
        a.abs() < bound
    }

    /// Decimal log of |a|, as f64 (for error-exponent fits and reports).
    pub fn log10_abs_f64(&self, a: &Real) -> f64 {
        if a.is_zero() {
            return f64::NEG_INFINITY;
        }
        let l = self.ln(&a.abs());
        self.to_f64(&l) / std::f64::consts::LN_10
    }

    /// Cheap decimal-log estimate from the binary exponent (one-bit accuracy,
    /// enough for decay diagnostics).
    pub fn approx_log10_abs(&self, a: &Real) -> f64 {
        if a.is_zero() {
            return f64::NEG_INFINITY;
        }
        match a.exponent() {
            Some(e) => e as f64 * std::f64::consts::LOG10_2,
            None => f64::NEG_INFINITY,
        }
    }

    /// Evaluate an exact rational series at a numeric point (Horner).
    pub fn eval_series(&self, series: &crate::series::PowerSeries, at: &Real) -> Real {
        let mut acc = self.from_i64(0);
        for c in series.coeffs().iter().rev() {
            acc = self.add(&self.mul(&acc, at), &self.from_rational(c));
        }
        acc
    }
}

/// Complex number over `Real`, with the plain (non-conjugating) bilinear
/// structure the non-Hermitean theory requires.
#[derive(Debug, Clone)]
pub struct Cpx {
    pub re: Real,
    pub im: Real,
}

impl Cpx {
    pub fn zero(ctx: &Ctx) -> Self {
        Cpx { re: ctx.from_i64(0), im: ctx.from_i64(0) }
    }

    pub fn real(ctx: &Ctx, re: Real) -> Self {
        Cpx { re, im: ctx.from_i64(0) }
    }

    pub fn new(re: Real, im: Real) -> Self {
        Cpx { re, im }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl Ctx {
    pub fn cadd(&self, a: &Cpx, b: &Cpx) -> Cpx {
        Cpx { re: self.add(&a.re, &b.re), im: self.add(&a.im, &b.im) }
    }

    pub fn csub(&self, a: &Cpx, b: &Cpx) -> Cpx {
        Cpx { re: self.sub(&a.re, &b.re), im: self.sub(&a.im, &b.im) }
    }

    pub fn cmul(&self, a: &Cpx, b: &Cpx) -> Cpx {
        Cpx {
            re: self.sub(&self.mul(&a.re, &b.re), &self.mul(&a.im, &b.im)),
            im: self.add(&self.mul(&a.re, &b.im), &self.mul(&a.im, &b.re)),
        }
    }

    pub fn cscale(&self, a: &Cpx, k: &Real) -> Cpx {
        Cpx { re: self.mul(&a.re, k), im: self.mul(&a.im, k) }
    }

    pub fn cneg(&self, a: &Cpx) -> Cpx {
        Cpx { re: a.re.neg(), im: a.im.neg() }
    }

    pub fn cdiv(&self, a: &Cpx, b: &Cpx) -> Cpx {
        let d = self.add(&self.mul(&b.re, &b.re), &self.mul(&b.im, &b.im));
        let num = self.cmul(a, &Cpx { re: b.re.clone(), im: b.im.neg() });
        Cpx { re: self.div(&num.re, &d), im: self.div(&num.im, &d) }
    }

    pub fn cabs(&self, a: &Cpx) -> Real {
        self.sqrt(&self.add(&self.mul(&a.re, &a.re), &self.mul(&a.im, &a.im)))
    }

    pub fn cexp(&self, a: &Cpx) -> Cpx {
        let m = self.exp(&a.re);
        Cpx { re: self.mul(&m, &self.cos(&a.im)), im: self.mul(&m, &self.sin(&a.im)) }
    }

    /// Principal branch logarithm.
    pub fn cln(&self, a: &Cpx) -> Cpx {
        Cpx { re: self.ln(&self.cabs(a)), im: self.atan2(&a.im, &a.re) }
    }
}
