//! Truncated formal power series over exact rationals.
//!
//! A `PowerSeries` stores the coefficients of degrees `0..=order` in a single
//! variable. Arithmetic between two series truncates to the minimum of their
//! orders, so precision is propagated pessimistically and never silently
//! invented. All coefficients are exact `BigRational`s; there is no floating
//! point anywhere in this module.

use serde::de::Error as DeError;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::rational::{nth_root_exact, rat_from_string, rat_i, rat_to_string, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SeriesError {
    #[error("cannot {op} series in variables `{left}` and `{right}`")]
    VariableMismatch { op: &'static str, left: String, right: String },
    #[error("division by a series with zero constant term")]
    DivisionByNonUnit,
    #[error("log requires constant term 1, found {found}")]
    LogConstantTerm { found: String },
    #[error("exp requires constant term 0, found {found}")]
    ExpConstantTerm { found: String },
    #[error("pow({exponent}) needs an exact root of the constant term {constant}, which does not exist")]
    PowConstantRoot { exponent: String, constant: String },
    #[error("implicit solve: F({seed}, 0) = {value} is not a root")]
    ImplicitNotARoot { seed: String, value: String },
    #[error("implicit solve: degenerate root, dF/dz({seed}, 0) = 0")]
    ImplicitDegenerateRoot { seed: String },
}

/// Truncated power series: coefficient of degree `d` at index `d`,
/// exact through degree `order`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PowerSeries {
    var: String,
    coeffs: Vec<Rational>,
}

impl PowerSeries {
    /// Zero series in `var` through degree `order`.
    pub fn zero(var: &str, order: usize) -> Self {
        PowerSeries {
            var: var.to_string(),
            coeffs: vec![Rational::zero(); order + 1],
        }
    }

    /// Constant series.
    pub fn constant(var: &str, value: Rational, order: usize) -> Self {
        let mut s = Self::zero(var, order);
        s.coeffs[0] = value;
        s
    }

    pub fn one(var: &str, order: usize) -> Self {
        Self::constant(var, Rational::one(), order)
    }

    /// `c * var^degree`.
    pub fn monomial(var: &str, c: Rational, degree: usize, order: usize) -> Self {
        let mut s = Self::zero(var, order);
        if degree <= order {
            s.coeffs[degree] = c;
        }
        s
    }

    /// The identity series `var`.
    pub fn x(var: &str, order: usize) -> Self {
        Self::monomial(var, Rational::one(), 1, order)
    }

    pub fn from_coeffs(var: &str, coeffs: Vec<Rational>) -> Self {
        assert!(!coeffs.is_empty(), "a series stores at least the constant term");
        PowerSeries { var: var.to_string(), coeffs }
    }

    pub fn var(&self) -> &str {
        &self.var
    }

    /// Truncation order: coefficients are exact for degrees `0..=order()`.
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficient of degree `d` (zero beyond the stored range is *not*
    /// assumed: asking past the truncation order is a caller bug).
    pub fn coeff(&self, d: usize) -> &Rational {
        assert!(
            d < self.coeffs.len(),
            "coefficient of degree {d} requested from a series truncated at order {}",
            self.order()
        );
        &self.coeffs[d]
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn set_coeff(&mut self, d: usize, value: Rational) {
        assert!(d < self.coeffs.len());
        self.coeffs[d] = value;
    }

    /// Lowest nonzero degree, or `None` for the (truncated) zero series.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn is_zero(&self) -> bool {
        self.valuation().is_none()
    }

    /// Re-truncate to `order` (shrinking keeps a prefix; growing pads with
    /// zeros, which asserts that the caller knows the tail vanishes).
    pub fn truncate(&self, order: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(order + 1, Rational::zero());
        PowerSeries { var: self.var.clone(), coeffs }
    }

    fn check_var(&self, other: &Self, op: &'static str) -> Result<(), SeriesError> {
        if self.var != other.var {
            return Err(SeriesError::VariableMismatch {
                op,
                left: self.var.clone(),
                right: other.var.clone(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_var(other, "add").unwrap();
        let n = self.order().min(other.order());
        let coeffs = (0..=n).map(|d| &self.coeffs[d] + &other.coeffs[d]).collect();
        PowerSeries { var: self.var.clone(), coeffs }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.check_var(other, "sub").unwrap();
        let n = self.order().min(other.order());
        let coeffs = (0..=n).map(|d| &self.coeffs[d] - &other.coeffs[d]).collect();
        PowerSeries { var: self.var.clone(), coeffs }
    }

    pub fn neg(&self) -> Self {
        let coeffs = self.coeffs.iter().map(|c| -c).collect();
        PowerSeries { var: self.var.clone(), coeffs }
    }

    pub fn scale(&self, k: &Rational) -> Self {
        let coeffs = self.coeffs.iter().map(|c| c * k).collect();
        PowerSeries { var: self.var.clone(), coeffs }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check_var(other, "mul").unwrap();
        let n = self.order().min(other.order());
        let mut coeffs = vec![Rational::zero(); n + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(n + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(n + 1 - i) {
                if !b.is_zero() {
                    coeffs[i + j] += a * b;
                }
            }
        }
        PowerSeries { var: self.var.clone(), coeffs }
    }

    /// Multiply by the monomial `var^k`, keeping the truncation order.
    /// The top `k` coefficients fall off the end.
    pub fn shift_up(&self, k: usize) -> Self {
        let n = self.order();
        let mut coeffs = vec![Rational::zero(); n + 1];
        let keep = n + 1 - k.min(n + 1);
        coeffs[k.min(n + 1)..].clone_from_slice(&self.coeffs[..keep]);
        PowerSeries { var: self.var.clone(), coeffs }
    }

    /// `self / other`; `other` must have a nonzero constant term.
    pub fn div(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check_var(other, "div")?;
        if other.coeffs[0].is_zero() {
            return Err(SeriesError::DivisionByNonUnit);
        }
        let n = self.order().min(other.order());
        let inv_b0 = Rational::one() / &other.coeffs[0];
        let mut coeffs = vec![Rational::zero(); n + 1];
        for d in 0..=n {
            let mut acc = self.coeffs[d].clone();
            for k in 1..=d {
                if !other.coeffs[k].is_zero() {
                    acc -= &other.coeffs[k] * &coeffs[d - k];
                }
            }
            coeffs[d] = acc * &inv_b0;
        }
        Ok(PowerSeries { var: self.var.clone(), coeffs })
    }

    pub fn inverse(&self) -> Result<Self, SeriesError> {
        Self::one(&self.var, self.order()).div(self)
    }

    /// Derivative; the truncation order drops by one.
    pub fn derivative(&self) -> Self {
        if self.order() == 0 {
            return Self::zero(&self.var, 0);
        }
        let coeffs = (1..=self.order())
            .map(|d| &self.coeffs[d] * rat_i(d as i64))
            .collect();
        PowerSeries { var: self.var.clone(), coeffs }
    }

    /// Antiderivative with integration constant 0; order grows by one.
    pub fn antiderivative(&self) -> Self {
        let mut coeffs = vec![Rational::zero(); self.order() + 2];
        for d in 0..=self.order() {
            coeffs[d + 1] = &self.coeffs[d] / rat_i((d + 1) as i64);
        }
        PowerSeries { var: self.var.clone(), coeffs }
    }

    /// `log(self)`; requires constant term exactly 1.
    ///
    /// Computed from `(log a)' = a'/a`, which keeps every coefficient exact
    /// through the truncation order.
    pub fn log(&self) -> Result<Self, SeriesError> {
        if !self.coeffs[0].is_one() {
            return Err(SeriesError::LogConstantTerm { found: rat_to_string(&self.coeffs[0]) });
        }
        let n = self.order();
        // log' = a'/a, with the quotient computed to order n-1 and integrated.
        let deriv = self.derivative();
        let quotient = deriv.div(&self.truncate(n.saturating_sub(1)))?;
        Ok(quotient.antiderivative().truncate(n))
    }

    /// `exp(self)`; requires constant term exactly 0.
    pub fn exp(&self) -> Result<Self, SeriesError> {
        if !self.coeffs[0].is_zero() {
            return Err(SeriesError::ExpConstantTerm { found: rat_to_string(&self.coeffs[0]) });
        }
        let n = self.order();
        // e' = a' e, solved coefficient by coefficient.
        let mut coeffs = vec![Rational::zero(); n + 1];
        coeffs[0] = Rational::one();
        for d in 1..=n {
            // d*e_d = sum_{k=1}^{d} k*a_k*e_{d-k}
            let mut acc = Rational::zero();
            for k in 1..=d {
                if !self.coeffs[k].is_zero() {
                    acc += &self.coeffs[k] * rat_i(k as i64) * &coeffs[d - k];
                }
            }
            coeffs[d] = acc / rat_i(d as i64);
        }
        Ok(PowerSeries { var: self.var.clone(), coeffs })
    }

    /// `self^alpha` for a rational exponent.
    ///
    /// The constant term must admit an exact rational `alpha`-th power
    /// (always true for constant term 1).
    pub fn pow(&self, alpha: &Rational) -> Result<Self, SeriesError> {
        let c0 = &self.coeffs[0];
        if c0.is_zero() {
            return Err(SeriesError::PowConstantRoot {
                exponent: rat_to_string(alpha),
                constant: "0".to_string(),
            });
        }
        let b = alpha
            .denom()
            .try_into()
            .ok()
            .filter(|b: &u64| *b >= 1)
            .ok_or_else(|| SeriesError::PowConstantRoot {
                exponent: rat_to_string(alpha),
                constant: rat_to_string(c0),
            })?;
        let root = nth_root_exact(c0, b).ok_or_else(|| SeriesError::PowConstantRoot {
            exponent: rat_to_string(alpha),
            constant: rat_to_string(c0),
        })?;
        let a: i64 = alpha
            .numer()
            .try_into()
            .map_err(|_| SeriesError::PowConstantRoot {
                exponent: rat_to_string(alpha),
                constant: rat_to_string(c0),
            })?;
        let c0_alpha = if a >= 0 {
            root.pow(a as i32)
        } else {
            Rational::one() / root.pow((-a) as i32)
        };

        // Normalize to constant term 1 and use p' = alpha a' p / a.
        let n = self.order();
        let unit = self.scale(&(Rational::one() / c0));
        let mut coeffs = vec![Rational::zero(); n + 1];
        coeffs[0] = Rational::one();
        for d in 1..=n {
            // d*p_d = sum_{k=1}^{d} (alpha*k - (d-k)) a_k p_{d-k}  (for unit a)
            let mut acc = Rational::zero();
            for k in 1..=d {
                if unit.coeffs[k].is_zero() {
                    continue;
                }
                let factor = alpha * rat_i(k as i64) - rat_i((d - k) as i64);
                acc += factor * &unit.coeffs[k] * &coeffs[d - k];
            }
            coeffs[d] = acc / rat_i(d as i64);
        }
        Ok(PowerSeries { var: self.var.clone(), coeffs }.scale(&c0_alpha))
    }

    /// Evaluate at a rational point by Horner's rule (exact).
    pub fn eval(&self, at: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * at + c;
        }
        acc
    }

    /// Evaluate at an `f64` point (for quick diagnostics only).
    pub fn eval_f64(&self, at: f64) -> f64 {
        let mut acc = 0.0f64;
        for c in self.coeffs.iter().rev() {
            let num: f64 = c.numer().to_string().parse().unwrap_or(f64::NAN);
            let den: f64 = c.denom().to_string().parse().unwrap_or(f64::NAN);
            acc = acc * at + num / den;
        }
        acc
    }

    /// True if every odd-degree coefficient vanishes.
    pub fn is_even(&self) -> bool {
        self.coeffs.iter().skip(1).step_by(2).all(|c| c.is_zero())
    }

    /// True if every even-degree coefficient vanishes.
    pub fn is_odd(&self) -> bool {
        self.coeffs.iter().step_by(2).all(|c| c.is_zero())
    }
}

impl fmt::Display for PowerSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (d, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mag = rat_to_string(&c.abs());
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else {
                write!(f, " {} ", sign)?;
            }
            match d {
                0 => write!(f, "{mag}")?,
                1 => write!(f, "{mag}*{}", self.var)?,
                _ => write!(f, "{mag}*{}^{d}", self.var)?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O({}^{})", self.var, self.order() + 1)
    }
}

impl Serialize for PowerSeries {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Wire<'a> {
            var: &'a str,
            order: usize,
            coeffs: Vec<String>,
        }
        Wire {
            var: &self.var,
            order: self.order(),
            coeffs: self.coeffs.iter().map(rat_to_string).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PowerSeries {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Wire {
            var: String,
            order: usize,
            coeffs: Vec<String>,
        }
        let w = Wire::deserialize(deserializer)?;
        if w.coeffs.len() != w.order + 1 {
            return Err(D::Error::custom(format!(
                "series of order {} must carry {} coefficients, found {}",
                w.order,
                w.order + 1,
                w.coeffs.len()
            )));
        }
        let coeffs = w
            .coeffs
            .iter()
            .map(|s| rat_from_string(s).ok_or_else(|| D::Error::custom(format!("bad rational `{s}`"))))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(PowerSeries { var: w.var, coeffs })
    }
}

/// Polynomial in `z` whose coefficients are rational polynomials in the
/// series variable, used as the defining relation for `implicit_solve`.
#[derive(Debug, Clone)]
pub struct BivariatePoly {
    var: String,
    /// `z_coeffs[i]` = coefficient of `z^i`, a polynomial in the series variable.
    z_coeffs: Vec<Vec<Rational>>,
}

impl BivariatePoly {
    /// Build from rows `z_coeffs[i][j]` = coefficient of `z^i s^j`.
    pub fn new(var: &str, z_coeffs: Vec<Vec<Rational>>) -> Self {
        assert!(!z_coeffs.is_empty());
        BivariatePoly { var: var.to_string(), z_coeffs }
    }

    pub fn z_degree(&self) -> usize {
        self.z_coeffs.len() - 1
    }

    /// Partial derivative in `z`.
    pub fn d_dz(&self) -> Self {
        if self.z_coeffs.len() == 1 {
            return BivariatePoly { var: self.var.clone(), z_coeffs: vec![vec![Rational::zero()]] };
        }
        let z_coeffs = self
            .z_coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, row)| row.iter().map(|c| c * rat_i(i as i64)).collect())
            .collect();
        BivariatePoly { var: self.var.clone(), z_coeffs }
    }

    fn coeff_series(&self, i: usize, order: usize) -> PowerSeries {
        let mut coeffs = self.z_coeffs[i].clone();
        coeffs.resize(order + 1, Rational::zero());
        coeffs.truncate(order + 1);
        PowerSeries::from_coeffs(&self.var, coeffs)
    }

    /// Evaluate at a series `z(s)` by Horner's rule in `z`.
    pub fn eval_series(&self, z: &PowerSeries) -> PowerSeries {
        let order = z.order();
        let mut acc = self.coeff_series(self.z_degree(), order);
        for i in (0..self.z_degree()).rev() {
            acc = acc.mul(z).add(&self.coeff_series(i, order));
        }
        acc
    }

    /// Evaluate at a rational pair `(z, s)`.
    pub fn eval_point(&self, z: &Rational, s: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for row in self.z_coeffs.iter().rev() {
            let mut row_val = Rational::zero();
            for c in row.iter().rev() {
                row_val = row_val * s + c;
            }
            acc = acc * z + row_val;
        }
        acc
    }
}

/// Solve `F(z(s), s) = 0` for the unique series branch with `z(0) = z_init`,
/// by Newton iteration on series (the number of correct coefficients doubles
/// each step).
pub fn implicit_solve(
    f: &BivariatePoly,
    z_init: &Rational,
    order: usize,
) -> Result<PowerSeries, SeriesError> {
    let zero = Rational::zero();
    let at_seed = f.eval_point(z_init, &zero);
    if !at_seed.is_zero() {
        return Err(SeriesError::ImplicitNotARoot {
            seed: rat_to_string(z_init),
            value: rat_to_string(&at_seed),
        });
    }
    let fz = f.d_dz();
    if fz.eval_point(z_init, &zero).is_zero() {
        return Err(SeriesError::ImplicitDegenerateRoot { seed: rat_to_string(z_init) });
    }

    let mut z = PowerSeries::constant(&f.var, z_init.clone(), 0);
    let mut correct = 0usize; // coefficients exact through this degree
    while correct < order {
        let target = (2 * correct + 1).min(order);
        let zt = z.truncate(target);
        let num = f.eval_series(&zt);
        let den = fz.eval_series(&zt);
        z = zt.sub(&num.div(&den)?);
        correct = target;
    }
    Ok(z)
}
