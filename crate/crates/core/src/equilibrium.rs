//! Leading-order equilibrium data for the cubic weight.
//!
//! Everything flows from the two generators of the endpoint ideal
//!
//! ```text
//!     3 t u0^2 + u0 + 6 t z0          = 0
//!     -6 t z0 u0 + (1 - z0)           = 0
//! ```
//!
//! whose eliminants are `18 t^2 u0^3 + 9 t u0^2 + u0 + 6 t = 0` for `u0`
//! and the resultant `1 = z0^2 - 72 t^2 z0^3` for `z0`. The support of the
//! equilibrium measure is `[A, B] = [u0 - 2 sqrt(z0), u0 + 2 sqrt(z0)]`.
//!
//! The series half works over exact rationals (with `s` standing for the
//! coupling `t3`); the numeric half runs at extended precision and exists
//! to feed the downstream validation of the asymptotic expansions.

use serde::Serialize;

use crate::numeric::mpf::{Ctx, Real};
use crate::rational::{rat_i, Rational};
use crate::series::{implicit_solve, BivariatePoly, PowerSeries, SeriesError};

#[derive(Debug, thiserror::Error)]
pub enum EquilibriumError {
    #[error("|t3| = {t3} is at or beyond the branch collision at s_c = {s_c}")]
    BeyondCritical { t3: f64, s_c: f64 },
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// `F(z, s) = z^2 - 72 s^2 z^3 - 1`: the resultant eliminating `u0`.
pub fn z0_resultant() -> BivariatePoly {
    BivariatePoly::new(
        "s",
        vec![
            vec![rat_i(-1)],
            vec![],
            vec![rat_i(1)],
            vec![rat_i(0), rat_i(0), rat_i(-72)],
        ],
    )
}

/// `F(u, s) = 18 s^2 u^3 + 9 s u^2 + u + 6 s`: the eliminant for `u0`.
pub fn u0_eliminant() -> BivariatePoly {
    BivariatePoly::new(
        "s",
        vec![
            vec![rat_i(0), rat_i(6)],
            vec![rat_i(1)],
            vec![rat_i(0), rat_i(9)],
            vec![rat_i(0), rat_i(0), rat_i(18)],
        ],
    )
}

/// The equilibrium branch through `(u0, z0)(0) = (0, 1)` as exact series
/// in the coupling, to the requested order.
pub fn equilibrium_series(order: usize) -> Result<(PowerSeries, PowerSeries), EquilibriumError> {
    let u0 = implicit_solve(&u0_eliminant(), &rat_i(0), order)?;
    let z0 = implicit_solve(&z0_resultant(), &rat_i(1), order)?;
    Ok((u0, z0))
}

/// Residuals of the two ideal generators; both vanish identically on the
/// equilibrium branch.
pub fn ideal_residuals(u0: &PowerSeries, z0: &PowerSeries) -> (PowerSeries, PowerSeries) {
    let order = u0.order().min(z0.order());
    let u0 = u0.truncate(order);
    let z0 = z0.truncate(order);
    let s = PowerSeries::x("s", order);
    let three_s = s.scale(&rat_i(3));
    let six_s = s.scale(&rat_i(6));
    // 3 s u0^2 + u0 + 6 s z0
    let r1 = three_s.mul(&u0.mul(&u0)).add(&u0).add(&six_s.mul(&z0));
    // -6 s z0 u0 + 1 - z0
    let r2 = PowerSeries::one("s", order)
        .sub(&z0)
        .sub(&six_s.mul(&z0).mul(&u0));
    (r1, r2)
}

/// Residuals of the two endpoint conditions in their algebraic form:
/// `u0 + 3t(u0^2 + 2 z0)` and `u0^2 + 2 z0 + 3t(u0^3 + 6 u0 z0) - 2`.
pub fn endpoint_residuals_series(u0: &PowerSeries, z0: &PowerSeries) -> (PowerSeries, PowerSeries) {
    let order = u0.order().min(z0.order());
    let u0 = u0.truncate(order);
    let z0 = z0.truncate(order);
    let s = PowerSeries::x("s", order);
    let three_s = s.scale(&rat_i(3));
    let u0_sq = u0.mul(&u0);
    let two_z0 = z0.scale(&rat_i(2));
    let r1 = u0.add(&three_s.mul(&u0_sq.add(&two_z0)));
    let r2 = u0_sq
        .add(&two_z0)
        .add(&three_s.mul(&u0_sq.mul(&u0).add(&u0.mul(&z0).scale(&rat_i(6)))))
        .sub(&PowerSeries::constant("s", rat_i(2), order));
    (r1, r2)
}

/// Numeric equilibrium data at a fixed coupling.
#[derive(Debug)]
pub struct EquilibriumData {
    pub t3: Real,
    pub u0: Real,
    pub z0: Real,
    /// Left endpoint `A = u0 - 2 sqrt(z0)`.
    pub a: Real,
    /// Right endpoint `B = u0 + 2 sqrt(z0)`.
    pub b: Real,
}

/// JSON projection of [`EquilibriumData`] (decimal strings).
#[derive(Debug, Serialize)]
pub struct EquilibriumDataJson {
    pub t3: String,
    pub u0: String,
    pub z0: String,
    pub a: String,
    pub b: String,
}

impl EquilibriumData {
    pub fn to_json(&self, ctx: &Ctx) -> EquilibriumDataJson {
        EquilibriumDataJson {
            t3: ctx.to_string(&self.t3),
            u0: ctx.to_string(&self.u0),
            z0: ctx.to_string(&self.z0),
            a: ctx.to_string(&self.a),
            b: ctx.to_string(&self.b),
        }
    }
}

/// The critical coupling `s_c`: the positive zero of the discriminant of
/// the resultant cubic `-72 t^2 z^3 + z^2 - 1` in `z`.
///
/// With cubic coefficients `(a, b, c, d) = (-72 t^2, 1, 0, -1)` the
/// standard discriminant `18abcd - 4b^3d + b^2c^2 - 4ac^3 - 27a^2d^2`
/// collapses to `4 - 27 * 72^2 * t^4`, so `s_c = (4 / 139968)^(1/4)`.
pub fn critical_coupling(ctx: &Ctx) -> Real {
    let const_term = ctx.from_i64(4); // -4 b^3 d
    let quartic = ctx.from_i64(27 * 72 * 72); // -27 a^2 d^2 = -(this) t^4
    let ratio = ctx.div(&const_term, &quartic);
    ctx.sqrt(&ctx.sqrt(&ratio))
}

/// Solve the equilibrium branch numerically at `t3` (Newton continuation
/// from the Gaussian point `z0 = 1`).
pub fn equilibrium_numeric(ctx: &Ctx, t3: f64) -> Result<EquilibriumData, EquilibriumError> {
    let s_c = critical_coupling(ctx);
    if ctx.from_f64(t3.abs()) >= s_c {
        return Err(EquilibriumError::BeyondCritical { t3, s_c: ctx.to_f64(&s_c) });
    }

    let t = ctx.from_f64(t3);
    let mut z = ctx.from_i64(1);
    let steps = 48;
    for k in 1..=steps {
        let tk = ctx.mul(&t, &ctx.div(&ctx.from_i64(k), &ctx.from_i64(steps)));
        let tk_sq = ctx.mul(&tk, &tk);
        // Newton on g(z) = z^2 - 72 t^2 z^3 - 1
        for _ in 0..64 {
            let z_sq = ctx.mul(&z, &z);
            let z_cb = ctx.mul(&z_sq, &z);
            let g = ctx.sub(
                &ctx.sub(&z_sq, &ctx.mul(&ctx.mul(&ctx.from_i64(72), &tk_sq), &z_cb)),
                &ctx.from_i64(1),
            );
            let gp = ctx.sub(
                &ctx.mul(&ctx.from_i64(2), &z),
                &ctx.mul(&ctx.mul(&ctx.from_i64(216), &tk_sq), &z_sq),
            );
            let step = ctx.div(&g, &gp);
            z = ctx.sub(&z, &step);
            if ctx.is_negligible(&step, (ctx.prec as f64 * 0.3) as i64) {
                break;
            }
        }
    }

    // u0 from the second ideal generator: u0 = (1 - z0) / (6 t z0).
    let u0 = if t3 == 0.0 {
        ctx.from_i64(0)
    } else {
        let num = ctx.sub(&ctx.from_i64(1), &z);
        let den = ctx.mul(&ctx.mul(&ctx.from_i64(6), &t), &z);
        ctx.div(&num, &den)
    };
    let root = ctx.mul(&ctx.from_i64(2), &ctx.sqrt(&z));
    Ok(EquilibriumData {
        t3: t,
        a: ctx.sub(&u0, &root),
        b: ctx.add(&u0, &root),
        u0,
        z0: z,
    })
}

/// One sample of the equilibrium density
/// `(1/2π)(1 + 3 t3 (λ + u0)) sqrt((λ - A)(B - λ))` on `[A, B]`, 0 outside.
#[derive(Debug)]
pub struct DensitySample {
    pub lambda: Real,
    pub value: Real,
}

pub fn equilibrium_density(ctx: &Ctx, data: &EquilibriumData, lambda: &Real) -> DensitySample {
    if lambda < &data.a || lambda > &data.b {
        return DensitySample { lambda: lambda.clone(), value: ctx.from_i64(0) };
    }
    let value = density_linear_factor(ctx, data, lambda);
    let radicand = ctx.mul(&ctx.sub(lambda, &data.a), &ctx.sub(&data.b, lambda));
    let value = ctx.mul(&value, &ctx.sqrt(&radicand));
    let two_pi = ctx.mul(&ctx.from_i64(2), &ctx.pi());
    DensitySample { lambda: lambda.clone(), value: ctx.div(&value, &two_pi) }
}

/// The linear factor `1 + 3 t3 (λ + u0)`; the density is non-negative on
/// the support exactly when this stays non-negative there.
pub fn density_linear_factor(ctx: &Ctx, data: &EquilibriumData, lambda: &Real) -> Real {
    let shifted = ctx.add(lambda, &data.u0);
    ctx.add(
        &ctx.from_i64(1),
        &ctx.mul(&ctx.mul(&ctx.from_i64(3), &data.t3), &shifted),
    )
}

/// Total mass of the equilibrium density by Gauss-Legendre quadrature in
/// the angle variable `λ = (A+B)/2 + ((B-A)/2) cos θ` (which absorbs the
/// square-root endpoint vanishing).
pub fn density_mass(ctx: &Ctx, data: &EquilibriumData, nodes: usize) -> Real {
    let half_width = ctx.div(&ctx.sub(&data.b, &data.a), &ctx.from_i64(2));
    let center = ctx.div(&ctx.add(&data.b, &data.a), &ctx.from_i64(2));
    let half_width_sq = ctx.mul(&half_width, &half_width);
    let two_pi = ctx.mul(&ctx.from_i64(2), &ctx.pi());
    let half_pi = ctx.div(&ctx.pi(), &ctx.from_i64(2));

    // θ = (π/2)(x + 1) maps [-1, 1] to [0, π]
    let mut mass = ctx.from_i64(0);
    for (x, w) in crate::numeric::quadrature::gauss_legendre(ctx, nodes) {
        let theta = ctx.mul(&half_pi, &ctx.add(&x, &ctx.from_i64(1)));
        let cos_t = ctx.cos(&theta);
        let sin_t = ctx.sin(&theta);
        let lambda = ctx.add(&center, &ctx.mul(&half_width, &cos_t));
        let linear = density_linear_factor(ctx, data, &lambda);
        let integrand = ctx.mul(&ctx.mul(&linear, &half_width_sq), &ctx.mul(&sin_t, &sin_t));
        mass = ctx.add(&mass, &ctx.mul(&w, &integrand));
    }
    // the θ-substitution contributes dλ = -hw sinθ dθ (orientation flipped),
    // the map x -> θ contributes π/2, and the density carries 1/2π
    ctx.div(&ctx.mul(&mass, &half_pi), &two_pi)
}

/// Residuals of the two endpoint conditions at numeric data:
/// `u0 + 3t(u0^2 + 2 z0)` and `u0^2 + 2 z0 + 3t(u0^3 + 6 u0 z0) - 2`.
pub fn endpoint_moment_check(ctx: &Ctx, data: &EquilibriumData) -> (Real, Real) {
    let u = &data.u0;
    let z = &data.z0;
    let t = &data.t3;
    let three_t = ctx.mul(&ctx.from_i64(3), t);
    let u_sq = ctx.mul(u, u);
    let two_z = ctx.mul(&ctx.from_i64(2), z);
    let r1 = ctx.add(u, &ctx.mul(&three_t, &ctx.add(&u_sq, &two_z)));
    let inner = ctx.add(&ctx.mul(&u_sq, u), &ctx.mul(&ctx.mul(&ctx.from_i64(6), u), z));
    let r2 = ctx.sub(
        &ctx.add(&ctx.add(&u_sq, &two_z), &ctx.mul(&three_t, &inner)),
        &ctx.from_i64(2),
    );
    (r1, r2)
}

/// Evaluate an exact series at a numeric point (Horner).
pub fn eval_series(ctx: &Ctx, series: &PowerSeries, at: &Real) -> Real {
    ctx.eval_series(series, at)
}

/// Evaluate an exact series at a rational point, exactly.
pub fn eval_series_exact(series: &PowerSeries, at: &Rational) -> Rational {
    series.eval(at)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn series_pins() {
        let (u0, z0) = equilibrium_series(8).unwrap();
        assert_eq!(z0.coeff(0), &rat_i(1));
        assert_eq!(z0.coeff(2), &rat_i(36));
        assert_eq!(z0.coeff(4), &rat_i(3240));
        assert_eq!(u0.coeff(1), &rat_i(-6));
        assert_eq!(u0.coeff(3), &rat_i(-324));
    }

    #[test]
    fn parity_and_ideal_residuals() {
        let (u0, z0) = equilibrium_series(24).unwrap();
        assert!(z0.is_even());
        assert!(u0.is_odd());
        let (r1, r2) = ideal_residuals(&u0, &z0);
        assert!(r1.is_zero(), "generator 1 residual {r1}");
        assert!(r2.is_zero(), "generator 2 residual {r2}");
        let (e1, e2) = endpoint_residuals_series(&u0, &z0);
        assert!(e1.is_zero());
        assert!(e2.is_zero());
    }

    #[test]
    fn gaussian_point() {
        let ctx = Ctx::with_digits(50);
        let data = equilibrium_numeric(&ctx, 0.0).unwrap();
        assert!(ctx.is_negligible(&data.u0, 45));
        assert!(ctx.is_negligible(&ctx.sub(&data.z0, &ctx.from_i64(1)), 45));
        assert!(ctx.is_negligible(&ctx.add(&data.a, &ctx.from_i64(2)), 45));
        assert!(ctx.is_negligible(&ctx.sub(&data.b, &ctx.from_i64(2)), 45));
    }

    #[test]
    fn numeric_matches_series_to_truncation_error() {
        let ctx = Ctx::with_digits(60);
        let (u0, z0) = equilibrium_series(20).unwrap();
        // coefficients grow like (1/s_c)^k with s_c ~ 0.073, so the tail
        // after order 20 at t = 0.001 sits near 1e-39
        let t = 0.001;
        let data = equilibrium_numeric(&ctx, t).unwrap();
        let at = ctx.from_f64(t);
        let du = ctx.sub(&eval_series(&ctx, &u0, &at), &data.u0);
        let dz = ctx.sub(&eval_series(&ctx, &z0, &at), &data.z0);
        assert!(ctx.is_negligible(&du, 34), "u0 mismatch {}", ctx.to_f64(&du));
        assert!(ctx.is_negligible(&dz, 34), "z0 mismatch {}", ctx.to_f64(&dz));
    }

    #[test]
    fn endpoint_residuals_vanish_numerically() {
        let ctx = Ctx::with_digits(50);
        let data = equilibrium_numeric(&ctx, 0.03).unwrap();
        let (r1, r2) = endpoint_moment_check(&ctx, &data);
        assert!(ctx.is_negligible(&r1, 12));
        assert!(ctx.is_negligible(&r2, 12));
    }

    #[test]
    fn critical_coupling_value_and_approach() {
        let ctx = Ctx::with_digits(50);
        let s_c = critical_coupling(&ctx);
        // s_c^2 = 1/(108 sqrt(3))
        let lhs = ctx.mul(&s_c, &s_c);
        let rhs = ctx.div(
            &ctx.from_i64(1),
            &ctx.mul(&ctx.from_i64(108), &ctx.sqrt(&ctx.from_i64(3))),
        );
        assert!(ctx.is_negligible(&ctx.sub(&lhs, &rhs), 45));

        // z0 approaches sqrt(3) at the critical point
        let t = ctx.to_f64(&s_c) * (1.0 - 1e-8);
        let data = equilibrium_numeric(&ctx, t).unwrap();
        let gap = ctx.sub(&ctx.sqrt(&ctx.from_i64(3)), &data.z0);
        assert!(ctx.to_f64(&gap).abs() < 5e-3, "gap {}", ctx.to_f64(&gap));

        assert!(matches!(
            equilibrium_numeric(&ctx, 0.08),
            Err(EquilibriumError::BeyondCritical { .. })
        ));
    }

    #[test]
    fn density_semicircle_peak_and_endpoints() {
        let ctx = Ctx::with_digits(50);
        let data = equilibrium_numeric(&ctx, 0.0).unwrap();
        let peak = equilibrium_density(&ctx, &data, &ctx.from_i64(0));
        let inv_pi = ctx.div(&ctx.from_i64(1), &ctx.pi());
        assert!(ctx.is_negligible(&ctx.sub(&peak.value, &inv_pi), 40));
        let at_a = equilibrium_density(&ctx, &data, &data.a.clone());
        let at_b = equilibrium_density(&ctx, &data, &data.b.clone());
        assert!(at_a.value.is_zero() || ctx.is_negligible(&at_a.value, 40));
        assert!(at_b.value.is_zero() || ctx.is_negligible(&at_b.value, 40));
        let outside = equilibrium_density(&ctx, &data, &ctx.from_f64(5.0));
        assert!(outside.value.is_zero());
    }

    #[test]
    fn density_mass_is_one() {
        let ctx = Ctx::with_digits(50);
        for t in [0.0, 0.03, 0.06] {
            let data = equilibrium_numeric(&ctx, t).unwrap();
            let mass = density_mass(&ctx, &data, 48);
            let gap = ctx.sub(&mass, &ctx.from_i64(1));
            assert!(ctx.is_negligible(&gap, 30), "t={t}: mass gap {}", ctx.to_f64(&gap));
        }
    }

    #[test]
    fn density_stays_nonnegative_below_critical() {
        let ctx = Ctx::with_digits(40);
        for t in [0.01, 0.03, 0.05, 0.07] {
            if let Ok(data) = equilibrium_numeric(&ctx, t) {
                for k in 0..=40 {
                    let frac = ctx.div(&ctx.from_i64(k), &ctx.from_i64(40));
                    let lambda = ctx.add(&data.a, &ctx.mul(&frac, &ctx.sub(&data.b, &data.a)));
                    let sample = equilibrium_density(&ctx, &data, &lambda);
                    assert!(
                        !sample.value.is_negative() || ctx.is_negligible(&sample.value, 35),
                        "negative density at t={t}, k={k}"
                    );
                }
            }
        }
    }

    #[test]
    fn series_eval_exact_point() {
        let (_, z0) = equilibrium_series(4).unwrap();
        // z0(1/10) through s^4: 1 + 36/100 + 3240/10000
        let v = eval_series_exact(&z0, &rat(1, 10));
        assert_eq!(v, rat_i(1) + rat(36, 100) + rat(3240, 10000));
    }
}
