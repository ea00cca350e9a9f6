//! Numerical validation of the asymptotic expansion: extracted recurrence
//! coefficients against `u_0 + u_1/n + u_2/n^2` and `z_0 + z_1/n^2`, decay
//! exponents of the remainders, the Gaussian reference case, and the
//! second-difference (Hirota) identity.

use serde::Serialize;

use super::contour::{contour_moments, ContourError, ContourSpec};
use super::mpf::Real;
use super::recurrence::{recurrence_extract, RecurrenceError};
use crate::series::PowerSeries;

#[derive(Debug, thiserror::Error)]
pub enum NumericError {
    #[error(transparent)]
    Contour(#[from] ContourError),
    #[error(transparent)]
    Recurrence(#[from] RecurrenceError),
    #[error("comparison needs series {0}")]
    MissingSeries(&'static str),
}

/// Exact series entering the comparison: `u[g]` and `z[g]` by genus-index.
pub struct AsymptoticPrediction<'a> {
    pub u: &'a [PowerSeries],
    pub z: &'a [PowerSeries],
}

#[derive(Debug, Clone, Serialize)]
pub struct ComparisonRow {
    pub n: usize,
    pub a_n: String,
    pub b2_n: String,
    pub a_error_log10: f64,
    pub b2_error_log10: f64,
    pub route_disagreement_log10: f64,
    pub max_imaginary_fraction: f64,
    pub moment_doubling_rel_error: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ComparisonReport {
    pub t3: f64,
    pub digits: usize,
    pub rows: Vec<ComparisonRow>,
    /// Fitted decay exponent of `|a_n - (u0 + u1/n + u2/n^2)|` (expect 3).
    pub a_fitted_exponent: f64,
    /// Fitted decay exponent of `|b2_n N/n - (z0 + z1/n^2)|` (expect 4).
    pub b2_fitted_exponent: f64,
}

/// At `x = n/N = 1` for each listed `n`: extract `a_n`, `b2_n` with `N = n`
/// and compare against the exact expansion truncated at `u_2` / `z_1`.
pub fn asymptotic_comparison(
    t3: f64,
    n_list: &[usize],
    digits: usize,
    pred: &AsymptoticPrediction,
) -> Result<ComparisonReport, NumericError> {
    if pred.u.len() < 3 {
        return Err(NumericError::MissingSeries("u_0, u_1, u_2"));
    }
    if pred.z.len() < 2 {
        return Err(NumericError::MissingSeries("z_0, z_1"));
    }

    let mut rows = Vec::new();
    for &n in n_list {
        let spec = ContourSpec::auto(t3, n as u32, digits, 2 * n + 1);
        let ctx = spec.working_ctx();
        let table = contour_moments(&spec, 2 * n + 1)?;
        let rec = recurrence_extract(&ctx, &table.moments, n)?;
        if rec.n_max < n {
            return Err(NumericError::Recurrence(
                crate::numeric::recurrence::RecurrenceError::DegenerateChain {
                    n: rec.gap.unwrap_or(n),
                },
            ));
        }

        let t = ctx.from_f64(t3);
        let inv_n = ctx.div(&ctx.from_i64(1), &ctx.from_i64(n as i64));
        let inv_n2 = ctx.mul(&inv_n, &inv_n);
        let pred_a = {
            let u0 = ctx.eval_series(&pred.u[0], &t);
            let u1 = ctx.eval_series(&pred.u[1], &t);
            let u2 = ctx.eval_series(&pred.u[2], &t);
            ctx.add(&u0, &ctx.add(&ctx.mul(&u1, &inv_n), &ctx.mul(&u2, &inv_n2)))
        };
        let pred_b2 = {
            let z0 = ctx.eval_series(&pred.z[0], &t);
            let z1 = ctx.eval_series(&pred.z[1], &t);
            ctx.add(&z0, &ctx.mul(&z1, &inv_n2))
        };

        // x = 1, so b2_n * N/n = b2_n as extracted.
        let a_err = ctx.sub(&rec.a[n].re, &pred_a);
        let b2_err = ctx.sub(&rec.b2[n].re, &pred_b2);
        rows.push(ComparisonRow {
            n,
            a_n: ctx.to_string(&rec.a[n].re),
            b2_n: ctx.to_string(&rec.b2[n].re),
            a_error_log10: ctx.log10_abs_f64(&a_err),
            b2_error_log10: ctx.log10_abs_f64(&b2_err),
            route_disagreement_log10: rec.route_disagreement_log10,
            max_imaginary_fraction: rec.max_imaginary_fraction,
            moment_doubling_rel_error: table.doubling_rel_error,
        });
    }

    let a_fitted_exponent = -fit_slope(
        &rows.iter().map(|r| (r.n as f64).log10()).collect::<Vec<_>>(),
        &rows.iter().map(|r| r.a_error_log10).collect::<Vec<_>>(),
    );
    let b2_fitted_exponent = -fit_slope(
        &rows.iter().map(|r| (r.n as f64).log10()).collect::<Vec<_>>(),
        &rows.iter().map(|r| r.b2_error_log10).collect::<Vec<_>>(),
    );

    Ok(ComparisonReport { t3, digits, rows, a_fitted_exponent, b2_fitted_exponent })
}

/// Least-squares slope of `y` against `x`.
fn fit_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let cov: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let var: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    cov / var
}

#[derive(Debug, Clone, Serialize)]
pub struct GaussianReport {
    pub big_n: u32,
    pub n_max: usize,
    /// `log10 max_n |a_n|`.
    pub max_a_log10: f64,
    /// `log10 max_n |b2_n - n/N|`.
    pub max_b2_dev_log10: f64,
}

/// Gaussian reference: at `t3 = 0` the pipeline must reproduce the Hermite
/// data `a_n = 0`, `b2_n = n/N`.
pub fn gaussian_check(big_n: u32, n_max: usize, digits: usize) -> Result<GaussianReport, NumericError> {
    let spec = ContourSpec::auto(0.0, big_n, digits, 2 * n_max + 1);
    let ctx = spec.working_ctx();
    let table = contour_moments(&spec, 2 * n_max + 1)?;
    let rec = recurrence_extract(&ctx, &table.moments, n_max)?;
    let mut max_a = f64::NEG_INFINITY;
    let mut max_b2 = f64::NEG_INFINITY;
    for n in 0..=n_max {
        max_a = max_a.max(ctx.log10_abs_f64(&ctx.cabs(&rec.a[n])));
        if n >= 1 {
            let expected = ctx.div(&ctx.from_i64(n as i64), &ctx.from_i64(big_n as i64));
            let dev = ctx.sub(&rec.b2[n].re, &expected);
            max_b2 = max_b2.max(ctx.log10_abs_f64(&dev));
            max_b2 = max_b2.max(ctx.log10_abs_f64(&rec.b2[n].im));
        }
    }
    Ok(GaussianReport { big_n, n_max, max_a_log10: max_a, max_b2_dev_log10: max_b2 })
}

#[derive(Debug, Clone, Serialize)]
pub struct HirotaRow {
    pub n: usize,
    /// `log10` residual of the second-difference identity.
    pub residual_log10: f64,
    /// `log10 |second difference - log z0(x^{1/2} t)|` (should be O(n^-2)).
    pub against_log_z0_log10: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct HirotaReport {
    pub t3: f64,
    pub big_n: u32,
    pub rows: Vec<HirotaRow>,
    pub max_residual_log10: f64,
}

/// Check `log τ²_{n+1} - 2 log τ²_n + log τ²_{n-1} = log(b²_n) - log(b²_n)(0)`
/// with `τ²_n = det H_n(t)/det H_n(0)` and `b²_n(0) = n/N`, across a range
/// of `n` at fixed `N`. The residual is pure roundoff when the chain is
/// computed stably; the report also compares the second difference against
/// `log z0` evaluated at the `x`-rescaled coupling.
pub fn hirota_check(
    t3: f64,
    big_n: u32,
    n_range: std::ops::RangeInclusive<usize>,
    digits: usize,
    z0: &PowerSeries,
) -> Result<HirotaReport, NumericError> {
    let n_hi = *n_range.end();
    let spec_t = ContourSpec::auto(t3, big_n, digits, 2 * (n_hi + 1) + 1);
    let ctx = spec_t.working_ctx();
    let moments_t = contour_moments(&spec_t, 2 * (n_hi + 1) + 1)?;
    let rec_t = recurrence_extract(&ctx, &moments_t.moments, n_hi + 1)?;

    let spec_0 = ContourSpec::auto(0.0, big_n, digits, 2 * (n_hi + 1) + 1);
    let moments_0 = contour_moments(&spec_0, 2 * (n_hi + 1) + 1)?;
    let rec_0 = recurrence_extract(&ctx, &moments_0.moments, n_hi + 1)?;

    // τ²_n = det H_n(t)/det H_n(0); all the logs below are principal-branch
    // logs of near-positive ratios, so no branch mismatch enters.
    let log_tau2 = |n: usize| -> Real {
        let ratio = ctx.cdiv(&rec_t.dets[n], &rec_0.dets[n]);
        ctx.cln(&ratio).re
    };

    let mut rows = Vec::new();
    let mut max_residual = f64::NEG_INFINITY;
    for n in n_range {
        let second_diff = ctx.add(
            &ctx.sub(&log_tau2(n + 1), &ctx.mul(&ctx.from_i64(2), &log_tau2(n))),
            &log_tau2(n - 1),
        );
        // log b²_n(t) - log b²_n(0), with b²_n(0) = n/N
        let b2_ratio = ctx.cdiv(&rec_t.b2[n], &rec_0.b2[n]);
        let rhs = ctx.cln(&b2_ratio).re;
        let residual = ctx.sub(&second_diff, &rhs);
        let residual_log10 = ctx.log10_abs_f64(&residual);
        max_residual = max_residual.max(residual_log10);

        // second difference ≈ log z0(x^{1/2} t), x = n/N
        let x = n as f64 / big_n as f64;
        let s_eff = ctx.from_f64(x.sqrt() * t3);
        let log_z0 = ctx.ln(&ctx.eval_series(z0, &s_eff));
        let against = ctx.sub(&second_diff, &log_z0);
        rows.push(HirotaRow {
            n,
            residual_log10,
            against_log_z0_log10: ctx.log10_abs_f64(&against),
        });
    }

    Ok(HirotaReport { t3, big_n, rows, max_residual_log10: max_residual })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_fit_recovers_power_law() {
        let x: Vec<f64> = [8.0f64, 12.0, 16.0, 24.0].iter().map(|v| v.log10()).collect();
        let y: Vec<f64> = [8.0f64, 12.0, 16.0, 24.0].iter().map(|v| (42.0 * v.powf(-3.7)).log10()).collect();
        let slope = fit_slope(&x, &y);
        assert!((slope + 3.7).abs() < 1e-9);
    }

    #[test]
    fn gaussian_pipeline_reaches_forty_digits() {
        let report = gaussian_check(8, 8, 50).unwrap();
        assert!(report.max_a_log10 < -40.0, "a noise {}", report.max_a_log10);
        assert!(report.max_b2_dev_log10 < -40.0, "b2 noise {}", report.max_b2_dev_log10);
    }
}
