#![allow(clippy::needless_range_loop)] // dense pivoting code reads clearer indexed

//! Recurrence coefficients from moments, by two independent routes.
//!
//! Route 1 (Hankel): `b2_n = det H_{n+1} det H_{n-1} / det H_n^2` and
//! `a_n = q_n - q_{n+1}` where `q_m = -det H'_m / det H_m` is the
//! subleading coefficient of the monic orthogonal polynomial (`H'_m` is
//! `H_m` with its last column's moment indices bumped by one). The
//! convention is pinned by the Gaussian case `a_n = 0`, `b2_n = n/N`.
//!
//! Route 2 (Stieltjes): run the three-term recurrence itself, computing
//! `h_n = m(π_n^2)` and `a_n = m(λ π_n^2)/h_n` against the complex
//! bilinear moment functional (no conjugation — the form is non-Hermitean).
//!
//! Both routes must agree to working precision; the table records the
//! worst relative disagreement.

use serde::Serialize;

use super::mpf::{Cpx, Ctx};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RecurrenceError {
    #[error("need moments c_0..c_{needed} for n_max = {n_max}, got {got}")]
    NotEnoughMoments { n_max: usize, needed: usize, got: usize },
    #[error("Hankel determinant det H_{n} vanished at the start of the chain; no recurrence data at all")]
    DegenerateChain { n: usize },
}

/// Recurrence coefficients `a_0..a_{n_max}`, `b2_1..b2_{n_max}` plus the
/// Hankel determinant chain (used downstream by the Hirota check).
#[derive(Debug)]
pub struct RecurrenceTable {
    pub n_max: usize,
    /// First size where `det H_n` vanished, when one was hit: the table is
    /// truncated just below it (the degree gap of the non-Hermitean
    /// polynomials is detected and reported, never papered over).
    pub gap: Option<usize>,
    /// `a[n]`, `n = 0..=n_max`.
    pub a: Vec<Cpx>,
    /// `b2[n]`, `n = 1..=n_max` at index `n` (index 0 is unused and zero).
    pub b2: Vec<Cpx>,
    /// `dets[m] = det H_m`, `m = 0..=n_max+1`, `det H_0 = 1`.
    pub dets: Vec<Cpx>,
    /// Worst relative disagreement between the two routes, as `log10`.
    pub route_disagreement_log10: f64,
    /// Largest `|Im| / |value|` over all coefficients (should be noise for
    /// real couplings).
    pub max_imaginary_fraction: f64,
}

/// Summary for serialization: decimal strings of the real parts.
#[derive(Debug, Serialize)]
pub struct RecurrenceTableJson {
    pub n_max: usize,
    pub gap: Option<usize>,
    pub a: Vec<String>,
    pub b2: Vec<String>,
    pub route_disagreement_log10: f64,
    pub max_imaginary_fraction: f64,
}

impl RecurrenceTable {
    pub fn to_json(&self, ctx: &Ctx) -> RecurrenceTableJson {
        RecurrenceTableJson {
            n_max: self.n_max,
            gap: self.gap,
            a: self.a.iter().map(|c| ctx.to_string(&c.re)).collect(),
            b2: self.b2.iter().map(|c| ctx.to_string(&c.re)).collect(),
            route_disagreement_log10: self.route_disagreement_log10,
            max_imaginary_fraction: self.max_imaginary_fraction,
        }
    }
}

/// Determinant by LU with partial pivoting on `|.|^2`.
fn det(ctx: &Ctx, matrix: &mut [Vec<Cpx>]) -> Cpx {
    let n = matrix.len();
    let mut result = Cpx::real(ctx, ctx.from_i64(1));
    let mut sign_flip = false;
    for col in 0..n {
        // pivot
        let mut best = col;
        let mut best_mag = ctx.add(
            &ctx.mul(&matrix[col][col].re, &matrix[col][col].re),
            &ctx.mul(&matrix[col][col].im, &matrix[col][col].im),
        );
        for row in col + 1..n {
            let mag = ctx.add(
                &ctx.mul(&matrix[row][col].re, &matrix[row][col].re),
                &ctx.mul(&matrix[row][col].im, &matrix[row][col].im),
            );
            if mag > best_mag {
                best = row;
                best_mag = mag;
            }
        }
        if best_mag.is_zero() {
            return Cpx::zero(ctx);
        }
        if best != col {
            matrix.swap(best, col);
            sign_flip = !sign_flip;
        }
        let pivot = matrix[col][col].clone();
        result = ctx.cmul(&result, &pivot);
        for row in col + 1..n {
            let factor = ctx.cdiv(&matrix[row][col], &pivot);
            if factor.is_zero() {
                continue;
            }
            for k in col..n {
                let delta = ctx.cmul(&factor, &matrix[col][k]);
                matrix[row][k] = ctx.csub(&matrix[row][k], &delta);
            }
        }
    }
    if sign_flip {
        ctx.cneg(&result)
    } else {
        result
    }
}

fn hankel_det(ctx: &Ctx, moments: &[Cpx], m: usize, bump_last_column: bool) -> Cpx {
    if m == 0 {
        return Cpx::real(ctx, ctx.from_i64(1));
    }
    let mut matrix: Vec<Vec<Cpx>> = (0..m)
        .map(|i| {
            (0..m)
                .map(|j| {
                    let idx = if bump_last_column && j == m - 1 { i + j + 1 } else { i + j };
                    moments[idx].clone()
                })
                .collect()
        })
        .collect();
    det(ctx, &mut matrix)
}

/// Extract `a_n`, `b2_n` through `n_max` from `moments` (`c_0..c_{2n_max+1}`
/// required), running both routes and recording their agreement.
pub fn recurrence_extract(
    ctx: &Ctx,
    moments: &[Cpx],
    n_max: usize,
) -> Result<RecurrenceTable, RecurrenceError> {
    let needed = 2 * n_max + 1;
    if moments.len() < needed + 1 {
        return Err(RecurrenceError::NotEnoughMoments { n_max, needed, got: moments.len() });
    }

    // --- Hankel route (truncating at a vanishing determinant) ---
    let mut dets = Vec::with_capacity(n_max + 2);
    let mut gap = None;
    for m in 0..=n_max + 1 {
        let d = hankel_det(ctx, moments, m, false);
        if d.is_zero() {
            gap = Some(m);
            break;
        }
        dets.push(d);
    }
    let n_max = match gap {
        // a gap at size m leaves reliable data through degree m - 2
        Some(m) if m >= 2 => n_max.min(m - 2),
        Some(m) => return Err(RecurrenceError::DegenerateChain { n: m }),
        None => n_max,
    };
    let mut qs = vec![Cpx::zero(ctx)]; // q_0 = 0
    for m in 1..=n_max + 1 {
        let bumped = hankel_det(ctx, moments, m, true);
        qs.push(ctx.cneg(&ctx.cdiv(&bumped, &dets[m])));
    }
    let mut a_h = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        a_h.push(ctx.csub(&qs[n], &qs[n + 1]));
    }
    let mut b2_h = vec![Cpx::zero(ctx)];
    for n in 1..=n_max {
        let num = ctx.cmul(&dets[n + 1], &dets[n - 1]);
        let den = ctx.cmul(&dets[n], &dets[n]);
        b2_h.push(ctx.cdiv(&num, &den));
    }

    // --- Stieltjes route ---
    let functional = |poly: &[Cpx]| -> Cpx {
        let mut acc = Cpx::zero(ctx);
        for (i, c) in poly.iter().enumerate() {
            if !c.is_zero() {
                acc = ctx.cadd(&acc, &ctx.cmul(c, &moments[i]));
            }
        }
        acc
    };
    let shift = |poly: &[Cpx]| -> Vec<Cpx> {
        let mut out = vec![Cpx::zero(ctx)];
        out.extend_from_slice(poly);
        out
    };
    let square = |poly: &[Cpx]| -> Vec<Cpx> {
        let mut out = vec![Cpx::zero(ctx); 2 * poly.len() - 1];
        for (i, a) in poly.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in poly.iter().enumerate() {
                out[i + j] = ctx.cadd(&out[i + j], &ctx.cmul(a, b));
            }
        }
        out
    };

    let mut a_s: Vec<Cpx> = Vec::with_capacity(n_max + 1);
    let mut b2_s = vec![Cpx::zero(ctx)];
    let mut p_prev: Vec<Cpx> = vec![];
    let mut p = vec![Cpx::real(ctx, ctx.from_i64(1))];
    let mut h_prev = Cpx::zero(ctx);
    for n in 0..=n_max {
        let p_sq = square(&p);
        let h = functional(&p_sq);
        if n > 0 {
            b2_s.push(ctx.cdiv(&h, &h_prev));
        }
        let a_n = ctx.cdiv(&functional(&shift(&p_sq)), &h);
        a_s.push(a_n.clone());
        // π_{n+1} = (λ - a_n) π_n - b2_n π_{n-1}
        let mut next = shift(&p);
        for (k, c) in p.iter().enumerate() {
            next[k] = ctx.csub(&next[k], &ctx.cmul(&a_n, c));
        }
        if n > 0 {
            for (k, c) in p_prev.iter().enumerate() {
                next[k] = ctx.csub(&next[k], &ctx.cmul(&b2_s[n], c));
            }
        }
        h_prev = h;
        p_prev = std::mem::take(&mut p);
        p = next;
    }

    // --- agreement + imaginary diagnostics ---
    let mut worst = f64::NEG_INFINITY;
    let mut rel = |x: &Cpx, y: &Cpx| {
        let diff = ctx.cabs(&ctx.csub(x, y));
        let scale = ctx.cabs(x);
        if scale.is_zero() {
            if !diff.is_zero() {
                worst = worst.max(ctx.log10_abs_f64(&diff));
            }
        } else {
            let r = ctx.div(&diff, &scale);
            if !r.is_zero() {
                worst = worst.max(ctx.log10_abs_f64(&r));
            }
        }
    };
    for n in 0..=n_max {
        rel(&a_h[n], &a_s[n]);
    }
    for n in 1..=n_max {
        rel(&b2_h[n], &b2_s[n]);
    }

    let mut max_im = 0.0f64;
    for c in a_h.iter().chain(b2_h.iter().skip(1)) {
        let mag = ctx.cabs(c);
        if !mag.is_zero() && !c.im.is_zero() {
            max_im = max_im.max(ctx.to_f64(&ctx.div(&ctx.abs(&c.im), &mag)));
        }
    }

    Ok(RecurrenceTable {
        n_max,
        gap,
        a: a_h,
        b2: b2_h,
        dets,
        route_disagreement_log10: worst,
        max_imaginary_fraction: max_im,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::contour::{contour_moments, ContourSpec};

    #[test]
    fn gaussian_recurrence_is_hermite() {
        let big_n = 8u32;
        let spec = ContourSpec::auto(0.0, big_n, 45, 17);
        let table = contour_moments(&spec, 2 * 8 + 1).unwrap();
        let ctx = spec.working_ctx();
        let rec = recurrence_extract(&ctx, &table.moments, 8).unwrap();
        for n in 0..=8usize {
            assert!(
                ctx.is_negligible(&ctx.cabs(&rec.a[n]), 40),
                "a_{n} = {}",
                ctx.to_f64(&rec.a[n].re)
            );
        }
        for n in 1..=8usize {
            let expected = ctx.div(&ctx.from_i64(n as i64), &ctx.from_i64(big_n as i64));
            let gap = ctx.sub(&rec.b2[n].re, &expected);
            assert!(ctx.is_negligible(&gap, 40), "b2_{n} off by {}", ctx.to_f64(&gap));
            assert!(ctx.is_negligible(&rec.b2[n].im, 40));
        }
        assert!(rec.route_disagreement_log10 < -30.0);
    }

    #[test]
    fn cubic_routes_agree_and_are_nearly_real() {
        let spec = ContourSpec::auto(0.03, 12, 50, 25);
        let table = contour_moments(&spec, 2 * 12 + 1).unwrap();
        let ctx = spec.working_ctx();
        let rec = recurrence_extract(&ctx, &table.moments, 12).unwrap();
        assert!(
            rec.route_disagreement_log10 < -30.0,
            "routes disagree at 10^{}",
            rec.route_disagreement_log10
        );
        assert!(rec.max_imaginary_fraction < 1e-30, "imaginary fraction {}", rec.max_imaginary_fraction);
        // b2_n should sit near n/N * z0(t): crude sanity window
        let b2_12 = ctx.to_f64(&rec.b2[12].re);
        assert!(b2_12 > 0.9 && b2_12 < 1.2, "b2_12 = {b2_12}");
    }

    #[test]
    fn hankel_gap_truncates_and_reports() {
        // moments of a two-point measure: H_m is singular for m >= 3, so
        // the chain must stop with gap = 3 and data through n_max = 1.
        let ctx = Ctx::with_digits(30);
        // measure = delta_0 + delta_1: c_k = 0^k + 1^k
        let moments: Vec<Cpx> = (0..10)
            .map(|k| Cpx::real(&ctx, ctx.from_i64(if k == 0 { 2 } else { 1 })))
            .collect();
        let rec = recurrence_extract(&ctx, &moments, 4).unwrap();
        assert_eq!(rec.gap, Some(3));
        assert_eq!(rec.n_max, 1);
        assert_eq!(rec.a.len(), 2);
    }

    #[test]
    fn not_enough_moments_is_reported() {
        let ctx = Ctx::with_digits(30);
        let moments = vec![Cpx::real(&ctx, ctx.from_i64(1)); 4];
        assert!(matches!(
            recurrence_extract(&ctx, &moments, 4),
            Err(RecurrenceError::NotEnoughMoments { .. })
        ));
    }
}
