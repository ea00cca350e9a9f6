//! Moments of the cubic weight along a deformed contour.
//!
//! For `t3 > 0` the weight `exp(-N(λ²/2 + t3 λ³))` blows up as `λ -> -∞`,
//! so the real axis is deformed: the contour comes in from `∞·e^{+2πi/3}`
//! (a decay sector of the cubic), joins the real axis at a point `-M`
//! where the weight has already decayed past the working accuracy, and
//! runs along the real axis through the support of the equilibrium
//! measure and the origin out to `+∞`. The integrand is entire, so moving
//! the joint or curving the ray (same asymptote) changes nothing — that
//! is checked explicitly by the contour-independence test.
//!
//! The joint cannot be pushed deeper than the secondary saddle
//! `λ* = -1/(3 t3)`: `V(-M)` peaks there at `1/(54 t3²)`, which caps the
//! achievable suppression of the non-real piece at `exp(-N/(54 t3²))`.
//! The contour configuration reports that cap and fails loudly when it
//! cannot clear the requested digits.
//!
//! For `t3 = 0` the contour is the real line. For `t3 < 0` the reflection
//! `λ -> -λ` maps everything to `|t3|` with moments picking up `(-1)^k`.
//!
//! Every moment table is computed twice (node count doubled) and carries
//! that self-check plus the endpoint-decay diagnostic.

use serde::Serialize;

use super::mpf::{Cpx, Ctx};
use super::quadrature::gauss_legendre;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ContourError {
    #[error("integrand does not decay at a contour end: relative log10 at endpoint = {endpoint_log10:.2}, required <= {required:.2}")]
    NonDecaying { endpoint_log10: f64, required: f64 },
    #[error("joint suppression exp(-N/(54 t3^2)) = 10^{achievable_log10:.1} cannot clear {digits} digits at t3 = {t3}, N = {big_n}")]
    JointTooShallow { t3: f64, big_n: u32, digits: usize, achievable_log10: f64 },
    #[error("doubling the node count moved the moments by a relative {observed:.3e}, budget {budget:.3e}; increase panels or digits")]
    NotConverged { k_max: usize, observed: f64, budget: f64 },
}

/// How the contour is parametrized.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Parametrization {
    /// The real line (Gaussian case, `t3 = 0`).
    RealLine,
    /// Straight ray from `∞·e^{2πi/3}` to the joint, then the real axis.
    DeformedAxis,
    /// Same asymptote but the ray curves into the joint with rate `delta`
    /// — used to check contour independence.
    CurvedRay { delta: f64 },
}

#[derive(Debug, Clone, Serialize)]
pub struct ContourSpec {
    pub t3: f64,
    /// The scale parameter `N` in the weight.
    pub big_n: u32,
    /// Requested reliable decimal digits.
    pub digits: usize,
    pub parametrization: Parametrization,
    pub nodes_per_panel: usize,
    /// Real point where the ray attaches (0 for the real line).
    pub joint: f64,
    /// Length of the ray piece.
    pub ray_len: f64,
    /// Right end of the real piece (for `RealLine`, the interval is
    /// `[-real_end, real_end]`).
    pub real_end: f64,
    pub panels_ray: usize,
    pub panels_real: usize,
}

/// `Re V(λ)` and `Im V(λ)` for the f64 planning helpers.
fn v_f64(t3: f64, re: f64, im: f64) -> (f64, f64) {
    // λ²/2 + t λ³
    let (a, b) = (re, im);
    let sq = (a * a - b * b, 2.0 * a * b);
    let cu = (sq.0 * a - sq.1 * b, sq.0 * b + sq.1 * a);
    (sq.0 / 2.0 + t3 * cu.0, sq.1 / 2.0 + t3 * cu.1)
}

impl ContourSpec {
    /// Pick contour geometry and panel counts adequate for `digits`
    /// reliable digits of `c_0..c_{k_max}`.
    pub fn auto(t3: f64, big_n: u32, digits: usize, k_max: usize) -> Self {
        let n = big_n as f64;
        let k = k_max as f64;
        let internal = Self::internal_digits_for(big_n, digits) as f64;
        // tail budget in e-folds, amplified by the λ^k factor as we go out
        let needed = |lambda_mag: f64| -> f64 {
            internal * std::f64::consts::LN_10 + k * (lambda_mag + 1.0).ln()
        };

        if t3 == 0.0 {
            let mut t_end = 2.0f64;
            while n * t_end * t_end / 2.0 < needed(t_end) {
                t_end *= 1.1;
            }
            let range = n * t_end * t_end / 2.0 + k * (t_end + 1.0).ln();
            ContourSpec {
                t3,
                big_n,
                digits,
                parametrization: Parametrization::RealLine,
                nodes_per_panel: 24,
                joint: 0.0,
                ray_len: 0.0,
                real_end: t_end,
                panels_ray: 0,
                panels_real: ((range / 5.0).ceil() as usize).max(8),
            }
        } else {
            let t = t3.abs();
            // right end of the real piece: V grows like T²/2 + tT³
            let mut t_end = 2.0f64;
            while n * v_f64(t, t_end, 0.0).0 < needed(t_end) {
                t_end *= 1.1;
            }
            // joint: as deep as V(-M) allows, capped at the saddle -1/(3t)
            let saddle = 1.0 / (3.0 * t);
            let mut joint_mag = 1.0f64;
            while joint_mag < saddle && n * v_f64(t, -joint_mag, 0.0).0 < needed(joint_mag) {
                joint_mag = (joint_mag * 1.05).min(saddle);
            }
            // ray length: march until the cubic decay clears the budget
            let dir = (-0.5, 3f64.sqrt() / 2.0); // e^{2πi/3}
            let lambda = |r: f64| (-joint_mag + r * dir.0, r * dir.1);
            let mut ray_len = 1.0f64;
            loop {
                let (re, im) = lambda(ray_len);
                let mag = (re * re + im * im).sqrt();
                if n * v_f64(t, re, im).0 >= needed(mag) {
                    break;
                }
                ray_len *= 1.1;
            }
            // panel budgets: e-folds of magnitude plus radians of phase, at
            // roughly five per panel
            let real_range = n * (v_f64(t, -joint_mag, 0.0).0.max(v_f64(t, t_end, 0.0).0))
                + k * (t_end.max(joint_mag) + 1.0).ln();
            let ray_end = lambda(ray_len);
            let (ray_re, ray_im) = v_f64(t, ray_end.0, ray_end.1);
            let ray_range = n * (ray_re - v_f64(t, -joint_mag, 0.0).0).abs() + n * ray_im.abs()
                + k * ((ray_end.0 * ray_end.0 + ray_end.1 * ray_end.1).sqrt() + 1.0).ln();
            ContourSpec {
                t3,
                big_n,
                digits,
                parametrization: Parametrization::DeformedAxis,
                nodes_per_panel: 24,
                joint: -joint_mag,
                ray_len,
                real_end: t_end,
                panels_ray: ((ray_range / 5.0).ceil() as usize).max(12),
                panels_real: ((real_range / 5.0).ceil() as usize).max(12),
            }
        }
    }

    /// Working digits: requested digits plus the Hankel-chain loss budget.
    pub fn internal_digits_for(big_n: u32, digits: usize) -> usize {
        digits + 2 * big_n as usize + 20
    }

    pub fn internal_digits(&self) -> usize {
        Self::internal_digits_for(self.big_n, self.digits)
    }

    /// Context at the contour's internal working precision.
    pub fn working_ctx(&self) -> Ctx {
        Ctx::with_digits(self.internal_digits())
    }

    /// `log10` of the suppression available at the joint (capped by the
    /// secondary saddle); `None` for the real line.
    pub fn joint_suppression_log10(&self) -> Option<f64> {
        if self.t3 == 0.0 {
            return None;
        }
        let v = v_f64(self.t3.abs(), self.joint, 0.0).0;
        Some(-(self.big_n as f64) * v / std::f64::consts::LN_10)
    }
}

#[derive(Debug)]
pub struct MomentTable {
    pub spec: ContourSpec,
    /// `moments[k]` = `c_k = ∫_Γ λ^k e^{-N V(λ)} dλ`.
    pub moments: Vec<Cpx>,
    /// Worst relative movement of any moment when the node count doubles.
    pub doubling_rel_error: f64,
    /// `log10 |integrand|` at the worst contour endpoint, relative to the
    /// integrand's peak (λ^k growth included).
    pub endpoint_decay_log10: f64,
}

/// Moments `c_0..c_{k_max}` along the contour, with the node-doubling and
/// endpoint-decay diagnostics enforced.
pub fn contour_moments(spec: &ContourSpec, k_max: usize) -> Result<MomentTable, ContourError> {
    // the joint cannot buy more suppression than the secondary saddle allows
    if let Some(cap) = spec.joint_suppression_log10() {
        let saddle_cap = -(spec.big_n as f64) / (54.0 * spec.t3 * spec.t3) / std::f64::consts::LN_10;
        if saddle_cap > -(spec.digits as f64 + 5.0) {
            return Err(ContourError::JointTooShallow {
                t3: spec.t3,
                big_n: spec.big_n,
                digits: spec.digits,
                achievable_log10: saddle_cap,
            });
        }
        // the joint can never sit deeper than the secondary saddle allows
        debug_assert!(cap >= saddle_cap - 1.0, "joint {cap} below saddle cap {saddle_cap}");
    }

    let ctx = spec.working_ctx();
    let (coarse, decay) = integrate_all(&ctx, spec, k_max, spec.nodes_per_panel)?;
    let (fine, _) = integrate_all(&ctx, spec, k_max, 2 * spec.nodes_per_panel)?;

    // Doubling diagnostic across all moments, each measured against the
    // neighborhood scale max(|c_{k-1}|, |c_k|, |c_{k+1}|): a moment that
    // vanishes identically (odd Gaussian moments) is then judged against
    // its even neighbors instead of against noise.
    let mut rel = 0.0f64;
    for k in 0..=k_max {
        let diff = ctx.cabs(&ctx.csub(&coarse[k], &fine[k]));
        if diff.is_zero() {
            continue;
        }
        let mut scale = ctx.cabs(&fine[k]);
        if k > 0 {
            let s = ctx.cabs(&fine[k - 1]);
            if s > scale {
                scale = s;
            }
        }
        if k < k_max {
            let s = ctx.cabs(&fine[k + 1]);
            if s > scale {
                scale = s;
            }
        }
        let r = if scale.is_zero() { f64::INFINITY } else { ctx.to_f64(&ctx.div(&diff, &scale)) };
        rel = rel.max(r.abs());
    }
    let budget = 10f64.powf(-(spec.digits as f64) / 2.0);
    #[allow(clippy::neg_cmp_op_on_partial_ord)] // deliberate: NaN must also fail
    if !(rel < budget) {
        return Err(ContourError::NotConverged { k_max, observed: rel, budget });
    }

    Ok(MomentTable {
        spec: spec.clone(),
        moments: fine,
        doubling_rel_error: rel,
        endpoint_decay_log10: decay,
    })
}

/// Single-pass moment integration at an explicit node count (diagnostics;
/// `contour_moments` is the checked entry point).
pub fn contour_moments_raw(
    spec: &ContourSpec,
    k_max: usize,
    nodes: usize,
) -> Result<(Vec<Cpx>, f64), ContourError> {
    let ctx = spec.working_ctx();
    integrate_all(&ctx, spec, k_max, nodes)
}

fn integrate_all(
    ctx: &Ctx,
    spec: &ContourSpec,
    k_max: usize,
    nodes: usize,
) -> Result<(Vec<Cpx>, f64), ContourError> {
    let t3 = ctx.from_f64(spec.t3.abs());
    let negate_odd = spec.t3 < 0.0;
    let rule = gauss_legendre(ctx, nodes);
    let big_n = ctx.from_i64(spec.big_n as i64);

    let mut moments = vec![Cpx::zero(ctx); k_max + 1];
    let mut peak_log10 = f64::NEG_INFINITY;
    let mut endpoint_log10 = f64::NEG_INFINITY;

    // λ and λ' on the ray piece, parametrized from the joint outward.
    let ray_delta = match spec.parametrization {
        Parametrization::CurvedRay { delta } => delta,
        _ => 0.0,
    };
    let joint = ctx.from_f64(spec.joint);
    let ray_point = |r: &super::mpf::Real| -> (Cpx, Cpx) {
        let two_thirds_pi = ctx.mul(&ctx.from_i64(2), &ctx.div(&ctx.pi(), &ctx.from_i64(3)));
        if ray_delta == 0.0 {
            let dir = Cpx::new(ctx.cos(&two_thirds_pi), ctx.sin(&two_thirds_pi));
            let lambda = ctx.cadd(&Cpx::real(ctx, joint.clone()), &ctx.cscale(&dir, r));
            (lambda, dir)
        } else {
            // φ(r) = 2π/3 - delta e^{-r}: same asymptote, curved approach
            let decay = ctx.exp(&ctx.neg(r));
            let phi = ctx.sub(&two_thirds_pi, &ctx.mul(&ctx.from_f64(ray_delta), &decay));
            let dir = Cpx::new(ctx.cos(&phi), ctx.sin(&phi));
            let lambda = ctx.cadd(&Cpx::real(ctx, joint.clone()), &ctx.cscale(&dir, r));
            // λ' = e^{iφ}(1 + i r φ'), φ' = delta e^{-r}
            let phi_prime = ctx.mul(&ctx.from_f64(ray_delta), &decay);
            let i_r_phip = Cpx::new(ctx.from_i64(0), ctx.mul(r, &phi_prime));
            let deriv = ctx.cmul(&dir, &ctx.cadd(&Cpx::real(ctx, ctx.from_i64(1)), &i_r_phip));
            (lambda, deriv)
        }
    };

    // accumulate one piece: r in [0, len] (panelized), λ(r) by `point`,
    // orientation ±1, flagging the r = len end as a contour endpoint
    let run_piece = |len: f64,
                         panels: usize,
                         orientation: f64,
                         offset: f64,
                         is_ray: bool,
                         moments: &mut [Cpx],
                         peak: &mut f64,
                         endpoint: &mut f64| {
        let lo = ctx.from_f64(offset);
        let width = ctx.div(&ctx.from_f64(len), &ctx.from_i64(panels as i64));
        let half = ctx.div(&width, &ctx.from_i64(2));
        for p in 0..panels {
            let left = ctx.add(&lo, &ctx.mul(&width, &ctx.from_i64(p as i64)));
            let center = ctx.add(&left, &half);
            for (x, w) in &rule {
                let r = ctx.add(&center, &ctx.mul(&half, x));
                let (lambda, dlambda) = if is_ray {
                    ray_point(&r)
                } else {
                    (Cpx::real(ctx, r.clone()), Cpx::real(ctx, ctx.from_i64(1)))
                };
                // V = λ²/2 + t λ³
                let sq = ctx.cmul(&lambda, &lambda);
                let cu = ctx.cmul(&sq, &lambda);
                let v = ctx.cadd(
                    &Cpx::new(ctx.div(&sq.re, &ctx.from_i64(2)), ctx.div(&sq.im, &ctx.from_i64(2))),
                    &ctx.cscale(&cu, &t3),
                );
                let weight = ctx.cexp(&ctx.cneg(&ctx.cscale(&v, &big_n)));
                let mag = ctx.approx_log10_abs(&weight.re).max(ctx.approx_log10_abs(&weight.im));
                *peak = peak.max(mag);
                if p == panels - 1 {
                    *endpoint = endpoint.max(mag);
                }
                let scale = ctx.mul(&ctx.mul(w, &half), &ctx.from_f64(orientation));
                let mut term = ctx.cscale(&ctx.cmul(&weight, &dlambda), &scale);
                for moment in moments.iter_mut() {
                    *moment = ctx.cadd(moment, &term);
                    term = ctx.cmul(&term, &lambda);
                }
            }
        }
    };

    match spec.parametrization {
        Parametrization::RealLine => {
            run_piece(
                2.0 * spec.real_end,
                spec.panels_real,
                1.0,
                -spec.real_end,
                false,
                &mut moments,
                &mut peak_log10,
                &mut endpoint_log10,
            );
        }
        Parametrization::DeformedAxis | Parametrization::CurvedRay { .. } => {
            // ray traversed from ∞ e^{2πi/3} down to the joint
            run_piece(
                spec.ray_len,
                spec.panels_ray,
                -1.0,
                0.0,
                true,
                &mut moments,
                &mut peak_log10,
                &mut endpoint_log10,
            );
            // real axis from the joint out to +∞
            run_piece(
                spec.real_end - spec.joint,
                spec.panels_real,
                1.0,
                spec.joint,
                false,
                &mut moments,
                &mut peak_log10,
                &mut endpoint_log10,
            );
        }
    }

    // decay check: endpoint magnitude (including the λ^k growth) relative
    // to the peak must clear the requested digits
    let lambda_scale = spec.real_end.max(spec.joint.abs()).max(spec.ray_len) + 1.0;
    let required = -(spec.digits as f64 + 5.0);
    let relative_endpoint = endpoint_log10 - peak_log10 + k_max as f64 * lambda_scale.log10();
    if relative_endpoint > required {
        return Err(ContourError::NonDecaying { endpoint_log10: relative_endpoint, required });
    }

    if negate_odd {
        // λ -> -λ maps the t3 < 0 problem to this one: c_k picks up (-1)^k.
        for (k, moment) in moments.iter_mut().enumerate() {
            if k % 2 == 1 {
                *moment = ctx.cneg(moment);
            }
        }
    }

    Ok((moments, relative_endpoint))
}
