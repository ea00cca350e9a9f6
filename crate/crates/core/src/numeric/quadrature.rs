//! Gauss-Legendre nodes and weights at working precision.

use super::mpf::{Ctx, Real};

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`.
///
/// Nodes are found by Newton refinement of the Chebyshev-like initial
/// guesses; weights use `w = 2 / ((1 - x^2) P_n'(x)^2)`.
pub fn gauss_legendre(ctx: &Ctx, n: usize) -> Vec<(Real, Real)> {
    assert!(n >= 1);
    let one = ctx.from_i64(1);
    let two = ctx.from_i64(2);
    let mut out = Vec::with_capacity(n);
    let newton_rounds = 8 + ctx.prec / 16;
    for i in 0..n {
        // x0 = cos(pi (i + 3/4) / (n + 1/2))
        let guess = {
            let num = ctx.mul(&ctx.pi(), &ctx.from_f64(i as f64 + 0.75));
            let den = ctx.from_f64(n as f64 + 0.5);
            ctx.cos(&ctx.div(&num, &den))
        };
        let mut x = guess;
        for _ in 0..newton_rounds {
            let (p, d) = legendre_with_derivative(ctx, n, &x);
            let step = ctx.div(&p, &d);
            x = ctx.sub(&x, &step);
            if ctx.is_negligible(&step, (ctx.prec as f64 * 0.301) as i64) {
                let (p2, d2) = legendre_with_derivative(ctx, n, &x);
                x = ctx.sub(&x, &ctx.div(&p2, &d2));
                break;
            }
        }
        let (_, d) = legendre_with_derivative(ctx, n, &x);
        let w = ctx.div(
            &two,
            &ctx.mul(&ctx.sub(&one, &ctx.mul(&x, &x)), &ctx.mul(&d, &d)),
        );
        out.push((x, w));
    }
    out
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre_with_derivative(ctx: &Ctx, n: usize, x: &Real) -> (Real, Real) {
    let mut p_prev = ctx.from_i64(1);
    let mut p = x.clone();
    if n == 0 {
        return (p_prev, ctx.from_i64(0));
    }
    for k in 1..n {
        // (k+1) P_{k+1} = (2k+1) x P_k - k P_{k-1}
        let a = ctx.mul(&ctx.from_i64(2 * k as i64 + 1), &ctx.mul(x, &p));
        let b = ctx.mul(&ctx.from_i64(k as i64), &p_prev);
        let next = ctx.div(&ctx.sub(&a, &b), &ctx.from_i64(k as i64 + 1));
        p_prev = p;
        p = next;
    }
    // P_n'(x) = n (x P_n - P_{n-1}) / (x^2 - 1)
    let num = ctx.mul(
        &ctx.from_i64(n as i64),
        &ctx.sub(&ctx.mul(x, &p), &p_prev),
    );
    let den = ctx.sub(&ctx.mul(x, x), &ctx.from_i64(1));
    (p.clone(), ctx.div(&num, &den))
}

/// Integrate `f` over `[a, b]` with `panels` equal panels of `nodes`-point
/// Gauss-Legendre each.
pub fn integrate<F>(ctx: &Ctx, rule: &[(Real, Real)], a: &Real, b: &Real, panels: usize, mut f: F) -> Real
where
    F: FnMut(&Real) -> Real,
{
    let width = ctx.div(&ctx.sub(b, a), &ctx.from_i64(panels as i64));
    let half = ctx.div(&width, &ctx.from_i64(2));
    let mut total = ctx.from_i64(0);
    for p in 0..panels {
        let left = ctx.add(a, &ctx.mul(&width, &ctx.from_i64(p as i64)));
        let center = ctx.add(&left, &half);
        let mut acc = ctx.from_i64(0);
        for (x, w) in rule {
            let point = ctx.add(&center, &ctx.mul(&half, x));
            acc = ctx.add(&acc, &ctx.mul(w, &f(&point)));
        }
        total = ctx.add(&total, &ctx.mul(&acc, &half));
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_two() {
        let ctx = Ctx::with_digits(50);
        for n in [4, 17, 32] {
            let rule = gauss_legendre(&ctx, n);
            let mut sum = ctx.from_i64(0);
            for (_, w) in &rule {
                sum = ctx.add(&sum, w);
            }
            assert!(ctx.is_negligible(&ctx.sub(&sum, &ctx.from_i64(2)), 45), "n = {n}");
        }
    }

    #[test]
    fn exact_on_polynomials() {
        // n-point GL is exact through degree 2n-1: check x^14 with n = 8.
        let ctx = Ctx::with_digits(50);
        let rule = gauss_legendre(&ctx, 8);
        let got = integrate(&ctx, &rule, &ctx.from_i64(-1), &ctx.from_i64(1), 1, |x| ctx.powi(x, 14));
        let expected = ctx.div(&ctx.from_i64(2), &ctx.from_i64(15));
        assert!(ctx.is_negligible(&ctx.sub(&got, &expected), 45));
    }

    #[test]
    fn gaussian_integral_on_panels() {
        // ∫_{-8}^{8} e^{-x^2} dx = sqrt(pi) to ~28 digits (tail < 1e-28)
        let ctx = Ctx::with_digits(40);
        let rule = gauss_legendre(&ctx, 32);
        let got = integrate(&ctx, &rule, &ctx.from_i64(-8), &ctx.from_i64(8), 16, |x| {
            ctx.exp(&ctx.neg(&ctx.mul(x, x)))
        });
        let expected = ctx.sqrt(&ctx.pi());
        assert!(ctx.is_negligible(&ctx.sub(&got, &expected), 25));
    }
}
