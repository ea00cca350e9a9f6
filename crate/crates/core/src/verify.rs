//! The cross-check suite: every acceptance criterion as a named check.
//!
//! `trimap verify` runs these and exits nonzero on the first failure; the
//! `acceptance` integration test runs each as its own test case. All
//! tolerances are pinned here, in code.

use serde::Serialize;

use crate::asymptotics::{
    self, solve_hierarchy, string_residual, toda_residual, FamilyKind, ResonanceSource,
    SelfSimilarFamily,
};
use crate::equilibrium::{self, equilibrium_series};
use crate::genus::{self, InjectionPolicy};
use crate::motzkin::{enumerate_motzkin, operator_entry};
use crate::numeric::compare::{asymptotic_comparison, gaussian_check, hirota_check, AsymptoticPrediction};
use crate::oracle;
use crate::rational::{rat, rat_i};
use crate::series::PowerSeries;

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn pass(name: &'static str, detail: impl Into<String>) -> Self {
        CheckResult { name, passed: true, detail: detail.into() }
    }

    fn fail(name: &'static str, detail: impl Into<String>) -> Self {
        CheckResult { name, passed: false, detail: detail.into() }
    }

    fn of(name: &'static str, result: Result<String, String>) -> Self {
        match result {
            Ok(detail) => Self::pass(name, detail),
            Err(detail) => Self::fail(name, detail),
        }
    }
}

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    /// Truncation order for the exact series pipeline.
    pub s_order: usize,
    /// Genus depth of the hierarchy and the e_g tower.
    pub g_max: usize,
    /// Run the (slower) high-precision numeric criteria.
    pub numeric: bool,
    pub digits: usize,
    pub t3: f64,
    pub n_list: Vec<usize>,
    pub hirota_big_n: u32,
    pub hirota_range: (usize, usize),
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            s_order: 24,
            g_max: 2,
            numeric: true,
            digits: 50,
            t3: 0.03,
            n_list: vec![8, 12, 16, 24],
            hirota_big_n: 16,
            hirota_range: (12, 20),
        }
    }
}

/// Run every check; the numeric block is skipped when `config.numeric` is
/// false.
pub fn run_all(config: &VerifyConfig) -> Vec<CheckResult> {
    let mut out = vec![
        CheckResult::of("1. equilibrium series solve the endpoint equations exactly", equilibrium_criterion(config)),
        CheckResult::of("2. Motzkin path and operator-entry pins", motzkin_criterion()),
        CheckResult::of("3. hierarchy residuals and the three z1 routes", hierarchy_criterion(config)),
        CheckResult::of("4. oracle map-count pins and the partition identity", oracle_criterion()),
        CheckResult::of("5. genus tables: recursion vs closed forms vs Gamma formula", genus_criterion(config)),
        CheckResult::of("6. ODE coefficient identity (g <= 5, k <= 40)", ode_criterion()),
        CheckResult::of("8. documented discrepancies surface as documented", discrepancy_criterion(config)),
    ];
    if config.numeric {
        out.push(CheckResult::of("7a. numeric decay exponents at t3 = 0.03", numeric_exponent_criterion(config)));
        out.push(CheckResult::of("7b. Hirota second-difference residual", hirota_criterion(config)));
        out.push(CheckResult::of("7c. Gaussian reference to >= 40 digits", gaussian_criterion(config)));
    }
    out
}

pub fn equilibrium_criterion(config: &VerifyConfig) -> Result<String, String> {
    let order = config.s_order;
    let (u0, z0) = equilibrium_series(order).map_err(|e| e.to_string())?;
    if z0.coeff(0) != &rat_i(1) || z0.coeff(2) != &rat_i(36) || z0.coeff(4) != &rat_i(3240) {
        return Err(format!("z0 pins wrong: {z0}"));
    }
    if u0.coeff(1) != &rat_i(-6) || u0.coeff(3) != &rat_i(-324) {
        return Err(format!("u0 pins wrong: {u0}"));
    }
    let (r1, r2) = equilibrium::ideal_residuals(&u0, &z0);
    if !r1.is_zero() || !r2.is_zero() {
        return Err(format!("ideal generators not satisfied: {r1} ; {r2}"));
    }
    let (a1, a2) = equilibrium::endpoint_residuals_series(&u0, &z0);
    if !a1.is_zero() || !a2.is_zero() {
        return Err("endpoint conditions not satisfied".to_string());
    }
    Ok(format!("both generators vanish identically through s^{order} (exact)"))
}

pub fn motzkin_criterion() -> Result<String, String> {
    let p310 = enumerate_motzkin(3, 1, 0).len();
    let p320 = enumerate_motzkin(3, 2, 0).len();
    if p310 != 6 || p320 != 3 {
        return Err(format!("|P^3(1,0)| = {p310} (want 6), |P^3(2,0)| = {p320} (want 3)"));
    }
    // the six monomials of L^3[n+1, n]
    let entry = operator_entry(3, 1, 0);
    let mono = |a: &[i64], b2: &[i64]| {
        let mut a = a.to_vec();
        let mut b = b2.to_vec();
        a.sort_unstable();
        b.sort_unstable();
        crate::motzkin::Monomial { t_pow: 0, a, b2: b }
    };
    let expected = [
        mono(&[1, 1], &[1]),
        mono(&[1, 0], &[1]),
        mono(&[0, 0], &[1]),
        mono(&[], &[1, 0]),
        mono(&[], &[2, 1]),
        mono(&[], &[1, 1]),
    ];
    if entry.term_count() != 6 {
        return Err(format!("L^3[1,0] has {} terms, want 6", entry.term_count()));
    }
    for m in &expected {
        if !entry.terms().any(|(em, c)| em == m && c == 1) {
            return Err(format!("L^3[1,0] missing monomial {m:?}"));
        }
    }
    Ok("|P^3(1,0)| = 6, |P^3(2,0)| = 3, L^3[n+1,n] reproduces the six monomials".to_string())
}

pub fn hierarchy_criterion(config: &VerifyConfig) -> Result<String, String> {
    let s_order = config.s_order.max(12);
    let sol = solve_hierarchy(1, s_order, &ResonanceSource::default_chain()).map_err(|e| e.to_string())?;
    // residuals vanish through n^-3 at s-order >= 12 with (u0,u1,u2,z0,z1)
    let h = sol.h_family();
    let f = sol.f_family();
    let (sub, diag) = string_residual(&h, &f, 3, 12).map_err(|e| e.to_string())?;
    for r in 0..=3 {
        if !sub.coeff(r).is_zero() || !diag.coeff(r).is_zero() {
            return Err(format!("string residual nonzero at n^-{r}"));
        }
    }
    // three independent routes for z1
    let z1_hierarchy = &sol.z[1];
    let (_, z1_bracket) = asymptotics::h2_f1_closed(&sol.u[0], &sol.z[0]);
    let z1_rational = asymptotics::z1_closed_in_z0(&sol.z[0], s_order).map_err(|e| e.to_string())?;
    if z1_hierarchy != &z1_bracket.truncate(z1_hierarchy.order()) {
        return Err("z1: hierarchy vs integrating-factor closed form disagree".to_string());
    }
    if z1_hierarchy != &z1_rational.truncate(z1_hierarchy.order()) {
        return Err("z1: hierarchy vs rational-in-z0 expression disagree".to_string());
    }
    if z1_hierarchy.coeff(4) != &rat_i(810) {
        return Err(format!("z1 leading coefficient {} != 810", z1_hierarchy.coeff(4)));
    }
    Ok("string residuals vanish through n^-3 (s^12); three z1 routes agree exactly; z1 = 810 s^4 + ...".to_string())
}

pub fn oracle_criterion() -> Result<String, String> {
    let partition = oracle::count_all_genera(&[3, 3]).map_err(|e| e.to_string())?;
    let g0 = partition.by_genus.get(&0).copied().unwrap_or(0);
    let g1 = partition.by_genus.get(&1).copied().unwrap_or(0);
    if g0 != 12 || g1 != 3 || partition.disconnected != 0 {
        return Err(format!("(3,3) partition {{g0: {g0}, g1: {g1}}}, disconnected {}", partition.disconnected));
    }
    if partition.matchings_examined != 15 {
        return Err(format!("(3,3) examined {} matchings, want 15 = 5!!", partition.matchings_examined));
    }
    let small = oracle::count_maps(&[1, 1, 3, 3], 1).map_err(|e| e.to_string())?;
    if small.count != 0 {
        return Err(format!("(1,1,3,3) genus 1 count {} != 0", small.count));
    }
    let big = oracle::count_maps(&[1, 1, 3, 3, 3, 3], 1).map_err(|e| e.to_string())?;
    if big.count != 19440 {
        return Err(format!("(1,1,3,3,3,3) genus 1 count {} != 19440", big.count));
    }
    Ok("(3,3) -> {12, 3} with 12 + 3 = 15 matchings; (1,1,3,3) -> 0; (1,1,3,3,3,3) -> 19440".to_string())
}

pub fn genus_criterion(config: &VerifyConfig) -> Result<String, String> {
    let s_order = config.s_order.max(20);
    let sol = solve_hierarchy(config.g_max.max(2), s_order, &ResonanceSource::default_chain())
        .map_err(|e| e.to_string())?;
    let egs = genus::solve_tower(2, &sol.z, &InjectionPolicy::default()).map_err(|e| e.to_string())?;

    // e0: recursion = closed form = Gamma formula for j <= 10
    let e0_closed = genus::eg_closed_series(0, &sol.z[0]).map_err(|e| e.to_string())?;
    if egs[0].series != e0_closed.truncate(egs[0].series.order()) {
        return Err("e0 recursion vs closed form".to_string());
    }
    for j in 1..=10usize {
        if egs[0].series.coeff(2 * j) != &genus::taylor_e0_gamma(j) {
            return Err(format!("e0 Gamma formula at j = {j}"));
        }
    }
    // e1: s^2 injected as 3/2 from the oracle; matches closed form through s^20
    if egs[1].series.coeff(2) != &rat(3, 2) {
        return Err("e1 s^2 coefficient != 3/2".to_string());
    }
    if egs[1].provenance_tag(2) != "injected:oracle" {
        return Err("e1 s^2 provenance is not the oracle".to_string());
    }
    let e1_closed = genus::eg_closed_series(1, &sol.z[0]).map_err(|e| e.to_string())?;
    if egs[1].series != e1_closed.truncate(egs[1].series.order()) {
        return Err("e1 recursion vs closed form".to_string());
    }
    // e2: two injected resonances; every other order is a genuine match
    if egs[2].injected.len() != 2 {
        return Err(format!("e2 injected {} values, want 2", egs[2].injected.len()));
    }
    let e2_closed = genus::eg_closed_series(2, &sol.z[0]).map_err(|e| e.to_string())?;
    if egs[2].series != e2_closed.truncate(egs[2].series.order()) {
        return Err("e2 recursion vs closed form".to_string());
    }
    Ok(format!(
        "e0 (triple route, j <= 10), e1 (s^2 = 3/2 injected:oracle), e2 (2 injections) all match closed forms through s^{}",
        egs[2].series.order()
    ))
}

pub fn ode_criterion() -> Result<String, String> {
    if genus::ode_identity_holds(5, 40) {
        Ok("(2-2g)(1-2g) + (7-8g)k/2 + k(2k-1)/2 = (1-2g+k)(2-2g+k) for all g <= 5, k <= 40".to_string())
    } else {
        Err("identity violated".to_string())
    }
}

pub fn discrepancy_criterion(config: &VerifyConfig) -> Result<String, String> {
    // the printed genus-one contour formula vs the closed-form coefficient
    let (_, z0) = equilibrium_series(config.s_order.max(8)).map_err(|e| e.to_string())?;
    let e1 = genus::eg_closed_series(1, &z0).map_err(|e| e.to_string())?;
    let report = genus::e1_contour_report(1, &e1);
    if report.contour_formula != "3" || report.closed_form_coefficient != "3/2" || report.agree {
        return Err(format!(
            "expected contour 3 vs closed 3/2 flagged, got {} vs {} (agree = {})",
            report.contour_formula, report.closed_form_coefficient, report.agree
        ));
    }
    // the general second-difference rule reproduces the genus-one driver
    let e0 = genus::eg_closed_series(0, &z0).map_err(|e| e.to_string())?;
    let general = genus::second_difference_lhs(1, std::slice::from_ref(&e0), e0.order());
    let (d4, _) = asymptotics::self_similar_derivative(&e0, &rat_i(2), 4);
    if general != d4.scale(&rat(1, 12)) {
        return Err("general second-difference rule does not reproduce (1/12) d_w^4 w^2 e0 at g = 1".to_string());
    }
    Ok("contour j=1 gives 3 vs closed-form 3/2 (flagged, unreconciled); general second-difference rule = (1/12) d_w^4 w^2 e0 at g = 1".to_string())
}

pub fn numeric_exponent_criterion(config: &VerifyConfig) -> Result<String, String> {
    let sol = solve_hierarchy(2, config.s_order, &ResonanceSource::default_chain())
        .map_err(|e| e.to_string())?;
    let pred = AsymptoticPrediction { u: &sol.u, z: &sol.z };
    let report = asymptotic_comparison(config.t3, &config.n_list, config.digits, &pred)
        .map_err(|e| e.to_string())?;
    let b2_ok = (report.b2_fitted_exponent - 4.0).abs() <= 0.5;
    let a_ok = (report.a_fitted_exponent - 3.0).abs() <= 0.5;
    if !b2_ok || !a_ok {
        return Err(format!(
            "fitted exponents: b2 {:.3} (want 4 +- 0.5), a {:.3} (want 3 +- 0.5)",
            report.b2_fitted_exponent, report.a_fitted_exponent
        ));
    }
    // the two extraction routes must agree far beyond the comparison scale
    for row in &report.rows {
        if row.route_disagreement_log10 >= -30.0 {
            return Err(format!(
                "Hankel/Stieltjes routes disagree at n = {}: 10^{:.1} (want < 1e-30)",
                row.n, row.route_disagreement_log10
            ));
        }
    }
    Ok(format!(
        "b2 exponent {:.3} (4 +- 0.5), a exponent {:.3} (3 +- 0.5) over n in {:?}; dual routes agree to < 1e-30",
        report.b2_fitted_exponent, report.a_fitted_exponent, config.n_list
    ))
}

pub fn hirota_criterion(config: &VerifyConfig) -> Result<String, String> {
    let (z0_series, _) = {
        let (u0, z0) = equilibrium_series(config.s_order).map_err(|e| e.to_string())?;
        (z0, u0)
    };
    let report = hirota_check(
        config.t3,
        config.hirota_big_n,
        config.hirota_range.0..=config.hirota_range.1,
        config.digits,
        &z0_series,
    )
    .map_err(|e| e.to_string())?;
    if report.max_residual_log10 >= -20.0 {
        return Err(format!("max Hirota residual 10^{:.2} (want < 1e-20)", report.max_residual_log10));
    }
    // the second difference equals log z0 at the x-rescaled coupling up to
    // the O(n^-2) correction z1/z0/n^2 ~ 1e-5 on this range
    let worst_tracking = report
        .rows
        .iter()
        .map(|r| r.against_log_z0_log10)
        .fold(f64::NEG_INFINITY, f64::max);
    if worst_tracking >= -4.0 {
        return Err(format!(
            "second difference strays from log z0 by 10^{worst_tracking:.2} (want < 1e-4)"
        ));
    }
    Ok(format!(
        "max residual 10^{:.1} over n = {}..{} at N = {} (< 1e-20); second difference tracks log z0 to 10^{:.1}",
        report.max_residual_log10,
        config.hirota_range.0,
        config.hirota_range.1,
        config.hirota_big_n,
        worst_tracking
    ))
}

pub fn gaussian_criterion(config: &VerifyConfig) -> Result<String, String> {
    let report = gaussian_check(config.hirota_big_n, config.hirota_big_n as usize, config.digits)
        .map_err(|e| e.to_string())?;
    if report.max_a_log10 >= -40.0 || report.max_b2_dev_log10 >= -40.0 {
        return Err(format!(
            "Gaussian noise floors: a 10^{:.1}, b2 10^{:.1} (want both < 1e-40)",
            report.max_a_log10, report.max_b2_dev_log10
        ));
    }
    Ok(format!(
        "a_n = 0 to 10^{:.1}, b2_n = n/N to 10^{:.1}",
        report.max_a_log10, report.max_b2_dev_log10
    ))
}

/// One self-consistency helper for `verify`: the residual vanishing of the
/// fully solved hierarchy at a requested depth (used by the CLI hierarchy
/// subcommand's certificate).
pub fn residual_certificate(
    u: &[PowerSeries],
    z: &[PowerSeries],
    max_r: usize,
    s_order: usize,
) -> Result<String, String> {
    let h = SelfSimilarFamily::new(FamilyKind::H, u.to_vec());
    let f = SelfSimilarFamily::new(FamilyKind::F, z.to_vec());
    let (sub, diag) = string_residual(&h, &f, max_r, s_order).map_err(|e| e.to_string())?;
    let (ta, tb) = toda_residual(&h, &f, max_r, s_order).map_err(|e| e.to_string())?;
    for r in 0..=max_r {
        for (name, series) in [("string-subdiagonal", sub.coeff(r)), ("string-diagonal", diag.coeff(r)), ("toda-a", ta.coeff(r)), ("toda-b", tb.coeff(r))] {
            if !series.is_zero() {
                return Err(format!("{name} residual nonzero at n^-{r}: {series}"));
            }
        }
    }
    Ok(format!("all four residuals vanish identically through n^-{max_r} at s-order {s_order}"))
}
