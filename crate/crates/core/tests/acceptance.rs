//! The acceptance suite: one test per criterion, each printing a pass/fail
//! line. Every tolerance is pinned in `trimap::verify`.
//!
//! Run just this suite with `cargo test --test acceptance -- --nocapture`.

use trimap::verify::{self, VerifyConfig};

fn run(name: &str, result: Result<String, String>) {
    match result {
        Ok(detail) => println!("[PASS] {name} — {detail}"),
        Err(detail) => {
            println!("[FAIL] {name} — {detail}");
            panic!("{name}: {detail}");
        }
    }
}

fn config() -> VerifyConfig {
    VerifyConfig::default()
}

#[test]
fn criterion_1_equilibrium_series_exact() {
    run(
        "criterion 1: z0, u0 satisfy the endpoint ideal through s^24, exactly",
        verify::equilibrium_criterion(&config()),
    );
}

#[test]
fn criterion_2_motzkin_pins() {
    run(
        "criterion 2: |P^3(1,0)| = 6, |P^3(2,0)| = 3, six monomials of L^3[n+1,n]",
        verify::motzkin_criterion(),
    );
}

#[test]
fn criterion_3_hierarchy_residuals_and_z1_routes() {
    run(
        "criterion 3: string residuals vanish through n^-3 (s^12); z1 three routes; 810 s^4",
        verify::hierarchy_criterion(&config()),
    );
}

#[test]
fn criterion_4_oracle_pins() {
    run(
        "criterion 4: (3,3) -> {12, 3}, 12 + 3 = 15 matchings; (1,1,3,3) -> 0; (1,1,3,3,3,3) -> 19440",
        verify::oracle_criterion(),
    );
}

#[test]
fn criterion_5_genus_tables() {
    run(
        "criterion 5: e0 triple agreement (j <= 10); e1 and e2 recursions match closed forms",
        verify::genus_criterion(&config()),
    );
}

#[test]
fn criterion_6_ode_identity() {
    run("criterion 6: ODE coefficient identity for g <= 5, k <= 40", verify::ode_criterion());
}

#[test]
fn criterion_7a_numeric_decay_exponents() {
    run(
        "criterion 7a: t3 = 0.03, n in {8,12,16,24}: b2 exponent 4 +- 0.5, a exponent 3 +- 0.5",
        verify::numeric_exponent_criterion(&config()),
    );
}

#[test]
fn criterion_7b_hirota_residual() {
    run(
        "criterion 7b: Hirota residual < 1e-20 at 50 digits, N = 16, n = 12..20",
        verify::hirota_criterion(&config()),
    );
}

#[test]
fn criterion_7c_gaussian_reference() {
    run(
        "criterion 7c: t3 = 0 reproduces a_n = 0, b2_n = n/N to >= 40 digits",
        verify::gaussian_criterion(&config()),
    );
}

#[test]
fn criterion_8_documented_discrepancies() {
    run(
        "criterion 8: contour j=1 emits 3 beside closed-form 3/2; general rule reproduces H1",
        verify::discrepancy_criterion(&config()),
    );
}
