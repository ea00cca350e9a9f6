//! High-precision numerical verification of the asymptotic theory:
//! contour moments of the cubic weight, recurrence-coefficient extraction
//! by two independent routes, and comparison reports against the exact
//! `u_g`, `z_g` expansion.

pub mod compare;
pub mod contour;
pub mod mpf;
pub mod quadrature;
pub mod recurrence;

pub use compare::{asymptotic_comparison, hirota_check, ComparisonReport, HirotaReport};
pub use contour::{contour_moments, ContourSpec, MomentTable};
pub use mpf::{Cpx, Ctx, Real};
pub use recurrence::{recurrence_extract, RecurrenceTable};
