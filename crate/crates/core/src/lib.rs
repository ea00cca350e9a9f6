//! Exact machinery for the genus expansion of the cubic (trivalent)
//! random-matrix free energy.
//!
//! The pipeline, bottom to top:
//!
//! * [`series`] — truncated formal power series over exact rationals;
//! * [`motzkin`] — Motzkin-path weights, symbolic entries of powers of the
//!   recursion operator, and the difference string / Toda lattice systems;
//! * [`equilibrium`] — the leading-order equilibrium data `(u0, z0, A, B)`,
//!   both as exact series in the coupling and numerically;
//! * [`asymptotics`] — the continuum-limit engine: self-similar families,
//!   residuals of the string/Toda systems order by order in `1/n`, and the
//!   recursive solver for the trivalent hierarchy `u_g`, `z_g`;
//! * [`genus`] — the free-energy coefficients `e_g`: drivers, the
//!   second-difference ODE recursion with resonance handling, closed forms;
//! * [`oracle`] — brute-force map counting over permutation pairs, the
//!   ground truth for resonance constants;
//! * [`numeric`] — high-precision contour moments, recurrence coefficients
//!   and their comparison against the asymptotic expansion;
//! * [`verify`] — the cross-check suite behind `trimap verify`.

pub mod asymptotics;
pub mod equilibrium;
pub mod genus;
pub mod motzkin;
pub mod numeric;
pub mod oracle;
pub mod rational;
pub mod series;
pub mod verify;

pub use rational::{rat, rat_from_string, rat_i, rat_to_string, Rational};
pub use series::{implicit_solve, BivariatePoly, PowerSeries, SeriesError};
