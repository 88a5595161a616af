//! Exact exterior calculus over R^n with rational-function coefficients, and
//! a mechanics layer for divergence-free flows: Nambu brackets, vector
//! Hamiltonians, splitting certificates and a floating-point cross-check lab.

pub mod exprcore;
pub mod extcalc;
pub mod mech;
pub mod numlab;
pub mod systems;
