//! Exact numeric substrate: rationals, polynomials, Sturm chains, intervals.

pub mod algebraic;
pub mod interval;
pub mod poly;
pub mod rational;
pub mod upoly;

pub use algebraic::RealRoot;
pub use interval::{interval_eval, RatInterval};
pub use poly::{parse_poly, poly_arith, ArithOp, Monomial, Polynomial, Space, Var};
pub use rational::{parse_number, Rational};
pub use upoly::{
    count_roots, count_roots_closed, isolate_roots, sign_variations, sturm_sequence, UPoly,
};
