//! Real algebraic numbers as a square-free polynomial plus an isolating interval.

use std::cmp::Ordering;

use super::interval::{interval_eval, RatInterval};
use super::poly::{Polynomial, Space};
use super::rational::Rational;
use super::upoly::{count_roots, refine_cell, sturm_sequence, UPoly};
use crate::error::Result;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RealRoot {
    poly: UPoly,
    iv: RatInterval,
}

impl RealRoot {
    /// `iv` must contain exactly one root of `poly`; a degenerate interval is an exact root.
    pub fn new(poly: &UPoly, iv: RatInterval) -> Result<Self> {
        Ok(RealRoot {
            poly: poly.square_free()?,
            iv,
        })
    }

    pub fn poly(&self) -> &UPoly {
        &self.poly
    }

    pub fn interval(&self) -> &RatInterval {
        &self.iv
    }

    pub fn exact(&self) -> Option<&Rational> {
        self.iv.is_point().then(|| self.iv.lo())
    }

    /// Halves the isolating interval (or collapses it onto a rational root).
    pub fn refine(&mut self) {
        if self.iv.is_point() {
            return;
        }
        let seq = sturm_sequence(&self.poly).expect("nonzero");
        let w = self.iv.width() / Rational::from_int(2);
        self.iv = refine_cell(
            &self.poly,
            &seq,
            self.iv.lo().clone(),
            self.iv.hi().clone(),
            &w,
        );
    }

    pub fn refine_to(&mut self, tol: &Rational) {
        while !self.iv.is_point() && &self.iv.width() > tol {
            self.refine();
        }
    }

    /// Sign of `h` at this root.
    pub fn sign_of(&mut self, h: &UPoly) -> Ordering {
        if let Some(x) = self.exact() {
            return h.sign_at(x);
        }
        if h.is_zero() {
            return Ordering::Equal;
        }
        // A common factor with a root inside the interval means h vanishes here.
        let g = self.poly.gcd(h);
        if g.degree() > 0 && count_roots(&g, &self.iv).unwrap_or(0) > 0 {
            return Ordering::Equal;
        }
        let hp = Polynomial::from_upoly(Space::Free, 0, h);
        loop {
            let bound = interval_eval(&hp, |_| Some(self.iv.clone())).expect("bound");
            match bound.sign() {
                Ordering::Equal => {}
                s => return s,
            }
            self.refine();
            if let Some(x) = self.exact() {
                return h.sign_at(x);
            }
        }
    }
}
