//! Closed intervals with exact rational endpoints.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;

use super::poly::{var_name, Polynomial, Var};
use super::rational::Rational;
use crate::error::{Error, Result};

/// Endpoints taller than this many bits are rounded outward.
pub const MAX_ENDPOINT_BITS: u64 = 512;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatInterval {
    lo: Rational,
    hi: Rational,
}

impl RatInterval {
    pub fn new(lo: Rational, hi: Rational) -> Result<Self> {
        if lo > hi {
            return Err(Error::Invalid(format!("empty interval [{lo}, {hi}]")));
        }
        Ok(RatInterval { lo, hi })
    }

    pub fn point(x: Rational) -> Self {
        RatInterval {
            lo: x.clone(),
            hi: x,
        }
    }

    pub fn unit() -> Self {
        RatInterval {
            lo: Rational::zero(),
            hi: Rational::one(),
        }
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn mid(&self) -> Rational {
        (&self.lo + &self.hi) / Rational::from_int(2)
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    /// `Less` if entirely negative, `Greater` if entirely positive, else `Equal`.
    pub fn sign(&self) -> Ordering {
        if self.lo.is_positive() {
            Ordering::Greater
        } else if self.hi.is_negative() {
            Ordering::Less
        } else {
            Ordering::Equal
        }
    }

    pub fn add(&self, o: &RatInterval) -> Self {
        RatInterval {
            lo: &self.lo + &o.lo,
            hi: &self.hi + &o.hi,
        }
        .rounded()
    }

    pub fn neg(&self) -> Self {
        RatInterval {
            lo: -&self.hi,
            hi: -&self.lo,
        }
    }

    pub fn sub(&self, o: &RatInterval) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let (a, b) = (&self.lo * c, &self.hi * c);
        if c.is_negative() {
            RatInterval { lo: b, hi: a }
        } else {
            RatInterval { lo: a, hi: b }
        }
        .rounded()
    }

    pub fn mul(&self, o: &RatInterval) -> Self {
        let ps = [
            &self.lo * &o.lo,
            &self.lo * &o.hi,
            &self.hi * &o.lo,
            &self.hi * &o.hi,
        ];
        let lo = ps.iter().min().expect("nonempty").clone();
        let hi = ps.iter().max().expect("nonempty").clone();
        RatInterval { lo, hi }.rounded()
    }

    pub fn pow(&self, e: u32) -> Self {
        if e == 0 {
            return Self::point(Rational::one());
        }
        let (a, b) = (self.lo.pow(e), self.hi.pow(e));
        let r = if e % 2 == 1 {
            RatInterval { lo: a, hi: b }
        } else if self.lo.is_negative() && self.hi.is_positive() {
            RatInterval {
                lo: Rational::zero(),
                hi: Rational::max(&a, &b),
            }
        } else {
            RatInterval {
                lo: Rational::min(&a, &b),
                hi: Rational::max(&a, &b),
            }
        };
        r.rounded()
    }

    pub fn hull(&self, o: &RatInterval) -> Self {
        RatInterval {
            lo: Rational::min(&self.lo, &o.lo),
            hi: Rational::max(&self.hi, &o.hi),
        }
    }

    pub fn intersect(&self, o: &RatInterval) -> Option<Self> {
        let lo = Rational::max(&self.lo, &o.lo);
        let hi = Rational::min(&self.hi, &o.hi);
        (lo <= hi).then_some(RatInterval { lo, hi })
    }

    pub fn split(&self) -> (Self, Self) {
        let m = self.mid();
        (
            RatInterval {
                lo: self.lo.clone(),
                hi: m.clone(),
            },
            RatInterval {
                lo: m,
                hi: self.hi.clone(),
            },
        )
    }

    /// Rounds endpoints taller than [`MAX_ENDPOINT_BITS`] outward to dyadics.
    pub fn rounded(self) -> Self {
        let cap = MAX_ENDPOINT_BITS;
        if self.lo.height_bits() <= cap && self.hi.height_bits() <= cap {
            return self;
        }
        RatInterval {
            lo: round_dyadic(&self.lo, cap, false),
            hi: round_dyadic(&self.hi, cap, true),
        }
    }
}

/// Nearest multiple of `2^-k` below (or above), with `k` chosen so the result
/// stays within `cap` bits whenever the value is at most 1 in magnitude.
fn round_dyadic(x: &Rational, cap: u64, up: bool) -> Rational {
    if x.height_bits() <= cap {
        return x.clone();
    }
    let int_bits = x.abs().floor().bits();
    let k = cap.saturating_sub(int_bits + 2).max(1) as u32;
    let scale = BigInt::from(1) << k;
    let scaled = x * Rational::from_bigint(scale.clone());
    let n = if up { scaled.ceil() } else { scaled.floor() };
    Rational::from_bigs(n, scale).expect("nonzero")
}

impl fmt::Display for RatInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

impl fmt::Debug for RatInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Sound enclosure of the range of `p` over the box.
pub fn interval_eval(
    p: &Polynomial,
    bx: impl Fn(Var) -> Option<RatInterval>,
) -> Result<RatInterval> {
    let mut acc = RatInterval::point(Rational::zero());
    for (m, c) in p.terms() {
        let mut t = RatInterval::point(c.clone());
        for &(v, e) in m.pairs() {
            let iv = bx(v).ok_or_else(|| Error::UnboundVariable(var_name(p.space(), v)))?;
            t = t.mul(&iv.pow(e));
        }
        acc = acc.add(&t);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::poly::{parse_poly, Space};

    fn r(p: i64, q: i64) -> Rational {
        Rational::frac(p, q)
    }

    #[test]
    fn product_on_unit_square() {
        let p = parse_poly("y0*y1", Space::Free, &|s| s[1..].parse().ok()).unwrap();
        let out = interval_eval(&p, |_| Some(RatInterval::unit())).unwrap();
        assert_eq!(out, RatInterval::unit());
    }

    #[test]
    fn dependency_not_tracked() {
        let y = Polynomial::var(Space::Free, 0);
        let p = y.sub(&y);
        let out = interval_eval(&p, |_| Some(RatInterval::unit())).unwrap();
        assert!(out.contains_zero());
    }

    #[test]
    fn quintic_on_box_is_sound() {
        let p = parse_poly("z - 1/2 - z^5", Space::Free, &|_| Some(0)).unwrap();
        let bx = RatInterval::new(r(3, 5), r(7, 10)).unwrap();
        let out = interval_eval(&p, |_| Some(bx.clone())).unwrap();
        // Dense sampling oracle: every sampled value lies inside the enclosure.
        for k in 0..=100 {
            let z = r(3, 5) + r(k, 1000);
            let v = p.eval_slice(&[z]).unwrap();
            assert!(out.contains(&v));
        }
        // The enclosure ignores dependency, so it is wider than the true range.
        assert!(out.lo() < &r(0, 1));
    }

    #[test]
    fn even_power_straddling_zero() {
        let iv = RatInterval::new(r(-1, 2), r(1, 3)).unwrap();
        assert_eq!(iv.pow(2), RatInterval::new(r(0, 1), r(1, 4)).unwrap());
        assert_eq!(iv.pow(3), RatInterval::new(r(-1, 8), r(1, 27)).unwrap());
    }

    #[test]
    fn outward_rounding_caps_height() {
        let big = Rational::from_bigs(BigInt::from(1), (BigInt::from(3)).pow(400)).unwrap();
        let x = Rational::frac(1, 7) + big;
        let iv = RatInterval::new(x.clone(), &x + Rational::frac(1, 1000))
            .unwrap()
            .rounded();
        assert!(iv.lo() <= &x && iv.lo().height_bits() <= MAX_ENDPOINT_BITS);
        let iv2 = RatInterval::new(-&x, -&x).unwrap().rounded();
        assert!(iv2.lo() <= &-&x && &-&x <= iv2.hi());
    }
}
