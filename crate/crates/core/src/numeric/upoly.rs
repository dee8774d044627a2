//! Dense univariate polynomials, Sturm chains and real root isolation.

use std::cmp::Ordering;
use std::fmt;

use super::interval::RatInterval;
use super::rational::Rational;
use crate::error::{Error, Result};

/// Coefficients in ascending order, no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct UPoly {
    coefs: Vec<Rational>,
}

impl UPoly {
    pub fn new(mut coefs: Vec<Rational>) -> Self {
        while coefs.last().is_some_and(|c| c.is_zero()) {
            coefs.pop();
        }
        UPoly { coefs }
    }

    pub fn zero() -> Self {
        UPoly { coefs: Vec::new() }
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    /// `z`.
    pub fn x() -> Self {
        Self::new(vec![Rational::zero(), Rational::one()])
    }

    pub fn from_ints(cs: &[i64]) -> Self {
        Self::new(cs.iter().map(|&c| Rational::from_int(c)).collect())
    }

    /// Monic product of `(z - r)` over the given roots.
    pub fn from_roots(roots: &[Rational]) -> Self {
        roots
            .iter()
            .fold(Self::constant(Rational::one()), |acc, r| {
                acc.mul(&Self::new(vec![-r, Rational::one()]))
            })
    }

    pub fn coefs(&self) -> &[Rational] {
        &self.coefs
    }

    pub fn is_zero(&self) -> bool {
        self.coefs.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coefs.len().saturating_sub(1)
    }

    pub fn lead(&self) -> Rational {
        self.coefs.last().cloned().unwrap_or_default()
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coefs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn sign_at(&self, x: &Rational) -> Ordering {
        self.eval(x).signum()
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coefs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * Rational::from_int(k as i64))
                .collect(),
        )
    }

    pub fn add(&self, o: &UPoly) -> Self {
        let n = self.coefs.len().max(o.coefs.len());
        Self::new(
            (0..n)
                .map(|i| {
                    let a = self.coefs.get(i).cloned().unwrap_or_default();
                    match o.coefs.get(i) {
                        Some(b) => a + b,
                        None => a,
                    }
                })
                .collect(),
        )
    }

    pub fn sub(&self, o: &UPoly) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        UPoly {
            coefs: self.coefs.iter().map(|c| -c).collect(),
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::new(self.coefs.iter().map(|a| a * c).collect())
    }

    pub fn mul(&self, o: &UPoly) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let mut out = vec![Rational::zero(); self.coefs.len() + o.coefs.len() - 1];
        for (i, a) in self.coefs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coefs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::constant(Rational::one()), |acc, _| acc.mul(self))
    }

    /// Euclidean division; fails on a zero divisor.
    pub fn div_rem(&self, d: &UPoly) -> Result<(UPoly, UPoly)> {
        if d.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let mut r = self.coefs.clone();
        let dl = d.lead();
        let dd = d.degree();
        if self.is_zero() || self.degree() < dd {
            return Ok((Self::zero(), self.clone()));
        }
        let mut q = vec![Rational::zero(); self.degree() - dd + 1];
        for k in (0..q.len()).rev() {
            let c = &r[k + dd] / &dl;
            if !c.is_zero() {
                for (j, dc) in d.coefs.iter().enumerate() {
                    r[k + j] -= &c * dc;
                }
            }
            q[k] = c;
        }
        r.truncate(dd);
        Ok((Self::new(q), Self::new(r)))
    }

    pub fn rem(&self, d: &UPoly) -> Result<UPoly> {
        Ok(self.div_rem(d)?.1)
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(&self.lead().recip().expect("nonzero lead"))
    }

    /// Monic greatest common divisor; `gcd(0, 0) = 0`.
    pub fn gcd(&self, o: &UPoly) -> Self {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b).expect("nonzero divisor");
            a = b;
            b = r;
        }
        a.monic()
    }

    /// `(g, s, t)` with `g = s*self + t*o` and `g` monic.
    pub fn ext_gcd(&self, o: &UPoly) -> (UPoly, UPoly, UPoly) {
        let one = Self::constant(Rational::one());
        let (mut r0, mut r1) = (self.clone(), o.clone());
        let (mut s0, mut s1) = (one.clone(), Self::zero());
        let (mut t0, mut t1) = (Self::zero(), one);
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1).expect("nonzero divisor");
            let s = s0.sub(&q.mul(&s1));
            let t = t0.sub(&q.mul(&t1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s);
            t0 = std::mem::replace(&mut t1, t);
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let k = r0.lead().recip().expect("nonzero lead");
        (r0.scale(&k), s0.scale(&k), t0.scale(&k))
    }

    /// `p / gcd(p, p')`, monic: same distinct roots, all simple.
    pub fn square_free(&self) -> Result<UPoly> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        if self.degree() == 0 {
            return Ok(Self::constant(Rational::one()));
        }
        let g = self.gcd(&self.derivative());
        Ok(self.div_rem(&g)?.0.monic())
    }

    /// `p(a z + b)`.
    pub fn compose_affine(&self, a: &Rational, b: &Rational) -> UPoly {
        let lin = Self::new(vec![b.clone(), a.clone()]);
        let mut acc = Self::zero();
        for c in self.coefs.iter().rev() {
            acc = acc.mul(&lin).add(&Self::constant(c.clone()));
        }
        acc
    }
}

impl fmt::Display for UPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = super::poly::Polynomial::from_upoly(super::poly::Space::Free, 0, self);
        write!(f, "{}", p.display(&|_, _| "z".to_string()))
    }
}

impl fmt::Debug for UPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// `p0 = p, p1 = p', p_{k+1} = -rem(p_{k-1}, p_k)`, ending at the last nonzero entry.
pub fn sturm_sequence(p: &UPoly) -> Result<Vec<UPoly>> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let mut seq = vec![p.clone()];
    let d = p.derivative();
    if d.is_zero() {
        return Ok(seq);
    }
    seq.push(d);
    loop {
        let k = seq.len();
        let r = seq[k - 2].rem(&seq[k - 1])?.neg();
        if r.is_zero() {
            return Ok(seq);
        }
        seq.push(r);
    }
}

/// Sign changes of the sequence at `x`, zeros skipped.
pub fn sign_variations(seq: &[UPoly], x: &Rational) -> usize {
    let mut last = Ordering::Equal;
    let mut count = 0;
    for p in seq {
        let s = p.sign_at(x);
        if s == Ordering::Equal {
            continue;
        }
        if last != Ordering::Equal && s != last {
            count += 1;
        }
        last = s;
    }
    count
}

/// Distinct real roots in the half-open interval `(lo, hi]`.
///
/// The chain is built on the square-free part, for which the variation
/// difference counts exactly the roots in `(lo, hi]` even when an endpoint is
/// itself a root: at a simple root the chain's variation equals its value just
/// to the right.
pub fn count_roots(p: &UPoly, iv: &RatInterval) -> Result<usize> {
    let q = p.square_free()?;
    let seq = sturm_sequence(&q)?;
    Ok(count_with(&seq, iv.lo(), iv.hi()))
}

fn count_with(seq: &[UPoly], lo: &Rational, hi: &Rational) -> usize {
    sign_variations(seq, lo).saturating_sub(sign_variations(seq, hi))
}

/// Distinct real roots in the closed interval.
pub fn count_roots_closed(p: &UPoly, iv: &RatInterval) -> Result<usize> {
    let at_lo = usize::from(!p.is_zero() && p.eval(iv.lo()).is_zero());
    Ok(count_roots(p, iv)? + at_lo)
}

/// Default isolation width.
pub fn default_tolerance() -> Rational {
    Rational::frac(1, 1_000_000_000_000)
}

/// Disjoint closed intervals, one per distinct root in `iv`, each of width at
/// most `tol` unless collapsed to an exact rational root.
pub fn isolate_roots(p: &UPoly, iv: &RatInterval, tol: &Rational) -> Result<Vec<RatInterval>> {
    let q = p.square_free()?;
    let seq = sturm_sequence(&q)?;
    let mut out = Vec::new();
    if q.eval(iv.lo()).is_zero() {
        out.push(RatInterval::point(iv.lo().clone()));
    }
    let mut stack = vec![(iv.lo().clone(), iv.hi().clone())];
    let mut cells = Vec::new();
    // Depth-first, left to right.
    while let Some((a, b)) = stack.pop() {
        let c = count_with(&seq, &a, &b);
        if c == 0 {
            continue;
        }
        if c == 1 {
            cells.push((a, b));
            continue;
        }
        let m = (&a + &b) / Rational::from_int(2);
        stack.push((m.clone(), b));
        stack.push((a, m));
    }
    for (a, b) in cells {
        out.push(refine_cell(&q, &seq, a, b, tol));
    }
    Ok(out)
}

/// Shrinks a cell `(a, b]` holding exactly one root of `q`.
pub(crate) fn refine_cell(
    q: &UPoly,
    seq: &[UPoly],
    mut a: Rational,
    mut b: Rational,
    tol: &Rational,
) -> RatInterval {
    let two = Rational::from_int(2);
    loop {
        if q.eval(&b).is_zero() {
            return RatInterval::point(b);
        }
        let wide = &b - &a > *tol;
        if !wide {
            let s = Rational::simplest_between(&a, &b);
            if s > a && q.eval(&s).is_zero() {
                return RatInterval::point(s);
            }
            // The closed interval must not pick up a neighbouring root at `a`.
            if !q.eval(&a).is_zero() {
                return RatInterval::new(a, b).expect("ordered");
            }
        }
        let m = (&a + &b) / &two;
        if count_with(seq, &a, &m) == 1 {
            b = m;
        } else {
            a = m;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: i64, q: i64) -> Rational {
        Rational::frac(p, q)
    }

    fn quintic(a: Rational) -> UPoly {
        // z - a - z^5
        UPoly::new(vec![
            -a,
            Rational::one(),
            Rational::zero(),
            Rational::zero(),
            Rational::zero(),
            Rational::from_int(-1),
        ])
    }

    fn unit() -> RatInterval {
        RatInterval::new(Rational::zero(), Rational::one()).unwrap()
    }

    #[test]
    fn textbook_chain() {
        let p = UPoly::from_ints(&[-2, 0, 1]);
        let seq = sturm_sequence(&p).unwrap();
        assert_eq!(
            seq,
            vec![p.clone(), UPoly::from_ints(&[0, 2]), UPoly::from_ints(&[2])]
        );
        let iv = RatInterval::new(Rational::zero(), Rational::from_int(2)).unwrap();
        assert_eq!(count_roots(&p, &iv).unwrap(), 1);
        let roots = isolate_roots(&p, &iv, &default_tolerance()).unwrap();
        assert_eq!(roots.len(), 1);
        let sqrt2 = std::f64::consts::SQRT_2;
        assert!(roots[0].lo().to_f64() <= sqrt2 && sqrt2 <= roots[0].hi().to_f64());
    }

    #[test]
    fn quintic_counts() {
        assert_eq!(count_roots(&quintic(r(1, 2)), &unit()).unwrap(), 2);
        assert_eq!(count_roots(&quintic(r(11, 20)), &unit()).unwrap(), 0);
        // 4/5^(5/4) = 0.534992...: 107/200 already lies above it.
        assert_eq!(count_roots(&quintic(r(5349, 10000)), &unit()).unwrap(), 2);
        assert_eq!(count_roots(&quintic(r(106, 200)), &unit()).unwrap(), 2);
        assert_eq!(count_roots(&quintic(r(107, 200)), &unit()).unwrap(), 0);
        assert_eq!(count_roots(&quintic(r(5350, 10000)), &unit()).unwrap(), 0);
    }

    #[test]
    fn quintic_isolation_against_sign_changes() {
        let p = quintic(r(1, 2));
        let roots = isolate_roots(&p, &unit(), &default_tolerance()).unwrap();
        assert_eq!(roots.len(), 2);
        // Float bisection on sign changes, independent of the Sturm machinery.
        let f = |z: f64| z - 0.5 - z.powi(5);
        let bisect = |mut a: f64, mut b: f64| {
            for _ in 0..60 {
                let m = 0.5 * (a + b);
                if (f(a) < 0.0) == (f(m) < 0.0) {
                    a = m
                } else {
                    b = m
                }
            }
            a
        };
        let oracle = [bisect(0.0, 0.669), bisect(0.669, 1.0)];
        for (iv, approx) in roots.iter().zip(oracle) {
            assert!(iv.width() <= default_tolerance());
            assert_ne!(p.sign_at(iv.lo()), p.sign_at(iv.hi()));
            assert!((iv.lo().to_f64() - approx).abs() < 1e-9);
        }
    }

    #[test]
    fn exact_rational_root() {
        let p = UPoly::new(vec![r(-1, 2), Rational::one()]);
        let roots = isolate_roots(&p, &unit(), &default_tolerance()).unwrap();
        assert_eq!(roots, vec![RatInterval::point(r(1, 2))]);
        // A root that bisection never hits exactly.
        let p = UPoly::new(vec![r(-1, 3), Rational::one()]);
        let roots = isolate_roots(&p, &unit(), &default_tolerance()).unwrap();
        assert_eq!(roots, vec![RatInterval::point(r(1, 3))]);
    }

    #[test]
    fn endpoint_roots() {
        // roots 0, 1/2, 1 on [0, 1]
        let p = UPoly::from_roots(&[r(0, 1), r(1, 2), r(1, 1)]);
        assert_eq!(count_roots(&p, &unit()).unwrap(), 2);
        assert_eq!(count_roots_closed(&p, &unit()).unwrap(), 3);
        let roots = isolate_roots(&p, &unit(), &default_tolerance()).unwrap();
        assert_eq!(
            roots,
            vec![
                RatInterval::point(r(0, 1)),
                RatInterval::point(r(1, 2)),
                RatInterval::point(r(1, 1))
            ]
        );
    }

    #[test]
    fn multiple_roots_counted_once() {
        let p = UPoly::from_roots(&[r(1, 3), r(1, 3), r(2, 3)]);
        assert_eq!(count_roots(&p, &unit()).unwrap(), 2);
    }

    #[test]
    fn zero_polynomial_rejected() {
        assert_eq!(sturm_sequence(&UPoly::zero()), Err(Error::ZeroPolynomial));
        assert_eq!(
            count_roots(&UPoly::zero(), &unit()),
            Err(Error::ZeroPolynomial)
        );
    }

    #[test]
    fn ext_gcd_identity() {
        let a = UPoly::from_roots(&[r(1, 2), r(1, 3)]);
        let b = UPoly::from_roots(&[r(1, 2), r(2, 1)]);
        let (g, s, t) = a.ext_gcd(&b);
        assert_eq!(g, UPoly::from_roots(&[r(1, 2)]));
        assert_eq!(s.mul(&a).add(&t.mul(&b)), g);
    }
}
