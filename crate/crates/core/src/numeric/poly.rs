//! Sparse multivariate polynomials over the rationals.
//!
//! Terms are kept sorted in descending graded-lexicographic order, with
//! variable 0 the most significant. Zero coefficients are never stored, so
//! structural equality is polynomial equality.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use smallvec::SmallVec;

use super::rational::Rational;
use super::upoly::UPoly;
use crate::error::{Error, Result};

pub type Var = u32;

/// The variable universe a polynomial lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Space {
    /// Probabilities of registered boolean combinations.
    X,
    /// Atom probabilities, indexed by atom mask.
    Y,
    /// Intersection probabilities `m_b = P(all events of b)`, indexed by mask.
    M,
    /// Anything else: univariate work, tests, game indicators.
    Free,
}

/// Sparse exponent vector, sorted by variable, no zero exponents.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Monomial(SmallVec<[(Var, u32); 4]>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(SmallVec::new())
    }

    pub fn var(v: Var) -> Self {
        Self::var_pow(v, 1)
    }

    pub fn var_pow(v: Var, e: u32) -> Self {
        let mut m = SmallVec::new();
        if e > 0 {
            m.push((v, e));
        }
        Monomial(m)
    }

    /// Builds from arbitrary `(var, exp)` pairs, merging repeats.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (Var, u32)>) -> Self {
        let mut v: SmallVec<[(Var, u32); 4]> = pairs.into_iter().filter(|p| p.1 > 0).collect();
        v.sort_unstable_by_key(|p| p.0);
        let mut out: SmallVec<[(Var, u32); 4]> = SmallVec::new();
        for (var, e) in v {
            match out.last_mut() {
                Some(last) if last.0 == var => last.1 += e,
                _ => out.push((var, e)),
            }
        }
        Monomial(out)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|p| p.1).sum()
    }

    pub fn exp(&self, v: Var) -> u32 {
        self.0.iter().find(|p| p.0 == v).map(|p| p.1).unwrap_or(0)
    }

    pub fn pairs(&self) -> &[(Var, u32)] {
        &self.0
    }

    pub fn mul(&self, o: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &o.0);
        let mut out = SmallVec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a[i].0, a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    /// `self / o` when `o` divides `self`.
    pub fn div(&self, o: &Monomial) -> Option<Monomial> {
        let mut out = SmallVec::new();
        let mut j = 0;
        for &(v, e) in &self.0 {
            let d = if j < o.0.len() && o.0[j].0 == v {
                j += 1;
                o.0[j - 1].1
            } else {
                0
            };
            match e.cmp(&d) {
                Ordering::Less => return None,
                Ordering::Equal => {}
                Ordering::Greater => out.push((v, e - d)),
            }
        }
        if j < o.0.len() {
            return None;
        }
        Some(Monomial(out))
    }

    /// Splits off the power of `v`.
    pub fn split(&self, v: Var) -> (u32, Monomial) {
        let mut rest = self.0.clone();
        match rest.iter().position(|p| p.0 == v) {
            Some(i) => {
                let e = rest.remove(i).1;
                (e, Monomial(rest))
            }
            None => (0, self.clone()),
        }
    }
}

impl Ord for Monomial {
    fn cmp(&self, o: &Self) -> Ordering {
        self.degree().cmp(&o.degree()).then_with(|| {
            for (a, b) in self.0.iter().zip(o.0.iter()) {
                if a.0 != b.0 {
                    // The one containing the smaller variable is larger.
                    return b.0.cmp(&a.0);
                }
                if a.1 != b.1 {
                    return a.1.cmp(&b.1);
                }
            }
            self.0.len().cmp(&o.0.len())
        })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0.as_slice())
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Polynomial {
    space: Space,
    terms: Vec<(Monomial, Rational)>,
}

pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

/// Checked binary arithmetic; the operators panic on a space mismatch instead.
pub fn poly_arith(p: &Polynomial, q: &Polynomial, op: ArithOp) -> Result<Polynomial> {
    if p.space != q.space && !p.is_constant() && !q.is_constant() {
        return Err(Error::SpaceMismatch(format!(
            "{:?} vs {:?}",
            p.space, q.space
        )));
    }
    Ok(match op {
        ArithOp::Add => p.add(q),
        ArithOp::Sub => p.sub(q),
        ArithOp::Mul => p.mul(q),
    })
}

impl Polynomial {
    pub fn zero(space: Space) -> Self {
        Polynomial {
            space,
            terms: Vec::new(),
        }
    }

    pub fn constant(space: Space, c: Rational) -> Self {
        let mut p = Self::zero(space);
        if !c.is_zero() {
            p.terms.push((Monomial::one(), c));
        }
        p
    }

    pub fn one(space: Space) -> Self {
        Self::constant(space, Rational::one())
    }

    pub fn var(space: Space, v: Var) -> Self {
        Polynomial {
            space,
            terms: vec![(Monomial::var(v), Rational::one())],
        }
    }

    pub fn monomial(space: Space, m: Monomial, c: Rational) -> Self {
        let mut p = Self::zero(space);
        if !c.is_zero() {
            p.terms.push((m, c));
        }
        p
    }

    /// Linear form `Σ c_v v + c0`.
    pub fn linear(
        space: Space,
        coefs: impl IntoIterator<Item = (Var, Rational)>,
        c0: Rational,
    ) -> Self {
        Self::from_terms(
            space,
            coefs
                .into_iter()
                .map(|(v, c)| (Monomial::var(v), c))
                .chain(std::iter::once((Monomial::one(), c0))),
        )
    }

    /// Canonicalizes an arbitrary term list.
    pub fn from_terms(space: Space, terms: impl IntoIterator<Item = (Monomial, Rational)>) -> Self {
        let mut acc: HashMap<Monomial, Rational> = HashMap::new();
        for (m, c) in terms {
            if c.is_zero() {
                continue;
            }
            *acc.entry(m).or_default() += c;
        }
        Self::from_map(space, acc)
    }

    fn from_map(space: Space, acc: HashMap<Monomial, Rational>) -> Self {
        let mut terms: Vec<(Monomial, Rational)> =
            acc.into_iter().filter(|t| !t.1.is_zero()).collect();
        terms.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        Polynomial { space, terms }
    }

    pub fn space(&self) -> Space {
        self.space
    }

    /// Same terms, relabelled universe.
    pub fn with_space(mut self, space: Space) -> Self {
        self.space = space;
        self
    }

    pub fn terms(&self) -> &[(Monomial, Rational)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_identically_zero(&self) -> bool {
        self.is_zero()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.iter().all(|t| t.0.is_one())
    }

    /// The value if the polynomial is constant (zero included).
    pub fn constant_value(&self) -> Option<Rational> {
        match self.terms.as_slice() {
            [] => Some(Rational::zero()),
            [(m, c)] if m.is_one() => Some(c.clone()),
            _ => None,
        }
    }

    pub fn constant_term(&self) -> Rational {
        match self.terms.last() {
            Some((m, c)) if m.is_one() => c.clone(),
            _ => Rational::zero(),
        }
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.first().map(|t| t.0.degree()).unwrap_or(0)
    }

    pub fn leading(&self) -> Option<&(Monomial, Rational)> {
        self.terms.first()
    }

    pub fn vars(&self) -> Vec<Var> {
        let mut vs: Vec<Var> = self
            .terms
            .iter()
            .flat_map(|t| t.0.pairs().iter().map(|p| p.0))
            .collect();
        vs.sort_unstable();
        vs.dedup();
        vs
    }

    pub fn degree_in(&self, v: Var) -> u32 {
        self.terms.iter().map(|t| t.0.exp(v)).max().unwrap_or(0)
    }

    /// Coefficient of a linear monomial `v`.
    pub fn linear_coef(&self, v: Var) -> Rational {
        let m = Monomial::var(v);
        self.terms
            .iter()
            .find(|t| t.0 == m)
            .map(|t| t.1.clone())
            .unwrap_or_default()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.space);
        }
        Polynomial {
            space: self.space,
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        Polynomial {
            space: self.space,
            terms: self.terms.iter().map(|(m, k)| (m.clone(), -k)).collect(),
        }
    }

    fn joint_space(&self, o: &Polynomial) -> Space {
        if self.space == o.space || o.is_constant() {
            self.space
        } else if self.is_constant() {
            o.space
        } else {
            panic!(
                "polynomial space mismatch: {:?} vs {:?}",
                self.space, o.space
            )
        }
    }

    pub fn add(&self, o: &Polynomial) -> Self {
        let space = self.joint_space(o);
        let (a, b) = (&self.terms, &o.terms);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Greater => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    out.push(b[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    let c = &a[i].1 + &b[j].1;
                    if !c.is_zero() {
                        out.push((a[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Polynomial { space, terms: out }
    }

    pub fn sub(&self, o: &Polynomial) -> Self {
        self.add(&o.neg())
    }

    pub fn add_scaled(&self, o: &Polynomial, c: &Rational) -> Self {
        self.add(&o.scale(c))
    }

    pub fn add_constant(&self, c: &Rational) -> Self {
        self.add(&Polynomial::constant(self.space, c.clone()))
    }

    pub fn mul(&self, o: &Polynomial) -> Self {
        self.mul_limited(o, usize::MAX).expect("unlimited")
    }

    /// Product with a guard on the number of distinct terms produced.
    pub fn mul_limited(&self, o: &Polynomial, limit: usize) -> Result<Self> {
        let space = self.joint_space(o);
        if self.is_zero() || o.is_zero() {
            return Ok(Self::zero(space));
        }
        if let Some(c) = o.constant_value() {
            return Ok(self.scale(&c).with_space(space));
        }
        if let Some(c) = self.constant_value() {
            return Ok(o.scale(&c).with_space(space));
        }
        let mut acc: HashMap<Monomial, Rational> =
            HashMap::with_capacity((self.len() * o.len()).min(1 << 16));
        for (ma, ca) in &self.terms {
            for (mb, cb) in &o.terms {
                *acc.entry(ma.mul(mb)).or_default() += ca * cb;
            }
            if acc.len() > limit {
                return Err(Error::TermLimit(limit));
            }
        }
        Ok(Self::from_map(space, acc))
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut result = Polynomial::one(self.space);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    pub fn square(&self) -> Self {
        self.mul(self)
    }

    /// Exact evaluation; fails if a variable is unbound.
    pub fn eval_with(&self, point: impl Fn(Var) -> Option<Rational>) -> Result<Rational> {
        let mut cache: HashMap<Var, Rational> = HashMap::new();
        let mut total = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for &(v, e) in m.pairs() {
                let x = match cache.get(&v) {
                    Some(x) => x.clone(),
                    None => {
                        let x = point(v)
                            .ok_or_else(|| Error::UnboundVariable(var_name(self.space, v)))?;
                        cache.insert(v, x.clone());
                        x
                    }
                };
                t *= x.pow(e);
            }
            total += t;
        }
        Ok(total)
    }

    pub fn eval_slice(&self, point: &[Rational]) -> Result<Rational> {
        self.eval_with(|v| point.get(v as usize).cloned())
    }

    /// Substitutes the given variables, leaving the rest symbolic.
    pub fn partial_eval(&self, point: impl Fn(Var) -> Option<Rational>) -> Self {
        Self::from_terms(
            self.space,
            self.terms.iter().map(|(m, c)| {
                let mut coef = c.clone();
                let mut rest = Vec::new();
                for &(v, e) in m.pairs() {
                    match point(v) {
                        Some(x) => coef *= x.pow(e),
                        None => rest.push((v, e)),
                    }
                }
                (Monomial::from_pairs(rest), coef)
            }),
        )
    }

    /// Coefficients with respect to `v`: entry `k` multiplies `v^k`.
    pub fn coefficients_in(&self, v: Var) -> Vec<Polynomial> {
        let d = self.degree_in(v) as usize;
        let mut parts: Vec<Vec<(Monomial, Rational)>> = vec![Vec::new(); d + 1];
        for (m, c) in &self.terms {
            let (e, rest) = m.split(v);
            parts[e as usize].push((rest, c.clone()));
        }
        parts
            .into_iter()
            .map(|ts| Polynomial::from_terms(self.space, ts))
            .collect()
    }

    /// Replaces `v` by `s`.
    pub fn substitute(&self, v: Var, s: &Polynomial) -> Self {
        if self.degree_in(v) == 0 {
            return self.clone();
        }
        let coefs = self.coefficients_in(v);
        let mut acc = Polynomial::zero(self.space);
        for c in coefs.iter().rev() {
            acc = acc.mul(s).add(c);
        }
        acc
    }

    /// Replaces every variable `v` by `f(v)`, a polynomial in the target space.
    pub fn compose(
        &self,
        target: Space,
        f: impl Fn(Var) -> Polynomial,
        limit: usize,
    ) -> Result<Self> {
        let mut powers: HashMap<(Var, u32), Polynomial> = HashMap::new();
        let mut acc: HashMap<Monomial, Rational> = HashMap::new();
        for (m, c) in &self.terms {
            let mut t = Polynomial::constant(target, c.clone());
            for &(v, e) in m.pairs() {
                let p = powers.entry((v, e)).or_insert_with(|| f(v).pow(e));
                t = t.mul_limited(p, limit)?;
            }
            for (tm, tc) in t.terms {
                *acc.entry(tm).or_default() += tc;
            }
            if acc.len() > limit {
                return Err(Error::TermLimit(limit));
            }
        }
        Ok(Self::from_map(target, acc))
    }

    /// Renames variables through an injective map, keeping the space.
    pub fn rename(&self, f: impl Fn(Var) -> Var) -> Self {
        Self::from_terms(
            self.space,
            self.terms.iter().map(|(m, c)| {
                (
                    Monomial::from_pairs(m.pairs().iter().map(|&(v, e)| (f(v), e))),
                    c.clone(),
                )
            }),
        )
    }

    /// `(c, g)` with `self = c*v + g`, `c` a nonzero constant and `v` absent from `g`.
    pub fn split_linear(&self, v: Var) -> Option<(Rational, Polynomial)> {
        if self.degree_in(v) != 1 {
            return None;
        }
        let coefs = self.coefficients_in(v);
        let c = coefs[1].constant_value()?;
        Some((c, coefs[0].clone()))
    }

    /// Division by `v - s`: returns `(q, r)` with `self = q*(v - s) + r` and `r = self[v := s]`.
    pub fn div_by_linear(&self, v: Var, s: &Polynomial) -> (Polynomial, Polynomial) {
        let a = self.coefficients_in(v);
        let d = a.len() - 1;
        if d == 0 {
            return (Polynomial::zero(self.space), self.clone());
        }
        let mut b = vec![Polynomial::zero(self.space); d];
        b[d - 1] = a[d].clone();
        for k in (1..d).rev() {
            b[k - 1] = a[k].add(&s.mul(&b[k]));
        }
        let r = a[0].add(&s.mul(&b[0]));
        let vp = |k: usize| {
            Polynomial::monomial(self.space, Monomial::var_pow(v, k as u32), Rational::one())
        };
        let q = b
            .iter()
            .enumerate()
            .fold(Polynomial::zero(self.space), |acc, (k, bk)| {
                acc.add(&bk.mul(&vp(k)))
            });
        (q, r)
    }

    /// Exact quotient `self / h`, if `h` divides `self`.
    pub fn div_exact(&self, h: &Polynomial) -> Option<Polynomial> {
        let (lm, lc) = h.leading()?.clone();
        let mut rem = self.clone();
        let mut q = Vec::new();
        while let Some((m, c)) = rem.leading().cloned() {
            let qm = m.div(&lm)?;
            let qc = &c / &lc;
            let t = Polynomial::monomial(rem.space, qm.clone(), qc.clone());
            rem = rem.sub(&t.mul(h));
            q.push((qm, qc));
        }
        Some(Polynomial::from_terms(self.space, q))
    }

    /// Dense univariate view when only `v` occurs.
    pub fn to_upoly(&self, v: Var) -> Option<UPoly> {
        let mut coefs = vec![Rational::zero(); self.degree_in(v) as usize + 1];
        for (m, c) in &self.terms {
            let (e, rest) = m.split(v);
            if !rest.is_one() {
                return None;
            }
            coefs[e as usize] = c.clone();
        }
        Some(UPoly::new(coefs))
    }

    pub fn from_upoly(space: Space, v: Var, p: &UPoly) -> Self {
        Self::from_terms(
            space,
            p.coefs()
                .iter()
                .enumerate()
                .map(|(k, c)| (Monomial::var_pow(v, k as u32), c.clone())),
        )
    }

    /// Multiplies through by the least common denominator and divides by the content.
    pub fn primitive(&self) -> Polynomial {
        use num_integer::Integer;
        if self.is_zero() {
            return self.clone();
        }
        let mut l = num_bigint::BigInt::from(1);
        let mut g = num_bigint::BigInt::from(0);
        for (_, c) in &self.terms {
            l = l.lcm(c.denom());
            g = g.gcd(c.numer());
        }
        let mut s = Rational::from_bigs(l, g).expect("nonzero content");
        if self.terms[0].1.is_negative() {
            s = -s;
        }
        self.scale(&s)
    }

    pub fn display<'a>(&'a self, names: &'a dyn Fn(Space, Var) -> String) -> PolyDisplay<'a> {
        PolyDisplay { p: self, names }
    }
}

/// Default variable names.
pub fn var_name(space: Space, v: Var) -> String {
    match space {
        Space::X => format!("x{v}"),
        Space::Y => format!("y{v}"),
        Space::M => format!("m{v}"),
        Space::Free => format!("z{v}"),
    }
}

pub struct PolyDisplay<'a> {
    p: &'a Polynomial,
    names: &'a dyn Fn(Space, Var) -> String,
}

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.p.is_zero() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.p.terms.iter().enumerate() {
            let a = c.abs();
            match (i, c.is_negative()) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let mut first = true;
            if !a.is_one() || m.is_one() {
                write!(f, "{a}")?;
                first = false;
            }
            for &(v, e) in m.pairs() {
                if !first {
                    write!(f, "*")?;
                }
                first = false;
                write!(f, "{}", (self.names)(self.p.space, v))?;
                if e > 1 {
                    write!(f, "^{e}")?;
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display(&var_name))
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Parses `+ - *`, `^k`, parentheses, numbers and names resolved by `resolve`.
pub fn parse_poly(
    text: &str,
    space: Space,
    resolve: &dyn Fn(&str) -> Option<Var>,
) -> Result<Polynomial> {
    let toks = tokenize(text)?;
    let mut p = PolyParser {
        toks,
        pos: 0,
        space,
        resolve,
    };
    let out = p.sum()?;
    if p.pos != p.toks.len() {
        return Err(Error::Invalid(format!(
            "trailing input in polynomial `{text}`"
        )));
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
enum PTok {
    Num(Rational),
    Name(String),
    Op(char),
}

fn tokenize(text: &str) -> Result<Vec<PTok>> {
    let cs: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < cs.len() {
        let c = cs[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let st = i;
            while i < cs.len() && (cs[i].is_ascii_digit() || cs[i] == '.') {
                i += 1;
            }
            let mut s: String = cs[st..i].iter().collect();
            // `p/q` glued together is one literal
            if i + 1 < cs.len() && cs[i] == '/' && cs[i + 1].is_ascii_digit() {
                let st2 = i + 1;
                i += 1;
                while i < cs.len() && (cs[i].is_ascii_digit() || cs[i] == '.') {
                    i += 1;
                }
                s.push('/');
                s.extend(&cs[st2..i]);
            }
            out.push(PTok::Num(s.parse()?));
        } else if c.is_alphabetic() || c == '_' {
            let st = i;
            while i < cs.len() && (cs[i].is_alphanumeric() || cs[i] == '_' || cs[i] == '@') {
                i += 1;
            }
            out.push(PTok::Name(cs[st..i].iter().collect()));
        } else if "+-*^()".contains(c) {
            out.push(PTok::Op(c));
            i += 1;
        } else {
            return Err(Error::Invalid(format!("unexpected `{c}` in polynomial")));
        }
    }
    Ok(out)
}

struct PolyParser<'a> {
    toks: Vec<PTok>,
    pos: usize,
    space: Space,
    resolve: &'a dyn Fn(&str) -> Option<Var>,
}

impl PolyParser<'_> {
    fn peek_op(&self, c: char) -> bool {
        self.toks.get(self.pos) == Some(&PTok::Op(c))
    }

    fn sum(&mut self) -> Result<Polynomial> {
        let mut neg = false;
        if self.peek_op('-') {
            self.pos += 1;
            neg = true;
        } else if self.peek_op('+') {
            self.pos += 1;
        }
        let first = self.product()?;
        let mut acc = if neg { first.neg() } else { first };
        loop {
            if self.peek_op('+') {
                self.pos += 1;
                acc = acc.add(&self.product()?);
            } else if self.peek_op('-') {
                self.pos += 1;
                acc = acc.sub(&self.product()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn product(&mut self) -> Result<Polynomial> {
        let mut acc = self.power()?;
        while self.peek_op('*') {
            self.pos += 1;
            acc = acc.mul(&self.power()?);
        }
        Ok(acc)
    }

    fn power(&mut self) -> Result<Polynomial> {
        let base = self.atom()?;
        if self.peek_op('^') {
            self.pos += 1;
            match self.toks.get(self.pos) {
                Some(PTok::Num(n)) if n.is_integer() && !n.is_negative() => {
                    let e = n.to_f64() as u32;
                    self.pos += 1;
                    return Ok(base.pow(e));
                }
                _ => {
                    return Err(Error::Invalid(
                        "exponent must be a nonnegative integer".into(),
                    ))
                }
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Polynomial> {
        match self.toks.get(self.pos).cloned() {
            Some(PTok::Num(n)) => {
                self.pos += 1;
                Ok(Polynomial::constant(self.space, n))
            }
            Some(PTok::Name(s)) => {
                self.pos += 1;
                let v = (self.resolve)(&s).ok_or_else(|| Error::UnboundVariable(s.clone()))?;
                Ok(Polynomial::var(self.space, v))
            }
            Some(PTok::Op('(')) => {
                self.pos += 1;
                let p = self.sum()?;
                if !self.peek_op(')') {
                    return Err(Error::Invalid("missing `)` in polynomial".into()));
                }
                self.pos += 1;
                Ok(p)
            }
            Some(PTok::Op('-')) => {
                self.pos += 1;
                Ok(self.power()?.neg())
            }
            other => Err(Error::Invalid(format!(
                "unexpected {other:?} in polynomial"
            ))),
        }
    }
}
