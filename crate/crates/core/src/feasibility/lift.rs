//! Restating refutations of reduced rows as certificates over the original rows.
//!
//! A reduced row differs from its original by an explicit ideal element, so
//! a combination of reduced rows becomes the same combination of originals
//! plus ideal terms. With constant multipliers throughout the result is a
//! Farkas certificate; otherwise it is a Positivstellensatz triple.

use std::collections::BTreeMap;

use super::elim::{add_into, Mults, ReducedRow};
use crate::atomize::PolySystem;
use crate::certificates::{
    normalize_farkas, Certificate, ConeTerm, FarkasCertificate, PsatzCertificate,
};
use crate::error::{Error, Result};
use crate::numeric::{Polynomial, Rational, Space};
use crate::requirements::Relation;

fn ideal_list(m: Mults) -> Vec<(usize, Polynomial)> {
    m.into_iter().collect()
}

fn unit_cone(rows: Vec<usize>, w: Rational, space: Space) -> ConeTerm {
    ConeTerm {
        rows,
        squares: vec![(w, Polynomial::one(space))],
    }
}

/// `sum coef * reduced row == target`, with nonnegative weights on
/// inequalities and either `target < 0` or `target == 0` with a positive
/// weight on a strict row.
pub(crate) fn combination(
    sys: &PolySystem,
    space: Space,
    terms: &[(&ReducedRow, Rational)],
    target: Rational,
) -> Result<Certificate> {
    let mut lin: BTreeMap<usize, Rational> = BTreeMap::new();
    let mut ideal = Mults::new();
    let mut constant = true;
    for (r, k) in terms {
        if k.is_zero() {
            continue;
        }
        *lin.entry(r.row).or_default() += k;
        for (j, t) in &r.mults {
            constant &= t.is_constant();
            add_into(&mut ideal, *j, t.scale(k));
        }
    }
    if constant {
        let mut coefs = lin;
        for (j, t) in ideal {
            *coefs.entry(j).or_default() += t.constant_term();
        }
        let f = FarkasCertificate {
            space,
            coefficients: coefs.into_iter().filter(|(_, k)| !k.is_zero()).collect(),
            target,
        };
        return Ok(Certificate::Farkas(normalize_farkas(&f)));
    }
    let strict = if target.is_negative() {
        None
    } else {
        let l = lin
            .iter()
            .find(|(r, k)| sys.rel(**r) == Relation::GtZero && k.is_positive())
            .map(|(r, _)| *r)
            .ok_or_else(|| Error::Certificate("zero target without a strict row".into()))?;
        Some(l)
    };
    let s = match strict {
        None => (-target).recip()?,
        Some(l) => lin[&l].recip()?,
    };
    let mut f = Mults::new();
    for (j, t) in ideal {
        add_into(&mut f, j, t.scale(&s));
    }
    let mut cone = Vec::new();
    for (r, k) in lin {
        match sys.rel(r) {
            Relation::EqZero => add_into(&mut f, r, Polynomial::constant(space, &k * &s)),
            _ if Some(r) == strict => {}
            _ => cone.push(unit_cone(vec![r], &k * &s, space)),
        }
    }
    Ok(Certificate::Psatz(PsatzCertificate {
        space,
        ideal: ideal_list(f),
        cone,
        monoid: strict.map(|l| vec![(l, 1)]).unwrap_or_default(),
    }))
}

/// Splits `sum k * reduced` into its inequality part (weights per row) and
/// an ideal element.
fn split(
    sys: &PolySystem,
    space: Space,
    terms: &[(&ReducedRow, Rational)],
) -> (Vec<(usize, Rational)>, Mults) {
    let mut cone = Vec::new();
    let mut ideal = Mults::new();
    for (r, k) in terms {
        if k.is_zero() {
            continue;
        }
        if sys.rel(r.row) == Relation::EqZero {
            add_into(&mut ideal, r.row, Polynomial::constant(space, k.clone()));
        } else {
            cone.push((r.row, k.clone()));
        }
        for (j, t) in &r.mults {
            add_into(&mut ideal, *j, t.scale(k));
        }
    }
    (cone, ideal)
}

/// `h` vanishes wherever the other rows hold: `h + below == 0` and
/// `-h + above == 0` as identities of reduced rows.
pub(crate) fn vanishing(
    sys: &PolySystem,
    space: Space,
    h: &ReducedRow,
    below: &[(&ReducedRow, Rational)],
    above: &[(&ReducedRow, Rational)],
) -> Result<Certificate> {
    let oh = sys.form(h.row, space)?.into_owned();
    // o_h = -A - K and o_h = B + K' with A, B cone combinations and K, K' ideal.
    let (a, mut k) = split(sys, space, below);
    for (j, t) in &h.mults {
        add_into(&mut k, *j, t.clone());
    }
    let (b, mut k2) = split(sys, space, above);
    for (j, t) in &h.mults {
        add_into(&mut k2, *j, t.neg());
    }
    let mut a_poly = Polynomial::zero(space);
    for (r, w) in &a {
        a_poly = a_poly.add_scaled(sys.form(*r, space)?.as_ref(), w);
    }
    // o_h^2 + A B + (A K' + o_h K) == 0.
    let mut f = Mults::new();
    for (j, t) in k2 {
        add_into(&mut f, j, a_poly.mul(&t));
    }
    for (j, t) in k {
        add_into(&mut f, j, oh.mul(&t));
    }
    let mut g: BTreeMap<(usize, usize), Rational> = BTreeMap::new();
    for (ra, wa) in &a {
        for (rb, wb) in &b {
            let key = (*ra.min(rb), *ra.max(rb));
            *g.entry(key).or_default() += wa * wb;
        }
    }
    Ok(Certificate::Psatz(PsatzCertificate {
        space,
        ideal: ideal_list(f),
        cone: g
            .into_iter()
            .map(|((x, y), w)| unit_cone(vec![x, y], w, space))
            .collect(),
        monoid: vec![(h.row, 2)],
    }))
}

/// `f = q * prod factors` as reduced rows, with every factor a strict or
/// `!=` row: the square of the product of the original factors is in the ideal.
pub(crate) fn monoid(
    sys: &PolySystem,
    space: Space,
    f: &ReducedRow,
    factors: &[&ReducedRow],
    q: &Rational,
) -> Result<Certificate> {
    let orig: Vec<Polynomial> = factors
        .iter()
        .map(|r| sys.form(r.row, space).map(|c| c.into_owned()))
        .collect::<Result<_>>()?;
    let m = orig
        .iter()
        .fold(Polynomial::one(space), |acc, o| acc.mul(o));
    // prod reduced - prod original = sum_i J_i prod_{k<i} orig_k prod_{k>i} reduced_k.
    let mut ideal_i = Mults::new();
    for (i, r) in factors.iter().enumerate() {
        if r.mults.is_empty() {
            continue;
        }
        let mut c = Polynomial::one(space);
        for o in &orig[..i] {
            c = c.mul(o);
        }
        for later in &factors[i + 1..] {
            c = c.mul(&later.form);
        }
        for (j, t) in &r.mults {
            add_into(&mut ideal_i, *j, c.mul(t));
        }
    }
    // M = (o_f + J_f) / q - I, so F = -M ((o_f + J_f) / q - I) gives F + M^2 == 0.
    let qi = q.recip()?;
    let neg_m_q = m.scale(&-qi);
    let mut fm = Mults::new();
    add_into(&mut fm, f.row, neg_m_q.clone());
    for (j, t) in &f.mults {
        add_into(&mut fm, *j, neg_m_q.mul(t));
    }
    for (j, t) in ideal_i {
        add_into(&mut fm, j, m.mul(&t));
    }
    let mut powers: BTreeMap<usize, u32> = BTreeMap::new();
    for r in factors {
        *powers.entry(r.row).or_default() += 2;
    }
    Ok(Certificate::Psatz(PsatzCertificate {
        space,
        ideal: ideal_list(fm),
        cone: Vec::new(),
        monoid: powers.into_iter().collect(),
    }))
}

/// A reduced row that is a constant violating its relation.
pub(crate) fn constant_violation(
    sys: &PolySystem,
    space: Space,
    r: &ReducedRow,
) -> Result<Option<Certificate>> {
    let Some(c) = r.form.constant_value() else {
        return Ok(None);
    };
    let one = Rational::one();
    let cert = match sys.rel(r.row) {
        Relation::EqZero if !c.is_zero() => combination(sys, space, &[(r, -c.recip()?)], -one)?,
        Relation::GeqZero | Relation::GtZero if c.is_negative() => {
            combination(sys, space, &[(r, -c.recip()?)], -one)?
        }
        Relation::GtZero if c.is_zero() => combination(sys, space, &[(r, one)], Rational::zero())?,
        Relation::NeqZero if c.is_zero() => vanishing(sys, space, r, &[], &[])?,
        _ => return Ok(None),
    };
    Ok(Some(cert))
}
