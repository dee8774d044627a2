use std::cmp::Ordering;

use super::*;
use crate::atomize::{PolySystem, RowKind};
use crate::numeric::{
    count_roots, count_roots_closed, interval_eval, sign_variations, sturm_sequence, RealRoot,
    UPoly,
};
use crate::requirements::Relation;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verification {
    pub ok: bool,
    pub diagnostic: String,
}

impl Verification {
    pub fn into_result(self) -> Result<()> {
        if self.ok {
            Ok(())
        } else {
            Err(Error::Certificate(self.diagnostic))
        }
    }
}

/// Checks `cert` against `sys`; the diagnostic names the first failure.
pub fn verify_certificate(cert: &Certificate, sys: &PolySystem) -> Verification {
    let res = match cert {
        Certificate::Farkas(f) => farkas(f, sys),
        Certificate::Chain(c) => chain(c, sys),
        Certificate::Psatz(p) => psatz(p, sys),
        Certificate::Sturm(s) => sturm(s, sys),
        Certificate::Prune(p) => prune(p, sys),
    };
    match res {
        Ok(d) => Verification {
            ok: true,
            diagnostic: d,
        },
        Err(e) => Verification {
            ok: false,
            diagnostic: match e {
                Error::Certificate(m) => m,
                e => e.to_string(),
            },
        },
    }
}

fn fail<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Certificate(msg.into()))
}

fn check_space(space: Space) -> Result<()> {
    match space {
        Space::X | Space::Y | Space::M => Ok(()),
        Space::Free => fail("certificates live in x, y or m space"),
    }
}

fn form(sys: &PolySystem, i: usize, space: Space) -> Result<Polynomial> {
    sys.check_index(i)?;
    if space == Space::X && !matches!(sys.kind(i), RowKind::Constraint(_)) {
        return fail(format!("row {i} ({}) has no x-space form", sys.origin(i)));
    }
    Ok(sys.form(i, space)?.into_owned())
}

fn residual_note(sys: &PolySystem, p: &Polynomial) -> String {
    let lead = p
        .leading()
        .map(|(m, c)| sys.show(&Polynomial::monomial(p.space(), m.clone(), c.clone())))
        .unwrap_or_else(|| "0".into());
    format!("residual has {} terms, leading term {lead}", p.len())
}

fn farkas(f: &FarkasCertificate, sys: &PolySystem) -> Result<String> {
    check_space(f.space)?;
    let mut acc = Polynomial::zero(f.space);
    let mut strict_positive = false;
    for (r, k) in &f.coefficients {
        sys.check_index(*r)?;
        match sys.rel(*r) {
            Relation::EqZero => {}
            Relation::GeqZero | Relation::GtZero if k.is_negative() => {
                return fail(format!(
                    "row {r} is an inequality but has negative coefficient {k}"
                ));
            }
            Relation::GtZero => strict_positive |= k.is_positive(),
            Relation::GeqZero => {}
            Relation::NeqZero => {
                return fail(format!(
                    "row {r} is a != row and cannot appear in a linear combination"
                ))
            }
        }
        acc = acc.add_scaled(&form(sys, *r, f.space)?, k);
    }
    let diff = acc.add_constant(&-f.target.clone());
    if !diff.is_zero() {
        return fail(format!(
            "combination is not the constant {}: {}",
            f.target,
            residual_note(sys, &diff)
        ));
    }
    if f.target.is_negative() || (f.target.is_zero() && strict_positive) {
        Ok(format!(
            "combination of {} rows is identically {}",
            f.coefficients.len(),
            f.target
        ))
    } else {
        fail(format!("target {} is not a contradiction", f.target))
    }
}

fn chain(c: &ChainCertificate, sys: &PolySystem) -> Result<String> {
    check_space(c.space)?;
    if c.a_first >= c.a_last {
        return fail(format!(
            "chain endpoints {} and {} are not increasing",
            c.a_first, c.a_last
        ));
    }
    let mut acc = Polynomial::zero(c.space);
    for (r, k) in &c.steps {
        sys.check_index(*r)?;
        match sys.rel(*r) {
            Relation::EqZero if !k.is_zero() => {}
            Relation::GeqZero | Relation::GtZero if k.is_positive() => {}
            Relation::NeqZero => return fail(format!("row {r} is a != row")),
            _ => return fail(format!("step on row {r} has inadmissible constant {k}")),
        }
        acc = acc.add_scaled(&form(sys, *r, c.space)?, k);
    }
    let want = &c.a_first - &c.a_last;
    let diff = acc.add_constant(&-want.clone());
    if !diff.is_zero() {
        return fail(format!(
            "chain does not sum to {want}: {}",
            residual_note(sys, &diff)
        ));
    }
    Ok(format!("chain of {} steps sums to {want}", c.steps.len()))
}

fn psatz(p: &PsatzCertificate, sys: &PolySystem) -> Result<String> {
    check_space(p.space)?;
    let mut acc = Polynomial::zero(p.space);
    for (r, t) in &p.ideal {
        sys.check_index(*r)?;
        if sys.rel(*r) != Relation::EqZero {
            return fail(format!("ideal part uses row {r}, which is not an equation"));
        }
        acc = acc.add(&t.mul(&form(sys, *r, p.space)?));
    }
    for (k, term) in p.cone.iter().enumerate() {
        let mut prod = Polynomial::one(p.space);
        for r in &term.rows {
            sys.check_index(*r)?;
            if !matches!(sys.rel(*r), Relation::GeqZero | Relation::GtZero) {
                return fail(format!(
                    "cone term {k} uses row {r}, which is not an inequality"
                ));
            }
            prod = prod.mul(&form(sys, *r, p.space)?);
        }
        let mut s = Polynomial::zero(p.space);
        for (w, q) in &term.squares {
            if !w.is_positive() {
                return fail(format!("cone term {k} has non-positive weight {w}"));
            }
            s = s.add(&q.square().scale(w));
        }
        acc = acc.add(&s.mul(&prod));
    }
    let mut h = Polynomial::one(p.space);
    for (r, e) in &p.monoid {
        sys.check_index(*r)?;
        match sys.rel(*r) {
            Relation::NeqZero if *e >= 2 && e % 2 == 0 => {}
            Relation::GtZero if *e >= 1 => {}
            Relation::NeqZero => {
                return fail(format!("monoid power {e} of != row {r} is not even"))
            }
            _ => return fail(format!("monoid uses row {r}, which is not strict")),
        }
        h = h.mul(&form(sys, *r, p.space)?.pow(*e));
    }
    let total = acc.add(&h);
    if !total.is_zero() {
        return fail(format!(
            "F + G + H is not zero: {}",
            residual_note(sys, &total)
        ));
    }
    Ok(format!(
        "F + G + H = 0 with {} ideal, {} cone and {} monoid factors",
        p.ideal.len(),
        p.cone.len(),
        p.monoid.len()
    ))
}

/// Range of a polynomial linear in atom probabilities over the simplex.
pub fn range_of(sys: &PolySystem, p: &Polynomial) -> Result<RatInterval> {
    let y = sys.convert(p, Space::Y)?;
    if y.total_degree() > 1 {
        return fail("coordinate is not linear in atom probabilities");
    }
    let c0 = y.constant_term();
    let coefs: Vec<Rational> = (0..sys.atom_count() as Var)
        .map(|a| y.linear_coef(a))
        .collect();
    let lo = coefs.iter().min().cloned().unwrap_or_default();
    let hi = coefs.iter().max().cloned().unwrap_or_default();
    RatInterval::new(&c0 + &lo, &c0 + &hi)
}

fn congruence(c: &Congruence, sys: &PolySystem) -> Result<()> {
    if c.form.space() != Space::M && !c.form.is_constant() {
        return fail("congruences are stated in moment coordinates");
    }
    let mut rhs = match c.base {
        Some(b) => form(sys, b, Space::M)?,
        None => Polynomial::zero(Space::M),
    };
    for (r, t) in &c.multipliers {
        sys.check_index(*r)?;
        if sys.rel(*r) != Relation::EqZero {
            return fail(format!("multiplier on row {r}, which is not an equation"));
        }
        rhs = rhs.add(&t.mul(&form(sys, *r, Space::M)?));
    }
    let diff = c.form.clone().with_space(Space::M).sub(&rhs);
    if !diff.is_zero() {
        return fail(format!(
            "reduced form of {} does not match: {}",
            c.base
                .map_or("the ideal element".to_string(), |b| format!("row {b}")),
            residual_note(sys, &diff)
        ));
    }
    Ok(())
}

fn univariate(p: &Polynomial, v: Var) -> Result<UPoly> {
    p.to_upoly(v)
        .ok_or_else(|| Error::Certificate(format!("polynomial mentions variables other than m{v}")))
}

fn violates(rel: Relation, s: Ordering) -> bool {
    match rel {
        Relation::EqZero => s != Ordering::Equal,
        Relation::GeqZero => s == Ordering::Less,
        Relation::GtZero => s != Ordering::Greater,
        Relation::NeqZero => s == Ordering::Equal,
    }
}

fn sturm(s: &SturmCertificate, sys: &PolySystem) -> Result<String> {
    if s.var as usize >= sys.atom_count() {
        return fail(format!("variable m{} out of range", s.var));
    }
    let actual = range_of(sys, &Polynomial::var(Space::M, s.var))?;
    if actual.lo() < s.range.lo() || actual.hi() > s.range.hi() {
        return fail(format!(
            "range {} does not contain the coordinate's range {}",
            s.range, actual
        ));
    }
    if s.residual.base.is_some() {
        return fail("the residual must lie in the ideal of the equations");
    }
    congruence(&s.residual, sys)?;
    let p = univariate(&s.residual.form, s.var)?;
    if p.is_zero() {
        return fail("residual polynomial is zero");
    }
    let q = p.square_free()?;
    let seq = sturm_sequence(&q)?;
    let tallies = (
        sign_variations(&seq, s.range.lo()),
        sign_variations(&seq, s.range.hi()),
    );
    if tallies != s.tallies {
        return fail(format!(
            "Sturm tallies are {tallies:?}, certificate claims {:?}",
            s.tallies
        ));
    }
    let roots = count_roots_closed(&q, &s.range)?;
    if roots != s.exclusions.len() {
        return fail(format!(
            "{roots} roots in range but {} exclusions",
            s.exclusions.len()
        ));
    }
    for (k, e) in s.exclusions.iter().enumerate() {
        let iv = &e.interval;
        let isolated = if iv.is_point() {
            q.eval(iv.lo()).is_zero()
        } else {
            count_roots(&q, iv)? == 1 && !q.eval(iv.lo()).is_zero()
        };
        if !isolated {
            return fail(format!(
                "exclusion {k}: interval {iv} does not isolate one root"
            ));
        }
        let inside = match iv.intersect(&s.range) {
            Some(c) => count_roots_closed(&q, &c)? == 1,
            None => false,
        };
        if !inside {
            return fail(format!("exclusion {k}: root lies outside the range"));
        }
        for prev in &s.exclusions[..k] {
            if prev.interval.intersect(iv).is_some() {
                return fail(format!("exclusion {k} overlaps an earlier one"));
            }
        }
        let Some(base) = e.row.base else {
            return fail(format!("exclusion {k} names no row"));
        };
        congruence(&e.row, sys)?;
        let h = univariate(&e.row.form, s.var)?;
        let sign = RealRoot::new(&q, iv.clone())?.sign_of(&h);
        if !violates(sys.rel(base), sign) {
            return fail(format!(
                "exclusion {k}: row {base} is satisfied at the root"
            ));
        }
    }
    Ok(format!(
        "residual of degree {} has {} roots in {}, all excluded",
        p.degree(),
        roots,
        s.range
    ))
}

fn leaf_violated(rel: Relation, b: &RatInterval) -> bool {
    match rel {
        Relation::EqZero => !b.contains_zero(),
        Relation::GeqZero => b.hi().is_negative(),
        Relation::GtZero => !b.hi().is_positive(),
        Relation::NeqZero => b.is_point() && b.lo().is_zero(),
    }
}

fn prune(p: &PruneCertificate, sys: &PolySystem) -> Result<String> {
    if p.vars.len() != p.domain.len() {
        return fail("domain and variable lists differ in length");
    }
    for (i, v) in p.vars.iter().enumerate() {
        if *v as usize >= sys.atom_count() || p.vars[..i].contains(v) {
            return fail(format!("bad variable m{v}"));
        }
        let actual = range_of(sys, &Polynomial::var(Space::M, *v))?;
        let d = &p.domain[i];
        if actual.lo() < d.lo() || actual.hi() > d.hi() {
            return fail(format!(
                "domain {d} of m{v} does not contain its range {actual}"
            ));
        }
    }
    for (k, c) in p.rows.iter().enumerate() {
        if c.base.is_none() {
            return fail(format!("pruning row {k} names no system row"));
        }
        if c.form.vars().iter().any(|v| !p.vars.contains(v)) {
            return fail(format!(
                "pruning row {k} mentions a variable outside the box"
            ));
        }
        congruence(c, sys)?;
    }
    let mut bx = p.domain.clone();
    walk(&p.tree, p, sys, &mut bx, 0)?;
    Ok(format!(
        "{} boxes, each violating some row",
        p.tree.leaves()
    ))
}

fn walk(
    node: &PruneNode,
    p: &PruneCertificate,
    sys: &PolySystem,
    bx: &mut Vec<RatInterval>,
    depth: usize,
) -> Result<()> {
    match node {
        PruneNode::Leaf { row, bound } => {
            let c = p
                .rows
                .get(*row)
                .ok_or_else(|| Error::Certificate(format!("leaf row {row} out of range")))?;
            let got = interval_eval(&c.form, |v| {
                p.vars.iter().position(|w| *w == v).map(|i| bx[i].clone())
            })?;
            if &got != bound {
                return fail(format!("leaf bound {bound} differs from recomputed {got}"));
            }
            let rel = sys.rel(c.base.expect("checked"));
            if !leaf_violated(rel, &got) {
                return fail(format!(
                    "leaf at depth {depth}: bound {got} does not violate {}",
                    rel.symbol()
                ));
            }
            Ok(())
        }
        PruneNode::Split { var, at, low, high } => {
            let Some(iv) = bx.get(*var).cloned() else {
                return fail(format!("split variable {var} out of range"));
            };
            if !(iv.lo() < at && at < iv.hi()) {
                return fail(format!("split point {at} not inside {iv}"));
            }
            bx[*var] = RatInterval::new(iv.lo().clone(), at.clone())?;
            walk(low, p, sys, bx, depth + 1)?;
            bx[*var] = RatInterval::new(at.clone(), iv.hi().clone())?;
            walk(high, p, sys, bx, depth + 1)?;
            bx[*var] = iv;
            Ok(())
        }
    }
}
