//! Reduced systems in a single moment coordinate, settled with Sturm chains.

use std::cmp::Ordering;

use super::elim::{Elimination, ReducedRow};
use super::SolverConfig;
use crate::atomize::{atoms_from_moments, CertifiedPoint, PolySystem, Witness};
use crate::certificates::{
    range_of, Certificate, Congruence, Exclusion, PsatzCertificate, SturmCertificate,
};
use crate::error::{Error, Result};
use crate::numeric::{
    count_roots_closed, isolate_roots, sign_variations, sturm_sequence, Polynomial, RatInterval,
    Rational, RealRoot, Space, UPoly, Var,
};
use crate::requirements::Relation;

// Built once per solve; boxing the certificate buys nothing.
#[allow(clippy::large_enum_variant)]
pub(crate) enum Univariate {
    Witness(Witness),
    Refuted(Certificate),
    /// The sign conditions alone could not be settled on rational points.
    Undecided,
}

fn upoly(r: &ReducedRow, z: Var) -> Result<UPoly> {
    r.form
        .to_upoly(z)
        .ok_or_else(|| Error::Invalid(format!("row {} is not univariate in m{z}", r.row)))
}

fn violates(rel: Relation, s: Ordering) -> bool {
    match rel {
        Relation::EqZero => s != Ordering::Equal,
        Relation::GeqZero => s == Ordering::Less,
        Relation::GtZero => s != Ordering::Greater,
        Relation::NeqZero => s == Ordering::Equal,
    }
}

fn exact_witness(elim: &Elimination, z: Var, v: Rational) -> Result<Witness> {
    Ok(Witness::Exact(atoms_from_moments(&elim.point(&[(z, v)])?)))
}

/// Monic gcd of the residual equations, as an explicit ideal element.
fn residual_gcd(eqs: &[&ReducedRow], z: Var) -> Result<(UPoly, Congruence)> {
    let mut g = UPoly::zero();
    let mut coefs: Vec<UPoly> = Vec::new();
    for r in eqs {
        let p = upoly(r, z)?;
        if coefs.is_empty() {
            let k = p.lead().recip()?;
            g = p.scale(&k);
            coefs.push(UPoly::constant(k));
            continue;
        }
        let (g2, s, t) = g.ext_gcd(&p);
        for c in coefs.iter_mut() {
            *c = c.mul(&s);
        }
        coefs.push(t);
        g = g2;
    }
    let mut mults = std::collections::BTreeMap::new();
    for (r, c) in eqs.iter().zip(&coefs) {
        let c = Polynomial::from_upoly(Space::M, z, c);
        super::elim::add_into(&mut mults, r.row, c.clone());
        for (j, t) in &r.mults {
            super::elim::add_into(&mut mults, *j, c.mul(t));
        }
    }
    let cong = Congruence {
        base: None,
        form: Polynomial::from_upoly(Space::M, z, &g),
        multipliers: mults.into_iter().collect(),
    };
    Ok((g, cong))
}

pub(crate) fn decide(
    sys: &PolySystem,
    elim: &Elimination,
    z: Var,
    cfg: &SolverConfig,
) -> Result<Univariate> {
    let range = range_of(sys, &Polynomial::var(Space::M, z))?;
    let eqs: Vec<&ReducedRow> = elim
        .residual()
        .iter()
        .filter(|r| !r.form.is_constant())
        .collect();
    let conds: Vec<(&ReducedRow, UPoly)> = elim
        .reduced_rows()
        .into_iter()
        .filter(|r| !r.form.is_constant() && sys.rel(r.row) != Relation::EqZero)
        .map(|r| Ok((r, upoly(r, z)?)))
        .collect::<Result<_>>()?;
    if eqs.is_empty() {
        return sign_cells(sys, elim, z, &range, &conds, cfg);
    }

    let (g, cong) = residual_gcd(&eqs, z)?;
    if g.degree() == 0 {
        // The equations generate the unit ideal: F + 1 == 0.
        return Ok(Univariate::Refuted(Certificate::Psatz(PsatzCertificate {
            space: Space::M,
            ideal: cong
                .multipliers
                .into_iter()
                .map(|(r, t)| (r, t.neg()))
                .collect(),
            cone: Vec::new(),
            monoid: Vec::new(),
        })));
    }
    let sf = g.square_free()?;
    let roots = isolate_roots(&sf, &range, &cfg.root_tolerance)?;
    let mut excluded: Vec<(RealRoot, &ReducedRow)> = Vec::new();
    for iv in roots {
        let mut root = RealRoot::new(&sf, iv)?;
        let blocked = conds
            .iter()
            .find(|(r, h)| violates(sys.rel(r.row), root.sign_of(h)));
        match blocked {
            Some((r, _)) => excluded.push((root, r)),
            None => {
                if let Some(v) = root.exact() {
                    return Ok(Univariate::Witness(exact_witness(elim, z, v.clone())?));
                }
                root.refine_to(&cfg.root_tolerance);
                if let Some(v) = root.exact() {
                    return Ok(Univariate::Witness(exact_witness(elim, z, v.clone())?));
                }
                let y = elim
                    .atom_forms(sys)
                    .iter()
                    .map(|p| {
                        p.to_upoly(z)
                            .ok_or_else(|| Error::Invalid("atom form is not univariate".into()))
                    })
                    .collect::<Result<Vec<_>>>()?;
                return Ok(Univariate::Witness(Witness::Certified(Box::new(
                    CertifiedPoint {
                        residual: sf.clone(),
                        interval: root.interval().clone(),
                        y,
                        range_roots: count_roots_closed(&sf, &range)?,
                        range,
                    },
                ))));
            }
        }
    }

    // Closed isolating intervals must be pairwise disjoint.
    for k in 1..excluded.len() {
        let (head, tail) = excluded.split_at_mut(k);
        let prev = head[k - 1].0.interval().clone();
        while tail[0].0.interval().intersect(&prev).is_some() {
            tail[0].0.refine();
        }
    }
    let seq = sturm_sequence(&sf)?;
    Ok(Univariate::Refuted(Certificate::Sturm(SturmCertificate {
        var: z,
        residual: cong,
        tallies: (
            sign_variations(&seq, range.lo()),
            sign_variations(&seq, range.hi()),
        ),
        range,
        exclusions: excluded
            .into_iter()
            .map(|(root, r)| Exclusion {
                interval: root.interval().clone(),
                row: r.congruence(),
            })
            .collect(),
    })))
}

/// No equations left: every sign cell of the rows' product polynomial is
/// represented by a rational point, so testing those points is exhaustive
/// except at irrational roots.
fn sign_cells(
    sys: &PolySystem,
    elim: &Elimination,
    z: Var,
    range: &RatInterval,
    conds: &[(&ReducedRow, UPoly)],
    cfg: &SolverConfig,
) -> Result<Univariate> {
    let mut prod = UPoly::constant(Rational::one());
    for (_, h) in conds {
        if h.degree() > 0 {
            prod = prod.mul(&h.square_free()?);
        }
    }
    let mut pts = vec![range.lo().clone(), range.hi().clone()];
    if prod.degree() > 0 {
        for iv in isolate_roots(&prod, range, &cfg.root_tolerance)? {
            pts.push(iv.lo().clone());
            pts.push(iv.hi().clone());
        }
    }
    pts.sort();
    pts.dedup();
    let mids: Vec<Rational> = pts
        .windows(2)
        .map(|w| Rational::simplest_between(&w[0], &w[1]))
        .collect();
    pts.extend(mids);
    pts.sort();
    pts.dedup();
    let ok = |x: &Rational| {
        conds
            .iter()
            .all(|(r, h)| !violates(sys.rel(r.row), h.sign_at(x)))
    };
    match pts.iter().find(|x| ok(x)) {
        Some(x) => Ok(Univariate::Witness(exact_witness(elim, z, x.clone())?)),
        None => Ok(Univariate::Undecided),
    }
}
