//! Elimination of equations that are affine in some moment coordinate.
//!
//! Works in moment coordinates, where independence rows stay short. Every
//! reduced row carries the explicit combination of original equations that
//! was subtracted from it, so any conclusion drawn from reduced rows can be
//! restated over the original system.

use std::collections::BTreeMap;

use crate::atomize::{PolySystem, RowKind};
use crate::certificates::Congruence;
use crate::error::Result;
use crate::numeric::{Polynomial, Rational, Space, Var};
use crate::requirements::Relation;

pub(crate) type Mults = BTreeMap<usize, Polynomial>;

pub(crate) fn add_into(m: &mut Mults, row: usize, p: Polynomial) {
    if p.is_zero() {
        return;
    }
    let e = m.entry(row).or_insert_with(|| Polynomial::zero(p.space()));
    *e = e.add(&p);
    if e.is_zero() {
        m.remove(&row);
    }
}

/// `form = original(row) + sum mults[j] * original(j)` over equations `j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReducedRow {
    pub row: usize,
    pub form: Polynomial,
    pub(crate) mults: Mults,
}

impl ReducedRow {
    pub(crate) fn original(sys: &PolySystem, row: usize, space: Space) -> Result<Self> {
        Ok(ReducedRow {
            row,
            form: sys.form(row, space)?.into_owned(),
            mults: Mults::new(),
        })
    }

    pub fn congruence(&self) -> Congruence {
        Congruence {
            base: Some(self.row),
            form: self.form.clone(),
            multipliers: self.mults.iter().map(|(r, p)| (*r, p.clone())).collect(),
        }
    }

    fn reduce_by(&mut self, p: &Pivot) {
        if self.form.degree_in(p.var) == 0 {
            return;
        }
        let (q, rem) = self.form.div_by_linear(p.var, &p.value);
        // q * (v - s) = (q / c) * pivot form.
        let k = q.scale(&p.coef.recip().expect("pivot coefficient is nonzero"));
        self.form = rem;
        add_into(&mut self.mults, p.red.row, k.neg());
        for (j, t) in &p.red.mults {
            add_into(&mut self.mults, *j, k.mul(t).neg());
        }
    }
}

/// `var = value`, from a row whose reduced form is `coef * (var - value)`.
#[derive(Clone, Debug)]
pub struct Pivot {
    pub var: Var,
    pub value: Polynomial,
    coef: Rational,
    red: ReducedRow,
}

impl Pivot {
    pub fn row(&self) -> usize {
        self.red.row
    }

    fn refresh(&mut self) {
        let v = Polynomial::var(Space::M, self.var);
        self.value = v.sub(&self.red.form.scale(&self.coef.recip().expect("nonzero")));
    }
}

#[derive(Clone, Debug)]
pub struct Elimination {
    pivots: Vec<Pivot>,
    /// Equations that did not become pivots and did not vanish.
    residual: Vec<ReducedRow>,
    /// Every inequality, strict and `!=` row, reduced.
    others: Vec<ReducedRow>,
    atom_count: usize,
}

/// Repeatedly solves an equation for a variable it contains affinely with a
/// constant coefficient. Among candidate rows the lowest current degree wins,
/// then the lowest row index; the pivot variable is the highest moment index.
pub fn eliminate(sys: &PolySystem) -> Result<Elimination> {
    let mut pending = Vec::new();
    let mut others = Vec::new();
    for i in 0..sys.len() {
        let r = ReducedRow::original(sys, i, Space::M)?;
        if sys.rel(i) == Relation::EqZero {
            pending.push(r);
        } else {
            others.push(r);
        }
    }
    let mut pivots: Vec<Pivot> = Vec::new();
    loop {
        pending.retain(|r| !r.form.is_zero());
        let choice = pending
            .iter()
            .enumerate()
            .filter_map(|(k, r)| {
                if r.form.is_constant() {
                    return None;
                }
                let v = r
                    .form
                    .vars()
                    .into_iter()
                    .rev()
                    .find(|&v| r.form.split_linear(v).is_some())?;
                Some(((r.form.total_degree(), r.row), k, v))
            })
            .min_by(|a, b| a.0.cmp(&b.0));
        let Some((_, k, v)) = choice else { break };
        let red = pending.remove(k);
        let (coef, _) = red.form.split_linear(v).expect("checked");
        let mut piv = Pivot {
            var: v,
            value: Polynomial::zero(Space::M),
            coef,
            red,
        };
        piv.refresh();
        for p in pivots.iter_mut() {
            if p.red.form.degree_in(v) > 0 {
                p.red.reduce_by(&piv);
                p.refresh();
            }
        }
        for r in pending.iter_mut() {
            r.reduce_by(&piv);
        }
        pivots.push(piv);
    }
    for r in others.iter_mut() {
        for p in &pivots {
            r.reduce_by(p);
        }
    }
    Ok(Elimination {
        pivots,
        residual: pending,
        others,
        atom_count: sys.atom_count(),
    })
}

impl Elimination {
    pub fn pivots(&self) -> &[Pivot] {
        &self.pivots
    }

    pub fn residual(&self) -> &[ReducedRow] {
        &self.residual
    }

    pub fn others(&self) -> &[ReducedRow] {
        &self.others
    }

    /// Residual equations and reduced inequalities, in row order.
    pub fn reduced_rows(&self) -> Vec<&ReducedRow> {
        let mut v: Vec<&ReducedRow> = self.residual.iter().chain(&self.others).collect();
        v.sort_by_key(|r| r.row);
        v
    }

    /// Moment coordinates that survive in some reduced row.
    pub fn free_vars(&self) -> Vec<Var> {
        let mut vs: Vec<Var> = self
            .reduced_rows()
            .iter()
            .flat_map(|r| r.form.vars())
            .collect();
        vs.sort_unstable();
        vs.dedup();
        vs
    }

    pub fn is_pivot(&self, v: Var) -> bool {
        self.pivots.iter().any(|p| p.var == v)
    }

    /// Reduces any moment-space polynomial modulo the pivots.
    pub fn reduce(&self, p: &Polynomial) -> Polynomial {
        let mut out = p.clone();
        for piv in &self.pivots {
            out = out.substitute(piv.var, &piv.value);
        }
        out
    }

    /// Full moment vector from values of the free coordinates; coordinates
    /// that occur nowhere are set to zero.
    pub fn point(&self, free: &[(Var, Rational)]) -> Result<Vec<Rational>> {
        let mut m = vec![Rational::zero(); self.atom_count];
        for (v, x) in free {
            m[*v as usize] = x.clone();
        }
        let lookup = |v: Var| {
            free.iter()
                .find(|f| f.0 == v)
                .map(|f| f.1.clone())
                .or(Some(Rational::zero()))
        };
        for p in &self.pivots {
            m[p.var as usize] = p.value.eval_with(lookup)?;
        }
        Ok(m)
    }

    /// One line per substitution, in pivot order.
    pub fn describe(&self, sys: &PolySystem) -> Vec<String> {
        self.pivots
            .iter()
            .map(|p| {
                format!(
                    "{} = {}  (row {}, {})",
                    sys.var_name(Space::M, p.var),
                    sys.show(&p.value),
                    p.red.row,
                    sys.origin(p.red.row)
                )
            })
            .collect()
    }

    /// Atom probabilities as polynomials in the free coordinates.
    pub fn atom_forms(&self, sys: &PolySystem) -> Vec<Polynomial> {
        let mut out = vec![Polynomial::zero(Space::M); sys.atom_count()];
        for r in &self.others {
            if let RowKind::Nonneg(a) = sys.kind(r.row) {
                out[a as usize] = r.form.clone();
            }
        }
        out
    }
}

/// Rewrites atom forms over a single free coordinate in terms of the atom
/// `pick`, when that atom is a nonconstant affine function of it.
pub fn express_in_atom(forms: &[Polynomial], pick: usize) -> Option<Vec<Polynomial>> {
    let target = forms.get(pick)?;
    let vars = target.vars();
    let [t] = vars.as_slice() else { return None };
    if target.total_degree() != 1 || forms.iter().any(|f| f.vars().iter().any(|v| v != t)) {
        return None;
    }
    // target = a t + b, so t = (y - b) / a.
    let (a, b) = target.split_linear(*t)?;
    let y = Polynomial::var(Space::Y, pick as Var);
    let inv = y.add_constant(&-b.constant_term()).scale(&a.recip().ok()?);
    Some(
        forms
            .iter()
            .map(|f| {
                f.coefficients_in(*t)
                    .iter()
                    .rev()
                    .fold(Polynomial::zero(Space::Y), |acc, c| {
                        acc.mul(&inv).add_constant(&c.constant_term())
                    })
            })
            .collect(),
    )
}
