//! Requirement statements and their desugaring into polynomial constraints
//! over probability terms.
//!
//! Every distinct boolean combination (up to its atom set) gets one
//! x-variable, numbered in order of first appearance.

mod parse;
mod print;

use std::collections::HashMap;
use std::fmt;

use crate::events::{atoms_of, AtomSet, BoolExpr, EventTable};
use crate::numeric::{Polynomial, Rational, Space, Var};

pub use parse::{parse_event, parse_spec, substitute_params};
pub use print::print_spec;

/// Collective independence statements expand to `2^m - m - 1` rows; `m` is capped.
pub const MAX_COLLECTIVE: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Relation {
    EqZero,
    GeqZero,
    GtZero,
    NeqZero,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::EqZero => "= 0",
            Relation::GeqZero => ">= 0",
            Relation::GtZero => "> 0",
            Relation::NeqZero => "!= 0",
        }
    }

    pub fn holds(self, v: &Rational) -> bool {
        match self {
            Relation::EqZero => v.is_zero(),
            Relation::GeqZero => !v.is_negative(),
            Relation::GtZero => v.is_positive(),
            Relation::NeqZero => !v.is_zero(),
        }
    }

    pub fn is_strict(self) -> bool {
        matches!(self, Relation::GtZero | Relation::NeqZero)
    }
}

/// Comparison as written by the user.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RelOp {
    Eq,
    Ne,
    Le,
    Ge,
    Lt,
    Gt,
}

impl RelOp {
    pub fn symbol(self) -> &'static str {
        match self {
            RelOp::Eq => "=",
            RelOp::Ne => "!=",
            RelOp::Le => "<=",
            RelOp::Ge => ">=",
            RelOp::Lt => "<",
            RelOp::Gt => ">",
        }
    }

    /// `lhs op rhs` as `(poly, rel)` with `poly rel 0`.
    pub fn normalize(self, lhs: Polynomial, rhs: Polynomial) -> (Polynomial, Relation) {
        match self {
            RelOp::Eq => (lhs.sub(&rhs), Relation::EqZero),
            RelOp::Ne => (lhs.sub(&rhs), Relation::NeqZero),
            RelOp::Ge => (lhs.sub(&rhs), Relation::GeqZero),
            RelOp::Gt => (lhs.sub(&rhs), Relation::GtZero),
            RelOp::Le => (rhs.sub(&lhs), Relation::GeqZero),
            RelOp::Lt => (rhs.sub(&lhs), Relation::GtZero),
        }
    }
}

/// Polynomial expression over probability terms, as written.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PExpr {
    Num(Rational),
    Prob(BoolExpr),
    Neg(Box<PExpr>),
    Add(Box<PExpr>, Box<PExpr>),
    Sub(Box<PExpr>, Box<PExpr>),
    Mul(Box<PExpr>, Box<PExpr>),
    Pow(Box<PExpr>, u32),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Statement {
    Probability {
        expr: BoolExpr,
        op: RelOp,
        value: Rational,
    },
    Conditional {
        target: BoolExpr,
        given: BoolExpr,
        value: Rational,
    },
    Independent {
        exprs: Vec<BoolExpr>,
        collective: bool,
    },
    CondIndependent {
        a: BoolExpr,
        b: BoolExpr,
        given: BoolExpr,
    },
    AlgebraIndependent {
        left: Vec<usize>,
        right: Vec<usize>,
    },
    Polynomial {
        lhs: PExpr,
        op: RelOp,
        rhs: PExpr,
    },
}

impl Statement {
    pub fn kind(&self) -> SugarKind {
        match self {
            Statement::Probability { .. } => SugarKind::Probability,
            Statement::Conditional { .. } => SugarKind::Conditional,
            Statement::Independent {
                collective: true, ..
            } => SugarKind::Independence,
            Statement::Independent {
                collective: false, ..
            } => SugarKind::PairwiseIndependence,
            Statement::CondIndependent { .. } => SugarKind::ConditionalIndependence,
            Statement::AlgebraIndependent { .. } => SugarKind::AlgebraIndependence,
            Statement::Polynomial { .. } => SugarKind::Polynomial,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SugarKind {
    Probability,
    Conditional,
    Independence,
    PairwiseIndependence,
    ConditionalIndependence,
    AlgebraIndependence,
    Polynomial,
}

impl SugarKind {
    pub fn name(self) -> &'static str {
        match self {
            SugarKind::Probability => "probability",
            SugarKind::Conditional => "conditional",
            SugarKind::Independence => "independent",
            SugarKind::PairwiseIndependence => "pairwise_independent",
            SugarKind::ConditionalIndependence => "cond_independent",
            SugarKind::AlgebraIndependence => "indep_algebras",
            SugarKind::Polynomial => "constraint",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Provenance {
    /// 1-based source line, 0 when built programmatically.
    pub line: usize,
    pub kind: SugarKind,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {} ({})", self.line, self.kind.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub poly: Polynomial,
    pub rel: Relation,
    pub provenance: Provenance,
}

/// Registry of probability terms: atom set to x-variable.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TermRegistry {
    n: usize,
    terms: Vec<(BoolExpr, AtomSet)>,
    index: HashMap<AtomSet, Var>,
}

impl TermRegistry {
    pub fn new(n: usize) -> Self {
        TermRegistry {
            n,
            ..Default::default()
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// The x-variable of `e`, registering it on first sight.
    pub fn var(&mut self, e: &BoolExpr) -> Var {
        let atoms = atoms_of(e, self.n);
        if let Some(&v) = self.index.get(&atoms) {
            return v;
        }
        let v = self.terms.len() as Var;
        self.index.insert(atoms.clone(), v);
        self.terms.push((e.clone(), atoms));
        v
    }

    pub fn x(&mut self, e: &BoolExpr) -> Polynomial {
        Polynomial::var(Space::X, self.var(e))
    }

    pub fn lookup(&self, atoms: &AtomSet) -> Option<Var> {
        self.index.get(atoms).copied()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn expr(&self, v: Var) -> &BoolExpr {
        &self.terms[v as usize].0
    }

    pub fn atoms(&self, v: Var) -> &AtomSet {
        &self.terms[v as usize].1
    }

    pub fn iter(&self) -> impl Iterator<Item = (Var, &BoolExpr, &AtomSet)> {
        self.terms
            .iter()
            .enumerate()
            .map(|(i, (e, a))| (i as Var, e, a))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Warning {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

/// A parsed requirement file: events, the statements as written, and their desugaring.
#[derive(Clone, Debug)]
pub struct RequirementSet {
    pub events: EventTable,
    pub statements: Vec<(Statement, usize)>,
    pub terms: TermRegistry,
    pub constraints: Vec<Constraint>,
    pub warnings: Vec<Warning>,
}

impl RequirementSet {
    /// Desugars the statements in order; `line` 0 for statements built in code.
    pub fn from_statements(events: EventTable, statements: Vec<(Statement, usize)>) -> Self {
        let mut terms = TermRegistry::new(events.len());
        let mut constraints = Vec::new();
        let mut warnings = Vec::new();
        for (st, line) in &statements {
            let prov = Provenance {
                line: *line,
                kind: st.kind(),
            };
            let out = desugar(&mut terms, st);
            warnings.extend(out.warnings.into_iter().map(|message| Warning {
                line: *line,
                message,
            }));
            for (poly, rel) in out.rows {
                if poly.is_zero() && rel == Relation::EqZero {
                    warnings.push(Warning {
                        line: *line,
                        message: "constraint is trivially satisfied".into(),
                    });
                    continue;
                }
                constraints.push(Constraint {
                    poly,
                    rel,
                    provenance: prov.clone(),
                });
            }
        }
        RequirementSet {
            events,
            statements,
            terms,
            constraints,
            warnings,
        }
    }

    pub fn n(&self) -> usize {
        self.events.len()
    }

    /// Display name of an x-variable: `P(expr)`.
    pub fn term_name(&self, v: Var) -> String {
        format!("P({})", print::prob_arg(self.terms.expr(v), &self.events))
    }
}

struct Desugared {
    rows: Vec<(Polynomial, Relation)>,
    warnings: Vec<String>,
}

fn desugar(reg: &mut TermRegistry, st: &Statement) -> Desugared {
    let mut warnings = Vec::new();
    let rows = match st {
        Statement::Probability { expr, op, value } => {
            if value.is_negative() || value > &Rational::one() {
                warnings.push(format!("probability constant {value} lies outside [0, 1]"));
            }
            vec![desugar_probability(reg, expr, *op, value)]
        }
        Statement::Conditional {
            target,
            given,
            value,
        } => {
            if value.is_negative() || value > &Rational::one() {
                warnings.push(format!(
                    "conditional probability {value} lies outside [0, 1]"
                ));
            }
            desugar_conditional(reg, target, given, value)
        }
        Statement::Independent { exprs, collective } => {
            desugar_independence(reg, exprs, *collective)
        }
        Statement::CondIndependent { a, b, given } => {
            desugar_conditional_independence(reg, a, b, given)
        }
        Statement::AlgebraIndependent { left, right } => {
            if left.iter().any(|e| right.contains(e)) {
                warnings.push("indep_algebras sides share an event".into());
            }
            desugar_algebra_independence(reg, left, right)
        }
        Statement::Polynomial { lhs, op, rhs } => {
            let l = pexpr_poly(reg, lhs);
            let r = pexpr_poly(reg, rhs);
            vec![op.normalize(l, r)]
        }
    };
    Desugared { rows, warnings }
}

pub fn pexpr_poly(reg: &mut TermRegistry, e: &PExpr) -> Polynomial {
    match e {
        PExpr::Num(c) => Polynomial::constant(Space::X, c.clone()),
        PExpr::Prob(b) => reg.x(b),
        PExpr::Neg(a) => pexpr_poly(reg, a).neg(),
        PExpr::Add(a, b) => {
            let pa = pexpr_poly(reg, a);
            pa.add(&pexpr_poly(reg, b))
        }
        PExpr::Sub(a, b) => {
            let pa = pexpr_poly(reg, a);
            pa.sub(&pexpr_poly(reg, b))
        }
        PExpr::Mul(a, b) => {
            let pa = pexpr_poly(reg, a);
            pa.mul(&pexpr_poly(reg, b))
        }
        PExpr::Pow(a, k) => pexpr_poly(reg, a).pow(*k),
    }
}

/// `P(e) op c`.
pub fn desugar_probability(
    reg: &mut TermRegistry,
    e: &BoolExpr,
    op: RelOp,
    c: &Rational,
) -> (Polynomial, Relation) {
    let x = reg.x(e);
    op.normalize(x, Polynomial::constant(Space::X, c.clone()))
}

/// Product rows for every pair (pairwise) or every subset of size at least two (collective).
pub fn desugar_independence(
    reg: &mut TermRegistry,
    exprs: &[BoolExpr],
    collective: bool,
) -> Vec<(Polynomial, Relation)> {
    let m = exprs.len();
    let mut subsets: Vec<Vec<usize>> = Vec::new();
    if collective {
        for size in 2..=m {
            let mut s: Vec<usize> = (0..size).collect();
            loop {
                subsets.push(s.clone());
                // next combination in lexicographic order
                let mut i = size;
                while i > 0 && s[i - 1] == m - size + i - 1 {
                    i -= 1;
                }
                if i == 0 {
                    break;
                }
                s[i - 1] += 1;
                for j in i..size {
                    s[j] = s[j - 1] + 1;
                }
            }
        }
    } else {
        for i in 0..m {
            for j in i + 1..m {
                subsets.push(vec![i, j]);
            }
        }
    }
    for e in exprs {
        reg.var(e);
    }
    subsets
        .into_iter()
        .map(|s| {
            let inter = BoolExpr::and_all(s.iter().map(|&i| exprs[i].clone()).collect());
            let lhs = reg.x(&inter);
            let prod = s.iter().fold(Polynomial::one(Space::X), |acc, &i| {
                acc.mul(&reg.x(&exprs[i]))
            });
            (lhs.sub(&prod), Relation::EqZero)
        })
        .collect()
}

/// `P(target | given) = c` as `x(target & given) - c x(given) = 0` and `x(given) != 0`.
pub fn desugar_conditional(
    reg: &mut TermRegistry,
    target: &BoolExpr,
    given: &BoolExpr,
    c: &Rational,
) -> Vec<(Polynomial, Relation)> {
    let joint = reg.x(&BoolExpr::and(target.clone(), given.clone()));
    let g = reg.x(given);
    vec![
        (joint.sub(&g.scale(c)), Relation::EqZero),
        (g, Relation::NeqZero),
    ]
}

/// `a`, `b` independent given `c`, cleared of denominators.
pub fn desugar_conditional_independence(
    reg: &mut TermRegistry,
    a: &BoolExpr,
    b: &BoolExpr,
    c: &BoolExpr,
) -> Vec<(Polynomial, Relation)> {
    let abc = reg.x(&BoolExpr::and(
        BoolExpr::and(a.clone(), b.clone()),
        c.clone(),
    ));
    let xc = reg.x(c);
    let ac = reg.x(&BoolExpr::and(a.clone(), c.clone()));
    let bc = reg.x(&BoolExpr::and(b.clone(), c.clone()));
    vec![
        (abc.mul(&xc).sub(&ac.mul(&bc)), Relation::EqZero),
        (xc, Relation::NeqZero),
    ]
}

/// Minterm of the listed events selected by `bits` (bit `k` refers to `evs[k]`).
fn sub_atom(evs: &[usize], bits: u32) -> BoolExpr {
    BoolExpr::and_all(
        evs.iter()
            .enumerate()
            .map(|(k, &e)| {
                if (bits >> k) & 1 == 1 {
                    BoolExpr::event(e)
                } else {
                    BoolExpr::not(BoolExpr::event(e))
                }
            })
            .collect(),
    )
}

/// Independence of the algebras generated by `left` and by `right`.
///
/// One product row per pair (left atom, right atom), skipping the left atom
/// where every left event fails: that row is implied by the others together
/// with normalization.
pub fn desugar_algebra_independence(
    reg: &mut TermRegistry,
    left: &[usize],
    right: &[usize],
) -> Vec<(Polynomial, Relation)> {
    let mut rows = Vec::new();
    let nl = left.len() as u32;
    let nr = right.len() as u32;
    // Left atoms in descending bit order so the all-occur atom comes first.
    for lb in (1..1u32 << nl).rev() {
        let beta = sub_atom(left, lb);
        for rb in (0..1u32 << nr).rev() {
            let alpha = sub_atom(right, rb);
            let joint = reg.x(&BoolExpr::and(alpha.clone(), beta.clone()));
            let xa = reg.x(&alpha);
            let xb = reg.x(&beta);
            rows.push((joint.sub(&xa.mul(&xb)), Relation::EqZero));
        }
    }
    rows
}

#[cfg(test)]
mod tests;
