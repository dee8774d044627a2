//! Linear feasibility with strict and `!=` rows.
//!
//! The non-strict relaxation is settled by the simplex. Strict rows are then
//! handled by maximizing a common slack, and each `!=` row by moving the point
//! towards a vertex where the row is nonzero; finitely many hyperplanes cannot
//! cover a convex set that is not contained in one of them.

use super::lp::{self, Lp, LpOutcome, LpRow, Sense};
use crate::error::{Error, Result};
use crate::numeric::{Polynomial, Rational, Var};
use crate::requirements::Relation;

#[derive(Clone, Debug)]
pub(crate) struct LinRow {
    pub id: usize,
    pub poly: Polynomial,
    pub rel: Relation,
}

/// Affine rows over `vars`; `bounds[j]` names the row that makes column `j`
/// nonnegative, if any (free otherwise).
#[derive(Clone, Debug)]
pub(crate) struct LinProblem {
    pub vars: Vec<Var>,
    pub bounds: Vec<Option<usize>>,
    pub rows: Vec<LinRow>,
}

#[derive(Clone, Debug)]
pub(crate) enum LinOutcome {
    Point(Vec<Rational>),
    /// `sum k * row == target` identically (rows by id).
    Combination {
        terms: Vec<(usize, Rational)>,
        target: Rational,
    },
    /// `row + below == 0` and `-row + above == 0` identically.
    Vanishing {
        row: usize,
        below: Vec<(usize, Rational)>,
        above: Vec<(usize, Rational)>,
    },
}

impl LinProblem {
    fn col(&self, v: Var) -> usize {
        self.vars
            .iter()
            .position(|w| *w == v)
            .expect("variable registered")
    }

    fn coefs(&self, p: &Polynomial) -> Vec<(usize, Rational)> {
        p.vars()
            .into_iter()
            .map(|v| (self.col(v), p.linear_coef(v)))
            .filter(|(_, c)| !c.is_zero())
            .collect()
    }

    fn eval(&self, p: &Polynomial, x: &[Rational]) -> Rational {
        p.eval_with(|v| Some(x[self.col(v)].clone()))
            .expect("all variables bound")
    }

    /// The relaxation: equations, and every inequality as `>= 0`.
    fn relaxation(&self) -> (Lp, Vec<usize>) {
        let mut rows = Vec::new();
        let mut ids = Vec::new();
        for r in &self.rows {
            let sense = match r.rel {
                Relation::EqZero => Sense::Eq,
                Relation::GeqZero | Relation::GtZero => Sense::Ge,
                Relation::NeqZero => continue,
            };
            rows.push(LpRow {
                coefs: self.coefs(&r.poly),
                rhs: -r.poly.constant_term(),
                sense,
            });
            ids.push(r.id);
        }
        let free = self.bounds.iter().map(Option::is_none).collect();
        (Lp { free, rows }, ids)
    }

    fn collect(&self, ids: &[usize], d: &lp::Dual) -> Vec<(usize, Rational)> {
        let mut out: Vec<(usize, Rational)> = ids
            .iter()
            .zip(&d.rows)
            .filter(|(_, k)| !k.is_zero())
            .map(|(i, k)| (*i, k.clone()))
            .collect();
        for (j, b) in self.bounds.iter().enumerate() {
            if let Some(id) = b {
                if !d.vars[j].is_zero() {
                    out.push((*id, d.vars[j].clone()));
                }
            }
        }
        out
    }
}

pub(crate) fn solve_linear(p: &LinProblem) -> Result<LinOutcome> {
    for r in &p.rows {
        if r.poly.total_degree() > 1 {
            return Err(Error::Invalid(format!("row {} is not affine", r.id)));
        }
    }
    let (relax, ids) = p.relaxation();
    let nv = p.vars.len();
    let mut point = match lp::solve(&relax, &[], true) {
        LpOutcome::Infeasible(d) => {
            return Ok(LinOutcome::Combination {
                terms: p.collect(&ids, &d),
                target: d.constant,
            })
        }
        LpOutcome::Optimal { x, .. } => x,
        LpOutcome::Unbounded => unreachable!("zero objective"),
    };

    if p.rows.iter().any(|r| r.rel == Relation::GtZero) {
        // Maximize t subject to g - t >= 0 on strict rows and t <= 1.
        let mut lp2 = relax.clone();
        lp2.free.push(false);
        let mut k = 0;
        for r in &p.rows {
            if r.rel == Relation::NeqZero {
                continue;
            }
            if r.rel == Relation::GtZero {
                lp2.rows[k].coefs.push((nv, Rational::from_int(-1)));
            }
            k += 1;
        }
        lp2.rows.push(LpRow {
            coefs: vec![(nv, Rational::from_int(-1))],
            rhs: Rational::from_int(-1),
            sense: Sense::Ge,
        });
        match lp::solve(&lp2, &[(nv, Rational::one())], true) {
            LpOutcome::Optimal { x, value, dual } => {
                if value.is_positive() {
                    point = x[..nv].to_vec();
                } else {
                    // Setting t = 0 in the dual identity leaves the original
                    // rows summing to minus the weight on the cap.
                    let target = -ids
                        .iter()
                        .enumerate()
                        .fold(Rational::zero(), |acc, (i, _)| {
                            acc + &dual.rows[i] * &relax.rows[i].rhs
                        });
                    let mut terms: Vec<(usize, Rational)> = ids
                        .iter()
                        .zip(&dual.rows)
                        .filter(|(_, k)| !k.is_zero())
                        .map(|(i, k)| (*i, k.clone()))
                        .collect();
                    for (j, b) in p.bounds.iter().enumerate() {
                        if let Some(id) = b {
                            if !dual.vars[j].is_zero() {
                                terms.push((*id, dual.vars[j].clone()));
                            }
                        }
                    }
                    return Ok(LinOutcome::Combination { terms, target });
                }
            }
            o => return Err(Error::Invalid(format!("slack maximization failed: {o:?}"))),
        }
    }

    let neq: Vec<&LinRow> = p
        .rows
        .iter()
        .filter(|r| r.rel == Relation::NeqZero)
        .collect();
    for h in &neq {
        if !p.eval(&h.poly, &point).is_zero() {
            continue;
        }
        let obj = p.coefs(&h.poly);
        let h0 = h.poly.constant_term();
        let mut target_point = None;
        let mut duals = Vec::new();
        for maximize in [true, false] {
            match lp::solve(&relax, &obj, maximize) {
                LpOutcome::Optimal { x, value, dual } => {
                    let v = value + &h0;
                    if !v.is_zero() {
                        target_point = Some(x);
                        break;
                    }
                    duals.push(dual);
                }
                o => return Err(Error::Invalid(format!("bounding a != row failed: {o:?}"))),
            }
        }
        let Some(q) = target_point else {
            return Ok(LinOutcome::Vanishing {
                row: h.id,
                below: p.collect(&ids, &duals[0]),
                above: p.collect(&ids, &duals[1]),
            });
        };
        // Move towards q by 1/2, 1/3, ... until h and every row already
        // nonzero stay nonzero. Each row rules out at most one step.
        let keep: Vec<&LinRow> = neq
            .iter()
            .copied()
            .filter(|r| !p.eval(&r.poly, &point).is_zero())
            .collect();
        let mut denom = 2;
        loop {
            let tau = Rational::frac(1, denom);
            let cand: Vec<Rational> = point
                .iter()
                .zip(&q)
                .map(|(a, b)| a + &(&tau * &(b - a)))
                .collect();
            if !p.eval(&h.poly, &cand).is_zero()
                && keep.iter().all(|r| !p.eval(&r.poly, &cand).is_zero())
            {
                point = cand;
                break;
            }
            denom += 1;
        }
    }
    Ok(LinOutcome::Point(point))
}
