//! Interval branch-and-prune over the free moment coordinates.
//!
//! Boxes are explored depth first. A box is discarded when some reduced row
//! is violated on all of it according to interval evaluation; otherwise a few
//! rational points inside it are tried exactly before it is split.

use std::collections::BTreeMap;

use super::elim::{Elimination, ReducedRow};
use super::SolverConfig;
use crate::atomize::PolySystem;
use crate::certificates::{range_of, PruneCertificate, PruneNode};
use crate::error::Result;
use crate::numeric::{interval_eval, Polynomial, RatInterval, Rational, Space, Var};
use crate::requirements::Relation;

pub(crate) enum Search {
    Found(Vec<(Var, Rational)>),
    Refuted(PruneCertificate),
    Limit {
        region: Vec<(Var, RatInterval)>,
        row: Option<usize>,
    },
}

enum Node {
    Found(Vec<Rational>),
    Pruned(PruneNode),
    Limit,
}

fn violated(rel: Relation, b: &RatInterval) -> bool {
    match rel {
        Relation::EqZero => !b.contains_zero(),
        Relation::GeqZero => b.hi().is_negative(),
        Relation::GtZero => !b.hi().is_positive(),
        Relation::NeqZero => b.is_point() && b.lo().is_zero(),
    }
}

fn certainly_holds(rel: Relation, b: &RatInterval) -> bool {
    match rel {
        Relation::EqZero => b.is_point() && b.lo().is_zero(),
        Relation::GeqZero => !b.lo().is_negative(),
        Relation::GtZero => b.lo().is_positive(),
        Relation::NeqZero => !b.contains_zero(),
    }
}

struct Bnp<'a> {
    vars: Vec<Var>,
    rows: Vec<(&'a ReducedRow, Relation)>,
    cfg: &'a SolverConfig,
    nodes: u64,
    /// Deepest box left open, with the first row it could not settle.
    open: Option<(usize, Vec<RatInterval>, Option<usize>)>,
}

impl<'a> Bnp<'a> {
    fn bound(&self, p: &Polynomial, bx: &[RatInterval]) -> Result<RatInterval> {
        interval_eval(p, |v| {
            self.vars
                .iter()
                .position(|w| *w == v)
                .map(|i| bx[i].clone())
        })
    }

    fn holds_at(&self, x: &[Rational]) -> Result<bool> {
        for (r, rel) in &self.rows {
            let v = r
                .form
                .eval_with(|v| self.vars.iter().position(|w| *w == v).map(|i| x[i].clone()))?;
            if !rel.holds(&v) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// The centre, then the centre with equations solved one variable at a time.
    fn try_points(&self, bx: &[RatInterval]) -> Result<Option<Vec<Rational>>> {
        let mut x: Vec<Rational> = bx.iter().map(RatInterval::mid).collect();
        if self.holds_at(&x)? {
            return Ok(Some(x));
        }
        let mut fixed = vec![false; self.vars.len()];
        for (r, rel) in &self.rows {
            if *rel != Relation::EqZero {
                continue;
            }
            let p = r.form.partial_eval(|v| {
                let i = self.vars.iter().position(|w| *w == v)?;
                fixed[i].then(|| x[i].clone())
            });
            let mut solved = false;
            for (i, v) in self.vars.iter().enumerate() {
                if fixed[i] || solved {
                    continue;
                }
                let others = p.partial_eval(|w| {
                    (w != *v).then(|| {
                        x[self.vars.iter().position(|u| *u == w).expect("box var")].clone()
                    })
                });
                if let Some((c, rest)) = others.split_linear(*v) {
                    if others.degree_in(*v) == 1 && rest.is_constant() {
                        let val = -(rest.constant_term() / c);
                        if bx[i].contains(&val) {
                            x[i] = val;
                            fixed[i] = true;
                            solved = true;
                        }
                    }
                }
            }
        }
        Ok(self.holds_at(&x)?.then_some(x))
    }

    fn visit(&mut self, bx: &mut Vec<RatInterval>, depth: usize) -> Result<Node> {
        self.nodes += 1;
        let mut blocking = None;
        for (k, (r, rel)) in self.rows.iter().enumerate() {
            let b = self.bound(&r.form, bx)?;
            if violated(*rel, &b) {
                return Ok(Node::Pruned(PruneNode::Leaf { row: k, bound: b }));
            }
            if blocking.is_none() && !certainly_holds(*rel, &b) {
                blocking = Some(k);
            }
        }
        if let Some(x) = self.try_points(bx)? {
            return Ok(Node::Found(x));
        }
        let widest =
            (0..bx.len())
                .filter(|&i| !bx[i].is_point())
                .fold(None, |best: Option<usize>, i| match best {
                    Some(b) if bx[b].width() >= bx[i].width() => Some(b),
                    _ => Some(i),
                });
        let stop = depth >= self.cfg.max_depth as usize || self.nodes >= self.cfg.max_nodes;
        let Some(i) = widest.filter(|_| !stop) else {
            if self.open.as_ref().is_none_or(|o| depth > o.0) {
                self.open = Some((depth, bx.clone(), blocking));
            }
            return Ok(Node::Limit);
        };
        let iv = bx[i].clone();
        let at = iv.mid();
        let (lo, hi) = (
            RatInterval::new(iv.lo().clone(), at.clone())?,
            RatInterval::new(at.clone(), iv.hi().clone())?,
        );
        bx[i] = lo;
        let low = self.visit(bx, depth + 1)?;
        if let Node::Found(x) = low {
            bx[i] = iv;
            return Ok(Node::Found(x));
        }
        bx[i] = hi;
        let high = self.visit(bx, depth + 1)?;
        bx[i] = iv;
        Ok(match (low, high) {
            (_, Node::Found(x)) => Node::Found(x),
            (Node::Pruned(a), Node::Pruned(b)) => Node::Pruned(PruneNode::Split {
                var: i,
                at,
                low: Box::new(a),
                high: Box::new(b),
            }),
            _ => Node::Limit,
        })
    }
}

fn collect_rows(node: &PruneNode, out: &mut Vec<usize>) {
    match node {
        PruneNode::Leaf { row, .. } => out.push(*row),
        PruneNode::Split { low, high, .. } => {
            collect_rows(low, out);
            collect_rows(high, out);
        }
    }
}

fn remap(node: PruneNode, map: &BTreeMap<usize, usize>) -> PruneNode {
    match node {
        PruneNode::Leaf { row, bound } => PruneNode::Leaf {
            row: map[&row],
            bound,
        },
        PruneNode::Split { var, at, low, high } => PruneNode::Split {
            var,
            at,
            low: Box::new(remap(*low, map)),
            high: Box::new(remap(*high, map)),
        },
    }
}

/// Searches the box of coordinate ranges for a point satisfying every
/// nonconstant reduced row, or a tree of boxes each violating one of them.
pub(crate) fn branch_and_prune(
    sys: &PolySystem,
    elim: &Elimination,
    cfg: &SolverConfig,
) -> Result<(Search, u64)> {
    let vars = elim.free_vars();
    let rows: Vec<(&ReducedRow, Relation)> = elim
        .reduced_rows()
        .into_iter()
        .map(|r| (r, sys.rel(r.row)))
        .collect();
    let domain = vars
        .iter()
        .map(|v| range_of(sys, &Polynomial::var(Space::M, *v)))
        .collect::<Result<Vec<_>>>()?;
    let mut bnp = Bnp {
        vars: vars.clone(),
        rows,
        cfg,
        nodes: 0,
        open: None,
    };
    let mut bx = domain.clone();
    let found = match bnp.visit(&mut bx, 0)? {
        Node::Found(x) => Search::Found(vars.into_iter().zip(x).collect()),
        Node::Pruned(tree) => {
            let mut used = Vec::new();
            collect_rows(&tree, &mut used);
            used.sort_unstable();
            used.dedup();
            let map: BTreeMap<usize, usize> =
                used.iter().enumerate().map(|(k, r)| (*r, k)).collect();
            Search::Refuted(PruneCertificate {
                vars,
                domain,
                rows: used.iter().map(|&k| bnp.rows[k].0.congruence()).collect(),
                tree: remap(tree, &map),
            })
        }
        Node::Limit => {
            let (_, region, row) = bnp.open.take().expect("limit records a box");
            Search::Limit {
                region: vars.into_iter().zip(region).collect(),
                row: row.map(|k| bnp.rows[k].0.row),
            }
        }
    };
    Ok((found, bnp.nodes))
}
