//! Renders a requirement set back into the DSL; reparsing yields the same statements.

use std::fmt::Write;

use crate::events::{BoolExpr, EventTable};

use super::{PExpr, RequirementSet, Statement};

/// Argument of `P(...)`: a top-level union is parenthesized.
pub(crate) fn prob_arg(e: &BoolExpr, events: &EventTable) -> String {
    match e {
        BoolExpr::Or(..) => format!("({})", e.display(events)),
        _ => e.display(events).to_string(),
    }
}

fn pexpr(e: &PExpr, events: &EventTable, prec: u8, out: &mut String) {
    let wrap = |need: bool, out: &mut String, f: &dyn Fn(&mut String)| {
        if need {
            out.push('(');
        }
        f(out);
        if need {
            out.push(')');
        }
    };
    match e {
        PExpr::Num(v) => {
            if v.is_negative() && prec > 3 {
                let _ = write!(out, "({v})");
            } else {
                let _ = write!(out, "{v}");
            }
        }
        PExpr::Prob(b) => {
            let _ = write!(out, "P({})", prob_arg(b, events));
        }
        PExpr::Neg(a) => wrap(prec > 3, out, &|o: &mut String| {
            o.push('-');
            match a.as_ref() {
                PExpr::Num(_) | PExpr::Neg(_) => {
                    o.push('(');
                    pexpr(a, events, 0, o);
                    o.push(')');
                }
                _ => pexpr(a, events, 3, o),
            }
        }),
        PExpr::Add(a, b) | PExpr::Sub(a, b) => {
            let op = if matches!(e, PExpr::Add(..)) {
                " + "
            } else {
                " - "
            };
            wrap(prec > 1, out, &|o: &mut String| {
                pexpr(a, events, 1, o);
                o.push_str(op);
                pexpr(b, events, 2, o);
            })
        }
        PExpr::Mul(a, b) => wrap(prec > 2, out, &|o: &mut String| {
            pexpr(a, events, 2, o);
            o.push_str(" * ");
            pexpr(b, events, 3, o);
        }),
        PExpr::Pow(a, k) => wrap(prec > 3, out, &|o: &mut String| {
            pexpr(a, events, 4, o);
            let _ = write!(o, "^{k}");
        }),
    }
}

pub fn print_statement(st: &Statement, events: &EventTable) -> String {
    let list = |es: &[BoolExpr]| {
        es.iter()
            .map(|e| e.display(events).to_string())
            .collect::<Vec<_>>()
            .join(", ")
    };
    let names = |ix: &[usize]| {
        ix.iter()
            .map(|&i| events.name(i))
            .collect::<Vec<_>>()
            .join(" ")
    };
    match st {
        Statement::Probability { expr, op, value } => {
            format!("P({}) {} {}", prob_arg(expr, events), op.symbol(), value)
        }
        Statement::Conditional {
            target,
            given,
            value,
        } => format!(
            "P({} given {}) = {}",
            prob_arg(target, events),
            prob_arg(given, events),
            value
        ),
        Statement::Independent { exprs, collective } => {
            let kw = if *collective {
                "independent"
            } else {
                "pairwise_independent"
            };
            format!("{kw} {}", list(exprs))
        }
        Statement::CondIndependent { a, b, given } => format!(
            "cond_independent {}, {} given {}",
            a.display(events),
            b.display(events),
            given.display(events)
        ),
        Statement::AlgebraIndependent { left, right } => {
            format!("indep_algebras [{}] [{}]", names(left), names(right))
        }
        Statement::Polynomial { lhs, op, rhs } => {
            let mut s = String::from("constraint ");
            pexpr(lhs, events, 0, &mut s);
            let _ = write!(s, " {} ", op.symbol());
            pexpr(rhs, events, 0, &mut s);
            s
        }
    }
}

pub fn print_spec(rs: &RequirementSet) -> String {
    let mut out = String::from("events");
    for e in rs.events.iter() {
        out.push(' ');
        out.push_str(&e.name);
    }
    out.push('\n');
    for (st, _) in &rs.statements {
        out.push_str(&print_statement(st, &rs.events));
        out.push('\n');
    }
    out
}
