//! Random requirement sets with a direct semantic oracle, shared by the property suites.
#![allow(dead_code)]

use probenv_core::events::BoolExpr;
use probenv_core::numeric::Rational;
use rand::rngs::StdRng;
use rand::{RngExt, SeedableRng};

pub fn r(p: i64, q: i64) -> Rational {
    Rational::frac(p, q)
}

/// Truth of `e` on atom `a`, bit `i` of `a` being event `i`.
pub fn holds(e: &BoolExpr, a: u32) -> bool {
    match e {
        BoolExpr::Event(i) => (a >> i) & 1 == 1,
        BoolExpr::Not(x) => !holds(x, a),
        BoolExpr::And(x, y) => holds(x, a) && holds(y, a),
        BoolExpr::Or(x, y) => holds(x, a) || holds(y, a),
    }
}

pub fn prob(e: &BoolExpr, y: &[Rational]) -> Rational {
    let mut s = Rational::zero();
    for (a, v) in y.iter().enumerate() {
        if holds(e, a as u32) {
            s = &s + v;
        }
    }
    s
}

pub fn name(i: usize) -> String {
    format!("E{}", i + 1)
}

/// Fully parenthesized DSL text.
pub fn show(e: &BoolExpr) -> String {
    match e {
        BoolExpr::Event(i) => name(*i),
        BoolExpr::Not(x) => format!("!{}", show(x)),
        BoolExpr::And(x, y) => format!("({} & {})", show(x), show(y)),
        BoolExpr::Or(x, y) => format!("({} | {})", show(x), show(y)),
    }
}

pub fn random_expr(rng: &mut StdRng, n: usize, depth: u32) -> BoolExpr {
    if depth == 0 || rng.random_range(0..3) == 0 {
        return BoolExpr::event(rng.random_range(0..n));
    }
    match rng.random_range(0..3) {
        0 => BoolExpr::not(random_expr(rng, n, depth - 1)),
        1 => BoolExpr::and(
            random_expr(rng, n, depth - 1),
            random_expr(rng, n, depth - 1),
        ),
        _ => BoolExpr::or(
            random_expr(rng, n, depth - 1),
            random_expr(rng, n, depth - 1),
        ),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Op {
    Eq,
    Ne,
    Le,
    Ge,
    Lt,
    Gt,
}

impl Op {
    pub const ALL: [Op; 6] = [Op::Eq, Op::Ne, Op::Le, Op::Ge, Op::Lt, Op::Gt];

    pub fn text(self) -> &'static str {
        match self {
            Op::Eq => "=",
            Op::Ne => "!=",
            Op::Le => "<=",
            Op::Ge => ">=",
            Op::Lt => "<",
            Op::Gt => ">",
        }
    }

    pub fn test(self, a: &Rational, b: &Rational) -> bool {
        match self {
            Op::Eq => a == b,
            Op::Ne => a != b,
            Op::Le => a <= b,
            Op::Ge => a >= b,
            Op::Lt => a < b,
            Op::Gt => a > b,
        }
    }
}

#[derive(Clone, Debug)]
pub enum Stmt {
    Prob(BoolExpr, Op, Rational),
    Cond(BoolExpr, BoolExpr, Rational),
    Indep(Vec<BoolExpr>, bool),
    CondIndep(BoolExpr, BoolExpr, BoolExpr),
    Algebras(Vec<usize>, Vec<usize>),
    /// `P(a) * P(b) op P(c) + k`
    Poly(BoolExpr, BoolExpr, BoolExpr, Op, Rational),
}

fn num(c: &Rational) -> String {
    c.fraction()
}

impl Stmt {
    pub fn text(&self) -> String {
        match self {
            Stmt::Prob(e, op, c) => format!("P({}) {} {}", show(e), op.text(), num(c)),
            Stmt::Cond(a, b, c) => format!("P({} given {}) = {}", show(a), show(b), num(c)),
            Stmt::Indep(es, coll) => format!(
                "{} {}",
                if *coll {
                    "independent"
                } else {
                    "pairwise_independent"
                },
                es.iter().map(show).collect::<Vec<_>>().join(", ")
            ),
            Stmt::CondIndep(a, b, c) => format!(
                "cond_independent {}, {} given {}",
                show(a),
                show(b),
                show(c)
            ),
            Stmt::Algebras(l, rr) => format!(
                "indep_algebras [{}] [{}]",
                l.iter().map(|&i| name(i)).collect::<Vec<_>>().join(" "),
                rr.iter().map(|&i| name(i)).collect::<Vec<_>>().join(" ")
            ),
            Stmt::Poly(a, b, c, op, k) => {
                let sign = if k.is_negative() { "-" } else { "+" };
                format!(
                    "constraint P({}) * P({}) {} P({}) {sign} {}",
                    show(a),
                    show(b),
                    op.text(),
                    show(c),
                    num(&k.abs())
                )
            }
        }
    }

    /// Whether the statement holds under the atom distribution `y`.
    pub fn sat(&self, y: &[Rational]) -> bool {
        let p = |e: &BoolExpr| prob(e, y);
        match self {
            Stmt::Prob(e, op, c) => op.test(&p(e), c),
            Stmt::Cond(a, b, c) => {
                let pb = p(b);
                pb.is_positive() && p(&BoolExpr::and(a.clone(), b.clone())) == c * &pb
            }
            Stmt::Indep(es, coll) => {
                let m = es.len();
                (0..1u32 << m).filter(|s| s.count_ones() >= 2).all(|s| {
                    if !coll && s.count_ones() != 2 {
                        return true;
                    }
                    let chosen: Vec<&BoolExpr> = (0..m)
                        .filter(|i| (s >> i) & 1 == 1)
                        .map(|i| &es[i])
                        .collect();
                    let joint = chosen
                        .iter()
                        .skip(1)
                        .fold(chosen[0].clone(), |acc, e| BoolExpr::and(acc, (*e).clone()));
                    let prod = chosen.iter().fold(Rational::one(), |acc, e| &acc * &p(e));
                    p(&joint) == prod
                })
            }
            Stmt::CondIndep(a, b, c) => {
                let pc = p(c);
                let and = |x: &BoolExpr, z: &BoolExpr| BoolExpr::and(x.clone(), z.clone());
                pc.is_positive() && &p(&and(&and(a, b), c)) * &pc == &p(&and(a, c)) * &p(&and(b, c))
            }
            Stmt::Algebras(l, rr) => {
                let atom = |evs: &[usize], bits: u32| {
                    let parts: Vec<BoolExpr> = evs
                        .iter()
                        .enumerate()
                        .map(|(k, &e)| {
                            let x = BoolExpr::event(e);
                            if (bits >> k) & 1 == 1 {
                                x
                            } else {
                                BoolExpr::not(x)
                            }
                        })
                        .collect();
                    BoolExpr::and_all(parts)
                };
                (0..1u32 << l.len()).all(|lb| {
                    (0..1u32 << rr.len()).all(|rb| {
                        let (al, ar) = (atom(l, lb), atom(rr, rb));
                        p(&BoolExpr::and(al.clone(), ar.clone())) == &p(&al) * &p(&ar)
                    })
                })
            }
            Stmt::Poly(a, b, c, op, k) => op.test(&(&p(a) * &p(b)), &(&p(c) + k)),
        }
    }
}

pub struct Spec {
    pub n: usize,
    pub stmts: Vec<Stmt>,
}

impl Spec {
    pub fn text(&self) -> String {
        let mut s = format!(
            "events {}\n",
            (0..self.n).map(name).collect::<Vec<_>>().join(" ")
        );
        for st in &self.stmts {
            s.push_str(&st.text());
            s.push('\n');
        }
        s
    }

    pub fn sat(&self, y: &[Rational]) -> bool {
        self.stmts.iter().all(|s| s.sat(y))
    }

    /// Statement for spec line `line` (the events line is line 1).
    pub fn stmt_at(&self, line: usize) -> &Stmt {
        &self.stmts[line - 2]
    }
}

/// A distribution on a grid with denominator `d`.
pub fn random_point(rng: &mut StdRng, n: usize, d: i64) -> Vec<Rational> {
    let k = 1usize << n;
    let mut counts = vec![0i64; k];
    for _ in 0..d {
        counts[rng.random_range(0..k)] += 1;
    }
    counts.into_iter().map(|c| r(c, d)).collect()
}

/// Every distribution on `2^n` atoms with denominator `d`.
pub fn grid(n: usize, d: i64) -> Vec<Vec<Rational>> {
    fn rec(k: usize, left: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if k == 1 {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for c in 0..=left {
            cur.push(c);
            rec(k - 1, left - c, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(1 << n, d, &mut Vec::new(), &mut out);
    out.into_iter()
        .map(|v| v.into_iter().map(|c| r(c, d)).collect())
        .collect()
}

fn small_value(rng: &mut StdRng) -> Rational {
    let q = rng.random_range(1..=6);
    r(rng.random_range(0..=q), q)
}

/// A statement of any kind; when `at` is given, one that holds there.
pub fn random_stmt(rng: &mut StdRng, n: usize, at: Option<&[Rational]>) -> Stmt {
    let e = |rng: &mut StdRng| random_expr(rng, n, 2);
    loop {
        let st = match rng.random_range(0..10) {
            0..=3 => {
                let x = e(rng);
                let op = Op::ALL[rng.random_range(0..6)];
                let c = match at {
                    Some(y) => prob(&x, y),
                    None => small_value(rng),
                };
                let op = if at.is_some() {
                    [Op::Eq, Op::Le, Op::Ge][rng.random_range(0..3)]
                } else {
                    op
                };
                Stmt::Prob(x, op, c)
            }
            4 | 5 => {
                let (a, b) = (e(rng), e(rng));
                let c = match at {
                    Some(y) => {
                        let pb = prob(&b, y);
                        if !pb.is_positive() {
                            continue;
                        }
                        &prob(&BoolExpr::and(a.clone(), b.clone()), y) / &pb
                    }
                    None => small_value(rng),
                };
                Stmt::Cond(a, b, c)
            }
            6 => {
                let m = rng.random_range(2..=3);
                Stmt::Indep(
                    (0..m)
                        .map(|_| BoolExpr::event(rng.random_range(0..n)))
                        .collect(),
                    rng.random_range(0..2) == 0,
                )
            }
            7 if n >= 2 => {
                let mut evs: Vec<usize> = (0..n).collect();
                for i in (1..n).rev() {
                    evs.swap(i, rng.random_range(0..=i));
                }
                let cut = rng.random_range(1..n);
                let right_len = rng.random_range(1..=n - cut);
                Stmt::Algebras(evs[..cut].to_vec(), evs[cut..cut + right_len].to_vec())
            }
            8 => Stmt::CondIndep(e(rng), e(rng), e(rng)),
            _ => {
                let (a, b, c) = (e(rng), e(rng), e(rng));
                let k = match at {
                    Some(y) => &(&prob(&a, y) * &prob(&b, y)) - &prob(&c, y),
                    None => &small_value(rng) - &small_value(rng),
                };
                let op = match at {
                    Some(_) => [Op::Eq, Op::Le, Op::Ge][rng.random_range(0..3)],
                    None => Op::ALL[rng.random_range(0..6)],
                };
                Stmt::Poly(a, b, c, op, k)
            }
        };
        if let Some(y) = at {
            if !st.sat(y) {
                continue;
            }
        }
        return st;
    }
}

/// Up to `max` statements over `n` events; half the time all of them hold at a planted grid point.
pub fn random_spec(seed: u64, n: usize, max: usize) -> (Spec, Option<Vec<Rational>>) {
    let mut rng = StdRng::seed_from_u64(seed);
    let planted = if rng.random_range(0..2) == 0 {
        Some(random_point(&mut rng, n, 6))
    } else {
        None
    };
    let k = rng.random_range(1..=max);
    let stmts = (0..k)
        .map(|_| random_stmt(&mut rng, n, planted.as_deref()))
        .collect();
    (Spec { n, stmts }, planted)
}

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}
