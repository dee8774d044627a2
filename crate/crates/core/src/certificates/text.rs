//! Line-oriented certificate files.
//!
//! ```text
//! probenv certificate farkas
//! system 3f9a...
//! space y
//! target -1/1
//! row 2 -25/77
//! end
//! ```
//!
//! Standalone numbers are written as `p/q`; polynomials use `x3`, `y_101`,
//! `m_011` with atom bits listed event by event.

use super::*;
use crate::atomize::PolySystem;
use crate::numeric::{parse_number, parse_poly};

fn space_name(s: Space) -> &'static str {
    match s {
        Space::X => "x",
        Space::Y => "y",
        Space::M => "m",
        Space::Free => "z",
    }
}

fn q(r: &Rational) -> String {
    r.fraction()
}

fn iv(i: &RatInterval) -> String {
    format!("{} {}", q(i.lo()), q(i.hi()))
}

struct Writer<'a> {
    out: String,
    sys: &'a PolySystem,
}

impl Writer<'_> {
    fn line(&mut self, s: impl AsRef<str>) {
        self.out.push_str(s.as_ref());
        self.out.push('\n');
    }

    fn poly(&self, p: &Polynomial) -> String {
        self.sys.show(p)
    }

    fn congruence(&mut self, head: &str, c: &Congruence) {
        match c.base {
            Some(b) => self.line(format!("{head} row {b}")),
            None => self.line(format!("{head} ideal")),
        }
        let f = self.poly(&c.form);
        self.line(format!("  form {f}"));
        for (r, t) in &c.multipliers {
            let t = self.poly(t);
            self.line(format!("  multiplier {r} {t}"));
        }
        self.line("end");
    }

    fn tree(&mut self, n: &PruneNode) {
        match n {
            PruneNode::Leaf { row, bound } => self.line(format!("leaf {row} {}", iv(bound))),
            PruneNode::Split { var, at, low, high } => {
                self.line(format!("split {var} {}", q(at)));
                self.tree(low);
                self.tree(high);
            }
        }
    }
}

/// Serializes `cert`, stamping the hash of `sys`.
pub fn write_certificate(cert: &Certificate, sys: &PolySystem) -> String {
    let mut w = Writer {
        out: String::new(),
        sys,
    };
    w.line(format!("probenv certificate {}", cert.kind()));
    w.line(format!("system {}", sys.hash()));
    match cert {
        Certificate::Farkas(f) => {
            w.line(format!("space {}", space_name(f.space)));
            w.line(format!("target {}", q(&f.target)));
            for (r, k) in &f.coefficients {
                w.line(format!("row {r} {}", q(k)));
            }
        }
        Certificate::Chain(c) => {
            w.line(format!("space {}", space_name(c.space)));
            w.line(format!("endpoints {} {}", q(&c.a_first), q(&c.a_last)));
            for (r, k) in &c.steps {
                w.line(format!("step {r} {}", q(k)));
            }
        }
        Certificate::Psatz(p) => {
            w.line(format!("space {}", space_name(p.space)));
            for (r, t) in &p.ideal {
                let t = w.poly(t);
                w.line(format!("ideal {r} {t}"));
            }
            for c in &p.cone {
                let rows: Vec<String> = c.rows.iter().map(|r| r.to_string()).collect();
                let rows = if rows.is_empty() {
                    "-".to_string()
                } else {
                    rows.join(",")
                };
                w.line(format!("cone {rows}"));
                for (k, s) in &c.squares {
                    let s = w.poly(s);
                    w.line(format!("  square {} {s}", q(k)));
                }
                w.line("end");
            }
            for (r, e) in &p.monoid {
                w.line(format!("monoid {r} {e}"));
            }
        }
        Certificate::Sturm(s) => {
            w.line("space m");
            w.line(format!("var {}", sys.var_name(Space::M, s.var)));
            w.line(format!("range {}", iv(&s.range)));
            w.line(format!("tallies {} {}", s.tallies.0, s.tallies.1));
            w.congruence("residual", &s.residual);
            for e in &s.exclusions {
                w.line(format!("exclusion {}", iv(&e.interval)));
                w.congruence("reduced", &e.row);
            }
        }
        Certificate::Prune(p) => {
            w.line("space m");
            let names: Vec<String> = p.vars.iter().map(|v| sys.var_name(Space::M, *v)).collect();
            w.line(format!("vars {}", names.join(" ")));
            for d in &p.domain {
                w.line(format!("domain {}", iv(d)));
            }
            for c in &p.rows {
                w.congruence("reduced", c);
            }
            w.tree(&p.tree);
        }
    }
    w.line("end");
    w.out
}

/// `x3`, `y_101`, `m_011`, or the plain `y5` / `m3` forms.
pub(crate) fn resolve(space: Space) -> impl Fn(&str) -> Option<Var> {
    move |name: &str| {
        if !name.is_char_boundary(1) {
            return None;
        }
        let (head, rest) = name.split_at(1);
        let want = match space {
            Space::X => "x",
            Space::Y => "y",
            Space::M => "m",
            Space::Free => "z",
        };
        if head != want {
            return None;
        }
        if let Some(bits) = rest.strip_prefix('_') {
            if bits.is_empty() || bits.len() > 24 || !bits.chars().all(|c| c == '0' || c == '1') {
                return None;
            }
            return Some(
                bits.chars()
                    .enumerate()
                    .filter(|(_, c)| *c == '1')
                    .fold(0, |a, (i, _)| a | 1 << i),
            );
        }
        rest.parse().ok()
    }
}

struct Reader<'a> {
    lines: Vec<(usize, &'a str)>,
    pos: usize,
    space: Space,
}

fn bad<T>(line: usize, msg: impl Into<String>) -> Result<T> {
    Err(Error::Syntax {
        line,
        column: 1,
        message: msg.into(),
    })
}

impl<'a> Reader<'a> {
    fn next(&mut self) -> Option<(usize, &'a str)> {
        let l = self.lines.get(self.pos).copied();
        self.pos += 1;
        l
    }

    fn peek_word(&self) -> Option<&'a str> {
        self.lines
            .get(self.pos)
            .and_then(|(_, l)| l.split_whitespace().next())
    }

    fn expect(&mut self, word: &str) -> Result<(usize, &'a str)> {
        match self.next() {
            Some((n, l)) => match l.strip_prefix(word) {
                Some(rest) if rest.is_empty() || rest.starts_with(' ') => Ok((n, rest.trim())),
                _ => bad(n, format!("expected `{word}`")),
            },
            None => bad(
                0,
                format!("unexpected end of certificate, expected `{word}`"),
            ),
        }
    }

    fn poly(&self, n: usize, text: &str) -> Result<Polynomial> {
        parse_poly(text, self.space, &resolve(self.space)).or_else(|e| bad(n, e.to_string()))
    }

    fn congruence(&mut self, head: &str) -> Result<Congruence> {
        let (n, rest) = self.expect(head)?;
        let base = match rest.split_whitespace().collect::<Vec<_>>().as_slice() {
            ["ideal"] => None,
            ["row", r] => Some(index(n, r)?),
            _ => return bad(n, "expected `ideal` or `row <index>`"),
        };
        let (fl, ftext) = self.expect("form")?;
        let form = self.poly(fl, ftext)?;
        let mut multipliers = Vec::new();
        while self.peek_word() == Some("multiplier") {
            let (ml, mtext) = self.expect("multiplier")?;
            let (r, p) = split_first(ml, mtext)?;
            multipliers.push((index(ml, r)?, self.poly(ml, p)?));
        }
        self.expect("end")?;
        Ok(Congruence {
            base,
            form,
            multipliers,
        })
    }

    fn tree(&mut self, depth: usize) -> Result<PruneNode> {
        let Some((n, l)) = self.next() else {
            return bad(0, "unexpected end of prune tree");
        };
        if depth > 4096 {
            return bad(n, "prune tree too deep");
        }
        let w: Vec<&str> = l.split_whitespace().collect();
        match w.as_slice() {
            ["leaf", r, lo, hi] => Ok(PruneNode::Leaf {
                row: index(n, r)?,
                bound: interval(n, lo, hi)?,
            }),
            ["split", v, at] => {
                let var = index(n, v)?;
                let at = number(n, at)?;
                let low = Box::new(self.tree(depth + 1)?);
                let high = Box::new(self.tree(depth + 1)?);
                Ok(PruneNode::Split { var, at, low, high })
            }
            _ => bad(n, "expected `leaf` or `split`"),
        }
    }
}

fn split_first(n: usize, s: &str) -> Result<(&str, &str)> {
    match s.split_once(' ') {
        Some((a, b)) => Ok((a, b.trim())),
        None => bad(n, "missing field"),
    }
}

fn index(n: usize, s: &str) -> Result<usize> {
    s.parse().or_else(|_| bad(n, format!("bad index `{s}`")))
}

fn number(n: usize, s: &str) -> Result<Rational> {
    parse_number(s).or_else(|_| bad(n, format!("bad number `{s}`")))
}

fn interval(n: usize, lo: &str, hi: &str) -> Result<RatInterval> {
    RatInterval::new(number(n, lo)?, number(n, hi)?).or_else(|e| bad(n, e.to_string()))
}

fn two(n: usize, s: &str) -> Result<(&str, &str)> {
    let w: Vec<&str> = s.split_whitespace().collect();
    match w.as_slice() {
        [a, b] => Ok((a, b)),
        _ => bad(n, "expected two fields"),
    }
}

/// Parses a certificate file; returns it with the system hash it names.
pub fn parse_certificate(text: &str) -> Result<(Certificate, String)> {
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
        .collect();
    let mut r = Reader {
        lines,
        pos: 0,
        space: Space::Y,
    };
    let (n, kind) = r.expect("probenv certificate")?;
    let (_, hash) = r.expect("system")?;
    let hash = hash.to_string();
    let (sn, sp) = r.expect("space")?;
    r.space = match sp {
        "x" => Space::X,
        "y" => Space::Y,
        "m" => Space::M,
        _ => return bad(sn, format!("unknown space `{sp}`")),
    };
    let cert = match kind {
        "farkas" => {
            let (tl, t) = r.expect("target")?;
            let target = number(tl, t)?;
            let mut coefficients = Vec::new();
            while r.peek_word() == Some("row") {
                let (l, rest) = r.expect("row")?;
                let (a, b) = two(l, rest)?;
                coefficients.push((index(l, a)?, number(l, b)?));
            }
            Certificate::Farkas(FarkasCertificate {
                space: r.space,
                coefficients,
                target,
            })
        }
        "chain" => {
            let (el, e) = r.expect("endpoints")?;
            let (a, b) = two(el, e)?;
            let (a_first, a_last) = (number(el, a)?, number(el, b)?);
            let mut steps = Vec::new();
            while r.peek_word() == Some("step") {
                let (l, rest) = r.expect("step")?;
                let (a, b) = two(l, rest)?;
                steps.push((index(l, a)?, number(l, b)?));
            }
            Certificate::Chain(ChainCertificate {
                space: r.space,
                steps,
                a_first,
                a_last,
            })
        }
        "psatz" => {
            let mut p = PsatzCertificate {
                space: r.space,
                ideal: Vec::new(),
                cone: Vec::new(),
                monoid: Vec::new(),
            };
            loop {
                match r.peek_word() {
                    Some("ideal") => {
                        let (l, rest) = r.expect("ideal")?;
                        let (a, b) = split_first(l, rest)?;
                        p.ideal.push((index(l, a)?, r.poly(l, b)?));
                    }
                    Some("cone") => {
                        let (l, rest) = r.expect("cone")?;
                        let rows = if rest == "-" {
                            Vec::new()
                        } else {
                            rest.split(',')
                                .map(|s| index(l, s.trim()))
                                .collect::<Result<_>>()?
                        };
                        let mut squares = Vec::new();
                        while r.peek_word() == Some("square") {
                            let (sl, st) = r.expect("square")?;
                            let (w, poly) = split_first(sl, st)?;
                            squares.push((number(sl, w)?, r.poly(sl, poly)?));
                        }
                        r.expect("end")?;
                        p.cone.push(ConeTerm { rows, squares });
                    }
                    Some("monoid") => {
                        let (l, rest) = r.expect("monoid")?;
                        let (a, b) = two(l, rest)?;
                        let e: u32 = b.parse().or_else(|_| bad(l, "bad power"))?;
                        p.monoid.push((index(l, a)?, e));
                    }
                    _ => break,
                }
            }
            Certificate::Psatz(p)
        }
        "sturm" => {
            if r.space != Space::M {
                return bad(sn, "Sturm certificates are stated in m space");
            }
            let (vl, v) = r.expect("var")?;
            let var = resolve(Space::M)(v).ok_or_else(|| Error::Syntax {
                line: vl,
                column: 1,
                message: format!("bad variable `{v}`"),
            })?;
            let (rl, rg) = r.expect("range")?;
            let (a, b) = two(rl, rg)?;
            let range = interval(rl, a, b)?;
            let (tl, t) = r.expect("tallies")?;
            let (a, b) = two(tl, t)?;
            let tallies = (index(tl, a)?, index(tl, b)?);
            let residual = r.congruence("residual")?;
            let mut exclusions = Vec::new();
            while r.peek_word() == Some("exclusion") {
                let (el, e) = r.expect("exclusion")?;
                let (a, b) = two(el, e)?;
                let interval = interval(el, a, b)?;
                let row = r.congruence("reduced")?;
                exclusions.push(Exclusion { interval, row });
            }
            Certificate::Sturm(SturmCertificate {
                var,
                residual,
                range,
                tallies,
                exclusions,
            })
        }
        "prune" => {
            if r.space != Space::M {
                return bad(sn, "prune certificates are stated in m space");
            }
            let (vl, vs) = r.expect("vars")?;
            let vars = vs
                .split_whitespace()
                .map(|v| {
                    resolve(Space::M)(v).ok_or_else(|| Error::Syntax {
                        line: vl,
                        column: 1,
                        message: format!("bad variable `{v}`"),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let mut domain = Vec::new();
            while r.peek_word() == Some("domain") {
                let (l, d) = r.expect("domain")?;
                let (a, b) = two(l, d)?;
                domain.push(interval(l, a, b)?);
            }
            let mut rows = Vec::new();
            while r.peek_word() == Some("reduced") {
                rows.push(r.congruence("reduced")?);
            }
            let tree = r.tree(0)?;
            Certificate::Prune(PruneCertificate {
                vars,
                domain,
                rows,
                tree,
            })
        }
        _ => return bad(n, format!("unknown certificate kind `{kind}`")),
    };
    r.expect("end")?;
    if let Some((l, _)) = r.next() {
        return bad(l, "trailing input after `end`");
    }
    Ok((cert, hash))
}
