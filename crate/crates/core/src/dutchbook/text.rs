//! Game files: one additive term per line, indicators written `Event@copy`.
//!
//! ```text
//! events A1 A2
//! mode greedy
//! copies 4
//! term ideal (A2@1 * A1@3 - 1/2 * A2@1) * ([A1 & A2]@2 - A1@4 * A2@2)
//! term monoid A2@1 * A2@2 * (A1@3 - 1/2) * (A1@4 - 1/2)
//! ```
//!
//! Each top-level product item is one factor; a parenthesized factor is
//! expanded as written. Compound events go in brackets.

use std::fmt::{self, Write as _};

use super::{CopyIndicator, Factor, Game, GameTerm, Mode, Role, Source};
use crate::error::{Error, Result};
use crate::events::{atoms_of, complement_atoms, AtomSet, EventTable};
use crate::numeric::{parse_number, Rational};
use crate::requirements::parse_event;

fn conj(mask: u32, names: &[String], negate_rest: bool) -> Vec<String> {
    (0..names.len())
        .filter_map(|i| {
            if (mask >> i) & 1 == 1 {
                Some(names[i].clone())
            } else if negate_rest {
                Some(format!("!{}", names[i]))
            } else {
                None
            }
        })
        .collect()
}

/// A readable name for an event given by its atoms; bare for a single event.
pub fn event_label(set: &AtomSet, names: &[String]) -> String {
    if let Some(mask) = set.as_intersection() {
        let parts = conj(mask, names, false);
        return match parts.len() {
            0 => format!("[{0} | !{0}]", names[0]),
            1 => parts[0].clone(),
            _ => format!("[{}]", parts.join(" & ")),
        };
    }
    if let Some(mask) = complement_atoms(set).as_intersection() {
        if mask.count_ones() == 1 {
            return format!("[!{}]", conj(mask, names, false)[0]);
        }
    }
    if set.is_empty() {
        return format!("[{0} & !{0}]", names[0]);
    }
    let atoms: Vec<String> = set
        .iter()
        .map(|a| conj(a, names, true).join(" & "))
        .collect();
    if atoms.len() == 1 {
        return format!("[{}]", atoms[0]);
    }
    let atoms: Vec<String> = atoms.iter().map(|a| format!("({a})")).collect();
    format!("[{}]", atoms.join(" | "))
}

fn write_monomial(out: &mut String, c: &Rational, m: &[CopyIndicator], names: &[String]) {
    let c = c.abs();
    if m.is_empty() {
        let _ = write!(out, "{c}");
        return;
    }
    if !c.is_one() {
        let _ = write!(out, "{c} * ");
    }
    let ind: Vec<String> = m
        .iter()
        .map(|i| format!("{}@{}", event_label(&i.atoms, names), i.copy))
        .collect();
    out.push_str(&ind.join(" * "));
}

fn write_factor(out: &mut String, f: &Factor, names: &[String]) {
    if let [(c, m)] = f.terms.as_slice() {
        if c.is_one() && m.len() == 1 {
            write_monomial(out, c, m, names);
            return;
        }
    }
    out.push('(');
    if f.terms.is_empty() {
        out.push('0');
    }
    for (k, (c, m)) in f.terms.iter().enumerate() {
        match (k, c.is_negative()) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        write_monomial(out, c, m, names);
    }
    out.push(')');
}

impl GameTerm {
    /// `coef * factor * factor ...` in game-file syntax.
    pub fn render(&self, names: &[String]) -> String {
        let mut out = String::new();
        let c = &self.coef;
        if self.factors.is_empty() {
            let _ = write!(out, "{c}");
            return out;
        }
        if c.is_negative() {
            out.push('-');
        }
        if !c.abs().is_one() {
            let _ = write!(out, "{} * ", c.abs());
        }
        for (k, f) in self.factors.iter().enumerate() {
            if k > 0 {
                out.push_str(" * ");
            }
            write_factor(&mut out, f, names);
        }
        out
    }
}

impl fmt::Display for Game {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "events {}", self.events.join(" "))?;
        writeln!(f, "mode {}", self.mode.name())?;
        writeln!(f, "copies {}", self.copies_used)?;
        for t in &self.terms {
            writeln!(f, "term {} {}", t.role.name(), t.render(&self.events))?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(Rational),
    Ind(AtomSet, u32),
    Sym(char),
}

struct Lexer<'a> {
    line: usize,
    events: &'a EventTable,
}

impl Lexer<'_> {
    fn err<T>(&self, column: usize, message: impl Into<String>) -> Result<T> {
        Err(Error::Syntax {
            line: self.line,
            column,
            message: message.into(),
        })
    }

    fn lex(&self, text: &str, offset: usize) -> Result<Vec<(Tok, usize)>> {
        let cs: Vec<char> = text.chars().collect();
        let n = self.events.len();
        let mut out = Vec::new();
        let mut i = 0;
        while i < cs.len() {
            let c = cs[i];
            let col = offset + i + 1;
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            if c.is_ascii_digit() || c == '.' {
                let st = i;
                while i < cs.len() && (cs[i].is_ascii_digit() || cs[i] == '.' || cs[i] == '/') {
                    i += 1;
                }
                let s: String = cs[st..i].iter().collect();
                match parse_number(&s) {
                    Ok(v) => out.push((Tok::Num(v), col)),
                    Err(e) => return self.err(col, e.to_string()),
                }
                continue;
            }
            let atoms = if c == '[' {
                let Some(close) = cs[i..].iter().position(|&d| d == ']') else {
                    return self.err(col, "unclosed `[`");
                };
                let inner: String = cs[i + 1..i + close].iter().collect();
                i += close + 1;
                atoms_of(
                    &parse_event(&inner, self.events).map_err(|e| self.relocate(e, col))?,
                    n,
                )
            } else if c.is_alphabetic() || c == '_' {
                let st = i;
                while i < cs.len() && (cs[i].is_alphanumeric() || cs[i] == '_') {
                    i += 1;
                }
                let name: String = cs[st..i].iter().collect();
                match self.events.lookup(&name) {
                    Some(e) => atoms_of(&crate::events::BoolExpr::event(e), n),
                    None => return Err(Error::UndeclaredEvent(name)),
                }
            } else if "()+-*".contains(c) {
                out.push((Tok::Sym(c), col));
                i += 1;
                continue;
            } else {
                return self.err(col, format!("unexpected character `{c}`"));
            };
            if cs.get(i) != Some(&'@') {
                return self.err(offset + i + 1, "expected `@copy` after an event");
            }
            i += 1;
            let st = i;
            while i < cs.len() && cs[i].is_ascii_digit() {
                i += 1;
            }
            let copy: u32 = match cs[st..i].iter().collect::<String>().parse() {
                Ok(k) if k >= 1 => k,
                _ => return self.err(offset + st + 1, "copy numbers are integers from 1"),
            };
            out.push((Tok::Ind(atoms, copy), col));
        }
        Ok(out)
    }

    fn relocate(&self, e: Error, column: usize) -> Error {
        match e {
            Error::Syntax { message, .. } => Error::Syntax {
                line: self.line,
                column,
                message,
            },
            e => e,
        }
    }
}

type Sum = Vec<(Rational, Vec<CopyIndicator>)>;

struct ExprParser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    line: usize,
    end: usize,
}

impl ExprParser {
    fn err<T>(&self, message: &str) -> Result<T> {
        let column = self.toks.get(self.pos).map_or(self.end, |t| t.1);
        Err(Error::Syntax {
            line: self.line,
            column,
            message: message.into(),
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn atom(&mut self) -> Result<Sum> {
        match self.peek().cloned() {
            Some(Tok::Num(v)) => {
                self.pos += 1;
                Ok(vec![(v, vec![])])
            }
            Some(Tok::Ind(atoms, copy)) => {
                self.pos += 1;
                Ok(vec![(Rational::one(), vec![CopyIndicator { atoms, copy }])])
            }
            Some(Tok::Sym('(')) => {
                self.pos += 1;
                let s = self.sum()?;
                if !self.eat(')') {
                    return self.err("expected `)`");
                }
                Ok(s)
            }
            _ => self.err("expected a number, an indicator or `(`"),
        }
    }

    fn product(&mut self) -> Result<Sum> {
        let mut acc = self.atom()?;
        while self.eat('*') {
            let rhs = self.atom()?;
            acc = mul(&acc, &rhs);
        }
        Ok(acc)
    }

    fn sum(&mut self) -> Result<Sum> {
        let mut acc = Vec::new();
        let mut neg = self.eat('-');
        loop {
            for (c, m) in self.product()? {
                acc.push((if neg { -c } else { c }, m));
            }
            if self.eat('+') {
                neg = false;
            } else if self.eat('-') {
                neg = true;
            } else {
                return Ok(acc);
            }
        }
    }

    /// `[-] item (* item)*`, each item a factor and numbers folded into the coefficient.
    fn term(&mut self) -> Result<(Rational, Vec<Sum>)> {
        let mut coef = if self.eat('-') {
            Rational::from_int(-1)
        } else {
            Rational::one()
        };
        let mut factors = Vec::new();
        loop {
            match self.atom()? {
                s if s.len() == 1 && s[0].1.is_empty() => coef *= &s[0].0,
                s => factors.push(s),
            }
            if !self.eat('*') {
                break;
            }
        }
        if self.pos < self.toks.len() {
            return self.err("a term is a single product of factors");
        }
        Ok((coef, factors))
    }
}

fn mul(a: &Sum, b: &Sum) -> Sum {
    let mut out = Vec::new();
    for (ca, ma) in a {
        for (cb, mb) in b {
            let mut m = ma.clone();
            m.extend(mb.iter().cloned());
            out.push((ca * cb, m));
        }
    }
    out
}

/// Reads a game file. Factors of a term must sit on disjoint copies.
pub fn parse_game(text: &str) -> Result<Game> {
    let mut events: Option<EventTable> = None;
    let mut mode = Mode::Greedy;
    let mut copies = None;
    let mut terms = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let code = raw.split('#').next().unwrap_or("").trim();
        if code.is_empty() {
            continue;
        }
        let syntax = |message: String| Error::Syntax {
            line,
            column: 1,
            message,
        };
        let (head, rest) = code.split_once(char::is_whitespace).unwrap_or((code, ""));
        let rest = rest.trim();
        match head {
            "events" => {
                let names: Vec<&str> = rest.split_whitespace().collect();
                events = Some(EventTable::from_names(&names)?);
            }
            "mode" => mode = rest.parse()?,
            "copies" => {
                copies = Some(
                    rest.parse::<u32>()
                        .map_err(|_| syntax(format!("bad copy count `{rest}`")))?,
                )
            }
            "term" => {
                let Some(table) = &events else {
                    return Err(syntax("`term` before `events`".into()));
                };
                let (role, expr) = rest.split_once(char::is_whitespace).unwrap_or((rest, ""));
                let role = Role::from_name(role)
                    .ok_or_else(|| syntax(format!("unknown role `{role}`")))?;
                let offset = raw.find(expr.trim()).unwrap_or(0);
                let lexer = Lexer {
                    line,
                    events: table,
                };
                let mut p = ExprParser {
                    toks: lexer.lex(expr.trim(), offset)?,
                    pos: 0,
                    line,
                    end: raw.chars().count() + 1,
                };
                let (coef, factors) = p.term()?;
                terms.push(GameTerm {
                    role,
                    coef,
                    factors: factors
                        .into_iter()
                        .map(|terms| Factor {
                            terms,
                            source: Source::Transcribed,
                        })
                        .collect(),
                });
            }
            _ => return Err(syntax(format!("unknown line `{head}`"))),
        }
    }
    let table = events.ok_or_else(|| Error::Invalid("game file has no `events` line".into()))?;
    let names: Vec<String> = table.iter().map(|e| e.name.clone()).collect();
    let game = Game::new(names, mode, terms);
    game.check_factorization()?;
    if let Some(c) = copies {
        if c != game.copies_used {
            return Err(Error::Invalid(format!(
                "file declares {c} copies but uses {}",
                game.copies_used
            )));
        }
    }
    Ok(game)
}
