//! Line-oriented parser for requirement files.
//!
//! ```text
//! events E1 E2 E3
//! P(E1) = 0.8
//! P(E3 given !E2) = 0.6
//! independent A, B, C            # collective
//! pairwise_independent A, B, C
//! cond_independent A, B given C
//! indep_algebras [E3] [E1 E2]
//! constraint P(A) * P(B) <= 1/4 - P(A & B)
//! ```
//!
//! Inside `P(...)` a top-level `|` is rejected: it reads too easily as a
//! conditional bar. Unions go in parentheses, `P((A | B))`, and conditionals
//! use `given`.

use crate::error::{Error, Result};
use crate::events::{BoolExpr, EventTable};
use crate::numeric::{parse_number, Rational};

use super::{PExpr, RelOp, RequirementSet, Statement, MAX_COLLECTIVE};

const KEYWORDS: &[&str] = &[
    "events",
    "P",
    "given",
    "independent",
    "pairwise_independent",
    "cond_independent",
    "indep_algebras",
    "constraint",
];

/// Replaces `$name` placeholders; unknown names are an error.
pub fn substitute_params(text: &str, params: &[(String, String)]) -> Result<String> {
    let mut out = String::with_capacity(text.len());
    for (lineno, line) in text.lines().enumerate() {
        let (code, comment) = match line.find('#') {
            Some(i) => line.split_at(i),
            None => (line, ""),
        };
        let cs: Vec<char> = code.chars().collect();
        let mut i = 0;
        while i < cs.len() {
            if cs[i] == '$' {
                let st = i + 1;
                let mut j = st;
                while j < cs.len() && (cs[j].is_alphanumeric() || cs[j] == '_') {
                    j += 1;
                }
                let name: String = cs[st..j].iter().collect();
                match params.iter().find(|(k, _)| *k == name) {
                    Some((_, v)) => out.push_str(v),
                    None => {
                        return Err(Error::Syntax {
                            line: lineno + 1,
                            column: i + 1,
                            message: format!(
                                "no value for parameter `${name}` (use --set {name}=...)"
                            ),
                        })
                    }
                }
                i = j;
            } else {
                out.push(cs[i]);
                i += 1;
            }
        }
        out.push_str(comment);
        out.push('\n');
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Num(Rational),
    Sym(&'static str),
    Param(String),
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    col: usize,
}

fn lex(line: &str, lineno: usize) -> Result<Vec<Token>> {
    let cs: Vec<char> = line.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let err = |col: usize, message: String| Error::Syntax {
        line: lineno,
        column: col,
        message,
    };
    while i < cs.len() {
        let c = cs[i];
        let col = i + 1;
        if c == '#' {
            break;
        }
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_digit() || c == '.' {
            let st = i;
            while i < cs.len() && (cs[i].is_ascii_digit() || cs[i] == '.') {
                i += 1;
            }
            if i + 1 < cs.len() && cs[i] == '/' && cs[i + 1].is_ascii_digit() {
                i += 1;
                while i < cs.len() && (cs[i].is_ascii_digit() || cs[i] == '.') {
                    i += 1;
                }
            }
            let text: String = cs[st..i].iter().collect();
            let v = parse_number(&text).map_err(|e| err(col, e.to_string()))?;
            out.push(Token {
                tok: Tok::Num(v),
                col,
            });
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let st = i;
            while i < cs.len() && (cs[i].is_alphanumeric() || cs[i] == '_') {
                i += 1;
            }
            out.push(Token {
                tok: Tok::Ident(cs[st..i].iter().collect()),
                col,
            });
            continue;
        }
        if c == '$' {
            let st = i + 1;
            i += 1;
            while i < cs.len() && (cs[i].is_alphanumeric() || cs[i] == '_') {
                i += 1;
            }
            out.push(Token {
                tok: Tok::Param(cs[st..i].iter().collect()),
                col,
            });
            continue;
        }
        let two: String = cs[i..(i + 2).min(cs.len())].iter().collect();
        let sym = match two.as_str() {
            "!=" => Some("!="),
            "<=" => Some("<="),
            ">=" => Some(">="),
            "==" => Some("="),
            _ => None,
        };
        if let Some(s) = sym {
            out.push(Token {
                tok: Tok::Sym(s),
                col,
            });
            i += 2;
            continue;
        }
        let one = match c {
            '&' => "&",
            '|' => "|",
            '!' => "!",
            '(' => "(",
            ')' => ")",
            '[' => "[",
            ']' => "]",
            ',' => ",",
            '+' => "+",
            '-' => "-",
            '*' => "*",
            '^' => "^",
            '=' => "=",
            '<' => "<",
            '>' => ">",
            _ => return Err(err(col, format!("unexpected character `{c}`"))),
        };
        out.push(Token {
            tok: Tok::Sym(one),
            col,
        });
        i += 1;
    }
    Ok(out)
}

struct LineParser<'a> {
    toks: Vec<Token>,
    pos: usize,
    line: usize,
    end_col: usize,
    events: &'a EventTable,
}

impl LineParser<'_> {
    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        let column = self
            .toks
            .get(self.pos)
            .map(|t| t.col)
            .unwrap_or(self.end_col);
        Err(Error::Syntax {
            line: self.line,
            column,
            message: message.into(),
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn peek_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Some(Tok::Sym(x)) if *x == s)
    }

    fn peek_ident(&self, s: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(x)) if x == s)
    }

    fn expect_sym(&mut self, s: &str) -> Result<()> {
        if self.peek_sym(s) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected `{s}`"))
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn expect_end(&self) -> Result<()> {
        if self.at_end() {
            Ok(())
        } else {
            self.err("unexpected trailing input")
        }
    }

    fn event(&mut self) -> Result<usize> {
        match self.peek().cloned() {
            Some(Tok::Ident(name)) if !KEYWORDS.contains(&name.as_str()) => {
                match self.events.lookup(&name) {
                    Some(i) => {
                        self.pos += 1;
                        Ok(i)
                    }
                    None => Err(Error::UndeclaredEvent(name)),
                }
            }
            Some(Tok::Param(p)) => self.err(format!("unsubstituted parameter `${p}`")),
            _ => self.err("expected an event name"),
        }
    }

    // bexpr := conj ('|' conj)*
    fn bexpr(&mut self) -> Result<BoolExpr> {
        let mut e = self.conj()?;
        while self.peek_sym("|") {
            self.pos += 1;
            e = BoolExpr::or(e, self.conj()?);
        }
        Ok(e)
    }

    fn conj(&mut self) -> Result<BoolExpr> {
        let mut e = self.unary()?;
        while self.peek_sym("&") {
            self.pos += 1;
            e = BoolExpr::and(e, self.unary()?);
        }
        Ok(e)
    }

    fn unary(&mut self) -> Result<BoolExpr> {
        if self.peek_sym("!") {
            self.pos += 1;
            return Ok(BoolExpr::not(self.unary()?));
        }
        if self.peek_sym("(") {
            self.pos += 1;
            let e = self.bexpr()?;
            self.expect_sym(")")?;
            return Ok(e);
        }
        Ok(BoolExpr::event(self.event()?))
    }

    /// A combination directly inside `P(`; top-level `|` is refused.
    fn prob_arg(&mut self) -> Result<BoolExpr> {
        let e = self.conj()?;
        if self.peek_sym("|") {
            return self.err(
                "`|` directly inside P(...) is ambiguous: write P(A given B) for a conditional \
                 or P((A | B)) for a union",
            );
        }
        Ok(e)
    }

    fn number(&mut self) -> Result<Rational> {
        let neg = if self.peek_sym("-") {
            self.pos += 1;
            true
        } else {
            false
        };
        match self.peek().cloned() {
            Some(Tok::Num(v)) => {
                self.pos += 1;
                Ok(if neg { -v } else { v })
            }
            Some(Tok::Param(p)) => self.err(format!("unsubstituted parameter `${p}`")),
            _ => self.err("expected a number"),
        }
    }

    fn relop(&mut self) -> Result<RelOp> {
        let op = match self.peek() {
            Some(Tok::Sym("=")) => RelOp::Eq,
            Some(Tok::Sym("!=")) => RelOp::Ne,
            Some(Tok::Sym("<=")) => RelOp::Le,
            Some(Tok::Sym(">=")) => RelOp::Ge,
            Some(Tok::Sym("<")) => RelOp::Lt,
            Some(Tok::Sym(">")) => RelOp::Gt,
            _ => return self.err("expected a comparison (= != <= >= < >)"),
        };
        self.pos += 1;
        Ok(op)
    }

    fn comma_list(&mut self) -> Result<Vec<BoolExpr>> {
        let mut v = vec![self.bexpr()?];
        while self.peek_sym(",") {
            self.pos += 1;
            v.push(self.bexpr()?);
        }
        Ok(v)
    }

    fn bracket_events(&mut self) -> Result<Vec<usize>> {
        self.expect_sym("[")?;
        let mut v = Vec::new();
        while !self.peek_sym("]") {
            if self.at_end() {
                return self.err("expected `]`");
            }
            let e = self.event()?;
            if v.contains(&e) {
                return self.err("event listed twice");
            }
            v.push(e);
            if self.peek_sym(",") {
                self.pos += 1;
            }
        }
        self.pos += 1;
        if v.is_empty() {
            return self.err("empty event list");
        }
        Ok(v)
    }

    // pexpr := pterm (('+'|'-') pterm)*
    fn pexpr(&mut self) -> Result<PExpr> {
        let mut e = self.pterm()?;
        loop {
            if self.peek_sym("+") {
                self.pos += 1;
                e = PExpr::Add(Box::new(e), Box::new(self.pterm()?));
            } else if self.peek_sym("-") {
                self.pos += 1;
                e = PExpr::Sub(Box::new(e), Box::new(self.pterm()?));
            } else {
                return Ok(e);
            }
        }
    }

    fn pterm(&mut self) -> Result<PExpr> {
        let mut e = self.pfactor()?;
        while self.peek_sym("*") {
            self.pos += 1;
            e = PExpr::Mul(Box::new(e), Box::new(self.pfactor()?));
        }
        Ok(e)
    }

    fn pfactor(&mut self) -> Result<PExpr> {
        let base = self.patom()?;
        if self.peek_sym("^") {
            self.pos += 1;
            match self.peek().cloned() {
                Some(Tok::Num(k))
                    if k.is_integer() && !k.is_negative() && k <= Rational::from_int(64) =>
                {
                    self.pos += 1;
                    return Ok(PExpr::Pow(Box::new(base), k.to_f64() as u32));
                }
                _ => return self.err("exponent must be an integer between 0 and 64"),
            }
        }
        Ok(base)
    }

    fn patom(&mut self) -> Result<PExpr> {
        if self.peek_sym("-") {
            self.pos += 1;
            // A negated literal stays a literal so printing round-trips.
            if let Some(Tok::Num(v)) = self.peek().cloned() {
                self.pos += 1;
                return Ok(PExpr::Num(-v));
            }
            return Ok(PExpr::Neg(Box::new(self.pfactor()?)));
        }
        if self.peek_sym("(") {
            self.pos += 1;
            let e = self.pexpr()?;
            self.expect_sym(")")?;
            return Ok(e);
        }
        if self.peek_ident("P") {
            self.pos += 1;
            self.expect_sym("(")?;
            let e = self.prob_arg()?;
            if self.peek_ident("given") {
                return self
                    .err("conditional probabilities cannot appear inside constraint expressions");
            }
            self.expect_sym(")")?;
            return Ok(PExpr::Prob(e));
        }
        match self.peek().cloned() {
            Some(Tok::Num(v)) => {
                self.pos += 1;
                Ok(PExpr::Num(v))
            }
            Some(Tok::Param(p)) => self.err(format!("unsubstituted parameter `${p}`")),
            _ => self.err("expected a number, P(...) or `(`"),
        }
    }

    fn statement(&mut self) -> Result<Statement> {
        let head = match self.peek().cloned() {
            Some(Tok::Ident(h)) => h,
            _ => return self.err("expected a statement"),
        };
        match head.as_str() {
            "P" => {
                self.pos += 1;
                self.expect_sym("(")?;
                let target = self.prob_arg()?;
                if self.peek_ident("given") {
                    self.pos += 1;
                    let given = self.prob_arg()?;
                    self.expect_sym(")")?;
                    if !self.peek_sym("=") {
                        return self.err("conditional probabilities take `=`");
                    }
                    self.pos += 1;
                    let value = self.number()?;
                    self.expect_end()?;
                    return Ok(Statement::Conditional {
                        target,
                        given,
                        value,
                    });
                }
                self.expect_sym(")")?;
                let op = self.relop()?;
                let value = self.number()?;
                self.expect_end()?;
                Ok(Statement::Probability {
                    expr: target,
                    op,
                    value,
                })
            }
            "independent" | "pairwise_independent" => {
                self.pos += 1;
                let exprs = self.comma_list()?;
                if exprs.len() < 2 {
                    return self.err("independence needs at least two combinations");
                }
                let collective = head == "independent";
                if collective && exprs.len() > MAX_COLLECTIVE {
                    return self.err(format!(
                        "collective independence is limited to {MAX_COLLECTIVE} terms"
                    ));
                }
                self.expect_end()?;
                Ok(Statement::Independent { exprs, collective })
            }
            "cond_independent" => {
                self.pos += 1;
                let a = self.bexpr()?;
                self.expect_sym(",")?;
                let b = self.bexpr()?;
                if !self.peek_ident("given") {
                    return self.err("expected `given`");
                }
                self.pos += 1;
                let given = self.bexpr()?;
                self.expect_end()?;
                Ok(Statement::CondIndependent { a, b, given })
            }
            "indep_algebras" => {
                self.pos += 1;
                let left = self.bracket_events()?;
                let right = self.bracket_events()?;
                self.expect_end()?;
                Ok(Statement::AlgebraIndependent { left, right })
            }
            "constraint" => {
                self.pos += 1;
                let lhs = self.pexpr()?;
                let op = self.relop()?;
                let rhs = self.pexpr()?;
                self.expect_end()?;
                Ok(Statement::Polynomial { lhs, op, rhs })
            }
            _ => self.err(format!("unknown statement `{head}`")),
        }
    }
}

/// Parses a boolean combination of declared events, such as `A1 & !A2`.
pub fn parse_event(text: &str, events: &EventTable) -> Result<BoolExpr> {
    let toks = lex(text, 1)?;
    let mut p = LineParser {
        toks,
        pos: 0,
        line: 1,
        end_col: text.chars().count() + 1,
        events,
    };
    let e = p.bexpr()?;
    p.expect_end()?;
    Ok(e)
}

/// Parses a requirement file and desugars it.
pub fn parse_spec(text: &str) -> Result<RequirementSet> {
    let mut events = EventTable::new();
    let mut statements = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let toks = lex(raw, line)?;
        if toks.is_empty() {
            continue;
        }
        if matches!(&toks[0].tok, Tok::Ident(h) if h == "events") {
            if toks.len() == 1 {
                return Err(Error::Syntax {
                    line,
                    column: toks[0].col,
                    message: "`events` needs at least one name".into(),
                });
            }
            for t in &toks[1..] {
                match &t.tok {
                    Tok::Ident(name) if !KEYWORDS.contains(&name.as_str()) => {
                        events.declare(name)?;
                    }
                    Tok::Sym(",") => {}
                    _ => {
                        return Err(Error::Syntax {
                            line,
                            column: t.col,
                            message: "expected an event name".into(),
                        })
                    }
                }
            }
            continue;
        }
        let mut p = LineParser {
            toks,
            pos: 0,
            line,
            end_col: raw.chars().count() + 1,
            events: &events,
        };
        let st = p.statement()?;
        statements.push((st, line));
    }
    if events.is_empty() {
        return Err(Error::Syntax {
            line: 1,
            column: 1,
            message: "no `events` declaration".into(),
        });
    }
    Ok(RequirementSet::from_statements(events, statements))
}
