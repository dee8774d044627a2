//! Betting games compiled from infeasibility certificates.
//!
//! Every probability in a certificate is replaced by the indicator of its
//! event on some copy of the experiment. Someone who believes the
//! requirements, and takes the copies to be independent, prices each factor
//! of a term at its believed value. What the game actually pays is fixed by
//! the certificate's polynomial identity, and is checked here by running
//! through every joint outcome of the copies.

mod text;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use itertools::Itertools;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use rand::rngs::StdRng;
use rand::{RngExt, SeedableRng};

use crate::atomize::{PolySystem, TERM_LIMIT};
use crate::certificates::{
    chain_to_farkas, normalize_farkas, verify_certificate, Certificate, FarkasCertificate,
    PsatzCertificate,
};
use crate::error::{Error, Result};
use crate::events::{Atom, AtomSet};
use crate::feasibility::{Solution, Verdict};
use crate::numeric::{Polynomial, Rational, Space, Var};
use crate::requirements::Relation;

pub use text::{event_label, parse_game};

/// Joint outcomes enumerated before falling back to sampling.
pub const ENUMERATION_CAP: u64 = 1 << 24;
/// Permutations are factorial in the copy count.
pub const MAX_SYMMETRIZED_COPIES: u32 = 8;
const SAMPLES: u64 = 1 << 16;
const SAMPLE_SEED: u64 = 0x5eed_b00c;

/// Indicator of `atoms` on copy `copy` (copies count from 1).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CopyIndicator {
    pub atoms: AtomSet,
    pub copy: u32,
}

/// Where a factor came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Source {
    Row(usize),
    Multiplier,
    Square,
    Transcribed,
}

/// A formal sum of indicator products, kept as written.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factor {
    pub terms: Vec<(Rational, Vec<CopyIndicator>)>,
    pub source: Source,
}

impl Factor {
    pub fn copies(&self) -> BTreeSet<u32> {
        self.terms
            .iter()
            .flat_map(|(_, m)| m.iter().map(|i| i.copy))
            .collect()
    }

    fn relabel(&self, f: &impl Fn(u32) -> u32) -> Factor {
        Factor {
            terms: self
                .terms
                .iter()
                .map(|(c, m)| {
                    let m = m
                        .iter()
                        .map(|i| CopyIndicator {
                            atoms: i.atoms.clone(),
                            copy: f(i.copy),
                        })
                        .collect();
                    (c.clone(), m)
                })
                .collect(),
            source: self.source,
        }
    }
}

/// The part of the certificate a term comes from; it fixes the believed sign.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Role {
    Ideal,
    Cone,
    Monoid,
    Row(Relation),
}

impl Role {
    pub fn name(self) -> &'static str {
        match self {
            Role::Ideal => "ideal",
            Role::Cone => "cone",
            Role::Monoid => "monoid",
            Role::Row(Relation::EqZero) => "eq",
            Role::Row(Relation::GeqZero) => "geq",
            Role::Row(Relation::GtZero) => "gt",
            Role::Row(Relation::NeqZero) => "neq",
        }
    }

    pub fn from_name(s: &str) -> Option<Role> {
        Some(match s {
            "ideal" => Role::Ideal,
            "cone" => Role::Cone,
            "monoid" => Role::Monoid,
            "eq" => Role::Row(Relation::EqZero),
            "geq" => Role::Row(Relation::GeqZero),
            "gt" => Role::Row(Relation::GtZero),
            _ => return None,
        })
    }

    pub fn belief(self) -> Belief {
        match self {
            Role::Ideal | Role::Row(Relation::EqZero) => Belief::Zero,
            Role::Cone | Role::Row(Relation::GeqZero) => Belief::NonNegative,
            Role::Monoid | Role::Row(Relation::GtZero) | Role::Row(Relation::NeqZero) => {
                Belief::Positive
            }
        }
    }

    /// Roles whose belief only holds for a positive coefficient.
    fn needs_positive(self) -> bool {
        !matches!(self, Role::Ideal | Role::Row(Relation::EqZero))
    }
}

/// Sign class of a believed expectation; sums take the maximum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Belief {
    Zero,
    NonNegative,
    Positive,
}

impl fmt::Display for Belief {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Belief::Zero => "= 0",
            Belief::NonNegative => ">= 0",
            Belief::Positive => "> 0",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GameTerm {
    pub role: Role,
    pub coef: Rational,
    /// Factors sit on pairwise disjoint sets of copies.
    pub factors: Vec<Factor>,
}

impl GameTerm {
    fn relabel(&self, f: &impl Fn(u32) -> u32) -> GameTerm {
        GameTerm {
            role: self.role,
            coef: self.coef.clone(),
            factors: self.factors.iter().map(|x| x.relabel(f)).collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Greedy,
    Symmetrized,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Greedy => "greedy",
            Mode::Symmetrized => "symmetrized",
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Mode> {
        match s {
            "greedy" => Ok(Mode::Greedy),
            "symmetrized" => Ok(Mode::Symmetrized),
            _ => Err(Error::Invalid(format!(
                "unknown game mode `{s}` (greedy or symmetrized)"
            ))),
        }
    }
}

/// Same-copy indicators multiplied out: one atom set per copy, by copy.
pub type Outcome = Vec<(u32, AtomSet)>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Game {
    pub events: Vec<String>,
    pub mode: Mode,
    pub terms: Vec<GameTerm>,
    pub copies_used: u32,
}

impl Game {
    pub fn new(events: Vec<String>, mode: Mode, terms: Vec<GameTerm>) -> Game {
        let copies_used = terms
            .iter()
            .flat_map(|t| t.factors.iter().flat_map(Factor::copies))
            .max()
            .unwrap_or(0);
        Game {
            events,
            mode,
            terms,
            copies_used,
        }
    }

    pub fn n(&self) -> usize {
        self.events.len()
    }

    /// Sum over atom sets of the largest number of times the set occurs in
    /// one product of the expansion; the copy count never needs to exceed it.
    pub fn nu(&self) -> u32 {
        let mut best: BTreeMap<&AtomSet, u32> = BTreeMap::new();
        for t in &self.terms {
            let mut in_term: BTreeMap<&AtomSet, u32> = BTreeMap::new();
            for f in &t.factors {
                let mut in_factor: BTreeMap<&AtomSet, u32> = BTreeMap::new();
                for (_, m) in &f.terms {
                    let mut count: BTreeMap<&AtomSet, u32> = BTreeMap::new();
                    for i in m {
                        *count.entry(&i.atoms).or_default() += 1;
                    }
                    for (s, k) in count {
                        let e = in_factor.entry(s).or_default();
                        *e = (*e).max(k);
                    }
                }
                for (s, k) in in_factor {
                    *in_term.entry(s).or_default() += k;
                }
            }
            for (s, k) in in_term {
                let e = best.entry(s).or_default();
                *e = (*e).max(k);
            }
        }
        best.values().sum()
    }

    /// Checks that the factors of every term use disjoint copies.
    pub fn check_factorization(&self) -> Result<()> {
        for (k, t) in self.terms.iter().enumerate() {
            let mut seen = BTreeSet::new();
            for f in &t.factors {
                let c = f.copies();
                if let Some(j) = c.iter().find(|j| seen.contains(*j)) {
                    return Err(Error::Invalid(format!(
                        "term {} uses copy {j} in two factors, so its factors are not independent",
                        k + 1
                    )));
                }
                seen.extend(c);
            }
            if t.role.needs_positive() && !t.coef.is_positive() {
                return Err(Error::Invalid(format!(
                    "term {} has role {} but coefficient {}",
                    k + 1,
                    t.role.name(),
                    t.coef
                )));
            }
        }
        Ok(())
    }

    /// The payoff fully expanded, same-copy products merged (I * I = I).
    pub fn expand(&self) -> Result<BTreeMap<Outcome, Rational>> {
        let mut total: BTreeMap<Outcome, Rational> = BTreeMap::new();
        for t in &self.terms {
            let mut acc: BTreeMap<Outcome, Rational> =
                BTreeMap::from([(Vec::new(), t.coef.clone())]);
            for f in &t.factors {
                let mut next: BTreeMap<Outcome, Rational> = BTreeMap::new();
                for (ka, ca) in &acc {
                    for (cb, mb) in &f.terms {
                        let Some(kb) = merge(self.n(), ka, mb) else {
                            continue;
                        };
                        add_to(&mut next, kb, ca * cb);
                        if next.len() > TERM_LIMIT {
                            return Err(Error::TermLimit(TERM_LIMIT));
                        }
                    }
                }
                acc = next;
            }
            for (k, c) in acc {
                add_to(&mut total, k, c);
            }
        }
        Ok(total)
    }
}

fn add_to(map: &mut BTreeMap<Outcome, Rational>, k: Outcome, c: Rational) {
    use std::collections::btree_map::Entry;
    match map.entry(k) {
        Entry::Vacant(v) => {
            if !c.is_zero() {
                v.insert(c);
            }
        }
        Entry::Occupied(mut o) => {
            *o.get_mut() += c;
            if o.get().is_zero() {
                o.remove();
            }
        }
    }
}

/// Product of a merged key with raw indicators; `None` when it vanishes.
fn merge(n: usize, key: &Outcome, more: &[CopyIndicator]) -> Option<Outcome> {
    let mut m: BTreeMap<u32, AtomSet> = key.iter().cloned().collect();
    for i in more {
        let s = match m.get(&i.copy) {
            Some(s) => s.intersect(&i.atoms),
            None => i.atoms.clone(),
        };
        if s.is_empty() {
            return None;
        }
        m.insert(i.copy, s);
    }
    let full = AtomSet::full(n);
    Some(m.into_iter().filter(|(_, s)| *s != full).collect())
}

fn var_atoms(sys: &PolySystem, space: Space, v: Var) -> Result<AtomSet> {
    let n = sys.n();
    Ok(match space {
        Space::Y => AtomSet::singleton(n, v as Atom),
        Space::M => AtomSet::superset_of(n, v as Atom),
        Space::X => sys.terms().atoms(v).clone(),
        Space::Free => return Err(Error::SpaceMismatch("free variables have no event".into())),
    })
}

/// `p` with its k-th variable occurrence in each product on copy `base + k`.
fn factor_of(sys: &PolySystem, p: &Polynomial, base: u32, source: Source) -> Result<Factor> {
    let full = AtomSet::full(sys.n());
    let mut terms = Vec::new();
    for (m, c) in p.terms() {
        let mut ind = Vec::new();
        for (v, e) in m.pairs() {
            let atoms = var_atoms(sys, p.space(), *v)?;
            if atoms == full {
                continue;
            }
            for _ in 0..*e {
                ind.push(CopyIndicator {
                    atoms: atoms.clone(),
                    copy: base + ind.len() as u32,
                });
            }
        }
        if ind.iter().any(|i| i.atoms.is_empty()) {
            continue;
        }
        terms.push((c.clone(), ind));
    }
    Ok(Factor { terms, source })
}

/// Factors on consecutive fresh blocks of copies.
fn allocate(sys: &PolySystem, parts: &[(Polynomial, Source)]) -> Result<Vec<Factor>> {
    let mut next = 1;
    let mut out = Vec::new();
    for (p, s) in parts {
        let f = factor_of(sys, p, next, *s)?;
        next += f
            .terms
            .iter()
            .map(|(_, m)| m.len() as u32)
            .max()
            .unwrap_or(0);
        out.push(f);
    }
    Ok(out)
}

fn linear_terms(f: &FarkasCertificate, sys: &PolySystem) -> Result<Vec<GameTerm>> {
    let mut out = Vec::new();
    for (r, k) in &f.coefficients {
        if k.is_zero() {
            continue;
        }
        let g = sys.form(*r, f.space)?;
        out.push(GameTerm {
            role: Role::Row(sys.rel(*r)),
            coef: k.clone(),
            factors: allocate(sys, &[(g.into_owned(), Source::Row(*r))])?,
        });
    }
    Ok(out)
}

fn psatz_terms(p: &PsatzCertificate, sys: &PolySystem) -> Result<Vec<GameTerm>> {
    let row = |r: usize| -> Result<(Polynomial, Source)> {
        Ok((sys.form(r, p.space)?.into_owned(), Source::Row(r)))
    };
    let mut out = Vec::new();
    for (r, t) in &p.ideal {
        let (coef, mut parts) = match t.constant_value() {
            Some(c) => (c, vec![]),
            None => (Rational::one(), vec![(t.clone(), Source::Multiplier)]),
        };
        if coef.is_zero() {
            continue;
        }
        parts.push(row(*r)?);
        out.push(GameTerm {
            role: Role::Ideal,
            coef,
            factors: allocate(sys, &parts)?,
        });
    }
    for c in &p.cone {
        for (w, q) in &c.squares {
            let (coef, mut parts) = match q.constant_value() {
                Some(k) => (w * &k * &k, vec![]),
                None => (
                    w.clone(),
                    vec![(q.clone(), Source::Square), (q.clone(), Source::Square)],
                ),
            };
            if coef.is_zero() {
                continue;
            }
            for r in &c.rows {
                parts.push(row(*r)?);
            }
            out.push(GameTerm {
                role: Role::Cone,
                coef,
                factors: allocate(sys, &parts)?,
            });
        }
    }
    let mut parts = Vec::new();
    for (r, e) in &p.monoid {
        for _ in 0..*e {
            parts.push(row(*r)?);
        }
    }
    out.push(GameTerm {
        role: Role::Monoid,
        coef: Rational::one(),
        factors: allocate(sys, &parts)?,
    });
    Ok(out)
}

fn outcome_count(n: usize, copies: u32) -> Option<u64> {
    (1u64 << n).checked_pow(copies)
}

/// Every term summed over all relabellings of the copies.
pub fn symmetrize(g: &Game) -> Result<Game> {
    let c = g.copies_used;
    let within = outcome_count(g.n(), c).is_some_and(|k| k <= ENUMERATION_CAP);
    if c > MAX_SYMMETRIZED_COPIES || !within {
        return Err(Error::Unsupported(format!(
            "the permutation sum needs {c} copies of {} events, beyond what can be enumerated",
            g.n()
        )));
    }
    let mut terms = Vec::new();
    for t in &g.terms {
        for p in (1..=c).permutations(c as usize) {
            terms.push(t.relabel(&|j| p[j as usize - 1]));
        }
    }
    Ok(Game::new(g.events.clone(), Mode::Symmetrized, terms))
}

/// Compiles a certificate into a game; the certificate is verified first.
pub fn build_game(cert: &Certificate, sys: &PolySystem, mode: Mode) -> Result<Game> {
    verify_certificate(cert, sys).into_result()?;
    let events = sys.event_names().to_vec();
    let (terms, linear) = match cert {
        Certificate::Farkas(f) => (linear_terms(&normalize_farkas(f), sys)?, true),
        Certificate::Chain(c) => (linear_terms(&chain_to_farkas(c)?, sys)?, true),
        Certificate::Psatz(p) => (psatz_terms(p, sys)?, false),
        Certificate::Sturm(_) | Certificate::Prune(_) => {
            return Err(Error::Unsupported(format!(
                "a {} certificate is not a polynomial identity, so it yields no game",
                cert.kind()
            )))
        }
    };
    let game = Game::new(events, mode, terms);
    match mode {
        // The substitution is the same for every product, so the identity
        // carries over without relabelling.
        Mode::Symmetrized if !linear => symmetrize(&Game {
            mode: Mode::Greedy,
            ..game
        }),
        _ => Ok(game),
    }
}

/// The exact set of payoffs over all joint outcomes, or over a sample.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Realized {
    pub values: BTreeSet<Rational>,
    pub outcomes: u64,
    /// False when the outcomes were sampled: the set is then not proven.
    pub exhaustive: bool,
}

impl Realized {
    pub fn constant(&self) -> Option<&Rational> {
        match self.values.len() {
            1 => self.values.iter().next(),
            _ => None,
        }
    }
}

/// Scaled coefficient, and for each copy it mentions the atoms it accepts.
type Mono = (BigInt, Vec<(usize, Vec<bool>)>);

struct Table {
    denom: BigInt,
    monos: Vec<Mono>,
}

impl Table {
    fn new(g: &Game) -> Result<Table> {
        let payoff = g.expand()?;
        let denom = payoff.values().fold(BigInt::one(), |d, c| d.lcm(c.denom()));
        let atoms = 1usize << g.n();
        let monos = payoff
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| {
                let num = c.numer() * (&denom / c.denom());
                let hits = k
                    .into_iter()
                    .map(|(j, s)| {
                        (
                            j as usize - 1,
                            (0..atoms as Atom).map(|a| s.contains(a)).collect(),
                        )
                    })
                    .collect();
                (num, hits)
            })
            .collect();
        Ok(Table { denom, monos })
    }

    fn small(&self) -> Option<Vec<i128>> {
        self.monos
            .iter()
            .map(|(c, _)| c.to_i64().map(i128::from))
            .collect()
    }
}

fn eval_small(t: &Table, coefs: &[i128], atom: impl Fn(usize) -> usize) -> i128 {
    t.monos
        .iter()
        .zip(coefs)
        .filter(|((_, hits), _)| hits.iter().all(|(j, h)| h[atom(*j)]))
        .map(|(_, c)| *c)
        .sum()
}

fn eval_big(t: &Table, atom: impl Fn(usize) -> usize) -> BigInt {
    t.monos
        .iter()
        .filter(|(_, hits)| hits.iter().all(|(j, h)| h[atom(*j)]))
        .map(|(c, _)| c.clone())
        .sum()
}

/// How outcomes are enumerated: at most `cap` of them, on `jobs` threads.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Enumeration {
    pub cap: u64,
    pub jobs: usize,
}

impl Default for Enumeration {
    fn default() -> Self {
        Enumeration {
            cap: ENUMERATION_CAP,
            jobs: 1,
        }
    }
}

pub fn realized_values(g: &Game) -> Result<Realized> {
    realized_values_with(g, &Enumeration::default())
}

/// Enumerates every joint outcome when there are at most `cap` of them,
/// otherwise evaluates a fixed pseudo-random sample.
pub fn realized_values_with(g: &Game, en: &Enumeration) -> Result<Realized> {
    let cap = en.cap;
    let t = Table::new(g)?;
    let n = g.n();
    let copies = g.copies_used as usize;
    let mask = (1usize << n) - 1;
    let small = t.small();
    let to_rational = |v: BigInt| Rational::from_bigs(v, t.denom.clone());

    let total = outcome_count(n, g.copies_used).filter(|k| *k <= cap);
    let Some(total) = total else {
        let mut rng = StdRng::seed_from_u64(SAMPLE_SEED);
        let mut values = BTreeSet::new();
        for _ in 0..SAMPLES {
            let w: Vec<usize> = (0..copies).map(|_| rng.random_range(0..=mask)).collect();
            let v = match &small {
                Some(c) => BigInt::from(eval_small(&t, c, |j| w[j])),
                None => eval_big(&t, |j| w[j]),
            };
            values.insert(to_rational(v)?);
        }
        return Ok(Realized {
            values,
            outcomes: SAMPLES,
            exhaustive: false,
        });
    };

    // Copy j's atom sits in bits [n j, n (j + 1)) of the outcome index.
    let atom_of = |o: u64, j: usize| ((o >> (n * j)) as usize) & mask;
    let threads = en.jobs.max(1) as u64;
    let chunk = total.div_ceil(threads).max(1);
    let sets: Vec<BTreeSet<BigInt>> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..threads)
            .map(|k| {
                let (t, small) = (&t, &small);
                s.spawn(move || {
                    let mut out = BTreeSet::new();
                    for o in (k * chunk)..((k + 1) * chunk).min(total) {
                        let v = match small {
                            Some(c) => BigInt::from(eval_small(t, c, |j| atom_of(o, j))),
                            None => eval_big(t, |j| atom_of(o, j)),
                        };
                        out.insert(v);
                    }
                    out
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("outcome worker"))
            .collect()
    });
    let mut values = BTreeSet::new();
    for v in sets.into_iter().flatten() {
        values.insert(to_rational(v)?);
    }
    Ok(Realized {
        values,
        outcomes: total,
        exhaustive: true,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LedgerEntry {
    pub term: usize,
    pub role: Role,
    pub belief: Belief,
    /// Copies of each factor; the evaluator multiplies their expectations.
    pub copies: Vec<Vec<u32>>,
    pub sources: Vec<Source>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ledger {
    pub entries: Vec<LedgerEntry>,
    pub aggregate: Belief,
}

/// What the evaluator believes each term is worth, from its role alone.
pub fn believed_ledger(g: &Game) -> Ledger {
    let entries: Vec<LedgerEntry> = g
        .terms
        .iter()
        .enumerate()
        .map(|(k, t)| LedgerEntry {
            term: k + 1,
            role: t.role,
            belief: t.role.belief(),
            copies: t
                .factors
                .iter()
                .map(|f| f.copies().into_iter().collect())
                .collect(),
            sources: t.factors.iter().map(|f| f.source).collect(),
        })
        .collect();
    let aggregate = entries
        .iter()
        .map(|e| e.belief)
        .max()
        .unwrap_or(Belief::Zero);
    Ledger { entries, aggregate }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BookKind {
    /// Believed favourable, realizes exactly 0.
    Weak,
    /// Believed fair or better, loses the same amount on every outcome.
    Strong,
}

impl fmt::Display for BookKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BookKind::Weak => "weak",
            BookKind::Strong => "strong",
        })
    }
}

pub fn book_kind(realized: &Realized, ledger: &Ledger) -> Option<BookKind> {
    let c = realized.constant()?;
    if c.is_negative() {
        Some(BookKind::Strong)
    } else if c.is_zero() && ledger.aggregate == Belief::Positive {
        Some(BookKind::Weak)
    } else {
        None
    }
}

#[derive(Clone, Debug)]
pub struct Book {
    pub game: Game,
    pub realized: Realized,
    pub ledger: Ledger,
    pub kind: BookKind,
    pub notes: Vec<String>,
}

fn show_values(r: &Realized) -> String {
    let v: Vec<String> = r.values.iter().take(6).map(Rational::to_string).collect();
    let more = if r.values.len() > 6 { ", ..." } else { "" };
    format!("{{{}{more}}}", v.join(", "))
}

fn assess(game: Game, en: &Enumeration) -> Result<std::result::Result<Book, (Game, String)>> {
    let realized = realized_values_with(&game, en)?;
    let ledger = believed_ledger(&game);
    let Some(kind) = book_kind(&realized, &ledger) else {
        let why = format!(
            "{} game realizes {} and is believed {}",
            game.mode.name(),
            show_values(&realized),
            ledger.aggregate
        );
        return Ok(Err((game, why)));
    };
    let mut notes = Vec::new();
    if !realized.exhaustive {
        notes.push(format!(
            "realized values sampled over {} outcomes, not proven",
            realized.outcomes
        ));
    }
    if kind == BookKind::Strong && ledger.aggregate == Belief::NonNegative {
        notes.push(format!(
            "inequality rows are only believed >= 0, so the game is believed >= 0 while it realizes {}",
            show_values(&realized)
        ));
    }
    Ok(Ok(Book {
        game,
        realized,
        ledger,
        kind,
        notes,
    }))
}

/// Builds, evaluates and classifies a game. A greedy game that fails the
/// realized-value check is replaced by the permutation sum.
pub fn compile_book(cert: &Certificate, sys: &PolySystem, mode: Mode) -> Result<Book> {
    compile_book_with(cert, sys, mode, &Enumeration::default())
}

pub fn compile_book_with(
    cert: &Certificate,
    sys: &PolySystem,
    mode: Mode,
    en: &Enumeration,
) -> Result<Book> {
    let game = build_game(cert, sys, mode)?;
    match assess(game, en)? {
        Ok(book) => Ok(book),
        Err((game, why)) if game.mode == Mode::Greedy && matches!(cert, Certificate::Psatz(_)) => {
            let sym = symmetrize(&game).map_err(|e| Error::Invalid(format!("{why}; {e}")))?;
            match assess(sym, en)? {
                Ok(mut book) => {
                    book.notes
                        .insert(0, format!("{why}; replaced by the permutation sum"));
                    Ok(book)
                }
                Err((_, why2)) => Err(Error::Invalid(format!("{why}; {why2}"))),
            }
        }
        Err((_, why)) => Err(Error::Invalid(format!("not a book: {why}"))),
    }
}

/// The book for an inadmissible verdict.
pub fn book_for(solution: &Solution, mode: Mode, en: &Enumeration) -> Result<Book> {
    match &solution.verdict {
        Verdict::Inadmissible(c) => compile_book_with(c, &solution.system, mode, en),
        Verdict::Admissible(_) => Err(Error::Invalid(
            "the requirements are admissible, so no book exists".into(),
        )),
        Verdict::Unknown(_) => Err(Error::Invalid(
            "the verdict is unknown; there is no certificate to compile".into(),
        )),
    }
}
