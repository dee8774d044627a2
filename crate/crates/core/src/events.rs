//! Named events, boolean combinations and their minterm expansion.
//!
//! An atom is a bit mask over the declared events: bit `i` is set iff event
//! `i` occurs. Atom sets are plain bitsets over the `2^n` atoms.

use std::fmt;

use crate::error::{Error, Result};

/// Hard cap on the number of declared events.
pub const MAX_EVENTS: usize = 24;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EventId {
    pub index: usize,
    pub name: String,
}

/// Ordered list of declared events.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct EventTable {
    events: Vec<EventId>,
}

impl EventTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_names<S: AsRef<str>>(names: &[S]) -> Result<Self> {
        let mut t = Self::new();
        for n in names {
            t.declare(n.as_ref())?;
        }
        Ok(t)
    }

    pub fn declare(&mut self, name: &str) -> Result<usize> {
        if self.lookup(name).is_some() {
            return Err(Error::DuplicateEvent(name.to_string()));
        }
        if self.events.len() >= MAX_EVENTS {
            return Err(Error::TooManyEvents(self.events.len() + 1, MAX_EVENTS));
        }
        let index = self.events.len();
        self.events.push(EventId {
            index,
            name: name.to_string(),
        });
        Ok(index)
    }

    pub fn lookup(&self, name: &str) -> Option<usize> {
        self.events.iter().position(|e| e.name == name)
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn name(&self, index: usize) -> &str {
        &self.events[index].name
    }

    pub fn iter(&self) -> impl Iterator<Item = &EventId> {
        self.events.iter()
    }
}

/// A boolean combination of events, by event index.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum BoolExpr {
    Event(usize),
    Not(Box<BoolExpr>),
    And(Box<BoolExpr>, Box<BoolExpr>),
    Or(Box<BoolExpr>, Box<BoolExpr>),
}

impl BoolExpr {
    pub fn event(i: usize) -> Self {
        BoolExpr::Event(i)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(e: BoolExpr) -> Self {
        BoolExpr::Not(Box::new(e))
    }

    pub fn and(a: BoolExpr, b: BoolExpr) -> Self {
        BoolExpr::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: BoolExpr, b: BoolExpr) -> Self {
        BoolExpr::Or(Box::new(a), Box::new(b))
    }

    /// Conjunction of a non-empty list, left-associated.
    pub fn and_all(mut es: Vec<BoolExpr>) -> Self {
        assert!(!es.is_empty(), "empty conjunction");
        let first = es.remove(0);
        es.into_iter().fold(first, BoolExpr::and)
    }

    /// Largest event index referenced, if any.
    pub fn max_event(&self) -> usize {
        match self {
            BoolExpr::Event(i) => *i,
            BoolExpr::Not(e) => e.max_event(),
            BoolExpr::And(a, b) | BoolExpr::Or(a, b) => a.max_event().max(b.max_event()),
        }
    }

    pub fn events_used(&self, out: &mut Vec<usize>) {
        match self {
            BoolExpr::Event(i) => {
                if !out.contains(i) {
                    out.push(*i)
                }
            }
            BoolExpr::Not(e) => e.events_used(out),
            BoolExpr::And(a, b) | BoolExpr::Or(a, b) => {
                a.events_used(out);
                b.events_used(out);
            }
        }
    }

    /// Renders with the DSL operators, parenthesizing only where precedence needs it.
    pub fn display<'a>(&'a self, events: &'a EventTable) -> impl fmt::Display + 'a {
        ExprDisplay {
            e: self,
            events,
            prec: 0,
        }
    }
}

struct ExprDisplay<'a> {
    e: &'a BoolExpr,
    events: &'a EventTable,
    prec: u8,
}

impl fmt::Display for ExprDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sub = |e, prec| ExprDisplay {
            e,
            events: self.events,
            prec,
        };
        match self.e {
            BoolExpr::Event(i) => write!(f, "{}", self.events.name(*i)),
            BoolExpr::Not(e) => write!(f, "!{}", sub(e, 3)),
            BoolExpr::And(a, b) => {
                let open = self.prec > 2;
                if open {
                    write!(f, "(")?;
                }
                write!(f, "{} & {}", sub(a, 2), sub(b, 3))?;
                if open {
                    write!(f, ")")?;
                }
                Ok(())
            }
            BoolExpr::Or(a, b) => {
                let open = self.prec > 1;
                if open {
                    write!(f, "(")?;
                }
                write!(f, "{} | {}", sub(a, 1), sub(b, 2))?;
                if open {
                    write!(f, ")")?;
                }
                Ok(())
            }
        }
    }
}

/// A minterm: bit `i` set iff event `i` occurs.
pub type Atom = u32;

pub fn eval_expr(e: &BoolExpr, a: Atom) -> bool {
    match e {
        BoolExpr::Event(i) => (a >> i) & 1 == 1,
        BoolExpr::Not(e) => !eval_expr(e, a),
        BoolExpr::And(x, y) => eval_expr(x, a) && eval_expr(y, a),
        BoolExpr::Or(x, y) => eval_expr(x, a) || eval_expr(y, a),
    }
}

/// Bitset over the `2^n` atoms of `n` events.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AtomSet {
    n: usize,
    words: Vec<u64>,
}

impl AtomSet {
    pub fn empty(n: usize) -> Self {
        assert!(n <= MAX_EVENTS, "event count {n} above cap");
        let bits = 1usize << n;
        AtomSet {
            n,
            words: vec![0; bits.div_ceil(64)],
        }
    }

    pub fn full(n: usize) -> Self {
        complement_atoms(&Self::empty(n))
    }

    pub fn singleton(n: usize, a: Atom) -> Self {
        let mut s = Self::empty(n);
        s.insert(a);
        s
    }

    pub fn from_atoms(n: usize, atoms: impl IntoIterator<Item = Atom>) -> Self {
        let mut s = Self::empty(n);
        for a in atoms {
            s.insert(a);
        }
        s
    }

    /// Atoms in which every event of `mask` occurs.
    pub fn superset_of(n: usize, mask: Atom) -> Self {
        Self::from_atoms(n, (0..1u32 << n).filter(|a| a & mask == mask))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn universe_size(&self) -> usize {
        1 << self.n
    }

    pub fn insert(&mut self, a: Atom) {
        assert!((a as usize) < self.universe_size());
        self.words[(a / 64) as usize] |= 1 << (a % 64);
    }

    pub fn contains(&self, a: Atom) -> bool {
        (a as usize) < self.universe_size() && (self.words[(a / 64) as usize] >> (a % 64)) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = Atom> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros();
                w &= w - 1;
                Some(wi as u32 * 64 + b)
            })
        })
    }

    pub fn intersect(&self, o: &AtomSet) -> AtomSet {
        assert_eq!(self.n, o.n);
        AtomSet {
            n: self.n,
            words: self
                .words
                .iter()
                .zip(&o.words)
                .map(|(a, b)| a & b)
                .collect(),
        }
    }

    pub fn union(&self, o: &AtomSet) -> AtomSet {
        assert_eq!(self.n, o.n);
        AtomSet {
            n: self.n,
            words: self
                .words
                .iter()
                .zip(&o.words)
                .map(|(a, b)| a | b)
                .collect(),
        }
    }

    pub fn is_subset(&self, o: &AtomSet) -> bool {
        self.words.iter().zip(&o.words).all(|(a, b)| a & !b == 0)
    }

    /// If this set is exactly the atoms where all events of some mask occur, that mask.
    pub fn as_intersection(&self) -> Option<Atom> {
        let first = self.iter().next()?;
        let mask = self.iter().fold(first, |m, a| m & a);
        (self.len() == 1 << (self.n - mask.count_ones() as usize)).then_some(mask)
    }
}

impl fmt::Debug for AtomSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set()
            .entries(self.iter().map(|a| atom_label(a, self.n)))
            .finish()
    }
}

/// Bit string of an atom, event 0 first.
pub fn atom_label(a: Atom, n: usize) -> String {
    (0..n)
        .map(|i| if (a >> i) & 1 == 1 { '1' } else { '0' })
        .collect()
}

fn event_pattern(i: usize, n: usize) -> AtomSet {
    let mut s = AtomSet::empty(n);
    if n <= 6 {
        for a in 0..1u32 << n {
            if (a >> i) & 1 == 1 {
                s.insert(a);
            }
        }
        return s;
    }
    // Whole 64-bit words: within a word the pattern depends only on bits < 6.
    let word = if i < 6 {
        (0..64u64)
            .filter(|b| (b >> i) & 1 == 1)
            .fold(0, |w, b| w | 1 << b)
    } else {
        0
    };
    for (wi, w) in s.words.iter_mut().enumerate() {
        *w = if i < 6 {
            word
        } else if (wi >> (i - 6)) & 1 == 1 {
            u64::MAX
        } else {
            0
        };
    }
    s
}

pub fn atoms_of(e: &BoolExpr, n: usize) -> AtomSet {
    match e {
        BoolExpr::Event(i) => {
            assert!(*i < n, "event {i} out of range for n = {n}");
            event_pattern(*i, n)
        }
        BoolExpr::Not(e) => complement_atoms(&atoms_of(e, n)),
        BoolExpr::And(a, b) => atoms_of(a, n).intersect(&atoms_of(b, n)),
        BoolExpr::Or(a, b) => atoms_of(a, n).union(&atoms_of(b, n)),
    }
}

pub fn complement_atoms(s: &AtomSet) -> AtomSet {
    let bits = s.universe_size();
    let mut words: Vec<u64> = s.words.iter().map(|w| !w).collect();
    if !bits.is_multiple_of(64) {
        let last = words.len() - 1;
        words[last] &= (1u64 << bits) - 1;
    }
    AtomSet { n: s.n, words }
}
