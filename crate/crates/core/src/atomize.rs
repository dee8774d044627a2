//! Rewriting x-space requirements over atom probabilities.
//!
//! Every probability term `x_j = P(B_j)` becomes `sum of y_a over the atoms of
//! B_j`. The system is the user constraints followed by the normalization row
//! and one nonnegativity row per atom. Besides the atom coordinates `y` the
//! system can be expressed in moment coordinates `m_b = P(all events of b)`,
//! which keeps products of intersections sparse; the two are related by a
//! triangular change of variables, so identities transfer between them.

use std::borrow::Cow;
use std::cmp::Ordering;
use std::fmt::Write as _;
use std::sync::OnceLock;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::events::{atom_label, atoms_of, Atom, AtomSet, BoolExpr};
use crate::numeric::{
    count_roots, count_roots_closed, Polynomial, RatInterval, Rational, RealRoot, Space, UPoly, Var,
};
use crate::requirements::{Provenance, Relation, RequirementSet, TermRegistry};

/// Expansion guard for products of long linear forms.
pub const TERM_LIMIT: usize = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RowKind {
    /// Index into the requirement set's constraints.
    Constraint(usize),
    Normalization,
    Nonneg(Atom),
}

#[derive(Clone, Debug)]
struct UserRow {
    x: Polynomial,
    rel: Relation,
    provenance: Provenance,
    y: OnceLock<std::result::Result<Polynomial, Error>>,
    m: OnceLock<std::result::Result<Polynomial, Error>>,
}

#[derive(Clone, Debug)]
pub struct PolySystem {
    n: usize,
    event_names: Vec<String>,
    terms: TermRegistry,
    term_names: Vec<String>,
    rows: Vec<UserRow>,
    x_in_m: Vec<OnceLock<Polynomial>>,
}

pub fn atomize(rs: &RequirementSet) -> PolySystem {
    let rows = rs
        .constraints
        .iter()
        .map(|c| UserRow {
            x: c.poly.clone(),
            rel: c.rel,
            provenance: c.provenance.clone(),
            y: OnceLock::new(),
            m: OnceLock::new(),
        })
        .collect();
    PolySystem {
        n: rs.n(),
        event_names: rs.events.iter().map(|e| e.name.clone()).collect(),
        terms: rs.terms.clone(),
        term_names: (0..rs.terms.len() as Var)
            .map(|v| rs.term_name(v))
            .collect(),
        rows,
        x_in_m: (0..rs.terms.len()).map(|_| OnceLock::new()).collect(),
    }
}

/// `y_a` in moment coordinates: sum over supersets `b` of `(-1)^|b - a| m_b`.
pub fn y_in_m(a: Atom, n: usize) -> Polynomial {
    let free = !a & ((1u32 << n) - 1);
    let mut terms = Vec::with_capacity(1 << free.count_ones());
    let mut sub = free;
    loop {
        let sign = if sub.count_ones().is_multiple_of(2) {
            1
        } else {
            -1
        };
        terms.push((
            crate::numeric::Monomial::var(a | sub),
            Rational::from_int(sign),
        ));
        if sub == 0 {
            break;
        }
        sub = (sub - 1) & free;
    }
    Polynomial::from_terms(Space::M, terms)
}

/// `m_b` in atom coordinates: the atoms containing every event of `b`.
pub fn m_in_y(b: Atom, n: usize) -> Polynomial {
    let set = AtomSet::superset_of(n, b);
    Polynomial::linear(
        Space::Y,
        set.iter().map(|a| (a, Rational::one())),
        Rational::zero(),
    )
}

/// Indicator of `set` in moment coordinates (subset Moebius transform).
pub fn set_in_m(set: &AtomSet) -> Polynomial {
    if let Some(b) = set.as_intersection() {
        return Polynomial::var(Space::M, b);
    }
    let size = set.universe_size();
    let mut f: Vec<i64> = (0..size as Atom)
        .map(|a| i64::from(set.contains(a)))
        .collect();
    for i in 0..set.n() {
        let bit = 1usize << i;
        for mask in 0..size {
            if mask & bit != 0 {
                f[mask] -= f[mask ^ bit];
            }
        }
    }
    Polynomial::linear(
        Space::M,
        f.iter()
            .enumerate()
            .filter(|(_, c)| **c != 0)
            .map(|(b, c)| (b as Var, Rational::from_int(*c))),
        Rational::zero(),
    )
}

pub fn set_in_y(set: &AtomSet) -> Polynomial {
    Polynomial::linear(
        Space::Y,
        set.iter().map(|a| (a, Rational::one())),
        Rational::zero(),
    )
}

/// Moment values of an atom distribution (superset sums).
pub fn moments_of(y: &[Rational]) -> Vec<Rational> {
    let mut m = y.to_vec();
    let size = m.len();
    let mut bit = 1;
    while bit < size {
        for mask in 0..size {
            if mask & bit == 0 {
                let hi = m[mask | bit].clone();
                m[mask] += hi;
            }
        }
        bit <<= 1;
    }
    m
}

/// Atom probabilities from moments (inverse of [`moments_of`]).
pub fn atoms_from_moments(m: &[Rational]) -> Vec<Rational> {
    let mut y = m.to_vec();
    let size = y.len();
    let mut bit = 1;
    while bit < size {
        for mask in 0..size {
            if mask & bit == 0 {
                let hi = y[mask | bit].clone();
                y[mask] -= hi;
            }
        }
        bit <<= 1;
    }
    y
}

impl PolySystem {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn atom_count(&self) -> usize {
        1 << self.n
    }

    pub fn event_names(&self) -> &[String] {
        &self.event_names
    }

    pub fn terms(&self) -> &TermRegistry {
        &self.terms
    }

    pub fn term_name(&self, v: Var) -> &str {
        &self.term_names[v as usize]
    }

    /// Number of user constraint rows; they come first.
    pub fn constraint_count(&self) -> usize {
        self.rows.len()
    }

    pub fn len(&self) -> usize {
        self.rows.len() + 1 + self.atom_count()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn normalization_index(&self) -> usize {
        self.rows.len()
    }

    pub fn nonneg_index(&self, a: Atom) -> usize {
        self.rows.len() + 1 + a as usize
    }

    pub fn kind(&self, i: usize) -> RowKind {
        let k = self.rows.len();
        match i.cmp(&k) {
            Ordering::Less => RowKind::Constraint(i),
            Ordering::Equal => RowKind::Normalization,
            Ordering::Greater => RowKind::Nonneg((i - k - 1) as Atom),
        }
    }

    pub fn rel(&self, i: usize) -> Relation {
        match self.kind(i) {
            RowKind::Constraint(c) => self.rows[c].rel,
            RowKind::Normalization => Relation::EqZero,
            RowKind::Nonneg(_) => Relation::GeqZero,
        }
    }

    pub fn provenance(&self, i: usize) -> Option<&Provenance> {
        match self.kind(i) {
            RowKind::Constraint(c) => Some(&self.rows[c].provenance),
            _ => None,
        }
    }

    /// One-line description of a row's origin.
    pub fn origin(&self, i: usize) -> String {
        match self.kind(i) {
            RowKind::Constraint(c) => self.rows[c].provenance.to_string(),
            RowKind::Normalization => "normalization".into(),
            RowKind::Nonneg(a) => format!("nonnegativity of y_{}", atom_label(a, self.n)),
        }
    }

    pub fn check_index(&self, i: usize) -> Result<()> {
        if i < self.len() {
            Ok(())
        } else {
            Err(Error::Certificate(format!(
                "row index {i} out of range (system has {} rows)",
                self.len()
            )))
        }
    }

    pub fn x_poly(&self, i: usize) -> Option<&Polynomial> {
        match self.kind(i) {
            RowKind::Constraint(c) => Some(&self.rows[c].x),
            _ => None,
        }
    }

    pub fn x_in_y(&self, v: Var) -> Polynomial {
        set_in_y(self.terms.atoms(v))
    }

    pub fn x_in_m(&self, v: Var) -> &Polynomial {
        self.x_in_m[v as usize].get_or_init(|| set_in_m(self.terms.atoms(v)))
    }

    /// Row `i` in the requested space. X is only defined for user rows.
    pub fn form(&self, i: usize, space: Space) -> Result<Cow<'_, Polynomial>> {
        self.check_index(i)?;
        match (self.kind(i), space) {
            (RowKind::Constraint(c), Space::X) => Ok(Cow::Borrowed(&self.rows[c].x)),
            (RowKind::Constraint(c), Space::Y) => {
                let row = &self.rows[c];
                row.y
                    .get_or_init(|| row.x.compose(Space::Y, |v| self.x_in_y(v), TERM_LIMIT))
                    .as_ref()
                    .map(Cow::Borrowed)
                    .map_err(Clone::clone)
            }
            (RowKind::Constraint(c), Space::M) => {
                let row = &self.rows[c];
                row.m
                    .get_or_init(|| {
                        row.x
                            .compose(Space::M, |v| self.x_in_m(v).clone(), TERM_LIMIT)
                    })
                    .as_ref()
                    .map(Cow::Borrowed)
                    .map_err(Clone::clone)
            }
            (RowKind::Normalization, Space::Y) => Ok(Cow::Owned(
                set_in_y(&AtomSet::full(self.n)).add_constant(&Rational::from_int(-1)),
            )),
            (RowKind::Normalization, Space::M) => Ok(Cow::Owned(
                Polynomial::var(Space::M, 0).add_constant(&Rational::from_int(-1)),
            )),
            (RowKind::Nonneg(a), Space::Y) => Ok(Cow::Owned(Polynomial::var(Space::Y, a))),
            (RowKind::Nonneg(a), Space::M) => Ok(Cow::Owned(y_in_m(a, self.n))),
            (_, s) => Err(Error::SpaceMismatch(format!(
                "row {i} ({}) has no {s:?}-space form",
                self.origin(i)
            ))),
        }
    }

    /// Maps a polynomial in x, y or m to the target space (y or m).
    pub fn convert(&self, p: &Polynomial, target: Space) -> Result<Polynomial> {
        match (p.space(), target) {
            (a, b) if a == b => Ok(p.clone()),
            (Space::X, Space::Y) => p.compose(Space::Y, |v| self.x_in_y(v), TERM_LIMIT),
            (Space::X, Space::M) => p.compose(Space::M, |v| self.x_in_m(v).clone(), TERM_LIMIT),
            (Space::Y, Space::M) => p.compose(Space::M, |a| y_in_m(a, self.n), TERM_LIMIT),
            (Space::M, Space::Y) => p.compose(Space::Y, |b| m_in_y(b, self.n), TERM_LIMIT),
            (_, Space::Y | Space::M) if p.is_constant() => Ok(p.clone().with_space(target)),
            (a, b) => Err(Error::SpaceMismatch(format!(
                "cannot map {a:?} polynomial to {b:?}"
            ))),
        }
    }

    pub fn var_name(&self, space: Space, v: Var) -> String {
        match space {
            Space::X => format!("x{v}"),
            Space::Y => format!("y_{}", atom_label(v, self.n)),
            Space::M => format!("m_{}", atom_label(v, self.n)),
            Space::Free => format!("z{v}"),
        }
    }

    pub fn show(&self, p: &Polynomial) -> String {
        p.display(&|s, v| self.var_name(s, v)).to_string()
    }

    /// Canonical x-space description; the system hash is taken over it.
    pub fn canonical_text(&self) -> String {
        let mut out = format!("events {}\n", self.event_names.join(" "));
        for (v, _, atoms) in self.terms.iter() {
            let labels: Vec<String> = atoms.iter().map(|a| atom_label(a, self.n)).collect();
            let _ = writeln!(out, "x{v} {{{}}}", labels.join(","));
        }
        for r in &self.rows {
            let _ = writeln!(out, "{} {}", r.x, r.rel.symbol());
        }
        out
    }

    /// SHA-256 of [`Self::canonical_text`], hex.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.canonical_text().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    /// The y-system, one row per line.
    pub fn atoms_text(&self) -> Result<String> {
        let mut out = String::new();
        let _ = writeln!(out, "system {}", self.hash());
        let _ = writeln!(out, "events {}", self.event_names.join(" "));
        let _ = writeln!(
            out,
            "atoms {} (y_b: b lists events in order, 1 = occurs)",
            self.atom_count()
        );
        for (v, _, atoms) in self.terms.iter() {
            let _ = writeln!(
                out,
                "x{v} = {} = {}",
                self.term_name(v),
                self.show(&set_in_y(atoms))
            );
        }
        let _ = writeln!(out, "rows {}", self.len());
        for i in 0..self.len() {
            let p = self.form(i, Space::Y)?;
            // Products of sums blow up; keep those in terms of the x definitions.
            let shown = match self.x_poly(i) {
                Some(x) if p.len() > ATOMS_TEXT_TERMS => self.show(x),
                _ => self.show(&p),
            };
            let _ = writeln!(
                out,
                "r{i} [{}] {} {}",
                self.origin(i),
                shown,
                self.rel(i).symbol()
            );
        }
        Ok(out)
    }
}

/// Rows whose expansion over atoms has more terms than this are listed over x.
const ATOMS_TEXT_TERMS: usize = 64;

/// A point of the atom simplex given by a square-free univariate polynomial's
/// root inside an isolating interval; every atom probability is a polynomial
/// in that root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertifiedPoint {
    pub residual: UPoly,
    pub interval: RatInterval,
    pub y: Vec<UPoly>,
    /// The range the root was searched in, and how many roots it holds.
    pub range: RatInterval,
    pub range_roots: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    Exact(Vec<Rational>),
    Certified(Box<CertifiedPoint>),
}

impl Witness {
    pub fn n(&self) -> usize {
        let len = match self {
            Witness::Exact(y) => y.len(),
            Witness::Certified(c) => c.y.len(),
        };
        len.trailing_zeros() as usize
    }

    /// A rational point near the witness (the witness itself when exact).
    pub fn approximate(&self) -> Vec<Rational> {
        match self {
            Witness::Exact(y) => y.clone(),
            Witness::Certified(c) => {
                let z = c.interval.mid();
                c.y.iter().map(|p| p.eval(&z)).collect()
            }
        }
    }
}

pub fn x_of_atoms(y: &[Rational], atoms: &AtomSet) -> Rational {
    atoms.iter().map(|a| &y[a as usize]).sum()
}

/// `P(e)` under an exact atom distribution.
pub fn x_of_witness(y: &[Rational], e: &BoolExpr) -> Rational {
    let n = y.len().trailing_zeros() as usize;
    x_of_atoms(y, &atoms_of(e, n))
}

/// `P(e)` enclosure under any witness (a point when exact).
pub fn x_enclosure(w: &Witness, e: &BoolExpr) -> Result<RatInterval> {
    let n = w.n();
    let atoms = atoms_of(e, n);
    match w {
        Witness::Exact(y) => Ok(RatInterval::point(x_of_atoms(y, &atoms))),
        Witness::Certified(c) => {
            let p = atoms
                .iter()
                .fold(UPoly::zero(), |acc, a| acc.add(&c.y[a as usize]));
            let mut root = RealRoot::new(&c.residual, c.interval.clone())?;
            if let Some(v) = p_exact_value(&p, &mut root) {
                return Ok(RatInterval::point(v));
            }
            crate::numeric::interval_eval(&Polynomial::from_upoly(Space::Free, 0, &p), |_| {
                Some(root.interval().clone())
            })
        }
    }
}

fn p_exact_value(p: &UPoly, root: &mut RealRoot) -> Option<Rational> {
    if p.degree() == 0 {
        return Some(p.coefs().first().cloned().unwrap_or_default());
    }
    root.exact().map(|z| p.eval(z))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Residual {
    Exact(Rational),
    /// Sign of the residual at the certified root.
    Sign(Ordering),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub constraint: usize,
    pub residual: Residual,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WitnessReport {
    /// Problems with the witness itself (length, sign, normalization, isolation).
    pub malformed: Vec<String>,
    pub violations: Vec<Violation>,
}

impl WitnessReport {
    pub fn ok(&self) -> bool {
        self.malformed.is_empty() && self.violations.is_empty()
    }
}

/// Checks `w` against every desugared constraint of `rs` by exact evaluation.
pub fn verify_witness(w: &Witness, rs: &RequirementSet) -> Result<WitnessReport> {
    let n = rs.n();
    let mut rep = WitnessReport::default();
    match w {
        Witness::Exact(y) => {
            if y.len() != 1 << n {
                rep.malformed
                    .push(format!("expected {} atoms, got {}", 1 << n, y.len()));
                return Ok(rep);
            }
            for (a, v) in y.iter().enumerate() {
                if v.is_negative() {
                    rep.malformed
                        .push(format!("y_{} = {v} is negative", atom_label(a as Atom, n)));
                }
            }
            let total: Rational = y.iter().sum();
            if !total.is_one() {
                rep.malformed
                    .push(format!("atom probabilities sum to {total}"));
            }
            let xs: Vec<Rational> = (0..rs.terms.len() as Var)
                .map(|v| x_of_atoms(y, rs.terms.atoms(v)))
                .collect();
            for (i, c) in rs.constraints.iter().enumerate() {
                let val = c.poly.eval_slice(&xs)?;
                if !c.rel.holds(&val) {
                    rep.violations.push(Violation {
                        constraint: i,
                        residual: Residual::Exact(val),
                    });
                }
            }
        }
        Witness::Certified(cp) => {
            if cp.y.len() != 1 << n {
                rep.malformed
                    .push(format!("expected {} atoms, got {}", 1 << n, cp.y.len()));
                return Ok(rep);
            }
            if cp.residual.degree() == 0 {
                rep.malformed.push("residual polynomial is constant".into());
                return Ok(rep);
            }
            let sf = cp.residual.square_free()?;
            if sf.degree() != cp.residual.degree() {
                rep.malformed
                    .push("residual polynomial is not square-free".into());
            }
            if count_roots(&cp.residual, &cp.interval)? != 1
                || cp.residual.eval(cp.interval.lo()).is_zero()
            {
                rep.malformed.push(format!(
                    "interval [{}, {}] does not isolate exactly one root",
                    cp.interval.lo(),
                    cp.interval.hi()
                ));
                return Ok(rep);
            }
            if count_roots_closed(&cp.residual, &cp.range)? != cp.range_roots {
                rep.malformed
                    .push("root count over the search range does not match".into());
            }
            let mut root = RealRoot::new(&cp.residual, cp.interval.clone())?;
            let total = cp.y.iter().fold(UPoly::zero(), |acc, p| acc.add(p));
            if root.sign_of(&total.sub(&UPoly::constant(Rational::one()))) != Ordering::Equal {
                rep.malformed
                    .push("atom probabilities do not sum to 1".into());
            }
            for (a, p) in cp.y.iter().enumerate() {
                if root.sign_of(p) == Ordering::Less {
                    rep.malformed.push(format!(
                        "y_{} is negative at the root",
                        atom_label(a as Atom, n)
                    ));
                }
            }
            let xs: Vec<UPoly> = (0..rs.terms.len() as Var)
                .map(|v| {
                    rs.terms
                        .atoms(v)
                        .iter()
                        .fold(UPoly::zero(), |acc, a| acc.add(&cp.y[a as usize]))
                })
                .collect();
            for (i, c) in rs.constraints.iter().enumerate() {
                let val = compose_univariate(&c.poly, &xs);
                let s = root.sign_of(&val);
                let holds = match c.rel {
                    Relation::EqZero => s == Ordering::Equal,
                    Relation::GeqZero => s != Ordering::Less,
                    Relation::GtZero => s == Ordering::Greater,
                    Relation::NeqZero => s != Ordering::Equal,
                };
                if !holds {
                    rep.violations.push(Violation {
                        constraint: i,
                        residual: Residual::Sign(s),
                    });
                }
            }
        }
    }
    Ok(rep)
}

/// Substitutes univariate polynomials for the variables of `p`.
pub fn compose_univariate(p: &Polynomial, xs: &[UPoly]) -> UPoly {
    let mut acc = UPoly::zero();
    for (m, c) in p.terms() {
        let mut t = UPoly::constant(c.clone());
        for &(v, e) in m.pairs() {
            t = t.mul(&xs[v as usize].pow(e));
        }
        acc = acc.add(&t);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::requirements::parse_spec;

    fn r(p: i64, q: i64) -> Rational {
        Rational::frac(p, q)
    }

    #[test]
    fn single_event_system() {
        let rs = parse_spec("events A\nP(A) = 1/2\n").unwrap();
        let sys = atomize(&rs);
        assert_eq!(sys.len(), 4);
        let rows: Vec<String> = (0..4)
            .map(|i| {
                format!(
                    "{} {}",
                    sys.show(&sys.form(i, Space::Y).unwrap()),
                    sys.rel(i).symbol()
                )
            })
            .collect();
        assert_eq!(
            rows,
            ["y_1 - 1/2 = 0", "y_0 + y_1 - 1 = 0", "y_0 >= 0", "y_1 >= 0"]
        );
    }

    #[test]
    fn appendix_a_shape() {
        let text = "events E1 E2 E3\nP(E1) = 0.8\nP(E2) = 0.7\nP(E3) = 0.95\nP(E3 given !E2) = 0.6\nindep_algebras [E3] [E1 E2]\n";
        let sys = atomize(&parse_spec(text).unwrap());
        let count = |rel| (0..sys.len()).filter(|&i| sys.rel(i) == rel).count();
        assert_eq!(count(Relation::EqZero), 9);
        assert_eq!(count(Relation::GeqZero), 8);
        assert_eq!(count(Relation::NeqZero), 1);
        for i in 0..sys.len() {
            let d = sys.form(i, Space::Y).unwrap().total_degree();
            assert!(d <= 2);
            if let Some(x) = sys.x_poly(i) {
                assert_eq!(x.total_degree(), d);
            }
        }
    }

    #[test]
    fn moment_forms_agree_with_atoms() {
        let rs = parse_spec(
            "events A B C\nP((A | !B) & C) = 1/3\nconstraint P(!A)*P(B & !C) >= P(A)^2\n",
        )
        .unwrap();
        let sys = atomize(&rs);
        for i in 0..sys.len() {
            let y = sys.form(i, Space::Y).unwrap().into_owned();
            let m = sys.form(i, Space::M).unwrap().into_owned();
            assert_eq!(sys.convert(&m, Space::Y).unwrap(), y, "row {i}");
            assert_eq!(sys.convert(&y, Space::M).unwrap(), m, "row {i}");
        }
        let y: Vec<Rational> = (1..=8).map(|k| r(k, 36)).collect();
        assert_eq!(atoms_from_moments(&moments_of(&y)), y);
    }

    #[test]
    fn x_values() {
        let uni = vec![r(1, 4); 4];
        assert_eq!(x_of_witness(&uni, &BoolExpr::event(0)), r(1, 2));
        let point = vec![r(0, 1), r(0, 1), r(0, 1), r(1, 1)];
        assert_eq!(
            x_of_witness(
                &point,
                &BoolExpr::and(BoolExpr::event(0), BoolExpr::event(1))
            ),
            r(1, 1)
        );
    }

    #[test]
    fn witness_checks() {
        let rs = parse_spec("events A B\nindependent A, B\n").unwrap();
        assert!(verify_witness(&Witness::Exact(vec![r(1, 4); 4]), &rs)
            .unwrap()
            .ok());
        let rs = parse_spec("events A B\nP(A) = 0.6\n").unwrap();
        let rep = verify_witness(&Witness::Exact(vec![r(1, 4); 4]), &rs).unwrap();
        assert_eq!(
            rep.violations,
            vec![Violation {
                constraint: 0,
                residual: Residual::Exact(r(-1, 10))
            }]
        );
        let rep = verify_witness(
            &Witness::Exact(vec![r(1, 2), r(1, 2), r(1, 2), r(-1, 2)]),
            &rs,
        )
        .unwrap();
        assert_eq!(rep.malformed.len(), 1);
    }

    #[test]
    fn hash_is_stable_and_sensitive() {
        let a = atomize(&parse_spec("events A\nP(A) = 1/2\n").unwrap());
        let b = atomize(&parse_spec("events A\nP(A) = 1/2 # same\n").unwrap());
        let c = atomize(&parse_spec("events A\nP(A) = 1/3\n").unwrap());
        assert_eq!(a.hash(), b.hash());
        assert_ne!(a.hash(), c.hash());
        assert_eq!(a.hash().len(), 64);
    }
}
