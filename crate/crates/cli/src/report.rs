//! The structured report. Text output is rendered from it, never computed
//! separately.

use serde::Serialize;

use probenv_core::atomize::{verify_witness, x_enclosure, PolySystem, Witness};
use probenv_core::certificates::{verify_certificate, write_certificate, Certificate};
use probenv_core::dutchbook::{Book, Ledger, Realized, Source};
use probenv_core::events::{atom_label, BoolExpr};
use probenv_core::feasibility::{Trace, Undecided};
use probenv_core::numeric::{RatInterval, Rational, Space};
use probenv_core::requirements::RequirementSet;

/// Exact rational as a `p/q` string.
pub fn q(r: &Rational) -> String {
    r.fraction()
}

#[derive(Serialize, Default, Debug)]
pub struct Report {
    pub command: String,
    pub spec: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spec_digest: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<TraceOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub atoms: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertificateOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verification: Option<VerificationOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub undecided: Option<UndecidedOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub interval: Option<IntervalOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub book: Option<BookOut>,
    pub warnings: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_us: Option<u64>,
}

impl Report {
    pub fn new(command: &str, spec: &str) -> Report {
        Report {
            command: command.into(),
            spec: spec.into(),
            ..Report::default()
        }
    }

    pub fn exit_code(&self) -> u8 {
        if self.error.is_some() {
            return 3;
        }
        match self.verdict.as_deref() {
            Some("inadmissible") => 1,
            Some("unknown") => 2,
            Some("error") => 3,
            _ => 0,
        }
    }
}

#[derive(Serialize, Debug)]
pub struct TraceOut {
    pub class: String,
    pub strategy: String,
    pub steps: Vec<String>,
    pub eliminations: Vec<String>,
    pub nodes: u64,
}

impl From<&Trace> for TraceOut {
    fn from(t: &Trace) -> Self {
        TraceOut {
            class: t.class.to_string(),
            strategy: t.strategy.clone(),
            steps: t.steps.clone(),
            eliminations: t.eliminations.clone(),
            nodes: t.nodes,
        }
    }
}

/// A value known exactly, or only up to an enclosure.
#[derive(Serialize, Debug)]
pub struct Value {
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub enclosure: Option<[String; 2]>,
    /// Decimal midpoint of the enclosure, for reading only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub approx: Option<String>,
}

impl Value {
    fn of(name: String, iv: &RatInterval) -> Value {
        if iv.is_point() {
            Value {
                name,
                value: Some(q(iv.lo())),
                enclosure: None,
                approx: None,
            }
        } else {
            Value {
                name,
                value: None,
                enclosure: Some([q(iv.lo()), q(iv.hi())]),
                approx: Some(format!("{:.12}", iv.mid().to_f64())),
            }
        }
    }
}

#[derive(Serialize, Debug)]
pub struct RootOut {
    pub polynomial: String,
    pub interval: [String; 2],
    pub range: [String; 2],
    pub roots_in_range: usize,
    /// Atom probabilities as polynomials in the root z.
    pub atom_forms: Vec<String>,
}

#[derive(Serialize, Debug)]
pub struct WitnessOut {
    pub kind: String,
    pub atoms: Vec<Value>,
    pub terms: Vec<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub root: Option<RootOut>,
    pub checked: bool,
}

fn atom_expr(a: u32, n: usize) -> BoolExpr {
    BoolExpr::and_all(
        (0..n)
            .map(|i| {
                let e = BoolExpr::event(i);
                if (a >> i) & 1 == 1 {
                    e
                } else {
                    BoolExpr::not(e)
                }
            })
            .collect(),
    )
}

pub fn witness_out(w: &Witness, rs: &RequirementSet) -> probenv_core::Result<WitnessOut> {
    let n = rs.n();
    let atoms = (0..1u32 << n)
        .map(|a| {
            Ok(Value::of(
                format!("y_{}", atom_label(a, n)),
                &x_enclosure(w, &atom_expr(a, n))?,
            ))
        })
        .collect::<probenv_core::Result<Vec<_>>>()?;
    let terms = rs
        .terms
        .iter()
        .map(|(v, e, _)| Ok(Value::of(rs.term_name(v), &x_enclosure(w, e)?)))
        .collect::<probenv_core::Result<Vec<_>>>()?;
    let root = match w {
        Witness::Exact(_) => None,
        Witness::Certified(c) => Some(RootOut {
            polynomial: c.residual.to_string(),
            interval: [q(c.interval.lo()), q(c.interval.hi())],
            range: [q(c.range.lo()), q(c.range.hi())],
            roots_in_range: c.range_roots,
            atom_forms: c
                .y
                .iter()
                .enumerate()
                .map(|(a, p)| format!("y_{} = {p}", atom_label(a as u32, n)))
                .collect(),
        }),
    };
    Ok(WitnessOut {
        kind: match w {
            Witness::Exact(_) => "exact".into(),
            Witness::Certified(_) => "certified".into(),
        },
        atoms,
        terms,
        root,
        checked: verify_witness(w, rs)?.ok(),
    })
}

#[derive(Serialize, Debug)]
pub struct RowRef {
    pub index: usize,
    pub origin: String,
    pub relation: String,
    pub form: String,
}

fn row_ref(sys: &PolySystem, i: usize) -> RowRef {
    let form = sys
        .x_poly(i)
        .map(|p| sys.show(p))
        .or_else(|| sys.form(i, Space::Y).ok().map(|p| sys.show(&p)))
        .unwrap_or_default();
    RowRef {
        index: i,
        origin: sys.origin(i),
        relation: sys.rel(i).symbol().into(),
        form,
    }
}

#[derive(Serialize, Debug)]
pub struct CertificateOut {
    pub kind: String,
    pub rows: Vec<RowRef>,
    pub checked: bool,
    pub diagnostic: String,
    /// The certificate file, line by line.
    pub file: Vec<String>,
}

pub fn certificate_out(c: &Certificate, sys: &PolySystem) -> CertificateOut {
    let v = verify_certificate(c, sys);
    CertificateOut {
        kind: c.kind().into(),
        rows: c.rows().into_iter().map(|i| row_ref(sys, i)).collect(),
        checked: v.ok,
        diagnostic: v.diagnostic,
        file: write_certificate(c, sys)
            .lines()
            .map(str::to_string)
            .collect(),
    }
}

#[derive(Serialize, Debug)]
pub struct VerificationOut {
    pub file: String,
    pub kind: String,
    pub system_matches: bool,
    pub ok: bool,
    pub diagnostic: String,
}

#[derive(Serialize, Debug)]
pub struct UndecidedOut {
    pub reason: String,
    pub region: Vec<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub row: Option<RowRef>,
}

pub fn undecided_out(u: &Undecided, sys: &PolySystem) -> UndecidedOut {
    UndecidedOut {
        reason: u.reason.clone(),
        region: u
            .region
            .iter()
            .map(|(v, iv)| Value::of(sys.var_name(Space::M, *v), iv))
            .collect(),
        row: u.row.map(|i| row_ref(sys, i)),
    }
}

#[derive(Serialize, Debug)]
pub struct IntervalOut {
    pub objective: String,
    pub lo: String,
    pub hi: String,
}

#[derive(Serialize, Debug)]
pub struct LedgerOut {
    pub term: usize,
    pub role: String,
    pub believed: String,
    pub copies: Vec<Vec<u32>>,
    pub factors: Vec<String>,
}

#[derive(Serialize, Debug)]
pub struct BookOut {
    pub mode: String,
    pub copies: u32,
    pub nu: u32,
    pub terms: Vec<String>,
    pub realized: Vec<String>,
    pub outcomes: u64,
    pub exhaustive: bool,
    pub ledger: Vec<LedgerOut>,
    pub believed: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    pub notes: Vec<String>,
}

fn source_name(s: Source) -> String {
    match s {
        Source::Row(r) => format!("r{r}"),
        Source::Multiplier => "multiplier".into(),
        Source::Square => "square".into(),
        Source::Transcribed => "given".into(),
    }
}

pub fn book_out(
    game: &probenv_core::dutchbook::Game,
    realized: &Realized,
    ledger: &Ledger,
    kind: Option<String>,
    notes: Vec<String>,
) -> BookOut {
    BookOut {
        mode: game.mode.name().into(),
        copies: game.copies_used,
        nu: game.nu(),
        terms: game
            .terms
            .iter()
            .map(|t| format!("{} {}", t.role.name(), t.render(&game.events)))
            .collect(),
        realized: realized.values.iter().map(q).collect(),
        outcomes: realized.outcomes,
        exhaustive: realized.exhaustive,
        ledger: ledger
            .entries
            .iter()
            .map(|e| LedgerOut {
                term: e.term,
                role: e.role.name().into(),
                believed: e.belief.to_string(),
                copies: e.copies.clone(),
                factors: e.sources.iter().map(|s| source_name(*s)).collect(),
            })
            .collect(),
        believed: ledger.aggregate.to_string(),
        kind,
        notes,
    }
}

pub fn from_book(b: &Book) -> BookOut {
    book_out(
        &b.game,
        &b.realized,
        &b.ledger,
        Some(b.kind.to_string()),
        b.notes.clone(),
    )
}
