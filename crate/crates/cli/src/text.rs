//! Human-readable rendering of a [`Report`].

use std::fmt::Write;

use crate::report::{Report, RowRef, Value};

fn value(v: &Value) -> String {
    match (&v.value, &v.enclosure) {
        (Some(x), _) => x.clone(),
        (None, Some(_)) => format!("~ {}", v.approx.as_deref().unwrap_or("?")),
        _ => "?".into(),
    }
}

fn row(r: &RowRef) -> String {
    format!("r{} [{}] {} {}", r.index, r.origin, r.form, r.relation)
}

pub fn render(rep: &Report) -> String {
    let mut o = String::new();
    let _ = writeln!(o, "{} {}", rep.command, rep.spec);
    // The atoms listing carries its own system line.
    if let (Some(d), None) = (&rep.spec_digest, &rep.atoms) {
        let _ = writeln!(o, "system {d}");
    }
    for w in &rep.warnings {
        let _ = writeln!(o, "warning: {w}");
    }
    if let Some(v) = &rep.verdict {
        let _ = writeln!(o, "verdict: {v}");
    }
    if let Some(t) = &rep.trace {
        let _ = writeln!(o, "class: {}", t.class);
        let _ = writeln!(o, "decided by: {}", t.strategy);
        if t.nodes > 0 {
            let _ = writeln!(o, "nodes: {}", t.nodes);
        }
        for e in &t.eliminations {
            let _ = writeln!(o, "  eliminate {e}");
        }
        for s in &t.steps {
            let _ = writeln!(o, "  {s}");
        }
    }
    if let Some(lines) = &rep.atoms {
        for l in lines {
            let _ = writeln!(o, "{l}");
        }
    }
    if let Some(w) = &rep.witness {
        let _ = writeln!(
            o,
            "witness ({}, {}):",
            w.kind,
            if w.checked { "checked" } else { "CHECK FAILED" }
        );
        if let Some(r) = &w.root {
            let _ = writeln!(
                o,
                "  z is the root of {} in [{}, {}]",
                r.polynomial, r.interval[0], r.interval[1]
            );
            let _ = writeln!(
                o,
                "  ({} roots in [{}, {}])",
                r.roots_in_range, r.range[0], r.range[1]
            );
            for f in &r.atom_forms {
                let _ = writeln!(o, "  {f}");
            }
        }
        for v in w.atoms.iter().chain(&w.terms) {
            let _ = writeln!(o, "  {} = {}", v.name, value(v));
        }
    }
    if let Some(c) = &rep.certificate {
        let _ = writeln!(
            o,
            "certificate ({}, {}):",
            c.kind,
            if c.checked {
                "verified"
            } else {
                "VERIFICATION FAILED"
            }
        );
        if !c.checked {
            let _ = writeln!(o, "  {}", c.diagnostic);
        }
        let _ = writeln!(o, "rows used:");
        for r in &c.rows {
            let _ = writeln!(o, "  {}", row(r));
        }
        let _ = writeln!(o, "--- certificate file ---");
        for l in &c.file {
            let _ = writeln!(o, "{l}");
        }
        let _ = writeln!(o, "---");
    }
    if let Some(v) = &rep.verification {
        let _ = writeln!(o, "verify {} ({})", v.file, v.kind);
        let _ = writeln!(
            o,
            "  system matches: {}",
            if v.system_matches { "yes" } else { "no" }
        );
        let _ = writeln!(o, "  result: {}", if v.ok { "valid" } else { "rejected" });
        if !v.diagnostic.is_empty() {
            let _ = writeln!(o, "  {}", v.diagnostic);
        }
    }
    if let Some(u) = &rep.undecided {
        let _ = writeln!(o, "undecided: {}", u.reason);
        for v in &u.region {
            let _ = writeln!(o, "  {} {}", v.name, value(v));
        }
        if let Some(r) = &u.row {
            let _ = writeln!(o, "  open row {}", row(r));
        }
    }
    if let Some(i) = &rep.interval {
        let _ = writeln!(o, "{} in [{}, {}]", i.objective, i.lo, i.hi);
    }
    if let Some(b) = &rep.book {
        let _ = writeln!(o, "game ({}, copies {}, nu {}):", b.mode, b.copies, b.nu);
        for t in &b.terms {
            let _ = writeln!(o, "  {t}");
        }
        let scope = if b.exhaustive { "all" } else { "sampled" };
        let _ = writeln!(
            o,
            "realized over {scope} {} outcomes: {{{}}}",
            b.outcomes,
            b.realized.join(", ")
        );
        let _ = writeln!(o, "believed:");
        for e in &b.ledger {
            let copies: Vec<String> = e
                .copies
                .iter()
                .map(|c| c.iter().map(u32::to_string).collect::<Vec<_>>().join(","))
                .collect();
            let _ = writeln!(
                o,
                "  term {} ({}) {}   copies {}   factors {}",
                e.term,
                e.role,
                e.believed,
                copies.join(" | "),
                e.factors.join(" ")
            );
        }
        let _ = writeln!(o, "  total {}", b.believed);
        match &b.kind {
            Some(k) => {
                let _ = writeln!(o, "book: {k}");
            }
            None => {
                let _ = writeln!(o, "book: none");
            }
        }
        for n in &b.notes {
            let _ = writeln!(o, "note: {n}");
        }
    }
    if let Some(e) = &rep.error {
        let _ = writeln!(o, "error: {e}");
    }
    if let Some(t) = rep.elapsed_us {
        let _ = writeln!(o, "time: {} ms", t as f64 / 1000.0);
    }
    o
}
