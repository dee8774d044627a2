mod common;

use std::sync::OnceLock;

use common::{r, random_spec, rng};
use probenv_core::atomize::{atomize, PolySystem};
use probenv_core::certificates::{
    parse_certificate, range_of, verify_certificate, write_certificate, Certificate,
    ChainCertificate, PruneNode,
};
use probenv_core::feasibility::{solve, SolverConfig, Verdict};
use probenv_core::numeric::{Polynomial, RatInterval, Rational, Space};
use probenv_core::requirements::parse_spec;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::RngExt;

struct Case {
    spec: String,
    sys: PolySystem,
    cert: Certificate,
}

fn linear_chain() -> Case {
    let spec = "events E1 E2 E3\nP(E2) = 0.7\nconstraint 0.6 * P(E2) + P(E3 & !E2) = 0.6\nP(E3 & !E2) = 0.95\n";
    Case {
        spec: spec.into(),
        sys: atomize(&parse_spec(spec).unwrap()),
        cert: Certificate::Chain(ChainCertificate {
            space: Space::X,
            steps: vec![(0, r(3, 5)), (1, r(-1, 1)), (2, r(1, 1))],
            a_first: r(9, 50),
            a_last: r(19, 20),
        }),
    }
}

/// Certificates the solver produced for random inadmissible specs, plus a
/// hand-written chain, which the solver never emits.
fn pool() -> &'static [Case] {
    static POOL: OnceLock<Vec<Case>> = OnceLock::new();
    POOL.get_or_init(|| {
        let cfg = SolverConfig {
            max_depth: 16,
            max_nodes: 600,
            ..SolverConfig::default()
        };
        let mut out = vec![linear_chain()];
        for seed in 0..1500u64 {
            let (spec, _) = random_spec(seed, 1 + (seed % 3) as usize, 4);
            let text = spec.text();
            let sol = solve(&parse_spec(&text).unwrap(), &cfg).unwrap();
            if let Verdict::Inadmissible(cert) = sol.verdict {
                out.push(Case {
                    spec: text,
                    sys: sol.system,
                    cert,
                });
            }
        }
        out
    })
}

fn delta(g: &mut StdRng) -> Rational {
    let q = g.random_range(1..=9);
    let p = g.random_range(1..=9) * if g.random_range(0..2) == 0 { 1 } else { -1 };
    r(p, q)
}

fn row_form(sys: &PolySystem, i: usize, space: Space) -> Option<Polynomial> {
    sys.form(i, space).ok().map(|p| p.into_owned())
}

fn nonzero_row(sys: &PolySystem, i: usize, space: Space) -> bool {
    row_form(sys, i, space).is_some_and(|p| !p.is_zero())
}

fn unit(p: &Polynomial) -> bool {
    p.constant_value()
        .is_some_and(|c| c == Rational::one() || c == -Rational::one())
}

/// Moves the lower end of `range` above the lower end of the coordinate's
/// true range, so it no longer contains it.
fn shrink(range: &RatInterval, actual: &RatInterval) -> Option<RatInterval> {
    if actual.is_point() {
        return None;
    }
    let lo = actual.lo() + &(&actual.width() / &Rational::from_int(3));
    RatInterval::new(lo, range.hi().clone()).ok()
}

fn nth_leaf<'a>(n: &'a mut PruneNode, k: &mut usize) -> Option<&'a mut RatInterval> {
    match n {
        PruneNode::Leaf { bound, .. } => {
            if *k == 0 {
                return Some(bound);
            }
            *k -= 1;
            None
        }
        PruneNode::Split { low, high, .. } => match nth_leaf(low, k) {
            Some(b) => Some(b),
            None => nth_leaf(high, k),
        },
    }
}

/// A change that can never leave a valid certificate, or `None` when the
/// chosen change might be harmless for this particular certificate.
fn mutate(cert: &Certificate, sys: &PolySystem, g: &mut StdRng) -> Option<(Certificate, String)> {
    let mut c = cert.clone();
    let d = delta(g);
    let what = match &mut c {
        Certificate::Farkas(f) => match g.random_range(0..4) {
            0 => {
                f.target = &f.target + &d;
                "target".to_string()
            }
            1 => {
                let k = g.random_range(0..f.coefficients.len());
                if !nonzero_row(sys, f.coefficients[k].0, f.space) {
                    return None;
                }
                f.coefficients[k].1 = &f.coefficients[k].1 + &d;
                format!("coefficient {k}")
            }
            2 => {
                let k = g.random_range(0..f.coefficients.len());
                let (row, coef) = f.coefficients.remove(k);
                if coef.is_zero() || !nonzero_row(sys, row, f.space) {
                    return None;
                }
                format!("drop term {k}")
            }
            _ => {
                let k = g.random_range(0..f.coefficients.len());
                let to = g.random_range(0..sys.len());
                let (from, coef) = f.coefficients[k].clone();
                if coef.is_zero() || row_form(sys, from, f.space) == row_form(sys, to, f.space) {
                    return None;
                }
                f.coefficients[k].0 = to;
                format!("row {from} -> {to}")
            }
        },
        Certificate::Chain(ch) => match g.random_range(0..3) {
            0 => {
                let k = g.random_range(0..ch.steps.len());
                if !nonzero_row(sys, ch.steps[k].0, ch.space) {
                    return None;
                }
                ch.steps[k].1 = &ch.steps[k].1 + &d;
                format!("step {k}")
            }
            1 => {
                ch.a_first = &ch.a_first + &d;
                "first endpoint".into()
            }
            _ => {
                ch.a_last = &ch.a_last + &d;
                "last endpoint".into()
            }
        },
        Certificate::Psatz(p) => match g.random_range(0..4) {
            0 => {
                if p.ideal.is_empty() {
                    return None;
                }
                let k = g.random_range(0..p.ideal.len());
                if !nonzero_row(sys, p.ideal[k].0, p.space) {
                    return None;
                }
                p.ideal[k].1 = p.ideal[k].1.add_constant(&d);
                format!("ideal multiplier {k}")
            }
            1 | 2 => {
                if p.monoid.is_empty() {
                    return None;
                }
                let k = g.random_range(0..p.monoid.len());
                // H changes by a factor g^2 or 1 / g^e, never 1 unless g is a
                // unit or H vanishes.
                let mut h = Polynomial::one(p.space);
                for (row, e) in &p.monoid {
                    h = h.mul(&row_form(sys, *row, p.space)?.pow(*e));
                }
                let f = row_form(sys, p.monoid[k].0, p.space)?;
                if h.is_zero()
                    || unit(&f)
                    || f.pow(p.monoid[k].1).constant_value() == Some(Rational::one())
                {
                    return None;
                }
                if g.random_range(0..2) == 0 {
                    p.monoid[k].1 += 2;
                    format!("monoid exponent {k}")
                } else {
                    p.monoid.remove(k);
                    format!("drop monoid {k}")
                }
            }
            _ => {
                if p.cone.is_empty() {
                    return None;
                }
                let k = g.random_range(0..p.cone.len());
                let term = &mut p.cone[k];
                if term.squares.is_empty() || term.squares.iter().any(|(_, q)| q.is_zero()) {
                    return None;
                }
                let mut prod = Polynomial::one(p.space);
                for row in &term.rows {
                    prod = prod.mul(&row_form(sys, *row, p.space)?);
                }
                if prod.is_zero() {
                    return None;
                }
                // Positive factor other than one.
                let s = g.random_range(2..=5);
                let j = g.random_range(0..term.squares.len());
                term.squares[j].0 = &term.squares[j].0 * &r(s, 1);
                format!("cone weight {k}")
            }
        },
        Certificate::Sturm(s) => match g.random_range(0..4) {
            0 => {
                if g.random_range(0..2) == 0 {
                    s.tallies.0 += 1;
                } else {
                    s.tallies.1 += 1;
                }
                "tallies".into()
            }
            1 => {
                s.residual.form = s.residual.form.add_constant(&d);
                "residual".into()
            }
            2 => {
                if s.exclusions.is_empty() {
                    return None;
                }
                let k = g.random_range(0..s.exclusions.len());
                s.exclusions[k].row.form = s.exclusions[k].row.form.add_constant(&d);
                format!("exclusion row {k}")
            }
            _ => {
                let actual = range_of(sys, &Polynomial::var(Space::M, s.var)).ok()?;
                s.range = shrink(&s.range, &actual)?;
                "range".into()
            }
        },
        Certificate::Prune(p) => match g.random_range(0..3) {
            0 => {
                let k = g.random_range(0..p.tree.leaves());
                let b = nth_leaf(&mut p.tree, &mut k.clone())?;
                *b = RatInterval::new(b.lo() - &d.abs(), b.hi().clone()).ok()?;
                format!("leaf bound {k}")
            }
            1 => {
                let k = g.random_range(0..p.vars.len());
                let actual = range_of(sys, &Polynomial::var(Space::M, p.vars[k])).ok()?;
                p.domain[k] = shrink(&p.domain[k], &actual)?;
                format!("domain {k}")
            }
            _ => {
                let k = g.random_range(0..p.rows.len());
                p.rows[k].form = p.rows[k].form.add_constant(&d);
                format!("pruning row {k}")
            }
        },
    };
    Some((c, what))
}

#[test]
fn pool_covers_every_kind() {
    let kinds: std::collections::BTreeSet<&str> = pool().iter().map(|c| c.cert.kind()).collect();
    assert_eq!(
        kinds.into_iter().collect::<Vec<_>>(),
        ["chain", "farkas", "prune", "psatz", "sturm"]
    );
}

#[test]
fn every_mutation_is_exercised() {
    let mut seen = std::collections::BTreeSet::new();
    for seed in 0..4000u64 {
        let case = &pool()[seed as usize % pool().len()];
        if let Some((bad, what)) = mutate(&case.cert, &case.sys, &mut rng(seed)) {
            assert!(!verify_certificate(&bad, &case.sys).ok);
            let label: String = what
                .chars()
                .filter(|c| !c.is_ascii_digit() && *c != '>')
                .collect();
            seen.insert(format!(
                "{} {}",
                case.cert.kind(),
                label.replace(" - ", "").trim()
            ));
        }
    }
    let want = [
        "chain first endpoint",
        "chain last endpoint",
        "chain step",
        "farkas coefficient",
        "farkas drop term",
        "farkas row",
        "farkas target",
        "prune domain",
        "prune leaf bound",
        "prune pruning row",
        "psatz cone weight",
        "psatz drop monoid",
        "psatz ideal multiplier",
        "psatz monoid exponent",
        "sturm exclusion row",
        "sturm range",
        "sturm residual",
        "sturm tallies",
    ];
    for w in want {
        assert!(seen.contains(w), "{w} never applied; saw {seen:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn originals_verify_and_round_trip(pick in any::<prop::sample::Index>()) {
        let case = pick.get(pool());
        let v = verify_certificate(&case.cert, &case.sys);
        prop_assert!(v.ok, "{}\n{}", case.spec, v.diagnostic);
        let text = write_certificate(&case.cert, &case.sys);
        let (back, hash) = parse_certificate(&text).unwrap();
        prop_assert_eq!(hash, case.sys.hash());
        prop_assert!(verify_certificate(&back, &case.sys).ok);
    }

    #[test]
    fn mutants_are_rejected(pick in any::<prop::sample::Index>(), seed in any::<u64>()) {
        let case = pick.get(pool());
        let mut g = rng(seed);
        let mut tries = 0;
        let (bad, what) = loop {
            if let Some(m) = mutate(&case.cert, &case.sys, &mut g) {
                break m;
            }
            tries += 1;
            prop_assume!(tries < 50);
        };
        let v = verify_certificate(&bad, &case.sys);
        prop_assert!(!v.ok, "{} mutant of {} accepted:\n{}", what, case.cert.kind(), case.spec);
        prop_assert!(!v.diagnostic.is_empty());
    }
}
