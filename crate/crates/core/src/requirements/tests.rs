use super::*;
use crate::error::Error;
use crate::events::BoolExpr;

fn r(p: i64, q: i64) -> Rational {
    Rational::frac(p, q)
}

const APPENDIX_A: &str = "\
events E1 E2 E3
P(E1) = 0.8
P(E2) = 0.7
P(E3) = 0.95
P(E3 given !E2) = 0.6
indep_algebras [E3] [E1 E2]
";

#[test]
fn appendix_a_counts() {
    let rs = parse_spec(APPENDIX_A).unwrap();
    assert_eq!(rs.n(), 3);
    let eq = rs
        .constraints
        .iter()
        .filter(|c| c.rel == Relation::EqZero)
        .count();
    let neq = rs
        .constraints
        .iter()
        .filter(|c| c.rel == Relation::NeqZero)
        .count();
    assert_eq!((eq, neq), (8, 1));
    assert!(rs.warnings.is_empty());
}

#[test]
fn single_probability() {
    let rs = parse_spec("events A\nP(A) = 1/2\n").unwrap();
    assert_eq!(rs.constraints.len(), 1);
    assert_eq!(rs.constraints[0].poly.to_string(), "x0 - 1/2");
}

#[test]
fn bare_bar_is_rejected() {
    let err = parse_spec("events A B\nP(A | B) = 0.5\n").unwrap_err();
    match err {
        Error::Syntax {
            line,
            column,
            message,
        } => {
            assert_eq!((line, column), (2, 5));
            assert!(message.contains("given"));
        }
        e => panic!("unexpected {e:?}"),
    }
    // The explicit forms parse.
    parse_spec("events A B\nP((A | B)) = 0.5\nP(A given B) = 0.5\n").unwrap();
}

#[test]
fn probability_rows() {
    let mut reg = TermRegistry::new(2);
    let a = BoolExpr::event(0);
    let (p, rel) = desugar_probability(&mut reg, &a, RelOp::Eq, &r(4, 5));
    assert_eq!(
        (p.to_string().as_str(), rel),
        ("x0 - 4/5", Relation::EqZero)
    );
    let (p, rel) = desugar_probability(&mut reg, &a, RelOp::Eq, &r(0, 1));
    assert_eq!((p.to_string().as_str(), rel), ("x0", Relation::EqZero));
    let ab = BoolExpr::or(a, BoolExpr::event(1));
    let (p, rel) = desugar_probability(&mut reg, &ab, RelOp::Le, &r(3, 4));
    assert_eq!(
        (p.to_string().as_str(), rel),
        ("-x1 + 3/4", Relation::GeqZero)
    );
}

#[test]
fn independence_rows() {
    let mut reg = TermRegistry::new(3);
    let ev: Vec<BoolExpr> = (0..3).map(BoolExpr::event).collect();
    let rows = desugar_independence(&mut reg, &ev[..2], true);
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].0.to_string(), "-x0*x1 + x2");
    assert_eq!(desugar_independence(&mut reg, &ev, true).len(), 4);
    assert_eq!(desugar_independence(&mut reg, &ev, false).len(), 3);
    let mut reg5 = TermRegistry::new(5);
    let ev5: Vec<BoolExpr> = (0..5).map(BoolExpr::event).collect();
    assert_eq!(desugar_independence(&mut reg5, &ev5, true).len(), 26);
}

#[test]
fn conditional_rows() {
    let mut reg = TermRegistry::new(3);
    let rows = desugar_conditional(
        &mut reg,
        &BoolExpr::event(2),
        &BoolExpr::not(BoolExpr::event(1)),
        &r(3, 5),
    );
    assert_eq!(rows[0].1, Relation::EqZero);
    assert_eq!(rows[0].0.to_string(), "x0 - 3/5*x1");
    assert_eq!(rows[1], (Polynomial::var(Space::X, 1), Relation::NeqZero));
    // P(A given A) = 1 collapses to a trivial row plus x(A) != 0.
    let rs = parse_spec("events A\nP(A given A) = 1\n").unwrap();
    assert_eq!(rs.constraints.len(), 1);
    assert_eq!(rs.constraints[0].rel, Relation::NeqZero);
    assert_eq!(rs.warnings.len(), 1);
}

#[test]
fn conditional_independence_is_symmetric() {
    let a = BoolExpr::event(0);
    let b = BoolExpr::event(1);
    let c = BoolExpr::event(2);
    let mut r1 = TermRegistry::new(3);
    let mut r2 = TermRegistry::new(3);
    let x = desugar_conditional_independence(&mut r1, &a, &b, &c);
    let y = desugar_conditional_independence(&mut r2, &b, &a, &c);
    // Compare after renaming both registries to atom sets.
    type Canon = Vec<(Vec<(Vec<u32>, u32)>, Rational)>;
    let canon = |reg: &TermRegistry, p: &Polynomial| {
        let mut ts: Canon = p
            .terms()
            .iter()
            .map(|(m, k)| {
                let mut f: Vec<(Vec<u32>, u32)> = m
                    .pairs()
                    .iter()
                    .map(|&(v, e)| (reg.atoms(v).iter().collect(), e))
                    .collect();
                f.sort();
                (f, k.clone())
            })
            .collect();
        ts.sort();
        ts
    };
    assert_eq!(canon(&r1, &x[0].0), canon(&r2, &y[0].0));
}

#[test]
fn algebra_independence_rows() {
    let mut reg = TermRegistry::new(3);
    let rows = desugar_algebra_independence(&mut reg, &[2], &[0, 1]);
    assert_eq!(rows.len(), 4);
    // First row: x(E1 & E2 & E3) - x(E1 & E2) x(E3).
    let (p, _) = &rows[0];
    let lin: Vec<_> = p.terms().iter().filter(|t| t.0.degree() == 1).collect();
    assert_eq!(lin.len(), 1);
    assert_eq!(
        reg.atoms(lin[0].0.pairs()[0].0).iter().collect::<Vec<_>>(),
        vec![0b111]
    );
    let mut reg2 = TermRegistry::new(2);
    assert_eq!(desugar_algebra_independence(&mut reg2, &[0], &[1]).len(), 2);
}

#[test]
fn registry_is_canonical() {
    let mut reg = TermRegistry::new(2);
    let a = reg.var(&BoolExpr::event(0));
    let same = BoolExpr::or(
        BoolExpr::and(BoolExpr::event(0), BoolExpr::event(1)),
        BoolExpr::and(BoolExpr::event(0), BoolExpr::not(BoolExpr::event(1))),
    );
    assert_eq!(reg.var(&same), a);
    assert_eq!(reg.len(), 1);
}

#[test]
fn out_of_range_constant_warns() {
    let rs = parse_spec("events A\nP(A) = 1.5\n").unwrap();
    assert_eq!(rs.constraints.len(), 1);
    assert_eq!(rs.warnings.len(), 1);
}

#[test]
fn parse_errors() {
    assert_eq!(
        parse_spec("events A\nP(B) = 1\n").unwrap_err(),
        Error::UndeclaredEvent("B".into())
    );
    assert_eq!(
        parse_spec("events A A\n").unwrap_err(),
        Error::DuplicateEvent("A".into())
    );
    assert!(matches!(
        parse_spec("events A\nP(A) = \n"),
        Err(Error::Syntax { line: 2, .. })
    ));
    assert!(matches!(
        parse_spec("events A\nfoo A\n"),
        Err(Error::Syntax {
            line: 2,
            column: 1,
            ..
        })
    ));
    assert!(matches!(
        parse_spec("# nothing\n"),
        Err(Error::Syntax { .. })
    ));
    assert!(matches!(
        parse_spec("events A\nP(A) = $a\n"),
        Err(Error::Syntax { .. })
    ));
    let names: Vec<String> = (0..25).map(|i| format!("E{i}")).collect();
    assert!(matches!(
        parse_spec(&format!("events {}\n", names.join(" "))),
        Err(Error::TooManyEvents(25, 24))
    ));
}

#[test]
fn params_substitute() {
    let t = substitute_params(
        "events A\nP(A) = $a # $ignored\n",
        &[("a".into(), "0.5".into())],
    )
    .unwrap();
    let rs = parse_spec(&t).unwrap();
    assert_eq!(rs.constraints[0].poly.constant_term(), r(-1, 2));
    assert!(substitute_params("P(A) = $b\n", &[]).is_err());
}

#[test]
fn print_round_trip() {
    let text = "\
events A B C
P((A | B)) <= 3/4
P(!(A & B) given C) = 1/3
independent A, B | C, !C
pairwise_independent A, B
cond_independent A, B given C
indep_algebras [A] [B C]
constraint P(A) * (P(B) - -1/2) - -(P(C))^2 + (-2/3)^3 != P(A & (B | C)) * -(3)
constraint P(A)^2 >= 0.25
";
    let rs = parse_spec(text).unwrap();
    let printed = print_spec(&rs);
    let rs2 = parse_spec(&printed).unwrap();
    let sts = |r: &RequirementSet| r.statements.iter().map(|s| s.0.clone()).collect::<Vec<_>>();
    assert_eq!(sts(&rs), sts(&rs2));
    assert_eq!(print_spec(&rs2), printed);
    let polys = |r: &RequirementSet| {
        r.constraints
            .iter()
            .map(|c| (c.poly.clone(), c.rel))
            .collect::<Vec<_>>()
    };
    assert_eq!(polys(&rs), polys(&rs2));
}
