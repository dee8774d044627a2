use super::*;
use crate::atomize::atomize;
use crate::requirements::parse_spec;

fn r(p: i64, q: i64) -> Rational {
    Rational::frac(p, q)
}

fn system(text: &str) -> crate::atomize::PolySystem {
    atomize(&parse_spec(text).unwrap())
}

// The three linear rows behind the closing linear certificate: P(E2) = 0.7,
// P(E3 | !E2) = 0.6 written through x(E3 & !E2), and x(E3 & !E2) = 0.95.
const LINEAR_ROWS: &str = "\
events E1 E2 E3
P(E2) = 0.7
constraint 0.6 * P(E2) + P(E3 & !E2) = 0.6
P(E3 & !E2) = 0.95
";

fn linear_chain(k0: Rational) -> ChainCertificate {
    ChainCertificate {
        space: Space::X,
        steps: vec![(0, k0), (1, r(-1, 1)), (2, r(1, 1))],
        a_first: r(9, 50),
        a_last: r(19, 20),
    }
}

#[test]
fn linear_chain_verifies() {
    let sys = system(LINEAR_ROWS);
    let v = verify_certificate(&Certificate::Chain(linear_chain(r(3, 5))), &sys);
    assert!(v.ok, "{}", v.diagnostic);
    let f = chain_to_farkas(&linear_chain(r(3, 5))).unwrap();
    assert_eq!(f.target, r(-1, 1));
    assert_eq!(f.coefficients[0].1, r(60, 77));
    let v = verify_certificate(&Certificate::Farkas(f), &sys);
    assert!(v.ok, "{}", v.diagnostic);
    // Lifted to y space the same combination still holds.
    let mut fy = chain_to_farkas(&linear_chain(r(3, 5))).unwrap();
    fy.space = Space::Y;
    assert!(verify_certificate(&Certificate::Farkas(fy), &sys).ok);
}

#[test]
fn perturbed_chain_fails() {
    let sys = system(LINEAR_ROWS);
    let v = verify_certificate(&Certificate::Chain(linear_chain(r(78, 100))), &sys);
    assert!(!v.ok);
    assert!(v.diagnostic.contains("does not sum"), "{}", v.diagnostic);
}

#[test]
fn chain_to_farkas_cases() {
    let sys = system("events A\nP(A) = 1/2\nP(A) = 1/3\n");
    let c = ChainCertificate {
        space: Space::X,
        steps: vec![(0, r(1, 1)), (1, r(-1, 1))],
        a_first: r(1, 3),
        a_last: r(1, 2),
    };
    assert!(verify_certificate(&Certificate::Chain(c.clone()), &sys).ok);
    let f = chain_to_farkas(&c).unwrap();
    assert_eq!(f.coefficients, vec![(0, r(6, 1)), (1, r(-6, 1))]);
    assert_eq!(f.target, r(-1, 1));
    assert!(verify_certificate(&Certificate::Farkas(f), &sys).ok);
    let degenerate = ChainCertificate {
        a_last: r(1, 3),
        ..c
    };
    assert!(chain_to_farkas(&degenerate).is_err());
    assert!(!verify_certificate(&Certificate::Chain(degenerate), &sys).ok);
}

#[test]
fn farkas_sign_rules() {
    let sys = system("events A\nP(A) >= 1/2\nP(A) <= 1/3\n");
    let good = FarkasCertificate {
        space: Space::X,
        coefficients: vec![(0, r(1, 1)), (1, r(1, 1))],
        target: r(-1, 6),
    };
    assert!(verify_certificate(&Certificate::Farkas(good.clone()), &sys).ok);
    assert_eq!(normalize_farkas(&good).coefficients[0].1, r(6, 1));
    let bad = FarkasCertificate {
        coefficients: vec![(0, r(-1, 1)), (1, r(-1, 1))],
        target: r(1, 6),
        ..good
    };
    let v = verify_certificate(&Certificate::Farkas(bad), &sys);
    assert!(
        !v.ok && v.diagnostic.contains("negative"),
        "{}",
        v.diagnostic
    );
}

#[test]
fn strict_zero_target() {
    // x > 0 together with x <= 0.
    let sys = system("events A\nP(A) > 0\nP(A) <= 0\n");
    let f = FarkasCertificate {
        space: Space::X,
        coefficients: vec![(0, r(1, 1)), (1, r(1, 1))],
        target: r(0, 1),
    };
    assert!(verify_certificate(&Certificate::Farkas(f.clone()), &sys).ok);
    let only_weak = FarkasCertificate {
        coefficients: vec![(1, r(0, 1))],
        ..f
    };
    assert!(!verify_certificate(&Certificate::Farkas(only_weak), &sys).ok);
}

const TWO_EVENTS: &str = "\
events A1 A2
independent A1, A2
P(A1 given A2) = 1/2
constraint P(A1) != 1/2
";

fn y(a: u32) -> Polynomial {
    Polynomial::var(Space::Y, a)
}

// t1, t2 and the monoid part exactly as displayed for the two-event example.
fn two_event_psatz() -> PsatzCertificate {
    let h_a2 = y(0b11).add(&y(0b10));
    let h_a1 = y(0b11).add(&y(0b01)).add_constant(&r(-1, 2));
    let t = h_a2.mul(&h_a1);
    PsatzCertificate {
        space: Space::Y,
        ideal: vec![(0, t.clone()), (1, t.neg())],
        cone: vec![],
        monoid: vec![(2, 2), (3, 2)],
    }
}

#[test]
fn two_event_psatz_verifies() {
    let sys = system(TWO_EVENTS);
    assert_eq!(sys.len(), 9);
    let cert = Certificate::Psatz(two_event_psatz());
    let v = verify_certificate(&cert, &sys);
    assert!(v.ok, "{}", v.diagnostic);
    // Dropping a monoid factor breaks the identity.
    let mut p = two_event_psatz();
    p.monoid.pop();
    assert!(!verify_certificate(&Certificate::Psatz(p), &sys).ok);
    // Odd powers of a != row are not allowed.
    let mut p = two_event_psatz();
    p.monoid[0].1 = 1;
    let v = verify_certificate(&Certificate::Psatz(p), &sys);
    assert!(!v.ok);
}

#[test]
fn text_round_trip() {
    let sys = system(TWO_EVENTS);
    let cert = Certificate::Psatz(two_event_psatz());
    let text = write_certificate(&cert, &sys);
    assert!(text.starts_with("probenv certificate psatz\n"));
    let (back, hash) = parse_certificate(&text).unwrap();
    assert_eq!(back, cert);
    assert_eq!(hash, sys.hash());

    let lin = system(LINEAR_ROWS);
    for c in [
        Certificate::Chain(linear_chain(r(3, 5))),
        Certificate::Farkas(chain_to_farkas(&linear_chain(r(3, 5))).unwrap()),
    ] {
        let text = write_certificate(&c, &lin);
        assert_eq!(parse_certificate(&text).unwrap().0, c);
    }
}

#[test]
fn prune_round_trip() {
    let sys = system("events A\nP(A) = 1/2\n");
    let form = Polynomial::var(Space::M, 1).add_constant(&r(-1, 2));
    let cert = Certificate::Prune(PruneCertificate {
        vars: vec![1],
        domain: vec![RatInterval::unit()],
        rows: vec![Congruence {
            base: Some(0),
            form,
            multipliers: vec![],
        }],
        tree: PruneNode::Split {
            var: 0,
            at: r(1, 2),
            low: Box::new(PruneNode::Leaf {
                row: 0,
                bound: RatInterval::new(r(-1, 2), r(0, 1)).unwrap(),
            }),
            high: Box::new(PruneNode::Leaf {
                row: 0,
                bound: RatInterval::new(r(0, 1), r(1, 2)).unwrap(),
            }),
        },
    });
    let text = write_certificate(&cert, &sys);
    assert_eq!(parse_certificate(&text).unwrap().0, cert);
    // The system is feasible at m_1 = 1/2, so the tree cannot verify.
    assert!(!verify_certificate(&cert, &sys).ok);
}

#[test]
fn parse_rejects_garbage() {
    assert!(parse_certificate("").is_err());
    assert!(parse_certificate("probenv certificate farkas\nsystem abc\nspace q\nend\n").is_err());
    assert!(parse_certificate(
        "probenv certificate farkas\nsystem abc\nspace y\ntarget -1\nrow x 1\nend\n"
    )
    .is_err());
}
