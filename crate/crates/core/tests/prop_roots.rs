mod common;

use common::r;
use probenv_core::numeric::{
    count_roots, count_roots_closed, isolate_roots, sturm_sequence, RatInterval, Rational, UPoly,
};
use proptest::prelude::*;

/// Distinct rational roots in [-2, 2] with multiplicities, and an optional
/// positive quadratic factor with no real roots; degree at most 8.
fn constructed() -> impl Strategy<Value = (Vec<(Rational, u32)>, Option<Rational>)> {
    let root = (-16i64..=16, 1i64..=8).prop_map(|(p, q)| r(p, q));
    let roots = prop::collection::vec((root, 1u32..=3), 1..=6);
    (
        roots,
        prop::option::of((1i64..=9, 1i64..=9).prop_map(|(p, q)| r(p, q))),
    )
        .prop_filter_map("degree", |(rs, quad)| {
            let mut distinct: Vec<(Rational, u32)> = Vec::new();
            for (x, k) in rs {
                match distinct.iter_mut().find(|(y, _)| *y == x) {
                    Some(e) => e.1 += k,
                    None => distinct.push((x, k)),
                }
            }
            let deg: u32 =
                distinct.iter().map(|e| e.1).sum::<u32>() + if quad.is_some() { 2 } else { 0 };
            (deg <= 8).then_some((distinct, quad))
        })
}

fn build(roots: &[(Rational, u32)], quad: &Option<Rational>, scale: &Rational) -> UPoly {
    let mut p = UPoly::constant(scale.clone());
    for (x, k) in roots {
        p = p.mul(&UPoly::from_roots(std::slice::from_ref(x)).pow(*k));
    }
    if let Some(c) = quad {
        p = p.mul(&UPoly::new(vec![
            c.clone(),
            Rational::zero(),
            Rational::one(),
        ]));
    }
    p
}

fn endpoint() -> impl Strategy<Value = Rational> {
    (-24i64..=24, 1i64..=8).prop_map(|(p, q)| r(p, q))
}

/// Sign changes of `p` between consecutive fractions with denominator at
/// most 8 in `[lo, hi]`. Roots and endpoints are such fractions, so no sample
/// is a root and each gap holds at most one; this counts odd-multiplicity
/// roots strictly inside.
fn sign_changes(p: &UPoly, lo: &Rational, hi: &Rational) -> usize {
    let mut pts: Vec<Rational> = Vec::new();
    for q in 1..=8i64 {
        let from = (lo * &Rational::from_int(q)).ceil();
        let to = (hi * &Rational::from_int(q)).floor();
        let mut k = Rational::from_bigint(from);
        let to = Rational::from_bigint(to);
        while k <= to {
            pts.push(&k / &Rational::from_int(q));
            k = &k + &Rational::one();
        }
    }
    pts.sort();
    pts.dedup();
    let two = Rational::from_int(2);
    let signs: Vec<_> = pts
        .windows(2)
        .map(|w| p.sign_at(&(&(&w[0] + &w[1]) / &two)))
        .collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1500))]

    #[test]
    fn counts_match_constructed_roots(
        (roots, quad) in constructed(),
        a in endpoint(),
        b in endpoint(),
        s in (1i64..=7, 1i64..=5, any::<bool>()).prop_map(|(p, q, neg)| r(if neg { -p } else { p }, q)),
    ) {
        prop_assume!(a != b);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let p = build(&roots, &quad, &s);
        let iv = RatInterval::new(lo.clone(), hi.clone()).unwrap();
        let half_open = roots.iter().filter(|(x, _)| x > &lo && x <= &hi).count();
        let closed = roots.iter().filter(|(x, _)| x >= &lo && x <= &hi).count();
        prop_assert_eq!(count_roots(&p, &iv).unwrap(), half_open);
        prop_assert_eq!(count_roots_closed(&p, &iv).unwrap(), closed);

        // Independent check: sign changes on a fine grid see every odd-multiplicity root.
        let odd_inside = roots.iter().filter(|(x, k)| x > &lo && x < &hi && k % 2 == 1).count();
        prop_assert_eq!(sign_changes(&p, &lo, &hi), odd_inside);

        let tol = r(1, 1 << 10);
        let cells = isolate_roots(&p, &iv, &tol).unwrap();
        prop_assert_eq!(cells.len(), closed);
        for (k, c) in cells.iter().enumerate() {
            prop_assert!(c.width() <= tol);
            prop_assert_eq!(roots.iter().filter(|(x, _)| c.contains(x)).count(), 1, "cell {}", c);
            for d in &cells[..k] {
                prop_assert!(d.intersect(c).is_none());
            }
        }
    }

    #[test]
    fn chain_ends_in_a_constant((roots, quad) in constructed()) {
        let p = build(&roots, &quad, &Rational::one());
        let q = p.square_free().unwrap();
        prop_assert_eq!(q.degree(), roots.len() + if quad.is_some() { 2 } else { 0 });
        let seq = sturm_sequence(&q).unwrap();
        prop_assert!(seq.last().unwrap().degree() == 0);
        for w in seq.windows(2) {
            prop_assert!(w[1].degree() < w[0].degree());
        }
    }
}
