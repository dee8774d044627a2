mod common;

use common::{grid, random_point, random_spec, rng, Spec};
use probenv_core::atomize::{atomize, moments_of, verify_witness, Witness};
use probenv_core::certificates::verify_certificate;
use probenv_core::feasibility::{eliminate, solve, SolverConfig, Strategy, Verdict};
use probenv_core::numeric::{Rational, Space};
use probenv_core::requirements::parse_spec;
use proptest::prelude::*;
use rand::RngExt;

fn config(strategy: Strategy) -> SolverConfig {
    SolverConfig {
        strategy,
        max_depth: 16,
        max_nodes: 600,
        ..SolverConfig::default()
    }
}

/// Points the oracle checks an inadmissible verdict against.
fn probes(spec: &Spec) -> Vec<Vec<Rational>> {
    match spec.n {
        1 => grid(1, 12),
        2 => grid(2, 6),
        _ => grid(3, 3),
    }
}

fn decided(v: &Verdict) -> Option<&'static str> {
    match v {
        Verdict::Unknown(_) => None,
        v => Some(v.kind()),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn verdicts_are_sound(seed in any::<u64>(), n in 1usize..=3) {
        let (spec, planted) = random_spec(seed, n, 4);
        let rs = parse_spec(&spec.text()).unwrap();
        let sol = solve(&rs, &config(Strategy::Auto)).unwrap();
        match &sol.verdict {
            Verdict::Inadmissible(c) => {
                let v = verify_certificate(c, &sol.system);
                prop_assert!(v.ok, "{}\n{}", spec.text(), v.diagnostic);
                prop_assert!(planted.is_none(), "planted point refuted:\n{}", spec.text());
                for y in probes(&spec) {
                    prop_assert!(!spec.sat(&y), "{}\nholds at {:?}", spec.text(), y);
                }
            }
            Verdict::Admissible(w) => {
                prop_assert!(verify_witness(w, &rs).unwrap().ok());
                if let Witness::Exact(y) = w {
                    prop_assert!(spec.sat(y), "{}\nwitness {:?}", spec.text(), y);
                }
            }
            Verdict::Unknown(_) => {}
        }
    }

    #[test]
    fn strategies_agree(seed in any::<u64>(), n in 1usize..=3) {
        let (spec, _) = random_spec(seed, n, 3);
        let rs = parse_spec(&spec.text()).unwrap();
        let mut seen: Option<(&str, Strategy)> = None;
        for s in [Strategy::Auto, Strategy::Lp, Strategy::Sturm, Strategy::Interval] {
            let Ok(sol) = solve(&rs, &config(s)) else { continue };
            let Some(k) = decided(&sol.verdict) else { continue };
            match seen {
                Some((k0, s0)) => prop_assert_eq!(k0, k, "{:?} vs {:?}\n{}", s0, s, spec.text()),
                None => seen = Some((k, s)),
            }
        }
    }

    // Solving for pivots loses nothing: at a lifted point the original rows
    // take the values of their reduced forms, and every pivot row vanishes.
    #[test]
    fn elimination_preserves_rows(seed in any::<u64>(), n in 1usize..=3) {
        let (spec, planted) = random_spec(seed, n, 4);
        let sys = atomize(&parse_spec(&spec.text()).unwrap());
        let elim = eliminate(&sys).unwrap();
        let free: Vec<u32> = (0..sys.atom_count() as u32).filter(|&v| !elim.is_pivot(v)).collect();
        let mut g = rng(seed ^ 0x51ed);
        let mut points: Vec<Vec<(u32, Rational)>> = (0..3)
            .map(|_| free.iter().map(|&v| (v, Rational::frac(g.random_range(-6..=6), g.random_range(1..=6)))).collect())
            .collect();
        if let Some(y) = &planted {
            let m = moments_of(y);
            points.push(free.iter().map(|&v| (v, m[v as usize].clone())).collect());
            // The planted point is recovered from its free coordinates.
            let lift = elim.point(points.last().unwrap()).unwrap();
            prop_assert_eq!(&lift, &m);
        } else {
            let y = random_point(&mut g, n, 6);
            let m = moments_of(&y);
            points.push(free.iter().map(|&v| (v, m[v as usize].clone())).collect());
        }
        for pt in &points {
            let m = elim.point(pt).unwrap();
            let original = |i: usize| sys.form(i, Space::M).unwrap().eval_slice(&m).unwrap();
            for p in elim.pivots() {
                prop_assert!(original(p.row()).is_zero(), "pivot row {}", p.row());
            }
            for r in elim.reduced_rows() {
                prop_assert_eq!(r.form.eval_slice(&m).unwrap(), original(r.row), "row {}", r.row);
            }
            // So the system holds at the lift exactly when the reduced rows do.
            let all = (0..sys.len()).all(|i| sys.rel(i).holds(&original(i)));
            let reduced = elim.reduced_rows().iter().all(|r| sys.rel(r.row).holds(&r.form.eval_slice(&m).unwrap()));
            prop_assert_eq!(all, reduced);
        }
    }
}
