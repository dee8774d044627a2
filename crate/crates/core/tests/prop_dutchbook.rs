mod common;

use std::collections::BTreeSet;
use std::sync::OnceLock;

use common::{r, random_spec, rng};
use probenv_core::atomize::PolySystem;
use probenv_core::certificates::Certificate;
use probenv_core::dutchbook::{
    believed_ledger, book_kind, compile_book, realized_values, realized_values_with, BookKind,
    CopyIndicator, Enumeration, Factor, Game, GameTerm, Mode, Role, Source,
};
use probenv_core::events::AtomSet;
use probenv_core::feasibility::{solve, SolverConfig, Verdict};
use probenv_core::numeric::Rational;
use probenv_core::requirements::parse_spec;
use probenv_core::Error;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::RngExt;

/// Payoff of `g` when copy `j` lands on atom `w[j - 1]`, straight from the
/// terms as written.
fn payoff(g: &Game, w: &[u32]) -> Rational {
    let mut total = Rational::zero();
    for t in &g.terms {
        let mut v = t.coef.clone();
        for f in &t.factors {
            let mut s = Rational::zero();
            for (c, m) in &f.terms {
                if m.iter().all(|i| i.atoms.contains(w[i.copy as usize - 1])) {
                    s = &s + c;
                }
            }
            v = &v * &s;
        }
        total = &total + &v;
    }
    total
}

/// Every payoff over all joint outcomes, or `None` when there are too many.
fn brute_force(g: &Game, limit: u64) -> Option<BTreeSet<Rational>> {
    let atoms = 1u64 << g.n();
    let copies = g.copies_used;
    let count = atoms.checked_pow(copies).filter(|c| *c <= limit)?;
    let mut out = BTreeSet::new();
    for o in 0..count {
        let w: Vec<u32> = (0..copies)
            .map(|j| ((o / atoms.pow(j)) % atoms) as u32)
            .collect();
        out.insert(payoff(g, &w));
    }
    Some(out)
}

fn random_set(g: &mut StdRng, n: usize) -> AtomSet {
    loop {
        let s = AtomSet::from_atoms(n, (0..1u32 << n).filter(|_| g.random_range(0..2) == 0));
        if !s.is_empty() {
            return s;
        }
    }
}

/// Terms whose factors sit on disjoint copies, as a game requires.
fn random_game(g: &mut StdRng, n: usize) -> Game {
    let copies = g.random_range(1..=3u32);
    let terms = (0..g.random_range(1..=4))
        .map(|_| {
            let mut pool: Vec<u32> = (1..=copies).collect();
            let mut factors = Vec::new();
            while !pool.is_empty() && factors.len() < 2 {
                let take = g.random_range(1..=pool.len());
                let mine: Vec<u32> = pool.drain(..take).collect();
                let terms = (0..g.random_range(1..=2))
                    .map(|_| {
                        let mut m = Vec::new();
                        for &copy in &mine {
                            if g.random_range(0..3) != 0 {
                                m.push(CopyIndicator {
                                    atoms: random_set(g, n),
                                    copy,
                                });
                            }
                        }
                        (r(g.random_range(-4..=4), g.random_range(1..=3)), m)
                    })
                    .collect();
                factors.push(Factor {
                    terms,
                    source: Source::Transcribed,
                });
            }
            GameTerm {
                role: Role::Ideal,
                coef: r(g.random_range(-3..=3), g.random_range(1..=2)),
                factors,
            }
        })
        .collect();
    Game::new(
        (0..n).map(|i| format!("E{}", i + 1)).collect(),
        Mode::Greedy,
        terms,
    )
}

/// Repeats one indicator inside its own product.
fn duplicate_one(game: &Game, g: &mut StdRng) -> Option<Game> {
    let mut out = game.clone();
    let mut slots = Vec::new();
    for (a, t) in out.terms.iter().enumerate() {
        for (b, f) in t.factors.iter().enumerate() {
            for (c, (_, m)) in f.terms.iter().enumerate() {
                for d in 0..m.len() {
                    slots.push((a, b, c, d));
                }
            }
        }
    }
    if slots.is_empty() {
        return None;
    }
    let (a, b, c, d) = slots[g.random_range(0..slots.len())];
    let m = &mut out.terms[a].factors[b].terms[c].1;
    let copy = m[d].clone();
    m.insert(g.random_range(0..=m.len()), copy);
    Some(out)
}

struct Case {
    spec: String,
    sys: PolySystem,
    cert: Certificate,
}

fn pool() -> &'static [Case] {
    static POOL: OnceLock<Vec<Case>> = OnceLock::new();
    POOL.get_or_init(|| {
        let cfg = SolverConfig {
            max_depth: 16,
            max_nodes: 600,
            ..SolverConfig::default()
        };
        let mut out = Vec::new();
        for seed in 0..600u64 {
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

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn realized_values_match_direct_evaluation(seed in any::<u64>(), n in 1usize..=2) {
        let mut g = rng(seed);
        let game = random_game(&mut g, n);
        let real = realized_values(&game).unwrap();
        prop_assert!(real.exhaustive);
        prop_assert_eq!(Some(real.values.clone()), brute_force(&game, 1 << 12));
        // I * I = I on a single copy.
        if let Some(dup) = duplicate_one(&game, &mut g) {
            prop_assert_eq!(&realized_values(&dup).unwrap(), &real);
            prop_assert_eq!(brute_force(&dup, 1 << 12), Some(real.values.clone()));
        }
    }

    #[test]
    fn enumeration_ignores_thread_count(seed in any::<u64>(), n in 1usize..=2, jobs in 2usize..=5) {
        let game = random_game(&mut rng(seed), n);
        let one = realized_values_with(&game, &Enumeration { cap: 1 << 24, jobs: 1 }).unwrap();
        let many = realized_values_with(&game, &Enumeration { cap: 1 << 24, jobs }).unwrap();
        prop_assert_eq!(&one, &many);
        if seed % 16 == 0 {
            // Sampled runs are reproducible too.
            let a = realized_values_with(&game, &Enumeration { cap: 0, jobs: 1 }).unwrap();
            let b = realized_values_with(&game, &Enumeration { cap: 0, jobs }).unwrap();
            prop_assert!(!a.exhaustive);
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn compiled_books_hold_up(pick in any::<prop::sample::Index>(), symmetrized in any::<bool>()) {
        let case = pick.get(pool());
        let mode = if symmetrized { Mode::Symmetrized } else { Mode::Greedy };
        match compile_book(&case.cert, &case.sys, mode) {
            Ok(book) => {
                prop_assert!(book.game.copies_used <= book.game.nu(), "{}", case.spec);
                let c = book.realized.constant().cloned();
                prop_assert!(c.is_some());
                let c = c.unwrap();
                prop_assert!(!c.is_positive());
                let ledger = believed_ledger(&book.game);
                prop_assert_eq!(Some(book.kind), book_kind(&book.realized, &ledger));
                prop_assert_eq!(book.kind == BookKind::Strong, c.is_negative());
                if let Some(direct) = brute_force(&book.game, 1 << 9) {
                    prop_assert_eq!(direct, book.realized.values.clone());
                }
            }
            Err(e) => {
                // Linear certificates always give a book.
                prop_assert!(!matches!(case.cert, Certificate::Farkas(_) | Certificate::Chain(_)), "{}: {}", case.spec, e);
                if matches!(case.cert, Certificate::Sturm(_) | Certificate::Prune(_)) {
                    prop_assert!(matches!(e, Error::Unsupported(_)));
                }
            }
        }
    }
}
