//! Deciding whether an atomized system has a solution.
//!
//! Linear systems go to an exact simplex over atom probabilities. Everything
//! else is first reduced by eliminating equations in moment coordinates;
//! what remains is settled as a linear problem, by Sturm chains in one
//! variable, or by interval branch-and-prune, which may give up. Every
//! answer is checked by the independent witness or certificate checker
//! before it is returned.

mod bnp;
mod elim;
mod lift;
mod linear;
mod lp;
mod univariate;


use std::fmt;
use std::str::FromStr;

use crate::atomize::{atomize, atoms_from_moments, verify_witness, PolySystem, Witness};
use crate::certificates::{
    normalize_farkas, resolve_var, verify_certificate, Certificate, FarkasCertificate,
};
use crate::error::{Error, Result};
use crate::numeric::{
    parse_poly, upoly::default_tolerance, Polynomial, RatInterval, Rational, Space, Var,
};
use crate::requirements::{parse_spec, Relation, RequirementSet};

pub use elim::{eliminate, express_in_atom, Elimination, Pivot, ReducedRow};

use bnp::Search;
use linear::{LinOutcome, LinProblem, LinRow};
use univariate::Univariate;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Strategy {
    #[default]
    Auto,
    Lp,
    Sturm,
    Interval,
}

impl Strategy {
    pub fn name(self) -> &'static str {
        match self {
            Strategy::Auto => "auto",
            Strategy::Lp => "lp",
            Strategy::Sturm => "sturm",
            Strategy::Interval => "interval",
        }
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(Strategy::Auto),
            "lp" => Ok(Strategy::Lp),
            "sturm" => Ok(Strategy::Sturm),
            "interval" => Ok(Strategy::Interval),
            _ => Err(Error::Invalid(format!(
                "unknown strategy `{s}` (auto, lp, sturm, interval)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolverConfig {
    pub strategy: Strategy,
    pub max_depth: u32,
    pub max_nodes: u64,
    /// Width of isolating intervals for irrational roots.
    pub root_tolerance: Rational,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            strategy: Strategy::Auto,
            max_depth: 40,
            max_nodes: 1_000_000,
            root_tolerance: default_tolerance(),
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_depth == 0 || self.max_nodes == 0 || !self.root_tolerance.is_positive() {
            return Err(Error::Invalid("solver limits must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StrategyClass {
    Linear,
    UnivariateReducible,
    GeneralPolynomial,
}

impl fmt::Display for StrategyClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StrategyClass::Linear => "linear",
            StrategyClass::UnivariateReducible => "univariate-reducible",
            StrategyClass::GeneralPolynomial => "general-polynomial",
        })
    }
}

/// Why no decision was reached, and where.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Undecided {
    pub reason: String,
    /// Smallest box left open, over moment coordinates.
    pub region: Vec<(Var, RatInterval)>,
    /// The first row not known to hold on that box.
    pub row: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Admissible(Witness),
    Inadmissible(Certificate),
    Unknown(Undecided),
}

impl Verdict {
    pub fn kind(&self) -> &'static str {
        match self {
            Verdict::Admissible(_) => "admissible",
            Verdict::Inadmissible(_) => "inadmissible",
            Verdict::Unknown(_) => "unknown",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace {
    pub class: StrategyClass,
    /// The stage that produced the verdict.
    pub strategy: String,
    pub steps: Vec<String>,
    pub eliminations: Vec<String>,
    pub nodes: u64,
}

#[derive(Clone, Debug)]
pub struct Solution {
    pub system: PolySystem,
    pub verdict: Verdict,
    pub trace: Trace,
}

fn is_linear(sys: &PolySystem) -> bool {
    (0..sys.constraint_count()).all(|i| sys.x_poly(i).is_some_and(|p| p.total_degree() <= 1))
}

fn post_elimination_class(elim: &Elimination) -> StrategyClass {
    if elim.free_vars().len() <= 1 {
        StrategyClass::UnivariateReducible
    } else {
        StrategyClass::GeneralPolynomial
    }
}

/// Linear when every constraint is affine in the probability terms;
/// otherwise decided by how many moment coordinates survive elimination.
pub fn classify(sys: &PolySystem) -> Result<StrategyClass> {
    if is_linear(sys) {
        return Ok(StrategyClass::Linear);
    }
    Ok(post_elimination_class(&eliminate(sys)?))
}

/// Parses, atomizes and decides `rs`.
pub fn solve(rs: &RequirementSet, cfg: &SolverConfig) -> Result<Solution> {
    solve_system(atomize(rs), rs, cfg)
}

pub fn solve_system(sys: PolySystem, rs: &RequirementSet, cfg: &SolverConfig) -> Result<Solution> {
    cfg.validate()?;
    let mut run = Run {
        sys: &sys,
        cfg,
        steps: Vec::new(),
        eliminations: Vec::new(),
        nodes: 0,
        class: StrategyClass::Linear,
    };
    let (verdict, strategy) = run.dispatch()?;
    match &verdict {
        Verdict::Admissible(w) => {
            let rep = verify_witness(w, rs)?;
            if !rep.ok() {
                return Err(Error::Invalid(format!("witness failed its check: {rep:?}")));
            }
        }
        Verdict::Inadmissible(c) => {
            verify_certificate(c, &sys)
                .into_result()
                .map_err(|e| Error::Invalid(format!("certificate failed its check: {e}")))?;
        }
        Verdict::Unknown(_) => {}
    }
    let trace = Trace {
        class: run.class,
        strategy: strategy.into(),
        steps: run.steps,
        eliminations: run.eliminations,
        nodes: run.nodes,
    };
    Ok(Solution {
        system: sys,
        verdict,
        trace,
    })
}

struct Run<'a> {
    sys: &'a PolySystem,
    cfg: &'a SolverConfig,
    steps: Vec<String>,
    eliminations: Vec<String>,
    nodes: u64,
    class: StrategyClass,
}

fn unknown(reason: impl Into<String>) -> Verdict {
    Verdict::Unknown(Undecided {
        reason: reason.into(),
        region: Vec::new(),
        row: None,
    })
}

impl Run<'_> {
    fn dispatch(&mut self) -> Result<(Verdict, &'static str)> {
        let sys = self.sys;
        let linear = is_linear(sys);
        if linear && matches!(self.cfg.strategy, Strategy::Auto | Strategy::Lp) {
            self.class = StrategyClass::Linear;
            self.steps.push("simplex over atom probabilities".into());
            return Ok((self.atom_lp(false)?.expect("linear system"), "lp"));
        }
        if matches!(self.cfg.strategy, Strategy::Auto | Strategy::Lp) {
            if let Some(v) = self.atom_lp(true)? {
                self.class = classify(sys)?;
                return Ok((v, "lp"));
            }
            if self.cfg.strategy == Strategy::Lp {
                self.class = classify(sys)?;
                return Ok((unknown("the system is not linear"), "lp"));
            }
        }

        let elim = eliminate(sys)?;
        self.eliminations = elim.describe(sys);
        self.class = if linear {
            StrategyClass::Linear
        } else {
            post_elimination_class(&elim)
        };
        self.steps.push(format!(
            "eliminated {} coordinates, {} free",
            elim.pivots().len(),
            elim.free_vars().len()
        ));
        if self.cfg.strategy == Strategy::Interval {
            return Ok((self.interval(&elim)?, "interval"));
        }
        for r in elim.reduced_rows() {
            if let Some(c) = lift::constant_violation(sys, Space::M, r)? {
                self.steps
                    .push(format!("row {} reduces to a violated constant", r.row));
                return Ok((Verdict::Inadmissible(c), "elimination"));
            }
        }
        let free = elim.free_vars();
        if self.cfg.strategy == Strategy::Sturm {
            return Ok(match free.as_slice() {
                [] => (self.point(&elim, &[])?, "elimination"),
                [z] => (
                    self.univariate(&elim, *z)?
                        .unwrap_or_else(|| unknown("sign conditions not settled")),
                    "sturm",
                ),
                _ => (
                    unknown(format!(
                        "{} coordinates remain after elimination",
                        free.len()
                    )),
                    "sturm",
                ),
            });
        }

        if let Some(c) = self.monoid(&elim)? {
            return Ok((Verdict::Inadmissible(c), "elimination"));
        }
        if free.is_empty() {
            return Ok((self.point(&elim, &[])?, "elimination"));
        }
        if elim
            .reduced_rows()
            .iter()
            .all(|r| r.form.total_degree() <= 1)
        {
            self.steps.push("reduced system is linear".into());
            return Ok((self.reduced_lp(&elim, &free)?, "lp"));
        }
        if let [z] = free.as_slice() {
            if let Some(v) = self.univariate(&elim, *z)? {
                return Ok((v, "sturm"));
            }
        }
        Ok((self.interval(&elim)?, "interval"))
    }

    fn point(&self, elim: &Elimination, free: &[(Var, Rational)]) -> Result<Verdict> {
        Ok(Verdict::Admissible(Witness::Exact(atoms_from_moments(
            &elim.point(free)?,
        ))))
    }

    /// The simplex over atom probabilities. With `prefilter`, only the
    /// affine constraints are used and only a refutation is reported.
    fn atom_lp(&mut self, prefilter: bool) -> Result<Option<Verdict>> {
        let sys = self.sys;
        let mut rows = Vec::new();
        for i in 0..sys.constraint_count() {
            if sys.x_poly(i).is_some_and(|p| p.total_degree() <= 1) {
                rows.push(LinRow {
                    id: i,
                    poly: sys.form(i, Space::Y)?.into_owned(),
                    rel: sys.rel(i),
                });
            }
        }
        if prefilter && rows.is_empty() {
            return Ok(None);
        }
        let k = sys.normalization_index();
        rows.push(LinRow {
            id: k,
            poly: sys.form(k, Space::Y)?.into_owned(),
            rel: Relation::EqZero,
        });
        let p = LinProblem {
            vars: (0..sys.atom_count() as Var).collect(),
            bounds: (0..sys.atom_count() as Var)
                .map(|a| Some(sys.nonneg_index(a)))
                .collect(),
            rows,
        };
        let originals = |ids: &[(usize, Rational)]| -> Result<Vec<(ReducedRow, Rational)>> {
            ids.iter()
                .map(|(i, c)| Ok((ReducedRow::original(sys, *i, Space::Y)?, c.clone())))
                .collect()
        };
        let v = match linear::solve_linear(&p)? {
            LinOutcome::Point(y) => {
                if prefilter {
                    return Ok(None);
                }
                Verdict::Admissible(Witness::Exact(y))
            }
            LinOutcome::Combination { mut terms, target } => {
                terms.sort_by_key(|t| t.0);
                let f = FarkasCertificate {
                    space: Space::Y,
                    coefficients: terms,
                    target,
                };
                self.steps.push("affine rows are contradictory".into());
                Verdict::Inadmissible(Certificate::Farkas(normalize_farkas(&f)))
            }
            LinOutcome::Vanishing { row, below, above } => {
                let h = ReducedRow::original(sys, row, Space::Y)?;
                let (b, a) = (originals(&below)?, originals(&above)?);
                let b: Vec<_> = b.iter().map(|(r, c)| (r, c.clone())).collect();
                let a: Vec<_> = a.iter().map(|(r, c)| (r, c.clone())).collect();
                self.steps
                    .push(format!("row {row} vanishes wherever the affine rows hold"));
                Verdict::Inadmissible(lift::vanishing(sys, Space::Y, &h, &b, &a)?)
            }
        };
        Ok(Some(v))
    }

    /// Residual system affine in the free coordinates.
    fn reduced_lp(&mut self, elim: &Elimination, free: &[Var]) -> Result<Verdict> {
        let sys = self.sys;
        let reduced = elim.reduced_rows();
        let p = LinProblem {
            vars: free.to_vec(),
            bounds: vec![None; free.len()],
            rows: reduced
                .iter()
                .filter(|r| !r.form.is_constant())
                .map(|r| LinRow {
                    id: r.row,
                    poly: r.form.clone(),
                    rel: sys.rel(r.row),
                })
                .collect(),
        };
        let find = |i: usize| {
            *reduced
                .iter()
                .find(|r| r.row == i)
                .expect("row from the problem")
        };
        let pick = |ts: &[(usize, Rational)]| -> Vec<(&ReducedRow, Rational)> {
            ts.iter().map(|(i, c)| (find(*i), c.clone())).collect()
        };
        Ok(match linear::solve_linear(&p)? {
            LinOutcome::Point(x) => {
                let pts: Vec<(Var, Rational)> = free.iter().copied().zip(x).collect();
                self.point(elim, &pts)?
            }
            LinOutcome::Combination { terms, target } => {
                Verdict::Inadmissible(lift::combination(sys, Space::M, &pick(&terms), target)?)
            }
            LinOutcome::Vanishing { row, below, above } => Verdict::Inadmissible(lift::vanishing(
                sys,
                Space::M,
                find(row),
                &pick(&below),
                &pick(&above),
            )?),
        })
    }

    /// A residual equation that factors into strict rows times a constant.
    fn monoid(&mut self, elim: &Elimination) -> Result<Option<Certificate>> {
        let sys = self.sys;
        let strict: Vec<&ReducedRow> = elim
            .reduced_rows()
            .into_iter()
            .filter(|r| sys.rel(r.row).is_strict() && !r.form.is_constant())
            .collect();
        if strict.is_empty() {
            return Ok(None);
        }
        for f in elim.residual() {
            let mut q = f.form.clone();
            let mut factors = Vec::new();
            for h in &strict {
                while let Some(d) = q.div_exact(&h.form) {
                    q = d;
                    factors.push(*h);
                    if q.is_constant() {
                        break;
                    }
                }
            }
            if let (Some(c), false) = (q.constant_value(), factors.is_empty()) {
                if !c.is_zero() {
                    self.steps
                        .push(format!("row {} factors into strict rows", f.row));
                    return Ok(Some(lift::monoid(sys, Space::M, f, &factors, &c)?));
                }
            }
        }
        Ok(None)
    }

    fn univariate(&mut self, elim: &Elimination, z: Var) -> Result<Option<Verdict>> {
        self.steps
            .push(format!("univariate in {}", self.sys.var_name(Space::M, z)));
        Ok(match univariate::decide(self.sys, elim, z, self.cfg)? {
            Univariate::Witness(w) => Some(Verdict::Admissible(w)),
            Univariate::Refuted(c) => Some(Verdict::Inadmissible(c)),
            Univariate::Undecided => None,
        })
    }

    fn interval(&mut self, elim: &Elimination) -> Result<Verdict> {
        let (search, nodes) = bnp::branch_and_prune(self.sys, elim, self.cfg)?;
        self.nodes = nodes;
        self.steps
            .push(format!("branch-and-prune visited {nodes} boxes"));
        Ok(match search {
            Search::Found(x) => self.point(elim, &x)?,
            Search::Refuted(c) => Verdict::Inadmissible(Certificate::Prune(c)),
            Search::Limit { region, row } => Verdict::Unknown(Undecided {
                reason: format!("search limits reached after {nodes} boxes"),
                region,
                row,
            }),
        })
    }
}

/// Exact range of a linear objective over the solutions, which must form a
/// polytope after elimination. `!=` rows are ignored and strict rows are
/// relaxed, so the result is the closure of the attainable range.
pub fn feasibility_interval(
    rs: &RequirementSet,
    objective: &Polynomial,
    cfg: &SolverConfig,
) -> Result<RatInterval> {
    cfg.validate()?;
    let sys = atomize(rs);
    let elim = eliminate(&sys)?;
    let obj = elim.reduce(&sys.convert(objective, Space::M)?);
    let reduced = elim.reduced_rows();
    if obj.total_degree() > 1 || reduced.iter().any(|r| r.form.total_degree() > 1) {
        return Err(Error::Unsupported(
            "the system is not linear after elimination".into(),
        ));
    }
    let mut vars = elim.free_vars();
    vars.extend(obj.vars());
    vars.sort_unstable();
    vars.dedup();
    let col = |v: Var| vars.iter().position(|w| *w == v).expect("collected");
    let mut rows = Vec::new();
    for r in &reduced {
        let sense = match sys.rel(r.row) {
            Relation::EqZero => lp::Sense::Eq,
            Relation::GeqZero | Relation::GtZero => lp::Sense::Ge,
            Relation::NeqZero => continue,
        };
        rows.push(lp::LpRow {
            coefs: r
                .form
                .vars()
                .into_iter()
                .map(|v| (col(v), r.form.linear_coef(v)))
                .collect(),
            rhs: -r.form.constant_term(),
            sense,
        });
    }
    let prob = lp::Lp {
        free: vec![true; vars.len()],
        rows,
    };
    let c: Vec<(usize, Rational)> = obj
        .vars()
        .into_iter()
        .map(|v| (col(v), obj.linear_coef(v)))
        .collect();
    let c0 = obj.constant_term();
    let mut ends = Vec::new();
    for maximize in [false, true] {
        match lp::solve(&prob, &c, maximize) {
            lp::LpOutcome::Optimal { value, .. } => ends.push(value + &c0),
            lp::LpOutcome::Infeasible(_) => {
                return Err(Error::Invalid("the requirements are not admissible".into()))
            }
            lp::LpOutcome::Unbounded => {
                return Err(Error::Invalid("objective is unbounded".into()))
            }
        }
    }
    let hi = ends.pop().expect("two runs");
    let lo = ends.pop().expect("two runs");
    RatInterval::new(lo, hi)
}

/// `P(...)` expressions over the declared events, or polynomials in atom
/// variables written `y_101` (first event first).
pub fn parse_objective(rs: &RequirementSet, text: &str) -> Result<Polynomial> {
    if text.contains("P(") {
        let names: Vec<&str> = (0..rs.n()).map(|i| rs.events.name(i)).collect();
        let spec = format!("events {}\nconstraint {text} >= 0\n", names.join(" "));
        let aux = parse_spec(&spec)?;
        if aux.constraints.len() != 1 {
            return Err(Error::Invalid(format!(
                "`{text}` is not a single expression"
            )));
        }
        return atomize(&aux).form(0, Space::Y).map(|p| p.into_owned());
    }
    let p = parse_poly(text, Space::Y, &resolve_var(Space::Y))?;
    if p.vars().iter().any(|&a| a as usize >= 1 << rs.n()) {
        return Err(Error::Invalid(format!(
            "`{text}` names an atom outside the {} events",
            rs.n()
        )));
    }
    Ok(p)
}
