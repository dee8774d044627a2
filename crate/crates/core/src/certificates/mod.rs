//! Infeasibility certificates and their checker.
//!
//! Verification only uses exact polynomial identities, Sturm counts and sound
//! interval bounds against a freshly atomized system; it never consults the
//! solver that produced the certificate.

mod text;
mod verify;

use std::fmt;

use crate::error::{Error, Result};
use crate::numeric::{Polynomial, RatInterval, Rational, Space, Var};

pub(crate) use text::resolve as resolve_var;
pub use text::{parse_certificate, write_certificate};
pub use verify::{range_of, verify_certificate, Verification};

/// Sign-constrained linear combination of rows equal to a constant.
///
/// The constant is negative, or zero with a positive weight on some strict row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FarkasCertificate {
    pub space: Space,
    pub coefficients: Vec<(usize, Rational)>,
    pub target: Rational,
}

/// `a_k - a_{k+1} = c_k g_k`; the sum telescopes to `a_first - a_last < 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainCertificate {
    pub space: Space,
    pub steps: Vec<(usize, Rational)>,
    pub a_first: Rational,
    pub a_last: Rational,
}

/// `s * prod(rows)` with `s` a weighted sum of squares.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConeTerm {
    pub rows: Vec<usize>,
    pub squares: Vec<(Rational, Polynomial)>,
}

/// `F + G + H = 0` with `F` in the ideal of the equations, `G` in the cone of
/// the inequalities and `H` a product of powers of strict rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PsatzCertificate {
    pub space: Space,
    pub ideal: Vec<(usize, Polynomial)>,
    pub cone: Vec<ConeTerm>,
    pub monoid: Vec<(usize, u32)>,
}

/// `form = base + sum of multiplier * equation`, an identity in moment space.
/// Without a base the form lies in the ideal of the equations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Congruence {
    pub base: Option<usize>,
    pub form: Polynomial,
    pub multipliers: Vec<(usize, Polynomial)>,
}

/// A root of the residual that some row's sign rules out.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Exclusion {
    pub interval: RatInterval,
    pub row: Congruence,
}

/// Every feasible point has `residual(m_var) = 0` with `m_var` in `range`;
/// the residual has no roots there except excluded ones.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SturmCertificate {
    pub var: Var,
    pub residual: Congruence,
    pub range: RatInterval,
    /// Sign variations of the residual's Sturm chain at both ends of the range.
    pub tallies: (usize, usize),
    pub exclusions: Vec<Exclusion>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PruneNode {
    /// `rows[row]` is violated on the whole box; `bound` is its enclosure.
    Leaf { row: usize, bound: RatInterval },
    Split {
        var: usize,
        at: Rational,
        low: Box<PruneNode>,
        high: Box<PruneNode>,
    },
}

impl PruneNode {
    pub fn leaves(&self) -> usize {
        match self {
            PruneNode::Leaf { .. } => 1,
            PruneNode::Split { low, high, .. } => low.leaves() + high.leaves(),
        }
    }
}

/// Exhaustive interval refutation over moment coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PruneCertificate {
    pub vars: Vec<Var>,
    pub domain: Vec<RatInterval>,
    pub rows: Vec<Congruence>,
    pub tree: PruneNode,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certificate {
    Farkas(FarkasCertificate),
    Chain(ChainCertificate),
    Psatz(PsatzCertificate),
    Sturm(SturmCertificate),
    Prune(PruneCertificate),
}

impl Certificate {
    pub fn kind(&self) -> &'static str {
        match self {
            Certificate::Farkas(_) => "farkas",
            Certificate::Chain(_) => "chain",
            Certificate::Psatz(_) => "psatz",
            Certificate::Sturm(_) => "sturm",
            Certificate::Prune(_) => "prune",
        }
    }

    /// Every system row the certificate mentions, sorted.
    pub fn rows(&self) -> Vec<usize> {
        let mut out = Vec::new();
        let cong = |c: &Congruence, out: &mut Vec<usize>| {
            out.extend(c.base);
            out.extend(c.multipliers.iter().map(|m| m.0));
        };
        match self {
            Certificate::Farkas(f) => out.extend(f.coefficients.iter().map(|c| c.0)),
            Certificate::Chain(c) => out.extend(c.steps.iter().map(|s| s.0)),
            Certificate::Psatz(p) => {
                out.extend(p.ideal.iter().map(|t| t.0));
                for t in &p.cone {
                    out.extend(&t.rows);
                }
                out.extend(p.monoid.iter().map(|m| m.0));
            }
            Certificate::Sturm(s) => {
                cong(&s.residual, &mut out);
                for e in &s.exclusions {
                    cong(&e.row, &mut out);
                }
            }
            Certificate::Prune(p) => {
                for c in &p.rows {
                    cong(c, &mut out);
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// True when only non-strict rows are used.
    pub fn uses_strict(&self, strict: impl Fn(usize) -> bool) -> bool {
        self.rows().into_iter().any(strict)
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} certificate over {} rows",
            self.kind(),
            self.rows().len()
        )
    }
}

/// Rescales a verified chain into a Farkas combination with target exactly -1.
pub fn chain_to_farkas(c: &ChainCertificate) -> Result<FarkasCertificate> {
    let gap = &c.a_last - &c.a_first;
    if !gap.is_positive() {
        return Err(Error::Certificate(format!(
            "degenerate chain: a_first = {} is not below a_last = {}",
            c.a_first, c.a_last
        )));
    }
    let s = gap.recip()?;
    Ok(FarkasCertificate {
        space: c.space,
        coefficients: c.steps.iter().map(|(r, k)| (*r, k * &s)).collect(),
        target: Rational::from_int(-1),
    })
}

/// Scales a Farkas certificate with negative target to target -1.
pub fn normalize_farkas(f: &FarkasCertificate) -> FarkasCertificate {
    if !f.target.is_negative() || f.target == Rational::from_int(-1) {
        return f.clone();
    }
    let s = (-f.target.clone()).recip().expect("nonzero");
    FarkasCertificate {
        space: f.space,
        coefficients: f.coefficients.iter().map(|(r, k)| (*r, k * &s)).collect(),
        target: Rational::from_int(-1),
    }
}

#[cfg(test)]
mod tests;
