//! Dense exact simplex with Bland's rule.
//!
//! Rows are `sum a_j x_j - b` with relation `= 0` or `>= 0`; variables are
//! either nonnegative or free. Every terminal state comes with a dual
//! identity, so infeasibility and optimality are both certified.

use crate::numeric::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Sense {
    Eq,
    Ge,
}

#[derive(Clone, Debug)]
pub(crate) struct LpRow {
    pub coefs: Vec<(usize, Rational)>,
    pub rhs: Rational,
    pub sense: Sense,
}

#[derive(Clone, Debug)]
pub(crate) struct Lp {
    pub free: Vec<bool>,
    pub rows: Vec<LpRow>,
}

/// `sign * c.x + sum rows_i g_i(x) + sum vars_j x_j == constant` identically,
/// with `rows_i >= 0` on `>=` rows, `vars_j >= 0`, and `vars_j = 0` for free
/// variables. `sign` is +1 when maximizing and -1 when minimizing.
#[derive(Clone, Debug)]
pub(crate) struct Dual {
    pub rows: Vec<Rational>,
    pub vars: Vec<Rational>,
    pub constant: Rational,
}

#[derive(Clone, Debug)]
pub(crate) enum LpOutcome {
    /// The dual identity holds without the objective and `constant < 0`.
    Infeasible(Dual),
    Optimal {
        x: Vec<Rational>,
        value: Rational,
        dual: Dual,
    },
    Unbounded,
}

struct Tableau {
    t: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    width: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> &Rational {
        &self.t[i][self.width]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let inv = self.t[r][c].recip().expect("pivot is nonzero");
        for v in self.t[r].iter_mut() {
            if !v.is_zero() {
                *v = &*v * &inv;
            }
        }
        let prow = self.t[r].clone();
        for (i, row) in self.t.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, p) in row.iter_mut().zip(&prow) {
                if !p.is_zero() {
                    *v -= &f * p;
                }
            }
        }
        self.basis[r] = c;
    }

    fn reduced_costs(&self, cost: &[Rational]) -> Vec<Rational> {
        let mut d = cost.to_vec();
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = &cost[b];
            if cb.is_zero() {
                continue;
            }
            for (dj, tij) in d.iter_mut().zip(&self.t[i][..self.width]) {
                if !tij.is_zero() {
                    *dj -= cb * tij;
                }
            }
        }
        d
    }

    /// Maximizes `cost` over columns `< allowed`; false when unbounded.
    fn optimize(&mut self, cost: &[Rational], allowed: usize) -> bool {
        loop {
            let d = self.reduced_costs(cost);
            let Some(c) = (0..allowed).find(|&j| d[j].is_positive()) else {
                return true;
            };
            let mut best: Option<(usize, Rational)> = None;
            for i in 0..self.t.len() {
                let a = &self.t[i][c];
                if !a.is_positive() {
                    continue;
                }
                let ratio = self.rhs(i) / a;
                let better = match &best {
                    None => true,
                    Some((bi, br)) => {
                        ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi])
                    }
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            match best {
                Some((r, _)) => self.pivot(r, c),
                None => return false,
            }
        }
    }

    fn duals(&self, cost: &[Rational], art0: usize) -> Vec<Rational> {
        (0..self.t.len())
            .map(|k| {
                self.basis
                    .iter()
                    .enumerate()
                    .fold(Rational::zero(), |acc, (i, &b)| {
                        acc + &cost[b] * &self.t[i][art0 + k]
                    })
            })
            .collect()
    }
}

/// Maximizes (or minimizes) `objective` over the rows of `lp`.
pub(crate) fn solve(lp: &Lp, objective: &[(usize, Rational)], maximize: bool) -> LpOutcome {
    let nv = lp.free.len();
    let m = lp.rows.len();
    // Column layout: x+ per variable, x- per free variable, one slack per >=
    // row, one artificial per row.
    let pos: Vec<usize> = (0..nv).collect();
    let mut neg = vec![None; nv];
    let mut col = nv;
    for (j, f) in lp.free.iter().enumerate() {
        if *f {
            neg[j] = Some(col);
            col += 1;
        }
    }
    let mut slack = vec![None; m];
    for (i, r) in lp.rows.iter().enumerate() {
        if r.sense == Sense::Ge {
            slack[i] = Some(col);
            col += 1;
        }
    }
    let art0 = col;
    let width = art0 + m;
    let mut flip = vec![false; m];
    let mut t = vec![vec![Rational::zero(); width + 1]; m];
    for (i, r) in lp.rows.iter().enumerate() {
        flip[i] = r.rhs.is_negative();
        let f = if flip[i] {
            Rational::from_int(-1)
        } else {
            Rational::one()
        };
        for (j, a) in &r.coefs {
            t[i][pos[*j]] += a * &f;
            if let Some(c) = neg[*j] {
                t[i][c] -= a * &f;
            }
        }
        if let Some(s) = slack[i] {
            t[i][s] = -f.clone();
        }
        t[i][art0 + i] = Rational::one();
        t[i][width] = &r.rhs * &f;
    }
    let mut tab = Tableau {
        t,
        basis: (art0..art0 + m).collect(),
        width,
    };

    // Phase 1: maximize minus the sum of the artificials.
    let mut cost1 = vec![Rational::zero(); width];
    for c in cost1[art0..].iter_mut() {
        *c = Rational::from_int(-1);
    }
    tab.optimize(&cost1, width);
    let z1: Rational = (0..m)
        .filter(|&i| tab.basis[i] >= art0)
        .map(|i| -tab.rhs(i).clone())
        .sum();
    let lift = |u: Vec<Rational>, c: &[Rational]| -> Dual {
        // lambda_i = -u_i on the flipped row, mapped back through the flip.
        let rows: Vec<Rational> = u
            .into_iter()
            .zip(&flip)
            .map(|(ui, f)| if *f { ui } else { -ui })
            .collect();
        let mut vars: Vec<Rational> = c.iter().map(|v| -v.clone()).collect();
        let mut constant = Rational::zero();
        for (i, r) in lp.rows.iter().enumerate() {
            for (j, a) in &r.coefs {
                vars[*j] -= &rows[i] * a;
            }
            constant -= &rows[i] * &r.rhs;
        }
        Dual {
            rows,
            vars,
            constant,
        }
    };
    if z1.is_negative() {
        let u = tab.duals(&cost1, art0);
        return LpOutcome::Infeasible(lift(u, &vec![Rational::zero(); nv]));
    }
    // Drive remaining artificials out of the basis where possible.
    for i in 0..m {
        if tab.basis[i] >= art0 {
            if let Some(c) = (0..art0).find(|&c| !tab.t[i][c].is_zero()) {
                tab.pivot(i, c);
            }
        }
    }

    let sign = if maximize {
        Rational::one()
    } else {
        Rational::from_int(-1)
    };
    let mut c = vec![Rational::zero(); nv];
    for (j, a) in objective {
        c[*j] += a * &sign;
    }
    let mut cost2 = vec![Rational::zero(); width];
    for j in 0..nv {
        cost2[pos[j]] = c[j].clone();
        if let Some(n) = neg[j] {
            cost2[n] = -c[j].clone();
        }
    }
    if !tab.optimize(&cost2, art0) {
        return LpOutcome::Unbounded;
    }
    let mut colval = vec![Rational::zero(); width];
    for (i, &b) in tab.basis.iter().enumerate() {
        colval[b] = tab.rhs(i).clone();
    }
    let x: Vec<Rational> = (0..nv)
        .map(|j| match neg[j] {
            Some(n) => &colval[pos[j]] - &colval[n],
            None => colval[pos[j]].clone(),
        })
        .collect();
    let value = objective
        .iter()
        .fold(Rational::zero(), |acc, (j, a)| acc + a * &x[*j]);
    let u = tab.duals(&cost2, art0);
    LpOutcome::Optimal {
        x,
        value,
        dual: lift(u, &c),
    }
}
