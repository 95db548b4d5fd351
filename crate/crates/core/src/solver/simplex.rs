//! Exact two-phase simplex over the rationals with Bland's rule.

use num_traits::{One, Signed, Zero};

use crate::exact::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal { value: Rational, x: Vec<Rational> },
    Infeasible,
    Unbounded,
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
}

impl Tableau {
    fn pivot(&mut self, r: usize, col: usize) {
        let inv = self.rows[r][col].recip();
        for v in self.rows[r].iter_mut() {
            if !v.is_zero() {
                *v *= &inv;
            }
        }
        self.rhs[r] *= &inv;
        let nz: Vec<(usize, Rational)> = self.rows[r]
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(j, v)| (j, v.clone()))
            .collect();
        let rhs_r = self.rhs[r].clone();
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][col].is_zero() {
                continue;
            }
            let f = self.rows[i][col].clone();
            for (j, v) in &nz {
                self.rows[i][*j] -= &f * v;
            }
            self.rhs[i] -= &f * &rhs_r;
        }
        self.basis[r] = col;
    }

    /// Minimizes `cost` over columns `< allowed`; false if unbounded.
    fn run(&mut self, cost: &[Rational], allowed: usize) -> bool {
        loop {
            let mut entering = None;
            for j in 0..allowed {
                if self.basis.contains(&j) {
                    continue;
                }
                let mut r = cost[j].clone();
                for (i, &bi) in self.basis.iter().enumerate() {
                    if !cost[bi].is_zero() && !self.rows[i][j].is_zero() {
                        r -= &cost[bi] * &self.rows[i][j];
                    }
                }
                if r.is_negative() {
                    entering = Some(j);
                    break;
                }
            }
            let Some(col) = entering else { return true };
            let mut leave: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][col];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / a;
                let better = match &leave {
                    None => true,
                    Some((k, best)) => ratio < *best || (ratio == *best && self.basis[i] < self.basis[*k]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            let Some((r, _)) = leave else { return false };
            self.pivot(r, col);
        }
    }

    fn objective(&self, cost: &[Rational]) -> Rational {
        self.basis.iter().zip(&self.rhs).map(|(&b, v)| &cost[b] * v).sum()
    }
}

/// Minimizes `c . x` subject to `A x <= b` and `x >= 0`.
pub fn minimize(c: &[Rational], a: &[Vec<Rational>], b: &[Rational]) -> LpOutcome {
    let n = c.len();
    let m = a.len();
    let negative: Vec<usize> = (0..m).filter(|&i| b[i].is_negative()).collect();
    let width = n + m + negative.len();
    let mut t = Tableau { rows: Vec::with_capacity(m), rhs: Vec::with_capacity(m), basis: Vec::with_capacity(m) };
    let mut art = n + m;
    for i in 0..m {
        let mut row = vec![Rational::zero(); width];
        let flip = b[i].is_negative();
        for (j, v) in a[i].iter().enumerate() {
            row[j] = if flip { -v.clone() } else { v.clone() };
        }
        row[n + i] = if flip { -Rational::one() } else { Rational::one() };
        if flip {
            row[art] = Rational::one();
            t.basis.push(art);
            art += 1;
        } else {
            t.basis.push(n + i);
        }
        t.rows.push(row);
        t.rhs.push(b[i].abs());
    }

    if !negative.is_empty() {
        let mut phase1 = vec![Rational::zero(); width];
        for v in phase1.iter_mut().skip(n + m) {
            *v = Rational::one();
        }
        t.run(&phase1, width);
        if !t.objective(&phase1).is_zero() {
            return LpOutcome::Infeasible;
        }
        // pivot remaining zero-level artificials out, dropping redundant rows
        let mut i = 0;
        while i < t.rows.len() {
            if t.basis[i] >= n + m {
                match (0..n + m).find(|&j| !t.rows[i][j].is_zero()) {
                    Some(j) => t.pivot(i, j),
                    None => {
                        t.rows.remove(i);
                        t.rhs.remove(i);
                        t.basis.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
    }

    let mut cost = vec![Rational::zero(); width];
    cost[..n].clone_from_slice(c);
    if !t.run(&cost, n + m) {
        return LpOutcome::Unbounded;
    }
    let mut x = vec![Rational::zero(); n];
    for (i, &bi) in t.basis.iter().enumerate() {
        if bi < n {
            x[bi] = t.rhs[i].clone();
        }
    }
    let value = c.iter().zip(&x).map(|(ci, xi)| ci * xi).sum();
    LpOutcome::Optimal { value, x }
}
