//! Sparse exact elimination into echelon form, optionally remembering
//! which input rows each stored row combines.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

use num_traits::Zero;

use crate::exact::Rational;

pub(crate) type SparseRow = BTreeMap<usize, Rational>;

#[derive(Debug, Clone)]
pub(crate) struct Row {
    pub coeffs: SparseRow,
    pub rhs: Rational,
    /// Input row tag -> multiplier.
    pub provenance: SparseRow,
}

pub(crate) enum Insert {
    Pivot,
    Redundant,
    Inconsistent(Row),
}

/// Each stored row is keyed by its lowest variable.
pub(crate) struct Eliminator {
    pivots: BTreeMap<usize, Row>,
    track: bool,
}

fn axpy(dst: &mut SparseRow, f: &Rational, src: &SparseRow) {
    for (k, v) in src {
        match dst.entry(*k) {
            Entry::Vacant(e) => {
                e.insert(f * v);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += f * v;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }
}

impl Eliminator {
    pub fn new(track: bool) -> Self {
        Eliminator { pivots: BTreeMap::new(), track }
    }

    pub fn insert(&mut self, mut coeffs: SparseRow, rhs: Rational, tag: usize) -> Insert {
        coeffs.retain(|_, v| !v.is_zero());
        let mut row = Row { coeffs, rhs, provenance: SparseRow::new() };
        if self.track {
            row.provenance.insert(tag, Rational::from_integer(1.into()));
        }
        loop {
            let Some((&v, lead)) = row.coeffs.iter().next() else {
                return if row.rhs.is_zero() { Insert::Redundant } else { Insert::Inconsistent(row) };
            };
            match self.pivots.get(&v) {
                Some(p) => {
                    let f = -(lead / &p.coeffs[&v]);
                    axpy(&mut row.coeffs, &f, &p.coeffs);
                    row.rhs += &f * &p.rhs;
                    if self.track {
                        axpy(&mut row.provenance, &f, &p.provenance);
                    }
                }
                None => {
                    self.pivots.insert(v, row);
                    return Insert::Pivot;
                }
            }
        }
    }

    /// The solution with every free variable set to zero.
    pub fn solve(&self, nvars: usize) -> Vec<Rational> {
        let mut x = vec![Rational::zero(); nvars];
        for (&v, row) in self.pivots.iter().rev() {
            let mut acc = row.rhs.clone();
            for (&u, c) in row.coeffs.range(v + 1..) {
                acc -= c * &x[u];
            }
            x[v] = acc / &row.coeffs[&v];
        }
        x
    }

    /// Every variable as `constant + sum_j c_j z_j` over the free variables
    /// `z_j`, returned with the list of free variables.
    pub fn affine_solution(&self, nvars: usize) -> (Vec<(Rational, SparseRow)>, Vec<usize>) {
        let free: Vec<usize> = (0..nvars).filter(|v| !self.pivots.contains_key(v)).collect();
        let slot: BTreeMap<usize, usize> = free.iter().enumerate().map(|(j, &v)| (v, j)).collect();
        let mut x: Vec<(Rational, SparseRow)> = vec![(Rational::zero(), SparseRow::new()); nvars];
        for (&v, &j) in &slot {
            x[v].1.insert(j, Rational::from_integer(1.into()));
        }
        for (&v, row) in self.pivots.iter().rev() {
            let inv = row.coeffs[&v].recip();
            let mut c = &row.rhs * &inv;
            let mut lin = SparseRow::new();
            for (&u, a) in row.coeffs.range(v + 1..) {
                let f = -(a * &inv);
                c += &f * &x[u].0;
                axpy(&mut lin, &f, &x[u].1);
            }
            x[v] = (c, lin);
        }
        (x, free)
    }
}
