use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::DifferenceOperator;
use crate::exact::{Lattice, LatticePoint, Rational};

/// A Laurent polynomial in `nvars` variables with rational coefficients.
/// Translation by the lattice point `k` corresponds to the monomial `x^k`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LaurentPoly {
    nvars: usize,
    monomials: BTreeMap<Vec<i64>, Rational>,
}

impl LaurentPoly {
    pub fn zero(nvars: usize) -> Self {
        LaurentPoly { nvars, monomials: BTreeMap::new() }
    }

    pub fn monomial(nvars: usize, exps: Vec<i64>, c: Rational) -> Self {
        LaurentPoly::from_monomials(nvars, [(exps, c)])
    }

    pub fn from_monomials(
        nvars: usize,
        monomials: impl IntoIterator<Item = (Vec<i64>, Rational)>,
    ) -> Self {
        let mut p = LaurentPoly::zero(nvars);
        for (e, c) in monomials {
            assert_eq!(e.len(), nvars, "exponent length mismatch");
            p.add_term(e, c);
        }
        p
    }

    fn add_term(&mut self, e: Vec<i64>, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.monomials.entry(e) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn monomials(&self) -> &BTreeMap<Vec<i64>, Rational> {
        &self.monomials
    }

    pub fn is_zero(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.monomials {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-Rational::from_integer(1.into())))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return LaurentPoly::zero(self.nvars);
        }
        LaurentPoly {
            nvars: self.nvars,
            monomials: self.monomials.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = LaurentPoly::zero(self.nvars);
        for (e1, c1) in &self.monomials {
            for (e2, c2) in &other.monomials {
                let e: Vec<i64> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }

    /// Componentwise minimum exponent (zero vector for the zero polynomial).
    pub fn min_exponents(&self) -> Vec<i64> {
        let mut m = vec![0i64; self.nvars];
        for (i, slot) in m.iter_mut().enumerate() {
            *slot = self.monomials.keys().map(|e| e[i]).min().unwrap_or(0);
        }
        m
    }

    /// Back to an operator whose shifts are the lattice points of the exponents.
    pub fn to_operator(&self, lattice: &Lattice) -> DifferenceOperator {
        DifferenceOperator::canonicalize(
            self.monomials
                .iter()
                .map(|(e, c)| (c.clone(), lattice.point(&LatticePoint(e.clone())))),
        )
    }
}
