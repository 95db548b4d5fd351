//! The algebra of difference operators `D = sum a_i T_{b_i}`.

mod laurent;

pub use laurent::LaurentPoly;

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{render_rational, BasisContext, FormalReal, Lattice, Rational};

/// A difference operator in canonical form: nonzero rational coefficients on
/// pairwise distinct shifts, sorted by the shift order. The zero operator has
/// no terms.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub struct DifferenceOperator {
    terms: Vec<(Rational, FormalReal)>,
}

impl DifferenceOperator {
    pub fn zero() -> Self {
        DifferenceOperator::default()
    }

    pub fn identity() -> Self {
        DifferenceOperator::translation(FormalReal::zero())
    }

    /// `T_b f(x) = f(x + b)`.
    pub fn translation(b: FormalReal) -> Self {
        DifferenceOperator { terms: vec![(Rational::one(), b)] }
    }

    /// `Delta_b f(x) = f(x + b) - f(x)`.
    pub fn delta(b: FormalReal) -> Self {
        DifferenceOperator::canonicalize([
            (Rational::one(), b),
            (-Rational::one(), FormalReal::zero()),
        ])
    }

    /// Merges equal shifts, drops zero coefficients and sorts.
    pub fn canonicalize(raw: impl IntoIterator<Item = (Rational, FormalReal)>) -> Self {
        let mut acc: BTreeMap<FormalReal, Rational> = BTreeMap::new();
        for (c, b) in raw {
            if c.is_zero() {
                continue;
            }
            *acc.entry(b).or_insert_with(Rational::zero) += c;
        }
        DifferenceOperator {
            terms: acc
                .into_iter()
                .filter(|(_, c)| !c.is_zero())
                .map(|(b, c)| (c, b))
                .collect(),
        }
    }

    pub fn terms(&self) -> &[(Rational, FormalReal)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn shifts(&self) -> impl Iterator<Item = &FormalReal> {
        self.terms.iter().map(|(_, b)| b)
    }

    pub fn coefficient_sum(&self) -> Rational {
        self.terms.iter().map(|(c, _)| c).sum()
    }

    /// The shift `b` when the operator is exactly `Delta_b` with `b != 0`.
    pub fn as_delta(&self) -> Option<&FormalReal> {
        match self.terms.as_slice() {
            [(c0, b0), (c1, b1)] => {
                if b0.is_zero() && (-c0).is_one() && c1.is_one() {
                    Some(b1)
                } else if b1.is_zero() && (-c1).is_one() && c0.is_one() {
                    Some(b0)
                } else {
                    None
                }
            }
            _ => None,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        DifferenceOperator::canonicalize(self.terms.iter().chain(&other.terms).cloned())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Rational::one())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return DifferenceOperator::zero();
        }
        DifferenceOperator {
            terms: self.terms.iter().map(|(a, b)| (a * c, b.clone())).collect(),
        }
    }

    /// Composition, `T_a T_b = T_{a+b}` extended bilinearly.
    pub fn compose(&self, other: &Self) -> Self {
        DifferenceOperator::canonicalize(self.terms.iter().flat_map(|(a, s)| {
            other.terms.iter().map(move |(c, t)| (a * c, s + t))
        }))
    }

    /// `T_b` composed with `self`.
    pub fn translate(&self, b: &FormalReal) -> Self {
        DifferenceOperator {
            terms: self.terms.iter().map(|(c, s)| (c.clone(), s + b)).collect(),
        }
    }

    /// Sum of absolute coefficient values.
    pub fn norm(&self) -> Rational {
        self.terms.iter().map(|(c, _)| c.abs()).sum()
    }

    /// Image in the Laurent ring over the coordinates of `lattice`.
    pub fn to_laurent(&self, lattice: &Lattice) -> Result<LaurentPoly> {
        let mut monomials = BTreeMap::new();
        for (c, b) in &self.terms {
            let p = lattice.member(b).ok_or_else(|| Error::Lattice {
                shift: format!("{b:?}"),
                lattice: format!("{lattice:?}"),
            })?;
            monomials.insert(p.0, c.clone());
        }
        Ok(LaurentPoly::from_monomials(lattice.rank(), monomials))
    }

    /// Same as [`DifferenceOperator::to_laurent`] with readable error text.
    pub fn to_laurent_in(&self, lattice: &Lattice, ctx: &BasisContext) -> Result<LaurentPoly> {
        self.to_laurent(lattice).map_err(|e| match e {
            Error::Lattice { .. } => {
                let off = self
                    .shifts()
                    .find(|b| !lattice.contains(b))
                    .map(|b| ctx.render(b))
                    .unwrap_or_default();
                Error::Lattice { shift: off, lattice: lattice.render(ctx) }
            }
            e => e,
        })
    }

    /// Renders as e.g. `3*T[b1] - 2*T[0]`; the zero operator renders as `0`.
    pub fn render(&self, ctx: &BasisContext) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        // highest shift first reads more naturally: T[b] - T[0]
        for (i, (c, b)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mag = c.abs();
            if !mag.is_one() {
                let _ = write!(out, "{}*", render_rational(&mag));
            }
            let _ = write!(out, "T[{}]", ctx.render(b));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{qi, UNIT};

    fn b(i: usize) -> FormalReal {
        FormalReal::basis(i)
    }

    fn t(c: i64, s: FormalReal) -> (Rational, FormalReal) {
        (qi(c), s)
    }

    #[test]
    fn canonical_examples() {
        let d = DifferenceOperator::canonicalize([t(2, b(1)), t(3, b(1)), t(-5, FormalReal::zero())]);
        assert_eq!(
            d,
            DifferenceOperator::canonicalize([t(5, b(1)), t(-5, FormalReal::zero())])
        );
        assert_eq!(d.terms().len(), 2);
        assert!(DifferenceOperator::canonicalize([t(1, b(1)), t(-1, b(1))]).is_zero());
        let delta = DifferenceOperator::canonicalize([t(1, b(1)), t(-1, FormalReal::zero())]);
        assert_eq!(delta, DifferenceOperator::delta(b(1)));
        assert_eq!(delta.as_delta(), Some(&b(1)));
    }

    #[test]
    fn composition_examples() {
        let z = FormalReal::zero();
        let prod = DifferenceOperator::delta(b(1)).compose(&DifferenceOperator::delta(b(2)));
        let expected = DifferenceOperator::canonicalize([
            t(1, &b(1) + &b(2)),
            t(-1, b(1)),
            t(-1, b(2)),
            t(1, z.clone()),
        ]);
        assert_eq!(prod, expected);

        let inv = DifferenceOperator::translation(b(1))
            .compose(&DifferenceOperator::translation(-&b(1)));
        assert_eq!(inv, DifferenceOperator::identity());

        let lhs = DifferenceOperator::translation(b(2))
            .compose(&DifferenceOperator::delta(b(1)))
            .add(&DifferenceOperator::delta(b(2)));
        assert_eq!(lhs, DifferenceOperator::delta(&b(1) + &b(2)));
    }

    #[test]
    fn norms() {
        assert_eq!(DifferenceOperator::delta(b(3)).norm(), qi(2));
        let d = DifferenceOperator::canonicalize([t(3, b(1)), t(-2, FormalReal::zero())]);
        assert_eq!(d.norm(), qi(5));
        assert_eq!(DifferenceOperator::zero().norm(), qi(0));
    }

    #[test]
    fn rendering() {
        let ctx = BasisContext::numbered(2);
        let d = DifferenceOperator::canonicalize([t(3, b(1)), t(-2, FormalReal::zero())]);
        assert_eq!(d.render(&ctx), "3*T[b1] - 2*T[0]");
        assert_eq!(DifferenceOperator::delta(b(2)).render(&ctx), "T[b2] - T[0]");
        assert_eq!(DifferenceOperator::zero().render(&ctx), "0");
        let r = DifferenceOperator::translation(FormalReal::from_coords([(UNIT, qi(-1))]));
        assert_eq!(r.render(&ctx), "T[-1]");
    }

    #[test]
    fn laurent_images() {
        let l1 = Lattice::from_generators(&[b(1)]);
        let x = |e: i64| LaurentPoly::monomial(1, vec![e], qi(1));
        assert_eq!(
            DifferenceOperator::delta(b(1)).to_laurent(&l1).unwrap(),
            x(1).sub(&x(0))
        );
        assert_eq!(
            DifferenceOperator::delta(b(1).scale(&qi(2))).to_laurent(&l1).unwrap(),
            x(2).sub(&x(0))
        );
        let l2 = Lattice::from_generators(&[b(1), b(2)]);
        assert_eq!(
            DifferenceOperator::translation(&b(1) + &b(2)).to_laurent(&l2).unwrap(),
            LaurentPoly::monomial(2, vec![1, 1], qi(1))
        );
        let err = DifferenceOperator::delta(b(2))
            .to_laurent_in(&l1, &BasisContext::numbered(2))
            .unwrap_err();
        assert_eq!(
            err,
            Error::Lattice { shift: "b2".into(), lattice: "<b1>".into() }
        );
    }
}
