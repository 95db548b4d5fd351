use serde::{Deserialize, Serialize};

use super::{EquationSystem, VanishSet};
use crate::error::{Error, Result};
use crate::exact::{FormalReal, Rational};
use crate::function::{zero_test, SymbolicFunction};
use crate::operator::DifferenceOperator;

/// A deduction `(sum A_i D_{j_i}, sum A_i g_{j_i})` together with its
/// multipliers. As an unsolvability witness the combined operator is zero
/// while the combined right-hand side is not.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    entries: Vec<(DifferenceOperator, usize)>,
    operator: DifferenceOperator,
    rhs: SymbolicFunction,
}

impl Certificate {
    /// Stores the given combined pair without recomputing it; see
    /// [`verify_certificate`].
    pub fn from_parts(
        entries: Vec<(DifferenceOperator, usize)>,
        operator: DifferenceOperator,
        rhs: SymbolicFunction,
    ) -> Self {
        Certificate { entries, operator, rhs }
    }

    pub fn entries(&self) -> &[(DifferenceOperator, usize)] {
        &self.entries
    }

    pub fn operator(&self) -> &DifferenceOperator {
        &self.operator
    }

    pub fn rhs(&self) -> &SymbolicFunction {
        &self.rhs
    }

    /// `g(0)` of the combined pair, when it is rational.
    pub fn rhs_at_zero(&self) -> Result<Rational> {
        self.rhs.evaluate_rational(&FormalReal::zero())
    }

    /// Rewrites equation indices of a subsystem into indices of `s`.
    pub(crate) fn reindex(&self, map: &[usize], s: &EquationSystem) -> Result<Certificate> {
        let entries: Vec<(DifferenceOperator, usize)> =
            self.entries.iter().map(|(a, j)| (a.clone(), map[*j])).collect();
        deduce(s, &entries)
    }
}

/// Multipliers for the same equation are summed so each index appears once.
pub fn deduce(s: &EquationSystem, entries: &[(DifferenceOperator, usize)]) -> Result<Certificate> {
    let mut merged: Vec<(DifferenceOperator, usize)> = Vec::new();
    for (a, j) in entries {
        if *j >= s.len() {
            return Err(Error::Invalid(format!("equation index {j} out of range")));
        }
        match merged.iter_mut().find(|(_, k)| k == j) {
            Some((acc, _)) => *acc = acc.add(a),
            None => merged.push((a.clone(), *j)),
        }
    }
    merged.retain(|(a, _)| !a.is_zero());
    let mut op = DifferenceOperator::zero();
    let mut rhs_terms = Vec::with_capacity(merged.len());
    for (a, j) in &merged {
        let (d, g) = &s.equations()[*j];
        op = op.add(&a.compose(d));
        rhs_terms.push((Rational::from_integer(1.into()), g.apply(a)?));
    }
    let rhs = SymbolicFunction::lin_comb(rhs_terms)?;
    Ok(Certificate { entries: merged, operator: op, rhs })
}

fn recomputes(s: &EquationSystem, c: &Certificate) -> Option<Certificate> {
    let again = deduce(s, &c.entries).ok()?;
    let same_rhs = crate::function::functions_equal(&again.rhs, &c.rhs).ok()?.is_zero();
    (again.operator == c.operator && same_rhs).then_some(again)
}

/// True iff the certificate recomputes from its entries, its operator is
/// zero and its right-hand side is a nonzero function.
pub fn verify_certificate(s: &EquationSystem, c: &Certificate) -> bool {
    let Some(c) = recomputes(s, c) else { return false };
    c.operator.is_zero() && matches!(zero_test(&c.rhs), Ok(v) if !v.is_zero())
}

/// True iff the deduction recomputes and `|g(0)| > bound * ||D||`, which rules
/// out every solution with `|f| <= bound`: `g(0) = (Df)(0)` is at most
/// `||D|| sup|f|` in absolute value.
pub fn verify_norm_bound(s: &EquationSystem, c: &Certificate, bound: &Rational) -> bool {
    use num_traits::Signed;
    let Some(c) = recomputes(s, c) else { return false };
    match c.rhs_at_zero() {
        Ok(g0) => g0.abs() > bound * c.operator.norm(),
        Err(_) => false,
    }
}

/// A deduction whose operator uses only shifts where the solution is
/// required to vanish, while its right-hand side is nonzero at 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VanishingCertificate {
    pub deduction: Certificate,
    pub vanish: VanishSet,
}

pub fn verify_vanishing_certificate(s: &EquationSystem, c: &VanishingCertificate) -> bool {
    use num_traits::Zero;
    let Some(d) = recomputes(s, &c.deduction) else { return false };
    d.operator.shifts().all(|b| c.vanish.contains(b))
        && matches!(d.rhs_at_zero(), Ok(g0) if !g0.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{qi, Lattice};

    fn b(i: usize) -> FormalReal {
        FormalReal::basis(i)
    }

    fn one() -> SymbolicFunction {
        SymbolicFunction::Constant(qi(1))
    }

    fn t(x: FormalReal) -> DifferenceOperator {
        DifferenceOperator::translation(x)
    }

    fn arbitrary3() -> EquationSystem {
        let a3 = -(&b(1) + &b(2));
        EquationSystem::new(vec![
            (DifferenceOperator::delta(b(1)), one()),
            (DifferenceOperator::delta(b(2)), one()),
            (DifferenceOperator::delta(a3), one()),
        ])
    }

    #[test]
    fn telescoping_certificate() {
        let s = arbitrary3();
        let c = deduce(
            &s,
            &[(t(FormalReal::zero()), 0), (t(b(1)), 1), (t(&b(1) + &b(2)), 2)],
        )
        .unwrap();
        assert!(c.operator().is_zero());
        assert_eq!(c.rhs(), &SymbolicFunction::Constant(qi(3)));
        assert!(verify_certificate(&s, &c));
    }

    #[test]
    fn deduce_examples() {
        let g1 = SymbolicFunction::coset(Lattice::from_generators(&[b(2)]), &FormalReal::zero());
        let g2 = SymbolicFunction::cos2pi(qi(1)).unwrap();
        let s = EquationSystem::new(vec![
            (DifferenceOperator::delta(b(1)), g1.clone()),
            (DifferenceOperator::delta(b(2)), g2.clone()),
        ]);
        let c = deduce(&s, &[(t(b(2)), 0), (t(FormalReal::zero()), 1)]).unwrap();
        assert_eq!(c.operator(), &DifferenceOperator::delta(&b(1) + &b(2)));
        let expected = g1.translate(&b(2)).unwrap().add(&g2).unwrap();
        assert!(crate::function::functions_equal(c.rhs(), &expected).unwrap().is_zero());

        let id = deduce(&s, &[(t(FormalReal::zero()), 0)]).unwrap();
        assert_eq!(id.operator(), &s.equations()[0].0);
        assert_eq!(id.rhs(), &g1);
        assert!(!verify_certificate(&s, &id));
    }

    #[test]
    fn tampered_certificate_fails() {
        let s = arbitrary3();
        let c = deduce(
            &s,
            &[(t(FormalReal::zero()), 0), (t(b(1)), 1), (t(&b(1) + &b(2)), 2)],
        )
        .unwrap();
        let forged = Certificate::from_parts(
            c.entries().to_vec(),
            c.operator().clone(),
            SymbolicFunction::Constant(qi(4)),
        );
        assert!(!verify_certificate(&s, &forged));
    }
}
