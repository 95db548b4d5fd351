//! Polynomial ansatz: unknown coefficients matched degree by degree.

use num_traits::Zero;

use super::linear::{Eliminator, Insert, SparseRow};
use super::EquationSystem;
use crate::error::{Error, Result};
use crate::exact::Rational;
use crate::function::{Polynomial, SymbolicFunction};

fn rhs_polynomial(g: &SymbolicFunction, i: usize) -> Result<Polynomial> {
    match g {
        g if g.is_trivially_zero() => Ok(Polynomial::default()),
        SymbolicFunction::Constant(c) => Ok(Polynomial::new(vec![c.clone()])),
        SymbolicFunction::Polynomial(p) => Ok(p.clone()),
        _ => Err(Error::Shape(format!("right-hand side {i} is not a polynomial"))),
    }
}

/// Largest right-hand side degree plus the number of equations plus 2.
pub fn default_degree_bound(s: &EquationSystem) -> Result<usize> {
    let mut deg = 0;
    for (i, (_, g)) in s.equations().iter().enumerate() {
        deg = deg.max(rhs_polynomial(g, i)?.degree().unwrap_or(0));
    }
    Ok(deg + s.len() + 2)
}

/// A polynomial of degree at most `degree_bound` solving every equation,
/// with free coefficients set to zero, or `None` if there is none.
pub fn solve_polynomial(s: &EquationSystem, degree_bound: usize) -> Result<Option<Polynomial>> {
    let mut elim = Eliminator::new(false);
    for (i, (d, g)) in s.equations().iter().enumerate() {
        let g = rhs_polynomial(g, i)?;
        let mut shifts = Vec::with_capacity(d.terms().len());
        for (c, b) in d.terms() {
            let b = b
                .as_rational()
                .ok_or_else(|| Error::Representability(format!("equation {i} shifts by a non-rational amount")))?;
            shifts.push((c.clone(), b));
        }
        // column k: D applied to x^k
        let mut images = Vec::with_capacity(degree_bound + 1);
        for k in 0..=degree_bound {
            let mut mono = vec![Rational::zero(); k + 1];
            mono[k] = Rational::from_integer(1.into());
            let mono = Polynomial::new(mono);
            let mut acc = vec![Rational::zero(); k + 1];
            for (c, b) in &shifts {
                for (j, v) in mono.shifted(b).coeffs().iter().enumerate() {
                    acc[j] += c * v;
                }
            }
            images.push(acc);
        }
        let top = degree_bound.max(g.degree().unwrap_or(0));
        for m in 0..=top {
            let row: SparseRow = images
                .iter()
                .enumerate()
                .filter_map(|(k, img)| img.get(m).filter(|v| !v.is_zero()).map(|v| (k, v.clone())))
                .collect();
            let rhs = g.coeffs().get(m).cloned().unwrap_or_else(Rational::zero);
            if let Insert::Inconsistent(_) = elim.insert(row, rhs, 0) {
                return Ok(None);
            }
        }
    }
    Ok(Some(Polynomial::new(elim.solve(degree_bound + 1))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{qi, FormalReal};
    use crate::operator::DifferenceOperator;

    fn delta1() -> DifferenceOperator {
        DifferenceOperator::delta(FormalReal::rational(qi(1)))
    }

    fn poly(c: &[i64]) -> Polynomial {
        Polynomial::new(c.iter().map(|&x| qi(x)).collect())
    }

    #[test]
    fn constant_rhs_gives_identity() {
        let s = EquationSystem::new(vec![(delta1(), SymbolicFunction::constant(qi(1)))]);
        let bound = default_degree_bound(&s).unwrap();
        assert_eq!(bound, 3);
        assert_eq!(solve_polynomial(&s, bound).unwrap(), Some(poly(&[0, 1])));
    }

    #[test]
    fn linear_rhs() {
        let s = EquationSystem::new(vec![(delta1(), SymbolicFunction::polynomial(vec![qi(0), qi(2)]))]);
        let f = solve_polynomial(&s, default_degree_bound(&s).unwrap()).unwrap().unwrap();
        assert_eq!(f, poly(&[0, -1, 1]));
    }

    #[test]
    fn contradictory_pair() {
        let s = EquationSystem::new(vec![
            (delta1(), SymbolicFunction::constant(qi(1))),
            (delta1(), SymbolicFunction::zero()),
        ]);
        assert_eq!(solve_polynomial(&s, default_degree_bound(&s).unwrap()).unwrap(), None);
    }

    #[test]
    fn bound_too_small() {
        let s = EquationSystem::new(vec![(delta1(), SymbolicFunction::polynomial(vec![qi(0), qi(2)]))]);
        assert_eq!(solve_polynomial(&s, 1).unwrap(), None);
    }

    #[test]
    fn symbolic_shift_is_rejected() {
        let s = EquationSystem::new(vec![(
            DifferenceOperator::delta(FormalReal::basis(1)),
            SymbolicFunction::constant(qi(1)),
        )]);
        assert!(matches!(solve_polynomial(&s, 2), Err(Error::Representability(_))));
    }
}
