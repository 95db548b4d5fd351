//! Single equations `f(x + b) - a f(x) = g` with rational `a` and `b`.

use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exact::{rational_to_f64, FormalReal, Rational};
use crate::function::SymbolicFunction;
use crate::operator::DifferenceOperator;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaseComparison {
    Equal,
    Distinct,
}

const MAX_EXPONENT: u64 = 4096;

fn check(a: &Rational, b: &Rational) -> Result<()> {
    if a.is_zero() || b.is_zero() {
        return Err(Error::Invalid("coefficient and shift must be nonzero".into()));
    }
    Ok(())
}

/// Decides `|a1|^(1/b1) = |a2|^(1/b2)` by raising both sides to a common
/// integer power.
pub fn two_term_base_compare(a1: &Rational, b1: &Rational, a2: &Rational, b2: &Rational) -> Result<BaseComparison> {
    check(a1, b1)?;
    check(a2, b2)?;
    let l = b1.denom().lcm(b2.denom());
    let e1 = (b1 * Rational::from_integer(l.clone())).to_integer();
    let e2 = (b2 * Rational::from_integer(l)).to_integer();
    let g = e1.gcd(&e2);
    let (e1, e2) = (e1 / &g, e2 / &g);
    // |a1|^e2 = |a2|^e1
    let small = |e: &num_bigint::BigInt| e.abs().to_u64().filter(|&v| v <= MAX_EXPONENT).map(|_| e.to_i32().expect("small"));
    let (Some(p2), Some(p1)) = (small(&e2), small(&e1)) else {
        return Err(Error::Resource(format!("exponents above {MAX_EXPONENT}")));
    };
    let lhs = a1.abs().pow(p2);
    let rhs = a2.abs().pow(p1);
    Ok(if lhs == rhs { BaseComparison::Equal } else { BaseComparison::Distinct })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TwoTermKind {
    /// `f~(x + b) - f~(x) = g~`
    Periodic,
    /// `f~(x + b) + f~(x) = g~`
    AntiPeriodic,
}

/// The equation after substituting `f(x) = c^x f~(x)` with `c = |a|^(1/b)`,
/// so that `g~(x) = g(x) / (|a| c^x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoTermForm {
    pub kind: TwoTermKind,
    pub modulus: Rational,
    pub shift: Rational,
    rhs: SymbolicFunction,
}

impl TwoTermForm {
    /// The tag `(|a|, b)`.
    pub fn base(&self) -> (Rational, Rational) {
        (self.modulus.clone(), self.shift.clone())
    }

    pub fn scale_f64(&self) -> f64 {
        rational_to_f64(&self.modulus).powf(1.0 / rational_to_f64(&self.shift))
    }

    pub fn is_unscaled(&self) -> bool {
        self.modulus == Rational::from_integer(1.into())
    }

    /// The operator acting on `f~`.
    pub fn operator(&self) -> DifferenceOperator {
        let t = DifferenceOperator::translation(FormalReal::rational(self.shift.clone()));
        match self.kind {
            TwoTermKind::Periodic => t.sub(&DifferenceOperator::identity()),
            TwoTermKind::AntiPeriodic => t.add(&DifferenceOperator::identity()),
        }
    }

    /// `g~` exactly; available only when `c = 1`.
    pub fn exact_rhs(&self) -> Option<&SymbolicFunction> {
        self.is_unscaled().then_some(&self.rhs)
    }

    pub fn rhs_f64(&self, x: f64) -> Result<f64> {
        Ok(self.rhs.eval_f64(x)? / (rational_to_f64(&self.modulus) * self.scale_f64().powf(x)))
    }

    /// The general solution of the homogeneous equation.
    pub fn homogeneous_family(&self) -> String {
        let b = crate::exact::render_rational(&self.shift);
        let phi = match self.kind {
            TwoTermKind::Periodic => format!("phi periodic mod {b}"),
            TwoTermKind::AntiPeriodic => format!("phi anti-periodic mod {b}"),
        };
        if self.is_unscaled() {
            format!("phi(x), {phi}")
        } else {
            let m = crate::exact::render_rational(&self.modulus);
            if self.shift == Rational::from_integer(1.into()) {
                format!("phi(x)*{m}^x, {phi}")
            } else {
                format!("phi(x)*({m}^(1/{b}))^x, {phi}")
            }
        }
    }
}

pub fn normalize_two_term(a: &Rational, b: &Rational, g: &SymbolicFunction) -> Result<TwoTermForm> {
    check(a, b)?;
    let kind = if a.is_positive() { TwoTermKind::Periodic } else { TwoTermKind::AntiPeriodic };
    Ok(TwoTermForm { kind, modulus: a.abs(), shift: b.clone(), rhs: g.clone() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{q, qi};

    fn cmp(a1: i64, b1: Rational, a2: i64, b2: Rational) -> BaseComparison {
        two_term_base_compare(&qi(a1), &b1, &qi(a2), &b2).unwrap()
    }

    #[test]
    fn base_examples() {
        assert_eq!(cmp(4, qi(2), 2, qi(1)), BaseComparison::Equal);
        assert_eq!(cmp(9, qi(2), 3, qi(1)), BaseComparison::Equal);
        assert_eq!(cmp(2, qi(1), 3, qi(1)), BaseComparison::Distinct);
        assert_eq!(cmp(-8, q(3, 2), 4, qi(1)), BaseComparison::Equal);
        assert_eq!(cmp(2, qi(1), 2, qi(-1)), BaseComparison::Distinct);
        assert_eq!(cmp(1, qi(1), -1, q(1, 7)), BaseComparison::Equal);
    }

    #[test]
    fn normal_forms() {
        let zero = SymbolicFunction::zero();
        let f = normalize_two_term(&qi(2), &qi(1), &zero).unwrap();
        assert_eq!(f.kind, TwoTermKind::Periodic);
        assert_eq!(f.base(), (qi(2), qi(1)));
        assert_eq!(f.homogeneous_family(), "phi(x)*2^x, phi periodic mod 1");
        assert!(f.exact_rhs().is_none());

        let f = normalize_two_term(&qi(-1), &qi(1), &zero).unwrap();
        assert_eq!(f.kind, TwoTermKind::AntiPeriodic);
        assert_eq!(f.base(), (qi(1), qi(1)));

        let g = SymbolicFunction::polynomial(vec![qi(0), qi(1)]);
        let f = normalize_two_term(&qi(1), &qi(1), &g).unwrap();
        assert_eq!(f.exact_rhs(), Some(&g));
        assert_eq!(f.operator(), DifferenceOperator::delta(FormalReal::rational(qi(1))));
    }

    #[test]
    fn scaled_rhs_matches_substitution() {
        let g = SymbolicFunction::constant(qi(1));
        let f = normalize_two_term(&qi(3), &qi(1), &g).unwrap();
        let x = 0.7_f64;
        assert!((f.rhs_f64(x).unwrap() - 1.0 / 3f64.powf(x + 1.0)).abs() < 1e-12);
    }

    #[test]
    fn zero_inputs_rejected() {
        assert!(two_term_base_compare(&qi(0), &qi(1), &qi(2), &qi(1)).is_err());
        assert!(normalize_two_term(&qi(2), &qi(0), &SymbolicFunction::zero()).is_err());
    }
}
