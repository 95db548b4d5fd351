//! Evaluation at the points of one lattice, addressed by Hermite
//! coordinates. Coset indicators and lattice functions are tested with
//! machine-integer elimination; anything else, and any overflow, falls back
//! to exact evaluation at the formal point.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::{LatticeFunction, SymbolicFunction};
use crate::error::Result;
use crate::exact::{Lattice, LatticePoint, Rational};

/// Hermite coordinates in a target lattice of `x(k) - offset`, where
/// `x(k) = sum_i k_i v_i` runs over a source lattice. Everything is scaled
/// by a common denominator.
struct Member {
    gens: Vec<Vec<i128>>,
    offset: Vec<i128>,
    /// (pivot column, row)
    rows: Vec<(usize, Vec<i128>)>,
}

enum Outcome {
    In(Vec<i64>),
    Out,
    Overflow,
}

impl Member {
    fn build(source: &Lattice, target: &Lattice, offset: &crate::exact::FormalReal) -> Option<Member> {
        let dim = source
            .hnf_rows()
            .first()
            .map_or(0, Vec::len)
            .max(target.hnf_rows().first().map_or(0, Vec::len))
            .max(offset.max_index().map_or(0, |m| m + 1));
        let mut s = source.scale().lcm(target.scale());
        for c in offset.coords().values() {
            s = s.lcm(c.denom());
        }
        let widen = |row: &[BigInt], f: &BigInt| -> Option<Vec<i128>> {
            let mut out = vec![0i128; dim];
            for (o, e) in out.iter_mut().zip(row) {
                *o = (e * f).to_i128()?;
            }
            Some(out)
        };
        let fs = &s / source.scale();
        let ft = &s / target.scale();
        let gens = source.hnf_rows().iter().map(|r| widen(r, &fs)).collect::<Option<Vec<_>>>()?;
        let mut rows = Vec::with_capacity(target.rank());
        for r in target.hnf_rows() {
            let row = widen(r, &ft)?;
            let p = row.iter().position(|e| *e != 0)?;
            rows.push((p, row));
        }
        let mut off = vec![0i128; dim];
        let sr = Rational::from_integer(s);
        for (i, c) in offset.coords() {
            off[*i] = (c * &sr).to_integer().to_i128()?;
        }
        Some(Member { gens, offset: off, rows })
    }

    fn locate(&self, k: &[i64]) -> Outcome {
        let mut y = self.offset.iter().map(|o| -o).collect::<Vec<i128>>();
        for (ki, g) in k.iter().zip(&self.gens) {
            if *ki == 0 {
                continue;
            }
            let ki = i128::from(*ki);
            for (yj, gj) in y.iter_mut().zip(g) {
                match gj.checked_mul(ki).and_then(|t| yj.checked_add(t)) {
                    Some(v) => *yj = v,
                    None => return Outcome::Overflow,
                }
            }
        }
        let mut coords = Vec::with_capacity(self.rows.len());
        for (p, row) in &self.rows {
            if y[*p] % row[*p] != 0 {
                return Outcome::Out;
            }
            let q = y[*p] / row[*p];
            if q != 0 {
                for (yj, rj) in y.iter_mut().zip(row) {
                    match rj.checked_mul(q).and_then(|t| yj.checked_sub(t)) {
                        Some(v) => *yj = v,
                        None => return Outcome::Overflow,
                    }
                }
            }
            match i64::try_from(q) {
                Ok(q) => coords.push(q),
                Err(_) => return Outcome::Overflow,
            }
        }
        if y.iter().all(|v| *v == 0) {
            Outcome::In(coords)
        } else {
            Outcome::Out
        }
    }
}

enum Node<'a> {
    Const(Rational),
    Coset(Member),
    SameLattice(&'a LatticeFunction),
    OtherLattice(&'a LatticeFunction, Member),
    Sum(Vec<(Rational, Node<'a>)>),
    Generic,
}

/// `f` restricted to the points of `lattice`.
pub struct CoordEvaluator<'a> {
    lattice: &'a Lattice,
    f: &'a SymbolicFunction,
    root: Node<'a>,
}

fn compile<'a>(lattice: &Lattice, f: &'a SymbolicFunction) -> Node<'a> {
    match f {
        SymbolicFunction::Constant(c) => Node::Const(c.clone()),
        SymbolicFunction::Coset(ci) => match Member::build(lattice, ci.lattice(), ci.offset()) {
            Some(m) => Node::Coset(m),
            None => Node::Generic,
        },
        SymbolicFunction::Lattice(lf) if lf.lattice() == lattice => Node::SameLattice(lf),
        SymbolicFunction::Lattice(lf) => {
            match Member::build(lattice, lf.lattice(), &crate::exact::FormalReal::zero()) {
                Some(m) => Node::OtherLattice(lf, m),
                None => Node::Generic,
            }
        }
        SymbolicFunction::LinComb(terms) => {
            let nodes: Vec<(Rational, Node<'a>)> = terms.iter().map(|(c, g)| (c.clone(), compile(lattice, g))).collect();
            if nodes.iter().any(|(_, n)| matches!(n, Node::Generic)) {
                Node::Generic
            } else {
                Node::Sum(nodes)
            }
        }
        _ => Node::Generic,
    }
}

impl<'a> CoordEvaluator<'a> {
    pub fn new(lattice: &'a Lattice, f: &'a SymbolicFunction) -> Self {
        CoordEvaluator { lattice, f, root: compile(lattice, f) }
    }

    pub fn eval(&self, k: &[i64]) -> Result<Rational> {
        match eval_node(&self.root, k) {
            Some(v) => Ok(v),
            None => self.f.evaluate_rational(&self.lattice.point(&LatticePoint(k.to_vec()))),
        }
    }
}

fn indicator(b: bool) -> Rational {
    if b {
        Rational::one()
    } else {
        Rational::zero()
    }
}

fn eval_node(n: &Node<'_>, k: &[i64]) -> Option<Rational> {
    match n {
        Node::Const(c) => Some(c.clone()),
        Node::Coset(m) => match m.locate(k) {
            Outcome::In(_) => Some(indicator(true)),
            Outcome::Out => Some(indicator(false)),
            Outcome::Overflow => None,
        },
        Node::SameLattice(lf) => Some(lf.value_at_coords(k)),
        Node::OtherLattice(lf, m) => match m.locate(k) {
            Outcome::In(c) => Some(lf.value_at_coords(&c)),
            Outcome::Out => Some(lf.off_value().clone()),
            Outcome::Overflow => None,
        },
        Node::Sum(terms) => {
            let mut acc = Rational::zero();
            for (c, t) in terms {
                let v = eval_node(t, k)?;
                if !v.is_zero() {
                    acc += c * v;
                }
            }
            Some(acc)
        }
        Node::Generic => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{q, qi, FormalReal};
    use crate::function::LatticeRule;
    use proptest::prelude::*;

    fn b(i: usize) -> FormalReal {
        FormalReal::basis(i)
    }

    fn functions() -> Vec<SymbolicFunction> {
        let l12 = Lattice::from_generators(&[b(1), b(2)]);
        let half = Lattice::from_generators(&[b(1).scale(&q(1, 2)), &b(2) + &b(3)]);
        let lf = LatticeFunction::new(half.clone(), LatticeRule::CountPositive(vec![0, 1]), qi(-2)).unwrap();
        vec![
            SymbolicFunction::constant(q(3, 4)),
            SymbolicFunction::coset(l12.clone(), &FormalReal::zero()),
            SymbolicFunction::coset(half.clone(), &b(3).scale(&q(1, 3))),
            SymbolicFunction::coset(Lattice::from_generators(&[b(2).scale(&qi(2))]), &b(1)),
            SymbolicFunction::lattice_function(lf.clone()),
            SymbolicFunction::lin_comb([
                (qi(2), SymbolicFunction::coset(l12, &b(2))),
                (qi(-1), SymbolicFunction::lattice_function(lf)),
                (qi(1), SymbolicFunction::constant(qi(1))),
            ])
            .unwrap(),
        ]
    }

    proptest! {
        #[test]
        fn agrees_with_formal_evaluation(k in proptest::collection::vec(-5i64..=5, 3), which in 0usize..6) {
            let source = Lattice::from_generators(&[b(1), b(2).scale(&q(1, 2)), &b(3) - &b(1)]);
            let fs = functions();
            let f = &fs[which];
            let e = CoordEvaluator::new(&source, f);
            let x = source.point(&LatticePoint(k.clone()));
            prop_assert_eq!(e.eval(&k).unwrap(), f.evaluate_rational(&x).unwrap());
        }
    }
}
