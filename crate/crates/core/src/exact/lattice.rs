use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::{floor_div, lcm_all, BasisContext, FormalReal, Rational};

/// Coordinates of a lattice element in the lattice's Hermite basis.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LatticePoint(pub Vec<i64>);

impl LatticePoint {
    pub fn zero(rank: usize) -> Self {
        LatticePoint(vec![0; rank])
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn add(&self, other: &LatticePoint) -> LatticePoint {
        LatticePoint(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &LatticePoint) -> LatticePoint {
        LatticePoint(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn max_norm(&self) -> i64 {
        self.0.iter().map(|c| c.abs()).max().unwrap_or(0)
    }
}

impl fmt::Display for LatticePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// A finitely generated subgroup of the formal reals, stored as the integer
/// row Hermite normal form of its generators scaled by `scale`.
///
/// Row `j` of `basis` divided by `scale` is the `j`-th basis vector. Pivot
/// columns strictly increase, pivots are positive and entries above a pivot
/// lie in `[0, pivot)`, so two lattices are equal iff their fields are.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Lattice {
    dim: usize,
    basis: Vec<Vec<BigInt>>,
    scale: BigInt,
}

impl Lattice {
    pub fn trivial() -> Self {
        Lattice {
            dim: 0,
            basis: Vec::new(),
            scale: BigInt::one(),
        }
    }

    /// The canonical lattice equal to the integer span of `gens`.
    pub fn from_generators<'a>(gens: impl IntoIterator<Item = &'a FormalReal>) -> Self {
        let gens: Vec<&FormalReal> = gens.into_iter().filter(|g| !g.is_zero()).collect();
        let dim = gens.iter().filter_map(|g| g.max_index()).max().map_or(0, |m| m + 1);
        if gens.is_empty() {
            return Lattice::trivial();
        }
        let scale = lcm_all(
            gens.iter()
                .flat_map(|g| g.coords().values().map(|c| c.denom()))
                .collect::<Vec<_>>()
                .iter()
                .copied(),
        );
        let rows: Vec<Vec<BigInt>> = gens
            .iter()
            .map(|g| {
                let mut row = vec![BigInt::zero(); dim];
                for (i, c) in g.coords() {
                    row[*i] = (c * Rational::from_integer(scale.clone())).to_integer();
                }
                row
            })
            .collect();
        let basis = row_hnf(rows, dim);
        let mut lat = Lattice { dim, basis, scale };
        lat.reduce_scale();
        lat
    }

    fn reduce_scale(&mut self) {
        let mut g = self.scale.clone();
        for row in &self.basis {
            for e in row {
                g = g.gcd(e);
            }
        }
        if !g.is_one() && !g.is_zero() {
            self.scale /= &g;
            for row in &mut self.basis {
                for e in row.iter_mut() {
                    *e /= &g;
                }
            }
        }
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn scale(&self) -> &BigInt {
        &self.scale
    }

    /// Integer HNF rows (divide by [`Lattice::scale`] for real coordinates).
    pub fn hnf_rows(&self) -> &[Vec<BigInt>] {
        &self.basis
    }

    pub fn basis_vectors(&self) -> Vec<FormalReal> {
        let s = Rational::from_integer(self.scale.clone());
        self.basis
            .iter()
            .map(|row| {
                FormalReal::from_coords(
                    row.iter()
                        .enumerate()
                        .map(|(i, e)| (i, Rational::from_integer(e.clone()) / &s)),
                )
            })
            .collect()
    }

    fn pivot(&self, row: usize) -> usize {
        self.basis[row].iter().position(|e| !e.is_zero()).expect("zero HNF row")
    }

    /// Scaled coordinate vector of `x`, or `None` if `x` uses coordinates
    /// beyond the lattice's ambient span.
    fn scaled(&self, x: &FormalReal) -> Option<Vec<Rational>> {
        if x.max_index().is_some_and(|m| m >= self.dim) {
            return None;
        }
        let s = Rational::from_integer(self.scale.clone());
        let mut v = vec![Rational::zero(); self.dim];
        for (i, c) in x.coords() {
            v[*i] = c * &s;
        }
        Some(v)
    }

    /// Hermite coordinates of `x` if `x` lies in the lattice.
    pub fn member(&self, x: &FormalReal) -> Option<LatticePoint> {
        if x.is_zero() {
            return Some(LatticePoint::zero(self.rank()));
        }
        let v = self.scaled(x)?;
        if v.iter().any(|c| !c.is_integer()) {
            return None;
        }
        let mut v: Vec<BigInt> = v.into_iter().map(|c| c.to_integer()).collect();
        let mut out = Vec::with_capacity(self.rank());
        for (j, row) in self.basis.iter().enumerate() {
            let p = self.pivot(j);
            let (k, r) = v[p].div_rem(&row[p]);
            if !r.is_zero() {
                return None;
            }
            if !k.is_zero() {
                for (vi, ri) in v.iter_mut().zip(row) {
                    *vi -= &k * ri;
                }
            }
            out.push(k.to_i64().expect("lattice coordinate overflow"));
        }
        v.iter().all(Zero::is_zero).then_some(LatticePoint(out))
    }

    pub fn contains(&self, x: &FormalReal) -> bool {
        self.member(x).is_some()
    }

    /// The lattice element with the given Hermite coordinates.
    pub fn point(&self, p: &LatticePoint) -> FormalReal {
        assert_eq!(p.0.len(), self.rank(), "lattice point rank mismatch");
        let mut acc = vec![BigInt::zero(); self.dim];
        for (k, row) in p.0.iter().zip(&self.basis) {
            if *k != 0 {
                let k = BigInt::from(*k);
                for (a, r) in acc.iter_mut().zip(row) {
                    *a += &k * r;
                }
            }
        }
        if self.scale.is_one() {
            return FormalReal::from_coords(
                acc.into_iter().enumerate().map(|(i, e)| (i, Rational::from_integer(e))),
            );
        }
        FormalReal::from_coords(
            acc.into_iter()
                .enumerate()
                .map(|(i, e)| (i, Rational::new(e, self.scale.clone()))),
        )
    }

    /// Canonical representative of the coset `x + L`.
    pub fn reduce(&self, x: &FormalReal) -> FormalReal {
        let s = Rational::from_integer(self.scale.clone());
        let mut v = vec![Rational::zero(); self.dim.max(x.max_index().map_or(0, |m| m + 1))];
        for (i, c) in x.coords() {
            v[*i] = c * &s;
        }
        for (j, row) in self.basis.iter().enumerate() {
            let p = self.pivot(j);
            let ratio = &v[p] / Rational::from_integer(row[p].clone());
            let t = ratio.floor().to_integer();
            if !t.is_zero() {
                for (vi, ri) in v.iter_mut().zip(row) {
                    *vi -= Rational::from_integer(&t * ri);
                }
            }
        }
        FormalReal::from_coords(v.into_iter().enumerate().map(|(i, c)| (i, c / &s)))
    }

    pub fn same_coset(&self, a: &FormalReal, b: &FormalReal) -> bool {
        self.contains(&(a - b))
    }

    /// True when every element of `other` lies in `self`.
    pub fn contains_lattice(&self, other: &Lattice) -> bool {
        other.basis_vectors().iter().all(|v| self.contains(v))
    }

    /// The lattice generated by both.
    pub fn join(&self, other: &Lattice) -> Lattice {
        let gens: Vec<FormalReal> = self
            .basis_vectors()
            .into_iter()
            .chain(other.basis_vectors())
            .collect();
        Lattice::from_generators(&gens)
    }

    /// Index of `sub` in `self`, if `sub` is a full-rank sublattice.
    pub fn index_of_sublattice(&self, sub: &Lattice) -> Option<BigInt> {
        if sub.rank() != self.rank() || !self.contains_lattice(sub) {
            return None;
        }
        let rows: Vec<Vec<BigInt>> = sub
            .basis_vectors()
            .iter()
            .map(|v| {
                self.member(v)
                    .expect("checked containment")
                    .0
                    .into_iter()
                    .map(BigInt::from)
                    .collect()
            })
            .collect();
        let h = row_hnf(rows, self.rank());
        if h.len() != self.rank() {
            return None;
        }
        Some(
            h.iter()
                .enumerate()
                .map(|(i, r)| r[i].abs())
                .fold(BigInt::one(), |a, b| a * b),
        )
    }

    pub fn render(&self, ctx: &BasisContext) -> String {
        let gens: Vec<String> = self.basis_vectors().iter().map(|v| ctx.render(v)).collect();
        format!("<{}>", gens.join(", "))
    }
}

/// Row-style Hermite normal form of an integer matrix; zero rows dropped.
pub(crate) fn row_hnf(mut rows: Vec<Vec<BigInt>>, dim: usize) -> Vec<Vec<BigInt>> {
    let mut rank = 0usize;
    for col in 0..dim {
        loop {
            // smallest nonzero magnitude among unprocessed rows
            let mut best: Option<usize> = None;
            for r in rank..rows.len() {
                if rows[r][col].is_zero() {
                    continue;
                }
                if best.map_or(true, |b| rows[r][col].abs() < rows[b][col].abs()) {
                    best = Some(r);
                }
            }
            let Some(b) = best else { break };
            rows.swap(rank, b);
            let mut done = true;
            for r in rank + 1..rows.len() {
                if rows[r][col].is_zero() {
                    continue;
                }
                let qt = floor_div(&rows[r][col], &rows[rank][col]);
                let pivot_row = rows[rank].clone();
                for (x, p) in rows[r].iter_mut().zip(&pivot_row) {
                    *x -= &qt * p;
                }
                if !rows[r][col].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if rank < rows.len() && !rows[rank][col].is_zero() {
            if rows[rank][col].is_negative() {
                for x in rows[rank].iter_mut() {
                    *x = -&*x;
                }
            }
            let pivot_row = rows[rank].clone();
            for r in 0..rank {
                let qt = floor_div(&rows[r][col], &pivot_row[col]);
                if !qt.is_zero() {
                    for (x, p) in rows[r].iter_mut().zip(&pivot_row) {
                        *x -= &qt * p;
                    }
                }
            }
            rank += 1;
        }
    }
    rows.truncate(rank);
    rows
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{qi, UNIT};

    fn b(i: usize) -> FormalReal {
        FormalReal::basis(i)
    }

    fn ints(rows: &[Vec<BigInt>]) -> Vec<Vec<i64>> {
        rows.iter()
            .map(|r| r.iter().map(|e| e.to_i64().unwrap()).collect())
            .collect()
    }

    #[test]
    fn gcd_of_multiples() {
        let l = Lattice::from_generators(&[b(1).scale(&qi(2)), b(1).scale(&qi(3))]);
        assert_eq!(l, Lattice::from_generators(&[b(1)]));
        assert_eq!(l.rank(), 1);
    }

    #[test]
    fn index_two_sublattice() {
        let l = Lattice::from_generators(&[&b(1) + &b(2), &b(1) - &b(2)]);
        // rows over coordinates (1, b1, b2)
        assert_eq!(ints(l.hnf_rows()), vec![vec![0, 1, 1], vec![0, 0, 2]]);
        let full = Lattice::from_generators(&[b(1), b(2)]);
        assert_eq!(full.index_of_sublattice(&l), Some(BigInt::from(2)));
    }

    #[test]
    fn membership_examples() {
        let l = Lattice::from_generators(&[b(1), b(2)]);
        let x = &b(1) + &b(2).scale(&qi(5));
        assert_eq!(l.member(&x), Some(LatticePoint(vec![1, 5])));

        let l23 = Lattice::from_generators(&[b(2), b(3)]);
        assert_eq!(l23.member(&b(1)), None);

        let l = Lattice::from_generators(&[&b(1) + &b(2), &b(1) - &b(2)]);
        let p = l.member(&b(2).scale(&qi(2))).unwrap();
        // Hermite basis is (b1+b2, 2 b2): 2 b2 = 0*(b1+b2) + 1*(2 b2)
        assert_eq!(l.point(&p), b(2).scale(&qi(2)));
        assert_eq!(l.member(&b(2)), None);
    }

    #[test]
    fn rational_shifts() {
        let half = FormalReal::rational(crate::exact::q(1, 2));
        let l = Lattice::from_generators(&[half.clone()]);
        assert_eq!(l.member(&FormalReal::rational(qi(3))), Some(LatticePoint(vec![6])));
        assert_eq!(l.member(&FormalReal::rational(crate::exact::q(1, 3))), None);
        assert_eq!(l.basis_vectors(), vec![half]);
        let _ = UNIT;
    }

    #[test]
    fn coset_reduction_is_canonical() {
        let l = Lattice::from_generators(&[b(1).scale(&qi(2))]);
        let x = &b(1).scale(&qi(7)) + &b(2);
        let y = &b(1).scale(&qi(-3)) + &b(2);
        assert_eq!(l.reduce(&x), l.reduce(&y));
        assert_eq!(l.reduce(&x), &b(1) + &b(2));
    }

    #[test]
    fn trivial_lattice() {
        let l = Lattice::from_generators(&[]);
        assert!(l.is_trivial());
        assert_eq!(l.member(&FormalReal::zero()), Some(LatticePoint(vec![])));
        assert_eq!(l.member(&b(1)), None);
        assert_eq!(l.render(&BasisContext::numbered(1)), "<>");
    }
}
