//! Exact zero testing.
//!
//! A function splits as `P + T + Z`: a polynomial (with all constants and
//! off-lattice values folded in), a trigonometric part with positive
//! frequencies, and a part supported on finitely many lattice cosets. `Z`
//! has countable support while `P + T` is continuous, so the sum vanishes
//! iff `P + T` and `Z` both vanish; `P + T` vanishes iff its normalized
//! coefficients do. `Z` is split by the affine rational span of each term
//! and every group is decided on a finite set of coset representatives or,
//! for lattice functions, on a box large enough to see every breakpoint.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{CosetIndicator, LatticeFunction, Polynomial, SymbolicFunction, TrigPoly};
use crate::error::{Error, Result};
use crate::exact::{CyclotomicNumber, FormalReal, Lattice, LatticePoint, Rational, UNIT};

/// Points evaluated by a single group decision before giving up.
const ENUMERATION_BUDGET: u64 = 2_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ZeroVerdict {
    Zero,
    /// Nonzero, with a point where the value is nonzero.
    NonZero(FormalReal),
}

impl ZeroVerdict {
    pub fn is_zero(&self) -> bool {
        matches!(self, ZeroVerdict::Zero)
    }

    pub fn witness(&self) -> Option<&FormalReal> {
        match self {
            ZeroVerdict::Zero => None,
            ZeroVerdict::NonZero(w) => Some(w),
        }
    }
}

pub fn functions_equal(f: &SymbolicFunction, g: &SymbolicFunction) -> Result<ZeroVerdict> {
    zero_test(&f.sub(g)?)
}

pub fn zero_test(f: &SymbolicFunction) -> Result<ZeroVerdict> {
    let parts = Parts::split(f)?;
    if !parts.poly.is_zero() || !parts.trig.is_zero() {
        return parts.continuous_witness().map(ZeroVerdict::NonZero);
    }
    parts.decide_discrete()
}

#[derive(Clone)]
enum Term {
    Coset(CosetIndicator),
    Lat(LatticeFunction),
}

struct Parts {
    poly: Polynomial,
    trig: TrigPoly,
    discrete: Vec<(Rational, Term)>,
}

impl Parts {
    fn split(f: &SymbolicFunction) -> Result<Parts> {
        let mut parts = Parts {
            poly: Polynomial::default(),
            trig: TrigPoly::default(),
            discrete: Vec::new(),
        };
        parts.absorb(&Rational::one(), f)?;
        Ok(parts)
    }

    fn absorb(&mut self, c: &Rational, f: &SymbolicFunction) -> Result<()> {
        match f {
            SymbolicFunction::Constant(v) => self.poly.add_scaled(&Polynomial::new(vec![v.clone()]), c),
            SymbolicFunction::Polynomial(p) => self.poly.add_scaled(p, c),
            SymbolicFunction::Trig(t) => {
                let t = t.scaled(c);
                self.poly.add_scaled(&Polynomial::new(vec![t.constant().clone()]), &Rational::one());
                let t = TrigPoly::from_terms(Rational::zero(), t.terms().clone())?;
                self.trig = self.trig.add(&t)?;
            }
            SymbolicFunction::Coset(ci) => self.discrete.push((c.clone(), Term::Coset(ci.clone()))),
            SymbolicFunction::Lattice(lf) => {
                let off = Polynomial::new(vec![lf.off_value().clone()]);
                self.poly.add_scaled(&off, c);
                self.discrete.push((c.clone(), Term::Lat(lf.clone())));
            }
            SymbolicFunction::LinComb(terms) => {
                for (d, g) in terms {
                    self.absorb(&(c * d), g)?;
                }
            }
        }
        Ok(())
    }

    /// Value of the discrete part, with lattice functions counted relative
    /// to their off-lattice value.
    fn discrete_value(&self, x: &FormalReal) -> Rational {
        self.discrete.iter().map(|(c, t)| c * term_value(t, x)).sum()
    }

    fn nonzero_at(&self, x: &Rational) -> Result<bool> {
        let v = self
            .trig
            .eval(x)?
            .add(&CyclotomicNumber::rational(self.poly.eval(x)))?
            .add(&CyclotomicNumber::rational(
                self.discrete_value(&FormalReal::rational(x.clone())),
            ))?;
        Ok(!v.is_zero())
    }

    /// A rational point where the function is nonzero, assuming `P + T != 0`.
    ///
    /// Points `j/q` with `q` a prime above every denominator and lattice
    /// scale miss the discrete support. Along them `P + T` is an exponential
    /// polynomial in `j` with distinct bases once `q > 2 max freq`, so it
    /// cannot vanish at more consecutive `j` than it has terms.
    fn continuous_witness(&self) -> Result<FormalReal> {
        let mut bound = BigInt::from(self.poly.coeffs().len() + 2 * self.trig.terms().len() + 2);
        for f in self.trig.terms().keys() {
            bound = bound.max(BigInt::from(2) * f.ceil().to_integer() + 1);
            bound = bound.max(f.denom().clone());
        }
        for (_, t) in &self.discrete {
            let (lat, off) = term_support(t);
            bound = bound.max(lat.scale().clone());
            bound = bound.max(off.coord(UNIT).denom().clone());
        }
        let q = next_prime(&bound);
        let n = self.poly.coeffs().len() + 2 * self.trig.terms().len() + 1;
        for j in 1..=n {
            let x = Rational::new(BigInt::from(j), q.clone());
            if self.nonzero_at(&x)? {
                return Ok(FormalReal::rational(x));
            }
        }
        Err(Error::Undecidable("no nonzero sample found for a nonzero continuous part".into()))
    }

    fn decide_discrete(&self) -> Result<ZeroVerdict> {
        let groups = self.groups()?;
        let mut undecided: Option<String> = None;
        let mut nonzero_without_witness = false;
        for g in &groups {
            let hit = match &g.lattice_fn_lattice {
                Some(l) => self.lattice_group_nonzero(g, l),
                None => self.coset_group_nonzero(g),
            };
            match hit {
                Ok(None) => {}
                Ok(Some((p, m, e))) => match self.search_witness(g, &p, &m, e, groups.len()) {
                    Some(w) => return Ok(ZeroVerdict::NonZero(w)),
                    None => nonzero_without_witness = true,
                },
                Err(Error::Undecidable(msg)) => {
                    undecided.get_or_insert(msg);
                }
                Err(e) => return Err(e),
            }
        }
        if nonzero_without_witness {
            return Err(Error::Undecidable(
                "a lattice-supported part is nonzero but may cancel against another part".into(),
            ));
        }
        match undecided {
            Some(msg) => Err(Error::Undecidable(msg)),
            None => Ok(ZeroVerdict::Zero),
        }
    }

    /// Groups of discrete terms. Lattice functions sharing a lattice form a
    /// group that also takes every coset inside that lattice which is either
    /// of full rank or a product set in the lattice coordinates; the rest
    /// group by affine span.
    fn groups(&self) -> Result<Vec<Group>> {
        let dim = self
            .discrete
            .iter()
            .map(|(_, t)| {
                let (l, o) = term_support(t);
                l.basis_vectors()
                    .iter()
                    .chain(std::iter::once(o))
                    .filter_map(|v| v.max_index())
                    .max()
                    .map_or(1, |m| m + 1)
            })
            .max()
            .unwrap_or(1);

        let mut lf_lattices: Vec<Lattice> = Vec::new();
        for (_, t) in &self.discrete {
            if let Term::Lat(lf) = t {
                if !lf_lattices.contains(lf.lattice()) {
                    lf_lattices.push(lf.lattice().clone());
                }
            }
        }
        let mut assigned = vec![false; self.discrete.len()];
        let mut groups = Vec::new();
        for l in &lf_lattices {
            let mut members = Vec::new();
            for (i, (_, t)) in self.discrete.iter().enumerate() {
                if assigned[i] {
                    continue;
                }
                let take = match t {
                    Term::Lat(lf) => lf.lattice() == l,
                    Term::Coset(ci) => {
                        l.contains(ci.offset())
                            && l.contains_lattice(ci.lattice())
                            && (ci.lattice().rank() == l.rank()
                                || axis_steps(l, ci.lattice()).is_some())
                    }
                };
                if take {
                    assigned[i] = true;
                    members.push(i);
                }
            }
            groups.push(Group { dim: l.rank(), members, lattice_fn_lattice: Some(l.clone()) });
        }

        let mut by_span: BTreeMap<AffineSpan, Vec<usize>> = BTreeMap::new();
        for (i, (_, t)) in self.discrete.iter().enumerate() {
            if assigned[i] {
                continue;
            }
            let Term::Coset(ci) = t else { unreachable!("lattice functions are grouped above") };
            by_span.entry(AffineSpan::of(ci.lattice(), ci.offset(), dim)).or_default().push(i);
        }
        for (span, members) in by_span {
            groups.push(Group { dim: span.rows.len(), members, lattice_fn_lattice: None });
        }
        groups.sort_by(|a, b| b.dim.cmp(&a.dim));
        Ok(groups)
    }

    fn group_value(&self, g: &Group, x: &FormalReal) -> Rational {
        g.members
            .iter()
            .map(|&i| {
                let (c, t) = &self.discrete[i];
                c * term_value(t, x)
            })
            .sum()
    }

    /// A base point `o` of the group's affine span, the lattice `M` generated
    /// by every member lattice and every offset difference, and an exponent
    /// `E` with `E * M` inside each member lattice.
    fn group_frame(&self, g: &Group) -> Result<(FormalReal, Lattice, i64)> {
        let base = term_support(&self.discrete[g.members[0]].1).1.clone();
        let mut gens = Vec::new();
        for &i in &g.members {
            let (l, o) = term_support(&self.discrete[i].1);
            gens.extend(l.basis_vectors());
            gens.push(o - &base);
        }
        let m = Lattice::from_generators(&gens);
        let mut e = BigInt::one();
        for &i in &g.members {
            let (l, _) = term_support(&self.discrete[i].1);
            if l.is_trivial() && m.rank() > 0 {
                continue;
            }
            let idx = m.index_of_sublattice(l).ok_or_else(|| {
                Error::Undecidable("coset terms of one span without a common refinement".into())
            })?;
            e = e.lcm(&idx);
        }
        let e = e
            .to_i64()
            .ok_or_else(|| Error::Resource("coset refinement index too large".into()))?;
        Ok((base, m, e))
    }

    /// Some point where the group's sum is nonzero.
    fn coset_group_nonzero(&self, g: &Group) -> Result<Option<(FormalReal, Lattice, i64)>> {
        let (base, m, e) = self.group_frame(g)?;
        let mut found = None;
        for_each_in_box(m.rank(), 0, e - 1, |u| {
            let x = &base + &m.point(&LatticePoint(u.to_vec()));
            if !self.group_value(g, &x).is_zero() {
                found = Some(x);
                return false;
            }
            true
        })?;
        Ok(found.map(|x| (x, m, e)))
    }

    /// On each residue class modulo `E` the group sum is affine on the cells
    /// of a grid of axis-parallel breakpoints, so a box reaching two steps
    /// past every breakpoint sees every cell at two consecutive points.
    fn lattice_group_nonzero(
        &self,
        g: &Group,
        l: &Lattice,
    ) -> Result<Option<(FormalReal, Lattice, i64)>> {
        let mut e = BigInt::one();
        for &i in &g.members {
            if let Term::Coset(ci) = &self.discrete[i].1 {
                let step = match l.index_of_sublattice(ci.lattice()) {
                    Some(idx) => idx,
                    None => axis_steps(l, ci.lattice()).expect("absorbed cosets are product sets"),
                };
                e = e.lcm(&step);
            }
        }
        let e = e
            .to_i64()
            .ok_or_else(|| Error::Resource("coset refinement index too large".into()))?;
        let radius = self.group_radius(g, l) + 2 * e + 2;
        let mut found = None;
        for_each_in_box(l.rank(), -radius, radius, |k| {
            let x = l.point(&LatticePoint(k.to_vec()));
            if !self.group_value(g, &x).is_zero() {
                found = Some(x);
                return false;
            }
            true
        })?;
        Ok(found.map(|x| (x, l.clone(), e)))
    }

    /// A box radius, in lattice coordinates, containing every breakpoint,
    /// table key and isolated point of the group.
    fn group_radius(&self, g: &Group, l: &Lattice) -> i64 {
        g.members
            .iter()
            .map(|&i| match &self.discrete[i].1 {
                Term::Lat(lf) => {
                    let s = lf.shift().iter().map(|c| c.abs()).max().unwrap_or(0);
                    lf.rule().extent() + s
                }
                Term::Coset(ci) => l.member(ci.offset()).map_or(0, |p| p.max_norm()),
            })
            .max()
            .unwrap_or(0)
    }

    /// Moves away from `p` along a moment curve in the group's refinement
    /// lattice, which meets any proper affine subspace in at most `rank`
    /// points, then falls back to a box search for lattice functions.
    fn search_witness(
        &self,
        g: &Group,
        p: &FormalReal,
        m: &Lattice,
        e: i64,
        ngroups: usize,
    ) -> Option<FormalReal> {
        let d = m.rank();
        let steps = (d * ngroups + 2) as i64;
        for s in 0..=steps {
            let mut coords = Vec::with_capacity(d);
            let mut pw = 1i64;
            for _ in 0..d {
                pw = pw.checked_mul(s)?;
                coords.push(pw.checked_mul(e)?);
            }
            let x = p + &m.point(&LatticePoint(coords));
            if !self.discrete_value(&x).is_zero() {
                return Some(x);
            }
        }
        let l = g.lattice_fn_lattice.as_ref()?;
        let radius = self.group_radius(g, l) + 2 * e + 2 + steps;
        let mut found = None;
        for_each_in_box(l.rank(), -radius, radius, |k| {
            let x = l.point(&LatticePoint(k.to_vec()));
            if !self.discrete_value(&x).is_zero() {
                found = Some(x);
                return false;
            }
            true
        })
        .ok()?;
        found
    }
}

struct Group {
    dim: usize,
    members: Vec<usize>,
    lattice_fn_lattice: Option<Lattice>,
}

/// For `sub` inside `l` spanned by multiples of coordinate axes of `l`, the
/// lcm of those multiples.
fn axis_steps(l: &Lattice, sub: &Lattice) -> Option<BigInt> {
    let mut e = BigInt::one();
    for v in sub.basis_vectors() {
        let k = l.member(&v)?;
        let mut nz = k.0.iter().filter(|c| **c != 0);
        let step = nz.next()?;
        if nz.next().is_some() {
            return None;
        }
        e = e.lcm(&BigInt::from(step.abs()));
    }
    Some(e)
}

fn term_support(t: &Term) -> (&Lattice, &FormalReal) {
    static ORIGIN: std::sync::OnceLock<FormalReal> = std::sync::OnceLock::new();
    match t {
        Term::Coset(ci) => (ci.lattice(), ci.offset()),
        Term::Lat(lf) => (lf.lattice(), ORIGIN.get_or_init(FormalReal::zero)),
    }
}

fn term_value(t: &Term, x: &FormalReal) -> Rational {
    match t {
        Term::Coset(ci) => {
            if ci.contains(x) {
                Rational::one()
            } else {
                Rational::zero()
            }
        }
        Term::Lat(lf) => match lf.lattice().member(x) {
            Some(k) => lf.value_at_coords(&k.0) - lf.off_value(),
            None => Rational::zero(),
        },
    }
}

/// Rational affine span `offset + span(rows)` in reduced echelon form.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct AffineSpan {
    rows: Vec<Vec<Rational>>,
    offset: Vec<Rational>,
}

impl AffineSpan {
    fn of(l: &Lattice, offset: &FormalReal, dim: usize) -> AffineSpan {
        let dense = |v: &FormalReal| {
            let mut out = vec![Rational::zero(); dim];
            for (i, c) in v.coords() {
                out[*i] = c.clone();
            }
            out
        };
        let rows = rref(l.basis_vectors().iter().map(dense).collect());
        let mut off = dense(offset);
        for row in &rows {
            let p = row.iter().position(|c| !c.is_zero()).expect("nonzero echelon row");
            let f = off[p].clone();
            if !f.is_zero() {
                for (o, r) in off.iter_mut().zip(row) {
                    *o -= &f * r;
                }
            }
        }
        AffineSpan { rows, offset: off }
    }
}

fn rref(mut rows: Vec<Vec<Rational>>) -> Vec<Vec<Rational>> {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut r = 0;
    for col in 0..ncols {
        let Some(piv) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else { continue };
        rows.swap(r, piv);
        let inv = rows[r][col].recip();
        for c in rows[r].iter_mut() {
            *c *= &inv;
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][col].is_zero() {
                let f = rows[i][col].clone();
                let pivot_row = rows[r].clone();
                for (a, b) in rows[i].iter_mut().zip(&pivot_row) {
                    *a -= &f * b;
                }
            }
        }
        r += 1;
    }
    rows.truncate(r);
    rows
}

/// Visits `[lo, hi]^d` in lexicographic order until `visit` returns false.
fn for_each_in_box(d: usize, lo: i64, hi: i64, mut visit: impl FnMut(&[i64]) -> bool) -> Result<()> {
    let side = (hi - lo + 1).max(0) as u64;
    let total = side.checked_pow(d as u32).unwrap_or(u64::MAX);
    if total > ENUMERATION_BUDGET {
        return Err(Error::Resource(format!(
            "zero test needs {side}^{d} evaluations, above the budget of {ENUMERATION_BUDGET}"
        )));
    }
    if side == 0 {
        return Ok(());
    }
    let mut k = vec![lo; d];
    loop {
        if !visit(&k) {
            return Ok(());
        }
        let mut i = d;
        loop {
            if i == 0 {
                return Ok(());
            }
            i -= 1;
            if k[i] < hi {
                k[i] += 1;
                break;
            }
            k[i] = lo;
        }
    }
}

fn next_prime(above: &BigInt) -> BigInt {
    let mut n = above + 1;
    loop {
        if is_prime(&n) {
            return n;
        }
        n += 1;
    }
}

fn is_prime(n: &BigInt) -> bool {
    if n < &BigInt::from(2) {
        return false;
    }
    let mut d = BigInt::from(2);
    while &d * &d <= *n {
        if n.is_multiple_of(&d) {
            return false;
        }
        d += 1;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{q, qi};
    use crate::function::LatticeRule;
    use crate::operator::DifferenceOperator;

    fn b(i: usize) -> FormalReal {
        FormalReal::basis(i)
    }

    fn chi(gens: &[FormalReal], off: FormalReal) -> SymbolicFunction {
        SymbolicFunction::coset(Lattice::from_generators(gens), &off)
    }

    #[test]
    fn commuting_deltas_on_indicator() {
        let c = chi(&[b(2)], FormalReal::zero());
        let d1 = DifferenceOperator::delta(b(1));
        let d2 = DifferenceOperator::delta(b(2));
        let lhs = c.apply(&d1).unwrap().apply(&d2).unwrap();
        let rhs = c.apply(&d2).unwrap().apply(&d1).unwrap();
        assert!(functions_equal(&lhs, &rhs).unwrap().is_zero());
    }

    #[test]
    fn cosets_off_their_linear_span() {
        let half = FormalReal::rational(q(1, 2));
        let one = FormalReal::rational(qi(1));
        // b1 + <1/2> = (b1 + <1>) + (b1 + 1/2 + <1>)
        let whole = chi(&[half.clone()], b(1));
        let parts = chi(&[one.clone()], b(1)).add(&chi(&[one.clone()], &b(1) + &half)).unwrap();
        assert!(functions_equal(&whole, &parts).unwrap().is_zero());
        let w = functions_equal(&whole, &chi(&[one], b(1))).unwrap();
        let x = w.witness().expect("they differ");
        assert_eq!(x, &(&b(1) + &half));
    }

    #[test]
    fn different_cosets_differ_at_origin() {
        let f = chi(&[b(1)], FormalReal::zero());
        let g = chi(&[b(1)], b(2));
        let v = functions_equal(&f, &g).unwrap();
        let w = v.witness().expect("nonzero");
        let diff = f.sub(&g).unwrap();
        assert!(!diff.evaluate_rational(w).unwrap().is_zero());
        assert_eq!(f.sub(&g).unwrap().evaluate_rational(&FormalReal::zero()).unwrap(), qi(1));
    }

    #[test]
    fn continuous_parts() {
        let c = SymbolicFunction::cos2pi(qi(1)).unwrap();
        assert!(zero_test(&c.sub(&c).unwrap()).unwrap().is_zero());
        let x2 = SymbolicFunction::polynomial(vec![qi(0), qi(0), qi(1)]);
        let x2p1 = SymbolicFunction::polynomial(vec![qi(1), qi(0), qi(1)]);
        let v = functions_equal(&x2p1, &x2).unwrap();
        assert!(!v.is_zero());
        // sin(2 pi 5 x) vanishes on every j/5
        let s = SymbolicFunction::trig(TrigPoly::cos(qi(5), q(-1, 4)).unwrap());
        let w = zero_test(&s).unwrap();
        let x = w.witness().unwrap();
        assert!(!s.evaluate(x).unwrap().is_zero());
    }

    #[test]
    fn coset_refinement() {
        // chi_<b1> = chi_<2 b1> + chi_<2 b1> + b1
        let whole = chi(&[b(1)], FormalReal::zero());
        let even = chi(&[b(1).scale(&qi(2))], FormalReal::zero());
        let odd = chi(&[b(1).scale(&qi(2))], b(1));
        assert!(functions_equal(&whole, &even.add(&odd).unwrap()).unwrap().is_zero());
        assert!(!functions_equal(&whole, &even).unwrap().is_zero());
    }

    #[test]
    fn lattice_function_cancels_point_indicators() {
        let l = Lattice::from_generators(&[b(1)]);
        let table = LatticeRule::Table { entries: [(vec![0], qi(1))].into_iter().collect(), default: qi(0) };
        let f = SymbolicFunction::Lattice(LatticeFunction::new(l, table, qi(0)).unwrap());
        let point = SymbolicFunction::point_indicator(&FormalReal::zero());
        assert!(functions_equal(&f, &point).unwrap().is_zero());
        let d = DifferenceOperator::delta(b(1));
        let lhs = f.apply(&d).unwrap();
        let rhs = point.apply(&d).unwrap();
        assert!(functions_equal(&lhs, &rhs).unwrap().is_zero());
    }

    #[test]
    fn count_rule_telescopes() {
        // Delta_{b1} of |{i : k_i > 0}| on <b1, b2> is chi_{k1 = 0} on the lattice
        let l = Lattice::from_generators(&[b(1), b(2)]);
        let f = SymbolicFunction::Lattice(
            LatticeFunction::new(l.clone(), LatticeRule::CountPositive(vec![0, 1]), qi(0)).unwrap(),
        );
        let df = f.apply(&DifferenceOperator::delta(b(1))).unwrap();
        let expected = chi(&[b(2)], FormalReal::zero());
        assert!(functions_equal(&df, &expected).unwrap().is_zero());
        let wrong = chi(&[b(2)], b(1));
        assert!(!functions_equal(&df, &wrong).unwrap().is_zero());
    }

    #[test]
    fn off_values_join_the_constant() {
        let l = Lattice::from_generators(&[b(1)]);
        let f = SymbolicFunction::Lattice(
            LatticeFunction::new(l.clone(), LatticeRule::Const(qi(1)), qi(1)).unwrap(),
        );
        assert!(functions_equal(&f, &SymbolicFunction::Constant(qi(1))).unwrap().is_zero());
        let g = SymbolicFunction::Lattice(LatticeFunction::new(l, LatticeRule::Const(qi(2)), qi(1)).unwrap());
        assert!(!functions_equal(&g, &SymbolicFunction::Constant(qi(1))).unwrap().is_zero());
    }
}
