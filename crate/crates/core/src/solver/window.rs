//! Exact linear algebra on a finite window of the shift lattice: unknowns
//! are the values `f(p)`, one constraint per equation and point whose
//! stencil stays inside the window.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::linear::{Eliminator, Insert, SparseRow};
use super::simplex::{minimize, LpOutcome};
use super::{deduce, lattice_solution, Certificate, EquationSystem, VanishingCertificate, Window};
use crate::error::{Error, Result};
use crate::exact::{FormalReal, Lattice, LatticePoint, Rational};
use crate::function::{CoordEvaluator, SymbolicFunction};
use crate::operator::DifferenceOperator;

/// Unknown count above which the sup-norm program is refused.
const LP_VARIABLE_CAP: usize = 20_000;

#[derive(Debug, Clone, PartialEq)]
pub enum WindowSolution {
    /// One solution, free values set to 0, keyed by Hermite coordinates.
    Values(BTreeMap<Vec<i64>, Rational>),
    /// The constraints are contradictory on the window.
    Inconsistent(Certificate),
}

struct Rows {
    points: Vec<LatticePoint>,
    xs: Vec<FormalReal>,
    rows: Vec<(SparseRow, Rational, usize, usize)>,
}

impl Rows {
    fn build(s: &EquationSystem, window: Window) -> Result<Rows> {
        let lattice = s.shift_lattice();
        let points = window.points(lattice.rank());
        let index: HashMap<&[i64], usize> =
            points.iter().enumerate().map(|(i, p)| (p.0.as_slice(), i)).collect();
        let xs: Vec<FormalReal> = points.iter().map(|p| lattice.point(p)).collect();
        let stencils = s.stencils();
        let evals: Vec<CoordEvaluator> = s.equations().iter().map(|(_, g)| CoordEvaluator::new(lattice, g)).collect();
        let mut rows = Vec::new();
        for (pi, p) in points.iter().enumerate() {
            for (eq, stencil) in stencils.iter().enumerate() {
                let mut row = SparseRow::new();
                let mut inside = true;
                for (a, k) in stencil {
                    let q: Vec<i64> = p.0.iter().zip(k).map(|(x, y)| x + y).collect();
                    match index.get(q.as_slice()) {
                        Some(&qi) => {
                            *row.entry(qi).or_insert_with(Rational::zero) += a;
                        }
                        None => {
                            inside = false;
                            break;
                        }
                    }
                }
                if !inside {
                    continue;
                }
                let g = evals[eq].eval(&p.0)?;
                rows.push((row, g, eq, pi));
            }
        }
        Ok(Rows { points, xs, rows })
    }

    fn eliminate(&self, track: bool, pins: &[usize]) -> (Eliminator, Option<SparseRow>) {
        let mut e = Eliminator::new(track);
        for (tag, (row, g, _, _)) in self.rows.iter().enumerate() {
            if let Insert::Inconsistent(r) = e.insert(row.clone(), g.clone(), tag) {
                return (e, Some(r.provenance));
            }
        }
        for (k, &p) in pins.iter().enumerate() {
            let row = SparseRow::from([(p, Rational::one())]);
            if let Insert::Inconsistent(r) = e.insert(row, Rational::zero(), self.rows.len() + k) {
                return (e, Some(r.provenance));
            }
        }
        (e, None)
    }

    /// The contradiction found by a tracked run, as a deduction from the
    /// equation rows it combines.
    fn certificate(&self, s: &EquationSystem, provenance: &SparseRow) -> Result<Certificate> {
        let mut entries = Vec::new();
        for (&tag, c) in provenance {
            if let Some((_, _, eq, pi)) = self.rows.get(tag) {
                entries.push((DifferenceOperator::translation(self.xs[*pi].clone()).scale(c), *eq));
            }
        }
        let cert = deduce(s, &entries)?;
        if cert.rhs_at_zero().is_ok_and(|g0| g0.is_negative()) {
            let flipped: Vec<_> = entries.into_iter().map(|(a, eq)| (a.neg(), eq)).collect();
            return deduce(s, &flipped);
        }
        Ok(cert)
    }

    fn values(&self, x: Vec<Rational>) -> BTreeMap<Vec<i64>, Rational> {
        self.points.iter().map(|p| p.0.clone()).zip(x).collect()
    }
}

/// Solves on the window, or returns the combination of constraints that
/// reduces to `0 = c` with `c != 0`.
pub fn eliminate_on_window(s: &EquationSystem, window: Window) -> Result<WindowSolution> {
    let rows = Rows::build(s, window)?;
    let (e, bad) = rows.eliminate(false, &[]);
    if bad.is_some() {
        let (_, prov) = rows.eliminate(true, &[]);
        let cert = rows.certificate(s, &prov.expect("same rows, same verdict"))?;
        return Ok(WindowSolution::Inconsistent(cert));
    }
    Ok(WindowSolution::Values(rows.values(e.solve(rows.points.len()))))
}

#[derive(Debug, Clone, PartialEq)]
pub enum SupNormOutcome {
    /// Least possible `max |f(p)|` over window solutions, with an optimal
    /// assignment.
    Optimal { value: Rational, values: BTreeMap<Vec<i64>, Rational> },
    Infeasible(Certificate),
}

/// Minimizes `max |f(p)|` over the window subject to every in-window
/// constraint. The equality constraints are eliminated first, leaving a
/// small program in the free values.
pub fn min_sup_norm_on_window(s: &EquationSystem, window: Window) -> Result<SupNormOutcome> {
    let rows = Rows::build(s, window)?;
    let n = rows.points.len();
    if n > LP_VARIABLE_CAP {
        return Err(Error::Resource(format!("{n} window unknowns exceed the program cap")));
    }
    let (e, bad) = rows.eliminate(false, &[]);
    if bad.is_some() {
        let (_, prov) = rows.eliminate(true, &[]);
        return Ok(SupNormOutcome::Infeasible(rows.certificate(s, &prov.expect("same verdict"))?));
    }
    let (affine, free) = e.affine_solution(n);
    let nz = free.len();
    // variables: z+ (nz), z- (nz), t
    let width = 2 * nz + 1;
    let mut seen = std::collections::BTreeSet::new();
    let mut a = Vec::new();
    let mut b = Vec::new();
    for (c, lin) in &affine {
        for sign in [1i64, -1] {
            let sg = Rational::from_integer(sign.into());
            let mut row = vec![Rational::zero(); width];
            for (&j, v) in lin {
                row[j] = &sg * v;
                row[nz + j] = -(&sg * v);
            }
            row[2 * nz] = -Rational::one();
            let rhs = -(&sg * c);
            if seen.insert((row.clone(), rhs.clone())) {
                a.push(row);
                b.push(rhs);
            }
        }
    }
    let mut cost = vec![Rational::zero(); width];
    cost[2 * nz] = Rational::one();
    match minimize(&cost, &a, &b) {
        LpOutcome::Optimal { value, x } => {
            let z: Vec<Rational> = (0..nz).map(|j| &x[j] - &x[nz + j]).collect();
            let vals = affine
                .iter()
                .map(|(c, lin)| c + lin.iter().map(|(&j, v)| v * &z[j]).sum::<Rational>())
                .collect();
            Ok(SupNormOutcome::Optimal { value, values: rows.values(vals) })
        }
        // t large makes every row feasible and t >= 0 bounds the objective
        other => Err(Error::Invalid(format!("sup-norm program ended as {other:?}"))),
    }
}

/// Where a solution is required to vanish.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum VanishSet {
    /// On the union of the given cosets `L + c`.
    Cosets(Vec<(Lattice, FormalReal)>),
    /// Everywhere outside the lattice.
    OffLattice(Lattice),
}

impl VanishSet {
    pub fn contains(&self, x: &FormalReal) -> bool {
        match self {
            VanishSet::Cosets(cs) => cs.iter().any(|(l, c)| l.contains(&(x - c))),
            VanishSet::OffLattice(l) => !l.contains(x),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum VanishingOutcome {
    Solution {
        function: SymbolicFunction,
        values: BTreeMap<Vec<i64>, Rational>,
    },
    Obstruction(VanishingCertificate),
}

/// Window elimination with `f(p) = 0` added for every window point in the
/// vanishing set. A contradiction combines equation rows into an operator
/// supported on pinned points with a right-hand side nonzero at 0.
pub fn solve_vanishing_on(s: &EquationSystem, vanish: &VanishSet, window: Window) -> Result<VanishingOutcome> {
    let rows = Rows::build(s, window)?;
    let pins: Vec<usize> = (0..rows.points.len()).filter(|&i| vanish.contains(&rows.xs[i])).collect();
    let (e, bad) = rows.eliminate(false, &pins);
    if bad.is_some() {
        let (_, prov) = rows.eliminate(true, &pins);
        let deduction = rows.certificate(s, &prov.expect("same verdict"))?;
        return Ok(VanishingOutcome::Obstruction(VanishingCertificate { deduction, vanish: vanish.clone() }));
    }
    let values = rows.values(e.solve(rows.points.len()));
    let (function, _) = lattice_solution(s.shift_lattice(), &values)?;
    Ok(VanishingOutcome::Solution { function, values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::qi;
    use crate::solver::{verify_certificate, verify_vanishing_certificate};

    fn b(i: usize) -> FormalReal {
        FormalReal::basis(i)
    }

    #[test]
    fn anti_periodic_window_solution_is_zero() {
        let d = DifferenceOperator::translation(b(1)).add(&DifferenceOperator::identity());
        let s = EquationSystem::new(vec![(d, SymbolicFunction::zero())]);
        let WindowSolution::Values(v) = eliminate_on_window(&s, Window::new(3)).unwrap() else { panic!() };
        assert!(v.values().all(Zero::is_zero));
    }

    #[test]
    fn alternating_solution_with_rhs() {
        // f(x + b1) + f(x) = 2 * chi_{<b1>}: f = 1 is one solution
        let d = DifferenceOperator::translation(b(1)).add(&DifferenceOperator::identity());
        let g = SymbolicFunction::coset(Lattice::from_generators(&[b(1)]), &FormalReal::zero()).scale(&qi(2)).unwrap();
        let s = EquationSystem::new(vec![(d, g)]);
        let WindowSolution::Values(v) = eliminate_on_window(&s, Window::new(3)).unwrap() else { panic!() };
        for k in -3..3 {
            assert_eq!(&v[&vec![k + 1]] + &v[&vec![k]], qi(2));
        }
    }

    #[test]
    fn contradiction_gives_certificate() {
        let one = FormalReal::rational(qi(1));
        let s = EquationSystem::new(vec![
            (DifferenceOperator::delta(one.clone()), SymbolicFunction::Constant(qi(1))),
            (DifferenceOperator::delta(one), SymbolicFunction::zero()),
        ]);
        let WindowSolution::Inconsistent(c) = eliminate_on_window(&s, Window::new(2)).unwrap() else { panic!() };
        assert!(verify_certificate(&s, &c));
    }

    #[test]
    fn sup_norm_of_homogeneous_difference() {
        let s = EquationSystem::new(vec![(DifferenceOperator::delta(b(1)), SymbolicFunction::zero())]);
        let SupNormOutcome::Optimal { value, .. } = min_sup_norm_on_window(&s, Window::new(3)).unwrap() else {
            panic!()
        };
        assert_eq!(value, qi(0));
    }

    #[test]
    fn sup_norm_of_unit_steps() {
        // f(k + 1) - f(k) = 1 on [-2, 2]: values spread over 4, optimum 2
        let s = EquationSystem::new(vec![(DifferenceOperator::delta(b(1)), SymbolicFunction::Constant(qi(1)))]);
        let SupNormOutcome::Optimal { value, values } = min_sup_norm_on_window(&s, Window::new(2)).unwrap() else {
            panic!()
        };
        assert_eq!(value, qi(2));
        assert_eq!(&values[&vec![2]] - &values[&vec![-2]], qi(4));
    }

    #[test]
    fn vanishing_examples() {
        let l1 = Lattice::from_generators(&[b(1)]);
        let on = VanishSet::Cosets(vec![(l1.clone(), FormalReal::zero())]);
        let s = EquationSystem::new(vec![(DifferenceOperator::delta(b(1)), SymbolicFunction::zero())]);
        let VanishingOutcome::Solution { values, .. } = solve_vanishing_on(&s, &on, Window::new(3)).unwrap() else {
            panic!()
        };
        assert!(values.values().all(Zero::is_zero));

        let s = EquationSystem::new(vec![(DifferenceOperator::translation(b(1)), SymbolicFunction::Constant(qi(1)))]);
        let VanishingOutcome::Obstruction(c) = solve_vanishing_on(&s, &on, Window::new(3)).unwrap() else { panic!() };
        assert!(verify_vanishing_certificate(&s, &c));
        assert_eq!(c.deduction.rhs_at_zero().unwrap(), qi(1));

        let point = SymbolicFunction::point_indicator(&FormalReal::zero());
        let d = DifferenceOperator::delta(b(1));
        let s = EquationSystem::new(vec![(d.clone(), point.apply(&d).unwrap())]);
        let off = VanishSet::OffLattice(l1);
        let VanishingOutcome::Solution { values, .. } = solve_vanishing_on(&s, &off, Window::new(3)).unwrap() else {
            panic!()
        };
        let c = &values[&vec![1]];
        for (k, v) in &values {
            let expected = if k[0] == 0 { c + qi(1) } else { c.clone() };
            assert_eq!(v, &expected);
        }
    }
}
