//! Solvability of finite systems: certificates, window solutions, syzygies,
//! sup-norm bounds and the small special-purpose solvers.

mod certificate;
mod delta;
mod groebner;
mod linear;
mod polynomial;
mod simplex;
mod two_term;
mod window;

pub use certificate::{
    deduce, verify_certificate, verify_norm_bound, verify_vanishing_certificate, Certificate,
    VanishingCertificate,
};
pub use delta::{delta_shape, solve_delta_system};
pub use groebner::{syzygy_certificates, SyzygyBudget};
pub use polynomial::{default_degree_bound, solve_polynomial};
pub use simplex::{minimize, LpOutcome};
pub use two_term::{normalize_two_term, two_term_base_compare, BaseComparison, TwoTermForm, TwoTermKind};
pub use window::{
    eliminate_on_window, min_sup_norm_on_window, solve_vanishing_on, SupNormOutcome, VanishSet,
    VanishingOutcome, WindowSolution,
};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{FormalReal, Lattice, LatticePoint, Rational};
use crate::function::{LatticeFunction, LatticeRule, SymbolicFunction};
use crate::operator::DifferenceOperator;

/// A finite list of equations `D_i f = g_i` with the lattice generated by
/// every shift that occurs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquationSystem {
    equations: Vec<(DifferenceOperator, SymbolicFunction)>,
    shift_lattice: Lattice,
}

impl EquationSystem {
    pub fn new(equations: Vec<(DifferenceOperator, SymbolicFunction)>) -> Self {
        let shifts: Vec<FormalReal> = equations
            .iter()
            .flat_map(|(d, _)| d.shifts().cloned())
            .collect();
        let shift_lattice = Lattice::from_generators(&shifts);
        EquationSystem { equations, shift_lattice }
    }

    pub fn equations(&self) -> &[(DifferenceOperator, SymbolicFunction)] {
        &self.equations
    }

    pub fn len(&self) -> usize {
        self.equations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.equations.is_empty()
    }

    pub fn shift_lattice(&self) -> &Lattice {
        &self.shift_lattice
    }

    /// The equations with the given indices, in that order.
    pub fn subsystem(&self, indices: &[usize]) -> Result<EquationSystem> {
        let mut eqs = Vec::with_capacity(indices.len());
        for &i in indices {
            let eq = self
                .equations
                .get(i)
                .ok_or_else(|| Error::Invalid(format!("equation index {i} out of range")))?;
            eqs.push(eq.clone());
        }
        Ok(EquationSystem::new(eqs))
    }

    /// Checks `D_i f = g_i` exactly on the whole line.
    pub fn is_solved_by(&self, f: &SymbolicFunction) -> Result<bool> {
        for (d, g) in &self.equations {
            if !crate::function::functions_equal(&f.apply(d)?, g)?.is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Checks `D_i f = g_i` exactly at every window point whose stencil
    /// stays inside the window.
    pub fn holds_on_window(&self, f: &SymbolicFunction, window: Window) -> Result<bool> {
        let lattice = &self.shift_lattice;
        let points = window.points(lattice.rank());
        let fe = crate::function::CoordEvaluator::new(lattice, f);
        let values: Vec<Rational> = points.iter().map(|p| fe.eval(&p.0)).collect::<Result<_>>()?;
        let index: std::collections::HashMap<&[i64], usize> =
            points.iter().enumerate().map(|(i, p)| (p.0.as_slice(), i)).collect();
        for (stencil, (_, g)) in self.stencils().iter().zip(&self.equations) {
            let ge = crate::function::CoordEvaluator::new(lattice, g);
            let mut q = Vec::new();
            'points: for p in &points {
                let mut lhs = Rational::from_integer(0.into());
                for (a, s) in stencil {
                    q.clear();
                    q.extend(p.0.iter().zip(s).map(|(x, y)| x + y));
                    if !window.contains(&q) {
                        continue 'points;
                    }
                    lhs += a * &values[index[q.as_slice()]];
                }
                if lhs != ge.eval(&p.0)? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Shifts of each operator in Hermite coordinates of the shift lattice.
    pub(crate) fn stencils(&self) -> Vec<Vec<(Rational, Vec<i64>)>> {
        self.equations
            .iter()
            .map(|(d, _)| {
                d.terms()
                    .iter()
                    .map(|(a, b)| {
                        let k = self.shift_lattice.member(b).expect("shift lies in its own lattice");
                        (a.clone(), k.0)
                    })
                    .collect()
            })
            .collect()
    }

    /// True when every right-hand side is zero off the shift lattice, the
    /// condition for extending a lattice solution by zero.
    pub fn rhs_vanishes_off_lattice(&self) -> bool {
        self.equations.iter().all(|(_, g)| vanishes_off(g, &self.shift_lattice))
    }
}

fn vanishes_off(g: &SymbolicFunction, l: &Lattice) -> bool {
    use num_traits::Zero;
    match g {
        SymbolicFunction::Constant(c) => c.is_zero(),
        SymbolicFunction::Polynomial(p) => p.is_zero(),
        SymbolicFunction::Trig(t) => t.is_zero(),
        SymbolicFunction::Coset(ci) => l.contains_lattice(ci.lattice()) && l.contains(ci.offset()),
        SymbolicFunction::Lattice(lf) => lf.off_value().is_zero() && l.contains_lattice(lf.lattice()),
        SymbolicFunction::LinComb(terms) => terms.iter().all(|(_, h)| vanishes_off(h, l)),
    }
}

/// The box `[-radius, radius]^rank` of a lattice, in Hermite coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Window {
    pub radius: u32,
}

impl Window {
    pub fn new(radius: u32) -> Self {
        Window { radius }
    }

    pub fn contains(&self, p: &[i64]) -> bool {
        p.iter().all(|c| c.unsigned_abs() <= u64::from(self.radius))
    }

    /// All points, ordered by max-norm and then lexicographically.
    pub fn points(&self, rank: usize) -> Vec<LatticePoint> {
        let r = i64::from(self.radius);
        let side = 2 * r + 1;
        let total = (side as usize).pow(rank as u32);
        let mut out = Vec::with_capacity(total);
        let mut k = vec![-r; rank];
        for _ in 0..total {
            out.push(LatticePoint(k.clone()));
            for c in k.iter_mut().rev() {
                if *c < r {
                    *c += 1;
                    break;
                }
                *c = -r;
            }
        }
        out.sort_by(|a, b| a.max_norm().cmp(&b.max_norm()).then_with(|| a.0.cmp(&b.0)));
        out
    }
}

/// Where a returned solution is known to satisfy the system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolutionScope {
    /// Every equation checked exactly on the whole line.
    Global,
    /// Every equation checked at each window point whose stencil stays in
    /// the window; nothing is claimed elsewhere.
    Window,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SolveOutcome {
    Solution {
        function: SymbolicFunction,
        window: Window,
        scope: SolutionScope,
        /// Values on the window points, keyed by Hermite coordinates.
        values: BTreeMap<Vec<i64>, Rational>,
    },
    Unsolvable(Certificate),
    Inconclusive(String),
}

impl SolveOutcome {
    pub fn is_solution(&self) -> bool {
        matches!(self, SolveOutcome::Solution { .. })
    }

    pub fn certificate(&self) -> Option<&Certificate> {
        match self {
            SolveOutcome::Unsolvable(c) => Some(c),
            _ => None,
        }
    }

    pub fn solution_values(&self) -> Option<&BTreeMap<Vec<i64>, Rational>> {
        match self {
            SolveOutcome::Solution { values, .. } => Some(values),
            _ => None,
        }
    }
}

/// Turns window values into a lattice function: a closed form
/// `c + sum u_i k_i + sum v_i pos(i)` when one fits every value, otherwise a
/// table with default 0. Off the lattice the function is 0.
pub(crate) fn lattice_solution(
    lattice: &Lattice,
    values: &BTreeMap<Vec<i64>, Rational>,
) -> Result<(SymbolicFunction, bool)> {
    let rank = lattice.rank();
    let (rule, closed) = match fit_rule(rank, values) {
        Some(rule) => (rule, true),
        None => (
            LatticeRule::Table {
                entries: values
                    .iter()
                    .filter(|(_, v)| !num_traits::Zero::is_zero(*v))
                    .map(|(k, v)| (k.clone(), v.clone()))
                    .collect(),
                default: num_traits::Zero::zero(),
            },
            false,
        ),
    };
    let lf = LatticeFunction::new(lattice.clone(), rule, num_traits::Zero::zero())?;
    Ok((SymbolicFunction::Lattice(lf), closed))
}

fn fit_rule(rank: usize, values: &BTreeMap<Vec<i64>, Rational>) -> Option<LatticeRule> {
    use num_traits::One;
    // unknowns: constant, k_i, pos(i)
    let nvars = 1 + 2 * rank;
    let mut elim = linear::Eliminator::new(false);
    // the unit box determines every parameter; the rest only confirms
    for (k, v) in values.iter().filter(|(k, _)| k.iter().all(|c| c.abs() <= 1)) {
        let mut row = BTreeMap::new();
        row.insert(0, Rational::one());
        for (i, &c) in k.iter().enumerate() {
            if c != 0 {
                row.insert(1 + i, Rational::from_integer(c.into()));
            }
            if c > 0 {
                row.insert(1 + rank + i, Rational::one());
            }
        }
        if let linear::Insert::Inconsistent(_) = elim.insert(row, v.clone(), 0) {
            return None;
        }
    }
    let sol = elim.solve(nvars);
    let rule = assemble_rule(rank, &sol);
    values.iter().all(|(k, v)| &rule.eval(k) == v).then_some(rule)
}

fn assemble_rule(rank: usize, sol: &[Rational]) -> LatticeRule {
    use num_traits::{One, Zero};
    let mut terms = Vec::new();
    if !sol[0].is_zero() {
        terms.push((sol[0].clone(), LatticeRule::Const(Rational::one())));
    }
    for i in 0..rank {
        if !sol[1 + i].is_zero() {
            terms.push((sol[1 + i].clone(), LatticeRule::Coord(i)));
        }
    }
    let pos: Vec<(usize, Rational)> = (0..rank)
        .filter(|i| !sol[1 + rank + i].is_zero())
        .map(|i| (i, sol[1 + rank + i].clone()))
        .collect();
    // equal unit weights read better as a count
    if pos.len() > 1 && pos.iter().all(|(_, c)| c == &pos[0].1) {
        terms.push((pos[0].1.clone(), LatticeRule::CountPositive(pos.iter().map(|(i, _)| *i).collect())));
    } else {
        terms.extend(pos.into_iter().map(|(i, c)| (c, LatticeRule::Positive(i))));
    }
    match terms.len() {
        0 => LatticeRule::Const(Rational::zero()),
        1 if matches!(terms[0].1, LatticeRule::Const(_)) => LatticeRule::Const(terms[0].0.clone()),
        _ => LatticeRule::sum(
            terms
                .into_iter()
                .map(|(c, r)| match r {
                    LatticeRule::Const(_) => (Rational::one(), LatticeRule::Const(c)),
                    r => (c, r),
                }),
        ),
    }
}

/// The decision pipeline for a finite system: contradictory zero-operator
/// equations, the path-integration solver for pure difference systems,
/// syzygy certificates, then window elimination.
pub fn solve_finite(s: &EquationSystem, window: Window, budget: &SyzygyBudget) -> SolveOutcome {
    match solve_finite_inner(s, window, budget) {
        Ok(out) => out,
        Err(e) => SolveOutcome::Inconclusive(e.to_string()),
    }
}

fn solve_finite_inner(s: &EquationSystem, window: Window, budget: &SyzygyBudget) -> Result<SolveOutcome> {
    for (i, (d, g)) in s.equations().iter().enumerate() {
        if d.is_zero() && !crate::function::zero_test(g)?.is_zero() {
            let cert = deduce(s, &[(DifferenceOperator::identity(), i)])?;
            return Ok(SolveOutcome::Unsolvable(cert));
        }
    }
    let nontrivial: Vec<usize> = (0..s.len()).filter(|&i| !s.equations()[i].0.is_zero()).collect();
    if nontrivial.len() < s.len() {
        // zero-operator equations with zero right-hand side carry no information
        let sub = s.subsystem(&nontrivial)?;
        let out = solve_finite_inner(&sub, window, budget)?;
        return Ok(match out {
            SolveOutcome::Unsolvable(c) => SolveOutcome::Unsolvable(c.reindex(&nontrivial, s)?),
            other => other,
        });
    }
    if delta_shape(s).is_ok() {
        return solve_delta_system(s, window);
    }
    let mut syzygy_note = None;
    match syzygy_certificates(s, budget) {
        Ok(certs) => {
            for c in certs {
                if !crate::function::zero_test(c.rhs())?.is_zero() {
                    return Ok(SolveOutcome::Unsolvable(c));
                }
            }
        }
        Err(Error::Resource(msg)) => syzygy_note = Some(msg),
        Err(e) => return Err(e),
    }
    match eliminate_on_window(s, window)? {
        WindowSolution::Inconsistent(cert) => Ok(SolveOutcome::Unsolvable(cert)),
        WindowSolution::Values(values) => {
            if let Some(msg) = syzygy_note {
                return Ok(SolveOutcome::Inconclusive(format!(
                    "window is consistent but the syzygy search stopped: {msg}"
                )));
            }
            let (function, _) = lattice_solution(s.shift_lattice(), &values)?;
            let scope = if s.rhs_vanishes_off_lattice() && s.is_solved_by(&function).unwrap_or(false) {
                SolutionScope::Global
            } else {
                SolutionScope::Window
            };
            Ok(SolveOutcome::Solution { function, window, scope, values })
        }
    }
}
