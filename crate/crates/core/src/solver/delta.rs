//! Path integration for systems `Delta_{b_i} f = g_i`.

use std::collections::{BTreeMap, HashMap, VecDeque};

use num_traits::{Signed, Zero};

use super::{deduce, lattice_solution, EquationSystem, SolutionScope, SolveOutcome, Window};
use crate::error::{Error, Result};
use crate::exact::{FormalReal, Rational};
use crate::function::CoordEvaluator;
use crate::operator::DifferenceOperator;

/// The shifts `b_i` when every operator is a single `Delta_{b_i}`.
pub fn delta_shape(s: &EquationSystem) -> Result<Vec<FormalReal>> {
    s.equations()
        .iter()
        .enumerate()
        .map(|(i, (d, _))| {
            d.as_delta()
                .cloned()
                .ok_or_else(|| Error::Shape(format!("equation {i} is not a single difference")))
        })
        .collect()
}

/// How a tree edge reached a point: `f(child) - f(parent) = sign * g_eq(at)`.
#[derive(Clone)]
struct Step {
    parent: usize,
    eq: usize,
    sign: i8,
    at: usize,
}

/// Integrates `f(x + b_i) = f(x) + g_i(x)` along a breadth-first spanning
/// forest of the window graph, rooting each component at value 0. Any
/// non-tree edge that disagrees closes a loop whose signed sum of
/// right-hand sides is nonzero; the shortest such loop becomes the
/// certificate.
pub fn solve_delta_system(s: &EquationSystem, window: Window) -> Result<SolveOutcome> {
    let shifts = delta_shape(s)?;
    let lattice = s.shift_lattice();
    let rank = lattice.rank();
    let steps: Vec<Vec<i64>> = shifts
        .iter()
        .map(|b| lattice.member(b).expect("shift in its lattice").0)
        .collect();
    let points = window.points(rank);
    let index: HashMap<&[i64], usize> =
        points.iter().enumerate().map(|(i, p)| (p.0.as_slice(), i)).collect();
    let evals: Vec<CoordEvaluator> = s.equations().iter().map(|(_, g)| CoordEvaluator::new(lattice, g)).collect();

    // g_i at every window point, computed lazily
    let mut rhs_cache: Vec<Vec<Option<Rational>>> = vec![vec![None; points.len()]; shifts.len()];
    let mut rhs = |eq: usize, at: usize| -> Result<Rational> {
        if let Some(v) = &rhs_cache[eq][at] {
            return Ok(v.clone());
        }
        let v = evals[eq].eval(&points[at].0)?;
        rhs_cache[eq][at] = Some(v.clone());
        Ok(v)
    };
    let neighbor = |p: usize, eq: usize, dir: i64| -> Option<usize> {
        let q: Vec<i64> = points[p].0.iter().zip(&steps[eq]).map(|(a, b)| a + dir * b).collect();
        if window.contains(&q) {
            index.get(q.as_slice()).copied()
        } else {
            None
        }
    };

    let n = points.len();
    let mut value: Vec<Option<Rational>> = vec![None; n];
    let mut tree: Vec<Option<Step>> = vec![None; n];
    let mut depth = vec![0usize; n];
    for root in 0..n {
        if value[root].is_some() {
            continue;
        }
        value[root] = Some(Rational::zero());
        let mut queue = VecDeque::from([root]);
        while let Some(p) = queue.pop_front() {
            for eq in 0..shifts.len() {
                for dir in [1i64, -1] {
                    let Some(q) = neighbor(p, eq, dir) else { continue };
                    if value[q].is_some() {
                        continue;
                    }
                    // forward: f(q) - f(p) = g(p); backward: f(p) - f(q) = g(q)
                    let (sign, at) = if dir == 1 { (1i8, p) } else { (-1i8, q) };
                    let g = rhs(eq, at)?;
                    let vp = value[p].clone().expect("visited");
                    value[q] = Some(if sign == 1 { vp + g } else { vp - g });
                    tree[q] = Some(Step { parent: p, eq, sign, at });
                    depth[q] = depth[p] + 1;
                    queue.push_back(q);
                }
            }
        }
    }
    let value: Vec<Rational> = value.into_iter().map(|v| v.expect("all visited")).collect();

    // every edge p -> p + b_i inside the window
    let mut worst: Option<(usize, usize, usize, usize, Rational)> = None;
    for p in 0..n {
        for eq in 0..shifts.len() {
            let Some(q) = neighbor(p, eq, 1) else { continue };
            let gap = &value[q] - &value[p] - rhs(eq, p)?;
            if gap.is_zero() {
                continue;
            }
            let len = cycle_len(&tree, &depth, p, q);
            if worst.as_ref().is_none_or(|w| len < w.0) {
                worst = Some((len, p, q, eq, gap));
            }
        }
    }

    if let Some((_, p, q, eq, gap)) = worst {
        // along the tree from p to q, then back over the failing edge
        let mut entries: Vec<(DifferenceOperator, usize)> = Vec::new();
        let mut push = |sign: i64, at: usize, eq: usize| {
            let op = DifferenceOperator::translation(lattice.point(&points[at]))
                .scale(&Rational::from_integer(sign.into()));
            entries.push((op, eq));
        };
        let (up, down) = tree_path(&tree, &depth, p, q);
        for c in up {
            let st = tree[c].as_ref().expect("tree edge");
            push(-i64::from(st.sign), st.at, st.eq);
        }
        for c in down {
            let st = tree[c].as_ref().expect("tree edge");
            push(i64::from(st.sign), st.at, st.eq);
        }
        push(-1, p, eq);
        if gap.is_negative() {
            for (a, _) in entries.iter_mut() {
                *a = a.neg();
            }
        }
        let cert = deduce(s, &entries)?;
        return Ok(SolveOutcome::Unsolvable(cert));
    }

    let values: BTreeMap<Vec<i64>, Rational> =
        points.iter().zip(value).map(|(p, v)| (p.0.clone(), v)).collect();
    let (function, closed) = lattice_solution(lattice, &values)?;
    let scope = if closed && s.rhs_vanishes_off_lattice() && s.is_solved_by(&function).unwrap_or(false) {
        SolutionScope::Global
    } else {
        SolutionScope::Window
    };
    Ok(SolveOutcome::Solution { function, window, scope, values })
}

/// Tree points strictly below the common ancestor on each side: the climb
/// from `p` (child end of each edge, in climbing order) and the descent to
/// `q` (child end of each edge, in descending order).
fn tree_path(tree: &[Option<Step>], depth: &[usize], p: usize, q: usize) -> (Vec<usize>, Vec<usize>) {
    let (mut a, mut b) = (p, q);
    let (mut up, mut down) = (Vec::new(), Vec::new());
    while depth[a] > depth[b] {
        up.push(a);
        a = tree[a].as_ref().expect("non-root").parent;
    }
    while depth[b] > depth[a] {
        down.push(b);
        b = tree[b].as_ref().expect("non-root").parent;
    }
    while a != b {
        up.push(a);
        down.push(b);
        a = tree[a].as_ref().expect("non-root").parent;
        b = tree[b].as_ref().expect("non-root").parent;
    }
    down.reverse();
    (up, down)
}

fn cycle_len(tree: &[Option<Step>], depth: &[usize], p: usize, q: usize) -> usize {
    let (up, down) = tree_path(tree, depth, p, q);
    up.len() + down.len() + 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{qi, Lattice};
    use crate::function::SymbolicFunction;
    use crate::solver::verify_certificate;

    fn b(i: usize) -> FormalReal {
        FormalReal::basis(i)
    }

    fn one() -> SymbolicFunction {
        SymbolicFunction::Constant(qi(1))
    }

    #[test]
    fn triangle_is_unsolvable_with_value_three() {
        let a3 = -(&b(1) + &b(2));
        let s = EquationSystem::new(vec![
            (DifferenceOperator::delta(b(1)), one()),
            (DifferenceOperator::delta(b(2)), one()),
            (DifferenceOperator::delta(a3), one()),
        ]);
        let out = solve_delta_system(&s, Window::new(4)).unwrap();
        let cert = out.certificate().expect("unsolvable");
        assert!(verify_certificate(&s, cert));
        assert_eq!(cert.rhs(), &SymbolicFunction::Constant(qi(3)));
    }

    #[test]
    fn pair_subsystem_is_coordinate_sum() {
        let s = EquationSystem::new(vec![
            (DifferenceOperator::delta(b(1)), one()),
            (DifferenceOperator::delta(b(2)), one()),
        ]);
        let out = solve_delta_system(&s, Window::new(5)).unwrap();
        let SolveOutcome::Solution { function, values, .. } = &out else { panic!("{out:?}") };
        for (k, v) in values {
            assert_eq!(v, &qi(k[0] + k[1]));
        }
        let x = &b(1).scale(&qi(7)) - &b(2).scale(&qi(3));
        assert_eq!(function.evaluate_rational(&x).unwrap(), qi(4));
    }

    #[test]
    fn homogeneous_single_equation() {
        let s = EquationSystem::new(vec![(DifferenceOperator::delta(b(1)), SymbolicFunction::zero())]);
        let out = solve_delta_system(&s, Window::new(3)).unwrap();
        let SolveOutcome::Solution { function, scope, .. } = out else { panic!() };
        assert!(crate::function::zero_test(&function).unwrap().is_zero());
        assert_eq!(scope, SolutionScope::Global);
    }

    #[test]
    fn parallel_equations_conflict() {
        let s = EquationSystem::new(vec![
            (DifferenceOperator::delta(FormalReal::rational(qi(1))), one()),
            (DifferenceOperator::delta(FormalReal::rational(qi(1))), SymbolicFunction::zero()),
        ]);
        let out = solve_delta_system(&s, Window::new(2)).unwrap();
        let cert = out.certificate().unwrap();
        assert!(verify_certificate(&s, cert));
        assert_eq!(cert.rhs(), &one());
        assert_eq!(cert.entries().len(), 2);
    }

    #[test]
    fn unit_coset_rhs_solution_is_global() {
        // Delta_{b1} f = chi_{<b1>} is solved by k1 on <b1>, 0 elsewhere
        let l = Lattice::from_generators(&[b(1)]);
        let s = EquationSystem::new(vec![(
            DifferenceOperator::delta(b(1)),
            SymbolicFunction::coset(l, &FormalReal::zero()),
        )]);
        let SolveOutcome::Solution { scope, .. } = solve_delta_system(&s, Window::new(3)).unwrap() else {
            panic!()
        };
        assert_eq!(scope, SolutionScope::Global);
    }

    #[test]
    fn shape_error() {
        let s = EquationSystem::new(vec![(DifferenceOperator::translation(b(1)), one())]);
        assert!(matches!(solve_delta_system(&s, Window::new(1)), Err(Error::Shape(_))));
    }
}
