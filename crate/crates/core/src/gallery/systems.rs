//! The lattice constructions: telescoping systems, their bounded and
//! unbounded variants, the periodicity family, the point-indicator system
//! and the polynomial witness.

use num_traits::{One, Zero};

use super::{Evidence, GalleryReport, Verdict};
use crate::error::Result;
use crate::exact::{q, qi, render_rational, BasisContext, FormalReal, Lattice, Rational};
use crate::function::{functions_equal, zero_test, LatticeFunction, LatticeRule, SymbolicFunction};
use crate::operator::DifferenceOperator;
use crate::solver::{
    deduce, default_degree_bound, min_sup_norm_on_window, solve_delta_system, solve_finite, solve_polynomial,
    solve_vanishing_on, verify_certificate, verify_norm_bound, Certificate, EquationSystem, SolveOutcome,
    SupNormOutcome, SyzygyBudget, VanishSet, VanishingOutcome, Window,
};

fn b(i: usize) -> FormalReal {
    FormalReal::basis(i)
}

/// `chi` of the subgroup generated by `b_j` for `j` in `1..=n`, `j != i`.
fn coordinate_subgroup(n: usize, i: usize) -> SymbolicFunction {
    let gens: Vec<FormalReal> = (1..=n).filter(|&j| j != i).map(b).collect();
    SymbolicFunction::coset(Lattice::from_generators(&gens), &FormalReal::zero())
}

/// `sum_{i<m} T_{a_1 + ... + a_i}` applied to equation `i`: telescopes to
/// `T_{a_1 + ... + a_m} - T_0` for difference equations.
fn telescoping(s: &EquationSystem, shifts: &[FormalReal], m: usize) -> Result<Certificate> {
    let mut at = FormalReal::zero();
    let mut entries = Vec::with_capacity(m);
    for (i, a) in shifts.iter().take(m).enumerate() {
        entries.push((DifferenceOperator::translation(at.clone()), i));
        at = &at + a;
    }
    deduce(s, &entries)
}

/// Shifts `b_1, ..., b_{n-1}` and `-(b_1 + ... + b_{n-1})`, each with
/// right-hand side 1.
pub fn arbitrary_functions_system(n: usize) -> (BasisContext, EquationSystem) {
    assert!(n >= 2, "need at least two equations");
    let ctx = BasisContext::numbered(n - 1);
    let shifts = arbitrary_shifts(n);
    let one = SymbolicFunction::constant(Rational::one());
    let eqs = shifts.into_iter().map(|a| (DifferenceOperator::delta(a), one.clone())).collect();
    (ctx, EquationSystem::new(eqs))
}

fn arbitrary_shifts(n: usize) -> Vec<FormalReal> {
    let mut shifts: Vec<FormalReal> = (1..n).map(b).collect();
    let total = shifts.iter().fold(FormalReal::zero(), |acc, a| &acc + a);
    shifts.push(-total);
    shifts
}

pub fn arbitrary_functions_report(n: usize, window: Window) -> Result<GalleryReport> {
    let (ctx, s) = arbitrary_functions_system(n);
    let budget = SyzygyBudget::default();
    let mut r = GalleryReport::new("arbitrary", vec![("n", n.to_string()), ("radius", window.radius.to_string())]);
    for drop in 0..n {
        let keep: Vec<usize> = (0..n).filter(|&i| i != drop).collect();
        let sub = s.subsystem(&keep)?;
        let desc = format!("subsystem without equation {drop} is solvable");
        match solve_finite(&sub, window, &budget) {
            SolveOutcome::Solution { function, scope, .. } => {
                let ok = sub.holds_on_window(&function, window)?;
                let text = format!("{} ({scope:?} scope)", function.render(&ctx));
                r.claim(desc, Verdict::from_bool(ok), Evidence::exact(text));
            }
            other => r.claim(desc, Verdict::Fail, Evidence::exact(format!("{other:?}"))),
        }
    }
    let desc = format!("full system is unsolvable with combined right-hand side {n}");
    match solve_finite(&s, window, &budget) {
        SolveOutcome::Unsolvable(c) => {
            let target = SymbolicFunction::constant(qi(n as i64));
            let ok = verify_certificate(&s, &c) && functions_equal(c.rhs(), &target)?.is_zero();
            r.claim(desc, Verdict::from_bool(ok), Evidence::certificate(&c, &ctx));
        }
        other => r.claim(desc, Verdict::Fail, Evidence::exact(format!("{other:?}"))),
    }
    let c = telescoping(&s, &arbitrary_shifts(n), n)?;
    let ok = verify_certificate(&s, &c) && c.rhs_at_zero()? == qi(n as i64);
    r.claim("telescoping the equations in order gives 0 = n", Verdict::from_bool(ok), Evidence::certificate(&c, &ctx));
    Ok(r)
}

/// Independent shifts `b_i` with right-hand sides `2/(n-1)` times the
/// indicator of the subgroup generated by the other shifts.
pub fn bounded_norm_system(n: usize) -> (BasisContext, EquationSystem) {
    assert!(n >= 2, "need at least two equations");
    let w = q(2, n as i64 - 1);
    let eqs = (1..=n)
        .map(|i| {
            let g = coordinate_subgroup(n, i).scale(&w).expect("scaling an indicator");
            (DifferenceOperator::delta(b(i)), g)
        })
        .collect();
    (BasisContext::numbered(n), EquationSystem::new(eqs))
}

/// Hermite coordinate of each `b_i` in a lattice containing it.
fn coordinate_of(lattice: &Lattice, i: usize) -> usize {
    let k = lattice.member(&b(i)).expect("generator of the lattice").0;
    assert_eq!(k.iter().filter(|&&c| c != 0).count(), 1, "coordinate lattice");
    k.iter().position(|&c| c != 0).expect("nonzero")
}

/// `-1 + 2/(n-1) * #{i in J : k_i > 0}` on the full coordinate lattice, 0 off it.
fn bounded_subsystem_solution(n: usize, keep: &[usize]) -> Result<SymbolicFunction> {
    let gens: Vec<FormalReal> = (1..=n).map(b).collect();
    let lattice = Lattice::from_generators(&gens);
    let coords: Vec<usize> = keep.iter().map(|&i| coordinate_of(&lattice, i + 1)).collect();
    let rule = LatticeRule::sum([
        (Rational::one(), LatticeRule::Const(-Rational::one())),
        (q(2, n as i64 - 1), LatticeRule::CountPositive(coords)),
    ]);
    Ok(SymbolicFunction::lattice_function(LatticeFunction::new(lattice, rule, Rational::zero())?))
}

pub fn bounded_norm_report(n: usize, window: Window) -> Result<GalleryReport> {
    use num_traits::Signed;
    let (ctx, s) = bounded_norm_system(n);
    let mut r = GalleryReport::new("bounded", vec![("n", n.to_string()), ("radius", window.radius.to_string())]);
    let full_points: Vec<FormalReal> =
        window.points(n).iter().map(|p| s.shift_lattice().point(p)).collect();
    for drop in 0..n {
        let keep: Vec<usize> = (0..n).filter(|&i| i != drop).collect();
        let sub = s.subsystem(&keep)?;
        let f = bounded_subsystem_solution(n, &keep)?;
        let solves = sub.is_solved_by(&f)?;
        let mut sup = Rational::zero();
        for x in &full_points {
            sup = sup.max(f.evaluate_rational(x)?.abs());
        }
        r.claim(
            format!("subsystem without equation {drop} is solved by the counting formula with |f| <= 1"),
            Verdict::from_bool(solves && sup <= Rational::one()),
            Evidence::exact(format!("{} (window sup {})", f.render(&ctx), render_rational(&sup))),
        );
        let desc = format!("window sup-norm optimum of subsystem without equation {drop} is at most 1");
        match min_sup_norm_on_window(&sub, window)? {
            SupNormOutcome::Optimal { value, .. } => {
                r.claim(desc, Verdict::from_bool(value <= Rational::one()), Evidence::exact(render_rational(&value)))
            }
            SupNormOutcome::Infeasible(c) => r.claim(desc, Verdict::Fail, Evidence::certificate(&c, &ctx)),
        }
    }
    let desc = "full system window sup-norm optimum exceeds 1";
    match min_sup_norm_on_window(&s, window)? {
        SupNormOutcome::Optimal { value, .. } => {
            r.claim(desc, Verdict::from_bool(value > Rational::one()), Evidence::exact(render_rational(&value)))
        }
        SupNormOutcome::Infeasible(c) => r.claim(desc, Verdict::Fail, Evidence::certificate(&c, &ctx)),
    }
    let shifts: Vec<FormalReal> = (1..=n).map(b).collect();
    let c = telescoping(&s, &shifts, n)?;
    let target = q(2 * n as i64, n as i64 - 1);
    let ok = c.rhs_at_zero()? == target && verify_norm_bound(&s, &c, &Rational::one());
    r.claim(
        format!("telescoping deduction has g(0) = {} > ||D||, so no solution has |f| <= 1", render_rational(&target)),
        Verdict::from_bool(ok),
        Evidence::certificate(&c, &ctx),
    );
    Ok(r)
}

/// The first `n` equations `Delta_{b_i} f = chi_{<b_j : j != i, j <= n>}`.
pub fn unbounded_system(n: usize) -> (BasisContext, EquationSystem) {
    assert!(n >= 2, "need at least two equations");
    let eqs = (1..=n).map(|i| (DifferenceOperator::delta(b(i)), coordinate_subgroup(n, i))).collect();
    (BasisContext::numbered(n), EquationSystem::new(eqs))
}

pub fn unbounded_report(n: usize, window: Window) -> Result<GalleryReport> {
    let (ctx, s) = unbounded_system(n);
    let mut r = GalleryReport::new("unbounded", vec![("n", n.to_string()), ("radius", window.radius.to_string())]);
    let shifts: Vec<FormalReal> = (1..=n).map(b).collect();
    for m in 1..=n {
        let c = telescoping(&s, &shifts, m)?;
        let bound = q(m as i64 - 1, 2);
        let ok = c.rhs_at_zero()? == qi(m as i64) && verify_norm_bound(&s, &c, &bound);
        r.claim(
            format!("prefix deduction of length {m} gives f(a_1 + ... + a_{m}) - f(0) = {m}"),
            Verdict::from_bool(ok),
            Evidence::certificate(&c, &ctx),
        );
    }
    for mask in 1u32..(1 << n) {
        let keep: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        let sub = s.subsystem(&keep)?;
        let desc = format!(
            "subsystem {{{}}} is solved by #{{i in J : k_i > 0}} on the window",
            keep.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(", ")
        );
        let out = solve_delta_system(&sub, window)?;
        let Some(values) = out.solution_values() else {
            r.claim(desc, Verdict::Fail, Evidence::exact(format!("{out:?}")));
            continue;
        };
        let lattice = sub.shift_lattice();
        let origin = values[&vec![0; lattice.rank()]].clone();
        let mut bad = None;
        for (k, v) in values {
            let x = lattice.point(&crate::exact::LatticePoint(k.clone()));
            let count = keep.iter().filter(|&&i| x.coord(i + 1) > Rational::zero()).count();
            if v - &origin != qi(count as i64) {
                bad = Some((x, v - &origin));
                break;
            }
        }
        match bad {
            None => r.claim(desc, Verdict::Pass, Evidence::exact(format!("{} window points", values.len()))),
            Some((x, v)) => r.claim(desc, Verdict::Fail, Evidence::witness(&x, &v, &ctx)),
        }
    }
    Ok(r)
}

/// `f_b = chi_{<B \ {b}>}` for `B = {b_1, ..., b_k}` and the system
/// `Delta_b f = 0` for `b` in `B`.
pub fn periodicity_family(k: usize) -> (BasisContext, Vec<SymbolicFunction>, EquationSystem) {
    assert!((2..=8).contains(&k), "family size must be in 2..=8");
    let fs = (1..=k).map(|i| coordinate_subgroup(k, i)).collect();
    let eqs = (1..=k).map(|i| (DifferenceOperator::delta(b(i)), SymbolicFunction::zero())).collect();
    (BasisContext::numbered(k), fs, EquationSystem::new(eqs))
}

pub fn periodicity_report(k: usize) -> Result<GalleryReport> {
    let (ctx, fs, _) = periodicity_family(k);
    let mut r = GalleryReport::new("succ", vec![("k", k.to_string())]);
    for (i, f) in fs.iter().enumerate() {
        let own = f.apply(&DifferenceOperator::delta(b(i + 1)))?;
        let at0 = own.evaluate_rational(&FormalReal::zero())?;
        let nonzero = !zero_test(&own)?.is_zero();
        r.claim(
            format!("f_b{} is not periodic mod b{}", i + 1, i + 1),
            Verdict::from_bool(nonzero && !at0.is_zero()),
            Evidence::witness(&FormalReal::zero(), &at0, &ctx),
        );
        let mut periodic = true;
        for j in (0..k).filter(|&j| j != i) {
            periodic &= zero_test(&f.apply(&DifferenceOperator::delta(b(j + 1)))?)?.is_zero();
        }
        r.claim(
            format!("f_b{} is periodic mod every other element", i + 1),
            Verdict::from_bool(periodic),
            Evidence::exact(f.render(&ctx)),
        );
    }
    Ok(r)
}

/// `Delta_b f = Delta_b chi_{0}` for each listed shift.
pub fn darboux_system(bs: &[FormalReal]) -> Result<EquationSystem> {
    let point = SymbolicFunction::point_indicator(&FormalReal::zero());
    let mut eqs = Vec::with_capacity(bs.len());
    for s in bs {
        let d = DifferenceOperator::delta(s.clone());
        eqs.push((d.clone(), point.apply(&d)?));
    }
    Ok(EquationSystem::new(eqs))
}

pub fn darboux_report(k: usize, window: Window) -> Result<GalleryReport> {
    let ctx = BasisContext::numbered(k);
    let bs: Vec<FormalReal> = (1..=k).map(b).collect();
    let s = darboux_system(&bs)?;
    let mut r = GalleryReport::new("darboux", vec![("k", k.to_string()), ("radius", window.radius.to_string())]);
    let lattice = s.shift_lattice().clone();
    // f - chi_{0} must be constant on the window
    let shape = |values: &std::collections::BTreeMap<Vec<i64>, Rational>| -> Option<Rational> {
        let mut c = None;
        for (kk, v) in values {
            let chi = if kk.iter().all(|&x| x == 0) { Rational::one() } else { Rational::zero() };
            let d = v - chi;
            match &c {
                None => c = Some(d),
                Some(c0) if *c0 != d => return None,
                _ => {}
            }
        }
        c
    };
    let desc = "lattice solutions are chi_{0} plus a constant";
    match solve_finite(&s, window, &SyzygyBudget::default()) {
        SolveOutcome::Solution { values, function, .. } => match shape(&values) {
            Some(c) => r.claim(
                desc,
                Verdict::Pass,
                Evidence::exact(format!("{} (constant {})", function.render(&ctx), render_rational(&c))),
            ),
            None => r.claim(desc, Verdict::Fail, Evidence::exact(function.render(&ctx))),
        },
        other => r.claim(desc, Verdict::Fail, Evidence::exact(format!("{other:?}"))),
    }
    let desc = "requiring f = 0 off the lattice leaves the same shape";
    match solve_vanishing_on(&s, &VanishSet::OffLattice(lattice), window)? {
        VanishingOutcome::Solution { values, .. } => {
            let ok = shape(&values).is_some();
            r.claim(desc, Verdict::from_bool(ok), Evidence::exact(format!("{} window points", values.len())))
        }
        VanishingOutcome::Obstruction(c) => r.claim(desc, Verdict::Fail, Evidence::certificate(&c.deduction, &ctx)),
    }
    r.note("solvability of proper subsystems in the Darboux class is not constructed here");
    Ok(r)
}

/// `{Delta_1 f = 1, Delta_1 f = 0}`: each equation alone has a polynomial
/// solution, the pair has none.
pub fn sc_polynomial_witness() -> Result<GalleryReport> {
    let ctx = BasisContext::numbered(0);
    let d = DifferenceOperator::delta(FormalReal::rational(Rational::one()));
    let s = EquationSystem::new(vec![
        (d.clone(), SymbolicFunction::constant(Rational::one())),
        (d, SymbolicFunction::zero()),
    ]);
    let mut r = GalleryReport::new("scp", vec![]);
    let expected = [SymbolicFunction::polynomial(vec![qi(0), qi(1)]), SymbolicFunction::zero()];
    for (i, want) in expected.iter().enumerate() {
        let sub = s.subsystem(&[i])?;
        let desc = format!("equation {i} alone has a polynomial solution");
        match solve_polynomial(&sub, default_degree_bound(&sub)?)? {
            Some(p) => {
                let f = SymbolicFunction::polynomial(p.coeffs().to_vec());
                let ok = sub.is_solved_by(&f)? && functions_equal(&f, want)?.is_zero();
                r.claim(desc, Verdict::from_bool(ok), Evidence::exact(f.render(&ctx)));
            }
            None => r.claim(desc, Verdict::Fail, Evidence::None),
        }
    }
    let none = solve_polynomial(&s, default_degree_bound(&s)?)?.is_none();
    r.claim("the pair has no polynomial solution", Verdict::from_bool(none), Evidence::None);
    let desc = "the pair is certified unsolvable";
    match solve_finite(&s, Window::new(2), &SyzygyBudget::default()) {
        SolveOutcome::Unsolvable(c) => {
            r.claim(desc, Verdict::from_bool(verify_certificate(&s, &c)), Evidence::certificate(&c, &ctx))
        }
        other => r.claim(desc, Verdict::Fail, Evidence::exact(format!("{other:?}"))),
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(r: &GalleryReport) {
        assert!(r.all_pass(), "{}", r.render_text());
    }

    #[test]
    fn arbitrary_small() {
        check(&arbitrary_functions_report(2, Window::new(3)).unwrap());
        check(&arbitrary_functions_report(3, Window::new(3)).unwrap());
    }

    #[test]
    fn bounded_three() {
        check(&bounded_norm_report(3, Window::new(2)).unwrap());
    }

    #[test]
    fn unbounded_small() {
        check(&unbounded_report(2, Window::new(2)).unwrap());
        check(&unbounded_report(3, Window::new(2)).unwrap());
    }

    #[test]
    fn periodicity() {
        check(&periodicity_report(2).unwrap());
        check(&periodicity_report(5).unwrap());
    }

    #[test]
    fn darboux() {
        for k in 0..=2 {
            check(&darboux_report(k, Window::new(2)).unwrap());
        }
    }

    #[test]
    fn polynomial_witness() {
        check(&sc_polynomial_witness().unwrap());
    }
}
