//! Trigonometric systems `Delta_{2^-n} f = h_n` whose right-hand sides stay
//! large on half of `[0, 1]`, with `h_n = sum_{j<n} c_j E_{j,n}` and
//! `E_{j,n} = Delta_{2^-n} cos(2 pi 2^j x)`.

use num_bigint::BigInt;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;

use super::{Evidence, GalleryReport, Verdict};
use crate::error::Result;
use crate::exact::{render_rational, BasisContext, FormalReal, Rational};
use crate::function::{functions_equal, zero_test, SymbolicFunction};
use crate::operator::DifferenceOperator;
use crate::solver::EquationSystem;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EscapeConfig {
    pub n_max: usize,
    pub samples: usize,
    pub seed: u64,
    /// The doubling search stops at `2^cap_log2`.
    pub cap_log2: u32,
    pub target: f64,
}

impl Default for EscapeConfig {
    fn default() -> Self {
        EscapeConfig { n_max: 4, samples: 200_000, seed: 0xD1FF, cap_log2: 64, target: 0.55 }
    }
}

fn two_pow(e: i64) -> Rational {
    let p = Rational::from_integer(BigInt::one() << e.unsigned_abs());
    if e < 0 {
        p.recip()
    } else {
        p
    }
}

fn step(n: usize) -> DifferenceOperator {
    DifferenceOperator::delta(FormalReal::rational(two_pow(-(n as i64))))
}

pub fn e_jn(j: usize, n: usize) -> Result<SymbolicFunction> {
    SymbolicFunction::cos2pi(two_pow(j as i64))?.apply(&step(n))
}

fn h(coeffs: &[Rational], n: usize) -> Result<SymbolicFunction> {
    let mut terms = Vec::with_capacity(n);
    for (j, c) in coeffs.iter().enumerate().take(n) {
        terms.push((c.clone(), e_jn(j, n)?));
    }
    SymbolicFunction::lin_comb(terms)
}

/// `sum_{j<n} c_j cos(2 pi 2^j x)`, which solves the first `n` equations.
pub fn prefix_solution(coeffs: &[Rational], n: usize) -> Result<SymbolicFunction> {
    let mut terms = Vec::with_capacity(n);
    for (j, c) in coeffs.iter().enumerate().take(n) {
        terms.push((c.clone(), SymbolicFunction::cos2pi(two_pow(j as i64))?));
    }
    SymbolicFunction::lin_comb(terms)
}

/// The first `coeffs.len()` equations.
pub fn escape_system(coeffs: &[Rational]) -> Result<EquationSystem> {
    let mut eqs = Vec::with_capacity(coeffs.len());
    for n in 1..=coeffs.len() {
        eqs.push((step(n), h(coeffs, n)?));
    }
    Ok(EquationSystem::new(eqs))
}

fn e_f64(j: usize, n: usize, x: f64) -> f64 {
    let f = (j as f64).exp2();
    (TAU * f * (x + (-(n as f64)).exp2())).cos() - (TAU * f * x).cos()
}

#[derive(Debug, Clone)]
pub struct EscapeRun {
    pub coefficients: Vec<Rational>,
    /// Sampled measure of `{|h_n| > 1}` for `n = 1, ..., n_max`.
    pub measures: Vec<f64>,
    pub report: GalleryReport,
}

pub fn escape_report(cfg: &EscapeConfig) -> Result<EscapeRun> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let xs: Vec<f64> = (0..cfg.samples).map(|_| rng.gen::<f64>()).collect();
    let mut r = GalleryReport::new(
        "trig",
        vec![
            ("n", cfg.n_max.to_string()),
            ("samples", cfg.samples.to_string()),
            ("seed", format!("{:#x}", cfg.seed)),
        ],
    );
    let ctx = BasisContext::numbered(0);

    let mut vanish = true;
    let mut live = true;
    for n in 1..=8 {
        for j in 0..=8 {
            let z = zero_test(&e_jn(j, n)?)?.is_zero();
            if j >= n {
                vanish &= z;
            } else {
                live &= !z;
            }
        }
    }
    r.claim("E_{j,n} = 0 for all j >= n (j, n <= 8)", Verdict::from_bool(vanish), Evidence::None);
    r.claim("E_{j,n} != 0 for all j < n (n <= 8)", Verdict::from_bool(live), Evidence::None);

    // h_n at every sample, without its last term
    let mut coeffs: Vec<Rational> = Vec::new();
    let mut measures = Vec::new();
    let mut stuck = false;
    for n in 1..=cfg.n_max {
        let base: Vec<f64> = xs
            .iter()
            .map(|&x| {
                coeffs.iter().enumerate().map(|(j, c)| crate::exact::rational_to_f64(c) * e_f64(j, n, x)).sum()
            })
            .collect();
        let last: Vec<f64> = xs.iter().map(|&x| e_f64(n - 1, n, x)).collect();
        let measure = |c: f64| base.iter().zip(&last).filter(|(b, e)| (*b + c * *e).abs() > 1.0).count() as f64 / xs.len() as f64;
        let mut k = 0u32;
        let mut m = measure(1.0);
        if n > 1 {
            while m < cfg.target && k < cfg.cap_log2 {
                k += 1;
                m = measure((k as f64).exp2());
            }
        }
        if n > 1 && m < cfg.target {
            stuck = true;
        }
        coeffs.push(two_pow(k.into()));
        measures.push(m);
        let c = (k as f64).exp2();
        let grid_ok = (0..n).all(|i| {
            let (lo, hi) = (i as f64 / n as f64, (i + 1) as f64 / n as f64);
            xs.iter().zip(base.iter().zip(&last)).any(|(&x, (b, e))| x >= lo && x <= hi && (b + c * e).abs() > 1.0)
        });
        let desc = format!("c_{} = {}: sampled measure of {{|h_{n}| > 1}} is at least {}", n - 1, render_rational(&coeffs[n - 1]), cfg.target);
        let verdict = if m >= cfg.target {
            Verdict::Pass
        } else if stuck {
            Verdict::Inconclusive
        } else {
            Verdict::Fail
        };
        r.claim(desc, verdict, Evidence::Estimate { value: m, samples: xs.len() });
        r.claim(
            format!("every interval of length 1/{n} holds a sample with |h_{n}| > 1"),
            Verdict::from_bool(grid_ok),
            Evidence::None,
        );
    }

    let s = escape_system(&coeffs)?;
    for n in 1..=cfg.n_max {
        let f = prefix_solution(&coeffs, n)?;
        let ok = s.subsystem(&(0..n).collect::<Vec<_>>())?.is_solved_by(&f)?;
        // beyond the prefix the solution must fail
        let next_fails = match n < cfg.n_max {
            true => !functions_equal(&f.apply(&s.equations()[n].0)?, &s.equations()[n].1)?.is_zero(),
            false => true,
        };
        r.claim(
            format!("the prefix trigonometric polynomial solves equations 1..{n} exactly"),
            Verdict::from_bool(ok && next_fails),
            Evidence::exact(f.render(&ctx)),
        );
    }
    // the first right-hand side in closed form
    let h1 = SymbolicFunction::cos2pi(Rational::one())?.scale(&Rational::from_integer((-2).into()))?;
    let first = functions_equal(&s.equations()[0].1, &h1)?.is_zero();
    r.claim("h_1 = -2 cos(2 pi x)", Verdict::from_bool(first), Evidence::exact(h1.render(&ctx)));
    Ok(EscapeRun { coefficients: coeffs, measures, report: r })
}
