//! Exactly representable real functions that are closed under difference
//! operators: the right-hand sides and candidate solutions of a system.

mod coords;
mod rule;
mod zero;

pub use coords::CoordEvaluator;
pub use rule::LatticeRule;
pub use zero::{functions_equal, zero_test, ZeroVerdict};

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{
    rational_to_f64, render_rational, BasisContext, CyclotomicNumber, FormalReal, Lattice,
    PhaseQ, Rational,
};
use crate::operator::DifferenceOperator;

/// Polynomial in `x` with rational coefficients in ascending degree; no
/// trailing zeros, so the zero polynomial is empty.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub struct Polynomial(Vec<Rational>);

impl Polynomial {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Polynomial(coeffs)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.0
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.0.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, c| acc * x + rational_to_f64(c))
    }

    /// `p(x + b)`.
    pub fn shifted(&self, b: &Rational) -> Polynomial {
        let n = self.0.len();
        let mut out = vec![Rational::zero(); n];
        for (k, c) in self.0.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            // c (x + b)^k = c sum_j C(k, j) b^(k-j) x^j
            let mut binom = BigInt::one();
            for j in (0..=k).rev() {
                let bp = pow(b, (k - j) as u32);
                out[j] += c * Rational::from_integer(binom.clone()) * bp;
                // C(k, j-1) = C(k, j) * j / (k - j + 1)
                if j > 0 {
                    binom = binom * BigInt::from(j) / BigInt::from(k - j + 1);
                }
            }
        }
        Polynomial::new(out)
    }

    fn add_scaled(&mut self, other: &Polynomial, c: &Rational) {
        if self.0.len() < other.0.len() {
            self.0.resize(other.0.len(), Rational::zero());
        }
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a += c * b;
        }
        let trimmed = Polynomial::new(std::mem::take(&mut self.0));
        *self = trimmed;
    }
}

fn pow(b: &Rational, e: u32) -> Rational {
    let mut acc = Rational::one();
    for _ in 0..e {
        acc *= b;
    }
    acc
}

/// `constant + sum_l Re(c_l exp(2 pi i l x))` over finitely many frequencies `l > 0`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub struct TrigPoly {
    constant: Rational,
    terms: BTreeMap<Rational, CyclotomicNumber>,
}

impl TrigPoly {
    /// `cos(2 pi (freq x + phase))`.
    pub fn cos(freq: Rational, phase: Rational) -> Result<TrigPoly> {
        let c = CyclotomicNumber::from_phase(&PhaseQ::new(phase))?;
        TrigPoly::from_terms(Rational::zero(), [(freq, c)])
    }

    /// Builds and normalizes: negative frequencies are folded onto positive
    /// ones by conjugation, frequency zero goes into the constant.
    pub fn from_terms(
        constant: Rational,
        terms: impl IntoIterator<Item = (Rational, CyclotomicNumber)>,
    ) -> Result<TrigPoly> {
        let mut out = TrigPoly { constant, terms: BTreeMap::new() };
        for (f, c) in terms {
            out.add_term(f, c)?;
        }
        out.canonicalize();
        Ok(out)
    }

    fn add_term(&mut self, freq: Rational, c: CyclotomicNumber) -> Result<()> {
        if freq.is_zero() {
            let re = c.re()?;
            let r = re.as_rational().ok_or_else(|| {
                Error::Representability("irrational constant in a trigonometric polynomial".into())
            })?;
            self.constant += r;
            return Ok(());
        }
        let (f, c) = if freq.is_negative() { (-freq, c.conj()) } else { (freq, c) };
        let slot = self.terms.entry(f).or_default();
        *slot = slot.add(&c)?;
        Ok(())
    }

    fn canonicalize(&mut self) {
        self.terms.retain(|_, c| !c.is_zero());
        for c in self.terms.values_mut() {
            *c = c.canonical();
        }
    }

    pub fn constant(&self) -> &Rational {
        &self.constant
    }

    pub fn terms(&self) -> &BTreeMap<Rational, CyclotomicNumber> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.constant.is_zero() && self.terms.is_empty()
    }

    fn scaled(&self, c: &Rational) -> TrigPoly {
        let mut out = TrigPoly {
            constant: &self.constant * c,
            terms: self.terms.iter().map(|(f, v)| (f.clone(), v.scale(c))).collect(),
        };
        out.canonicalize();
        out
    }

    fn add(&self, other: &TrigPoly) -> Result<TrigPoly> {
        let mut out = self.clone();
        out.constant += &other.constant;
        for (f, c) in &other.terms {
            out.add_term(f.clone(), c.clone())?;
        }
        out.canonicalize();
        Ok(out)
    }

    /// Exact value at a rational point, as a real cyclotomic number.
    pub fn eval(&self, x: &Rational) -> Result<CyclotomicNumber> {
        let mut acc = CyclotomicNumber::rational(self.constant.clone());
        for (f, c) in &self.terms {
            let z = CyclotomicNumber::from_phase(&PhaseQ::new(f * x))?;
            acc = acc.add(&c.mul(&z)?.re()?)?;
        }
        Ok(acc)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        let mut acc = rational_to_f64(&self.constant);
        for (f, c) in &self.terms {
            let (re, im) = c.to_complex();
            let t = std::f64::consts::TAU * rational_to_f64(f) * x;
            acc += re * t.cos() - im * t.sin();
        }
        acc
    }

    fn render(&self) -> Vec<(Rational, String)> {
        let mut out = Vec::new();
        if !self.constant.is_zero() {
            out.push((self.constant.clone(), String::new()));
        }
        for (f, c) in &self.terms {
            let n = c.order();
            for (k, r) in c.coeffs().iter().enumerate() {
                if r.is_zero() {
                    continue;
                }
                let atom = if k == 0 {
                    format!("cos2pi({})", render_rational(f))
                } else {
                    let ph = Rational::new(BigInt::from(k), BigInt::from(n));
                    format!("cos2pi({}, {})", render_rational(f), render_rational(&ph))
                };
                out.push((r.clone(), atom));
            }
        }
        out
    }
}

/// Indicator of the coset `lattice + offset`; the offset is stored reduced.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CosetIndicator {
    lattice: Lattice,
    offset: FormalReal,
}

impl CosetIndicator {
    pub fn new(lattice: Lattice, offset: &FormalReal) -> Self {
        let offset = lattice.reduce(offset);
        CosetIndicator { lattice, offset }
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn offset(&self) -> &FormalReal {
        &self.offset
    }

    pub fn contains(&self, x: &FormalReal) -> bool {
        self.lattice.contains(&(x - &self.offset))
    }
}

/// A function on the lattice given by a coordinate rule, with one constant
/// value off the lattice: `f(x) = rule(k(x) + shift)` for `x` in the lattice.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LatticeFunction {
    lattice: Lattice,
    rule: LatticeRule,
    shift: Vec<i64>,
    off_value: Rational,
}

impl LatticeFunction {
    pub fn new(lattice: Lattice, rule: LatticeRule, off_value: Rational) -> Result<Self> {
        let shift = vec![0; lattice.rank()];
        LatticeFunction::with_shift(lattice, rule, off_value, shift)
    }

    pub fn with_shift(
        lattice: Lattice,
        rule: LatticeRule,
        off_value: Rational,
        shift: Vec<i64>,
    ) -> Result<Self> {
        if rule.arity() > lattice.rank() {
            return Err(Error::Invalid(format!(
                "rule reads coordinate {} of a rank-{} lattice",
                rule.arity(),
                lattice.rank()
            )));
        }
        if shift.len() != lattice.rank() {
            return Err(Error::Invalid("shift length differs from lattice rank".into()));
        }
        Ok(LatticeFunction { lattice, rule, shift, off_value })
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn rule(&self) -> &LatticeRule {
        &self.rule
    }

    pub fn shift(&self) -> &[i64] {
        &self.shift
    }

    pub fn off_value(&self) -> &Rational {
        &self.off_value
    }

    /// Value at a lattice point given by Hermite coordinates.
    pub fn value_at_coords(&self, k: &[i64]) -> Rational {
        let k: Vec<i64> = k.iter().zip(&self.shift).map(|(a, b)| a + b).collect();
        self.rule.eval(&k)
    }

    pub fn eval(&self, x: &FormalReal) -> Rational {
        match self.lattice.member(x) {
            Some(p) => self.value_at_coords(&p.0),
            None => self.off_value.clone(),
        }
    }
}

/// The closed function classes and their finite linear combinations.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SymbolicFunction {
    Constant(Rational),
    Polynomial(Polynomial),
    Trig(TrigPoly),
    Coset(CosetIndicator),
    Lattice(LatticeFunction),
    LinComb(Vec<(Rational, SymbolicFunction)>),
}

/// An exact real value; rational whenever the class and point permit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Value(CyclotomicNumber);

impl Value {
    pub fn rational(r: Rational) -> Self {
        Value(CyclotomicNumber::rational(r))
    }

    pub fn as_rational(&self) -> Option<Rational> {
        self.0.as_rational()
    }

    pub fn exact(&self) -> &CyclotomicNumber {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }
}

impl SymbolicFunction {
    pub fn zero() -> Self {
        SymbolicFunction::Constant(Rational::zero())
    }

    pub fn constant(c: Rational) -> Self {
        SymbolicFunction::Constant(c)
    }

    pub fn polynomial(coeffs: Vec<Rational>) -> Self {
        let p = Polynomial::new(coeffs);
        match p.degree() {
            None => SymbolicFunction::zero(),
            Some(0) => SymbolicFunction::Constant(p.0[0].clone()),
            Some(_) => SymbolicFunction::Polynomial(p),
        }
    }

    pub fn trig(t: TrigPoly) -> Self {
        if t.terms.is_empty() {
            SymbolicFunction::Constant(t.constant)
        } else {
            SymbolicFunction::Trig(t)
        }
    }

    /// `cos(2 pi freq x)`.
    pub fn cos2pi(freq: Rational) -> Result<Self> {
        Ok(SymbolicFunction::trig(TrigPoly::cos(freq, Rational::zero())?))
    }

    pub fn coset(lattice: Lattice, offset: &FormalReal) -> Self {
        SymbolicFunction::Coset(CosetIndicator::new(lattice, offset))
    }

    /// Indicator of the single point `p`.
    pub fn point_indicator(p: &FormalReal) -> Self {
        SymbolicFunction::coset(Lattice::trivial(), p)
    }

    pub fn lattice_function(f: LatticeFunction) -> Self {
        SymbolicFunction::Lattice(f)
    }

    /// Normalized linear combination: nested sums flattened, polynomial and
    /// trigonometric parts merged into one term each, structurally equal
    /// lattice-supported terms merged.
    pub fn lin_comb(terms: impl IntoIterator<Item = (Rational, SymbolicFunction)>) -> Result<Self> {
        let mut poly = Polynomial::default();
        let mut trig = TrigPoly::default();
        let mut rest: BTreeMap<SymbolicFunction, Rational> = BTreeMap::new();
        let mut stack: Vec<(Rational, SymbolicFunction)> = terms.into_iter().collect();
        stack.reverse();
        while let Some((c, f)) = stack.pop() {
            if c.is_zero() {
                continue;
            }
            match f {
                SymbolicFunction::Constant(v) => {
                    poly.add_scaled(&Polynomial::new(vec![v]), &c);
                }
                SymbolicFunction::Polynomial(p) => poly.add_scaled(&p, &c),
                SymbolicFunction::Trig(t) => {
                    let t = t.scaled(&c);
                    poly.add_scaled(&Polynomial::new(vec![t.constant.clone()]), &Rational::one());
                    let t = TrigPoly { constant: Rational::zero(), terms: t.terms };
                    trig = trig.add(&t)?;
                }
                SymbolicFunction::LinComb(inner) => {
                    for (d, g) in inner.into_iter().rev() {
                        stack.push((&c * d, g));
                    }
                }
                other => {
                    let slot = rest.entry(other).or_insert_with(Rational::zero);
                    *slot += c;
                }
            }
        }
        let mut out: Vec<(Rational, SymbolicFunction)> = Vec::new();
        if !poly.is_zero() {
            out.push((Rational::one(), SymbolicFunction::polynomial(poly.0)));
        }
        if !trig.is_zero() {
            out.push((Rational::one(), SymbolicFunction::trig(trig)));
        }
        out.extend(rest.into_iter().filter(|(_, c)| !c.is_zero()).map(|(f, c)| (c, f)));
        Ok(match out.len() {
            0 => SymbolicFunction::zero(),
            1 if out[0].0.is_one() => out.pop().expect("one term").1,
            _ => SymbolicFunction::LinComb(out),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        SymbolicFunction::lin_comb([(Rational::one(), self.clone()), (Rational::one(), other.clone())])
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        SymbolicFunction::lin_comb([(Rational::one(), self.clone()), (-Rational::one(), other.clone())])
    }

    pub fn scale(&self, c: &Rational) -> Result<Self> {
        SymbolicFunction::lin_comb([(c.clone(), self.clone())])
    }

    /// True only for the literal zero constant; see [`zero_test`] for the
    /// semantic decision.
    pub fn is_trivially_zero(&self) -> bool {
        matches!(self, SymbolicFunction::Constant(c) if c.is_zero())
    }

    /// `(D f)(x) = sum a_i f(x + b_i)`.
    pub fn apply(&self, d: &DifferenceOperator) -> Result<Self> {
        if d.is_zero() {
            return Ok(SymbolicFunction::zero());
        }
        match self {
            SymbolicFunction::Constant(c) => Ok(SymbolicFunction::Constant(c * d.coefficient_sum())),
            SymbolicFunction::Polynomial(p) => {
                let mut acc = Polynomial::default();
                for (a, b) in d.terms() {
                    let b = rational_shift(b, "polynomial")?;
                    acc.add_scaled(&p.shifted(&b), a);
                }
                Ok(SymbolicFunction::polynomial(acc.0))
            }
            SymbolicFunction::Trig(t) => {
                let mut terms = BTreeMap::new();
                for (freq, c) in &t.terms {
                    let mut acc = CyclotomicNumber::zero();
                    for (a, b) in d.terms() {
                        let b = rational_shift(b, "trigonometric polynomial")?;
                        let z = CyclotomicNumber::from_phase(&PhaseQ::new(freq * &b))?;
                        acc = acc.add(&z.scale(a))?;
                    }
                    terms.insert(freq.clone(), c.mul(&acc)?);
                }
                let out = TrigPoly::from_terms(&t.constant * d.coefficient_sum(), terms)?;
                Ok(SymbolicFunction::trig(out))
            }
            SymbolicFunction::Coset(ci) => SymbolicFunction::lin_comb(d.terms().iter().map(|(a, b)| {
                (a.clone(), SymbolicFunction::coset(ci.lattice.clone(), &(&ci.offset - b)))
            })),
            SymbolicFunction::Lattice(lf) => {
                let mut terms = Vec::with_capacity(d.terms().len());
                for (a, b) in d.terms() {
                    let k = lf.lattice.member(b).ok_or_else(|| Error::Lattice {
                        shift: format!("{b:?}"),
                        lattice: format!("{:?}", lf.lattice),
                    })?;
                    let shift = lf.shift.iter().zip(&k.0).map(|(s, t)| s + t).collect();
                    let g = LatticeFunction { shift, ..lf.clone() };
                    terms.push((a.clone(), SymbolicFunction::Lattice(g)));
                }
                SymbolicFunction::lin_comb(terms)
            }
            SymbolicFunction::LinComb(inner) => {
                let mut parts = Vec::with_capacity(inner.len());
                for (c, f) in inner {
                    parts.push((c.clone(), f.apply(d)?));
                }
                SymbolicFunction::lin_comb(parts)
            }
        }
    }

    pub fn translate(&self, b: &FormalReal) -> Result<Self> {
        self.apply(&DifferenceOperator::translation(b.clone()))
    }

    /// Exact value at `x`. Polynomial and trigonometric parts need a rational `x`.
    pub fn evaluate(&self, x: &FormalReal) -> Result<Value> {
        Ok(Value(self.eval_cyclotomic(x)?))
    }

    /// Exact value at `x`, failing when the value is irrational.
    pub fn evaluate_rational(&self, x: &FormalReal) -> Result<Rational> {
        self.evaluate(x)?.as_rational().ok_or_else(|| {
            Error::Representability("value is not rational at this point".into())
        })
    }

    fn eval_cyclotomic(&self, x: &FormalReal) -> Result<CyclotomicNumber> {
        Ok(match self {
            SymbolicFunction::Constant(c) => CyclotomicNumber::rational(c.clone()),
            SymbolicFunction::Polynomial(p) => {
                CyclotomicNumber::rational(p.eval(&rational_point(x, "polynomial")?))
            }
            SymbolicFunction::Trig(t) => t.eval(&rational_point(x, "trigonometric polynomial")?)?,
            SymbolicFunction::Coset(ci) => {
                CyclotomicNumber::rational(if ci.contains(x) { Rational::one() } else { Rational::zero() })
            }
            SymbolicFunction::Lattice(lf) => CyclotomicNumber::rational(lf.eval(x)),
            SymbolicFunction::LinComb(terms) => {
                let mut acc = CyclotomicNumber::zero();
                for (c, f) in terms {
                    acc = acc.add(&f.eval_cyclotomic(x)?.scale(c))?;
                }
                acc
            }
        })
    }

    /// Floating-point value at a real `x`; only for the continuous classes.
    pub fn eval_f64(&self, x: f64) -> Result<f64> {
        Ok(match self {
            SymbolicFunction::Constant(c) => rational_to_f64(c),
            SymbolicFunction::Polynomial(p) => p.eval_f64(x),
            SymbolicFunction::Trig(t) => t.eval_f64(x),
            SymbolicFunction::LinComb(terms) => {
                let mut acc = 0.0;
                for (c, f) in terms {
                    acc += rational_to_f64(c) * f.eval_f64(x)?;
                }
                acc
            }
            SymbolicFunction::Coset(_) | SymbolicFunction::Lattice(_) => {
                return Err(Error::Representability(
                    "lattice-supported functions have no float evaluation".into(),
                ))
            }
        })
    }

    /// Deterministic text form, parseable by the workbench DSL.
    pub fn render(&self, ctx: &BasisContext) -> String {
        let parts = self.render_parts(ctx);
        if parts.is_empty() {
            return "0".into();
        }
        let mut s = String::new();
        for (i, (c, atom)) in parts.iter().enumerate() {
            let neg = c.is_negative();
            if i == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let mag = c.abs();
            if atom.is_empty() {
                s.push_str(&render_rational(&mag));
            } else if mag.is_one() {
                s.push_str(atom);
            } else {
                let _ = write!(s, "{}*{}", render_rational(&mag), atom);
            }
        }
        s
    }

    /// Signed (coefficient, atom) pairs; an empty atom is a bare constant.
    fn render_parts(&self, ctx: &BasisContext) -> Vec<(Rational, String)> {
        match self {
            SymbolicFunction::Constant(c) if c.is_zero() => Vec::new(),
            SymbolicFunction::Constant(c) => vec![(c.clone(), String::new())],
            SymbolicFunction::Polynomial(p) => {
                let cs: Vec<String> = p.0.iter().map(render_rational).collect();
                vec![(Rational::one(), format!("poly({})", cs.join(", ")))]
            }
            SymbolicFunction::Trig(t) => t.render(),
            SymbolicFunction::Coset(ci) => vec![(
                Rational::one(),
                format!("chi({} + {})", ci.lattice.render(ctx), ctx.render(&ci.offset)),
            )],
            SymbolicFunction::Lattice(lf) => {
                let mut s = format!(
                    "latfun({}; {}; {}",
                    lf.lattice.render(ctx),
                    lf.rule.render(),
                    render_rational(&lf.off_value)
                );
                if lf.shift.iter().any(|&k| k != 0) {
                    let k: Vec<String> = lf.shift.iter().map(|c| c.to_string()).collect();
                    let _ = write!(s, "; @({})", k.join(","));
                }
                s.push(')');
                vec![(Rational::one(), s)]
            }
            SymbolicFunction::LinComb(terms) => terms
                .iter()
                .flat_map(|(c, f)| {
                    f.render_parts(ctx)
                        .into_iter()
                        .map(move |(d, atom)| (c * d, atom))
                })
                .collect(),
        }
    }
}

fn rational_shift(b: &FormalReal, class: &str) -> Result<Rational> {
    b.as_rational().ok_or_else(|| {
        Error::Representability(format!("a {class} shifted by a symbolic amount"))
    })
}

fn rational_point(x: &FormalReal, class: &str) -> Result<Rational> {
    x.as_rational().ok_or_else(|| {
        Error::Representability(format!("a {class} evaluated at a symbolic point"))
    })
}
