use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;
use std::ops::{Add, Neg, Sub};

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{render_rational, Rational};
use crate::error::{Error, Result};

/// Coordinate index of the implicit basis element `1`.
pub const UNIT: usize = 0;

/// An ordered list of basis symbols, taken to be linearly independent over
/// the rationals together with `1`.
///
/// Symbol `i` (0-based in `symbols`) has coordinate index `i + 1`; index
/// [`UNIT`] is the rational direction.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct BasisContext {
    symbols: Vec<String>,
}

impl BasisContext {
    pub fn new<S: Into<String>>(symbols: impl IntoIterator<Item = S>) -> Result<Self> {
        let symbols: Vec<String> = symbols.into_iter().map(Into::into).collect();
        let mut seen = HashSet::new();
        for s in &symbols {
            if !is_identifier(s) {
                return Err(Error::Context(format!("invalid basis symbol `{s}`")));
            }
            if !seen.insert(s.as_str()) {
                return Err(Error::Context(format!("duplicate basis symbol `{s}`")));
            }
        }
        Ok(BasisContext { symbols })
    }

    /// `b1, ..., bk`.
    pub fn numbered(k: usize) -> Self {
        BasisContext {
            symbols: (1..=k).map(|i| format!("b{i}")).collect(),
        }
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Number of coordinates including the unit direction.
    pub fn ambient_dim(&self) -> usize {
        self.symbols.len() + 1
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.symbols.iter().position(|s| s == name).map(|i| i + 1)
    }

    /// The formal real for a basis symbol, by 1-based position.
    pub fn symbol(&self, i: usize) -> FormalReal {
        assert!(i >= 1 && i <= self.symbols.len(), "symbol index out of range");
        FormalReal::basis(i)
    }

    pub fn name(&self, index: usize) -> Option<&str> {
        if index == UNIT {
            None
        } else {
            self.symbols.get(index - 1).map(String::as_str)
        }
    }

    pub fn check(&self, x: &FormalReal) -> Result<()> {
        match x.max_index() {
            Some(i) if i > self.symbols.len() => Err(Error::Context(format!(
                "coordinate {i} is outside a basis of {} symbols",
                self.symbols.len()
            ))),
            _ => Ok(()),
        }
    }

    pub fn add(&self, a: &FormalReal, b: &FormalReal) -> Result<FormalReal> {
        self.check(a)?;
        self.check(b)?;
        Ok(a + b)
    }

    pub fn sub(&self, a: &FormalReal, b: &FormalReal) -> Result<FormalReal> {
        self.check(a)?;
        self.check(b)?;
        Ok(a - b)
    }

    pub fn negate(&self, a: &FormalReal) -> Result<FormalReal> {
        self.check(a)?;
        Ok(-a)
    }

    pub fn scale(&self, a: &FormalReal, c: &Rational) -> Result<FormalReal> {
        self.check(a)?;
        Ok(a.scale(c))
    }

    /// Renders as a rational-linear combination, e.g. `1/2*b1 - b2 + 3/4`.
    pub fn render(&self, x: &FormalReal) -> String {
        if x.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        let symbolic = x.coords.iter().filter(|(i, _)| **i != UNIT);
        let unit = x.coords.get(&UNIT).map(|c| (UNIT, c));
        for (idx, (i, c)) in symbolic
            .map(|(i, c)| (*i, c))
            .chain(unit)
            .enumerate()
        {
            let neg = c.is_negative();
            let mag = c.abs();
            if idx == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            match self.name(i) {
                None => out.push_str(&render_rational(&mag)),
                Some(name) => {
                    if mag.is_one() {
                        out.push_str(name);
                    } else {
                        let _ = write!(out, "{}*{}", render_rational(&mag), name);
                    }
                }
            }
        }
        out
    }
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// A real number written as an exact rational vector over the basis
/// `1, b1, ..., bk`. Zero coefficients are never stored, so structural
/// equality is numeric equality.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub struct FormalReal {
    coords: BTreeMap<usize, Rational>,
}

impl FormalReal {
    pub fn zero() -> Self {
        FormalReal::default()
    }

    pub fn rational(r: Rational) -> Self {
        FormalReal::from_coords([(UNIT, r)])
    }

    pub fn basis(index: usize) -> Self {
        FormalReal::from_coords([(index, Rational::one())])
    }

    pub fn from_coords(coords: impl IntoIterator<Item = (usize, Rational)>) -> Self {
        let mut out = FormalReal::zero();
        for (i, c) in coords {
            out.add_coord(i, &c);
        }
        out
    }

    pub fn coords(&self) -> &BTreeMap<usize, Rational> {
        &self.coords
    }

    pub fn coord(&self, index: usize) -> Rational {
        self.coords.get(&index).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coords.is_empty()
    }

    /// True when the number has no symbolic component.
    pub fn is_rational(&self) -> bool {
        self.coords.keys().all(|&i| i == UNIT)
    }

    pub fn as_rational(&self) -> Option<Rational> {
        self.is_rational().then(|| self.coord(UNIT))
    }

    pub fn max_index(&self) -> Option<usize> {
        self.coords.keys().next_back().copied()
    }

    pub fn scale(&self, c: &Rational) -> FormalReal {
        if c.is_zero() {
            return FormalReal::zero();
        }
        FormalReal {
            coords: self.coords.iter().map(|(i, v)| (*i, v * c)).collect(),
        }
    }

    fn add_coord(&mut self, i: usize, c: &Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.coords.entry(i).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.coords.remove(&i);
        }
    }

    pub fn to_f64_with(&self, values: &[f64]) -> f64 {
        self.coords
            .iter()
            .map(|(i, c)| {
                let v = if *i == UNIT { 1.0 } else { values[*i - 1] };
                super::rational_to_f64(c) * v
            })
            .sum()
    }
}

impl Add for &FormalReal {
    type Output = FormalReal;
    fn add(self, rhs: &FormalReal) -> FormalReal {
        let mut out = self.clone();
        for (i, c) in &rhs.coords {
            out.add_coord(*i, c);
        }
        out
    }
}

impl Sub for &FormalReal {
    type Output = FormalReal;
    fn sub(self, rhs: &FormalReal) -> FormalReal {
        let mut out = self.clone();
        for (i, c) in &rhs.coords {
            out.add_coord(*i, &-c);
        }
        out
    }
}

impl Neg for &FormalReal {
    type Output = FormalReal;
    fn neg(self) -> FormalReal {
        FormalReal {
            coords: self.coords.iter().map(|(i, c)| (*i, -c)).collect(),
        }
    }
}

impl Add for FormalReal {
    type Output = FormalReal;
    fn add(self, rhs: FormalReal) -> FormalReal {
        &self + &rhs
    }
}

impl Sub for FormalReal {
    type Output = FormalReal;
    fn sub(self, rhs: FormalReal) -> FormalReal {
        &self - &rhs
    }
}

impl Neg for FormalReal {
    type Output = FormalReal;
    fn neg(self) -> FormalReal {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{q, qi};

    fn ctx() -> BasisContext {
        BasisContext::numbered(3)
    }

    #[test]
    fn cancellation() {
        let c = ctx();
        let a = FormalReal::from_coords([(1, qi(1)), (2, q(1, 2))]);
        let b = FormalReal::from_coords([(1, qi(-1))]);
        let s = c.add(&a, &b).unwrap();
        assert_eq!(s, FormalReal::from_coords([(2, q(1, 2))]));
        assert_eq!(s.coords().len(), 1);
    }

    #[test]
    fn negate_zero_and_scale() {
        let c = ctx();
        assert!(c.negate(&FormalReal::zero()).unwrap().is_zero());
        let a = FormalReal::from_coords([(1, qi(1)), (2, qi(-1))]);
        assert_eq!(
            c.scale(&a, &qi(3)).unwrap(),
            FormalReal::from_coords([(1, qi(3)), (2, qi(-3))])
        );
        assert!(a.scale(&qi(0)).is_zero());
    }

    #[test]
    fn context_mismatch_is_reported() {
        let small = BasisContext::numbered(1);
        let x = FormalReal::basis(2);
        assert!(matches!(small.add(&x, &x), Err(Error::Context(_))));
    }

    #[test]
    fn duplicate_symbols_rejected() {
        assert!(BasisContext::new(["a", "a"]).is_err());
        assert!(BasisContext::new(["1a"]).is_err());
    }

    #[test]
    fn rendering() {
        let c = ctx();
        let x = FormalReal::from_coords([(1, q(1, 2)), (2, qi(-1)), (UNIT, q(3, 4))]);
        assert_eq!(c.render(&x), "1/2*b1 - b2 + 3/4");
        assert_eq!(c.render(&FormalReal::zero()), "0");
        assert_eq!(c.render(&FormalReal::rational(qi(-2))), "-2");
        assert_eq!(c.render(&FormalReal::basis(3).scale(&qi(-1))), "-b3");
    }
}
